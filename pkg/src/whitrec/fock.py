"""Truncated Heisenberg Fock modules, twisted and untwisted.

Mode weights are stored in doubled units throughout, so half-integer modes
of twisted sectors are plain odd integers.  For a doubled weight d > 0:

    J^a_{+d}  acts as  hbar * d/dx^a_d,
    J^a_{-d}  acts as  (s_f * d) * x^a_d,
    J^a_0    acts as  the module's zero-mode value (a Scalar plus possibly
             an hbar^(1/2) alpha0 part), when the sector has one,

giving [J^a_d, J^b_e] = hbar * s_f * d * delta(a,b) delta(d+e,0).  The family
scale s_f is 1/2 for A, C, D (doubled labels halve the true weight) and 1
for B, whose twisted basis vectors have norm 2.
"""

from __future__ import annotations

from fractions import Fraction

from .scalars import GradedSeries, Scalar, ScalarError


class SectorError(ValueError):
    """A mode label does not belong to the module's sector."""


class CapError(ValueError):
    """A strict-mode operation left the truncated module."""


VACUUM = ()


def mono_add(mono, label, count=1):
    d = dict(mono)
    d[label] = d.get(label, 0) + count
    if d[label] == 0:
        del d[label]
    return tuple(sorted(d.items()))


def mono_degree(mono):
    return sum(e for _, e in mono)


def mono_weight(mono):
    return sum(label[1] * e for label, e in mono)


class Caps:
    """Truncation bounds; ``bounded`` drops overflowing terms, otherwise
    overflowing is an error."""

    __slots__ = ("xdeg", "wsum", "h2", "bounded")

    def __init__(self, xdeg=None, wsum=None, h2=None, bounded=True):
        self.xdeg = xdeg
        self.wsum = wsum
        self.h2 = h2
        self.bounded = bounded

    def allows_mono(self, mono):
        if self.xdeg is not None and mono_degree(mono) > self.xdeg:
            return False
        if self.wsum is not None and mono_weight(mono) > self.wsum:
            return False
        return True


class FockSpace:
    """A truncated module: colors, sector parities, zero modes, caps."""

    def __init__(self, ring, colors, parity, zero_modes, s_f, caps=None):
        self.ring = ring
        self.colors = tuple(colors)
        self.parity = dict(parity)  # color -> 0 (even weights) | 1 (odd) | None (any)
        self.zero_modes = dict(zero_modes)  # color -> GradedSeries, or absent
        self.s_f = Fraction(s_f)
        self.caps = caps or Caps()

    def check_label(self, color, w):
        if color not in self.parity:
            raise SectorError(f"color {color} not in module")
        p = self.parity[color]
        if p is not None and w % 2 != p:
            raise SectorError(f"weight {w} has wrong parity for color {color}")
        if w == 0 and color not in self.zero_modes:
            raise SectorError(f"color {color} has no zero-mode")

    def with_caps(self, caps):
        return FockSpace(self.ring, self.colors, self.parity, self.zero_modes, self.s_f, caps)

    def zero(self):
        return FockState(self, {})

    def vacuum(self):
        return FockState(self, {VACUUM: GradedSeries.term(Scalar(self.ring.const(1)))})


class FockState:
    """Finite combination of creation monomials with GradedSeries coefficients."""

    __slots__ = ("space", "terms")

    def __init__(self, space, terms):
        self.space = space
        self.terms = {m: c for m, c in terms.items() if not c.is_zero()}

    @classmethod
    def from_mono(cls, space, labels, scalar=None, h2=0):
        """State coeff * x^(labels); labels is a list of (color, weight)."""
        mono = VACUUM
        for lab in labels:
            mono = mono_add(mono, lab, 1)
        if scalar is None:
            scalar = Scalar(space.ring.const(1))
        return cls(space, {mono: GradedSeries.term(scalar, h2=h2)})

    def is_zero(self):
        return not self.terms

    def coeff(self, mono):
        return self.terms.get(tuple(sorted(mono)), GradedSeries(self.space.ring))

    def __add__(self, other):
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out[m] + c if m in out else c
        return FockState(self.space, out)

    def __sub__(self, other):
        return self + other.scaled(Scalar(self.space.ring.const(-1)))

    def scaled(self, factor, dh2=0):
        """Multiply by a Scalar (optionally with an hbar^(1/2) power) or a GradedSeries."""
        if isinstance(factor, GradedSeries):
            if dh2:
                factor = factor.shifted(dh2)
            return FockState(self.space, {m: c * factor for m, c in self.terms.items()})
        g = GradedSeries.term(factor, h2=dh2)
        return FockState(self.space, {m: c * g for m, c in self.terms.items()})

    def __mul__(self, other):
        """Product as formal functions (used to exponentiate F and Phi)."""
        out = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = m1
                for lab, e in m2:
                    m = mono_add(m, lab, e)
                if not self.space.caps.allows_mono(m):
                    continue
                c = c1 * c2
                out[m] = out[m] + c if m in out else c
        return FockState(self.space, out)

    def prune(self, predicate):
        """Keep only coefficients where predicate(mono, h2, lam) holds."""
        out = {}
        for m, c in self.terms.items():
            kept = {k: v for k, v in c.coeffs.items() if predicate(m, k[0], k[1])}
            if kept:
                out[m] = GradedSeries(self.space.ring, kept, h2_max=c.h2_max)
        return FockState(self.space, out)

    def max_weight(self):
        return max((mono_weight(m) for m in self.terms), default=0)

    def weights_by_color(self):
        """color -> set of doubled weights present (for adaptive mode ranges)."""
        out = {}
        for m in self.terms:
            for (a, w), _ in m:
                out.setdefault(a, set()).add(w)
        return out

    def __eq__(self, other):
        if not isinstance(other, FockState):
            return NotImplemented
        keys = set(self.terms) | set(other.terms)
        return all(self.coeff(k) == other.coeff(k) for k in keys)

    def __str__(self):
        if not self.terms:
            return "0"
        bits = []
        for m in sorted(self.terms):
            xs = "*".join(
                f"x[{a},{w}]" + (f"^{e}" if e > 1 else "") for (a, w), e in m
            ) or "1"
            bits.append(f"({self.terms[m]}) {xs}")
        return " + ".join(bits)

    __repr__ = __str__


# ---------------------------------------------------------------------------
# mode actions


def apply_mode(space, color, w, state):
    """Act with J^color_w (w in signed doubled units) on a state."""
    space.check_label(color, abs(w) if w else 0)
    ring = space.ring
    out = {}
    if w > 0:
        lab = (color, w)
        for m, c in state.terms.items():
            e = dict(m).get(lab, 0)
            if not e:
                continue
            nm = mono_add(m, lab, -1)
            nc = c * GradedSeries.term(Scalar(ring.const(e)), h2=2)
            out[nm] = out[nm] + nc if nm in out else nc
    elif w < 0:
        lab = (color, -w)
        factor = Scalar(ring.const(space.s_f * (-w)))
        for m, c in state.terms.items():
            nm = mono_add(m, lab, 1)
            if not space.caps.allows_mono(nm):
                if space.caps.bounded:
                    continue
                raise CapError(f"creation x[{color},{-w}] leaves the truncated module")
            nc = c * factor
            out[nm] = out[nm] + nc if nm in out else nc
    else:
        z = space.zero_modes[color]
        for m, c in state.terms.items():
            nc = c * z
            out[m] = out[m] + nc if m in out else nc
    st = FockState(space, out)
    if space.caps.h2 is not None:
        cap = space.caps.h2
        st = st.prune(lambda m, h2, lam: h2 <= cap)
    return st


def apply_word(space, word, state):
    """Apply an ordered product of modes, rightmost first."""
    for color, w in reversed(list(word)):
        state = apply_mode(space, color, w, state)
        if state.is_zero():
            break
    return state


def apply_noterm(space, state, scalar, h2, creations, annihs):
    """Apply a normally ordered term: annihilations, then creations, then scale.

    ``annihs`` and ``creations`` hold positive doubled weights.  Returns the
    zero state early when an annihilation misses.
    """
    ring = space.ring
    terms = state.terms
    for (a, w) in annihs:
        lab = (a, w)
        nxt = {}
        for m, c in terms.items():
            e = dict(m).get(lab, 0)
            if not e:
                continue
            nm = mono_add(m, lab, -1)
            nc = c * GradedSeries.term(Scalar(ring.const(e)), h2=2)
            nxt[nm] = nxt[nm] + nc if nm in nxt else nc
        terms = nxt
        if not terms:
            return space.zero()
    mult = space.s_f ** len(creations)
    for (a, w) in creations:
        mult *= w
    factor = GradedSeries.term(scalar * Scalar(ring.const(mult)), h2=h2)
    out = {}
    for m, c in terms.items():
        nm = m
        ok = True
        for lab in creations:
            nm = mono_add(nm, lab, 1)
        if not space.caps.allows_mono(nm):
            if space.caps.bounded:
                continue
            raise CapError("creation leaves the truncated module")
        nc = c * factor
        out[nm] = out[nm] + nc if nm in out else nc
    st = FockState(space, out)
    if space.caps.h2 is not None:
        cap = space.caps.h2
        st = st.prune(lambda m, hh, lam: hh <= cap)
    return st


# ---------------------------------------------------------------------------
# normal ordering


def normal_order(space, word, scalar=None, h2=0):
    """Rewrite an ordered mode word as a normally ordered polynomial.

    Returns a list of (Scalar, h2, creations, annihs) with creations/annihs
    positive doubled-unit labels; all contraction terms carry explicit hbar.
    Zero modes are substituted eagerly.
    """
    ring = space.ring
    if scalar is None:
        scalar = Scalar(ring.const(1))
    out = []

    def rec(seq, sc, hh):
        # substitute zero modes first (they are central)
        for idx, (a, w) in enumerate(seq):
            if w == 0:
                space.check_label(a, 0)
                z = space.zero_modes[a]
                rest = seq[:idx] + seq[idx + 1:]
                for (zh2, _), zc in z.coeffs.items():
                    rec(rest, sc * zc, hh + zh2)
                return
        # find an adjacent (annihilation, creation) pair to commute
        for idx in range(len(seq) - 1):
            (a1, w1), (a2, w2) = seq[idx], seq[idx + 1]
            if w1 > 0 and w2 < 0:
                swapped = seq[:idx] + (seq[idx + 1], seq[idx]) + seq[idx + 2:]
                rec(swapped, sc, hh)
                if a1 == a2 and w1 + w2 == 0:
                    contracted = seq[:idx] + seq[idx + 2:]
                    rec(contracted, sc * Scalar(ring.const(space.s_f * w1)), hh + 2)
                return
        creations = tuple(sorted((a, -w) for a, w in seq if w < 0))
        annihs = tuple(sorted((a, w) for a, w in seq if w > 0))
        out.append((sc, hh, creations, annihs))

    rec(tuple(word), scalar, h2)
    merged = {}
    for sc, hh, cr, an in out:
        key = (hh, cr, an)
        merged[key] = merged[key] + sc if key in merged else sc
    return [(sc, hh, cr, an) for (hh, cr, an), sc in sorted(merged.items()) if not sc.is_zero()]


def apply_nopoly(space, nopoly, state):
    total = space.zero()
    for sc, h2, cr, an in nopoly:
        total = total + apply_noterm(space, state, sc, h2, cr, an)
    return total


# ---------------------------------------------------------------------------
# the bilinear pairing and the involution


def pairing(space_bra, bra, ket):
    """<bra|ket> with <x^a_d | x^a_d> = hbar/(s_f d) and <1|1> = 1.

    Monomials in distinct variables are orthogonal; equal monomials pair to
    prod_labels e! (hbar/(s_f d))^e.  This is the bilinear form fixed by
    moving modes across the pairing without sign, which is the form whose
    Gaiotto-vector norm reproduces the instanton graph sum.
    """
    if bra.space.colors != ket.space.colors or bra.space.s_f != ket.space.s_f:
        raise SectorError("pairing of states from different modules")
    ring = bra.space.ring
    total = GradedSeries(ring)
    for m, cb in bra.terms.items():
        ck = ket.terms.get(m)
        if ck is None:
            continue
        scal = Fraction(1)
        h2 = 0
        for (a, w), e in m:
            for j in range(1, e + 1):
                scal *= Fraction(j) / (bra.space.s_f * w)
            h2 += 2 * e
        total = total + cb * ck * GradedSeries.term(Scalar(ring.const(scal)), h2=h2)
    return total


def iota_terms(space, color, w):
    """The involution iota(J^a_w) = -J^a_{-w} + 2 hbar^(1/2) alpha0 delta_{w,0}
    as a list of (Scalar, h2, label-or-None)."""
    ring = space.ring
    out = [(Scalar(ring.const(-1)), 0, (color, -w))]
    if w == 0:
        try:
            a0 = Scalar(ring.var("alpha0"))
        except ScalarError:
            a0 = Scalar(ring.const(0))
        out.append((a0 * Scalar(ring.const(2)), 1, None))
    return out


def iota_word(space, word):
    """iota applied factorwise to a word, as a list of (Scalar, h2, word)."""
    expansions = [[(Scalar(space.ring.const(1)), 0, ())]]
    for color, w in word:
        branch = []
        for sc, h2, lab in iota_terms(space, color, w):
            branch.append((sc, h2, (lab,) if lab is not None else ()))
        expansions.append(branch)
    terms = [(Scalar(space.ring.const(1)), 0, ())]
    for branch in expansions[1:]:
        nxt = []
        for sc, h2, seq in terms:
            for bsc, bh2, bseq in branch:
                nxt.append((sc * bsc, h2 + bh2, seq + bseq))
        terms = nxt
    return terms
