"""W-algebra generator modes realized as operators on Fock modules.

Four constructions, all acting on the truncated modules of :mod:`.fock`:

* type A at any level, from the quantum Miura factorization,
* type B at self-dual level, from the non-normal-ordered two-sheet product
  with its explicit same-color contraction,
* types D and C at self-dual level, from charge-cancelling bilinears of
  lattice vertex operators expanded by point splitting (with exact twist
  corrections for the half-integer sector of type C).

Operators are materialized lazily: a mode is a recipe that, applied to a
state, enumerates exactly the normally ordered terms that can act within
the module's truncation.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

from .scalars import GradedSeries, Scalar, ScalarError, binom, elementary_symmetric, qring
from .fock import Caps, FockSpace, apply_noterm

EVEN, ODD, ANY = 0, 1, None


class SpecError(ValueError):
    pass


class AlgebraSpec:
    """Family, rank, level and exact parameter values.

    ``q_values`` may be symbolic (the ring's own Q parameters) or explicit
    rationals; distinctness hypotheses are enforced either way.
    """

    def __init__(self, family, rank, level="self-dual", q_values=None, ring=None,
                 alpha0=None, T=None):
        if family not in "ABCD":
            raise SpecError(f"unknown family {family!r}")
        if rank < 2:
            raise SpecError("rank must be at least 2")
        if family != "A" and level != "self-dual":
            raise SpecError(f"family {family} is implemented at self-dual level only")
        self.family = family
        self.rank = rank
        self.level = level
        self.ring = ring if ring is not None else qring(rank)
        if q_values is None:
            self.q = [self.ring.scalar_var(f"Q_{a}") for a in range(1, rank + 1)]
        else:
            self.q = [v if isinstance(v, Scalar) else self.ring.scalar(v) for v in q_values]
        if alpha0 is None:
            alpha0 = self.ring.scalar_var("alpha0") if level == "generic" else self.ring.scalar(0)
        self.alpha0 = alpha0
        self.T = T if T is not None else self.ring.scalar_var("T")
        self._validate()

    def _validate(self):
        r = self.rank
        for a in range(r):
            for b in range(a + 1, r):
                if self.q[a] == self.q[b]:
                    raise SpecError(f"hypothesis violated: Q_{a+1} = Q_{b+1} (Q must be pairwise distinct)")
                if self.family in "BCD" and self.q[a] == -self.q[b]:
                    raise SpecError(f"hypothesis violated: Q_{a+1} = -Q_{b+1} (family {self.family} needs Q_a != -Q_b)")
        if self.family in "BCD":
            for a in range(r):
                if self.q[a].is_zero():
                    raise SpecError(f"hypothesis violated: Q_{a+1} = 0 (family {self.family} needs Q in C*)")

    # -- module layout -------------------------------------------------------

    def colors(self):
        return list(range(1, self.rank + (2 if self.family == "C" else 1)))

    def color_parity(self, color):
        if self.family == "B":
            return ANY
        if self.family == "C" and color == self.rank + 1:
            return ODD
        return EVEN

    def s_f(self):
        return Fraction(1) if self.family == "B" else Fraction(1, 2)

    def zero_mode(self, color):
        """GradedSeries value of J^color_0, or None for twisted colors."""
        if self.family == "C" and color == self.rank + 1:
            return None
        q = self.q[color - 1]
        g = GradedSeries.term(q)
        if self.family == "A" and not self.alpha0.is_zero():
            g = g + GradedSeries.term(-self.alpha0, h2=1)
        return g

    def fock_space(self, caps=None):
        zm = {}
        parity = {}
        for c in self.colors():
            parity[c] = self.color_parity(c)
            z = self.zero_mode(c)
            if z is not None:
                zm[c] = z
        return FockSpace(self.ring, self.colors(), parity, zm, self.s_f(), caps)

    # -- generator bookkeeping -------------------------------------------------

    def generators(self):
        """List of (key, mode_parity, conformal_weight)."""
        r = self.rank
        if self.family == "A":
            return [(("W", i), EVEN, i) for i in range(1, r + 1)]
        if self.family == "B":
            return [(("W", i), ODD if i % 2 else EVEN, i) for i in range(1, 2 * r + 1)]
        if self.family == "D":
            gens = [(("nu", d), EVEN, d) for d in range(2, 2 * r - 1, 2)]
            gens.append((("nutilde",), EVEN, r))
            return gens
        gens = [(("nu", d), EVEN, d) for d in range(2, 2 * r + 1, 2)]
        gens.append((("nutilde",), ODD, r + 1))
        return gens

    def shift(self):
        """(generator key, doubled mode weight, doubled hbar power) of the
        one shifted Whittaker mode; the shift constant is -hbar^(h2/2) T."""
        r = self.rank
        if self.family == "A":
            return ("W", r), 2, r
        if self.family == "B":
            return ("W", 2 * r - 1), 1, 2 * r - 1
        if self.family == "D":
            return ("nu", 2 * r - 2), 2, 2 * r - 2
        return ("nutilde",), 1, r + 1

    def shift_h2(self):
        return self.shift()[2]

    def specialize(self, q_values, ring=None):
        """Same algebra with explicit rational Q values (fast backend)."""
        ring = ring or qring(0, extra=("alpha0", "alpha", "T"))
        alpha0 = None
        if self.level == "generic":
            alpha0 = ring.scalar_var("alpha0")
        return AlgebraSpec(self.family, self.rank, self.level,
                           q_values=[Fraction(v) for v in q_values], ring=ring, alpha0=alpha0)


# ---------------------------------------------------------------------------
# Miura structure constants


def n_coeff(a, b):
    """Weighted count of derivative placements in the Miura expansion.

    a: strictly increasing color tuple, b: nonnegative integers, |a| = |b|.
    """
    if len(a) != len(b):
        raise SpecError("n_coeff needs |a| = |b|")
    out = 1
    acc = 0
    for u in range(len(a)):
        out *= binom(a[u] - acc - (u + 1), b[u])
        if out == 0:
            return 0
        acc += b[u]
    return out


@lru_cache(maxsize=None)
def _compositions(total, parts):
    """All tuples of `parts` nonnegative integers summing to total."""
    if parts == 0:
        return [()] if total == 0 else []
    return [(h,) + t for h in range(total + 1) for t in _compositions(total - h, parts - 1)]


def _deriv_factor(b, p_true):
    """z-mode coefficient of d^b J at mode p: (-1)^b (p+1)...(p+b)."""
    out = Fraction(1)
    for u in range(1, b + 1):
        out *= p_true + u
    return out if b % 2 == 0 else -out


# ---------------------------------------------------------------------------
# generic slot-assignment enumeration


def _enumerate_modes(slots, total, weight_sets, wcap):
    """Yield tuples of signed doubled weights, one per slot, summing to total.

    Each slot is (color, parity, zero_allowed).  Positive picks are
    annihilations and are restricted to weights present in the state
    (weight_sets); negative picks are creations bounded by wcap; 0 is a
    zero-mode pick where allowed.
    """
    options = []
    for color, parity, zero_ok in slots:
        opts = []
        present = weight_sets.get(color, ())
        for d in sorted(present):
            if parity is ANY or d % 2 == parity:
                opts.append(d)
        if zero_ok:
            opts.append(0)
        start = 1 if parity in (ANY, ODD) else 2
        for d in range(start, wcap + 1):
            if parity is ANY or d % 2 == parity:
                opts.append(-d)
        options.append(opts)
    mins = [min(o) if o else 0 for o in options]
    maxs = [max(o) if o else 0 for o in options]
    suffix_min = [0] * (len(slots) + 1)
    suffix_max = [0] * (len(slots) + 1)
    for i in range(len(slots) - 1, -1, -1):
        suffix_min[i] = suffix_min[i + 1] + mins[i]
        suffix_max[i] = suffix_max[i + 1] + maxs[i]

    def rec(i, remaining, acc):
        if i == len(slots):
            if remaining == 0:
                yield tuple(acc)
            return
        if remaining < suffix_min[i] or remaining > suffix_max[i]:
            return
        for d in options[i]:
            acc.append(d)
            yield from rec(i + 1, remaining - d, acc)
            acc.pop()

    yield from rec(0, total, [])


def _split_word(colors_weights):
    """Split signed picks into (creations, annihs) label tuples."""
    creations = tuple(sorted((c, -d) for c, d in colors_weights if d < 0))
    annihs = tuple(sorted((c, d) for c, d in colors_weights if d > 0))
    return creations, annihs


# ---------------------------------------------------------------------------
# the operator wrapper


class WMode:
    """A lazily applied generator mode W(key)_m on the module of `spec`."""

    def __init__(self, spec, key, m):
        self.spec = spec
        self.key = key
        self.m = m  # doubled units
        par = dict((k, p) for k, p, _ in spec.generators())
        if key not in par:
            raise SpecError(f"no generator {key} in family {spec.family}")
        if par[key] is not ANY and m % 2 != par[key]:
            raise SpecError(f"mode weight {m} has wrong parity for generator {key}")

    def terms(self, weight_sets, wcap):
        fam = self.spec.family
        if fam == "A":
            yield from _terms_a(self.spec, self.key[1], self.m, weight_sets, wcap)
        elif fam == "B":
            yield from _terms_b(self.spec, self.key[1], self.m, weight_sets, wcap)
        else:
            yield from _terms_cd(self.spec, self.key, self.m, weight_sets, wcap)

    def apply(self, state):
        space = state.space
        if space.caps.wsum is None:
            raise SpecError("W-mode application needs a weight-capped module")
        weight_sets = state.weights_by_color()
        out = space.zero()
        for sc, h2, cr, an in self.terms(weight_sets, space.caps.wsum):
            out = out + apply_noterm(space, state, sc, h2, cr, an)
        return out


def w_mode(spec, key, m):
    return WMode(spec, key, m)


# ---------------------------------------------------------------------------
# type A: Miura modes


def miura_mode(spec, i, m):
    if spec.family != "A":
        raise SpecError("miura_mode is the type A construction")
    if not 1 <= i <= spec.rank:
        raise SpecError(f"generator index {i} out of range [1, {spec.rank}]")
    return WMode(spec, ("W", i), m)


def _terms_a(spec, i, m, weight_sets, wcap):
    ring = spec.ring
    r = spec.rank
    selfdual = spec.alpha0.is_zero()
    jmin = i if selfdual else 1
    for j in range(jmin, i + 1):
        extra = i - j
        pref = spec.alpha0 ** extra if extra else Scalar(ring.const(1))
        for a in _incr_tuples(r, j):
            for b in _compositions(extra, j):
                n = n_coeff(a, b)
                if n == 0:
                    continue
                base = pref * Scalar(ring.const(n))
                slots = [(c, EVEN, True) for c in a]
                for picks in _enumerate_modes(slots, m, weight_sets, wcap):
                    fac = Fraction(1)
                    for bl, d in zip(b, picks):
                        fac *= _deriv_factor(bl, Fraction(d, 2))
                    if fac == 0:
                        continue
                    sc0 = base * Scalar(ring.const(fac))
                    word = [(c, d) for c, d in zip(a, picks) if d != 0]
                    zeros = [c for c, d in zip(a, picks) if d == 0]
                    cr, an = _split_word(word)
                    for zsc, zh2 in _zero_products(spec, zeros):
                        yield sc0 * zsc, extra + zh2 + 0, cr, an


@lru_cache(maxsize=None)
def _incr_tuples(r, j):
    from itertools import combinations

    return [tuple(c) for c in combinations(range(1, r + 1), j)]


def _zero_products(spec, zero_colors):
    """Expand a product of zero modes into (Scalar, h2) branches."""
    out = [(Scalar(spec.ring.const(1)), 0)]
    for c in zero_colors:
        z = spec.zero_mode(c)
        nxt = []
        for sc, h2 in out:
            for (zh2, _), zc in z.coeffs.items():
                nxt.append((sc * zc, h2 + zh2))
        out = nxt
    return out


# ---------------------------------------------------------------------------
# type B: two-sheet product with same-color contraction


def btype_mode(spec, i, m):
    if spec.family != "B":
        raise SpecError("btype_mode is the type B construction")
    if not 1 <= i <= 2 * spec.rank:
        raise SpecError(f"generator index {i} out of range [1, {2 * spec.rank}]")
    return WMode(spec, ("W", i), m)


def _terms_b(spec, i, m, weight_sets, wcap):
    # u^(2r-i) coefficient of prod_b (u^2 + u A_b + B_b), with
    # A_b = 2 sum_{d odd} J_d zeta^{-d-1} dzeta,
    # B_b = -:J(zeta)J(-zeta): + hbar (dzeta)^2/(4 zeta^2); mode weights in
    # doubled units, and an overall 2^(-i).
    ring = spec.ring
    r = spec.rank
    pref = Fraction(1, 2 ** i)
    for roles in _role_choices(r, i):
        singles = [c for c, role in roles if role == 1]
        doubles = [c for c, role in roles if role == 2]
        # a double is either a J-pair or the contraction scalar
        for contracted in _subsets(doubles):
            live = [c for c in doubles if c not in contracted]
            nctr = len(contracted)
            base = pref * Fraction(2) ** len(singles) * Fraction(1, 4) ** nctr
            slots = [(c, ODD, False) for c in singles]
            for c in live:
                slots.append((c, ANY, True))  # first of the pair, at +zeta
                slots.append((c, ANY, True))  # second of the pair, at -zeta
            for picks in _enumerate_modes(slots, m, weight_sets, wcap):
                word = []
                zeros = []
                for (c, _, _), d in zip(slots, picks):
                    if d == 0:
                        zeros.append(c)
                    else:
                        word.append((c, d))
                # each live pair carries -(-1)^l, l the minus-sheet pick
                sign = 1
                for idx in range(len(singles), len(slots), 2):
                    l = picks[idx + 1]
                    sign *= -1 if l % 2 == 0 else 1
                cr, an = _split_word(word)
                sc0 = Scalar(ring.const(base * sign))
                for zsc, zh2 in _zero_products(spec, zeros):
                    yield sc0 * zsc, 2 * nctr + zh2, cr, an


def _role_choices(r, i):
    """Assign each color in [r] a role 0/1/2 with total i."""
    out = []

    def rec(c, left, acc):
        if c > r:
            if left == 0:
                out.append(tuple(acc))
            return
        remaining = r - c + 1
        for role in (0, 1, 2):
            if role <= left <= role + 2 * (remaining - 1):
                acc.append((c, role))
                rec(c + 1, left - role, acc)
                acc.pop()

    rec(1, i, [])
    return out


def _subsets(items):
    from itertools import chain, combinations

    return list(chain.from_iterable(combinations(items, k) for k in range(len(items) + 1)))


# ---------------------------------------------------------------------------
# types D and C: lattice bilinears by point splitting


@lru_cache(maxsize=None)
def _twist_correction_series(order):
    """Taylor coefficients nu_c of t*N(t,w) in tau = t/w for the Z2-twisted
    sector: t*N = (2+tau)(1+tau)^(-1/2)/4 + 1/2.  nu_0 = 1, nu_1 = 0."""
    half = [Fraction(1)]
    for n in range(1, order + 1):
        half.append(half[-1] * Fraction(-(2 * n - 1), 2 * n))  # binom(-1/2, n)
    out = []
    for c in range(order + 1):
        v = Fraction(1, 4) * (2 * half[c] + (half[c - 1] if c >= 1 else 0))
        if c == 0:
            v += Fraction(1, 2)
        out.append(v)
    return tuple(out)


@lru_cache(maxsize=None)
def _taylor_multisets(total):
    """Multisets of slot orders k >= 1 (as sorted tuples) with given sum,
    together with the symmetry coefficient prod 1/(e_k! * (k!)^e_k)."""
    out = []

    def rec(minpart, left, acc):
        if left == 0:
            from collections import Counter

            cnt = Counter(acc)
            coeff = Fraction(1)
            for k, e in cnt.items():
                fk = 1
                for u in range(2, k + 1):
                    fk *= u
                fe = 1
                for u in range(2, e + 1):
                    fe *= u
                coeff /= Fraction(fe) * Fraction(fk) ** e
            out.append((tuple(acc), coeff))
            return
        for k in range(minpart, left + 1):
            acc.append(k)
            rec(k, left - k, acc)
            acc.pop()

    rec(1, total, [])
    return tuple(out)


def lattice_bilinear_field(spec, color, sign, d, m, weight_sets, wcap):
    """Terms of the mode at doubled weight m of the charge-cancelling
    bilinear of weight d built on `color` with sign `sign`.

    Yields (Scalar, h2, creations, annihs).  The expansion is
    [t^(d-1)] N(t,w) :exp(sign * sum_k (t^k/k!) d^(k-1)J(w)):, where N is
    1/t untwisted and carries the exact Z2-twist corrections on a twisted
    color; the hbar power of a term with p current factors is (d - p)/2 in
    doubled units d - p.
    """
    ring = spec.ring
    twisted = spec.zero_mode(color) is None
    nu = _twist_correction_series(d) if twisted else None
    parity = spec.color_parity(color)
    c_range = [0] if not twisted else [c for c in range(d + 1) if c != 1]
    for c_n in c_range:
        nu_c = Fraction(1) if not twisted else nu[c_n]
        if nu_c == 0:
            continue
        for orders, sym in _taylor_multisets(d - c_n):
            base = nu_c * sym
            slots = [(color, parity, not twisted) for _ in orders]
            for picks in _enumerate_modes(slots, m, weight_sets, wcap):
                fac = Fraction(1)
                for k, l in zip(orders, picks):
                    fac *= _deriv_factor(k - 1, Fraction(l, 2))
                if fac == 0:
                    continue
                p = len(orders)
                word = [(color, l) for l in picks if l != 0]
                nzero = sum(1 for l in picks if l == 0)
                cr, an = _split_word(word)
                q = spec.q[color - 1] if nzero else None
                sc = Scalar(ring.const(base * fac * sign ** p))
                if nzero:
                    sc = sc * q ** nzero
                yield sc, d - p, cr, an


def _terms_cd(spec, key, m, weight_sets, wcap):
    ring = spec.ring
    if key[0] == "nu":
        # Normalization: the raw charge-cancelling bilinear has leading
        # symbol (2/d!) chi^d; the generators here are scaled by d!/2 so
        # that the leading symbol is the power sum, pinning
        # pi1(W^d_m) = sum_a d Q_a^(d-1) J^a_m.  At d = 2 the scale is 1
        # and nu^2 = sum_a :J^a J^a: exactly.
        d = key[1]
        fact = Fraction(1)
        for u in range(3, d + 1):
            fact *= u
        scale = Scalar(ring.const(fact))
        for color in spec.colors():
            for sign in (1, -1):
                for sc, h2, cr, an in lattice_bilinear_field(spec, color, sign, d, m, weight_sets, wcap):
                    yield sc * scale, h2, cr, an
        return
    # the top generator: product of one current per color (distinct colors
    # commute); zero-mode picks contribute Q factors, and the term's hbar
    # power is zero throughout.
    slots = [(c, spec.color_parity(c), spec.zero_mode(c) is not None) for c in spec.colors()]
    for picks in _enumerate_modes(slots, m, weight_sets, wcap):
        word = []
        zeros = []
        for (c, _, _), l in zip(slots, picks):
            if l == 0:
                zeros.append(c)
            else:
                word.append((c, l))
        cr, an = _split_word(word)
        sc = Scalar(ring.const(1))
        for c in zeros:
            sc = sc * spec.q[c - 1]
        yield sc, 0, cr, an


def dtype_mode(spec, which, m):
    if spec.family != "D":
        raise SpecError("dtype_mode is the type D construction")
    return WMode(spec, which, m)


def ctype_mode(spec, which, m):
    if spec.family != "C":
        raise SpecError("ctype_mode is the type C construction")
    return WMode(spec, which, m)


# ---------------------------------------------------------------------------
# degree-one projections


def pi1_exact(spec, key, m):
    """Closed-form degree-1 coefficients {color: Scalar} of the mode."""
    ring = spec.ring
    r = spec.rank
    q = spec.q
    if spec.family == "A":
        i = key[1]
        return {a: elementary_symmetric(ring, [q[b] for b in range(r) if b != a - 1], i - 1)
                for a in range(1, r + 1)}
    if spec.family == "B":
        i = key[1]
        ext = q + [-v for v in reversed(q)]  # Q_{2r+1-b} = -Q_b
        out = {}
        for b in range(1, r + 1):
            drop_b = [v for j, v in enumerate(ext) if j != b - 1]
            drop_m = [v for j, v in enumerate(ext) if j != 2 * r - b]
            if i % 2 == 1:
                e1 = elementary_symmetric(ring, drop_b, i - 1)
                e2 = elementary_symmetric(ring, drop_m, i - 1)
                out[b] = (e1 + e2) * Scalar(ring.const(Fraction(1, 2 ** i)))
            else:
                e1 = elementary_symmetric(ring, drop_b, i - 1)
                e2 = elementary_symmetric(ring, drop_m, i - 1)
                out[b] = (e1 - e2) * Scalar(ring.const(Fraction(1, 2 ** i)))
        return out
    if key[0] == "nu":
        d = key[1]
        out = {a: q[a - 1] ** (d - 1) * Scalar(ring.const(d)) for a in range(1, r + 1)}
        if spec.family == "C":
            out[r + 1] = Scalar(ring.const(0))
        return out
    # top generator
    if spec.family == "D":
        prod = Scalar(ring.const(1))
        for v in q:
            prod = prod * v
        return {a: prod / q[a - 1] for a in range(1, r + 1)}
    prod = Scalar(ring.const(1))
    for v in q:
        prod = prod * v
    out = {a: Scalar(ring.const(0)) for a in range(1, r + 1)}
    out[r + 1] = prod
    return out


def pi1_measured(spec, op, m):
    """Degree-1 coefficients read off from the operator action.

    Applies the mode to each single-excitation state x^b_m and reads the
    vacuum coefficient at exactly one power of hbar (doubled 2), which
    isolates the J^b_m term of the expansion.
    """
    caps = Caps(xdeg=2, wsum=2 * m + 2, h2=8, bounded=True)
    space = spec.fock_space(caps)
    out = {}
    from .fock import VACUUM, FockState, mono_add

    for b in spec.colors():
        p = spec.color_parity(b)
        if p is not ANY and m % 2 != p:
            continue
        mono = mono_add(VACUUM, (b, m), 1)
        state = FockState(space, {mono: GradedSeries.term(Scalar(spec.ring.const(1)))})
        res = op.apply(state)
        out[b] = res.coeff(VACUUM).get(2, 0)
    return out
