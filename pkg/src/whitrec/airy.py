"""Normal-form Airy structures and the degree-by-degree solver.

The normal form packages, for each color a and positive mode weight m, the
linear combination H^a_m of shifted generator modes whose degree-one part
is exactly J^a_m.  The solver then extracts the unique coefficients
F_{g,n} of log Z by ascending Euler characteristic 2g-2+n: each unknown is
solved from the one constraint whose leading hbar-derivative hits it, and
every other constraint at that level is asserted, which turns uniqueness
into a running consistency test of the subalgebra property.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations_with_replacement

from .scalars import GradedSeries, Scalar
from .fock import Caps, FockState, VACUUM, mono_degree, mono_weight
from .wgen import ANY, AlgebraSpec, SpecError, WMode, elementary_symmetric, pi1_exact

EVEN, ODD = 0, 1


class ConsistencyError(RuntimeError):
    """An asserted (not solved) constraint failed: empirical counterexample
    to the extraneous-subset property.  Carries a reproducer."""

    def __init__(self, msg, reproducer=None):
        super().__init__(msg)
        self.reproducer = reproducer


class NormalForm:
    """H^a_m = sum_i coeff(a, i) W(i)_m - shift, with pi1(H^a_m) = J^a_m."""

    def __init__(self, spec):
        self.spec = spec
        self.combos = {}  # (color, parity) -> list of (Scalar, genkey)
        self._build()
        self._verify_pi1()

    # -- construction per family ------------------------------------------------

    def _build(self):
        spec = self.spec
        ring = spec.ring
        r = spec.rank
        q = spec.q
        if spec.family == "A":
            for ai, a in enumerate(spec.colors()):
                den = Scalar(ring.const(1))
                for b in range(r):
                    if b != ai:
                        den = den * (q[b] - q[ai])
                inv = den.inverse()
                combo = [((-q[ai]) ** (r - i) * inv, ("W", i)) for i in range(1, r + 1)]
                self.combos[(a, EVEN)] = combo
        elif spec.family == "B":
            for ai, a in enumerate(spec.colors()):
                den = Scalar(ring.const(1))
                for b in range(r):
                    if b != ai:
                        den = den * (q[ai] * q[ai] - q[b] * q[b])
                inv = den.inverse()
                even = []
                odd = []
                for ip in range(1, r + 1):
                    even.append((-(Scalar(ring.const(2 ** (2 * ip - 1))) * q[ai] ** (2 * r - 2 * ip - 1)) * inv, ("W", 2 * ip)))
                    odd.append((Scalar(ring.const(2 ** (2 * ip - 2))) * q[ai] ** (2 * r - 2 * ip) * inv, ("W", 2 * ip - 1)))
                self.combos[(a, EVEN)] = even
                self.combos[(a, ODD)] = odd
        elif spec.family == "D":
            qsq = [v * v for v in q]
            prodq = Scalar(ring.const(1))
            for v in q:
                prodq = prodq * v
            for ai, a in enumerate(spec.colors()):
                den = Scalar(ring.const(1))
                for b in range(r):
                    if b != ai:
                        den = den * (qsq[ai] - qsq[b])
                inv = den.inverse()
                others = [qsq[b] for b in range(r) if b != ai]
                combo = []
                # inverse Vandermonde row: A_{a,i} = (-1)^(r-i) e_{r-i}(Q_b^2, b != a) / den
                coeff_top = q[ai] * Scalar(ring.const((-1) ** (r - 1))) \
                    * elementary_symmetric(ring, others, r - 1) * inv / prodq
                combo.append((coeff_top, ("nutilde",)))
                for i in range(2, r + 1):
                    d = 2 * i - 2
                    c = q[ai] * Scalar(ring.const(Fraction((-1) ** (r - i), d))) \
                        * elementary_symmetric(ring, others, r - i) * inv
                    combo.append((c, ("nu", d)))
                self.combos[(a, EVEN)] = combo
        else:  # C
            qsq = [v * v for v in q]
            prodq = Scalar(ring.const(1))
            for v in q:
                prodq = prodq * v
            for ai in range(r):
                a = ai + 1
                den = Scalar(ring.const(1))
                for b in range(r):
                    if b != ai:
                        den = den * (qsq[ai] - qsq[b])
                inv = (q[ai] * den).inverse()
                others = [qsq[b] for b in range(r) if b != ai]
                combo = []
                for d in range(2, 2 * r + 1, 2):
                    c = Scalar(ring.const(Fraction((-1) ** (r - d // 2), d))) \
                        * elementary_symmetric(ring, others, r - d // 2) * inv
                    combo.append((c, ("nu", d)))
                self.combos[(a, EVEN)] = combo
            self.combos[(r + 1, ODD)] = [(prodq.inverse(), ("nutilde",))]

    def _verify_pi1(self):
        spec = self.spec
        one = Scalar(spec.ring.const(1))
        zero = Scalar(spec.ring.const(0))
        for (a, parity), combo in self.combos.items():
            m = 2 if parity == EVEN else 1
            acc = {}
            for coeff, key in combo:
                for b, c in pi1_exact(spec, key, m).items():
                    acc[b] = acc.get(b, zero) + coeff * c
            for b, c in acc.items():
                want = one if b == a else zero
                if not (c == want):
                    raise SpecError(
                        f"normal form broken: pi1(H^{a}) has J^{b} coefficient {c}, expected {want}")

    # -- shifts -------------------------------------------------------------------

    def shift_scalar(self, a, m):
        """Scalar c with H^a_m = sum coeff W - hbar^(shift_h2/2) c; None if unshifted."""
        key, mshift, _h2 = self.spec.shift()
        if m != mshift:
            return None
        combo = self.combos.get((a, m % 2))
        if combo is None:
            return None
        for coeff, k in combo:
            if k == key:
                return coeff * self.spec.T
        return None

    def parities(self, a):
        return [p for (c, p) in self.combos if c == a]

    def constraint_pairs(self, max_m):
        """All (color, m) with 1 <= m <= max_m in the module's sectors."""
        out = []
        for (a, parity) in self.combos:
            for m in range(1, max_m + 1):
                if m % 2 == parity:
                    out.append((a, m))
        return sorted(out)


def build_normal_form(spec, T=None):
    if T is not None:
        spec = AlgebraSpec(spec.family, spec.rank, spec.level, q_values=spec.q,
                           ring=spec.ring, alpha0=spec.alpha0, T=T)
    return NormalForm(spec)


# ---------------------------------------------------------------------------
# the F table


class FgnTable:
    """(g2, sorted label tuple) -> Scalar, with labels (color, k2) in doubled
    units; entries absent below the existence threshold are zero."""

    def __init__(self, spec, max_euler):
        self.spec = spec
        self.max_euler = max_euler
        self.entries = {}

    @staticmethod
    def canon(labels):
        return tuple(sorted(labels))

    def get(self, g2, labels):
        return self.entries.get((g2, self.canon(labels)), Scalar(self.spec.ring.const(0)))

    def set(self, g2, labels, value):
        if not value.is_zero():
            self.entries[(g2, self.canon(labels))] = value

    def weight_bound(self, g2):
        """Largest allowed sum of doubled k: shift_h2/2 * sum(k) <= g."""
        return (2 * g2) // self.spec.shift_h2()

    def in_support(self, g2, labels):
        n = len(labels)
        if g2 - 2 + n <= 0:
            return False
        return sum(k for _, k in labels) <= self.weight_bound(g2)

    def max_weight(self):
        ecap = self.max_euler
        return (2 * (ecap + 1)) // self.spec.shift_h2()

    def product_weight_bound(self, grade_cap):
        """Largest total doubled weight of a product of entries with total
        grading <= grade_cap: sum g2_i <= 2 * grade_cap over the factors."""
        return (4 * grade_cap) // self.spec.shift_h2()

    def nonzero_items(self):
        return sorted(self.entries.items())

    def to_json_dict(self, pipeline="airy"):
        rows = []
        for (g2, labels), v in self.nonzero_items():
            rows.append({"g2": g2, "labels": [[a, k] for a, k in labels], "coeff": str(v)})
        return {
            "schema": "fgn-table/1",
            "pipeline": pipeline,
            "family": self.spec.family,
            "rank": self.spec.rank,
            "max_euler": self.max_euler,
            "entries": rows,
        }


def _label_multisets(spec, n, wmax):
    """Sorted n-tuples of (color, k2) with total doubled weight <= wmax."""
    singles = []
    for c in spec.colors():
        parity = spec.color_parity(c)
        start = 1 if parity in (ANY, ODD) else 2
        for k in range(start, wmax + 1):
            if parity is ANY or k % 2 == parity:
                singles.append((c, k))
    out = []
    for combo in combinations_with_replacement(sorted(singles), n):
        if sum(k for _, k in combo) <= wmax:
            out.append(combo)
    return out


# ---------------------------------------------------------------------------
# exponentials of the free energy


def f_state(space, table, grade_cap):
    """F as a state: coefficient of x^mu at hbar key g2-2 times 1/n! sym."""
    ring = space.ring
    out = {}
    for (g2, labels), val in table.entries.items():
        n = len(labels)
        if g2 - 2 + n > grade_cap:
            continue
        mono = {}
        for lab in labels:
            mono[lab] = mono.get(lab, 0) + 1
        mono = tuple(sorted(mono.items()))
        # the n!-normalized symmetric sum contributes multinomial/n! = 1/prod(mult!)
        mult = Fraction(1)
        for _, e in mono:
            for j in range(2, e + 1):
                mult /= j
        g = GradedSeries.term(val * Scalar(ring.const(mult)), h2=g2 - 2)
        out[mono] = out[mono] + g if mono in out else g
    return FockState(space, out)


def state_exp(space, f, grade_cap):
    """exp(f) truncated to terms with h2 + |mono| <= grade_cap."""

    def keep(mono, h2, lam):
        return h2 + mono_degree(mono) <= grade_cap

    f = f.prune(keep)
    term = space.vacuum()
    total = space.vacuum()
    k = 1
    while True:
        term = (term * f).prune(keep)
        if term.is_zero():
            break
        term = term.scaled(Scalar(space.ring.const(Fraction(1, k))))
        total = total + term
        k += 1
    return total


# ---------------------------------------------------------------------------
# the solver


def solve_fgn(nf, max_euler, schedule=None, assert_all=True, progress=None):
    """The unique F-table annihilated by the normal form, to 2g-2+n <= max_euler.

    schedule: optional permutation hook; a callable mapping the list of
    level unknowns to a processing order (uniqueness makes the result
    invariant, which `verify` exercises).
    """
    spec = nf.spec
    ring = spec.ring
    table = FgnTable(spec, max_euler)
    wmax_all = table.max_weight()
    for level in range(1, max_euler + 1):
        unknowns = []
        for n in range(1, level + 2):
            g2 = level + 2 - n
            if g2 < 0:
                continue
            wb = table.weight_bound(g2)
            for labels in _label_multisets(spec, n, min(wb, wmax_all)):
                unknowns.append((g2, labels))
        if schedule is not None:
            unknowns = schedule(list(unknowns))
        caps = Caps(xdeg=level + 2, wsum=wmax_all + 2, h2=level + 3, bounded=True)
        space = spec.fock_space(caps)
        z = state_exp(space, f_state(space, table, level), level)
        applied = {}

        def hz(a, m):
            if (a, m) in applied:
                return applied[(a, m)]
            combo = nf.combos[(a, m % 2)]
            total = space.zero()
            for coeff, key in combo:
                wk = (key, m)
                if wk not in applied:
                    applied[wk] = WMode(spec, key, m).apply(z)
                total = total + applied[wk].scaled(coeff)
            sft = nf.shift_scalar(a, m)
            if sft is not None:
                total = total - z.scaled(sft, dh2=spec.shift_h2())
            applied[(a, m)] = total
            return total

        solved = {}
        for g2, labels in unknowns:
            a, m = labels[0]
            rest = labels[1:]
            mono = {}
            for lab in rest:
                mono[lab] = mono.get(lab, 0) + 1
            mono = tuple(sorted(mono.items()))
            val = hz(a, m).coeff(mono).get(g2)
            mult = Fraction(1)
            for _, e in mono:
                for j in range(2, e + 1):
                    mult *= j
            solved[(g2, labels)] = -val * Scalar(ring.const(mult))
        for key, v in solved.items():
            table.set(key[0], key[1], v)
        if progress:
            progress(level, len(solved))
        if assert_all:
            _assert_level(nf, table, level, solved)
    return table


def _assert_level(nf, table, level, solved):
    """Re-check every constraint slot at this level against the completed
    table; failures are evidence against the conjectured subalgebra
    property and raise with a reproducer."""
    spec = nf.spec
    wmax_all = table.max_weight()
    caps = Caps(xdeg=level + 2, wsum=wmax_all + 2, h2=level + 3, bounded=True)
    space = spec.fock_space(caps)
    z = state_exp(space, f_state(space, table, level), level)
    applied = {}

    def hz(a, m):
        if (a, m) in applied:
            return applied[(a, m)]
        total = space.zero()
        for coeff, key in nf.combos[(a, m % 2)]:
            wk = (key, m)
            if wk not in applied:
                applied[wk] = WMode(spec, key, m).apply(z)
            total = total + applied[wk].scaled(coeff)
        sft = nf.shift_scalar(a, m)
        if sft is not None:
            total = total - z.scaled(sft, dh2=spec.shift_h2())
        applied[(a, m)] = total
        return total

    checked = set()
    for (g2, labels) in solved:
        for pos in range(len(labels)):
            a, m = labels[pos]
            rest = labels[:pos] + labels[pos + 1:]
            key = (g2, (a, m), tuple(sorted(rest)))
            if key in checked:
                continue
            checked.add(key)
            mono = {}
            for lab in rest:
                mono[lab] = mono.get(lab, 0) + 1
            mono = tuple(sorted(mono.items()))
            residual = hz(a, m).coeff(mono).get(g2)
            if not residual.is_zero():
                raise ConsistencyError(
                    f"constraint H^{a}_{m} disagrees at g2={g2}, labels={labels}: residual {residual}",
                    reproducer={"family": spec.family, "rank": spec.rank, "level": level,
                                "g2": g2, "labels": list(labels), "constraint": [a, m]})


# ---------------------------------------------------------------------------
# Whittaker residuals


def whittaker_residual(nf, table, key, m):
    """Apply the original generator mode W(key)_m to Z = e^F and return the
    nonzero coefficients of (W - shift) Z on all complete gradings.

    A coefficient at grading G receives contributions only from Z-terms of
    grading <= G - 1, so coefficients up to max_euler + 1 are complete and
    must vanish identically."""
    spec = nf.spec
    zcap = table.max_euler
    wmax_all = table.max_weight()
    caps = Caps(xdeg=zcap + 3, wsum=wmax_all + 2, h2=zcap + 4, bounded=True)
    space = spec.fock_space(caps)
    z = state_exp(space, f_state(space, table, zcap), zcap)
    res = WMode(spec, key, m).apply(z)
    skey, sm, sh2 = spec.shift()
    if key == skey and m == sm:
        res = res - z.scaled(spec.T, dh2=sh2)
    bad = {}
    for mono, g in res.terms.items():
        for (h2, lam), v in g.coeffs.items():
            if h2 + mono_degree(mono) <= zcap + 1 and not v.is_zero():
                bad[(mono, h2)] = v
    return bad


# ---------------------------------------------------------------------------
# Nekrasov-Shatashvili rearrangement of the expansion


def ns_rearrange(table):
    """Reindex a generic-level table in (hbar, alpha = hbar^(1/2) alpha0).

    Returns {(g2, labels): Scalar in Q(Q)[alpha][T]} with
    F^alpha_{g} = sum_d alpha^d [alpha0^d] F_{g + d/2}; the alpha0-degree
    bound <= 2g keeps every target index nonnegative.
    """
    spec = table.spec
    ring = spec.ring
    alpha = ring.var("alpha")
    out = {}
    for (g2s, labels), val in table.entries.items():
        num, den = val.reduce()
        for d in range(num.degree_in("alpha0") + 1):
            part = num.coeff_of("alpha0", d)
            if part.is_zero():
                continue
            tgt = (g2s - d, labels)
            add = Scalar(part * alpha ** d, {den: 1})
            out[tgt] = out[tgt] + add if tgt in out else add
    return {k: v for k, v in out.items() if not v.is_zero()}
