"""Exact coefficient arithmetic.

Everything downstream computes with four layers of coefficients:

* ``Poly`` -- sparse multivariate polynomials over Q in named parameters,
  with a fixed graded-lexicographic monomial order,
* ``Scalar`` -- reduced fractions of polynomials; denominators are kept as a
  multiset of canonical factors so that the cancellations occurring in
  practice (products of Q-differences) are cheap exact divisions,
* ``GradedSeries`` -- polynomials in hbar^(1/2) (tracked in doubled units,
  so integer exponents) and in Lambda, with Scalar coefficients,
* ``LaurentSeries`` -- formal Laurent series on a disk with an explicit
  retained window; reading outside the window raises, it never returns 0.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import gcd as _int_gcd


class TruncationError(Exception):
    """A series window was too small for the requested operation."""


class ScalarError(ValueError):
    pass


# ---------------------------------------------------------------------------
# parameter rings


class ParamRing:
    """An ordered list of parameter names fixing the monomial order.

    The canonical order is Q_1 < ... < Q_r < alpha0 < alpha < T; rings used
    in tests may declare extra spectator names.
    """

    def __init__(self, names):
        names = tuple(names)
        if len(set(names)) != len(names):
            raise ScalarError("parameter names must be unique within a ring")
        self.names = names
        self.index = {n: i for i, n in enumerate(names)}
        self.zero_exps = (0,) * len(names)

    def __repr__(self):
        return f"ParamRing({', '.join(self.names)})"

    def var(self, name):
        """The parameter as a Poly."""
        if name not in self.index:
            raise ScalarError(f"unknown parameter {name!r}")
        exps = [0] * len(self.names)
        exps[self.index[name]] = 1
        return Poly(self, {tuple(exps): Fraction(1)})

    def const(self, c):
        c = Fraction(c)
        if c == 0:
            return Poly(self, {})
        return Poly(self, {self.zero_exps: c})

    def scalar(self, c):
        return Scalar(self.const(c))

    def scalar_var(self, name):
        return Scalar(self.var(name))


def qring(rank, extra=("alpha0", "alpha", "T")):
    """The canonical ring for a rank-``rank`` algebra."""
    return ParamRing([f"Q_{a}" for a in range(1, rank + 1)] + list(extra))


# ---------------------------------------------------------------------------
# polynomials


def _mono_key(exps):
    # graded lex: total degree first, then exponents with later variables
    # weighing higher (Q_1 < ... < T).
    return (sum(exps), exps)


class Poly:
    """Sparse multivariate polynomial over Q; immutable once built."""

    __slots__ = ("ring", "terms", "_hash")

    def __init__(self, ring, terms):
        self.ring = ring
        self.terms = {e: c for e, c in terms.items() if c != 0}
        self._hash = None

    # -- basics ------------------------------------------------------------

    def is_zero(self):
        return not self.terms

    def is_const(self):
        return not self.terms or (len(self.terms) == 1 and self.ring.zero_exps in self.terms)

    def const_value(self):
        if not self.is_const():
            raise ScalarError("not a constant polynomial")
        return self.terms.get(self.ring.zero_exps, Fraction(0))

    def degree(self):
        return max((sum(e) for e in self.terms), default=-1)

    def degree_in(self, name):
        i = self.ring.index[name]
        return max((e[i] for e in self.terms), default=-1)

    def leading_monomial(self):
        return max(self.terms, key=_mono_key)

    def leading_coeff(self):
        return self.terms[self.leading_monomial()]

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.ring is other.ring and self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self.is_const() and self.const_value() == other
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    # -- arithmetic ----------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, Poly):
            if other.ring is not self.ring:
                raise ScalarError("mixed parameter rings")
            return other
        if isinstance(other, (int, Fraction)):
            return self.ring.const(other)
        return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, Fraction(0)) + c
        return Poly(self.ring, out)

    __radd__ = __add__

    def __neg__(self):
        return Poly(self.ring, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        if not self.terms or not other.terms:
            return Poly(self.ring, {})
        out = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, Fraction(0)) + c1 * c2
        return Poly(self.ring, out)

    __rmul__ = __mul__

    def __pow__(self, n):
        if n < 0:
            raise ScalarError("negative power of a Poly; use Scalar")
        out = self.ring.const(1)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def exact_div(self, other):
        """Return self/other if the division is exact, else None."""
        other = self._coerce(other)
        if other is None or other.is_zero():
            raise ScalarError("division by zero polynomial")
        if self.is_zero():
            return self
        if other.is_const():
            c = other.const_value()
            return Poly(self.ring, {e: v / c for e, v in self.terms.items()})
        rem = dict(self.terms)
        qout = {}
        lm, lc = other.leading_monomial(), other.leading_coeff()
        while rem:
            e = max(rem, key=_mono_key)
            c = rem[e]
            qe = tuple(a - b for a, b in zip(e, lm))
            if any(x < 0 for x in qe):
                return None
            qc = c / lc
            qout[qe] = qout.get(qe, Fraction(0)) + qc
            for e2, c2 in other.terms.items():
                ne = tuple(a + b for a, b in zip(qe, e2))
                nv = rem.get(ne, Fraction(0)) - qc * c2
                if nv == 0:
                    rem.pop(ne, None)
                else:
                    rem[ne] = nv
        return Poly(self.ring, qout)

    # -- evaluation ----------------------------------------------------------

    def subs(self, values):
        """Substitute some parameters by Fractions; returns a Poly."""
        idx = {self.ring.index[n]: Fraction(v) for n, v in values.items()}
        out = {}
        for e, c in self.terms.items():
            for i, v in idx.items():
                c = c * v ** e[i]
            ne = tuple(0 if i in idx else x for i, x in enumerate(e))
            out[ne] = out.get(ne, Fraction(0)) + c
        return Poly(self.ring, out)

    def coeff_of(self, name, power):
        """Coefficient of name**power, a Poly in the remaining parameters."""
        i = self.ring.index[name]
        out = {}
        for e, c in self.terms.items():
            if e[i] == power:
                ne = tuple(0 if j == i else x for j, x in enumerate(e))
                out[ne] = out.get(ne, Fraction(0)) + c
        return Poly(self.ring, out)

    # -- display -------------------------------------------------------------

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for e in sorted(self.terms, key=_mono_key, reverse=True):
            c = self.terms[e]
            factors = []
            for name, p in zip(self.ring.names, e):
                if p == 1:
                    factors.append(name)
                elif p > 1:
                    factors.append(f"{name}^{p}")
            body = "*".join(factors)
            if not body:
                parts.append(str(c))
            elif c == 1:
                parts.append(body)
            elif c == -1:
                parts.append(f"-{body}")
            else:
                parts.append(f"{c}*{body}")
        s = " + ".join(parts).replace("+ -", "- ")
        return s

    __repr__ = __str__


# ---------------------------------------------------------------------------
# polynomial gcd (primitive PRS, recursing on the number of variables)


def _frac_gcd(a, b):
    num = _int_gcd(a.numerator, b.numerator)
    den = a.denominator * b.denominator // _int_gcd(a.denominator, b.denominator)
    return Fraction(num, den)


def _content(p):
    c = Fraction(0)
    for v in p.terms.values():
        c = _frac_gcd(c, abs(v))
        if c == 1:
            break
    return c if c else Fraction(1)


def _main_var(p, q):
    for i in range(len(p.ring.names)):
        if any(e[i] for e in p.terms) or any(e[i] for e in q.terms):
            return i
    return None


def _as_univariate(p, i):
    """dict degree -> Poly coefficient (in the other variables)."""
    out = {}
    for e, c in p.terms.items():
        d = e[i]
        ne = tuple(0 if j == i else x for j, x in enumerate(e))
        coeff = out.setdefault(d, {})
        coeff[ne] = coeff.get(ne, Fraction(0)) + c
    return {d: Poly(p.ring, t) for d, t in out.items()}


def _from_univariate(ring, i, coeffs):
    out = {}
    for d, poly in coeffs.items():
        for e, c in poly.terms.items():
            ne = list(e)
            ne[i] = d
            out[tuple(ne)] = c
    return Poly(ring, out)


def _poly_content_in(p, i):
    """gcd of the coefficients of p viewed as univariate in variable i."""
    coeffs = list(_as_univariate(p, i).values())
    g = coeffs[0]
    for c in coeffs[1:]:
        g = poly_gcd(g, c)
        if g.is_const():
            break
    return g


def _pseudo_rem(u, v, i, ring):
    """Pseudo-remainder of univariate(dict) u by v in variable i."""
    du = max(u)
    dv = max(v)
    lv = v[dv]
    u = dict(u)
    while u and max(u) >= dv:
        du = max(u)
        lu = u[du]
        # lv * u - lu * x^(du-dv) * v
        nu = {}
        for d, c in u.items():
            nu[d] = c * lv
        for d, c in v.items():
            nd = d + du - dv
            nu[nd] = nu.get(nd, ring.const(0)) - c * lu
        u = {d: c for d, c in nu.items() if not c.is_zero()}
    return u


def poly_gcd(p, q):
    """gcd over Q[params], normalized with positive leading coefficient."""
    if p.is_zero():
        return _normalize_factor(q)[0] if not q.is_zero() else q
    if q.is_zero():
        return _normalize_factor(p)[0]
    if p.is_const() or q.is_const():
        return p.ring.const(1)
    i = _main_var(p, q)
    if not any(e[i] for e in p.terms) or not any(e[i] for e in q.terms):
        # main variable missing from one of them: gcd divides the content
        if any(e[i] for e in p.terms):
            return poly_gcd(_poly_content_in(p, i), q)
        if any(e[i] for e in q.terms):
            return poly_gcd(p, _poly_content_in(q, i))
    ring = p.ring
    cp, cq = _poly_content_in(p, i), _poly_content_in(q, i)
    cont = poly_gcd(cp, cq)
    pp = p.exact_div(cp)
    qq = q.exact_div(cq)
    u = _as_univariate(pp, i)
    v = _as_univariate(qq, i)
    if max(u) < max(v):
        u, v = v, u
    while True:
        r = _pseudo_rem(u, v, i, ring)
        if not r:
            break
        rp = _from_univariate(ring, i, r)
        rc = _poly_content_in(rp, i)
        rp = rp.exact_div(rc)
        u, v = v, _as_univariate(rp, i)
        if max(v) == 0:
            return _normalize_factor(cont)[0]
    g = _from_univariate(ring, i, v)
    g = g.exact_div(_poly_content_in(g, i))
    return _normalize_factor(cont * g)[0]


def _normalize_factor(p):
    """Scale p so its graded-lex leading coefficient is +1; return (poly, scale).

    scale is the Fraction by which the original must be multiplied to get
    the normalized polynomial.
    """
    if p.is_zero():
        return p, Fraction(1)
    lc = p.leading_coeff()
    s = Fraction(1) / lc
    return Poly(p.ring, {e: c * s for e, c in p.terms.items()}), s


# ---------------------------------------------------------------------------
# scalars: reduced rational functions with factored denominators


class Scalar:
    """num / prod(factors**e); factors are monic canonical non-constant polys.

    Construction cancels each denominator factor against the numerator by
    exact trial division, which covers every cancellation arising in the
    solvers; ``reduce()`` additionally performs a full gcd and is used for
    serialization and for ``rf_reduce``.
    """

    __slots__ = ("num", "den")

    def __init__(self, num, den=()):
        if not isinstance(num, Poly):
            raise ScalarError("Scalar numerator must be a Poly")
        facs = {}
        for f, e in den if not isinstance(den, dict) else den.items():
            if e == 0:
                continue
            if f.is_zero():
                raise ScalarError("zero denominator")
            if e < 0:
                num = num * f ** (-e)
                continue
            if f.is_const():
                num = num * (Fraction(1) / f.const_value()) ** e
                continue
            f, s = _normalize_factor(f)
            num = num * Fraction(s) ** e
            facs[f] = facs.get(f, 0) + e
        # cancel factors into the numerator where the division is exact
        out = {}
        for f, e in sorted(facs.items(), key=lambda kv: (_mono_key(kv[0].leading_monomial()), len(kv[0].terms))):
            while e > 0 and not num.is_zero():
                q = num.exact_div(f)
                if q is None:
                    break
                num = q
                e -= 1
            if e:
                out[f] = e
        if num.is_zero():
            out = {}
        self.num = num
        self.den = tuple(sorted(out.items(), key=lambda kv: (_mono_key(kv[0].leading_monomial()), tuple(sorted(kv[0].terms.items())))))

    # -- helpers -------------------------------------------------------------

    @property
    def ring(self):
        return self.num.ring

    def is_zero(self):
        return self.num.is_zero()

    def den_poly(self):
        d = self.ring.const(1)
        for f, e in self.den:
            d = d * f ** e
        return d

    def _coerce(self, other):
        if isinstance(other, Scalar):
            return other
        if isinstance(other, (int, Fraction)):
            return Scalar(self.ring.const(other))
        if isinstance(other, Poly):
            return Scalar(other)
        return None

    # -- arithmetic ----------------------------------------------------------

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        den = dict(self.den)
        mult_self = self.ring.const(1)
        mult_other = self.ring.const(1)
        for f, e in other.den:
            have = den.get(f, 0)
            if e > have:
                den[f] = e
                mult_self = mult_self * f ** (e - have)
        for f, e in self.den:
            oe = dict(other.den).get(f, 0)
            if e > oe:
                mult_other = mult_other * f ** (e - oe)
        num = self.num * mult_self + other.num * mult_other
        return Scalar(num, den)

    __radd__ = __add__

    def __neg__(self):
        return Scalar(-self.num, self.den)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        den = dict(self.den)
        for f, e in other.den:
            den[f] = den.get(f, 0) + e
        return Scalar(self.num * other.num, den)

    __rmul__ = __mul__

    def inverse(self):
        if self.is_zero():
            raise ScalarError("inverse of zero")
        num = self.den_poly()
        den = {self.num: 1}
        return Scalar(num, den)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, n):
        if n < 0:
            return self.inverse() ** (-n)
        out = Scalar(self.ring.const(1))
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        # cross multiplication avoids needing canonical reduction
        return (self.num * other.den_poly() - other.num * self.den_poly()).is_zero()

    def __hash__(self):
        raise TypeError("Scalars are not hashable; compare with ==")

    # -- canonical form --------------------------------------------------------

    def reduce(self):
        """Fully reduced (num, den) pair of Polys, den monic, gcd 1."""
        num, den = self.num, self.den_poly()
        if num.is_zero():
            return num, self.ring.const(1)
        g = poly_gcd(num, den)
        if not g.is_const():
            num = num.exact_div(g)
            den = den.exact_div(g)
        den, s = _normalize_factor(den)
        num = num * s
        return num, den

    def subs(self, values):
        num = self.num.subs(values)
        den = {}
        for f, e in self.den:
            fs = f.subs(values)
            if fs.is_zero():
                raise ScalarError("substitution makes a denominator vanish")
            den[fs] = den.get(fs, 0) + e
        return Scalar(num, den)

    def as_fraction(self):
        num, den = self.reduce()
        return num.const_value() / den.const_value()

    def __str__(self):
        num, den = self.reduce()
        if den.is_const() and den.const_value() == 1:
            return str(num)
        ns = str(num)
        if len(num.terms) > 1:
            ns = f"({ns})"
        ds = str(den)
        if len(den.terms) > 1:
            ds = f"({ds})"
        return f"{ns}/{ds}"

    __repr__ = __str__


def rf_reduce(num, den):
    """Canonical Scalar num/den; raises on a zero denominator."""
    if isinstance(den, Poly) and den.is_zero():
        raise ScalarError("zero denominator")
    s = Scalar(num, {den: 1} if isinstance(den, Poly) else ())
    if not isinstance(den, Poly):
        s = s / den
    n, d = s.reduce()
    return Scalar(n, {d: 1})


# ---------------------------------------------------------------------------
# graded series in hbar^(1/2) (doubled exponents) and Lambda


class GradedSeries:
    """coeffs: (h2, lam) -> Scalar.  h2 counts hbar^(1/2) units; may be < 0
    (the modified genus expansion needs hbar^(-1)).  An optional h2_max bound
    prunes on construction; absent keys are zero."""

    __slots__ = ("ring", "coeffs", "h2_max")

    def __init__(self, ring, coeffs=None, h2_max=None):
        self.ring = ring
        self.h2_max = h2_max
        out = {}
        for k, v in (coeffs or {}).items():
            if h2_max is not None and k[0] > h2_max:
                continue
            if not v.is_zero():
                out[k] = v
        self.coeffs = out

    @classmethod
    def term(cls, scalar, h2=0, lam=0, h2_max=None):
        return cls(scalar.ring, {(h2, lam): scalar}, h2_max=h2_max)

    def is_zero(self):
        return not self.coeffs

    def _bound(self, other):
        hs = [b for b in (self.h2_max, getattr(other, "h2_max", None)) if b is not None]
        return min(hs) if hs else None

    def __add__(self, other):
        out = dict(self.coeffs)
        for k, v in other.coeffs.items():
            out[k] = out[k] + v if k in out else v
        return GradedSeries(self.ring, out, h2_max=self._bound(other))

    def __neg__(self):
        return GradedSeries(self.ring, {k: -v for k, v in self.coeffs.items()}, h2_max=self.h2_max)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, GradedSeries):
            bound = self._bound(other)
            out = {}
            for (h1, l1), v1 in self.coeffs.items():
                for (h2, l2), v2 in other.coeffs.items():
                    k = (h1 + h2, l1 + l2)
                    if bound is not None and k[0] > bound:
                        continue
                    p = v1 * v2
                    out[k] = out[k] + p if k in out else p
            return GradedSeries(self.ring, out, h2_max=bound)
        if isinstance(other, (int, Fraction, Poly, Scalar)):
            s = other if isinstance(other, Scalar) else Scalar(self.ring.const(other)) if not isinstance(other, Poly) else Scalar(other)
            return GradedSeries(self.ring, {k: v * s for k, v in self.coeffs.items()}, h2_max=self.h2_max)
        return NotImplemented

    __rmul__ = __mul__

    def shifted(self, dh2=0, dlam=0):
        return GradedSeries(self.ring, {(h + dh2, l + dlam): v for (h, l), v in self.coeffs.items()}, h2_max=self.h2_max)

    def get(self, h2, lam=0):
        return self.coeffs.get((h2, lam), Scalar(self.ring.const(0)))

    def __eq__(self, other):
        if not isinstance(other, GradedSeries):
            return NotImplemented
        keys = set(self.coeffs) | set(other.coeffs)
        return all(self.get(*k) == other.get(*k) for k in keys)

    def __str__(self):
        if not self.coeffs:
            return "0"
        bits = []
        for (h2, lam) in sorted(self.coeffs):
            factors = []
            if h2:
                factors.append(f"hb2^{h2}")
            if lam:
                factors.append(f"Lam^{lam}")
            head = "*".join(factors)
            c = str(self.coeffs[(h2, lam)])
            bits.append(f"{head}*({c})" if head else c)
        return " + ".join(bits)

    __repr__ = __str__


# ---------------------------------------------------------------------------
# Laurent series with explicit windows

INF = 10 ** 9  # sentinel: no truncation above
NINF = -INF  # sentinel: exact arbitrarily far below


def _winadd(a, b):
    if a >= INF or b >= INF:
        return INF
    if a <= NINF or b <= NINF:
        return NINF
    return a + b


def _minsupp(s):
    return min(s.coeffs) if s.coeffs else _winadd(s.hi, 1)


class LaurentSeries:
    """Finite Laurent data on a formal disk.

    Exponents are plain integers in the disk coordinate.  The window
    [lo, hi] is the range of exponents this series is EXACT on; arithmetic
    intersects windows conservatively, and reading outside raises
    TruncationError rather than returning 0.
    """

    __slots__ = ("ring", "var", "coeffs", "lo", "hi")

    def __init__(self, ring, var, coeffs, lo, hi):
        if lo > hi:
            raise TruncationError(f"empty window [{lo}, {hi}]")
        self.ring = ring
        self.var = var
        self.lo = lo
        self.hi = hi
        self.coeffs = {}
        for e, c in coeffs.items():
            if e < lo or e > hi:
                raise TruncationError(f"coefficient at {var}^{e} outside window [{lo}, {hi}]")
            if not c.is_zero():
                self.coeffs[e] = c

    @classmethod
    def monomial(cls, scalar, exp, var="zeta", lo=NINF, hi=INF):
        """An exactly-known monomial: window unbounded unless narrowed."""
        return cls(scalar.ring, var, {exp: scalar}, lo, hi)

    def coeff(self, e):
        if e < self.lo or e > self.hi:
            raise TruncationError(f"read at {self.var}^{e} outside retained window [{self.lo}, {self.hi}]")
        return self.coeffs.get(e, Scalar(self.ring.const(0)))

    def _check(self, other):
        if self.var != other.var:
            raise ScalarError(f"mixed series variables {self.var!r} and {other.var!r}")

    def __add__(self, other):
        self._check(other)
        lo, hi = max(self.lo, other.lo), min(self.hi, other.hi)
        out = {}
        for e in set(self.coeffs) | set(other.coeffs):
            if lo <= e <= hi:
                c = self.coeffs.get(e, Scalar(self.ring.const(0))) + other.coeffs.get(e, Scalar(self.ring.const(0)))
                out[e] = c
        return LaurentSeries(self.ring, self.var, out, lo, hi)

    def __neg__(self):
        return LaurentSeries(self.ring, self.var, {e: -c for e, c in self.coeffs.items()}, self.lo, self.hi)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, Scalar, Poly)):
            s = other if isinstance(other, Scalar) else Scalar(other) if isinstance(other, Poly) else Scalar(self.ring.const(other))
            return LaurentSeries(self.ring, self.var, {e: c * s for e, c in self.coeffs.items()}, self.lo, self.hi)
        self._check(other)
        # Coefficients are known on [lo, hi] and zero below the actual
        # support; unknown terms start at hi+1. A product coefficient is
        # complete as long as no unknown term of either factor can reach it.
        lo = _winadd(self.lo, other.lo)
        ms, mo = _minsupp(self), _minsupp(other)
        unknown = min(_winadd(_winadd(self.hi, 1), mo), _winadd(_winadd(other.hi, 1), ms))
        hi = unknown if unknown >= INF else unknown - 1
        out = {}
        for e1, c1 in self.coeffs.items():
            for e2, c2 in other.coeffs.items():
                e = e1 + e2
                if lo <= e <= hi:
                    p = c1 * c2
                    out[e] = out[e] + p if e in out else p
        return LaurentSeries(self.ring, self.var, out, lo, hi)

    __rmul__ = __mul__

    def residue(self):
        """Coefficient of var^(-1); demands -1 inside the window."""
        return self.coeff(-1)

    def derivative(self):
        out = {}
        for e, c in self.coeffs.items():
            if e != 0:
                out[e - 1] = c * e
        hi = self.hi if self.hi >= INF else self.hi - 1
        lo = self.lo if self.lo <= NINF else self.lo - 1
        return LaurentSeries(self.ring, self.var, out, lo, hi)

    def __str__(self):
        if not self.coeffs:
            return f"0 (window [{self.lo},{self.hi}])"
        bits = [f"({self.coeffs[e]})*{self.var}^{e}" for e in sorted(self.coeffs)]
        return " + ".join(bits) + f"  (window [{self.lo},{self.hi}])"

    __repr__ = __str__


def series_mul(a, b):
    """Product of Laurent series; windows combine conservatively."""
    return a * b


def laurent_residue(a):
    return a.residue()


# ---------------------------------------------------------------------------
# elementary symmetric polynomials over Scalars (used throughout wgen)


def elementary_symmetric(ring, values, j):
    """e_j(values) for a list of Scalars over the given ring."""
    if j < 0 or j > len(values):
        return Scalar(ring.const(0))
    out = [Scalar(ring.const(1))] + [Scalar(ring.const(0))] * j
    for v in values:
        for k in range(min(j, len(out) - 1), 0, -1):
            out[k] = out[k] + out[k - 1] * v
    return out[j]


@lru_cache(maxsize=None)
def binom(n, k):
    """Binomial with integer arguments; zero for negative upper index cases
    following the generating-series convention."""
    if k < 0:
        return 0
    if k == 0:
        return 1
    if n < 0:
        return 0
    if n < k:
        return 0
    out = 1
    for i in range(k):
        out = out * (n - i) // (i + 1)
    return out
