"""Exact truncated Puiseux series in t over the rationals.

A series is stored as integer exponents over a ramification ``q``: the key
``k`` stands for ``t**(k/q)``.  ``trunc`` is the exponent (same units) of the
``O(.)`` tail, or ``None`` for an exact finite sum.  Coefficients are
``Fraction`` values, or :class:`ZPoly` Laurent polynomials in an auxiliary
variable ``z`` when a bivariate expansion is needed.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm
from typing import Callable, Iterable

from .errors import DivisionByZeroSeries, NoConvergence, NonSquareLeading

DEFAULT_ORDER = 24

_SUPERSCRIPT = str.maketrans("0123456789-", "⁰¹²³⁴⁵⁶⁷⁸⁹⁻")


def _int_root(n: int, r: int) -> int | None:
    """Exact integer r-th root of n >= 0, or None."""
    if n < 2:
        return n
    x = 1 << ((n.bit_length() + r - 1) // r)
    while True:
        y = ((r - 1) * x + n // x ** (r - 1)) // r
        if y >= x:
            break
        x = y
    return x if x**r == n else None


def rational_root(c: Fraction, r: int) -> Fraction | None:
    """Exact rational r-th root of ``c`` (real branch), or None."""
    c = Fraction(c)
    if c < 0:
        if r % 2 == 0:
            return None
        root = rational_root(-c, r)
        return None if root is None else -root
    num = _int_root(c.numerator, r)
    den = _int_root(c.denominator, r)
    if num is None or den is None:
        return None
    return Fraction(num, den)


class ZPoly:
    """Laurent polynomial in ``z`` with rational coefficients."""

    __slots__ = ("terms",)

    def __init__(self, terms: dict[int, Fraction] | None = None):
        self.terms = {}
        for k, v in (terms or {}).items():
            if v:
                self.terms[int(k)] = Fraction(v)

    @staticmethod
    def z(power: int = 1, coeff=1) -> "ZPoly":
        return ZPoly({power: Fraction(coeff)})

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if isinstance(other, ZPoly):
            return self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self.terms == ({0: Fraction(other)} if other else {})
        return NotImplemented

    def __hash__(self):
        return hash(tuple(sorted(self.terms.items())))

    def __repr__(self):
        return f"ZPoly({dict(sorted(self.terms.items()))})"

    def __neg__(self):
        return ZPoly({k: -v for k, v in self.terms.items()})

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = ZPoly({0: other})
        if not isinstance(other, ZPoly):
            return NotImplemented
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, 0) + v
        return ZPoly(out)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            if not other:
                return ZPoly()
            return ZPoly({k: v * other for k, v in self.terms.items()})
        if not isinstance(other, ZPoly):
            return NotImplemented
        out: dict[int, Fraction] = {}
        for i, a in self.terms.items():
            for j, b in other.terms.items():
                out[i + j] = out.get(i + j, 0) + a * b
        return ZPoly(out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * (1 / Fraction(other))
        if isinstance(other, ZPoly):
            return self * other.inverse()
        return NotImplemented

    def coefficient(self, k: int) -> Fraction:
        return self.terms.get(k, Fraction(0))

    def is_monomial(self) -> bool:
        return len(self.terms) == 1

    def inverse(self) -> "ZPoly":
        if not self.is_monomial():
            raise DivisionByZeroSeries("only monomials in z are invertible")
        (k, v), = self.terms.items()
        return ZPoly({-k: 1 / v})

    def root(self, r: int) -> "ZPoly | None":
        if not self.is_monomial():
            return None
        (k, v), = self.terms.items()
        if k % r:
            return None
        c = rational_root(v, r)
        return None if c is None else ZPoly({k // r: c})

    def evaluate(self, z):
        return sum(float(v) * z**k for k, v in self.terms.items())


def _coeff_inverse(c):
    if isinstance(c, ZPoly):
        return c.inverse()
    return 1 / Fraction(c)


def _coeff_root(c, r: int):
    if isinstance(c, ZPoly):
        return c.root(r)
    return rational_root(c, r)


def _coeff_power(c, alpha: Fraction):
    """Exact ``c**alpha`` for a rational exponent, NonSquareLeading if irrational."""
    if alpha.denominator != 1:
        c = _coeff_root(c, alpha.denominator)
        if c is None:
            raise NonSquareLeading("leading coefficient has no exact root")
    n = alpha.numerator
    if n < 0:
        c, n = _coeff_inverse(c), -n
    out = c
    for _ in range(n - 1):
        out = out * c
    return out if n else Fraction(1)


def _coerce_coeff(c):
    if isinstance(c, ZPoly):
        return c
    return Fraction(c)


class PuiseuxSeries:
    """Truncated series ``sum c_k t^(k/q) + O(t^(trunc/q))``."""

    __slots__ = ("q", "coeffs", "trunc")

    def __init__(self, coeffs: dict | None = None, q: int = 1, trunc: int | None = None):
        if q < 1:
            raise ValueError("ramification must be positive")
        self.q = int(q)
        self.trunc = None if trunc is None else int(trunc)
        self.coeffs = {}
        for k, v in (coeffs or {}).items():
            k = int(k)
            if self.trunc is not None and k >= self.trunc:
                continue
            v = _coerce_coeff(v)
            if v:
                self.coeffs[k] = v

    # construction

    @classmethod
    def constant(cls, c, trunc_order=None) -> "PuiseuxSeries":
        trunc = None if trunc_order is None else int(trunc_order)
        return cls({0: c}, 1, trunc)

    @classmethod
    def monomial(cls, c, exponent, trunc_order=None) -> "PuiseuxSeries":
        """``c * t**exponent`` with a rational exponent."""
        e = Fraction(exponent)
        q = e.denominator
        if trunc_order is not None:
            tr = Fraction(trunc_order)
            q = lcm(q, tr.denominator)
            trunc = int(tr * q)
        else:
            trunc = None
        return cls({int(e * q): c}, q, trunc)

    @classmethod
    def from_terms(cls, terms: Iterable[tuple], trunc_order=None) -> "PuiseuxSeries":
        """Build from ``(exponent, coefficient)`` pairs with rational exponents."""
        terms = [(Fraction(e), c) for e, c in terms]
        q = 1
        for e, _ in terms:
            q = lcm(q, e.denominator)
        trunc = None
        if trunc_order is not None:
            tr = Fraction(trunc_order)
            q = lcm(q, tr.denominator)
            trunc = int(tr * q)
        out: dict[int, object] = {}
        for e, c in terms:
            k = int(e * q)
            out[k] = out.get(k, 0) + _coerce_coeff(c)
        return cls(out, q, trunc)

    # basic accessors

    @property
    def valuation(self) -> int | None:
        """Smallest stored key (units of 1/q), None for the zero series."""
        return min(self.coeffs) if self.coeffs else None

    @property
    def order(self) -> Fraction | None:
        """t-exponent of the O-term, None when exact."""
        return None if self.trunc is None else Fraction(self.trunc, self.q)

    @property
    def lead_exponent(self) -> Fraction | None:
        v = self.valuation
        return None if v is None else Fraction(v, self.q)

    @property
    def lead_coefficient(self):
        v = self.valuation
        return None if v is None else self.coeffs[v]

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_exact(self) -> bool:
        return self.trunc is None

    def coefficient(self, exponent) -> Fraction:
        e = Fraction(exponent)
        k = e * self.q
        if k.denominator != 1:
            return Fraction(0)
        return self.coeffs.get(int(k), Fraction(0))

    def terms(self) -> list[tuple[Fraction, object]]:
        return [(Fraction(k, self.q), self.coeffs[k]) for k in sorted(self.coeffs)]

    def _effective_valuation(self):
        """Valuation used by truncation bookkeeping: lowest possibly nonzero key."""
        if self.coeffs:
            return min(self.coeffs)
        return self.trunc

    # ramification

    def with_ramification(self, q: int) -> "PuiseuxSeries":
        if q == self.q:
            return self
        if q % self.q:
            raise ValueError(f"cannot embed ramification {self.q} into {q}")
        m = q // self.q
        trunc = None if self.trunc is None else self.trunc * m
        s = PuiseuxSeries.__new__(PuiseuxSeries)
        s.q = q
        s.trunc = trunc
        s.coeffs = {k * m: v for k, v in self.coeffs.items()}
        return s

    def reduced(self) -> "PuiseuxSeries":
        """Same series over the smallest compatible ramification."""
        g = self.q
        for k in self.coeffs:
            g = gcd(g, k)
        if self.trunc is not None:
            g = gcd(g, self.trunc)
        if g <= 1:
            return self
        return PuiseuxSeries({k // g: v for k, v in self.coeffs.items()}, self.q // g,
                             None if self.trunc is None else self.trunc // g)

    @staticmethod
    def _align(a: "PuiseuxSeries", b: "PuiseuxSeries"):
        q = lcm(a.q, b.q)
        return a.with_ramification(q), b.with_ramification(q)

    def truncate(self, order) -> "PuiseuxSeries":
        """Drop every term of t-exponent >= ``order``."""
        o = Fraction(order)
        s = self.with_ramification(lcm(self.q, o.denominator))
        tr = int(o * s.q)
        if s.trunc is not None:
            tr = min(tr, s.trunc)
        return PuiseuxSeries(s.coeffs, s.q, tr)

    # arithmetic

    @staticmethod
    def _lift(other) -> "PuiseuxSeries | None":
        if isinstance(other, PuiseuxSeries):
            return other
        if isinstance(other, (int, Fraction, ZPoly)):
            return PuiseuxSeries({0: other})
        return None

    def __neg__(self):
        s = PuiseuxSeries.__new__(PuiseuxSeries)
        s.q, s.trunc = self.q, self.trunc
        s.coeffs = {k: -v for k, v in self.coeffs.items()}
        return s

    def __add__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        a, b = self._align(self, other)
        truncs = [x for x in (a.trunc, b.trunc) if x is not None]
        trunc = min(truncs) if truncs else None
        out = dict(a.coeffs)
        for k, v in b.coeffs.items():
            out[k] = out[k] + v if k in out else v
        return PuiseuxSeries(out, a.q, trunc)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            if not other:
                return PuiseuxSeries({}, 1, None)
            s = PuiseuxSeries.__new__(PuiseuxSeries)
            s.q, s.trunc = self.q, self.trunc
            s.coeffs = {k: v * other for k, v in self.coeffs.items()}
            return s
        other = self._lift(other)
        if other is None:
            return NotImplemented
        a, b = self._align(self, other)
        if (not a.coeffs and a.trunc is None) or (not b.coeffs and b.trunc is None):
            return PuiseuxSeries({}, a.q, None)
        va, vb = a._effective_valuation(), b._effective_valuation()
        cands = []
        if a.trunc is not None:
            cands.append(a.trunc + vb)
        if b.trunc is not None:
            cands.append(b.trunc + va)
        trunc = min(cands) if cands else None
        out: dict[int, object] = {}
        bitems = sorted(b.coeffs.items())
        for i, x in a.coeffs.items():
            for j, y in bitems:
                k = i + j
                if trunc is not None and k >= trunc:
                    break
                p = x * y
                out[k] = out[k] + p if k in out else p
        return PuiseuxSeries(out, a.q, trunc)

    __rmul__ = __mul__

    def inverse(self, order=None) -> "PuiseuxSeries":
        """Multiplicative inverse; exact inputs are expanded to t-order ``order``."""
        if not self.coeffs:
            raise DivisionByZeroSeries("inverse of a series with no known nonzero term")
        return self._power_normalized(Fraction(-1), order)

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if not other:
                raise DivisionByZeroSeries("division by zero scalar")
            return self * (1 / Fraction(other))
        other = self._lift(other)
        if other is None:
            return NotImplemented
        if not other.coeffs:
            raise DivisionByZeroSeries("division by a series with no known nonzero term")
        if other.trunc is None and len(other.coeffs) == 1:
            (k, v), = other.coeffs.items()
            inv = PuiseuxSeries({-k: _coeff_inverse(v)}, other.q, None)
            return self * inv
        order = None
        if other.trunc is None:
            # relative precision of the quotient follows the numerator
            if self.trunc is not None:
                order = Fraction(self.trunc, self.q) - other.lead_exponent
        return self * other.inverse(order)

    def __rtruediv__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        return other / self

    def __pow__(self, alpha):
        if isinstance(alpha, int) and alpha >= 0:
            result = PuiseuxSeries({0: 1})
            base = self
            n = alpha
            while n:
                if n & 1:
                    result = result * base
                n >>= 1
                if n:
                    base = base * base
            return result
        return power(self, alpha)

    def _power_normalized(self, alpha: Fraction, order=None) -> "PuiseuxSeries":
        """``self**alpha`` via the J.C.P. Miller recurrence on the normalized series."""
        v = self.valuation
        c0 = self.coeffs[v]
        lead_exp = Fraction(v, self.q) * alpha
        q = lcm(self.q, lead_exp.denominator)
        s = self.with_ramification(q)
        v = s.valuation
        lead = _coeff_power(c0, alpha)
        lead_key = int(lead_exp * q)
        if s.trunc is not None:
            rel = s.trunc - v
        else:
            o = Fraction(DEFAULT_ORDER if order is None else order)
            q2 = lcm(q, o.denominator)
            if q2 != q:
                q = q2
                s = s.with_ramification(q)
                v = s.valuation
                lead_key = int(lead_exp * q)
            rel = int(o * q) - lead_key
        if rel <= 0:
            return PuiseuxSeries({}, q, lead_key + max(rel, 0))
        inv0 = _coeff_inverse(c0)
        b = [None] * rel
        for k, val in s.coeffs.items():
            idx = k - v
            if idx < rel:
                b[idx] = val * inv0
        out = [None] * rel
        out[0] = Fraction(1)
        for n in range(1, rel):
            acc = None
            for k in range(1, n + 1):
                bk = b[k]
                if bk is None or not bk:
                    continue
                sn = out[n - k]
                if sn is None or not sn:
                    continue
                w = (alpha + 1) * k - n
                if not w:
                    continue
                term = bk * sn * w
                acc = term if acc is None else acc + term
            out[n] = None if acc is None else acc * Fraction(1, n)
        coeffs = {}
        for n, val in enumerate(out):
            if val is not None and val:
                coeffs[lead_key + n] = val * lead
        return PuiseuxSeries(coeffs, q, lead_key + rel)

    def __eq__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        a, b = self._align(self, other)
        return a.coeffs == b.coeffs and a.trunc == b.trunc

    def __hash__(self):
        r = self.reduced()
        return hash((r.q, r.trunc, tuple(sorted(r.coeffs.items()))))

    def agrees_through(self, other, order) -> bool:
        """True when both series carry equal known coefficients below t-order ``order``."""
        other = self._lift(other)
        a, b = self._align(self, other)
        o = Fraction(order)
        for s in (a, b):
            if s.order is not None and s.order < o:
                return False
        return a.truncate(o).coeffs == b.truncate(o).coeffs

    # calculus and composition

    def derivative(self) -> "PuiseuxSeries":
        """d/dt."""
        out = {k - self.q: v * Fraction(k, self.q) for k, v in self.coeffs.items() if k}
        trunc = None if self.trunc is None else self.trunc - self.q
        return PuiseuxSeries(out, self.q, trunc)

    def compose(self, inner: "PuiseuxSeries") -> "PuiseuxSeries":
        """Substitute ``t -> inner(t)``; ``inner`` must have positive valuation unless exact."""
        if inner.valuation is None:
            raise DivisionByZeroSeries("cannot compose with the zero series")
        r = inner if self.q == 1 else power(inner, Fraction(1, self.q))
        keys = sorted(self.coeffs)
        acc = PuiseuxSeries({})
        pos = [k for k in keys if k >= 0]
        if pos:
            kmax = pos[-1]
            acc = PuiseuxSeries({0: self.coeffs[kmax]})
            prev = kmax
            for k in reversed(pos[:-1]):
                acc = acc * (r ** (prev - k)) + self.coeffs[k]
                prev = k
            if prev:
                acc = acc * (r ** prev)
        neg = [k for k in keys if k < 0]
        if neg:
            ri = 1 / r
            nacc = PuiseuxSeries({0: self.coeffs[neg[0]]})
            prev = neg[0]
            for k in neg[1:]:
                nacc = nacc * (ri ** (k - prev)) + self.coeffs[k]
                prev = k
            nacc = nacc * (ri ** (-prev))
            acc = acc + nacc
        if self.trunc is not None:
            vr = r.lead_exponent
            if vr is None or vr <= 0:
                raise NoConvergence("composition of a truncated series needs positive valuation")
            acc = acc.truncate(Fraction(self.trunc) * vr)
        return acc

    def evaluate(self, t) -> complex | float:
        """Numeric value of the known part at a numeric ``t`` (principal powers)."""
        total = 0.0
        for k, v in self.coeffs.items():
            total += float(v) * (t ** (k / self.q) if k % self.q else t ** (k // self.q))
        return total

    # serialization

    def to_quadruples(self) -> list[list]:
        """``[numerator, denominator, exponent numerator, ramification]`` per term."""
        out = []
        for k in sorted(self.coeffs):
            v = Fraction(self.coeffs[k])
            out.append([str(v.numerator), str(v.denominator), k, self.q])
        return out

    def to_json(self) -> dict:
        order = self.order
        return {
            "terms": self.to_quadruples(),
            "order": None if order is None else [order.numerator, order.denominator],
        }

    @classmethod
    def from_quadruples(cls, quads, order=None) -> "PuiseuxSeries":
        return cls.from_terms(
            [(Fraction(int(k), int(q)), Fraction(int(n), int(d))) for n, d, k, q in quads],
            order,
        )

    @classmethod
    def from_json(cls, data: dict) -> "PuiseuxSeries":
        order = data.get("order")
        return cls.from_quadruples(data["terms"], None if order is None else Fraction(*order))

    def pretty(self, max_terms: int | None = None) -> str:
        parts = []
        items = self.terms()
        if max_terms is not None:
            items = items[:max_terms]
        for e, c in items:
            parts.append(_format_term(c, e))
        if not parts:
            parts = ["0"]
        text = parts[0]
        for p in parts[1:]:
            text += " - " + p[1:] if p.startswith("-") else " + " + p
        if max_terms is not None and len(self.coeffs) > max_terms:
            text += " + …"
        if self.trunc is not None:
            text += " + O(" + _format_power(self.order) + ")"
        return text

    def __str__(self):
        return self.pretty()

    def __repr__(self):
        return f"PuiseuxSeries({self.pretty()})"


def _format_power(e: Fraction) -> str:
    if e == 0:
        return "1"
    if e == 1:
        return "t"
    if e.denominator == 1:
        return "t" + str(e.numerator).translate(_SUPERSCRIPT)
    return f"t^({e.numerator}/{e.denominator})"


def _format_term(c, e: Fraction) -> str:
    if isinstance(c, ZPoly):
        return f"({c!r})" + ("" if e == 0 else _format_power(e))
    c = Fraction(c)
    if e == 0:
        return str(c) if c.denominator == 1 else f"{c}"
    mono = _format_power(e)
    if c == 1:
        return mono
    if c == -1:
        return "-" + mono
    if c.denominator == 1:
        return f"{c}{mono}"
    sign = "-" if c < 0 else ""
    return f"{sign}({abs(c)}){mono}"


T = PuiseuxSeries({1: 1})


def series(x) -> PuiseuxSeries:
    lifted = PuiseuxSeries._lift(x)
    if lifted is None:
        raise TypeError(f"cannot convert {type(x).__name__} to a series")
    return lifted


def power(a: PuiseuxSeries, alpha, order=None) -> PuiseuxSeries:
    """``a**alpha`` for integer or rational ``alpha``."""
    a = series(a)
    alpha = Fraction(alpha)
    if alpha.denominator == 1 and alpha >= 0:
        return a ** int(alpha)
    if a.is_zero():
        raise DivisionByZeroSeries("power of a series with no known nonzero term")
    return a._power_normalized(alpha, order)


def sqrt_series(a: PuiseuxSeries, order=None, allow_ramification: bool = True) -> PuiseuxSeries:
    """Square root with positive leading coefficient."""
    a = series(a)
    if a.is_zero():
        if a.trunc is None:
            return a
        raise NonSquareLeading("square root of a series with no known term")
    v = a.valuation
    if v % 2 and not allow_ramification:
        raise NonSquareLeading("odd valuation requires ramification doubling")
    c0 = a.lead_coefficient
    if not isinstance(c0, ZPoly) and c0 < 0:
        raise NonSquareLeading(f"negative leading coefficient {c0}")
    return a._power_normalized(Fraction(1, 2), order)


def solve_fixed_point(F: Callable[[PuiseuxSeries], PuiseuxSeries], seed=0,
                      order=DEFAULT_ORDER, max_iter: int | None = None) -> PuiseuxSeries:
    """Iterate ``S <- F(S)`` until every coefficient below t-order ``order`` is stable."""
    s = series(seed).truncate(order)
    if max_iter is None:
        max_iter = int(Fraction(order) * 4 * max(s.q, 1)) + 8
    for _ in range(max_iter):
        new = series(F(s)).truncate(order)
        if new == s:
            return new
        s = new
    raise NoConvergence(f"fixed point not stable after {max_iter} iterations")


def solve_quadratic_root(A, B, C, branch: int = 1, order=None) -> PuiseuxSeries:
    """Root ``(-B + branch*sqrt(B^2-4AC)) / (2A)`` of ``A s^2 + B s + C``."""
    A, B, C = series(A), series(B), series(C)
    if A.is_zero() and A.trunc is None:
        return -C / B
    disc = B * B - 4 * A * C
    root = sqrt_series(disc, order)
    s = (-B + branch * root) / (2 * A)
    residual = A * s * s + B * s + C
    if not residual.is_zero():
        raise NoConvergence("quadratic root failed verification")
    return s


def residue_on_unit_circle(f) -> PuiseuxSeries:
    """``(1/2 pi i) * integral of f dz`` over the unit circle: the z^-1 coefficient.

    ``f`` is either a series with :class:`ZPoly` coefficients or a mapping
    ``{z exponent: series}``.
    """
    if isinstance(f, dict):
        return series(f.get(-1, 0))
    out = {k: v.coefficient(-1) for k, v in f.coeffs.items() if isinstance(v, ZPoly)}
    return PuiseuxSeries(out, f.q, f.trunc)


def _lower_hull(points: list[tuple[int, Fraction]]) -> list[tuple[int, Fraction]]:
    hull: list[tuple[int, Fraction]] = []
    for p in sorted(points):
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            if (y2 - y1) * (p[0] - x1) >= (p[1] - y1) * (x2 - x1):
                hull.pop()
            else:
                break
        hull.append(p)
    return hull


def _rational_roots(coeffs: list[Fraction]) -> dict[Fraction, int]:
    """Nonzero rational roots with multiplicity of ``sum coeffs[k] c^k``."""
    import sympy

    c = sympy.Symbol("c")
    poly = sympy.Poly([sympy.Rational(x.numerator, x.denominator) for x in reversed(coeffs)],
                      c, domain="QQ")
    out = {}
    for r, m in poly.ground_roots().items():
        r = sympy.Rational(r)
        if r != 0:
            out[Fraction(int(r.p), int(r.q))] = int(m)
    return out


def _taylor_shift(P: list[PuiseuxSeries], m: PuiseuxSeries) -> list[PuiseuxSeries]:
    """Coefficients of ``P(m + x)`` in powers of x."""
    n = len(P)
    out = [p for p in P]
    # repeated synthetic division
    for i in range(n):
        for j in range(n - 2, i - 1, -1):
            out[j] = out[j] + out[j + 1] * m
    return out


def puiseux_roots(coeffs: list, order, margin=6) -> list[PuiseuxSeries]:
    """Finite roots of ``sum coeffs[k] x^k`` with rational Puiseux coefficients.

    Newton polygon expansion, one term at a time.  Coefficients are carried
    to t-order ``order + margin``; each root is returned through t-order
    ``order`` when the working precision suffices (lower otherwise).
    """
    work = Fraction(order) + margin
    P = [series(c) for c in coeffs]
    while P and P[-1].is_zero():
        P.pop()
    roots: list[PuiseuxSeries] = []
    # exact zero roots stay exact
    while len(P) > 1 and P[0].is_zero() and P[0].trunc is None:
        roots.append(PuiseuxSeries({}))
        P = P[1:]
    P = [p.truncate(work) for p in P]
    _expand_roots(P, PuiseuxSeries({}), None, Fraction(order), roots)
    return roots


def _expand_roots(P, prefix, e_prev, order, roots):
    if len(P) < 2:
        return
    if P[0].is_zero():
        if P[0].trunc is None:
            roots.append(prefix)
            _expand_roots(P[1:], prefix, e_prev, order, roots)
            return
        roots.append(prefix.truncate(min(order, _root_precision(P))))
        return
    pts = [(k, p.lead_exponent) for k, p in enumerate(P) if not p.is_zero()]
    hull = _lower_hull(pts)
    for (k1, v1), (k2, v2) in zip(hull, hull[1:]):
        e = (v1 - v2) / (k2 - k1)
        if e_prev is not None and e <= e_prev:
            continue
        if e >= order:
            roots.extend([prefix.truncate(order)] * (k2 - k1))
            continue
        # unknown coefficients lying under the edge make the edge ambiguous
        ambiguous = False
        for k, p in enumerate(P):
            if p.is_zero() and p.order is not None and p.order < v1 - e * (k - k1):
                ambiguous = True
        if ambiguous:
            roots.extend([prefix.truncate(e)] * (k2 - k1))
            continue
        char = [Fraction(0)] * (k2 - k1 + 1)
        for k, v in pts:
            if k1 <= k <= k2 and v == v1 - e * (k - k1):
                char[k - k1] = Fraction(P[k].lead_coefficient)
        for c, _mult in _rational_roots(char).items():
            m = PuiseuxSeries.monomial(c, e)
            _expand_roots(_taylor_shift(P, m), prefix + m, e, order, roots)


def _root_precision(P) -> Fraction:
    for p in P[1:2]:
        if not p.is_zero():
            return P[0].order - p.lead_exponent
    return P[0].order / 2
