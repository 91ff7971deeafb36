"""Exact walk counts by dynamic programming, and the generating-function sections built on them."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterator

import numpy as np

from .errors import HypothesisViolated, StartOutsideDomain, ValidationError
from .model import StepSet, phi_transform, validate

try:
    from ._fastdp import walk_layers_int64 as _compiled_layers
except ImportError:  # pragma: no cover - depends on the build
    _compiled_layers = None

HAVE_COMPILED = _compiled_layers is not None

DOMAINS: dict[str, Callable[[int, int], bool]] = {
    "three_quadrant": lambda i, j: i >= 0 or j >= 0,
    "quadrant": lambda i, j: i >= 0 and j >= 0,
    "lower_wedge": lambda i, j: i >= 0 and j <= i,
    "plane": lambda i, j: True,
}
DOMAIN_ALIASES = {"3q": "three_quadrant", "q": "quadrant", "1q": "quadrant",
                  "wedge": "lower_wedge", "full": "plane", "z2": "plane"}

_INT64_MAX = (1 << 63) - 1


def domain_name(domain: str) -> str:
    key = DOMAIN_ALIASES.get(domain, domain)
    if key not in DOMAINS:
        raise ValidationError(f"unknown domain {domain!r}")
    return key


@dataclass(frozen=True)
class CountTable:
    """``counts(n, i, j)`` for every ``n <= n_max``, stored as dense layers."""

    steps: StepSet
    domain: str
    start: tuple[int, int]
    n_max: int
    layers: tuple  # n_max + 1 arrays of shape (M, M)
    origin: tuple[int, int]  # lattice point of array index (0, 0)

    def count(self, n: int, i: int, j: int) -> int:
        a, b = i - self.origin[0], j - self.origin[1]
        M = self.layers[0].shape[0]
        if not (0 <= n <= self.n_max and 0 <= a < M and 0 <= b < M):
            return 0
        return int(self.layers[n][a, b])

    def cells(self, n: int) -> Iterator[tuple[int, int, int]]:
        """Nonzero ``(i, j, count)`` at step ``n`` in lexicographic order."""
        layer = self.layers[n]
        for a, b in zip(*np.nonzero(layer)):
            yield int(a) + self.origin[0], int(b) + self.origin[1], int(layer[a, b])

    def total(self, n: int) -> int:
        return sum(int(v) for v in self.layers[n].ravel())

    def excursions(self) -> list[int]:
        """Counts of walks ending back at the start, for n = 0..n_max."""
        return [self.count(n, *self.start) for n in range(self.n_max + 1)]


def _domain_mask(pred, origin, M) -> np.ndarray:
    mask = np.zeros((M, M), dtype=np.uint8)
    for a in range(M):
        for b in range(M):
            mask[a, b] = pred(a + origin[0], b + origin[1])
    return mask


def _layers_numpy(steps, mask, si, sj, n_max, dtype):
    """Vectorized fallback; ``dtype=object`` keeps exact big integers."""
    M = mask.shape[0]
    keep = mask.astype(bool)
    layers = [np.zeros((M, M), dtype=dtype)]
    layers[0][si, sj] = 1
    for _ in range(n_max):
        old = layers[-1]
        new = np.zeros((M, M), dtype=dtype)
        for di, dj in steps:
            src_a = slice(max(0, -di), M - max(0, di))
            src_b = slice(max(0, -dj), M - max(0, dj))
            dst_a = slice(max(0, di), M - max(0, -di))
            dst_b = slice(max(0, dj), M - max(0, -dj))
            new[dst_a, dst_b] += old[src_a, src_b]
        new[~keep] = 0
        layers.append(new)
    return layers


def count_walks(steps: StepSet, domain: str, start: tuple[int, int] = (0, 0), n_max: int = 0,
                backend: str = "auto") -> CountTable:
    """Forward count of n-step walks from ``start`` staying in ``domain``.

    ``backend`` is ``"compiled"``, ``"numpy"`` or ``"auto"``; counts that may
    overflow 64 bits always go through exact Python integers.
    """
    domain = domain_name(domain)
    pred = DOMAINS[domain]
    start = (int(start[0]), int(start[1]))
    if n_max < 0:
        raise ValidationError("n_max must be nonnegative")
    if not pred(*start):
        raise StartOutsideDomain(f"start {start} is not in the {domain} domain")
    reach = max(max(abs(a), abs(b)) for a, b in steps)
    M = 2 * reach * n_max + 1
    origin = (start[0] - reach * n_max, start[1] - reach * n_max)
    mask = _domain_mask(pred, origin, M)
    si = sj = reach * n_max
    fits = len(steps) ** n_max <= _INT64_MAX
    if backend == "compiled" and not (HAVE_COMPILED and fits):
        raise ValidationError("compiled backend unavailable or counts exceed 64 bits")
    if fits and HAVE_COMPILED and backend in ("auto", "compiled") and reach == 1:
        arr = _compiled_layers(np.array(steps.steps, dtype=np.int64), mask, si, sj, n_max)
        layers = tuple(arr[n] for n in range(n_max + 1))
    else:
        dtype = np.int64 if fits else object
        layers = tuple(_layers_numpy(steps.steps, mask, si, sj, n_max, dtype))
    return CountTable(steps, domain, start, n_max, layers, origin)


# sections


SECTIONS: dict[str, Callable[[int, int], bool]] = {
    "C": lambda i, j: True,
    "Lhat": lambda i, j: i >= 0 and j <= i - 1,
    "Dhat": lambda i, j: i == j and i >= 0,
    "Uhat": lambda i, j: j >= 0 and i <= j - 1,
    "Dl": lambda i, j: j == i - 1 and i >= 0,
    "Du": lambda i, j: i == j - 1 and j >= 0,
    "L0-": lambda i, j: i == 0 and j < 0,
    "C-0": lambda i, j: j == 0 and i <= 0,
    "C0-": lambda i, j: i == 0 and j <= 0,
    "C00": lambda i, j: i == 0 and j == 0,
    "Q": lambda i, j: True,
    "Q-0": lambda i, j: j == 0,
    "Q0-": lambda i, j: i == 0,
    "Q00": lambda i, j: i == 0 and j == 0,
}
SECTION_ALIASES = {
    "L̂": "Lhat", "D̂": "Dhat", "Û": "Uhat", "D̂ℓ": "Dl", "D̂u": "Du", "L̂0−": "L0-",
    "L0−": "L0-", "Q−0": "Q-0", "Q0−": "Q0-", "C−0": "C-0", "C0−": "C0-",
}


class BiSeries:
    """Truncated series in t with Laurent-polynomial coefficients in x and y.

    Keys are ``(n, i, j)`` for ``t^n x^i y^j``.
    """

    __slots__ = ("terms", "N")

    def __init__(self, terms: dict | None = None, N: int | None = None):
        self.N = N
        self.terms = {}
        for k, v in (terms or {}).items():
            if v and (N is None or k[0] <= N):
                self.terms[k] = v

    def __add__(self, other: "BiSeries") -> "BiSeries":
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, 0) + v
        return BiSeries(out, _min_n(self.N, other.N))

    def __neg__(self):
        return BiSeries({k: -v for k, v in self.terms.items()}, self.N)

    def __sub__(self, other):
        return self + (-other)

    def times(self, poly) -> "BiSeries":
        """Multiply by a finite sum of monomials given as ``(dn, di, dj, coeff)``."""
        out: dict = {}
        for (n, i, j), v in self.terms.items():
            for dn, di, dj, c in poly:
                k = (n + dn, i + di, j + dj)
                out[k] = out.get(k, 0) + v * c
        return BiSeries(out, self.N)

    def map_exponents(self, f) -> "BiSeries":
        out: dict = {}
        for (n, i, j), v in self.terms.items():
            k = (n,) + tuple(f(i, j))
            out[k] = out.get(k, 0) + v
        return BiSeries(out, self.N)

    def coefficient(self, n: int, i: int = 0, j: int = 0):
        return self.terms.get((n, i, j), 0)

    def max_abs(self) -> Fraction:
        return max((abs(Fraction(v)) for v in self.terms.values()), default=Fraction(0))

    def __eq__(self, other):
        return isinstance(other, BiSeries) and self.terms == other.terms


def _min_n(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


@dataclass
class SectionSeries:
    which: str
    series: BiSeries

    def coefficient(self, n: int, i: int = 0, j: int = 0) -> int:
        return self.series.coefficient(n, i, j)


def extract_section(table: CountTable, which: str) -> SectionSeries:
    """Sum of ``counts(n, i, j) t^n x^i y^j`` over the support of ``which``."""
    key = SECTION_ALIASES.get(which, which)
    if key not in SECTIONS:
        raise ValidationError(f"unknown section {which!r}")
    pred = SECTIONS[key]
    terms = {}
    for n in range(table.n_max + 1):
        for i, j, c in table.cells(n):
            if pred(i, j):
                terms[(n, i, j)] = c
    return SectionSeries(key, BiSeries(terms, table.n_max))


# functional equations


@dataclass(frozen=True)
class ResidualReport:
    """Largest absolute residual coefficient of each equation through t^N."""

    N: int
    lhat: Fraction
    octant: Fraction
    three_quadrant: Fraction
    quadrant: Fraction

    @property
    def max_residual(self) -> Fraction:
        return max(self.lhat, self.octant, self.three_quadrant, self.quadrant)

    def as_dict(self) -> dict:
        return {"N": self.N, "lhat": str(self.lhat), "octant": str(self.octant),
                "three_quadrant": str(self.three_quadrant), "quadrant": str(self.quadrant)}


def _kernel_poly(steps: StepSet):
    """``xy(t * sum x^i y^j - 1)`` as monomials."""
    return [(1, i + 1, j + 1, 1) for i, j in steps] + [(0, 1, 1, -1)]


def _one(N):
    return BiSeries({(0, 0, 0): 1}, N)


def _residual_lhat(steps: StepSet, table: CountTable, N: int) -> BiSeries:
    d = steps.delta
    half = Fraction(1, 2)
    L = extract_section(table, "Lhat").series
    D = extract_section(table, "Dhat").series
    L0 = extract_section(table, "L0-").series
    D00 = extract_section(table, "C00").series
    lhs = L.times(_kernel_poly(steps))
    rhs = _one(N).times([(0, 1, 1, -half)])
    rhs = rhs + L0.times([(1, 0, 0, d(-1, -1)), (1, 0, 1, d(-1, 0))])
    rhs = rhs + D00.times([(1, 0, 0, half * d(-1, -1))])
    rhs = rhs - D.times([(0, 1, 1, -half), (1, 2, 2, half * d(1, 1)), (1, 0, 0, half * d(-1, -1)),
                         (1, 1, 0, d(0, -1)), (1, 2, 1, d(1, 0))])
    return lhs - rhs


def _residual_octant(steps: StepSet, table: CountTable, N: int) -> BiSeries:
    S = phi_transform(steps)
    half = Fraction(1, 2)
    # L(x, y) = Lhat(xy, 1/x): cell (a, b) -> x^(a-b) y^a
    L = extract_section(table, "Lhat").series.map_exponents(lambda a, b: (a - b, a))
    D = extract_section(table, "Dhat").series.map_exponents(lambda a, b: (0, a))
    Lm0 = extract_section(table, "L0-").series.map_exponents(lambda a, b: (-b, 0))
    D0 = extract_section(table, "C00").series
    c_x = [(1, i + 1, 0, 1) for i, j in S if j == -1]
    # x (x a~(y) + b~(y)/2)
    xa = [(1, 2, j + 1, 1) for i, j in S if i == 1]
    xb = [(1, 1, j + 1, half) for i, j in S if i == 0] + [(0, 1, 1, -half)]
    lhs = L.times(_kernel_poly(S))
    # the D(0) term carries delta_{-1,-1}: it is the image of the corner term of the Lhat equation
    rhs = Lm0.times(c_x) - D.times(xa + xb) + D0.times([(1, 1, 0, half * steps.delta(-1, -1))])
    rhs = rhs + _one(N).times([(0, 1, 1, -half)])
    return lhs - rhs


def _residual_master(steps: StepSet, C: BiSeries, xs: BiSeries, ys: BiSeries, corner: BiSeries,
                     N: int, corner_poly=None) -> BiSeries:
    """``K C - c(x) C_x - c~(y) C_y - corner_poly * C00 + xy``.

    The default corner term is ``-t delta_{-1,-1}``, which is exact for the
    quadrant and, in the three-quadrant cone, only when SW is the sole step
    with a negative coordinate.
    """
    c_x = [(1, i + 1, 0, 1) for i, j in steps if j == -1]
    ct_y = [(1, 0, j + 1, 1) for i, j in steps if i == -1]
    if corner_poly is None:
        corner_poly = [(1, 0, 0, -steps.delta(-1, -1))]
    lhs = C.times(_kernel_poly(steps))
    rhs = xs.times(c_x) + ys.times(ct_y) + corner.times(corner_poly)
    rhs = rhs + _one(N).times([(0, 1, 1, -1)])
    return lhs - rhs


def _three_quadrant_corner(steps: StepSet):
    """Corner term ``-(c(x) + c~(y) - t delta_{-1,-1})`` valid for every step set under (H).

    Walks leave the cone only from the nonpositive half-axes; the origin is
    reached by both half-axis sums, so their overcount is removed and the
    genuine corner exit (a SW step) is added back.
    """
    poly = [(1, i + 1, 0, -1) for i, j in steps if j == -1]
    poly += [(1, 0, j + 1, -1) for i, j in steps if i == -1]
    poly.append((1, 0, 0, steps.delta(-1, -1)))
    return poly


def master_equation_residual(steps: StepSet, N: int, short_corner: bool = False) -> Fraction:
    """Largest residual coefficient of the three-quadrant equation through t^N."""
    three = count_walks(steps, "three_quadrant", (0, 0), N)
    sec = lambda w: extract_section(three, w).series  # noqa: E731
    corner = None if short_corner else _three_quadrant_corner(steps)
    r = _residual_master(steps, sec("C"), sec("C-0"), sec("C0-"), sec("C00"), N, corner)
    return BiSeries({k: v for k, v in r.terms.items() if k[0] <= N}, N).max_abs()


def check_functional_equation(steps: StepSet, N: int) -> ResidualReport:
    """Substitute enumerated sections into the four functional equations."""
    if not validate(steps).satisfies_H:
        raise HypothesisViolated(f"{steps.label()} is not symmetric or has an antidiagonal step")
    if N < 1:
        raise ValidationError("N must be at least 1")
    three = count_walks(steps, "three_quadrant", (0, 0), N)
    quad = count_walks(steps, "quadrant", (0, 0), N)

    def trunc(b: BiSeries) -> BiSeries:
        return BiSeries({k: v for k, v in b.terms.items() if k[0] <= N}, N)

    r1 = trunc(_residual_lhat(steps, three, N))
    r2 = trunc(_residual_octant(steps, three, N))
    sec = lambda tab, w: extract_section(tab, w).series  # noqa: E731
    r3 = trunc(_residual_master(steps, sec(three, "C"), sec(three, "C-0"), sec(three, "C0-"),
                                sec(three, "C00"), N, _three_quadrant_corner(steps)))
    r4 = trunc(_residual_master(steps, sec(quad, "Q"), sec(quad, "Q-0"), sec(quad, "Q0-"),
                                sec(quad, "Q00"), N))
    return ResidualReport(N, r1.max_abs(), r2.max_abs(), r3.max_abs(), r4.max_abs())


def diagonal_series(steps: StepSet, n_max: int):
    """Exact ``D(0) = sum c_{0,0}(n) t^n`` as a series, for cross-checks."""
    from .pseries import PuiseuxSeries

    table = count_walks(steps, "three_quadrant", (0, 0), n_max)
    return PuiseuxSeries(dict(enumerate(table.excursions())), 1, n_max + 1)
