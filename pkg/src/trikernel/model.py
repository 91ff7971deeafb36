"""Step sets, the symmetry hypothesis, the change of variable and the group of the walk."""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

from .errors import DegenerateModel, ValidationError

Step = tuple[int, int]

COMPASS: dict[str, Step] = {
    "N": (0, 1),
    "S": (0, -1),
    "E": (1, 0),
    "W": (-1, 0),
    "NE": (1, 1),
    "NW": (-1, 1),
    "SE": (1, -1),
    "SW": (-1, -1),
}
_NAMES = {v: k for k, v in COMPASS.items()}

SMALL_STEPS = frozenset(COMPASS.values())


@dataclass(frozen=True)
class StepSet:
    """A finite set of lattice steps, kept in lexicographic order."""

    steps: tuple[Step, ...]
    name: str | None = field(default=None, compare=False)

    def __init__(self, steps: Iterable[Step], name: str | None = None):
        cleaned = sorted({(int(a), int(b)) for a, b in steps})
        if not cleaned:
            raise ValidationError("a step set must be nonempty")
        if (0, 0) in cleaned:
            raise ValidationError("the zero step is not allowed")
        object.__setattr__(self, "steps", tuple(cleaned))
        object.__setattr__(self, "name", name)

    @classmethod
    def from_names(cls, names: Iterable[str], name: str | None = None) -> "StepSet":
        try:
            return cls([COMPASS[n.strip().upper()] for n in names], name)
        except KeyError as exc:
            raise ValidationError(f"unknown compass direction {exc.args[0]!r}") from None

    def __iter__(self):
        return iter(self.steps)

    def __len__(self):
        return len(self.steps)

    def __contains__(self, step):
        return tuple(step) in self.steps

    def delta(self, i: int, j: int) -> int:
        return 1 if (i, j) in self.steps else 0

    def is_small(self) -> bool:
        return all(s in SMALL_STEPS for s in self.steps)

    def mirror(self) -> "StepSet":
        return StepSet([(j, i) for i, j in self.steps])

    def compass(self) -> list[str]:
        return [_NAMES.get(s, str(s)) for s in self.steps]

    def label(self) -> str:
        return self.name or "{" + ",".join(self.compass()) + "}"

    def to_json(self) -> dict:
        return {"name": self.name, "steps": [list(s) for s in self.steps]}


@dataclass(frozen=True)
class ModelValidation:
    symmetric: bool
    has_antidiagonal: bool
    satisfies_H: bool


@dataclass(frozen=True)
class GroupOrder:
    """Order of the group of the walk; ``value`` is None when no closure was seen."""

    value: int | None
    bound: int | None = None

    @property
    def is_finite(self) -> bool:
        return self.value is not None

    def __str__(self):
        return str(self.value) if self.value is not None else f"Infinite({self.bound})"


def Infinite(bound: int) -> GroupOrder:
    return GroupOrder(None, bound)


PRESETS: dict[str, tuple[str, ...]] = {
    "simple": ("N", "S", "E", "W"),
    "diagonal": ("NE", "NW", "SE", "SW"),
    "gouyou-beauchamps": ("E", "W", "SE", "NW"),
    "kreweras": ("NE", "S", "W"),
    "reverse-kreweras": ("N", "E", "SW"),
    "double-kreweras": ("NE", "S", "W", "N", "E", "SW"),
    "gessel": ("NE", "W", "E", "SW"),
    "e-ne-n-sw": ("E", "NE", "N", "SW"),
    "w-ne-s-sw": ("W", "NE", "S", "SW"),
    "e-w-n-s-sw": ("E", "W", "N", "S", "SW"),
    "e-w-n-s-ne": ("E", "W", "N", "S", "NE"),
}
ALIASES = {"union-kreweras": "double-kreweras", "gouyou": "gouyou-beauchamps"}

# symmetric models with a finite group, then with an infinite group
FINITE_GROUP_MODELS = ("simple", "kreweras", "reverse-kreweras", "double-kreweras")
INFINITE_GROUP_MODELS = ("e-ne-n-sw", "w-ne-s-sw", "e-w-n-s-sw", "e-w-n-s-ne")
SYMMETRIC_MODELS = FINITE_GROUP_MODELS + INFINITE_GROUP_MODELS


def preset(name: str) -> StepSet:
    key = ALIASES.get(name.lower(), name.lower())
    if key not in PRESETS:
        raise ValidationError(f"unknown model {name!r}")
    return StepSet.from_names(PRESETS[key], key)


def load_model(spec: str) -> StepSet:
    """Preset name, JSON model file, or comma-separated compass directions."""
    key = ALIASES.get(spec.lower(), spec.lower())
    if key in PRESETS:
        return preset(key)
    path = Path(spec)
    if path.suffix == ".json" or path.is_file():
        try:
            data = json.loads(path.read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ValidationError(f"cannot read model file {spec!r}: {exc}") from None
        if "steps" not in data:
            raise ValidationError("model file needs a 'steps' list")
        return StepSet([tuple(s) for s in data["steps"]], data.get("name"))
    return StepSet.from_names(spec.split(","))


def validate(steps: StepSet) -> ModelValidation:
    symmetric = all((j, i) in steps for i, j in steps)
    anti = (-1, 1) in steps or (1, -1) in steps
    return ModelValidation(symmetric, anti, symmetric and not anti)


def phi_transform(steps: StepSet) -> StepSet:
    """Image of the steps under ``(x, y) -> (xy, 1/x)``, i.e. ``(i, j) -> (i - j, i)``."""
    name = None if steps.name is None else f"phi({steps.name})"
    return StepSet([(i - j, i) for i, j in steps], name)


def phi_inverse_steps(steps: StepSet) -> StepSet:
    return StepSet([(j, j - i) for i, j in steps])


# group of the walk


_PRIME = (1 << 61) - 1


def _ratio_parts(steps: StepSet):
    """Exponent lists for c/a (in x) and c~/a~ (in y)."""
    a = [i for i, j in steps if j == 1]
    c = [i for i, j in steps if j == -1]
    at = [j for i, j in steps if i == 1]
    ct = [j for i, j in steps if i == -1]
    if not (a and c and at and ct):
        raise DegenerateModel("the group needs steps in all four of the directions i=+-1 and j=+-1")
    return a, c, at, ct


def _laurent_mod(exps: list[int], v: int) -> int:
    inv = pow(v, _PRIME - 2, _PRIME)
    return sum(pow(v, e, _PRIME) if e >= 0 else pow(inv, -e, _PRIME) for e in exps) % _PRIME


def _orbit_length_mod(parts, x: int, y: int, max_iter: int) -> int | None:
    a, c, at, ct = parts
    x0, y0 = x, y
    for n in range(1, max_iter + 1):
        if n % 2:  # Phi acts on x
            num, den = _laurent_mod(ct, y), _laurent_mod(at, y) * x % _PRIME
            if den == 0:
                raise ZeroDivisionError
            x = num * pow(den, _PRIME - 2, _PRIME) % _PRIME
        else:  # Psi acts on y
            num, den = _laurent_mod(c, x), _laurent_mod(a, x) * y % _PRIME
            if den == 0:
                raise ZeroDivisionError
            y = num * pow(den, _PRIME - 2, _PRIME) % _PRIME
        if n % 2 == 0 and x == x0 and y == y0:
            return n
    return None


def _closes_symbolically(parts, n: int) -> bool:
    import sympy

    a, c, at, ct = parts
    X, Y = sympy.symbols("x y")

    def lsum(exps, v):
        return sum(v**e for e in exps)

    x, y = X, Y
    for k in range(1, n + 1):
        if k % 2:
            x = sympy.cancel(lsum(ct, y) / (lsum(at, y) * x))
        else:
            y = sympy.cancel(lsum(c, x) / (lsum(a, x) * y))
    return sympy.simplify(x - X) == 0 and sympy.simplify(y - Y) == 0


def group_order(steps: StepSet, max_iter: int = 400, seed: int = 0) -> GroupOrder:
    """Order of the group generated by the two kernel involutions.

    The orbit of random points is followed in exact modular arithmetic, so the
    coefficient growth of the iterated rational maps never matters; a detected
    closure is then confirmed by composing the rational maps symbolically.
    """
    if not steps.is_small():
        raise DegenerateModel("the group is only defined for small steps")
    parts = _ratio_parts(steps)
    rng = random.Random(seed)
    lengths = []
    while len(lengths) < 2:
        x, y = rng.randrange(2, _PRIME), rng.randrange(2, _PRIME)
        try:
            lengths.append(_orbit_length_mod(parts, x, y, max_iter))
        except ZeroDivisionError:
            continue
    if None in lengths or lengths[0] != lengths[1]:
        return Infinite(max_iter)
    n = lengths[0]
    if not _closes_symbolically(parts, n):
        return Infinite(max_iter)
    return GroupOrder(n)
