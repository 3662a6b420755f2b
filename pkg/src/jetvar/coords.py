"""Coordinates on jet spaces: base variables, symmetric jet variables, and
the auxiliary homotopy parameter, together with the ambient JetContext.

Jet coordinates are labelled by a fiber index and a *sorted* multi-index of
base-variable indices; ``y_{2,1}`` and ``y_{1,2}`` denote the same symmetric
coordinate and are normalized to the sorted form on construction.
"""

from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass, replace

from .errors import UnknownCoordinate

MultiIndex = tuple  # sorted tuple of 1-based base indices


def midx(*indices: int) -> MultiIndex:
    """Build a sorted multi-index from the given base indices."""
    return tuple(sorted(indices))


def index_with(J: MultiIndex, i: int) -> MultiIndex:
    """The multi-index J with one extra occurrence of i, kept sorted."""
    return tuple(sorted(J + (i,)))


def multiplicity(J: MultiIndex) -> int:
    """Number of distinct ordered tuples representing the multi-index J."""
    counts = Counter(J)
    result = math.factorial(len(J))
    for c in counts.values():
        result //= math.factorial(c)
    return result


def multi_indices(n: int, length: int):
    """All sorted multi-indices of the given length over base indices 1..n."""
    return itertools.combinations_with_replacement(range(1, n + 1), length)


def multi_indices_up_to(n: int, order: int):
    """All sorted multi-indices of length 0..order, shortest first."""
    for k in range(order + 1):
        yield from multi_indices(n, k)


@dataclass(frozen=True, slots=True)
class BaseCoord:
    """The base variable x^i (1-based)."""

    i: int


@dataclass(frozen=True, slots=True)
class JetCoord:
    """The jet variable y^sigma_J (sigma 1-based, J sorted)."""

    sigma: int
    J: MultiIndex = ()

    def __post_init__(self):
        object.__setattr__(self, "J", tuple(sorted(self.J)))


@dataclass(frozen=True, slots=True)
class ParamCoord:
    """The homotopy parameter t used in fiber-scaling integrals."""


PARAM = ParamCoord()

Coord = BaseCoord | JetCoord | ParamCoord

_RESERVED_NAMES = frozenset({"t", "sin", "cos", "exp"})


def coord_key(c: Coord) -> tuple:
    """Total order on coordinates: base first, then jets graded by
    (fiber index, index length, index), parameter last."""
    if isinstance(c, BaseCoord):
        return (0, c.i)
    if isinstance(c, JetCoord):
        return (1, c.sigma, len(c.J), c.J)
    return (2,)


@dataclass(frozen=True)
class JetContext:
    """Ambient chart data: n base variables, m fiber variables, a maximum
    declared jet order, display names, and a hard prolongation ceiling."""

    n: int
    m: int
    order: int
    base_names: tuple = ()
    fiber_names: tuple = ()
    ceiling: int = 12

    def __post_init__(self):
        if self.n < 1 or self.m < 1 or self.order < 0:
            raise ValueError("need n >= 1, m >= 1, order >= 0")
        if not self.base_names:
            object.__setattr__(
                self, "base_names", tuple(f"x{i}" for i in range(1, self.n + 1))
            )
        if not self.fiber_names:
            if self.m == 1:
                object.__setattr__(self, "fiber_names", ("u",))
            else:
                object.__setattr__(
                    self, "fiber_names", tuple(f"u{s}" for s in range(1, self.m + 1))
                )
        if len(self.base_names) != self.n or len(self.fiber_names) != self.m:
            raise ValueError("name counts must match n and m")
        names = tuple(self.base_names) + tuple(self.fiber_names)
        if len(set(names)) != len(names):
            raise ValueError("coordinate names must be pairwise distinct")
        for name in names:
            if name in _RESERVED_NAMES:
                raise ValueError(f"{name!r} is reserved")
            if not name.isidentifier():
                raise ValueError(f"{name!r} is not a valid identifier")
        if self.ceiling < self.order:
            raise ValueError("ceiling must be at least the declared order")

    def with_order(self, order: int) -> "JetContext":
        """Copy of this context carrying a different declared order."""
        return replace(self, order=order, ceiling=max(self.ceiling, order))

    def declares(self, c: Coord) -> bool:
        if isinstance(c, BaseCoord):
            return 1 <= c.i <= self.n
        if isinstance(c, JetCoord):
            return (
                1 <= c.sigma <= self.m
                and all(1 <= i <= self.n for i in c.J)
                and len(c.J) <= self.ceiling
            )
        return isinstance(c, ParamCoord)

    def check_coord(self, c: Coord) -> None:
        if not self.declares(c):
            raise UnknownCoordinate(f"{self.coord_name(c)} is not declared")

    def compatible(self, other: "JetContext") -> bool:
        """Same chart up to bookkeeping (order, ceiling)."""
        return (
            self.n == other.n
            and self.m == other.m
            and self.base_names == other.base_names
            and self.fiber_names == other.fiber_names
        )

    def coord_name(self, c: Coord) -> str:
        if isinstance(c, BaseCoord):
            if 1 <= c.i <= self.n:
                return self.base_names[c.i - 1]
            return f"x{c.i}"
        if isinstance(c, JetCoord):
            if 1 <= c.sigma <= self.m:
                name = self.fiber_names[c.sigma - 1]
            else:
                name = f"u{c.sigma}"
            if not c.J:
                return name
            return name + "_{" + ",".join(str(i) for i in c.J) + "}"
        return "t"

    def base_coords(self):
        return [BaseCoord(i) for i in range(1, self.n + 1)]

    def jet_coords(self, order: int | None = None):
        """All jet coordinates with index length 0..order (default: the
        declared order)."""
        top = self.order if order is None else order
        return [
            JetCoord(s, J)
            for s in range(1, self.m + 1)
            for J in multi_indices_up_to(self.n, top)
        ]
