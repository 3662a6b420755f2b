"""Total derivatives on jet coordinates and prolongation of sections."""

from __future__ import annotations

from dataclasses import dataclass

from .coords import (
    BaseCoord,
    JetContext,
    JetCoord,
    MultiIndex,
    index_with,
    multi_indices,
)
from .errors import DimensionMismatch, OrderOverflow, UnknownCoordinate
from .expr import (
    Add,
    Expr,
    Func,
    Mul,
    Num,
    Pow,
    Sym,
    ZERO,
    ONE,
    add,
    coords_in,
    is_zero,
    mul,
    neg,
    partial,
    pow_,
    sym,
)


def total_derivative(e: Expr, i: int, ctx: JetContext) -> Expr:
    """Total derivative in the i-th base direction: differentiates x^i to 1,
    lifts every jet coordinate one level (y^s_J to y^s_{Ji}), kills t.

    Raises OrderOverflow when a lifted coordinate would exceed the context
    ceiling; the ceiling guards against runaway iterated derivatives.
    """
    if not 1 <= i <= ctx.n:
        raise UnknownCoordinate(f"no base direction {i} in a {ctx.n}-dimensional base")
    return _td(e, i, ctx.ceiling)


def _td(e: Expr, i: int, ceiling: int) -> Expr:
    if isinstance(e, Num):
        return ZERO
    if isinstance(e, Sym):
        c = e.coord
        if isinstance(c, BaseCoord):
            return ONE if c.i == i else ZERO
        if isinstance(c, JetCoord):
            if len(c.J) + 1 > ceiling:
                raise OrderOverflow(
                    f"total derivative would raise jet order past ceiling {ceiling}"
                )
            return Sym(JetCoord(c.sigma, index_with(c.J, i)))
        return ZERO
    if isinstance(e, Add):
        return add(*[_td(t, i, ceiling) for t in e.terms])
    if isinstance(e, Mul):
        out = []
        for k, f in enumerate(e.factors):
            df = _td(f, i, ceiling)
            if not is_zero(df):
                out.append(mul(df, *e.factors[:k], *e.factors[k + 1 :]))
        return add(*out) if out else ZERO
    if isinstance(e, Pow):
        db = _td(e.base, i, ceiling)
        if is_zero(db):
            return ZERO
        return mul(Num(e.exp), pow_(e.base, e.exp - 1), db)
    da = _td(e.arg, i, ceiling)
    if is_zero(da):
        return ZERO
    if e.name == "sin":
        outer: Expr = Func("cos", e.arg)
    elif e.name == "cos":
        outer = neg(Func("sin", e.arg))
    else:
        outer = e
    return mul(outer, da)


def iterated_total_derivative(e: Expr, J: MultiIndex, ctx: JetContext) -> Expr:
    """d_J applied entrywise; total derivatives commute so the order of the
    entries of J does not matter."""
    out = e
    for i in J:
        if is_zero(out):
            return ZERO
        out = total_derivative(out, i, ctx)
    return out


@dataclass(frozen=True)
class SectionSpec:
    """A section of the fibration given by one expression per fiber
    component, each depending on base coordinates only."""

    components: tuple

    def __post_init__(self):
        object.__setattr__(self, "components", tuple(self.components))

    def validate(self, ctx: JetContext) -> None:
        if len(self.components) != ctx.m:
            raise DimensionMismatch(
                f"section has {len(self.components)} components, context expects {ctx.m}"
            )
        for comp in self.components:
            for c in coords_in(comp):
                if not isinstance(c, BaseCoord) or not 1 <= c.i <= ctx.n:
                    raise UnknownCoordinate(
                        f"section component may only use base coordinates, found {c}"
                    )


def prolong_section(spec: SectionSpec, order: int, ctx: JetContext) -> dict:
    """Jet coordinates of the prolonged section as expressions in the base
    coordinates: y^s_J evaluates to the J-th partial of component s."""
    spec.validate(ctx)
    if order < 0:
        raise ValueError("prolongation order must be nonnegative")
    out: dict[JetCoord, Expr] = {}
    for sigma, comp in enumerate(spec.components, start=1):
        out[JetCoord(sigma)] = comp
        for k in range(1, order + 1):
            for J in multi_indices(ctx.n, k):
                parent = out[JetCoord(sigma, J[:-1])]
                out[JetCoord(sigma, J)] = partial(parent, BaseCoord(J[-1]))
    return out
