"""Numeric verification layer: quadrature and finite differences along
concrete sections.

This module deliberately avoids the symbolic Euler-Lagrange machinery on
one side of each comparison, so that an error in the symbolic combinatorics
shows up as a numeric mismatch instead of cancelling symmetrically."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .coords import BaseCoord, JetContext, JetCoord
from .errors import NotODEContext, ProbeBoundaryError
from .expr import Expr, add, evaluate, mul, num
from .jets import SectionSpec, prolong_section

BOUNDARY_TOL = 1e-12
RICHARDSON_DISAGREE = 1e-9


@dataclass(frozen=True)
class QuadratureSpec:
    """Gauss-Legendre quadrature on [0, 1] plus a central finite-difference
    step."""

    nodes: int = 32
    step: float = 1e-4

    def __post_init__(self):
        if self.nodes < 2:
            raise ValueError("need at least 2 quadrature nodes")
        if self.step <= 0:
            raise ValueError("finite-difference step must be positive")

    def points_weights(self):
        x, w = np.polynomial.legendre.leggauss(self.nodes)
        return (x + 1.0) / 2.0, w / 2.0


@dataclass(frozen=True)
class VariationProbe:
    """A base section and a variation direction; the direction and its
    derivatives below the Lagrangian's order must vanish at both endpoints
    of [0, 1] so the boundary terms of integration by parts drop."""

    gamma: SectionSpec
    phi: SectionSpec

    def check_boundary(self, order: int, ctx: JetContext) -> None:
        jets = prolong_section(self.phi, order, ctx)
        for endpoint in (0.0, 1.0):
            env = {BaseCoord(1): endpoint}
            for coord, e in jets.items():
                value = evaluate(e, env)
                if abs(value) > BOUNDARY_TOL:
                    raise ProbeBoundaryError(
                        f"variation direction has {ctx.coord_name(coord)} = "
                        f"{value} at x = {endpoint}"
                    )


@dataclass(frozen=True)
class FirstVariationResult:
    lhs: float
    rhs: float
    abs_diff: float


def eval_expr_at(e: Expr, bindings: dict) -> float:
    """Floating-point value of an expression under coordinate bindings."""
    return evaluate(e, bindings)


def _section_env(jets: dict, base_env: dict) -> dict:
    env = dict(base_env)
    for coord, e in jets.items():
        env[coord] = evaluate(e, base_env)
    return env


def action(lam, gamma: SectionSpec, quad: QuadratureSpec = QuadratureSpec()) -> float:
    """Quadrature of the Lagrangian density along the prolonged section
    over the base interval [0, 1]."""
    ctx = lam.ctx
    if ctx.n != 1:
        raise NotODEContext(f"the action oracle needs one base variable, got {ctx.n}")
    jets = prolong_section(gamma, lam.r, ctx)
    points, weights = quad.points_weights()
    total = 0.0
    for x, w in zip(points, weights):
        env = _section_env(jets, {BaseCoord(1): float(x)})
        total += w * evaluate(lam.L, env)
    return total


def _shifted(gamma: SectionSpec, phi: SectionSpec, s: float) -> SectionSpec:
    factor = num(Fraction(s))
    return SectionSpec(
        tuple(
            add(g, mul(factor, p))
            for g, p in zip(gamma.components, phi.components)
        )
    )


def first_variation_check(
    lam, probe: VariationProbe, quad: QuadratureSpec = QuadratureSpec()
) -> FirstVariationResult:
    """Compare the finite-difference derivative of s -> action(gamma + s phi)
    at s = 0 against the quadrature of sum_sigma eps_sigma(j^2r gamma) phi^sigma.

    The two sides agree in the continuum because the probe's boundary
    condition kills the boundary terms of integration by parts.  A second
    central difference at half step triggers Richardson extrapolation when
    the two estimates disagree."""
    from .variational import euler_lagrange

    ctx = lam.ctx
    if ctx.n != 1:
        raise NotODEContext(f"the variation oracle needs one base variable, got {ctx.n}")
    probe.gamma.validate(ctx)
    probe.phi.validate(ctx)
    # boundary terms involve the variation's jets up to order r - 1 only
    probe.check_boundary(max(lam.r - 1, 0), ctx)

    def difference(h: float) -> float:
        plus = action(lam, _shifted(probe.gamma, probe.phi, h), quad)
        minus = action(lam, _shifted(probe.gamma, probe.phi, -h), quad)
        return (plus - minus) / (2.0 * h)

    h = quad.step
    d_h = difference(h)
    d_half = difference(h / 2.0)
    lhs = d_h
    if abs(d_h - d_half) > RICHARDSON_DISAGREE:
        lhs = (4.0 * d_half - d_h) / 3.0

    sf = euler_lagrange(lam)
    jets = prolong_section(probe.gamma, sf.s, ctx)
    phi_values = {
        sigma: probe.phi.components[sigma - 1] for sigma in range(1, ctx.m + 1)
    }
    points, weights = quad.points_weights()
    rhs = 0.0
    for x, w in zip(points, weights):
        base_env = {BaseCoord(1): float(x)}
        env = _section_env(jets, base_env)
        value = 0.0
        for sigma in range(1, ctx.m + 1):
            value += evaluate(sf.eps[sigma - 1], env) * evaluate(
                phi_values[sigma], base_env
            )
        rhs += w * value
    return FirstVariationResult(lhs, rhs, abs(lhs - rhs))


def residual_on_section(sf, gamma: SectionSpec, points) -> list:
    """Source form components evaluated along the prolonged section at the
    given base points (numbers for n = 1, index-ordered tuples otherwise)."""
    ctx = sf.ctx
    jets = prolong_section(gamma, sf.s, ctx)
    out = []
    for p in points:
        if ctx.n == 1 and not isinstance(p, (tuple, list)):
            p = (p,)
        if len(p) != ctx.n:
            raise ValueError(f"base point {p!r} has wrong dimension")
        base_env = {BaseCoord(i): float(p[i - 1]) for i in range(1, ctx.n + 1)}
        env = _section_env(jets, base_env)
        out.append([evaluate(e, env) for e in sf.eps])
    return out
