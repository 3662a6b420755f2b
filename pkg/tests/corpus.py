"""Seeded random corpora shared across the test modules."""

import random
from fractions import Fraction

from jetvar import (
    BaseCoord,
    JetCoord,
    add,
    cos,
    exp,
    mul,
    multi_indices_up_to,
    num,
    pow_,
    sin,
    sym,
)


def coordinate_atoms(ctx, order):
    out = [BaseCoord(i) for i in range(1, ctx.n + 1)]
    for sigma in range(1, ctx.m + 1):
        for J in multi_indices_up_to(ctx.n, order):
            out.append(JetCoord(sigma, J))
    return out


def random_polynomial(rng, ctx, order=None, degree=3, terms=3):
    """Fully expanded random polynomial in the base and jet coordinates up
    to the given order, with small integer coefficients."""
    order = ctx.order if order is None else order
    atoms = coordinate_atoms(ctx, order)
    parts = []
    for _ in range(rng.randint(1, terms)):
        coeff = rng.randint(-4, 4) or 1
        factors = [num(Fraction(coeff))]
        for _ in range(rng.randint(1, degree)):
            factors.append(sym(rng.choice(atoms)))
        parts.append(mul(*factors))
    return add(*parts)


def random_base_polynomial(rng, ctx, degree=3, terms=2):
    """Random polynomial in the base coordinates only (section material)."""
    atoms = [BaseCoord(i) for i in range(1, ctx.n + 1)]
    parts = []
    for _ in range(rng.randint(1, terms)):
        coeff = rng.randint(-4, 4) or 1
        factors = [num(Fraction(coeff))]
        for _ in range(rng.randint(0, degree)):
            factors.append(sym(rng.choice(atoms)))
        parts.append(mul(*factors))
    return add(*parts)


def random_mixed(rng, ctx, order=None):
    """Polynomial with some sin/cos/exp factors wrapped around small
    polynomial arguments."""
    base = random_polynomial(rng, ctx, order, degree=2, terms=2)
    wrapper = rng.choice([None, sin, cos, exp])
    if wrapper is None:
        return base
    atom = sym(rng.choice(coordinate_atoms(ctx, order or ctx.order)))
    arg = atom if rng.random() < 0.7 else pow_(atom, 2)
    return add(base, mul(num(Fraction(rng.randint(1, 3))), wrapper(arg)))


def random_env(rng, coords):
    """Rational sample point bounded away from the coordinate hyperplanes."""
    env = {}
    for c in coords:
        magnitude = Fraction(rng.randint(50, 250), 100)
        env[c] = magnitude if rng.random() < 0.5 else -magnitude
    return env
