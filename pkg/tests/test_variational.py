"""Euler-Lagrange operator, variationality tests, reconstruction, and
behavior under fibered automorphisms."""

import random
from fractions import Fraction

import pytest

from jetvar import (
    BaseCoord,
    DegreeMismatch,
    DimensionMismatch,
    FiberedIso,
    JetContext,
    JetCoord,
    Lagrangian,
    MultiplierMatrix,
    NonPolynomialParameter,
    NotODEContext,
    SourceForm,
    add,
    classical_helmholtz_ode,
    cos,
    euler_lagrange,
    exp,
    function_form,
    helmholtz_residuals,
    is_null_lagrangian,
    is_zero,
    mul,
    multiplier_check,
    naturality_report,
    neg,
    null_lagrangian_from_eta,
    num,
    pow_,
    pullback_lagrangian,
    sin,
    sym,
    total_derivative,
    tonti_lagrangian,
)

from corpus import random_polynomial

X = BaseCoord(1)
U = JetCoord(1)
U1 = JetCoord(1, (1,))
U11 = JetCoord(1, (1, 1))
V = JetCoord(2)
V1 = JetCoord(2, (1,))


def half(e):
    return mul(num(Fraction(1, 2)), e)


def test_euler_lagrange_free_particle(ode1):
    lam = Lagrangian(half(pow_(sym(U1), 2)), ode1, 1)
    sf = euler_lagrange(lam)
    assert sf.s == 2
    assert sf.eps == (neg(sym(U11)),)


def test_euler_lagrange_beam(ode2):
    lam = Lagrangian(half(pow_(sym(U11), 2)), ode2, 2)
    sf = euler_lagrange(lam)
    assert sf.s == 4
    assert sf.eps == (sym(JetCoord(1, (1, 1, 1, 1))),)


def test_euler_lagrange_laplace(plane1):
    u1, u2 = sym(JetCoord(1, (1,))), sym(JetCoord(1, (2,)))
    lam = Lagrangian(add(half(pow_(u1, 2)), half(pow_(u2, 2))), plane1, 1)
    sf = euler_lagrange(lam)
    assert sf.eps == (
        add(neg(sym(JetCoord(1, (1, 1)))), neg(sym(JetCoord(1, (2, 2))))),
    )


def test_euler_lagrange_coupled_fields():
    ctx = JetContext(n=1, m=2, order=1)
    lam = Lagrangian(mul(sym(U), sym(V1)), ctx, 1)
    sf = euler_lagrange(lam)
    assert sf.eps == (sym(V1), neg(sym(U1)))


def test_euler_lagrange_kills_total_divergences():
    rng = random.Random(103)
    for n in (1, 2):
        ctx = JetContext(n=n, m=1, order=2)
        for _ in range(8):
            f = random_polynomial(rng, ctx, order=1, degree=2, terms=2)
            density = add(
                *[total_derivative(f, i, ctx) for i in range(1, n + 1)]
            )
            lam = Lagrangian(density, ctx, 2)
            assert all(is_zero(e) for e in euler_lagrange(lam).eps)
            assert is_null_lagrangian(lam)


def test_euler_lagrange_is_linear():
    rng = random.Random(107)
    ctx = JetContext(n=1, m=2, order=1)
    for _ in range(8):
        a = random_polynomial(rng, ctx)
        b = random_polynomial(rng, ctx)
        combo = Lagrangian(add(mul(num(3), a), b), ctx, 1)
        ea = euler_lagrange(Lagrangian(a, ctx, 1))
        eb = euler_lagrange(Lagrangian(b, ctx, 1))
        expected = tuple(
            add(mul(num(3), x), y) for x, y in zip(ea.eps, eb.eps)
        )
        assert euler_lagrange(combo).eps == expected


def test_null_lagrangian_from_closed_form_input(plane1):
    eta = function_form(plane1, pow_(sym(U), 2), 1)
    with pytest.raises(DegreeMismatch):
        null_lagrangian_from_eta(eta)


def test_null_lagrangian_from_eta_ode(ode1):
    # eta = u^2 (a 0-form): the null density is its total derivative
    lam = null_lagrangian_from_eta(function_form(ode1, pow_(sym(U), 2), 1))
    assert lam.L == mul(num(2), sym(U), sym(U1))
    assert lam.r == 2
    assert is_null_lagrangian(lam)


def test_helmholtz_on_euler_lagrange_images():
    rng = random.Random(109)
    for n, m, r in ((1, 1, 1), (1, 2, 1), (2, 1, 1), (1, 1, 2), (2, 2, 1)):
        ctx = JetContext(n=n, m=m, order=r)
        for _ in range(3):
            lam = Lagrangian(random_polynomial(rng, ctx, order=r), ctx, r)
            report = helmholtz_residuals(euler_lagrange(lam))
            assert report.is_variational
            assert all(is_zero(rec.residual) for rec in report.records)
            assert report.nonzero_records() == []


def test_helmholtz_first_order_obstruction(ode1):
    sf = SourceForm((sym(U1),), ode1, 1)
    report = helmholtz_residuals(sf)
    assert report.verdict == "not_variational"
    by_key = {(rec.level, rec.I): rec.residual for rec in report.records}
    assert by_key[(1, (1,))] == num(2)
    assert is_zero(by_key[(0, ())])


def test_helmholtz_record_ordering(ode2):
    sf = SourceForm((sym(U11),), ode2, 2)
    report = helmholtz_residuals(sf)
    keys = [(rec.level, rec.I, rec.sigma, rec.nu) for rec in report.records]
    assert keys == sorted(keys)
    assert report.is_variational


def test_helmholtz_probe_rejects_opaque_nonzero(ode1):
    sf = SourceForm((sin(sym(U1)),), ode1, 1)
    assert helmholtz_residuals(sf).verdict == "not_variational"


def test_helmholtz_opaque_zero_order_is_variational(ode1):
    sf = SourceForm((sin(sym(U)),), ode1.with_order(0), 0)
    assert helmholtz_residuals(sf).verdict == "variational"


def test_helmholtz_undecided_on_hidden_identity(ode1):
    # the level-1 residual is sin^2 + cos^2 - 1: structurally nonzero,
    # numerically indistinguishable from zero at every probe point
    u1 = sym(U1)
    eps = mul(
        half(u1),
        add(pow_(sin(u1), 2), pow_(cos(u1), 2), num(-1)),
    )
    report = helmholtz_residuals(SourceForm((eps,), ode1, 1))
    assert report.verdict == "undecided"
    nonzero = report.nonzero_records()
    assert len(nonzero) == 1
    assert nonzero[0].level == 1


def test_classical_agrees_with_general():
    rng = random.Random(113)
    for m in (1, 2, 3):
        ctx = JetContext(n=1, m=m, order=2)
        for _ in range(4):
            eps = tuple(
                random_polynomial(rng, ctx, order=2, degree=2, terms=2)
                for _ in range(m)
            )
            sf = SourceForm(eps, ctx, 2)
            assert (
                classical_helmholtz_ode(sf).verdict
                == helmholtz_residuals(sf).verdict
            )


def test_classical_oscillator_pair():
    ctx = JetContext(n=1, m=2, order=2)
    eps = (
        add(sym(JetCoord(1, (1, 1))), sym(U)),
        add(sym(JetCoord(2, (1, 1))), sym(V)),
    )
    sf = SourceForm(eps, ctx, 2)
    classical = classical_helmholtz_ode(sf)
    general = helmholtz_residuals(sf)
    assert classical.is_variational and general.is_variational
    assert all(is_zero(rec.residual) for rec in classical.records)


def test_classical_context_guards(plane1, ode1):
    with pytest.raises(NotODEContext):
        classical_helmholtz_ode(SourceForm((sym(U),), plane1, 0))
    third = SourceForm((sym(JetCoord(1, (1, 1, 1))),), ode1.with_order(3), 3)
    with pytest.raises(NotODEContext):
        classical_helmholtz_ode(third)


def test_multiplier_fixes_damped_oscillator(ode2):
    eps = add(sym(U11), sym(U1), sym(U))
    sf = SourceForm((eps,), ode2, 2)
    assert helmholtz_residuals(sf).verdict == "not_variational"
    mult = MultiplierMatrix(((exp(sym(X)),),))
    report = multiplier_check(sf, mult)
    assert report.verdict == "variational"
    assert report.multiplier is mult
    with pytest.raises(DimensionMismatch):
        multiplier_check(sf, MultiplierMatrix(((num(1), num(0)), (num(0), num(1)))))


def test_tonti_free_ode(ode2):
    sf = SourceForm((sym(U11),), ode2, 2)
    lam = tonti_lagrangian(sf)
    assert lam.L == half(mul(sym(U), sym(U11)))
    assert lam.r == 2
    assert euler_lagrange(lam).eps == sf.eps


def test_tonti_laplace(plane2):
    eps = add(sym(JetCoord(1, (1, 1))), sym(JetCoord(1, (2, 2))))
    sf = SourceForm((eps,), plane2, 2)
    lam = tonti_lagrangian(sf)
    assert lam.L == add(
        half(mul(sym(U), sym(JetCoord(1, (1, 1))))),
        half(mul(sym(U), sym(JetCoord(1, (2, 2))))),
    )
    assert euler_lagrange(lam).eps == sf.eps


def test_tonti_with_base_inhomogeneity(ode2):
    sf = SourceForm((add(sym(U11), sym(X)),), ode2, 2)
    lam = tonti_lagrangian(sf)
    assert euler_lagrange(lam).eps == sf.eps


def test_tonti_round_trip_random():
    rng = random.Random(127)
    for n, m, r in ((1, 1, 1), (2, 1, 1), (1, 2, 2)):
        ctx = JetContext(n=n, m=m, order=r)
        for _ in range(4):
            lam = Lagrangian(random_polynomial(rng, ctx, order=r), ctx, r)
            sf = euler_lagrange(lam)
            rebuilt = tonti_lagrangian(sf)
            assert euler_lagrange(rebuilt).eps == sf.eps
            difference = Lagrangian(
                add(rebuilt.L, neg(lam.L)), ctx.with_order(rebuilt.r), rebuilt.r
            )
            assert is_null_lagrangian(difference)


def test_tonti_rejects_transcendental_fiber_dependence(ode1):
    sf = SourceForm((sin(sym(U)),), ode1.with_order(0), 0)
    with pytest.raises(NonPolynomialParameter):
        tonti_lagrangian(sf)


def test_source_form_validation(ode1):
    with pytest.raises(DimensionMismatch):
        SourceForm((sym(U), sym(U)), ode1, 1)
    with pytest.raises(ValueError):
        SourceForm((sym(U11),), ode1, 1)


def test_pullback_lagrangian_base_scaling(ode1):
    # xbar = 2x: the density picks up dxbar = 2 dx against ubar_1 = u_1/2
    lam = Lagrangian(pow_(sym(U1), 2), ode1, 1)
    iso = FiberedIso((mul(num(2), sym(X)),), (sym(U),))
    pulled = pullback_lagrangian(lam, iso)
    assert pulled.L == half(pow_(sym(U1), 2))


def test_naturality_under_fibered_automorphisms(ode1):
    lam = Lagrangian(half(pow_(sym(U1), 2)), ode1, 1)
    isos = [
        FiberedIso((mul(num(2), sym(X)),), (sym(U),)),
        FiberedIso((sym(X),), (add(sym(U), pow_(sym(U), 2)),)),
        FiberedIso((add(sym(X), num(-1)),), (mul(num(3), sym(U)),)),
    ]
    for iso in isos:
        report = naturality_report(lam, iso)
        assert set(report) == {"theorem3", "theorem4"}
        assert report["theorem3"] and report["theorem4"]
