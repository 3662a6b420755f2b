"""Differential forms: wedge algebra, exterior derivative, contact
structure, Cartan forms, and pullback along fibered automorphisms."""

import random
from fractions import Fraction

import pytest

from jetvar import (
    BaseCoord,
    ContextMismatch,
    DegreeMismatch,
    DiffForm,
    DX,
    DY,
    FiberedIso,
    JetContext,
    JetCoord,
    Lagrangian,
    OrderZeroWarning,
    SingularBaseMap,
    UnknownCoordinate,
    W,
    add,
    cartan_form,
    cartan_form_contact,
    contact_decompose,
    contact_form,
    differential,
    euler_lagrange,
    expand_contact,
    exterior_derivative,
    form_add,
    function_form,
    horizontalize,
    mul,
    neg,
    num,
    omega_0,
    omega_i,
    pow_,
    prolong_isomorphism,
    pullback,
    scale,
    sym,
    wedge,
    zero_form,
)
from jetvar.forms import form_from_terms

from corpus import random_polynomial

X = BaseCoord(1)
U = JetCoord(1)
U1 = JetCoord(1, (1,))
U11 = JetCoord(1, (1, 1))
U111 = JetCoord(1, (1, 1, 1))


def _one_form(ctx, gens_and_coeffs, order):
    return form_from_terms(ctx, order, 1, gens_and_coeffs)


def _random_one_form(rng, ctx):
    gens = [(DX(i),) for i in range(1, ctx.n + 1)]
    for sigma in range(1, ctx.m + 1):
        gens.append((DY(sigma),))
        gens.append((DY(sigma, (1,)),))
    picked = rng.sample(gens, rng.randint(1, min(3, len(gens))))
    pairs = [
        (g, random_polynomial(rng, ctx, order=1, degree=2, terms=2)) for g in picked
    ]
    return form_from_terms(ctx, 1, 1, pairs)


def test_wedge_antisymmetry(plane1):
    dx1 = DiffForm(plane1, 0, 1, {(DX(1),): num(1)})
    dx2 = DiffForm(plane1, 0, 1, {(DX(2),): num(1)})
    du = DiffForm(plane1, 0, 1, {(DY(1),): num(1)})
    assert wedge(dx1, dx1).is_zero()
    assert wedge(du, du).is_zero()
    assert wedge(dx1, dx2) == scale(wedge(dx2, dx1), num(-1))
    assert wedge(dx1, dx2).terms == {(DX(1), DX(2)): num(1)}
    # dy sorts before dx in the wedge word
    assert wedge(dx1, du).terms == {(DY(1), DX(1)): num(-1)}


def test_wedge_associative_and_bilinear():
    rng = random.Random(71)
    ctx = JetContext(n=2, m=1, order=1)
    for _ in range(12):
        a, b, c = (_random_one_form(rng, ctx) for _ in range(3))
        assert wedge(wedge(a, b), c) == wedge(a, wedge(b, c))
        assert wedge(form_add(a, b), c) == form_add(wedge(a, c), wedge(b, c))


def test_contraction_basis_is_signed():
    for n in (1, 2, 3):
        ctx = JetContext(n=n, m=1, order=1)
        vol = omega_0(ctx)
        for j in range(1, n + 1):
            dxj = DiffForm(ctx, 0, 1, {(DX(j),): num(1)})
            for i in range(1, n + 1):
                product = wedge(dxj, omega_i(i, ctx))
                assert product == (vol if i == j else zero_form(ctx, n))


def test_omega_i_n1_is_the_unit(ode1):
    assert omega_i(1, ode1).terms == {(): num(1)}


def test_differential_of_functions(ode1):
    x, u = sym(X), sym(U)
    d = differential(pow_(x, 2), ode1)
    assert d.terms == {(DX(1),): mul(num(2), x)}
    d2 = differential(mul(x, u), ode1)
    assert d2.terms == {(DX(1),): u, (DY(1),): x}
    assert differential(num(3), ode1).is_zero()


def test_exterior_derivative_squares_to_zero():
    rng = random.Random(73)
    ctx = JetContext(n=2, m=1, order=1)
    for _ in range(10):
        f = random_polynomial(rng, ctx, order=1)
        assert exterior_derivative(differential(f, ctx, 1)).is_zero()
    for _ in range(10):
        alpha = _random_one_form(rng, ctx)
        assert exterior_derivative(exterior_derivative(alpha)).is_zero()


def test_exterior_derivative_leibniz_on_functions():
    rng = random.Random(79)
    ctx = JetContext(n=2, m=2, order=1)
    for _ in range(10):
        f = random_polynomial(rng, ctx, order=1)
        g = random_polynomial(rng, ctx, order=1)
        lhs = differential(mul(f, g), ctx, 1)
        rhs = form_add(scale(differential(f, ctx, 1), g), scale(differential(g, ctx, 1), f))
        assert lhs == rhs


def test_contact_form_expansion(plane1):
    w = contact_form(1, (), plane1)
    assert w.order == 1
    assert w.terms == {
        (DY(1),): num(1),
        (DX(1),): neg(sym(JetCoord(1, (1,)))),
        (DX(2),): neg(sym(JetCoord(1, (2,)))),
    }


def test_expand_contact_matches_contact_form(plane1):
    transient = DiffForm(plane1, 1, 1, {(W(1, ()),): num(1)})
    assert expand_contact(transient) == contact_form(1, (), plane1)


def test_contact_decompose_reassembles():
    rng = random.Random(83)
    ctx = JetContext(n=2, m=1, order=1)
    for _ in range(8):
        alpha = _random_one_form(rng, ctx)
        beta = wedge(alpha, _random_one_form(rng, ctx))
        for form in (alpha, beta):
            pieces = contact_decompose(form)
            total = zero_form(ctx, form.degree, form.order + 1)
            for _, comp in pieces:
                assert comp.order == form.order + 1
                total = form_add(total, comp)
            assert total == form.at_order(form.order + 1)


def test_contact_decompose_grades(ode1):
    # a contact form is purely 1-contact; its horizontal part vanishes
    w = contact_form(1, (), ode1)
    pieces = dict(contact_decompose(w))
    assert 0 not in pieces or pieces[0].is_zero()
    assert horizontalize(w).is_zero()
    du = DiffForm(ode1, 0, 1, {(DY(1),): num(1)})
    assert horizontalize(du).terms == {(DX(1),): sym(U1)}
    assert horizontalize(du).order == 1


def test_horizontalize_is_identity_on_horizontal_forms(plane1):
    f = mul(sym(JetCoord(1, (1,))), sym(BaseCoord(2)))
    alpha = scale(omega_0(plane1), f).at_order(1)
    assert horizontalize(alpha) == alpha.at_order(2)


def test_cartan_form_first_order_is_classical(ode1):
    u1 = sym(U1)
    lam = Lagrangian(mul(num(Fraction(1, 2)), pow_(u1, 2)), ode1, 1)
    theta = cartan_form(lam)
    assert theta.order == 1
    assert theta.terms == {
        (DY(1),): u1,
        (DX(1),): mul(num(Fraction(-1, 2)), pow_(u1, 2)),
    }


def test_cartan_form_second_order_frozen(ode2):
    u1, u11, u111 = sym(U1), sym(U11), sym(U111)
    lam = Lagrangian(mul(num(Fraction(1, 2)), pow_(u11, 2)), ode2, 2)
    theta = cartan_form(lam)
    assert theta.order == 3
    assert theta.terms == {
        (DY(1),): neg(u111),
        (DY(1, (1,)),): u11,
        (DX(1),): add(
            mul(u1, u111), mul(num(Fraction(-1, 2)), pow_(u11, 2))
        ),
    }


def test_cartan_form_contact_rendering(ode2):
    u11 = sym(U11)
    lam = Lagrangian(mul(num(Fraction(1, 2)), pow_(u11, 2)), ode2, 2)
    mixed = cartan_form_contact(lam)
    assert (W(1, ()),) in mixed.terms
    assert (W(1, (1,)),) in mixed.terms
    assert expand_contact(mixed) == cartan_form(lam)


def test_cartan_form_splits_lagrangian_and_source():
    rng = random.Random(89)
    cases = []
    for n, m, r in ((1, 1, 1), (1, 1, 2), (2, 1, 1), (1, 2, 1), (2, 2, 2)):
        ctx = JetContext(n=n, m=m, order=r)
        cases.append(Lagrangian(random_polynomial(rng, ctx, order=r), ctx, r))
    for lam in cases:
        theta = cartan_form(lam)
        # horizontal part recovers the Lagrangian
        assert horizontalize(theta) == lam.as_form().at_order(2 * lam.r)
        # 1-contact part of d theta recovers the source form
        pieces = dict(contact_decompose(exterior_derivative(theta)))
        assert pieces[1] == euler_lagrange(lam).as_form()


def test_cartan_form_order_zero_warns():
    ctx = JetContext(n=1, m=1, order=0)
    lam = Lagrangian(sym(U), ctx, 0)
    with pytest.warns(OrderZeroWarning):
        theta = cartan_form(lam)
    assert theta == lam.as_form()


def test_fibered_iso_guards():
    x = sym(X)
    with pytest.raises(ValueError):
        FiberedIso((pow_(x, 2),), (sym(U),)).jacobian()
    with pytest.raises(UnknownCoordinate):
        FiberedIso((sym(U),), (sym(U),)).jacobian()
    with pytest.raises(UnknownCoordinate):
        FiberedIso((x,), (sym(U1),)).jacobian()
    degenerate = FiberedIso(
        (add(sym(BaseCoord(1)), sym(BaseCoord(2))), add(sym(BaseCoord(1)), sym(BaseCoord(2)))),
        (sym(U),),
    )
    with pytest.raises(SingularBaseMap):
        prolong_isomorphism(degenerate, 1)
    assert FiberedIso((mul(num(2), x),), (sym(U),)).jacobian() == [[Fraction(2)]]


def test_prolong_isomorphism_chain_rule():
    # xbar = 2x, ubar = u: each derivative picks up a factor 1/2
    iso = FiberedIso((mul(num(2), sym(X)),), (sym(U),))
    pro = prolong_isomorphism(iso, 2)
    assert pro[BaseCoord(1)] == mul(num(2), sym(X))
    assert pro[U1] == mul(num(Fraction(1, 2)), sym(U1))
    assert pro[U11] == mul(num(Fraction(1, 4)), sym(U11))


def test_prolonged_pullback_preserves_contact_forms():
    # pullback of a contact form along a prolonged automorphism stays
    # contact: its horizontal part must vanish
    rng = random.Random(97)
    isos = [
        FiberedIso((mul(num(2), sym(X)),), (add(sym(U), pow_(sym(U), 2)),)),
        FiberedIso((add(sym(X), num(1)),), (mul(num(3), sym(U)),)),
    ]
    ctx = JetContext(n=1, m=1, order=2)
    for iso in isos:
        for J in ((), (1,)):
            w = contact_form(1, J, ctx)
            pulled = pullback(w, iso, r=2)
            assert horizontalize(pulled).is_zero()


def test_pullback_respects_wedge_and_differential():
    rng = random.Random(101)
    ctx = JetContext(n=2, m=1, order=1)
    iso = FiberedIso(
        (
            add(sym(BaseCoord(1)), sym(BaseCoord(2))),
            add(sym(BaseCoord(1)), neg(sym(BaseCoord(2)))),
        ),
        (add(sym(U), pow_(sym(U), 3)),),
    )
    for _ in range(6):
        alpha = _random_one_form(rng, ctx)
        beta = _random_one_form(rng, ctx)
        lhs = pullback(wedge(alpha, beta), iso, r=2)
        rhs = wedge(pullback(alpha, iso, r=2), pullback(beta, iso, r=2))
        assert lhs == rhs
    for _ in range(6):
        f = random_polynomial(rng, ctx, order=0, degree=2, terms=2)
        lhs = pullback(differential(f, ctx), iso, r=1)
        rhs = exterior_derivative(pullback(function_form(ctx, f), iso, r=0)).at_order(1)
        assert lhs == rhs


def test_pullback_along_identity(ode1):
    iso = FiberedIso((sym(X),), (sym(U),))
    alpha = form_from_terms(
        ode1, 1, 1, [((DX(1),), sym(U1)), ((DY(1),), sym(X))]
    )
    assert pullback(alpha, iso) == alpha


def test_form_arithmetic_guards(ode1, plane1):
    a = function_form(ode1, sym(U))
    b = function_form(plane1, sym(U))
    with pytest.raises(ContextMismatch):
        form_add(a, b)
    dx = DiffForm(ode1, 0, 1, {(DX(1),): num(1)})
    with pytest.raises(DegreeMismatch):
        form_add(a, dx)
    assert (dx - dx).is_zero()
    assert (-dx).terms == {(DX(1),): num(-1)}
