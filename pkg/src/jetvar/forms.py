"""Differential forms on jet spaces.

A form is a formal sum of terms, each a canonical coefficient expression
times a sorted wedge word of basis one-forms dx^i (DX) and dy^s_J (DY).
Storage always uses this raw coordinate basis; the contact forms
w^s_J = dy^s_J - sum_i y^s_{Ji} dx^i exist only transiently inside the
contact decomposition and the Cartan form assembly.  With canonical
coefficients and sorted wedge words, structural equality of two forms
of the same degree decides equality on the polynomial fragment.

Every form carries the jet order of the space it lives on.  Operations
that lift the order (horizontalization, contact decomposition) stamp the
result accordingly; sums and products live at the larger of the orders.

The contraction basis is signed: the (n-1)-form paired with direction i
carries (-1)^(i-1), which makes dx^j wedge omega_i equal delta^j_i omega_0.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field, replace
from fractions import Fraction

from .coords import (
    BaseCoord,
    JetContext,
    JetCoord,
    PARAM,
    coord_key,
    index_with,
    multi_indices_up_to,
    multiplicity,
)
from .errors import (
    ContextMismatch,
    DegreeMismatch,
    DimensionMismatch,
    OrderOverflow,
    OrderZeroWarning,
    SingularBaseMap,
    UnknownCoordinate,
)
from .expr import (
    Expr,
    Num,
    ONE,
    ZERO,
    add,
    as_expr,
    coords_in,
    is_zero,
    mul,
    neg,
    num,
    partial,
    substitute,
    sym,
)
from .jets import total_derivative


# --- basis one-form generators ----------------------------------------------


@dataclass(frozen=True, slots=True)
class W:
    """Contact form w^sigma_J (transient basis element)."""

    sigma: int
    J: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "J", tuple(sorted(self.J)))


@dataclass(frozen=True, slots=True)
class DY:
    """Coordinate differential dy^sigma_J."""

    sigma: int
    J: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "J", tuple(sorted(self.J)))


@dataclass(frozen=True, slots=True)
class DX:
    """Base differential dx^i."""

    i: int


def gen_key(g) -> tuple:
    # Contact generators sort first so transient terms read w ^ ... ^ dx.
    if isinstance(g, W):
        return (0, g.sigma, len(g.J), g.J)
    if isinstance(g, DY):
        return (1, g.sigma, len(g.J), g.J)
    return (2, g.i)


def _normalize_gens(gens):
    """Sort generators, returning (sign, sorted tuple), or (0, ()) when a
    generator repeats."""
    items = list(gens)
    sign = 1
    # insertion sort with parity tracking; wedge words are short
    for a in range(1, len(items)):
        b = a
        while b > 0 and gen_key(items[b - 1]) > gen_key(items[b]):
            items[b - 1], items[b] = items[b], items[b - 1]
            sign = -sign
            b -= 1
    for a in range(1, len(items)):
        if items[a] == items[a - 1]:
            return 0, ()
    return sign, tuple(items)


# --- forms -------------------------------------------------------------------


@dataclass(frozen=True)
class DiffForm:
    """A differential form on the jet space of the stated order.

    The context is carried for dimension data and error reporting but does
    not take part in equality; two forms are equal when degree, order, and
    canonical terms agree.
    """

    ctx: JetContext = field(compare=False)
    order: int
    degree: int
    terms: dict  # sorted generator tuple -> nonzero canonical Expr

    def is_zero(self) -> bool:
        return not self.terms

    def at_order(self, order: int) -> "DiffForm":
        """The same form regarded on a jet space of another order."""
        return replace(self, order=order)

    def __add__(self, other):
        return form_add(self, other)

    def __sub__(self, other):
        return form_add(self, scale(other, num(-1)))

    def __neg__(self):
        return scale(self, num(-1))


def zero_form(ctx: JetContext, degree: int, order: int = 0) -> DiffForm:
    return DiffForm(ctx, order, degree, {})


def form_from_terms(ctx: JetContext, order: int, degree: int, items) -> DiffForm:
    """Build a form from (generators, coefficient) pairs; generator words
    may arrive unsorted, and parallel terms are merged."""
    acc: dict[tuple, Expr] = {}
    for gens, coeff in items:
        if len(gens) != degree:
            raise DegreeMismatch(
                f"term has {len(gens)} generators in a degree-{degree} form"
            )
        sign, sorted_gens = _normalize_gens(gens)
        if sign == 0:
            continue
        coeff = as_expr(coeff)
        coeff = coeff if sign == 1 else neg(coeff)
        if sorted_gens in acc:
            coeff = add(acc[sorted_gens], coeff)
        acc[sorted_gens] = coeff
    return DiffForm(
        ctx, order, degree, {g: c for g, c in acc.items() if not is_zero(c)}
    )


def function_form(ctx: JetContext, e, order: int = 0) -> DiffForm:
    """A 0-form wrapping a bare expression."""
    e = as_expr(e)
    if is_zero(e):
        return zero_form(ctx, 0, order)
    return DiffForm(ctx, order, 0, {(): e})


def _require_compatible(a: DiffForm, b: DiffForm) -> None:
    if not a.ctx.compatible(b.ctx):
        raise ContextMismatch("forms live over different charts")


def form_add(a: DiffForm, b: DiffForm) -> DiffForm:
    _require_compatible(a, b)
    if a.degree != b.degree:
        raise DegreeMismatch(f"cannot add degree {a.degree} to degree {b.degree}")
    terms = dict(a.terms)
    for gens, coeff in b.terms.items():
        merged = add(terms.get(gens, ZERO), coeff)
        if is_zero(merged):
            terms.pop(gens, None)
        else:
            terms[gens] = merged
    return DiffForm(a.ctx, max(a.order, b.order), a.degree, terms)


def scale(a: DiffForm, factor) -> DiffForm:
    factor = as_expr(factor)
    if is_zero(factor):
        return zero_form(a.ctx, a.degree, a.order)
    out = {}
    for gens, coeff in a.terms.items():
        c = mul(factor, coeff)
        if not is_zero(c):
            out[gens] = c
    return DiffForm(a.ctx, a.order, a.degree, out)


def wedge(a: DiffForm, b: DiffForm) -> DiffForm:
    _require_compatible(a, b)
    pairs = []
    for ga, ca in a.terms.items():
        for gb, cb in b.terms.items():
            pairs.append((ga + gb, mul(ca, cb)))
    return form_from_terms(
        a.ctx, max(a.order, b.order), a.degree + b.degree, pairs
    )


def omega_0(ctx: JetContext) -> DiffForm:
    """Base volume form dx^1 ^ ... ^ dx^n."""
    gens = tuple(DX(i) for i in range(1, ctx.n + 1))
    return DiffForm(ctx, 0, ctx.n, {gens: ONE})


def omega_i(i: int, ctx: JetContext) -> DiffForm:
    """The contraction of the base volume form with the i-th coordinate
    direction; signed so that dx^j ^ omega_i == delta^j_i omega_0."""
    if not 1 <= i <= ctx.n:
        raise UnknownCoordinate(f"no base direction {i} in a {ctx.n}-dimensional base")
    gens = tuple(DX(j) for j in range(1, ctx.n + 1) if j != i)
    coeff = ONE if i % 2 == 1 else Num(Fraction(-1))
    return DiffForm(ctx, 0, ctx.n - 1, {gens: coeff})


def contact_form(sigma: int, J: tuple, ctx: JetContext) -> DiffForm:
    """w^sigma_J in the raw basis: dy^sigma_J - sum_i y^sigma_{Ji} dx^i."""
    J = tuple(sorted(J))
    ctx.check_coord(JetCoord(sigma, J))
    return _expand_w(W(sigma, J), ctx, len(J) + 1)


def max_form_order(form: DiffForm) -> int:
    """Highest jet order actually occurring in coefficients or generators."""
    order = 0
    for gens, coeff in form.terms.items():
        for c in coords_in(coeff):
            if isinstance(c, JetCoord):
                order = max(order, len(c.J))
        for g in gens:
            if isinstance(g, (DY, W)):
                order = max(order, len(g.J))
    return order


# --- exterior derivative, horizontalization, contact split -------------------


def differential(e, ctx: JetContext, order: int = 0) -> DiffForm:
    """Exterior derivative of a function, in the coordinate basis."""
    e = as_expr(e)
    pairs = []
    for c in sorted(coords_in(e), key=coord_key):
        if c is PARAM:
            raise ValueError("the integration parameter has no differential")
        g = DX(c.i) if isinstance(c, BaseCoord) else DY(c.sigma, c.J)
        de = partial(e, c)
        if not is_zero(de):
            pairs.append(((g,), de))
    return form_from_terms(ctx, order, 1, pairs)


def exterior_derivative(form: DiffForm) -> DiffForm:
    """d in the coordinate basis; satisfies d(d(form)).is_zero()."""
    ctx = form.ctx
    if form.degree == 0:
        return differential(form.terms.get((), ZERO), ctx, form.order)
    pairs = []
    for gens, coeff in form.terms.items():
        df = differential(coeff, ctx)
        for (g,), dc in df.terms.items():
            pairs.append(((g,) + gens, dc))
    return form_from_terms(ctx, form.order, form.degree + 1, pairs)


def _expand_w(g: W, ctx: JetContext, order: int) -> DiffForm:
    if len(g.J) + 1 > ctx.ceiling:
        raise OrderOverflow(
            f"contact expansion would raise jet order past ceiling {ctx.ceiling}"
        )
    pairs = [((DY(g.sigma, g.J),), ONE)]
    for i in range(1, ctx.n + 1):
        pairs.append(((DX(i),), neg(sym(JetCoord(g.sigma, index_with(g.J, i))))))
    return form_from_terms(ctx, order, 1, pairs)


def expand_contact(form: DiffForm) -> DiffForm:
    """Rewrite transient contact generators back into the raw dx/dy basis."""
    return _expand_transient(form)


def _expand_transient(form: DiffForm) -> DiffForm:
    """Rewrite any transient contact generators back to the raw basis."""
    if not any(isinstance(g, W) for gens in form.terms for g in gens):
        return form
    ctx = form.ctx
    result = zero_form(ctx, form.degree, form.order)
    for gens, coeff in form.terms.items():
        acc = function_form(ctx, coeff, form.order)
        for g in gens:
            if isinstance(g, W):
                acc = wedge(acc, _expand_w(g, ctx, form.order))
            else:
                acc = wedge(acc, DiffForm(ctx, form.order, 1, {(g,): ONE}))
        result = form_add(result, acc)
    return result.at_order(form.order)


def _contact_split_gen(g, ctx: JetContext, order: int):
    """A basis one-form as (contact part, horizontal part) on the
    once-prolonged space."""
    if isinstance(g, DX):
        return zero_form(ctx, 1, order), DiffForm(ctx, order, 1, {(g,): ONE})
    if isinstance(g, W):
        return DiffForm(ctx, order, 1, {(g,): ONE}), zero_form(ctx, 1, order)
    if len(g.J) + 1 > ctx.ceiling:
        raise OrderOverflow(
            f"contact split would raise jet order past ceiling {ctx.ceiling}"
        )
    horiz = form_from_terms(
        ctx,
        order,
        1,
        [
            ((DX(i),), sym(JetCoord(g.sigma, index_with(g.J, i))))
            for i in range(1, ctx.n + 1)
        ],
    )
    return DiffForm(ctx, order, 1, {(W(g.sigma, g.J),): ONE}), horiz


def contact_decompose(form: DiffForm) -> list:
    """Split a form into its l-contact components, l = 0..degree.

    Each coordinate differential dy^s_J is rewritten as
    w^s_J + sum_i y^s_{Ji} dx^i on the once-prolonged space, the wedge
    words are expanded, terms are grouped by their number of contact
    factors, and every component is expanded back to the raw basis.
    Returns the list of pairs (l, component); the components sum to the
    original form regarded one order higher.
    """
    ctx = form.ctx
    lifted = form.order + 1
    buckets = {l: zero_form(ctx, form.degree, lifted) for l in range(form.degree + 1)}
    if form.degree == 0:
        buckets[0] = form.at_order(lifted)
        return sorted(buckets.items())
    for gens, coeff in form.terms.items():
        # expand (c_1 + h_1) ^ ... ^ (c_k + h_k), tracking the contact count
        parts = [(function_form(ctx, coeff, lifted), 0)]
        for g in gens:
            c_part, h_part = _contact_split_gen(g, ctx, lifted)
            grown = []
            for acc, l in parts:
                if not c_part.is_zero():
                    grown.append((wedge(acc, c_part), l + 1))
                if not h_part.is_zero():
                    grown.append((wedge(acc, h_part), l))
            parts = [(f, l) for f, l in grown if not f.is_zero()]
        for f, l in parts:
            buckets[l] = form_add(buckets[l], f)
    return sorted((l, _expand_transient(f)) for l, f in buckets.items())


def horizontalize(form: DiffForm) -> DiffForm:
    """The 0-contact component: contact factors drop and each dy^s_J turns
    into sum_i y^s_{Ji} dx^i; the result lives one order higher and
    contains only base differentials."""
    return contact_decompose(form)[0][1]


# --- the generalized Poincare-Cartan equivalent ------------------------------


def cartan_form_contact(lam) -> DiffForm:
    """Like cartan_form, but keeps the contact generators w^s_J unexpanded
    so the result displays in the L omega_0 + sum f w^s_J ^ omega_i shape."""
    ctx = lam.ctx
    r = lam.r
    if r == 0:
        warnings.warn(
            "order-0 Lagrangian: the Cartan form is the Lagrangian itself",
            OrderZeroWarning,
        )
        return wedge(function_form(ctx, lam.L), omega_0(ctx)).at_order(0)
    target = 2 * r - 1
    f: dict[tuple, Expr] = {}
    for k in range(r, 0, -1):
        for sigma in range(1, ctx.m + 1):
            for K in _sorted_indices(ctx.n, k):
                value = mul(
                    Num(Fraction(1, multiplicity(K))),
                    partial(lam.L, JetCoord(sigma, K)),
                )
                if k < r:
                    for i in range(1, ctx.n + 1):
                        upper = f[(sigma, index_with(K, i))]
                        if not is_zero(upper):
                            value = add(value, neg(total_derivative(upper, i, ctx)))
                f[(sigma, K)] = value
    theta = wedge(function_form(ctx, lam.L), omega_0(ctx))
    for sigma in range(1, ctx.m + 1):
        for J in multi_indices_up_to(ctx.n, r - 1):
            weight = multiplicity(J)
            for i in range(1, ctx.n + 1):
                coeff = f[(sigma, index_with(J, i))]
                if is_zero(coeff):
                    continue
                piece = scale(
                    wedge(
                        DiffForm(ctx, target, 1, {(W(sigma, J),): ONE}),
                        omega_i(i, ctx),
                    ),
                    mul(Num(Fraction(weight)), coeff),
                )
                theta = form_add(theta, piece)
    return theta.at_order(target)


def cartan_form(lam) -> DiffForm:
    """The canonical Lepagean equivalent of a Lagrangian of order r, as a
    form on the jet space of order 2r - 1.

    The contact coefficients are defined by the descending recursion

        f[s][K] = partial(L, y^s_K) / mult(K) - sum_i d_i f[s][K + i]

    (tuple-derivative normalization; f with r+1 indices vanishes) and the
    form is assembled over sorted multi-indices, each contributing with its
    multiplicity:

        Theta = L omega_0
              + sum_s sum_{|J| <= r-1} mult(J) f[s][J + i] w^s_J ^ omega_i
    """
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", OrderZeroWarning)
        contact = cartan_form_contact(lam)
    if lam.r == 0:
        warnings.warn(
            "order-0 Lagrangian: the Cartan form is the Lagrangian itself",
            OrderZeroWarning,
        )
    return _expand_transient(contact)


def _sorted_indices(n: int, length: int):
    from .coords import multi_indices

    return multi_indices(n, length)


# --- fibered isomorphisms and pullback ---------------------------------------


@dataclass(frozen=True)
class FiberedIso:
    """A fibration automorphism: an affine invertible base map together
    with fiber components in the base and order-0 fiber coordinates."""

    base_map: tuple
    fiber_map: tuple

    def __post_init__(self):
        object.__setattr__(self, "base_map", tuple(as_expr(e) for e in self.base_map))
        object.__setattr__(
            self, "fiber_map", tuple(as_expr(e) for e in self.fiber_map)
        )

    @property
    def n(self) -> int:
        return len(self.base_map)

    @property
    def m(self) -> int:
        return len(self.fiber_map)

    def jacobian(self):
        """Constant base Jacobian as rows of exact rationals."""
        n = self.n
        rows = []
        for comp in self.base_map:
            for c in coords_in(comp):
                if not isinstance(c, BaseCoord) or not 1 <= c.i <= n:
                    raise UnknownCoordinate(
                        f"base map may only use base coordinates, found {c}"
                    )
            row = []
            for k in range(1, n + 1):
                entry = partial(comp, BaseCoord(k))
                if not isinstance(entry, Num):
                    raise ValueError("base map must be affine in the base coordinates")
                row.append(entry.value)
            rows.append(row)
        for comp in self.fiber_map:
            for c in coords_in(comp):
                ok = (isinstance(c, BaseCoord) and 1 <= c.i <= n) or (
                    isinstance(c, JetCoord) and c.J == () and 1 <= c.sigma <= self.m
                )
                if not ok:
                    raise UnknownCoordinate(
                        f"fiber map may only use base and order-0 coordinates, found {c}"
                    )
        return rows

    def default_context(self, order: int) -> JetContext:
        return JetContext(n=self.n, m=self.m, order=order, ceiling=max(order, 12))


def _invert_matrix(rows):
    """Exact inverse by Gauss-Jordan elimination; raises SingularBaseMap."""
    n = len(rows)
    aug = [list(rows[i]) + [Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if aug[r][col] != 0), None)
        if pivot is None:
            raise SingularBaseMap("base map Jacobian is singular")
        aug[col], aug[pivot] = aug[pivot], aug[col]
        p = aug[col][col]
        aug[col] = [v / p for v in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                factor = aug[r][col]
                aug[r] = [v - factor * w for v, w in zip(aug[r], aug[col])]
    return [row[n:] for row in aug]


def prolong_isomorphism(iso: FiberedIso, order: int, ctx: JetContext = None) -> dict:
    """Components of the prolonged automorphism: each transformed
    coordinate as an expression in the source coordinates.

    New jet coordinates come from the chain rule against the constant base
    Jacobian A:

        ybar^s_{Jl} = sum_k inv(A)[k][l] d_k(ybar^s_J)
    """
    if ctx is None:
        ctx = iso.default_context(order)
    if iso.n != ctx.n or iso.m != ctx.m:
        raise DimensionMismatch(
            f"isomorphism is {iso.n}x{iso.m}, context is {ctx.n}x{ctx.m}"
        )
    a_inv = _invert_matrix(iso.jacobian())
    out: dict = {}
    for i in range(1, ctx.n + 1):
        out[BaseCoord(i)] = iso.base_map[i - 1]
    for sigma in range(1, ctx.m + 1):
        out[JetCoord(sigma)] = iso.fiber_map[sigma - 1]
    for k in range(1, order + 1):
        for sigma in range(1, ctx.m + 1):
            for J in _sorted_indices(ctx.n, k):
                parent = out[JetCoord(sigma, J[:-1])]
                l = J[-1]
                pieces = []
                for kk in range(1, ctx.n + 1):
                    if a_inv[kk - 1][l - 1] == 0:
                        continue
                    dk = total_derivative(parent, kk, ctx)
                    pieces.append(mul(Num(a_inv[kk - 1][l - 1]), dk))
                out[JetCoord(sigma, J)] = add(*pieces) if pieces else ZERO
    return out


def pullback(form: DiffForm, iso: FiberedIso, r: int = None) -> DiffForm:
    """Pullback along the prolonged automorphism: coefficients have the
    prolonged bindings substituted, and each basis one-form becomes the
    differential of the matching binding.  The prolongation order r
    defaults to the form's declared order."""
    ctx = form.ctx
    if iso.n != ctx.n or iso.m != ctx.m:
        raise ContextMismatch(
            f"isomorphism is {iso.n}x{iso.m}, form context is {ctx.n}x{ctx.m}"
        )
    if r is None:
        r = form.order
    if max_form_order(form) > r:
        raise OrderOverflow(
            f"form uses jet order {max_form_order(form)}, above the requested {r}"
        )
    pro = prolong_isomorphism(iso, r, ctx.with_order(max(ctx.order, r)))
    result = zero_form(ctx, form.degree, r)
    for gens, coeff in form.terms.items():
        acc = function_form(ctx, substitute(coeff, pro), r)
        for g in gens:
            comp = pro[BaseCoord(g.i) if isinstance(g, DX) else JetCoord(g.sigma, g.J)]
            acc = wedge(acc, differential(comp, ctx, r))
            if acc.is_zero():
                break
        result = form_add(result, acc)
    return result.at_order(r)
