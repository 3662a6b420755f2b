"""Euler-Lagrange operator, variationality tests, and Lagrangian
reconstruction.

The central objects are Lagrangians L omega_0 of declared order r and
source forms eps_sigma dy^sigma ^ omega_0 of declared order s.  The
Euler-Lagrange mapping sends the former to the latter; the generalized
and classical Helmholtz residuals decide (local) variationality of the
latter; the fiber-scaling reconstruction inverts the mapping on its
image; null Lagrangians form its kernel.

Sums over the ordered index tuples of the defining formulas are realized
over sorted multi-indices: tuple derivatives carry the normalization
1/mult(J), and each sorted completion enters with its multiplicity (the
number of ordered tuples representing it).
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb

from .coords import (
    JetContext,
    JetCoord,
    PARAM,
    index_with,
    multi_indices,
    multi_indices_up_to,
    multiplicity,
)
from .errors import DegreeMismatch, DimensionMismatch, NotODEContext
from .expr import (
    Expr,
    Num,
    ZERO,
    add,
    as_expr,
    contains_param,
    coords_in,
    evaluate,
    integrate_param,
    is_zero,
    max_jet_order,
    mul,
    neg,
    partial,
    substitute,
    sym,
)
from .forms import (
    DX,
    DY,
    DiffForm,
    cartan_form,
    exterior_derivative,
    FiberedIso,
    form_from_terms,
    horizontalize,
    pullback,
)
from .jets import iterated_total_derivative, total_derivative

PROBE_POINTS = 20
PROBE_THRESHOLD = 1e-8


def _check_expr(e: Expr, ctx: JetContext, what: str) -> None:
    if contains_param(e):
        raise ValueError(f"{what} must not contain the integration parameter")
    for c in coords_in(e):
        ctx.check_coord(c)


@dataclass(frozen=True)
class Lagrangian:
    """A horizontal n-form L omega_0 of declared order r (at least the
    maximal jet order occurring in L)."""

    L: Expr
    ctx: JetContext
    r: int = None

    def __post_init__(self):
        object.__setattr__(self, "L", as_expr(self.L))
        _check_expr(self.L, self.ctx, "a Lagrangian")
        actual = max_jet_order(self.L)
        r = actual if self.r is None else self.r
        if r < actual:
            raise ValueError(f"declared order {r} below occurring order {actual}")
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "ctx", self.ctx.with_order(r))

    def as_form(self) -> DiffForm:
        from .forms import function_form, omega_0, wedge

        return wedge(function_form(self.ctx, self.L), omega_0(self.ctx)).at_order(
            self.r
        )


@dataclass(frozen=True)
class SourceForm:
    """A source form eps_sigma dy^sigma ^ omega_0 of declared order s."""

    eps: tuple
    ctx: JetContext
    s: int = None

    def __post_init__(self):
        object.__setattr__(self, "eps", tuple(as_expr(e) for e in self.eps))
        if len(self.eps) != self.ctx.m:
            raise DimensionMismatch(
                f"{len(self.eps)} components for {self.ctx.m} fiber variables"
            )
        actual = 0
        for e in self.eps:
            _check_expr(e, self.ctx, "a source form component")
            actual = max(actual, max_jet_order(e))
        s = actual if self.s is None else self.s
        if s < actual:
            raise ValueError(f"declared order {s} below occurring order {actual}")
        object.__setattr__(self, "s", s)
        object.__setattr__(self, "ctx", self.ctx.with_order(s))

    def as_form(self) -> DiffForm:
        from .forms import omega_0, wedge

        ctx = self.ctx
        vol = omega_0(ctx)
        pairs = []
        for sigma, e in enumerate(self.eps, start=1):
            for gens, coeff in wedge(
                DiffForm(ctx, self.s, 1, {(DY(sigma),): e}), vol
            ).terms.items():
                pairs.append((gens, coeff))
        return form_from_terms(ctx, self.s, ctx.n + 1, pairs)


@dataclass(frozen=True)
class MultiplierMatrix:
    """A square matrix of multiplier functions, one row per target
    component."""

    entries: tuple

    def __post_init__(self):
        rows = tuple(tuple(as_expr(e) for e in row) for row in self.entries)
        object.__setattr__(self, "entries", rows)
        for row in rows:
            if len(row) != len(rows):
                raise DimensionMismatch("multiplier matrix must be square")
            for e in row:
                if contains_param(e):
                    raise ValueError(
                        "multiplier entries must not contain the integration parameter"
                    )


@dataclass(frozen=True)
class HelmholtzRecord:
    level: int
    I: tuple
    sigma: int
    nu: int
    residual: Expr


@dataclass(frozen=True)
class HelmholtzReport:
    records: tuple
    verdict: str  # variational | not_variational | undecided
    ctx: JetContext = field(compare=False)
    multiplier: MultiplierMatrix = None

    @property
    def is_variational(self) -> bool:
        return self.verdict == "variational"

    def nonzero_records(self):
        return [rec for rec in self.records if not is_zero(rec.residual)]


# --- Euler-Lagrange operator --------------------------------------------------


def euler_lagrange(lam: Lagrangian) -> SourceForm:
    """The source form of a Lagrangian of declared order r:

        eps_sigma = sum_{k=0}^r (-1)^k sum_{|J|=k} d_J partial(L, y^sigma_J)

    summed over sorted multi-indices J; the multiplicity of J cancels
    against the tuple-derivative normalization.  The result is declared on
    the jet space of order 2r."""
    ctx = lam.ctx
    eps = []
    for sigma in range(1, ctx.m + 1):
        acc = ZERO
        for k in range(lam.r + 1):
            for J in multi_indices(ctx.n, k):
                p = partial(lam.L, JetCoord(sigma, J))
                if is_zero(p):
                    continue
                term = iterated_total_derivative(p, J, ctx)
                acc = add(acc, term if k % 2 == 0 else neg(term))
        eps.append(acc)
    return SourceForm(tuple(eps), ctx.with_order(2 * lam.r), 2 * lam.r)


def is_null_lagrangian(lam: Lagrangian) -> bool:
    """True iff the source form of lam vanishes identically; complete on
    polynomial Lagrangians."""
    return all(is_zero(e) for e in euler_lagrange(lam).eps)


def null_lagrangian_from_eta(eta: DiffForm) -> Lagrangian:
    """The Lagrangian with density h(d eta) for an (n-1)-form eta; its
    source form vanishes identically, so it lies in the kernel of the
    Euler-Lagrange mapping."""
    ctx = eta.ctx
    if eta.degree != ctx.n - 1:
        raise DegreeMismatch(
            f"need a degree {ctx.n - 1} form, got degree {eta.degree}"
        )
    lifted = horizontalize(exterior_derivative(eta))
    vol = tuple(DX(i) for i in range(1, ctx.n + 1))
    density = lifted.terms.get(vol, ZERO)
    order = eta.order + 1
    return Lagrangian(density, ctx.with_order(order), order)


# --- Helmholtz conditions ------------------------------------------------------


def _opaque(e: Expr) -> bool:
    from .expr import Add, Func, Mul, Pow

    if isinstance(e, Func):
        return True
    if isinstance(e, Add):
        return any(_opaque(t) for t in e.terms)
    if isinstance(e, Mul):
        return any(_opaque(f) for f in e.factors)
    if isinstance(e, Pow):
        return _opaque(e.base)
    return False


def _probe_nonzero(e: Expr, seed: int) -> bool:
    """Evaluate at random rational points away from coordinate zeros; true
    when some value is clearly nonzero."""
    rng = random.Random(seed)
    coords = sorted(coords_in(e), key=_coord_key)
    for _ in range(PROBE_POINTS):
        env = {}
        for c in coords:
            magnitude = Fraction(rng.randint(50, 250), 100)
            env[c] = magnitude if rng.random() < 0.5 else -magnitude
        if abs(evaluate(e, env)) > PROBE_THRESHOLD:
            return True
    return False


def _coord_key(c):
    from .coords import coord_key

    return coord_key(c)


def _verdict(records, seed: int) -> str:
    undecided = False
    for rec in records:
        if is_zero(rec.residual):
            continue
        if not _opaque(rec.residual):
            return "not_variational"
        if _probe_nonzero(rec.residual, seed):
            return "not_variational"
        undecided = True
    return "undecided" if undecided else "variational"


def helmholtz_residuals(sf: SourceForm, probe_seed: int = 0) -> HelmholtzReport:
    """Variationality residuals of a source form of declared order s.

    For each level l, sorted free multi-index I of length l, and component
    pair (sigma, nu):

        R = [partial(eps_sigma, y^nu_I) - (-1)^l partial(eps_nu, y^sigma_I)] / mult(I)
          - sum_{k=l+1}^s (-1)^k C(k, l) sum_{|M|=k-l} mult(M)
                d_M [partial(eps_nu, y^sigma_{I+M}) / mult(I+M)]

    where the inner sum runs over sorted completions M, weighted by the
    number of ordered tuples each represents.  The verdict is variational
    iff every residual normalizes to zero; a nonzero residual containing
    opaque atoms downgrades the verdict to undecided unless probing bounds
    it away from zero."""
    ctx = sf.ctx
    s = sf.s
    records = []
    for l in range(s + 1):
        for I in multi_indices(ctx.n, l):
            mu_I = Fraction(1, multiplicity(I))
            for sigma in range(1, ctx.m + 1):
                for nu in range(1, ctx.m + 1):
                    first = partial(sf.eps[sigma - 1], JetCoord(nu, I))
                    second = partial(sf.eps[nu - 1], JetCoord(sigma, I))
                    head = add(first, neg(second) if l % 2 == 0 else second)
                    residual = mul(Num(mu_I), head)
                    for k in range(l + 1, s + 1):
                        sign = 1 if k % 2 == 0 else -1
                        weight = sign * comb(k, l)
                        for M in multi_indices(ctx.n, k - l):
                            full = index_with_many(I, M)
                            p = partial(sf.eps[nu - 1], JetCoord(sigma, full))
                            if is_zero(p):
                                continue
                            tail = iterated_total_derivative(
                                mul(Num(Fraction(1, multiplicity(full))), p), M, ctx
                            )
                            factor = Fraction(-weight * multiplicity(M))
                            residual = add(residual, mul(Num(factor), tail))
                    records.append(HelmholtzRecord(l, I, sigma, nu, residual))
    return HelmholtzReport(tuple(records), _verdict(records, probe_seed), ctx)


def index_with_many(I: tuple, M: tuple) -> tuple:
    return tuple(sorted(I + M))


def classical_helmholtz_ode(sf: SourceForm, probe_seed: int = 0) -> HelmholtzReport:
    """The three classical residual families for second-order ODE source
    forms, as an implementation path independent of helmholtz_residuals:

        level 2:  partial(eps_s, y^n_xx) - partial(eps_n, y^s_xx)
        level 1:  partial(eps_s, y^n_x) + partial(eps_n, y^s_x)
                    - d/dx [partial(eps_s, y^n_xx) + partial(eps_n, y^s_xx)]
        level 0:  partial(eps_s, y^n) - partial(eps_n, y^s)
                    - (1/2) d/dx [partial(eps_s, y^n_x) - partial(eps_n, y^s_x)]
    """
    ctx = sf.ctx
    if ctx.n != 1:
        raise NotODEContext(f"classical conditions need one base variable, got {ctx.n}")
    if sf.s > 2:
        raise NotODEContext(f"classical conditions cover order <= 2, got {sf.s}")
    half = Num(Fraction(1, 2))
    records = []
    y = lambda nu, J=(): JetCoord(nu, J)
    for sigma in range(1, ctx.m + 1):
        for nu in range(1, ctx.m + 1):
            es, en = sf.eps[sigma - 1], sf.eps[nu - 1]
            c3 = add(partial(es, y(nu, (1, 1))), neg(partial(en, y(sigma, (1, 1)))))
            c2 = add(
                partial(es, y(nu, (1,))),
                partial(en, y(sigma, (1,))),
                neg(
                    total_derivative(
                        add(
                            partial(es, y(nu, (1, 1))),
                            partial(en, y(sigma, (1, 1))),
                        ),
                        1,
                        ctx,
                    )
                ),
            )
            c1 = add(
                partial(es, y(nu)),
                neg(partial(en, y(sigma))),
                neg(
                    mul(
                        half,
                        total_derivative(
                            add(
                                partial(es, y(nu, (1,))),
                                neg(partial(en, y(sigma, (1,)))),
                            ),
                            1,
                            ctx,
                        ),
                    )
                ),
            )
            records.append(HelmholtzRecord(0, (), sigma, nu, c1))
            records.append(HelmholtzRecord(1, (1,), sigma, nu, c2))
            records.append(HelmholtzRecord(2, (1, 1), sigma, nu, c3))
    records.sort(key=lambda rec: (rec.level, rec.I, rec.sigma, rec.nu))
    return HelmholtzReport(tuple(records), _verdict(records, probe_seed), ctx)


def multiplier_check(
    sf: SourceForm, mult: MultiplierMatrix, probe_seed: int = 0
) -> HelmholtzReport:
    """Helmholtz residuals of the rescaled source form
    eps'_sigma = sum_rho A[sigma][rho] eps_rho; the report records the
    multiplier used.  The rescaled form is declared at its actual order."""
    ctx = sf.ctx
    if len(mult.entries) != ctx.m:
        raise DimensionMismatch(
            f"multiplier is {len(mult.entries)}x{len(mult.entries)}, need {ctx.m}x{ctx.m}"
        )
    rescaled = []
    for sigma in range(1, ctx.m + 1):
        acc = ZERO
        for rho in range(1, ctx.m + 1):
            acc = add(acc, mul(mult.entries[sigma - 1][rho - 1], sf.eps[rho - 1]))
        rescaled.append(acc)
    order = max((max_jet_order(e) for e in rescaled), default=0)
    report = helmholtz_residuals(
        SourceForm(tuple(rescaled), ctx.with_order(order), order), probe_seed
    )
    return HelmholtzReport(report.records, report.verdict, report.ctx, mult)


# --- Tonti reconstruction ------------------------------------------------------


def tonti_lagrangian(sf: SourceForm) -> Lagrangian:
    """The fiber-scaling Lagrangian

        L = sum_sigma y^sigma int_0^1 eps_sigma(x, t y, ..., t y_J) dt

    computed by exact parameter integration; requires each component to be
    polynomial in all fiber jet coordinates.  For a variational source
    form, euler_lagrange of the result returns the input symbolically."""
    t = sym(PARAM)
    total = ZERO
    for sigma, e in enumerate(sf.eps, start=1):
        scaling = {
            c: mul(t, sym(c)) for c in coords_in(e) if isinstance(c, JetCoord)
        }
        scaled = substitute(e, scaling)
        integrated = integrate_param(mul(sym(JetCoord(sigma)), scaled), 0, 1)
        total = add(total, integrated)
    return Lagrangian(total, sf.ctx.with_order(sf.s), sf.s)


# --- naturality under fibered isomorphisms -------------------------------------


def pullback_lagrangian(lam: Lagrangian, iso: FiberedIso) -> Lagrangian:
    """The Lagrangian of the pulled-back horizontal form: the base-map
    Jacobian determinant enters through the pullback of omega_0."""
    pulled = pullback(lam.as_form(), iso)
    vol = tuple(DX(i) for i in range(1, lam.ctx.n + 1))
    density = pulled.terms.get(vol, ZERO)
    return Lagrangian(density, lam.ctx, lam.r)


def naturality_report(lam: Lagrangian, iso: FiberedIso) -> dict:
    """Whether the Cartan form and the Euler-Lagrange form commute with
    pullback along the prolonged isomorphism, as two booleans."""
    pulled_lam = pullback_lagrangian(lam, iso)
    theta_natural = pullback(cartan_form(lam), iso) == cartan_form(pulled_lam)
    el_natural = (
        pullback(euler_lagrange(lam).as_form(), iso)
        == euler_lagrange(pulled_lam).as_form()
    )
    return {"theorem3": theta_natural, "theorem4": el_natural}
