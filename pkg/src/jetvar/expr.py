"""Immutable symbolic expression kernel over jet coordinates.

Every expression is kept in a fully expanded canonical form at all times:
a sum of distinct monomials, each monomial a rational coefficient times a
product of integer powers of atoms (coordinates or sin/cos/exp applications).
Products of sums are distributed on construction, so structural equality of
two expressions decides equality of the functions they denote whenever both
lie in the (Laurent-)polynomial fragment; sin/cos/exp are opaque atoms and
compare syntactically.

Coefficients are exact rationals throughout; no floating point enters the
symbolic layer.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .coords import Coord, JetCoord, PARAM, ParamCoord, coord_key
from .errors import (
    NonPolynomialDivision,
    NonPolynomialParameter,
    UnboundCoordinate,
    UnknownCoordinate,
)

Rational = Fraction

FUNCTIONS = ("sin", "cos", "exp")
_FUNC_INDEX = {name: k for k, name in enumerate(FUNCTIONS)}


class Expr:
    """Base class of all expression nodes; construction goes through the
    smart constructors below, which enforce the canonical form."""

    __slots__ = ()

    def __add__(self, other):
        return add(self, as_expr(other))

    __radd__ = __add__

    def __sub__(self, other):
        return add(self, neg(as_expr(other)))

    def __rsub__(self, other):
        return add(as_expr(other), neg(self))

    def __mul__(self, other):
        return mul(self, as_expr(other))

    __rmul__ = __mul__

    def __neg__(self):
        return neg(self)

    def __pow__(self, k: int):
        return pow_(self, k)

    def __truediv__(self, other):
        return div(self, as_expr(other))

    def __rtruediv__(self, other):
        return div(as_expr(other), self)


@dataclass(frozen=True, slots=True)
class Num(Expr):
    value: Fraction


@dataclass(frozen=True, slots=True)
class Sym(Expr):
    coord: Coord


@dataclass(frozen=True, slots=True)
class Add(Expr):
    terms: tuple


@dataclass(frozen=True, slots=True)
class Mul(Expr):
    factors: tuple


@dataclass(frozen=True, slots=True)
class Pow(Expr):
    base: Expr
    exp: int


@dataclass(frozen=True, slots=True)
class Func(Expr):
    name: str
    arg: Expr


ZERO = Num(Fraction(0))
ONE = Num(Fraction(1))


def num(value) -> Num:
    """Exact rational constant."""
    return Num(Fraction(value))


def sym(coord: Coord) -> Sym:
    return Sym(coord)


def as_expr(value) -> Expr:
    if isinstance(value, Expr):
        return value
    if isinstance(value, (int, Fraction)):
        return Num(Fraction(value))
    raise TypeError(f"cannot coerce {value!r} to an expression")


# --- ordering keys -----------------------------------------------------------


def _expr_key(e: Expr) -> tuple:
    # Deterministic total order on canonical expressions.
    if isinstance(e, Num):
        return (0, e.value)
    if isinstance(e, Sym):
        return (1,) + coord_key(e.coord)
    if isinstance(e, Func):
        return (2, _FUNC_INDEX[e.name], _expr_key(e.arg))
    if isinstance(e, Pow):
        return (3, _expr_key(e.base), e.exp)
    if isinstance(e, Mul):
        return (4, tuple(_expr_key(f) for f in e.factors))
    return (5, tuple(_expr_key(t) for t in e.terms))


def _split_term(t: Expr):
    """Split a canonical non-Add term into (coefficient, monomial factors)."""
    if isinstance(t, Num):
        return t.value, ()
    if isinstance(t, Mul):
        if isinstance(t.factors[0], Num):
            return t.factors[0].value, t.factors[1:]
        return Fraction(1), t.factors
    return Fraction(1), (t,)


def _base_exp(factor: Expr):
    if isinstance(factor, Pow):
        return factor.base, factor.exp
    return factor, 1


def _term_sort_key(t: Expr) -> tuple:
    coeff, mono = _split_term(t)
    if not mono:
        return (1,)  # constants last
    grade = sum(_base_exp(f)[1] for f in mono)
    return (0, -grade, tuple((_expr_key(_base_exp(f)[0]), -_base_exp(f)[1]) for f in mono))


# --- smart constructors ------------------------------------------------------


def _assemble_term(coeff: Fraction, mono: tuple) -> Expr:
    if coeff == 0:
        return ZERO
    if not mono:
        return Num(coeff)
    if coeff == 1:
        if len(mono) == 1:
            return mono[0]
        return Mul(mono)
    return Mul((Num(coeff),) + mono)


def add(*args) -> Expr:
    """Canonical sum: flatten, collect like monomials, fold constants."""
    acc: dict[tuple, Fraction] = {}
    for a in args:
        terms = a.terms if isinstance(a, Add) else (a,)
        for t in terms:
            coeff, mono = _split_term(t)
            acc[mono] = acc.get(mono, Fraction(0)) + coeff
    out = [_assemble_term(c, mono) for mono, c in acc.items() if c != 0]
    if not out:
        return ZERO
    if len(out) == 1:
        return out[0]
    out.sort(key=_term_sort_key)
    return Add(tuple(out))


def _merge_terms(a: Expr, b: Expr) -> Expr:
    """Product of two canonical non-Add terms (never distributes)."""
    coeff_a, mono_a = _split_term(a)
    coeff_b, mono_b = _split_term(b)
    coeff = coeff_a * coeff_b
    if coeff == 0:
        return ZERO
    powers: dict[Expr, int] = {}
    order: list[Expr] = []
    for f in mono_a + mono_b:
        base, k = _base_exp(f)
        if base not in powers:
            powers[base] = 0
            order.append(base)
        powers[base] += k
    mono = tuple(
        base if powers[base] == 1 else Pow(base, powers[base])
        for base in sorted(order, key=_expr_key)
        if powers[base] != 0
    )
    return _assemble_term(coeff, mono)


def mul(*args) -> Expr:
    """Canonical product: flatten, fold constants, merge powers of equal
    atoms, and distribute over sums (expressions stay expanded)."""
    plain = ONE
    sums: list[Add] = []
    stack = list(args)
    for a in stack:
        if isinstance(a, Mul):
            for f in a.factors:
                plain = _merge_terms(plain, f)
        elif isinstance(a, Add):
            sums.append(a)
        else:
            plain = _merge_terms(plain, a)
        if plain is ZERO or (isinstance(plain, Num) and plain.value == 0):
            return ZERO
    result: Expr = plain
    for s in sums:
        left = result.terms if isinstance(result, Add) else (result,)
        result = add(*[_merge_terms(lt, rt) for lt in left for rt in s.terms])
        if is_zero(result):
            return ZERO
    return result


def neg(e: Expr) -> Expr:
    return mul(Num(Fraction(-1)), e)


def pow_(base: Expr, k: int) -> Expr:
    """Integer power; powers of sums are expanded, negative powers are
    allowed on atoms only (no rational-function arithmetic)."""
    if not isinstance(k, int):
        raise TypeError("exponent must be an integer")
    if k == 0:
        return ONE
    if k == 1:
        return base
    if isinstance(base, Num):
        if base.value == 0 and k < 0:
            raise ZeroDivisionError("zero to a negative power")
        return Num(base.value**k)
    if isinstance(base, Mul):
        return mul(*[pow_(f, k) for f in base.factors])
    if isinstance(base, Pow):
        return pow_(base.base, base.exp * k)
    if isinstance(base, Add):
        if k < 0:
            raise NonPolynomialDivision("negative power of a sum of terms")
        result: Expr = base
        for _ in range(k - 1):
            result = mul(result, base)
        return result
    return Pow(base, k)


def div(a: Expr, b: Expr) -> Expr:
    return mul(a, pow_(b, -1))


def func(name: str, arg: Expr) -> Expr:
    if name not in _FUNC_INDEX:
        raise ValueError(f"unsupported function {name!r}")
    return Func(name, arg)


def sin(e: Expr) -> Expr:
    return Func("sin", e)


def cos(e: Expr) -> Expr:
    return Func("cos", e)


def exp(e: Expr) -> Expr:
    return Func("exp", e)


# --- core operations ---------------------------------------------------------


def simplify(e: Expr) -> Expr:
    """Re-canonicalize bottom-up; the identity on constructor-built values."""
    if isinstance(e, (Num, Sym)):
        return e
    if isinstance(e, Add):
        return add(*[simplify(t) for t in e.terms])
    if isinstance(e, Mul):
        return mul(*[simplify(f) for f in e.factors])
    if isinstance(e, Pow):
        return pow_(simplify(e.base), e.exp)
    return Func(e.name, simplify(e.arg))


def is_zero(e: Expr) -> bool:
    """True iff the canonical form is the zero constant.  Complete on the
    polynomial fragment; sound (never true for a nonzero function)."""
    return isinstance(e, Num) and e.value == 0


def partial(e: Expr, c: Coord, ctx=None) -> Expr:
    """Formal partial derivative treating every coordinate (and t) as an
    independent symbol.  If a context is supplied the coordinate must be
    declared in it."""
    if ctx is not None and not ctx.declares(c):
        raise UnknownCoordinate(f"cannot differentiate by undeclared {c}")
    return _partial(e, c)


def _partial(e: Expr, c: Coord) -> Expr:
    if isinstance(e, Num):
        return ZERO
    if isinstance(e, Sym):
        return ONE if e.coord == c else ZERO
    if isinstance(e, Add):
        return add(*[_partial(t, c) for t in e.terms])
    if isinstance(e, Mul):
        out = []
        for k, f in enumerate(e.factors):
            df = _partial(f, c)
            if not is_zero(df):
                out.append(mul(df, *e.factors[:k], *e.factors[k + 1 :]))
        return add(*out) if out else ZERO
    if isinstance(e, Pow):
        db = _partial(e.base, c)
        if is_zero(db):
            return ZERO
        return mul(Num(Fraction(e.exp)), pow_(e.base, e.exp - 1), db)
    da = _partial(e.arg, c)
    if is_zero(da):
        return ZERO
    if e.name == "sin":
        outer: Expr = Func("cos", e.arg)
    elif e.name == "cos":
        outer = neg(Func("sin", e.arg))
    else:
        outer = e
    return mul(outer, da)


def substitute(e: Expr, bindings: dict, ctx=None) -> Expr:
    """Simultaneous substitution of coordinates by expressions."""
    if ctx is not None:
        for c in bindings:
            if not ctx.declares(c):
                raise UnknownCoordinate(f"cannot substitute undeclared {c}")
    if not bindings:
        return e
    return _substitute(e, bindings)


def _substitute(e: Expr, bindings: dict) -> Expr:
    if isinstance(e, Num):
        return e
    if isinstance(e, Sym):
        return bindings.get(e.coord, e)
    if isinstance(e, Add):
        return add(*[_substitute(t, bindings) for t in e.terms])
    if isinstance(e, Mul):
        return mul(*[_substitute(f, bindings) for f in e.factors])
    if isinstance(e, Pow):
        return pow_(_substitute(e.base, bindings), e.exp)
    return Func(e.name, _substitute(e.arg, bindings))


def contains_param(e: Expr) -> bool:
    if isinstance(e, Num):
        return False
    if isinstance(e, Sym):
        return isinstance(e.coord, ParamCoord)
    if isinstance(e, Add):
        return any(contains_param(t) for t in e.terms)
    if isinstance(e, Mul):
        return any(contains_param(f) for f in e.factors)
    if isinstance(e, Pow):
        return contains_param(e.base)
    return contains_param(e.arg)


def _param_decompose(e: Expr) -> dict[int, list]:
    """Coefficients of powers of t; raises when e is not polynomial in t."""
    by_power: dict[int, list] = {}
    terms = e.terms if isinstance(e, Add) else (e,)
    for t in terms:
        coeff, mono = _split_term(t)
        power = 0
        rest = []
        for f in mono:
            base, k = _base_exp(f)
            if isinstance(base, Sym) and isinstance(base.coord, ParamCoord):
                if k < 0:
                    raise NonPolynomialParameter("parameter in a denominator")
                power += k
            else:
                if contains_param(base):
                    raise NonPolynomialParameter(
                        "parameter inside a function application"
                    )
                rest.append(f)
        by_power.setdefault(power, []).append(_assemble_term(coeff, tuple(rest)))
    return by_power


def integrate_param(e: Expr, lower, upper) -> Expr:
    """Exact definite integral over the parameter t; e must be polynomial
    in t."""
    lo, hi = Fraction(lower), Fraction(upper)
    pieces = []
    for power, coeffs in _param_decompose(e).items():
        weight = (hi ** (power + 1) - lo ** (power + 1)) / (power + 1)
        pieces.append(mul(Num(weight), add(*coeffs)))
    return add(*pieces) if pieces else ZERO


def coords_in(e: Expr) -> set:
    """All coordinates (including t) occurring in the canonical form."""
    out: set = set()
    _collect_coords(e, out)
    return out


def _collect_coords(e: Expr, out: set) -> None:
    if isinstance(e, Sym):
        out.add(e.coord)
    elif isinstance(e, Add):
        for t in e.terms:
            _collect_coords(t, out)
    elif isinstance(e, Mul):
        for f in e.factors:
            _collect_coords(f, out)
    elif isinstance(e, Pow):
        _collect_coords(e.base, out)
    elif isinstance(e, Func):
        _collect_coords(e.arg, out)


def jet_coords_in(e: Expr) -> list:
    return sorted(
        (c for c in coords_in(e) if isinstance(c, JetCoord)), key=coord_key
    )


def max_jet_order(e: Expr) -> int:
    return max((len(c.J) for c in jet_coords_in(e)), default=0)


def evaluate(e: Expr, env: dict) -> float:
    """Floating-point evaluation with rationals converted at the leaves."""
    import math

    if isinstance(e, Num):
        return float(e.value)
    if isinstance(e, Sym):
        try:
            return float(env[e.coord])
        except KeyError:
            raise UnboundCoordinate(f"no value bound for {e.coord}") from None
    if isinstance(e, Add):
        total = 0.0
        for t in e.terms:
            total += evaluate(t, env)
        return total
    if isinstance(e, Mul):
        product = 1.0
        for f in e.factors:
            product *= evaluate(f, env)
        return product
    if isinstance(e, Pow):
        return evaluate(e.base, env) ** e.exp
    value = evaluate(e.arg, env)
    return {"sin": math.sin, "cos": math.cos, "exp": math.exp}[e.name](value)
