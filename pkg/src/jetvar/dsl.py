"""Expression language: parsing and rendering.

Grammar (scalar mode):

    expr    := term (('+' | '-') term)*
    term    := unary (('*' | '/') unary)*
    unary   := '-' unary | power
    power   := primary ('^' primary)*          integer exponents only
    primary := INTEGER | IDENT jet-index? | FUNC '(' expr ')' | '(' expr ')'

Identifiers are the declared coordinate names; jet indices are written
`u_{1,2}` after a fiber name and are normalized to sorted order (with a
warning when given unsorted).  Rational literals are spelled as quotients,
`1/2`.  In form mode the additional atoms `dx1`, `du`, `du_{1,2}` denote
basis one-forms (`d` followed by a declared name), `^` between forms is the
wedge product, and `*` scales a form by a scalar.

Rendering produces strings that re-parse to the same canonical value.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from fractions import Fraction

from .coords import BaseCoord, JetContext, JetCoord, PARAM
from .errors import DslSyntaxError, OrderExceeded, UnknownIdentifier
from .expr import (
    Add,
    Expr,
    Func,
    Mul,
    Num,
    Pow,
    Sym,
    add,
    div,
    func,
    mul,
    neg,
    pow_,
    sym,
)
from .forms import DX, DY, DiffForm, W, form_from_terms, function_form, scale, wedge

FUNCTION_NAMES = ("sin", "cos", "exp")


@dataclass(frozen=True)
class ParsedExpr:
    expr: Expr
    source: str
    span: tuple


# --- tokenizer ----------------------------------------------------------------


@dataclass(frozen=True)
class Token:
    kind: str  # NUM | IDENT | OP | END
    text: str
    start: int
    end: int


_OPS = set("+-*/^(){},_")


def tokenize(source: str) -> list:
    tokens = []
    i = 0
    n = len(source)
    while i < n:
        ch = source[i]
        if ch.isspace():
            i += 1
            continue
        if ch.isdigit():
            j = i
            while j < n and source[j].isdigit():
                j += 1
            tokens.append(Token("NUM", source[i:j], i, j))
            i = j
            continue
        if ch.isalpha():
            j = i
            while j < n and (source[j].isalnum()):
                j += 1
            tokens.append(Token("IDENT", source[i:j], i, j))
            i = j
            continue
        if ch in _OPS:
            tokens.append(Token("OP", ch, i, i + 1))
            i += 1
            continue
        raise DslSyntaxError(f"unexpected character {ch!r}", (i, i + 1))
    tokens.append(Token("END", "", n, n))
    return tokens


# --- parser -------------------------------------------------------------------


_ADD_PREC = 10
_MUL_PREC = 20
_UNARY_PREC = 30
_POW_PREC = 40


class _Parser:
    def __init__(self, source: str, ctx: JetContext, allow_forms: bool):
        self.source = source
        self.ctx = ctx
        self.allow_forms = allow_forms
        self.tokens = tokenize(source)
        self.pos = 0

    # token plumbing

    def peek(self) -> Token:
        return self.tokens[self.pos]

    def advance(self) -> Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect_op(self, text: str) -> Token:
        tok = self.peek()
        if tok.kind != "OP" or tok.text != text:
            raise DslSyntaxError(
                f"expected {text!r}, found {tok.text or 'end of input'!r}",
                (tok.start, tok.end),
            )
        return self.advance()

    # entry

    def parse(self):
        value = self.expression(_ADD_PREC)
        tok = self.peek()
        if tok.kind != "END":
            raise DslSyntaxError(
                f"unexpected trailing input {tok.text!r}", (tok.start, tok.end)
            )
        return value

    def expression(self, min_prec: int):
        left = self.unary()
        while True:
            tok = self.peek()
            if tok.kind != "OP":
                return left
            prec = {
                "+": _ADD_PREC,
                "-": _ADD_PREC,
                "*": _MUL_PREC,
                "/": _MUL_PREC,
                "^": _POW_PREC,
            }.get(tok.text)
            if prec is None or prec < min_prec:
                return left
            self.advance()
            right = self.expression(prec + 1)  # left associative throughout
            left = self.combine(tok, left, right)

    def unary(self):
        tok = self.peek()
        if tok.kind == "OP" and tok.text == "-":
            self.advance()
            operand = self.expression(_UNARY_PREC)
            if isinstance(operand, DiffForm):
                return scale(operand, Num(Fraction(-1)))
            return neg(operand)
        return self.primary()

    def combine(self, op: Token, left, right):
        span = (op.start, op.end)
        lf, rf = isinstance(left, DiffForm), isinstance(right, DiffForm)
        if op.text in "+-":
            if lf != rf:
                raise DslSyntaxError("cannot add a scalar and a form", span)
            if lf:
                return left + right if op.text == "+" else left - right
            return add(left, right if op.text == "+" else neg(right))
        if op.text == "*":
            if lf and rf:
                raise DslSyntaxError("use ^ to combine two forms", span)
            if lf:
                return scale(left, right)
            if rf:
                return scale(right, left)
            return mul(left, right)
        if op.text == "/":
            if rf:
                raise DslSyntaxError("cannot divide by a form", span)
            if lf:
                return scale(left, div(Num(Fraction(1)), right))
            return div(left, right)
        # '^': power on scalars, wedge when a form is involved
        if lf or rf:
            return wedge(self._as_form(left), self._as_form(right))
        if not isinstance(right, Num) or right.value.denominator != 1:
            raise DslSyntaxError("exponent must be an integer", span)
        return pow_(left, int(right.value))

    def _as_form(self, value):
        if isinstance(value, DiffForm):
            return value
        from .expr import max_jet_order

        return function_form(self.ctx, value, max_jet_order(value))

    def primary(self):
        tok = self.advance()
        if tok.kind == "NUM":
            return Num(Fraction(int(tok.text)))
        if tok.kind == "OP" and tok.text == "(":
            inner = self.expression(_ADD_PREC)
            self.expect_op(")")
            return inner
        if tok.kind == "IDENT":
            return self.identifier(tok)
        raise DslSyntaxError(
            f"unexpected {tok.text or 'end of input'!r}", (tok.start, tok.end)
        )

    def identifier(self, tok: Token):
        name = tok.text
        ctx = self.ctx
        span = (tok.start, tok.end)
        if name in FUNCTION_NAMES:
            self.expect_op("(")
            arg = self.expression(_ADD_PREC)
            self.expect_op(")")
            if isinstance(arg, DiffForm):
                raise DslSyntaxError(f"{name} takes a scalar argument", span)
            return func(name, arg)
        if name in ctx.base_names:
            if self._index_follows():
                raise DslSyntaxError(
                    f"base variable {name!r} carries no jet index", span
                )
            return sym(BaseCoord(ctx.base_names.index(name) + 1))
        if name in ctx.fiber_names:
            sigma = ctx.fiber_names.index(name) + 1
            return sym(JetCoord(sigma, self._jet_index(span)))
        if name.startswith("d") and len(name) > 1:
            rest = name[1:]
            if not self.allow_forms:
                raise DslSyntaxError(
                    f"differential {name!r} is not a scalar expression", span
                )
            if rest in ctx.base_names:
                if self._index_follows():
                    raise DslSyntaxError(
                        f"base differential {name!r} carries no jet index", span
                    )
                i = ctx.base_names.index(rest) + 1
                return DiffForm(ctx, 0, 1, {(DX(i),): Num(Fraction(1))})
            if rest in ctx.fiber_names:
                sigma = ctx.fiber_names.index(rest) + 1
                J = self._jet_index(span)
                return DiffForm(ctx, len(J), 1, {(DY(sigma, J),): Num(Fraction(1))})
        raise UnknownIdentifier(f"unknown identifier {name!r}", span)

    def _index_follows(self) -> bool:
        tok = self.peek()
        return tok.kind == "OP" and tok.text == "_"

    def _jet_index(self, name_span: tuple) -> tuple:
        if not self._index_follows():
            return ()
        self.advance()
        self.expect_op("{")
        indices = []
        while True:
            tok = self.advance()
            if tok.kind != "NUM":
                raise DslSyntaxError(
                    f"expected a base index, found {tok.text or 'end of input'!r}",
                    (tok.start, tok.end),
                )
            value = int(tok.text)
            if not 1 <= value <= self.ctx.n:
                raise UnknownIdentifier(
                    f"no base direction {value} (n = {self.ctx.n})",
                    (tok.start, tok.end),
                )
            indices.append(value)
            tok = self.peek()
            if tok.kind == "OP" and tok.text == ",":
                self.advance()
                continue
            break
        close = self.expect_op("}")
        if len(indices) > self.ctx.order:
            raise OrderExceeded(
                f"jet index of length {len(indices)} exceeds declared order "
                f"{self.ctx.order}",
                (name_span[0], close.end),
            )
        J = tuple(indices)
        if J != tuple(sorted(J)):
            warnings.warn(
                f"jet index {J} normalized to {tuple(sorted(J))}", stacklevel=3
            )
        return tuple(sorted(J))


def parse_expr(source: str, ctx: JetContext) -> ParsedExpr:
    """Parse a scalar expression in the declared context."""
    value = _Parser(source, ctx, allow_forms=False).parse()
    return ParsedExpr(value, source, (0, len(source)))


def parse_form(source: str, ctx: JetContext) -> DiffForm:
    """Parse a differential-form literal; a scalar result is returned as a
    0-form.  The declared order is the highest jet order occurring."""
    value = _Parser(source, ctx, allow_forms=True).parse()
    if isinstance(value, DiffForm):
        from .forms import max_form_order

        return value.at_order(max_form_order(value))
    from .expr import max_jet_order

    return function_form(ctx, value, max_jet_order(value))


# --- rendering ----------------------------------------------------------------


def _split(term: Expr):
    if isinstance(term, Mul) and isinstance(term.factors[0], Num):
        return term.factors[0].value, term.factors[1:]
    if isinstance(term, Num):
        return term.value, ()
    if isinstance(term, Mul):
        return Fraction(1), term.factors
    return Fraction(1), (term,)


def render_expr(e: Expr, ctx: JetContext) -> str:
    """Render to the expression grammar; re-parses to an equal Expr."""
    if isinstance(e, Add):
        parts = [_render_term(t, ctx) for t in e.terms]
        out = parts[0]
        for p in parts[1:]:
            out += " - " + p[1:] if p.startswith("-") else " + " + p
        return out
    return _render_term(e, ctx)


def _render_term(term: Expr, ctx: JetContext) -> str:
    coeff, factors = _split(term)
    if not factors:
        return str(coeff)
    rendered = "*".join(_render_factor(f, ctx) for f in factors)
    if coeff == 1:
        return rendered
    if coeff == -1:
        return "-" + rendered
    return f"{coeff}*{rendered}"


def _render_factor(f: Expr, ctx: JetContext) -> str:
    if isinstance(f, Pow):
        base = _render_factor(f.base, ctx)
        if f.exp < 0:
            return f"{base}^({f.exp})"
        return f"{base}^{f.exp}"
    if isinstance(f, Sym):
        return ctx.coord_name(f.coord)
    if isinstance(f, Func):
        return f"{f.name}({render_expr(f.arg, ctx)})"
    if isinstance(f, Num):
        return str(f.value) if f.value >= 0 else f"({f.value})"
    # canonical products never nest sums, but stay safe
    return f"({render_expr(f, ctx)})"


def _render_generator(g, ctx: JetContext) -> str:
    if isinstance(g, DX):
        return "d" + ctx.base_names[g.i - 1]
    name = ctx.fiber_names[g.sigma - 1]
    suffix = "" if not g.J else "_{" + ",".join(str(i) for i in g.J) + "}"
    if isinstance(g, DY):
        return "d" + name + suffix
    return "w_" + name + suffix


def render_form(form: DiffForm, ctx: JetContext) -> str:
    """Render a form; raw-basis output re-parses to an equal form, while
    contact generators (from transient representations) render as w_u_{J}
    for display only."""
    if form.is_zero():
        return "0"
    parts = []
    for gens in sorted(form.terms, key=lambda gs: tuple(map(_gen_sort, gs))):
        coeff = form.terms[gens]
        word = " ^ ".join(_render_generator(g, ctx) for g in gens)
        if not gens:
            parts.append(render_expr(coeff, ctx))
            continue
        if coeff == Num(Fraction(1)):
            parts.append(word)
        elif coeff == Num(Fraction(-1)):
            parts.append("-" + word)
        elif isinstance(coeff, Add):
            parts.append(f"({render_expr(coeff, ctx)})*{word}")
        else:
            parts.append(f"{render_expr(coeff, ctx)}*{word}")
    out = parts[0]
    for p in parts[1:]:
        out += " - " + p[1:] if p.startswith("-") else " + " + p
    return out


def _gen_sort(g) -> tuple:
    from .forms import gen_key

    return gen_key(g)
