"""Problem files: INI-style text input for the command-line frontend.

A problem file declares a context block plus exactly one primary payload
(a Lagrangian, a source form, or a form literal), with optional blocks for
an isomorphism, sections, evaluation points, and options:

    [context]
    n = 1
    m = 1
    order = 2
    base = x
    fiber = u

    [lagrangian]
    expr = 1/2*u_{1}^2

The prolongation ceiling honors the JETVAR_ORDER_CEILING environment
variable.
"""

from __future__ import annotations

import configparser
import os
from dataclasses import dataclass, field
from fractions import Fraction

from .coords import BaseCoord, JetContext
from .dsl import parse_expr, parse_form
from .errors import ProblemFileError
from .expr import add, mul, num, sym
from .forms import DiffForm, FiberedIso
from .jets import SectionSpec
from .variational import Lagrangian, SourceForm

DEFAULT_CEILING = 12

DEFAULT_OPTIONS = {
    "tolerance": 1e-6,
    "seed": 0,
    "verbose": False,
    "skip-variational-check": False,
    "nodes": 32,
    "step": 1e-4,
}


@dataclass
class ProblemFile:
    ctx: JetContext
    lagrangian: Lagrangian = None
    source: SourceForm = None
    eta: DiffForm = None
    iso: FiberedIso = None
    section: SectionSpec = None
    variation: SectionSpec = None
    points: list = None
    options: dict = field(default_factory=dict)


def _names(raw: str) -> tuple:
    return tuple(part.strip() for part in raw.split(",") if part.strip())


def _get_int(section, key: str, what: str) -> int:
    try:
        return int(section[key])
    except KeyError:
        raise ProblemFileError(f"missing {key!r} in {what}") from None
    except ValueError:
        raise ProblemFileError(f"{key!r} in {what} must be an integer") from None


def _ceiling(order: int) -> int:
    raw = os.environ.get("JETVAR_ORDER_CEILING")
    if raw is None:
        return max(DEFAULT_CEILING, order)
    try:
        return int(raw)
    except ValueError:
        raise ProblemFileError(
            f"JETVAR_ORDER_CEILING must be an integer, got {raw!r}"
        ) from None


def _context(cp: configparser.ConfigParser) -> JetContext:
    if not cp.has_section("context"):
        raise ProblemFileError("missing [context] section")
    section = cp["context"]
    n = _get_int(section, "n", "[context]")
    m = _get_int(section, "m", "[context]")
    order = _get_int(section, "order", "[context]")
    base = _names(section.get("base", ""))
    fiber = _names(section.get("fiber", ""))
    try:
        return JetContext(
            n=n,
            m=m,
            order=order,
            base_names=base,
            fiber_names=fiber,
            ceiling=_ceiling(order),
        )
    except ValueError as exc:
        raise ProblemFileError(str(exc)) from None


def _components(section, prefix: str, count: int, ctx: JetContext, where: str):
    out = []
    for k in range(1, count + 1):
        key = f"{prefix}{k}"
        if key not in section:
            raise ProblemFileError(f"missing {key!r} in [{where}]")
        out.append(parse_expr(section[key], ctx).expr)
    return tuple(out)


def _fractions(raw: str, what: str):
    try:
        return [Fraction(part.strip()) for part in raw.split(",")]
    except (ValueError, ZeroDivisionError):
        raise ProblemFileError(f"bad rational entry in {what}: {raw!r}") from None


def _iso(cp: configparser.ConfigParser, ctx: JetContext) -> FiberedIso:
    section = cp["iso"]
    if "a" not in section:
        raise ProblemFileError("missing 'a' (base matrix) in [iso]")
    rows = [_fractions(row, "[iso] a") for row in section["a"].split(";")]
    if len(rows) != ctx.n or any(len(r) != ctx.n for r in rows):
        raise ProblemFileError(f"[iso] a must be a {ctx.n}x{ctx.n} matrix")
    shift = (
        _fractions(section["b"], "[iso] b")
        if "b" in section
        else [Fraction(0)] * ctx.n
    )
    if len(shift) != ctx.n:
        raise ProblemFileError(f"[iso] b must have {ctx.n} entries")
    base_map = []
    for i in range(ctx.n):
        pieces = [num(shift[i])]
        for k in range(ctx.n):
            if rows[i][k] != 0:
                pieces.append(mul(num(rows[i][k]), sym(BaseCoord(k + 1))))
        base_map.append(add(*pieces))
    fiber_map = _components(section, "fiber", ctx.m, ctx, "iso")
    return FiberedIso(tuple(base_map), fiber_map)


def _points(raw: str, ctx: JetContext) -> list:
    # n = 1: flat comma list of scalars; n > 1: points split by ';',
    # coordinates within a point by ','.
    out = []
    for row in raw.split(";"):
        row = row.strip()
        if not row:
            continue
        try:
            values = [float(part) for part in row.split(",")]
        except ValueError:
            raise ProblemFileError(f"bad point {row!r} in [points]") from None
        if ctx.n == 1:
            out.extend(values)
        elif len(values) != ctx.n:
            raise ProblemFileError(
                f"point {row!r} has {len(values)} entries, need {ctx.n}"
            )
        else:
            out.append(tuple(values))
    if not out:
        raise ProblemFileError("[points] lists no points")
    return out


def _options(cp: configparser.ConfigParser) -> dict:
    out = dict(DEFAULT_OPTIONS)
    if not cp.has_section("options"):
        return out
    section = cp["options"]
    for key in section:
        if key not in DEFAULT_OPTIONS:
            raise ProblemFileError(f"unknown option {key!r}")
        default = DEFAULT_OPTIONS[key]
        raw = section[key]
        try:
            if isinstance(default, bool):
                out[key] = raw.strip().lower() in ("1", "true", "yes", "on")
            elif isinstance(default, int):
                out[key] = int(raw)
            else:
                out[key] = float(raw)
        except ValueError:
            raise ProblemFileError(f"bad value for option {key!r}: {raw!r}") from None
    return out


def load_problem(path: str) -> ProblemFile:
    cp = configparser.ConfigParser()
    try:
        with open(path, encoding="utf-8") as handle:
            cp.read_file(handle)
    except OSError as exc:
        raise ProblemFileError(f"cannot read {path}: {exc}") from None
    except configparser.Error as exc:
        raise ProblemFileError(f"malformed problem file: {exc}") from None

    ctx = _context(cp)
    problem = ProblemFile(ctx=ctx, options=_options(cp))

    payloads = [
        name for name in ("lagrangian", "source", "eta") if cp.has_section(name)
    ]
    if len(payloads) != 1:
        raise ProblemFileError(
            "need exactly one of [lagrangian], [source], [eta]; "
            f"found {payloads or 'none'}"
        )

    if cp.has_section("lagrangian"):
        section = cp["lagrangian"]
        if "expr" not in section:
            raise ProblemFileError("missing 'expr' in [lagrangian]")
        problem.lagrangian = Lagrangian(
            parse_expr(section["expr"], ctx).expr, ctx, ctx.order
        )
    if cp.has_section("source"):
        problem.source = SourceForm(
            _components(cp["source"], "eps", ctx.m, ctx, "source"), ctx, ctx.order
        )
    if cp.has_section("eta"):
        section = cp["eta"]
        if "form" not in section:
            raise ProblemFileError("missing 'form' in [eta]")
        problem.eta = parse_form(section["form"], ctx)

    if cp.has_section("iso"):
        problem.iso = _iso(cp, ctx)
    if cp.has_section("section"):
        problem.section = SectionSpec(
            _components(cp["section"], "comp", ctx.m, ctx, "section")
        )
    if cp.has_section("variation"):
        problem.variation = SectionSpec(
            _components(cp["variation"], "comp", ctx.m, ctx, "variation")
        )
    if cp.has_section("points"):
        section = cp["points"]
        if "values" not in section:
            raise ProblemFileError("missing 'values' in [points]")
        problem.points = _points(section["values"], ctx)
    return problem
