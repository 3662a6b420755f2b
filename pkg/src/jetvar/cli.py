"""Command-line frontend.

Usage: jetvar <subcommand> <problem-file> [--verbose]
       [--skip-variational-check] [--tolerance T] [--seed S]

Results are printed to stdout as JSON; diagnostics go to stderr as JSON.
Exit code 0 means the check passed, 1 means it ran but answered in the
negative, 2 means the input could not be processed.
"""

from __future__ import annotations

import argparse
import json
import sys

from .dsl import render_expr, render_form
from .errors import DslError, JetvarError, ProblemFileError
from .expr import is_zero
from .forms import cartan_form_contact, expand_contact
from .numeric import QuadratureSpec, VariationProbe, first_variation_check, residual_on_section
from .problem import ProblemFile, load_problem
from .variational import (
    classical_helmholtz_ode,
    euler_lagrange,
    helmholtz_residuals,
    is_null_lagrangian,
    naturality_report,
    null_lagrangian_from_eta,
    tonti_lagrangian,
)


def _need(value, command: str, section: str):
    if value is None:
        raise ProblemFileError(f"'{command}' needs a [{section}] section")
    return value


def _report_payload(report, ctx, verbose: bool) -> dict:
    records = []
    for rec in report.records:
        if not verbose and is_zero(rec.residual):
            continue
        records.append(
            {
                "level": rec.level,
                "multi_index": list(rec.I),
                "sigma": rec.sigma,
                "nu": rec.nu,
                "residual": render_expr(rec.residual, ctx),
            }
        )
    return {"verdict": report.verdict, "residuals": records}


def _cmd_el(problem: ProblemFile, opts: dict):
    lag = _need(problem.lagrangian, "el", "lagrangian")
    sf = euler_lagrange(lag)
    payload = {
        "order": sf.s,
        "components": [render_expr(e, problem.ctx) for e in sf.eps],
    }
    return 0, payload


def _cmd_helmholtz(problem: ProblemFile, opts: dict):
    sf = _need(problem.source, "helmholtz", "source")
    report = helmholtz_residuals(sf, probe_seed=opts["seed"])
    payload = _report_payload(report, problem.ctx, opts["verbose"])
    if problem.ctx.n == 1 and sf.s <= 2:
        classical = classical_helmholtz_ode(sf, probe_seed=opts["seed"])
        payload["classical"] = _report_payload(classical, problem.ctx, opts["verbose"])
        payload["verdicts_agree"] = classical.verdict == report.verdict
    return (0 if report.verdict == "variational" else 1), payload


def _cmd_tonti(problem: ProblemFile, opts: dict):
    sf = _need(problem.source, "tonti", "source")
    payload = {}
    if not opts["skip-variational-check"]:
        report = helmholtz_residuals(sf, probe_seed=opts["seed"])
        payload.update(_report_payload(report, problem.ctx, opts["verbose"]))
        if report.verdict != "variational":
            return 1, payload
    lag = tonti_lagrangian(sf)
    verified = euler_lagrange(lag).eps == sf.eps
    payload.update(
        {
            "lagrangian": render_expr(lag.L, problem.ctx),
            "order": lag.r,
            "verified": verified,
        }
    )
    return (0 if verified else 1), payload


def _cmd_cartan(problem: ProblemFile, opts: dict):
    lag = _need(problem.lagrangian, "cartan", "lagrangian")
    contact = cartan_form_contact(lag)
    raw = expand_contact(contact)
    payload = {
        "order": contact.order,
        "raw": render_form(raw, problem.ctx),
        "contact": render_form(contact, problem.ctx),
    }
    return 0, payload


def _cmd_null_check(problem: ProblemFile, opts: dict):
    lag = _need(problem.lagrangian, "null-check", "lagrangian")
    sf = euler_lagrange(lag)
    null = all(is_zero(e) for e in sf.eps)
    payload = {
        "null": null,
        "components": [render_expr(e, problem.ctx) for e in sf.eps],
    }
    return (0 if null else 1), payload


def _cmd_null_from_eta(problem: ProblemFile, opts: dict):
    eta = _need(problem.eta, "null-from-eta", "eta")
    lag = null_lagrangian_from_eta(eta)
    verified = is_null_lagrangian(lag)
    payload = {
        "lagrangian": render_expr(lag.L, problem.ctx),
        "order": lag.r,
        "verified": verified,
    }
    return (0 if verified else 1), payload


def _cmd_naturality(problem: ProblemFile, opts: dict):
    lag = _need(problem.lagrangian, "naturality", "lagrangian")
    iso = _need(problem.iso, "naturality", "iso")
    report = naturality_report(lag, iso)
    payload = {key: ("pass" if flag else "fail") for key, flag in report.items()}
    return (0 if all(report.values()) else 1), payload


def _cmd_numcheck(problem: ProblemFile, opts: dict):
    if problem.lagrangian is not None:
        gamma = _need(problem.section, "numcheck", "section")
        phi = _need(problem.variation, "numcheck", "variation")
        quad = QuadratureSpec(nodes=opts["nodes"], step=opts["step"])
        result = first_variation_check(
            problem.lagrangian, VariationProbe(gamma, phi), quad
        )
        tol = opts["tolerance"]
        # Hybrid criterion: relative when the values are O(1) or larger,
        # absolute when both sides are near zero.
        scale = max(1.0, abs(result.lhs), abs(result.rhs))
        ok = bool(result.abs_diff <= tol * scale)
        payload = {
            "lhs": float(result.lhs),
            "rhs": float(result.rhs),
            "abs_diff": float(result.abs_diff),
            "rel_diff": float(result.abs_diff / scale),
            "tolerance": tol,
            "pass": ok,
        }
        return (0 if ok else 1), payload
    if problem.source is not None:
        gamma = _need(problem.section, "numcheck", "section")
        points = _need(problem.points, "numcheck", "points")
        values = residual_on_section(problem.source, gamma, points)
        payload = {
            "points": points,
            "values": [list(row) for row in values],
        }
        return 0, payload
    raise ProblemFileError("'numcheck' needs a [lagrangian] or [source] payload")


_HANDLERS = {
    "el": _cmd_el,
    "helmholtz": _cmd_helmholtz,
    "tonti": _cmd_tonti,
    "cartan": _cmd_cartan,
    "null-check": _cmd_null_check,
    "null-from-eta": _cmd_null_from_eta,
    "naturality": _cmd_naturality,
    "numcheck": _cmd_numcheck,
}

_HELP = {
    "el": "Euler-Lagrange source form of a Lagrangian",
    "helmholtz": "variationality test for a source form",
    "tonti": "reconstruct a Lagrangian from a variational source form",
    "cartan": "Poincare-Cartan equivalent of a Lagrangian",
    "null-check": "test whether a Lagrangian has identically zero source form",
    "null-from-eta": "build a null Lagrangian from an (n-1)-form",
    "naturality": "check Cartan form and source form naturality under a change of variables",
    "numcheck": "numeric first-variation or on-section residual check",
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="jetvar",
        description="symbolic variational calculus on jet spaces",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("file", help="problem file (INI format)")
    common.add_argument(
        "--verbose", action="store_true", default=None, help="include zero residuals"
    )
    common.add_argument(
        "--skip-variational-check",
        action="store_true",
        default=None,
        help="skip the variationality gate before reconstruction",
    )
    common.add_argument("--tolerance", type=float, default=None, metavar="T")
    common.add_argument("--seed", type=int, default=None, metavar="S")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _HANDLERS:
        sub.add_parser(name, parents=[common], help=_HELP[name])
    return parser


def _merge_options(problem: ProblemFile, args) -> dict:
    opts = dict(problem.options)
    if args.verbose is not None:
        opts["verbose"] = True
    if args.skip_variational_check is not None:
        opts["skip-variational-check"] = True
    if args.tolerance is not None:
        opts["tolerance"] = args.tolerance
    if args.seed is not None:
        opts["seed"] = args.seed
    return opts


def _diagnose(diag: dict) -> None:
    print(json.dumps(diag, indent=2, sort_keys=True), file=sys.stderr)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        problem = load_problem(args.file)
        opts = _merge_options(problem, args)
        code, payload = _HANDLERS[args.command](problem, opts)
    except DslError as exc:
        _diagnose(
            {
                "error": type(exc).__name__,
                "message": exc.message,
                "span": list(exc.span),
            }
        )
        return 2
    except JetvarError as exc:
        _diagnose({"error": type(exc).__name__, "message": str(exc)})
        return 2
    print(json.dumps(payload, indent=2, sort_keys=True))
    return code


if __name__ == "__main__":
    sys.exit(main())
