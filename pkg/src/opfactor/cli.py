"""``opfactor`` command-line entry point.

Every command prints one JSON object ``{"status", "payload", "diagnostics"}``
on stdout. Exit codes: 0 ok, 1 input_error, 2 hypothesis_failed.
"""
from __future__ import annotations

import argparse
import json
import math
import re
import sys
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import discrete as dc
from . import factorsolve as fs
from . import operators as op
from . import subspace as sp
from . import vnalg as va
from .errors import HypothesisError
from .numkernel import fro, matrix_from_json, matrix_to_json
from .suites import SUITES, run_suite

EXIT = {"ok": 0, "input_error": 1, "hypothesis_failed": 2}


@dataclass
class CommandResult:
    status: str
    payload: dict | list | None = None
    diagnostics: list[str] = field(default_factory=list)

    @property
    def exit_code(self) -> int:
        return EXIT[self.status]

    def render(self, pretty: bool = False) -> str:
        obj = {"status": self.status, "payload": self.payload, "diagnostics": self.diagnostics}
        return json.dumps(obj, indent=2 if pretty else None)


class UsageError(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# ---------------------------------------------------------------- argument parsing helpers

_NUM = r"(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?"
_REAL = re.compile(rf"[+-]?{_NUM}")
_IMAG = re.compile(rf"(?P<im>[+-]?(?:{_NUM})?)i")
_FULL = re.compile(rf"(?P<re>[+-]?{_NUM})(?P<im>[+-](?:{_NUM})?)i")


def _imag(text: str) -> float:
    return float(text + "1") if text in ("", "+", "-") else float(text)


def parse_complex(text: str) -> complex:
    """Parse ``"re+imi"`` forms: ``"2"``, ``"-1.5"``, ``"0+1i"``, ``"3-2i"``, ``"-i"``."""
    s = text.strip()
    if _REAL.fullmatch(s):
        return complex(float(s), 0.0)
    m = _IMAG.fullmatch(s)
    if m:
        return complex(0.0, _imag(m["im"]))
    m = _FULL.fullmatch(s)
    if m:
        return complex(float(m["re"]), _imag(m["im"]))
    raise ValueError(f"cannot parse complex scalar {text!r}; expected e.g. 1.5 or 0+1i")


def parse_list(text: str, conv: Callable = float) -> list:
    items = [t for t in text.split(",") if t.strip()]
    if not items:
        raise ValueError(f"empty list {text!r}")
    out = []
    for t in items:
        try:
            out.append(conv(t.strip()))
        except ValueError:
            raise ValueError(f"bad list entry {t!r} in {text!r}") from None
    return out


def load_json(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise ValueError(f"{path}: cannot read ({exc.strerror})") from None
    except json.JSONDecodeError as exc:
        raise ValueError(f"{path}: malformed JSON ({exc.msg} at line {exc.lineno})") from None


def load_matrix(path: str) -> np.ndarray:
    obj = load_json(path)
    try:
        return matrix_from_json(obj)
    except (ValueError, TypeError) as exc:
        raise ValueError(f"{path}: {exc}") from None


def load_vector(path: str, n: int) -> np.ndarray:
    v = load_matrix(path)
    if v.shape != (n, 1):
        raise ValueError(f"{path}: expected a {n}x1 grid function, got {v.shape[0]}x{v.shape[1]}")
    return v[:, 0]


def _element(path: str, blocks: str | None) -> va.AlgebraElement:
    M = load_matrix(path)
    sizes = (M.shape[0],) if blocks is None else tuple(parse_list(blocks, int))
    try:
        return va.AlgebraElement(va.BlockStructure(sizes), M)
    except ValueError as exc:
        raise ValueError(f"{path}: {exc}") from None


def _grid(n: int, length: float) -> dc.PeriodicGrid:
    return dc.PeriodicGrid(n, length)


# ---------------------------------------------------------------- commands

def cmd_solve_ode(a) -> dict:
    c = parse_list(a.coeffs, parse_complex)
    p = fs.Polynomial(tuple(c))
    rts = fs.roots(p, a.cluster_rtol)
    basis = fs.solve_ode(p, a.cluster_rtol)
    pts = np.linspace(-1.0, 1.0, 11)
    return {
        "roots": [rc.to_json() for rc in rts],
        "basis": basis.to_json(),
        "residual": repr(fs.ode_residual(basis, p, pts)),
        "wronskian_abs_det": repr(fs.abs_det(fs.wronskian(basis, 0.0))),
    }


def cmd_null_decomp(a) -> dict:
    return fs.null_product_decompose(load_matrix(a.a), load_matrix(a.b)).to_json()


def cmd_counting(a) -> dict:
    return fs.counting_check(load_matrix(a.a), load_matrix(a.b)).to_json()


def cmd_prop31(a) -> dict:
    return fs.prop31_check(load_matrix(a.a), load_matrix(a.b)).to_json()


def cmd_angle(a) -> dict:
    S1 = sp.Subspace.span(load_matrix(a.a))
    S2 = sp.Subspace.span(load_matrix(a.b))
    return {
        "dim_S1": S1.dim,
        "dim_S2": S2.dim,
        "dim_intersection": sp.intersect(S1, S2).dim,
        "dim_sum": sp.sum(S1, S2).dim,
        "angle": repr(sp.angle(S1, S2)),
    }


def cmd_rank_nullity(a) -> dict:
    return va.rank_nullity_check(_element(a.t, a.blocks)).to_json()


def cmd_dim_inequality(a) -> dict:
    T = _element(a.t, a.blocks)
    E = _element(a.e, a.blocks)
    F = va.range_projection(T @ E) if a.f is None else _element(a.f, a.blocks)
    return va.dimension_inequality_check(T, E, F).to_json()


def cmd_lattice_id(a) -> dict:
    return va.lattice_dimension_identity(_element(a.e, a.blocks), _element(a.f, a.blocks)).to_json()


def cmd_polar(a) -> dict:
    T = load_matrix(a.t)
    pd = op.polar(T)
    res = op.polar_invariant_residuals(T, pd)
    return {"V": matrix_to_json(pd.V), "H": matrix_to_json(pd.H),
            "residuals": {k: repr(v) for k, v in res.items()}}


def cmd_spectral(a) -> dict:
    H = load_matrix(a.h)
    if a.k is not None:
        return op.spectral_commute(H, load_matrix(a.k)).to_json()
    res = op.spectral_resolution(H)
    return {
        "eigenvalues": [float(x) for x in res.eigenvalues],
        "projections": [matrix_to_json(P) for P in res.projections],
        "reconstruction_residual": repr(fro(res.reconstruct() - H)),
    }


def cmd_check_commute(a) -> dict:
    return op.commute_check(load_matrix(a.a), load_matrix(a.b)).to_json()


def cmd_stability(a) -> dict:
    return op.proper_stability(load_matrix(a.c), load_matrix(a.e)).to_json()


def cmd_adjoint_transfer(a) -> dict:
    return op.adjoint_commute_transfer(load_matrix(a.b), load_matrix(a.c)).to_json()


def cmd_stone_demo(a) -> dict:
    g = _grid(a.n, a.L)
    if a.f is None:
        f = dc.band_limited(g, np.random.default_rng(a.seed))
    else:
        f = load_vector(a.f, g.n)
    steps = parse_list(a.steps, float)
    return dc.stone_generator_check(g, f, steps, a.scheme).to_json()


def cmd_factored_demo(a) -> dict:
    nd = dc.factored_ode_demo(_grid(a.n, a.L), a.w1, a.w2)
    out = nd.to_json()
    out["frequencies"] = [a.w1, a.w2]
    return out


def cmd_wave_demo(a) -> dict:
    gx, gy = _grid(a.n, a.L), _grid(a.m, a.L)
    u = None if a.u is None else load_vector(a.u, a.n * a.m)
    return dc.wave_factorization_demo(gx, gy, u).to_json()


def cmd_verify_all(a) -> dict:
    if a.trials < 1:
        raise ValueError("--trials must be positive")
    suites = [run_suite(name, a.seed, a.trials).to_json() for name in SUITES]
    failed = [s["name"] for s in suites if not s["passed"]]
    payload = {"seed": a.seed, "trials": a.trials, "suites": suites, "passed": not failed}
    if failed:
        raise _SuiteFailure(payload, [f"suite {name} failed" for name in failed])
    return payload


class _SuiteFailure(HypothesisError):
    def __init__(self, payload, diagnostics):
        super().__init__("; ".join(diagnostics))
        self.payload = payload
        self.diagnostics = diagnostics


# name -> (handler, operation it exposes, flag builder)
def _ab(p):
    p.add_argument("--a", required=True, metavar="A.json")
    p.add_argument("--b", required=True, metavar="B.json")


def _blocks(p):
    p.add_argument("--blocks", default=None, help="block sizes, e.g. 2,3 (default: one block)")


def _grid_flags(p, n_default):
    p.add_argument("--n", type=int, default=n_default)
    p.add_argument("--L", type=float, default=2 * math.pi)


def _flags_solve_ode(p):
    p.add_argument("--coeffs", required=True, help="c0,c1,...,cn ascending; complex as 0+1i")
    p.add_argument("--cluster-rtol", type=float, default=fs.CLUSTER_RTOL)


def _flags_angle(p):
    p.add_argument("--a", required=True, metavar="X.json", help="columns spanning the first subspace")
    p.add_argument("--b", required=True, metavar="Y.json", help="columns spanning the second subspace")


def _flags_t(p):
    p.add_argument("--t", required=True, metavar="T.json")
    _blocks(p)


def _flags_dim_inequality(p):
    p.add_argument("--t", required=True, metavar="T.json")
    p.add_argument("--e", required=True, metavar="E.json")
    p.add_argument("--f", default=None, metavar="F.json", help="default: range projection of TE")
    _blocks(p)


def _flags_lattice(p):
    p.add_argument("--e", required=True, metavar="E.json")
    p.add_argument("--f", required=True, metavar="F.json")
    _blocks(p)


def _flags_polar(p):
    p.add_argument("--t", required=True, metavar="T.json")


def _flags_spectral(p):
    p.add_argument("--h", required=True, metavar="H.json")
    p.add_argument("--k", default=None, metavar="K.json", help="compare with a second Hermitian")


def _flags_stability(p):
    p.add_argument("--c", required=True, metavar="C.json")
    p.add_argument("--e", required=True, metavar="E.json")


def _flags_transfer(p):
    p.add_argument("--b", required=True, metavar="B.json", help="Hermitian")
    p.add_argument("--c", required=True, metavar="C.json")


def _flags_stone(p):
    _grid_flags(p, 64)
    p.add_argument("--steps", default="1e-1,1e-2,1e-3,1e-4")
    p.add_argument("--seed", type=int, default=0, help="seed for the random band-limited f")
    p.add_argument("--f", default=None, metavar="f.json", help="n x 1 grid function")
    p.add_argument("--scheme", choices=("forward", "central"), default="forward")


def _flags_factored(p):
    _grid_flags(p, 8)
    p.add_argument("--w1", type=int, default=1)
    p.add_argument("--w2", type=int, default=2)


def _flags_wave(p):
    _grid_flags(p, 4)
    p.add_argument("--m", type=int, default=4)
    p.add_argument("--u", default=None, metavar="u.json", help="(n*m) x 1 function to split")


def _flags_verify(p):
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--trials", type=int, default=100)


COMMANDS: dict[str, tuple[Callable, str, Callable]] = {
    "solve-ode": (cmd_solve_ode, "factorsolve.solve_ode", _flags_solve_ode),
    "null-decomp": (cmd_null_decomp, "factorsolve.null_product_decompose", _ab),
    "counting": (cmd_counting, "factorsolve.counting_check", _ab),
    "prop31": (cmd_prop31, "factorsolve.prop31_check", _ab),
    "angle": (cmd_angle, "subspace.angle", _flags_angle),
    "rank-nullity": (cmd_rank_nullity, "vnalg.rank_nullity_check", _flags_t),
    "dim-inequality": (cmd_dim_inequality, "vnalg.dimension_inequality_check", _flags_dim_inequality),
    "lattice-id": (cmd_lattice_id, "vnalg.lattice_dimension_identity", _flags_lattice),
    "polar": (cmd_polar, "operators.polar", _flags_polar),
    "spectral": (cmd_spectral, "operators.spectral_resolution", _flags_spectral),
    "check-commute": (cmd_check_commute, "operators.commute_check", _ab),
    "stability": (cmd_stability, "operators.proper_stability", _flags_stability),
    "adjoint-transfer": (cmd_adjoint_transfer, "operators.adjoint_commute_transfer", _flags_transfer),
    "stone-demo": (cmd_stone_demo, "discrete.stone_generator_check", _flags_stone),
    "factored-demo": (cmd_factored_demo, "discrete.factored_ode_demo", _flags_factored),
    "wave-demo": (cmd_wave_demo, "discrete.wave_factorization_demo", _flags_wave),
    "verify-all": (cmd_verify_all, "suites.run_suite", _flags_verify),
}


def build_parser() -> _Parser:
    parser = _Parser(prog="opfactor", description="Operator factorisation checks with JSON reports.")
    parser.add_argument("--pretty", action="store_true", help="indented JSON")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)
    for name, (fn, target, flags) in COMMANDS.items():
        p = sub.add_parser(name, help=target)
        p.add_argument("--pretty", action="store_true", default=argparse.SUPPRESS)
        flags(p)
        p.set_defaults(handler=fn)
    return parser


def _attach_values(argv: list[str]) -> list[str]:
    """``--coeffs -1,2`` -> ``--coeffs=-1,2`` so argparse does not read a flag."""
    out, i = [], 0
    while i < len(argv):
        tok = argv[i]
        if tok in ("--coeffs", "--steps") and i + 1 < len(argv) and argv[i + 1].startswith("-"):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
        else:
            out.append(tok)
            i += 1
    return out


def dispatch(argv: list[str]) -> tuple[CommandResult, bool]:
    argv = _attach_values(argv)
    parser = build_parser()
    pretty = "--pretty" in argv
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        return CommandResult("input_error", None, [str(exc), parser.format_usage().strip()]), pretty
    if args.command is None:
        return CommandResult("input_error", None, ["no command given", parser.format_usage().strip()]), pretty
    try:
        payload = args.handler(args)
    except _SuiteFailure as exc:
        return CommandResult("hypothesis_failed", exc.payload, exc.diagnostics), pretty
    except HypothesisError as exc:
        return CommandResult("hypothesis_failed", None, [str(exc)]), pretty
    except ValueError as exc:
        return CommandResult("input_error", None, [str(exc)]), pretty
    return CommandResult("ok", payload), pretty


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    result, pretty = dispatch(argv)
    if result.status == "input_error" and result.diagnostics and result.diagnostics[-1].startswith("usage:"):
        print(build_parser().format_help(), file=sys.stderr)
    print(result.render(pretty))
    return result.exit_code


if __name__ == "__main__":
    sys.exit(main())
