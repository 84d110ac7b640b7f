"""Command line entry point: ``modbm <subcommand> ...``.

Exit codes: 0 success, 1 violated precondition, 2 parse error, 3 precision or
budget exhausted.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from dataclasses import dataclass
from typing import List, Optional, Sequence

from . import beatty, density, witness, zp
from .beatty import PolynomialIntCoeffs
from .errors import ModbmError, ParseError
from .exactnum import DEFAULT_BUDGET, parse_constant, parse_rational
from .torus import parse_union

PRECISION_ENV = "MODBM_PRECISION"

CONSTANT_HELP = "constant: rat:<num>/<den> | quad:<e>,<f>,<d>,<g> meaning (e+f*sqrt(d))/g | dec:<digits>"
UNION_HELP = "interval union: comma-separated (l..r), [l..r), (l..r], [l..r] with endpoints num/den"
POLY_HELP = "polynomial: poly:c0,c1,...,cd (constant term first), e.g. poly:0,0,1 for x^2"


@dataclass
class RunConfig:
    command: str
    fmt: str
    out: Optional[str]
    precision: int
    args: argparse.Namespace


def _default_precision() -> int:
    raw = os.environ.get(PRECISION_ENV)
    if raw is None:
        return DEFAULT_BUDGET
    try:
        return int(raw)
    except ValueError:
        raise ParseError(f"{PRECISION_ENV} must be an integer", raw, 0) from None


def _int_list(text: str) -> List[int]:
    out = []
    pos = 0
    for part in text.split(","):
        try:
            out.append(int(part))
        except ValueError:
            raise ParseError("malformed integer", text, pos) from None
        pos += len(part) + 1
    return out


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--format", dest="fmt", choices=["json", "csv", "plain"], default="json",
                   help="report format (default json)")
    p.add_argument("--out", help="also write the report to this file")
    p.add_argument("--precision", type=int, default=None,
                   help=f"digit budget for dec: constants (default ${PRECISION_ENV} or {DEFAULT_BUDGET})")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="modbm", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("witness", help="find and verify a1+...+ak mod 1 in B with ai in A",
                       description=f"A, B: {UNION_HELP}. B must be open.")
    p.add_argument("--A", required=True, help=UNION_HELP)
    p.add_argument("--B", required=True, help=UNION_HELP + " (all endpoints open)")
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--mode", choices=[witness.FAITHFUL, witness.TIGHT], default=witness.FAITHFUL)
    p.add_argument("--prime-cap", type=int, default=zp.DEFAULT_PRIME_CAP)
    _add_common(p)

    p = sub.add_parser("sharpness", help="check that A=(0,beta/k), B=(beta,1) admits no witness",
                       description="beta: rational num/den in (0,1)")
    p.add_argument("--beta", required=True, help="rational num/den in (0, 1)")
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--grid", type=int, default=100)
    p.add_argument("--budget", type=int, default=10 ** 6)
    p.add_argument("--seed", type=int, default=density.DEFAULT_SEED)
    _add_common(p)

    p = sub.add_parser("cd-verify", help="check Cauchy-Davenport in Z/pZ exhaustively or by sampling")
    p.add_argument("--p", type=int, required=True, help="prime modulus")
    p.add_argument("--samples", type=int, default=zp.CDConfig.samples)
    p.add_argument("--seed", type=int, default=zp.CDConfig.seed)
    p.add_argument("--exhaustive-cap", type=int, default=zp.CDConfig.exhaustive_cap,
                   help="largest p checked exhaustively")
    _add_common(p)

    p = sub.add_parser("sumset", help="k-fold sumset (or X+Y) of explicit residues",
                       description="residues: comma-separated integers, reduced mod p")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--residues", required=True, help="comma-separated residues, e.g. 0,1,3")
    p.add_argument("--with", dest="other", help="second residue list; computes X+Y instead of kX")
    p.add_argument("--k", type=int, default=2)
    _add_common(p)

    p = sub.add_parser("beatty", help="Beatty sequence floor(n*alpha): terms or membership",
                       description=CONSTANT_HELP)
    p.add_argument("--alpha", required=True, help=CONSTANT_HELP)
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--terms", type=int, help="list the first TERMS terms")
    g.add_argument("--contains", help="comma-separated integers to test for membership")
    g.add_argument("--upto", type=int, help="list all terms <= UPTO")
    _add_common(p)

    p = sub.add_parser("avoid", help="avoidance set with fractional parts in (0, (1-1/alpha)/k)",
                       description=f"{CONSTANT_HELP}; {POLY_HELP}")
    p.add_argument("--alpha", required=True, help=CONSTANT_HELP)
    p.add_argument("--poly", default="poly:0,0,1", help=POLY_HELP)
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--spot-checks", type=int, default=density.ScanConfig.spot_checks)
    p.add_argument("--seed", type=int, default=density.DEFAULT_SEED)
    p.add_argument("--members", action="store_true", help="include the member list in the report")
    _add_common(p)

    p = sub.add_parser("hits", help="count k-fold f-sums of {n : {f(n)/alpha} in J} hitting the Beatty sequence",
                       description=f"{CONSTANT_HELP}; {POLY_HELP}; J: {UNION_HELP}")
    p.add_argument("--alpha", required=True, help=CONSTANT_HELP)
    p.add_argument("--poly", default="poly:0,0,1", help=POLY_HELP)
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--J", required=True, help=UNION_HELP)
    p.add_argument("--N", required=True, help="scan bound, or comma-separated bounds for a table")
    p.add_argument("--sample-budget", type=int, default=density.ScanConfig.sample_budget)
    p.add_argument("--seed", type=int, default=density.DEFAULT_SEED)
    p.add_argument("--count-tuples", action="store_true", help="count tuples instead of distinct sums")
    p.add_argument("--allow-below-threshold", action="store_true",
                   help="do not insist that mu(J) exceeds 1/k - 1/(k alpha)")
    _add_common(p)

    p = sub.add_parser("equidist", help="density of {n <= N : {rho f(n)} in J}",
                       description=f"{CONSTANT_HELP}; {POLY_HELP}; J: {UNION_HELP}")
    p.add_argument("--rho", required=True, help=CONSTANT_HELP)
    p.add_argument("--poly", default="poly:0,1", help=POLY_HELP + " (any integer coefficients)")
    p.add_argument("--J", required=True, help=UNION_HELP)
    p.add_argument("--N", type=int, required=True)
    _add_common(p)
    return parser


# ---- subcommand bodies -----------------------------------------------------------

def _cmd_witness(cfg: RunConfig):
    a = cfg.args
    A, B = parse_union(a.A), parse_union(a.B)
    tr = witness.find_witness(A, B, a.k, witness.WitnessConfig(mode=a.mode, prime_cap=a.prime_cap))
    verdict = witness.verify_trace(tr, A, B, a.k)
    out = tr.to_dict()
    out["verified"] = verdict.ok
    out["verification_failure"] = verdict.failure
    return out


def _cmd_sharpness(cfg: RunConfig):
    a = cfg.args
    return witness.sharpness_scan(parse_rational(a.beta), a.k, a.grid, a.budget, a.seed).to_dict()


def _cmd_cd_verify(cfg: RunConfig):
    a = cfg.args
    conf = zp.CDConfig(exhaustive_cap=a.exhaustive_cap, samples=a.samples, seed=a.seed)
    return zp.verify_cd_exhaustive(a.p, conf).to_dict()


def _cmd_sumset(cfg: RunConfig):
    a = cfg.args
    X = zp.ResidueSet.of(a.p, _int_list(a.residues))
    if a.other is not None:
        Y = zp.ResidueSet.of(a.p, _int_list(a.other))
        S = zp.sumset(X, Y)
        bound = zp.cd_lower_bound(len(X), len(Y), a.p) if X and Y else 0
        op = "X+Y"
    else:
        S = zp.k_fold_sumset(X, a.k)
        bound = min(a.p, a.k * len(X) - a.k + 1)
        op = f"{a.k}X"
    return {"p": a.p, "operation": op, "members": S.members().tolist(), "size": len(S),
            "cd_lower_bound": bound, "bound_holds": len(S) >= bound}


def _cmd_beatty(cfg: RunConfig):
    a = cfg.args
    alpha = parse_constant(a.alpha, cfg.precision)
    if a.terms is not None:
        return {"alpha": alpha.to_text(), "terms": beatty.beatty_prefix(alpha, a.terms)}
    if a.upto is not None:
        return {"alpha": alpha.to_text(), "upto": a.upto, "terms": beatty.beatty_upto(alpha, a.upto)}
    window = beatty.BeattyWindow(alpha)
    return {"alpha": alpha.to_text(),
            "membership": [{"m": m, "member": window.contains(m)} for m in _int_list(a.contains)]}


def _cmd_avoid(cfg: RunConfig):
    a = cfg.args
    alpha = parse_constant(a.alpha, cfg.precision)
    f = PolynomialIntCoeffs.parse(a.poly)
    conf = density.ScanConfig(seed=a.seed, spot_checks=a.spot_checks)
    report, members = density.hegyvari_avoidance_set(alpha, f, a.k, a.N, conf)
    out = report.to_dict()
    if a.members:
        out["members"] = members
    return out, [report]


def _cmd_hits(cfg: RunConfig):
    a = cfg.args
    alpha = parse_constant(a.alpha, cfg.precision)
    f = PolynomialIntCoeffs.parse(a.poly)
    J = parse_union(a.J)
    conf = density.ScanConfig(seed=a.seed, sample_budget=a.sample_budget, count_tuples=a.count_tuples)
    reports = [density.theorem1_hit_scan(alpha, f, a.k, J, N, conf,
                                         require_above_threshold=not a.allow_below_threshold)
               for N in _int_list(a.N)]
    if len(reports) == 1:
        return reports[0].to_dict(), reports
    return {"scans": [r.to_dict() for r in reports]}, reports


def _cmd_equidist(cfg: RunConfig):
    a = cfg.args
    rho = parse_constant(a.rho, cfg.precision)
    f = PolynomialIntCoeffs.parse(a.poly, strict=False)
    return density.weyl_density_estimate(rho, f, parse_union(a.J), a.N).to_dict()


COMMANDS = {
    "witness": _cmd_witness,
    "sharpness": _cmd_sharpness,
    "cd-verify": _cmd_cd_verify,
    "sumset": _cmd_sumset,
    "beatty": _cmd_beatty,
    "avoid": _cmd_avoid,
    "hits": _cmd_hits,
    "equidist": _cmd_equidist,
}


# ---- rendering ------------------------------------------------------------------

def _plain(obj, indent: str = "") -> str:
    lines = []
    if isinstance(obj, dict):
        for key, val in obj.items():
            if isinstance(val, (dict, list)) and val and not _is_flat_list(val):
                lines.append(f"{indent}{key}:")
                lines.append(_plain(val, indent + "  "))
            else:
                lines.append(f"{indent}{key}: {_scalar(val)}")
    elif isinstance(obj, list):
        for item in obj:
            if isinstance(item, dict):
                lines.append(f"{indent}-")
                lines.append(_plain(item, indent + "  "))
            else:
                lines.append(f"{indent}- {_scalar(item)}")
    return "\n".join(lines)


def _is_flat_list(val) -> bool:
    return isinstance(val, list) and all(not isinstance(x, (dict, list)) for x in val)


def _scalar(val) -> str:
    if isinstance(val, list):
        return ", ".join(str(x) for x in val)
    return json.dumps(val) if isinstance(val, (bool, type(None))) else str(val)


def _csv(obj, tables) -> str:
    if tables:
        return density.reports_to_csv(tables)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["key", "value"])
    for key, val in obj.items():
        w.writerow([key, json.dumps(val) if isinstance(val, (dict, list)) else val])
    return buf.getvalue()


def render(obj, fmt: str, tables=None) -> str:
    if fmt == "json":
        return json.dumps(obj, indent=2) + "\n"
    if fmt == "csv":
        return _csv(obj, tables)
    return _plain(obj) + "\n"


def run(argv: Optional[Sequence[str]] = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        precision = args.precision if args.precision is not None else _default_precision()
        cfg = RunConfig(args.command, args.fmt, args.out, precision, args)
        result = COMMANDS[args.command](cfg)
    except ModbmError as exc:
        print(f"modbm {args.command}: {type(exc).__name__}: {exc}", file=stderr)
        return exc.exit_code
    tables = None
    if isinstance(result, tuple):
        result, tables = result
    text = render(result, cfg.fmt, tables)
    stdout.write(text)
    if cfg.out:
        with open(cfg.out, "w") as fh:
            fh.write(text)
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
