"""Command-line entry point.

Every run prints one document: a reproducibility header, an overall status
and the subcommand's result.  Certificates are JSON; sweeps default to CSV,
with the header as ``#`` comment lines.  The exit status is 0 when every
requested check passed, 1 when a check failed and 2 on bad input or an
exceeded cap.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import platform
import sys
from fractions import Fraction
from importlib import metadata
from pathlib import Path

from . import __version__
from .construction import (
    ConstructionParams,
    ParameterError,
    build_ab,
    build_xy,
    build_xy_factored,
    derive,
    verify_family,
    verify_perturbation,
)
from .exact import DEFAULT_P0_CAP, CapacityError, format_matrix, is_p0, parse_matrix
from .graphs import (
    DEFAULT_ALPHA_GRP_CAP,
    DEFAULT_MATERIALIZE_CAP,
    ExplicitGraph,
    FractionGraphPower,
    build_quotient,
    lift_bound,
    max_independent_subgroup,
)
from .lattice import DEFAULT_INDEPENDENCE_CAP, certify
from .limits import ScanLimits, convergence_csv, convergence_table, scan, scan_csv
from .mis import DEFAULT_MAX_NODES, DEFAULT_TIME_LIMIT, alpha_base, solve

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_ERROR = 2


class CheckFailed(Exception):
    """Raised by a subcommand to report failed checks alongside its result."""

    def __init__(self, result, reasons):
        super().__init__(", ".join(reasons))
        self.result = result
        self.reasons = list(reasons)


def _versions() -> dict:
    out = {"shannon_lattice": __version__, "python": platform.python_version()}
    for dist in ("mpmath", "numba", "numpy"):
        try:
            out[dist] = metadata.version(dist)
        except metadata.PackageNotFoundError:
            out[dist] = None
    return out


def _config(args) -> dict:
    skip = {"func", "default_format"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def header(args) -> dict:
    return {"command": args.command, "config": _config(args), "versions": _versions()}


def _params(args) -> ConstructionParams:
    return ConstructionParams(args.n, args.k, args.b, args.r, args.s)


def _vector(text: str) -> list[int]:
    try:
        return [int(x) for x in text.replace(" ", "").split(",") if x != ""]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad vector {text!r}") from None


def _window(text: str) -> tuple[Fraction, Fraction]:
    try:
        lo, hi = text.split(":")
        return Fraction(lo), Fraction(hi)
    except ValueError:
        raise argparse.ArgumentTypeError(f"window must look like LO:HI, got {text!r}") from None


# -- subcommands ---------------------------------------------------------------


def cmd_construct(args):
    params = _params(args)
    t = derive(params)
    A, B = build_ab(params)
    cert = certify(A, B, t.p, t.q, independence_cap=args.enum_cap)
    result = {
        "params": dict(zip("nkbrs", params.as_tuple())),
        "a": t.a,
        "p": t.p,
        "q": t.q,
        "degenerate": t.p == t.q,
        "A": A.to_json(),
        "B": B.to_json(),
        "certificate": cert.to_json(with_elements=True),
    }
    if args.emit:
        out = Path(args.emit)
        out.mkdir(parents=True, exist_ok=True)
        (out / "A.txt").write_text(format_matrix(A))
        (out / "B.txt").write_text(format_matrix(B))
        (out / "certificate.json").write_text(json.dumps(cert.to_json(with_elements=True), indent=2) + "\n")
    if not cert.valid:
        raise CheckFailed(result, cert.failed)
    return result


def cmd_verify(args):
    rep = verify_family(_params(args), p0_cap=args.p0_cap, independence_cap=args.enum_cap)
    result = rep.to_json()
    if not rep.valid:
        raise CheckFailed(result, [k for k, v in rep.checks.items() if v not in ("pass", "implied")])
    return result


def cmd_construct_xy(args):
    params = _params(args)
    X, Y = build_xy(params)
    result = {"params": dict(zip("nkbrs", params.as_tuple())), "X": X.to_json(), "Y": Y.to_json()}
    failures = []
    if params.s >= 1:
        Xf, Yf = build_xy_factored(params)
        result["factored_match"] = Xf == X and Yf == Y
        if not result["factored_match"]:
            failures.append("factored")
    p0 = is_p0(X, args.p0_cap)
    result["p0"] = p0.holds
    if not p0.holds:
        result["p0_witness"] = list(p0.witness)
        failures.append("p0")
    if failures:
        raise CheckFailed(result, failures)
    return result


def cmd_quotient(args):
    G = FractionGraphPower(args.p, args.q, args.power)
    Q = build_quotient(G, args.generators, cap=args.enum_cap)
    res = solve(Q.quotient, max_nodes=args.budget_nodes, time_limit=args.budget_secs)
    bound = lift_bound(Q, res.witness)
    result = {
        "graph": G.label(),
        "generators": [list(g) for g in args.generators],
        "subgroup_order": len(Q.H),
        "cosets": Q.coset_count,
        "alpha_quotient": res.size,
        "optimal": res.optimal,
        "bound": bound,
        "claim": f"alpha({G.label()}) >= {bound}",
        "mis": res.to_json(),
    }
    if args.dimacs:
        Path(args.dimacs).write_text(Q.quotient.to_dimacs())
    if not res.optimal:
        raise CheckFailed(result, ["budget"])
    return result


def cmd_mis(args):
    if args.graph:
        G = ExplicitGraph.from_dimacs(Path(args.graph).read_text())
        label = args.graph
    elif args.fraction:
        p, q, n = args.fraction
        H = FractionGraphPower(p, q, n)
        G = H.materialize(cap=args.enum_cap)
        label = H.label()
    else:
        raise ValueError("give a DIMACS file or --fraction P Q N")
    res = solve(G, max_nodes=args.budget_nodes, time_limit=args.budget_secs, strategy=args.strategy)
    result = {"graph": label, "vertices": G.n, **res.to_json()}
    if args.fraction and args.fraction[2] == 1:
        result["alpha_base"] = alpha_base(args.fraction[0], args.fraction[1])
        if res.optimal and res.size != result["alpha_base"]:
            raise CheckFailed(result, ["alpha_base"])
    if not res.optimal:
        raise CheckFailed(result, ["budget"])
    return result


def cmd_bohman(args):
    rep = verify_perturbation(args.d, args.ell, p0_cap=args.p0_cap)
    result = rep.to_json()
    if not rep.valid:
        raise CheckFailed(result, [k for k, v in rep.checks.items() if v != "pass"])
    return result


def cmd_scan(args):
    limits = ScanLimits(args.n_max, args.k_max, args.b_max, args.s_max)
    res = scan(limits, args.window, certify_fraction=args.certify_fraction, seed=args.seed, workers=args.threads)
    if args.format == "csv":
        body = scan_csv(res.points)
    else:
        rows = list(csv.DictReader(io.StringIO(scan_csv(res.points))))
        body = {"points": rows, "certified": len(res.certified), "failed": [list(t) for t in res.failed]}
    if res.failed:
        raise CheckFailed(body, [f"certificate {t}" for t in res.failed])
    return body


def cmd_limit(args):
    rows = convergence_table(args.x, args.epsilon)
    text = convergence_csv(rows)
    body = text if args.format == "csv" else {"rows": list(csv.DictReader(io.StringIO(text)))}
    bad = [str(r.x) for r in rows if not r.within_bound or not (r.delta.certified or not r.delta.hypotheses_met)]
    if bad:
        raise CheckFailed(body, [f"x = {x}" for x in bad])
    return body


def cmd_verify_matrix(args):
    A = parse_matrix(Path(args.file_a).read_text())
    B = parse_matrix(Path(args.file_b).read_text())
    cert = certify(A, B, args.p, args.q, independence_cap=args.enum_cap)
    result = cert.to_json()
    if not cert.valid:
        raise CheckFailed(result, cert.failed)
    return result


def cmd_alpha_grp(args):
    S = max_independent_subgroup(args.p, args.q, args.power, cap=args.enum_cap)
    return {
        "graph": FractionGraphPower(args.p, args.q, args.power).label(),
        "alpha_grp": len(S),
        "generators": [list(g) for g in S.generators],
    }


# -- parser ----------------------------------------------------------------------


def _add_params(sp):
    for name in "nkbrs":
        sp.add_argument(name, type=int)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--threads", type=int, default=1, help="worker processes (results do not depend on it)")
    common.add_argument("--budget-nodes", type=int, default=DEFAULT_MAX_NODES)
    common.add_argument("--budget-secs", type=float, default=DEFAULT_TIME_LIMIT)
    common.add_argument("--out", help="write the output here instead of stdout")
    common.add_argument("--format", choices=("json", "csv"), default=None)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--p0-cap", type=int, default=DEFAULT_P0_CAP, help="largest order for P0 enumeration")
    common.add_argument("--enum-cap", type=int, default=None, help="cap on enumerated sets")

    parser = argparse.ArgumentParser(prog="shannon-lattice", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_, fmt="json", enum_cap=DEFAULT_INDEPENDENCE_CAP):
        sp = sub.add_parser(name, parents=[common], help=help_)
        sp.set_defaults(func=func, default_format=fmt, default_enum_cap=enum_cap)
        return sp

    sp = add("construct", cmd_construct, "build and certify the lattice pair for (n,k,b,r,s)")
    _add_params(sp)
    sp.add_argument("--emit", metavar="DIR", help="also write A.txt, B.txt and certificate.json")

    _add_params(add("verify", cmd_verify, "run every family check for (n,k,b,r,s)"))
    _add_params(add("construct-xy", cmd_construct_xy, "print X and Y and test X for P0"))

    sp = add("quotient", cmd_quotient, "quotient bound for E_{p/q}^power by a subgroup", enum_cap=DEFAULT_MATERIALIZE_CAP)
    sp.add_argument("p", type=int)
    sp.add_argument("q", type=int)
    sp.add_argument("power", type=int)
    sp.add_argument("generators", type=_vector, nargs="+", help="comma-separated generator vectors")
    sp.add_argument("--dimacs", help="write the quotient graph as an edge list")

    sp = add("mis", cmd_mis, "maximum independent set", enum_cap=DEFAULT_MATERIALIZE_CAP)
    sp.add_argument("graph", nargs="?", help="DIMACS-style edge list")
    sp.add_argument("--fraction", type=int, nargs=3, metavar=("P", "Q", "N"))
    sp.add_argument("--strategy", choices=("auto", "max-degree"), default="auto")

    sp = add("bohman", cmd_bohman, "check the perturbed family for (d, ell)")
    sp.add_argument("d", type=int)
    sp.add_argument("ell", type=int)

    sp = add("scan", cmd_scan, "lower-bound point cloud", fmt="csv")
    sp.add_argument("--window", type=_window, default=(Fraction(2), Fraction(7)))
    sp.add_argument("--n-max", type=int, default=5)
    sp.add_argument("--k-max", type=int, default=20)
    sp.add_argument("--b-max", type=int, default=4)
    sp.add_argument("--s-max", type=int, default=16)
    sp.add_argument("--certify-fraction", type=float, default=0.05)

    sp = add("limit", cmd_limit, "convergence table", fmt="csv")
    sp.add_argument("x", type=Fraction, nargs="+")
    sp.add_argument("--epsilon", type=Fraction, default=Fraction(1, 2))

    sp = add("verify-matrix", cmd_verify_matrix, "certify a matrix pair read from files")
    sp.add_argument("file_a")
    sp.add_argument("file_b")
    sp.add_argument("p", type=int)
    sp.add_argument("q", type=int)

    sp = add("alpha-grp", cmd_alpha_grp, "largest independent subgroup (few generators)", enum_cap=DEFAULT_ALPHA_GRP_CAP)
    sp.add_argument("p", type=int)
    sp.add_argument("q", type=int)
    sp.add_argument("--power", type=int, default=1)
    return parser


def _jsonable(obj):
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, tuple):
        return list(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def render(args, status: str, reasons: list[str], body) -> str:
    head = header(args)
    if body is None and args.format == "csv":
        body = ""
    if isinstance(body, str):
        lines = [f"# {json.dumps(head, default=_jsonable, sort_keys=True)}", f"# status: {status}"]
        lines += [f"# reason: {r}" for r in reasons]
        return "\n".join(lines) + "\n" + body
    doc = {"header": head, "status": status, "reasons": reasons, "result": body}
    if args.format == "csv" and isinstance(body, dict):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["key", "value"])
        w.writerow(["status", status])
        for k, v in body.items():
            w.writerow([k, json.dumps(v, default=_jsonable) if isinstance(v, (dict, list)) else v])
        return f"# {json.dumps(head, default=_jsonable, sort_keys=True)}\n" + buf.getvalue()
    return json.dumps(doc, default=_jsonable, indent=2) + "\n"


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.format is None:
        args.format = args.default_format
    if args.enum_cap is None:
        args.enum_cap = args.default_enum_cap
    del args.default_enum_cap
    status, reasons, code = "pass", [], EXIT_OK
    try:
        body = args.func(args)
    except CheckFailed as exc:
        status, reasons, code, body = "fail", exc.reasons, EXIT_FAILED, exc.result
    except (ParameterError, CapacityError, ValueError, ArithmeticError, OSError) as exc:
        status, reasons, code, body = "error", [f"{type(exc).__name__}: {exc}"], EXIT_ERROR, None
    text = render(args, status, reasons, body)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
