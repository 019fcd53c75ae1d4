"""Command-line front end.

Subcommands
-----------
curvature   flag-curvature / Einstein campaign over deterministic samples
projective  pointwise projective-relatedness decision for a metric pair
geodesic    integrate one geodesic and write the trace as CSV
ode         closed-form analysis of one comparison-ODE case
verify-all  run the acceptance campaigns, one summary line per criterion

Exit codes: 0 success, 1 a requested check failed, 2 usage error,
3 numerical failure.  ``--config file.yaml`` supplies defaults for any
long option of the invoked subcommand; explicit flags win.
"""

import argparse
import datetime
import json
import sys

import numpy as np
import yaml

from . import acceptance
from . import comparison as cmp
from . import geodesic as gd
from . import geometry as geo
from . import projective as pj
from . import sampling
from . import zoo
from .errors import DomainError, FinslerError, NumericError

EXIT_OK, EXIT_CHECK, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _vec(text):
    try:
        return np.array([float(p) for p in str(text).split(",")], dtype=float)
    except ValueError:
        raise UsageError(f"expected comma-separated floats, got {text!r}")


def _pair(text):
    v = _vec(text)
    if v.size != 2:
        raise UsageError(f"expected two comma-separated floats, got {text!r}")
    return float(v[0]), float(v[1])


def _metric(name, dim, eps):
    try:
        return zoo.make_metric(name, dim=dim, eps=eps)
    except (KeyError, DomainError):
        known = ", ".join(zoo.METRIC_NAMES)
        raise UsageError(f"unknown metric {name!r}; choose one of: {known}")


def _timestamp():
    return datetime.datetime.now(datetime.timezone.utc).isoformat()


def _to_plain(obj):
    if isinstance(obj, dict):
        return {str(k): _to_plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_to_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_to_plain(v) for v in obj.tolist()]
    if isinstance(obj, (np.bool_, bool)):  # bool is an int subclass
        return bool(obj)
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if np.isfinite(v) else repr(v)  # strict-JSON friendly
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    return obj


def _write_json(path, command, params, results):
    report = {"command": command, "created": _timestamp(),
              "params": _to_plain(params), "results": _to_plain(results)}
    with open(path, "w") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(f"wrote {path}")


def _write_csv(path, header, rows):
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join("%.16e" % v for v in row) + "\n")
    print(f"wrote {path}")


# ---------------------------------------------------------------------------
# option merging: YAML config < explicit flags


def _merge(args, defaults):
    """Fill Namespace holes from the config file, then from ``defaults``."""
    cfg = {}
    if args.config:
        with open(args.config) as fh:
            loaded = yaml.safe_load(fh) or {}
        if not isinstance(loaded, dict):
            raise UsageError("config file must hold a mapping of options")
        cfg = {str(k).replace("-", "_"): v for k, v in loaded.items()}
    merged = {}
    for key, default in defaults.items():
        val = getattr(args, key, None)
        if val is None:
            val = cfg.get(key, default)
        merged[key] = val
    return argparse.Namespace(**merged)


def _add_common(sub):
    sub.add_argument("--config", help="YAML file with default options")
    sub.add_argument("--out", help="write a JSON (or CSV) report here")
    sub.add_argument("--dim", type=int, help="chart dimension (default 2)")
    sub.add_argument("--eps", type=float,
                     help="shape parameter for the one-parameter family")


# ---------------------------------------------------------------------------
# subcommands


def cmd_curvature(args):
    opt = _merge(args, {"metric": "klein", "samples": 40, "flags": 8,
                        "lam": None, "tol": None, "box": None,
                        "dim": 2, "eps": 0.9, "out": None})
    metric = _metric(opt.metric, opt.dim, opt.eps)
    box = None
    if opt.box is not None:
        lo, hi = _pair(opt.box)
        box = (np.full(metric.n, lo), np.full(metric.n, hi))
    report = geo.einstein_campaign(metric, count=int(opt.samples),
                                   lam=opt.lam, box=box,
                                   flags=int(opt.flags))
    print(f"metric            : {metric.name} (n = {metric.n})")
    print(f"einstein constant : {report['lambda']}")
    print(f"samples           : {report['samples']}")
    print(f"max |Ric/(n-1) - lambda F^2| / F^2 : {report['max_einstein_residual']:.3e}")
    if "flag_min" in report:
        print(f"flag curvature range : [{report['flag_min']:.12f}, "
              f"{report['flag_max']:.12f}]")
        print(f"max flag spread      : {report['max_flag_spread']:.3e}")
    if opt.out:
        _write_json(opt.out, "curvature", vars(opt), report)
    if opt.tol is not None and report["max_einstein_residual"] > float(opt.tol):
        print(f"FAIL residual exceeds tol {float(opt.tol):g}")
        return EXIT_CHECK
    return EXIT_OK


def cmd_projective(args):
    opt = _merge(args, {"base": "euclidean", "cand": "funk-plus",
                        "samples": 30, "tol": pj.DECISION_TOL,
                        "dim": 2, "eps": 0.9, "out": None})
    base = _metric(opt.base, opt.dim, opt.eps)
    cand = _metric(opt.cand, opt.dim, opt.eps)
    if base.n != cand.n:
        raise UsageError("base and candidate live on different dimensions")
    report = pj.projective_campaign(base, cand, count=int(opt.samples))
    res = report["max_normalized_residual"]
    related = res <= float(opt.tol)
    print(f"base      : {base.name}")
    print(f"candidate : {cand.name}")
    print(f"samples   : {report['samples']}")
    print(f"max normalized geodesic-coincidence residual : {res:.3e}")
    print(f"projectively related (tol {float(opt.tol):g}) : "
          f"{'yes' if related else 'no'}")
    if related:
        x, y = sampling.joint_state_pairs(base, cand, 1)[0]
        fac = pj.projective_factor(base, cand, x, y)
        print(f"projective factor at ({', '.join('%.3f' % c for c in x)}; "
              f"{', '.join('%.3f' % c for c in y)}) : {fac['P']:.12f}")
    if opt.out:
        report = dict(report)
        report["related"] = related
        _write_json(opt.out, "projective", vars(opt), report)
    return EXIT_OK if related else EXIT_CHECK


def cmd_geodesic(args):
    opt = _merge(args, {"metric": "klein", "x0": None, "y0": None,
                        "tspan": "-1,1", "rtol": 1e-10, "atol": 1e-12,
                        "dim": 2, "eps": 0.9, "out": None})
    metric = _metric(opt.metric, opt.dim, opt.eps)
    if opt.x0 is None or opt.y0 is None:
        raise UsageError("geodesic needs --x0 and --y0")
    x0, y0 = _vec(opt.x0), _vec(opt.y0)
    t0, t1 = _pair(opt.tspan)
    run = gd.integrate_geodesic(metric, x0, y0, (t0, t1),
                                rtol=float(opt.rtol), atol=float(opt.atol))
    print(f"metric   : {metric.name} (n = {metric.n})")
    print(f"t span   : [{run.t_span[0]:g}, {run.t_span[1]:g}]")
    print(f"status   : backward {run.status_backward}, "
          f"forward {run.status_forward}")
    print(f"nodes    : {len(run.ts)}")
    print(f"unit-speed drift : {run.speed_drift:.3e}")
    if opt.out:
        n = metric.n
        header = (["t"] + [f"x{i+1}" for i in range(n)]
                  + [f"v{i+1}" for i in range(n)] + ["F"])
        rows = [[t, *x, *v, s] for t, x, v, s in
                zip(run.ts, run.xs, run.vs, run.speeds)]
        _write_csv(opt.out, header, rows)
    return EXIT_OK


def cmd_ode(args):
    opt = _merge(args, {"lam": -1.0, "lamt": -1.0, "a": 1.0, "b": 0.0,
                        "tspan": None, "out": None})
    case = cmp.make_case(float(opt.lam), float(opt.lamt),
                         float(opt.a), float(opt.b))
    lo, hi = cmp.maximal_interval(case)
    cls = cmp.classify_completeness(case)
    dev = cmp.numeric_vs_closed(
        case, t_span=None if opt.tspan is None else _pair(opt.tspan))
    print(f"case          : lam={case.lam:g} lamt={case.lam_tilde:g} "
          f"a={case.a:g} b={case.b:g}")
    print(f"invariant C   : {case.C:.12g}")
    print(f"life interval : ({lo:g}, {hi:g})")
    print(f"families      : {', '.join(cls['families']) or '(none)'}")
    print(f"base side     : backward "
          f"{'complete' if cls['base_backward_complete'] else 'incomplete'}, "
          f"forward {'complete' if cls['base_forward_complete'] else 'incomplete'}")
    print(f"candidate side: backward "
          f"{'complete' if cls['cand_backward_complete'] else 'incomplete'}, "
          f"forward {'complete' if cls['cand_forward_complete'] else 'incomplete'}")
    print(f"bi-complete   : {'yes' if cls['bi_complete'] else 'no'}")
    print(f"numeric vs closed form : {dev:.3e}")
    if opt.out:
        results = dict(cls)
        results.update({"C": case.C, "interval": [lo, hi],
                        "numeric_vs_closed": dev})
        _write_json(opt.out, "ode", vars(opt), results)
    return EXIT_OK


def cmd_verify_all(args):
    opt = _merge(args, {"only": None, "out": None})
    wanted = None
    if opt.only:
        wanted = {int(p) for p in str(opt.only).split(",")}
    records = []
    failed = 0
    for fn in acceptance.ALL_CRITERIA:
        k = int(fn.__name__.rsplit("_", 1)[1])
        if wanted is not None and k not in wanted:
            continue
        rec = fn()
        records.append(rec)
        mark = "PASS" if rec["passed"] else "FAIL"
        print(f"criterion {rec['criterion']:2d} {mark}  "
              f"worst {rec['worst']:.3e} vs tol {rec['tol']:g}  "
              f"({rec['name']})")
        sys.stdout.flush()
        failed += 0 if rec["passed"] else 1
    print(f"{len(records) - failed}/{len(records)} criteria passed")
    if opt.out:
        _write_json(opt.out, "verify-all", {"only": opt.only}, records)
    return EXIT_OK if failed == 0 else EXIT_CHECK


# ---------------------------------------------------------------------------


def build_parser():
    ap = argparse.ArgumentParser(
        prog="finslerlab",
        description="numerical lab for sprays, curvature and projective "
                    "geometry of Finsler metrics")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("curvature", help="Einstein / flag-curvature campaign")
    p.add_argument("--metric")
    p.add_argument("--samples", type=int)
    p.add_argument("--flags", type=int)
    p.add_argument("--lambda", dest="lam", type=float,
                   help="expected Einstein constant (default: catalog value)")
    p.add_argument("--tol", type=float,
                   help="fail (exit 1) when the residual exceeds this")
    p.add_argument("--box", help="sampling cube LO,HI for all coordinates")
    _add_common(p)
    p.set_defaults(fn=cmd_curvature)

    p = sub.add_parser("projective",
                       help="decide pointwise projective relatedness")
    p.add_argument("--base")
    p.add_argument("--cand")
    p.add_argument("--samples", type=int)
    p.add_argument("--tol", type=float)
    _add_common(p)
    p.set_defaults(fn=cmd_projective)

    p = sub.add_parser("geodesic", help="integrate one geodesic, write CSV")
    p.add_argument("--metric")
    p.add_argument("--x0", help="initial point, comma separated")
    p.add_argument("--y0", help="initial direction, comma separated")
    p.add_argument("--tspan", help="T0,T1 with T0 <= 0 <= T1")
    p.add_argument("--rtol", type=float)
    p.add_argument("--atol", type=float)
    _add_common(p)
    p.set_defaults(fn=cmd_geodesic)

    p = sub.add_parser("ode", help="closed forms of one comparison case")
    p.add_argument("--lambda", dest="lam", type=float)
    p.add_argument("--lambdat", dest="lamt", type=float)
    p.add_argument("--a", type=float)
    p.add_argument("--b", type=float)
    p.add_argument("--tspan")
    _add_common(p)
    p.set_defaults(fn=cmd_ode)

    p = sub.add_parser("verify-all", help="run the acceptance campaigns")
    p.add_argument("--only", help="comma-separated criterion numbers")
    _add_common(p)
    p.set_defaults(fn=cmd_verify_all)

    return ap


def main(argv=None):
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.fn(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (DomainError, FinslerError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
