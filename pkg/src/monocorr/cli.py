"""Command-line front end.

Exit codes: 0 all checks pass, 1 a check failed (witness in the output),
2 usage or input error (JSON error object on stderr).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys

from . import bounds, cube, families, tablefile, verify

FORMAT_VERSION = "monocorr/1"
DEFAULT_CAP = 20


class UsageError(Exception):
    pass


def _spec_dimension(spec: dict, cap: int) -> int:
    kind = spec.get("kind")
    if kind == "ltf":
        return len(spec.get("weights", []))
    if kind == "compose":
        return sum(_spec_dimension(s, cap) for s in spec.get("inners", []))
    if kind == "dual_of":
        return _spec_dimension(spec.get("of", {}), cap)
    n = int(spec.get("n", 0))
    if kind == "example31":
        return n + 1
    if kind == "example32":
        return int(spec.get("max_total", cap))
    return n


def _cap(args) -> int:
    return cube.MAX_N if args.allow_large else DEFAULT_CAP


def _check_n(n: int, args) -> None:
    cap = _cap(args)
    if n > cap:
        hint = "" if args.allow_large else " (pass --allow-large to go up to 24)"
        raise UsageError(f"n={n} exceeds the cap {cap}{hint}")


def _load_functions(args) -> list:
    out = []
    for text in args.spec or []:
        try:
            spec = json.loads(text)
        except json.JSONDecodeError as e:
            raise UsageError(f"--spec is not valid JSON: {e}") from None
        if not isinstance(spec, dict):
            raise UsageError("--spec must be a JSON object")
        _check_n(_spec_dimension(spec, _cap(args)), args)
        if spec.get("kind") == "example32" and "max_total" not in spec:
            spec["max_total"] = _cap(args)
        out.append(_materialize(spec))
    for path in args.table or []:
        f = tablefile.load_table(path)
        _check_n(f.n, args)
        out.append(f)
    return out


def _materialize(spec: dict):
    f = families.materialize(spec)
    return f if f.label else f.with_label(json.dumps(spec, sort_keys=True))


# -- output helpers ---------------------------------------------------------

def _dumps(obj) -> str:
    return json.dumps(bounds._json_safe(obj), sort_keys=True, indent=2) + "\n"


def _csv(rows, header, schema) -> str:
    buf = io.StringIO()
    buf.write(f"# schema: {schema}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow(["inf" if v is None else v for v in r])
    return buf.getvalue()


def _emit(text: str, args) -> None:
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _flatten(d: dict, prefix: str = "") -> list:
    rows = []
    for k, v in d.items():
        key = f"{prefix}{k}"
        if isinstance(v, dict):
            rows += _flatten(v, key + ".")
        elif isinstance(v, list):
            rows += [(f"{key}[{i}]", x) for i, x in enumerate(v)]
        else:
            rows.append((key, v))
    return rows


# -- commands ---------------------------------------------------------------

NS_GRID = (0.01, 0.04, 0.09, 0.25)


def analyze_report(f) -> dict:
    prof = cube.influences(f)
    sw = cube.level_weights(f, f).sw
    signed = f if f.kind == cube.SIGNED else (cube.to_signed(f) if f.kind == cube.INDICATOR else None)
    ns = {str(e): cube.noise_stability(signed, e) for e in NS_GRID} if signed is not None else {}
    return {
        "format": FORMAT_VERSION, "label": f.label, "n": f.n, "kind": f.kind,
        "mu": cube.mean(f), "influences": prof.influences.tolist(), "total_influence": prof.total,
        "regularity_max_over_min": prof.max_over_min, "tau_regularity": cube.tau_regularity(f),
        "monotone": cube.is_monotone(f), "fully_symmetric": cube.is_fully_symmetric(f),
        "level_weights": sw[: min(f.n, 4) + 1].tolist(),
        "w1_influence": float((prof.influences ** 2).sum()),
        "noise_stability_signed": ns,
    }


def cmd_analyze(args) -> int:
    fs = _load_functions(args)
    if len(fs) != 1:
        raise UsageError("analyze takes exactly one --spec or --table")
    rep = analyze_report(fs[0])
    if args.format == "csv":
        _emit(_csv(_flatten(rep), ["key", "value"], f"{FORMAT_VERSION}/analyze"), args)
    else:
        _emit(_dumps(rep), args)
    return 0


def _emit_report(rep: bounds.BoundReport, args, extra: dict | None = None) -> None:
    if args.format == "csv":
        _emit(_csv([rep.csv_row()], bounds.CSV_COLUMNS, bounds.CSV_SCHEMA), args)
    else:
        body = {"format": FORMAT_VERSION, "report": rep.to_dict()}
        body.update(extra or {})
        _emit(_dumps(body), args)


def cmd_bounds(args) -> int:
    fs = _load_functions(args)
    if len(fs) != 2:
        raise UsageError("bounds takes exactly two functions (--spec/--table, repeatable)")
    _emit_report(bounds.bound_report(*fs), args)
    return 0


PAIR_NAMES = ("talagrand_ball", "tribes_dual", "example31", "example32", "example54", "cormaj")


def _need(args, *names):
    missing = [k for k in names if getattr(args, k) is None]
    if missing:
        raise UsageError(f"pair --name {args.name} needs --{' --'.join(missing)}")


def build_pair(args):
    """(f, g, checks, info) for a named built-in pair."""
    name, n = args.name, args.n
    checks, info = [], {}
    if name == "talagrand_ball":
        _need(args, "n", "a")
        _check_n(n, args)
        t, mu = families.ball_threshold(n, args.a)
        f = families.hamming_ball(n, t)
        g = cube.dual(f).with_label(f"dual({f.label})")
        info = {"t": t, "mu": mu}
        checks.append(verify.check_suf1(f))
        if 2 * t >= n - 1:
            cov = cube.covariance(f, g)
            ok = abs(cov - mu * mu) <= 1e-12
            checks.append(verify.CheckResult("cov_equals_mu_squared", ok,
                                             None if ok else {"n": n, "t": t},
                                             details={"cov": cov, "mu_sq": mu * mu}))
    elif name == "tribes_dual":
        _need(args, "n")
        _check_n(n, args)
        r = args.r if args.r is not None else families.suggest_tribe_width(n)
        f = families.tribes(n, r)
        g = cube.dual(f).with_label(f"dual({f.label})")
        info = {"r": r}
        checks.append(verify.check_suf1(f))
    elif name == "example31":
        _need(args, "n", "a")
        _check_n(n + 1, args)
        f, g, info = families.example31(n, args.a)
        A = info.pop("A")
        ia, ia1 = cube.influence_vector(A), cube.influence_vector(f)
        gap = max(float(abs(ia1[:n] - ia / 2).max()), abs(ia1[n] - (1 - cube.mean(A))))
        checks.append(verify.CheckResult("or_extension_influences", gap <= 1e-12,
                                         None if gap <= 1e-12 else {"n": n, "a": args.a},
                                         details={"gap": gap}))
        Ad = cube.dual(A)
        info["ratio_similar_A_dualA"] = bounds._ratio(cube.covariance(A, Ad), bounds.rhs_similar(A, Ad))
    elif name == "example32":
        _need(args, "n", "a")
        f, g, info = families.example32(n, args.a, max_total=_cap(args))
    elif name == "example54":
        _need(args, "n", "a")
        _check_n(n, args)
        f1, f2, info = families.example54(n, args.a)
        f, g = cube.to_indicator(f1), cube.to_indicator(f2)
        # f2 <= f1 pointwise gives Cov = mu(f2)(1 - mu(f1))
        expect = cube.mean(g) * (1 - cube.mean(f))
        cov = cube.covariance(f, g)
        ok = bool((g.values <= f.values).all()) and abs(cov - expect) <= 1e-12
        checks.append(verify.CheckResult("nested_cov", ok, None if ok else {"n": n, "a": args.a},
                                         details={"cov": cov, "expected": expect}))
    elif name == "cormaj":
        _need(args, "n")
        _check_n(n + (n % 2 == 0), args)
        r = args.r if args.r is not None else (4 if n % 4 == 0 else families.suggest_tribe_width(n))
        A = families.tribes(n, r)
        f = families.pad(A, 1) if n % 2 == 0 else A
        g = families.majority(f.n)
        info = {"r": r, "cormaj_score": verify.cormaj_score(A), "balance_deviation": cube.mean(A) - 0.5}
    else:
        raise UsageError(f"unknown pair name {name!r}; choose from {', '.join(PAIR_NAMES)}")
    for a, b in ((f, g),):
        if cube.is_monotone(a) and cube.is_monotone(b):
            checks.append(verify.check_harris(a, b))
            checks.append(verify.check_comparison(a, b))
    return f, g, checks, info


def cmd_pair(args) -> int:
    f, g, checks, info = build_pair(args)
    rep = bounds.bound_report(f, g)
    _emit_report(rep, args, {"name": args.name, "info": info,
                             "checks": [c.to_dict() for c in checks]})
    return 0 if all(c.passed for c in checks) else 1


SUMMARY_COLUMNS = ("check", "total", "passed", "failed")


def _summary(results) -> list:
    counts = {}
    for r in results:
        base = r.name.split("[")[0]
        tot, ok = counts.get(base, (0, 0))
        counts[base] = (tot + 1, ok + int(r.passed))
    return [(k, t, p, t - p) for k, (t, p) in sorted(counts.items())]


def cmd_verify(args) -> int:
    n_max = args.n_max if args.n_max is not None else 10
    _check_n(n_max, args)
    results = list(verify.property_suite(seed=args.seed, n_max=n_max, pairs=args.pairs))
    summary = _csv(_summary(results), SUMMARY_COLUMNS, f"{FORMAT_VERSION}/verify-summary")
    if args.format == "csv":
        _emit(summary, args)
    else:
        _emit("".join(r.to_json() + "\n" for r in results), args)
        if args.out:
            with open(args.out + ".summary.csv", "w") as fh:
                fh.write(summary)
    return 0 if all(r.passed for r in results) else 1


def cmd_scan(args) -> int:
    if args.spec:
        if len(args.spec) != 1:
            raise UsageError("scan takes one generator --spec")
        gen = json.loads(args.spec[0])
    else:
        gen = {"kind": "random_monotone", "n": args.n or 8}
    _check_n(_spec_dimension(gen, _cap(args)), args)
    target = args.name or "wrong2"
    if target not in verify.SCAN_TARGETS:
        raise UsageError(f"unknown scan target {target!r}; choose from {', '.join(verify.SCAN_TARGETS)}")
    res = verify.scan(gen, target, args.budget, args.seed)
    if args.format == "csv":
        row = [res.name, res.passed, res.implied_constant, json.dumps(res.witness, sort_keys=True)]
        _emit(_csv([row], ("name", "passed", "value", "witness"), f"{FORMAT_VERSION}/scan"), args)
    else:
        _emit(_dumps({"format": FORMAT_VERSION, "result": res.to_dict()}), args)
    return 0 if res.passed else 1


# -- parser -----------------------------------------------------------------

SPEC_HELP = ("family spec as JSON, e.g. '{\"kind\":\"majority\",\"n\":3}'. Kinds and fields: "
             "hamming_ball{n,t|a} tribes{n,r} majority{n} dictator{n,i} ltf{weights,theta} "
             "compose{outer,inners} dual_of{of} example31/32/54{n,a,part:f|g} "
             "random_monotone{n,seed,k} parity{n}. Bit i-1 of a point mask holds x_i.")


def make_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="monocorr", description=__doc__,
                                formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--format", choices=("json", "csv"), default="json")
        sp.add_argument("--out", help="write output here instead of stdout")
        sp.add_argument("--allow-large", action="store_true",
                        help="acknowledge memory use and raise the n cap from 20 to 24")
        sp.add_argument("--seed", type=int, default=7)
        return sp

    def inputs(sp):
        sp.add_argument("--spec", action="append", help=SPEC_HELP)
        sp.add_argument("--table", action="append",
                        help='JSON table file: {"n","kind","table"} or {"n","family"}')

    inputs(common(sub.add_parser("analyze", help="moments, influences, level weights, NS grid")))
    inputs(common(sub.add_parser("bounds", help="bound report for two functions")))
    sp = common(sub.add_parser("pair", help="named built-in pair with report and checks"))
    sp.add_argument("--name", required=True, choices=PAIR_NAMES)
    sp.add_argument("--n", type=int)
    sp.add_argument("--a", type=float)
    sp.add_argument("--r", type=int)
    sp = common(sub.add_parser("verify", help="property suite; exit 0 when all pass"))
    sp.add_argument("--n-max", type=int, default=10)
    sp.add_argument("--pairs", type=int, default=500, help="random pairs per n")
    sp = common(sub.add_parser("scan", help="seeded search for extremal instances"))
    sp.add_argument("--spec", action="append", help="generator spec (random_monotone)")
    sp.add_argument("--name", help=f"target: {', '.join(verify.SCAN_TARGETS)}")
    sp.add_argument("--n", type=int)
    sp.add_argument("--budget", type=int, default=200)
    return p


COMMANDS = {"analyze": cmd_analyze, "bounds": cmd_bounds, "pair": cmd_pair,
            "verify": cmd_verify, "scan": cmd_scan}


def main(argv=None) -> int:
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 2 if e.code else 0
    try:
        return COMMANDS[args.command](args)
    except (UsageError, cube.CubeError, bounds.DomainError, verify.PreconditionError,
            ValueError, OSError, KeyError) as e:
        err = {"error": type(e).__name__, "message": str(e), "format": FORMAT_VERSION}
        sys.stderr.write(json.dumps(err, sort_keys=True) + "\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
