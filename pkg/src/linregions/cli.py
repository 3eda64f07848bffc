"""Command-line front end.

Exit codes: 0 success, 1 user error (flags, files, preconditions),
2 internal error or verification failure, 3 region cap / size guard hit.
``--json`` switches stdout to a machine-readable document.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import bounds as B
from . import constructions, counter, milp, render
from .network import Box, NetworkFormatError, Unrestricted, read_network, write_network


class UserError(ValueError):
    pass


def _parse_ints(text):
    try:
        return tuple(int(part) for part in text.split(","))
    except ValueError as exc:
        raise UserError(f"expected comma-separated integers, got {text!r}") from exc


def _domain_from_args(args, dim):
    chosen = [
        name
        for name, val in (
            ("--box", args.box),
            ("--bounds-file", args.bounds_file),
            ("--unrestricted", args.unrestricted),
        )
        if val
    ]
    if len(chosen) != 1:
        raise UserError("choose exactly one of --box, --bounds-file, --unrestricted")
    if args.unrestricted:
        return Unrestricted()
    if args.box:
        parts = args.box.split(",")
        if len(parts) != 2:
            raise UserError("--box expects LO,HI")
        try:
            lo, hi = float(parts[0]), float(parts[1])
        except ValueError as exc:
            raise UserError("--box expects numbers LO,HI") from exc
        return Box.uniform(lo, hi, dim)
    with open(args.bounds_file, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    try:
        return Box(np.asarray(doc["lower"], float), np.asarray(doc["upper"], float))
    except (KeyError, TypeError, ValueError) as exc:
        raise UserError(f"--bounds-file: {exc}") from exc


def _emit(args, payload, human_lines):
    if args.json:
        print(json.dumps(payload, indent=1))
    else:
        for line in human_lines:
            print(line)


def cmd_bounds(args):
    widths = _parse_ints(args.widths)
    if args.include_output_layer and not args.output:
        raise UserError("--include-output-layer requires --output")
    effective = widths + ((args.output,) if args.include_output_layer and args.output else ())
    caps = _parse_ints(args.rank_caps) if args.rank_caps else None
    if caps is not None and len(caps) != len(effective):
        raise UserError("--rank-caps length must match the effective width list")
    config = B.NetConfig(args.n0, effective, rank_caps=caps)
    values = {
        "relu_upper_thm1": B.relu_upper_thm1(config),
        "montufar2017_upper": B.montufar2017_upper(config),
        "naive_upper": B.naive_upper(config),
    }
    try:
        values["thm3_lower"] = B.thm3_lower(config)
    except ValueError:
        values["thm3_lower"] = None
    try:
        values["montufar2014_lower"] = B.montufar2014_lower(config)
    except ValueError:
        values["montufar2014_lower"] = None
    values["arora_lower"] = None
    if len(effective) >= 1 and effective[0] % 2 == 0:
        rest = effective[1:]
        if (not rest or len(set(rest)) == 1) and (not rest or rest[0] >= 2):
            m = effective[0] // 2
            w = rest[0] if rest else 2
            if m >= 1:
                values["arora_lower"] = B.arora_lower(args.n0, m, w, len(effective))
    if args.maxout_rank:
        mconfig = B.NetConfig(args.n0, effective, maxout_rank=args.maxout_rank)
        values["maxout_upper_thm5"] = B.maxout_upper_thm5(mconfig)
    payload = {
        "n0": args.n0,
        "widths": list(widths),
        "effective_widths": list(effective),
        "bounds": values,
    }
    lines = [f"configuration: n0={args.n0} widths={list(effective)}"]
    for name, value in values.items():
        lines.append(f"{name}: {value if value is not None else 'n/a'}")
    _emit(args, payload, lines)
    return 0


def _counter_options(args, domain):
    return counter.CounterOptions(
        domain=domain,
        epsilon=args.epsilon,
        region_cap=args.cap,
        collect_witnesses=args.witnesses,
        workers=args.workers,
    )


def cmd_count(args):
    net = read_network(args.network)
    domain = _domain_from_args(args, net.input_dim)
    options = _counter_options(args, domain)
    capped = False
    try:
        if net.is_relu:
            result = counter.count_regions_relu(net, options)
        else:
            result = counter.count_regions_maxout(net, options)
    except counter.RegionCapExceeded as exc:
        result = exc.result
        capped = True
    payload = result.to_json()
    payload["network"] = args.network
    lines = [
        f"regions: {result.count}" + (" (capped)" if capped else ""),
        f"nodes explored: {result.nodes}  pruned: {result.pruned}",
        f"wall time: {result.seconds:.3f}s",
    ]
    _emit(args, payload, lines)
    return 3 if capped else 0


def cmd_construct(args):
    if args.kind == "zigzag":
        if args.n is None:
            raise UserError("zigzag needs --n")
        spec = constructions.zigzag_layer(args.n)
        net = spec.to_network()
        predicted = args.n + 1
        relation = "exact"
    elif args.kind == "deep1d":
        if not args.widths:
            raise UserError("deep1d needs --widths")
        widths = _parse_ints(args.widths)
        net = constructions.deep_1d(widths)
        predicted = constructions.predicted_deep_1d_count(widths)
        relation = "exact"
    elif args.kind == "multidim":
        if not args.widths or args.n0 is None:
            raise UserError("multidim needs --n0 and --widths")
        if args.seed is None:
            raise UserError("multidim needs --seed (randomized command)")
        widths = _parse_ints(args.widths)
        net = constructions.multi_dim(args.n0, widths, args.seed)
        if len(widths) == 1:
            predicted = B.zaslavsky(widths[0], args.n0)
            relation = "exact"
        else:
            predicted = B.thm3_lower(B.NetConfig(args.n0, widths))
            relation = "at_least"
    else:  # pragma: no cover - argparse restricts choices
        raise UserError(f"unknown construction {args.kind}")
    write_network(net, args.out)
    payload = {
        "kind": args.kind,
        "path": args.out,
        "predicted": predicted,
        "relation": relation,
    }
    sym = "=" if relation == "exact" else ">="
    _emit(args, payload, [f"wrote {args.out}", f"predicted count {sym} {predicted}"])
    return 0


def cmd_export_milp(args):
    net = read_network(args.network)
    if args.unrestricted:
        raise UserError("MILP export needs a bounded domain")
    domain = _domain_from_args(args, net.input_dim)
    if not isinstance(domain, Box):
        raise UserError("MILP export needs a bounded domain")
    model = milp.write_milp(net, domain, args.out)
    payload = {
        "path": args.out,
        "rows": len(model.rows),
        "binaries": len(model.binaries),
    }
    lines = [f"wrote {args.out}", f"rows: {len(model.rows)} binaries: {len(model.binaries)}"]
    if args.big_m_report:
        report = {
            "H": [list(map(float, h)) for h in model.big_m.high],
            "Hbar": [list(map(float, h)) for h in model.big_m.high_bar],
        }
        payload["big_m"] = report
        for l, (h, hb) in enumerate(zip(model.big_m.high, model.big_m.high_bar), 1):
            lines.append(f"layer {l}: H={list(map(float, h))} Hbar={list(map(float, hb))}")
    _emit(args, payload, lines)
    return 0


def cmd_render(args):
    net = read_network(args.network)
    if net.input_dim != 2:
        raise UserError("rendering requires a 2-input network")
    domain = _domain_from_args(args, 2)
    if not isinstance(domain, Box):
        raise UserError("rendering requires a box domain")
    options = counter.CounterOptions(
        domain=domain,
        epsilon=args.epsilon,
        collect_witnesses=True,
        workers=args.workers,
    )
    result = counter.count_regions(net, options)
    svg, polygons = render.render_svg(net, domain, result.witnesses)
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(svg)
    payload = {"path": args.out, "count": result.count, "polygons": polygons}
    _emit(args, payload, [f"wrote {args.out}", f"regions: {result.count} polygons: {polygons}"])
    return 0


def _suite_bounds(seeds):
    rng = np.random.default_rng(20240901)
    for _ in range(seeds):
        n0 = int(rng.integers(1, 1001))
        L = int(rng.integers(1, 6))
        widths = tuple(int(w) for w in rng.integers(1, 31, size=L))
        config = B.NetConfig(n0, widths)
        t1 = B.relu_upper_thm1(config)
        m17 = B.montufar2017_upper(config)
        nv = B.naive_upper(config)
        if not t1 <= m17 <= nv:
            return False, f"dominance chain broken at n0={n0} widths={widths}"
    if B.relu_upper_thm1(B.NetConfig(4, (3, 2, 1))) != 47:
        return False, "expected 47 for n0=4 widths=(3,2,1)"
    if B.relu_upper_thm1(B.NetConfig(4, (4, 1, 1))) != 46:
        return False, "expected 46 for n0=4 widths=(4,1,1)"
    for _ in range(seeds):
        n1 = int(rng.integers(1, 12))
        n2 = int(rng.integers(1, 12))
        n0 = max(n1, n2) + int(rng.integers(1, 5))
        hi = B.relu_upper_thm1(B.NetConfig(n0, (n1 + 1, n2)))
        lo = B.relu_upper_thm1(B.NetConfig(n0, (n1, n2 + 1)))
        if not hi > lo:
            return False, f"bottleneck inequality failed at {(n0, n1, n2)}"
    return True, f"{2 * seeds + 2} checks"


def _suite_oracle(seeds):
    rng = np.random.default_rng(7)
    from .network import Network, ReluLayer

    for s in range(seeds):
        n0 = int(rng.integers(1, 4))
        L = int(rng.integers(1, 4))
        widths = [int(w) for w in rng.integers(1, 5, size=L)]
        while sum(widths) > 10:
            widths[int(rng.integers(0, L))] -= 1
            widths = [max(1, w) for w in widths]
        layers = []
        fan = n0
        for w in widths:
            layers.append(ReluLayer(rng.normal(size=(w, fan)), rng.normal(size=w)))
            fan = w
        net = Network(n0, tuple(layers))
        domain = Box.uniform(-8.0, 8.0, n0)
        options = counter.CounterOptions(domain=domain)
        a = counter.count_regions_relu(net, options).count
        b = counter.brute_force_count(net, options).count
        if a != b:
            return False, f"seed {s}: tree={a} brute={b}"
    return True, f"{seeds} instances"


def _suite_constructions(_seeds):
    for n in (3, 4, 5):
        net = constructions.zigzag_layer(n).to_network()
        options = counter.CounterOptions(domain=Box.uniform(0.0, 1.0, 1))
        got = counter.count_regions_relu(net, options).count
        if got != n + 1:
            return False, f"zigzag({n}) counted {got}, expected {n + 1}"
    for widths in ((3, 3), (3, 4)):
        net = constructions.deep_1d(widths)
        options = counter.CounterOptions(domain=Box.uniform(0.0, 1.0, 1))
        got = counter.count_regions_relu(net, options).count
        want = constructions.predicted_deep_1d_count(widths)
        if got != want:
            return False, f"deep_1d{widths} counted {got}, expected {want}"
    net = constructions.multi_dim(2, (6,), seed=7)
    options = counter.CounterOptions(domain=Box.uniform(0.0, 1.0, 2))
    got = counter.count_regions_relu(net, options).count
    want = B.zaslavsky(6, 2)
    if got != want:
        return False, f"multi_dim(2,(6,)) counted {got}, expected {want}"
    return True, "zigzag/deep1d/multidim counts"


def cmd_verify(args):
    suites = {
        "bounds": _suite_bounds,
        "oracle": _suite_oracle,
        "constructions": _suite_constructions,
    }
    selected = list(suites) if args.suite == "all" else [args.suite]
    report = []
    ok = True
    for name in selected:
        passed, detail = suites[name](args.seeds)
        ok = ok and passed
        report.append({"name": name, "passed": passed, "detail": detail})
    lines = [
        f"{r['name']}: {'pass' if r['passed'] else 'FAIL'} ({r['detail']})"
        for r in report
    ]
    _emit(args, {"suites": report, "passed": ok}, lines)
    return 0 if ok else 2


def build_parser():
    parser = argparse.ArgumentParser(
        prog="linregions",
        description="Bounds, constructions, and exact counting of linear regions "
        "of ReLU/maxout networks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("bounds", help="evaluate all applicable region bounds")
    p.add_argument("--n0", type=int, required=True)
    p.add_argument("--widths", required=True, help="comma-separated hidden widths")
    p.add_argument("--output", type=int, default=None, help="output layer width")
    p.add_argument(
        "--include-output-layer",
        action="store_true",
        help="treat the output width as one more bounded layer",
    )
    p.add_argument("--rank-caps", default=None, help="per-layer weight rank caps")
    p.add_argument("--maxout-rank", type=int, default=None)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("count", help="exactly count regions of a network file")
    p.add_argument("network")
    p.add_argument("--box", default=None, help="uniform bounds LO,HI")
    p.add_argument("--bounds-file", default=None, help="JSON {lower: [...], upper: [...]}")
    p.add_argument("--unrestricted", action="store_true")
    p.add_argument("--epsilon", type=float, default=counter.DEFAULT_EPSILON)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--cap", type=int, default=counter.DEFAULT_REGION_CAP)
    p.add_argument("--witnesses", action="store_true")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_count)

    p = sub.add_parser("construct", help="build an extremal network")
    p.add_argument("kind", choices=["zigzag", "deep1d", "multidim"])
    p.add_argument("--n", type=int, default=None, help="zigzag unit count")
    p.add_argument("--n0", type=int, default=None)
    p.add_argument("--widths", default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", required=True)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("export-milp", help="write the counting model in LP format")
    p.add_argument("network")
    p.add_argument("--box", default=None)
    p.add_argument("--bounds-file", default=None)
    p.add_argument("--unrestricted", action="store_true")
    p.add_argument("--out", required=True)
    p.add_argument("--big-m-report", action="store_true")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_export_milp)

    p = sub.add_parser("render", help="SVG of a 2D partition")
    p.add_argument("network")
    p.add_argument("--box", default=None)
    p.add_argument("--bounds-file", default=None)
    p.add_argument("--unrestricted", action="store_true")
    p.add_argument("--epsilon", type=float, default=counter.DEFAULT_EPSILON)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", required=True)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("verify", help="run the built-in invariant suites")
    p.add_argument(
        "--suite", choices=["bounds", "oracle", "constructions", "all"], default="all"
    )
    p.add_argument("--seeds", type=int, default=25)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_verify)
    return parser


def _normalize_argv(argv):
    """Join values that start with '-' onto their flag so argparse accepts
    negative box bounds like `--box -50,50`."""
    joined = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        if tok == "--box" and i + 1 < len(argv) and argv[i + 1].startswith("-"):
            joined.append(tok + "=" + argv[i + 1])
            i += 2
            continue
        joined.append(tok)
        i += 1
    return joined


def main(argv=None):
    parser = build_parser()
    if argv is None:
        argv = sys.argv[1:]
    try:
        args = parser.parse_args(_normalize_argv(list(argv)))
    except SystemExit as exc:
        # argparse exits 2 on bad flags; that is a user error here
        return 0 if exc.code == 0 else 1
    try:
        return args.func(args)
    except (UserError, NetworkFormatError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (counter.RegionCapExceeded, counter.GuardExceeded) as exc:
        print(f"stopped: {exc}", file=sys.stderr)
        return 3
    except Exception as exc:  # pragma: no cover - defensive
        print(f"internal error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
