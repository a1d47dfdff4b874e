"""Command-line interface: dataset generation, solvers, coresets,
composition pipelines, brute-force evaluation, and verification suites.

Every command emits a JSON report carrying a schema version, a full echo
of the flags it ran with, and wall-clock timings. Reports are byte-stable
across reruns with identical flags except for the timing fields, which
`canonicalize_report` blanks for golden-file comparison.

Exit codes: 0 on success, 1 on bad input or an unmet precondition, 2 when
an internal invariant (including a verification suite check) fails.
"""
from __future__ import annotations

import argparse
import copy
import json
import math
import sys
import time
from pathlib import Path

from . import __version__
from .composition import ENUMERATION_CAP, brute_force_diversity, run_pipeline
from .coresets import mwm_coreset, pf_coreset
from .costs import matching_value, mst_component_sum, mst_cost
from .errors import InternalInvariantError, PreconditionError
from .generators import KINDS, make_clusters, make_grid, make_line, make_uniform_cube
from .hst import embed_subset, hst_distance, hst_distance_matrix, hst_mwm_odd_count, verify_random_subset_bound
from .matching import mwm_offline
from .metric import Objective, PointSet, RunConfig, dump_pointset, load_pointset
from .nets import build_net_tree, pf_offline, rescale_and_clamp
from .rng import START_POINT_STREAM, stream_rng

SCHEMA_VERSION = 1
TIMING_KEYS = ("timings", "elapsed", "elapsed_seconds")


class _Parser(argparse.ArgumentParser):
    """argparse that maps usage errors to exit code 1 on stderr."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def canonicalize_report(report: dict) -> dict:
    """Blank every timing field so reports can be compared byte-for-byte."""
    out = copy.deepcopy(report)

    def scrub(node):
        if isinstance(node, dict):
            for key in list(node):
                if key in TIMING_KEYS:
                    node[key] = None
                else:
                    scrub(node[key])
        elif isinstance(node, list):
            for item in node:
                scrub(item)

    scrub(out)
    return out


REPORT_SCHEMA = {
    "schema_version": SCHEMA_VERSION,
    "common_fields": {
        "schema_version": "int",
        "command": "gen|solve|coreset|compose|eval|verify",
        "flags": "object: full echo of the parsed flags",
        "timings": {"total_seconds": "float (blanked by canonicalization)"},
    },
    "solve": {
        "objective": "matching|pseudoforest",
        "k": "int",
        "value": "float",
        "bound_kind": "exact",
        "indices": "[int]",
        "algorithm": "string",
        "seed": "int",
        "trace": "object (matching: chosen/z_subset/w_set; pseudoforest: tree depth)",
    },
    "coreset": {
        "part": "int",
        "k": "int",
        "objective": "matching|pseudoforest",
        "indices": "[int]",
        "passthrough": "bool",
        "blocks": "{P|S|T|U|Y|pairs: [int]}",
    },
    "compose": {
        "objective": "matching|pseudoforest",
        "k": "int",
        "m": "int",
        "epsilon": "float",
        "coreset_sizes": "[int]",
        "union_size": "int",
        "value_on_union": "float",
        "bound_kind": "exact|lower_bound",
        "lower_bound": "bool",
        "oracle_value": "float|null",
        "ratio": "float|null",
    },
    "eval": {"objective": "string", "k": "int", "value": "float", "indices": "[int]"},
    "verify": {"suite": "hst|mstcc|lemma42|all", "suites": "{name: {pass: bool, ...}}"},
}


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # usage errors (exit 1) and --help/--version (exit 0)
        return int(exc.code or 0)
    if getattr(args, "schema", False):
        print(json.dumps(REPORT_SCHEMA, indent=2, sort_keys=True))
        return 0
    if args.command is None:
        parser.print_help(sys.stderr)
        return 1
    try:
        return args.handler(args)
    except PreconditionError as exc:
        print(f"remote-div: error: {exc}", file=sys.stderr)
        return 1
    except InternalInvariantError as exc:
        print(f"remote-div: internal invariant violated: {exc}", file=sys.stderr)
        return 2


def _build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="remote-div", description=__doc__)
    parser.add_argument("--version", action="version", version=f"remote-div {__version__}")
    parser.add_argument("--schema", action="store_true", help="print the report JSON schema and exit")
    sub = parser.add_subparsers(dest="command")

    p = sub.add_parser("gen", parents=[], help="generate a dataset file")
    p.add_argument("--kind", required=True, choices=KINDS)
    p.add_argument("--n", required=True, type=int)
    p.add_argument("--dim", type=int, default=2)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--params", default="", help="kind-specific settings, e.g. 'c=2,sep=100,width=1'")
    _common_flags(p)
    p.set_defaults(handler=_cmd_gen)

    p = sub.add_parser("solve", help="run an offline diversity solver")
    p.add_argument("--objective", required=True, choices=[o.value for o in Objective])
    p.add_argument("--k", required=True, type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--repeats", type=int, default=20)
    p.add_argument("--algorithm", default=None, help="matching: random-fill (default); pseudoforest: nets")
    p.add_argument("--gmm-start", default="0", help="start index for the farthest-point traversal, or 'random'")
    p.add_argument("--net-root", type=int, default=0, help="root point of the net hierarchy (pseudoforest)")
    p.add_argument("--dump-net-tree", default=None, help="write the net tree as JSON to this path")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--input", required=True)
    p.add_argument("--input-format", default="json", choices=["json", "csv", "matrix-csv"])
    _common_flags(p)
    p.set_defaults(handler=_cmd_solve)

    p = sub.add_parser("coreset", help="build one part's composable coreset")
    p.add_argument("--objective", required=True, choices=[o.value for o in Objective])
    p.add_argument("--k", required=True, type=int)
    p.add_argument("--epsilon", type=float, default=1.0)
    p.add_argument("--part-id", type=int, default=0)
    p.add_argument("--gmm-start", default="0")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--input", required=True)
    p.add_argument("--input-format", default="json", choices=["json", "csv", "matrix-csv"])
    _common_flags(p)
    p.set_defaults(handler=_cmd_coreset)

    p = sub.add_parser("compose", help="split, build per-part coresets, solve on the union")
    p.add_argument("--objective", required=True, choices=[o.value for o in Objective])
    p.add_argument("--k", required=True, type=int)
    p.add_argument("--epsilon", type=float, default=1.0)
    p.add_argument("--parts", required=True, type=int)
    p.add_argument("--strategy", default="round_robin", choices=["round_robin", "random", "file"])
    p.add_argument("--parts-file", default=None, help="JSON list of index lists (strategy=file)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--oracle", action="store_true", help="also brute-force the full dataset")
    p.add_argument("--input", required=True)
    p.add_argument("--input-format", default="json", choices=["json", "csv", "matrix-csv"])
    _common_flags(p)
    p.set_defaults(handler=_cmd_compose)

    p = sub.add_parser("eval", help="brute-force the exact optimum")
    p.add_argument("--objective", required=True, choices=[o.value for o in Objective])
    p.add_argument("--k", required=True, type=int)
    p.add_argument("--input", required=True)
    p.add_argument("--input-format", default="json", choices=["json", "csv", "matrix-csv"])
    _common_flags(p)
    p.set_defaults(handler=_cmd_eval)

    p = sub.add_parser("verify", help="run a structural verification suite")
    p.add_argument("--suite", required=True, choices=["hst", "mstcc", "lemma42", "all"])
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=200)
    _common_flags(p)
    p.set_defaults(handler=_cmd_verify)

    return parser


def _common_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--output", default=None, help="report path; stdout when omitted")
    p.add_argument("--format", default="json", choices=["json"])


def _emit(args, payload: dict, started: float) -> int:
    flags = {
        key: value
        for key, value in sorted(vars(args).items())
        if key not in ("handler", "schema") and not callable(value)
    }
    report = {
        "schema_version": SCHEMA_VERSION,
        "command": args.command,
        "flags": flags,
        **payload,
        "timings": {"total_seconds": time.perf_counter() - started},
    }
    text = json.dumps(report, indent=2, sort_keys=True)
    if args.output:
        Path(args.output).write_text(text + "\n")
    else:
        print(text)
    return 0


def _read_pointset(args) -> PointSet:
    path = Path(args.input)
    if not path.exists():
        raise PreconditionError(f"input file not found: {path}")
    return load_pointset(path.read_text(), args.input_format)


def _parse_params(raw: str) -> dict[str, float]:
    params: dict[str, float] = {}
    if not raw.strip():
        return params
    for item in raw.split(","):
        item = item.strip()
        if not item:
            continue
        if "=" in item:
            key, _, value = item.partition("=")
            try:
                params[key.strip()] = float(value)
            except ValueError as exc:
                raise PreconditionError(f"bad parameter {item!r}: {exc}") from exc
        else:
            try:
                params.setdefault("values", []).append(float(item))  # type: ignore[union-attr]
            except ValueError as exc:
                raise PreconditionError(f"bad parameter {item!r}: {exc}") from exc
    return params


def _resolve_start(raw: str, n: int, seed: int) -> int:
    if raw == "random":
        return int(stream_rng(seed, START_POINT_STREAM).integers(n))
    try:
        start = int(raw)
    except ValueError as exc:
        raise PreconditionError(f"--gmm-start must be an index or 'random'; got {raw!r}") from exc
    return start


def _cmd_gen(args) -> int:
    params = _parse_params(args.params)
    if args.kind == "uniform_cube":
        ps = make_uniform_cube(args.n, args.dim, args.seed)
    elif args.kind == "clusters":
        ps = make_clusters(
            args.n,
            args.dim,
            args.seed,
            clusters=int(params.get("c", 2)),
            separation=float(params.get("sep", 100.0)),
            width=float(params.get("width", 1.0)),
        )
    elif args.kind == "grid":
        ps = make_grid(args.n, args.dim, spacing=float(params.get("spacing", 1.0)))
    else:
        values = params.get("values")
        ps = make_line(args.n, values if values is None else list(values))
    document = dump_pointset(ps, "json")
    if args.output:
        Path(args.output).write_text(document + "\n")
        return 0
    print(document)
    return 0


def _cmd_solve(args) -> int:
    started = time.perf_counter()
    ps = _read_pointset(args)
    objective = Objective.parse(args.objective)
    if objective is Objective.REMOTE_MATCHING:
        algorithm = args.algorithm or "random-fill"
        if algorithm != "random-fill":
            raise PreconditionError(f"unknown matching algorithm {algorithm!r}")
        if args.k % 2 != 0:
            raise PreconditionError(f"remote-matching needs an even k; got k={args.k}")
        cfg = RunConfig(k=args.k, seed=args.seed, repeats=args.repeats, objective=objective)
        start = _resolve_start(args.gmm_start, ps.n, args.seed)
        solution, trace = mwm_offline(ps, args.k, cfg, gmm_start=start, threads=args.threads)
        trace_payload = {
            "chosen": trace.chosen,
            "trial": trace.trial,
            "z_subset": trace.z_subset,
            "w_set": trace.w_set,
            "gmm_centers": trace.gmm.centers,
            "gmm_radius": trace.gmm.radius,
        }
    else:
        algorithm = args.algorithm or "nets"
        if algorithm != "nets":
            raise PreconditionError(f"unknown pseudoforest algorithm {algorithm!r}")
        solution = pf_offline(ps, args.k, root=args.net_root)
        trace_payload = {}
        if args.dump_net_tree:
            metric, _scale = rescale_and_clamp(ps, args.k)
            tree = build_net_tree(metric, root=args.net_root)
            Path(args.dump_net_tree).write_text(tree.to_json() + "\n")
            trace_payload["net_tree_depth"] = tree.depth
    payload = {
        "objective": objective.value,
        "k": args.k,
        "value": solution.value,
        "bound_kind": "exact",
        "indices": solution.indices,
        "algorithm": solution.algorithm,
        "seed": args.seed,
        "trace": trace_payload,
    }
    return _emit(args, payload, started)


def _cmd_coreset(args) -> int:
    started = time.perf_counter()
    ps = _read_pointset(args)
    objective = Objective.parse(args.objective)
    start = _resolve_start(args.gmm_start, ps.n, args.seed)
    if objective is Objective.REMOTE_MATCHING:
        core = mwm_coreset(ps, args.k, gmm_start=start, part_id=args.part_id)
    else:
        core = pf_coreset(ps, args.k, args.epsilon, gmm_start=start, part_id=args.part_id)
    return _emit(args, core.to_dict(), started)


def _cmd_compose(args) -> int:
    started = time.perf_counter()
    ps = _read_pointset(args)
    objective = Objective.parse(args.objective)
    parts = None
    if args.strategy == "file":
        if not args.parts_file:
            raise PreconditionError("--strategy file needs --parts-file")
        parts = json.loads(Path(args.parts_file).read_text())
    cfg = RunConfig(k=args.k, epsilon=args.epsilon, seed=args.seed, objective=objective)
    report = run_pipeline(ps, cfg, args.parts, args.strategy, with_oracle=args.oracle, parts=parts)
    return _emit(args, report.to_dict(), started)


def _cmd_eval(args) -> int:
    started = time.perf_counter()
    ps = _read_pointset(args)
    objective = Objective.parse(args.objective)
    solution = brute_force_diversity(ps, args.k, objective)
    payload = {
        "objective": objective.value,
        "k": args.k,
        "value": solution.value,
        "indices": solution.indices,
        "enumeration_cap": ENUMERATION_CAP,
    }
    return _emit(args, payload, started)


# ---------------------------------------------------------------------------
# Verification suites
# ---------------------------------------------------------------------------

def _suite_hst(seed: int, trials: int) -> dict:
    worst_stretch = 0.0
    max_identity_gap = 0.0
    checked_pairs = 0
    checked_sets = 0
    for i in range(trials):
        rng = stream_rng(seed, i)
        n = int(rng.integers(4, 13))
        ps = PointSet.from_coords(rng.random((n, 2)))
        hst, scaled = embed_subset(ps, range(n), d=40)
        dmat = scaled.distance_matrix()
        for a in range(n):
            for b in range(a + 1, n):
                dt = hst_distance(hst, a, b)
                if dmat[a, b] > 0:
                    worst_stretch = max(worst_stretch, dt / dmat[a, b])
                checked_pairs += 1
        hmat = hst_distance_matrix(hst)
        size = min(n - n % 2, 8)
        members = sorted(int(v) for v in rng.choice(n, size=size, replace=False))
        formula = hst_mwm_odd_count(hst, members)
        sub = [[float(hmat[a, b]) for b in members] for a in members]
        exact = matching_value(sub)
        max_identity_gap = max(max_identity_gap, abs(formula - exact))
        checked_sets += 1
    return {
        "trials": trials,
        "checked_pairs": checked_pairs,
        "checked_sets": checked_sets,
        "worst_stretch": worst_stretch,
        "stretch_bound": 4.0,
        "max_identity_gap": max_identity_gap,
        "pass": bool(worst_stretch <= 4.0 + 1e-9 and max_identity_gap <= 1e-9),
    }


def _suite_mstcc(seed: int, trials: int) -> dict:
    low = math.inf
    high = 0.0
    for i in range(trials):
        rng = stream_rng(seed, i)
        n = int(rng.integers(2, 13))
        ps = PointSet.from_coords(rng.random((n, 2)))
        subset = list(range(n))
        total = mst_component_sum(ps, subset)
        mst = mst_cost(ps, subset, with_witness=False).value
        ratio = mst / total
        low = min(low, ratio)
        high = max(high, ratio)
    ok = low >= 0.5 - 1e-9 and high <= 1.0 + 1e-9
    return {"trials": trials, "min_ratio": low, "max_ratio": high, "pass": bool(ok)}


def _suite_lemma42(seed: int, trials: int, draws: int = 2000) -> dict:
    worst_margin = math.inf
    min_ratio = math.inf
    for i in range(trials):
        rng = stream_rng(seed, i)
        size = int(rng.integers(2, 11))
        ps = PointSet.from_coords(rng.random((size, 2)))
        stats = verify_random_subset_bound(ps, range(size), draws, seed=seed + i + 1)
        margin = stats.sample_mean - (stats.best_even_value / 16.0 - 3.0 * stats.std_error)
        worst_margin = min(worst_margin, margin)
        min_ratio = min(min_ratio, stats.ratio)
    return {
        "trials": trials,
        "draws": draws,
        "worst_margin": worst_margin,
        "min_ratio": min_ratio,
        "pass": bool(worst_margin >= 0.0),
    }


def _cmd_verify(args) -> int:
    started = time.perf_counter()
    if args.trials < 1:
        raise PreconditionError("--trials must be positive")
    suites = {}
    if args.suite in ("hst", "all"):
        suites["hst"] = _suite_hst(args.seed, args.trials)
    if args.suite in ("mstcc", "all"):
        suites["mstcc"] = _suite_mstcc(args.seed, args.trials)
    if args.suite in ("lemma42", "all"):
        suites["lemma42"] = _suite_lemma42(args.seed, min(args.trials, 200))
    all_pass = all(s["pass"] for s in suites.values())
    payload = {"suite": args.suite, "suites": suites, "pass": all_pass}
    code = _emit(args, payload, started)
    if code == 0 and not all_pass:
        print("remote-div: verification suite failed", file=sys.stderr)
        return 2
    return code


if __name__ == "__main__":
    sys.exit(main())
