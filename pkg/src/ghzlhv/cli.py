"""Command-line interface.

One executable, five subcommands:

* ``classify``  -- verdicts for one signed Pauli product from the closed
  form, the tableau, and the hidden-variable table (exit 1 on disagreement).
* ``table``     -- print the LHV table for a circuit, optionally step by step.
* ``simulate``  -- run the correction protocol, exhaustively or sampled.
* ``verify``    -- exhaustive model-vs-oracle sweeps (exit 1 on mismatch).
* ``witness``   -- the too-little-communication contradiction report.

Exit codes: 0 success/consistent, 1 mismatch or failed consistency,
2 usage error.  Qubit indices are 1-based everywhere.  ``--format json``
emits the same facts as the text output; wall-clock timings go to stderr
so stdout is byte-reproducible from the printed config.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys

from . import __version__
from .circuits import CircuitParseError, Gate, ghz_circuit, read_circuit, check_indices
from .lhv import (
    CnotConsistencyError,
    LhvTable,
    apply_gate,
    format_entry,
    ghz_table,
    initial_table,
    predict_joint,
    sample_from_index,
)
from .optimality import (
    CommGraph,
    insufficiency_witness,
    operator_strings,
)
from .pauli import PauliParseError, format_pauli, parse_pauli
from .prediction import PredictionKind
from .protocol import run_protocol, run_subset_protocol, subset_settings
from .stabilizer import ghz_classify, ghz_tableau, joint_distribution
from .verify import (
    DEFAULT_CAP_CORRELATIONS,
    DEFAULT_CAP_PRODUCTS,
    DEFAULT_CAP_SUBSETS,
    sample_trials,
    settings_sweep,
    subset_outcome_distribution,
    verify_correlations,
    verify_products,
    verify_subsets,
)

_ENV_CAPS = {
    "products": "GHZLHV_CAP_PRODUCTS",
    "correlations": "GHZLHV_CAP_CORRELATIONS",
    "subsets": "GHZLHV_CAP_SUBSETS",
}
_DEFAULT_CAPS = {
    "products": DEFAULT_CAP_PRODUCTS,
    "correlations": DEFAULT_CAP_CORRELATIONS,
    "subsets": DEFAULT_CAP_SUBSETS,
}


def _cap_for(mode: str, override: int | None) -> int:
    if override is not None:
        return override
    return int(os.environ.get(_ENV_CAPS[mode], _DEFAULT_CAPS[mode]))


def _emit(payload: dict, fmt: str) -> None:
    if fmt == "json":
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        print(f"# command: {payload['command']}")
        config = " ".join(
            f"{key}={value}" for key, value in sorted(payload["config"].items())
        )
        print(f"# config: {config}")


def _table_json(t: LhvTable) -> dict:
    rows = []
    for q in range(1, t.n + 1):
        row = {"qubit": q}
        for basis in "xyz":
            e = t.entry(q, basis.upper())
            row[basis] = {
                "phase_exp": e.phase_exp,
                "r_mask": [b + 1 for b in range(t.n) if (e.r_mask >> b) & 1],
            }
        rows.append(row)
    return {"n": t.n, "rows": rows}


def _table_text(t: LhvTable) -> str:
    cells = [
        [format_entry(t.entry(q, basis)) for basis in "XYZ"]
        for q in range(1, t.n + 1)
    ]
    label_w = len(f"qubit {t.n}")
    widths = [
        max(len("XYZ"[c]), max(len(row[c]) for row in cells)) for c in range(3)
    ]
    lines = [
        " " * label_w
        + "  "
        + "  ".join("XYZ"[c].ljust(widths[c]) for c in range(3))
    ]
    for q, row in enumerate(cells, start=1):
        lines.append(
            f"qubit {q}".rjust(label_w)
            + "  "
            + "  ".join(row[c].ljust(widths[c]) for c in range(3))
        )
    return "\n".join(lines)


def cmd_classify(args) -> int:
    product = parse_pauli(args.pauli, args.n)
    closed = ghz_classify(product)
    tableau_kind = ghz_tableau(args.n).classify(product)
    model = predict_joint(ghz_table(args.n), product)
    agree = closed is tableau_kind is model.kind
    payload = {
        "command": "classify",
        "config": {"n": args.n, "pauli": args.pauli, "format": args.format},
        "product": format_pauli(product),
        "verdicts": {
            "closed_form": closed.value,
            "tableau": tableau_kind.value,
            "model": model.kind.value,
        },
        "model_detail": {
            "sign": model.sign,
            "r_vars": [
                b + 1 for b in range(args.n) if (model.r_mask >> b) & 1
            ],
        },
        "agree": agree,
    }
    _emit(payload, args.format)
    if args.format == "text":
        print(f"product: {payload['product']}")
        for name, verdict in payload["verdicts"].items():
            print(f"{name:>12}: {verdict}")
        detail = payload["model_detail"]
        if model.kind is PredictionKind.RANDOM:
            rv = "".join(f"R{j}" for j in detail["r_vars"])
            sign = "+" if detail["sign"] == 1 else "-"
            print(f"model outcome: {sign}{rv}")
        print(f"agreement: {'yes' if agree else 'NO'}")
    return 0 if agree else 1


def _gates_for_table(args) -> tuple[list[tuple[str, Gate | None]], int]:
    n = args.n
    if args.circuit:
        gates = read_circuit(args.circuit)
        check_indices(gates, n)
    else:
        gates = ghz_circuit(n)
    return [(str(g), g) for g in gates], n


def cmd_table(args) -> int:
    steps_spec, n = _gates_for_table(args)
    table = initial_table(n)
    steps = [("initial", table)]
    for index, (label, gate) in enumerate(steps_spec, start=1):
        try:
            table = apply_gate(table, gate)
        except CnotConsistencyError as exc:
            print(f"error: gate {index} ({label}): {exc}", file=sys.stderr)
            return 1
        steps.append((label, table))
    shown = steps if args.steps else steps[-1:]
    payload = {
        "command": "table",
        "config": {
            "n": n,
            "circuit": args.circuit or "(ghz)",
            "steps": args.steps,
            "format": args.format,
        },
        "steps": [
            {"label": label, "table": _table_json(t)} for label, t in shown
        ],
    }
    _emit(payload, args.format)
    if args.format == "text":
        for label, t in shown:
            if args.steps:
                print(f"-- {label}")
            print(_table_text(t))
            if args.steps:
                print()
    return 0


def _simulate_single(args, payload: dict) -> int:
    if args.exhaustive:
        sweep = settings_sweep(args.n, args.settings)
        payload.update(sweep)
        _emit(payload, args.format)
        if args.format == "text":
            print(f"bits communicated: {sweep['bits_communicated']}")
            print(f"subsets ({sweep['samples']} samples each):")
            width = max(len(r["product"]) for r in sweep["rows"])
            for row in sweep["rows"]:
                print(
                    f"  {row['product'].ljust(width)}  "
                    f"{row['classification']:<14}  "
                    f"+1 in {row['plus_count']}/{row['samples']}  "
                    f"{'ok' if row['consistent'] else 'MISMATCH'}"
                )
            print(f"result: {'PASS' if sweep['passed'] else 'FAIL'}")
        return 0 if sweep["passed"] else 1
    report = sample_trials(args.n, args.settings, args.trials, args.seed)
    payload.update(report.to_dict())
    if args.trace:
        payload["trace"] = _trace_single(args)
    _emit(payload, args.format)
    if args.format == "text":
        print(f"bits communicated: {report.bits_communicated}")
        print(
            f"targets ({report.trials} trials, seed {report.seed}, "
            f"{report.rng_algorithm}):"
        )
        width = max(len(t.product) for t in report.targets)
        for t in report.targets:
            verdict = {True: "ok", False: "MISMATCH", None: "-"}[t.consistent]
            print(
                f"  {t.product.ljust(width)}  {t.classification:<14}  "
                f"freq {t.frequency:.4f}  ci [{t.ci_low:.4f}, {t.ci_high:.4f}]  "
                f"{verdict}"
            )
        for line in _trace_lines(payload.get("trace", [])):
            print(line)
        print(f"result: {'PASS' if report.passed else 'FAIL'}")
    return 0 if report.passed else 1


def _trace_single(args) -> list[dict]:
    table = ghz_table(args.n)
    rng = random.Random(args.seed)
    out = []
    for _ in range(min(args.trace, args.trials)):
        sample = sample_from_index(args.n, rng.getrandbits(args.n))
        rec = run_protocol(table, args.settings.upper(), sample, trace=True)
        out.append(
            {
                "sample": list(rec.sample),
                "raw": {str(q): v for q, v in sorted(rec.raw_local.items())},
                "flip": rec.flip_applied,
                "corrected": {
                    str(q): v for q, v in sorted(rec.corrected_local.items())
                },
                "messages": [list(m) for m in rec.messages],
            }
        )
    return out


def _trace_lines(trace: list[dict]) -> list[str]:
    lines = []
    for i, t in enumerate(trace, start=1):
        sample = ",".join(f"{v:+d}" for v in t["sample"])
        corrected = " ".join(f"q{q}={v:+d}" for q, v in t["corrected"].items())
        msgs = " ".join(f"{q}->A:{b}" for q, b in t["messages"]) or "(none)"
        lines.append(
            f"  trial {i}: r=({sample}) flip={'y' if t['flip'] else 'n'} "
            f"{corrected} bits {msgs}"
        )
    return lines


def _simulate_subsets(args, payload: dict) -> int:
    ss = subset_settings(args.n, args.partition, args.products)
    table = ghz_table(args.n)
    oracle = joint_distribution(ghz_tableau(args.n), list(ss.products))
    bits = max(ss.l - 2, 0)
    payload["config"]["partition"] = args.partition
    payload["config"]["products"] = args.products
    payload["bits_communicated"] = bits
    if args.exhaustive:
        model = subset_outcome_distribution(table, ss)
        match = model == oracle
        payload.update(
            {
                "samples": 1 << args.n,
                "model_distribution": _dist_strs(model),
                "oracle_distribution": _dist_strs(oracle),
                "passed": match,
            }
        )
        _emit(payload, args.format)
        if args.format == "text":
            _print_subset_dists(payload)
        return 0 if match else 1
    rng = random.Random(args.seed)
    counts: dict[tuple[int, ...], int] = {}
    bad = 0
    for _ in range(args.trials):
        sample = sample_from_index(args.n, rng.getrandbits(args.n))
        rec = run_subset_protocol(table, ss, sample)
        counts[rec.corrected_outcomes] = counts.get(rec.corrected_outcomes, 0) + 1
        if oracle.get(rec.corrected_outcomes, 0) == 0:
            bad += 1
    payload.update(
        {
            "trials": args.trials,
            "seed": args.seed,
            "rng_algorithm": "mt19937",
            "empirical_counts": {
                ",".join(f"{v:+d}" for v in k): c for k, c in sorted(counts.items())
            },
            "oracle_distribution": _dist_strs(oracle),
            "outcomes_outside_oracle_support": bad,
            "passed": bad == 0,
        }
    )
    _emit(payload, args.format)
    if args.format == "text":
        print(f"bits communicated: {bits}")
        print(f"empirical counts over {args.trials} trials (seed {args.seed}):")
        for k, c in payload["empirical_counts"].items():
            print(f"  ({k}): {c}")
        print(f"outcomes outside oracle support: {bad}")
        print(f"result: {'PASS' if bad == 0 else 'FAIL'}")
    return 0 if bad == 0 else 1


def _dist_strs(dist) -> dict:
    return {
        ",".join(f"{v:+d}" for v in outcome): str(weight)
        for outcome, weight in sorted(dist.items())
    }


def _print_subset_dists(payload: dict) -> None:
    print(f"bits communicated: {payload['bits_communicated']}")
    print("per-set outcome distribution (model | oracle):")
    keys = sorted(
        set(payload["model_distribution"]) | set(payload["oracle_distribution"])
    )
    for key in keys:
        m = payload["model_distribution"].get(key, "0")
        o = payload["oracle_distribution"].get(key, "0")
        marker = "" if m == o else "   <- differs"
        print(f"  ({key}): {m} | {o}{marker}")
    print(f"result: {'PASS' if payload['passed'] else 'FAIL'}")


def cmd_simulate(args) -> int:
    payload = {
        "command": "simulate",
        "config": {
            "n": args.n,
            "mode": "exhaustive" if args.exhaustive else "sampled",
            "seed": args.seed,
            "trials": args.trials,
            "format": args.format,
        },
    }
    if args.settings:
        payload["config"]["settings"] = args.settings.upper()
        return _simulate_single(args, payload)
    return _simulate_subsets(args, payload)


def cmd_verify(args) -> int:
    cap = _cap_for(args.mode, args.cap)
    if args.mode == "products":
        report = verify_products(args.n, cap=cap)
    elif args.mode == "correlations":
        report = verify_correlations(args.n, cap=cap)
    else:
        report = verify_subsets(args.n, max_l=args.max_l, cap=cap)
    payload = {
        "command": "verify",
        "config": {
            "mode": args.mode,
            "n": args.n,
            "cap": cap,
            "max_l": args.max_l,
            "format": args.format,
        },
        "report": report.to_dict(include_wall_time=False),
        "passed": report.passed,
    }
    print(f"# wall time: {report.wall_time_s:.2f}s", file=sys.stderr)
    _emit(payload, args.format)
    if args.format == "text":
        print(f"mode: {report.mode}  n: {report.n}")
        print(f"cases checked: {report.cases}")
        print(f"mismatches: {report.mismatches}")
        for key, value in report.details.items():
            print(f"{key}: {value}")
        for ce in report.counterexamples:
            print(f"counterexample: {ce}")
        print(f"result: {'PASS' if report.passed else 'FAIL'}")
    return 0 if report.passed else 1


def _parse_edges(spec: str) -> list[tuple[int, int]]:
    if not spec:
        return []
    edges = []
    for part in spec.split(","):
        ends = part.split("-")
        if len(ends) != 2:
            raise ValueError(f"edge {part!r} is not of the form U-V")
        edges.append((int(ends[0]), int(ends[1])))
    return edges


def cmd_witness(args) -> int:
    graph = CommGraph(args.n, tuple(_parse_edges(args.edges)))
    witness = insufficiency_witness(args.n, graph)
    payload = {
        "command": "witness",
        "config": {"n": args.n, "edges": args.edges, "format": args.format},
        "components": [list(c) for c in witness.components],
        "blocks": [list(b) for b in witness.blocks],
        "qubit_order": list(witness.qubit_order),
        "block_sizes": [witness.operators.k, witness.operators.l, witness.operators.m],
        "operators": operator_strings(witness.operators),
        "classifications": {
            name: kind.value for name, kind in witness.classifications.items()
        },
        "epr_constraints": witness.epr_constraints,
        "forced_ace": witness.forced_ace,
        "quantum_ace": witness.quantum_ace,
        "mermin": {
            "lhv_values": list(witness.lhv_values),
            "lhv_bound": witness.lhv_bound,
            "quantum_value": witness.quantum_mermin,
        },
        "contradiction": witness.contradiction,
    }
    _emit(payload, args.format)
    if args.format == "text":
        print(f"communication graph: {args.n} qubits, edges {args.edges or '(none)'}")
        print(f"components: {payload['components']}")
        print(f"blocks after merging: {payload['blocks']}")
        print(f"relabeled qubit order: {payload['qubit_order']}")
        ops = payload["operators"]
        print("block operators: " + "  ".join(f"{k}={v}" for k, v in ops.items()))
        cls = payload["classifications"]
        print(
            "state assigns: "
            + "  ".join(f"{name}: {kind}" for name, kind in cls.items())
        )
        epr = payload["epr_constraints"]
        print(
            "elements of reality force: "
            + ", ".join(f"{k}={v:+d}" for k, v in epr.items())
            + f" -> ace={witness.forced_ace:+d}"
        )
        print(f"quantum prediction for ACE: {witness.quantum_ace:+d}")
        m = payload["mermin"]
        print(
            f"combination bound: local {m['lhv_values']} (|value| <= "
            f"{m['lhv_bound']}), state value {m['quantum_value']}"
        )
        print(
            "contradiction witnessed"
            if witness.contradiction
            else "NO CONTRADICTION (unexpected)"
        )
    return 0 if witness.contradiction else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ghzlhv",
        description=__doc__,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def add_format(p):
        p.add_argument(
            "--format", choices=("text", "json"), default="text",
            help="output format (default text)",
        )

    p = sub.add_parser("classify", help="classify one signed Pauli product")
    p.add_argument("-n", type=int, required=True, help="qubit count (>= 2)")
    p.add_argument(
        "pauli",
        help="sign? letters, e.g. -XYY (use -- before a negative product)",
    )
    add_format(p)
    p.set_defaults(handler=cmd_classify)

    p = sub.add_parser("table", help="print the LHV table for a circuit")
    p.add_argument("-n", type=int, required=True, help="qubit count")
    p.add_argument("--circuit", help="circuit file (default: GHZ fan-out)")
    p.add_argument(
        "--steps", action="store_true", help="print the table after every gate"
    )
    add_format(p)
    p.set_defaults(handler=cmd_table)

    p = sub.add_parser("simulate", help="run the correction protocol")
    p.add_argument("-n", type=int, required=True, help="qubit count (>= 2)")
    p.add_argument("--settings", help="per-qubit settings, e.g. XYY (I = skip)")
    p.add_argument("--partition", help='disjoint sets, e.g. "1,2|3|4"')
    p.add_argument("--products", help='per-set products, e.g. "XY|X|Y"')
    p.add_argument(
        "--exhaustive", action="store_true", help="iterate all 2^n samples"
    )
    p.add_argument("--trials", type=int, default=1000, help="sampled trials")
    p.add_argument("--seed", type=int, default=0, help="RNG seed (mt19937)")
    p.add_argument(
        "--trace", type=int, default=0, metavar="K",
        help="include the first K per-trial records (sampled mode)",
    )
    add_format(p)
    p.set_defaults(handler=cmd_simulate)

    p = sub.add_parser("verify", help="exhaustive model-vs-oracle sweeps")
    p.add_argument(
        "--mode", choices=("products", "correlations", "subsets"), required=True
    )
    p.add_argument("-n", type=int, required=True)
    p.add_argument(
        "--cap", type=int, default=None,
        help="override the exhaustive cap (or set GHZLHV_CAP_<MODE>)",
    )
    p.add_argument("--max-l", type=int, default=None, help="subset mode: max sets")
    add_format(p)
    p.set_defaults(handler=cmd_verify)

    p = sub.add_parser("witness", help="insufficiency contradiction report")
    p.add_argument("-n", type=int, required=True, help="qubit count (>= 3)")
    p.add_argument(
        "--edges", default="",
        help='communicating pairs, e.g. "1-2,3-4" (at most n-3 of them)',
    )
    add_format(p)
    p.set_defaults(handler=cmd_witness)
    return parser


def _validate(args, parser) -> None:
    if args.subcommand == "classify" and args.n < 2:
        parser.error("classify needs n >= 2 (the model table starts there)")
    if args.subcommand == "simulate":
        single = args.settings is not None
        subset = args.partition is not None or args.products is not None
        if single == subset:
            parser.error("choose exactly one of --settings or --partition/--products")
        if subset and (args.partition is None or args.products is None):
            parser.error("--partition and --products go together")
        if args.trials < 1:
            parser.error("--trials must be positive")


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        _validate(args, parser)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.handler(args)
    except CnotConsistencyError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (PauliParseError, CircuitParseError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
