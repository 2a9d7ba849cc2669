"""Command-line entry point: ``infocascade {run,sweep,baseline,validate}``."""

from __future__ import annotations

import argparse
import itertools
import logging
import sys
import time

from . import _backend
from .baseline import estimate_cascade_probabilities, simulate_basic
from .belief import (
    ChoiceMode,
    ImpossibleObservationError,
    ModelParams,
    ObserverModel,
    TrueValue,
    make_prior,
    observe,
)
from .experiments import (
    CellKey,
    CellResult,
    SweepConfig,
    default_workers,
    run_sweep,
    write_runs_csv,
    write_sweep_outputs,
)
from .oracle import choice_rule_agreement, dense_posterior, enumeration_posterior, max_cell_difference
from .sim import detect_cascade, run_chain, run_once

EXIT_OK, EXIT_CHECK_FAILED, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3

log = logging.getLogger("infocascade")


def _p_list(text: str) -> list[float]:
    try:
        values = [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of numbers: {text!r}")
    if not values:
        raise argparse.ArgumentTypeError("empty list")
    return values


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="infocascade", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="simulate a single chain")
    run.add_argument("--p", type=float, required=True)
    run.add_argument("--k", type=int, required=True)
    run.add_argument("--mode", choices=[m.value for m in ChoiceMode], required=True)
    run.add_argument("--v", type=int, choices=[0, 1], required=True)
    run.add_argument("--agents", type=int, default=100)
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--observer", choices=[o.value for o in ObserverModel], default=ObserverModel.ACTOR.value)
    run.add_argument("--window", type=int, default=20)
    run.add_argument("--out", help="runs CSV path (default: print to stdout)")

    sweep = sub.add_parser("sweep", help="run a parameter grid from a JSON config")
    sweep.add_argument("--config", required=True)
    sweep.add_argument("--out-dir", required=True)
    sweep.add_argument("--workers", type=int, default=default_workers())

    base = sub.add_parser("baseline", help="correct/incorrect cascade probability of the counting model")
    base.add_argument("--p-list", type=_p_list, default=[0.5, 0.6, 0.7, 0.8, 0.9])
    base.add_argument("--runs", type=int, default=10000)
    base.add_argument("--agents", type=int, default=100)
    base.add_argument("--seed", type=int, default=0)
    base.add_argument("--window", type=int, default=20)
    base.add_argument("--out", required=True)
    base.add_argument("--svg")

    val = sub.add_parser("validate", help="oracle equivalence and diagnostics")
    val.add_argument("--max-k", type=int, default=3)
    val.add_argument("--max-j", type=int, default=8)
    val.add_argument("--report", default="validation_report.txt")
    val.add_argument("--agreement-agents", type=int, default=20)
    val.add_argument("--agreement-trials", type=int, default=1000)
    val.add_argument("--seed", type=int, default=0)
    return parser


def cmd_run(args) -> int:
    if args.agents < 1 or args.k < 0 or not 0.5 <= args.p <= 1.0 or args.seed < 0:
        print("infocascade run: need --agents >= 1, --k >= 0, 0.5 <= --p <= 1, --seed >= 0", file=sys.stderr)
        return EXIT_USAGE
    params = ModelParams(args.p, args.k, ChoiceMode(args.mode), ObserverModel(args.observer))
    rec = run_once(params, TrueValue(args.v), args.agents, args.seed)
    cell = CellResult(CellKey(params.p, params.k, params.mode, rec.v_true), [rec], [])
    if args.out:
        write_runs_csv(cell, args.out)
    else:
        from .experiments import runs_csv_text

        sys.stdout.write(runs_csv_text(cell))
    stats = detect_cascade(rec, min(args.window, args.agents))
    log.info("cascade=%s onset_window=%s onset_predicate=%s", stats.kind.value, stats.onset_window, stats.onset_predicate)
    return EXIT_OK


def cmd_sweep(args) -> int:
    try:
        config = SweepConfig.from_json(args.config)
    except OSError as exc:
        print(f"infocascade sweep: cannot read config {args.config}: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ValueError, TypeError) as exc:
        print(f"infocascade sweep: invalid config {args.config}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    start = time.perf_counter()
    result = run_sweep(config, workers=max(1, args.workers))
    log.info("sweep of %d cells finished in %.1fs", len(result.cells), time.perf_counter() - start)
    written = write_sweep_outputs(result, args.out_dir)
    log.info("wrote %d files to %s", len(written), args.out_dir)
    return EXIT_OK


def baseline_svg(rows, width: int = 420, height: int = 320) -> str:
    m = 48
    pw, ph = width - 2 * m, height - 2 * m
    ps = [r[0] for r in rows]
    lo, hi = min(ps), max(ps)
    span = (hi - lo) or 1.0

    def xy(p, prob):
        return m + (p - lo) / span * pw, m + ph - prob * ph

    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">',
        '<rect width="100%" height="100%" fill="white"/>',
        f'<line x1="{m}" y1="{m + ph}" x2="{m + pw}" y2="{m + ph}" stroke="black"/>',
        f'<line x1="{m}" y1="{m}" x2="{m}" y2="{m + ph}" stroke="black"/>',
        f'<text x="{width / 2}" y="{height - 10}" text-anchor="middle" font-family="sans-serif" font-size="11">p</text>',
    ]
    for col, colour, label in ((1, "#1a9641", "correct"), (2, "#d7191c", "incorrect")):
        pts = " ".join("{:.2f},{:.2f}".format(*xy(r[0], r[col])) for r in rows)
        parts.append(f'<polyline fill="none" stroke="{colour}" stroke-width="2" points="{pts}"><title>{label}</title></polyline>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def cmd_baseline(args) -> int:
    if args.runs < 1 or args.agents < 1 or any(not 0.5 <= p <= 1.0 for p in args.p_list):
        print("infocascade baseline: need --runs >= 1, --agents >= 1 and p values in [0.5, 1]", file=sys.stderr)
        return EXIT_USAGE
    rows = [(p, *estimate_cascade_probabilities(p, args.agents, args.runs, args.seed, args.window)) for p in args.p_list]
    lines = ["#schema=1", "p,p_correct,p_incorrect,p_none,runs"]
    lines += [f"{p!r},{c!r},{i!r},{n!r},{args.runs}" for p, c, i, n in rows]
    with open(args.out, "w", newline="") as fh:
        fh.write("\n".join(lines) + "\n")
    if args.svg:
        with open(args.svg, "w") as fh:
            fh.write(baseline_svg(rows))
    return EXIT_OK


def _equivalence_check(max_k: int, max_j: int, out) -> bool:
    """Exhaustive incremental-vs-dense comparison; impossible sequences must raise in both."""
    ok = True
    for mode in ChoiceMode:
        for p in (0.5, 0.6, 0.8, 1.0):
            for k in range(max_k + 1):
                params = ModelParams(p, k, mode)
                worst, compared, refused = 0.0, 0, 0
                stack = [((), make_prior(params))]
                while stack:
                    prefix, belief = stack.pop()
                    dense = dense_posterior(params, prefix)
                    worst = max(worst, max_cell_difference(belief, dense))
                    compared += 1
                    if len(prefix) == max_j:
                        continue
                    for a in (0, 1):
                        seq = prefix + (a,)
                        try:
                            nxt = observe(belief, a, params)
                        except ImpossibleObservationError:
                            refused += 1
                            try:
                                dense_posterior(params, seq)
                                ok = False
                                out.append(f"  MISMATCH {mode.value} p={p} k={k} {seq}: only the oracle accepts")
                            except ImpossibleObservationError:
                                pass
                            continue
                        stack.append((seq, nxt))
                passed = worst <= 1e-10
                ok &= passed
                out.append(
                    f"  {'PASS' if passed else 'FAIL'} mode={mode.value} p={p} k={k}: "
                    f"{compared} sequences, {refused} impossible, max |diff| = {worst:.3e}"
                )
    return ok


def cmd_validate(args) -> int:
    report = ["infocascade validation report", f"kernel backend: {_backend.BACKEND}", ""]
    report.append(f"[hard] incremental public belief vs dense oracle (k <= {args.max_k}, j <= {args.max_j}, tol 1e-10)")
    ok = _equivalence_check(args.max_k, args.max_j, report)

    report.append("")
    report.append("[hard] enumeration posterior normalisation (tol 1e-12)")
    norm_ok = True
    for mode in ChoiceMode:
        for seq in itertools.product((0, 1), repeat=4):
            params = ModelParams(0.7, 2, mode)
            try:
                e = enumeration_posterior(params, seq)
            except ImpossibleObservationError:
                continue
            norm_ok &= abs(e.cells.sum() - 1.0) <= 1e-12
    report.append(f"  {'PASS' if norm_ok else 'FAIL'}")
    ok &= norm_ok

    report.append("")
    report.append("[report] recursion vs full-history enumeration, max |cell difference|")
    cases = [
        (ModelParams(0.8, 1, ChoiceMode.WEIGHTED_RANDOM), (0, 0)),
        (ModelParams(0.8, 1, ChoiceMode.WEIGHTED_RANDOM), (0, 1, 0, 0)),
        (ModelParams(0.6, 3, ChoiceMode.WEIGHTED_RANDOM), (0, 0, 1, 0, 0, 0)),
        (ModelParams(0.8, 1, ChoiceMode.DETERMINISTIC), (0, 0)),
        (ModelParams(0.7, 2, ChoiceMode.DETERMINISTIC), (0, 0, 0, 0)),
    ]
    for params, seq in cases:
        try:
            d = max_cell_difference(dense_posterior(params, seq), enumeration_posterior(params, seq))
            report.append(f"  mode={params.mode.value} p={params.p} k={params.k} actions={seq}: {d:.6f}")
        except ImpossibleObservationError:
            report.append(f"  mode={params.mode.value} p={params.p} k={params.k} actions={seq}: impossible")

    report.append("")
    report.append(
        f"[report] count-threshold rule vs P(V=1|...) > 0.5 rule agreement "
        f"({args.agreement_trials} chains x {args.agreement_agents} agents, deterministic)"
    )
    for p in (0.6, 0.8):
        for k in (1, 20):
            agreement = choice_rule_agreement(ModelParams(p, k), args.agreement_agents, args.agreement_trials, args.seed)
            report.append(f"  p={p} k={k}: agreement {agreement.rate:.4f} over {agreement.compared} decisions")

    report.append("")
    report.append("[report] k = 0 deterministic Bayesian chain vs counting model on identical draws (n = 10)")
    from . import rng

    for p in (0.6, 0.7, 0.8, 0.9):
        same = 0
        for r in range(500):
            draws = rng.agent_draws(rng.derive_seed(args.seed, r), 10)
            _, bayes, _, _ = run_chain(ModelParams(p, 0), TrueValue.V1, draws)
            _, basic, _ = simulate_basic(p, TrueValue.V1, draws[None])
            same += bool((bayes == basic[0]).all())
        report.append(f"  p={p}: identical action sequences in {same}/500 runs")

    report.append("")
    report.append("[report] observer tables on the public marginal: rate of zero-probability actions")
    for p in (0.7, 0.8, 0.9):
        params = ModelParams(p, 1, ChoiceMode.DETERMINISTIC, ObserverModel.PUBLIC_MARGINAL)
        surprises = sum(int(run_once(params, 1, 100, rng.derive_seed(args.seed, r)).surprised.sum()) for r in range(200))
        report.append(f"  p={p} k=1: {surprises / (200 * 100):.4f} of agents")

    report.append("")
    report.append(f"RESULT: {'PASS' if ok else 'FAIL'}")
    text = "\n".join(report) + "\n"
    with open(args.report, "w") as fh:
        fh.write(text)
    sys.stdout.write(text)
    return EXIT_OK if ok else EXIT_CHECK_FAILED


COMMANDS = {"run": cmd_run, "sweep": cmd_sweep, "baseline": cmd_baseline, "validate": cmd_validate}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return COMMANDS[args.command](args)
    except OSError as exc:
        print(f"infocascade {args.command}: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
