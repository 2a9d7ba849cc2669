"""Monte Carlo campaigns over the (p, k, mode, v) grid, CSV emission and SVG rendering."""

from __future__ import annotations

import csv
import io
import json
import math
import os
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional
from xml.sax.saxutils import escape

import numpy as np

from . import rng
from .belief import Action, ChoiceMode, ModelParams, ObserverModel, Signal, TrueValue
from .sim import DEFAULT_WINDOW, CascadeKind, RunRecord, detect_cascade, run_chain

SCHEMA_LINE = "#schema=1"
RUNS_HEADER = ["run_id", "p", "k", "mode", "v_true", "agent_index", "signal", "action", "cum_adopt", "cum_reject"]
SUMMARY_HEADER = [
    "p", "k", "mode", "v_true", "runs", "frac_correct", "frac_incorrect", "frac_none",
    "mean_onset_window", "mean_onset_predicate",
]
DEFAULT_BUDGET = 10**9  # agent steps


class BudgetExceededError(ValueError):
    pass


@dataclass(frozen=True)
class SweepConfig:
    p_values: list
    k_values: list
    modes: list
    v_values: list
    n_agents: int = 100
    runs: int = 1000
    master_seed: int = 0
    window: int = DEFAULT_WINDOW
    observer: str = ObserverModel.ACTOR.value

    def __post_init__(self):
        for name in ("p_values", "k_values", "modes", "v_values"):
            if not getattr(self, name):
                raise ValueError(f"{name} must be non-empty")
        for p in self.p_values:
            if not 0.5 <= float(p) <= 1.0:
                raise ValueError(f"p values must lie in [0.5, 1], got {p!r}")
        for k in self.k_values:
            if int(k) != k or k < 0:
                raise ValueError(f"k values must be non-negative integers, got {k!r}")
        for m in self.modes:
            ChoiceMode(m)
        for v in self.v_values:
            TrueValue(v)
        ObserverModel(self.observer)
        if self.n_agents < 1 or self.runs < 1:
            raise ValueError("n_agents and runs must be positive")
        if not 1 <= self.window <= self.n_agents:
            raise ValueError(f"window must lie in [1, n_agents], got {self.window}")
        if not 0 <= self.master_seed < 2**64:
            raise ValueError("master_seed must be an unsigned 64-bit integer")

    @classmethod
    def from_json(cls, path) -> SweepConfig:
        with open(path) as fh:
            data = json.load(fh)
        unknown = set(data) - set(cls.__dataclass_fields__)
        if unknown:
            raise ValueError(f"unknown config fields: {sorted(unknown)}")
        return cls(**data)

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2)

    def cells(self) -> list[CellKey]:
        return [
            CellKey(float(p), int(k), ChoiceMode(m), TrueValue(v))
            for p in self.p_values
            for k in self.k_values
            for m in self.modes
            for v in self.v_values
        ]

    def agent_steps(self) -> int:
        return len(self.cells()) * self.runs * self.n_agents


@dataclass(frozen=True)
class CellKey:
    p: float
    k: int
    mode: ChoiceMode
    v_true: TrueValue

    def slug(self) -> str:
        return f"p{_fmt(self.p)}_k{self.k}_{self.mode.value}_v{int(self.v_true)}"


@dataclass
class CellResult:
    key: CellKey
    records: list
    stats: list

    @property
    def runs(self) -> int:
        return len(self.records)

    def rates(self) -> tuple[float, float, float]:
        n = len(self.stats)
        kinds = [s.kind for s in self.stats]
        return (
            kinds.count(CascadeKind.CORRECT) / n,
            kinds.count(CascadeKind.INCORRECT) / n,
            kinds.count(CascadeKind.NONE) / n,
        )

    def onset_summary(self, attr: str) -> dict:
        values = [getattr(s, attr) for s in self.stats if getattr(s, attr) is not None]
        if not values:
            return {"n": 0, "mean": None, "median": None}
        return {"n": len(values), "mean": statistics.fmean(values), "median": statistics.median(values)}


@dataclass
class SweepResult:
    config: SweepConfig
    cells: dict = field(default_factory=dict)

    def __iter__(self):
        return iter(self.cells.values())


def _fmt(x) -> str:
    return "" if x is None else repr(float(x))


def _run_cell(args) -> CellResult:
    key, config = args
    params = ModelParams(key.p, key.k, key.mode, config.observer)
    seeds = rng.derive_seeds(config.master_seed, range(config.runs))
    draws = rng.uniforms(seeds, 2 * config.n_agents).reshape(config.runs, config.n_agents, 2)
    records, stats = [], []
    for r in range(config.runs):
        s, a, ind, sur = run_chain(params, key.v_true, draws[r])
        rec = RunRecord(params, key.v_true, config.n_agents, int(seeds[r]), s, a, ind, sur)
        records.append(rec)
        stats.append(detect_cascade(rec, config.window))
    return CellResult(key, records, stats)


def run_sweep(config: SweepConfig, workers: int = 1, budget: int = DEFAULT_BUDGET) -> SweepResult:
    """Run every grid cell. Run ``r`` of every cell uses the seed derived from ``(master_seed, r)``,
    so cells are paired on signal streams and the result does not depend on ``workers``."""
    if config.agent_steps() > budget:
        raise BudgetExceededError(
            f"sweep needs {config.agent_steps()} agent steps, budget is {budget}"
        )
    jobs = [(key, config) for key in config.cells()]
    if workers <= 1 or len(jobs) == 1:
        results = [_run_cell(job) for job in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_cell, jobs))
    return SweepResult(config, {r.key: r for r in results})


def _cells_of(result) -> list:
    if isinstance(result, CellResult):
        return [result]
    return list(result)


def runs_csv_text(result) -> str:
    """Runs table for a :class:`SweepResult` or a single :class:`CellResult`."""
    out = io.StringIO()
    out.write(SCHEMA_LINE + "\n")
    out.write(",".join(RUNS_HEADER) + "\n")
    signal_code = {Signal.HIGH: "H", Signal.LOW: "L"}
    action_code = {Action.ADOPT: "A", Action.REJECT: "R"}
    for cell in _cells_of(result):
        key = cell.key
        prefix_tail = f"{_fmt(key.p)},{key.k},{key.mode.value},{int(key.v_true)}"
        for run_id, rec in enumerate(cell.records):
            prefix = f"{run_id},{prefix_tail}"
            ca, cr = rec.cum_adopt, rec.cum_reject
            lines = [
                f"{prefix},{i + 1},{signal_code[Signal(s)]},{action_code[Action(a)]},{ca[i]},{cr[i]}\n"
                for i, (s, a) in enumerate(zip(rec.signals.tolist(), rec.actions.tolist()))
            ]
            out.write("".join(lines))
    return out.getvalue()


def summary_rows(result) -> list[list[str]]:
    rows = []
    for cell in _cells_of(result):
        key = cell.key
        fc, fi, fn = cell.rates()
        rows.append([
            _fmt(key.p), str(key.k), key.mode.value, str(int(key.v_true)), str(cell.runs),
            _fmt(fc), _fmt(fi), _fmt(fn),
            _fmt(cell.onset_summary("onset_window")["mean"]),
            _fmt(cell.onset_summary("onset_predicate")["mean"]),
        ])
    return rows


def summary_csv_text(result) -> str:
    out = io.StringIO()
    out.write(SCHEMA_LINE + "\n")
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(SUMMARY_HEADER)
    writer.writerows(summary_rows(result))
    return out.getvalue()


def _write(path, text: str) -> None:
    try:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc


def write_runs_csv(result, path) -> None:
    _write(path, runs_csv_text(result))


def write_summary_csv(result, path) -> None:
    _write(path, summary_csv_text(result))


def read_runs_csv(path, window: int = DEFAULT_WINDOW, observer: str = ObserverModel.ACTOR.value) -> SweepResult:
    """Rebuild cells from a runs CSV. Records carry no seed or signal-independence flags;
    cascade statistics are recomputed (the predicate onset by replaying actions)."""
    grouped: dict = {}
    try:
        with open(path, newline="") as fh:
            lines = [ln for ln in fh if not ln.startswith("#")]
    except OSError as exc:
        raise OSError(f"cannot read {path}: {exc.strerror or exc}") from exc
    for row in csv.DictReader(lines):
        key = CellKey(float(row["p"]), int(row["k"]), ChoiceMode(row["mode"]), TrueValue(int(row["v_true"])))
        runs = grouped.setdefault(key, {})
        sig, act = runs.setdefault(int(row["run_id"]), ([], []))
        sig.append(Signal.HIGH if row["signal"] == "H" else Signal.LOW)
        act.append(Action.ADOPT if row["action"] == "A" else Action.REJECT)
    cells = {}
    n_agents = None
    for key, runs in grouped.items():
        params = ModelParams(key.p, key.k, key.mode, observer)
        records, stats = [], []
        for run_id in sorted(runs):
            sig, act = runs[run_id]
            n_agents = len(act)
            rec = RunRecord(params, key.v_true, len(act), 0, np.array(sig, dtype=np.uint8), np.array(act, dtype=np.uint8))
            records.append(rec)
            stats.append(detect_cascade(rec, min(window, len(act))))
        cells[key] = CellResult(key, records, stats)
    keys = list(cells)
    config = SweepConfig(
        sorted({k.p for k in keys}), sorted({k.k for k in keys}), sorted({k.mode.value for k in keys}),
        sorted({int(k.v_true) for k in keys}), n_agents or 1, max((c.runs for c in cells.values()), default=1),
        0, min(window, n_agents or 1), observer,
    )
    return SweepResult(config, cells)


ADOPT_COLOUR = "#1a9641"
REJECT_COLOUR = "#d7191c"


def cumulative_svg(cell: CellResult, width: int = 480, height: int = 360) -> str:
    """SVG with one polyline per run and action: cumulative adopts in green, rejects in red."""
    n = cell.records[0].n_agents if cell.records else 1
    margin = 48
    pw, ph = width - 2 * margin, height - 2 * margin
    sx, sy = pw / n, ph / n
    key = cell.key
    title = f"p={_fmt(key.p)}, k={key.k}, {key.mode.value}, V={int(key.v_true)}, runs={cell.runs}"
    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f"<title>{escape(title)}</title>",
        '<rect width="100%" height="100%" fill="white"/>',
        f'<text x="{width / 2}" y="{margin / 2}" text-anchor="middle" font-family="sans-serif" '
        f'font-size="13">{escape(title)}</text>',
        f'<g transform="translate({margin},{margin + ph})" fill="none">',
        f'<line x1="0" y1="0" x2="{pw}" y2="0" stroke="black"/>',
        f'<line x1="0" y1="0" x2="0" y2="{-ph}" stroke="black"/>',
    ]
    for t in range(0, n + 1, max(1, n // 5)):
        parts.append(
            f'<text x="{t * sx:.2f}" y="16" font-size="10" font-family="sans-serif" '
            f'text-anchor="middle" fill="black">{t}</text>'
        )
        parts.append(
            f'<text x="-6" y="{-t * sy:.2f}" font-size="10" font-family="sans-serif" '
            f'text-anchor="end" fill="black">{t}</text>'
        )
    parts.append(
        f'<text x="{pw / 2}" y="32" font-size="11" font-family="sans-serif" text-anchor="middle" '
        f'fill="black">agent</text>'
    )
    opacity = max(0.02, min(1.0, 5.0 / max(1, cell.runs)))
    parts.append(f'<g transform="scale({sx:.6f},{-sy:.6f})" stroke-width="{1.0 / sx:.6f}" '
                 f'stroke-opacity="{opacity:.3f}">')
    for rec in cell.records:
        for series, colour in ((rec.cum_adopt, ADOPT_COLOUR), (rec.cum_reject, REJECT_COLOUR)):
            pts = " ".join(f"{i},{v}" for i, v in enumerate([0, *series.tolist()]))
            parts.append(f'<polyline stroke="{colour}" points="{pts}"/>')
    parts.append("</g></g></svg>")
    return "\n".join(parts) + "\n"


def render_cumulative_plot(cell: CellResult, path) -> None:
    _write(path, cumulative_svg(cell))


def write_sweep_outputs(result: SweepResult, out_dir) -> list[Path]:
    """Per-cell runs CSV and SVG plus ``summary.csv``; returns the written paths."""
    out_dir = Path(out_dir)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create {out_dir}: {exc.strerror or exc}") from exc
    written = []
    for cell in result:
        slug = cell.key.slug()
        runs_path = out_dir / f"runs_{slug}.csv"
        svg_path = out_dir / f"cumulative_{slug}.svg"
        write_runs_csv(cell, runs_path)
        render_cumulative_plot(cell, svg_path)
        written += [runs_path, svg_path]
    summary_path = out_dir / "summary.csv"
    write_summary_csv(result, summary_path)
    written.append(summary_path)
    return written


def reference_grid(runs: int = 1000, n_agents: int = 100, master_seed: int = 0) -> SweepConfig:
    return SweepConfig(
        p_values=[0.5, 0.6, 0.7, 0.8, 0.9],
        k_values=[1, 20, 40],
        modes=[m.value for m in ChoiceMode],
        v_values=[0, 1],
        n_agents=n_agents,
        runs=runs,
        master_seed=master_seed,
    )


def default_workers() -> int:
    return os.cpu_count() or 1


def wilson_interval(successes: int, n: int, z: float = 1.96) -> tuple[float, float]:
    if n == 0:
        return 0.0, 1.0
    phat = successes / n
    denom = 1 + z * z / n
    centre = (phat + z * z / (2 * n)) / denom
    half = z * math.sqrt(phat * (1 - phat) / n + z * z / (4 * n * n)) / denom
    return max(0.0, centre - half), min(1.0, centre + half)


def mean_interval(values, z: float = 1.96) -> Optional[tuple[float, float]]:
    if len(values) < 2:
        return None
    m = statistics.fmean(values)
    half = z * statistics.stdev(values) / math.sqrt(len(values))
    return m - half, m + half
