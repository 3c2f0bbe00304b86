"""Sweep evaluation and deterministic CSV / JSON-lines output."""
from __future__ import annotations

import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from . import __version__
from .config import Curve, RunConfig
from .monte_carlo import ppsc_mc, secrecy_mc, sop_mc
from .secrecy import ppsc_closed, ppsc_quadrature, sop_closed, sop_quadrature

SWEEP_COLUMNS = (
    "gamma_bar_dB", "sop_closed", "sop_quad", "sop_mc", "mc_se",
    "ppsc_closed", "ppsc_quad", "ppsc_mc", "ppsc_mc_se",
)
COMPUTE_COLUMNS = {
    "sop": ("gamma_bar_dB", "sop_closed", "sop_quad", "sop_mc", "mc_se"),
    "ppsc": ("gamma_bar_dB", "ppsc_closed", "ppsc_quad", "ppsc_mc", "ppsc_mc_se"),
}
MC_COLUMNS = ("gamma_bar_dB", "sop_mc", "mc_se", "ppsc_mc", "ppsc_mc_se")
TURBULENCE_COLUMNS = ("sigma_R2", "alpha", "beta")


@dataclass(frozen=True)
class PointTask:
    cfg: RunConfig
    curve: Curve
    gamma_bar_db: float
    alpha: float
    beta: float
    methods: tuple[str, ...]
    metrics: tuple[str, ...]


def evaluate_point(task: PointTask) -> dict:
    """All requested quantities at one sweep point; absent ones are ``None``."""
    cfg = task.cfg
    sys = task.curve.system(cfg, task.gamma_bar_db, task.alpha, task.beta)
    row: dict = {c: None for c in SWEEP_COLUMNS}
    row["gamma_bar_dB"] = task.gamma_bar_db
    want_sop, want_ppsc = "sop" in task.metrics, "ppsc" in task.metrics
    if "closed" in task.methods:
        if want_sop:
            row["sop_closed"] = sop_closed(sys)
        if want_ppsc:
            row["ppsc_closed"] = ppsc_closed(sys)
    if "quadrature" in task.methods:
        if want_sop:
            row["sop_quad"] = sop_quadrature(sys, exact=cfg.mc.definition == "exact")
        if want_ppsc:
            row["ppsc_quad"] = ppsc_quadrature(sys)
    if "mc" in task.methods:
        mc_cfg = cfg.mc.to_mc()
        if want_sop and want_ppsc:
            sop, ppsc = secrecy_mc(sys, mc_cfg)
        else:
            sop = sop_mc(sys, mc_cfg) if want_sop else None
            ppsc = ppsc_mc(sys, mc_cfg) if want_ppsc else None
        if sop is not None:
            row["sop_mc"], row["mc_se"] = sop.value, sop.std_error
        if ppsc is not None:
            row["ppsc_mc"], row["ppsc_mc_se"] = ppsc.value, ppsc.std_error
    return row


def iter_rows(tasks: Sequence[PointTask], workers: int = 1) -> Iterable[dict]:
    """Rows in task order, whatever order workers finish in."""
    if workers <= 1:
        for task in tasks:
            yield evaluate_point(task)
        return
    with ProcessPoolExecutor(max_workers=workers) as pool:
        yield from pool.map(evaluate_point, tasks)


def format_value(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return f"{value:.17g}"
    return str(value)


def render(rows: Iterable[dict], columns: Sequence[str], fmt: str) -> str:
    lines = []
    if fmt == "csv":
        lines.append(",".join(columns))
        for row in rows:
            lines.append(",".join(format_value(row.get(c)) for c in columns))
    else:
        for row in rows:
            lines.append(json.dumps({c: row.get(c) for c in columns}))
    return "\n".join(lines) + "\n"


def curve_paths(base: Path, curves: Sequence[Curve]) -> list[Path]:
    if len(curves) == 1:
        return [base]
    return [base.with_name(f"{base.stem}__{c.label}{base.suffix}") for c in curves]


def metadata_path(base: Path) -> Path:
    return base.with_name(base.stem + ".meta.json")


def partial_marker(base: Path) -> Path:
    return base.with_name(base.stem + ".partial")


def write_metadata(base: Path, cfg: RunConfig, curves, paths, status: str, error: str | None = None):
    meta = {
        "config": cfg.to_dict(),
        "curves": [
            {
                "label": c.label,
                "file": p.name,
                "xi": c.xi,
                "main": c.main.name,
                "eve": c.eve.name,
                "eve_gamma_bar_db": c.eve_gamma_bar_db,
            }
            for c, p in zip(curves, paths)
        ],
        "error": error,
        "seed": cfg.mc.seed,
        "status": status,
        "version": __version__,
    }
    metadata_path(base).write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
