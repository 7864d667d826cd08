"""Batch recovery experiments: Gabor and spike-Fourier dictionaries.

Each trial draws a sparse signal and a Gaussian sensing matrix from its own
random stream, recovers the signal with l1-synthesis (optimal-dual Bregman)
and with canonical-dual l1-analysis, builds the optimal dual from the
synthesis run and records errors, objectives and decay profiles.
"""
from __future__ import annotations

import configparser
import csv
import json
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from math import ceil
from pathlib import Path

import numpy as np

from . import storage
from .diagnostics import bound_rhs, decay_profile, relative_error, s_term_tail
from .frames import (
    Dictionary,
    build_gabor_dictionary,
    build_spike_fourier_dictionary,
    canonical_dual,
    coherence,
    optimal_dual_from_solution,
)
from .rng import make_rng
from .sensing import gaussian_sensing_matrix, measure, synthesize_sparse_signal
from .solver import REFERENCE_CONFIG, SolverConfig, solve, solve_fixed_dual

__all__ = [
    "ExperimentSpec",
    "TrialRecord",
    "build_dictionary",
    "run_trial",
    "run_experiment",
    "summarize",
    "emit_plot_data",
    "write_outputs",
    "load_config",
    "spec_from_options",
    "SUMMARY_FIELDS",
]

log = logging.getLogger(__name__)

KINDS = ("gabor", "spike_fourier", "custom")

# per-trial scalar metrics; also the columns of summary.csv after "trial"
SUMMARY_FIELDS = (
    "synthesis_signal_error",
    "synthesis_iterate_error",
    "synthesis_coef_error",
    "analysis_signal_error",
    "synthesis_objective",
    "analysis_objective",
    "synthesis_converged",
    "analysis_converged",
    "synthesis_outer_iters",
    "analysis_outer_iters",
    "synthesis_final_residual",
    "decomposition_error",
    "optimal_dual_error",
    "tail_canonical",
    "tail_optimal",
    "bound_canonical",
    "bound_optimal",
)


@dataclass(frozen=True)
class ExperimentSpec:
    """Everything needed to rerun an experiment bit for bit.

    ``phi_variance`` is the entry variance of the sensing matrices; ``None``
    selects ``1/m``. ``sparsity`` defaults to ``ceil(0.2 m)`` for Gabor and
    to 8 split evenly over the two blocks for spike-Fourier.
    """

    kind: str = "gabor"
    m: int = 32
    n: int = 128
    oversampling: int = 30
    window_std: float = 8.0
    time_shifts: int | None = None
    sparsity: int | None = None
    block_sparsity: tuple | None = None
    eps: float = 0.0
    solver: SolverConfig = REFERENCE_CONFIG
    trials: int = 20
    seed: int = 0
    out: str | None = None
    phi_variance: float | None = 1.0
    dictionary_path: str | None = None
    workers: int = 1
    profile_k: int = 100
    c0: float = 1.0
    c1: float = 1.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}, got {self.kind!r}")
        if self.kind == "custom" and not self.dictionary_path:
            raise ValueError("custom experiments need dictionary_path")
        if not 1 <= self.m <= self.n:
            raise ValueError(f"need 1 <= m <= n, got m={self.m}, n={self.n}")
        if self.trials < 1 or self.workers < 1 or self.profile_k < 1:
            raise ValueError("trials, workers and profile_k must be >= 1")
        if self.eps < 0:
            raise ValueError("eps must be non-negative")
        if self.phi_variance is not None and not self.phi_variance > 0:
            raise ValueError("phi_variance must be positive")
        if self.block_sparsity is not None:
            object.__setattr__(self, "block_sparsity", tuple(int(k) for k in self.block_sparsity))

    def resolved_sparsity(self):
        """``(s, per_block)`` after applying the per-kind defaults."""
        if self.block_sparsity is not None:
            return sum(self.block_sparsity), self.block_sparsity
        if self.sparsity is not None:
            s = int(self.sparsity)
            if self.kind == "spike_fourier" and s % 2 == 0:
                return s, (s // 2, s // 2)
            return s, None
        if self.kind == "spike_fourier":
            return 8, (4, 4)
        return int(ceil(0.2 * self.m)), None

    def to_dict(self) -> dict:
        out = asdict(self)
        out["solver"] = asdict(self.solver)
        out["block_sparsity"] = list(self.block_sparsity) if self.block_sparsity else None
        return out


@dataclass
class TrialRecord:
    trial: int
    seed: list
    coherence: float
    synthesis_signal_error: float | None = None
    synthesis_iterate_error: float | None = None
    synthesis_coef_error: float | None = None
    analysis_signal_error: float | None = None
    synthesis_objective: float | None = None
    analysis_objective: float | None = None
    synthesis_converged: bool | None = None
    analysis_converged: bool | None = None
    synthesis_outer_iters: int | None = None
    analysis_outer_iters: int | None = None
    synthesis_final_residual: float | None = None
    decomposition_error: float | None = None
    optimal_dual_error: float | None = None
    tail_canonical: float | None = None
    tail_optimal: float | None = None
    bound_canonical: float | None = None
    bound_optimal: float | None = None
    decay_canonical: list = field(default_factory=list)
    decay_optimal: list = field(default_factory=list)
    error: str | None = None
    elapsed_s: float = 0.0

    @property
    def ok(self) -> bool:
        return self.error is None

    def to_dict(self, include_timing=False) -> dict:
        d = asdict(self)
        if not include_timing:
            d.pop("elapsed_s")
        return d

    @classmethod
    def from_dict(cls, data) -> "TrialRecord":
        names = {f.name for f in fields(cls)}
        return cls(**{k: v for k, v in data.items() if k in names})


def build_dictionary(spec: ExperimentSpec) -> Dictionary:
    if spec.kind == "gabor":
        return build_gabor_dictionary(spec.n, spec.oversampling, spec.window_std, spec.time_shifts)
    if spec.kind == "spike_fourier":
        return build_spike_fourier_dictionary(spec.n)
    D = storage.load_dictionary(spec.dictionary_path)
    if D.n != spec.n:
        raise ValueError(f"dictionary has n={D.n}, experiment expects n={spec.n}")
    return D


def run_trial(spec: ExperimentSpec, D: Dictionary, t: int, mu_D: float) -> TrialRecord:
    """Run trial ``t``; exceptions propagate to the caller."""
    start = time.perf_counter()
    s, per_block = spec.resolved_sparsity()
    variance = spec.phi_variance if spec.phi_variance is not None else 1.0 / spec.m

    ens = gaussian_sensing_matrix(spec.m, spec.n, make_rng(spec.seed, t, 0), variance)
    gt = synthesize_sparse_signal(D, s, make_rng(spec.seed, t, 1), per_block=per_block)
    y, eps = measure(ens, gt.f, spec.eps, make_rng(spec.seed, t, 2))

    cfg = spec.solver
    syn = solve(ens, D, y, eps, cfg.replace(variant="optimal_dual"))
    can = canonical_dual(D)
    ana = solve_fixed_dual(ens, can, y, eps, cfg.replace(variant="fixed_dual"))
    opt = optimal_dual_from_solution(D, syn.f_iterate, syn.p_g)

    v_can = can.analyze(gt.f)
    v_opt = opt.analyze(gt.f)
    k = min(spec.profile_k, D.d)
    split = can.analyze(syn.f_iterate) + syn.p_g
    xnorm = max(np.linalg.norm(syn.x_hat), np.finfo(float).tiny)

    return TrialRecord(
        trial=t,
        seed=[spec.seed, t],
        coherence=mu_D,
        synthesis_signal_error=relative_error(syn.f_hat, gt.f),
        synthesis_iterate_error=relative_error(syn.f_iterate, gt.f),
        synthesis_coef_error=relative_error(syn.x_hat, gt.x),
        analysis_signal_error=relative_error(ana.f_hat, gt.f),
        synthesis_objective=syn.objective,
        analysis_objective=ana.objective,
        synthesis_converged=syn.converged,
        analysis_converged=ana.converged,
        synthesis_outer_iters=syn.outer_iters,
        analysis_outer_iters=ana.outer_iters,
        synthesis_final_residual=syn.final_residual,
        decomposition_error=float(np.linalg.norm(syn.x_hat - split) / xnorm),
        optimal_dual_error=opt.reconstruction_error(),
        tail_canonical=s_term_tail(v_can, s),
        tail_optimal=s_term_tail(v_opt, s),
        bound_canonical=bound_rhs(eps, v_can, s, spec.c0, spec.c1).rhs,
        bound_optimal=bound_rhs(eps, v_opt, s, spec.c0, spec.c1).rhs,
        decay_canonical=decay_profile(v_can, k).magnitudes.tolist(),
        decay_optimal=decay_profile(v_opt, k).magnitudes.tolist(),
        elapsed_s=time.perf_counter() - start,
    )


def _safe_trial(args):
    spec, D, t, mu_D = args
    try:
        return run_trial(spec, D, t, mu_D)
    except Exception as exc:  # recorded per trial; the batch keeps going
        log.warning("trial %d failed: %s", t, exc)
        return TrialRecord(trial=t, seed=[spec.seed, t], coherence=mu_D,
                           error=f"{type(exc).__name__}: {exc}")


def summarize(records) -> dict:
    """Median and interquartile range of every scalar metric over successful trials."""
    good = [r for r in records if r.ok]
    summary = {"trials": len(records), "failed": len(records) - len(good), "metrics": {}}
    for name in SUMMARY_FIELDS:
        vals = np.array([float(getattr(r, name)) for r in good], dtype=float)
        if vals.size == 0:
            continue
        q25, med, q75 = np.percentile(vals, [25, 50, 75])
        summary["metrics"][name] = {"median": float(med), "q25": float(q25),
                                    "q75": float(q75), "iqr": float(q75 - q25)}
    if good:
        summary["coherence"] = good[0].coherence
    return summary


def run_experiment(spec: ExperimentSpec):
    """Run all trials of ``spec``; returns ``(records, summary)``.

    Outputs are written to ``spec.out`` when it is set. A failing trial is
    recorded with its error message and does not abort the batch.
    """
    D = build_dictionary(spec)
    mu_D = coherence(D)
    jobs = [(spec, D, t, mu_D) for t in range(spec.trials)]
    if spec.workers > 1:
        with ProcessPoolExecutor(max_workers=spec.workers) as pool:
            records = list(pool.map(_safe_trial, jobs))
    else:
        records = [_safe_trial(job) for job in jobs]
    summary = summarize(records)
    if spec.out:
        write_outputs(spec, records, summary)
    return records, summary


def _write_csv(path, header, rows):
    try:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(header)
            w.writerows(rows)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc
    return path


def _cell(v):
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return int(v)
    if isinstance(v, float):
        return repr(v)
    return v


def emit_plot_data(records, out_dir) -> list[Path]:
    """Write ``decay_<trial>.csv`` per record and the per-trial ``summary.csv``."""
    records = list(records)
    if not records:
        raise ValueError("no trial records to emit")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = []
    for r in records:
        if not r.ok:
            continue
        rows = [(i, repr(c), repr(o)) for i, (c, o) in
                enumerate(zip(r.decay_canonical, r.decay_optimal))]
        paths.append(_write_csv(out / f"decay_{r.trial}.csv",
                                ["index", "canonical", "optimal"], rows))
    rows = [[r.trial] + [_cell(getattr(r, name)) for name in SUMMARY_FIELDS] + [r.error or ""]
            for r in records]
    paths.append(_write_csv(out / "summary.csv", ["trial", *SUMMARY_FIELDS, "error"], rows))
    return paths


def write_outputs(spec, records, summary) -> list[Path]:
    """Persist ``trials.json``, ``summary.json``, ``timings.csv``, ``spec.json`` and the CSVs."""
    out = Path(spec.out)
    out.mkdir(parents=True, exist_ok=True)
    paths = emit_plot_data(records, out)
    files = {
        "trials.json": [r.to_dict() for r in records],
        "summary.json": summary,
        "spec.json": spec.to_dict(),
    }
    for name, payload in files.items():
        path = out / name
        try:
            path.write_text(json.dumps(payload, indent=1, sort_keys=True))
        except OSError as exc:
            raise OSError(f"cannot write {path}: {exc}") from exc
        paths.append(path)
    paths.append(_write_csv(out / "timings.csv", ["trial", "elapsed_s"],
                            [(r.trial, f"{r.elapsed_s:.6f}") for r in records]))
    return paths


# ---------------------------------------------------------------- config ----

_SOLVER_KEYS = {"lambda": "lam", "lam": "lam", "mu": "mu", "tol": "tol",
                "n_inner": "n_inner", "n_outer": "n_outer"}
_INT_KEYS = {"m", "n", "oversampling", "time_shifts", "sparsity", "trials", "seed",
             "workers", "profile_k"}
_FLOAT_KEYS = {"window_std", "eps", "c0", "c1"}


def load_config(path) -> dict:
    """Read a ``key = value`` config file; section headers are optional."""
    text = Path(path).read_text()
    parser = configparser.ConfigParser()
    parser.read_string("[experiment]\n" + text)
    opts = {}
    for section in parser.sections():
        for key, value in parser.items(section):
            opts[key.replace("-", "_")] = value.strip()
    return opts


def spec_from_options(opts: dict) -> ExperimentSpec:
    """Build an :class:`ExperimentSpec` from string-or-typed options.

    Recognized keys: ``experiment`` (or ``kind``), ``m``, ``n``,
    ``oversampling``, ``window_std``, ``time_shifts``, ``sparsity``,
    ``block_sparsity`` (e.g. ``4,4``), ``eps``, ``lambda``, ``mu``, ``tol``,
    ``n_inner``, ``n_outer``, ``trials``, ``seed``, ``out``,
    ``phi_variance`` (number or ``1/m``), ``dictionary``, ``workers``,
    ``profile_k``, ``c0``, ``c1``.
    """
    kw, solver_kw = {}, {}
    for key, value in opts.items():
        if value is None:
            continue
        key = key.replace("-", "_")
        if key in ("experiment", "kind"):
            kw["kind"] = str(value)
        elif key in _SOLVER_KEYS:
            target = _SOLVER_KEYS[key]
            solver_kw[target] = int(value) if target in ("n_inner", "n_outer") else float(value)
        elif key in _INT_KEYS:
            kw[key] = int(value)
        elif key in _FLOAT_KEYS:
            kw[key] = float(value)
        elif key == "block_sparsity":
            if isinstance(value, str):
                value = [int(v) for v in value.replace(" ", "").split(",") if v]
            kw[key] = tuple(int(v) for v in value)
        elif key == "phi_variance":
            if isinstance(value, str) and value.strip().lower() == "1/m":
                kw[key] = None
            else:
                kw[key] = float(value)
        elif key == "dictionary":
            kw["dictionary_path"] = str(value)
        elif key == "out":
            kw["out"] = str(value)
        else:
            raise ValueError(f"unknown option {key!r}")
    if solver_kw:
        kw["solver"] = REFERENCE_CONFIG.replace(**solver_kw)
    return ExperimentSpec(**kw)
