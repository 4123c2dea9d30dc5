"""
Monte Carlo experiment engine and the two standard sweeps (MSE versus
combining ratio and MSE versus quantization rate).

Randomness is keyed by ``(master_seed, trial, purpose)``: every strategy and
grid point sees the same frames for a given trial index, which makes
strategy comparisons paired. Results are reduced in trial order, so serial
and threaded runs agree bit for bit.
"""

import csv
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import design as design_mod
from .channel import draw_frame, rng_stream
from .errors import Infeasible, ResolutionTooLow
from .pipeline import DIGITAL_ONLY, NO_QUANT, baseline_digital_only, baseline_no_quant, digital_only_quantizer, run_frame
from .quantizer import PER_REAL_DIM, resolution_from_budget

DD, DI = design_mod.DD, design_mod.DI
STRATEGIES = (DD, DI, DIGITAL_ONLY, NO_QUANT)

CSV_COLUMNS = (
    "strategy", "rate", "k_dither", "p_tilde", "combining_ratio", "m_levels", "gamma",
    "mse_empirical", "mse_empirical_stderr", "mse_predicted_mean", "n_trials", "skipped_reason",
)


def normalize_strategy(name):
    key = name.strip().lower()
    table = {"dd": DD, "di": DI, "digital-only": DIGITAL_ONLY, "digital": DIGITAL_ONLY,
             "no-quant": NO_QUANT, "noquant": NO_QUANT}
    if key not in table:
        raise ValueError(f"unknown strategy {name!r}")
    return table[key]


@dataclass
class SweepSpec:
    scenario: object
    strategies: list = field(default_factory=lambda: list(STRATEGIES))
    rates: list = field(default_factory=lambda: [2, 4])
    p_tildes: list = None
    k_dithers: list = field(default_factory=lambda: [0])
    eta: float = 2.0
    n_trials: int = 1000
    n_saa: int = 10_000
    convention: str = PER_REAL_DIM
    threads: int = 1

    def __post_init__(self):
        self.strategies = [normalize_strategy(s) for s in self.strategies]
        if self.p_tildes is None:
            self.p_tildes = list(range(1, self.scenario.n_rx + 1))
        if self.n_trials < 1:
            raise ValueError("n_trials must be >= 1")


@dataclass
class Row:
    strategy: str
    rate: float = None
    k_dither: int = None
    p_tilde: int = None
    combining_ratio: float = None
    m_levels: int = None
    gamma: float = None
    mse_empirical: float = None
    mse_empirical_stderr: float = None
    mse_predicted_mean: float = None
    n_trials: int = 0
    skipped_reason: str = None
    overload_mean: float = None
    # per-trial MSE values, kept for paired comparisons between strategies
    trial_mse: np.ndarray = field(default=None, repr=False, compare=False)

    @property
    def skipped(self):
        return self.skipped_reason is not None

    def sort_key(self):
        def num(x):
            return -math.inf if x is None else x
        return (self.strategy, num(self.rate), num(self.k_dither), num(self.p_tilde))


def _fmt(x):
    if x is None:
        return ""
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, float):
        return f"{x:.12g}"
    return str(x)


@dataclass
class SweepResult:
    rows: list

    def sorted_rows(self):
        return sorted(self.rows, key=Row.sort_key)

    def to_csv(self):
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for row in self.sorted_rows():
            writer.writerow([_fmt(getattr(row, c)) for c in CSV_COLUMNS])
        return buf.getvalue()

    def select(self, **criteria):
        return [r for r in self.rows if all(getattr(r, k) == v for k, v in criteria.items())]

    def get(self, **criteria):
        hits = self.select(**criteria)
        if len(hits) != 1:
            raise KeyError(f"{len(hits)} rows match {criteria}")
        return hits[0]


def db_ratio(mse_a, mse_b):
    """``10 log10(mse_a / mse_b)``."""
    return 10.0 * math.log10(mse_a / mse_b)


def paired_gap(row_a, row_b):
    """
    Mean and standard error of the per-trial difference ``b - a``.

    Both rows must come from the same scenario and trial count, so that
    trial ``t`` saw the same frame in each.
    """
    if row_a.trial_mse is None or row_b.trial_mse is None:
        raise ValueError("rows carry no per-trial values")
    if row_a.trial_mse.size != row_b.trial_mse.size:
        raise ValueError("rows have different trial counts")
    d = row_b.trial_mse - row_a.trial_mse
    se = float(d.std(ddof=1) / math.sqrt(d.size)) if d.size > 1 else 0.0
    return float(d.mean()), se


class SAACache:
    """One SAA eigenvalue pool per scenario; the pool does not depend on the grid point."""

    def __init__(self):
        self._pools = {}

    def pool(self, cfg, n_samples):
        key = (cfg.to_json(sort_keys=True), n_samples)
        if key not in self._pools:
            rng = rng_stream(cfg.master_seed, "saa")
            self._pools[key] = design_mod.saa_spectrum_pool(cfg, n_samples, rng)
        return self._pools[key]


def _map_trials(fn, n_trials, threads):
    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(fn, range(n_trials)))
    return [fn(t) for t in range(n_trials)]


def _aggregate(row, outcomes):
    mse = np.array([o.mse for o in outcomes])
    pred = np.array([o.predicted_mse for o in outcomes])
    row.n_trials = len(outcomes)
    row.mse_empirical = float(mse.mean())
    row.mse_empirical_stderr = float(mse.std(ddof=1) / math.sqrt(mse.size)) if mse.size > 1 else 0.0
    row.mse_predicted_mean = float(pred.mean())
    row.overload_mean = float(np.mean([o.overloaded_fraction for o in outcomes]))
    row.trial_mse = mse
    return row


def run_point(cfg, strategy, rate=None, p_tilde=None, k_dither=0, eta=2.0, n_trials=1000,
              n_saa=10_000, convention=PER_REAL_DIM, threads=1, saa_cache=None):
    """
    Monte Carlo estimate of the average MSE for one strategy at one grid point.

    Infeasible points come back as skipped rows with a reason of
    ``"Infeasible-kappa"`` or ``"ResolutionTooLow"``.
    """
    strategy = normalize_strategy(strategy)
    seed = cfg.master_seed
    n_rx = cfg.n_rx
    if strategy in (NO_QUANT, DIGITAL_ONLY) or p_tilde is None:
        p_tilde = n_rx
    row = Row(strategy, p_tilde=p_tilde, combining_ratio=p_tilde / n_rx)

    if strategy == NO_QUANT:
        def trial(t):
            return baseline_no_quant(cfg, draw_frame(cfg, t))
        return _aggregate(row, _map_trials(trial, n_trials, threads))

    row.rate, row.k_dither = rate, k_dither
    try:
        if strategy == DIGITAL_ONLY:
            spec = digital_only_quantizer(cfg, rate, k_dither, eta, convention)
        else:
            m_levels = resolution_from_budget(rate, n_rx, cfg.n_snapshots, p_tilde, convention)
            spec = design_mod.make_quantizer(cfg, m_levels, k_dither, eta, p_tilde)
    except ResolutionTooLow:
        row.skipped_reason = "ResolutionTooLow"
        return row
    except Infeasible:
        row.skipped_reason = "Infeasible-kappa"
        row.m_levels = resolution_from_budget(rate, n_rx, cfg.n_snapshots, p_tilde, convention)
        return row
    row.m_levels, row.gamma = spec.m_levels, spec.gamma

    if strategy == DIGITAL_ONLY:
        def trial(t):
            return baseline_digital_only(cfg, draw_frame(cfg, t), rate, k_dither,
                                         rng_stream(seed, t, "dither"), spec=spec)
    elif strategy == DI:
        cache = saa_cache or SAACache()
        fixed = design_mod.design_from_pool(cfg, spec, cache.pool(cfg, n_saa), n_saa)

        def trial(t):
            return run_frame(cfg, fixed, draw_frame(cfg, t), rng_stream(seed, t, "dither"))
    else:
        def trial(t):
            frame = draw_frame(cfg, t)
            per_frame = design_mod.design_dd(cfg, frame.theta, spec)
            return run_frame(cfg, per_frame, frame, rng_stream(seed, t, "dither"))

    return _aggregate(row, _map_trials(trial, n_trials, threads))


def _point_kwargs(spec):
    return dict(eta=spec.eta, n_trials=spec.n_trials, n_saa=spec.n_saa,
                convention=spec.convention, threads=spec.threads)


def sweep_ratio(spec, saa_cache=None, progress=None):
    """MSE over ``P = 1..N_r`` for each (strategy, rate, K_d), plus the no-quantization row."""
    cache = saa_cache or SAACache()
    cfg = spec.scenario
    rows = []
    kw = _point_kwargs(spec)
    if NO_QUANT in spec.strategies:
        rows.append(run_point(cfg, NO_QUANT, **kw))
    for strategy in spec.strategies:
        if strategy == NO_QUANT:
            continue
        for rate in spec.rates:
            for kd in spec.k_dithers:
                grid = [cfg.n_rx] if strategy == DIGITAL_ONLY else spec.p_tildes
                for p in grid:
                    rows.append(run_point(cfg, strategy, rate, p, kd, saa_cache=cache, **kw))
                    if progress:
                        progress(rows[-1])
    return SweepResult(rows)


def sweep_rate(spec, ratio=1.0, saa_cache=None, progress=None):
    """MSE over the rates in ``spec.rates`` at a fixed combining ratio."""
    cache = saa_cache or SAACache()
    cfg = spec.scenario
    p_tilde = max(1, int(round(ratio * cfg.n_rx)))
    rows = []
    kw = _point_kwargs(spec)
    if NO_QUANT in spec.strategies:
        rows.append(run_point(cfg, NO_QUANT, **kw))
    for strategy in spec.strategies:
        if strategy == NO_QUANT:
            continue
        for rate in spec.rates:
            for kd in spec.k_dithers:
                rows.append(run_point(cfg, strategy, rate, p_tilde, kd, saa_cache=cache, **kw))
                if progress:
                    progress(rows[-1])
    return SweepResult(rows)


def reference_rate_spec(scenario, n_trials=1000, n_saa=10_000, **kw):
    """Reference rate sweep: R = 2..16, K_d = 0, r = 1."""
    return SweepSpec(scenario, strategies=list(STRATEGIES), rates=list(range(2, 17)),
                     k_dithers=[0], n_trials=n_trials, n_saa=n_saa, **kw)


def reference_ratio_spec(scenario, n_trials=1000, n_saa=10_000, **kw):
    """Reference ratio sweep: R in {2, 4}, K_d in {0, 2}, P = 1..N_r."""
    return SweepSpec(scenario, strategies=[DD, DI, NO_QUANT], rates=[2, 4],
                     k_dithers=[0, 2], n_trials=n_trials, n_saa=n_saa, **kw)
