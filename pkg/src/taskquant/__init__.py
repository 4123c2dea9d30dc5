"""
Task-based hardware-limited quantizer design for MIMO sensing receivers
driven by random (communication) signals.

A receiver combines its ``N_r`` antennas into ``P`` analog outputs, quantizes
them with dithered uniform ADCs and recovers the target response by a
digital LMMSE matrix. :mod:`taskquant.design` computes the analog combiner
for the data-dependent (per signal realization) and data-independent
(sample-average) strategies; :mod:`taskquant.harness` runs Monte Carlo
sweeps against the closed-form MSE.
"""

from .channel import FrameDraw, ScenarioConfig, draw_frame, jakes_correlation, rng_stream
from .design import (
    CombinerDesign, LinearEstimator, build_A, build_B, design_dd, design_di, make_quantizer,
    predicted_mse, solve_power_allocation,
)
from .harness import SweepResult, SweepSpec, run_point, sweep_rate, sweep_ratio
from .pipeline import TrialOutcome, baseline_digital_only, baseline_no_quant, run_frame
from .quantizer import QuantizerSpec, kappa, quantize_vector, resolution_from_budget

__version__ = "0.1.0"

__all__ = [
    "CombinerDesign", "FrameDraw", "LinearEstimator", "QuantizerSpec", "ScenarioConfig",
    "SweepResult", "SweepSpec", "TrialOutcome", "baseline_digital_only", "baseline_no_quant",
    "build_A", "build_B", "design_dd", "design_di", "draw_frame", "jakes_correlation", "kappa",
    "make_quantizer", "predicted_mse", "quantize_vector", "resolution_from_budget", "rng_stream",
    "run_frame", "run_point", "solve_power_allocation", "sweep_rate", "sweep_ratio",
]
