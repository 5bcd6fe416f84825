"""Simulation library for submodular matroid secretary algorithms.

Matroid and submodular oracles, linear secretary algorithms, the reductions
from submodular to linear objectives, and a seeded experiment harness.
"""

from __future__ import annotations

from .errors import SMSPError
from .instances import generate_instance, load_instance, resolve_instance, shipped_instance, shipped_instances
from .matroids import build_matroid, verify_axioms
from .objectives import build_objective, check_submodular, convolve_fw, greedy, offline_opt
from .reduction import (
    Instance,
    ReductionConfig,
    TrialLog,
    choose_p,
    compare_logs,
    coupled_pair,
    laminar_ratio,
    msmsp_online,
    msmsp_simulated,
    ratio_bound,
    run_reduction,
    smsp_online,
    smsp_simulated,
)
from .tape import RandomTape

__version__ = "0.1.0"

__all__ = [
    "SMSPError", "RandomTape",
    "build_matroid", "verify_axioms",
    "build_objective", "check_submodular", "convolve_fw", "greedy", "offline_opt",
    "Instance", "ReductionConfig", "TrialLog", "run_reduction",
    "smsp_online", "smsp_simulated", "msmsp_online", "msmsp_simulated",
    "coupled_pair", "compare_logs", "choose_p", "ratio_bound", "laminar_ratio",
    "generate_instance", "load_instance", "resolve_instance", "shipped_instance", "shipped_instances",
]
