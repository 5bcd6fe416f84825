"""Seeded Monte Carlo driver.

Trial ``i`` of an experiment with master seed ``s`` runs on the tape
``RandomTape(s).child(i)``, which fixes its arrival order, learning-phase
draw, coins and Linear's randomness.  Results therefore do not depend on how
trials are scheduled, and a worker pool gives the same aggregate as an
inline run.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterator

import numpy as np

from . import linear as lin
from .errors import InvalidConfig, SMSPError, TrialError
from .instances import linear_alpha, resolve_instance
from .reduction import Instance, ReductionConfig, TrialLog, choose_p, run_reduction
from .tape import RandomTape

STATISTICS = ("f_output", "f_M", "w_M", "w_N", "f_empty")


def fmt(x: float) -> str:
    """Numbers in outputs carry 12 significant digits."""
    if isinstance(x, float):
        if not math.isfinite(x):
            return str(x)
        return f"{x:.12g}"
    return str(x)


def round12(x):
    if isinstance(x, float) and math.isfinite(x):
        return float(f"{x:.12g}")
    return x


@dataclass
class ExperimentConfig:
    instance: str  # path, shipped name or generator string
    algorithm: str = "online"  # online | simulated
    linear: str | None = None  # default: the instance's manifest entry
    trials: int = 1000
    seed: int = 0
    variant: str = "nonmonotone"
    p: float | str = "auto"
    alpha: float | None = None
    q: float | None = None
    emit: str = "csv"
    workers: int = 1
    instance_seed: int = 0

    def __post_init__(self):
        if not isinstance(self.trials, int) or self.trials < 1:
            raise InvalidConfig(f"trials must be a positive integer, got {self.trials!r}")
        if self.algorithm not in ("online", "simulated"):
            raise InvalidConfig(f"algorithm must be 'online' or 'simulated', got {self.algorithm!r}")
        if self.emit not in ("jsonl", "csv"):
            raise InvalidConfig(f"emit must be 'jsonl' or 'csv', got {self.emit!r}")
        if self.workers < 1:
            raise InvalidConfig("workers must be >= 1")

    def resolve(self) -> tuple[Instance, ReductionConfig, lin.LinearFactory]:
        inst = resolve_instance(self.instance, self.instance_seed)
        key = self.linear or inst.meta.get("linear") or "greedy-online"
        if key not in lin.LINEAR_KEYS:
            raise InvalidConfig(f"unknown Linear {key!r}; choose from {', '.join(lin.LINEAR_KEYS)}")
        alpha, q = self.alpha, self.q
        if alpha is None:
            alpha, default_q = linear_alpha(key, inst)
            q = default_q if q is None else q
        if self.p == "auto":
            p = choose_p(alpha, self.variant + ("-capped" if q is not None else ""), q=q)
        else:
            p = float(self.p)
        cfg = ReductionConfig(p, self.variant, alpha, q)
        return inst, cfg, lin.linear_factory(key)


@dataclass
class Stat:
    mean: float
    se: float
    trials: int


@dataclass
class TrialAggregate:
    stats: dict[str, Stat]
    acceptance: dict[int, float]  # element -> fraction of trials whose output contains it
    trials: int
    extra: dict = field(default_factory=dict)

    def csv_rows(self) -> list[list[str]]:
        rows = [["statistic", "mean", "se", "trials"]]
        for name, s in self.stats.items():
            rows.append([name, fmt(s.mean), fmt(s.se), str(s.trials)])
        for u, fr in sorted(self.acceptance.items()):
            se = math.sqrt(fr * (1 - fr) / self.trials) if self.trials > 1 else 0.0
            rows.append([f"accept[{u}]", fmt(fr), fmt(se), str(self.trials)])
        return rows


def mean_se(values) -> Stat:
    """Mean and standard error ``std(ddof=1)/sqrt(T)`` (0 for a single trial)."""
    a = np.asarray(values, dtype=float)
    t = len(a)
    if t == 0:
        return Stat(math.nan, math.nan, 0)
    se = float(a.std(ddof=1) / math.sqrt(t)) if t > 1 else 0.0
    return Stat(float(a.mean()), se, t)


def aggregate(logs_values: dict[str, list[float]], outputs: list[frozenset], ground) -> TrialAggregate:
    t = len(outputs)
    stats = {k: mean_se(v) for k, v in logs_values.items()}
    counts = {u: 0 for u in ground}
    for out in outputs:
        for u in out:
            counts[u] += 1
    return TrialAggregate(stats, {u: c / t for u, c in counts.items()}, t)


def iter_trials(cfg: ExperimentConfig, start: int = 0, stop: int | None = None) -> Iterator[TrialLog]:
    inst, rcfg, factory = cfg.resolve()
    root = RandomTape(cfg.seed)
    for i in range(start, cfg.trials if stop is None else stop):
        try:
            yield run_reduction(cfg.algorithm, rcfg, inst, factory, root.child(i))
        except SMSPError as exc:
            raise TrialError(i, exc) from exc


def _chunk(args) -> list[tuple]:
    cfg, start, stop = args
    return [(tuple(getattr(log, s) for s in STATISTICS), log.output) for log in iter_trials(cfg, start, stop)]


def run_trials(cfg: ExperimentConfig, on_log: Callable[[int, TrialLog], None] | None = None) -> TrialAggregate:
    """Run ``cfg.trials`` seeded trials and aggregate them.

    ``on_log`` sees every full log (inline execution only).
    """
    values: dict[str, list[float]] = {s: [] for s in STATISTICS}
    outputs: list[frozenset] = []
    if cfg.workers > 1 and on_log is None:
        from concurrent.futures import ProcessPoolExecutor

        step = max(1, cfg.trials // (4 * cfg.workers))
        chunks = [(cfg, a, min(a + step, cfg.trials)) for a in range(0, cfg.trials, step)]
        with ProcessPoolExecutor(cfg.workers) as pool:
            for part in pool.map(_chunk, chunks):  # map preserves chunk order
                for vals, out in part:
                    for s, v in zip(STATISTICS, vals):
                        values[s].append(v)
                    outputs.append(out)
    else:
        for i, log in enumerate(iter_trials(cfg)):
            if on_log is not None:
                on_log(i, log)
            for s in STATISTICS:
                values[s].append(getattr(log, s))
            outputs.append(log.output)
    inst = resolve_instance(cfg.instance, cfg.instance_seed)
    return aggregate(values, outputs, inst.ground)


def log_record(i: int, log: TrialLog) -> dict:
    """JSON-lines record for one trial (scalar summary plus the sets)."""
    rec = {"trial": i}
    for k, v in log.summary().items():
        rec[k] = round12(v)
    return rec
