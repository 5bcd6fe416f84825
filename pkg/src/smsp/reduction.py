"""Reductions from submodular to linear matroid secretary problems.

Four drivers are provided:

* :func:`smsp_online` / :func:`msmsp_online` are the online algorithms: a
  learning phase builds a greedy reference set ``M``, later arrivals that
  greedy would take become candidates ``N`` with surrogate weight
  ``f(u | M_u)``, and a linear algorithm picks among them.
* :func:`smsp_simulated` / :func:`msmsp_simulated` are the offline
  counterparts with the same joint law of ``(M, output)``, processing
  elements in greedy order and flipping membership coins as they go.

:func:`coupled_pair` replaces the coins by fixed sets ``L`` and ``F`` so both
versions can be compared run by run.  The bottom of the module holds the
closed-form parameter choices and competitive-ratio bounds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

from . import linear as lin
from .errors import BetaOutOfRange, InvalidAlpha, InvalidArgs, InvalidConfig, VariantMismatch
from .matroids import Matroid
from .objectives import Objective, greedy_process, greedy_trace
from .tape import RandomTape

VARIANTS = ("nonmonotone", "monotone")
BOUND_VARIANTS = ("nonmonotone", "nonmonotone-capped", "monotone", "monotone-capped", "monotone-theorem5")


@dataclass
class Instance:
    matroid: Matroid
    objective: Objective
    name: str = "instance"
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.matroid.ground != self.objective.ground:
            raise InvalidConfig("matroid and objective are defined over different ground sets")

    @property
    def ground(self):
        return self.matroid.ground

    @property
    def n(self):
        return self.matroid.n


@dataclass
class ReductionConfig:
    p: float
    variant: str = "nonmonotone"
    alpha: float = 1.0
    q: float | None = None
    k: int | None = None

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise InvalidConfig(f"variant must be one of {VARIANTS}, got {self.variant!r}")
        if not (0.0 < self.p < 1.0):
            raise InvalidConfig(f"p must lie in (0, 1), got {self.p}")
        if self.alpha < 1:
            raise InvalidAlpha(f"alpha must be >= 1, got {self.alpha}")
        if self.q is not None:
            if not 0 < self.q <= 1:
                raise InvalidConfig(f"q must lie in (0, 1], got {self.q}")
            # an alpha-competitive algorithm selects a lone positive element
            # with probability >= 1/alpha, so smaller caps are contradictory
            if self.q < 1 / self.alpha - 1e-12:
                raise InvalidConfig(f"q={self.q} is below 1/alpha={1 / self.alpha}")
        if self.k is not None and self.k < 1:
            raise InvalidConfig("k must be >= 1")

    @classmethod
    def auto(cls, alpha: float, variant: str = "nonmonotone", q: float | None = None,
             k: int | None = None, theorem5: bool = False) -> "ReductionConfig":
        """Config with ``p`` chosen by :func:`choose_p`."""
        return cls(choose_p(alpha, variant, q=q, theorem5=theorem5), variant, alpha, q, k)


@dataclass
class TrialLog:
    algorithm: str
    n: int
    X: int | None  # learning-phase length (online variants only)
    L: frozenset  # learning set; for the simulated variants the known set E - (N | N0)
    M: tuple  # greedy set in insertion order (prefix i is M_u of the i-th element)
    N: frozenset
    N0: frozenset
    w: dict  # surrogate weights; absent elements weigh 0
    Q: frozenset  # Linear's output (already without the known set)
    output: frozenset
    linear_order: tuple  # real arrivals in the order they reached Linear
    f_empty: float = 0.0
    f_M: float = 0.0
    w_M: float = 0.0
    w_N: float = 0.0
    f_output: float = 0.0

    def weight(self, S: Iterable[int]) -> float:
        return math.fsum(self.w.get(u, 0.0) for u in S)

    def summary(self) -> dict:
        return {
            "algorithm": self.algorithm, "n": self.n, "X": self.X,
            "L": sorted(self.L), "M": list(self.M), "N": sorted(self.N), "N0": sorted(self.N0),
            "Q": sorted(self.Q), "output": sorted(self.output),
            "f_empty": self.f_empty, "f_M": self.f_M, "w_M": self.w_M, "w_N": self.w_N,
            "f_output": self.f_output,
        }


def _finalize(log: TrialLog, f: Objective) -> TrialLog:
    log.f_empty = f.value(())
    log.f_M = f.value(log.M)
    log.w_M = log.weight(log.M)
    log.w_N = log.weight(log.N)
    log.f_output = f.value(log.output)
    return log


def _run_linear(inst: Instance, linear_factory: lin.LinearFactory, tape: RandomTape,
                known: frozenset, order: Sequence[int], w: dict) -> frozenset:
    """Feed ``order`` to Linear as a Partial-MSP instance with known set ``known``."""
    alg = lin.PartialMSPWrapper(linear_factory, known)
    alg.start(inst.n, inst.matroid, tape)
    for u in order:
        alg.on_arrival(u, w.get(u, 0.0))
    return alg.finish()


# ---------------------------------------------------------------------------
# greedy on M + u, answered from the trace of greedy on L
# ---------------------------------------------------------------------------


class GreedyReference:
    """Greedy solution ``M`` of the learning set plus its prefix values.

    :meth:`accepts` tells whether greedy run on ``M + u`` would accept ``u``
    without rerunning it: greedy on ``M + u`` retraces the construction of
    ``M`` until ``u`` beats the next element of ``M`` (larger marginal, or
    equal marginal and smaller id), at which point ``u`` is tested against
    the current prefix ``M_u``.
    """

    def __init__(self, f: Objective, m: Matroid, L: Iterable[int]):
        self.f, self.m = f, m
        trace = greedy_trace(f, m, L)
        self.M = tuple(u for u, _ in trace)
        self.gains = [g for _, g in trace]
        self.prefixes = [frozenset(self.M[:i]) for i in range(len(self.M) + 1)]
        self.values = [f.value(P) for P in self.prefixes]

    def accepts(self, u: int) -> tuple[bool, float, int]:
        """``(accepted, f(u | M_u), |M_u|)`` for greedy on ``M + u``."""
        k = len(self.M)
        for i in range(k + 1):
            gain = self.f.value(self.prefixes[i] | {u}) - self.values[i]
            if i == k or gain > self.gains[i] or (gain == self.gains[i] and u < self.M[i]):
                ok = gain >= 0 and self.m.can_add(self.prefixes[i], u)
                return ok, gain, i
        raise AssertionError("unreachable")


def _online(name: str, inst: Instance, linear_factory, linear_tape: RandomTape,
            arrivals: Sequence[int], X: int, into_N: Callable[[int], bool]) -> TrialLog:
    f, m = inst.objective, inst.matroid
    L = frozenset(arrivals[:X])
    rest = list(arrivals[X:])
    ref = GreedyReference(f, m, arrivals[:X])
    w = {u: g for u, g in zip(ref.M, ref.gains)}
    N = set()
    for u in rest:
        w[u] = 0.0
        ok, gain, _ = ref.accepts(u)
        if ok and into_N(u):
            N.add(u)
            w[u] = gain
    Q = _run_linear(inst, linear_factory, linear_tape, L, rest, w)
    N = frozenset(N)
    log = TrialLog(name, inst.n, X, L, ref.M, N, frozenset(rest) - N, w, Q, Q & N, tuple(rest))
    return _finalize(log, f)


def _simulated(name: str, inst: Instance, linear_factory, linear_tape: RandomTape,
               branch: Callable[[int, float, bool], str | None],
               linear_order: Callable[[list], list]) -> TrialLog:
    """Greedy-order loop; ``branch(u, gain, feasible)`` returns the set u joins
    (``"M"``, ``"N"``, ``"N0"`` or ``None``)."""
    f, m = inst.objective, inst.matroid
    N, N0 = set(), set()
    w: dict[int, float] = {}

    def decide(u, gain, feasible, M):
        where = branch(u, gain, feasible)
        w[u] = gain if where in ("M", "N") else 0.0
        if where == "N":
            N.add(u)
        elif where == "N0":
            N0.add(u)
        return where == "M"

    M = greedy_process(f, m, inst.ground, decide)
    N, N0 = frozenset(N), frozenset(N0)
    known = inst.matroid.elements - N - N0
    order = linear_order(sorted(N | N0))
    Q = _run_linear(inst, linear_factory, linear_tape, known, order, w)
    log = TrialLog(name, inst.n, None, known, tuple(M), N, N0, w, Q, Q & N, tuple(order))
    return _finalize(log, f)


def _require(cfg: ReductionConfig, inst: Instance, variant: str):
    if cfg.variant != variant:
        raise VariantMismatch(f"this algorithm needs variant={variant!r}, config has {cfg.variant!r}")
    if variant == "monotone" and inst.objective.monotone is False:
        raise VariantMismatch("monotone reduction applied to an objective declared non-monotone")


def _arrivals(inst: Instance, tape: RandomTape, order: Sequence[int] | None) -> list:
    if order is None:
        return tape.permutation("arrival", inst.ground)
    order = list(order)
    if sorted(order) != list(inst.ground):
        raise InvalidConfig("arrival order is not a permutation of the ground set")
    return order


# ---------------------------------------------------------------------------
# public drivers
# ---------------------------------------------------------------------------


def smsp_online(cfg: ReductionConfig, inst: Instance, linear_factory: lin.LinearFactory,
                tape: RandomTape, order: Sequence[int] | None = None) -> TrialLog:
    """Online reduction for non-negative submodular objectives."""
    _require(cfg, inst, "nonmonotone")
    arrivals = _arrivals(inst, tape, order)
    X = tape.binomial("learning", inst.n, 0.5)
    return _online("online", inst, linear_factory, tape.fork("linear"), arrivals, X,
                   lambda u: tape.coin("candidate", cfg.p))


def msmsp_online(cfg: ReductionConfig, inst: Instance, linear_factory: lin.LinearFactory,
                 tape: RandomTape, order: Sequence[int] | None = None) -> TrialLog:
    """Online reduction for monotone objectives (learning phase ~ Bin(n, p))."""
    _require(cfg, inst, "monotone")
    arrivals = _arrivals(inst, tape, order)
    X = tape.binomial("learning", inst.n, cfg.p)
    return _online("monotone-online", inst, linear_factory, tape.fork("linear"), arrivals, X,
                   lambda u: True)


def smsp_simulated(cfg: ReductionConfig, inst: Instance, linear_factory: lin.LinearFactory,
                   tape: RandomTape) -> TrialLog:
    """Offline counterpart of :func:`smsp_online`."""
    _require(cfg, inst, "nonmonotone")

    def branch(u, gain, feasible):
        if feasible and gain >= 0:
            if tape.coin("to-M", 0.5):
                return "M"
            # conditional on not joining M: N with probability p, else N0
            return "N" if tape.coin("to-N", cfg.p) else "N0"
        return "N0" if tape.coin("to-N0", 0.5) else None

    return _simulated("simulated", inst, linear_factory, tape.fork("linear"), branch,
                      lambda items: tape.permutation("linear-order", items))


def msmsp_simulated(cfg: ReductionConfig, inst: Instance, linear_factory: lin.LinearFactory,
                    tape: RandomTape) -> TrialLog:
    """Offline counterpart of :func:`msmsp_online`."""
    _require(cfg, inst, "monotone")

    def branch(u, gain, feasible):
        if feasible:
            return "M" if tape.coin("to-M", cfg.p) else "N"
        return "N0" if tape.coin("to-N0", 1 - cfg.p) else None

    return _simulated("monotone-simulated", inst, linear_factory, tape.fork("linear"), branch,
                      lambda items: tape.permutation("linear-order", items))


ALGORITHMS = {
    ("online", "nonmonotone"): smsp_online,
    ("simulated", "nonmonotone"): smsp_simulated,
    ("online", "monotone"): msmsp_online,
    ("simulated", "monotone"): msmsp_simulated,
}


def run_reduction(kind: str, cfg: ReductionConfig, inst: Instance, linear_factory, tape) -> TrialLog:
    try:
        fn = ALGORITHMS[(kind, cfg.variant)]
    except KeyError:
        raise InvalidConfig(f"unknown algorithm {kind!r}; choose 'online' or 'simulated'") from None
    return fn(cfg, inst, linear_factory, tape)


def coupled_pair(L: Iterable[int], F: Iterable[int], pi: Sequence[int], cfg: ReductionConfig,
                 inst: Instance, linear_factory: lin.LinearFactory,
                 linear_seed: int) -> tuple[TrialLog, TrialLog]:
    """Run the online and simulated reductions with shared randomness.

    Membership coins are replaced by lookups in ``L`` (learning set) and
    ``F`` (candidate coin), the online arrival order is ``L`` then ``pi`` and
    the simulated run hands ``N | N0`` to Linear in the order ``pi``.  Both
    Linear runs draw from fresh tapes with the same seed.  For the monotone
    variant ``F`` is unused.
    """
    L = frozenset(L)
    F = frozenset(F)
    pi = list(pi)
    rest = sorted(inst.matroid.elements - L)
    if sorted(pi) != rest:
        raise InvalidConfig("pi must be a permutation of E - L")
    monotone = cfg.variant == "monotone"
    arrivals = sorted(L) + pi

    online = _online("coupled-online", inst, linear_factory, RandomTape(linear_seed), arrivals, len(L),
                     (lambda u: True) if monotone else (lambda u: u in F))

    def branch(u, gain, feasible):
        if feasible and (monotone or gain >= 0):
            if u in L:
                return "M"
            if monotone or u in F:
                return "N"
            return "N0"
        return "N0" if u not in L else None

    def order(items):
        if items != rest:
            # N | N0 must equal E - L; hand Linear something detectable otherwise
            return [u for u in pi if u in set(items)] + [u for u in items if u not in set(pi)]
        return pi

    simulated = _simulated("coupled-simulated", inst, linear_factory, RandomTape(linear_seed), branch, order)
    return online, simulated


def compare_logs(a: TrialLog, b: TrialLog, tol: float = 0.0) -> list[str]:
    """Fields on which two coupled logs disagree (empty when identical).

    Weights are compared on ``E - L`` of the first log plus ``M``.
    """
    diffs = []
    for name in ("M", "N", "N0", "output", "L"):
        if getattr(a, name) != getattr(b, name):
            diffs.append(name)
    keys = set(a.N) | set(a.N0) | set(b.N) | set(b.N0) | set(a.M) | set(b.M)
    for u in sorted(keys):
        if abs(a.w.get(u, 0.0) - b.w.get(u, 0.0)) > tol:
            diffs.append(f"w[{u}]")
            break
    return diffs


# ---------------------------------------------------------------------------
# parameters and bounds
# ---------------------------------------------------------------------------


def _check_alpha(alpha):
    if not (isinstance(alpha, (int, float)) and alpha >= 1 and math.isfinite(alpha)):
        raise InvalidAlpha(f"alpha must be a finite real >= 1, got {alpha!r}")


def _check_q(q):
    if q is not None and not 0 < q <= 1:
        raise InvalidArgs(f"q must lie in (0, 1], got {q!r}")


def choose_p(alpha: float, variant: str = "nonmonotone", q: float | None = None,
             theorem5: bool = False) -> float:
    """Probability ``p`` that optimises the matching bound.

    ``variant`` may also carry the bound suffix (``nonmonotone-capped``,
    ``monotone-capped``, ``monotone-theorem5``).
    """
    _check_alpha(alpha)
    _check_q(q)
    if variant == "monotone-theorem5":
        variant, theorem5 = "monotone", True
    elif variant.endswith("-capped"):
        variant = variant[: -len("-capped")]
        if q is None:
            raise InvalidArgs("capped variants need q")
    if variant == "nonmonotone":
        beta = alpha * (q if q is not None else 1.0)
        if beta * 3 <= 1:
            raise InvalidArgs(f"alpha*q={beta} gives p >= 1; q must be at least 1/alpha")
        return 1.0 / (3.0 * beta)
    if variant == "monotone":
        if theorem5:
            return 0.75
        beta = alpha * (q if q is not None else 1.0)
        return (2 * beta + 1) / (2 * (beta + 1))
    raise InvalidArgs(f"unknown variant {variant!r}")


def ratio_bound(alpha: float, variant: str = "nonmonotone", k: int | None = None,
                q: float | None = None) -> float:
    """Closed-form competitive-ratio guarantee."""
    _check_alpha(alpha)
    _check_q(q)
    if k is not None and k < 1:
        raise InvalidArgs(f"k must be >= 1, got {k}")
    k = 1 if k is None else k
    if variant == "nonmonotone":
        return 24 * k * alpha * (3 * alpha + 1)
    if variant == "monotone":
        return 8 * k * alpha * (alpha + 1)
    if variant == "monotone-theorem5":
        return 16 * alpha
    if variant in ("nonmonotone-capped", "monotone-capped"):
        if q is None:
            raise InvalidArgs(f"{variant} needs q")
        if k != 1:
            raise InvalidArgs(f"{variant} has no union-of-k form")
        if variant == "nonmonotone-capped":
            return 24 * alpha * (3 * q * alpha + 1)
        return 8 * alpha * (alpha * q + 1)
    raise InvalidArgs(f"unknown variant {variant!r}; choose from {BOUND_VARIANTS}")


def k_sparse_bounds(k: int) -> dict[str, float]:
    """Bounds for k-sparse linear matroids (Linear is k*e-competitive and
    selects no element with probability above 1/e)."""
    alpha = k * math.e
    return {
        "nonmonotone": ratio_bound(alpha, "nonmonotone-capped", q=1 / math.e),
        "monotone": ratio_bound(alpha, "monotone-capped", q=1 / math.e),
    }


def nonmonotone_guarantee(p: float, alpha: float, q: float = 1.0) -> float:
    """Fraction of f(OPT) guaranteed by the non-monotone simulated algorithm."""
    return p * (1 - 2 * p * q * alpha) / (8 * alpha * (1 + p))


def monotone_guarantee(p: float, alpha: float, q: float = 1.0) -> float:
    """Fraction of f(OPT) guaranteed by the monotone simulated algorithm."""
    return q * (1 - p) * (p / (alpha * q) - 1 + p) / 2


def laminar_beta(p: float, variant: str) -> float:
    if variant == "monotone":
        return 2 * math.e * (1 - p)
    if variant == "nonmonotone":
        return 2 * math.e * (1 - 1 / (1 + p))
    raise InvalidArgs(f"unknown variant {variant!r}")


def laminar_guarantee(p: float, variant: str) -> float:
    """Guarantee fraction for laminar matroids with the greedy-acceptance Linear."""
    if not 0 < p < 1:
        raise InvalidArgs(f"p must lie in (0, 1), got {p}")
    beta = laminar_beta(p, variant)
    if beta >= 1:
        raise BetaOutOfRange(f"beta={beta:.6g} >= 1 at p={p}; the expression is only valid for beta < 1")
    if variant == "monotone":
        return (p / 2) * (1 - p - (2 * beta / (1 - beta) ** 3) * (1 - p) / p)
    return (p / 8) * ((1 - p) / (1 + p) - 2 * beta / (1 - beta) ** 3)


def laminar_ratio(p: float, variant: str) -> float:
    """Competitive ratio (reciprocal guarantee); ``inf`` where the guarantee is not positive."""
    g = laminar_guarantee(p, variant)
    return 1 / g if g > 0 else math.inf


def optimal_laminar_p(variant: str, points: int = 200_001) -> tuple[float, float]:
    """Grid search for the ``p`` maximising the laminar guarantee.

    Returns ``(p, ratio)``.
    """
    import numpy as np

    p = np.linspace(0.0, 1.0, points)[1:-1]
    if variant == "monotone":
        beta = 2 * np.e * (1 - p)
    elif variant == "nonmonotone":
        beta = 2 * np.e * (1 - 1 / (1 + p))
    else:
        raise InvalidArgs(f"unknown variant {variant!r}")
    valid = beta < 1
    p, beta = p[valid], beta[valid]
    if variant == "monotone":
        g = (p / 2) * (1 - p - (2 * beta / (1 - beta) ** 3) * (1 - p) / p)
    else:
        g = (p / 8) * ((1 - p) / (1 + p) - 2 * beta / (1 - beta) ** 3)
    i = int(np.argmax(g))
    return float(p[i]), float(1 / g[i])
