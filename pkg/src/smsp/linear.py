"""Online algorithms for the linear matroid secretary problem.

Every algorithm follows the same life cycle: ``start`` once, then one
``on_arrival`` per element (the return value is the immediate, irrevocable
decision) and finally ``finish`` which returns the selected set.  The
reductions never look at anything but that contract, so any of these can
serve as the black-box ``Linear``.
"""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from typing import Callable, Iterable

from . import matroids as mat
from .errors import IndexOutOfRange, InvalidConfig, MatroidError
from .objectives import max_weight_independent
from .tape import RandomTape

E = math.e


class OnlineAlgorithm(ABC):
    """Sequential-arrival algorithm with immediate decisions."""

    #: competitiveness this algorithm is known to achieve (``None``: unknown)
    alpha: float | None = None
    #: largest probability with which any single element is selected
    q: float | None = None

    def start(self, n: int, matroid: mat.Matroid, tape: RandomTape) -> None:
        self.n = n
        self.matroid = matroid
        self.tape = tape
        self.selected: set[int] = set()
        self.arrived = 0

    @abstractmethod
    def on_arrival(self, u: int, w: float) -> bool:
        ...

    def finish(self) -> frozenset:
        return frozenset(self.selected)

    def _take(self, u: int) -> bool:
        self.selected.add(u)
        return True


LinearFactory = Callable[[], OnlineAlgorithm]


def run_online(alg: OnlineAlgorithm, matroid: mat.Matroid, stream: Iterable[tuple[int, float]],
               tape: RandomTape, n: int | None = None) -> frozenset:
    """Feed ``(element, weight)`` pairs to ``alg`` and return its selection."""
    stream = list(stream)
    alg.start(len(stream) if n is None else n, matroid, tape)
    for u, w in stream:
        alg.on_arrival(u, w)
    return alg.finish()


# ---------------------------------------------------------------------------
# classical secretary
# ---------------------------------------------------------------------------


def dynkin_best_prob(n: int, r: int) -> float:
    """Probability that observing ``r - 1`` elements then taking the first
    record selects the maximum of ``n`` elements."""
    if n < 1 or not 1 <= r <= n:
        raise IndexOutOfRange(f"need 1 <= r <= n, got r={r}, n={n}")
    if r == 1:
        return 1.0 / n
    return (r - 1) / n * math.fsum(1.0 / (j - 1) for j in range(r, n + 1))


def best_threshold(n: int) -> tuple[int, float]:
    """``(r, p(n))`` maximising :func:`dynkin_best_prob`; ties go to the larger r."""
    if n < 1:
        raise IndexOutOfRange(f"need n >= 1, got {n}")
    best_r, best_p = 1, 1.0 / n
    # sum_{j=r}^{n} 1/(j-1) computed incrementally from the top
    tail = 0.0
    tails = {}
    for r in range(n, 1, -1):
        tail += 1.0 / (r - 1)
        tails[r] = tail
    for r in range(2, n + 1):
        p = (r - 1) / n * tails[r]
        if p >= best_p - 1e-15:
            best_r, best_p = r, max(p, best_p)
    return best_r, dynkin_best_prob(n, best_r)


class Dynkin(OnlineAlgorithm):
    """Observe ``r - 1`` elements, then take the first one beating them all.

    With ``capped`` each tentative acceptance survives a coin of probability
    ``1/(e p(n))``; a failed coin ends the run, so no element is selected
    with probability above ``1/e``.
    """

    def __init__(self, capped: bool = False):
        self.capped = capped
        self.alpha = E
        self.q = 1 / E if capped else None

    def start(self, n, matroid, tape):
        super().start(n, matroid, tape)
        self.r, self.p_n = best_threshold(max(n, 1))
        self.best = None  # (weight, id) of the best element seen
        self.done = False

    def on_arrival(self, u, w):
        w = max(0.0, w)
        self.arrived += 1
        key = (w, u)
        record = self.best is None or key > self.best
        if record:
            self.best = key
        if self.done or self.arrived < self.r or not record:
            return False
        self.done = True
        if w <= 0 or not self.matroid.can_add(frozenset(self.selected), u):
            return False
        if self.capped and not self.tape.coin("cap", 1.0 / (E * self.p_n)):
            return False
        return self._take(u)


# ---------------------------------------------------------------------------
# unitary partition matroids
# ---------------------------------------------------------------------------


def alpha_partition(n: int) -> float:
    """Exact competitiveness of :class:`PartitionMSP` on ``n`` elements."""
    if n < 1:
        raise IndexOutOfRange(f"need n >= 1, got {n}")
    t = math.ceil(n / E)
    s = math.fsum(1.0 / (E * j) for j in range(t, n))
    return 1.0 / (t / n - 1 / E + s)


def alpha_partition_table(n_max: int):
    """Vectorised ``alpha_partition(n)`` for ``n = 1..n_max`` (numpy array)."""
    import numpy as np

    n = np.arange(1, n_max + 1, dtype=np.int64)
    t = np.ceil(n / E).astype(np.int64)
    # H[k] = sum_{j=1}^{k} 1/j, so sum_{j=t}^{n-1} 1/j = H[n-1] - H[t-1]
    H = np.concatenate([[0.0], np.cumsum(1.0 / np.arange(1, n_max + 1))])
    s = (H[n - 1] - H[t - 1]) / E
    return 1.0 / (t / n - 1 / E + s)


class PartitionMSP(OnlineAlgorithm):
    """Learning-phase algorithm for unitary partition matroids.

    Needs only the class of each element.  Each optimum element is accepted
    with probability exactly ``1/alpha_partition(n)`` and no element with a
    larger probability.
    """

    def __init__(self, class_of: Callable[[int], object] | None = None):
        self._class_of = class_of

    def start(self, n, matroid, tape):
        super().start(n, matroid, tape)
        if self._class_of is not None:
            self.class_of = self._class_of
        elif isinstance(matroid, mat.PartitionMatroid):
            self.class_of = matroid.class_of.__getitem__
        elif isinstance(matroid, mat.RestrictedMatroid) and isinstance(matroid.base, mat.PartitionMatroid):
            self.class_of = matroid.base.class_of.__getitem__
        else:
            raise MatroidError("PartitionMSP needs a partition matroid or an explicit class map")
        self.alpha = alpha_partition(max(n, 1))
        self.q = 1 / self.alpha
        t = math.ceil(n / E)
        self.X = t - 1 if tape.coin("learning", t - n / E) else t
        self.seen = 0  # |L|
        self.class_max: dict = {}  # class -> best (weight, id) in L
        self.marked: set = set()

    def on_arrival(self, u, w):
        w = max(0.0, w)
        key = (w, u)
        G = self.class_of(u)
        accept = False
        if self.seen >= self.X and G not in self.marked:
            if G in self.class_max:
                if key > self.class_max[G]:
                    self.marked.add(G)
                    accept = True
            else:
                self.marked.add(G)
                # |L| = 0 only when X = 0; accept with probability 1 then
                prob = 1.0 if self.seen == 0 else self.X / self.seen
                accept = self.tape.coin("first-of-class", prob)
        if G not in self.class_max or key > self.class_max[G]:
            self.class_max[G] = key
        self.seen += 1
        if accept and w > 0:
            return self._take(u)
        return False


# ---------------------------------------------------------------------------
# simple and synthetic algorithms
# ---------------------------------------------------------------------------


class GreedyOnlineAcceptance(OnlineAlgorithm):
    """Accept every positive-weight element that keeps the set independent."""

    def __init__(self, alpha: float | None = None):
        self.alpha = alpha

    def on_arrival(self, u, w):
        if w > 0 and self.matroid.can_add(frozenset(self.selected), u):
            return self._take(u)
        return False


class RandomOfK(OnlineAlgorithm):
    """Runs ``k`` independent copies of an inner algorithm side by side.

    The union of the copies' selections is accepted online; ``finish``
    returns one of the ``k`` independent sets chosen uniformly at random.
    Synthetic stand-in for algorithms whose output is a union of ``k``
    independent sets.
    """

    def __init__(self, inner: LinearFactory, k: int):
        if k < 1:
            raise InvalidConfig("k must be >= 1")
        self.inner_factory = inner
        self.k = k
        probe = inner()
        self.alpha = probe.alpha

    def start(self, n, matroid, tape):
        super().start(n, matroid, tape)
        self.copies = [self.inner_factory() for _ in range(self.k)]
        for i, c in enumerate(self.copies):
            c.start(n, matroid, tape.fork(f"copy{i}"))

    def on_arrival(self, u, w):
        took = [c.on_arrival(u, w) for c in self.copies]
        if any(took):
            self.selected.add(u)
            return True
        return False

    def finish(self):
        outs = [c.finish() for c in self.copies]
        return outs[self.tape.randrange("pick", self.k)]


class OfflineOptFilter(OnlineAlgorithm):
    """Offline analysis device: keeps each element of a maximum-weight
    independent set of the whole input with probability ``1/alpha``.

    It defers every decision to ``finish`` and so is *not* an online
    algorithm; it only exists to exercise the bound that assumes each
    optimum element is selected with probability at least ``1/alpha``.
    """

    def __init__(self, alpha: float):
        if alpha < 1:
            raise InvalidConfig("alpha must be >= 1")
        self.alpha = alpha
        self.q = 1 / alpha

    def start(self, n, matroid, tape):
        super().start(n, matroid, tape)
        self.weights: dict[int, float] = {}

    def on_arrival(self, u, w):
        self.weights[u] = max(0.0, w)
        return False

    def finish(self):
        opt = max_weight_independent(self.matroid, self.weights, self.weights)
        return frozenset(u for u in sorted(opt) if self.tape.coin("keep", 1 / self.alpha))


# ---------------------------------------------------------------------------
# Partial-MSP
# ---------------------------------------------------------------------------


class PartialMSPWrapper(OnlineAlgorithm):
    """Turns an algorithm for full streams into one for a stream that skips
    a known set ``L``.

    Elements of ``L`` are fed to the inner algorithm as zero-weight dummies,
    interleaved so that the inner algorithm sees a uniformly random
    permutation of the whole ground set.  Selections from ``L`` are dropped.
    """

    def __init__(self, inner: LinearFactory, known: Iterable[int] = ()):
        self.inner_factory = inner
        self.known = frozenset(known)
        probe = inner()
        self.alpha, self.q = probe.alpha, probe.q

    def start(self, n, matroid, tape):
        super().start(n, matroid, tape)
        self.inner = self.inner_factory()
        self.inner.start(n, matroid, tape.fork("inner"))
        self.pending = sorted(self.known)  # L'
        self.r = n - len(self.known)
        self.fed: list[int] = []

    def _dummy(self):
        i = self.tape.randrange("dummy", len(self.pending))
        self.pending[i], self.pending[-1] = self.pending[-1], self.pending[i]
        u = self.pending.pop()
        self.fed.append(u)
        self.inner.on_arrival(u, 0.0)

    def on_arrival(self, u, w):
        if self.r <= 0:
            raise InvalidConfig("more real arrivals than announced")
        while self.pending and not self.tape.coin("interleave", self.r / (len(self.pending) + self.r)):
            self._dummy()
        self.r -= 1
        self.fed.append(u)
        if self.inner.on_arrival(u, w):
            self.selected.add(u)
            return True
        return False

    def finish(self):
        while self.pending:
            self._dummy()
        return frozenset(self.inner.finish()) - self.known


# ---------------------------------------------------------------------------
# registry
# ---------------------------------------------------------------------------


LINEAR_KEYS = ("dynkin", "dynkin-capped", "partition", "greedy-online")


def linear_factory(key: str, **kw) -> LinearFactory:
    """Factory for a registered Linear algorithm (CLI keys)."""
    if key == "dynkin":
        return lambda: Dynkin(capped=False)
    if key == "dynkin-capped":
        return lambda: Dynkin(capped=True)
    if key == "partition":
        return lambda: PartitionMSP(kw.get("class_of"))
    if key == "greedy-online":
        return lambda: GreedyOnlineAcceptance(kw.get("alpha"))
    if key.startswith("random-of-"):
        k = int(key.rsplit("-", 1)[1])
        return lambda: RandomOfK(lambda: Dynkin(capped=False), k)
    if key == "offline-filter":
        return lambda: OfflineOptFilter(kw.get("alpha") or E)
    raise InvalidConfig(f"unknown Linear key {key!r}; choose from {', '.join(LINEAR_KEYS)}")
