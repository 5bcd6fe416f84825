"""Submodular value oracles, the convolution f_w, greedy and offline baselines.

Set values are computed as pure functions of the set (never of the order in
which a caller built it), so two code paths that reach the same set see
bit-identical values.  This is what makes per-seed coupling tests exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, Mapping, Sequence, Union

from . import matroids as mat
from .errors import (
    ElementAlreadyInSet,
    GroundTooLarge,
    GroundTooLargeForExactOpt,
    ObjectiveError,
    SetTooLargeForExactConvolution,
    UnknownElement,
)

TOL = 1e-9
MAX_CONVOLUTION_SET = 20
MAX_OPT_N = 20
MAX_CHECK_N = 10


# ---------------------------------------------------------------------------
# declarative specifications
# ---------------------------------------------------------------------------


@dataclass
class Linear:
    w: Mapping[int, float]


@dataclass
class Coverage:
    covers: Mapping[int, Iterable[Any]]
    item_weight: Mapping[Any, float] | None = None  # None: unit weights


@dataclass
class MaxWeight:
    w: Mapping[int, float]


@dataclass
class WeightedRank:
    inner: mat.MatroidSpec
    w: Mapping[int, float]


@dataclass
class Cut:
    """Weighted cut function of a graph whose vertices are the elements."""

    edges: Sequence[tuple[int, int, float]]


@dataclass
class Shifted:
    inner: "ObjectiveSpec"
    constant: float


ObjectiveSpec = Union[Linear, Coverage, MaxWeight, WeightedRank, Cut, Shifted]


class WeightVector(dict):
    """Element -> weight map; unassigned elements weigh 0, negatives clamp to 0."""

    def __init__(self, items: Mapping[int, float] | Iterable[tuple[int, float]] = ()):
        super().__init__()
        if isinstance(items, Mapping):
            items = items.items()
        for u, x in items:
            self[u] = x

    def __setitem__(self, u, x):
        super().__setitem__(u, max(0.0, float(x)))

    def __missing__(self, u):
        return 0.0

    def total(self, S: Iterable[int]) -> float:
        return math.fsum(self[u] for u in S)


# ---------------------------------------------------------------------------
# oracles
# ---------------------------------------------------------------------------


class Objective:
    """Value oracle for a set function over ``ground``.

    ``call_count`` counts value queries.  It is a plain counter: oracles are
    not shared between threads (parallel trials run in separate processes).
    """

    monotone: bool | None = None

    def __init__(self, ground: Iterable[int], spec: ObjectiveSpec | None = None):
        self.ground = tuple(sorted(set(int(u) for u in ground)))
        self.elements = frozenset(self.ground)
        self.n = len(self.ground)
        self.spec = spec
        self.call_count = 0

    def __repr__(self):
        return f"<{type(self).__name__} n={self.n}>"

    def __call__(self, S: Iterable[int]) -> float:
        return self.value(S)

    def value(self, S: Iterable[int]) -> float:
        S = frozenset(S)
        if not S <= self.elements:
            raise UnknownElement(S - self.elements)
        self.call_count += 1
        return self._value(S)

    def marginal(self, u: int, S: Iterable[int]) -> float:
        S = frozenset(S)
        if u in S:
            raise ElementAlreadyInSet(f"element {u} is already in the set")
        return self.value(S | {u}) - self.value(S)

    def subset_values(self, elements: Sequence[int]) -> list[float]:
        """Values of all subsets of ``elements``, indexed by bitmask."""
        elements = list(elements)
        out = []
        for mask in range(1 << len(elements)):
            out.append(self.value(frozenset(elements[i] for i in range(len(elements)) if mask >> i & 1)))
        return out

    def _value(self, S: frozenset) -> float:
        raise NotImplementedError


class LinearObjective(Objective):
    monotone = True

    def __init__(self, ground, w, spec=None):
        super().__init__(ground, spec)
        self.w = {u: float(w.get(u, 0.0)) for u in self.ground}
        if any(x < 0 for x in self.w.values()):
            raise ObjectiveError("linear weights must be non-negative")

    def _value(self, S):
        return math.fsum(self.w[u] for u in S)


class CoverageObjective(Objective):
    monotone = True

    def __init__(self, ground, covers, item_weight=None, spec=None):
        super().__init__(ground, spec)
        items = sorted({i for u in self.ground for i in covers.get(u, ())}, key=repr)
        index = {item: k for k, item in enumerate(items)}
        self.items = items
        self.unit = item_weight is None
        self.item_weight = [1.0 if item_weight is None else float(item_weight.get(i, 1.0)) for i in items]
        if any(x < 0 for x in self.item_weight):
            raise ObjectiveError("item weights must be non-negative")
        self.mask = {}
        for u in self.ground:
            m = 0
            for i in covers.get(u, ()):
                m |= 1 << index[i]
            self.mask[u] = m

    def _weight(self, m: int) -> float:
        if self.unit:
            return float(bin(m).count("1"))
        w = self.item_weight
        return math.fsum(w[k] for k in range(m.bit_length()) if m >> k & 1)

    def _value(self, S):
        m = 0
        for u in S:
            m |= self.mask[u]
        return self._weight(m)

    def subset_values(self, elements):
        elements = list(elements)
        unions = [0] * (1 << len(elements))
        for mask in range(1, len(unions)):
            low = mask & -mask
            unions[mask] = unions[mask ^ low] | self.mask[elements[low.bit_length() - 1]]
        self.call_count += len(unions)
        return [self._weight(m) for m in unions]


class MaxWeightObjective(Objective):
    monotone = True

    def __init__(self, ground, w, spec=None):
        super().__init__(ground, spec)
        self.w = {u: float(w.get(u, 0.0)) for u in self.ground}
        if any(x < 0 for x in self.w.values()):
            raise ObjectiveError("weights must be non-negative")

    def _value(self, S):
        return max((self.w[u] for u in S), default=0.0)


class WeightedRankObjective(Objective):
    """Weight of a maximum-weight independent subset in an inner matroid."""

    monotone = True

    def __init__(self, ground, inner: mat.Matroid, w, spec=None):
        super().__init__(ground, spec)
        self.inner = inner
        self.w = {u: float(w.get(u, 0.0)) for u in self.ground}
        if any(x < 0 for x in self.w.values()):
            raise ObjectiveError("weights must be non-negative")
        self._order = sorted(self.ground, key=lambda u: (-self.w[u], u))

    def _value(self, S):
        B = frozenset()
        for u in self._order:
            if u in S and self.inner.can_add(B, u):
                B = B | {u}
        return math.fsum(self.w[u] for u in B)


class CutObjective(Objective):
    monotone = False

    def __init__(self, ground, edges, spec=None):
        super().__init__(ground, spec)
        self.edges = []
        for a, b, x in edges:
            if a not in self.elements or b not in self.elements:
                raise UnknownElement({a, b} - self.elements)
            if x < 0:
                raise ObjectiveError("cut edge weights must be non-negative")
            self.edges.append((int(a), int(b), float(x)))
        self.adj: dict[int, list[tuple[int, float]]] = {u: [] for u in self.ground}
        for a, b, x in self.edges:
            if a != b:
                self.adj[a].append((b, x))
                self.adj[b].append((a, x))

    def _value(self, S):
        # fsum is exactly rounded, so the result does not depend on iteration order
        adj = self.adj
        return math.fsum(x for u in S for v, x in adj[u] if v not in S)


class ShiftedObjective(Objective):
    def __init__(self, inner: Objective, constant: float, spec=None):
        super().__init__(inner.ground, spec)
        if constant < 0:
            raise ObjectiveError("shift must be non-negative")
        self.inner = inner
        self.constant = float(constant)
        self.monotone = inner.monotone

    def _value(self, S):
        return self.inner._value(S) + self.constant

    def subset_values(self, elements):
        vals = self.inner.subset_values(elements)
        self.call_count += len(vals)
        return [v + self.constant for v in vals]


class FunctionObjective(Objective):
    """Wraps an arbitrary callable on frozensets (synthetic and test objectives)."""

    def __init__(self, ground, fn: Callable[[frozenset], float], monotone: bool | None = None):
        super().__init__(ground)
        self.fn = fn
        self.monotone = monotone

    def _value(self, S):
        return float(self.fn(S))


def build_objective(spec: ObjectiveSpec, ground: Iterable[int] | int) -> Objective:
    if isinstance(ground, int):
        ground = range(ground)
    ground = list(ground)
    if isinstance(spec, Linear):
        return LinearObjective(ground, spec.w, spec=spec)
    if isinstance(spec, Coverage):
        return CoverageObjective(ground, spec.covers, spec.item_weight, spec=spec)
    if isinstance(spec, MaxWeight):
        return MaxWeightObjective(ground, spec.w, spec=spec)
    if isinstance(spec, WeightedRank):
        return WeightedRankObjective(ground, mat.build_matroid(spec.inner, ground), spec.w, spec=spec)
    if isinstance(spec, Cut):
        return CutObjective(ground, spec.edges, spec=spec)
    if isinstance(spec, Shifted):
        return ShiftedObjective(build_objective(spec.inner, ground), spec.constant, spec=spec)
    raise ObjectiveError(f"unknown objective specification {spec!r}")


# ---------------------------------------------------------------------------
# convolution, greedy, offline optimum
# ---------------------------------------------------------------------------


def convolve_fw(f: Objective, w: Mapping[int, float], S: Iterable[int]) -> float:
    """Exact ``f_w(S) = min over A subset of S of f(A) + w(S - A)``.

    Brute force over all ``2^|S|`` subsets; analysis and tests only.
    """
    S = sorted(set(S))
    if len(S) > MAX_CONVOLUTION_SET:
        raise SetTooLargeForExactConvolution(
            f"exact convolution enumerates 2^|S| subsets; |S|={len(S)} > {MAX_CONVOLUTION_SET}"
        )
    if not S:
        return f.value(())
    ws = [max(0.0, float(w.get(u, 0.0))) for u in S]
    values = f.subset_values(S)
    full = (1 << len(S)) - 1
    wsum = [0.0] * (full + 1)
    for mask in range(1, full + 1):
        low = mask & -mask
        wsum[mask] = wsum[mask ^ low] + ws[low.bit_length() - 1]
    return min(values[A] + wsum[full ^ A] for A in range(full + 1))


def greedy_process(
    f: Objective,
    m: mat.Matroid,
    elements: Iterable[int],
    decide: Callable[[int, float, bool, frozenset], bool],
) -> list[int]:
    """Run the greedy loop, letting ``decide`` choose which elements join M.

    Elements are processed one at a time, each time taking the remaining
    element with the largest marginal ``f(u | M)`` (ties: smallest id).
    ``decide(u, gain, feasible, M)`` is called for every processed element,
    where ``feasible`` says whether ``M + u`` is independent, and returns
    whether ``u`` is added to ``M``.  Returns M in insertion order.
    """
    remaining = sorted(set(elements))
    M: list[int] = []
    Mset = frozenset()
    fM = f.value(Mset)
    gains = {u: f.value(Mset | {u}) - fM for u in remaining}
    while remaining:
        best = remaining[0]
        best_gain = gains[best]
        for v in remaining:
            g = gains[v]
            if g > best_gain:  # strict: ties keep the smaller id
                best, best_gain = v, g
        remaining.remove(best)
        del gains[best]
        feasible = m.can_add(Mset, best)
        if decide(best, best_gain, feasible, Mset):
            if not feasible:
                raise ObjectiveError(f"greedy asked to add {best}, which breaks independence")
            M.append(best)
            Mset = Mset | {best}
            fM = f.value(Mset)
            for v in remaining:
                gains[v] = f.value(Mset | {v}) - fM
    return M


def greedy_trace(f: Objective, m: mat.Matroid, elements: Iterable[int]) -> list[tuple[int, float]]:
    """Greedy solution as ``[(u, f(u | M_u)), ...]`` in insertion order."""
    trace: list[tuple[int, float]] = []

    def decide(u, gain, feasible, M):
        if feasible and gain >= 0:
            trace.append((u, gain))
            return True
        return False

    greedy_process(f, m, elements, decide)
    return trace


def greedy(f: Objective, m: mat.Matroid, elements: Iterable[int]) -> list[int]:
    """Greedy that stops taking elements once every marginal is negative.

    Returns the solution in insertion order.
    """
    return [u for u, _ in greedy_trace(f, m, elements)]


def max_weight_independent(m: mat.Matroid, w: Mapping[int, float], elements: Iterable[int]) -> frozenset:
    """Maximum ``w``-weight independent subset of ``elements`` (linear greedy)."""
    B = frozenset()
    for u in sorted(elements, key=lambda v: (-w.get(v, 0.0), v)):
        if w.get(u, 0.0) > 0 and m.can_add(B, u):
            B = B | {u}
    return B


def independent_sets(m: mat.Matroid, elements: Iterable[int] | None = None):
    """Yield every independent subset of ``elements`` (each exactly once)."""
    pool = sorted(m.elements if elements is None else set(elements))

    def extend(S: frozenset, start: int):
        yield S
        for i in range(start, len(pool)):
            u = pool[i]
            if m.can_add(S, u):
                yield from extend(S | {u}, i + 1)

    yield from extend(frozenset(), 0)


def offline_opt(f: Objective, m: mat.Matroid) -> tuple[frozenset, float]:
    """Exact maximizer of ``f`` over the independent sets of ``m``."""
    if m.n > MAX_OPT_N:
        raise GroundTooLargeForExactOpt(f"exact optimum enumerates independent sets; n={m.n} > {MAX_OPT_N}")
    best, best_value = frozenset(), f.value(())
    for S in independent_sets(m):
        v = f.value(S)
        if v > best_value:
            best, best_value = S, v
    return best, best_value


# ---------------------------------------------------------------------------
# exhaustive property checks
# ---------------------------------------------------------------------------


@dataclass
class SubmodularityReport:
    n: int
    ok: bool
    nonnegative: bool
    submodular: bool
    monotone: bool
    modular: bool
    counterexample: dict[str, Any] = field(default_factory=dict)

    def __str__(self):
        if self.ok:
            extra = ", modular" if self.modular else ""
            return f"non-negative submodular (n={self.n}{', monotone' if self.monotone else ''}{extra})"
        return f"violation: {self.counterexample}"


def value_table(f: Objective | Callable[[frozenset], float], ground: Sequence[int]) -> list[float]:
    if isinstance(f, Objective):
        return f.subset_values(ground)
    return [float(f(frozenset(ground[i] for i in range(len(ground)) if mask >> i & 1)))
            for mask in range(1 << len(ground))]


def check_submodular(f, ground: Sequence[int] | None = None, tol: float = TOL) -> SubmodularityReport:
    """Exhaustively check non-negativity and diminishing returns.

    Diminishing returns is verified in its local form
    ``f(S+a) + f(S+b) >= f(S+a+b) + f(S)``, which is equivalent to the
    general ``f(a | A) >= f(a | B)`` for ``A`` a subset of ``B``.  ``f`` may
    be an :class:`Objective` or any callable on frozensets (then ``ground``
    is required).
    """
    if ground is None:
        ground = f.ground
    ground = list(ground)
    n = len(ground)
    if n > MAX_CHECK_N:
        raise GroundTooLarge(f"exhaustive check needs n <= {MAX_CHECK_N}, got {n}")
    vals = value_table(f, ground)

    def members(mask):
        return sorted(ground[i] for i in range(n) if mask >> i & 1)

    report = SubmodularityReport(n, True, True, True, True, True)
    for mask, v in enumerate(vals):
        if v < -tol:
            report.ok = report.nonnegative = False
            report.counterexample = {"kind": "negative", "S": members(mask), "value": v}
            break
    for mask in range(1 << n):
        for i in range(n):
            a = 1 << i
            if mask & a:
                continue
            if vals[mask | a] < vals[mask] - tol:
                report.monotone = False
            for j in range(i + 1, n):
                b = 1 << j
                if mask & b:
                    continue
                slack = vals[mask | a] + vals[mask | b] - vals[mask | a | b] - vals[mask]
                if abs(slack) > tol:
                    report.modular = False
                if slack < -tol and report.submodular:
                    report.submodular = False
                    if report.ok:
                        report.ok = False
                        report.counterexample = {
                            "kind": "diminishing_returns",
                            "A": members(mask), "B": members(mask | b), "e": ground[i],
                            "gain_A": vals[mask | a] - vals[mask],
                            "gain_B": vals[mask | a | b] - vals[mask | b],
                        }
    return report


def convolution_table(f: Objective, w: Mapping[int, float], ground: Sequence[int] | None = None) -> list[float]:
    """``f_w`` on every subset of ``ground`` (bitmask-indexed).

    Uses ``f_w(S) = min(f(S), min over u in S of f_w(S - u) + w(u))``: an
    optimal ``A`` either is ``S`` itself or leaves out some ``u`` that is
    then paid for by ``w``.
    """
    ground = list(f.ground if ground is None else ground)
    if len(ground) > MAX_CONVOLUTION_SET:
        raise SetTooLargeForExactConvolution(f"|ground|={len(ground)} > {MAX_CONVOLUTION_SET}")
    ws = [max(0.0, float(w.get(u, 0.0))) for u in ground]
    table = f.subset_values(ground)
    for mask in range(1, len(table)):
        best = table[mask]
        m = mask
        while m:
            low = m & -m
            m ^= low
            cand = table[mask ^ low] + ws[low.bit_length() - 1]
            if cand < best:
                best = cand
        table[mask] = best
    return table


def convolution_function(f: Objective, w: Mapping[int, float]) -> Callable[[frozenset], float]:
    """``f_w`` as a callable set function (for exhaustive property checks)."""
    return lambda S: convolve_fw(f, w, S)


# ---------------------------------------------------------------------------
# JSON documents
# ---------------------------------------------------------------------------


def _weights(doc) -> dict[int, float]:
    if isinstance(doc, list):
        return {i: float(x) for i, x in enumerate(doc)}
    return {int(u): float(x) for u, x in doc.items()}


def objective_spec_from_json(doc: Mapping[str, Any]) -> ObjectiveSpec:
    kind = doc.get("kind")
    try:
        if kind == "linear":
            return Linear(_weights(doc["w"]))
        if kind == "maxweight":
            return MaxWeight(_weights(doc["w"]))
        if kind == "coverage":
            cov = doc["covers"]
            items = enumerate(cov) if isinstance(cov, list) else ((int(u), c) for u, c in cov.items())
            iw = doc.get("item_weight")
            if isinstance(iw, list):
                iw = {i: float(x) for i, x in enumerate(iw)}
            elif iw is not None:
                iw = {_item_key(k): float(x) for k, x in iw.items()}
            return Coverage({u: frozenset(c) for u, c in items}, iw)
        if kind == "weighted_rank":
            return WeightedRank(mat.matroid_spec_from_json(doc["inner"]), _weights(doc["w"]))
        if kind == "cut":
            return Cut([(int(a), int(b), float(x)) for a, b, x in doc["edges"]])
        if kind == "shifted":
            return Shifted(objective_spec_from_json(doc["inner"]), float(doc["constant"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise ObjectiveError(f"malformed {kind!r} objective document: {exc!r}") from exc
    raise ObjectiveError(f"unknown objective kind {kind!r}")


def _item_key(k: str):
    try:
        return int(k)
    except ValueError:
        return k


def objective_spec_to_json(spec: ObjectiveSpec) -> dict[str, Any]:
    if isinstance(spec, Linear):
        return {"kind": "linear", "w": {str(u): x for u, x in sorted(spec.w.items())}}
    if isinstance(spec, MaxWeight):
        return {"kind": "maxweight", "w": {str(u): x for u, x in sorted(spec.w.items())}}
    if isinstance(spec, Coverage):
        doc = {"kind": "coverage", "covers": {str(u): sorted(c, key=repr) for u, c in sorted(spec.covers.items())}}
        if spec.item_weight is not None:
            doc["item_weight"] = {str(i): x for i, x in spec.item_weight.items()}
        return doc
    if isinstance(spec, WeightedRank):
        return {"kind": "weighted_rank", "inner": mat.matroid_spec_to_json(spec.inner),
                "w": {str(u): x for u, x in sorted(spec.w.items())}}
    if isinstance(spec, Cut):
        return {"kind": "cut", "edges": [[a, b, x] for a, b, x in spec.edges]}
    if isinstance(spec, Shifted):
        return {"kind": "shifted", "inner": objective_spec_to_json(spec.inner), "constant": spec.constant}
    raise ObjectiveError(f"unknown objective specification {spec!r}")
