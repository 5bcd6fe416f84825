"""Matroid specifications and exact independence / rank oracles.

Seven families are supported: uniform, partition, graphic, laminar,
transversal, k-sparse linear over GF(2^31 - 1) and restrictions of any of
them.  Elements are non-negative integers.  Oracles are immutable after
construction; all scratch space (union-find forests, matchings, row-reduced
columns) is allocated per query.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Any, Hashable, Iterable, Mapping, Sequence, Union

from .errors import (
    ClassesNotPartition,
    GroundTooLarge,
    InvalidMatroidSpec,
    NonLaminarFamily,
    SparsityViolated,
    UnknownElement,
)

PRIME = 2**31 - 1
MAX_EXHAUSTIVE_N = 16


# ---------------------------------------------------------------------------
# declarative specifications
# ---------------------------------------------------------------------------


@dataclass
class Uniform:
    k: int


@dataclass
class Partition:
    class_of: Mapping[int, Hashable]
    capacity_of: Mapping[Hashable, int] | None = None  # None: unitary

    def capacity(self, cls) -> int:
        if self.capacity_of is None:
            return 1
        return int(self.capacity_of.get(cls, 1))


@dataclass
class Graphic:
    edge_of: Mapping[int, tuple[Hashable, Hashable]]
    vertices: Sequence[Hashable] | None = None


@dataclass
class Laminar:
    family: Sequence[tuple[frozenset, int]]


@dataclass
class Transversal:
    adjacency: Mapping[int, frozenset]


@dataclass
class LinearSparse:
    columns: Mapping[int, Sequence[int]]
    k: int


@dataclass
class Restriction:
    base: "MatroidSpec"
    keep: frozenset


MatroidSpec = Union[Uniform, Partition, Graphic, Laminar, Transversal, LinearSparse, Restriction]


# ---------------------------------------------------------------------------
# oracles
# ---------------------------------------------------------------------------


class Matroid:
    """Independence / rank / span oracle over a finite ground set.

    Subclasses implement ``_independent`` (and ``_rank`` when something better
    than the generic greedy is available).  Public queries validate their
    arguments against the ground set and raise :class:`UnknownElement`.
    """

    kind = "matroid"

    def __init__(self, ground: Iterable[int], spec: MatroidSpec | None = None):
        self.ground = tuple(sorted(set(int(u) for u in ground)))
        self.elements = frozenset(self.ground)
        self.n = len(self.ground)
        self.spec = spec

    def __repr__(self):
        return f"<{type(self).__name__} n={self.n}>"

    def _check(self, S: frozenset):
        if not S <= self.elements:
            raise UnknownElement(S - self.elements)

    def is_independent(self, S: Iterable[int]) -> bool:
        S = frozenset(S)
        self._check(S)
        if not S:
            return True
        return self._independent(S)

    def can_add(self, S: frozenset, u: int) -> bool:
        """Whether ``S + u`` is independent; ``S`` is assumed independent."""
        return self.is_independent(S | {u})

    def rank(self, S: Iterable[int]) -> int:
        S = frozenset(S)
        self._check(S)
        return self._rank(S)

    def is_spanned(self, u: int, S: Iterable[int]) -> bool:
        S = frozenset(S)
        self._check(S | {u})
        return self._rank(S | {u}) == self._rank(S)

    def restrict(self, keep: Iterable[int]) -> "Matroid":
        keep = frozenset(keep)
        self._check(keep)
        return RestrictedMatroid(self, keep)

    def basis(self, S: Iterable[int] = None) -> frozenset:
        """A maximal independent subset of ``S`` (default: the ground set)."""
        S = self.elements if S is None else frozenset(S)
        self._check(S)
        B: set[int] = set()
        for u in sorted(S):
            if self._independent(frozenset(B | {u})):
                B.add(u)
        return frozenset(B)

    # subclass hooks
    def _independent(self, S: frozenset) -> bool:
        raise NotImplementedError

    def _rank(self, S: frozenset) -> int:
        B: set[int] = set()
        for u in sorted(S):
            if self._independent(frozenset(B | {u})):
                B.add(u)
        return len(B)


class UniformMatroid(Matroid):
    kind = "uniform"

    def __init__(self, ground, k: int, spec=None):
        super().__init__(ground, spec)
        if k < 0:
            raise InvalidMatroidSpec(f"uniform rank must be non-negative, got {k}")
        self.k = int(k)

    def _independent(self, S):
        return len(S) <= self.k

    def _rank(self, S):
        return min(len(S), self.k)


class PartitionMatroid(Matroid):
    kind = "partition"

    def __init__(self, ground, class_of: Mapping[int, Hashable], capacity_of=None, spec=None):
        super().__init__(ground, spec)
        missing = [u for u in self.ground if u not in class_of]
        if missing:
            raise ClassesNotPartition(f"elements without a class: {missing}")
        extra = [u for u in class_of if u not in self.elements]
        if extra:
            raise ClassesNotPartition(f"class map names elements outside the ground set: {sorted(extra)}")
        self.class_of = {u: class_of[u] for u in self.ground}
        caps = {}
        for c in set(self.class_of.values()):
            cap = 1 if capacity_of is None else int(capacity_of.get(c, 1))
            if cap < 0:
                raise InvalidMatroidSpec(f"negative capacity for class {c!r}")
            caps[c] = cap
        self.capacity_of = caps
        self.unitary = all(v == 1 for v in caps.values())

    def classes(self) -> dict[Hashable, list[int]]:
        out: dict[Hashable, list[int]] = {}
        for u in self.ground:
            out.setdefault(self.class_of[u], []).append(u)
        return out

    def _counts(self, S):
        counts: dict[Hashable, int] = {}
        for u in S:
            c = self.class_of[u]
            counts[c] = counts.get(c, 0) + 1
        return counts

    def _independent(self, S):
        return all(v <= self.capacity_of[c] for c, v in self._counts(S).items())

    def can_add(self, S, u):
        c = self.class_of[u]
        return sum(1 for v in S if self.class_of[v] == c) < self.capacity_of[c]

    def _rank(self, S):
        return sum(min(v, self.capacity_of[c]) for c, v in self._counts(S).items())


class GraphicMatroid(Matroid):
    kind = "graphic"

    def __init__(self, ground, edge_of, vertices=None, spec=None):
        super().__init__(ground, spec)
        missing = [u for u in self.ground if u not in edge_of]
        if missing:
            raise InvalidMatroidSpec(f"elements without an edge: {missing}")
        self.edge_of = {u: tuple(edge_of[u]) for u in self.ground}
        for u, e in self.edge_of.items():
            if len(e) != 2:
                raise InvalidMatroidSpec(f"edge of element {u} is not a vertex pair: {e!r}")
        if vertices is not None:
            declared = set(vertices)
            for u, (a, b) in self.edge_of.items():
                if a not in declared or b not in declared:
                    raise InvalidMatroidSpec(f"edge of element {u} references an undeclared vertex")

    def _forest_size(self, S):
        parent: dict[Hashable, Hashable] = {}

        def find(x):
            root = x
            while parent.get(root, root) != root:
                root = parent[root]
            while parent.get(x, x) != root:
                parent[x], x = root, parent[x]
            return root

        size = 0
        for u in S:
            a, b = self.edge_of[u]
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[ra] = rb
                size += 1
        return size

    def _independent(self, S):
        return self._forest_size(S) == len(S)

    def _rank(self, S):
        return self._forest_size(S)


class LaminarMatroid(Matroid):
    kind = "laminar"

    def __init__(self, ground, family, spec=None):
        super().__init__(ground, spec)
        fam = []
        for members, cap in family:
            members = frozenset(int(u) for u in members)
            if not members <= self.elements:
                raise InvalidMatroidSpec(f"laminar set {sorted(members)} is not a subset of the ground set")
            if int(cap) < 0:
                raise InvalidMatroidSpec("negative laminar capacity")
            fam.append((members, int(cap)))
        for (A, _), (B, _) in combinations(fam, 2):
            if A & B and not (A <= B or B <= A):
                raise NonLaminarFamily(
                    f"sets {sorted(A)} and {sorted(B)} overlap without nesting"
                )
        self.family = tuple(fam)

    def _independent(self, S):
        return all(len(S & A) <= cap for A, cap in self.family)

    def can_add(self, S, u):
        return all(len(S & A) < cap for A, cap in self.family if u in A)


class TransversalMatroid(Matroid):
    kind = "transversal"

    def __init__(self, ground, adjacency, spec=None):
        super().__init__(ground, spec)
        missing = [u for u in self.ground if u not in adjacency]
        if missing:
            raise InvalidMatroidSpec(f"elements without adjacency: {missing}")
        self.adjacency = {u: tuple(sorted(adjacency[u], key=repr)) for u in self.ground}

    def _matching_size(self, S):
        match: dict[Hashable, int] = {}  # right vertex -> left element

        def augment(u, seen):
            for v in self.adjacency[u]:
                if v in seen:
                    continue
                seen.add(v)
                if v not in match or augment(match[v], seen):
                    match[v] = u
                    return True
            return False

        return sum(1 for u in sorted(S) if augment(u, set()))

    def _independent(self, S):
        return self._matching_size(S) == len(S)

    def _rank(self, S):
        return self._matching_size(S)


def rank_mod_p(vectors: Sequence[Sequence[int]], p: int = PRIME) -> int:
    """Rank over GF(p) of the given vectors by Gaussian elimination."""
    rows = [[x % p for x in v] for v in vectors]
    rank = 0
    ncols = max((len(r) for r in rows), default=0)
    for col in range(ncols):
        pivot = next((i for i in range(rank, len(rows)) if rows[i][col]), None)
        if pivot is None:
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        inv = pow(rows[rank][col], p - 2, p)
        prow = [x * inv % p for x in rows[rank]]
        rows[rank] = prow
        for i in range(len(rows)):
            if i != rank and rows[i][col]:
                factor = rows[i][col]
                rows[i] = [(a - factor * b) % p for a, b in zip(rows[i], prow)]
        rank += 1
        if rank == len(rows):
            break
    return rank


class LinearMatroid(Matroid):
    kind = "linear"

    def __init__(self, ground, columns, k: int, spec=None):
        super().__init__(ground, spec)
        missing = [u for u in self.ground if u not in columns]
        if missing:
            raise InvalidMatroidSpec(f"elements without a column: {missing}")
        dims = {len(columns[u]) for u in self.ground}
        if len(dims) > 1:
            raise InvalidMatroidSpec(f"columns have different lengths: {sorted(dims)}")
        self.columns = {u: tuple(int(x) % PRIME for x in columns[u]) for u in self.ground}
        self.k = int(k)
        for u, col in self.columns.items():
            nnz = sum(1 for x in col if x)
            if nnz > self.k:
                raise SparsityViolated(f"column of element {u} has {nnz} non-zeros, sparsity bound is {self.k}")

    def _rank(self, S):
        return rank_mod_p([self.columns[u] for u in sorted(S)])

    def _independent(self, S):
        return self._rank(S) == len(S)


class RestrictedMatroid(Matroid):
    kind = "restriction"

    def __init__(self, base: Matroid, keep: frozenset, spec=None):
        super().__init__(keep, spec)
        self.base = base

    def _independent(self, S):
        return self.base._independent(S)

    def can_add(self, S, u):
        self._check(frozenset([u]))
        return self.base.can_add(S, u)

    def _rank(self, S):
        return self.base._rank(S)


class ExplicitFamily(Matroid):
    """Set system given by listing its independent sets.

    Nothing is assumed about the listed family; this exists to exercise
    :func:`verify_axioms` on hand-built (possibly broken) oracles.
    """

    kind = "explicit"

    def __init__(self, ground, independent_sets: Iterable[Iterable[int]]):
        super().__init__(ground)
        self.family = frozenset(frozenset(s) for s in independent_sets)
        for s in self.family:
            self._check(s)

    def is_independent(self, S):
        S = frozenset(S)
        self._check(S)
        return S in self.family

    def _independent(self, S):
        return S in self.family

    def _rank(self, S):
        return max((len(s) for s in self.family if s <= S), default=0)


# ---------------------------------------------------------------------------
# construction
# ---------------------------------------------------------------------------


def build_matroid(spec: MatroidSpec, ground: Iterable[int] | int) -> Matroid:
    """Build an oracle for ``spec`` over ``ground`` (a list of ids or a count)."""
    if isinstance(ground, int):
        ground = range(ground)
    ground = list(ground)
    if len(set(ground)) != len(ground):
        raise InvalidMatroidSpec("ground set identifiers are not unique")
    if any(int(u) < 0 for u in ground):
        raise InvalidMatroidSpec("ground set identifiers must be non-negative")
    if isinstance(spec, Uniform):
        return UniformMatroid(ground, spec.k, spec=spec)
    if isinstance(spec, Partition):
        return PartitionMatroid(ground, spec.class_of, spec.capacity_of, spec=spec)
    if isinstance(spec, Graphic):
        return GraphicMatroid(ground, spec.edge_of, spec.vertices, spec=spec)
    if isinstance(spec, Laminar):
        return LaminarMatroid(ground, spec.family, spec=spec)
    if isinstance(spec, Transversal):
        return TransversalMatroid(ground, spec.adjacency, spec=spec)
    if isinstance(spec, LinearSparse):
        return LinearMatroid(ground, spec.columns, spec.k, spec=spec)
    if isinstance(spec, Restriction):
        keep = frozenset(spec.keep)
        if not keep <= set(ground):
            raise UnknownElement(keep - set(ground))
        base = build_matroid(spec.base, ground)
        return RestrictedMatroid(base, keep, spec=spec)
    raise InvalidMatroidSpec(f"unknown matroid specification {spec!r}")


# ---------------------------------------------------------------------------
# exhaustive axiom verification
# ---------------------------------------------------------------------------


@dataclass
class AxiomReport:
    n: int
    ok: bool
    independent_sets: int
    failure: str | None = None  # "empty", "downward_closure" or "exchange"
    counterexample: dict[str, Any] = field(default_factory=dict)

    def __str__(self):
        if self.ok:
            return f"matroid axioms hold (n={self.n}, {self.independent_sets} independent sets)"
        return f"{self.failure} violated: {self.counterexample}"


def _members(mask: int, ground: Sequence[int]) -> frozenset:
    return frozenset(ground[i] for i in range(len(ground)) if mask >> i & 1)


def verify_axioms(m: Matroid) -> AxiomReport:
    """Exhaustively check the independence axioms of ``m``.

    Downward closure is checked on every independent set's immediate
    subsets.  The exchange axiom is checked through the equivalent closure
    form: for every independent ``J`` the set ``cl(J) = J + {e : J+e
    dependent}`` must have rank ``|J|``; a larger independent subset ``I`` of
    ``cl(J)`` is exactly an exchange counterexample for the pair (I, J).
    """
    ground = m.ground
    n = len(ground)
    if n > MAX_EXHAUSTIVE_N:
        raise GroundTooLarge(f"exhaustive verification needs n <= {MAX_EXHAUSTIVE_N}, got {n}")
    size = 1 << n
    indep = [m.is_independent(_members(mask, ground)) for mask in range(size)]
    count = sum(indep)

    if not indep[0]:
        return AxiomReport(n, False, count, "empty", {"I": []})

    for mask in range(size):
        if not indep[mask]:
            continue
        for i in range(n):  # immediate subsets, smallest mask first
            bit = 1 << (n - 1 - i)
            if mask & bit and not indep[mask ^ bit]:
                return AxiomReport(
                    n, False, count, "downward_closure",
                    {"I": sorted(_members(mask, ground)), "subset": sorted(_members(mask ^ bit, ground))},
                )

    # best[S] = mask of a largest independent subset of S
    best = [0] * size
    popcount = [0] * size
    for mask in range(1, size):
        popcount[mask] = popcount[mask >> 1] + (mask & 1)
        if indep[mask]:
            best[mask] = mask
            continue
        b = 0
        rest = mask
        while rest:
            bit = rest & -rest
            rest ^= bit
            cand = best[mask ^ bit]
            if popcount[cand] > popcount[b]:
                b = cand
        best[mask] = b

    for J in range(size):
        if not indep[J]:
            continue
        cl = J
        for i in range(n):
            bit = 1 << i
            if not J & bit and not indep[J | bit]:
                cl |= bit
        I = best[cl]
        if popcount[I] > popcount[J]:
            return AxiomReport(
                n, False, count, "exchange",
                {"I": sorted(_members(I, ground)), "J": sorted(_members(J, ground))},
            )
    return AxiomReport(n, True, count)


# ---------------------------------------------------------------------------
# JSON documents
# ---------------------------------------------------------------------------


def _vertex(v):
    return tuple(v) if isinstance(v, list) else v


def matroid_spec_from_json(doc: Mapping[str, Any]) -> MatroidSpec:
    """Parse the ``matroid`` section of an instance document."""
    kind = doc.get("kind")
    try:
        if kind == "uniform":
            return Uniform(int(doc["k"]))
        if kind == "partition":
            classes = doc["class_of"]
            if isinstance(classes, list):
                class_of = {i: c for i, c in enumerate(classes)}
            else:
                class_of = {int(u): c for u, c in classes.items()}
            caps = doc.get("capacity_of")
            if isinstance(caps, list):
                caps = {i: int(c) for i, c in enumerate(caps)}
            elif caps is not None:
                caps = {_class_key(c, class_of): int(v) for c, v in caps.items()}
            return Partition(class_of, caps)
        if kind == "graphic":
            edges = doc["edge_of"]
            items = enumerate(edges) if isinstance(edges, list) else ((int(u), e) for u, e in edges.items())
            return Graphic({u: (_vertex(e[0]), _vertex(e[1])) for u, e in items}, doc.get("vertices"))
        if kind == "laminar":
            return Laminar([(frozenset(int(u) for u in s), int(cap)) for s, cap in doc["family"]])
        if kind == "transversal":
            adj = doc["adjacency"]
            items = enumerate(adj) if isinstance(adj, list) else ((int(u), a) for u, a in adj.items())
            return Transversal({u: frozenset(_vertex(v) for v in a) for u, a in items})
        if kind == "linear":
            cols = doc["columns"]
            items = enumerate(cols) if isinstance(cols, list) else ((int(u), c) for u, c in cols.items())
            return LinearSparse({u: tuple(int(x) for x in c) for u, c in items}, int(doc["k"]))
        if kind == "restriction":
            return Restriction(matroid_spec_from_json(doc["base"]), frozenset(int(u) for u in doc["keep"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidMatroidSpec(f"malformed {kind!r} matroid document: {exc!r}") from exc
    raise InvalidMatroidSpec(f"unknown matroid kind {kind!r}")


def _class_key(c, class_of):
    # JSON object keys are strings; map back to the type used by class_of
    for v in class_of.values():
        if str(v) == str(c):
            return v
    return c


def matroid_spec_to_json(spec: MatroidSpec) -> dict[str, Any]:
    if isinstance(spec, Uniform):
        return {"kind": "uniform", "k": spec.k}
    if isinstance(spec, Partition):
        doc = {"kind": "partition", "class_of": {str(u): c for u, c in sorted(spec.class_of.items())}}
        if spec.capacity_of is not None:
            doc["capacity_of"] = {str(c): v for c, v in spec.capacity_of.items()}
        return doc
    if isinstance(spec, Graphic):
        doc = {"kind": "graphic", "edge_of": {str(u): list(e) for u, e in sorted(spec.edge_of.items())}}
        if spec.vertices is not None:
            doc["vertices"] = list(spec.vertices)
        return doc
    if isinstance(spec, Laminar):
        return {"kind": "laminar", "family": [[sorted(s), cap] for s, cap in spec.family]}
    if isinstance(spec, Transversal):
        return {"kind": "transversal",
                "adjacency": {str(u): sorted(a, key=repr) for u, a in sorted(spec.adjacency.items())}}
    if isinstance(spec, LinearSparse):
        return {"kind": "linear", "k": spec.k,
                "columns": {str(u): list(c) for u, c in sorted(spec.columns.items())}}
    if isinstance(spec, Restriction):
        return {"kind": "restriction", "base": matroid_spec_to_json(spec.base), "keep": sorted(spec.keep)}
    raise InvalidMatroidSpec(f"unknown matroid specification {spec!r}")
