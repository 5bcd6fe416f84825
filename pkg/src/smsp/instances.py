"""Instance generators and the JSON instance document.

Generator strings combine one matroid term and one objective term, with an
optional shift::

    uniform(n=12,k=3)+coverage(universe=20)
    partition(n=20,classes=4)+maxweight
    uniform(n=10,k=2)+cut(density=0.5)+shift(c=1)

The same ``(spec, seed)`` always yields the same instance.  Arrival orders
are not part of an instance; they are drawn per trial.
"""

from __future__ import annotations

import json
import math
import random
import re
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Any, Mapping

from . import matroids as mat
from . import objectives as obj
from .errors import InvalidConfig, UnknownGenerator
from .reduction import Instance

_TERM = re.compile(r"^\s*([a-z_]+)\s*(?:\((.*)\))?\s*$")

MATROID_GENERATORS = ("uniform", "partition", "laminar", "graphic", "transversal", "linear")
OBJECTIVE_GENERATORS = ("coverage", "linear", "maxweight", "weighted_rank", "cut")


def _parse_term(term: str) -> tuple[str, dict[str, Any]]:
    m = _TERM.match(term)
    if not m:
        raise UnknownGenerator(f"cannot parse generator term {term!r}")
    name, args = m.group(1), m.group(2)
    kw: dict[str, Any] = {}
    if args:
        for part in args.split(","):
            if not part.strip():
                continue
            if "=" not in part:
                raise UnknownGenerator(f"generator arguments must be key=value, got {part!r}")
            k, v = (s.strip() for s in part.split("=", 1))
            try:
                kw[k] = int(v)
            except ValueError:
                try:
                    kw[k] = float(v)
                except ValueError:
                    kw[k] = v
    return name, kw


def parse_generator(spec: str) -> list[tuple[str, dict[str, Any]]]:
    # split on '+' outside parentheses
    terms, depth, cur = [], 0, ""
    for ch in spec:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == "+" and depth == 0:
            terms.append(cur)
            cur = ""
        else:
            cur += ch
    terms.append(cur)
    return [_parse_term(t) for t in terms]


def _weights(rng: random.Random, n: int, lo=0.0, hi=1.0) -> dict[int, float]:
    return {u: round(rng.uniform(lo, hi), 6) for u in range(n)}


def _matroid_spec(name: str, kw: dict, rng: random.Random) -> tuple[mat.MatroidSpec, int]:
    n = int(kw.get("n", 10))
    if n < 0:
        raise InvalidConfig("n must be >= 0")
    if name == "uniform":
        return mat.Uniform(int(kw.get("k", 1))), n
    if name == "partition":
        c = max(1, min(int(kw.get("classes", 2)), max(n, 1)))
        # every class non-empty: deal a shuffled ground set round-robin
        order = list(range(n))
        rng.shuffle(order)
        return mat.Partition({u: i % c for i, u in enumerate(order)}), n
    if name == "laminar":
        # top-level blocks, each split once more; random capacities
        blocks = max(1, int(kw.get("blocks", 2)))
        order = list(range(n))
        rng.shuffle(order)
        family = []
        for b in range(blocks):
            block = order[b::blocks]
            if not block:
                continue
            family.append((frozenset(block), rng.randint(1, max(1, len(block) - 1))))
            half = block[: len(block) // 2]
            if len(half) >= 2:
                family.append((frozenset(half), 1))
        if n:
            family.append((frozenset(range(n)), int(kw.get("cap", max(1, blocks)))))
        return mat.Laminar(family), n
    if name == "graphic":
        v = max(2, int(kw.get("vertices", max(2, n // 2 + 1))))
        edges = {}
        for u in range(n):
            a, b = rng.sample(range(v), 2)
            edges[u] = (a, b)
        return mat.Graphic(edges, vertices=list(range(v))), n
    if name == "transversal":
        right = max(1, int(kw.get("right", max(1, n // 2))))
        deg = max(1, int(kw.get("degree", 2)))
        adj = {u: frozenset(rng.sample(range(right), min(deg, right))) for u in range(n)}
        return mat.Transversal(adj), n
    if name == "linear":
        dim = max(1, int(kw.get("dim", 3)))
        k = max(1, min(int(kw.get("k", 2)), dim))
        cols = {}
        for u in range(n):
            vec = [0] * dim
            for i in rng.sample(range(dim), rng.randint(1, k)):
                vec[i] = rng.randrange(1, mat.PRIME)
            cols[u] = vec
        return mat.LinearSparse(cols, k), n
    raise UnknownGenerator(f"unknown matroid generator {name!r}; choose from {MATROID_GENERATORS}")


def _objective_spec(name: str, kw: dict, n: int, rng: random.Random) -> obj.ObjectiveSpec:
    if name == "coverage":
        universe = max(1, int(kw.get("universe", 2 * n or 1)))
        per = max(1, int(kw.get("per", 3)))
        covers = {u: frozenset(rng.sample(range(universe), rng.randint(1, min(per, universe))))
                  for u in range(n)}
        iw = None
        if kw.get("weighted"):
            iw = {i: round(rng.uniform(0.1, 1.0), 6) for i in range(universe)}
        return obj.Coverage(covers, iw)
    if name == "linear":
        return obj.Linear(_weights(rng, n))
    if name == "maxweight":
        return obj.MaxWeight(_weights(rng, n))
    if name == "weighted_rank":
        return obj.WeightedRank(mat.Uniform(int(kw.get("k", 2))), _weights(rng, n))
    if name == "cut":
        density = float(kw.get("density", 0.5))
        edges = [(a, b, round(rng.uniform(0.1, 1.0), 6))
                 for a in range(n) for b in range(a + 1, n) if rng.random() < density]
        return obj.Cut(edges)
    raise UnknownGenerator(f"unknown objective generator {name!r}; choose from {OBJECTIVE_GENERATORS}")


@dataclass
class InstanceSpec:
    """Declarative, JSON-serialisable description of an instance."""

    n: int
    matroid: mat.MatroidSpec
    objective: obj.ObjectiveSpec
    name: str = "instance"
    meta: dict | None = None

    def build(self) -> Instance:
        m = mat.build_matroid(self.matroid, self.n)
        f = obj.build_objective(self.objective, self.n)
        return Instance(m, f, self.name, dict(self.meta or {}))


def generate_spec(spec: str, seed: int = 0, name: str | None = None) -> InstanceSpec:
    terms = parse_generator(spec)
    if len(terms) < 2:
        raise UnknownGenerator(f"generator {spec!r} needs a matroid term and an objective term")
    rng = random.Random(f"{spec}|{seed}")
    (mname, mkw), (oname, okw), *rest = terms
    mspec, n = _matroid_spec(mname, mkw, rng)
    ospec = _objective_spec(oname, okw, n, rng)
    for tname, tkw in rest:
        if tname != "shift":
            raise UnknownGenerator(f"only 'shift' may follow the objective term, got {tname!r}")
        ospec = obj.Shifted(ospec, float(tkw.get("c", 1.0)))
    return InstanceSpec(n, mspec, ospec, name or spec, {"generator": spec, "seed": seed})


def generate_instance(spec: str, seed: int = 0, name: str | None = None) -> Instance:
    """Deterministic instance for ``(spec, seed)``."""
    return generate_spec(spec, seed, name).build()


# ---------------------------------------------------------------------------
# JSON documents
# ---------------------------------------------------------------------------


def spec_to_json(s: InstanceSpec) -> dict:
    doc = {"name": s.name, "ground": s.n,
           "matroid": mat.matroid_spec_to_json(s.matroid),
           "objective": obj.objective_spec_to_json(s.objective)}
    if s.meta:
        doc["meta"] = s.meta
    return doc


def spec_from_json(doc: Mapping[str, Any]) -> InstanceSpec:
    ground = doc.get("ground")
    if isinstance(ground, list):
        if sorted(ground) != list(range(len(ground))):
            raise InvalidConfig("ground identifiers must be 0..n-1")
        n = len(ground)
    elif isinstance(ground, int):
        n = ground
    else:
        raise InvalidConfig("instance document needs 'ground' (count or id list)")
    if "matroid" not in doc or "objective" not in doc:
        raise InvalidConfig("instance document needs 'matroid' and 'objective' sections")
    return InstanceSpec(n, mat.matroid_spec_from_json(doc["matroid"]),
                        obj.objective_spec_from_json(doc["objective"]),
                        doc.get("name", "instance"), doc.get("meta"))


def load_instance(path: str | Path) -> Instance:
    with open(path) as fh:
        return spec_from_json(json.load(fh)).build()


def save_instance(s: InstanceSpec, path: str | Path) -> None:
    with open(path, "w") as fh:
        json.dump(spec_to_json(s), fh, indent=1, sort_keys=True)
        fh.write("\n")


def resolve_instance(ref: str, seed: int = 0) -> Instance:
    """A path to a JSON document, a shipped instance name, or a generator string."""
    if Path(ref).is_file():
        return load_instance(ref)
    names = {e["name"]: e for e in shipped_manifest()}
    if ref in names:
        return shipped_instance(ref)
    return generate_instance(ref, seed)


# ---------------------------------------------------------------------------
# shipped instances
# ---------------------------------------------------------------------------


def shipped_manifest() -> list[dict]:
    """Entries of the shipped-instance manifest (generator, seed, Linear)."""
    text = resources.files("smsp").joinpath("data/manifest.json").read_text()
    return json.loads(text)["instances"]


def shipped_instance(name: str) -> Instance:
    for e in shipped_manifest():
        if e["name"] == name:
            inst = generate_instance(e["generator"], e["seed"], name)
            inst.meta.update({k: v for k, v in e.items() if k not in ("generator", "seed")})
            return inst
    raise UnknownGenerator(f"no shipped instance named {name!r}")


def shipped_instances() -> list[Instance]:
    return [shipped_instance(e["name"]) for e in shipped_manifest()]


def linear_alpha(key: str, inst: Instance) -> tuple[float, float | None]:
    """``(alpha, q)`` that the named Linear provably achieves on ``inst``.

    * ``partition``: alpha(n) with per-element cap 1/alpha(n)
    * ``dynkin-capped``: takes the heaviest element with probability exactly
      1/e, hence alpha = e * rank and q = 1/e
    * ``dynkin``: alpha = e * rank
    * ``greedy-online`` on uniform rank-k matroids: each optimum element is
      among the first k positive arrivals with probability >= k/n, so alpha = n/k
    """
    from .linear import alpha_partition

    n = max(inst.n, 1)
    r = max(inst.matroid.rank(inst.matroid.elements), 1) if inst.n else 1
    if key == "partition":
        a = alpha_partition(n)
        return a, 1 / a
    if key == "dynkin-capped":
        return math.e * r, 1 / math.e
    if key == "dynkin":
        return math.e * r, None
    if key == "greedy-online":
        if not isinstance(inst.matroid, mat.UniformMatroid):
            raise InvalidConfig("greedy-online has a known alpha only on uniform matroids")
        return max(1.0, n / max(min(inst.matroid.k, n), 1)), None
    raise InvalidConfig(f"no known alpha for Linear {key!r}")
