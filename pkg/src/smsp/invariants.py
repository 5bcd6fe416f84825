"""Registered invariants: exhaustive oracle checks and Monte Carlo lemma checks.

Every check returns one :class:`InvariantResult`.  Statistical equalities
pass when the paired mean difference is within 4 standard errors of zero;
one-sided bounds pass when the mean clears the bound minus 4 standard
errors.  Checks about selection probabilities of single elements use the
3-standard-error convention of the acceptance criteria.  All randomness is
seeded, so a report is reproducible.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, field
from typing import Callable, Iterable

import numpy as np

from . import instances as gen
from . import linear as lin
from . import matroids as mat
from . import objectives as obj
from . import reduction as red
from .tape import RandomTape

PASS, FAIL, SKIPPED = "pass", "fail", "skipped"
EQ_SE = 4.0
ONE_SIDED_SE = 4.0
PROB_SE = 3.0
TOL = 1e-9


@dataclass
class InvariantResult:
    name: str
    status: str
    measured: float | None
    threshold: float | None
    anchor: str
    detail: str = ""

    @property
    def ok(self) -> bool:
        return self.status != FAIL


@dataclass
class InvariantReport:
    entries: list[InvariantResult] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(e.ok for e in self.entries)

    def by_name(self, name: str) -> InvariantResult:
        for e in self.entries:
            if e.name == name:
                return e
        raise KeyError(name)

    def failures(self) -> list[InvariantResult]:
        return [e for e in self.entries if e.status == FAIL]


def _result(name, ok, measured, threshold, anchor, detail="") -> InvariantResult:
    return InvariantResult(name, PASS if ok else FAIL,
                           None if measured is None else float(measured),
                           None if threshold is None else float(threshold), anchor, detail)


def _se(a: np.ndarray) -> float:
    return float(a.std(ddof=1) / math.sqrt(len(a))) if len(a) > 1 else 0.0


def check_equal(name, diffs, anchor, k=EQ_SE) -> InvariantResult:
    """Paired per-trial differences have mean zero (within ``k`` SE)."""
    d = np.asarray(diffs, dtype=float)
    mean, se = float(d.mean()), _se(d)
    return _result(name, abs(mean) <= k * se + TOL, mean, k * se, anchor,
                   f"mean diff {mean:.6g}, se {se:.3g}, trials {len(d)}")


def check_at_least(name, diffs, anchor, k=ONE_SIDED_SE) -> InvariantResult:
    """Mean of per-trial ``lhs - rhs`` is at least ``-k`` SE."""
    d = np.asarray(diffs, dtype=float)
    mean, se = float(d.mean()), _se(d)
    return _result(name, mean >= -k * se - TOL, mean, -k * se, anchor,
                   f"mean margin {mean:.6g}, se {se:.3g}, trials {len(d)}")


# ---------------------------------------------------------------------------
# small fixtures for exhaustive checks
# ---------------------------------------------------------------------------


def family_matroids(n: int = 8, seed: int = 0) -> dict[str, mat.Matroid]:
    """One matroid of every family on ``n`` elements."""
    gens = {
        "uniform": f"uniform(n={n},k=3)",
        "partition": f"partition(n={n},classes=3)",
        "laminar": f"laminar(n={n},blocks=2)",
        "graphic": f"graphic(n={n},vertices={max(3, n // 2 + 1)})",
        "transversal": f"transversal(n={n},right=4,degree=2)",
        "linear": f"linear(n={n},dim=4,k=2)",
    }
    out = {}
    for name, g in gens.items():
        out[name] = gen.generate_instance(g + "+linear", seed).matroid
    base = out["graphic"]
    out["restriction"] = base.restrict([u for u in base.ground if u % 3 != 0])
    return out


def family_objectives(n: int = 6, seed: int = 0) -> dict[str, obj.Objective]:
    """One objective of every built-in kind (plus a shifted one) on ``n`` elements."""
    specs = {
        "linear": "linear", "coverage": "coverage(universe=8)",
        "coverage-weighted": "coverage(universe=8,weighted=1)", "maxweight": "maxweight",
        "weighted_rank": "weighted_rank(k=2)", "cut": "cut(density=0.6)",
    }
    out = {}
    for name, s in specs.items():
        out[name] = gen.generate_instance(f"uniform(n={n},k=2)+{s}", seed).objective
    out["shifted-cut"] = gen.generate_instance(f"uniform(n={n},k=2)+cut(density=0.6)+shift(c=0.7)", seed).objective
    return out


def _random_weights(ground, rng: random.Random) -> dict[int, float]:
    return {u: round(rng.uniform(0, 2), 6) for u in ground}


# ---------------------------------------------------------------------------
# exhaustive oracle checks
# ---------------------------------------------------------------------------


def inv_matroid_axioms(name: str, m: mat.Matroid) -> InvariantResult:
    rep = mat.verify_axioms(m)
    return _result(f"matroid_axioms[{name}]", rep.ok, rep.independent_sets, None,
                   "empty set independent; downward closure; |I|>|J| => exists e in I-J with J+e independent",
                   str(rep))


def inv_rank_properties(name: str, m: mat.Matroid) -> InvariantResult:
    g = list(m.ground)
    n = len(g)
    ranks = [m.rank(S) for S in (frozenset(g[i] for i in range(n) if mask >> i & 1) for mask in range(1 << n))]
    bad = None
    for mask in range(1 << n):
        size = bin(mask).count("1")
        S = frozenset(g[i] for i in range(n) if mask >> i & 1)
        if ranks[mask] > size or (ranks[mask] == size) != m.is_independent(S):
            bad = f"rank/independence mismatch at {sorted(S)}"
            break
        for i in range(n):
            a = 1 << i
            if mask & a:
                continue
            if not 0 <= ranks[mask | a] - ranks[mask] <= 1:
                bad = f"rank not unit-increasing at {sorted(S)} + {g[i]}"
                break
            for j in range(i + 1, n):
                b = 1 << j
                if mask & b:
                    continue
                if ranks[mask | a] + ranks[mask | b] < ranks[mask | a | b] + ranks[mask]:
                    bad = f"rank not submodular at {sorted(S)}, {g[i]}, {g[j]}"
                    break
        if bad:
            break
    return _result(f"rank_properties[{name}]", bad is None, 0 if bad is None else 1, 0,
                   "rank monotone, submodular, rank(S) <= |S|, rank(S) = |S| iff S independent", bad or "")


def inv_restriction(name: str, m: mat.Matroid, seed: int = 0) -> InvariantResult:
    rng = random.Random(seed)
    keep = [u for u in m.ground if rng.random() < 0.6]
    r = m.restrict(keep)
    bad = 0
    for k in range(len(keep) + 1):
        for S in itertools.combinations(keep, k):
            if r.is_independent(S) != m.is_independent(S):
                bad += 1
    return _result(f"restriction_commutes[{name}]", bad == 0, bad, 0,
                   "independent in restrict(M, K) iff independent in M, for S within K")


def inv_submodular(name: str, f: obj.Objective) -> InvariantResult:
    rep = obj.check_submodular(f)
    return _result(f"submodular[{name}]", rep.ok, 0 if rep.ok else 1, 0,
                   "f(A+e) - f(A) >= f(B+e) - f(B) for A within B; f >= 0", str(rep))


def inv_convolution_properties(name: str, f: obj.Objective, trials: int = 5, seed: int = 0) -> list[InvariantResult]:
    """Convolution bounded by f (tight at the empty set), submodular, monotone
    when f is, and w - f_w monotone."""
    rng = random.Random(seed)
    g = list(f.ground)
    n = len(g)
    worst1, worst_obs = 0.0, 0.0
    sub_ok, mono_ok, empty_ok = True, True, True
    fvals = f.subset_values(g)
    for _ in range(trials):
        w = _random_weights(g, rng)
        table = obj.convolution_table(f, w, g)
        empty_ok &= abs(table[0] - fvals[0]) <= TOL
        worst1 = max(worst1, max(t - v for t, v in zip(table, fvals)))
        rep = obj.check_submodular(lambda S, t=table: t[sum(1 << g.index(u) for u in S)], g)
        sub_ok &= rep.nonnegative and rep.submodular
        if f.monotone:
            mono_ok &= rep.monotone
        wmask = [0.0] * (1 << n)
        for mask in range(1, 1 << n):
            low = mask & -mask
            wmask[mask] = wmask[mask ^ low] + w[g[low.bit_length() - 1]]
        for mask in range(1 << n):
            for i in range(n):
                if not mask >> i & 1:
                    up = mask | 1 << i
                    drop = (wmask[mask] - table[mask]) - (wmask[up] - table[up])
                    worst_obs = max(worst_obs, drop)
    return [
        _result(f"convolution_below_f[{name}]", worst1 <= TOL and empty_ok, worst1, TOL,
                "f(S) >= f_w(S) for all S, with equality at the empty set"),
        _result(f"convolution_submodular[{name}]", sub_ok and mono_ok, 0 if sub_ok and mono_ok else 1, 0,
                "f_w non-negative and submodular; monotone whenever f is"),
        _result(f"weight_minus_convolution_monotone[{name}]", worst_obs <= TOL, worst_obs, TOL,
                "w(S+u) - f_w(S+u) >= w(S) - f_w(S)"),
    ]


def inv_greedy_half(name: str, f: obj.Objective, m: mat.Matroid) -> InvariantResult:
    S = frozenset(obj.greedy(f, m, f.ground))
    fS = f.value(S)
    worst = 0.0
    for C in obj.independent_sets(m):
        worst = max(worst, f.value(C | S) / 2 - fS)
    return _result(f"greedy_half[{name}]", worst <= TOL, worst, TOL,
                   "greedy output S satisfies f(S) >= f(C + S)/2 for every independent C")


def inv_subadditive(name: str, f: obj.Objective, draws: int = 2000, seed: int = 0) -> InvariantResult:
    rng = random.Random(seed)
    g = list(f.ground)
    worst = -math.inf
    for _ in range(draws):
        k = rng.randint(1, 4)
        sets = [frozenset(u for u in g if rng.random() < 0.4) for _ in range(k)]
        union = frozenset().union(*sets)
        worst = max(worst, f.value(union) - math.fsum(f.value(S) for S in sets))
    return _result(f"subadditive[{name}]", worst <= TOL, worst, TOL,
                   "sum_i f(S_i) >= f(union of S_i)")


# ---------------------------------------------------------------------------
# sampling lemmas
# ---------------------------------------------------------------------------


def _chunk_sampler(A: list, q: float, rng: random.Random) -> frozenset:
    """Correlated sample: split A into ceil(1/q) chunks and return a random one
    (every element appears with probability at most q)."""
    m = math.ceil(1 / q)
    j = rng.randrange(m)
    return frozenset(A[i] for i in range(len(A)) if i % m == j)


def inv_sampling(name: str, f: obj.Objective, trials: int = 20000, p: float = 0.3, seed: int = 0) -> list[InvariantResult]:
    rng = random.Random(seed)
    g = list(f.ground)
    A = [u for u in g if rng.random() < 0.7] or g[:1]
    fA, f0 = f.value(A), f.value(())
    indep = np.array([f.value([u for u in A if rng.random() < p]) for _ in range(trials)])
    corr = np.array([f.value(_chunk_sampler(A, p, rng)) for _ in range(trials)])
    out = [
        check_at_least(f"sampling_independent[{name}]", indep - ((1 - p) * f0 + p * fA),
                       "E[g(A(p))] >= (1-p) g(empty) + p g(A), independent inclusion"),
        check_at_least(f"sampling_correlated[{name}]", corr - (1 - p) * f0,
                       "E[g(A(p))] >= (1-p) g(empty), inclusion probabilities at most p"),
    ]
    return out


def inv_sampling_supermodular(name: str, f: obj.Objective, trials: int = 20000, q: float = 0.3,
                              seed: int = 0) -> InvariantResult:
    """w - f_w is monotone, supermodular and normalized when f(empty) = 0."""
    rng = random.Random(seed)
    g = list(f.ground)
    w = _random_weights(g, rng)
    table = obj.convolution_table(f, w, g)
    index = {u: i for i, u in enumerate(g)}

    def h(S):
        mask = sum(1 << index[u] for u in S)
        return math.fsum(w[u] for u in S) - table[mask] + table[0]

    A = [u for u in g if rng.random() < 0.8] or g
    hA = h(A)
    vals = np.array([h(_chunk_sampler(A, q, rng)) for _ in range(trials)])
    return check_at_least(f"sampling_supermodular[{name}]", q * hA - vals,
                          "E[g(A(q))] <= q g(A) for normalized monotone supermodular g")


# ---------------------------------------------------------------------------
# linear algorithms
# ---------------------------------------------------------------------------


def _dynkin_runs(n: int, trials: int, capped: bool, seed: int):
    rng = random.Random(seed)
    weights = {u: rng.random() for u in range(n)}
    m = mat.build_matroid(mat.Uniform(1), n)
    top = max(range(n), key=lambda u: (weights[u], u))
    root = RandomTape(seed)
    counts = np.zeros(n)
    values = np.zeros(trials)
    for t in range(trials):
        tape = root.child(t)
        order = tape.permutation("arrival", range(n))
        sel = lin.run_online(lin.Dynkin(capped), m, ((u, weights[u]) for u in order), tape.fork("alg"))
        for u in sel:
            counts[u] += 1
            values[t] += weights[u]
    return weights, top, counts, values


def inv_dynkin(n: int = 100, trials: int = 20000, seed: int = 0) -> list[InvariantResult]:
    _, top, counts, _ = _dynkin_runs(n, trials, False, seed)
    pr = counts[top] / trials
    out = [_result("dynkin_selects_max", 1 / math.e - 0.01 <= pr <= 0.45, pr, 1 / math.e - 0.01,
                   "Pr[select the maximum] >= 1/e", f"trials {trials}, upper sanity limit 0.45")]
    r, p_n = lin.best_threshold(n)
    se = math.sqrt(p_n * (1 - p_n) / trials)
    out.append(_result("dynkin_matches_closed_form", abs(pr - p_n) <= EQ_SE * se, pr - p_n, EQ_SE * se,
                       "Pr[select max] = ((r-1)/n) sum_{j=r}^{n} 1/(j-1)", f"r={r}, p(n)={p_n:.6f}"))
    return out


def inv_dynkin_capped(n: int = 100, trials: int = 20000, seed: int = 1) -> list[InvariantResult]:
    weights, top, counts, values = _dynkin_runs(n, trials, True, seed)
    freq = counts / trials
    se = np.sqrt(np.maximum(freq * (1 - freq), 1e-300) / trials)
    excess = float(np.max(freq - (1 / math.e + PROB_SE * se)))
    vse = _se(values)
    return [
        _result("dynkin_capped_per_element", excess <= 0, float(freq.max()), 1 / math.e,
                "no element selected with probability above 1/e", f"max excess over 1/e + 3 se: {excess:.3g}"),
        _result("dynkin_capped_value", values.mean() >= weights[top] / math.e - PROB_SE * vse,
                values.mean(), weights[top] / math.e - PROB_SE * vse,
                "E[selected weight] >= w(max)/e"),
    ]


def inv_partition(n: int = 20, classes: int = 4, trials: int = 40000, seed: int = 0) -> list[InvariantResult]:
    inst = gen.generate_instance(f"partition(n={n},classes={classes})+linear", seed)
    m = inst.matroid
    w = inst.objective.w
    alpha = lin.alpha_partition(n)
    target = 1 / alpha
    root = RandomTape(seed)
    counts = np.zeros(n)
    indep_ok = True
    for t in range(trials):
        tape = root.child(t)
        order = tape.permutation("arrival", m.ground)
        sel = lin.run_online(lin.PartitionMSP(), m, ((u, w[u]) for u in order), tape.fork("alg"))
        indep_ok &= m.is_independent(sel)
        for u in sel:
            counts[u] += 1
    freq = counts / trials
    out = []
    for c, members in sorted(m.classes().items()):
        star = max(members, key=lambda u: (w[u], u))
        se = math.sqrt(target * (1 - target) / trials)
        out.append(_result(f"partition_optimum_probability[class={c}]", abs(freq[star] - target) <= PROB_SE * se,
                           freq[star], target, "each class maximum accepted with probability exactly 1/alpha(n)",
                           f"element {star}, se {se:.3g}"))
    se_all = np.sqrt(np.maximum(freq * (1 - freq), target * (1 - target)) / trials)
    excess = float(np.max(freq - (target + PROB_SE * se_all)))
    out.append(_result("partition_no_element_above", excess <= 0, float(freq.max()), target,
                       "no element accepted with probability above 1/alpha(n)"))
    out.append(_result("partition_independent", indep_ok, 0 if indep_ok else 1, 0,
                       "output independent on every trial"))
    return out


def inv_alpha_bound(n_max: int = 10**6) -> InvariantResult:
    a = lin.alpha_partition_table(n_max)
    worst = float(a.max())
    spot = max(abs(a[k - 1] - lin.alpha_partition(k)) for k in (1, 2, 3, 10, 1000, n_max))
    return _result("alpha_at_most_e", worst <= math.e + 1e-12 and spot < 1e-9, worst, math.e,
                   "alpha(n) <= e for n = 1..10^6", f"vectorised vs scalar max gap {spot:.2g}")


def _chi_square(counts: dict, cells: int, trials: int) -> tuple[float, float]:
    from scipy.stats import chisquare

    obs = np.array([counts.get(k, 0) for k in sorted(counts)] + [0] * (cells - len(counts)), dtype=float)
    stat, pval = chisquare(obs, np.full(cells, trials / cells))
    return float(stat), float(pval)


class _Recorder(lin.OnlineAlgorithm):
    def start(self, n, matroid, tape):
        super().start(n, matroid, tape)
        self.seen = []

    def on_arrival(self, u, w):
        self.seen.append(u)
        return False


def inv_partial_uniform(n: int = 4, known: Iterable[int] = (0, 2), trials: int = 24000, seed: int = 0) -> InvariantResult:
    known = frozenset(known)
    m = mat.build_matroid(mat.Uniform(n), n)
    root = RandomTape(seed)
    counts: dict = {}
    real = [u for u in range(n) if u not in known]
    for t in range(trials):
        tape = root.child(t)
        made: list[_Recorder] = []
        wrapper = lin.PartialMSPWrapper(lambda: made.append(_Recorder()) or made[-1], known)
        wrapper.start(n, m, tape)
        for u in tape.permutation("arrival", real):
            wrapper.on_arrival(u, 1.0)
        wrapper.finish()
        key = tuple(made[-1].seen)
        counts[key] = counts.get(key, 0) + 1
    stat, pval = _chi_square(counts, math.factorial(n), trials)
    ok = pval >= 0.001 and len(counts) == math.factorial(n)
    return _result("partial_msp_uniform_order", ok, pval, 0.001,
                   "inner algorithm sees a uniformly random permutation of E", f"chi2 {stat:.2f}")


def inv_arrival_uniform(n: int = 4, trials: int = 24000, seed: int = 0) -> InvariantResult:
    root = RandomTape(seed)
    counts: dict = {}
    for t in range(trials):
        key = tuple(root.child(t).permutation("arrival", range(n)))
        counts[key] = counts.get(key, 0) + 1
    stat, pval = _chi_square(counts, math.factorial(n), trials)
    return _result("arrival_order_uniform", pval >= 0.001 and len(counts) == math.factorial(n), pval, 0.001,
                   "arrivals in uniformly random order", f"chi2 {stat:.2f}")


# ---------------------------------------------------------------------------
# reduction: exact identities, coupling, expectation lemmas
# ---------------------------------------------------------------------------


def inv_lemma_identity(instances: list[red.Instance], trials: int = 2000, seed: int = 0) -> list[InvariantResult]:
    """w(M) + f(empty) = f(M) = f_w(M) on every trial of the simulated algorithms."""
    out = []
    for variant in ("nonmonotone", "monotone"):
        worst_w, worst_fw, count = 0.0, 0.0, 0
        pool = [i for i in instances if variant == "nonmonotone" or i.objective.monotone]
        per = max(1, math.ceil(trials / max(len(pool), 1)))
        for inst in pool:
            cfg = red.ReductionConfig(1 / 3 if variant == "nonmonotone" else 0.5, variant)
            root = RandomTape(seed).child(inst.name, variant)
            fac = lin.linear_factory("greedy-online")
            for t in range(per):
                log = red.run_reduction("simulated", cfg, inst, fac, root.child(t))
                fw = obj.convolve_fw(inst.objective, log.w, log.M)
                worst_w = max(worst_w, abs(log.w_M + log.f_empty - log.f_M))
                worst_fw = max(worst_fw, abs(log.f_M - fw))
                count += 1
        families = sorted({type(i.matroid).__name__ for i in pool})
        out.append(_result(f"greedy_weight_identity[{variant}]", worst_w <= TOL, worst_w, TOL,
                           "w(M) + f(empty) = f(M)", f"{count} trials over {families}"))
        out.append(_result(f"greedy_convolution_identity[{variant}]", worst_fw <= TOL, worst_fw, TOL,
                           "f(M) = f_w(M)", f"{count} trials"))
    return out


def random_small_instance(rng: random.Random, n_max: int = 8) -> red.Instance:
    n = rng.randint(0, n_max)
    mat_terms = [f"uniform(n={n},k={rng.randint(1, 3)})", f"partition(n={n},classes={rng.randint(1, 3)})",
                 f"laminar(n={n},blocks=2)", f"graphic(n={n},vertices=4)", f"transversal(n={n},right=3)"]
    obj_terms = ["coverage(universe=6)", "cut(density=0.5)", "maxweight", "weighted_rank(k=2)",
                 "cut(density=0.5)+shift(c=0.3)", "linear"]
    return gen.generate_instance(f"{rng.choice(mat_terms)}+{rng.choice(obj_terms)}", rng.getrandbits(32))


def coupling_case(i: int, seed: int = 0, linear_key: str | None = None):
    """The ``i``-th random ``(instance, L, F, pi, linear seed)`` tuple."""
    rng = random.Random(f"coupling|{seed}|{i}")
    inst = random_small_instance(rng)
    variant = "monotone" if (inst.objective.monotone and rng.random() < 0.3) else "nonmonotone"
    p = rng.choice([1 / 3, 0.2, 0.5, 0.75])
    cfg = red.ReductionConfig(p, variant)
    L = frozenset(u for u in inst.ground if rng.random() < (0.5 if variant == "nonmonotone" else p))
    F = frozenset(u for u in inst.ground if rng.random() < p)
    pi = [u for u in inst.ground if u not in L]
    rng.shuffle(pi)
    key = linear_key or rng.choice(["greedy-online", "dynkin", "dynkin-capped"])
    return inst, cfg, L, F, pi, lin.linear_factory(key), rng.getrandbits(63)


def inv_coupling(count: int = 1000, seed: int = 0) -> list[InvariantResult]:
    out = []
    for i in range(count):
        inst, cfg, L, F, pi, fac, lseed = coupling_case(i, seed)
        a, b = red.coupled_pair(L, F, pi, cfg, inst, fac, lseed)
        diffs = red.compare_logs(a, b)
        out.append(_result(f"coupling[{i}]", not diffs, len(diffs), 0,
                           "coupled online and simulated runs agree on M, N, w and the output",
                           ", ".join(diffs)))
    return out


def _expectation_runs(inst: red.Instance, cfg: red.ReductionConfig, key: str, trials: int, seed: int):
    fac = lin.linear_factory(key)
    f, m = inst.objective, inst.matroid
    root = RandomTape(seed)
    rows = []
    for t in range(trials):
        log = red.run_reduction("simulated", cfg, inst, fac, root.child(t))
        opt_n = obj.max_weight_independent(m, log.w, log.N)
        QN = log.output
        rows.append((
            log.w_M, log.w_N, log.f_M,
            obj.convolve_fw(f, log.w, log.N), obj.convolve_fw(f, log.w, log.M),
            log.weight(opt_n), log.weight(log.Q), log.weight(QN),
            obj.convolve_fw(f, log.w, QN), log.f_output,
        ))
    a = np.array(rows)
    cols = ("wM", "wN", "fM", "fwN", "fwM", "wOptN", "wQ", "wQN", "fwQN", "fQN")
    return {c: a[:, i] for i, c in enumerate(cols)}


def inv_expectations(inst: red.Instance, key: str, p: float | None = None, trials: int = 20000,
                     seed: int = 0, variant: str = "nonmonotone") -> list[InvariantResult]:
    alpha, q = gen.linear_alpha(key, inst)
    if p is None:
        p = red.choose_p(alpha, variant)
    cfg = red.ReductionConfig(p, variant, alpha, q)
    _, opt = obj.offline_opt(inst.objective, inst.matroid)
    f0 = inst.objective.value(())
    r = _expectation_runs(inst, cfg, key, trials, seed)
    tag = f"[{variant}]"
    qq = 1.0 if q is None else q
    out = []
    if variant == "nonmonotone":
        out += [
            check_equal("m_n_weight_ratio" + tag, r["wN"] - p * r["wM"], "E[w(N)] = p E[w(M)]"),
            check_at_least("greedy_set_value" + tag, r["fM"] - opt / 8, "E[f(M)] >= f(OPT)/8"),
            check_at_least("candidate_convolution" + tag,
                           r["fwN"] - (f0 / (1 + p) + p * (1 - p) / (1 + p) * r["fwM"]),
                           "E[f_w(N)] >= f(empty)/(1+p) + p(1-p)/(1+p) E[f_w(M)]"),
            check_at_least("candidate_opt_weight" + tag, r["wOptN"] - p / (1 + p) * r["wM"],
                           "E[w(OPT_w(N))] >= p/(1+p) E[w(M)]"),
            check_at_least("output_weight" + tag, r["wQN"] - p / (alpha * (1 + p)) * r["wM"],
                           "E[w(Q & N)] >= p/(alpha(1+p)) E[w(M)]"),
            check_at_least("general_ratio" + tag, r["fQN"] - red.nonmonotone_guarantee(p, alpha, qq) * opt,
                           "E[f(Q & N)] >= p(1-2pq alpha)/(8 alpha(1+p)) f(OPT)"),
        ]
    else:
        out += [
            check_equal("m_n_weight_ratio" + tag, r["wN"] - (1 - p) / p * r["wM"], "E[w(N)] = ((1-p)/p) E[w(M)]"),
            check_at_least("greedy_set_value" + tag, r["fM"] - p / 2 * opt, "E[f(M)] >= (p/2) f(OPT)"),
            check_at_least("candidate_convolution" + tag, r["fwN"] - (p * f0 + (1 - p) * r["fwM"]),
                           "E[f_w(N)] >= p f(empty) + (1-p) E[f_w(M)]"),
            check_at_least("candidate_opt_weight" + tag, r["wOptN"] - (1 - p) * r["wM"],
                           "E[w(OPT_w(N))] >= (1-p) E[w(M)]"),
            check_at_least("general_ratio" + tag, r["fQN"] - red.monotone_guarantee(p, alpha, qq) * opt,
                           "E[f(Q & N)] >= q(1-p)(p/(alpha q) - 1 + p)/2 f(OPT)"),
        ]
    out += [
        check_at_least("linear_on_candidates" + tag, r["wQ"] - r["wOptN"] / alpha,
                       "E[w(Q)] >= (1/alpha) E[w(OPT_w(N))]"),
        check_at_least("capped_difference" + tag, qq * (r["wN"] - r["fwN"]) - (r["wQN"] - r["fwQN"]),
                       "E[w(Q & N) - f_w(Q & N)] <= q E[w(N) - f_w(N)]"),
    ]
    return out


def inv_learning_set(inst: red.Instance, trials: int = 20000, seed: int = 0) -> list[InvariantResult]:
    """The online learning set contains each element with probability 1/2, independently."""
    cfg = red.ReductionConfig(1 / 3)
    fac = lin.linear_factory("greedy-online")
    root = RandomTape(seed)
    n = inst.n
    member = np.zeros((trials, n))
    for t in range(trials):
        log = red.smsp_online(cfg, inst, fac, root.child(t))
        for u in log.L:
            member[t, u] = 1
    out = []
    freq = member.mean(axis=0)
    se = math.sqrt(0.25 / trials)
    worst = float(np.max(np.abs(freq - 0.5)))
    out.append(_result("learning_set_marginals", worst <= EQ_SE * se, worst, EQ_SE * se,
                       "Pr[u in L] = 1/2 for every u"))
    pairs = [(0, 1), (0, n - 1), (n // 2, n // 2 + 1)] if n >= 3 else []
    worst_pair = 0.0
    for a, b in pairs:
        d = member[:, a] * member[:, b] - 0.25
        worst_pair = max(worst_pair, abs(float(d.mean())) / max(_se(d), 1e-12))
    out.append(_result("learning_set_pairwise", worst_pair <= EQ_SE, worst_pair, EQ_SE,
                       "Pr[u, v in L] = 1/4 for u != v", f"pairs {pairs}, reported in se units"))
    return out


# ---------------------------------------------------------------------------
# bounds and end-to-end guarantees
# ---------------------------------------------------------------------------


def inv_bounds() -> list[InvariantResult]:
    e = math.e
    out = []

    def close(name, got, want, tol, anchor, rounded=None):
        ok = abs(got - want) <= tol
        if rounded is not None:
            ok &= round(got) == rounded
        out.append(_result(name, ok, got, want, anchor))

    close("bound_unitary_partition", red.ratio_bound(e, "nonmonotone-capped", q=1 / e), 96 * e, 1e-9,
          "24 alpha (3 q alpha + 1) at alpha = e, q = 1/e", rounded=261)
    close("bound_transversal", red.ratio_bound(8, "nonmonotone-capped", q=0.5), 2496, 1e-9,
          "24 alpha (3 q alpha + 1) at alpha = 8, q = 1/2")
    worst = 0.0
    for k in range(1, 11):
        b = red.k_sparse_bounds(k)
        worst = max(worst, abs(b["nonmonotone"] - 24 * k * e * (3 * k + 1)), abs(b["monotone"] - 8 * k * e * (k + 1)))
    close("bound_k_sparse", worst, 0.0, 1e-6, "24ke(3k+1) and 8ke(k+1) for k = 1..10")
    close("bound_laminar_monotone", red.laminar_ratio(0.976299, "monotone"), 144, 1.0,
          "monotone laminar ratio at p = 0.976299", rounded=144)
    close("bound_laminar_nonmonotone", red.laminar_ratio(0.023769, "nonmonotone"), 585, 1.0,
          "non-monotone laminar ratio at p = 0.023769", rounded=585)
    pm, _ = red.optimal_laminar_p("monotone")
    pn, _ = red.optimal_laminar_p("nonmonotone")
    close("laminar_optimum_monotone", pm, 0.976299, 1e-3, "grid search recovers p = 0.976299")
    close("laminar_optimum_nonmonotone", pn, 0.023769, 1e-3, "grid search recovers p = 0.023769")
    worst = 0.0
    for alpha in (1.0, 1.5, e, 4.0, 8.0, 20.0):
        for q in (None, 1.0, 0.5, 1 / alpha):
            if q is not None and q < 1 / alpha:
                continue
            qq = 1.0 if q is None else q
            vn = "nonmonotone" if q is None else "nonmonotone-capped"
            vm = "monotone" if q is None else "monotone-capped"
            g = red.nonmonotone_guarantee(red.choose_p(alpha, vn, q=q), alpha, qq)
            worst = max(worst, abs(1 / g / red.ratio_bound(alpha, vn, q=q) - 1))
            g = red.monotone_guarantee(red.choose_p(alpha, vm, q=q), alpha, qq)
            worst = max(worst, abs(1 / g / red.ratio_bound(alpha, vm, q=q) - 1))
    close("bounds_match_guarantees", worst, 0.0, 1e-9,
          "ratio_bound = 1/guarantee at choose_p for every variant")
    close("p_for_16alpha_bound", red.choose_p(3.0, "monotone-theorem5"), 0.75, 0.0, "p = 3/4 for the 16 alpha bound")
    return out


def _e2e(inst: red.Instance, kind: str, cfg: red.ReductionConfig, fac, ratio: float, trials: int,
         seed: int, name: str, anchor: str) -> InvariantResult:
    _, opt = obj.offline_opt(inst.objective, inst.matroid)
    root = RandomTape(seed)
    vals = np.empty(trials)
    indep = True
    for t in range(trials):
        log = red.run_reduction(kind, cfg, inst, fac, root.child(t))
        vals[t] = log.f_output
        indep &= inst.matroid.is_independent(log.output)
    res = check_at_least(name, vals - opt / ratio, anchor)
    res.detail += f"; E[f]={vals.mean():.6g}, f(OPT)/ratio={opt / ratio:.6g}, ratio={ratio:.6g}"
    if not indep:
        res.status = FAIL
        res.detail += "; dependent output observed"
    return res


def inv_end_to_end(instances: list[red.Instance], trials: int = 5000, seed: int = 0,
                   extras: bool = True) -> list[InvariantResult]:
    out = []
    for inst in instances:
        key = inst.meta.get("linear", "greedy-online")
        alpha, q = gen.linear_alpha(key, inst)
        fac = lin.linear_factory(key)
        vn = "nonmonotone" if q is None else "nonmonotone-capped"
        cfg = red.ReductionConfig(red.choose_p(alpha, vn, q=q), "nonmonotone", alpha, q)
        out.append(_e2e(inst, "online", cfg, fac, red.ratio_bound(alpha, vn, q=q), trials, seed,
                        f"guarantee[{inst.name}]", "E[f(Q & N)] >= f(OPT) / ratio_bound(alpha, q)"))
        if extras and inst.objective.monotone:
            vm = "monotone" if q is None else "monotone-capped"
            cfg = red.ReductionConfig(red.choose_p(alpha, vm, q=q), "monotone", alpha, q)
            out.append(_e2e(inst, "online", cfg, fac, red.ratio_bound(alpha, vm, q=q), trials, seed,
                            f"guarantee_monotone[{inst.name}]",
                            "E[f(Q & N)] >= f(OPT) / ratio_bound(alpha, q), monotone reduction"))
    if not extras:
        return out
    # union of k independent sets, k = 3 copies of an e * rank competitive Linear
    inst = gen.shipped_instance("graphic-coverage")
    alpha = math.e * inst.matroid.rank(inst.matroid.elements)
    fac = lambda: lin.RandomOfK(lambda: lin.Dynkin(False), 3)  # noqa: E731
    cfg = red.ReductionConfig(red.choose_p(alpha), "nonmonotone", alpha, k=3)
    out.append(_e2e(inst, "online", cfg, fac, red.ratio_bound(alpha, "nonmonotone", k=3), trials, seed,
                    "guarantee_union_of_k", "E[f(Q & N)] >= f(OPT) / (24 k alpha (3 alpha + 1))"))
    # offline filter selecting each optimum element with probability 1/alpha
    inst = gen.shipped_instance("uniform3-coverage")
    alpha = 3.0
    fac = lambda: lin.OfflineOptFilter(alpha)  # noqa: E731
    cfg = red.ReductionConfig(red.choose_p(alpha, "monotone-theorem5"), "monotone", alpha)
    out.append(_e2e(inst, "simulated", cfg, fac, red.ratio_bound(alpha, "monotone-theorem5"), trials, seed,
                    "guarantee_opt_filter", "E[f(Q & N)] >= f(OPT) / (16 alpha)"))
    # laminar matroids with greedy acceptance as Linear
    lam_m = gen.shipped_instance("laminar-weighted-rank")
    pm, rm = red.optimal_laminar_p("monotone")
    out.append(_e2e(lam_m, "online", red.ReductionConfig(pm, "monotone"), lin.linear_factory("greedy-online"),
                    rm, trials, seed, "guarantee_laminar[monotone]",
                    "E[f(Q & N)] >= f(OPT)/144 with greedy acceptance on laminar matroids"))
    lam_n = gen.generate_instance("laminar(n=10,blocks=2)+cut(density=0.5)", 9, "laminar-cut")
    pn, rn = red.optimal_laminar_p("nonmonotone")
    out.append(_e2e(lam_n, "online", red.ReductionConfig(pn, "nonmonotone"), lin.linear_factory("greedy-online"),
                    rn, trials, seed, "guarantee_laminar[nonmonotone]",
                    "E[f(Q & N)] >= f(OPT)/585 with greedy acceptance on laminar matroids"))
    return out


# ---------------------------------------------------------------------------
# suites
# ---------------------------------------------------------------------------


SUITES = ("oracles", "coupling", "expectations", "partition", "dynkin", "wrapper", "bounds", "end-to-end", "all")

# instances for the expectation lemmas (n = 12)
EXPECTATION_INSTANCES = {"nonmonotone": "partition-cut-shifted", "monotone": "partition-coverage"}


@dataclass
class InvariantConfig:
    suite: str = "all"
    seed: int = 0
    scale: float = 1.0  # multiplies every Monte Carlo trial count
    seeds: int | None = None  # number of coupling tuples
    objective: obj.Objective | None = None  # user-supplied objective (gates the rest)
    matroid: mat.Matroid | None = None  # user-supplied matroid (gates the rest)

    def trials(self, base: int) -> int:
        return max(1, int(round(base * self.scale)))


Check = tuple[str, Callable[[], list[InvariantResult]]]


def _oracle_checks(cfg: InvariantConfig) -> list[Check]:
    checks: list[Check] = []
    for name, m in family_matroids(10, cfg.seed).items():
        checks.append((f"matroid_axioms[{name}]", lambda name=name, m=m: [inv_matroid_axioms(name, m)]))
    for name, m in family_matroids(8, cfg.seed).items():
        checks.append((f"rank_properties[{name}]",
                       lambda name=name, m=m: [inv_rank_properties(name, m), inv_restriction(name, m, cfg.seed)]))
    for name, f in family_objectives(6, cfg.seed).items():
        checks.append((f"submodular[{name}]", lambda name=name, f=f: [inv_submodular(name, f)]))
    objs8 = family_objectives(8, cfg.seed)
    mats8 = family_matroids(8, cfg.seed)
    for name, f in objs8.items():
        checks.append((f"convolution[{name}]", lambda name=name, f=f: inv_convolution_properties(name, f, seed=cfg.seed)))
        checks.append((f"subadditive[{name}]", lambda name=name, f=f: [inv_subadditive(name, f, seed=cfg.seed)]))
    pairs = [("coverage", "graphic"), ("cut", "partition"), ("shifted-cut", "laminar"),
             ("weighted_rank", "transversal"), ("maxweight", "linear"), ("coverage-weighted", "uniform")]
    for oname, mname in pairs:
        k = f"{oname}/{mname}"
        checks.append((f"greedy_half[{k}]", lambda f=objs8[oname], m=mats8[mname], k=k: [inv_greedy_half(k, f, m)]))
    for name in ("coverage", "shifted-cut"):
        checks.append((f"sampling[{name}]",
                       lambda name=name: inv_sampling(name, objs8[name], cfg.trials(20000), seed=cfg.seed)))
    for name in ("coverage", "cut"):
        checks.append((f"sampling_supermodular[{name}]",
                       lambda name=name: [inv_sampling_supermodular(name, objs8[name], cfg.trials(20000),
                                                                    seed=cfg.seed)]))
    return checks


def suite_checks(cfg: InvariantConfig) -> list[Check]:
    s = cfg.suite
    if s not in SUITES:
        raise ValueError(f"unknown suite {s!r}; choose from {SUITES}")
    checks: list[Check] = []

    def want(x):
        return s in ("all", x)

    if want("oracles"):
        checks += _oracle_checks(cfg)
    if want("bounds"):
        checks.append(("bounds", inv_bounds))
    if want("wrapper"):
        checks.append(("wrapper", lambda: [inv_partial_uniform(trials=cfg.trials(24000), seed=cfg.seed),
                                           inv_arrival_uniform(trials=cfg.trials(24000), seed=cfg.seed)]))
    if want("partition"):
        checks.append(("partition", lambda: inv_partition(trials=cfg.trials(40000), seed=cfg.seed)
                       + [inv_alpha_bound()]))
    if want("dynkin"):
        checks.append(("dynkin", lambda: inv_dynkin(trials=cfg.trials(20000), seed=cfg.seed)
                       + inv_dynkin_capped(trials=cfg.trials(20000), seed=cfg.seed + 1)))
    if want("coupling"):
        checks.append(("coupling", lambda: inv_coupling(cfg.seeds if cfg.seeds is not None else 1000, cfg.seed)))
    if want("expectations"):
        checks.append(("greedy_identity",
                       lambda: inv_lemma_identity(gen.shipped_instances(), cfg.trials(2000), cfg.seed)))
        checks.append(("learning_set", lambda: inv_learning_set(gen.shipped_instance("partition-coverage"),
                                                                cfg.trials(20000), cfg.seed)))
        checks.append(("expectations[nonmonotone]", lambda: inv_expectations(
            gen.shipped_instance(EXPECTATION_INSTANCES["nonmonotone"]), "partition", 1 / 3,
            cfg.trials(20000), cfg.seed)))
        checks.append(("expectations[monotone]", lambda: inv_expectations(
            gen.shipped_instance(EXPECTATION_INSTANCES["monotone"]), "partition", None,
            cfg.trials(20000), cfg.seed, variant="monotone")))
    if want("end-to-end"):
        checks.append(("end-to-end", lambda: inv_end_to_end(gen.shipped_instances(), cfg.trials(3000), cfg.seed)))
    return checks


def _supplied_checks(cfg: InvariantConfig) -> list[Check]:
    out: list[Check] = []
    f, m = cfg.objective, cfg.matroid
    if f is not None and len(f.ground) <= 8:
        out.append(("convolution[supplied]", lambda: inv_convolution_properties("supplied", f, seed=cfg.seed)))
        out.append(("subadditive[supplied]", lambda: [inv_subadditive("supplied", f, seed=cfg.seed)]))
    if m is not None and m.n <= 10:
        out.append(("rank_properties[supplied]",
                    lambda: [inv_rank_properties("supplied", m), inv_restriction("supplied", m, cfg.seed)]))
    return out


def check_invariants(cfg: InvariantConfig | None = None) -> InvariantReport:
    """Run the configured suite.  Failures are report entries, never exceptions.

    A user-supplied objective or matroid is checked first.  If its oracle
    check fails, everything else rests on a broken oracle and is reported as
    skipped instead of run.
    """
    cfg = cfg or InvariantConfig()
    report = InvariantReport()
    if cfg.objective is not None:
        report.entries.append(inv_submodular("supplied", cfg.objective))
    if cfg.matroid is not None:
        report.entries.append(inv_matroid_axioms("supplied", cfg.matroid))
    broken = any(e.status == FAIL for e in report.entries)
    for label, check in _supplied_checks(cfg) + suite_checks(cfg):
        if broken:
            report.entries.append(InvariantResult(label, SKIPPED, None, None, "", "oracle check failed"))
            continue
        try:
            report.entries += check()
        except Exception as exc:  # a crashing check is a failing check
            report.entries.append(InvariantResult(label, FAIL, None, None, "", f"{type(exc).__name__}: {exc}"))
    return report
