"""The six leader-selection algorithms and their support procedures.

Every selector returns a sorted tuple of k distinct agent ids. All ties
(degree, distance, eigenvalue) break toward the lowest agent id or the
lexicographically smallest subset, so results are reproducible; stochastic
selectors are deterministic for a fixed seed.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .graph import WeightedGraph, ground, is_connected, laplacian, weighted_indegrees

KMEANS_MAX_ITER = 300
KMEANS_TOL = 1e-4  # stop when no center moves by more than this
HUGE_RANDOM_SAMPLES = 10000
# Stacked eigensolves are chunked to bound peak memory (512 * n^2 doubles).
_EIG_CHUNK = 512


class Algorithm(str, Enum):
    GREEDY_K_LEADER = "greedy"
    RANDOM = "random"
    MAX_DEGREE = "max-degree"
    AVERAGE_DEGREE = "average-degree"
    KMEANS = "kmeans"
    HUGE_RANDOM = "huge-random"

    def __str__(self) -> str:  # so f-strings print the CSV name
        return self.value


@dataclass(frozen=True)
class ClusterAssignment:
    """Per-agent cluster labels plus the final cluster centers."""

    labels: np.ndarray   # (n,) ints in [0, k)
    centers: np.ndarray  # (k, 2), arithmetic means of their members


@dataclass(frozen=True)
class SelectionRecord:
    """One selector run: algorithm, chosen leaders, and the induced rate."""

    algorithm: Algorithm
    leaders: tuple[int, ...]
    rate: float

    def csv_row(self) -> str:
        ids = ";".join(str(i) for i in self.leaders)
        return f"{self.algorithm},{len(self.leaders)},{ids},{self.rate!r}"


def _check_k(k: int, n: int, strict: bool = False) -> None:
    upper = n - 1 if strict else n
    if not 1 <= k <= upper:
        raise ValueError(f"leader count k={k} out of range [1, {upper}] for n={n}")


def _grounded_lambda_mins(L: np.ndarray, leader_sets: list[tuple[int, ...]]) -> np.ndarray:
    """lambda_min(L_FF) for many leader sets of equal size, batched.

    Equal set sizes mean equal follower-block orders, so the submatrices
    stack into one array and a single batched eigensolve handles a chunk.
    """
    n = L.shape[0]
    all_ids = np.arange(n)
    out = np.empty(len(leader_sets))
    for start in range(0, len(leader_sets), _EIG_CHUNK):
        chunk = leader_sets[start:start + _EIG_CHUNK]
        stack = np.empty((len(chunk), n - len(chunk[0]), n - len(chunk[0])))
        for pos, leaders in enumerate(chunk):
            followers = np.setdiff1d(all_ids, leaders)
            stack[pos] = L[np.ix_(followers, followers)]
        out[start:start + len(chunk)] = np.linalg.eigvalsh(stack)[:, 0]
    return out


def select_greedy_k_leader(g: WeightedGraph, k: int) -> tuple[int, ...]:
    """Grow the leader set one agent at a time, maximizing lambda_min.

    Each round evaluates lambda_min of the grounded Laplacian for every
    remaining candidate and keeps the argmax (lowest id on ties). One
    greedy step with k=1 is therefore an exhaustive single-leader search.
    """
    n = g.n
    _check_k(k, n, strict=True)
    if not is_connected(g):
        raise ValueError("greedy selection requires a connected graph")
    L = laplacian(g)
    chosen: list[int] = []
    for _ in range(k):
        candidates = [c for c in range(n) if c not in chosen]
        trial_sets = [tuple(sorted(chosen + [c])) for c in candidates]
        rates = _grounded_lambda_mins(L, trial_sets)
        best = int(np.argmax(rates))  # first max wins; candidates ascend by id
        chosen.append(candidates[best])
    return tuple(sorted(chosen))


def select_random(n: int, k: int, seed) -> tuple[int, ...]:
    """Uniform k-subset of [0, n) via a partial Fisher-Yates shuffle."""
    _check_k(k, n)
    rng = np.random.default_rng(seed)
    pool = np.arange(n)
    for i in range(k):
        j = int(rng.integers(i, n))
        pool[i], pool[j] = pool[j], pool[i]
    return tuple(sorted(int(i) for i in pool[:k]))


def select_max_degree(g: WeightedGraph, k: int) -> tuple[int, ...]:
    """The k agents with the largest weighted indegree."""
    _check_k(k, g.n)
    deg = weighted_indegrees(g)
    order = sorted(range(g.n), key=lambda i: (-deg[i], i))
    return tuple(sorted(order[:k]))


def select_average_degree(g: WeightedGraph, k: int) -> tuple[int, ...]:
    """The k agents whose weighted indegree is closest to the mean degree."""
    _check_k(k, g.n)
    deg = weighted_indegrees(g)
    mean = deg.mean()
    order = sorted(range(g.n), key=lambda i: (abs(deg[i] - mean), i))
    return tuple(sorted(order[:k]))


def _kmeans_pp_init(points: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    """k-means++ seeding: D^2-weighted sampling of initial centers."""
    n = points.shape[0]
    centers = np.empty((k, 2))
    centers[0] = points[rng.integers(n)]
    d2 = ((points - centers[0]) ** 2).sum(axis=1)
    for c in range(1, k):
        total = d2.sum()
        if total == 0.0:
            idx = int(rng.integers(n))  # all points coincide with a center
        else:
            idx = int(np.searchsorted(np.cumsum(d2), rng.random() * total, side="right"))
            idx = min(idx, n - 1)
        centers[c] = points[idx]
        d2 = np.minimum(d2, ((points - centers[c]) ** 2).sum(axis=1))
    return centers


def kmeans_cluster(points, k: int, seed, wcss_history: list | None = None) -> ClusterAssignment:
    """Lloyd's algorithm with k-means++ seeding.

    Runs at most KMEANS_MAX_ITER iterations, stopping once no center moves
    by KMEANS_TOL or more. A cluster left empty by an assignment step is
    repaired by handing it the point farthest from its current center.
    Pass a list as ``wcss_history`` to record the per-iteration
    within-cluster sum of squares (diagnostics; it never increases).
    """
    points = np.asarray(points, dtype=float)
    n = points.shape[0]
    if not 1 <= k <= n:
        raise ValueError(f"cluster count k={k} out of range [1, {n}]")
    rng = np.random.default_rng(seed)
    centers = _kmeans_pp_init(points, k, rng)

    labels = np.zeros(n, dtype=np.intp)
    for _ in range(KMEANS_MAX_ITER):
        dist2 = ((points[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
        labels = dist2.argmin(axis=1)  # argmin takes the lowest cluster id on ties

        for cid in range(k):
            if not (labels == cid).any():
                own_d = dist2[np.arange(n), labels].copy()
                counts = np.bincount(labels, minlength=k)
                own_d[counts[labels] < 2] = -1.0  # never empty a singleton cluster
                stray = int(np.argmax(own_d))
                labels[stray] = cid
                dist2[stray, :] = 0.0  # keep one repair from stealing another's pick

        new_centers = np.empty_like(centers)
        for cid in range(k):
            new_centers[cid] = points[labels == cid].mean(axis=0)
        if wcss_history is not None:
            wcss_history.append(
                float(((points - new_centers[labels]) ** 2).sum()))
        shift = np.linalg.norm(new_centers - centers, axis=1).max()
        centers = new_centers
        if shift < KMEANS_TOL:
            break
    return ClusterAssignment(labels=labels, centers=centers)


def select_kmeans(g: WeightedGraph, k: int, seed) -> tuple[int, ...]:
    """Cluster agent coordinates and take each cluster's most central member.

    Clusters are processed in ascending cluster id; within a cluster,
    members rank by (distance to center, id) and the first not already
    taken becomes that cluster's leader.
    """
    _check_k(k, g.n)
    assignment = kmeans_cluster(g.coords, k, seed)
    taken: list[int] = []
    for cid in range(k):
        members = np.flatnonzero(assignment.labels == cid)
        dist = np.linalg.norm(g.coords[members] - assignment.centers[cid], axis=1)
        for pos in np.lexsort((members, dist)):
            agent = int(members[pos])
            if agent not in taken:
                taken.append(agent)
                break
    return tuple(sorted(taken))


def unrank_combination(index: int, n: int, k: int) -> tuple[int, ...]:
    """The ``index``-th (1-based) k-subset of {0..n-1} in lexicographic order.

    Combinatorial number system with exact integer binomials, so it is
    exact for any n this package meets (and far beyond).
    """
    total = math.comb(n, k)
    if not 1 <= index <= total:
        raise ValueError(f"index {index} out of range [1, {total}] for C({n},{k})")
    members = []
    remaining = index - 1
    value = 0
    for slots in range(k, 0, -1):
        count = math.comb(n - 1 - value, slots - 1)
        while remaining >= count:
            remaining -= count
            value += 1
            count = math.comb(n - 1 - value, slots - 1)
        members.append(value)
        value += 1
    return tuple(members)


def _as_int_seed(seed) -> int:
    if isinstance(seed, np.random.SeedSequence):
        return int.from_bytes(seed.generate_state(4, np.uint64).tobytes(), "little")
    return int(seed)


def select_huge_random(g: WeightedGraph, k: int, samples: int = HUGE_RANDOM_SAMPLES,
                       seed=None) -> tuple[int, ...]:
    """Best-of-many random subsets, by lambda_min of the grounded Laplacian.

    When C(n, k) <= samples every subset is evaluated (exact optimum).
    Otherwise ``samples`` lexicographic ranks are drawn uniformly with
    replacement (Python's Random handles the arbitrary-precision range;
    numpy generators cannot), unranked, and the best evaluated subset wins.
    Ties go to the lexicographically smallest subset.
    """
    n = g.n
    _check_k(k, n, strict=True)
    if samples < 1:
        raise ValueError(f"sample count must be positive, got {samples}")
    total = math.comb(n, k)
    if total <= samples:
        candidates = [tuple(c) for c in itertools.combinations(range(n), k)]
    else:
        if seed is None:
            raise ValueError("sampling branch needs a seed for reproducibility")
        rnd = random.Random(_as_int_seed(seed))
        ranks = {rnd.randint(1, total) for _ in range(samples)}
        candidates = sorted(unrank_combination(r, n, k) for r in ranks)
    rates = _grounded_lambda_mins(laplacian(g), candidates)
    best = int(np.argmax(rates))  # first max = lexicographically smallest
    return candidates[best]


def select_leaders(algorithm: Algorithm, g: WeightedGraph, k: int, seed=None,
                   samples: int = HUGE_RANDOM_SAMPLES) -> SelectionRecord:
    """Run one of the six algorithms and record the induced rate."""
    algorithm = Algorithm(algorithm)
    if algorithm is Algorithm.GREEDY_K_LEADER:
        leaders = select_greedy_k_leader(g, k)
    elif algorithm is Algorithm.RANDOM:
        leaders = select_random(g.n, k, seed)
    elif algorithm is Algorithm.MAX_DEGREE:
        leaders = select_max_degree(g, k)
    elif algorithm is Algorithm.AVERAGE_DEGREE:
        leaders = select_average_degree(g, k)
    elif algorithm is Algorithm.KMEANS:
        leaders = select_kmeans(g, k, seed)
    else:
        leaders = select_huge_random(g, k, samples=samples, seed=seed)
    L = laplacian(g)
    sys = ground(L, leaders, np.zeros(len(leaders)))
    rate = float(np.linalg.eigvalsh(sys.lff)[0])
    return SelectionRecord(algorithm=algorithm, leaders=leaders, rate=rate)
