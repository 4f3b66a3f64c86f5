"""Weighted geometric graphs for leader-follower consensus systems.

Agents are dropped uniformly into a square region (coordinates in meters);
two agents are connected iff their distance is at most the connection
radius, and each connection carries one symmetric random weight. The module
also builds the Laplacian and its grounded (leader-deleted) blocks.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator

import numpy as np

# Geometry is specified in meters; the simulation runs in centimeters so
# that the convergence error (cm) and speed cap (cm/s) apply directly.
M_TO_CM = 100.0


class NoFollowersError(ValueError):
    """Every agent was declared a leader, so the grounded system is empty."""


class GenerationError(RuntimeError):
    """No usable graph could be generated within the retry budget."""


@dataclass(frozen=True)
class WeightedGraph:
    """Agent coordinates plus a symmetric weighted adjacency matrix.

    ``coords`` is (n, 2) in meters, ``adjacency`` is (n, n) with zero
    diagonal and ``adjacency[i, j] == adjacency[j, i]`` exactly; a zero
    entry means "no edge". Arrays are frozen after construction.
    """

    coords: np.ndarray
    adjacency: np.ndarray

    def __post_init__(self):
        coords = np.ascontiguousarray(self.coords, dtype=float)
        adj = np.ascontiguousarray(self.adjacency, dtype=float)
        if coords.ndim != 2 or coords.shape[1] != 2:
            raise ValueError(f"coords must have shape (n, 2), got {coords.shape}")
        n = coords.shape[0]
        if adj.shape != (n, n):
            raise ValueError(f"adjacency must have shape ({n}, {n}), got {adj.shape}")
        if not np.array_equal(adj, adj.T):
            raise ValueError("adjacency must be exactly symmetric")
        if np.any(np.diag(adj) != 0.0):
            raise ValueError("adjacency diagonal must be zero")
        if np.any(adj < 0.0):
            raise ValueError("edge weights must be non-negative")
        coords.setflags(write=False)
        adj.setflags(write=False)
        object.__setattr__(self, "coords", coords)
        object.__setattr__(self, "adjacency", adj)

    @property
    def n(self) -> int:
        return self.coords.shape[0]

    def edges(self) -> Iterator[tuple[int, int, float]]:
        """Yield (i, j, weight) with i < j, in lexicographic order."""
        ii, jj = np.nonzero(np.triu(self.adjacency))
        for i, j in zip(ii.tolist(), jj.tolist()):
            yield i, j, float(self.adjacency[i, j])


@dataclass(frozen=True)
class GroundedSystem:
    """Leader-deleted blocks of a Laplacian, plus the fixed leader states.

    ``lff`` couples followers to followers, ``lfl`` couples followers to
    leaders; the leader rows of the partitioned matrix are zero by
    construction (leaders never update) and are not stored.
    ``leader_states`` has shape (k,) for one axis or (k, d) for d axes.
    """

    follower_ids: np.ndarray
    leader_ids: np.ndarray
    lff: np.ndarray
    lfl: np.ndarray
    leader_states: np.ndarray


def validate_leaders(leaders: Iterable[int], n: int) -> tuple[int, ...]:
    """Normalize a leader collection to a sorted tuple of distinct ids."""
    members = tuple(sorted(int(i) for i in leaders))
    if not members:
        raise ValueError("leader set must not be empty")
    if len(set(members)) != len(members):
        raise ValueError(f"duplicate leader ids in {members}")
    if members[0] < 0 or members[-1] >= n:
        raise ValueError(f"leader ids {members} out of range [0, {n})")
    return members


def generate_geometric(n: int, side: float, radius: float, weight_max: float,
                       seed) -> WeightedGraph:
    """Generate a random geometric graph with uniform edge weights.

    Coordinates are i.i.d. uniform on [0, side]^2 (meters). An edge exists
    between distinct agents iff their Euclidean distance is <= radius, and
    gets one weight drawn uniformly from (0, weight_max] (sampled as
    weight_max * (1 - u), u in [0, 1), so 0 is excluded exactly), assigned
    to both directions. Weights are drawn in ascending (i, j) edge order,
    so an identical seed reproduces an identical graph bit for bit.

    ``seed`` may be anything ``numpy.random.default_rng`` accepts.
    """
    if n < 1:
        raise ValueError(f"need at least one agent, got n={n}")
    if side <= 0:
        raise ValueError(f"square side must be positive, got {side}")
    if radius < 0:
        raise ValueError(f"connection radius must be non-negative, got {radius}")
    if weight_max <= 0:
        raise ValueError(f"weight bound must be positive, got {weight_max}")

    rng = np.random.default_rng(seed)
    coords = rng.random((n, 2)) * side

    adjacency = np.zeros((n, n))
    if n > 1:
        diff = coords[:, None, :] - coords[None, :, :]
        dist = np.hypot(diff[..., 0], diff[..., 1])
        iu, ju = np.triu_indices(n, 1)
        connected = dist[iu, ju] <= radius
        weights = weight_max * (1.0 - rng.random(int(connected.sum())))
        adjacency[iu[connected], ju[connected]] = weights
        adjacency = adjacency + adjacency.T
    return WeightedGraph(coords=coords, adjacency=adjacency)


def generate_connected(n: int, side: float, radius: float, weight_max: float,
                       seed, max_retries: int = 100) -> WeightedGraph:
    """Like :func:`generate_geometric`, but retry until connected.

    Retry streams are derived deterministically from the seed (attempt 0
    uses the seed itself, so the result matches ``generate_geometric``
    whenever the first draw is already connected). Raises
    :class:`GenerationError` after ``max_retries`` disconnected draws.
    """
    base = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    for attempt in range(max_retries):
        stream = base if attempt == 0 else np.random.SeedSequence(
            base.entropy, spawn_key=(attempt,))
        g = generate_geometric(n, side, radius, weight_max, stream)
        if is_connected(g):
            return g
    raise GenerationError(
        f"no connected graph in {max_retries} attempts "
        f"(n={n}, side={side}, radius={radius})")


def is_connected(g: WeightedGraph) -> bool:
    """True iff every agent is reachable from agent 0."""
    n = g.n
    if n == 1:
        return True
    linked = g.adjacency > 0.0
    visited = np.zeros(n, dtype=bool)
    visited[0] = True
    frontier = visited.copy()
    while frontier.any():
        frontier = linked[frontier].any(axis=0) & ~visited
        visited |= frontier
    return bool(visited.all())


def laplacian(g: WeightedGraph) -> np.ndarray:
    """Laplacian L = D - A with D the diagonal of weighted degrees."""
    return np.diag(g.adjacency.sum(axis=1)) - g.adjacency


def weighted_indegrees(g: WeightedGraph) -> np.ndarray:
    """Weighted degree of every agent (the Laplacian diagonal)."""
    return g.adjacency.sum(axis=1)


def weighted_indegree(g: WeightedGraph, i: int) -> float:
    """Sum of the weights of the edges incident to agent ``i``."""
    if not 0 <= i < g.n:
        raise ValueError(f"agent id {i} out of range [0, {g.n})")
    return float(g.adjacency[i].sum())


def ground(L: np.ndarray, leaders: Iterable[int], leader_states) -> GroundedSystem:
    """Delete leader rows/columns of ``L`` and keep the follower blocks.

    Leaders are stubborn: their block rows of the partitioned system are
    zero, so only L_FF (follower/follower) and L_FL (follower/leader)
    matter for the dynamics. ``leader_states`` holds the fixed leader
    values, one row per leader (per axis if 2D).
    """
    L = np.asarray(L, dtype=float)
    n = L.shape[0]
    members = validate_leaders(leaders, n)
    if len(members) == n:
        raise NoFollowersError("no followers remain: every agent is a leader")
    leader_ids = np.array(members, dtype=np.intp)
    follower_ids = np.setdiff1d(np.arange(n), leader_ids)
    states = np.asarray(leader_states, dtype=float)
    if states.shape[0] != len(members):
        raise ValueError(
            f"need one state per leader, got {states.shape[0]} for {len(members)} leaders")
    return GroundedSystem(
        follower_ids=follower_ids,
        leader_ids=leader_ids,
        lff=L[np.ix_(follower_ids, follower_ids)],
        lfl=L[np.ix_(follower_ids, leader_ids)],
        leader_states=states,
    )


def save_graph(g: WeightedGraph, path) -> None:
    """Write a graph in the plain-text exchange format.

    Header line ``n <V>``, then V coordinate lines ``x y`` (meters), then
    one line ``i j w`` per edge with i < j. Floats use repr, which prints
    enough digits to round-trip exactly.
    """
    lines = [f"n {g.n}"]
    lines += [f"{x!r} {y!r}" for x, y in g.coords.tolist()]
    lines += [f"{i} {j} {w!r}" for i, j, w in g.edges()]
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def load_graph(path) -> WeightedGraph:
    """Read a graph written by :func:`save_graph`."""
    with open(path) as fh:
        tokens = [line.split() for line in fh if line.strip()]
    if not tokens or tokens[0][0] != "n" or len(tokens[0]) != 2:
        raise ValueError(f"{path}: expected header line 'n <count>'")
    n = int(tokens[0][1])
    if len(tokens) < 1 + n:
        raise ValueError(f"{path}: expected {n} coordinate lines")
    coords = np.array([[float(t[0]), float(t[1])] for t in tokens[1:1 + n]])
    adjacency = np.zeros((n, n))
    for t in tokens[1 + n:]:
        if len(t) != 3:
            raise ValueError(f"{path}: malformed edge line {' '.join(t)!r}")
        i, j, w = int(t[0]), int(t[1]), float(t[2])
        if not (0 <= i < n and 0 <= j < n) or i == j:
            raise ValueError(f"{path}: bad edge endpoints {i} {j}")
        adjacency[i, j] = w
        adjacency[j, i] = w
    return WeightedGraph(coords=coords, adjacency=adjacency)
