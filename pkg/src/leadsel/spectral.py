"""Spectral quantities of grounded consensus systems.

The smallest eigenvalue of the follower block L_FF measures how fast the
followers approach equilibrium; the equilibrium itself (the limit state)
is the harmonic extension of the leader values.
"""

from __future__ import annotations

import numpy as np

from .graph import GroundedSystem

# Maximum allowed |M - M.T| entry for inputs declared symmetric.
SYMMETRY_TOL = 1e-10
# Accuracy of smallest_eigenvalue: abs error <= EIG_TOL * (1 + max row sum).
EIG_TOL = 1e-9
# limit_state residual bound: ||L_FF x* + L_FL x_L|| <= RESIDUAL_RTOL * ||x_L||.
RESIDUAL_RTOL = 1e-9


class NotSymmetricError(ValueError):
    """Input matrix is not symmetric within SYMMETRY_TOL."""


class UnreachableFollowersError(ValueError):
    """L_FF is singular: some follower group has no path to any leader."""


def _check_symmetric(m) -> np.ndarray:
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    skew = np.abs(m - m.T).max() if m.size else 0.0
    if skew > SYMMETRY_TOL:
        raise NotSymmetricError(
            f"matrix is not symmetric: max |M - M^T| = {skew:.3e} > {SYMMETRY_TOL:.0e}")
    return m


def smallest_eigenvalue(m) -> float:
    """Smallest eigenvalue of a symmetric matrix.

    Uses a full symmetric eigendecomposition, which comfortably meets the
    EIG_TOL accuracy contract at the matrix orders used here (n <= 1000).
    """
    m = _check_symmetric(m)
    if m.shape[0] == 0:
        raise ValueError("matrix is empty")
    return float(np.linalg.eigvalsh(m)[0])


def largest_eigenvalue(m) -> float:
    """Largest eigenvalue of a symmetric matrix (Euler stability checks)."""
    m = _check_symmetric(m)
    if m.shape[0] == 0:
        raise ValueError("matrix is empty")
    return float(np.linalg.eigvalsh(m)[-1])


def convergence_rate(sys: GroundedSystem) -> float:
    """Asymptotic convergence rate of the followers: lambda_min(L_FF).

    Strictly positive whenever the underlying graph is connected and at
    least one leader exists.
    """
    if sys.lff.shape[0] == 0:
        raise ValueError("grounded system has no followers")
    return smallest_eigenvalue(sys.lff)


def limit_state(sys: GroundedSystem, initial) -> np.ndarray:
    """Equilibrium the followers converge to, assembled as a full vector.

    Solves L_FF x_F* = -L_FL x_L directly and places the solution at the
    follower positions of a copy of ``initial``; leader positions are set
    to the fixed leader states. ``initial`` may be a (V,) vector or a
    (V, d) array with one column per coordinate axis.

    Raises :class:`UnreachableFollowersError` if L_FF is singular or the
    solve fails the RESIDUAL_RTOL residual bound.
    """
    if sys.lff.shape[0] == 0:
        raise ValueError("grounded system has no followers")
    x_l = sys.leader_states
    rhs = -sys.lfl @ x_l
    try:
        x_f = np.linalg.solve(sys.lff, rhs)
    except np.linalg.LinAlgError as exc:
        raise UnreachableFollowersError(
            "unreachable followers: L_FF is singular") from exc
    residual = np.linalg.norm(sys.lff @ x_f + sys.lfl @ x_l)
    if residual > RESIDUAL_RTOL * np.linalg.norm(x_l):
        raise UnreachableFollowersError(
            f"unreachable followers: solve residual {residual:.3e} exceeds "
            f"{RESIDUAL_RTOL:.0e} * ||x_L||")
    x_star = np.array(initial, dtype=float)
    if x_star.shape[0] != sys.lff.shape[0] + len(sys.leader_ids):
        raise ValueError(
            f"initial state has {x_star.shape[0]} rows, expected "
            f"{sys.lff.shape[0] + len(sys.leader_ids)}")
    x_star[sys.follower_ids] = x_f
    x_star[sys.leader_ids] = x_l
    return x_star


def save_matrix(m, path) -> None:
    """Write a dense matrix: one order line, then one row per line."""
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    lines = [str(m.shape[0])]
    lines += [" ".join(repr(v) for v in row) for row in m.tolist()]
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def load_matrix(path) -> np.ndarray:
    """Read a matrix written by :func:`save_matrix`."""
    with open(path) as fh:
        lines = [line.split() for line in fh if line.strip()]
    if not lines:
        raise ValueError(f"{path}: empty matrix file")
    order = int(lines[0][0])
    if len(lines) != order + 1:
        raise ValueError(f"{path}: expected {order} rows, got {len(lines) - 1}")
    m = np.array([[float(v) for v in row] for row in lines[1:]])
    if m.shape != (order, order):
        raise ValueError(f"{path}: rows do not form a {order}x{order} matrix")
    return m
