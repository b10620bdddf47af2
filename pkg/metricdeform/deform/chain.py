"""Chain metrics: all-pairs shortest paths over density-weighted edges."""

import itertools
import logging

import numpy as np

logger = logging.getLogger("metricdeform")

MAX_BRUTE_FORCE_POINTS = 8


def chain_weights(dist: np.ndarray, rho: np.ndarray) -> np.ndarray:
    """Edge weights (rho(x) + rho(y)) * d(x, y) of one-step chains."""
    rho = np.asarray(rho, dtype=np.float64)
    return (rho[:, None] + rho[None, :]) * dist


def product_weights(dist: np.ndarray, rho: np.ndarray) -> np.ndarray:
    """Edge weights rho(x) * rho(y) * d(x, y)."""
    rho = np.asarray(rho, dtype=np.float64)
    return (rho[:, None] * rho[None, :]) * dist


def shortest_distances(weights: np.ndarray) -> np.ndarray:
    """Floyd-Warshall on a dense weight matrix.

    Relaxes through one intermediate point per round in index order, so the
    output only depends on the input matrix.
    """
    lengths = np.array(weights, dtype=np.float64, copy=True)
    np.fill_diagonal(lengths, 0.0)
    for k in range(lengths.shape[0]):
        np.minimum(lengths, lengths[:, k, None] + lengths[None, k, :], out=lengths)
    return lengths


def chain_metric(dist: np.ndarray, rho: np.ndarray) -> np.ndarray:
    """Infimum over chains of sum (rho(x_j) + rho(x_{j-1})) d(x_j, x_{j-1})."""
    out = shortest_distances(chain_weights(dist, rho))
    logger.debug(f"🔗 chain metric on {out.shape[0]} points")
    return out


def brute_force_chain_metric(weights: np.ndarray) -> np.ndarray:
    """Exhaustive minimum over simple chains; a cross-check for tiny spaces."""
    n = weights.shape[0]
    if n > MAX_BRUTE_FORCE_POINTS:
        raise ValueError(f"brute force is limited to {MAX_BRUTE_FORCE_POINTS} points, got {n}")
    out = np.zeros((n, n))
    for i, j in itertools.combinations(range(n), 2):
        inner = [k for k in range(n) if k not in (i, j)]
        best = weights[i, j]
        for size in range(1, len(inner) + 1):
            for middle in itertools.permutations(inner, size):
                path = (i, *middle, j)
                length = sum(weights[a, b] for a, b in zip(path, path[1:]))
                best = min(best, length)
        out[i, j] = out[j, i] = best
    return out
