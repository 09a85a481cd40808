"""Networks, stochastic weight matrices, and their spectral data.

Agents are indexed 0..n-1. Undirected edges are stored as (i, j) pairs with
i < j in lexicographic order. Weight matrices always put positive mass on
the closed neighborhood N(i) u {i} and nowhere else, which makes them
primitive whenever the underlying network is connected.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, replace
from enum import Enum
from functools import cached_property

import numpy as np

from .errors import (
    ConvergenceFailure,
    DimensionMismatch,
    DisconnectedNetwork,
    InvalidParameter,
)

SPECTRAL_TOL = 1e-10
SPECTRAL_MAX_ITER = 100_000


@dataclass(frozen=True)
class Network:
    """Undirected simple graph on n agents.

    Parameters
    ----------
    n : int
        Number of agents, >= 1.
    edges : tuple of (int, int)
        Edge list with i < j, no self loops, no duplicates.
    seed : int
        RNG seed the edge set was drawn with (0 for deterministic graphs).
    """

    n: int
    edges: tuple[tuple[int, int], ...]
    seed: int = 0

    def __post_init__(self):
        if self.n < 1:
            raise InvalidParameter(f"need at least one agent, got n={self.n}")
        seen = set()
        for i, j in self.edges:
            if not (0 <= i < j < self.n):
                raise InvalidParameter(f"edge ({i}, {j}) invalid for n={self.n}")
            if (i, j) in seen:
                raise InvalidParameter(f"duplicate edge ({i}, {j})")
            seen.add((i, j))

    @cached_property
    def neighbors(self) -> tuple[tuple[int, ...], ...]:
        adj: list[list[int]] = [[] for _ in range(self.n)]
        for i, j in self.edges:
            adj[i].append(j)
            adj[j].append(i)
        return tuple(tuple(sorted(a)) for a in adj)

    @cached_property
    def degrees(self) -> np.ndarray:
        return np.array([len(a) for a in self.neighbors])

    @cached_property
    def connected(self) -> bool:
        """Breadth-first reachability of every agent from agent 0."""
        seen = [False] * self.n
        seen[0] = True
        queue = [0]
        while queue:
            i = queue.pop()
            for j in self.neighbors[i]:
                if not seen[j]:
                    seen[j] = True
                    queue.append(j)
        return all(seen)


def generate_erdos_renyi(n: int, p: float, seed: int) -> Network:
    """Sample an Erdos-Renyi graph G(n, p).

    Each unordered pair (i, j), i < j, taken in lexicographic order, is
    included independently with probability p using one uniform draw from
    numpy's default generator seeded with `seed`. The edge set is therefore
    a pure function of (n, p, seed).

    Parameters
    ----------
    n : int
        Number of agents, >= 2.
    p : float
        Edge probability in [0, 1].
    seed : int
        Seed for numpy.random.default_rng.

    Returns
    -------
    Network
    """
    if n < 2:
        raise InvalidParameter(f"need n >= 2, got {n}")
    if not 0.0 <= p <= 1.0:
        raise InvalidParameter(f"edge probability must lie in [0, 1], got {p}")
    rng = np.random.default_rng(seed)
    pairs = list(itertools.combinations(range(n), 2))
    draws = rng.random(len(pairs))
    edges = tuple(pair for pair, u in zip(pairs, draws) if u < p)
    return Network(n=n, edges=edges, seed=seed)


def path_graph(n: int) -> Network:
    """Path 0 - 1 - ... - (n-1)."""
    if n < 1:
        raise InvalidParameter(f"need n >= 1, got {n}")
    return Network(n=n, edges=tuple((i, i + 1) for i in range(n - 1)))


def star_graph(n: int) -> Network:
    """Star with center 0 and leaves 1..n-1."""
    if n < 2:
        raise InvalidParameter(f"need n >= 2, got {n}")
    return Network(n=n, edges=tuple((0, i) for i in range(1, n)))


def complete_graph(n: int) -> Network:
    """Complete graph on n agents."""
    if n < 2:
        raise InvalidParameter(f"need n >= 2, got {n}")
    return Network(n=n, edges=tuple(itertools.combinations(range(n), 2)))


class WeightKind(str, Enum):
    DOUBLY_STOCHASTIC = "doubly_stochastic"
    ROW_STOCHASTIC = "row_stochastic"


@dataclass(frozen=True)
class SpectralData:
    """Perron vector and dominant deflated singular triple of a weight matrix.

    perron: left eigenvector of W at eigenvalue 1, positive, sums to 1.
    sigma_max: largest singular value of the deflated matrix W - 1 perron^T
      (equal to the second largest singular value of W when W is doubly
      stochastic).
    v2, u2: right and left singular vectors of the deflated matrix for
      sigma_max, unit norm, with v2 orthogonal to the all-ones vector.
    """

    perron: np.ndarray
    sigma_max: float
    v2: np.ndarray
    u2: np.ndarray
    symmetric: bool
    iterations: int


@dataclass(frozen=True, eq=False)
class WeightedNetwork:
    """A network together with a stochastic weight matrix on it."""

    network: Network
    W: np.ndarray
    kind: WeightKind
    spectral: SpectralData | None = None

    @property
    def n(self) -> int:
        return self.network.n

    def consensus_value(self, x0: np.ndarray) -> float:
        """Nominal consensus value perron^T x0."""
        if self.spectral is None:
            raise InvalidParameter("spectral data not computed for this weighted network")
        x0 = np.asarray(x0, dtype=float)
        if x0.shape != (self.n,):
            raise DimensionMismatch(f"x0 has shape {x0.shape}, expected ({self.n},)")
        return float(self.spectral.perron @ x0)

    def validate(self, atol: float = 1e-12) -> None:
        """Check structural invariants; raises InvalidParameter on violation."""
        W, net = self.W, self.network
        if W.shape != (net.n, net.n):
            raise DimensionMismatch(f"W has shape {W.shape}, expected ({net.n}, {net.n})")
        if (W < 0).any():
            raise InvalidParameter("weights must be nonnegative")
        if np.abs(W.sum(axis=1) - 1.0).max() > atol:
            raise InvalidParameter("rows must sum to 1")
        if self.kind is WeightKind.DOUBLY_STOCHASTIC:
            if np.abs(W.sum(axis=0) - 1.0).max() > atol:
                raise InvalidParameter("columns must sum to 1 for doubly stochastic weights")
        support = W > 0
        for i in range(net.n):
            expected = set(net.neighbors[i]) | {i}
            actual = set(np.flatnonzero(support[i]).tolist())
            if expected != actual:
                raise InvalidParameter(f"row {i} support {sorted(actual)} != closed neighborhood {sorted(expected)}")
        if not is_primitive(W):
            raise InvalidParameter("weight matrix is not primitive")


def is_primitive(W: np.ndarray, atol: float = 0.0) -> bool:
    """Primitivity via boolean matrix powers up to the Wielandt bound.

    A nonnegative square matrix is primitive iff its support raised to the
    power n^2 - 2n + 2 is everywhere positive.
    """
    n = W.shape[0]
    if W.shape != (n, n):
        raise DimensionMismatch(f"W must be square, got {W.shape}")
    base = (W > atol).astype(np.int32)
    exponent = n * n - 2 * n + 2
    result = np.eye(n, dtype=np.int32)
    while exponent:
        if exponent & 1:
            result = ((result @ base) > 0).astype(np.int32)
        base = ((base @ base) > 0).astype(np.int32)
        exponent >>= 1
    return bool(result.all())


def metropolis_weights(net: Network, lazy: bool = False, spectral: bool = True) -> WeightedNetwork:
    """Metropolis weight matrix of a connected network.

    W_ij = 1 / (1 + max(d_i, d_j)) on edges, diagonal set to the row
    complement. The result is symmetric and doubly stochastic. With
    lazy=True the matrix is averaged with the identity, (W + I) / 2, which
    shifts the spectrum into [0, 1] and keeps the second eigenvalue
    nonnegative.

    Parameters
    ----------
    net : Network
        Must be connected.
    lazy : bool
        Average with the identity.
    spectral : bool
        Compute SpectralData eagerly.
    """
    if not net.connected:
        raise DisconnectedNetwork("metropolis weights need a connected network")
    n = net.n
    deg = net.degrees
    W = np.zeros((n, n))
    for i, j in net.edges:
        w = 1.0 / (1.0 + max(deg[i], deg[j]))
        W[i, j] = w
        W[j, i] = w
    np.fill_diagonal(W, 1.0 - W.sum(axis=1))
    if lazy:
        W = (W + np.eye(n)) / 2.0
    wn = WeightedNetwork(network=net, W=W, kind=WeightKind.DOUBLY_STOCHASTIC)
    if spectral:
        wn = replace(wn, spectral=compute_spectral(wn))
    return wn


def row_stochastic_weights(net: Network, seed: int, spectral: bool = True) -> WeightedNetwork:
    """Random row-stochastic weights on the closed neighborhoods.

    For each row i in increasing order, one batch of uniform draws is taken
    for the sorted support N(i) u {i}, shifted into [1, 2) so every weight
    is positive and well conditioned, then normalized to sum to 1.
    """
    rng = np.random.default_rng(seed)
    return _row_stochastic_from_rng(net, rng, spectral=spectral)


def _row_stochastic_from_rng(net: Network, rng, spectral: bool = True) -> WeightedNetwork:
    if not net.connected:
        raise DisconnectedNetwork("row-stochastic weights need a connected network")
    n = net.n
    W = np.zeros((n, n))
    for i in range(n):
        support = sorted(set(net.neighbors[i]) | {i})
        raw = 1.0 + rng.random(len(support))
        W[i, support] = raw / raw.sum()
    wn = WeightedNetwork(network=net, W=W, kind=WeightKind.ROW_STOCHASTIC)
    if spectral:
        wn = replace(wn, spectral=compute_spectral(wn))
    return wn


def compute_spectral(
    weighted: WeightedNetwork,
    tol: float = SPECTRAL_TOL,
    max_iter: int = SPECTRAL_MAX_ITER,
) -> SpectralData:
    """Power-iteration Perron vector and dominant deflated singular triple.

    The Perron vector is iterated on W^T until the residual |W^T v - v|_inf
    drops below tol. The singular triple comes from iterating A^T A with
    A = W - 1 perron^T (equivalently W - 11^T / n in the doubly stochastic
    case), stopping when both singular residuals are below tol. Raises
    ConvergenceFailure if either loop exhausts max_iter.
    """
    W = weighted.W
    n = weighted.n
    ones = np.ones(n)
    symmetric = bool(np.abs(W - W.T).max() <= 1e-12)
    iterations = 0

    # left Perron vector; W^T preserves the probability simplex here
    WT = W.T
    v = np.full(n, 1.0 / n)
    y = WT @ v
    converged = False
    for _ in range(max_iter):
        iterations += 1
        total = y.sum()
        if total <= 0:
            raise ConvergenceFailure("perron iteration collapsed to zero")
        v = y / total
        y = WT @ v
        if np.abs(y - v).max() < tol:
            converged = True
            break
    if not converged:
        raise ConvergenceFailure(f"perron vector did not converge within {max_iter} iterations")

    A = W - np.outer(ones, v)
    rng = np.random.default_rng(weighted.network.seed)
    z = rng.standard_normal(n)
    z -= z.mean()  # remove the all-ones component, which A annihilates
    norm = np.linalg.norm(z)
    if norm == 0.0:
        z = np.zeros(n)
        z[0], z[-1] = 1.0, -1.0
        norm = np.linalg.norm(z)
    z /= norm

    if np.abs(A).max() < 1e-15:
        # rank-one consensus matrix: the deflated operator vanishes
        return SpectralData(perron=v, sigma_max=0.0, v2=_fix_sign(z), u2=_fix_sign(z),
                            symmetric=symmetric, iterations=iterations)

    sigma = 0.0
    u = z.copy()
    converged = False
    for _ in range(max_iter):
        iterations += 1
        w = A @ z
        sigma = float(np.linalg.norm(w))
        if sigma < 1e-300:
            break
        y2 = A.T @ w
        # singular residual |A^T u - sigma v2|_inf with u = w / sigma
        if np.abs(y2 - sigma * sigma * z).max() / sigma < tol:
            u = w / sigma
            converged = True
            break
        nrm = np.linalg.norm(y2)
        if nrm < 1e-300:
            break
        z = y2 / nrm
    if sigma < 1e-300:
        return SpectralData(perron=v, sigma_max=0.0, v2=_fix_sign(z), u2=_fix_sign(z),
                            symmetric=symmetric, iterations=iterations)
    if not converged:
        raise ConvergenceFailure(f"singular iteration did not converge within {max_iter} iterations")

    sign = 1.0 if z[np.argmax(np.abs(z))] >= 0 else -1.0
    return SpectralData(perron=v, sigma_max=sigma, v2=sign * z, u2=sign * u,
                        symmetric=symmetric, iterations=iterations)


def _fix_sign(z: np.ndarray) -> np.ndarray:
    return z if z[np.argmax(np.abs(z))] >= 0 else -z
