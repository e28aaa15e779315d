"""Stationary distribution of the buffer chain by GTH elimination."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .model import Generator, StateSpace

DEFAULT_TOL = 1e-10
_CLAMP = 1e-300


class NumericalError(ArithmeticError):
    """The solver could not produce a stationary vector within tolerance."""


@dataclass(frozen=True)
class SteadyState:
    space: StateSpace
    prob: np.ndarray = field(repr=False)
    residual: float

    def __post_init__(self):
        self.prob.setflags(write=False)

    def __getitem__(self, state: tuple[int, int]) -> float:
        return float(self.prob[self.space.index(state)])

    @property
    def grid(self) -> np.ndarray:
        """Probabilities as an ``(R+1, N+1)`` array indexed ``[i, j]``."""
        return self.prob.reshape(self.space.shape)


def gth_solve(rates: np.ndarray) -> np.ndarray:
    """Stationary vector of an irreducible rate matrix.

    Only the off-diagonal entries of `rates` are read. The elimination
    never subtracts, so no cancellation occurs regardless of how far apart
    the rates are in magnitude.

    Parameters
    ----------
    rates : ndarray, shape (n, n)
        Generator (or any Metzler matrix) of an irreducible chain.

    Returns
    -------
    ndarray, shape (n,)
        Probability vector ``p`` with ``p @ Q = 0``.
    """
    A = np.array(rates, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError("rate matrix must be square")
    n = A.shape[0]
    np.fill_diagonal(A, 0.0)
    for k in range(n - 1, 0, -1):
        out = A[k, :k].sum()
        if not out > 0:
            raise NumericalError(f"state {k} has no path to lower states; chain is reducible")
        A[:k, k] /= out
        A[:k, :k] += np.outer(A[:k, k], A[k, :k])
    x = np.empty(n)
    x[0] = 1.0
    for k in range(1, n):
        x[k] = x[:k] @ A[:k, k]
    return x / x.sum()


def _reachable(adj: np.ndarray, start: int) -> np.ndarray:
    seen = np.zeros(adj.shape[0], dtype=bool)
    seen[start] = True
    queue = deque([start])
    while queue:
        k = queue.popleft()
        for m in np.flatnonzero(adj[k]):
            if not seen[m]:
                seen[m] = True
                queue.append(m)
    return seen


def solve_steady_state(gen: Generator, tol: float = DEFAULT_TOL) -> SteadyState:
    """Solve ``P G = 0``, ``sum(P) = 1`` for the chain started empty.

    States not reachable from ``(0, 0)`` get probability exactly zero;
    GTH runs on the communicating class that contains the empty state.
    """
    Q = gen.rates
    adj = Q > 0
    np.fill_diagonal(adj, False)
    start = gen.space.index((0, 0))
    forward = _reachable(adj, start)
    backward = _reachable(adj.T, start)
    if np.any(forward & ~backward):
        raise NumericalError("states reachable from (0, 0) cannot return; no unique steady state")
    support = np.flatnonzero(forward)

    prob = np.zeros(len(gen.space))
    prob[support] = gth_solve(Q[np.ix_(support, support)])
    prob[prob < _CLAMP] = 0.0
    prob /= prob.sum()

    ss = SteadyState(gen.space, prob, 0.0)
    res = verify_residual(gen, ss)
    if not res <= tol:
        raise NumericalError(f"residual {res:.3e} exceeds tolerance {tol:.1e}")
    return SteadyState(gen.space, prob, res)


def verify_residual(gen: Generator, ss: SteadyState) -> float:
    """Max-norm of ``P G``."""
    if ss.space.config != gen.space.config or len(ss.prob) != gen.rates.shape[0]:
        raise ValueError("steady state and generator are defined on different state spaces")
    return float(np.max(np.abs(ss.prob @ gen.rates)))
