"""Exact average AoI for small symmetric networks via a Markov solve.

Independent validation oracle for the closed forms and the simulator:
the joint age process of N devices sharing one idealized collision
channel is a Markov chain.  Transmit behavior depends on a device's age
only through min(age, delta), so every device except one can be lumped
exactly onto {1, ..., delta} without approximation.  The remaining
tracked device keeps its true age, truncated at a cap A ("A" means
">= A"); the cap doubles until the stationary tail mass is below
tolerance, so the truncation error on the mean is quantifiably tiny.
By symmetry the tracked device's stationary mean age equals the
network average.
"""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .protocols import Policy


class TruncationError(RuntimeError):
    """The age cap never captured enough stationary mass."""


def _stationary(P: sp.csr_matrix) -> np.ndarray:
    """Stationary row vector of a (possibly reducible, unichain) matrix."""
    S = P.shape[0]
    M = (P - sp.identity(S, format="csr")).T.tolil()
    M[0, :] = 1.0  # replace one balance equation with normalization
    b = np.zeros(S)
    b[0] = 1.0
    pi = spla.spsolve(M.tocsc(), b)
    pi = np.clip(pi, 0.0, None)
    return pi / pi.sum()


def exact_average_aoi_markov(
    n: int,
    policy: Policy,
    *,
    tail_tol: float = 1e-10,
    max_doublings: int = 6,
) -> float:
    """Exact (to truncation) network average AoI for n <= 3 devices.

    All devices run the same ``policy`` on the collision-only channel
    with no misdetection, matching the setting of the closed forms.
    """
    if not 1 <= n <= 3:
        raise ValueError(f"exact solve supported for n in 1..3, got {n}")
    delta = policy.delta
    p = policy.p

    cap = max(200, 50 * n * delta)
    for _ in range(max_doublings + 1):
        mean_age, tail = _solve_at_cap(n, delta, p, cap)
        if tail < tail_tol:
            return mean_age
        cap *= 2
    raise TruncationError(
        f"stationary tail mass {tail:.3e} still >= {tail_tol} at cap {cap // 2} "
        f"(n={n}, delta={delta}, p={p}); average AoI may be divergent"
    )


def _solve_at_cap(n: int, delta: int, p: float, cap: int) -> tuple[float, float]:
    """Build the lumped joint chain at a given tracked-age cap and solve it.

    State = (a, c_2, ..., c_n) with tracked age a in 1..cap and lumped
    ages c_j in 1..delta.  Per slot each eligible device transmits
    independently with probability p; exactly one transmitter delivers
    and resets to age 1, anything else increments everyone.
    """
    shape = (cap,) + (delta,) * (n - 1)
    S = int(np.prod(shape))
    idx = np.indices(shape).reshape(n, S)
    a = idx[0] + 1  # tracked age
    cs = idx[1:] + 1  # lumped ages of the other devices

    x = np.empty((n, S))
    x[0] = np.where(a >= delta, p, 0.0)
    for j in range(n - 1):
        x[j + 1] = np.where(cs[j] == delta, p, 0.0)

    silent = 1.0 - x
    all_silent = silent.prod(axis=0)
    # P(device i transmits alone) = x_i * prod_{j != i} (1 - x_j)
    alone = np.empty((n, S))
    for i in range(n):
        others = np.ones(S)
        for j in range(n):
            if j != i:
                others *= silent[j]
        alone[i] = x[i] * others
    p_none = 1.0 - alone.sum(axis=0)

    a_inc = np.minimum(idx[0] + 1, cap - 1)  # tracked age grows, capped
    cs_inc = [np.minimum(c + 1, delta - 1) for c in idx[1:]] if n > 1 else []

    rows, cols, vals = [], [], []

    def add(target_indices: list[np.ndarray], prob: np.ndarray) -> None:
        mask = prob > 0.0
        if not mask.any():
            return
        dest = np.ravel_multi_index([t[mask] for t in target_indices], shape)
        rows.append(np.arange(S)[mask])
        cols.append(dest)
        vals.append(prob[mask])

    # Nobody delivers: every age increments.
    add([a_inc] + cs_inc, p_none)
    # Tracked device delivers: its age resets, others increment.
    add([np.zeros(S, dtype=idx.dtype)] + cs_inc, alone[0])
    # Other device j delivers: it resets, everyone else increments.
    for j in range(n - 1):
        targets = [a_inc] + [
            np.zeros(S, dtype=idx.dtype) if k == j else cs_inc[k]
            for k in range(n - 1)
        ]
        add(targets, alone[j + 1])

    P = sp.csr_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(S, S),
    )
    pi = _stationary(P)
    tail = float(pi[a == cap].sum())
    return float((pi * a).sum()), tail
