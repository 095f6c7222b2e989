"""Exhaustive maximum-likelihood sequence detection.

Global minimizer of ``||y - H a||^2`` over all alphabet^N candidate blocks.
Used as the oracle that relaxation detectors are measured against, so
correctness (including the deterministic tie-break) matters more than reach;
a hard candidate guard protects against accidental exponential blowups.

The search enumerates head/tail halves of the block.  When H is lower
triangular the head prefix cost is a valid lower bound on every completion,
which allows sound pruning against an incumbent from successive interference
cancellation; pruning never changes the returned argmin.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ParameterError, SearchSpaceError

#: Default cap on enumerated candidates.
MAX_CANDIDATES = 10_000_000

# Keep tail-expansion scoring blocks around this many metric entries.
_BLOCK_ENTRIES = 2_000_000


@dataclass(frozen=True)
class MlseResult:
    """Argmin block of the exhaustive search."""

    symbols: np.ndarray
    indices: np.ndarray
    objective: float


def mlse_exhaustive(
    y,
    H,
    alphabet,
    max_candidates: int = MAX_CANDIDATES,
    initial_bound: float | None = None,
) -> MlseResult:
    """Minimize ``||y - H a||^2`` exactly over all alphabet blocks.

    Parameters
    ----------
    y : array_like
        Observation vector of length N.
    H : array_like
        N x N channel matrix (any scaling folded in by the caller).
    alphabet : array_like
        Constellation points; candidates are drawn from ``alphabet**N``.
    max_candidates : int
        Guard on ``len(alphabet)**N``; exceeding it raises
        ``SearchSpaceError`` instead of attempting the search.
    initial_bound : float, optional
        Cost of any known feasible block (for example a relaxation
        detector's rounded objective).  Must be attainable; it tightens
        pruning but never alters the result.

    Returns
    -------
    MlseResult
        Ties in the objective resolve to the lexicographically smallest
        index vector.
    """
    y = np.asarray(y, dtype=complex)
    H = np.asarray(H, dtype=complex)
    alphabet = np.asarray(alphabet, dtype=complex)
    N = y.size
    if H.shape != (N, N):
        raise ParameterError(f"channel matrix must be {N}x{N}, got {H.shape}")
    if alphabet.ndim != 1 or alphabet.size < 1:
        raise ParameterError("alphabet must be a nonempty 1-D array")

    A = alphabet.size
    total = A**N
    if total > max_candidates:
        raise SearchSpaceError(
            f"{A}^{N} = {total} candidates exceeds the guard of {max_candidates}"
        )

    if N == 1:
        metrics = np.abs(y[0] - H[0, 0] * alphabet) ** 2
        k = int(np.argmin(metrics))
        return _finalize(y, H, alphabet, np.array([k]))

    n1 = N // 2
    n2 = N - n1
    heads = _index_grid(A, n1)
    tails = _index_grid(A, n2)
    Hs = H[:, :n1]
    Ht = H[:, n1:]
    U = alphabet[heads] @ Hs.T  # head contribution to all N rows
    Wt = alphabet[tails] @ Ht.T

    lower_tri = bool(np.all(np.abs(H[np.triu_indices(N, 1)]) == 0.0))

    bound = np.inf
    if lower_tri:
        bound = _sic_metric(y, H, alphabet)
    if initial_bound is not None:
        bound = min(bound, float(initial_bound))

    if lower_tri:
        # tail symbols do not reach the first n1 rows, so the head prefix
        # cost lower-bounds every completion
        P = np.sum(np.abs(y[None, :n1] - U[:, :n1]) ** 2, axis=1)
        keep = np.nonzero(P <= bound * (1.0 + 1e-9) + 1e-12)[0]
        D = y[None, n1:] - U[keep, n1:]
        base = P[keep]
    else:
        keep = np.arange(U.shape[0])
        D = y[None, :] - U
        base = np.zeros(keep.size)
        Wt_lower = Wt
    Wt_lower = Wt[:, n1:] if lower_tri else Wt

    cw = np.sum(np.abs(Wt_lower) ** 2, axis=1)
    cd = np.sum(np.abs(D) ** 2, axis=1)

    best_val = np.inf
    best_head = -1
    best_tail = -1
    rows_per_block = max(1, _BLOCK_ENTRIES // max(1, tails.shape[0]))
    for start in range(0, keep.size, rows_per_block):
        stop = min(start + rows_per_block, keep.size)
        cross = (D[start:stop].conj() @ Wt_lower.T).real
        block = (base[start:stop] + cd[start:stop])[:, None] + cw[None, :] - 2.0 * cross
        k = int(np.argmin(block))
        r, c = divmod(k, tails.shape[0])
        val = float(block[r, c])
        # strict improvement keeps the first (lexicographically smallest) hit
        if val < best_val:
            best_val = val
            best_head = int(keep[start + r])
            best_tail = c

    idx = np.concatenate([heads[best_head], tails[best_tail]])
    return _finalize(y, H, alphabet, idx)


def _index_grid(A, width):
    """All index tuples of the given width in ascending lexicographic order."""
    grids = np.meshgrid(*([np.arange(A)] * width), indexing="ij")
    return np.stack([g.ravel() for g in grids], axis=1)


def _sic_metric(y, H, alphabet):
    """Metric of the successive-cancellation block (feasible upper bound)."""
    N = y.size
    idx = np.zeros(N, dtype=np.intp)
    syms = np.zeros(N, dtype=complex)
    for k in range(N):
        r = y[k] - H[k, :k] @ syms[:k]
        h = H[k, k]
        idx[k] = int(np.argmin(np.abs(r - h * alphabet))) if np.abs(h) > 0 else 0
        syms[k] = alphabet[idx[k]]
    resid = y - H @ syms
    return float(np.real(np.vdot(resid, resid)))


def _finalize(y, H, alphabet, idx):
    syms = alphabet[idx]
    resid = y - H @ syms
    obj = float(np.real(np.vdot(resid, resid)))
    return MlseResult(symbols=syms, indices=idx.astype(np.int64), objective=obj)
