"""Lowest-eigenpair solvers: dense LAPACK for small problems, block Lanczos
with full reorthogonalization for matrix-free operators."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh, qr

DENSE_CUTOFF = 4096


class EigensolverError(RuntimeError):
    """Iteration budget exhausted; carries the best residual reached."""

    def __init__(self, message, best_residual=None):
        super().__init__(message)
        self.best_residual = best_residual


@dataclass
class EigenResult:
    values: np.ndarray     # k smallest, ascending
    vectors: np.ndarray    # dim x k, orthonormal columns
    residuals: np.ndarray  # ||A v - lambda v|| per pair
    matvecs: int
    converged: bool


def dense_lowest(matrix: np.ndarray, k: int) -> EigenResult:
    vals, vecs = eigh(matrix)
    v, w = vals[:k], vecs[:, :k]
    res = np.linalg.norm(matrix @ w - w * v[None, :], axis=0)
    return EigenResult(values=v, vectors=w, residuals=res,
                       matvecs=matrix.shape[0], converged=True)


def _adjoint_dot(basis, block):
    """basis^dagger @ block without materializing conj(basis)."""
    return (basis.T @ block.conj()).conj()


def _orthonormalize(block, basis):
    """Project ``block`` off ``basis`` (twice, for stability) and QR it."""
    for _ in range(2):
        if basis is not None and basis.shape[1]:
            block = block - basis @ _adjoint_dot(basis, block)
    q, r = qr(block, mode="economic")
    keep = np.abs(np.diag(r)) > 1e-10 * max(1.0, np.abs(np.diag(r)).max())
    return q[:, keep]


def block_lanczos_lowest(apply_op, dim: int, k: int, tol: float = 1e-9,
                         block_size: int | None = None,
                         max_krylov: int | None = None,
                         max_restarts: int = 60,
                         dtype=np.complex128,
                         rng: np.random.Generator | None = None) -> EigenResult:
    """Block Lanczos for the k smallest eigenpairs of a Hermitian operator
    given only by its action.

    The Krylov basis is kept fully orthogonal (reorthogonalization against
    every stored vector), so degenerate clusters are resolved as long as the
    block size is at least the cluster multiplicity (default k + 2).  When
    the basis hits ``max_krylov`` it is thick-restarted from the lowest Ritz
    vectors.
    """
    if rng is None:
        rng = np.random.default_rng(7)
    b = block_size or min(dim, k + 2)
    m_cap = max_krylov or min(dim, max(10 * b, 12 * k, 96))

    matvecs = 0

    def apply_block(block):
        nonlocal matvecs
        out = np.empty(block.shape, dtype=dtype)
        for j in range(block.shape[1]):
            out[:, j] = apply_op(block[:, j])
        matvecs += block.shape[1]
        return out

    def random_block(width):
        blk = rng.standard_normal((dim, width))
        if np.dtype(dtype).kind == "c":
            blk = blk + 1j * rng.standard_normal((dim, width))
        return blk.astype(dtype)

    # preallocated basis, its image, and the projected operator; T is kept
    # up to date incrementally as blocks are appended
    Q = np.empty((dim, m_cap), dtype=dtype)
    AQ = np.empty((dim, m_cap), dtype=dtype)
    T = np.zeros((m_cap, m_cap), dtype=dtype)
    m = 0
    last_width = 0

    def append(block):
        nonlocal m, last_width
        w = block.shape[1]
        Q[:, m:m + w] = block
        AQ[:, m:m + w] = apply_block(block)
        if m:
            cross = _adjoint_dot(Q[:, :m], AQ[:, m:m + w])
            T[:m, m:m + w] = cross
            T[m:m + w, :m] = cross.conj().T
        diag = block.conj().T @ AQ[:, m:m + w]
        T[m:m + w, m:m + w] = 0.5 * (diag + diag.conj().T)
        m += w
        last_width = w

    append(_orthonormalize(random_block(b), None))

    def converged_pairs():
        vals, S = eigh(T[:m, :m])
        nk = min(k, m)
        ritz_vals = vals[:nk]
        ritz = Q[:, :m] @ S[:, :nk]
        Aritz = AQ[:, :m] @ S[:, :nk]
        res = np.linalg.norm(Aritz - ritz * ritz_vals[None, :], axis=0)
        return ritz_vals, ritz, res

    check_every = 3  # Ritz formation is the dominant non-matvec cost
    best_res = np.inf
    for _ in range(max_restarts):
        since_check = check_every - 1
        while True:
            since_check += 1
            room = min(m_cap - m, dim - m)
            if since_check >= check_every or room <= 0:
                since_check = 0
                ritz_vals, ritz, res = converged_pairs()
                best_res = min(best_res, float(res.max()))
                if m >= k and np.all(res <= tol):
                    return EigenResult(values=ritz_vals.real, vectors=ritz,
                                       residuals=res, matvecs=matvecs,
                                       converged=True)
            if room <= 0:
                break
            # classical expansion: apply the operator to the last block
            new = _orthonormalize(AQ[:, m - last_width:m].copy(), Q[:, :m])
            if new.shape[1] < min(b, room):
                fill = _orthonormalize(
                    random_block(min(b, room) - new.shape[1]),
                    np.hstack([Q[:, :m], new]) if new.size else Q[:, :m])
                new = np.hstack([new, fill]) if new.size else fill
            if new.shape[1] == 0:
                break
            append(new[:, :room])
        if m >= dim:
            break
        # thick restart: keep a window of the lowest Ritz vectors, ordered so
        # the next expansion block continues from the lowest ones
        keep = min(m, max(k + b, 2 * k))
        vals, S = eigh(T[:m, :m])
        window = S[:, :keep][:, ::-1]
        Q[:, :keep] = Q[:, :m] @ window
        AQ[:, :keep] = AQ[:, :m] @ window
        T[:keep, :keep] = np.diag(vals[:keep][::-1])
        m = keep
        last_width = min(b, keep)

    raise EigensolverError(
        f"no convergence to tol={tol} (best residual {best_res:.3e})",
        best_residual=best_res)
