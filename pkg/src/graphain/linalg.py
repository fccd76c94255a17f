"""Small dense symmetric eigensolver and the spectral filters built on it.

The eigensolver is a cyclic Jacobi rotation scheme.  It is deliberately not
LAPACK: the verification oracles use LAPACK (through numpy) for their
projections, so agreement between the two is a genuine cross-check rather
than the same kernel meeting itself.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionMismatchError,
    NoConvergenceError,
    NotOrthonormalError,
    NotSymmetricError,
    RankDeficientError,
)

DEFAULT_EPS_RANK = 1e-12


@dataclass(frozen=True)
class EigPair:
    """Orthogonal eigenvectors (columns of u) with nonincreasing eigenvalues."""

    u: np.ndarray
    values: np.ndarray


@dataclass(frozen=True)
class SpectralFilterParams:
    """Knobs of the soft spectral filter.

    ``a`` blends between no normalization (0) and full whitening (1),
    ``b`` tempers the whitening exponent, ``d0`` truncates to the top
    eigenchannels, and ``eps_rank`` is the relative eigenvalue cutoff that
    defines numerical rank deficiency.
    """

    a: float
    b: float
    d0: int
    eps_rank: float = DEFAULT_EPS_RANK

    def __post_init__(self):
        if not 0.0 <= self.a <= 1.0:
            raise ValueError(f"a must be in [0, 1], got {self.a}")
        if not 0.0 <= self.b <= 1.0:
            raise ValueError(f"b must be in [0, 1], got {self.b}")
        if self.d0 < 1:
            raise ValueError(f"d0 must be >= 1, got {self.d0}")
        if self.eps_rank <= 0.0:
            raise ValueError("eps_rank must be positive")


def _offdiag_norm(a: np.ndarray) -> float:
    off = a.copy()
    np.fill_diagonal(off, 0.0)
    return float(np.linalg.norm(off))


def sym_eig(s: np.ndarray, max_sweeps: int = 100) -> EigPair:
    """Full eigendecomposition of a symmetric matrix by cyclic Jacobi sweeps.

    Sweeps run in fixed row-major pair order until the off-diagonal Frobenius
    norm drops below 1e-12 of the input norm, so results are deterministic.
    """
    s = np.asarray(s, dtype=np.float64)
    if s.ndim != 2 or s.shape[0] != s.shape[1]:
        raise DimensionMismatchError("sym_eig needs a square matrix")
    d = s.shape[0]
    scale = float(np.abs(s).max()) if s.size else 0.0
    if scale > 0.0:
        skew = float(np.abs(s - s.T).max())
        if skew > 1e-10 * scale:
            raise NotSymmetricError(
                f"asymmetry {skew:.3e} exceeds 1e-10 relative to {scale:.3e}"
            )

    a = 0.5 * (s + s.T)
    v = np.eye(d)
    target = 1e-12 * float(np.linalg.norm(a))
    converged = False
    for _ in range(max_sweeps):
        if _offdiag_norm(a) <= target:
            converged = True
            break
        for p in range(d - 1):
            for q in range(p + 1, d):
                apq = float(a[p, q])
                if abs(apq) < 2.3e-308:
                    a[p, q] = 0.0
                    a[q, p] = 0.0
                    continue
                tau = (float(a[q, q]) - float(a[p, p])) / (2.0 * apq)
                if tau >= 0.0:
                    t = 1.0 / (tau + math.sqrt(tau * tau + 1.0))
                else:
                    t = -1.0 / (-tau + math.sqrt(tau * tau + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                sn = t * c
                col_p = a[:, p].copy()
                col_q = a[:, q].copy()
                a[:, p] = c * col_p - sn * col_q
                a[:, q] = sn * col_p + c * col_q
                row_p = a[p, :].copy()
                row_q = a[q, :].copy()
                a[p, :] = c * row_p - sn * row_q
                a[q, :] = sn * row_p + c * row_q
                a[p, q] = 0.0
                a[q, p] = 0.0
                vp = v[:, p].copy()
                vq = v[:, q].copy()
                v[:, p] = c * vp - sn * vq
                v[:, q] = sn * vp + c * vq
    if not converged and _offdiag_norm(a) > target:
        raise NoConvergenceError(f"no convergence after {max_sweeps} sweeps")

    lam = np.diag(a).copy()
    order = np.argsort(-lam, kind="stable")  # ties keep the lower index first
    return EigPair(u=np.ascontiguousarray(v[:, order]), values=lam[order])


def inv_sqrt(s: np.ndarray, eps_rank: float = DEFAULT_EPS_RANK) -> np.ndarray:
    """Inverse square root of a symmetric positive-definite matrix."""
    pair = sym_eig(s)
    lam = pair.values
    if lam[0] <= 0.0 or lam[-1] <= eps_rank * lam[0]:
        raise RankDeficientError(
            f"eigenvalue range [{lam[-1]:.3e}, {lam[0]:.3e}] is rank deficient"
        )
    scaled = pair.u * (lam ** -0.5)
    return scaled @ pair.u.T


def soft_spectral_filter(b: np.ndarray, params: SpectralFilterParams) -> np.ndarray:
    """Temper the singular values of b on its top eigenchannels.

    Eigenchannels of b^T b beyond the top ``d0`` pass through scaled by
    (1 - a); kept channels map singular values s to (1-a) s + a s^(1-b).
    Kept eigenvalues under the relative cutoff are dropped; if every channel
    underflows while a whitening exponent is active, the input is degenerate.
    """
    b = np.asarray(b, dtype=np.float64)
    d = b.shape[1]
    if params.d0 > d:
        raise DimensionMismatchError(f"d0={params.d0} exceeds width {d}")
    if params.a == 0.0:
        return b.copy()

    pair = sym_eig(b.T @ b)
    lam = pair.values
    d0 = params.d0
    if params.b == 0.0:
        kept = np.arange(d0)
        scale = np.ones(d0)
    else:
        lmax = max(float(lam[0]), 0.0)
        thr = params.eps_rank * lmax
        kept = np.flatnonzero(lam[:d0] > thr)
        if kept.size == 0:
            raise RankDeficientError(
                "all eigenchannels underflow the rank cutoff; "
                "input is degenerate (reduce width or lower a)"
            )
        scale = lam[kept] ** (-0.5 * params.b)
    uk = pair.u[:, kept]
    filt = params.a * ((uk * scale) @ uk.T)
    filt[np.diag_indices(d)] += 1.0 - params.a
    return b @ filt


def orthonormal_projection(m: np.ndarray, eps_rank: float = DEFAULT_EPS_RANK) -> np.ndarray:
    """Nearest matrix with orthonormal columns, computed as U V^T from the SVD.

    This is the projection route used by the verification oracles; it is
    mathematically equal to m (m^T m)^{-1/2} but shares no code with it.
    """
    m = np.asarray(m, dtype=np.float64)
    u, s, vt = np.linalg.svd(m, full_matrices=False)
    if s[0] <= 0.0 or s[-1] <= eps_rank * s[0]:
        raise RankDeficientError(
            f"singular value range [{s[-1]:.3e}, {s[0]:.3e}] is rank deficient"
        )
    return u @ vt


def principal_subspace_distance(h: np.ndarray, u_ref: np.ndarray) -> float:
    """Normalized distance in [0, 1] between two column spans.

    Equals ||H H^T - U U^T||_F / sqrt(2 d), evaluated through the mutual
    projection residuals ||H - U U^T H||_F^2 + ||U - H H^T U||_F^2 so that
    near-zero distances stay accurate; no n x n projector is materialized.
    """
    h = np.asarray(h, dtype=np.float64)
    u_ref = np.asarray(u_ref, dtype=np.float64)
    if h.shape != u_ref.shape:
        raise DimensionMismatchError("subspace bases must have equal shapes")
    d = h.shape[1]
    for name, mat in (("h", h), ("u_ref", u_ref)):
        dev = float(np.abs(mat.T @ mat - np.eye(d)).max())
        if dev > 1e-6:
            raise NotOrthonormalError(f"{name} deviates from orthonormal by {dev:.3e}")
    res_h = h - u_ref @ (u_ref.T @ h)
    res_u = u_ref - h @ (h.T @ u_ref)
    val = float(np.sum(res_h * res_h)) + float(np.sum(res_u * res_u))
    return math.sqrt(min(max(val / (2.0 * d), 0.0), 1.0))
