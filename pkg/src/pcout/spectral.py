"""Covariance, symmetric eigendecomposition and principal-component plumbing.

When the number of columns exceeds the number of rows, the eigenpairs of the
p x p covariance are recovered from the n x n Gram matrix instead, which keeps
the cost tied to the sample size. Eigenvector signs are canonicalized (largest
magnitude entry positive) so results are deterministic and stable under
column sign flips of the input.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# relative threshold below which an eigenvalue is treated as numerically zero
_RANK_TOL = 1e-12


@dataclass(frozen=True)
class PcaBasis:
    """Retained eigenpairs of a covariance matrix.

    eigenvectors: p x k matrix with orthonormal columns.
    eigenvalues: the k retained variances, nonincreasing.
    variance_fraction: share of total variance the retained pairs cover.
    total_variance: trace of the underlying covariance.
    """

    eigenvectors: np.ndarray
    eigenvalues: np.ndarray
    variance_fraction: float
    total_variance: float

    @property
    def n_components(self) -> int:
        return self.eigenvectors.shape[1]


def covariance(X) -> np.ndarray:
    """Sample covariance with denominator n - 1, symmetrized."""
    X = np.asarray(X, dtype=float)
    if X.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got shape {X.shape}")
    n = X.shape[0]
    if n < 2:
        raise ValueError("covariance needs at least 2 rows")
    Xc = X - X.mean(axis=0)
    C = Xc.T @ Xc / (n - 1)
    return (C + C.T) / 2.0


def _canonicalize_signs(V: np.ndarray) -> np.ndarray:
    idx = np.argmax(np.abs(V), axis=0)
    signs = np.sign(V[idx, np.arange(V.shape[1])])
    signs[signs == 0] = 1.0
    return V * signs


def sym_eigen(C, tol: float = 1e-8) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (nonincreasing) and orthonormal eigenvectors of symmetric C.

    Works for any symmetric matrix, indefinite ones included; clamping of
    roundoff-negative eigenvalues happens where a covariance is expected
    (see pca_basis). Raises if C is asymmetric beyond `tol` relative to its
    magnitude.
    """
    C = np.asarray(C, dtype=float)
    if C.ndim != 2 or C.shape[0] != C.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {C.shape}")
    scale = max(1.0, float(np.abs(C).max()))
    if float(np.abs(C - C.T).max()) > tol * scale:
        raise ValueError("matrix is not symmetric within tolerance")
    w, V = np.linalg.eigh((C + C.T) / 2.0)
    order = np.argsort(w)[::-1]
    return w[order], _canonicalize_signs(V[:, order])


def gram_eigen(Xc) -> tuple[np.ndarray, np.ndarray]:
    """Nonzero eigenpairs of Xc'Xc/(n-1) computed from the n x n Gram matrix.

    Xc must be column-centered. Returns at most n - 1 eigenpairs; eigenvectors
    are mapped back to p-space and renormalized.
    """
    Xc = np.asarray(Xc, dtype=float)
    if Xc.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got shape {Xc.shape}")
    if not np.all(np.isfinite(Xc)):
        raise ValueError("non-finite values in matrix")
    n = Xc.shape[0]
    if n < 2:
        raise ValueError("gram route needs at least 2 rows")
    G = Xc @ Xc.T / (n - 1)
    w, U = np.linalg.eigh((G + G.T) / 2.0)
    order = np.argsort(w)[::-1]
    w = np.clip(w[order], 0.0, None)
    U = U[:, order]
    nonzero = w > _RANK_TOL * max(float(w[0]), 1.0) if w.size else np.zeros(0, bool)
    w = w[nonzero]
    V = Xc.T @ U[:, nonzero]
    norms = np.sqrt((V**2).sum(axis=0))
    V = V / norms
    return w, _canonicalize_signs(V)


def retain_components(eigenvalues, threshold: float, max_components: int | None = None) -> int:
    """Smallest k whose leading eigenvalues cover `threshold` of the total.

    Optionally capped at `max_components` (the n - 1 cap that guarantees a
    nonsingular score space).
    """
    if not 0.0 < threshold <= 1.0:
        raise ValueError(f"variance threshold must be in (0, 1], got {threshold}")
    ev = np.asarray(eigenvalues, dtype=float)
    if ev.size == 0 or not ev.sum() > 0.0:
        raise ValueError("all-zero spectrum; nothing to retain")
    frac = np.cumsum(ev)
    frac /= frac[-1]
    k = int(np.argmax(frac >= threshold - 1e-12)) + 1
    if max_components is not None:
        k = min(k, max_components)
    return max(k, 1)


def project(Xs, basis: PcaBasis) -> np.ndarray:
    """Scores of Xs in the basis: the matrix product Xs @ eigenvectors."""
    Xs = np.asarray(Xs, dtype=float)
    if Xs.ndim != 2 or Xs.shape[1] != basis.eigenvectors.shape[0]:
        raise ValueError(
            f"dimension mismatch: data has {Xs.shape[1] if Xs.ndim == 2 else '?'} columns, "
            f"basis expects {basis.eigenvectors.shape[0]}"
        )
    return Xs @ basis.eigenvectors


def pca_basis(Xs, variance_threshold: float = 0.99, max_components: int | None = None) -> PcaBasis:
    """Principal-component basis of the covariance of Xs.

    Routes through the Gram matrix when p > n; otherwise decomposes the p x p
    covariance directly. Retention keeps the leading components covering
    `variance_threshold` of total variance, capped at n - 1 (and at
    `max_components` when given).
    """
    Xs = np.asarray(Xs, dtype=float)
    if Xs.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got shape {Xs.shape}")
    n, p = Xs.shape
    Xc = Xs - Xs.mean(axis=0)
    total = float((Xc**2).sum()) / (n - 1)
    if total <= 0.0:
        raise ValueError("zero total variance; nothing to decompose")
    if p > n:
        w, V = gram_eigen(Xc)
    else:
        w, V = sym_eigen(covariance(Xs))
        w = np.clip(w, 0.0, None)  # roundoff negatives, the input is a covariance
    cap = n - 1 if max_components is None else min(n - 1, max_components)
    k = retain_components(w, variance_threshold, max_components=cap)
    retained = float(w[:k].sum())
    return PcaBasis(
        eigenvectors=V[:, :k],
        eigenvalues=w[:k].copy(),
        variance_fraction=min(retained / total, 1.0),
        total_variance=total,
    )
