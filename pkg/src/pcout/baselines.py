"""Comparison detectors: classical Mahalanobis with a chi-square cutoff, the
orthogonalized pairwise-robust (OGK) location/scatter estimator with an
optional hard-rejection reweighting step, and a spatial-sign PCA detector.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .chisq import chi2_quantile
from .robust import MAD_SCALE, mad
from .spectral import covariance, pca_basis, project, sym_eigen

_SINGULAR_RTOL = 1e-12


@dataclass(frozen=True)
class LocationScatter:
    """A location vector and a symmetric positive-semidefinite scatter matrix."""

    location: np.ndarray
    scatter: np.ndarray


@dataclass(frozen=True)
class DetectionResult:
    """Distances, the cutoff they were compared against, and the flags."""

    distances: np.ndarray
    cutoff: float
    flags: np.ndarray
    method: str


def _column_mads(X: np.ndarray) -> np.ndarray:
    med = np.median(X, axis=0)
    return MAD_SCALE * np.median(np.abs(X - med), axis=0)


def robust_distances(X, est: LocationScatter) -> np.ndarray:
    """Mahalanobis distances of the rows of X under (location, scatter)."""
    X = np.asarray(X, dtype=float)
    evals, evecs = sym_eigen(est.scatter)
    if evals[-1] <= _SINGULAR_RTOL * max(evals[0], 1e-300):
        raise ValueError(
            f"scatter matrix is singular: smallest eigenvalue {evals[-1]:.3e} "
            f"against largest {evals[0]:.3e}"
        )
    Y = (X - est.location) @ evecs
    return np.sqrt((Y**2 / evals).sum(axis=1))


def classical_detect(X, alpha: float) -> DetectionResult:
    """Sample mean/covariance distances flagged beyond sqrt(chi2(p, 1 - alpha)).

    Requires n > p; for wider matrices use the principal-component detector.
    """
    X = np.asarray(X, dtype=float)
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must be in (0, 1), got {alpha}")
    n, p = X.shape
    if n <= p:
        raise ValueError(
            f"classical detection needs n > p (got n={n}, p={p}); "
            "use the prcmpout method, which handles wide matrices"
        )
    est = LocationScatter(location=X.mean(axis=0), scatter=covariance(X))
    dist = robust_distances(X, est)
    cutoff = math.sqrt(chi2_quantile(1.0 - alpha, p))
    return DetectionResult(distances=dist, cutoff=cutoff, flags=dist > cutoff, method="classical")


def ogk_pairwise_cov(x, y, scale=mad) -> float:
    """Pairwise robust covariance: quarter-difference of squared scales.

    cov(x, y) = (scale(x + y)^2 - scale(x - y)^2) / 4; with the classical
    standard deviation as the scale this is exactly the sample covariance.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape:
        raise ValueError(f"samples differ in length: {x.shape} vs {y.shape}")
    return 0.25 * (scale(x + y) ** 2 - scale(x - y) ** 2)


def _ogk_scores(X) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Shared OGK pipeline: MAD column scales, eigenvectors of the pairwise
    matrix, and the data expressed in eigenvector coordinates."""
    X = np.asarray(X, dtype=float)
    if X.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got shape {X.shape}")
    p = X.shape[1]
    d = _column_mads(X)
    if np.any(d == 0.0):
        bad = np.flatnonzero(d == 0.0)
        raise ValueError(f"columns with zero MAD: {bad.tolist()}")
    Y = X / d

    U = np.eye(p)
    for j in range(p - 1):
        col = Y[:, j : j + 1]
        rest = Y[:, j + 1 :]
        s_plus = _column_mads(col + rest)
        s_minus = _column_mads(col - rest)
        U[j, j + 1 :] = 0.25 * (s_plus**2 - s_minus**2)
        U[j + 1 :, j] = U[j, j + 1 :]

    _, E = sym_eigen(U)
    return d, E, Y @ E


def ogk_estimate(X) -> LocationScatter:
    """Orthogonalized pairwise-robust location and scatter.

    Columns are scaled by their MADs; the pairwise robust covariance matrix
    (unit diagonal in scaled coordinates) is eigendecomposed, robust location
    and variance are taken coordinatewise in the eigenvector space (median and
    squared MAD), and the transform is inverted. The result is symmetric
    positive semidefinite by construction.
    """
    d, E, Z = _ogk_scores(X)
    nu = np.median(Z, axis=0)
    gamma = _column_mads(Z) ** 2
    A = d[:, None] * E
    scatter = (A * gamma) @ A.T
    return LocationScatter(location=A @ nu, scatter=(scatter + scatter.T) / 2.0)


def _ogk_eigenspace_distances(X) -> np.ndarray:
    """Robust distances in the OGK eigenvector space, no matrix inversion.

    Equals the Mahalanobis distance under the OGK estimate whenever that
    scatter is nonsingular, but stays computable for p >= n. Coordinates
    with zero spread carry no distance information and are skipped.
    """
    _, _, Z = _ogk_scores(X)
    nu = np.median(Z, axis=0)
    sigma = _column_mads(Z)
    keep = sigma > 0.0
    if not keep.any():
        raise ValueError("all eigenvector coordinates have zero spread")
    R = (Z[:, keep] - nu[keep]) / sigma[keep]
    return np.sqrt((R**2).sum(axis=1))


def ogk_reweight(X, est: LocationScatter, beta: float = 0.9) -> LocationScatter:
    """Hard-rejection refinement of an OGK estimate.

    Squared robust distances are compared against
    d0^2 = chi2(beta, p) * med(d^2) / chi2(0.5, p); rows at or beyond d0 are
    discarded and the plain mean and covariance of the remainder returned.
    """
    X = np.asarray(X, dtype=float)
    if not 0.0 < beta < 1.0:
        raise ValueError(f"beta must be in (0, 1), got {beta}")
    n, p = X.shape
    d2 = robust_distances(X, est) ** 2
    d0_sq = chi2_quantile(beta, p) * float(np.median(d2)) / chi2_quantile(0.5, p)
    keep = d2 < d0_sq
    if keep.sum() < p + 1:
        raise ValueError(
            f"only {int(keep.sum())} rows retained by the reweighting; need at least {p + 1}"
        )
    sample = X[keep]
    return LocationScatter(location=sample.mean(axis=0), scatter=covariance(sample))


def ogk_detect(X, alpha: float, beta: float = 0.9) -> DetectionResult:
    """OGK-based detection with a median-calibrated chi-square cutoff.

    For n > p the estimate is refined by the hard-rejection step and
    distances come from the refined scatter. For wide matrices (p >= n) the
    refinement needs more rows than exist, so the distances are taken in the
    eigenvector space directly. Convenience composition used by the command
    line and the benchmark harness.
    """
    X = np.asarray(X, dtype=float)
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must be in (0, 1), got {alpha}")
    n, p = X.shape
    if n > p:
        est = ogk_reweight(X, ogk_estimate(X), beta=beta)
        dist = robust_distances(X, est)
    else:
        dist = _ogk_eigenspace_distances(X)
    med = float(np.median(dist))
    if med <= 0.0:
        raise ValueError("median robust distance is zero; distances are degenerate")
    dist = dist * (math.sqrt(chi2_quantile(0.5, p)) / med)
    cutoff = math.sqrt(chi2_quantile(1.0 - alpha, p))
    return DetectionResult(distances=dist, cutoff=cutoff, flags=dist > cutoff, method="ogk")


def spatial_signs(X, center=None) -> np.ndarray:
    """Unit vectors from a center (default: coordinatewise median) to each row.

    Rows coinciding with the center get a zero vector; every other sign has
    unit norm regardless of how far out the row sits.
    """
    X = np.asarray(X, dtype=float)
    if center is None:
        center = np.median(X, axis=0)
    D = X - center
    norms = np.sqrt((D**2).sum(axis=1))
    S = np.zeros_like(D)
    off = norms > 0.0
    S[off] = D[off] / norms[off, None]
    return S


def sign2_detect(X, alpha: float, variance_threshold: float = 0.99) -> DetectionResult:
    """Spatial-sign PCA detection.

    Rows are centered at the coordinatewise median and mapped to unit vectors
    (spatial signs), which caps the influence any single point can exert.
    PCA runs on the signs; the original centered data are projected onto the
    retained directions, each score column is scaled by its MAD, and the row
    norms are median-calibrated and flagged beyond sqrt(chi2(p*, 1 - alpha)).

    Rows exactly at the center have no direction; they are left out of the
    sign covariance but still projected and scored.
    """
    X = np.asarray(X, dtype=float)
    if X.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got shape {X.shape}")
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must be in (0, 1), got {alpha}")
    n = X.shape[0]
    if n < 3:
        raise ValueError(f"need at least 3 rows, got {n}")

    center = np.median(X, axis=0)
    D = X - center
    off_center = np.sqrt((D**2).sum(axis=1)) > 0.0
    if off_center.sum() < 2:
        raise ValueError("fewer than 2 rows away from the spatial center")
    S = spatial_signs(X, center)

    basis = pca_basis(S[off_center], variance_threshold, max_components=n - 1)
    Z = project(D, basis)
    sc = _column_mads(Z)
    keep = sc > 0.0
    if not keep.any():
        raise ValueError("all projected score columns have zero MAD")
    Zs = Z[:, keep] / sc[keep]
    p_star = Zs.shape[1]

    raw = np.sqrt((Zs**2).sum(axis=1))
    med = float(np.median(raw))
    if med <= 0.0:
        raise ValueError("median score distance is zero; distances are degenerate")
    dist = raw * (math.sqrt(chi2_quantile(0.5, p_star)) / med)
    cutoff = math.sqrt(chi2_quantile(1.0 - alpha, p_star))
    return DetectionResult(distances=dist, cutoff=cutoff, flags=dist > cutoff, method="sign2")
