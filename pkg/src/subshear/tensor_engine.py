"""Metric evaluation, connection coefficients and small symmetric linear algebra.

All derivative information comes from the dual-number pass in
:mod:`subshear.dual`; the only finite differences in the project live in the
test oracles.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

import numpy as np

from . import dual
from .errors import (
    DimensionMismatch,
    DomainError,
    SignatureError,
    SingularMetricError,
)


@dataclass(frozen=True)
class Tolerances:
    """All numerical thresholds, overridable per scan.

    ``umb_factor`` is the relative umbilical detection threshold: the working
    threshold at a point is ``umb_factor * max(1, |A_1| + |A_2|)`` so that
    umbilical loci are detected at a scale commensurate with the local
    curvature magnitude.
    """

    sym: float = 1e-10
    chris: float = 1e-8
    eig: float = 1e-12
    inv: float = 1e-12
    w: float = 1e-9
    pd: float = 1e-12
    umb_factor: float = 1e-8
    rho_min: float = 1e-6
    theta_min: float = 1e-3

    def replace(self, **kw) -> "Tolerances":
        return dataclasses.replace(self, **kw)


DEFAULT_TOL = Tolerances()


@dataclass(frozen=True)
class ChartPoint:
    """Coordinates in a named chart (ambient or surface parameter chart)."""

    coords: tuple
    chart: str = ""

    def __post_init__(self):
        object.__setattr__(self, "coords", tuple(float(c) for c in self.coords))

    @property
    def dim(self) -> int:
        return len(self.coords)


def as_point(p, chart: str = "") -> ChartPoint:
    if isinstance(p, ChartPoint):
        return p
    return ChartPoint(tuple(p), chart)


class SymmetricOperator:
    """Matrix of a g-self-adjoint operator in a g-orthonormal frame.

    Validates symmetry on construction and stores the symmetrized matrix, so
    downstream eigenproblems and traces never see asymmetric noise.
    """

    __slots__ = ("matrix",)

    def __init__(self, matrix, tol: float = DEFAULT_TOL.sym):
        m = np.asarray(matrix, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DimensionMismatch(f"expected a square matrix, got shape {m.shape}")
        dev = np.abs(m - m.T).max() if m.size else 0.0
        if dev > tol * max(1.0, np.abs(m).max()):
            raise ValueError(f"matrix is not symmetric within {tol}: deviation {dev}")
        self.matrix = 0.5 * (m + m.T)

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    def trace(self) -> float:
        return float(np.trace(self.matrix))

    def norm(self) -> float:
        return float(np.linalg.norm(self.matrix))

    def tracefree(self) -> "SymmetricOperator":
        n = self.n
        return SymmetricOperator(self.matrix - (self.trace() / n) * np.eye(n))

    def __repr__(self):
        return f"SymmetricOperator({self.matrix!r})"


def _as_matrix(op) -> np.ndarray:
    return op.matrix if isinstance(op, SymmetricOperator) else np.asarray(op, dtype=float)


def operator_inner(a, b) -> float:
    """Scalar product tr(AB) of two self-adjoint operators."""
    ma, mb = _as_matrix(a), _as_matrix(b)
    if ma.shape != mb.shape:
        raise DimensionMismatch(f"operator shapes differ: {ma.shape} vs {mb.shape}")
    return float(np.trace(ma @ mb))


def commutator(a, b) -> np.ndarray:
    ma, mb = _as_matrix(a), _as_matrix(b)
    return ma @ mb - mb @ ma


def eigen_symmetric(op, threshold: float = 1e-14, max_sweeps: int = 100):
    """Cyclic Jacobi diagonalization of a small symmetric matrix.

    Returns eigenvalues in ascending order and the matching orthonormal
    eigenvector columns.  Matrices here never exceed 8x8, where Jacobi's
    robustness beats any speed argument.
    """
    a = np.array(_as_matrix(op), dtype=float)
    n = a.shape[0]
    q = np.eye(n)
    if n == 1:
        return a.diagonal().copy(), q
    scale = max(1.0, np.abs(a).max())
    for _ in range(max_sweeps):
        off = np.abs(a - np.diag(a.diagonal())).max()
        if off <= threshold * scale:
            break
        for p in range(n - 1):
            for r in range(p + 1, n):
                apr = a[p, r]
                if abs(apr) <= 1e-300:
                    continue
                tau = (a[r, r] - a[p, p]) / (2.0 * apr)
                t = np.sign(tau) / (abs(tau) + np.hypot(1.0, tau)) if tau != 0 else 1.0
                c = 1.0 / np.hypot(1.0, t)
                s = t * c
                col_p, col_r = a[:, p].copy(), a[:, r].copy()
                a[:, p] = c * col_p - s * col_r
                a[:, r] = s * col_p + c * col_r
                row_p, row_r = a[p, :].copy(), a[r, :].copy()
                a[p, :] = c * row_p - s * row_r
                a[r, :] = s * row_p + c * row_r
                a[p, r] = a[r, p] = 0.0
                qp, qr = q[:, p].copy(), q[:, r].copy()
                q[:, p] = c * qp - s * qr
                q[:, r] = s * qp + c * qr
    w = a.diagonal().copy()
    order = np.argsort(w, kind="stable")
    return w[order], q[:, order]


def checked_inverse(g: np.ndarray, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Invert a metric matrix, rejecting numerically singular input."""
    w, _ = eigen_symmetric(g)
    amax, amin = np.abs(w).max(), np.abs(w).min()
    if amin <= tol.inv * amax or amax == 0.0:
        raise SingularMetricError(f"metric condition number exceeds {1.0 / tol.inv:.1e}")
    return np.linalg.inv(g)


def _check_admissible(metric, coords):
    adm = getattr(metric, "admissible", None)
    if adm is not None:
        reason = adm(coords)
        if reason:
            raise DomainError(f"{getattr(metric, 'name', 'metric')} at {tuple(coords)}: {reason}")


def evaluate_metric(metric, p, tol: Tolerances = DEFAULT_TOL):
    """Evaluate the ambient metric and verify its signature.

    Returns ``(matrix, signature)`` where the signature is the tuple of
    eigenvalue signs in ascending eigenvalue order.
    """
    point = as_point(p)
    if point.dim != metric.dim:
        raise DimensionMismatch(f"point has dim {point.dim}, metric expects {metric.dim}")
    coords = np.asarray(point.coords)
    _check_admissible(metric, coords)
    g = np.asarray(metric.fn(list(coords)), dtype=float)
    dev = np.abs(g - g.T).max()
    if dev > tol.sym * max(1.0, np.abs(g).max()):
        raise ValueError(f"metric evaluation is not symmetric: deviation {dev}")
    g = 0.5 * (g + g.T)
    w, _ = eigen_symmetric(g)
    if np.abs(w).min() <= tol.pd * max(1.0, np.abs(w).max()):
        raise SingularMetricError(f"metric is degenerate at {tuple(coords)}")
    signature = tuple(int(np.sign(x)) for x in w)
    declared = getattr(metric, "signature", None)
    if declared is not None and tuple(declared) != signature:
        raise SignatureError(f"computed signature {signature} differs from declared {tuple(declared)}")
    return g, signature


@dataclass(frozen=True)
class Christoffels:
    """Connection coefficients Gamma^a_{bc} at one ambient point."""

    gamma: np.ndarray
    point: ChartPoint


def christoffels(metric, p, tol: Tolerances = DEFAULT_TOL) -> Christoffels:
    """Levi-Civita connection coefficients from the dual-number metric pass.

    Gamma^a_{bc} = 1/2 g^{ad} (d_b g_dc + d_c g_bd - d_d g_bc), exactly
    symmetric in (b, c) because the metric derivative array is.
    """
    point = as_point(p)
    coords = np.asarray(point.coords)
    _check_admissible(metric, coords)
    g, dg, _ = dual.matrix_jet(metric.fn, coords)
    g = 0.5 * (g + g.T)
    ginv = checked_inverse(g, tol)
    # t[d, b, c] = d_b g_dc + d_c g_db - d_d g_bc
    t = np.einsum("bdc->dbc", dg) + np.einsum("cdb->dbc", dg) - dg
    gamma = 0.5 * np.einsum("ad,dbc->abc", ginv, t)
    chris = Christoffels(gamma=gamma, point=point)
    res = compatibility_residual(chris, g, dg)
    if res > tol.chris * max(1.0, np.abs(dg).max()):
        raise SingularMetricError(f"metric-compatibility residual {res} exceeds tolerance")
    return chris


def compatibility_residual(chris: Christoffels, g: np.ndarray, dg: np.ndarray) -> float:
    """Max norm of nabla g reassembled from the connection (should vanish)."""
    gamma = chris.gamma
    nabla = dg - np.einsum("dca,db->cab", gamma, g) - np.einsum("dcb,ad->cab", gamma, g)
    return float(np.abs(nabla).max())
