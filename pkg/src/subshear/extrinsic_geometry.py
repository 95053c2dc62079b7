"""Pointwise extrinsic data of a spacelike codimension-2 immersion.

The chain per point: the immersion is pushed through a second-order dual pass
(values, tangents, second derivatives), the ambient metric and connection are
evaluated at the image point, the covariant second derivative is projected
onto an orthonormal normal frame, and everything downstream (mean curvature,
shear operators, quadratic operators) is small dense linear algebra.

The second fundamental form is stored through its two frame shape operators:
every classification formula consumes operators, never the raw rank-3 array.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np

from . import dual
from .errors import DegenerateFrameError, DimensionMismatch, DomainError, NotSpacelikeError
from .normal_bundle import NormalFrame, build_normal_frame, normal_coefficients
from .tensor_engine import (
    DEFAULT_TOL,
    ChartPoint,
    SymmetricOperator,
    Tolerances,
    as_point,
    christoffels,
    eigen_symmetric,
    evaluate_metric,
    operator_inner,
)


@dataclass(frozen=True)
class Immersion:
    """A parameterized spacelike piece of surface in an ambient chart.

    ``fn`` maps a sequence of parameter scalars to a sequence of ambient
    coordinate scalars and must be written against the dispatchers in
    :mod:`subshear.dual` so dual seeds flow through it.
    """

    fn: Callable
    n: int
    ambient_dim: int
    param_names: tuple
    domain: Optional[Callable] = None
    family: str = ""
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.ambient_dim != self.n + 2:
            raise DimensionMismatch(
                f"co-dimension must be exactly 2: surface dim {self.n}, ambient dim {self.ambient_dim}"
            )


@dataclass(frozen=True)
class ExtrinsicState:
    """All pointwise extrinsic data of the immersion at one surface point."""

    point: ChartPoint
    ambient_point: np.ndarray
    ambient_metric: np.ndarray
    induced: np.ndarray  # coordinate-basis induced metric
    frame_coeffs: np.ndarray  # C with e_i = C[i, m] d_m
    tangent_frame: np.ndarray  # rows e_i in ambient components
    normal_frame: NormalFrame
    shape_ops: tuple  # (A_xi1, A_xi2) in the orthonormal tangent frame
    expansions: tuple
    mean_curvature: np.ndarray
    mean_curvature_sq: float  # gbar(H, H)
    shear_ops: tuple
    shear_scalars: tuple  # nonnegative magnitudes
    casorati: SymmetricOperator
    shear_casorati: SymmetricOperator
    tolerances: Tolerances

    @property
    def n(self) -> int:
        return self.shape_ops[0].n

    @property
    def tau_umb(self) -> float:
        """Umbilical threshold, relative to the local curvature magnitude."""
        scale = self.shape_ops[0].norm() + self.shape_ops[1].norm()
        return self.tolerances.umb_factor * max(1.0, scale)

    # -- normal-direction helpers -----------------------------------------

    def normal_coefficients(self, nu, check: bool = True):
        return normal_coefficients(self.normal_frame, self.ambient_metric, nu, self.tolerances, check)

    def shape_operator_along(self, nu, check: bool = True) -> SymmetricOperator:
        a, b = self.normal_coefficients(nu, check)
        m1, m2 = self.shape_ops[0].matrix, self.shape_ops[1].matrix
        return SymmetricOperator(a * m1 + b * m2)

    def shear_operator_along(self, nu, check: bool = True) -> SymmetricOperator:
        return self.shape_operator_along(nu, check).tracefree()

    def h_value(self, i: int, j: int) -> np.ndarray:
        """Second-fundamental-form vector h(e_i, e_j) in ambient components."""
        e1, e2 = self.normal_frame.signs
        return (
            e1 * self.shape_ops[0].matrix[i, j] * self.normal_frame.v1
            + e2 * self.shape_ops[1].matrix[i, j] * self.normal_frame.v2
        )

    def h_tilde_value(self, i: int, j: int) -> np.ndarray:
        """Total shear tensor value in ambient components."""
        e1, e2 = self.normal_frame.signs
        return (
            e1 * self.shear_ops[0].matrix[i, j] * self.normal_frame.v1
            + e2 * self.shear_ops[1].matrix[i, j] * self.normal_frame.v2
        )

    def reframe(self, new_frame: NormalFrame) -> "ExtrinsicState":
        """Re-express all normal-frame data in another orthonormal frame."""
        if new_frame.kind != "orthonormal":
            raise ValueError("states keep an orthonormal primary frame; null frames are views")
        a1 = self.shape_operator_along(new_frame.v1, check=False)
        a2 = self.shape_operator_along(new_frame.v2, check=False)
        return _complete_state(
            self.point,
            self.ambient_point,
            self.ambient_metric,
            self.induced,
            self.frame_coeffs,
            self.tangent_frame,
            new_frame,
            a1,
            a2,
            self.tolerances,
        )


def induced_metric(immersion: Immersion, metric, p, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """First fundamental form g_ij = gbar(d_i Phi, d_j Phi) at p."""
    point = as_point(p, "surface")
    _check_surface_domain(immersion, point)
    pos, jac, _ = dual.jet2(immersion.fn, point.coords)
    gbar, _ = evaluate_metric(metric, ChartPoint(tuple(pos), metric.name), tol)
    return _induced_from_jet(gbar, jac, tol)


def _check_surface_domain(immersion: Immersion, point: ChartPoint):
    if len(point.coords) != immersion.n:
        raise DimensionMismatch(f"point has {len(point.coords)} parameters, surface expects {immersion.n}")
    if immersion.domain is not None:
        reason = immersion.domain(point.coords)
        if reason:
            raise DomainError(f"{immersion.family or 'surface'} at {point.coords}: {reason}")


def _induced_from_jet(gbar: np.ndarray, jac: np.ndarray, tol: Tolerances) -> np.ndarray:
    sv = np.linalg.svd(jac, compute_uv=False)
    if sv.min() <= tol.pd * max(1.0, sv.max()):
        raise DegenerateFrameError("coordinate tangents are linearly dependent")
    g = jac.T @ gbar @ jac
    g = 0.5 * (g + g.T)
    w, _ = eigen_symmetric(g)
    if w.min() <= tol.pd * max(1.0, np.abs(w).max()):
        raise NotSpacelikeError(f"induced metric has eigenvalue {w.min():.3e}; not spacelike")
    return g


def tangent_orthonormal_frame(g: np.ndarray, coordinate_tangents: np.ndarray, tol: Tolerances = DEFAULT_TOL):
    """Gram-Schmidt frame from the coordinate tangents (columns of the Jacobian).

    Returns ``(coeffs, rows)``: ``coeffs[i, m]`` expresses e_i over the
    coordinate tangents (lower triangular, classical Gram-Schmidt order) and
    ``rows[i]`` are the ambient components.
    """
    n = g.shape[0]
    try:
        lower = np.linalg.cholesky(g)
    except np.linalg.LinAlgError as exc:
        raise NotSpacelikeError("induced metric is not positive definite") from exc
    if np.abs(lower.diagonal()).min() <= tol.pd * max(1.0, np.abs(lower.diagonal()).max()):
        raise DegenerateFrameError("Gram-Schmidt pivot below tolerance")
    coeffs = np.linalg.solve(lower, np.eye(n))
    return coeffs, coeffs @ coordinate_tangents.T


def extrinsic_state(
    immersion: Immersion, metric, p, tol: Tolerances = DEFAULT_TOL, orientation: int = 1
) -> ExtrinsicState:
    """Run the full pointwise pipeline at surface parameters p."""
    point = as_point(p, "surface")
    _check_surface_domain(immersion, point)
    pos, jac, hess = dual.jet2(immersion.fn, point.coords)
    ambient_pt = ChartPoint(tuple(pos), metric.name)
    gbar, _ = evaluate_metric(metric, ambient_pt, tol)
    conn = christoffels(metric, ambient_pt, tol)
    g = _induced_from_jet(gbar, jac, tol)
    coeffs, tangent_rows = tangent_orthonormal_frame(g, jac, tol)
    frame = build_normal_frame(gbar, tangent_rows, getattr(metric, "time_axis", None), orientation, tol)
    # covariant second derivative of the immersion, then its normal projection.
    # Sign convention: tr A_xi is the divergence (expansion) of xi along the
    # surface, so an outward normal on a round sphere has positive expansion;
    # equivalently A_xi X = tangential part of del_X xi.
    alpha = hess + np.einsum("abc,bm,cn->amn", conn.gamma, jac, jac)
    ops = []
    for xi in (frame.v1, frame.v2):
        w = np.einsum("amn,ab,b->mn", alpha, gbar, xi)
        ops.append(SymmetricOperator(-(coeffs @ w @ coeffs.T), tol=tol.sym))
    return _complete_state(point, pos, gbar, g, coeffs, tangent_rows, frame, ops[0], ops[1], tol)


def state_from_operators(
    a1, a2, signs=(1, 1), tol: Tolerances = DEFAULT_TOL, label: str = "synthetic"
) -> ExtrinsicState:
    """Synthetic state in a flat ambient with the given frame shape operators.

    The ambient is R^(n+2) with constant metric diag(eps1, eps2, 1, ..., 1),
    the normal frame the first two coordinate axes and the tangent frame the
    rest.  This ordered basis is positively oriented, so all frame
    conventions match the geometric pipeline.
    """
    a1 = a1 if isinstance(a1, SymmetricOperator) else SymmetricOperator(a1, tol=tol.sym)
    a2 = a2 if isinstance(a2, SymmetricOperator) else SymmetricOperator(a2, tol=tol.sym)
    if a1.n != a2.n:
        raise DimensionMismatch("shape operators differ in dimension")
    n = a1.n
    dim = n + 2
    diag = np.ones(dim)
    diag[0], diag[1] = signs
    gbar = np.diag(diag)
    tangent_rows = np.eye(dim)[2:]
    frame = NormalFrame("orthonormal", np.eye(dim)[0], np.eye(dim)[1], (int(signs[0]), int(signs[1])), 1)
    point = ChartPoint((), label)
    return _complete_state(point, np.zeros(dim), gbar, np.eye(n), np.eye(n), tangent_rows, frame, a1, a2, tol)


def _complete_state(point, pos, gbar, g, coeffs, tangent_rows, frame, a1, a2, tol) -> ExtrinsicState:
    e1, e2 = frame.signs
    n = a1.n
    th1, th2 = a1.trace(), a2.trace()
    mean = (e1 * th1 * frame.v1 + e2 * th2 * frame.v2) / n
    ghh = float(mean @ gbar @ mean)
    at1, at2 = a1.tracefree(), a2.tracefree()
    s1 = math.sqrt(max(operator_inner(at1, at1), 0.0))
    s2 = math.sqrt(max(operator_inner(at2, at2), 0.0))
    m1, m2 = a1.matrix, a2.matrix
    t1, t2 = at1.matrix, at2.matrix
    casorati = SymmetricOperator(e1 * (m1 @ m1) + e2 * (m2 @ m2))
    shear_casorati = SymmetricOperator(e1 * (t1 @ t1) + e2 * (t2 @ t2))
    return ExtrinsicState(
        point=point,
        ambient_point=np.asarray(pos, dtype=float),
        ambient_metric=gbar,
        induced=g,
        frame_coeffs=coeffs,
        tangent_frame=tangent_rows,
        normal_frame=frame,
        shape_ops=(a1, a2),
        expansions=(th1, th2),
        mean_curvature=mean,
        mean_curvature_sq=ghh,
        shear_ops=(at1, at2),
        shear_scalars=(s1, s2),
        casorati=casorati,
        shear_casorati=shear_casorati,
        tolerances=tol,
    )


# -- named accessors matching the operation contracts ------------------------


def second_fundamental_form(state: ExtrinsicState):
    """The two frame shape operators (A_xi1, A_xi2)."""
    return state.shape_ops


def mean_curvature(state: ExtrinsicState) -> np.ndarray:
    """H = (1/n)(eps1 tr(A_xi1) xi1 + eps2 tr(A_xi2) xi2), ambient components."""
    return state.mean_curvature


def total_shear(state: ExtrinsicState):
    """Shear operators and shear scalar magnitudes (At_1, At_2, s_1, s_2).

    Signs of the scalars are only fixed when an umbilical direction exists;
    see the classifier, which assigns them through the normalized shear
    operator convention.
    """
    return state.shear_ops[0], state.shear_ops[1], state.shear_scalars[0], state.shear_scalars[1]


def casorati_operators(state: ExtrinsicState):
    """The Casorati operator and its trace-free (shear) analogue."""
    return state.casorati, state.shear_casorati


def coordinate_basis_operator(state: ExtrinsicState, op: SymmetricOperator) -> np.ndarray:
    """Re-express a frame operator matrix in the coordinate tangent basis.

    With e_i = C[i, m] d_m the matrices are related by [A]_coord =
    C^T [A]_frame (C^T)^{-1}; the result is g-self-adjoint but generally not
    symmetric as a plain matrix.
    """
    ct = state.frame_coeffs.T
    return ct @ op.matrix @ np.linalg.inv(ct)
