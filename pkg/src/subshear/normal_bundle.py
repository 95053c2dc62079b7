"""Frames and Hodge rotation on the two-dimensional normal plane.

Orientation convention: the normal area form is
``omega(nu, mu) = s * sqrt(|det gbar|) * det(e_1, ..., e_n, nu, mu)``
with the component determinant taken in the ambient coordinate basis and
``s`` the global orientation flag.  Frames are built so that the ordered
basis (tangent frame, v1, v2) is positively oriented under that convention,
i.e. omega(v1, v2) = +1.  Flipping ``s`` flips the Hodge rotation globally.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DegenerateNormalError, NotNormalError, SignatureError
from .tensor_engine import DEFAULT_TOL, Tolerances, eigen_symmetric


@dataclass(frozen=True)
class NormalFrame:
    """Ordered basis of the normal plane with signature bookkeeping.

    ``kind`` is "orthonormal" (vectors (xi1, xi2) with gbar(xi_i, xi_i) =
    signs[i]) or "null" (vectors (k, l) with gbar(k, k) = gbar(l, l) = 0 and
    gbar(k, l) = -1).  Both kinds satisfy omega(v1, v2) = +1.
    """

    kind: str
    v1: np.ndarray
    v2: np.ndarray
    signs: Optional[tuple] = None
    orientation: int = 1

    @property
    def lorentzian(self) -> bool:
        return self.kind == "null" or self.signs == (-1, 1)


def normal_area_form(gbar: np.ndarray, tangent_rows: np.ndarray, orientation: int = 1):
    """Return the evaluator omega(nu, mu) of the normal area form."""
    factor = orientation * math.sqrt(abs(np.linalg.det(gbar)))

    def omega(nu, mu) -> float:
        mat = np.vstack([tangent_rows, nu, mu])
        return factor * float(np.linalg.det(mat))

    return omega


def build_normal_frame(
    gbar: np.ndarray,
    tangent_rows: np.ndarray,
    time_axis: Optional[int] = None,
    orientation: int = 1,
    tol: Tolerances = DEFAULT_TOL,
) -> NormalFrame:
    """Orthonormal basis of the gbar-orthogonal complement of the tangent span.

    When the normal signature is (-, +) the timelike leg comes first and is
    future-pointing in the sense that its declared time-coordinate component
    is positive.
    """
    n, dim = tangent_rows.shape
    if dim != n + 2:
        raise DegenerateNormalError(f"tangent frame of {n} vectors in dimension {dim}; co-dimension must be 2")
    # normal space = null space of the n x dim matrix of constraints gbar(e_i, .)
    constraints = tangent_rows @ gbar
    _, sv, vt = np.linalg.svd(constraints)
    if sv.min() <= tol.pd * max(1.0, sv.max()):
        raise DegenerateNormalError("tangent constraints are rank deficient")
    basis = vt[n:]
    gram = basis @ gbar @ basis.T
    w, rot = eigen_symmetric(gram)
    if np.abs(w).min() <= tol.pd * max(1.0, np.abs(w).max()):
        raise DegenerateNormalError("metric restricted to the normal plane is singular")
    vecs = [(rot[:, a] @ basis) / math.sqrt(abs(w[a])) for a in range(2)]
    signs = [int(np.sign(w[a])) for a in range(2)]
    # ascending eigenvalues put a timelike leg first automatically
    if signs[0] == -1 and time_axis is not None:
        t = vecs[0][time_axis]
        if abs(t) <= 1e-12 * np.abs(vecs[0]).max():
            # degenerate component: fall back to the causal pairing with the
            # coordinate time axis (two future causal vectors have gbar < 0)
            axis = np.zeros(dim)
            axis[time_axis] = 1.0
            if vecs[0] @ gbar @ axis > 0:
                vecs[0] = -vecs[0]
        elif t < 0:
            vecs[0] = -vecs[0]
    omega = normal_area_form(gbar, tangent_rows, orientation)
    if omega(vecs[0], vecs[1]) < 0:
        vecs[1] = -vecs[1]
    return NormalFrame("orthonormal", vecs[0], vecs[1], (signs[0], signs[1]), orientation)


def normal_coefficients(frame: NormalFrame, gbar: np.ndarray, nu, tol: Tolerances = DEFAULT_TOL, check: bool = True):
    """Coefficients (a, b) with nu = a * v1 + b * v2; rejects tangential input."""
    nu = np.asarray(nu, dtype=float)
    if frame.kind == "orthonormal":
        e1, e2 = frame.signs
        a = e1 * float(nu @ gbar @ frame.v1)
        b = e2 * float(nu @ gbar @ frame.v2)
    else:
        a = -float(nu @ gbar @ frame.v2)
        b = -float(nu @ gbar @ frame.v1)
    if check:
        residual = np.abs(nu - a * frame.v1 - b * frame.v2).max()
        if residual > tol.w * max(1.0, np.abs(nu).max()):
            raise NotNormalError(f"vector has tangential component {residual:.3e}")
    return a, b


def hodge_dual(frame: NormalFrame, gbar: np.ndarray, nu, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """The quarter-turn of the normal plane: gbar(star nu, eta) = omega(nu, eta).

    In a positively oriented orthonormal frame: star v1 = eps2 v2 and
    star v2 = -eps1 v1.  In a positively oriented null frame: star k = -k,
    star l = +l.
    """
    a, b = normal_coefficients(frame, gbar, nu, tol)
    if frame.kind == "orthonormal":
        e1, e2 = frame.signs
        return a * e2 * frame.v2 - b * e1 * frame.v1
    return -a * frame.v1 + b * frame.v2


def to_null_frame(frame: NormalFrame, gbar: np.ndarray, tol: Tolerances = DEFAULT_TOL) -> NormalFrame:
    """Positively oriented null frame (k, l) with gbar(k, l) = -1.

    Requires normal signature (-, +).  With omega(xi1, xi2) = +1 the only
    null directions are spanned by xi1 -/+ xi2, and demanding both
    omega(k, l) = +1 and gbar(k, l) = -1 forces k along xi1 - xi2 (this is
    also what makes star k = -k and star l = +l hold).  Both legs stay
    future-pointing when xi1 is.
    """
    if frame.kind != "orthonormal" or frame.signs != (-1, 1):
        raise SignatureError("null frames require an orthonormal frame of signature (-, +)")
    inv_sqrt2 = 1.0 / math.sqrt(2.0)
    k = (frame.v1 - frame.v2) * inv_sqrt2
    ell = (frame.v1 + frame.v2) * inv_sqrt2
    q = float(k @ gbar @ ell)
    ell = ell / (-q)  # pin the normalization exactly
    return NormalFrame("null", k, ell, None, frame.orientation)


def null_shape_operators(state, null_frame: NormalFrame):
    """Shape operators along the null legs, (A_k, A_l)."""
    return (
        state.shape_operator_along(null_frame.v1, check=False),
        state.shape_operator_along(null_frame.v2, check=False),
    )


def star_mean_curvature_and_null_expansions(state):
    """Hodge dual of the mean curvature plus the null expansions.

    Returns ``(star_H, (theta_k, theta_l) or None, null_frame or None)``;
    the null data is present only for Lorentzian normal signature.
    """
    frame = state.normal_frame
    star_h = hodge_dual(frame, state.ambient_metric, state.mean_curvature, state.tolerances)
    if frame.signs == (-1, 1):
        nf = to_null_frame(frame, state.ambient_metric, state.tolerances)
        a_k, a_l = null_shape_operators(state, nf)
        return star_h, (a_k.trace(), a_l.trace()), nf
    return star_h, None, None
