"""Pointwise umbilical classification of codimension-2 spacelike submanifolds.

A point admits an umbilical normal direction exactly when its two frame shear
operators are proportional.  Several equivalent detections are evaluated side
by side (commutation of the shape operators, componentwise proportionality,
saturation of the Cauchy-Schwarz bound for the operator scalar product), and
when a direction exists the total shear tensor factorizes as
``h_tilde(X, Y) = g(At X, Y) G`` for a normalized operator At and a normal
vector G.  The direction itself is the quarter-turn of G in the normal plane
and is unique unless the point is totally umbilical (G = 0).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import NoDirectionError, NotCommutingError, SignatureError, ZeroVectorError
from .extrinsic_geometry import ExtrinsicState
from .normal_bundle import hodge_dual, null_shape_operators, to_null_frame
from .tensor_engine import SymmetricOperator, commutator, eigen_symmetric, operator_inner


@dataclass(frozen=True)
class UmbilicalVerdict:
    """The pointwise verdict with all residuals that justify it."""

    totally_umbilical: bool
    direction_exists: bool
    umbilical_direction: Optional[np.ndarray]
    causal_character: str  # timelike | spacelike | null | undefined
    shear_vector: Optional[np.ndarray]  # G, with the sign convention below
    normalized_shear: Optional[SymmetricOperator]  # At with <At, At> = n^2
    signed_shear_scalars: Optional[tuple]
    pseudo_umbilical: bool
    ortho_umbilical: bool
    subgeodesic: Optional[bool]  # None where the mean curvature vanishes
    trapped_status: Optional[str]
    null_expansions: Optional[tuple]
    residuals: dict

    @property
    def max_residual(self) -> float:
        return max(self.residuals.values(), default=0.0)


def is_umbilical_wrt(state: ExtrinsicState, nu, check: bool = True):
    """Whether the shear operator along nu vanishes; returns (flag, residual)."""
    a, b = state.normal_coefficients(nu, check)
    scale = math.hypot(a, b)
    if scale <= state.tolerances.pd:
        raise ZeroVectorError("normal vector has negligible components")
    residual = state.shear_operator_along(nu, check=False).norm()
    return residual <= state.tau_umb * scale, residual


def direction_exists(state: ExtrinsicState):
    """Evaluate the equivalent proportionality conditions on the shear pair.

    Returns ``(exists, diagnostics)`` where diagnostics maps each condition to
    ``(flag, residual)`` plus a ``"disagree"`` entry set when the conditions
    split beyond tolerance (a numerical red flag, since they are provably
    equivalent).
    """
    at1, at2 = state.shear_ops
    s1, s2 = state.shear_scalars
    thr = 10.0 * state.tau_umb

    r_comm = float(np.linalg.norm(commutator(*state.shape_ops)))
    # componentwise proportionality, scaled linearly in the shear magnitude
    outer = np.einsum("ij,rs->ijrs", at1.matrix, at2.matrix)
    r_comp = float(np.abs(outer - outer.transpose(2, 3, 0, 1)).max()) / max(1.0, s1, s2)
    # Cauchy-Schwarz saturation of the operator scalar product
    inner = operator_inner(at1, at2)
    r_inner = abs(inner * inner - s1 * s1 * s2 * s2) / max(1.0, s1 * s1 * s2 * s2)

    conds = {
        "commutator": (r_comm <= thr, r_comm),
        "components": (r_comp <= thr, r_comp),
        "inner": (r_inner <= thr, r_inner),
    }
    flags = [flag for flag, _ in conds.values()]
    exists = all(flags)
    disagree = any(flags) and not exists
    diagnostics = dict(conds)
    diagnostics["disagree"] = disagree
    return exists, diagnostics


@dataclass(frozen=True)
class DirectionResult:
    shear_vector: np.ndarray  # G
    normalized_shear: Optional[SymmetricOperator]  # At, None when totally umbilical
    umbilical_direction: Optional[np.ndarray]  # star G, None when totally umbilical
    totally_umbilical: bool
    signed_scalars: tuple
    reconstruction_residual: float


def compute_direction(state: ExtrinsicState) -> DirectionResult:
    """The factorization h_tilde = g(At ., .) G and the umbilical direction.

    Sign convention: At is the normalization of the larger-norm frame shear
    operator, with overall sign fixed so that its first non-negligible entry
    in row-major order is positive; the signed shear scalars then follow from
    At_xi = (sigma_xi / n) At.  Only span(star G) carries meaning; the
    convention merely makes reports reproducible.
    """
    exists, _ = direction_exists(state)
    if not exists:
        raise NoDirectionError("no umbilical direction at this point")
    n = state.n
    at1, at2 = state.shear_ops
    s1, s2 = state.shear_scalars
    frame = state.normal_frame
    e1, e2 = frame.signs
    if max(s1, s2) <= state.tau_umb:
        g_vec = np.zeros_like(state.mean_curvature)
        return DirectionResult(g_vec, None, None, True, (0.0, 0.0), 0.0)
    big = at1 if s1 >= s2 else at2
    norm_shear = (n / max(s1, s2)) * big.matrix
    flat = norm_shear.ravel()
    lead = flat[np.argmax(np.abs(flat) > 1e-8)]
    if lead < 0:
        norm_shear = -norm_shear
    sig1 = operator_inner(at1, norm_shear) / n
    sig2 = operator_inner(at2, norm_shear) / n
    g_vec = (e1 * sig1 * frame.v1 + e2 * sig2 * frame.v2) / n
    star_g = hodge_dual(frame, state.ambient_metric, g_vec, state.tolerances)
    recon = 0.0
    for i in range(n):
        for j in range(n):
            diff = state.h_tilde_value(i, j) - norm_shear[i, j] * g_vec
            recon = max(recon, float(np.abs(diff).max()))
    return DirectionResult(g_vec, SymmetricOperator(norm_shear), star_g, False, (sig1, sig2), recon)


def eigen_direction_oracle(state: ExtrinsicState):
    """Umbilical direction candidates from simultaneous shape eigenvalues.

    For each common eigenvector with shape eigenvalues (lambda_i, mu_i) the
    normal vector ``(mu_i - theta_2/n) xi1 - (lambda_i - theta_1/n) xi2`` has
    vanishing shear component there; all non-zero candidates are parallel to
    the umbilical direction.
    """
    a1, a2 = state.shape_ops
    r_comm = float(np.linalg.norm(commutator(a1, a2)))
    if r_comm > 10.0 * state.tau_umb:
        raise NotCommutingError(f"shape operators do not commute: |[A1, A2]| = {r_comm:.3e}")
    lam, mu = _simultaneous_eigenvalues(a1.matrix, a2.matrix, state.tau_umb)
    th1, th2 = state.expansions
    n = state.n
    frame = state.normal_frame
    return [
        (mu[i] - th2 / n) * frame.v1 - (lam[i] - th1 / n) * frame.v2
        for i in range(n)
    ]


def _simultaneous_eigenvalues(m1: np.ndarray, m2: np.ndarray, cluster_tol: float):
    """Eigenvalue pairs of two commuting symmetric matrices in a common basis."""
    w1, q = eigen_symmetric(m1)
    b = q.T @ m2 @ q
    n = m1.shape[0]
    # refine inside eigenvalue clusters of m1 where q is not yet adapted to m2
    start = 0
    gap = max(cluster_tol, 1e-12 * max(1.0, np.abs(w1).max()))
    while start < n:
        stop = start + 1
        while stop < n and abs(w1[stop] - w1[stop - 1]) <= gap:
            stop += 1
        if stop - start > 1:
            _, qq = eigen_symmetric(b[start:stop, start:stop])
            q[:, start:stop] = q[:, start:stop] @ qq
        start = stop
    b = q.T @ m2 @ q
    return w1, b.diagonal().copy()


def classify_pseudo_ortho(state: ExtrinsicState):
    """Umbilicity along H and along its quarter-turn, plus the subgeodesic flag.

    Returns ``(pseudo, ortho, subgeodesic, residuals)``.  The subgeodesic flag
    equals ortho wherever H is non-negligible and is None (indeterminate)
    otherwise; the cross-checks (Casorati difference for pseudo, the wedge
    h-flat ^ H-flat for ortho) are recorded in the residual map.
    """
    n = state.n
    frame = state.normal_frame
    e1, e2 = frame.signs
    th1, th2 = state.expansions
    tau = state.tau_umb
    a1, a2 = state.shape_ops[0].matrix, state.shape_ops[1].matrix

    h_coeff = math.hypot(th1 / n, th2 / n)
    a_h = (e1 * th1 * a1 + e2 * th2 * a2) / n
    shear_h = a_h - (np.trace(a_h) / n) * np.eye(n)
    r_pseudo = float(np.linalg.norm(shear_h))
    pseudo = r_pseudo <= tau * max(1.0, h_coeff)

    bj_minus_ah = state.casorati.matrix - state.shear_casorati.matrix - a_h
    r_pseudo_cross = float(np.linalg.norm(bj_minus_ah))

    # A along star H: star maps frame coefficients (a, b) -> (-e1 b, e2 a)
    c1, c2 = e1 * th1 / n, e2 * th2 / n  # H = c1 xi1 + c2 xi2
    a_star_h = (-e1 * c2) * a1 + (e2 * c1) * a2
    r_ortho = float(np.linalg.norm(a_star_h))
    ortho = r_ortho <= tau * max(1.0, h_coeff)

    r_wedge = _wedge_residual(state)
    residuals = {
        "pseudo": r_pseudo,
        "pseudo_cross": r_pseudo_cross,
        "ortho": r_ortho,
        "wedge": r_wedge,
    }
    subgeodesic = ortho if h_coeff > tau else None
    return pseudo, ortho, subgeodesic, residuals


def _wedge_residual(state: ExtrinsicState) -> float:
    """max over frame pairs of |h(e_i, e_j)-flat wedge H-flat|, scale-free."""
    gbar = state.ambient_metric
    h_flat_mean = gbar @ state.mean_curvature
    n = state.n
    scale = max(1.0, (state.shape_ops[0].norm() + state.shape_ops[1].norm()) * np.abs(h_flat_mean).max())
    worst = 0.0
    for i in range(n):
        for j in range(i, n):
            hb = gbar @ state.h_value(i, j)
            wedge = np.outer(hb, h_flat_mean)
            worst = max(worst, float(np.abs(wedge - wedge.T).max()))
    return worst / scale


def causal_character(state: ExtrinsicState, direction: DirectionResult) -> str:
    """Causal character of the umbilical direction from the trace of the
    shear Casorati operator; cross-checked against tr B - n gbar(H, H)."""
    if state.normal_frame.signs != (-1, 1):
        raise SignatureError("causal character requires Lorentzian normal signature")
    if direction.totally_umbilical:
        raise NoDirectionError("totally umbilical point: no distinguished direction")
    tr_j = state.shear_casorati.trace()
    tr_cross = state.casorati.trace() - state.n * state.mean_curvature_sq
    if abs(tr_cross - tr_j) > max(state.tolerances.w, state.tolerances.w * abs(tr_j)):
        raise ArithmeticError(f"causal cross-check failed: tr J = {tr_j}, tr B - n g(H,H) = {tr_cross}")
    if abs(tr_j) <= state.tau_umb:
        return "null"
    return "timelike" if tr_j > 0 else "spacelike"


def trapped_status(state: ExtrinsicState, null_frame=None):
    """Trapped classification from the null expansions and gbar(H, H).

    Returns ``(status, (theta_k, theta_l))``.  The status depends only on
    products and on gbar(H, H), so it is boost and orientation independent.
    """
    if state.normal_frame.signs != (-1, 1):
        raise SignatureError("trapped status requires Lorentzian normal signature")
    nf = null_frame or to_null_frame(state.normal_frame, state.ambient_metric, state.tolerances)
    a_k, a_l = null_shape_operators(state, nf)
    th_k, th_l = a_k.trace(), a_l.trace()
    tau = state.tau_umb
    th1, th2 = state.expansions
    h_coeff = math.hypot(th1 / state.n, th2 / state.n)
    if h_coeff <= tau:
        return "minimal", (th_k, th_l)
    if abs(state.mean_curvature_sq) <= tau or min(abs(th_k), abs(th_l)) <= tau:
        return "marginally_trapped", (th_k, th_l)
    if state.mean_curvature_sq < 0.0:
        return "trapped", (th_k, th_l)
    return "untrapped", (th_k, th_l)


def pseudo_ortho_degeneracy(state: ExtrinsicState) -> dict:
    """The three equivalent degeneracy conditions for Lorentzian points.

    Where H is non-zero and the point is not totally umbilical, the
    conditions (B - J = 0), (pseudo and ortho), (B = 0 and J = 0) hold or
    fail together, and any of them forces gbar(H, H) = 0.
    """
    tau = 10.0 * state.tau_umb
    th1, th2 = state.expansions
    n = state.n
    h_coeff = math.hypot(th1 / n, th2 / n)
    pseudo, ortho, _, _ = classify_pseudo_ortho(state)
    totally = max(state.shear_scalars) <= state.tau_umb
    report = {
        "applicable": h_coeff > state.tau_umb and not totally,
        "branch": "generic",
        "bj_difference_zero": float(np.linalg.norm(state.casorati.matrix - state.shear_casorati.matrix)) <= tau,
        "pseudo_and_ortho": bool(pseudo and ortho),
        "b_and_j_zero": state.casorati.norm() <= tau and state.shear_casorati.norm() <= tau,
        "mean_curvature_sq": state.mean_curvature_sq,
    }
    if not report["applicable"]:
        report["branch"] = "degenerate (H = 0 or totally umbilical)"
        report["agree"] = None
        return report
    report["agree"] = (
        report["bj_difference_zero"] == report["pseudo_and_ortho"] == report["b_and_j_zero"]
    )
    return report


def classify(state: ExtrinsicState) -> UmbilicalVerdict:
    """Full pointwise verdict: direction, flavor flags, causal and trapped data."""
    exists, diagnostics = direction_exists(state)
    residuals = {name: diagnostics[name][1] for name in ("commutator", "components", "inner")}
    totally = False
    direction = None
    if exists:
        direction = compute_direction(state)
        totally = direction.totally_umbilical
        residuals["reconstruction"] = direction.reconstruction_residual

    pseudo, ortho, subgeo, more = classify_pseudo_ortho(state)
    residuals.update(more)

    lorentzian = state.normal_frame.signs == (-1, 1)
    causal = "undefined"
    if lorentzian and exists and not totally:
        causal = causal_character(state, direction)
    trapped = None
    thetas = None
    if lorentzian:
        trapped, thetas = trapped_status(state)

    return UmbilicalVerdict(
        totally_umbilical=totally,
        direction_exists=exists,
        umbilical_direction=None if direction is None else direction.umbilical_direction,
        causal_character=causal,
        shear_vector=None if direction is None else direction.shear_vector,
        normalized_shear=None if direction is None else direction.normalized_shear,
        signed_shear_scalars=None if direction is None else direction.signed_scalars,
        pseudo_umbilical=pseudo,
        ortho_umbilical=ortho,
        subgeodesic=subgeo,
        trapped_status=trapped,
        null_expansions=thetas,
        residuals=residuals,
    )
