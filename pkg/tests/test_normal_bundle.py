import math

import numpy as np
import pytest

from subshear.errors import NotNormalError, SignatureError
from subshear.extrinsic_geometry import extrinsic_state, state_from_operators
from subshear.normal_bundle import (
    build_normal_frame,
    hodge_dual,
    normal_area_form,
    normal_coefficients,
    null_shape_operators,
    star_mean_curvature_and_null_expansions,
    to_null_frame,
)
from subshear.spacetime_catalog import horizon_radii, kerr_normal_frame_xi_eta, metric_by_name, surface_by_name


def minkowski_plane_state():
    metric = metric_by_name("minkowski4")
    surf = surface_by_name("flat_plane", metric)
    return extrinsic_state(surf, metric, (0.3, 0.7)), metric


def test_plane_normal_frame_is_t_and_x_axes():
    st, _ = minkowski_plane_state()
    f = st.normal_frame
    assert f.signs == (-1, 1)
    assert np.abs(np.abs(f.v1) - [1, 0, 0, 0]).max() <= 1e-12
    assert np.abs(np.abs(f.v2) - [0, 1, 0, 0]).max() <= 1e-12
    assert f.v1[0] > 0  # future-pointing timelike leg
    omega = normal_area_form(st.ambient_metric, st.tangent_frame)
    assert omega(f.v1, f.v2) == pytest.approx(1.0, abs=1e-12)


def test_kerr_normal_frame_spans_the_xi_eta_plane():
    params = {"m": 1.0, "a": 0.5}
    metric = metric_by_name("kerr", params)
    surf = surface_by_name("const_vr", metric, {"v": 0.0, "r": 2.5})
    st = extrinsic_state(surf, metric, (1.0, 0.4))
    xi, eta = kerr_normal_frame_xi_eta(params, (0.0, 2.5, 1.0, 0.4))
    # each frame leg decomposes against (xi, eta) with negligible remainder
    basis = np.stack([xi, eta])
    for leg in (st.normal_frame.v1, st.normal_frame.v2):
        coeffs, *_ = np.linalg.lstsq(basis.T, leg, rcond=None)
        assert np.abs(basis.T @ coeffs - leg).max() <= 1e-10


def test_random_graph_normal_frames():
    rng = np.random.default_rng(3)
    metric = metric_by_name("minkowski4")
    for _ in range(20):
        surf = surface_by_name("graph", metric, {"at": rng.uniform(-0.3, 0.3), "az": rng.uniform(-0.3, 0.3)})
        st = extrinsic_state(surf, metric, tuple(rng.uniform(-2, 2, size=2)))
        f = st.normal_frame
        g = st.ambient_metric
        assert abs(f.v1 @ g @ f.v1 - (-1.0)) <= 1e-10
        assert abs(f.v2 @ g @ f.v2 - 1.0) <= 1e-10
        assert abs(f.v1 @ g @ f.v2) <= 1e-10
        assert np.abs(st.tangent_frame @ g @ f.v1).max() <= 1e-10
        assert np.abs(st.tangent_frame @ g @ f.v2).max() <= 1e-10


def test_null_frame_invariants_and_hodge_action():
    st, _ = minkowski_plane_state()
    g = st.ambient_metric
    nf = to_null_frame(st.normal_frame, g)
    k, ell = nf.v1, nf.v2
    assert abs(k @ g @ k) <= 1e-14
    assert abs(ell @ g @ ell) <= 1e-14
    assert k @ g @ ell == pytest.approx(-1.0, abs=1e-14)
    omega = normal_area_form(g, st.tangent_frame)
    assert omega(k, ell) == pytest.approx(1.0, abs=1e-12)
    assert np.abs(hodge_dual(nf, g, k) + k).max() <= 1e-12
    assert np.abs(hodge_dual(nf, g, ell) - ell).max() <= 1e-12
    # both legs future-pointing
    assert k[0] > 0 and ell[0] > 0


def test_null_frame_requires_lorentzian_signature():
    st = state_from_operators(np.eye(2), np.eye(2), (1, 1))
    with pytest.raises(SignatureError):
        to_null_frame(st.normal_frame, st.ambient_metric)


def test_hodge_identities_all_signatures():
    rng = np.random.default_rng(5)
    for signs in ((1, 1), (-1, 1), (-1, -1)):
        st = state_from_operators(np.diag([1.0, 2.0]), np.diag([-1.0, 3.0]), signs)
        f, g = st.normal_frame, st.ambient_metric
        e1, e2 = signs
        assert np.abs(hodge_dual(f, g, f.v1) - e2 * f.v2).max() <= 1e-12
        assert np.abs(hodge_dual(f, g, f.v2) + e1 * f.v1).max() <= 1e-12
        for _ in range(20):
            a, b = rng.uniform(-2, 2, size=2)
            c, d = rng.uniform(-2, 2, size=2)
            nu = a * f.v1 + b * f.v2
            eta = c * f.v1 + d * f.v2
            star_nu = hodge_dual(f, g, nu)
            star_eta = hodge_dual(f, g, eta)
            assert np.abs(hodge_dual(f, g, star_nu) + e1 * e2 * nu).max() <= 1e-12
            assert abs(star_nu @ g @ eta + nu @ g @ star_eta) <= 1e-12
            assert abs(star_nu @ g @ nu) <= 1e-12
            if signs == (-1, 1):
                assert star_nu @ g @ star_nu == pytest.approx(-(nu @ g @ nu), abs=1e-12)


def test_hodge_rejects_tangential_vectors():
    st, _ = minkowski_plane_state()
    with pytest.raises(NotNormalError):
        hodge_dual(st.normal_frame, st.ambient_metric, np.array([0.0, 0.0, 1.0, 0.0]))
    with pytest.raises(NotNormalError):
        normal_coefficients(st.normal_frame, st.ambient_metric, st.normal_frame.v1 + st.tangent_frame[0])


def test_hodge_is_frame_independent():
    rng = np.random.default_rng(6)
    st = state_from_operators(np.diag([1.0, 2.0]), np.diag([0.5, 1.5]), (-1, 1))
    g = st.ambient_metric
    f = st.normal_frame
    chi = 0.8
    from subshear.normal_bundle import NormalFrame

    boosted = NormalFrame(
        "orthonormal",
        math.cosh(chi) * f.v1 + math.sinh(chi) * f.v2,
        math.sinh(chi) * f.v1 + math.cosh(chi) * f.v2,
        f.signs,
        f.orientation,
    )
    for _ in range(10):
        nu = rng.uniform(-2, 2) * f.v1 + rng.uniform(-2, 2) * f.v2
        assert np.abs(hodge_dual(f, g, nu) - hodge_dual(boosted, g, nu)).max() <= 1e-10


def test_star_H_has_zero_expansion_and_null_identity():
    rng = np.random.default_rng(7)
    for _ in range(30):
        a1 = rng.standard_normal((2, 2))
        a2 = rng.standard_normal((2, 2))
        st = state_from_operators(a1 + a1.T, a2 + a2.T, (-1, 1))
        star_h, thetas, nf = star_mean_curvature_and_null_expansions(st)
        assert st.shape_operator_along(star_h, check=False).trace() == pytest.approx(0.0, abs=1e-9)
        th_k, th_l = thetas
        g = st.ambient_metric
        # gbar(star H, star H) = -gbar(H, H) = (2/n^2) theta_k theta_l
        assert star_h @ g @ star_h == pytest.approx(-st.mean_curvature_sq, abs=1e-9)
        assert -st.mean_curvature_sq == pytest.approx(2.0 / st.n**2 * th_k * th_l, abs=1e-9)


def test_star_H_vanishes_with_H():
    st = state_from_operators(np.zeros((2, 2)), np.zeros((2, 2)), (-1, 1))
    star_h, thetas, _ = star_mean_curvature_and_null_expansions(st)
    assert np.abs(star_h).max() == 0.0
    assert thetas == (0.0, 0.0)


def test_kerr_horizon_star_H_parallel_to_H():
    rp, _ = horizon_radii(1.0, 0.5)
    metric = metric_by_name("kerr", {"m": 1.0, "a": 0.5})
    surf = surface_by_name("const_vr", metric, {"v": 0.0, "r": rp})
    st = extrinsic_state(surf, metric, (1.2, 0.0))
    star_h, _, _ = star_mean_curvature_and_null_expansions(st)
    h = st.mean_curvature
    cross = np.outer(star_h, h) - np.outer(h, star_h)
    assert np.abs(cross).max() <= 1e-9 * max(1.0, np.abs(h).max() ** 2)


def test_null_anticommutator_forms_of_B_and_J():
    rng = np.random.default_rng(9)
    for _ in range(30):
        n = int(rng.integers(2, 5))
        a1 = rng.standard_normal((n, n))
        a2 = rng.standard_normal((n, n))
        st = state_from_operators(a1 + a1.T, a2 + a2.T, (-1, 1))
        nf = to_null_frame(st.normal_frame, st.ambient_metric)
        a_k, a_l = null_shape_operators(st, nf)
        anti = a_k.matrix @ a_l.matrix + a_l.matrix @ a_k.matrix
        assert np.abs(st.casorati.matrix + anti).max() <= 1e-9
        t_k = a_k.tracefree().matrix
        t_l = a_l.tracefree().matrix
        anti_t = t_k @ t_l + t_l @ t_k
        assert np.abs(st.shear_casorati.matrix + anti_t).max() <= 1e-9


def test_boost_covariance_of_null_quantities():
    # rescaling k -> lambda k, l -> l / lambda preserves the normalization and
    # every reported invariant combination
    st = state_from_operators(np.diag([1.0, -0.5]), np.array([[0.3, 0.2], [0.2, -0.1]]), (-1, 1))
    g = st.ambient_metric
    nf = to_null_frame(st.normal_frame, g)
    from subshear.normal_bundle import NormalFrame

    lam = 2.7
    boosted = NormalFrame("null", lam * nf.v1, nf.v2 / lam, None, nf.orientation)
    assert boosted.v1 @ g @ boosted.v2 == pytest.approx(-1.0, abs=1e-12)
    a_k, a_l = null_shape_operators(st, nf)
    b_k, b_l = null_shape_operators(st, boosted)
    assert b_k.trace() * b_l.trace() == pytest.approx(a_k.trace() * a_l.trace(), rel=1e-12)
    anti_a = a_k.matrix @ a_l.matrix + a_l.matrix @ a_k.matrix
    anti_b = b_k.matrix @ b_l.matrix + b_l.matrix @ b_k.matrix
    assert np.abs(anti_a - anti_b).max() <= 1e-12


def test_build_normal_frame_orientation_flag():
    st, _ = minkowski_plane_state()
    flipped = build_normal_frame(st.ambient_metric, st.tangent_frame, time_axis=0, orientation=-1)
    omega_minus = normal_area_form(st.ambient_metric, st.tangent_frame, -1)
    assert omega_minus(flipped.v1, flipped.v2) == pytest.approx(1.0, abs=1e-12)
    # flipping the convention flips the hodge rotation globally
    nu = st.normal_frame.v1 + 0.3 * st.normal_frame.v2
    plus = hodge_dual(st.normal_frame, st.ambient_metric, nu)
    minus = hodge_dual(flipped, st.ambient_metric, nu)
    assert np.abs(plus + minus).max() <= 1e-12
