"""Built-in ambient metrics and immersion families.

Every metric component function is written against the scalar dispatchers in
:mod:`subshear.dual`, so the same code evaluates on floats and on dual seeds.

The closed-form Kerr shape operators kept here are strictly test oracles:
production classification always runs the generic differentiation pipeline.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .dual import cos, sin
from .errors import ConfigError, DomainError
from .extrinsic_geometry import Immersion
from .tensor_engine import DEFAULT_TOL, Tolerances

PI = math.pi


@dataclass(frozen=True)
class MetricSpec:
    """A smooth symmetric bilinear form field on a coordinate chart."""

    name: str
    dim: int
    coords: tuple
    signature: tuple
    fn: Callable
    admissible: Optional[Callable] = None
    time_axis: Optional[int] = None
    params: dict = field(default_factory=dict)


# -- metric component functions ---------------------------------------------


def _kerr_components(m: float, a: float):
    def fn(x):
        v, r, th, ph = x
        st = sin(th)
        ct = cos(th)
        s2 = st * st
        rho2 = r * r + (a * a) * (ct * ct)
        delta = r * r - 2.0 * m * r + a * a
        gvv = -(1.0 - 2.0 * m * r / rho2)
        gvp = -2.0 * a * m * r * s2 / rho2
        grp = -a * s2
        gpp = ((r * r + a * a) ** 2 - a * a * delta * s2) * s2 / rho2
        return [
            [gvv, 1.0, 0.0, gvp],
            [1.0, 0.0, 0.0, grp],
            [0.0, 0.0, rho2, 0.0],
            [gvp, grp, 0.0, gpp],
        ]

    return fn


def _kerr_admissible(a: float, tol: Tolerances):
    def check(x):
        _, r, th, _ = (float(c) for c in x)
        rho = math.hypot(r, a * math.cos(th))
        if rho <= tol.rho_min:
            return "rho below rho_min (ring singularity excised)"
        if not (tol.theta_min <= th <= PI - tol.theta_min):
            return "theta outside the axis clamp"
        return None

    return check


def _euclidean(n: int):
    def fn(x):
        return np.eye(n).tolist()

    return fn


def _minkowski(n: int):
    def fn(x):
        g = np.eye(n)
        g[0, 0] = -1.0
        return g.tolist()

    return fn


def _polar_flat4(x):
    # Euclidean 4-space in a spherical-polar chart (r, theta, phi, w)
    r, th, ph, w = x
    st = sin(th)
    return [
        [1.0, 0.0, 0.0, 0.0],
        [0.0, r * r, 0.0, 0.0],
        [0.0, 0.0, r * r * st * st, 0.0],
        [0.0, 0.0, 0.0, 1.0],
    ]


def _polar_admissible(tol: Tolerances):
    def check(x):
        r, th = float(x[0]), float(x[1])
        if r <= tol.rho_min:
            return "radius below rho_min"
        if not (tol.theta_min <= th <= PI - tol.theta_min):
            return "theta outside the axis clamp"
        return None

    return check


METRIC_NAMES = (
    "euclidean4",
    "minkowski4",
    "minkowskiN",
    "schwarzschild_kerr_coords",
    "kerr_kerr_coords",
    "riemannian_test",
)

_METRIC_ALIASES = {
    "kerr": "kerr_kerr_coords",
    "schwarzschild": "schwarzschild_kerr_coords",
}


def metric_by_name(name: str, params: dict | None = None, tol: Tolerances = DEFAULT_TOL) -> MetricSpec:
    """Build a catalog metric from its name and parameter map."""
    params = dict(params or {})
    key = _METRIC_ALIASES.get(name.replace("-", "_"), name.replace("-", "_"))
    if key == "euclidean4":
        return MetricSpec("euclidean4", 4, ("w", "x", "y", "z"), (1, 1, 1, 1), _euclidean(4))
    if key == "minkowski4":
        return MetricSpec("minkowski4", 4, ("t", "x", "y", "z"), (-1, 1, 1, 1), _minkowski(4), time_axis=0)
    if key == "minkowskiN":
        dim = int(params.get("dim", 4))
        if dim < 3:
            raise ConfigError("minkowskiN needs dim >= 3")
        coords = ("t",) + tuple(f"x{i}" for i in range(1, dim))
        return MetricSpec(
            "minkowskiN", dim, coords, (-1,) + (1,) * (dim - 1), _minkowski(dim), time_axis=0, params={"dim": dim}
        )
    if key == "riemannian_test":
        return MetricSpec(
            "riemannian_test", 4, ("r", "theta", "phi", "w"), (1, 1, 1, 1), _polar_flat4, _polar_admissible(tol)
        )
    if key in ("kerr_kerr_coords", "schwarzschild_kerr_coords"):
        m = float(params.get("m", 1.0))
        a = 0.0 if key == "schwarzschild_kerr_coords" else float(params.get("a", 0.0))
        if m <= 0:
            raise ConfigError("mass m must be positive")
        return MetricSpec(
            key,
            4,
            ("v", "r", "theta", "phi"),
            (-1, 1, 1, 1),
            _kerr_components(m, a),
            _kerr_admissible(a, tol),
            time_axis=0,
            params={"m": m, "a": a},
        )
    raise ConfigError(f"unknown metric {name!r}; choose one of {METRIC_NAMES}")


def kerr_metric(params: dict, p, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Kerr metric matrix at a point (thin convenience wrapper)."""
    from .tensor_engine import evaluate_metric

    g, _ = evaluate_metric(metric_by_name("kerr_kerr_coords", params, tol), p, tol)
    return g


def horizon_radii(m: float, a: float):
    """Radii of the outer and inner horizons, r = m +/- sqrt(m^2 - a^2)."""
    if m * m < a * a:
        raise DomainError("no horizons: m^2 < a^2")
    s = math.sqrt(m * m - a * a)
    return m + s, m - s


# -- surface families ---------------------------------------------------------


SURFACE_NAMES = ("const_vr_kerr", "round_sphere", "flat_plane", "graph", "torus_flat_ambient")

_SURFACE_ALIASES = {
    "const_vr": "const_vr_kerr",
    "sphere": "round_sphere",
    "plane": "flat_plane",
    "torus": "torus_flat_ambient",
}


@dataclass(frozen=True)
class SurfaceSpec:
    """A named immersion family with its parameter map."""

    family: str
    params: dict = field(default_factory=dict)

    def build(self, metric: MetricSpec, tol: Tolerances = DEFAULT_TOL) -> Immersion:
        return surface_by_name(self.family, metric, self.params, tol)


def _theta_domain(tol: Tolerances):
    def check(u):
        th = float(u[0])
        if not (tol.theta_min <= th <= PI - tol.theta_min):
            return "theta outside the axis clamp"
        return None

    return check


def surface_by_name(
    family: str, metric: MetricSpec, params: dict | None = None, tol: Tolerances = DEFAULT_TOL
) -> Immersion:
    params = dict(params or {})
    key = _SURFACE_ALIASES.get(family.replace("-", "_"), family.replace("-", "_"))

    if key == "const_vr_kerr":
        if metric.name not in ("kerr_kerr_coords", "schwarzschild_kerr_coords"):
            raise ConfigError("const_vr_kerr requires a Kerr-type metric")
        v0 = float(params.get("v", 0.0))
        r0 = float(params.get("r", 3.0))

        def fn(u):
            th, ph = u
            return [v0, r0, th, ph]

        return Immersion(fn, 2, 4, ("theta", "phi"), _theta_domain(tol), "const_vr_kerr", {"v": v0, "r": r0})

    if key == "round_sphere":
        if metric.dim != 4:
            raise ConfigError("round_sphere is a 2-surface in a 4-dimensional ambient chart")
        rad = float(params.get("R", 1.0))
        c0 = float(params.get("c0", 0.0))
        if rad <= 0:
            raise ConfigError("sphere radius R must be positive")

        def fn(u):
            th, ph = u
            return [c0, rad * sin(th) * cos(ph), rad * sin(th) * sin(ph), rad * cos(th)]

        return Immersion(fn, 2, 4, ("theta", "phi"), _theta_domain(tol), "round_sphere", {"R": rad, "c0": c0})

    if key == "flat_plane":
        n = metric.dim - 2

        def fn(u):
            return [0.0, 0.0] + list(u)

        names = tuple(f"u{i}" for i in range(1, n + 1)) if n != 2 else ("x", "y")
        return Immersion(fn, n, metric.dim, names, None, "flat_plane", {})

    if key == "graph":
        if metric.dim != 4:
            raise ConfigError("graph surfaces live in a 4-dimensional ambient chart")
        at = float(params.get("at", 0.2))
        az = float(params.get("az", 0.3))

        def fn(u):
            x, y = u
            return [at * sin(x) * sin(y), x, y, az * sin(x + y)]

        return Immersion(fn, 2, 4, ("x", "y"), None, "graph", {"at": at, "az": az})

    if key == "torus_flat_ambient":
        if metric.name != "euclidean4":
            raise ConfigError("torus_flat_ambient requires the euclidean4 metric")
        r1 = float(params.get("R1", 1.0))
        r2 = float(params.get("R2", 1.0))

        def fn(u):
            s, t = u
            return [r1 * cos(s), r1 * sin(s), r2 * cos(t), r2 * sin(t)]

        return Immersion(fn, 2, 4, ("u", "v"), None, "torus_flat_ambient", {"R1": r1, "R2": r2})

    raise ConfigError(f"unknown surface family {family!r}; choose one of {SURFACE_NAMES}")


# -- closed-form Kerr quantities (test oracles) ------------------------------


def kerr_normal_frame_xi_eta(params: dict, p):
    """The two preferred normal fields of constant-(v, r) surfaces.

    xi is metrically dual to dr and eta to dv; both are returned as ambient
    component vectors at the given point.
    """
    m, a = float(params["m"]), float(params.get("a", 0.0))
    _, r, th, _ = (float(c) for c in (p.coords if hasattr(p, "coords") else p))
    rho2 = r * r + a * a * math.cos(th) ** 2
    if rho2 <= 0:
        raise DomainError("rho vanishes")
    delta = r * r - 2.0 * m * r + a * a
    xi = np.array([r * r + a * a, delta, 0.0, a]) / rho2
    eta = np.array([a * a * math.sin(th) ** 2, r * r + a * a, 0.0, a]) / rho2
    return xi, eta


def reference_shape_operators(params: dict, p):
    """Closed-form shape operator matrices of constant-(v, r) surfaces.

    Expressed in the coordinate basis (d_theta, d_phi).  Used only to
    cross-check the generic pipeline.
    """
    m, a = float(params["m"]), float(params.get("a", 0.0))
    _, r, th, _ = (float(c) for c in (p.coords if hasattr(p, "coords") else p))
    st, ct = math.sin(th), math.cos(th)
    rho2 = r * r + a * a * ct * ct
    if rho2 <= 0:
        raise DomainError("rho vanishes")
    delta = r * r - 2.0 * m * r + a * a
    big = (r * r + a * a) ** 2 - a * a * delta * st * st
    m1 = np.array(
        [
            [r / rho2, 0.0],
            [0.0, rho2 * (r + (m / rho2**2) * a * a * (a * a * ct * ct - r * r) * st * st) / big],
        ]
    )
    m2 = np.array([[0.0, 1.0 / rho2], [rho2 / (big * st * st), 0.0]])
    a_xi = (delta / rho2) * m1
    a_eta = ((r * r + a * a) * m1 - 2.0 * (m / rho2) * r * a**3 * st**3 * ct * m2) / rho2
    return a_xi, a_eta


def commutator_locus_polynomial(m: float, a: float, theta: float):
    """The scalar whose root inside r < m marks the non-trivial umbilical locus.

    Returns r -> 4 m r^2 + rho^2 (r - m).
    """
    c2 = a * a * math.cos(theta) ** 2

    def poly(r: float) -> float:
        return 4.0 * m * r * r + (r * r + c2) * (r - m)

    return poly
