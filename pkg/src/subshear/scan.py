"""Grid scans, umbilical-locus search and intrinsic curvature of surfaces.

Reports are deterministic: fixed field order, shortest round-trip float
serialization, and a map phase whose record order never depends on the
worker count.
"""

from __future__ import annotations

import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import dual
from .dual import DualScalar
from .errors import ConfigError, DomainError, NoRootError, NotSpacelikeError
from .extrinsic_geometry import extrinsic_state
from .spacetime_catalog import metric_by_name, surface_by_name
from .tensor_engine import DEFAULT_TOL, Tolerances
from .umbilical_classifier import classify

ENV_TOL_UMB = "SUBSHEAR_TOL_UMB"

_TOL_KEYS = {
    "sym": "sym",
    "chris": "chris",
    "eig": "eig",
    "inv": "inv",
    "w": "w",
    "pd": "pd",
    "umb": "umb_factor",
    "umb_factor": "umb_factor",
    "rho_min": "rho_min",
    "theta_min": "theta_min",
}

CSV_COLUMNS = (
    "theta1",
    "theta2",
    "sigma1",
    "sigma2",
    "gHH",
    "trB",
    "trJ",
    "dir_exists",
    "tot_umb",
    "pseudo",
    "ortho",
    "subgeo",
    "causal",
    "trapped",
    "max_residual",
)


@dataclass(frozen=True)
class ScanConfig:
    """Validated configuration of one scan / classify / locus run."""

    metric: str
    metric_params: dict = field(default_factory=dict)
    surface: str = "const_vr_kerr"
    surface_params: dict = field(default_factory=dict)
    grid: dict = field(default_factory=dict)  # name -> (start, stop, count)
    at: dict = field(default_factory=dict)  # fixed surface coordinates
    tol_overrides: dict = field(default_factory=dict)
    report: str = "json"
    out: Optional[str] = None
    orientation: int = 1
    mean_curvature_convention: str = "paper"
    workers: int = 1

    def validate(self):
        for name, (start, stop, count) in self.grid.items():
            if count < 1:
                raise ConfigError(f"grid {name}: count must be >= 1, got {count}")
            if not start < stop:
                raise ConfigError(f"grid {name}: start must be < stop, got {start}:{stop}")
        for key, value in self.tol_overrides.items():
            if key not in _TOL_KEYS:
                raise ConfigError(f"unknown tolerance key {key!r}; choose from {sorted(_TOL_KEYS)}")
            if not value > 0:
                raise ConfigError(f"tolerance {key} must be positive, got {value}")
        if self.report not in ("json", "csv", "text"):
            raise ConfigError(f"report must be json, csv or text, got {self.report!r}")
        if self.orientation not in (1, -1):
            raise ConfigError("orientation must be +1 or -1")
        if self.mean_curvature_convention not in ("paper", "physics"):
            raise ConfigError("mean-curvature convention must be 'paper' or 'physics'")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        return self

    def tolerances(self) -> Tolerances:
        overrides = {_TOL_KEYS[k]: float(v) for k, v in self.tol_overrides.items()}
        env = os.environ.get(ENV_TOL_UMB)
        if env is not None and "umb_factor" not in overrides:
            overrides["umb_factor"] = float(env)
        return DEFAULT_TOL.replace(**overrides) if overrides else DEFAULT_TOL

    def build(self):
        tol = self.tolerances()
        metric = metric_by_name(self.metric, self.metric_params, tol)
        surface = surface_by_name(self.surface, metric, self.surface_params, tol)
        return metric, surface, tol

    def echo(self) -> dict:
        return {
            "metric": self.metric,
            "metric_params": dict(sorted(self.metric_params.items())),
            "surface": self.surface,
            "surface_params": dict(sorted(self.surface_params.items())),
            "grid": {k: list(v) for k, v in self.grid.items()},
            "at": dict(sorted(self.at.items())),
            "tol_overrides": dict(sorted(self.tol_overrides.items())),
            "report": self.report,
            "orientation": self.orientation,
            "mean_curvature_convention": self.mean_curvature_convention,
            "workers": self.workers,
        }


def grid_points(config: ScanConfig):
    """Cartesian product of the grid axes, last axis fastest; deterministic."""
    names = list(config.grid.keys())
    axes = [np.linspace(start, stop, count) for start, stop, count in config.grid.values()]
    if not axes:
        return names, []
    mesh = np.meshgrid(*axes, indexing="ij")
    points = np.stack([m.ravel() for m in mesh], axis=-1)
    return names, [tuple(p) for p in points]


def point_record(config: ScanConfig, names, coords) -> dict:
    """Classify one grid point into a flat, serialization-ready record.

    Grid axes may address surface coordinates (e.g. theta) or surface-family
    parameters (e.g. the radius of a constant-(v, r) family); family axes
    rebuild the immersion per point.
    """
    metric, surface, tol = config.build()
    values = dict(config.at)
    values.update({name: float(v) for name, v in zip(names, coords)})
    family_overrides = {k: v for k, v in values.items() if k in surface.params}
    if family_overrides:
        sparams = dict(config.surface_params)
        sparams.update(family_overrides)
        surface = surface_by_name(config.surface, metric, sparams, tol)
        values = {k: v for k, v in values.items() if k not in family_overrides}
    ordered = _surface_coords(surface, values)
    state = extrinsic_state(surface, metric, ordered, tol, config.orientation)
    verdict = classify(state)
    n = state.n
    factor = float(n * n) if config.mean_curvature_convention == "physics" else 1.0
    record = {
        "point": {name: float(v) for name, v in zip(names, coords)},
        "theta1": state.expansions[0],
        "theta2": state.expansions[1],
        "sigma1": state.shear_scalars[0],
        "sigma2": state.shear_scalars[1],
        "gHH": factor * state.mean_curvature_sq,
        "trB": state.casorati.trace(),
        "trJ": state.shear_casorati.trace(),
        "dir_exists": verdict.direction_exists,
        "tot_umb": verdict.totally_umbilical,
        "pseudo": verdict.pseudo_umbilical,
        "ortho": verdict.ortho_umbilical,
        "subgeo": verdict.subgeodesic,
        "causal": verdict.causal_character,
        "trapped": verdict.trapped_status,
        "theta_k": None if verdict.null_expansions is None else verdict.null_expansions[0],
        "theta_l": None if verdict.null_expansions is None else verdict.null_expansions[1],
        "umbilical_direction": None
        if verdict.umbilical_direction is None
        else [float(c) for c in verdict.umbilical_direction],
        "residuals": {k: float(v) for k, v in sorted(verdict.residuals.items())},
        "max_residual": float(verdict.max_residual),
    }
    return record


def _surface_coords(surface, values):
    unknown = [k for k in values if k not in surface.param_names]
    if unknown:
        raise ConfigError(f"unknown surface coordinates {unknown}; surface has {list(surface.param_names)}")
    # unspecified coordinates default to 0 (natural for symmetry directions)
    return tuple(values.get(p, 0.0) for p in surface.param_names)


def _worker(args):
    config, names, coords = args
    try:
        return ("ok", point_record(config, names, coords))
    except DomainError as exc:
        return ("skip", {"point": {n: float(v) for n, v in zip(names, coords)}, "reason": str(exc)})


@dataclass(frozen=True)
class ScanResult:
    config: dict
    records: list
    summary: dict
    exit_code: int


def run_scan(config: ScanConfig) -> ScanResult:
    """Classify every grid point and aggregate the verdict counts."""
    config.validate()
    names, points = grid_points(config)
    if not points:
        raise ConfigError("scan needs a non-empty --grid")
    tasks = [(config, names, coords) for coords in points]
    if config.workers > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            outcomes = list(pool.map(_worker, tasks, chunksize=max(1, len(tasks) // (4 * config.workers))))
    else:
        outcomes = [_worker(t) for t in tasks]
    records = [payload for kind, payload in outcomes if kind == "ok"]
    skipped = [payload for kind, payload in outcomes if kind == "skip"]
    summary = summarize(records, skipped)
    exit_code = 0 if not skipped else 2
    return ScanResult(config.echo(), records, summary, exit_code)


def summarize(records, skipped) -> dict:
    counts = {
        "records": len(records),
        "skipped": len(skipped),
        "dir_exists": sum(1 for r in records if r["dir_exists"]),
        "totally_umbilical": sum(1 for r in records if r["tot_umb"]),
        "pseudo": sum(1 for r in records if r["pseudo"]),
        "ortho": sum(1 for r in records if r["ortho"]),
        "subgeodesic": sum(1 for r in records if r["subgeo"] is True),
        "causal": {},
        "trapped": {},
    }
    for r in records:
        counts["causal"][r["causal"]] = counts["causal"].get(r["causal"], 0) + 1
        key = r["trapped"] if r["trapped"] is not None else "undefined"
        counts["trapped"][key] = counts["trapped"].get(key, 0) + 1
    counts["causal"] = dict(sorted(counts["causal"].items()))
    counts["trapped"] = dict(sorted(counts["trapped"].items()))
    trapped_classes = [k for k in counts["trapped"] if k != "undefined"]
    counts["trapped_overall"] = (
        "mixed" if len(trapped_classes) > 1 else (trapped_classes[0] if trapped_classes else "undefined")
    )
    max_residuals = {}
    for r in records:
        for k, v in r["residuals"].items():
            max_residuals[k] = max(max_residuals.get(k, 0.0), v)
    return {
        "counts": counts,
        "max_residuals": dict(sorted(max_residuals.items())),
        "skipped": skipped,
    }


# -- report rendering ---------------------------------------------------------


def render_json(result: ScanResult) -> str:
    doc = {"config": result.config, "records": result.records, "summary": result.summary}
    return json.dumps(doc, indent=2, allow_nan=True) + "\n"


def _csv_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def render_csv(result: ScanResult) -> str:
    names = list(result.records[0]["point"].keys()) if result.records else list(result.config["grid"].keys())
    lines = [",".join(list(names) + list(CSV_COLUMNS))]
    for r in result.records:
        cells = [_csv_cell(r["point"][n]) for n in names]
        cells += [_csv_cell(r[c]) for c in CSV_COLUMNS]
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def render_text(result: ScanResult) -> str:
    counts = result.summary["counts"]
    lines = [
        f"scan: {result.config['metric']} {result.config['metric_params']} / "
        f"{result.config['surface']} {result.config['surface_params']}",
        f"records: {counts['records']}  skipped: {counts['skipped']}",
        f"direction exists: {counts['dir_exists']}  totally umbilical: {counts['totally_umbilical']}",
        f"pseudo: {counts['pseudo']}  ortho: {counts['ortho']}  subgeodesic: {counts['subgeodesic']}",
        f"causal characters: {counts['causal']}",
        f"trapped statuses: {counts['trapped']} (overall: {counts['trapped_overall']})",
        "max residuals:",
    ]
    lines += [f"  {k}: {v:.3e}" for k, v in result.summary["max_residuals"].items()]
    return "\n".join(lines) + "\n"


def render(result: ScanResult, kind: str) -> str:
    if kind == "json":
        return render_json(result)
    if kind == "csv":
        return render_csv(result)
    return render_text(result)


# -- umbilical locus search ---------------------------------------------------


@dataclass(frozen=True)
class LocusResult:
    roots: list
    residuals: list
    degenerate: bool


def find_umbilical_locus(config: ScanConfig, free_param: str, bracket, samples: int = 64) -> LocusResult:
    """Roots of the umbilical residual along one surface-family parameter.

    For surfaces (n = 2) the signed surrogate is the off-diagonal entry of
    the shape-operator commutator in the orthonormal tangent frame, which
    changes sign transversally across a simple umbilical locus.  Brackets
    without a sign change are searched for a quadratic minimum (the extreme
    locus) and accepted when the residual dips below the umbilical threshold.
    """
    config.validate()
    lo, hi = float(bracket[0]), float(bracket[1])
    if not lo < hi:
        raise ConfigError(f"bracket must be increasing, got {bracket}")
    if samples < 8:
        raise ConfigError("need at least 8 bracket samples")

    cache = {}

    def surrogate(x: float):
        if x not in cache:
            cache[x] = _locus_surrogate(config, free_param, x)
        return cache[x]

    xs = list(np.linspace(lo, hi, samples + 1))
    vals, taus = [], []
    for x in xs:
        c, tau = surrogate(x)
        vals.append(c)
        taus.append(tau)
    tau_loc = max(taus)
    if all(abs(c) <= tau_loc for c in vals):
        return LocusResult([], [abs(c) for c in vals], degenerate=True)

    roots, residuals = [], []
    for i in range(len(xs) - 1):
        if vals[i] == 0.0:
            roots.append(float(xs[i]))
            residuals.append(0.0)
        elif vals[i] * vals[i + 1] < 0.0:
            root = _bisect(lambda x: surrogate(x)[0], xs[i], xs[i + 1])
            roots.append(float(root))
            residuals.append(abs(float(surrogate(root)[0])))
    if vals[-1] == 0.0:
        roots.append(float(xs[-1]))
        residuals.append(0.0)

    if not roots:
        root, value = _refine_minimum(lambda x: surrogate(x)[0], xs, vals)
        if abs(value) <= tau_loc:
            roots.append(float(root))
            residuals.append(abs(float(value)))
        else:
            raise NoRootError(
                f"no sign change and minimal residual {abs(value):.3e} stays above threshold {tau_loc:.3e}"
            )
    return LocusResult(*_merge_root_cluster(roots, residuals), degenerate=False)


def _merge_root_cluster(roots, residuals, width=1e-7):
    """Collapse noise-level root pairs straddling a double root."""
    order = np.argsort(roots)
    merged_r, merged_e = [], []
    for idx in order:
        if merged_r and abs(roots[idx] - merged_r[-1]) <= width:
            merged_r[-1] = 0.5 * (merged_r[-1] + roots[idx])
            merged_e[-1] = max(merged_e[-1], residuals[idx])
        else:
            merged_r.append(roots[idx])
            merged_e.append(residuals[idx])
    return merged_r, merged_e


def _locus_surrogate(config: ScanConfig, free_param: str, x: float):
    metric, _, tol = config.build()
    sparams = dict(config.surface_params)
    sparams[free_param] = float(x)
    surface = surface_by_name(config.surface, metric, sparams, tol)
    coords = tuple(config.at[p] for p in surface.param_names)
    try:
        state = extrinsic_state(surface, metric, coords, tol, config.orientation)
    except (DomainError, NotSpacelikeError) as exc:
        raise NoRootError(f"locus evaluation failed at {free_param}={x}: {exc}") from exc
    comm = state.shape_ops[0].matrix @ state.shape_ops[1].matrix - state.shape_ops[1].matrix @ state.shape_ops[0].matrix
    if state.n == 2:
        return float(comm[0, 1]), state.tau_umb
    return float(np.linalg.norm(comm)), state.tau_umb


def _bisect(f, lo, hi, xtol=1e-9, max_iter=200):
    flo = f(lo)
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if hi - lo <= xtol:
            return mid
        fm = f(mid)
        if fm == 0.0:
            return mid
        if flo * fm < 0.0:
            hi = mid
        else:
            lo, flo = mid, fm
    return 0.5 * (lo + hi)


def _refine_minimum(f, xs, vals, iterations=80):
    """Golden-section on |f| followed by a parabolic vertex fit."""
    i = int(np.argmin([abs(v) for v in vals]))
    lo = xs[max(0, i - 1)]
    hi = xs[min(len(xs) - 1, i + 1)]
    phi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - phi * (b - a)
    d = a + phi * (b - a)
    fc, fd = abs(f(c)), abs(f(d))
    for _ in range(iterations):
        if b - a < 1e-12:
            break
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - phi * (b - a)
            fc = abs(f(c))
        else:
            a, c, fc = c, d, fd
            d = a + phi * (b - a)
            fd = abs(f(d))
    x0 = 0.5 * (a + b)
    h = max(1e-7, 1e-7 * abs(x0))
    f0, fp, fm = f(x0), f(x0 + h), f(x0 - h)
    denom = fp - 2.0 * f0 + fm
    if abs(denom) > 0:
        x0 = x0 - 0.5 * h * (fp - fm) / denom
    return x0, f(x0)


# -- intrinsic curvature ------------------------------------------------------


def gaussian_curvature(immersion, metric, p, tol: Tolerances = DEFAULT_TOL) -> float:
    """Gaussian curvature of the induced 2-metric, fully by dual arithmetic.

    A first-order dual pass (whose coefficients are themselves second-order
    duals in the surface parameters) produces the pulled-back metric
    components E, F, G together with their first and second parameter
    derivatives; the Brioschi formula then gives the curvature.
    """
    if immersion.n != 2:
        raise ConfigError("gaussian curvature is implemented for surfaces (n = 2)")
    coords = tuple(float(c) for c in (p.coords if hasattr(p, "coords") else p))
    if immersion.domain is not None:
        reason = immersion.domain(coords)
        if reason:
            raise DomainError(f"{immersion.family or 'surface'} at {coords}: {reason}")
    outer = DualScalar.seed(coords)
    inner = [DualScalar(outer[i], np.eye(2)[i], np.zeros((2, 2))) for i in range(2)]
    pos = immersion.fn(inner)
    values = [c.value if isinstance(c, DualScalar) else c for c in pos]
    floats = [dual.value_of(c) for c in pos]
    adm = getattr(metric, "admissible", None)
    if adm is not None:
        reason = adm(floats)
        if reason:
            raise DomainError(f"{metric.name} at {tuple(floats)}: {reason}")
    tangents = [
        [c.grad[i] if isinstance(c, DualScalar) else 0.0 for c in pos]
        for i in range(2)
    ]
    gbar = metric.fn(values)
    dim = len(values)

    def pullback(i, j):
        acc = 0.0
        for a in range(dim):
            ta = tangents[i][a]
            if isinstance(ta, float) and ta == 0.0:
                continue
            for b in range(dim):
                tb = tangents[j][b]
                if isinstance(tb, float) and tb == 0.0:
                    continue
                acc = acc + gbar[a][b] * ta * tb
        return acc

    jets = [_as_jet(pullback(0, 0)), _as_jet(pullback(0, 1)), _as_jet(pullback(1, 1))]
    (E, dE, hE), (F, dF, hF), (G, dG, hG) = jets
    den = E * G - F * F
    if den <= tol.pd:
        raise NotSpacelikeError("induced metric is degenerate; Brioschi formula undefined")
    m1 = np.array(
        [
            [-0.5 * hE[1, 1] + hF[0, 1] - 0.5 * hG[0, 0], 0.5 * dE[0], dF[0] - 0.5 * dE[1]],
            [dF[1] - 0.5 * dG[0], E, F],
            [0.5 * dG[1], F, G],
        ]
    )
    m2 = np.array(
        [
            [0.0, 0.5 * dE[1], 0.5 * dG[0]],
            [0.5 * dE[1], E, F],
            [0.5 * dG[0], F, G],
        ]
    )
    return float((np.linalg.det(m1) - np.linalg.det(m2)) / (den * den))


def _as_jet(x):
    if isinstance(x, DualScalar):
        return float(x.value), np.asarray(x.grad, dtype=float), np.asarray(x.hess, dtype=float)
    return float(x), np.zeros(2), np.zeros((2, 2))


def gaussian_curvature_2d(config: ScanConfig, p) -> float:
    """Config-level wrapper used by the CLI curvature subcommand."""
    metric, surface, tol = config.build()
    return gaussian_curvature(surface, metric, p, tol)
