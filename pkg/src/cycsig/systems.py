"""Reference dynamical systems, trajectory generation, and tangent lifting.

Trajectories are emitted so that consecutive samples are at most ``h_max``
apart in Euclidean distance, then lifted to the unit tangent bundle either
through the generating vector field or through normalized forward
differences.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

__all__ = [
    "SystemSpec",
    "TimeSeries",
    "LiftedSeries",
    "IntegrationError",
    "LiftError",
    "lorenz_vf",
    "doublewell_drift",
    "dadras_vf",
    "dadras_rescale",
    "dadras_rescale_jacobian",
    "integrate_ode",
    "integrate_sde",
    "lift",
    "generate_lifted",
    "system_preset",
    "vector_field_for",
    "save_trajectory",
    "load_trajectory",
]

VectorField = Callable[[np.ndarray], np.ndarray]


class IntegrationError(RuntimeError):
    """Raised when a trajectory leaves the finite range; carries the failure index."""

    def __init__(self, message: str, index: int):
        super().__init__(f"{message} (sample index {index})")
        self.index = index


class LiftError(ValueError):
    """Raised when a tangent vector cannot be normalized; carries the sample index."""

    def __init__(self, message: str, index: int):
        super().__init__(f"{message} (sample index {index})")
        self.index = index


@dataclass(frozen=True)
class SystemSpec:
    """Description of one system: field parameters, noise, and emission control."""

    name: str
    params: tuple[float, ...]
    sigma_noise: float
    x0: tuple[float, ...]
    h_max: float
    tangent_mode: str = "vector-field"
    post_transform: str = "none"

    def __post_init__(self) -> None:
        if len(self.x0) not in (2, 3, 4):
            raise ValueError("state dimension must be 2, 3 or 4")
        if self.h_max <= 0:
            raise ValueError("h_max must be positive")
        if self.sigma_noise < 0:
            raise ValueError("noise amplitude must be nonnegative")
        if self.tangent_mode not in ("vector-field", "finite-difference"):
            raise ValueError(f"unknown tangent mode {self.tangent_mode!r}")
        if self.post_transform not in ("none", "dadras-rescale"):
            raise ValueError(f"unknown post transform {self.post_transform!r}")

    @property
    def dim(self) -> int:
        return len(self.x0)

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "params": list(self.params),
            "sigma_noise": self.sigma_noise,
            "x0": list(self.x0),
            "h_max": self.h_max,
            "tangent_mode": self.tangent_mode,
            "post_transform": self.post_transform,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "SystemSpec":
        return cls(
            name=obj["name"],
            params=tuple(obj["params"]),
            sigma_noise=obj["sigma_noise"],
            x0=tuple(obj["x0"]),
            h_max=obj["h_max"],
            tangent_mode=obj["tangent_mode"],
            post_transform=obj["post_transform"],
        )


@dataclass(frozen=True)
class TimeSeries:
    """Sampled trajectory; arrays are read-only after construction."""

    samples: np.ndarray
    times: np.ndarray
    spec: SystemSpec
    seed: int | None = None

    def __post_init__(self) -> None:
        samples = np.ascontiguousarray(self.samples, dtype=np.float64)
        times = np.ascontiguousarray(self.times, dtype=np.float64)
        if samples.ndim != 2 or len(times) != len(samples):
            raise ValueError("samples must be (N, d) with one time per sample")
        if len(times) > 1 and not np.all(np.diff(times) > 0):
            raise ValueError("times must be strictly increasing")
        samples.flags.writeable = False
        times.flags.writeable = False
        object.__setattr__(self, "samples", samples)
        object.__setattr__(self, "times", times)

    def __len__(self) -> int:
        return len(self.samples)


@dataclass(frozen=True)
class LiftedSeries:
    """Unit tangent bundle samples: base points paired with unit tangents."""

    points: np.ndarray
    tangents: np.ndarray
    spec: SystemSpec | None = None
    seed: int | None = None

    def __post_init__(self) -> None:
        points = np.ascontiguousarray(self.points, dtype=np.float64)
        tangents = np.ascontiguousarray(self.tangents, dtype=np.float64)
        if points.shape != tangents.shape or points.ndim != 2:
            raise ValueError("points and tangents must both be (N, d)")
        norms = np.linalg.norm(tangents, axis=1)
        if len(tangents) and not np.all(np.abs(norms - 1.0) <= 1e-12):
            raise ValueError("tangents must have unit norm within 1e-12")
        points.flags.writeable = False
        tangents.flags.writeable = False
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "tangents", tangents)

    def __len__(self) -> int:
        return len(self.points)

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def utb(self) -> np.ndarray:
        """Concatenated (N, 2d) array of points and tangents."""
        return np.hstack([self.points, self.tangents])


# --- vector fields -------------------------------------------------------

def lorenz_vf(state: Sequence[float], sigma: float = 10.0, rho: float = 28.0, beta: float = 8.0 / 3.0) -> np.ndarray:
    x, y, z = state
    return np.array([sigma * (y - x), x * (rho - z) - y, x * y - beta * z])


def doublewell_drift(state: Sequence[float]) -> np.ndarray:
    # Hamiltonian rotation plus a weak transverse term that makes the
    # near-homoclinic energy level attracting, so both wells stay visited.
    x, y = state
    h_level = y * y / 2.0 + x**4 / 8.0 - x * x / 2.0 - x**3 / 15.0 - x / 10.0
    h_x = x**3 / 2.0 - x - x * x / 5.0 - 0.1
    h_y = y
    damp = 0.02 * (h_level**3 - h_level) / 2.0
    return np.array([h_y + damp * h_x, -h_x + damp * h_y])


def dadras_vf(state: Sequence[float], a: float = 8.0, b: float = 40.0, c: float = 14.9) -> np.ndarray:
    x, y, z, w = state
    return np.array([a * x - y * z + w, x * z - b * y, x * y - c * z + x * w, -y])


def dadras_rescale(x: np.ndarray) -> np.ndarray:
    """Radial contraction x -> x / sqrt(|x|), extended by 0 at the origin."""
    x = np.asarray(x, dtype=np.float64)
    norm = np.linalg.norm(x, axis=-1, keepdims=x.ndim > 1)
    if x.ndim == 1:
        return x / math.sqrt(norm) if norm > 0 else np.zeros_like(x)
    out = np.zeros_like(x)
    nz = norm[:, 0] > 0
    out[nz] = x[nz] / np.sqrt(norm[nz])
    return out


def dadras_rescale_jacobian(x: np.ndarray) -> np.ndarray:
    """Jacobian of the radial contraction at x (x must be nonzero)."""
    x = np.asarray(x, dtype=np.float64)
    norm = np.linalg.norm(x)
    if norm == 0:
        raise ValueError("Jacobian undefined at the origin")
    eye = np.eye(len(x))
    return eye / math.sqrt(norm) - 0.5 * np.outer(x, x) / norm**2.5


def vector_field_for(spec: SystemSpec) -> VectorField:
    """The drift/vector field named by the spec, with its parameters bound."""
    if spec.name == "lorenz":
        sigma, rho, beta = spec.params
        return lambda s: lorenz_vf(s, sigma, rho, beta)
    if spec.name == "doublewell":
        return doublewell_drift
    if spec.name == "dadras":
        a, b, c = spec.params
        return lambda s: dadras_vf(s, a, b, c)
    raise ValueError(f"no built-in vector field for system {spec.name!r}")


def system_preset(name: str) -> SystemSpec:
    """Reference configuration for the three study systems."""
    if name == "lorenz":
        return SystemSpec("lorenz", (10.0, 28.0, 8.0 / 3.0), 0.0, (0.0, 10.0, 0.0), 1.0, "vector-field", "none")
    if name == "doublewell":
        return SystemSpec("doublewell", (), 0.015, (1.0, 0.75), 0.2, "finite-difference", "none")
    if name == "dadras":
        return SystemSpec("dadras", (8.0, 40.0, 14.9), 0.0, (10.0, 1.0, 10.0, 1.0), 0.8, "vector-field", "dadras-rescale")
    raise ValueError(f"unknown system preset {name!r}")


# --- explicit embedded Runge-Kutta 5(4) pair (Tsitouras coefficients) -----

_RK_C = np.array([0.0, 0.161, 0.327, 0.9, 0.9800255409045097, 1.0, 1.0])
_RK_A = (
    (),
    (0.161,),
    (-0.008480655492356989, 0.335480655492357),
    (2.8971530571054935, -6.359448489975075, 4.3622954328695815),
    (5.325864828439257, -11.748883564062828, 7.4955393428898365, -0.09249506636175525),
    (5.86145544294642, -12.92096931784711, 8.159367898576159, -0.071584973281401, -0.028269050394068383),
    (0.09646076681806523, 0.01, 0.4798896504144996, 1.379008574103742, -3.290069515436081, 2.324710524099774),
)
_RK_B = np.array([0.09646076681806523, 0.01, 0.4798896504144996, 1.379008574103742, -3.290069515436081, 2.324710524099774, 0.0])
# b - b_hat: weights of the embedded fourth-order error estimate
_RK_BTILDE = np.array(
    [
        -0.00178001105222577714,
        -0.0008164344596567469,
        0.007880878010261995,
        -0.1447110071732629,
        0.5823571654525552,
        -0.45808210592918697,
        0.015151515151515152,
    ]
)


def _rk_step(f: VectorField, t: float, y: np.ndarray, k1: np.ndarray, h: float):
    """One 5(4) step; returns (y_new, error_estimate, k_last) with FSAL k_last = f(t+h, y_new)."""
    k = [k1]
    for i in range(1, 7):
        yi = y + h * sum(a * ki for a, ki in zip(_RK_A[i], k))
        k.append(np.asarray(f(yi), dtype=np.float64))
    y_new = y + h * sum(b * ki for b, ki in zip(_RK_B[:6], k[:6]))
    # stage 7 is evaluated at y_new (first-same-as-last)
    err = h * sum(bt * ki for bt, ki in zip(_RK_BTILDE, k))
    return y_new, err, k[6]


def integrate_ode(
    spec: SystemSpec,
    n_points: int,
    *,
    field: VectorField | None = None,
    rtol: float = 1e-6,
    atol: float = 1e-9,
    t0: float = 0.0,
    max_steps: int = 50_000_000,
    emit_transform: Callable[[np.ndarray], np.ndarray] | None = None,
) -> TimeSeries:
    """Integrate the spec's ODE, emitting samples with gaps at most h_max apart.

    Samples are emitted where the distance from the last emitted sample
    crosses h_max, linearly interpolated inside the accepted step, so the
    series is near-uniform in arc length. With emit_transform the distance is
    measured on transformed points (the space the downstream analysis works
    in) while raw states are stored. If many steps pass with no crossing
    (near an equilibrium) the step endpoint is emitted as a fallback. Raises
    IntegrationError if the state becomes non-finite.
    """
    if spec.sigma_noise != 0:
        raise ValueError("integrate_ode requires a noise-free spec")
    if n_points < 1:
        raise ValueError("n_points must be at least 1")
    f = field if field is not None else vector_field_for(spec)
    h_max = spec.h_max
    gap_of = (lambda pts: pts) if emit_transform is None else emit_transform

    y = np.array(spec.x0, dtype=np.float64)
    t = float(t0)
    k1 = np.asarray(f(y), dtype=np.float64)
    if not np.all(np.isfinite(k1)):
        raise IntegrationError("vector field non-finite at the initial state", 0)

    out = np.empty((n_points, spec.dim))
    times = np.empty(n_points)
    out[0] = y
    times[0] = t
    count = 1
    g_last = gap_of(y[None, :])[0]

    speed = float(np.linalg.norm(k1))
    h = min(1e-3, 0.5 * h_max / speed) if speed > 0 else 1e-3
    min_h = 1e-14
    stall = 0
    stall_limit = 100

    steps = 0
    while count < n_points:
        steps += 1
        if steps > max_steps:
            raise IntegrationError("step budget exhausted before n_points were emitted", count)
        speed = float(np.linalg.norm(k1))
        if speed > 0:
            h = min(h, h_max / speed)
        y_new, err, k_last = _rk_step(f, t, y, k1, h)
        finite = bool(np.all(np.isfinite(y_new)) and np.all(np.isfinite(err)))
        if finite:
            scale = atol + rtol * np.maximum(np.abs(y), np.abs(y_new))
            err_norm = float(np.sqrt(np.mean((err / scale) ** 2)))
        else:
            err_norm = np.inf
        if h <= min_h and not finite:
            raise IntegrationError("state diverged to non-finite values", count)
        if err_norm <= 1.0 or h <= min_h:
            if t + h == t:
                raise IntegrationError("time step underflow; the state is diverging", count)
            step_vec = y_new - y
            theta_lo = 0.0
            emitted = False
            while count < n_points:
                g_end = gap_of(y_new[None, :])[0]
                if float(np.linalg.norm(g_end - g_last)) < h_max:
                    break
                if emit_transform is None:
                    # exact crossing of the sphere |y + theta*step - g_last| = h_max
                    rel = y - g_last
                    a = float(step_vec @ step_vec)
                    b = 2.0 * float(rel @ step_vec)
                    c = float(rel @ rel) - h_max * h_max
                    theta = (-b + math.sqrt(max(b * b - 4 * a * c, 0.0))) / (2 * a)
                    theta = min(max(theta, theta_lo), 1.0)
                else:
                    lo, hi = theta_lo, 1.0
                    for _ in range(50):
                        mid = 0.5 * (lo + hi)
                        g_mid = gap_of((y + mid * step_vec)[None, :])[0]
                        if float(np.linalg.norm(g_mid - g_last)) >= h_max:
                            hi = mid
                        else:
                            lo = mid
                    theta = hi
                theta_lo = theta
                raw_pt = y + theta * step_vec
                g_last = gap_of(raw_pt[None, :])[0]
                out[count] = raw_pt
                times[count] = t + theta * h
                count += 1
                emitted = True
            if emitted:
                stall = 0
            else:
                stall += 1
                if stall >= stall_limit and count < n_points:
                    out[count] = y_new
                    times[count] = t + h
                    count += 1
                    g_last = gap_of(y_new[None, :])[0]
                    stall = 0
            t += h
            y = y_new
            k1 = k_last
        factor = 0.9 * err_norm ** -0.2 if err_norm > 0 else 5.0
        h = min(1e6, max(min_h, h * min(5.0, max(0.2, factor))))

    return TimeSeries(out, times, spec)


# --- SDE with additive diagonal noise -------------------------------------

def integrate_to_time(
    field: VectorField,
    x0: Sequence[float],
    t_end: float,
    *,
    rtol: float = 1e-6,
    atol: float = 1e-9,
) -> np.ndarray:
    """Adaptive 5(4) integration to an exact end time; returns the final state.

    Used where integrator states are needed without emission interpolation
    (accuracy checks, cross-validation against other schemes).
    """
    y = np.array(x0, dtype=np.float64)
    t = 0.0
    k1 = np.asarray(field(y), dtype=np.float64)
    h = min(1e-3, t_end)
    min_h = 1e-14
    while t < t_end:
        h = min(h, t_end - t)
        y_new, err, k_last = _rk_step(field, t, y, k1, h)
        finite = bool(np.all(np.isfinite(y_new)) and np.all(np.isfinite(err)))
        if finite:
            scale = atol + rtol * np.maximum(np.abs(y), np.abs(y_new))
            err_norm = float(np.sqrt(np.mean((err / scale) ** 2)))
        else:
            err_norm = np.inf
        if h <= min_h and not finite:
            raise IntegrationError("state diverged to non-finite values", 0)
        if err_norm <= 1.0 or h <= min_h:
            t += h
            y = y_new
            k1 = k_last
        factor = 0.9 * err_norm ** -0.2 if err_norm > 0 else 5.0
        h = min(1e6, max(min_h, h * min(5.0, max(0.2, factor))))
    return y


def integrate_sde(
    spec: SystemSpec,
    dt: float,
    n_steps: int,
    seed: int,
    *,
    drift: VectorField | None = None,
    scheme: str = "sra1",
) -> TimeSeries:
    """Integrate dx = f(x) dt + sigma dW with diagonal additive noise.

    Default scheme is a two-stage strong order 1.5 method for additive noise;
    scheme="euler" selects Euler-Maruyama. Deterministic for a fixed seed.
    """
    if spec.sigma_noise <= 0:
        raise ValueError("integrate_sde requires positive noise amplitude")
    if dt <= 0:
        raise ValueError("dt must be positive")
    if scheme not in ("sra1", "euler"):
        raise ValueError(f"unknown SDE scheme {scheme!r}")
    f = drift if drift is not None else vector_field_for(spec)
    sigma = spec.sigma_noise
    d = spec.dim

    rng = np.random.default_rng(seed)
    y = np.array(spec.x0, dtype=np.float64)
    out = np.empty((n_steps + 1, d))
    out[0] = y
    sqrt_dt = math.sqrt(dt)

    if scheme == "euler":
        noise = rng.standard_normal((n_steps, d))
        for i in range(n_steps):
            y = y + dt * np.asarray(f(y)) + sigma * sqrt_dt * noise[i]
            if not np.all(np.isfinite(y)):
                raise IntegrationError("state diverged to non-finite values", i + 1)
            out[i + 1] = y
    else:
        xi = rng.standard_normal((n_steps, 2, d))
        inv_sqrt3 = 1.0 / math.sqrt(3.0)
        for i in range(n_steps):
            dw = sqrt_dt * xi[i, 0]
            dz = 0.5 * dt * sqrt_dt * (xi[i, 0] + inv_sqrt3 * xi[i, 1])
            k1 = np.asarray(f(y))
            stage = y + 0.75 * dt * k1 + 1.5 * sigma * dz / dt
            k2 = np.asarray(f(stage))
            y = y + dt * (k1 / 3.0 + 2.0 * k2 / 3.0) + sigma * dw
            if not np.all(np.isfinite(y)):
                raise IntegrationError("state diverged to non-finite values", i + 1)
            out[i + 1] = y

    times = dt * np.arange(n_steps + 1)
    return TimeSeries(out, times, spec, seed=seed)


# --- lifting to the unit tangent bundle -----------------------------------

def lift(series: TimeSeries, mode: str | None = None, field: VectorField | None = None) -> LiftedSeries:
    """Attach unit tangents to a time series.

    mode "vector-field" normalizes field(x_i); "finite-difference" normalizes
    x_{i+1} - x_i, the last sample reusing the previous tangent.
    """
    mode = mode if mode is not None else series.spec.tangent_mode
    x = series.samples
    if mode == "vector-field":
        if field is None:
            field = vector_field_for(series.spec)
        tangents = np.empty_like(x)
        for i, xi in enumerate(x):
            v = np.asarray(field(xi), dtype=np.float64)
            norm = float(np.linalg.norm(v))
            if norm == 0 or not math.isfinite(norm):
                raise LiftError("vector field vanishes or is non-finite", i)
            tangents[i] = v / norm
    elif mode == "finite-difference":
        if len(x) < 2:
            raise LiftError("finite differences need at least two samples", 0)
        diffs = np.diff(x, axis=0)
        norms = np.linalg.norm(diffs, axis=1)
        bad = np.nonzero(norms == 0)[0]
        if len(bad):
            raise LiftError("repeated sample gives a zero forward difference", int(bad[0]))
        tangents = np.empty_like(x)
        tangents[:-1] = diffs / norms[:, None]
        tangents[-1] = tangents[-2]
    else:
        raise ValueError(f"unknown tangent mode {mode!r}")
    return LiftedSeries(x, tangents, spec=series.spec, seed=series.seed)


def generate_lifted(
    spec: SystemSpec,
    n_points: int,
    seed: int = 0,
    *,
    transient: int = 1000,
    sde_dt: float = 0.01,
    sde_thin: int = 10,
    rtol: float = 1e-6,
    atol: float = 1e-9,
    jacobian_tangents: bool = False,
) -> LiftedSeries:
    """Full generation recipe: integrate, drop the transient, thin, lift, post-transform."""
    if spec.sigma_noise > 0:
        n_steps = (n_points + transient) * sde_thin
        series = integrate_sde(spec, sde_dt, n_steps, seed)
        samples = series.samples[:: sde_thin][transient : transient + n_points]
        times = series.times[:: sde_thin][transient : transient + n_points]
        series = TimeSeries(samples, times, spec, seed=seed)
    else:
        emit_transform = dadras_rescale if spec.post_transform == "dadras-rescale" else None
        series = integrate_ode(spec, n_points + transient, rtol=rtol, atol=atol, emit_transform=emit_transform)
        series = TimeSeries(series.samples[transient:], series.times[transient:], spec, seed=seed)

    lifted = lift(series)

    if spec.post_transform == "dadras-rescale":
        points = dadras_rescale(series.samples)
        if jacobian_tangents:
            tangents = np.empty_like(lifted.tangents)
            for i in range(len(series)):
                v = dadras_rescale_jacobian(series.samples[i]) @ lifted.tangents[i]
                norm = float(np.linalg.norm(v))
                if norm == 0:
                    raise LiftError("transported tangent vanished", i)
                tangents[i] = v / norm
        else:
            tangents = lifted.tangents
        lifted = LiftedSeries(points, tangents, spec=spec, seed=seed)
    return lifted


# --- trajectory files ------------------------------------------------------

def save_trajectory(path: str | Path, lifted: LiftedSeries, extra_meta: dict | None = None) -> None:
    """Write samples+tangents as .npy with a sidecar .meta.json record."""
    path = Path(path)
    np.save(path, lifted.utb())
    meta = {
        "columns": "state then tangent coordinates",
        "dim": lifted.dim,
        "n_points": len(lifted),
        "seed": lifted.seed,
        "spec": lifted.spec.to_json() if lifted.spec is not None else None,
    }
    if extra_meta:
        meta.update(extra_meta)
    sidecar = path.with_suffix(".meta.json") if path.suffix == ".npy" else Path(str(path) + ".meta.json")
    sidecar.write_text(json.dumps(meta, indent=2, sort_keys=True))


def load_trajectory(path: str | Path) -> LiftedSeries:
    path = Path(path)
    data = np.load(path)
    if data.ndim != 2 or data.shape[1] % 2:
        raise ValueError("trajectory file must be (N, 2d) with tangent columns")
    d = data.shape[1] // 2
    sidecar = path.with_suffix(".meta.json") if path.suffix == ".npy" else Path(str(path) + ".meta.json")
    spec = None
    seed = None
    if sidecar.exists():
        meta = json.loads(sidecar.read_text())
        seed = meta.get("seed")
        if meta.get("spec"):
            spec = SystemSpec.from_json(meta["spec"])
    return LiftedSeries(data[:, :d], data[:, d:], spec=spec, seed=seed)
