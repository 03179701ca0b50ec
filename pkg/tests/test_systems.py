import math

import numpy as np
import pytest

from cycsig import systems
from cycsig.systems import (
    IntegrationError,
    LiftError,
    SystemSpec,
    TimeSeries,
    dadras_rescale,
    dadras_vf,
    doublewell_drift,
    generate_lifted,
    integrate_ode,
    integrate_sde,
    lift,
    lorenz_vf,
    system_preset,
)


def test_lorenz_vf_values():
    assert np.allclose(lorenz_vf((0, 0, 0)), (0, 0, 0))
    assert np.allclose(lorenz_vf((1, 1, 1)), (0, 26, -5 / 3))
    assert np.allclose(lorenz_vf((0, 10, 0)), (100, -10, 0))


def test_doublewell_drift_values():
    # hand substitution: H(0,0)=0, h(0)=0, H_x=-1/10, H_y=0
    assert np.allclose(doublewell_drift((0, 0)), (0, 0.1))
    # H(0,1)=1/2, h(1/2)=-3/16, H_x=-1/10, H_y=1
    f = doublewell_drift((0, 1))
    assert np.allclose(f, (1 + 0.02 * (3 / 16) * (1 / 10), 0.1 - 0.02 * (3 / 16)))
    assert np.allclose(f, (1.000375, 0.09625))


def test_doublewell_energy_drifts_toward_homoclinic_level():
    # the transverse term pushes H toward 0 from either side (|H| < 1)
    def H(x, y):
        return y * y / 2 + x**4 / 8 - x * x / 2 - x**3 / 15 - x / 10

    def grad(x, y):
        return np.array([x**3 / 2 - x - x * x / 5 - 0.1, y])

    rng = np.random.default_rng(1)
    for _ in range(200):
        x, y = rng.uniform(-1.5, 2.2), rng.uniform(-1.2, 1.2)
        h_val = H(x, y)
        if not 0.02 < abs(h_val) < 0.95:
            continue
        dh = grad(x, y) @ doublewell_drift((x, y))
        assert np.sign(dh) == -np.sign(h_val) or abs(dh) < 1e-12


def test_doublewell_first_component_zero_at_critical_points():
    # H_y = 0 on the x-axis; where H_x also vanishes the first component is 0
    from scipy.optimize import brentq

    h_x = lambda x: x**3 / 2 - x - x**2 / 5 - 0.1
    for bracket in [(-2, -0.5), (-0.5, 0.5), (0.5, 2)]:
        root = brentq(h_x, *bracket)
        assert abs(doublewell_drift((root, 0.0))[0]) < 1e-12


def test_dadras_vf_values():
    assert np.allclose(dadras_vf((0, 0, 0, 0)), (0, 0, 0, 0))
    assert np.allclose(dadras_vf((1, 0, 0, 0)), (8, 0, 0, 0))
    assert np.allclose(dadras_vf((1, 1, 1, 1)), (8, -39, -12.9, -1))


def test_dadras_rescale():
    assert np.allclose(dadras_rescale(np.array([4.0, 0, 0, 0])), (2, 0, 0, 0))
    u = np.array([0.5, 0.5, 0.5, 0.5])
    assert np.allclose(dadras_rescale(u), u)
    assert np.allclose(dadras_rescale(np.zeros(4)), np.zeros(4))
    # direction preserved: output is a nonnegative multiple of input
    rng = np.random.default_rng(0)
    for _ in range(50):
        x = rng.normal(size=4)
        y = dadras_rescale(x)
        ratio = np.linalg.norm(y) / np.linalg.norm(x)
        assert np.allclose(y, ratio * x)


def test_rk_coefficients_consistency():
    # row sums match the nodes and the quadrature conditions hold to order 5
    for i in range(1, 7):
        assert math.isclose(sum(systems._RK_A[i]), systems._RK_C[i], rel_tol=1e-12, abs_tol=1e-12)
    b, c = systems._RK_B, systems._RK_C
    for p in range(1, 6):
        assert math.isclose(float(np.sum(b * c ** (p - 1))), 1.0 / p, abs_tol=1e-12)
    assert abs(float(np.sum(systems._RK_BTILDE))) < 1e-14


def _decay_spec():
    return SystemSpec("decay", (), 0.0, (1.0, 0.0), 10.0)


def test_rk_fixed_step_order():
    # fifth-order propagator: halving h cuts the error by about 2^5
    field = lambda s: -np.asarray(s)
    errs = []
    for n in (20, 40):
        h = 1.0 / n
        y = np.array([1.0])
        k1 = field(y)
        for _ in range(n):
            y, _, k1 = systems._rk_step(field, 0.0, y, k1, h)
        errs.append(abs(y[0] - math.exp(-1.0)))
    assert errs[0] / errs[1] >= 20


def test_rk_order_on_linear_decay():
    # integrator-state error vs exp(-1) at t=1 drops by far more than 16x
    # across two 10x tolerance tightenings, and monotonically per decade
    field = lambda s: -np.asarray(s)
    errs = []
    for rtol in (1e-4, 1e-5, 1e-6):
        x1 = systems.integrate_to_time(field, (1.0,), 1.0, rtol=rtol, atol=1e-14)
        errs.append(abs(float(x1[0]) - math.exp(-1.0)))
    assert errs[0] > errs[1] > errs[2]
    assert errs[0] / max(errs[2], 1e-18) >= 16


def test_integrate_ode_single_point_and_zero_field():
    spec = _decay_spec()
    series = integrate_ode(spec, 1, field=lambda s: np.zeros(2))
    assert len(series) == 1 and np.allclose(series.samples[0], spec.x0)
    const = integrate_ode(spec, 50, field=lambda s: np.zeros(2))
    assert np.allclose(const.samples, np.array(spec.x0))


def test_integrate_ode_gap_bound_lorenz():
    spec = system_preset("lorenz")
    series = integrate_ode(spec, 3000)
    gaps = np.linalg.norm(np.diff(series.samples, axis=0), axis=1)
    assert gaps.max() <= spec.h_max * (1 + 1e-9)
    assert np.all(np.diff(series.times) > 0)


def test_integrate_ode_determinism():
    spec = system_preset("lorenz")
    a = integrate_ode(spec, 500)
    b = integrate_ode(spec, 500)
    assert np.array_equal(a.samples, b.samples) and np.array_equal(a.times, b.times)


def test_integrate_ode_divergence_reports_index():
    # x' = x^2 + 1 blows up in finite time; huge h_max so emission cannot keep pace
    spec = SystemSpec("blowup", (), 0.0, (1.0, 0.0), 1e9)
    with pytest.raises(IntegrationError) as err:
        integrate_ode(spec, 10_000, field=lambda s: np.asarray(s) ** 2 + 1.0)
    assert err.value.index >= 1


def test_sde_determinism_and_shape():
    spec = system_preset("doublewell")
    a = integrate_sde(spec, 0.01, 1000, seed=123)
    b = integrate_sde(spec, 0.01, 1000, seed=123)
    c = integrate_sde(spec, 0.01, 1000, seed=124)
    assert np.array_equal(a.samples, b.samples)
    assert not np.array_equal(a.samples, c.samples)
    assert a.samples.shape == (1001, 2)


def test_sde_zero_drift_wiener_scaling():
    # zero drift, sigma=1: increment variance over 1e5 steps matches dt within 5%
    spec = SystemSpec("noise", (), 1.0, (0.0, 0.0), 1.0)
    dt = 0.004
    series = integrate_sde(spec, dt, 100_000, seed=7, drift=lambda s: np.zeros(2))
    incs = np.diff(series.samples, axis=0)
    var = incs.var()
    assert abs(var - dt) / dt < 0.05


def test_sde_matches_deterministic_drift_when_noise_tiny():
    # with vanishing noise the scheme follows the drift ODE to scheme order
    drift = lambda s: np.array([-s[0], -s[1]])
    spec = SystemSpec("decay", (), 1e-300, (1.0, 1.0), 1.0)
    series = integrate_sde(spec, 0.01, 100, seed=0, drift=drift)
    exact = math.exp(-1.0)
    assert abs(series.samples[-1, 0] - exact) < 1e-4
    eulered = integrate_sde(spec, 0.001, 1000, seed=0, drift=drift, scheme="euler")
    assert abs(eulered.samples[-1, 0] - exact) < 1e-2


def test_lift_finite_difference():
    spec = SystemSpec("toy", (), 0.0, (0.0, 0.0), 1.0, tangent_mode="finite-difference")
    series = TimeSeries(np.array([[0.0, 0.0], [1.0, 0.0]]), np.array([0.0, 1.0]), spec)
    lifted = lift(series)
    assert np.allclose(lifted.tangents, [[1, 0], [1, 0]])


def test_lift_vector_field_lorenz_point():
    spec = system_preset("lorenz")
    series = TimeSeries(np.array([[1.0, 1.0, 1.0]]), np.array([0.0]), spec)
    lifted = lift(series, mode="vector-field")
    v = np.array([0, 26, -5 / 3])
    assert np.allclose(lifted.tangents[0], v / np.linalg.norm(v))


def test_lift_repeated_point_errors_at_index():
    spec = SystemSpec("toy", (), 0.0, (0.0, 0.0), 1.0, tangent_mode="finite-difference")
    series = TimeSeries(np.array([[0.0, 0.0], [0.0, 0.0]]), np.array([0.0, 1.0]), spec)
    with pytest.raises(LiftError) as err:
        lift(series)
    assert err.value.index == 0


def test_lifted_series_unit_norm_invariant():
    lifted = generate_lifted(system_preset("lorenz"), 2000, transient=100)
    norms = np.linalg.norm(lifted.tangents, axis=1)
    assert np.all(np.abs(norms - 1) <= 1e-12)


def test_generate_lifted_dadras_rescales_points_but_not_tangents():
    spec = system_preset("dadras")
    plain = generate_lifted(spec, 300, transient=50)
    # tangents are unit vectors of the original field at the original points
    assert np.all(np.abs(np.linalg.norm(plain.tangents, axis=1) - 1) <= 1e-12)
    # points have been contracted: |y| = sqrt(|x|) for the corresponding raw x
    raw = integrate_ode(spec, 350, emit_transform=systems.dadras_rescale)
    x = raw.samples[50:]
    assert np.allclose(np.linalg.norm(plain.points, axis=1) ** 2, np.linalg.norm(x, axis=1), rtol=1e-10)
    # the gap bound holds on the rescaled series
    gaps = np.linalg.norm(np.diff(plain.points, axis=0), axis=1)
    assert gaps.max() <= spec.h_max * (1 + 1e-9)


def test_jacobian_tangent_flag_changes_tangents():
    spec = system_preset("dadras")
    a = generate_lifted(spec, 200, transient=20)
    b = generate_lifted(spec, 200, transient=20, jacobian_tangents=True)
    assert np.allclose(a.points, b.points)
    assert not np.allclose(a.tangents, b.tangents)


def test_trajectory_roundtrip(tmp_path):
    lifted = generate_lifted(system_preset("lorenz"), 500, transient=10)
    path = tmp_path / "traj.npy"
    systems.save_trajectory(path, lifted)
    again = systems.load_trajectory(path)
    assert np.array_equal(again.points, lifted.points)
    assert np.array_equal(again.tangents, lifted.tangents)
    assert again.spec == lifted.spec
