import math

import numpy as np
import pytest

import nlstrap as nt
from nlstrap.errors import ConfigurationError
from nlstrap.kernels import apply_nonlinear_phase, apply_nonlinear_phase_numpy

PI = math.pi

LINEAR = nt.Parameters(4.0, 6.0, 0.0, nu=0.0)
RUN46 = nt.Parameters(4.0, 6.0, 10.0)


@pytest.fixture(scope="module")
def box128():
    return nt.make_cartesian_grid(128, 10.0)


@pytest.fixture(scope="module")
def box256():
    return nt.make_cartesian_grid(256, 10.0)


@pytest.fixture(scope="module")
def gaussian2d(box256):
    grid = nt.make_radial_grid(512, 12.0)
    return nt.radial_to_cartesian(nt.gaussian_profile(grid), box256)


def l2_norm_2d(psi):
    return math.sqrt(psi.grid.spacing**2 * np.sum(np.abs(psi.values) ** 2))


class TestKernels:
    def test_backends_agree(self):
        rng = np.random.default_rng(0)
        a = (rng.normal(size=(32, 32)) + 1j * rng.normal(size=(32, 32))).astype(
            np.complex128
        )
        b = a.copy()
        vhalf = np.exp(-0.1j * rng.uniform(size=(32, 32))).astype(np.complex128)
        apply_nonlinear_phase(a, vhalf, 5e-4, 10.0, 1.0, 1.0, 2.0)
        apply_nonlinear_phase_numpy(b, vhalf, 5e-4, 10.0, 1.0, 1.0, 2.0)
        assert np.max(np.abs(a - b)) < 5e-15

    def test_env_forces_numpy(self, monkeypatch):
        from nlstrap import kernels

        monkeypatch.setenv("NLSTRAP_PURE_PYTHON", "1")
        assert kernels.backend() == "numpy"

    def test_fractional_exponents(self):
        rng = np.random.default_rng(1)
        a = (rng.normal(size=(16, 16)) + 1j * rng.normal(size=(16, 16))).astype(
            np.complex128
        )
        b = a.copy()
        vhalf = np.ones((16, 16), dtype=np.complex128)
        apply_nonlinear_phase(a, vhalf, 1e-3, 2.0, 1.0, 0.65, 1.8)
        apply_nonlinear_phase_numpy(b, vhalf, 1e-3, 2.0, 1.0, 0.65, 1.8)
        assert np.max(np.abs(a - b)) < 5e-15


class TestStrangStep:
    def test_linear_mode_rotation(self, gaussian2d):
        # ground mode rotates as exp(-2it); L2 error <= 1e-5 at t=1, dt=1e-3
        psi = gaussian2d
        for _ in range(1000):
            psi = nt.strang_step(psi, 1e-3, LINEAR)
        exact = np.exp(-2j * 1.0) * gaussian2d.values
        err = math.sqrt(psi.grid.spacing**2 * np.sum(np.abs(psi.values - exact) ** 2))
        assert err <= 1e-5

    def test_unitarity_single_step(self, gaussian2d):
        psi = nt.ComplexField2D(
            gaussian2d.grid, gaussian2d.values * np.exp(0.3j * gaussian2d.values.real)
        )
        before = nt.evaluate_functionals_2d(psi, RUN46).Q
        after = nt.evaluate_functionals_2d(nt.strang_step(psi, 1e-3, RUN46), RUN46).Q
        assert abs(after - before) / before <= 1e-12

    def test_zero_field(self, box128):
        psi = nt.ComplexField2D(box128, np.zeros((128, 128), dtype=np.complex128))
        out = nt.strang_step(psi, 1e-3, RUN46)
        assert np.all(out.values == 0.0)


class TestPropagate:
    def test_mass_conservation_long_run(self, box128):
        grid = nt.make_radial_grid(512, 12.0)
        psi0 = nt.radial_to_cartesian(nt.gaussian_profile(grid), box128)
        cfg = nt.PropagatorConfig(dt=1e-3, t_final=10.0, monitor_stride=500)
        trace = nt.propagate(psi0, cfg, RUN46)
        drift = np.abs(trace.mass - trace.mass[0]).max() / trace.mass[0]
        assert drift <= 1e-10

    def test_energy_drift_second_order(self, box128):
        grid = nt.make_radial_grid(512, 12.0)
        psi0 = nt.radial_to_cartesian(nt.gaussian_profile(grid), box128)
        drifts = []
        for dt in (4e-3, 2e-3):
            cfg = nt.PropagatorConfig(dt=dt, t_final=2.0, monitor_stride=10)
            trace = nt.propagate(psi0, cfg, RUN46)
            drifts.append(np.abs(trace.energy - trace.energy[0]).max())
        ratio = drifts[0] / drifts[1]
        assert 3.2 <= ratio <= 4.8

    def test_conserved_frequency_trace(self, ground_state_4_6_10):
        # the frequency is the conserved quotient (S_ref - H)/Q; along the
        # standing wave the trace stays at lambda_hat to combined drift level
        lam = ground_state_4_6_10.value
        cfg = nt.PropagatorConfig(dt=5e-4, t_final=1.0, monitor_stride=100)
        trace = nt.stability_experiment(
            ground_state_4_6_10.profile, lam, 0.0, cfg, RUN46
        )
        assert trace.lambda_conserved[0] == pytest.approx(lam, rel=1e-12)
        drift = np.abs(trace.lambda_conserved - lam).max() / lam
        assert drift <= 1e-6

    def test_sigma_norm_bounded(self, box128):
        # moderate-amplitude breathing data: bounded oscillation, no trend
        grid = nt.make_radial_grid(512, 12.0)
        bump = nt.RadialField(
            grid, 0.5 * np.exp(-grid.nodes**2 / 2.0) * (1.0 + 0.1 * grid.nodes**2)
        )
        psi0 = nt.radial_to_cartesian(bump, box128)
        cfg = nt.PropagatorConfig(dt=5e-4, t_final=10.0, monitor_stride=400)
        trace = nt.propagate(psi0, cfg, RUN46)
        assert trace.sigma_norm_sq.max() <= 2.0 * trace.sigma_norm_sq[0]
        first = trace.sigma_norm_sq[: len(trace.sigma_norm_sq) // 2].max()
        second = trace.sigma_norm_sq[len(trace.sigma_norm_sq) // 2 :].max()
        assert second <= 1.05 * first

    def test_small_box_rejected(self):
        small = nt.make_cartesian_grid(64, 8.0)
        psi = nt.ComplexField2D(small, np.zeros((64, 64), dtype=np.complex128))
        with pytest.raises(ConfigurationError):
            nt.propagate(psi, nt.PropagatorConfig(dt=1e-3, t_final=0.1), RUN46)


class TestPropagatorConfig:
    def test_dt_cap(self):
        with pytest.raises(ConfigurationError):
            nt.PropagatorConfig(dt=0.05, t_final=1.0)

    def test_positive(self):
        with pytest.raises(ConfigurationError):
            nt.PropagatorConfig(dt=1e-3, t_final=-1.0)


class TestOrbitalDistance:
    def test_gauge_member_zero(self, gaussian2d):
        rotated = nt.ComplexField2D(gaussian2d.grid, np.exp(0.7j) * gaussian2d.values)
        assert nt.orbital_distance(rotated, gaussian2d) <= 1e-10

    def test_small_perturbation_upper_bound(self, gaussian2d):
        w = nt.perturbation_field(gaussian2d.grid, seed=42)
        eps = 1e-3
        psi = nt.ComplexField2D(gaussian2d.grid, gaussian2d.values + eps * w.values)
        assert nt.orbital_distance(psi, gaussian2d) <= eps * (1.0 + 1e-9)

    def test_doubled_field(self, gaussian2d):
        psi = nt.ComplexField2D(gaussian2d.grid, 2.0 * gaussian2d.values)
        expected = math.sqrt(nt.sigma_norm_sq_2d(gaussian2d))
        assert nt.orbital_distance(psi, gaussian2d) == pytest.approx(expected, rel=1e-10)

    def test_grid_mismatch_rejected(self, gaussian2d, box128):
        other = nt.ComplexField2D(box128, np.zeros((128, 128), dtype=np.complex128))
        with pytest.raises(ConfigurationError):
            nt.orbital_distance(gaussian2d, other)


class TestPerturbationField:
    def test_unit_norm_and_reproducible(self, box128):
        w1 = nt.perturbation_field(box128, seed=9)
        w2 = nt.perturbation_field(box128, seed=9)
        assert np.array_equal(w1.values, w2.values)
        assert nt.sigma_norm_sq_2d(w1) == pytest.approx(1.0, rel=1e-12)

    def test_seed_changes_field(self, box128):
        w1 = nt.perturbation_field(box128, seed=9)
        w2 = nt.perturbation_field(box128, seed=10)
        assert not np.allclose(w1.values, w2.values)


class TestStabilityExperiment:
    def test_delta_bounds(self, ground_state_4_6_10):
        cfg = nt.PropagatorConfig(dt=1e-3, t_final=0.1)
        with pytest.raises(ConfigurationError):
            nt.stability_experiment(
                ground_state_4_6_10.profile, ground_state_4_6_10.value, 0.5, cfg, RUN46
            )

    def test_short_perturbed_run(self, ground_state_4_6_10):
        # stays near the orbit over a short horizon; full horizons are
        # exercised by the acceptance suite
        cfg = nt.PropagatorConfig(dt=5e-4, t_final=1.0, monitor_stride=100)
        trace = nt.stability_experiment(
            ground_state_4_6_10.profile,
            ground_state_4_6_10.value,
            1e-3,
            cfg,
            RUN46,
            seed=7,
        )
        phi_norm = math.sqrt(
            nt.sigma_norm_sq_2d(
                nt.radial_to_cartesian(
                    ground_state_4_6_10.profile, nt.make_cartesian_grid(256, 10.0)
                )
            )
        )
        assert trace.orbital_dist.max() <= 10.0 * 1e-3 * phi_norm
        assert trace.orbital_dist[0] <= 1e-3 * phi_norm * (1.0 + 1e-6)
