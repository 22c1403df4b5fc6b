"""Tests for the discrete-time motion models."""

import numpy as np
import pytest
from kestrel.core.errors import ContractViolationError
from kestrel.core.estimation import GaussianBelief, predict
from kestrel.core.motion_models import (
    ConstantAccelerationModel,
    ConstantVelocityModel,
    CoordinatedTurnModel,
    MotionModelKind,
    MotionModelSpec,
    build_model,
    ca_model,
    ct_model,
    cv_model,
    initial_belief,
    observation_matrix,
    state_labels,
)
from scipy.integrate import quad_vec
from scipy.linalg import expm


def quadrature_noise(F: np.ndarray, G: np.ndarray, q: float, dt: float) -> np.ndarray:
    """∫₀ᵈᵗ e^{Fs} G q Gᵀ e^{Fᵀs} ds by adaptive quadrature."""
    value, _ = quad_vec(lambda s: expm(F * s) @ (q * G @ G.T) @ expm(F * s).T, 0.0, dt, epsabs=1e-13, epsrel=1e-12)
    return value


class TestConstantVelocity:
    def test_transition(self):
        np.testing.assert_allclose(ConstantVelocityModel(axes=1).transition(1.0), [[1.0, 1.0], [0.0, 1.0]])
        np.testing.assert_allclose(ConstantVelocityModel(axes=1).transition(0.5), [[1.0, 0.5], [0.0, 1.0]])

    def test_unit_process_noise(self):
        np.testing.assert_allclose(
            ConstantVelocityModel(q=1.0, axes=1).process_noise(1.0),
            [[1.0 / 3.0, 0.5], [0.5, 1.0]],
        )

    def test_process_noise_matches_quadrature(self):
        F = np.array([[0.0, 1.0], [0.0, 0.0]])
        G = np.array([[0.0], [1.0]])
        for dt in (0.05, 1.0, 3.0):
            np.testing.assert_allclose(
                ConstantVelocityModel(q=2.0, axes=1).process_noise(dt),
                quadrature_noise(F, G, 2.0, dt),
                atol=1e-10,
            )

    def test_two_axis_layout(self):
        model = cv_model(0.1, q=1.0, measurement_std=0.5)
        assert model.state_dim == 4
        np.testing.assert_allclose(model.observation, [[1.0, 0.0, 0.0, 0.0], [0.0, 0.0, 1.0, 0.0]])
        np.testing.assert_allclose(model.measurement_noise, 0.25 * np.eye(2))

    @pytest.mark.parametrize("dt", [0.0, -1.0])
    def test_rejects_non_positive_dt(self, dt):
        with pytest.raises(ContractViolationError, match="dt"):
            cv_model(dt)

    def test_rejects_noiseless_sensor(self):
        with pytest.raises(ContractViolationError, match="measurement_std"):
            cv_model(0.1, measurement_std=0.0)


class TestConstantAcceleration:
    def test_transition(self):
        np.testing.assert_allclose(
            ConstantAccelerationModel(axes=1).transition(1.0),
            [[1.0, 1.0, 0.5], [0.0, 1.0, 1.0], [0.0, 0.0, 1.0]],
        )

    def test_half_a_t_squared(self):
        model = ca_model(1.0, axes=1)
        belief = GaussianBelief(mean=[0.0, 0.0, 2.0], covariance=np.eye(3))
        np.testing.assert_allclose(predict(belief, model).mean[:2], [1.0, 2.0])

    def test_process_noise_matches_quadrature(self):
        F = np.diag([1.0, 1.0], k=1)
        G = np.array([[0.0], [0.0], [1.0]])
        np.testing.assert_allclose(
            ConstantAccelerationModel(q=1.0, axes=1).process_noise(1.0),
            quadrature_noise(F, G, 1.0, 1.0),
            atol=1e-10,
        )


class TestCoordinatedTurn:
    def test_quarter_turn(self):
        A = CoordinatedTurnModel(omega=np.pi / 2).transition(1.0)
        np.testing.assert_allclose(A @ [0.0, 1.0, 0.0, 0.0], [2 / np.pi, 0.0, 2 / np.pi, 1.0], atol=1e-12)

    def test_speed_preserved(self, rng):
        A = CoordinatedTurnModel(omega=0.7).transition(0.3)
        for _ in range(10):
            state = rng.normal(size=4)
            out = A @ state
            np.testing.assert_allclose(np.hypot(out[1], out[3]), np.hypot(state[1], state[3]), atol=1e-12)

    def test_small_turn_rate_approaches_constant_velocity(self):
        np.testing.assert_allclose(
            CoordinatedTurnModel(omega=1e-9).transition(1.0),
            ConstantVelocityModel().transition(1.0),
            atol=1e-6,
        )

    def test_trajectory_stays_on_circle(self):
        omega = -0.4
        A = CoordinatedTurnModel(omega=omega).transition(0.1)
        state = np.array([1.0, 2.0, -1.0, 0.5])
        center = state[[0, 2]] + np.array([-state[3], state[1]]) / omega
        radius = np.hypot(state[1], state[3]) / abs(omega)
        for _ in range(100):
            state = A @ state
            assert abs(np.linalg.norm(state[[0, 2]] - center) - radius) <= 1e-9

    def test_zero_turn_rate_rejected(self):
        with pytest.raises(ContractViolationError):
            ct_model(0.1, omega=0.0)

    def test_rk4_cross_check(self):
        """The closed form matches RK4 integration of the turning dynamics."""
        omega, dt = 0.9, 0.5
        F = np.array([[0.0, 1.0, 0.0, 0.0], [0.0, 0.0, 0.0, -omega], [0.0, 0.0, 0.0, 1.0], [0.0, omega, 0.0, 0.0]])
        state = np.array([0.0, 1.0, 0.0, 0.5])
        x, h = state.copy(), dt / 1000
        for _ in range(1000):
            k1 = F @ x
            k2 = F @ (x + 0.5 * h * k1)
            k3 = F @ (x + 0.5 * h * k2)
            k4 = F @ (x + h * k3)
            x = x + h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
        np.testing.assert_allclose(CoordinatedTurnModel(omega=omega).transition(dt) @ state, x, atol=1e-10)


class TestProperties:
    @pytest.mark.parametrize(
        "model",
        [ConstantVelocityModel(), ConstantAccelerationModel(), CoordinatedTurnModel(omega=0.5)],
        ids=["cv", "ca", "ct"],
    )
    def test_semigroup(self, model):
        np.testing.assert_allclose(
            model.transition(0.3) @ model.transition(0.45),
            model.transition(0.75),
            atol=1e-10,
        )

    @pytest.mark.parametrize(
        "model",
        [ConstantVelocityModel(), ConstantAccelerationModel(), CoordinatedTurnModel(omega=-0.5)],
        ids=["cv", "ca", "ct"],
    )
    def test_process_noise_psd(self, model):
        for dt in np.linspace(0.01, 10.0, 25):
            Q = model.process_noise(dt)
            np.testing.assert_allclose(Q, Q.T, atol=1e-12)
            assert np.linalg.eigvalsh(Q).min() >= -1e-9 * max(1.0, np.abs(Q).max())


class TestFactory:
    def test_build_model_dispatch(self):
        spec = MotionModelSpec(kind="ct", dt=0.1, q=0.5, omega=0.3, measurement_std=0.02)
        expected = ct_model(0.1, omega=0.3, q=0.5, measurement_std=0.02)
        np.testing.assert_allclose(build_model(spec).transition, expected.transition)
        np.testing.assert_allclose(build_model(spec).process_noise, expected.process_noise)

    def test_turn_spec_needs_omega(self):
        with pytest.raises(ValueError):
            MotionModelSpec(kind="ct")

    def test_spec_needs_positive_measurement_std(self):
        with pytest.raises(ValueError):
            MotionModelSpec(kind="cv", measurement_std=0.0)

    def test_labels_and_observation(self):
        labels = state_labels(MotionModelKind.CA, 2)
        assert labels == ["x", "vx", "ax", "y", "vy", "ay"]
        H = observation_matrix(labels)
        np.testing.assert_allclose(H @ np.arange(6.0), [0.0, 3.0])

    def test_initial_belief(self):
        belief = initial_belief(["x", "vx", "y", "vy"], [1.0, 2.0], position_std=0.1, velocity_std=2.0)
        np.testing.assert_allclose(belief.mean, [1.0, 0.0, 2.0, 0.0])
        np.testing.assert_allclose(np.diag(belief.covariance), [0.01, 4.0, 0.01, 4.0])
