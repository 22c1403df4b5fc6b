"""Tests for the Kalman filter primitives."""

import numpy as np
import pytest
from kestrel.core.errors import ContractViolationError, NumericError
from kestrel.core.estimation import (
    ControlInput,
    GaussianBelief,
    LinearGaussianModel,
    Measurement,
    innovation,
    innovation_likelihood,
    kalman_gain,
    log_innovation_likelihood,
    normalized_innovation_squared,
    predict,
    update,
)


class TestGaussianBelief:
    def test_rejects_mismatched_shapes(self):
        """Covariance must be n×n for a mean of length n."""
        with pytest.raises(ContractViolationError):
            GaussianBelief(mean=[0.0, 1.0], covariance=[[1.0]])

    def test_rejects_asymmetric_covariance(self):
        with pytest.raises(ContractViolationError):
            GaussianBelief(mean=[0.0, 0.0], covariance=[[1.0, 0.5], [0.0, 1.0]])

    def test_rejects_indefinite_covariance(self):
        with pytest.raises(ContractViolationError, match="positive semi-definite"):
            GaussianBelief(mean=[0.0, 0.0], covariance=[[1.0, 2.0], [2.0, 1.0]])

    def test_accepts_rounding_below_zero(self):
        belief = GaussianBelief(mean=[0.0], covariance=[[-1e-12]])
        assert belief.dim == 1

    def test_rejects_non_finite_mean(self):
        with pytest.raises(NumericError):
            GaussianBelief(mean=[np.nan], covariance=[[1.0]])

    def test_arrays_are_read_only(self):
        belief = GaussianBelief(mean=[1.0], covariance=[[1.0]])
        with pytest.raises(ValueError):
            belief.mean[0] = 2.0


class TestLinearGaussianModel:
    def test_rejects_inconsistent_dimensions(self):
        with pytest.raises(ContractViolationError):
            LinearGaussianModel(
                transition=np.eye(2),
                observation=[[1.0, 0.0, 0.0]],
                process_noise=np.zeros((2, 2)),
                measurement_noise=[[1.0]],
            )

    def test_rejects_indefinite_process_noise(self):
        with pytest.raises(ContractViolationError):
            LinearGaussianModel(
                transition=np.eye(2),
                observation=[[1.0, 0.0]],
                process_noise=[[1.0, 0.0], [0.0, -1.0]],
                measurement_noise=[[1.0]],
            )

    @pytest.mark.parametrize("r", [[[0.0]], [[-1.0]]])
    def test_rejects_non_positive_measurement_noise(self, r):
        with pytest.raises(ContractViolationError, match="positive definite"):
            LinearGaussianModel(
                transition=np.eye(2), observation=[[1.0, 0.0]], process_noise=np.eye(2), measurement_noise=r
            )

    def test_empty_control_is_none(self):
        model = LinearGaussianModel(
            transition=[[1.0]], observation=[[1.0]], process_noise=[[0.0]], measurement_noise=[[1.0]], control=[]
        )
        assert model.control is None
        assert model.control_dim == 0


class TestPredict:
    def test_identity_dynamics(self, scalar_model, scalar_belief):
        """mean=0, P=1, A=1, Q=0 stays put."""
        result = predict(scalar_belief(0.0, 1.0), scalar_model())
        np.testing.assert_allclose(result.mean, [0.0])
        np.testing.assert_allclose(result.covariance, [[1.0]])

    def test_constant_velocity_matrix(self):
        belief = GaussianBelief(mean=[0.0, 1.0], covariance=np.eye(2))
        model = LinearGaussianModel(
            transition=[[1.0, 1.0], [0.0, 1.0]],
            observation=[[1.0, 0.0]],
            process_noise=np.zeros((2, 2)),
            measurement_noise=[[1.0]],
        )
        np.testing.assert_allclose(predict(belief, model).mean, [1.0, 1.0])

    def test_process_noise_is_added(self, scalar_model, scalar_belief):
        """P' = APAᵀ + Q = 1.5."""
        result = predict(scalar_belief(0.0, 1.0), scalar_model(q=0.5))
        np.testing.assert_allclose(result.covariance, [[1.5]])

    def test_control_input(self):
        model = LinearGaussianModel(
            transition=[[1.0]],
            observation=[[1.0]],
            process_noise=[[0.0]],
            measurement_noise=[[1.0]],
            control=[[2.0]],
        )
        belief = GaussianBelief(mean=[1.0], covariance=[[1.0]])
        np.testing.assert_allclose(predict(belief, model, ControlInput(u=[0.5])).mean, [2.0])

    def test_dimension_mismatch(self, scalar_model):
        belief = GaussianBelief(mean=[0.0, 0.0], covariance=np.eye(2))
        with pytest.raises(ContractViolationError):
            predict(belief, scalar_model())


class TestKalmanGain:
    @pytest.mark.parametrize(("r", "expected"), [(1.0, 0.5), (1e-12, 1.0), (3.0, 0.25)])
    def test_scalar_gain(self, scalar_model, scalar_belief, r, expected):
        gain = kalman_gain(scalar_belief(0.0, 1.0), scalar_model(r=r)).gain
        np.testing.assert_allclose(gain, [[expected]])

    def test_gain_limits(self):
        """K tends to I for a perfect sensor and to 0 for a useless one."""
        belief = GaussianBelief(mean=np.zeros(2), covariance=np.diag([2.0, 3.0]))

        def model(r: float) -> LinearGaussianModel:
            return LinearGaussianModel(
                transition=np.eye(2), observation=np.eye(2), process_noise=np.zeros((2, 2)), measurement_noise=r * np.eye(2)
            )

        np.testing.assert_allclose(kalman_gain(belief, model(1e-12)).gain, np.eye(2), atol=1e-9)
        np.testing.assert_allclose(kalman_gain(belief, model(1e12)).gain, np.zeros((2, 2)), atol=1e-9)

    def test_singular_innovation_covariance(self, scalar_model, scalar_belief):
        """A prior variance just inside the PSD tolerance can still leave S indefinite."""
        with pytest.raises(NumericError, match="innovation covariance"):
            kalman_gain(scalar_belief(0.0, -5e-10), scalar_model(r=1e-12))


class TestUpdate:
    def test_scalar_update(self, scalar_model, scalar_belief):
        result = update(scalar_belief(0.0, 1.0), Measurement(z=[2.0]), scalar_model())
        np.testing.assert_allclose(result.mean, [1.0])
        np.testing.assert_allclose(result.covariance, [[0.5]])

    def test_perfect_sensor(self, scalar_model, scalar_belief):
        result = update(scalar_belief(0.0, 1.0), np.array([2.0]), scalar_model(r=1e-12))
        np.testing.assert_allclose(result.mean, [2.0])
        np.testing.assert_allclose(result.covariance, [[0.0]], atol=1e-9)

    def test_velocity_unchanged_without_cross_covariance(self):
        prior = GaussianBelief(mean=[1.0, 1.0], covariance=np.eye(2))
        model = LinearGaussianModel(
            transition=np.eye(2), observation=[[1.0, 0.0]], process_noise=np.zeros((2, 2)), measurement_noise=[[1.0]]
        )
        np.testing.assert_allclose(update(prior, [2.0], model).mean, [1.5, 1.0])

    def test_measurement_dimension_mismatch(self, scalar_model, scalar_belief):
        with pytest.raises(ContractViolationError):
            update(scalar_belief(), [1.0, 2.0], scalar_model())

    def test_covariance_monotonicity(self, rng):
        """Update never increases trace(P); predict with Q ≻ 0 strictly increases it."""
        dt = 0.1
        model = LinearGaussianModel(
            transition=[[1.0, dt], [0.0, 1.0]],
            observation=[[1.0, 0.0]],
            process_noise=0.01 * np.eye(2),
            measurement_noise=[[0.25]],
        )
        belief = GaussianBelief(mean=[0.0, 1.0], covariance=np.eye(2))
        for _ in range(20):
            prior = predict(belief, model)
            assert np.trace(prior.covariance) > np.trace(belief.covariance)
            belief = update(prior, rng.normal(size=1), model)
            assert np.trace(belief.covariance) <= np.trace(prior.covariance) + 1e-12
            np.testing.assert_allclose(belief.covariance, belief.covariance.T, atol=1e-9)
            assert np.linalg.eigvalsh(belief.covariance).min() >= -1e-9

    def test_deterministic(self, scalar_model, scalar_belief):
        a = update(scalar_belief(0.3, 2.0), [1.7], scalar_model(r=0.7))
        b = update(scalar_belief(0.3, 2.0), [1.7], scalar_model(r=0.7))
        assert a.mean.tobytes() == b.mean.tobytes()
        assert a.covariance.tobytes() == b.covariance.tobytes()

    @pytest.mark.parametrize("seed", range(20))
    def test_matches_batch_least_squares(self, seed):
        """The recursive posterior equals the batch weighted least-squares solution."""
        rng = np.random.default_rng(seed)
        dt, steps = rng.uniform(0.02, 0.1), 50
        A = np.array([[1.0, dt, 0.0, 0.0], [0.0, 1.0, 0.0, 0.0], [0.0, 0.0, 1.0, dt], [0.0, 0.0, 0.0, 1.0]])
        H = np.array([[1.0, 0.0, 0.0, 0.0], [0.0, 0.0, 1.0, 0.0]])
        L = rng.normal(scale=0.1, size=(2, 2))
        R = L @ L.T + 0.01 * np.eye(2)
        model = LinearGaussianModel(transition=A, observation=H, process_noise=np.zeros((4, 4)), measurement_noise=R)

        m0, P0 = np.array([0.0, 1.0, 0.0, -0.5]), np.diag([4.0, 1.0, 4.0, 1.0])
        x0 = rng.multivariate_normal(m0, P0)
        zs = [H @ np.linalg.matrix_power(A, k) @ x0 + rng.multivariate_normal(np.zeros(2), R) for k in range(1, steps + 1)]

        belief = GaussianBelief(mean=m0, covariance=P0)
        for z in zs:
            belief = update(predict(belief, model), z, model)

        information = np.linalg.inv(P0)
        vector = information @ m0
        R_inv = np.linalg.inv(R)
        for k, z in enumerate(zs, start=1):
            Hk = H @ np.linalg.matrix_power(A, k)
            information = information + Hk.T @ R_inv @ Hk
            vector = vector + Hk.T @ R_inv @ z
        x0_hat = np.linalg.solve(information, vector)
        expected = np.linalg.matrix_power(A, steps) @ x0_hat

        np.testing.assert_allclose(belief.mean, expected, rtol=1e-8, atol=1e-10)


class TestInnovationLikelihood:
    @pytest.mark.parametrize(
        ("z", "r", "expected"),
        [(0.0, 1.0, 0.39894), (1.0, 1.0, 0.24197), (0.0, 4.0, 0.19947)],
    )
    def test_scalar_density(self, scalar_model, scalar_belief, z, r, expected):
        """A zero-variance prior leaves S = R."""
        value = innovation_likelihood(scalar_belief(0.0, 0.0), [z], scalar_model(r=r))
        np.testing.assert_allclose(value, expected, atol=1e-5)

    def test_log_matches_density(self, scalar_model, scalar_belief):
        prior, model = scalar_belief(0.2, 0.5), scalar_model(r=0.3)
        np.testing.assert_allclose(
            np.exp(log_innovation_likelihood(prior, [1.1], model)),
            innovation_likelihood(prior, [1.1], model),
        )

    def test_innovation_and_nis(self, scalar_model, scalar_belief):
        nu, S = innovation(scalar_belief(1.0, 1.0), [3.0], scalar_model(r=3.0))
        np.testing.assert_allclose(nu, [2.0])
        np.testing.assert_allclose(S, [[4.0]])
        np.testing.assert_allclose(normalized_innovation_squared(scalar_belief(1.0, 1.0), [3.0], scalar_model(r=3.0)), 1.0)
