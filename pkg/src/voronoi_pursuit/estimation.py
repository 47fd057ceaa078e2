"""Second-order polynomial Kalman filter for the evader's planar motion.

State is ``[x, vx, ax, y, vy, ay]``; only positions are measured. Process
noise is white jerk on each axis.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np

from .geometry2d import Point2

_MEASURED = [0, 3]
H = np.array([[1.0, 0, 0, 0, 0, 0], [0, 0, 0, 1.0, 0, 0]])


@dataclass(frozen=True)
class FilterState:
    estimate: np.ndarray  # (6,)
    covariance: np.ndarray  # (6, 6)
    step_index: int = 0

    @property
    def position(self) -> Point2:
        return Point2(float(self.estimate[0]), float(self.estimate[3]))

    @property
    def velocity(self) -> Point2:
        return Point2(float(self.estimate[1]), float(self.estimate[4]))

    @property
    def acceleration(self) -> Point2:
        return Point2(float(self.estimate[2]), float(self.estimate[5]))


@dataclass(frozen=True)
class FilterSettings:
    """Tuning for the evader filter.

    ``measurement_sigma`` of ``None`` means "use the noise model's sigma",
    floored at ``min_measurement_sigma`` so the innovation covariance stays
    invertible in noise-free runs.
    """

    jerk_sigma: float = 5.0  # m/s^3
    init_position_var: float = 1.0  # m^2
    init_velocity_var: float = 25.0  # (m/s)^2
    init_acceleration_var: float = 1.0  # (m/s^2)^2
    measurement_sigma: float | None = None
    min_measurement_sigma: float = 1e-3


@dataclass(frozen=True)
class NoiseModel:
    position_noise_sigma: float = 0.0
    rng_seed: int = 0

    def __post_init__(self):
        if not self.position_noise_sigma >= 0:
            raise ValueError(f"noise sigma must be >= 0, got {self.position_noise_sigma}")


@functools.lru_cache(maxsize=32)
def _cached_phi(dt: float) -> np.ndarray:
    phi = transition_matrix(dt)
    phi.flags.writeable = False
    return phi


def transition_matrix(dt: float) -> np.ndarray:
    block = np.array([[1.0, dt, 0.5 * dt * dt], [0.0, 1.0, dt], [0.0, 0.0, 1.0]])
    return np.kron(np.eye(2), block)


def white_jerk_q(dt: float, jerk_sigma: float) -> np.ndarray:
    """Discretised continuous white-jerk process noise for both axes."""
    q = jerk_sigma**2
    block = q * np.array(
        [
            [dt**5 / 20, dt**4 / 8, dt**3 / 6],
            [dt**4 / 8, dt**3 / 3, dt**2 / 2],
            [dt**3 / 6, dt**2 / 2, dt],
        ]
    )
    return np.kron(np.eye(2), block)


def kf_init(first_measurement, position_var=1.0, velocity_var=25.0, acceleration_var=1.0) -> FilterState:
    x = np.zeros(6)
    x[0], x[3] = float(first_measurement[0]), float(first_measurement[1])
    p = np.diag([position_var, velocity_var, acceleration_var] * 2).astype(float)
    return FilterState(x, p, 0)


def kf_step(state: FilterState, measurement, dt: float, process_noise, measurement_noise_variance: float) -> FilterState:
    """One predict/update cycle.

    ``process_noise`` is either a 6x6 Q matrix or a jerk sigma (m/s^3).
    """
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    phi = _cached_phi(float(dt))
    q = np.asarray(process_noise, dtype=float)
    if q.ndim == 0:
        q = white_jerk_q(dt, float(q))
    m = phi @ state.covariance @ phi.T + q
    # H picks state rows 0 and 3, so H M H^T + R is a 2x2 block of M
    mh = m[:, _MEASURED]
    s11 = mh[0, 0] + measurement_noise_variance
    s22 = mh[3, 1] + measurement_noise_variance
    s12 = mh[0, 1]
    det = s11 * s22 - s12 * s12
    if not det > 0 or not math.isfinite(det):
        raise np.linalg.LinAlgError(f"innovation covariance is not positive definite (det={det:.3g})")
    s_inv = np.array([[s22, -s12], [-s12, s11]]) / det
    gain = mh @ s_inv
    p = m - gain @ mh.T  # (I - K H) M
    p = 0.5 * (p + p.T)
    predicted = phi @ state.estimate
    innovation = (float(measurement[0]) - predicted[0], float(measurement[1]) - predicted[3])
    x = predicted + gain @ innovation
    return FilterState(x, p, state.step_index + 1)


def add_measurement_noise(true_position, model: NoiseModel, step_index: int) -> Point2:
    """Gaussian-corrupted position, reproducible from ``(rng_seed, step_index)``."""
    if model.position_noise_sigma == 0.0:
        return Point2(float(true_position[0]), float(true_position[1]))
    rng = np.random.default_rng((model.rng_seed, step_index))
    nx, ny = rng.normal(0.0, model.position_noise_sigma, size=2)
    return Point2(float(true_position[0]) + nx, float(true_position[1]) + ny)


def sigma_for_snr(positions, snr_db: float = 20.0) -> float:
    """Per-axis noise sigma giving ``snr_db`` against the mean signal power of ``positions``.

    Signal power is the mean square coordinate over the whole trajectory,
    averaged over both axes.
    """
    pts = np.asarray(positions, dtype=float)
    power = float(np.mean(pts**2))
    return math.sqrt(power / 10 ** (snr_db / 10))
