"""Variance-preserving noise schedule for the continuous diffusion model."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

COSINE_OFFSET = 0.008  # keeps alpha^T small but strictly positive


@dataclass
class NoiseSchedule:
    """Coefficient arrays alpha[0..T], sigma[0..T] with alpha^2 + sigma^2 = 1.

    alpha[0] = 1 and sigma[0] = 0 exactly; alpha is strictly decreasing.
    Transition coefficients between adjacent steps follow from the
    marginals: alpha_ratio(t) = alpha[t]/alpha[t-1] and
    sigma_cond(t)^2 = sigma[t]^2 - alpha_ratio(t)^2 * sigma[t-1]^2.
    """

    alpha: np.ndarray
    sigma: np.ndarray

    def __post_init__(self):
        self.alpha = np.asarray(self.alpha, dtype=np.float64)
        self.sigma = np.asarray(self.sigma, dtype=np.float64)
        if self.alpha.shape != self.sigma.shape or self.alpha.ndim != 1:
            raise ValueError("alpha and sigma must be 1-d arrays of equal length")

    @property
    def timesteps(self) -> int:
        return int(self.alpha.shape[0] - 1)

    def alpha_ratio(self, t) -> float:
        return float(self.alpha[t] / self.alpha[t - 1])

    def sigma_cond_sq(self, t) -> float:
        r = self.alpha_ratio(t)
        return float(self.sigma[t] ** 2 - r * r * self.sigma[t - 1] ** 2)


def make_schedule(timesteps: int) -> NoiseSchedule:
    """Cosine schedule alpha_t = cos((pi/2) * t / ((1 + eps) * T)).

    The (1 + eps) stretch keeps alpha^T small (< 0.05 for any T) without
    ever reaching zero, so the inversion x0 = (x_t - sigma*eps)/alpha stays
    defined at every step.
    """
    if timesteps < 1:
        raise ValueError("timesteps must be >= 1")
    t = np.arange(timesteps + 1, dtype=np.float64)
    alpha = np.cos(0.5 * np.pi * t / ((1.0 + COSINE_OFFSET) * timesteps))
    sigma = np.sqrt(1.0 - alpha * alpha)
    return NoiseSchedule(alpha, sigma)
