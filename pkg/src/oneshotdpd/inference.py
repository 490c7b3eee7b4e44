"""Asymptotic covariance matrices, Z-type tests, power and design size.

The divergence estimate is asymptotically normal with sandwich covariance
``Jbar^-1 Kbar Jbar^-1`` (divided by the per-cell device count); at tuning
parameter 0 both matrices collapse to IJ times the Fisher information.
Unbalanced plans weight each cell's contribution by ``K_ij / Kbar`` (mean
cell size) and use ``sqrt(Kbar)`` in the test normalization, which reduces
exactly to the balanced formulas when all cells have the same size.

Normal tail probabilities and quantiles come from scipy's ``ndtr``/``ndtri``
(double precision rational approximations, error well below 1e-12).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np
from scipy.special import ndtr, ndtri

from .errors import DegenerateVariance, InfeasibleDesign, SingularInformation
from .model import ModelParams, TestPlan, cell_probs

if TYPE_CHECKING:  # pragma: no cover
    from .estimator import FitResult

_COND_LIMIT = 1e12


@dataclass(frozen=True)
class SandwichCovariance:
    """Sandwich pieces evaluated at a parameter point.

    ``sigma = j_bar^-1 k_bar j_bar^-1`` is the asymptotic covariance of
    ``sqrt(K) (estimate - truth)``; divide by the per-cell device count for
    the covariance of the estimate itself.
    """

    j_bar: np.ndarray
    k_bar: np.ndarray
    sigma: np.ndarray
    at_params: ModelParams
    beta: float

    def alpha_covariance(self, devices: float) -> np.ndarray:
        """Approximate covariance of the estimate for ``devices`` per cell."""
        return self.sigma / float(devices)


@dataclass(frozen=True)
class LinearHypothesis:
    """Null hypothesis m0 * alpha0 + m1 * alpha1 = d."""

    m: np.ndarray
    d: float

    def __post_init__(self):
        m = np.asarray(self.m, dtype=float)
        if m.shape != (2,):
            raise ValueError("m must be a length-2 vector")
        if not np.all(np.isfinite(m)) or np.all(m == 0.0):
            raise ValueError("m must be finite and non-zero")
        m.setflags(write=False)
        object.__setattr__(self, "m", m)

    def effect(self, params: ModelParams) -> float:
        """Signed departure m' alpha - d at ``params``."""
        return float(self.m @ params.as_array() - self.d)


@dataclass(frozen=True)
class ZTestResult:
    """Asymptotically standard normal test statistic and its p-value."""

    statistic: float
    p_value: float
    fit: "FitResult"

    def reject_at(self, level: float) -> bool:
        """Two-sided decision |Z| > z_{level/2}."""
        if not 0.0 < level < 1.0:
            raise ValueError("level must be in (0, 1)")
        return bool(abs(self.statistic) > -ndtri(level / 2.0))


def _stress_outer(alpha0: float, w: float) -> np.ndarray:
    return np.array(
        [[1.0 / alpha0**2, w / alpha0], [w / alpha0, w**2]]
    )


def _symmetrized(mat: np.ndarray) -> np.ndarray:
    return (mat + mat.T) / 2.0


def _weighted_cell_sum(params: ModelParams, plan: TestPlan,
                       factors: np.ndarray) -> np.ndarray:
    """Sum of per-stress outer-product blocks times per-cell scalar factors."""
    weights = plan.devices / plan.mean_devices
    total = np.zeros((2, 2))
    for i, w in enumerate(plan.temps):
        total += _stress_outer(params.alpha0, w) * float(
            np.sum(weights[i] * factors[i])
        )
    return _symmetrized(total)


def j_bar(params: ModelParams, plan: TestPlan, beta: float) -> np.ndarray:
    """Sensitivity matrix of the divergence fit (the sandwich "bread").

    Sums, over stress levels i and times j,

        [[1/a0^2, w/a0], [w/a0, w^2]] * t^2 f^2 [F^(b-1) + (1-F)^(b-1)]

    with cells weighted by K_ij / Kbar on unbalanced plans.
    """
    F, S, f = cell_probs(params, plan)
    factors = (plan.times[None, :] * f) ** 2 * (
        F ** (beta - 1.0) + S ** (beta - 1.0)
    )
    return _weighted_cell_sum(params, plan, factors)


def k_bar(params: ModelParams, plan: TestPlan, beta: float) -> np.ndarray:
    """Score-variance matrix of the divergence fit (the sandwich "meat")."""
    F, S, f = cell_probs(params, plan)
    factors = (plan.times[None, :] * f) ** 2 * (
        F ** (2.0 * beta - 1.0)
        + S ** (2.0 * beta - 1.0)
        - (F**beta - S**beta) ** 2
    )
    return _weighted_cell_sum(params, plan, factors)


def fisher_information(params: ModelParams, plan: TestPlan) -> np.ndarray:
    """Per-device Fisher information matrix of the binomial model.

    Equals ``j_bar(params, plan, 0) / (I*J)`` for every plan (the cell
    weighting carries over on unbalanced plans).
    """
    F, S, f = cell_probs(params, plan)
    factors = (plan.times[None, :] * f) ** 2 / (F * S)
    return _weighted_cell_sum(params, plan, factors) / plan.n_cells


def _inverse_2x2(mat: np.ndarray) -> np.ndarray:
    a, b, c = mat[0, 0], mat[0, 1], mat[1, 1]
    if not np.all(np.isfinite(mat)):
        raise SingularInformation("information matrix has non-finite entries")
    half_trace = (a + c) / 2.0
    radius = np.hypot((a - c) / 2.0, b)
    eig_min = half_trace - radius
    eig_max = half_trace + radius
    if eig_min <= 0.0 or eig_max / eig_min >= _COND_LIMIT:
        raise SingularInformation(
            f"information matrix is singular or ill-conditioned "
            f"(eigenvalues {eig_min:.3e}, {eig_max:.3e})"
        )
    det = a * c - b * b
    return np.array([[c, -b], [-b, a]]) / det


def sandwich(params: ModelParams, plan: TestPlan, beta: float
             ) -> SandwichCovariance:
    """Sandwich covariance ``j_bar^-1 k_bar j_bar^-1`` at ``params``.

    Raises :class:`~oneshotdpd.errors.SingularInformation` when the
    sensitivity matrix cannot be inverted reliably (condition number at or
    above 1e12).
    """
    jb = j_bar(params, plan, beta)
    kb = k_bar(params, plan, beta)
    j_inv = _inverse_2x2(jb)
    sigma = _symmetrized(j_inv @ kb @ j_inv)
    return SandwichCovariance(
        j_bar=jb, k_bar=kb, sigma=sigma, at_params=params, beta=float(beta)
    )


def z_statistic(fit: "FitResult", plan: TestPlan, hyp: LinearHypothesis
                ) -> ZTestResult:
    """Z-type statistic sqrt(K / (m' Sigma m)) (m' estimate - d).

    ``Sigma`` is the sandwich evaluated at the fitted parameters and ``K``
    the (mean) per-cell device count.  The two-sided p-value is
    2 (1 - Phi(|Z|)).
    """
    cov = sandwich(fit.params, plan, fit.beta)
    variance = float(hyp.m @ cov.sigma @ hyp.m)
    if not np.isfinite(variance) or variance <= 0.0:
        raise DegenerateVariance(
            f"m' Sigma m = {variance!r} is not strictly positive"
        )
    z = np.sqrt(plan.mean_devices / variance) * hyp.effect(fit.params)
    p = 2.0 * float(ndtr(-abs(z)))
    return ZTestResult(statistic=float(z), p_value=p, fit=fit)


def approximate_power(
    params_star: ModelParams,
    plan: TestPlan,
    beta: float,
    hyp: LinearHypothesis,
    devices: int,
    level: float,
    abs_effect: bool = False,
) -> float:
    """Approximate rejection probability at the alternative ``params_star``.

    Evaluates 2 (1 - Phi(z_{level/2} - sqrt(K / (m' Sigma m)) (m' alpha - d))).
    The approximation keeps only one tail, so a *negative* signed departure
    drives the value below ``level``; callers studying a two-sided
    alternative should pass ``abs_effect=True`` to use |m' alpha - d|.  A
    zero departure returns ``level`` exactly (not an error).  For strong
    alternatives the raw one-sided expression overshoots 1 (it tends to 2);
    the returned probability is truncated at 1.
    """
    if not 0.0 < level < 1.0:
        raise ValueError("level must be in (0, 1)")
    if devices < 1:
        raise ValueError("devices must be >= 1")
    cov = sandwich(params_star, plan, beta)
    variance = float(hyp.m @ cov.sigma @ hyp.m)
    if variance <= 0.0:
        raise DegenerateVariance(
            f"m' Sigma m = {variance!r} is not strictly positive"
        )
    effect = hyp.effect(params_star)
    if abs_effect:
        effect = abs(effect)
    z_crit = -ndtri(level / 2.0)
    shift = np.sqrt(devices / variance) * effect
    return min(2.0 * float(ndtr(-(z_crit - shift))), 1.0)


def required_devices(
    params_star: ModelParams,
    plan: TestPlan,
    beta: float,
    hyp: LinearHypothesis,
    target_power: float,
    level: float,
) -> int:
    """Smallest per-cell device count whose approximate power reaches target.

    Computed as floor(m' Sigma m (z_{level/2} - Phi^-1(1 - target/2))^2 /
    (m' alpha - d)^2) + 1; the squared denominator is what inverting the
    power approximation requires.  Round trip:
    ``approximate_power(K) >= target > approximate_power(K - 1)``.
    """
    if not 0.0 < level < 1.0:
        raise ValueError("level must be in (0, 1)")
    if not level < target_power < 1.0:
        raise InfeasibleDesign(
            f"target power must lie in (level, 1), got {target_power}"
        )
    effect = hyp.effect(params_star)
    if effect == 0.0:
        raise InfeasibleDesign(
            "m' alpha equals d at the design point; no device count can "
            "reach the target power"
        )
    cov = sandwich(params_star, plan, beta)
    variance = float(hyp.m @ cov.sigma @ hyp.m)
    if variance <= 0.0:
        raise DegenerateVariance(
            f"m' Sigma m = {variance!r} is not strictly positive"
        )
    z_crit = -ndtri(level / 2.0)
    gap = z_crit - ndtri(1.0 - target_power / 2.0)
    k_real = variance * gap**2 / effect**2
    return max(int(np.floor(k_real)) + 1, 1)
