"""Divergence measures between observed and model probability vectors.

The estimation objective is the density power divergence with tuning
parameter ``beta >= 0``.  ``beta = 0`` is handled as an exact
Kullback-Leibler / log-likelihood branch (not a small-beta limit), so the
maximum likelihood fit is bit-stable.  All cell sums use numpy's pairwise
summation.
"""

from __future__ import annotations

import numpy as np

from .model import FailureTable, ModelParams, cell_probs, cell_rates


def _entries(p) -> np.ndarray:
    return np.asarray(getattr(p, "entries", p), dtype=float)


def _check_beta(beta: float) -> float:
    beta = float(beta)
    if not np.isfinite(beta) or beta < 0.0:
        raise ValueError(f"beta must be a finite real >= 0, got {beta}")
    return beta


def kl_divergence(p, q) -> float:
    """Kullback-Leibler divergence sum(p * log(p / q)).

    Uses the 0 * log 0 = 0 convention.  Where q is zero but p is not, the
    divergence is +inf (returned, not raised).
    """
    p = _entries(p)
    q = _entries(q)
    if p.shape != q.shape:
        raise ValueError("p and q must have the same length")
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(p > 0.0, p * (np.log(p) - np.log(q)), 0.0)
    return float(np.sum(terms))


def dpd(p, q, beta: float) -> float:
    """Density power divergence between probability vectors ``p`` and ``q``.

    For ``beta > 0`` this is ``sum(q^(1+b) - (1 + 1/b) q^b p + p^(1+b)/b)``;
    at ``beta = 0`` it continuously becomes the Kullback-Leibler divergence.

    Parameters
    ----------
    p, q : ProbabilityVector or array-like
        Vectors of matching length on the simplex.
    beta : float
        Non-negative tuning parameter.
    """
    beta = _check_beta(beta)
    if beta == 0.0:
        return kl_divergence(p, q)
    p = _entries(p)
    q = _entries(q)
    if p.shape != q.shape:
        raise ValueError("p and q must have the same length")
    terms = (
        q ** (beta + 1.0)
        - (1.0 + 1.0 / beta) * q**beta * p
        + p ** (beta + 1.0) / beta
    )
    return float(np.sum(terms))


def log_likelihood(table: FailureTable, params: ModelParams) -> float:
    """Binomial log-likelihood of the failure table under ``params``.

    Cells with zero counts on one side contribute nothing from that side.
    Data impossible under ``params`` (failures where the failure probability
    is exactly 0) give -inf.  Survivor terms use log survival = -lambda t
    evaluated exactly, so enormous rates give a finite, very negative value
    instead of overflowing through log(1 - F).
    """
    F, S, _ = cell_probs(params, table.plan)
    n = table.counts
    K = table.plan.devices
    # log survival equals -lambda * t exactly; evaluate it on that path
    # instead of log(exp(-lambda t)).
    lam_t = cell_rates(params, table.plan) * table.plan.times[None, :]
    with np.errstate(divide="ignore", invalid="ignore"):
        fail_terms = np.where(n > 0, n * np.log(F), 0.0)
        surv_terms = np.where(n < K, -(K - n) * lam_t, 0.0)
    total = float(np.sum(fail_terms) + np.sum(surv_terms))
    return total if not np.isnan(total) else -np.inf


def dpd_objective(table: FailureTable, params: ModelParams, beta: float) -> float:
    """Estimation objective: per-cell average of the divergence kernel.

    With per-cell failure fraction r = n/K and model probability F this is

        mean_ij[ F^(1+b) + (1-F)^(1+b) - (1+b)/b * (r F^b + (1-r)(1-F)^b) ]

    for ``beta = b > 0``, and the Kullback-Leibler divergence between the
    observed and model probability vectors for ``beta = 0``.  It differs
    from ``dpd(observed_probs(table), theoretical_probs(params, plan), b)``
    by a positive factor and a data-only constant, so both have identical
    minimizers.
    """
    beta = _check_beta(beta)
    F, S, _ = cell_probs(params, table.plan)
    r = table.frequencies
    n_cells = table.plan.n_cells
    if beta == 0.0:
        with np.errstate(divide="ignore", invalid="ignore"):
            t_fail = np.where(r > 0, r * (np.log(r) - np.log(F)), 0.0)
            t_surv = np.where(r < 1, (1 - r) * (np.log1p(-r) - np.log(S)), 0.0)
        return float(np.sum(t_fail + t_surv) / n_cells)
    kernel = (
        F ** (beta + 1.0)
        + S ** (beta + 1.0)
        - (1.0 + beta) / beta * (r * F**beta + (1.0 - r) * S**beta)
    )
    return float(np.sum(kernel) / n_cells)


def dpd_split(table: FailureTable, params: ModelParams, beta: float):
    """Failure-entry and survival-entry parts of the vector divergence.

    Splits ``dpd(observed_probs(table), theoretical_probs(params, ...), beta)``
    into the partial sum over failure entries and the partial sum over
    survival entries; the two parts add back to the full divergence.
    Requires ``beta > 0`` (the log branch at 0 does not split this way).
    """
    beta = _check_beta(beta)
    if beta == 0.0:
        raise ValueError("dpd_split requires beta > 0; use log_likelihood or "
                         "kl_divergence for the beta = 0 branch")
    F, S, _ = cell_probs(params, table.plan)
    n_cells = table.plan.n_cells
    r = table.frequencies
    qf = F / n_cells
    qs = S / n_cells
    pf = r / n_cells
    ps = (1.0 - r) / n_cells
    part_fail = np.sum(
        qf ** (1.0 + beta) - (1.0 + 1.0 / beta) * qf**beta * pf
        + pf ** (1.0 + beta) / beta
    )
    part_surv = np.sum(
        qs ** (1.0 + beta) - (1.0 + 1.0 / beta) * qs**beta * ps
        + ps ** (1.0 + beta) / beta
    )
    return float(part_fail), float(part_surv)
