"""Dithered one-bit observation model and its ADMM recovery solvers.

Observations are signs of entry samples after additive uniform dither
on [-theta, theta]; theta * sign is then an unbiased surrogate of the
entry value whenever theta dominates the signal range.  The solvers
work from two per-entry aggregates: J1 (theta times the summed signs)
and J2 (the sample counts), which make the data-fit subproblem
closed-form and elementwise.
"""

from __future__ import annotations

import time
import warnings
from dataclasses import dataclass, field

import numpy as np

from .gradient import GradientSet, grad, solve_grad_system
from .solvers import SolveReport, SolverConfig, _threshold

__all__ = [
    "ObservationSet",
    "onebit_observe",
    "naive_estimate",
    "data_fit_update",
    "gnobhtc",
    "gnobrhtc",
]

ONEBIT_RESIDUAL_NAMES = ("rel_dL", "box_gap", "grad_gap", "dG", "dL")


@dataclass
class ObservationSet:
    """One-bit samples with their dense per-entry aggregates."""

    dims: tuple
    theta: float
    indices: np.ndarray  # linear indices, column-major
    signs: np.ndarray  # +1 / -1 per sample
    j1: np.ndarray = field(repr=False, default=None)  # theta * summed signs
    j2: np.ndarray = field(repr=False, default=None)  # per-entry sample counts
    sparse_true: np.ndarray = field(repr=False, default=None)

    def __post_init__(self):
        self.dims = tuple(int(n) for n in self.dims)
        n_total = int(np.prod(self.dims))
        if self.j1 is None or self.j2 is None:
            counts = np.bincount(self.indices, minlength=n_total).astype(np.float64)
            summed = np.bincount(
                self.indices, weights=self.signs.astype(np.float64), minlength=n_total
            )
            self.j2 = counts.reshape(self.dims, order="F")
            self.j1 = (self.theta * summed).reshape(self.dims, order="F")

    @property
    def count(self) -> int:
        return int(self.indices.size)


def onebit_observe(
    ltrue: np.ndarray,
    m: int,
    theta: float,
    sigma: float = 0.0,
    seed: int = 0,
    sparse_ratio: float = 0.0,
) -> ObservationSet:
    """Draw ``m`` dithered sign observations of ``ltrue``.

    Each sample picks an entry uniformly with replacement, adds Gaussian
    noise of deviation ``sigma`` and a uniform dither on
    ``[-theta, theta]``, and records the sign.  ``sparse_ratio`` > 0
    additionally corrupts that fraction of entries (uniform replacement
    values) before sampling, for the robust model.  Deterministic per
    seed; draw order: sparse support, sparse values, sample indices,
    noise, dithers.
    """
    ltrue = np.asarray(ltrue, dtype=np.float64)
    if theta <= 0:
        raise ValueError("dither level theta must be > 0")
    if m < 1:
        raise ValueError("need at least one observation")
    if sigma < 0:
        raise ValueError("noise deviation must be >= 0")
    rng = np.random.default_rng(seed)
    n_total = ltrue.size

    sparse_true = None
    signal = np.ravel(ltrue, order="F")
    if sparse_ratio > 0:
        n_imp = int(round(sparse_ratio * n_total))
        support = rng.choice(n_total, size=n_imp, replace=False)
        repl = rng.uniform(0.0, 1.0, size=n_imp)
        sflat = np.zeros(n_total)
        sflat[support] = repl - signal[support]
        sparse_true = sflat.reshape(ltrue.shape, order="F")
        signal = signal + sflat

    peak = float(np.max(np.abs(signal))) if n_total else 0.0
    if theta < peak + 3.0 * sigma:
        warnings.warn(
            f"dither level {theta:.4g} below signal range {peak:.4g} + 3 sigma; "
            "the sign estimator is biased in the clipped region",
            stacklevel=2,
        )

    idx = rng.integers(0, n_total, size=m)
    y = signal[idx]
    if sigma > 0:
        y = y + rng.normal(0.0, sigma, size=m)
    dither = rng.uniform(-theta, theta, size=m)
    signs = np.where(y + dither >= 0, 1, -1).astype(np.int8)
    return ObservationSet(
        dims=ltrue.shape, theta=theta, indices=idx.astype(np.int64),
        signs=signs, sparse_true=sparse_true,
    )


def naive_estimate(obs: ObservationSet) -> np.ndarray:
    """Per-entry mean of theta*sign (zero where unsampled); the baseline."""
    with np.errstate(invalid="ignore", divide="ignore"):
        est = np.where(obs.j2 > 0, obs.j1 / np.maximum(obs.j2, 1.0), 0.0)
    return est


def data_fit_update(j1, j2, m, mu, z, y, alpha, s=None):
    """Box-clipped closed form of the quadratic data-fit subproblem.

    Solves, elementwise, the stationarity equation
    ``(1/m) (J2 * L - J1 + J2 * S) + mu (L - Z) + Y = 0`` and clips to
    ``[-alpha, alpha]``; interior entries satisfy it exactly.
    """
    num = j1 + m * mu * z - m * y
    if s is not None:
        num = num - j2 * s
    return np.clip(num / (j2 + m * mu), -alpha, alpha)


def _onebit_admm(obs: ObservationSet, cfg: SolverConfig, alpha, robust: bool):
    t0 = time.perf_counter()
    cfg.validate()
    if obs.count < 1:
        raise ValueError("observation set is empty")
    alpha = float(obs.theta if alpha is None else alpha)
    if alpha <= 0:
        raise ValueError("box bound alpha must be > 0")
    dims = obs.dims
    lam = cfg.lam_for(dims)
    lam2 = cfg.lam2
    if robust:
        if lam2 is None or lam2 <= 0:
            raise ValueError("the robust one-bit solver requires lam2 > 0")
    modes = cfg.modes_for(dims)
    gset = GradientSet(dims, modes)
    gamma = len(modes)
    m = float(obs.count)
    j1, j2 = obs.j1, obs.j2
    observed = j2 > 0

    l = np.zeros(dims)
    s = np.zeros(dims)
    z = np.zeros(dims)
    g = {k: np.zeros(dims) for k in modes}
    lag = {k: np.zeros(dims) for k in modes}
    y = np.zeros(dims)
    mu = cfg.mu0

    report = SolveReport(residual_names=ONEBIT_RESIDUAL_NAMES)
    for it in range(cfg.max_iters):
        l_new = data_fit_update(j1, j2, m, mu, z, y, alpha, s=s if robust else None)

        if robust:
            s_new = np.zeros(dims)
            w = np.where(observed, j1 / np.maximum(j2, 1.0) - l_new, 0.0)
            for c in np.unique(j2[observed]):
                sel = j2 == c
                s_new[sel] = cfg.psi.prox(lam2 * m / float(c), w[sel])
            s = s_new

        num_b = l_new + y / mu
        gtil = {k: g[k] - lag[k] / mu for k in modes}
        z_new = solve_grad_system(num_b, gtil, gset)

        tau = lam / (gamma * mu)
        grad_z = {k: grad(z_new, k) for k in modes}
        g_new = {k: _threshold(grad_z[k] + lag[k] / mu, cfg, tau) for k in modes}

        y = y + mu * (l_new - z_new)
        for k in modes:
            lag[k] = lag[k] + mu * (grad_z[k] - g_new[k])

        rel = float(np.linalg.norm(l_new - l)) / max(float(np.linalg.norm(l)), 1e-30)
        report.residual_history.append([
            rel,
            float(np.max(np.abs(l_new - z_new))),
            max(float(np.max(np.abs(grad_z[k] - g_new[k]))) for k in modes),
            max(float(np.max(np.abs(g_new[k] - g[k]))) for k in modes),
            float(np.max(np.abs(l_new - l))),
        ])
        report.multiplier_history.append([
            float(np.linalg.norm(y)),
            max(float(np.linalg.norm(lag[k])) for k in modes),
        ])
        report.mu_history.append(mu)

        converged = it > 0 and rel <= cfg.tol
        l, z, g = l_new, z_new, g_new
        mu = min(cfg.mu_max, cfg.growth * mu)
        report.iterations += 1
        if converged:
            report.converged = True
            break

    report.objective = {"lambda": lam, "lambda2": lam2, "alpha": alpha}
    report.wall_clock = time.perf_counter() - t0
    if robust:
        return l, s, report
    return l, report


def gnobhtc(obs: ObservationSet, cfg: SolverConfig, alpha: float = None):
    """One-bit completion; returns ``(L, report)`` with ``|L| <= alpha``."""
    return _onebit_admm(obs, cfg, alpha, robust=False)


def gnobrhtc(obs: ObservationSet, cfg: SolverConfig, alpha: float = None):
    """Robust one-bit completion; returns ``(L, S, report)``.

    The sparse component S lives only on the sampled support; the
    ``lam2 -> inf`` limit recovers :func:`gnobhtc`.
    """
    return _onebit_admm(obs, cfg, alpha, robust=True)
