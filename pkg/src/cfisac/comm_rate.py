"""Closed-form downlink achievable rate and its Monte Carlo estimator.

The closed form splits the effective SINR of UE k into a coherent desired
signal power, a beamforming-uncertainty variance, and inter-UE interference
powers; the Monte Carlo path estimates the same three moments from sampled
channel realizations and per-realization precoders.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .precoding import PowerAllocation
from .scenario import Scenario


@dataclass(frozen=True)
class SinrBreakdown:
    """SINR components of one UE.

    ui[j] is the interference power from stream j (ui[k] itself is zero);
    sinr = ds / (bu + sum_{j != k} ui[j] + noise), rate includes the prelog.
    """

    ds: float
    bu: float
    ui: np.ndarray
    noise: float
    sinr: float
    rate: float


def _denominator_terms(scenario: Scenario, alloc: PowerAllocation, k: int) -> np.ndarray:
    """d[j] = Nt * (sum_l beta[k,l]*xi[j,l]*gamma[j,l] + sum_l beta[k,l]*eta[j,l])."""
    cfg = scenario.config
    beta_k = scenario.beta[k]  # (L,)
    return cfg.Nt * (
        (beta_k[None, :] * scenario.xi * alloc.gamma).sum(axis=1)
        + (beta_k[None, :] * alloc.eta).sum(axis=1)
    )


def closed_form_breakdown(scenario: Scenario, alloc: PowerAllocation, k: int) -> SinrBreakdown:
    """Closed-form SINR decomposition for UE k."""
    if not scenario.complete:
        raise ValueError("scenario has no MMSE statistics")
    cfg = scenario.config
    ds = cfg.Nt ** 2 * float(scenario.xi[k] @ np.sqrt(alloc.gamma[k])) ** 2
    d = _denominator_terms(scenario, alloc, k)
    bu = float(d[k])
    ui = d.copy()
    ui[k] = 0.0
    noise = cfg.sigma2_c
    sinr = ds / (bu + ui.sum() + noise)
    rate = cfg.tau_bar * np.log2(1.0 + sinr)
    return SinrBreakdown(ds=ds, bu=bu, ui=ui, noise=noise, sinr=float(sinr), rate=float(rate))


def closed_form_rates(scenario: Scenario, alloc: PowerAllocation) -> np.ndarray:
    """Per-UE closed-form rates (bits/s/Hz)."""
    return np.array([closed_form_breakdown(scenario, alloc, k).rate
                     for k in range(scenario.config.K)])


def _rates_from_gains(v, sigma2, tau_bar):
    """Per-UE rates from per-trial gains v[t, k, j]."""
    K = v.shape[1]
    ds_mean = v[:, np.arange(K), np.arange(K)].mean(axis=0)          # (K,)
    bu = np.var(v[:, np.arange(K), np.arange(K)], axis=0)            # E|z - Ez|^2
    second = np.mean(np.abs(v) ** 2, axis=0)                         # (K, K)
    rates = np.empty(K)
    for k in range(K):
        ui = second[k].sum() - second[k, k]
        sinr = np.abs(ds_mean[k]) ** 2 / (bu[k] + ui + sigma2)
        rates[k] = tau_bar * np.log2(1.0 + sinr)
    return rates


def monte_carlo_rates(scenario: Scenario, alloc: PowerAllocation, n_trials: int,
                      seed, n_boot: int = 200):
    """Monte Carlo per-UE rate estimates with bootstrap standard errors.

    Each trial draws fresh channel estimates/errors, rebuilds the precoders
    from that trial's estimates, and records the combined receive gains
    z[k, j] = sum_l h_k,l^H f_j,l.  The desired-signal power is the squared
    sample mean of z[k, k], the beamforming-uncertainty power its sample
    variance, and interference powers the sample second moments of z[k, j].
    Standard errors come from resampling whole trials with replacement.

    Returns (rates, stderrs), both shape (K,).
    """
    if n_trials < 1:
        raise ValueError("n_trials must be >= 1")
    if not scenario.complete:
        raise ValueError("scenario has no MMSE statistics")
    cfg = scenario.config
    ss = np.random.SeedSequence(seed)
    trial_seed, boot_seed = ss.spawn(2)
    rng = np.random.default_rng(trial_seed)
    shape = (n_trials, cfg.K, cfg.L, cfg.Nt)
    half = np.sqrt(np.asarray(scenario.xi)[None, :, :, None] / 2.0)
    h_hat = half * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))
    half = np.sqrt(np.asarray(scenario.eps)[None, :, :, None] / 2.0)
    e = half * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))

    from .precoding import steering_vector

    a = np.stack([steering_vector(cfg.Nt, ph) for ph in scenario.phi])
    v = _kernels.mc_pair_gains(h_hat + e, h_hat, np.sqrt(alloc.gamma),
                               np.sqrt(alloc.eta), a)

    rates = _rates_from_gains(v, cfg.sigma2_c, cfg.tau_bar)

    boot_rng = np.random.default_rng(boot_seed)
    boot = np.empty((n_boot, cfg.K))
    for b in range(n_boot):
        idx = boot_rng.integers(0, n_trials, size=n_trials)
        boot[b] = _rates_from_gains(v[idx], cfg.sigma2_c, cfg.tau_bar)
    stderr = boot.std(axis=0, ddof=1)
    return rates, stderr


def monte_carlo_rate(scenario: Scenario, alloc: PowerAllocation, k: int,
                     n_trials: int, seed, n_boot: int = 200):
    """Monte Carlo rate estimate and standard error for a single UE."""
    rates, stderr = monte_carlo_rates(scenario, alloc, n_trials, seed, n_boot)
    return float(rates[k]), float(stderr[k])
