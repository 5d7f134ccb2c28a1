"""Pilots, MMSE channel estimation statistics, and Monte Carlo channel draws."""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .scenario import Scenario, SystemConfig, generate_topology


@dataclass(frozen=True)
class PilotBook:
    """Pilot sequences shared by all APs.

    pilots[:, k] is the unit-norm length-tau_p sequence of UE k; gram[j, k]
    is |psi_j^H psi_k|^2, which is 1 when two UEs share a pilot and 0 when
    their pilots are orthogonal.
    """

    pilots: np.ndarray  # (tau_p, K) complex
    gram: np.ndarray    # (K, K) real


def assign_pilots(K: int, tau_p: int) -> PilotBook:
    """Round-robin assignment from an orthonormal basis of dimension tau_p.

    UE k gets basis vector k mod tau_p, so pilots are mutually orthogonal
    whenever tau_p >= K.
    """
    if tau_p < 1:
        raise ValueError("tau_p must be >= 1")
    # normalized DFT basis
    idx = np.arange(tau_p)
    basis = np.exp(-2j * np.pi * np.outer(idx, idx) / tau_p) / np.sqrt(tau_p)
    cols = basis[:, np.arange(K) % tau_p]
    inner = cols.conj().T @ cols
    gram = np.abs(inner) ** 2
    # clean up roundoff so shared/orthogonal pilots test exactly
    gram[gram < 1e-24] = 0.0
    return PilotBook(pilots=cols, gram=gram)


def mmse_stats(beta, pilots: PilotBook, tau_p, pp, sigma2_c):
    """Per-entry variances (xi, eps) of the MMSE channel estimate and error.

    xi[k, l] = tau_p*pp*beta[k,l]^2 / (tau_p*pp * sum_j beta[j,l]*gram[j,k] + sigma2_c)
    eps = beta - xi
    """
    beta = np.asarray(beta, dtype=float)
    denom = tau_p * pp * np.einsum("jl,jk->kl", beta, pilots.gram) + sigma2_c
    xi = tau_p * pp * beta ** 2 / denom
    eps = beta - xi
    return xi, eps


def attach_mmse_stats(scenario: Scenario, pilots: PilotBook | None = None) -> Scenario:
    """Return a copy of the scenario with xi/eps filled in."""
    cfg = scenario.config
    if pilots is None:
        pilots = assign_pilots(cfg.K, cfg.tau_p)
    xi, eps = mmse_stats(scenario.beta, pilots, cfg.tau_p, cfg.pp, cfg.sigma2_c)
    return replace(scenario, xi=xi, eps=eps)


def build_scenario(config: SystemConfig, seed, pilots: PilotBook | None = None) -> Scenario:
    """Topology draw plus MMSE statistics in one step."""
    return attach_mmse_stats(generate_topology(config, seed), pilots)


@dataclass
class ChannelRealization:
    """One small-scale draw: true channels, estimates, errors, data symbols."""

    h: np.ndarray       # (K, L, Nt) complex
    h_hat: np.ndarray   # (K, L, Nt)
    e: np.ndarray       # (K, L, Nt)
    s: np.ndarray       # (K, T) unit-variance data symbols
    n_c: np.ndarray     # (K, T) receiver noise


def _cn_samples(rng, var, shape):
    """Circularly-symmetric complex Gaussian entries with per-entry variance var."""
    scale = np.sqrt(np.asarray(var, dtype=float) / 2.0)
    return scale * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))


def sample_realization(scenario: Scenario, seed, symbol_kind="qpsk") -> ChannelRealization:
    """Draw estimates and errors from their MMSE statistics and recombine.

    h_hat[k,l] ~ CN(0, xi[k,l] I) and e[k,l] ~ CN(0, eps[k,l] I), drawn
    independently, so h = h_hat + e ~ CN(0, beta[k,l] I).  Data symbols are
    unit-modulus QPSK by default ("gaussian" selects CN(0,1) symbols).
    """
    if not scenario.complete:
        raise ValueError("scenario has no MMSE statistics; call attach_mmse_stats first")
    cfg = scenario.config
    rng = np.random.default_rng(seed)
    shape = (cfg.K, cfg.L, cfg.Nt)
    h_hat = _cn_samples(rng, scenario.xi[:, :, None], shape)
    e = _cn_samples(rng, scenario.eps[:, :, None], shape)
    if symbol_kind == "qpsk":
        s = (rng.choice([-1.0, 1.0], size=(cfg.K, cfg.T))
             + 1j * rng.choice([-1.0, 1.0], size=(cfg.K, cfg.T))) / np.sqrt(2.0)
    elif symbol_kind == "gaussian":
        s = _cn_samples(rng, 1.0, (cfg.K, cfg.T))
    else:
        raise ValueError(f"unknown symbol kind {symbol_kind!r}")
    n_c = _cn_samples(rng, cfg.sigma2_c, (cfg.K, cfg.T))
    return ChannelRealization(h=h_hat + e, h_hat=h_hat, e=e, s=s, n_c=n_c)


def save_realization(real: ChannelRealization, path):
    """Persist a realization as an .npz record (keys h, h_hat, e, s, n_c)."""
    np.savez(path, h=real.h, h_hat=real.h_hat, e=real.e, s=real.s, n_c=real.n_c)


def load_realization(path) -> ChannelRealization:
    data = np.load(path)
    return ChannelRealization(h=data["h"], h_hat=data["h_hat"], e=data["e"],
                              s=data["s"], n_c=data["n_c"])


def simulate_pilot_training(scenario: Scenario, pilots: PilotBook, seed,
                            n_trials=100_000, chunk=20_000):
    """Empirical (xi, eps) from simulated uplink pilot training.

    Draws true Rayleigh channels, forms the despread pilot observation at
    every AP, applies the per-entry MMSE estimator, and averages the squared
    estimate / error norms.  Used as an independent check of mmse_stats.
    """
    cfg = scenario.config
    rng = np.random.default_rng(seed)
    beta = scenario.beta  # (K, L)
    K, L, N = cfg.K, cfg.L, cfg.Nt
    # inner[j, k] = psi_k^H psi_j : despreading UE j's contribution onto pilot k
    inner = (pilots.pilots.conj().T @ pilots.pilots).T
    g = np.sqrt(cfg.tau_p * cfg.pp)
    denom = cfg.tau_p * cfg.pp * np.einsum("jl,jk->kl", beta, pilots.gram) + cfg.sigma2_c
    w = g * beta / denom  # MMSE scaling per (k, l)

    xi_acc = np.zeros((K, L))
    eps_acc = np.zeros((K, L))
    done = 0
    while done < n_trials:
        t = min(chunk, n_trials - done)
        h = _cn_samples(rng, beta[None, :, :, None], (t, K, L, N))
        noise = _cn_samples(rng, cfg.sigma2_c, (t, K, L, N))
        # r[t, k, l, :] = g * sum_j inner[j, k] h[t, j, l, :] + noise
        r = g * np.einsum("jk,tjln->tkln", inner, h) + noise
        h_hat = w[None, :, :, None] * r
        xi_acc += np.sum(np.abs(h_hat) ** 2, axis=(0, 3)) / N
        eps_acc += np.sum(np.abs(h - h_hat) ** 2, axis=(0, 3)) / N
        done += t
    return xi_acc / n_trials, eps_acc / n_trials
