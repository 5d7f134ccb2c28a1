"""ULA steering vectors, the MRT-plus-sensing precoder, and power accounting."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .scenario import Scenario

#: Default convention for the phase-derivative factors: entry n (1-based)
#: carries -j*pi*(n-1)*cos(angle), matching the (n-1) phase ramp of
#: steering_vector.  "one_based" uses factors 1..N instead.
DERIVATIVE_CONVENTION = "zero_based"


@dataclass(frozen=True)
class PowerAllocation:
    """Per-stream power factors: gamma for data beams, eta for probing beams."""

    gamma: np.ndarray  # (K, L) nonnegative
    eta: np.ndarray    # (K, L) nonnegative

    def __post_init__(self):
        object.__setattr__(self, "gamma", np.asarray(self.gamma, dtype=float))
        object.__setattr__(self, "eta", np.asarray(self.eta, dtype=float))
        if self.gamma.shape != self.eta.shape:
            raise ValueError("gamma and eta must have the same (K, L) shape")
        if np.any(self.gamma < 0) or np.any(self.eta < 0):
            raise ValueError("power factors must be nonnegative")

    def scaled(self, factor) -> "PowerAllocation":
        return PowerAllocation(self.gamma * factor, self.eta * factor)


@dataclass(frozen=True)
class SteeringSet:
    """Transmit/receive steering vectors of every AP and their angle derivatives."""

    a: np.ndarray      # (L, Nt) transmit steering at phi
    b: np.ndarray      # (L, Nr) receive steering at theta
    a_dot: np.ndarray  # (L, Nt)
    b_dot: np.ndarray  # (L, Nr)


def steering_vector(n_antennas: int, angle: float) -> np.ndarray:
    """Half-wavelength ULA response; entry n (1-based) is exp(-j*pi*(n-1)*sin(angle))."""
    n = np.arange(n_antennas)
    return np.exp(-1j * np.pi * n * np.sin(angle))


def steering_derivative(n_antennas: int, angle: float,
                        convention: str | None = None) -> np.ndarray:
    """Derivative of steering_vector with respect to the angle."""
    convention = convention or DERIVATIVE_CONVENTION
    if convention == "zero_based":
        factors = np.arange(n_antennas)
    elif convention == "one_based":
        factors = np.arange(1, n_antennas + 1)
    else:
        raise ValueError(f"unknown derivative convention {convention!r}")
    return -1j * np.pi * factors * np.cos(angle) * steering_vector(n_antennas, angle)


def build_steering_set(scenario: Scenario, convention: str | None = None) -> SteeringSet:
    cfg = scenario.config
    a = np.stack([steering_vector(cfg.Nt, ph) for ph in scenario.phi])
    b = np.stack([steering_vector(cfg.Nr, th) for th in scenario.theta])
    a_dot = np.stack([steering_derivative(cfg.Nt, ph, convention) for ph in scenario.phi])
    b_dot = np.stack([steering_derivative(cfg.Nr, th, convention) for th in scenario.theta])
    return SteeringSet(a=a, b=b, a_dot=a_dot, b_dot=b_dot)


def build_precoder(h_hat_l, gamma_l, eta_l, a_l) -> np.ndarray:
    """Per-AP precoding matrix; column k is sqrt(gamma_k)*h_hat_k + sqrt(eta_k)*a.

    h_hat_l: (Nt, K) channel estimates at this AP, gamma_l/eta_l: (K,) power
    factors, a_l: (Nt,) transmit steering vector.
    """
    h_hat_l = np.asarray(h_hat_l)
    gamma_l = np.asarray(gamma_l, dtype=float)
    eta_l = np.asarray(eta_l, dtype=float)
    if np.any(gamma_l < 0) or np.any(eta_l < 0):
        raise ValueError("power factors must be nonnegative")
    return h_hat_l * np.sqrt(gamma_l)[None, :] + np.outer(a_l, np.sqrt(eta_l))


def expected_total_power(scenario: Scenario, alloc: PowerAllocation) -> float:
    """Average transmit power summed over APs: Nt * sum_l (xi_l^T gamma_l + ||eta_l||_1)."""
    if not scenario.complete:
        raise ValueError("scenario has no MMSE statistics")
    cfg = scenario.config
    return float(cfg.Nt * (np.sum(scenario.xi * alloc.gamma) + np.sum(alloc.eta)))


def equal_power_allocation(scenario: Scenario, split=0.5, xi_norm="sum") -> PowerAllocation:
    """Uniform power factors sharing the budget between data and probing beams.

    eta = split*Pt / (Nt*L*K) for every stream; gamma = (1-split)*Pt / (Nt*S)
    where S aggregates xi per xi_norm: "sum" uses sum_k sum_l xi (the average
    total power is then exactly Pt), "mean_ap" divides that by L, "per_ap"
    normalises each AP by its own sum_k xi[k, l].
    """
    cfg = scenario.config
    eta = np.full((cfg.K, cfg.L), split * cfg.Pt / (cfg.Nt * cfg.L * cfg.K))
    comm = (1.0 - split) * cfg.Pt
    if xi_norm == "sum":
        gamma = np.full((cfg.K, cfg.L), comm / (cfg.Nt * np.sum(scenario.xi)))
    elif xi_norm == "mean_ap":
        gamma = np.full((cfg.K, cfg.L), comm / (cfg.Nt * np.sum(scenario.xi) / cfg.L))
    elif xi_norm == "per_ap":
        per_ap = np.sum(scenario.xi, axis=0)  # (L,)
        gamma = np.tile(comm / (cfg.Nt * per_ap), (cfg.K, 1))
    else:
        raise ValueError(f"unknown xi_norm {xi_norm!r}")
    return PowerAllocation(gamma=gamma, eta=eta)
