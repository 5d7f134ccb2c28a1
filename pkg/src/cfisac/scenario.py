"""Network geometry, large-scale fading and system configuration.

All powers and noise variances are carried in linear scale (mW); dB values
are converted at interface boundaries only (config files, CLI flags).
"""

from __future__ import annotations

import configparser
import hashlib
import math
from dataclasses import dataclass, field, replace

import numpy as np


class InfeasibleGeometryError(RuntimeError):
    """Raised when UE placement cannot satisfy the minimum-distance rule."""


def db_to_linear(x_db):
    """10^(x/10)."""
    return 10.0 ** (np.asarray(x_db, dtype=float) / 10.0) if np.ndim(x_db) else 10.0 ** (x_db / 10.0)


def linear_to_db(x):
    """10*log10(x); raises on nonpositive input."""
    arr = np.asarray(x, dtype=float)
    if np.any(arr <= 0):
        raise ValueError("linear_to_db requires strictly positive input")
    out = 10.0 * np.log10(arr)
    return float(out) if np.ndim(x) == 0 else out


@dataclass(frozen=True)
class SystemConfig:
    """Scalar system parameters.

    L, K         -- number of APs / single-antenna UEs
    Nt, Nr       -- transmit / receive antennas per AP
    T            -- radar/communication frame length in symbols
    tau_c, tau_p -- coherence block length and pilot length in symbols
    pp           -- pilot symbol power (mW)
    Pt           -- total transmit power budget over all APs (mW)
    sigma2_c/s   -- communication / sensing noise variance (mW)
    nu           -- path-loss exponent
    shadow_db    -- shadow fading std deviation in dB
    r_h          -- reference (and minimum, in "resample" mode) distance (m)
    area_side    -- side of the square deployment area (m)
    beta_s       -- sensing channel gain magnitude parameter
    min_dist_mode -- "resample": reject UE draws closer than r_h to any AP;
                     "reference": r_h is the path-loss reference only
    """

    L: int = 8
    K: int = 4
    Nt: int = 4
    Nr: int = 4
    T: int = 30
    tau_c: int = 200
    tau_p: int = 4
    pp: float = 100.0
    Pt: float = 1.0
    sigma2_c: float = 1e-3
    sigma2_s: float = 1e-3
    nu: float = 3.2
    shadow_db: float = 7.0
    r_h: float = 100.0
    area_side: float = 250.0
    beta_s: float = 1e-2
    min_dist_mode: str = "resample"
    resample_cap: int = 10 ** 6

    def __post_init__(self):
        if min(self.L, self.K, self.Nt, self.Nr, self.T) < 1:
            raise ValueError("L, K, Nt, Nr, T must all be >= 1")
        if not (1 <= self.tau_p <= self.tau_c):
            raise ValueError("need 1 <= tau_p <= tau_c")
        for name in ("pp", "Pt", "sigma2_c", "sigma2_s"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive (linear scale)")
        if self.min_dist_mode not in ("resample", "reference"):
            raise ValueError("min_dist_mode must be 'resample' or 'reference'")

    @property
    def tau_bar(self):
        """Rate prelog (tau_c - tau_p) / tau_c."""
        return (self.tau_c - self.tau_p) / self.tau_c

    def with_(self, **kwargs) -> "SystemConfig":
        return replace(self, **kwargs)


@dataclass
class Scenario:
    """One realized network: topology, large-scale statistics, sensing geometry.

    xi and eps are the per-AP MMSE estimate / estimation-error variances and
    are filled in by channel.attach_mmse_stats (None until then).
    Instances are treated as immutable once built.
    """

    config: SystemConfig
    ap_pos: np.ndarray          # (L, 2) metres
    ue_pos: np.ndarray          # (K, 2)
    target_pos: np.ndarray      # (2,)
    beta: np.ndarray            # (K, L) large-scale coefficients, linear
    theta: np.ndarray           # (L,) echo AoA at each AP, rad
    phi: np.ndarray             # (L,) probing AoD at each AP, rad
    alpha: np.ndarray           # (L, L) complex gains, alpha[l, p]: tx l -> rx p
    xi: np.ndarray | None = None
    eps: np.ndarray | None = None

    @property
    def complete(self):
        return self.xi is not None and self.eps is not None


def _fold_angle(angle):
    """Map an arbitrary bearing into [-pi/2, pi/2] (ULA front/back ambiguity)."""
    return np.arcsin(np.sin(angle))


def generate_topology(config: SystemConfig, seed) -> Scenario:
    """Draw AP/UE/target positions and large-scale coefficients.

    AP and UE positions are uniform over the square. In "resample" mode UE
    positions are redrawn until every AP-UE distance is at least r_h; if the
    total number of candidate draws exceeds config.resample_cap an
    InfeasibleGeometryError is raised (the area cannot host the
    minimum-distance rule for this AP draw).

    beta[k, l] = z / (r / r_h)^nu with 10*log10(z) ~ N(0, shadow_db^2).
    All sensing cross gains are set to alpha = beta_s / sqrt(2) * (1 + 1j).
    The target is placed uniformly in the area; since each AP transmits and
    receives on co-located arrays, phi[l] == theta[l].
    """
    rng = np.random.default_rng(seed)
    L, K = config.L, config.K
    ap_pos = rng.uniform(0.0, config.area_side, size=(L, 2))

    if config.min_dist_mode == "resample":
        ue_pos = np.empty((K, 2))
        placed = 0
        attempts = 0
        batch = 4096
        while placed < K:
            cand = rng.uniform(0.0, config.area_side, size=(batch, 2))
            attempts += batch
            d = np.linalg.norm(cand[:, None, :] - ap_pos[None, :, :], axis=2)
            ok = cand[np.all(d >= config.r_h, axis=1)]
            take = min(len(ok), K - placed)
            if take:
                ue_pos[placed:placed + take] = ok[:take]
                placed += take
            if placed < K and attempts >= config.resample_cap:
                raise InfeasibleGeometryError(
                    f"could not place {K} UEs at >= {config.r_h} m from all "
                    f"{L} APs within {config.resample_cap} draws; r_h is too "
                    f"large for a {config.area_side} m square"
                )
    else:
        ue_pos = rng.uniform(0.0, config.area_side, size=(K, 2))

    dist = np.linalg.norm(ue_pos[:, None, :] - ap_pos[None, :, :], axis=2)
    dist = np.maximum(dist, 1.0)  # numerical floor, relevant in "reference" mode only
    shadow = 10.0 ** (config.shadow_db * rng.standard_normal((K, L)) / 10.0)
    beta = shadow / (dist / config.r_h) ** config.nu

    target = rng.uniform(0.0, config.area_side, size=2)
    bearing = np.arctan2(target[1] - ap_pos[:, 1], target[0] - ap_pos[:, 0])
    theta = _fold_angle(bearing)
    alpha = np.full((L, L), config.beta_s / math.sqrt(2) * (1 + 1j), dtype=complex)

    return Scenario(
        config=config,
        ap_pos=ap_pos,
        ue_pos=ue_pos,
        target_pos=target,
        beta=beta,
        theta=theta,
        phi=theta.copy(),
        alpha=alpha,
    )


# ---------------------------------------------------------------------------
# Configuration files.  One INI file with a [system] section holding every
# SystemConfig field (powers in dBm, Pt either directly or via snr_db) and an
# optional [experiment] section with seeds/trial counts.  See README for the
# documented schema.
# ---------------------------------------------------------------------------

_SYSTEM_INT_KEYS = ("L", "K", "Nt", "Nr", "T", "tau_c", "tau_p", "resample_cap")
_SYSTEM_FLOAT_KEYS = ("nu", "shadow_db", "r_h", "area_side", "beta_s")


def load_config(path):
    """Parse an INI config file; returns (SystemConfig, experiment dict)."""
    parser = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    read = parser.read(path)
    if not read:
        raise FileNotFoundError(path)
    sys_raw = parser["system"] if parser.has_section("system") else {}
    kwargs = {}
    for key in _SYSTEM_INT_KEYS:
        if key in sys_raw:
            kwargs[key] = int(sys_raw[key])
    for key in _SYSTEM_FLOAT_KEYS:
        if key in sys_raw:
            kwargs[key] = float(sys_raw[key])
    if "min_dist_mode" in sys_raw:
        kwargs["min_dist_mode"] = sys_raw["min_dist_mode"].strip()

    if "pp_dbm" in sys_raw:
        kwargs["pp"] = db_to_linear(float(sys_raw["pp_dbm"]))
    elif "pp" in sys_raw:
        kwargs["pp"] = float(sys_raw["pp"])
    for name in ("sigma2_c", "sigma2_s"):
        if f"{name}_dbm" in sys_raw:
            kwargs[name] = db_to_linear(float(sys_raw[f"{name}_dbm"]))
        elif name in sys_raw:
            kwargs[name] = float(sys_raw[name])
    if "Pt_dbm" in sys_raw and "snr_db" in sys_raw:
        raise ValueError("specify either Pt_dbm or snr_db, not both")
    if "Pt_dbm" in sys_raw:
        kwargs["Pt"] = db_to_linear(float(sys_raw["Pt_dbm"]))
    elif "snr_db" in sys_raw:
        sigma2_c = kwargs.get("sigma2_c", SystemConfig().sigma2_c)
        kwargs["Pt"] = sigma2_c * db_to_linear(float(sys_raw["snr_db"]))
    elif "Pt" in sys_raw:
        kwargs["Pt"] = float(sys_raw["Pt"])

    config = SystemConfig(**kwargs)

    experiment = {}
    if parser.has_section("experiment"):
        for key, value in parser["experiment"].items():
            experiment[key] = value.strip()
    return config, experiment


EXAMPLE_CONFIG = """\
[system]
L = 8
K = 4
Nt = 4
Nr = 4
T = 30
tau_c = 200
tau_p = 4
pp_dbm = 20
sigma2_c_dbm = -30
sigma2_s_dbm = -30
snr_db = 30          ; Pt = sigma2_c * 10^(snr_db/10); or give Pt_dbm instead
nu = 3.2
shadow_db = 7.0
r_h = 100.0
area_side = 250.0
beta_s = 0.01
min_dist_mode = reference   ; "resample" enforces all AP-UE distances >= r_h

[experiment]
seed = 1
small_trials = 50
large_trials = 5
"""


def write_example_config(path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(EXAMPLE_CONFIG)


def config_hash(config: SystemConfig) -> str:
    """Short stable digest of a configuration, for CSV provenance columns."""
    items = sorted(config.__dict__.items())
    text = ";".join(f"{k}={v!r}" for k, v in items)
    return hashlib.sha256(text.encode()).hexdigest()[:12]
