"""Radio layer: 3GPP urban-micro street-canyon path loss (LOS/NLOS branches
with the breakpoint-distance split and the NLOS max() construction), thermal
noise floor, and per-link reception decisions.

Reception is noise-limited: Mode 1 grants are collision-free within a channel
and the per-RSU channels are orthogonal, so no interference term appears in
the SNR.  A link is receivable iff its SNR clears the configured threshold
and the receiver sits inside the transmitter's sensing/communication range.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .geometry import Obstacle, Point, los_blocked

log = logging.getLogger(__name__)

SPEED_OF_LIGHT = 3.0e8
ENVIRONMENT_HEIGHT_M = 1.0  # effective environment height in the breakpoint term
MIN_DISTANCE_M = 1.0        # 2-D distance floor; shorter links are clamped
THERMAL_NOISE_DBM_HZ = -174.0
SHADOW_SIGMA_LOS_DB = 4.0
SHADOW_SIGMA_NLOS_DB = 7.82


@dataclass(frozen=True)
class RadioConfig:
    carrier_ghz: float = 5.9
    tx_power_dbm: float = 23.0
    rsu_height_m: float = 10.0
    vehicle_height_m: float = 1.5
    noise_figure_db: float = 9.0
    occupied_bandwidth_hz: float = 9.0e6
    snr_threshold_db: float = 5.0
    sensing_range_m: float = 150.0
    shadowing: bool = False

    def __post_init__(self) -> None:
        if not (0.5 <= self.carrier_ghz <= 100.0):
            raise ValueError("carrier frequency outside the model's 0.5-100 GHz validity")
        if self.occupied_bandwidth_hz <= 0:
            raise ValueError("occupied bandwidth must be positive")
        if self.sensing_range_m <= 0:
            raise ValueError("sensing range must be positive")


@dataclass(frozen=True)
class LinkEnd:
    """One endpoint of a radio link."""

    id: str
    position: Point
    height_m: float
    is_rsu: bool = False
    range_m: float | None = None  # RSU operating range; vehicles use cfg.sensing_range_m


@dataclass(frozen=True)
class LinkState:
    tx_id: str
    rx_id: str
    distance_m: float
    los: bool
    path_loss_db: float
    snr_db: float
    receivable: bool


_clamp_warned = False


def _warn_clamp(n: int) -> None:
    # co-located vehicles are routine (no spacing model); warn once, then debug
    global _clamp_warned
    if _clamp_warned:
        log.debug("clamping %d link distance(s) below the %.0f m model floor", n, MIN_DISTANCE_M)
    else:
        log.warning("clamping %d link distance(s) below the %.0f m model floor "
                    "(further clamps logged at debug level)", n, MIN_DISTANCE_M)
        _clamp_warned = True


def breakpoint_distance_m(cfg: RadioConfig, h_bs: float, h_ut: float) -> float:
    h_bs_eff = h_bs - ENVIRONMENT_HEIGHT_M
    h_ut_eff = h_ut - ENVIRONMENT_HEIGHT_M
    return 4.0 * h_bs_eff * h_ut_eff * (cfg.carrier_ghz * 1e9) / SPEED_OF_LIGHT


def path_loss_umi_array(
    d2d_m: np.ndarray, cfg: RadioConfig, los: np.ndarray | bool, h_bs: float, h_ut: float
) -> np.ndarray:
    """Street-canyon path loss in dB for 2-D distances ``d2d_m``.

    LOS uses the dual-slope model split at the breakpoint distance; NLOS is
    the standard's max(LOS, NLOS') so it never undercuts the LOS branch.
    Distances below the 1-m model floor are clamped (logged once per call).
    """
    d2d = np.asarray(d2d_m, dtype=float)
    if np.any(d2d < MIN_DISTANCE_M):
        _warn_clamp(int(np.sum(d2d < MIN_DISTANCE_M)))
        d2d = np.maximum(d2d, MIN_DISTANCE_M)
    dh = h_bs - h_ut
    d3d = np.sqrt(d2d * d2d + dh * dh)
    fc = cfg.carrier_ghz
    d_bp = breakpoint_distance_m(cfg, h_bs, h_ut)

    pl1 = 32.4 + 21.0 * np.log10(d3d) + 20.0 * math.log10(fc)
    pl2 = (32.4 + 40.0 * np.log10(d3d) + 20.0 * math.log10(fc)
           - 9.5 * math.log10(d_bp * d_bp + dh * dh))
    pl_los = np.where(d2d <= d_bp, pl1, pl2)

    if np.all(los):
        return pl_los
    pl_nlos_raw = (35.3 * np.log10(d3d) + 22.4 + 21.3 * math.log10(fc)
                   - 0.3 * (h_ut - 1.5))
    pl_nlos = np.maximum(pl_los, pl_nlos_raw)
    return np.where(los, pl_los, pl_nlos)


def path_loss_umi(
    d2d_m: float,
    cfg: RadioConfig,
    los: bool,
    h_bs: float | None = None,
    h_ut: float | None = None,
) -> float:
    """Scalar street-canyon path loss; heights default to the RSU/vehicle pair."""
    if h_bs is None:
        h_bs = cfg.rsu_height_m
    if h_ut is None:
        h_ut = cfg.vehicle_height_m
    return float(path_loss_umi_array(np.array([d2d_m]), cfg, los, h_bs, h_ut)[0])


def noise_floor_dbm(cfg: RadioConfig) -> float:
    return THERMAL_NOISE_DBM_HZ + 10.0 * math.log10(cfg.occupied_bandwidth_hz) + cfg.noise_figure_db


def shadow_sigma_db(los: bool) -> float:
    return SHADOW_SIGMA_LOS_DB if los else SHADOW_SIGMA_NLOS_DB


def link_heights(tx: LinkEnd, rx: LinkEnd) -> tuple[float, float]:
    """(h_bs, h_ut) for a link: the RSU end plays the base-station role.

    Symmetric by construction: swapping tx and rx yields the same pair, so
    path loss does not depend on link direction.
    """
    if tx.is_rsu or rx.is_rsu:
        rsu = tx if tx.is_rsu else rx
        other = rx if tx.is_rsu else tx
        return rsu.height_m, other.height_m
    return tx.height_m, rx.height_m


def evaluate_link(
    tx: LinkEnd,
    rx: LinkEnd,
    obstacles: Iterable[Obstacle],
    cfg: RadioConfig,
    rng: np.random.Generator | None = None,
    exclude_owner_ids: Sequence[str] | None = None,
) -> LinkState:
    """Classify one link: LOS from scene blockage, path loss, SNR, receivability.

    ``rng`` supplies the optional log-normal shadowing draw and is only
    consulted when cfg.shadowing is set.
    """
    if exclude_owner_ids is None:
        exclude_owner_ids = (tx.id, rx.id)
    distance = math.dist(tx.position, rx.position)
    los = not los_blocked(tx.position, rx.position, obstacles, exclude_owner_ids)
    h_bs, h_ut = link_heights(tx, rx)
    pl = path_loss_umi(distance, cfg, los, h_bs, h_ut)
    if cfg.shadowing and rng is not None:
        pl += float(rng.normal(0.0, shadow_sigma_db(los)))
    snr = cfg.tx_power_dbm - pl - noise_floor_dbm(cfg)
    reach = tx.range_m if (tx.is_rsu and tx.range_m is not None) else cfg.sensing_range_m
    receivable = snr >= cfg.snr_threshold_db and distance <= reach
    return LinkState(
        tx_id=tx.id,
        rx_id=rx.id,
        distance_m=distance,
        los=los,
        path_loss_db=pl,
        snr_db=snr,
        receivable=receivable,
    )
