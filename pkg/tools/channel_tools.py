"""
Channel model tools - large-scale fading, small-scale fading and drop realization

Both UE links (BS-UE direct and IRS-UE) use three-slope COST-Hata path loss
with independent log-normal shadowing and Rayleigh small-scale fading. The
BS-IRS link is a deliberately placed LOS link: free-space gain, no shadowing,
Rician fading around a rank-one ULA steering component.
"""
from dataclasses import dataclass
from typing import Optional, Tuple, Union

import numpy as np

from config.sim_config import BsIrsLinkParams, PathLossParams, SimConfig
from tools.errors import CollocatedUserError, DomainError, ShapeError
from tools.link_budget import db_to_linear

ArrayOrFloat = Union[float, np.ndarray]


@dataclass(frozen=True)
class ChannelSet:
    """
    One drop's channel realization

    f: (K, N_b) direct BS-UE channels, one row per user
    g: (K, N) IRS-UE channels, one row per user
    h_mat: (N, N_b) BS-IRS channel; row n is h_n^T
    """
    f: np.ndarray
    g: np.ndarray
    h_mat: np.ndarray
    sigma_f2: np.ndarray
    sigma_g2: np.ndarray
    sigma_h2: float
    bs_distance_m: Optional[np.ndarray] = None
    irs_distance_m: Optional[np.ndarray] = None

    @property
    def n_users(self) -> int:
        return self.f.shape[0]


def cost_hata_path_loss(distance_km: ArrayOrFloat, params: PathLossParams) -> ArrayOrFloat:
    """
    Three-slope COST-Hata path loss in dB (a non-positive gain)

    Args:
        distance_km: Link distance in km, scalar or array
        params: Constant and break points

    Returns:
        Path loss with the same shape as distance_km
    """
    x = np.asarray(distance_km, dtype=float)
    if np.any(~(x > 0)):
        raise DomainError(f"distance must be positive, got {distance_km}")

    x0, x1 = params.x0_km, params.x1_km
    upper = -params.p0_db - 35.0 * np.log10(x)
    middle = -params.p0_db - 15.0 * np.log10(x1) - 20.0 * np.log10(x)
    flat = -params.p0_db - 15.0 * np.log10(x1) - 20.0 * np.log10(x0)
    loss = np.where(x > x1, upper, np.where(x > x0, middle, flat))

    return float(loss) if loss.ndim == 0 else loss


def bs_irs_large_scale(distance_m: float, params: BsIrsLinkParams) -> float:
    """Free-space BS-IRS power gain L0 * x^-alpha, L0 referenced to 1 m"""
    if not distance_m >= 1.0:
        raise DomainError(f"BS-IRS distance must be at least the 1 m reference, got {distance_m}")
    return float(db_to_linear(params.l0_db) * distance_m ** (-params.alpha))


def large_scale_variance(pathloss_db: ArrayOrFloat, shadow_db: ArrayOrFloat) -> ArrayOrFloat:
    value = db_to_linear(np.asarray(pathloss_db) + np.asarray(shadow_db))
    return float(value) if value.ndim == 0 else value


def draw_shadowing(rng: np.random.Generator, sigma_sd_db: float, size=None):
    """Log-normal shadowing sample(s) in dB, N(0, sigma_sd^2)"""
    if sigma_sd_db < 0:
        raise DomainError(f"shadowing std must be non-negative, got {sigma_sd_db}")
    return rng.normal(0.0, sigma_sd_db, size=size)


def draw_rayleigh_vector(rng: np.random.Generator, length: int, variance: float) -> np.ndarray:
    """
    i.i.d. CN(0, variance) entries; each real/imaginary part has variance/2
    """
    if length < 0 or variance < 0:
        raise DomainError(f"need length >= 0 and variance >= 0, got {length}, {variance}")
    scale = np.sqrt(variance / 2.0)
    return scale * (rng.standard_normal(length) + 1j * rng.standard_normal(length))


def steering_vector(n_elems: int, angle: float) -> np.ndarray:
    """Half-wavelength ULA response exp(j*pi*m*sin(angle)), m = 0..n-1"""
    if n_elems < 1:
        raise DomainError(f"array needs at least one element, got {n_elems}")
    return np.exp(1j * np.pi * np.arange(n_elems) * np.sin(angle))


def draw_rician_matrix(
    rng: np.random.Generator,
    n: int,
    nb: int,
    sigma_h2: float,
    gamma: float,
    los: np.ndarray,
) -> np.ndarray:
    """
    Rician BS-IRS matrix
    H = sqrt(G*s/(G+1)) * H_LOS + sqrt(s/(G+1)) * H_NLOS, H_NLOS ~ CN(0, 1)
    """
    if gamma < 0 or sigma_h2 < 0:
        raise DomainError(f"need gamma >= 0 and sigma_h2 >= 0, got {gamma}, {sigma_h2}")
    los = np.asarray(los)
    if los.shape != (n, nb):
        raise ShapeError(f"LOS component has shape {los.shape}, expected {(n, nb)}")

    nlos = (rng.standard_normal((n, nb)) + 1j * rng.standard_normal((n, nb))) / np.sqrt(2.0)
    if np.isinf(gamma):
        return np.sqrt(sigma_h2) * los.astype(complex)
    los_weight = np.sqrt(gamma * sigma_h2 / (gamma + 1.0))
    nlos_weight = np.sqrt(sigma_h2 / (gamma + 1.0))
    return los_weight * los + nlos_weight * nlos


def los_angles(cfg: SimConfig) -> Tuple[float, float]:
    """
    (departure angle at the BS, arrival angle at the IRS) of the LOS path
    Both arrays lie along the x axis; angles are measured from broadside.
    """
    bs = cfg.geometry.bs_position.as_array()
    irs = cfg.geometry.irs_position.as_array()
    dx, dy = irs - bs
    aod = np.arctan2(dx, dy)
    aoa = np.arctan2(-dx, -dy)
    if cfg.los_aod_rad is not None:
        aod = cfg.los_aod_rad
    if cfg.los_aoa_rad is not None:
        aoa = cfg.los_aoa_rad
    return float(aod), float(aoa)


def los_matrix(n: int, nb: int, aod: float, aoa: float) -> np.ndarray:
    """Rank-one LOS component a_IRS(aoa) a_BS(aod)^T"""
    if n == 0:
        return np.zeros((0, nb), dtype=complex)
    return np.outer(steering_vector(n, aoa), steering_vector(nb, aod))


def realize_drop(rng: np.random.Generator, cfg: SimConfig, locations: np.ndarray) -> ChannelSet:
    """
    Realize every channel of one drop for the given user locations

    Args:
        rng: The drop's own random stream
        cfg: Scenario (array sizes, geometry, propagation parameters)
        locations: (K, 2) user positions in m; K may be zero

    Returns:
        ChannelSet with fresh shadowing and fading
    """
    locations = np.asarray(locations, dtype=float).reshape(-1, 2)
    n, nb = cfg.n_reflectors, cfg.n_bs_antennas
    bs = cfg.geometry.bs_position.as_array()
    irs = cfg.geometry.irs_position.as_array()

    d_bs = np.linalg.norm(locations - bs, axis=1)
    d_irs = np.linalg.norm(locations - irs, axis=1)
    if np.any(d_bs == 0) or np.any(d_irs == 0):
        raise CollocatedUserError("a user is collocated with the BS or the IRS")

    sigma_h2 = bs_irs_large_scale(float(np.linalg.norm(irs - bs)), cfg.bs_irs)
    aod, aoa = los_angles(cfg)
    h_mat = draw_rician_matrix(rng, n, nb, sigma_h2, cfg.bs_irs.rician_factor, los_matrix(n, nb, aod, aoa))

    k = len(locations)
    f = np.zeros((k, nb), dtype=complex)
    g = np.zeros((k, n), dtype=complex)
    sigma_f2 = np.zeros(k)
    sigma_g2 = np.zeros(k)
    for user in range(k):
        sigma_f2[user] = large_scale_variance(
            cost_hata_path_loss(d_bs[user] / 1000.0, cfg.pathloss),
            draw_shadowing(rng, cfg.pathloss.sigma_sd_db),
        )
        sigma_g2[user] = large_scale_variance(
            cost_hata_path_loss(d_irs[user] / 1000.0, cfg.pathloss),
            draw_shadowing(rng, cfg.pathloss.sigma_sd_db),
        )
        f[user] = draw_rayleigh_vector(rng, nb, sigma_f2[user])
        g[user] = draw_rayleigh_vector(rng, n, sigma_g2[user])

    return ChannelSet(
        f=f,
        g=g,
        h_mat=h_mat,
        sigma_f2=sigma_f2,
        sigma_g2=sigma_g2,
        sigma_h2=sigma_h2,
        bs_distance_m=d_bs,
        irs_distance_m=d_irs,
    )
