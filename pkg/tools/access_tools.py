"""
Multiple-access tools - per-drop sum spectral efficiency of TDMA, FDMA and NOMA
with and without the IRS

TDMA re-tunes the surface for every slot. FDMA and NOMA share one surface
state, tuned for a single aided user; every other user only adapts its
beamformer to that foreign reflection.
"""
from dataclasses import dataclass
from typing import Callable, Dict, Optional, Tuple

import numpy as np

from config.sim_config import AidedUserPolicy, PowerPolicy, Scheme, SimConfig
from tools.channel_tools import ChannelSet
from tools.errors import DomainError
from tools.link_budget import noise_variance
from tools.reflection_tools import (
    alternating_optimize,
    effective_gain,
    mrt_combined,
    mrt_direct,
    snr,
)


@dataclass(frozen=True)
class PowerAllocation:
    alphas: np.ndarray


@dataclass(frozen=True)
class SicOrder:
    """User indices, strongest combined gain first"""
    order: Tuple[int, ...]


@dataclass(frozen=True)
class SchemeResult:
    per_user_rate: np.ndarray
    sum_rate: float
    gains: np.ndarray
    aided_user: Optional[int] = None


def select_aided_user(
    channels: ChannelSet,
    policy: AidedUserPolicy = AidedUserPolicy.WEAKEST_DIRECT,
    fixed_index: int = 0,
) -> int:
    """
    Pick the user whose link the IRS is tuned for
    Ties go to the lowest index.
    """
    k = channels.n_users
    if k < 1:
        raise DomainError("cannot select an aided user from an empty user set")

    if policy == AidedUserPolicy.FIXED_INDEX:
        if not 0 <= fixed_index < k:
            raise DomainError(f"aided user index {fixed_index} out of range for {k} users")
        return fixed_index
    if policy == AidedUserPolicy.NEAREST_IRS:
        if channels.irs_distance_m is None:
            raise DomainError("nearest_irs policy needs IRS-UE distances on the channel set")
        return int(np.argmin(channels.irs_distance_m))

    direct_norms = np.linalg.norm(channels.f, axis=1)
    if policy == AidedUserPolicy.STRONGEST_DIRECT:
        return int(np.argmax(direct_norms))
    return int(np.argmin(direct_norms))


def _link_budget(cfg: SimConfig) -> Tuple[float, float]:
    return cfg.pd_watts, noise_variance(cfg.bw_hz, cfg.t0_kelvin, cfg.nf_db)


def _optimize_user(channels: ChannelSet, user: int, cfg: SimConfig):
    return alternating_optimize(
        channels.g[user], channels.h_mat, channels.f[user],
        iterations=cfg.ao_iterations, tolerance=cfg.ao_tolerance,
    )


def _oma_result(gains: np.ndarray, cfg: SimConfig, aided_user: Optional[int] = None) -> SchemeResult:
    # Each user owns 1/K of the time (or bandwidth); per-subchannel P_d/K and
    # sigma_n^2/K cancel, so the rate is (1/K) log2(1 + P_d |rho|^2 / sigma_n^2)
    pd, sigma_n2 = _link_budget(cfg)
    k = len(gains)
    rates = np.array([np.log2(1.0 + snr(rho, pd, sigma_n2)) / k for rho in gains])
    return SchemeResult(per_user_rate=rates, sum_rate=float(np.sum(rates)), gains=gains, aided_user=aided_user)


def direct_gains(channels: ChannelSet) -> np.ndarray:
    """Effective gains with direct-link MRT only: rho_k = ||f_k||"""
    return np.array(
        [complex(np.dot(f, mrt_direct(f).w)) for f in channels.f],
        dtype=complex,
    )


def shared_surface_gains(channels: ChannelSet, cfg: SimConfig) -> Tuple[np.ndarray, int]:
    """
    Effective gains when one surface state serves everyone

    The aided user gets the joint AO solution; every other user gets the
    matched beamformer against that reflection.
    """
    aided = select_aided_user(channels, cfg.aided_user_policy, cfg.aided_user_index)
    solution = _optimize_user(channels, aided, cfg)

    gains = np.zeros(channels.n_users, dtype=complex)
    for user in range(channels.n_users):
        if user == aided:
            w = solution.w
        else:
            w = mrt_combined(channels.g[user], solution.theta, channels.h_mat, channels.f[user])
        gains[user] = effective_gain(channels.g[user], solution.theta, channels.h_mat, channels.f[user], w)
    return gains, aided


def tdma_sum_rate(channels: ChannelSet, cfg: SimConfig, with_irs: bool = True) -> SchemeResult:
    """TDMA sum rate; with the IRS every slot gets its own AO solution"""
    if not with_irs:
        return _oma_result(direct_gains(channels), cfg)

    gains = np.zeros(channels.n_users, dtype=complex)
    for user in range(channels.n_users):
        solution = _optimize_user(channels, user, cfg)
        gains[user] = effective_gain(
            channels.g[user], solution.theta, channels.h_mat, channels.f[user], solution.w
        )
    return _oma_result(gains, cfg)


def fdma_sum_rate(channels: ChannelSet, cfg: SimConfig, with_irs: bool = True) -> SchemeResult:
    """FDMA sum rate; the surface is tuned for the aided user only"""
    if not with_irs:
        return _oma_result(direct_gains(channels), cfg)

    gains, aided = shared_surface_gains(channels, cfg)
    return _oma_result(gains, cfg, aided_user=aided)


def allocate_noma_power(
    gains: np.ndarray,
    policy: PowerPolicy = PowerPolicy.INVERSE_GAIN,
    weak_share: float = 0.8,
) -> PowerAllocation:
    """
    NOMA power coefficients, weaker users get more power

    inverse_gain: alpha_k proportional to 1/|rho_k|^2, summing to one
    fixed_split: two users only; the weaker one gets weak_share
    """
    gains = np.asarray(gains, dtype=float)
    if gains.size == 0 or np.any(~(gains > 0)):
        raise DomainError(f"power allocation needs strictly positive gains, got {gains}")

    if policy == PowerPolicy.FIXED_SPLIT:
        if gains.size != 2:
            raise DomainError(f"fixed_split allocation is defined for two users, got {gains.size}")
        weak = int(np.argmin(gains)) if gains[0] != gains[1] else 1
        alphas = np.full(2, 1.0 - weak_share)
        alphas[weak] = weak_share
        return PowerAllocation(alphas=alphas)

    inverse = 1.0 / gains
    return PowerAllocation(alphas=inverse / np.sum(inverse))


def sic_order(gains: np.ndarray) -> SicOrder:
    """Decreasing |rho|^2; ties keep the lower index first"""
    gains = np.asarray(gains, dtype=float)
    return SicOrder(order=tuple(int(i) for i in np.argsort(-gains, kind="stable")))


def sic_rates(gains: np.ndarray, alphas: np.ndarray, pd: float, sigma_n2: float) -> np.ndarray:
    """
    Per-user NOMA rates after SIC, in the users' original order

    A user cancels every weaker user's signal and treats the signals of all
    stronger users as noise.
    """
    gains = np.asarray(gains, dtype=float)
    alphas = np.asarray(alphas, dtype=float)
    rates = np.zeros(gains.size)
    interference = 0.0
    for user in sic_order(gains).order:
        gamma = gains[user] * alphas[user] * pd / (gains[user] * interference * pd + sigma_n2)
        rates[user] = np.log2(1.0 + gamma)
        interference += alphas[user]
    return rates


def noma_sum_rate(channels: ChannelSet, cfg: SimConfig, with_irs: bool = True) -> SchemeResult:
    """NOMA sum rate with superposition coding and SIC"""
    if with_irs:
        gains, aided = shared_surface_gains(channels, cfg)
    else:
        gains, aided = direct_gains(channels), None

    power = np.abs(gains) ** 2
    allocation = allocate_noma_power(power, cfg.power_policy, cfg.noma_weak_share)
    pd, sigma_n2 = _link_budget(cfg)
    rates = sic_rates(power, allocation.alphas, pd, sigma_n2)
    return SchemeResult(per_user_rate=rates, sum_rate=float(np.sum(rates)), gains=gains, aided_user=aided)


SCHEME_EVALUATORS: Dict[Scheme, Callable[[ChannelSet, SimConfig], SchemeResult]] = {
    Scheme.TDMA_IRS: lambda channels, cfg: tdma_sum_rate(channels, cfg, with_irs=True),
    Scheme.FDMA_IRS: lambda channels, cfg: fdma_sum_rate(channels, cfg, with_irs=True),
    Scheme.NOMA_IRS: lambda channels, cfg: noma_sum_rate(channels, cfg, with_irs=True),
    Scheme.TDMA_NOIRS: lambda channels, cfg: tdma_sum_rate(channels, cfg, with_irs=False),
    Scheme.FDMA_NOIRS: lambda channels, cfg: fdma_sum_rate(channels, cfg, with_irs=False),
    Scheme.NOMA_NOIRS: lambda channels, cfg: noma_sum_rate(channels, cfg, with_irs=False),
}


def evaluate_scheme(scheme: Scheme, channels: ChannelSet, cfg: SimConfig) -> SchemeResult:
    return SCHEME_EVALUATORS[Scheme(scheme)](channels, cfg)
