"""
Tests for the TDMA / FDMA / NOMA sum-rate tools
"""
import numpy as np
import pytest

from config.sim_config import AidedUserPolicy, PowerPolicy, Scheme, SimConfig
from tools.access_tools import (
    allocate_noma_power,
    direct_gains,
    evaluate_scheme,
    fdma_sum_rate,
    noma_sum_rate,
    select_aided_user,
    shared_surface_gains,
    sic_order,
    sic_rates,
    tdma_sum_rate,
)
from tools.channel_tools import ChannelSet
from tools.errors import DomainError
from tools.link_budget import noise_variance

CFG = SimConfig(n_users=3, n_reflectors=16, n_bs_antennas=4)
SIGMA_N2 = noise_variance(CFG.bw_hz, CFG.t0_kelvin, CFG.nf_db)


def complex_normal(rng, shape, variance=1.0):
    return np.sqrt(variance / 2.0) * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))


def make_channels(seed, k=3, n=16, nb=4, direct=1e-12, cascade=1e-7, bs_irs=1e-8):
    """Random channel set at macro-cell power levels"""
    rng = np.random.default_rng(seed)
    return ChannelSet(
        f=complex_normal(rng, (k, nb), direct),
        g=complex_normal(rng, (k, n), cascade),
        h_mat=complex_normal(rng, (n, nb), bs_irs),
        sigma_f2=np.full(k, direct),
        sigma_g2=np.full(k, cascade),
        sigma_h2=bs_irs,
        irs_distance_m=rng.uniform(10.0, 500.0, k),
    )


def fixed_direct(rows, n=2):
    """Channel set with given direct channels and an inactive surface"""
    f = np.asarray(rows, dtype=complex)
    k, nb = f.shape
    return ChannelSet(
        f=f,
        g=np.zeros((k, n), dtype=complex),
        h_mat=np.ones((n, nb), dtype=complex),
        sigma_f2=np.ones(k),
        sigma_g2=np.zeros(k),
        sigma_h2=1.0,
        irs_distance_m=np.array([300.0, 20.0, 150.0][:k]),
    )


@pytest.fixture(scope="module")
def channels():
    return make_channels(seed=3)


def test_select_aided_user_policies():
    """Every selection policy on a three-user set"""
    channels = fixed_direct([[3.0, 0.0], [1.0, 0.0], [2.0, 0.0]])

    assert select_aided_user(channels) == 1
    assert select_aided_user(channels, AidedUserPolicy.STRONGEST_DIRECT) == 0
    assert select_aided_user(channels, AidedUserPolicy.FIXED_INDEX, fixed_index=2) == 2
    assert select_aided_user(channels, AidedUserPolicy.NEAREST_IRS) == 1

    with pytest.raises(DomainError):
        select_aided_user(channels, AidedUserPolicy.FIXED_INDEX, fixed_index=3)


def test_select_aided_user_edge_cases():
    """One user is always aided; ties go to the lowest index; no users is an error"""
    assert select_aided_user(fixed_direct([[0.1, 0.0]])) == 0
    assert select_aided_user(fixed_direct([[1.0, 0.0], [0.0, 1.0]])) == 0

    with pytest.raises(DomainError):
        select_aided_user(fixed_direct(np.zeros((0, 2))))


def test_allocate_noma_power_examples():
    """Inverse-gain coefficients sum to one and favour weak users"""
    assert np.allclose(allocate_noma_power(np.array([1.0, 0.25])).alphas, [0.2, 0.8])
    assert np.allclose(allocate_noma_power(np.array([1.0, 1.0])).alphas, [0.5, 0.5])
    assert np.allclose(allocate_noma_power(np.array([4.0])).alphas, [1.0])

    alphas = allocate_noma_power(np.array([0.3, 2.0, 0.01, 1.0])).alphas
    assert np.sum(alphas) == pytest.approx(1.0, abs=1e-12)
    assert list(np.argsort(alphas)) == [1, 3, 0, 2]

    with pytest.raises(DomainError):
        allocate_noma_power(np.array([1.0, 0.0]))


def test_allocate_noma_power_fixed_split():
    """The weaker of two users gets the configured share"""
    alphas = allocate_noma_power(np.array([0.1, 2.0]), PowerPolicy.FIXED_SPLIT, weak_share=0.8).alphas
    assert np.allclose(alphas, [0.8, 0.2])

    tied = allocate_noma_power(np.array([1.0, 1.0]), PowerPolicy.FIXED_SPLIT, weak_share=0.7).alphas
    assert np.allclose(tied, [0.3, 0.7])

    with pytest.raises(DomainError):
        allocate_noma_power(np.array([1.0, 2.0, 3.0]), PowerPolicy.FIXED_SPLIT)


def test_sic_order_examples():
    """Strongest first, stable on ties"""
    assert sic_order(np.array([1.0, 0.25])).order == (0, 1)
    assert sic_order(np.array([0.5, 0.5, 2.0])).order == (2, 0, 1)
    assert sic_order(np.array([3.0])).order == (0,)


def test_sic_rates_hand_example():
    """Two users, gains (1, 0.25), alphas (0.2, 0.8), P_d / sigma_n^2 = 10"""
    rates = sic_rates(np.array([1.0, 0.25]), np.array([0.2, 0.8]), pd=10.0, sigma_n2=1.0)
    assert rates[0] == pytest.approx(np.log2(3.0), rel=1e-12)
    assert rates[1] == pytest.approx(np.log2(7.0 / 3.0), rel=1e-12)
    assert np.sum(rates) == pytest.approx(2.807, abs=1e-3)


def test_sic_strongest_user_sees_no_interference():
    """The first decoded user's SINR is a plain SNR"""
    gains = np.array([0.2, 3.0, 1.1])
    alphas = allocate_noma_power(gains).alphas
    rates = sic_rates(gains, alphas, pd=5.0, sigma_n2=0.5)
    assert rates[1] == pytest.approx(np.log2(1.0 + 3.0 * alphas[1] * 5.0 / 0.5), rel=1e-12)
    assert np.all(rates > 0)


def test_single_user_rates():
    """K = 1: TDMA without the IRS gives log2(1 + P_d ||f||^2 / sigma_n^2)"""
    cfg = SimConfig(n_users=1, n_reflectors=2, n_bs_antennas=2)
    channels = fixed_direct([[np.sqrt(SIGMA_N2 / cfg.pd_watts), 0.0]])
    assert tdma_sum_rate(channels, cfg, with_irs=False).sum_rate == pytest.approx(1.0, rel=1e-12)


def test_single_user_schemes_coincide():
    """With one user FDMA and NOMA reduce to TDMA"""
    cfg = SimConfig(n_users=1, n_reflectors=16, n_bs_antennas=4)
    channels = make_channels(seed=5, k=1)

    tdma = tdma_sum_rate(channels, cfg).sum_rate
    assert fdma_sum_rate(channels, cfg).sum_rate == tdma
    assert noma_sum_rate(channels, cfg).sum_rate == pytest.approx(tdma, rel=1e-12)
    assert noma_sum_rate(channels, cfg, with_irs=False).sum_rate == pytest.approx(
        tdma_sum_rate(channels, cfg, with_irs=False).sum_rate, rel=1e-12
    )


def test_two_user_oma_without_surface():
    """Sum rate is the average of the per-user full-band rates"""
    cfg = SimConfig(n_users=2, n_reflectors=2, n_bs_antennas=2)
    channels = fixed_direct([[1e-6, 0.0], [0.0, 3e-7j]])
    gamma = cfg.pd_watts * np.array([1e-12, 9e-14]) / SIGMA_N2

    expected = 0.5 * np.sum(np.log2(1.0 + gamma))
    assert tdma_sum_rate(channels, cfg, with_irs=False).sum_rate == pytest.approx(expected, rel=1e-12)


def test_baselines_without_surface_are_identical(channels):
    """TDMA and FDMA without the IRS share bandwidth and time identically"""
    tdma = tdma_sum_rate(channels, CFG, with_irs=False)
    fdma = fdma_sum_rate(channels, CFG, with_irs=False)
    assert np.array_equal(tdma.per_user_rate, fdma.per_user_rate)
    assert tdma.sum_rate == fdma.sum_rate
    assert np.allclose(np.abs(direct_gains(channels)), np.linalg.norm(channels.f, axis=1))


def test_aided_user_gain_shared_across_schemes(channels):
    """FDMA, NOMA and TDMA give the aided user the same combined gain"""
    tdma = tdma_sum_rate(channels, CFG)
    fdma = fdma_sum_rate(channels, CFG)
    noma = noma_sum_rate(channels, CFG)

    aided = fdma.aided_user
    assert aided == select_aided_user(channels) == noma.aided_user
    assert fdma.gains[aided] == noma.gains[aided] == tdma.gains[aided]


def test_surface_never_hurts_tdma(channels):
    """Per-user TDMA gain with the IRS is at least the direct-link gain"""
    with_irs = np.abs(tdma_sum_rate(channels, CFG).gains)
    without = np.linalg.norm(channels.f, axis=1)
    assert np.all(with_irs >= without * (1 - 1e-12))


def test_shared_surface_gains_are_real_positive(channels):
    """Matched beamformers leave every shared-surface gain real and positive"""
    gains, aided = shared_surface_gains(channels, CFG)
    assert aided == select_aided_user(channels)
    assert np.all(np.abs(gains.imag) <= 1e-12 * np.abs(gains))
    assert np.all(gains.real > 0)


def test_evaluate_scheme_covers_every_scheme(channels):
    """Every scheme id yields finite non-negative per-user rates"""
    for scheme in Scheme:
        result = evaluate_scheme(scheme, channels, CFG)
        assert result.per_user_rate.shape == (3,)
        assert np.all(np.isfinite(result.per_user_rate))
        assert np.all(result.per_user_rate >= 0)
        assert result.sum_rate == pytest.approx(np.sum(result.per_user_rate), rel=1e-12)

    assert evaluate_scheme("noma_irs", channels, CFG).sum_rate == noma_sum_rate(channels, CFG).sum_rate


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
