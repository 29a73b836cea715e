"""
Joint active beamforming / passive reflection tools

The single-user problem max |(g^T Theta H + f^T) w| over unit-modulus
reflections and ||w|| <= 1 is solved by alternating two closed forms:
phase alignment of every cascaded path with the direct path for a fixed w,
and MRT on the combined channel for a fixed Theta.
"""
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from tools.errors import DegenerateChannelError, DomainError

TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class PhaseProfile:
    """IRS phase shifts in [0, 2pi); amplitudes are fixed to one"""
    phases: np.ndarray

    @property
    def coefficients(self) -> np.ndarray:
        return np.exp(1j * self.phases)


@dataclass(frozen=True)
class Beamformer:
    w: np.ndarray


@dataclass
class OptimizationTrace:
    objective_per_iteration: List[float] = field(default_factory=list)

    @property
    def iterations_run(self) -> int:
        return len(self.objective_per_iteration)


@dataclass(frozen=True)
class JointSolution:
    theta: PhaseProfile
    w: Beamformer
    trace: OptimizationTrace

    @property
    def objective(self) -> float:
        return self.trace.objective_per_iteration[-1]


def _normalized_conjugate(channel: np.ndarray, what: str) -> Beamformer:
    norm = np.linalg.norm(channel)
    if norm == 0:
        raise DegenerateChannelError(f"{what} is identically zero")
    return Beamformer(w=np.conj(channel) / norm)


def mrt_direct(f: np.ndarray) -> Beamformer:
    """MRT on the direct link, w = f* / ||f||"""
    return _normalized_conjugate(np.asarray(f, dtype=complex), "direct channel")


def combined_channel(g: np.ndarray, theta: PhaseProfile, h_mat: np.ndarray, f: np.ndarray) -> np.ndarray:
    """Row vector g^T Theta H + f^T"""
    return (np.asarray(g) * theta.coefficients) @ np.asarray(h_mat) + np.asarray(f)


def optimal_phases(g: np.ndarray, h_mat: np.ndarray, w: Beamformer, f: np.ndarray) -> PhaseProfile:
    """
    Closed-form phases aligning every cascaded path with the direct path

    phi_n = arg(f^T w) - arg(g_n) - arg(h_n^T w), reduced into [0, 2pi).
    A vanishing direct term aligns to phase 0; a vanishing g_n or h_n^T w
    leaves phi_n = 0.
    """
    g = np.asarray(g, dtype=complex)
    per_element = np.asarray(h_mat, dtype=complex) @ w.w
    if per_element.shape != g.shape:
        raise DomainError(f"IRS-UE channel has {g.shape[0]} entries, BS-IRS matrix has {per_element.shape[0]} rows")

    direct = np.dot(f, w.w)
    phi0 = float(np.angle(direct)) if direct != 0 else 0.0

    phases = np.mod(phi0 - np.angle(g) - np.angle(per_element), TWO_PI)
    phases[(g == 0) | (per_element == 0)] = 0.0
    # mod can round a tiny negative angle up to exactly 2pi
    phases[phases >= TWO_PI] = 0.0
    return PhaseProfile(phases=phases)


def mrt_combined(g: np.ndarray, theta: PhaseProfile, h_mat: np.ndarray, f: np.ndarray) -> Beamformer:
    """MRT on the combined channel for a fixed reflection"""
    return _normalized_conjugate(combined_channel(g, theta, h_mat, f), "combined channel")


def effective_gain(g: np.ndarray, theta: PhaseProfile, h_mat: np.ndarray, f: np.ndarray, w: Beamformer) -> complex:
    """rho = (g^T Theta H + f^T) w"""
    return complex(np.dot(combined_channel(g, theta, h_mat, f), w.w))


def alternating_optimize(
    g: np.ndarray,
    h_mat: np.ndarray,
    f: np.ndarray,
    iterations: int = 3,
    tolerance: Optional[float] = None,
) -> JointSolution:
    """
    Alternate phase alignment and combined-channel MRT

    Args:
        g: IRS-UE channel (N,)
        h_mat: BS-IRS channel (N, N_b)
        f: Direct BS-UE channel (N_b,)
        iterations: Maximum number of full iterations
        tolerance: Stop early once the relative objective gain drops below it

    Returns:
        JointSolution with the objective |rho| after every iteration
    """
    if iterations < 1:
        raise DomainError(f"need at least one iteration, got {iterations}")

    w = mrt_direct(f)
    trace = OptimizationTrace()
    theta = None
    for _ in range(iterations):
        theta = optimal_phases(g, h_mat, w, f)
        w = mrt_combined(g, theta, h_mat, f)
        objective = abs(effective_gain(g, theta, h_mat, f, w))

        previous = trace.objective_per_iteration[-1] if trace.objective_per_iteration else None
        trace.objective_per_iteration.append(objective)
        if tolerance is not None and previous and (objective - previous) / previous < tolerance:
            break

    return JointSolution(theta=theta, w=w, trace=trace)


def snr(rho: complex, pd: float, sigma_n2: float) -> float:
    """Instantaneous SNR P_d |rho|^2 / sigma_n^2"""
    if pd <= 0 or sigma_n2 <= 0:
        raise DomainError(f"power and noise must be positive, got {pd}, {sigma_n2}")
    return pd * abs(rho) ** 2 / sigma_n2
