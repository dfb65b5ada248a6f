"""Downlink SINR coverage probability and goodput under nearest-station association.

Stations form a homogeneous PPP; each transmits on one of L subchannels, so
the interferer field seen by a user is an independent 1/L thinning of
intensity lambda/L.  Coverage is available as the exact one-dimensional
integral, a closed-form approximation, and the interference-limited limit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .errors import DomainError, NumericalError


@dataclass(frozen=True)
class RadioParams:
    """Physical-layer parameters, all in linear units (watts, Hz, per m^2)."""

    bs_intensity: float
    ue_intensity: float
    ue_activity: float
    tx_power_w: float
    noise_power_w: float
    pathloss_exponent: float
    sinr_threshold: float
    bandwidth_hz: float
    subchannels: int

    def __post_init__(self) -> None:
        problems = []
        if not self.bs_intensity > 0:
            problems.append("bs_intensity must be > 0")
        if not self.ue_intensity > 0:
            problems.append("ue_intensity must be > 0")
        if not 0 < self.ue_activity < 1:
            problems.append("ue_activity must lie in (0, 1)")
        if not self.tx_power_w > 0:
            problems.append("tx_power_w must be > 0")
        if self.noise_power_w < 0:
            problems.append("noise_power_w must be >= 0")
        if not self.pathloss_exponent > 2:
            problems.append("pathloss_exponent must be > 2 (integral diverges otherwise)")
        if not self.sinr_threshold > 0:
            problems.append("sinr_threshold must be > 0 (linear units)")
        if not self.bandwidth_hz > 0:
            problems.append("bandwidth_hz must be > 0")
        if int(self.subchannels) != self.subchannels or self.subchannels < 1:
            problems.append("subchannels must be an integer >= 1")
        if problems:
            raise DomainError("; ".join(problems))

    @property
    def interferer_intensity(self) -> float:
        return self.bs_intensity / self.subchannels


@dataclass(frozen=True)
class CoverageResult:
    probability: float
    method: str
    interference_factor: float


def beta_factor(threshold: float, pathloss_exponent: float) -> float:
    """Interference penalty of nearest-station association.

    beta = 1 + T^(2/a) * integral_{T^(-2/a)}^inf du / (1 + u^(a/2)),
    evaluated by adaptive quadrature; >= 1 and increasing in the threshold.
    """
    if pathloss_exponent <= 2:
        raise DomainError(f"pathloss exponent must be > 2, got {pathloss_exponent}")
    if threshold <= 0:
        raise DomainError(f"threshold must be > 0, got {threshold}")
    half = pathloss_exponent / 2.0
    lower = threshold ** (-2.0 / pathloss_exponent)
    value, _ = integrate.quad(
        lambda u: 1.0 / (1.0 + u**half), lower, np.inf, epsabs=1e-12, epsrel=1e-12, limit=200
    )
    return 1.0 + threshold ** (2.0 / pathloss_exponent) * value


def coverage_integral(params: RadioParams) -> CoverageResult:
    """Exact coverage probability via the radial integral."""
    beta = beta_factor(params.sinr_threshold, params.pathloss_exponent)
    a = math.pi * (params.interferer_intensity * (beta - 1.0) + params.bs_intensity)
    b = params.sinr_threshold * params.noise_power_w / params.tx_power_w
    if b == 0.0:
        prob = math.pi * params.bs_intensity / a
    else:
        half = params.pathloss_exponent / 2.0
        # truncate where the pure-interference tail drops below 1e-15 of the mass
        z_max = 36.0 / a
        value, _ = integrate.quad(
            lambda z: math.exp(-(a * z + b * z**half)),
            0.0,
            z_max,
            epsabs=0.0,
            epsrel=1e-12,
            limit=200,
        )
        prob = math.pi * params.bs_intensity * value
    if not math.isfinite(prob) or prob < 0.0 or prob > 1.0 + 1e-9:
        raise NumericalError(
            f"coverage integral produced {prob} (A={a}, B={b}, beta={beta})"
        )
    return CoverageResult(min(prob, 1.0), "integral", beta)


def coverage_closed_form(params: RadioParams) -> CoverageResult:
    """Closed-form coverage approximation; exact in the zero-noise limit."""
    beta = beta_factor(params.sinr_threshold, params.pathloss_exponent)
    alpha = params.pathloss_exponent
    noise_term = (
        alpha
        / (2.0 * math.pi * params.bs_intensity * math.gamma(2.0 / alpha))
        * (params.sinr_threshold * params.noise_power_w / params.tx_power_w) ** (2.0 / alpha)
    )
    prob = 1.0 / (1.0 + (beta - 1.0) / params.subchannels + noise_term)
    return CoverageResult(prob, "closed_form", beta)


def coverage_interference_limited(subchannels: int, beta: float) -> float:
    """Zero-noise / dense-network limit L / (beta + L - 1)."""
    if subchannels < 1:
        raise DomainError(f"subchannels must be >= 1, got {subchannels}")
    if beta < 1.0:
        raise DomainError(f"interference factor must be >= 1, got {beta}")
    return subchannels / (beta + subchannels - 1.0)


def coverage(params: RadioParams, method: str = "closed_form") -> CoverageResult:
    """Coverage probability by the selected method."""
    if method == "integral":
        return coverage_integral(params)
    if method == "closed_form":
        return coverage_closed_form(params)
    if method == "interference_limited":
        beta = beta_factor(params.sinr_threshold, params.pathloss_exponent)
        prob = coverage_interference_limited(params.subchannels, beta)
        return CoverageResult(prob, "interference_limited", beta)
    raise DomainError(f"unknown coverage method {method!r}")


def goodput(params: RadioParams, method: str = "closed_form") -> float:
    """Effective per-user rate: P_c * (W/L) * log2(1 + T), in bits/s."""
    result = coverage(params, method)
    return (
        result.probability
        * params.bandwidth_hz
        / params.subchannels
        * math.log2(1.0 + params.sinr_threshold)
    )
