"""Expected fronthaul, backhaul, and total delay, plus feasibility of the delay cap.

Fronthaul delay is the TDMA-shared transfer time of one file to the typical
user; backhaul delay is the G/G/m fetch time from the cloud on a cache miss,
approximated by the two-moment (Whitt) formula.  The probabilistic delay
constraint Pr(D >= D_th) <= gamma is handled through its Markov linearization
E[D] <= gamma * D_th.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

from .errors import DomainError, InstabilityError


@dataclass(frozen=True)
class TrafficParams:
    """Demand-side parameters: file size and the active-user field."""

    file_size_bits: float
    ue_activity: float
    ue_intensity: float

    def __post_init__(self) -> None:
        if not self.file_size_bits > 0:
            raise DomainError("file size must be > 0")
        if not 0 < self.ue_activity < 1:
            raise DomainError("activity probability must lie in (0, 1)")
        if not self.ue_intensity > 0:
            raise DomainError("UE intensity must be > 0")


@dataclass(frozen=True)
class DelayConstraint:
    """Latency threshold and violation-probability budget."""

    threshold_s: float
    violation_budget: float

    def __post_init__(self) -> None:
        if not self.threshold_s > 0:
            raise DomainError("delay threshold must be > 0")
        if not 0 < self.violation_budget < 1:
            raise DomainError("violation budget must lie in (0, 1)")

    @property
    def expected_delay_cap(self) -> float:
        """Markov-linearized cap on the expected delay."""
        return self.violation_budget * self.threshold_s


@dataclass(frozen=True)
class BackhaulQueue:
    """G/G/m description of the cloud fetch path.

    `utilization` follows the source model's bookkeeping (service rate m/tau,
    so rho = phi*tau/m^2); the per-server load phi*tau/m that governs actual
    queue stability is exposed separately for the simulator.
    """

    arrival_rate: float
    service_time: float
    servers: int
    arrival_cv: float
    service_cv: float

    def __post_init__(self) -> None:
        if not self.arrival_rate > 0:
            raise DomainError("arrival rate must be > 0")
        if not self.service_time > 0:
            raise DomainError("service time must be > 0")
        if int(self.servers) != self.servers or self.servers < 1:
            raise DomainError("server count must be an integer >= 1")
        if self.arrival_cv < 0 or self.service_cv < 0:
            raise DomainError("coefficients of variation must be >= 0")
        if self.utilization >= 1.0:
            raise InstabilityError(
                f"utilization {self.utilization:.4g} >= 1; queue is unstable"
            )

    @property
    def service_rate(self) -> float:
        return self.servers / self.service_time

    @property
    def utilization(self) -> float:
        return self.arrival_rate / (self.servers * self.service_rate)

    @property
    def per_server_load(self) -> float:
        """Conventional rho = phi * tau / m, used for simulator stability."""
        return self.arrival_rate * self.service_time / self.servers


@dataclass(frozen=True)
class DelayBreakdown:
    fronthaul_s: float
    backhaul_s: float
    total_s: float
    hit_probability: float


def expected_users_per_bs(ue_intensity: float, ue_activity: float, bs_intensity: float) -> float:
    """Mean number of active users in a cell: activity * ue_intensity / bs_intensity."""
    if bs_intensity <= 0:
        raise DomainError(f"bs intensity must be > 0, got {bs_intensity}")
    return ue_activity * ue_intensity / bs_intensity


def expected_fronthaul_delay(traffic: TrafficParams, bs_intensity: float, goodput_bps: float) -> float:
    """Mean station-to-user transfer time of one file under TDMA sharing."""
    if goodput_bps <= 0:
        raise DomainError(f"goodput must be > 0, got {goodput_bps}")
    return (
        expected_users_per_bs(traffic.ue_intensity, traffic.ue_activity, bs_intensity)
        * traffic.file_size_bits
        / goodput_bps
    )


def mmm_waiting_time(queue: BackhaulQueue) -> float:
    """Sakasegawa-style M/M/m waiting approximation; exact tau*rho/(1-rho) at m=1."""
    rho = queue.utilization
    if rho >= 1.0:
        raise InstabilityError(f"utilization {rho:.4g} >= 1")
    exponent = math.sqrt(2.0 * (queue.servers + 1.0)) - 1.0
    return queue.service_time * rho**exponent / (queue.servers * (1.0 - rho))


def expected_backhaul_delay(queue: BackhaulQueue) -> float:
    """Two-moment G/G/m mean fetch time: scv-weighted waiting plus service."""
    weight = (queue.arrival_cv**2 + queue.service_cv**2) / 2.0
    return weight * mmm_waiting_time(queue) + queue.service_time


def expected_total_delay(fronthaul_s: float, backhaul_s: float, hit_probability: float) -> float:
    """Law of total expectation: fronthaul always, backhaul only on a miss."""
    if not 0.0 <= hit_probability <= 1.0:
        raise DomainError(f"hit probability must lie in [0, 1], got {hit_probability}")
    return fronthaul_s + backhaul_s * (1.0 - hit_probability)


class FeasibilityReport(NamedTuple):
    feasible: bool
    slack_s: float
    requires_full_catalog: bool


def feasibility_check(fronthaul_s: float, constraint: DelayConstraint) -> FeasibilityReport:
    """Delay cap is attainable for some cache size iff fronthaul fits under it.

    Zero slack means only a full-catalog cache (every miss eliminated) can
    meet the cap.
    """
    cap = constraint.expected_delay_cap
    slack = cap - fronthaul_s
    at_edge = math.isclose(fronthaul_s, cap, rel_tol=1e-12, abs_tol=0.0)
    return FeasibilityReport(slack >= 0.0 or at_edge, slack, at_edge)


def lambda_lower_bound(
    traffic: TrafficParams, goodput_bps: float, constraint: DelayConstraint
) -> float:
    """Minimum station intensity for the delay cap to be attainable at all."""
    if goodput_bps <= 0:
        raise DomainError(f"goodput must be > 0, got {goodput_bps}")
    return (
        traffic.ue_activity
        * traffic.ue_intensity
        * traffic.file_size_bits
        / (constraint.expected_delay_cap * goodput_bps)
    )
