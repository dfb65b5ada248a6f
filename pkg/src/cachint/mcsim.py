"""Independent Monte Carlo validation of the analytic chain.

Three experiments: (i) PPP/Rayleigh SINR realizations for the coverage
probability, (ii) discrete-event G/G/m queue simulation for the backhaul
approximation, (iii) sampled total-delay tails against the Markov bound.

Reproducibility: every experiment derives per-batch substreams from
(seed, batch index) via SeedSequence spawning and merges results in batch
order, so estimates are bit-identical across runs and worker counts.  The
worker count is capped by the CACHINT_THREADS environment variable.
"""

from __future__ import annotations

import heapq
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .coverage import RadioParams
from .delay import BackhaulQueue, TrafficParams
from .errors import DomainError, InstabilityError


@dataclass(frozen=True)
class SimConfig:
    """Trial count, PPP window, and the reproducibility seed.

    Substream rule: batch b of an experiment uses the b-th child of
    SeedSequence(seed); batches are fixed-size slices of the trial range.
    """

    trials: int
    window_radius: float
    seed: int
    batch_size: int = 5000

    def __post_init__(self) -> None:
        if self.trials < 1:
            raise DomainError("trials must be >= 1")
        if not self.window_radius > 0:
            raise DomainError("window radius must be > 0")
        if self.batch_size < 1:
            raise DomainError("batch size must be >= 1")


@dataclass(frozen=True)
class EmpiricalEstimate:
    mean: float
    stderr: float
    n: int


@dataclass(frozen=True)
class CoverageEstimate:
    estimate: EmpiricalEstimate
    resampled_trials: int


@dataclass(frozen=True)
class TailEstimate:
    tail_probability: float
    stderr: float
    markov_bound: float
    mean_delay_s: float
    n: int


def _worker_count() -> int:
    env = os.environ.get("CACHINT_THREADS", "").strip()
    if env:
        return max(1, int(env))
    return min(4, os.cpu_count() or 1)


def _coverage_batch(params: RadioParams, radius: float, n: int, seed: np.random.SeedSequence):
    rng = np.random.default_rng(seed)
    mean_count = params.bs_intensity * math.pi * radius**2
    counts = rng.poisson(mean_count, n)
    resampled = 0
    empty = counts == 0
    while empty.any():
        resampled += int(empty.sum())
        counts[empty] = rng.poisson(mean_count, int(empty.sum()))
        empty = counts == 0
    total = int(counts.sum())
    starts = np.concatenate(([0], np.cumsum(counts)[:-1]))
    seg = np.repeat(np.arange(n), counts)

    radii = radius * np.sqrt(rng.random(total))
    gains = rng.standard_exponential(total)
    on_channel = rng.random(total) < 1.0 / params.subchannels

    order = np.lexsort((radii, seg))
    serving = order[starts]  # nearest station per trial
    power = params.tx_power_w
    alpha = params.pathloss_exponent
    received = gains * radii**-alpha * power
    interferer = on_channel.copy()
    interferer[serving] = False
    interference = np.add.reduceat(np.where(interferer, received, 0.0), starts)
    with np.errstate(divide="ignore"):  # no interferers + zero noise => SINR inf
        sinr = received[serving] / (interference + params.noise_power_w)
    return int((sinr > params.sinr_threshold).sum()), n, resampled


def simulate_coverage(params: RadioParams, sim: SimConfig) -> CoverageEstimate:
    """Empirical Pr(SINR > T): PPP stations on a disk, nearest-station serving,
    interferers thinned at 1/L, unit-mean exponential gains."""
    n_batches = math.ceil(sim.trials / sim.batch_size)
    seeds = np.random.SeedSequence(sim.seed).spawn(n_batches)
    sizes = [
        min(sim.batch_size, sim.trials - b * sim.batch_size) for b in range(n_batches)
    ]
    with ThreadPoolExecutor(max_workers=_worker_count()) as pool:
        results = list(
            pool.map(
                lambda args: _coverage_batch(params, sim.window_radius, *args),
                zip(sizes, seeds),
            )
        )
    hits = sum(r[0] for r in results)
    n = sum(r[1] for r in results)
    resampled = sum(r[2] for r in results)
    p = hits / n
    stderr = math.sqrt(p * (1.0 - p) / n)
    return CoverageEstimate(EmpiricalEstimate(p, stderr, n), resampled)


def _interval_sampler(mean: float, cv: float):
    """Positive-interval sampler matching (mean, cv): deterministic at 0,
    Erlang-k below 1, exponential at 1, balanced-means hyperexponential above."""
    if cv < 0:
        raise DomainError("coefficient of variation must be >= 0")
    if cv == 0.0:
        return lambda rng, n: np.full(n, mean)
    if cv == 1.0:
        return lambda rng, n: rng.exponential(mean, n)
    if cv < 1.0:
        k = max(1, round(1.0 / cv**2))
        return lambda rng, n: rng.gamma(k, mean / k, n)
    scv = cv**2
    p_fast = 0.5 * (1.0 + math.sqrt((scv - 1.0) / (scv + 1.0)))
    rate_fast = 2.0 * p_fast / mean
    rate_slow = 2.0 * (1.0 - p_fast) / mean

    def sample(rng: np.random.Generator, n: int) -> np.ndarray:
        fast = rng.random(n) < p_fast
        scale = np.where(fast, 1.0 / rate_fast, 1.0 / rate_slow)
        return rng.exponential(1.0, n) * scale

    return sample


def queue_sojourn_samples(
    queue: BackhaulQueue, departures: int, seed: int | np.random.SeedSequence
) -> np.ndarray:
    """FIFO G/G/m sojourn times (wait + service) for `departures` jobs."""
    if queue.per_server_load >= 1.0:
        raise InstabilityError(
            f"per-server load {queue.per_server_load:.4g} >= 1; refusing to simulate"
        )
    rng = np.random.default_rng(seed)
    interarrival = _interval_sampler(1.0 / queue.arrival_rate, queue.arrival_cv)
    service = _interval_sampler(queue.service_time, queue.service_cv)
    arrivals = np.cumsum(interarrival(rng, departures))
    services = service(rng, departures)
    free_at = [0.0] * queue.servers
    heapq.heapify(free_at)
    sojourn = np.empty(departures)
    for i in range(departures):
        available = heapq.heappop(free_at)
        start = max(arrivals[i], available)
        done = start + services[i]
        heapq.heappush(free_at, done)
        sojourn[i] = done - arrivals[i]
    return sojourn


def simulate_backhaul_queue(
    queue: BackhaulQueue,
    sim: SimConfig,
    warmup_fraction: float = 0.1,
    n_batches: int = 100,
) -> EmpiricalEstimate:
    """Mean sojourn time by discrete-event simulation of `sim.trials` departures.

    The standard error comes from batch means (queue sojourns are serially
    correlated, so the per-sample formula would understate it); `n` reports
    the batch count the stderr is based on.
    """
    sojourn = queue_sojourn_samples(queue, sim.trials, sim.seed)
    kept = sojourn[int(len(sojourn) * warmup_fraction):]
    n_batches = min(n_batches, len(kept))
    batches = np.array_split(kept, n_batches)
    means = np.array([b.mean() for b in batches])
    stderr = float(means.std(ddof=1) / math.sqrt(n_batches)) if n_batches > 1 else 0.0
    return EmpiricalEstimate(float(means.mean()), stderr, n_batches)


def sample_total_delay(
    traffic: TrafficParams,
    bs_intensity: float,
    goodput_bps: float,
    queue: BackhaulQueue,
    hit_probability: float,
    delay_threshold_s: float,
    sim: SimConfig,
) -> TailEstimate:
    """Empirical Pr(D >= D_th) with the Markov bound of the sampled distribution.

    Cell load is drawn Poisson with the analytic mean (the model only fixes
    the mean; the Poisson shape is this artifact's choice and affects the tail
    experiment only).  Misses add a simulated queue sojourn.
    """
    if not 0.0 <= hit_probability <= 1.0:
        raise DomainError("hit probability must lie in [0, 1]")
    seeds = np.random.SeedSequence(sim.seed).spawn(2)
    rng = np.random.default_rng(seeds[0])
    n = sim.trials
    mean_users = traffic.ue_activity * traffic.ue_intensity / bs_intensity
    users = rng.poisson(mean_users, n)
    delay = users * traffic.file_size_bits / goodput_bps
    miss = rng.random(n) >= hit_probability
    n_miss = int(miss.sum())
    if n_miss:
        pool = queue_sojourn_samples(queue, max(n_miss, 10_000), seeds[1])
        pool = pool[len(pool) // 10:]  # drop queue warmup
        delay[miss] += rng.choice(pool, n_miss, replace=True)
    tail = float((delay >= delay_threshold_s).mean())
    stderr = math.sqrt(tail * (1.0 - tail) / n)
    mean_delay = float(delay.mean())
    return TailEstimate(tail, stderr, mean_delay / delay_threshold_s, mean_delay, n)
