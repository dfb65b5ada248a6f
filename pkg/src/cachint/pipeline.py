"""Scenario-level composition of the analytic chain into flat report rows.

Every function returns an ordered dict of column -> value suitable for CSV
emission; infeasible cases come back as rows with status "infeasible" rather
than exceptions, because infeasibility is a finding of the model, not a bug.
"""

from __future__ import annotations

import math
from typing import Optional

from . import delay as dl
from .coverage import coverage as coverage_of
from .coverage import coverage_integral, goodput
from . import gp
from . import mcsim
from .errors import InfeasibleError, UnsupportedRegimeError
from .popularity import CacheConfig, hit_probability_asymptotic, hit_probability_exact
from .scenario import Scenario


def evaluate_scenario(scenario: Scenario) -> dict:
    """Single-point evaluation of the whole chain at the scenario's parameters."""
    catalog = scenario.catalog()
    cache = scenario.cache()
    radio = scenario.radio()
    traffic = scenario.traffic()
    queue = scenario.queue()
    constraint = scenario.constraint()

    coverage_result = coverage_of(radio, scenario.coverage_method)
    goodput_bps = (
        coverage_result.probability
        * radio.bandwidth_hz
        / radio.subchannels
        * math.log2(1.0 + radio.sinr_threshold)
    )
    users = dl.expected_users_per_bs(
        radio.ue_intensity, radio.ue_activity, radio.bs_intensity
    )
    fronthaul = dl.expected_fronthaul_delay(traffic, radio.bs_intensity, goodput_bps)
    waiting = dl.mmm_waiting_time(queue)
    backhaul = dl.expected_backhaul_delay(queue)
    hit_exact = hit_probability_exact(catalog, cache)
    total = dl.expected_total_delay(fronthaul, backhaul, hit_exact)
    report = dl.feasibility_check(fronthaul, constraint)
    row = {
        "scenario_hash": scenario.resolved_hash(),
        "status": "feasible" if report.feasible else "infeasible",
        "interference_factor": coverage_result.interference_factor,
        "coverage_prob": coverage_result.probability,
        "coverage_method": coverage_result.method,
        "goodput_bps": goodput_bps,
        "users_per_bs": users,
        "fronthaul_s": fronthaul,
        "queue_waiting_s": waiting,
        "backhaul_s": backhaul,
        "hit_exact": hit_exact,
        "total_delay_s": total,
        "delay_cap_s": constraint.expected_delay_cap,
        "slack_s": report.slack_s,
        "requires_full_catalog": report.requires_full_catalog,
        "constant_c": gp.constant_C(fronthaul, backhaul, constraint),
        "bs_intensity_min": dl.lambda_lower_bound(traffic, goodput_bps, constraint),
    }
    if catalog.exponent != 1.0:
        hit_asym = hit_probability_asymptotic(catalog, cache)
        row["hit_asym"] = hit_asym.value
        row["hit_asym_raw"] = hit_asym.raw
    else:
        row["hit_asym"] = ""
        row["hit_asym_raw"] = ""
    return row


def _base_row(scenario: Scenario, mode: str) -> dict:
    return {"scenario_hash": scenario.resolved_hash(), "mode": mode, "status": "feasible"}


def _infeasible_row(scenario: Scenario, mode: str, reason: str, columns: list[str]) -> dict:
    row = _base_row(scenario, mode)
    row["status"] = "infeasible"
    row["reason"] = reason
    for name in columns:
        row.setdefault(name, "")
    return row


_FIXED_LAMBDA_COLS = [
    "constant_c", "cache_size", "cache_size_int", "cache_fraction", "hit_at_optimum",
]
_FIXED_CACHE_COLS = [
    "hit_used", "bs_intensity_opt", "ue_per_bs", "total_delay_at_opt_s",
]
_JOINT_COLS = [
    "c1", "c2", "c3", "q_norm", "v_norm", "r_norm",
    "dual_coordinate", "dual_optimum", "boundary",
    "bs_intensity_opt", "cache_size", "cache_size_int", "cache_intensity",
    "residual_delay", "residual_density", "cache_clamped",
    "bs_intensity_literal", "cache_size_literal", "duality_gap_literal",
]
_ORACLE_COLS = ["oracle_bs_intensity", "oracle_cache_size", "oracle_objective", "oracle_gap"]


def optimize_scenario(
    scenario: Scenario, mode: str, with_oracle: bool = False
) -> dict:
    """Run one optimization mode; returns a flat row, infeasible-aware."""
    catalog = scenario.catalog()
    radio = scenario.radio()
    traffic = scenario.traffic()
    queue = scenario.queue()
    constraint = scenario.constraint()
    goodput_bps = goodput(radio, scenario.coverage_method)
    fronthaul = dl.expected_fronthaul_delay(traffic, radio.bs_intensity, goodput_bps)
    backhaul = dl.expected_backhaul_delay(queue)

    if mode == "fixed-lambda":
        row = _base_row(scenario, mode)
        c_value = gp.constant_C(fronthaul, backhaul, constraint)
        row["constant_c"] = c_value
        try:
            result = gp.optimal_cache_fixed_lambda(c_value, catalog)
        except (InfeasibleError, UnsupportedRegimeError) as exc:
            return _infeasible_row(scenario, mode, str(exc), _FIXED_LAMBDA_COLS)
        row["cache_size"] = result.size
        row["cache_size_int"] = result.size_int
        row["cache_fraction"] = result.size / catalog.files
        if result.size >= 1.0:
            row["hit_at_optimum"] = hit_probability_asymptotic(
                catalog, CacheConfig(math.ceil(result.size))
            ).value
        else:
            row["hit_at_optimum"] = ""
        row["reason"] = ""
        return row

    if mode == "fixed-cache":
        row = _base_row(scenario, mode)
        hit = hit_probability_exact(catalog, scenario.cache())
        row["hit_used"] = hit
        try:
            lam = gp.optimal_lambda_fixed_cache(
                traffic, goodput_bps, backhaul, hit, constraint
            )
        except InfeasibleError as exc:
            return _infeasible_row(scenario, mode, str(exc), _FIXED_CACHE_COLS)
        row["bs_intensity_opt"] = lam
        row["ue_per_bs"] = radio.ue_intensity / lam
        fronthaul_opt = dl.expected_fronthaul_delay(traffic, lam, goodput_bps)
        row["total_delay_at_opt_s"] = dl.expected_total_delay(fronthaul_opt, backhaul, hit)
        row["reason"] = ""
        return row

    if mode == "joint":
        columns = _JOINT_COLS + (_ORACLE_COLS if with_oracle else [])
        try:
            constants = gp.gp_constants(catalog, traffic, goodput_bps, backhaul, constraint)
            solution = gp.solve_joint(constants, catalog.exponent, catalog.files)
        except (InfeasibleError, UnsupportedRegimeError) as exc:
            return _infeasible_row(scenario, mode, str(exc), columns)
        row = _base_row(scenario, mode)
        row.update(
            c1=constants.c1, c2=constants.c2, c3=constants.c3,
            q_norm=constants.q_const, v_norm=constants.v_const, r_norm=constants.r_const,
            dual_coordinate=solution.dual_coordinate,
            dual_optimum=solution.dual_optimum,
            boundary=solution.boundary,
            bs_intensity_opt=solution.bs_intensity,
            cache_size=solution.cache_size,
            cache_size_int=solution.cache_size_int,
            cache_intensity=solution.cache_intensity,
            residual_delay=solution.residual_delay,
            residual_density=solution.residual_density,
            cache_clamped=solution.cache_clamped,
            bs_intensity_literal=solution.bs_intensity_literal,
            cache_size_literal=solution.cache_size_literal,
            duality_gap_literal=solution.duality_gap_literal,
        )
        if with_oracle:
            oracle = gp.brute_force_oracle(
                constants, catalog.exponent, catalog.files, catalog=catalog
            )
            row["oracle_bs_intensity"] = oracle.bs_intensity
            row["oracle_cache_size"] = oracle.cache_size
            row["oracle_objective"] = oracle.objective
            row["oracle_gap"] = (
                (solution.cache_intensity - oracle.objective) / oracle.objective
            )
        row["reason"] = ""
        return row

    raise ValueError(f"unknown optimization mode {mode!r}")


_AXIS_FIELDS = {
    "nu": ("zipf_exponent", float),
    "S": ("cache_files", int),
    "lambda": ("bs_intensity", float),
    "W": ("bandwidth_hz", float),
    "F": ("catalog_files", int),
}


def sweep_scenario(
    scenario: Scenario,
    axis: str,
    start: float,
    stop: float,
    points: int,
    mode: str = "fixed-lambda",
    with_oracle: bool = False,
) -> list[dict]:
    """Evaluate or optimize along one parameter axis; rows ordered by index."""
    if axis not in _AXIS_FIELDS:
        raise ValueError(f"unknown sweep axis {axis!r} (choose from {sorted(_AXIS_FIELDS)})")
    field, cast = _AXIS_FIELDS[axis]
    rows = []
    for index in range(points):
        fraction = index / (points - 1) if points > 1 else 0.0
        value = cast(start + (stop - start) * fraction)
        point = scenario.with_value(field, value)
        if mode == "eval":
            row = evaluate_scenario(point)
        else:
            row = optimize_scenario(point, mode, with_oracle=with_oracle)
        row = {"sweep_index": index, "axis": axis, "axis_value": value, **row}
        rows.append(row)
    return rows


def simulate_scenario(
    scenario: Scenario, kind: str, seed: int, trials: int, window_radius: Optional[float] = None
) -> dict:
    """One simulation experiment compared against its analytic counterpart."""
    radio = scenario.radio()
    queue = scenario.queue()
    if window_radius is None:
        # ~15x the mean nearest-station distance; truncation error is then
        # far below the Monte Carlo noise for pathloss exponents > 3
        window_radius = 15.0 * 0.5 / math.sqrt(radio.bs_intensity)
    sim = mcsim.SimConfig(trials=trials, window_radius=window_radius, seed=seed)
    hash_ = scenario.resolved_hash()
    if kind == "coverage":
        estimate = mcsim.simulate_coverage(radio, sim)
        analytic = coverage_integral(radio)
        return {
            "scenario_hash": hash_, "kind": kind, "seed": seed,
            "trials": estimate.estimate.n,
            "mc_coverage": estimate.estimate.mean,
            "mc_stderr": estimate.estimate.stderr,
            "analytic_coverage": analytic.probability,
            "abs_gap_in_stderr": abs(estimate.estimate.mean - analytic.probability)
            / max(estimate.estimate.stderr, 1e-300),
            "resampled_trials": estimate.resampled_trials,
        }
    if kind == "queue":
        estimate = mcsim.simulate_backhaul_queue(queue, sim)
        analytic = dl.expected_backhaul_delay(queue)
        return {
            "scenario_hash": hash_, "kind": kind, "seed": seed,
            "departures": trials,
            "mc_sojourn_s": estimate.mean,
            "mc_stderr": estimate.stderr,
            "analytic_sojourn_s": analytic,
            "approx_rel_error": abs(analytic - estimate.mean) / estimate.mean,
        }
    if kind == "delay":
        catalog = scenario.catalog()
        goodput_bps = goodput(radio, scenario.coverage_method)
        hit = hit_probability_exact(catalog, scenario.cache())
        tail = mcsim.sample_total_delay(
            scenario.traffic(), radio.bs_intensity, goodput_bps, queue, hit,
            scenario.delay_threshold_s, sim,
        )
        return {
            "scenario_hash": hash_, "kind": kind, "seed": seed,
            "samples": tail.n,
            "hit_probability": hit,
            "empirical_tail": tail.tail_probability,
            "tail_stderr": tail.stderr,
            "markov_bound": tail.markov_bound,
            "mean_delay_s": tail.mean_delay_s,
            "violation_budget": scenario.violation_budget,
        }
    raise ValueError(f"unknown simulation kind {kind!r}")
