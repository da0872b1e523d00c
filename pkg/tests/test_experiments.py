from __future__ import annotations

import math
from dataclasses import replace

import numpy as np
import pytest

from dacperc.analysis import CrossingSpec
from dacperc.controller import (
    SamplerSettings,
    buffer_sensitivity,
    cluster_tail,
    crossing_prob,
    cutpoint_growth,
    duality_audit,
    finite_size_check,
    fk_range_tail,
    make_estimate,
    rc_locator,
    run_ensemble,
    theta_curve,
    uniqueness_probe,
)
from dacperc.controller.experiment_controller import (
    bisect_half,
    clopper_pearson,
    cutpoint_count,
    fit_survival,
    origin_reach,
    split_counts,
    two_giants,
)
from dacperc.config import RunConfig
from dacperc.core.errors import ConfigError, SubcriticalityViolation
from dacperc.core.lattice import Parallelogram
from dacperc.models.dac import SpinConfig


def test_make_estimate_uses_chain_means() -> None:
    est = make_estimate([[1, 1], [0, 0]], seed=3)
    assert est.value == pytest.approx(0.5)
    assert est.stderr == pytest.approx(0.5)
    assert est.count == 4
    assert est.ess <= 4
    assert est.to_record()["seed"] == 3


def test_make_estimate_batches_a_single_chain() -> None:
    est = make_estimate([[0, 1] * 40], seed=0)
    assert est.value == pytest.approx(0.5)
    assert est.stderr == pytest.approx(0.0)
    assert est.ess == 80


def test_make_estimate_of_nothing() -> None:
    est = make_estimate([[], []], seed=0)
    assert math.isnan(est.value)
    assert est.count == 0


def test_clopper_pearson_bounds() -> None:
    lower, upper = clopper_pearson(0.0, 100)
    assert lower == 0.0
    assert upper == pytest.approx(1 - 0.025 ** (1 / 100), rel=1e-6)
    lower, upper = clopper_pearson(1.0, 40)
    assert upper == 1.0
    assert lower == pytest.approx(0.025 ** (1 / 40), rel=1e-6)
    assert clopper_pearson(0.5, 0) == (0.0, 1.0)


def test_split_counts() -> None:
    assert split_counts(10, 3) == [4, 3, 3]
    assert split_counts(2, 4) == [1, 1, 0, 0]


def test_bisect_half() -> None:
    assert bisect_half(np.array([0.1, 0.2, 0.3, 0.4])) == pytest.approx(0.2, abs=1e-12)
    assert math.isnan(bisect_half(np.zeros(0)))


def test_fit_survival_on_geometric_sample() -> None:
    rng = np.random.default_rng(2)
    fit = fit_survival(rng.geometric(0.3, size=50_000), start=1)
    assert not fit.degenerate
    assert fit.slope == pytest.approx(math.log(0.7), abs=0.03)
    assert fit.rate == pytest.approx(-fit.slope)
    assert fit.r_squared > 0.99


def test_fit_survival_degenerate_cases() -> None:
    assert fit_survival([0] * 100).degenerate
    assert fit_survival([]).degenerate
    fit = fit_survival([1] * 50 + [2] * 5, truncated=[False] * 54 + [True])
    assert fit.degenerate
    assert fit.truncated_fraction == pytest.approx(1 / 55)


def test_run_ensemble_is_independent_of_thread_count(fast_settings) -> None:
    region = Parallelogram.s(3, 3)
    measure = lambda s: (s.sample_id, float(s.marks.sum()), int(s.eta.open_count()))
    one = run_ensemble(region, 0.4, 7, 11, measure, replace(fast_settings, threads=1))
    two = run_ensemble(region, 0.4, 7, 11, measure, fast_settings)
    assert one.records() == two.records()
    assert [rec[0] for rec in two.records()] == list(range(7))
    assert len(two.diagnostics()) == fast_settings.chains


def test_run_ensemble_rejects_zero_chains(fast_settings) -> None:
    settings = replace(fast_settings, chains=0)
    with pytest.raises(ConfigError):
        run_ensemble(Parallelogram.s(1, 1), 0.1, 2, 0, lambda s: 0, settings)


def test_guard_trips_in_the_supercritical_phase(fast_settings) -> None:
    settings = replace(fast_settings, guard=0.0)
    with pytest.raises(SubcriticalityViolation):
        run_ensemble(Parallelogram.s(3, 3), 3.0, 10, 0, lambda s: 0, settings)


@pytest.mark.parametrize("r, expected", [(0.0, 0.0), (1.0, 1.0)])
def test_crossing_probability_at_extreme_r(fast_settings, r: float, expected: float) -> None:
    spec = CrossingSpec(Parallelogram.s(3, 3), "horizontal", 1)
    result = crossing_prob(0.5, r, spec, 12, 5, fast_settings)
    assert result.estimate.value == expected
    assert len(list(result.raw_rows())) == 12


def test_minus_crossing_at_r_one_never_happens(fast_settings) -> None:
    spec = CrossingSpec(Parallelogram.s(2, 4), "vertical", -1)
    assert crossing_prob(0.2, 1.0, spec, 6, 1, fast_settings).estimate.value == 0.0


def test_buffer_sensitivity_reports_difference(fast_settings) -> None:
    spec = CrossingSpec(Parallelogram.s(2, 2), "horizontal", 1)
    result = buffer_sensitivity(0.3, 1.0, spec, 6, 0, [1, 3], fast_settings)
    assert result.sensitivity["buffers"] == [1, 3]
    assert result.sensitivity["difference"] == 0.0
    assert result.ensemble.box.buffer == 1
    with pytest.raises(ConfigError):
        buffer_sensitivity(0.3, 1.0, spec, 6, 0, [1], fast_settings)


def test_duality_holds_sample_by_sample(fast_settings) -> None:
    report = duality_audit(0.5, 4, 20, 2, r=0.5, settings=fast_settings)
    assert report.exact
    assert report.h_minus.value + report.v_plus.value == pytest.approx(1.0)


def test_origin_reach(spins_from_rows) -> None:
    window = Parallelogram(-1, 1, -1, 1)
    region = Parallelogram(-2, 2, -2, 2)
    plus = SpinConfig.constant(spins_from_rows(region, ["+" * 5] * 5).graph, 1)
    assert origin_reach(plus, window) == 2
    assert origin_reach(SpinConfig.constant(plus.graph, -1), window) == -1
    lonely = spins_from_rows(region, ["-----", "-----", "--+--", "-----", "-----"])
    assert origin_reach(lonely, window) == 0


def test_theta_curve_limits_and_monotonicity(fast_settings) -> None:
    curve = theta_curve(0.4, [0.0, 0.5, 1.0], [1, 2], 8, 3, fast_settings)
    assert curve.estimates[(0.0, 1)].value == 0.0
    assert curve.estimates[(1.0, 2)].value == 1.0
    assert curve.is_monotone()
    assert curve.estimates[(0.5, 1)].value >= curve.estimates[(0.5, 2)].value
    assert len(list(curve.rows())) == 6
    with pytest.raises(ConfigError):
        theta_curve(0.4, [], [1], 8, 3, fast_settings)


def test_rc_locator_returns_monotone_curve(fast_settings) -> None:
    result = rc_locator(0.0, 3, 16, 9, settings=fast_settings, grid_points=21, resamples=20)
    assert 0.0 < result.r_hat < 1.0
    assert result.monotone
    assert result.curve[0].value == 0.0
    assert result.curve[-1].value == 1.0
    assert result.bootstrap.size == 20
    assert result.to_record()["event"] == "V+"
    square = rc_locator(0.0, 3, 8, 9, square=True, settings=fast_settings, grid_points=11, resamples=5)
    assert square.spec.label == "H+"


def test_tails_are_degenerate_without_clusters(fast_settings) -> None:
    fit, _ = cluster_tail(0.5, 0.0, 10, 0, 2, fast_settings)
    assert fit.degenerate
    fit, ensemble = fk_range_tail(0.0, 10, 0, 2, fast_settings)
    assert fit.degenerate
    assert all(d == 0 and not escaped for d, escaped in ensemble.records())


def test_cluster_tail_records_whole_window_at_r_one(fast_settings) -> None:
    _, ensemble = cluster_tail(0.0, 1.0, 4, 0, 2, fast_settings)
    assert ensemble.records() == [(25, True)] * 4


def test_finite_size_check_passes_at_r_one(fast_settings) -> None:
    report = finite_size_check(0.0, 3, 0.3, 1.0, 40, 1, fast_settings)
    assert report.range_threshold == 1
    assert report.range_upper == 0.0
    assert report.crossing.value == 1.0
    assert report.crossing_lower == pytest.approx(0.025 ** (1 / 40), rel=1e-6)
    assert report.passed
    assert report.to_record()["passed"]


def test_finite_size_check_fails_at_r_zero(fast_settings) -> None:
    report = finite_size_check(0.0, 3, 0.3, 0.0, 10, 1, fast_settings)
    assert not report.crossing_condition
    assert not report.passed
    with pytest.raises(ConfigError):
        finite_size_check(0.0, 3, 1.5, 0.0, 10, 1, fast_settings)


def test_cutpoint_count_without_plus(fast_settings) -> None:
    growth = cutpoint_growth(0.2, [2, 3], 4, 0, r=0.0, settings=fast_settings)
    assert growth.estimates[2].value == 0.0
    assert growth.found[3] == 1.0
    assert not growth.increasing()


def test_cutpoint_count_is_none_without_crossing(fast_settings) -> None:
    ensemble = run_ensemble(Parallelogram.s(2, 12), 0.0, 2, 0, lambda s: cutpoint_count(s, 1.0, 2), fast_settings)
    assert ensemble.records() == [None, None]


def test_two_giants(spins_from_rows) -> None:
    region = Parallelogram.s(3, 3)
    stripes = spins_from_rows(region, ["++++", "----", "++++", "----"])
    assert two_giants(stripes, region)
    blob = spins_from_rows(region, ["++++", "++++", "----", "----"])
    assert not two_giants(blob, region)


def test_uniqueness_probe_at_extreme_r(fast_settings) -> None:
    for r in (0.0, 1.0):
        result = uniqueness_probe(0.3, r, [2, 3], 4, 0, fast_settings)
        assert sorted(result) == [2, 3]
        assert all(est.value == 0.0 for est in result.values())


@pytest.mark.slow
def test_plus_crossing_probability_near_one_above_half() -> None:
    settings = SamplerSettings(burn_in=50, thin=2, chains=4, buffer=8, threads=4)
    spec = CrossingSpec(Parallelogram.s(8, 24), "vertical", 1)
    result = crossing_prob(0.2, 0.9, spec, 400, 0, settings)
    assert result.estimate.value > 0.9
    low, _ = result.estimate.interval()
    assert low > 0.8


def test_buffer_follows_psi_hat_unless_given() -> None:
    inner = Parallelogram.s(8, 8)
    assert SamplerSettings(psi_hat=0.05).box_around(inner).buffer == 40
    assert SamplerSettings(psi_hat=0.5).box_around(inner).buffer == 16
    assert SamplerSettings().box_around(inner).buffer == 16
    assert SamplerSettings(psi_hat=0.05, buffer=3).box_around(inner).buffer == 3

    config = RunConfig(command="estimate crossing", beta=0.3, psi_hat=0.05)
    settings = SamplerSettings.from_run_config(config)
    assert settings.psi_hat == 0.05
    assert settings.box_around(inner).buffer == 40


@pytest.mark.slow
def test_fk_range_decay_rate_falls_as_beta_grows() -> None:
    settings = SamplerSettings(burn_in=50, thin=2, chains=4, buffer=16, threads=4, guard=1.0)
    rates = []
    for beta in (0.1, 0.3, 0.5):
        fit, _ = fk_range_tail(beta, 800, 0, 10, settings)
        assert not fit.degenerate, beta
        rates.append(fit.rate)
    assert rates[0] > rates[1] > rates[2] > 0.0
