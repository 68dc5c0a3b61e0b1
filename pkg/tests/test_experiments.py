"""Campaign layer: sweeps, scans, and drift studies against frozen values."""

import math
from dataclasses import replace

import numpy as np
import pytest

import focsim as fs
from focsim.constants import constant
from focsim.experiments import (
    delta_at_temperature,
    delta_at_wavelength,
    device_delta,
    worker_count,
)
from focsim.spun import grid_for, total_matrix

import _frozen


def test_worker_count_parsing(monkeypatch):
    monkeypatch.delenv("FOCSIM_THREADS", raising=False)
    assert worker_count() == 1
    monkeypatch.setenv("FOCSIM_THREADS", "")
    assert worker_count() == 1
    monkeypatch.setenv("FOCSIM_THREADS", " 4 ")
    assert worker_count() == 4
    monkeypatch.setenv("FOCSIM_THREADS", "0")
    with pytest.raises(ValueError):
        worker_count()
    monkeypatch.setenv("FOCSIM_THREADS", "two")
    with pytest.raises(ValueError):
        worker_count()


def test_front_end_validation():
    plate = fs.ImperfectWaveplate(math.pi / 2, 0.0)
    med = fs.default_demo_medium()
    with pytest.raises(ValueError):
        fs.FrontEnd(kind="ideal", waveplate=plate)
    with pytest.raises(ValueError):
        fs.FrontEnd(kind="imperfect_qwp")
    with pytest.raises(ValueError):
        fs.FrontEnd(kind="imperfect_qwp", waveplate=plate, medium=med)
    with pytest.raises(ValueError):
        fs.FrontEnd(kind="spun_fiber", medium=med, n_segments=100)  # ramped profile
    with pytest.raises(ValueError):
        fs.front_end_high_order(
            fs.SpunMediumSpec(0.03, 100.0, fs.SpinProfile("constant", 500.0)), 100
        )
    with pytest.raises(ValueError):
        fs.FrontEnd(kind="high_order_qwp", medium=med, n_segments=0)
    with pytest.raises(ValueError):
        fs.FrontEnd(kind="polarizer")
    assert fs.front_end_ideal().converter_override() is None
    assert fs.front_end_imperfect(plate).converter_override() is None


def test_converter_override_is_the_medium_product():
    fe = fs.front_end_high_order(fs.default_demo_medium(), 2048)
    fwd, ret = fe.converter_override()
    want = total_matrix(fs.default_demo_medium(), grid_for(fs.default_demo_medium(), 2048))
    assert np.array_equal(fwd, want)
    assert np.array_equal(ret, want.T)


def test_ideal_sweep_has_identically_zero_error():
    res = fs.run_current_sweep(fs.default_sweep_spec())
    assert res.n_fringe_null == 0
    assert np.array_equal(res.i_out, res.i_ideal)
    assert np.all(res.err_pct == 0.0)
    assert res.max_abs_err_pct == 0.0
    assert res.mean_abs_err_pct == 0.0
    vt = constant("verdet_rad_per_amp_turn") * constant("coil_turns")
    assert np.allclose(res.faraday_rad, vt * res.currents_a, atol=0.0)
    assert res.faraday_rad[-1] == pytest.approx(_frozen.F_AT_2000A, rel=1e-12)


def test_fringe_null_rows_are_excluded_from_summaries():
    spec = fs.default_sweep_spec()
    vt = spec.verdet_rad_per_amp_turn * spec.turns
    null_current = (math.pi / 4) / vt
    spec = replace(spec, currents_a=(0.0, null_current, 1000.0))
    res = fs.run_current_sweep(spec)
    assert res.n_fringe_null == 1
    assert math.isnan(res.i_out[1]) and math.isnan(res.err_pct[1])
    assert res.i_ideal[1] == pytest.approx(0.0, abs=1e-15)
    assert res.max_abs_err_pct == 0.0  # the two live rows are ideal
    only_null = fs.run_current_sweep(replace(spec, currents_a=(null_current,)))
    assert math.isnan(only_null.max_abs_err_pct)


def test_imperfection_scan_reproduces_frozen_worst_case():
    two_deg = math.radians(2.0)
    scan = fs.run_imperfection_scan(
        cut_deviations_m=(-5e-4, 5e-4),
        splice_angles_rad=(-two_deg, two_deg),
    )
    assert len(scan.cells) == 4
    assert scan.worst_err_pct == pytest.approx(_frozen.C3_MAX_ERR_PCT, rel=1e-9)
    assert scan.worst_err_pct == max(c.max_abs_err_pct for c in scan.cells)
    assert all(c.max_abs_err_pct > 0.2 for c in scan.cells)


def test_xi_sweep_matches_frozen_cells(xi_table):
    rows, _ = xi_table
    for kind in ("linear", "cosine"):
        for ratio in (1.0, 3.0, 5.0, 10.0):
            row = rows[(kind, ratio)]
            cell = _frozen.CELLS_N1E6[f"{kind}_{int(ratio)}"]
            assert row.delta_eps_pp_settled == pytest.approx(cell["pp_settled"], rel=1e-9)
            assert row.rms_eps_settled == pytest.approx(cell["rms_settled"], rel=1e-8)
            assert row.mean_eps_settled == pytest.approx(cell["mean_settled"], rel=1e-9)
            assert row.delta_eps_pp_full == pytest.approx(cell["pp_full"], rel=1e-9)
            if cell["conv_abs"] is None:
                assert row.conversion_length_m is None
            else:
                assert row.conversion_length_m == pytest.approx(cell["conv_abs"], abs=1e-9)
            assert row.ripple_flagged == (cell["pp_settled"] > 0.01)


def test_fast_linear_ramp_trips_the_ripple_flag():
    med = fs.default_demo_medium()
    lin = replace(med.profile, kind="linear", xi_max_rad_per_m=6.0 * med.delta_rad_per_m)
    res = fs.run_xi_sweep(replace(med, profile=lin), (6.0,), 1_000_000)
    (row,) = res.rows
    assert res.profile_kind == "linear"
    assert row.delta_eps_pp_settled == pytest.approx(_frozen.LINEAR_R6_PP_SETTLED, rel=1e-9)
    assert row.ripple_flagged


def test_perturbation_study_matches_frozen(perturbation_result):
    res, _ = perturbation_result
    assert res.base_pp == pytest.approx(_frozen.C9_BASE_PP_SETTLED, rel=1e-9)
    p = _frozen.C9_PERT_PCT
    want_wl = max(p["wl_minus10nm"]["pp"], p["wl_plus10nm"]["pp"])
    want_t = max(p["t_minus20"]["pp"], p["t_plus20"]["pp"])
    assert res.wavelength.pp_increase_pct == pytest.approx(want_wl, rel=1e-6)
    assert res.temperature.pp_increase_pct == pytest.approx(want_t, rel=1e-6)
    lam0 = constant("wavelength_m")
    assert res.wavelength.low_value == lam0 - 1e-8
    assert res.wavelength.high_value == lam0 + 1e-8
    assert res.temperature.low_value == 5.0
    assert res.temperature.high_value == 45.0
    want_rms_t = max(p["t_minus20"]["rms"], p["t_plus20"]["rms"])
    assert res.temperature.rms_increase_pct == pytest.approx(want_rms_t, rel=1e-6)


def test_delta_scaling_laws():
    assert delta_at_wavelength(100.0, 1.0e-6, 2.0e-6) == 50.0
    k = constant("temperature_coeff_per_c")
    t0 = constant("reference_temperature_c")
    assert delta_at_temperature(100.0, t0) == 100.0
    assert delta_at_temperature(100.0, t0 + 10.0) == pytest.approx(
        100.0 * (1.0 + 10.0 * k), rel=1e-15
    )
    assert device_delta() == pytest.approx(
        2.0 * math.pi * constant("birefringence_delta_n") / constant("wavelength_m"),
        rel=1e-15,
    )


def test_convergence_ladder_matches_frozen():
    med = fs.default_demo_medium()
    res = fs.run_convergence_ladder(med, (1024, 4096, 16384), 1 << 20)
    assert res.reference_n == 1 << 20
    for row in res.rows:
        assert row.max_abs_dev == pytest.approx(
            _frozen.LADDER_DEFAULT[row.n_segments], rel=1e-9
        )
    r1, r2 = res.ratios()
    assert r1 == res.rows[0].max_abs_dev / res.rows[1].max_abs_dev
    assert r2 == res.rows[1].max_abs_dev / res.rows[2].max_abs_dev
    with pytest.raises(ValueError):
        fs.run_convergence_ladder(med, (512, 2048), 2048)


def test_distributed_front_ends_match_frozen_sweep_errors():
    dev = 5e-4
    ho = fs.default_high_order_front_end()
    n = ho.n_segments
    for idx, d in ((1, 0.0), (2, dev)):
        fe = fs.front_end_high_order(ho.medium.with_total_length(0.10 + d), n)
        res = fs.run_current_sweep(fs.default_sweep_spec(fe))
        assert res.max_abs_err_pct == pytest.approx(_frozen.C8_HO_ERRS_PCT[idx], rel=1e-9)
    sp = fs.default_spun_front_end()
    for idx, d in ((0, -dev), (1, 0.0)):
        fe = fs.front_end_spun(sp.medium.with_total_length(0.03 + d), n)
        res = fs.run_current_sweep(fs.default_sweep_spec(fe))
        assert res.max_abs_err_pct == pytest.approx(_frozen.C8_SPUN_ERRS_PCT[idx], rel=1e-9)


def test_default_front_end_geometry():
    ho = fs.default_high_order_front_end()
    assert ho.kind == "high_order_qwp"
    assert ho.medium.profile.kind == "cosine"
    assert ho.medium.xi_over_delta == pytest.approx(10.0, rel=1e-15)
    assert ho.medium.delta_rad_per_m == pytest.approx(device_delta(), rel=1e-15)
    sp = fs.default_spun_front_end()
    assert sp.kind == "spun_fiber"
    assert sp.medium.profile.kind == "constant"
    assert sp.medium.xi_over_delta == pytest.approx(5.0, rel=1e-15)
    assert sp.n_segments == ho.n_segments == int(constant("front_end_segments"))


def test_thread_pool_results_match_serial(monkeypatch):
    med = fs.default_demo_medium()
    currents = tuple(np.linspace(0.0, 2000.0, 21))
    sweep = replace(fs.default_sweep_spec(), currents_a=currents)

    monkeypatch.delenv("FOCSIM_THREADS", raising=False)
    serial_xi = fs.run_xi_sweep(med, (1.0, 3.0), 2000)
    serial_sw = fs.run_current_sweep(sweep)

    monkeypatch.setenv("FOCSIM_THREADS", "3")
    pooled_xi = fs.run_xi_sweep(med, (1.0, 3.0), 2000)
    pooled_sw = fs.run_current_sweep(sweep)

    assert pooled_xi == serial_xi
    for name in ("currents_a", "faraday_rad", "i_out", "i_ideal", "err_pct"):
        assert np.array_equal(getattr(pooled_sw, name), getattr(serial_sw, name))
    assert pooled_sw.max_abs_err_pct == serial_sw.max_abs_err_pct
