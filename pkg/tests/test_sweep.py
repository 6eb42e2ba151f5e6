import math

import numpy as np
import pytest

from MagnonFisher import sweep
from MagnonFisher.errors import ConfigError, UnknownPreset
from MagnonFisher.outputs import write_csv_text
from MagnonFisher.params import SystemParams, two_pi_mhz
from MagnonFisher.sweep import (
    DIAGNOSTIC_COLUMNS,
    STABILITY_COLUMNS,
    AxisSpec,
    SweepSpec,
    figure_preset,
    preset_names,
    run_sweep,
)


def _coupling_axis(points=2):
    return AxisSpec("g", start=two_pi_mhz(40.0), stop=two_pi_mhz(42.0), points=points)


def test_axis_grid():
    assert np.array_equal(AxisSpec("J", start=0.0, stop=2.0, points=3).grid(), [0.0, 1.0, 2.0])
    log = AxisSpec("P_l", start=1e-3, stop=1.0, points=4, scale="log").grid()
    assert log == pytest.approx([1e-3, 1e-2, 1e-1, 1.0], rel=1e-12)
    assert list(AxisSpec("T", values=(0.01, 0.1)).grid()) == [0.01, 0.1]


@pytest.mark.parametrize(
    "kwargs",
    [
        {"name": "flux", "start": 0.0, "stop": 1.0, "points": 3},
        {"name": "J", "start": 0.0, "stop": 1.0, "points": 1},
        {"name": "J", "start": 1.0, "stop": 0.0, "points": 3},
        {"name": "P_l", "start": 0.0, "stop": 1.0, "points": 3, "scale": "log"},
        {"name": "J", "start": 0.0, "stop": 1.0, "points": 3, "scale": "cubic"},
        {"name": "J"},
    ],
)
def test_axis_validation(kwargs):
    with pytest.raises(ConfigError):
        AxisSpec(**kwargs)


def test_axis_from_dict_with_units():
    axis = AxisSpec.from_dict({"axis": "J", "start_2pi_MHz": 0, "stop_2pi_MHz": 60, "points": 3})
    assert axis.grid() == pytest.approx([0.0, two_pi_mhz(30), two_pi_mhz(60)], rel=1e-15)


def test_sweep_spec_validation():
    with pytest.raises(ConfigError):
        SweepSpec(axis=_coupling_axis(), quantities=("entropy",))
    with pytest.raises(ConfigError):
        SweepSpec(axis=_coupling_axis(), quantities=())
    with pytest.raises(ConfigError):
        SweepSpec(axis=_coupling_axis(), secondary=_coupling_axis(), quantities=("qfi_global",))


def test_columns_follow_canonical_order():
    spec = SweepSpec(axis=_coupling_axis(), quantities=("ratios", "qfi_m", "qfi_global"))
    assert spec.quantities == ("qfi_global", "qfi_m", "ratios")
    assert spec.columns() == (
        ("g",) + STABILITY_COLUMNS + ("qfi_global", "qfi_m", "xi_a1", "xi_a2", "xi_m") + DIAGNOSTIC_COLUMNS
    )


def test_sweep_rows(baseline):
    spec = SweepSpec(axis=_coupling_axis(), quantities=("qfi_global", "qfi_a1", "qfi_a2", "qfi_m", "ratios"))
    result = run_sweep(spec, baseline)
    assert len(result.rows) == 2 and not result.skipped
    for row in result.rows:
        assert set(row) == set(spec.columns())
        assert row["stable"] is True
        assert row["qfi_global"] >= row["qfi_a2"] > row["qfi_m"]
        assert row["xi_a2"] == pytest.approx(row["qfi_a2"] / row["qfi_global"], rel=1e-15)
    assert [row["g"] for row in result.rows] == list(spec.axis.grid())


def test_sweep_records_skips():
    base = SystemParams.baseline(J=0.0, delta_m=two_pi_mhz(-100.0))
    spec = SweepSpec(axis=AxisSpec("P_l", values=(0.3, 0.8)), quantities=("qfi_global",))
    result = run_sweep(spec, base)
    assert result.grid_size == 2
    skipped = {skip.index: skip for skip in result.skipped}
    assert skipped[1].reason == "multistable"
    assert skipped[1].point == {"P_l": 0.8}


def test_sweep_skips_linear_algebra_failures(baseline, monkeypatch):
    evaluate = sweep.evaluate_point

    def failing(params, spec):
        if params.g == two_pi_mhz(41.0):
            raise np.linalg.LinAlgError("Singular matrix")
        return evaluate(params, spec)

    monkeypatch.setattr(sweep, "evaluate_point", failing)
    spec = SweepSpec(axis=AxisSpec("g", values=(two_pi_mhz(40.0), two_pi_mhz(41.0))), quantities=("qfi_global",))
    result = run_sweep(spec, baseline, jobs=2)
    assert len(result.rows) == 1
    assert result.skipped[0].index == 1
    assert result.skipped[0].reason == "singular"


def test_sweep_is_independent_of_workers(baseline):
    spec = SweepSpec(axis=_coupling_axis(4), quantities=("qfi_global", "cfi_het"))
    serial = run_sweep(spec, baseline, jobs=1)
    parallel = run_sweep(spec, baseline, jobs=3)
    assert write_csv_text(serial.columns, serial.rows) == write_csv_text(parallel.columns, parallel.rows)


def test_sweep_rejects_no_workers(baseline):
    with pytest.raises(ConfigError):
        run_sweep(SweepSpec(axis=_coupling_axis(), quantities=("qfi_global",)), baseline, jobs=0)


def test_stability_only_sweep(baseline):
    spec = SweepSpec(
        axis=AxisSpec("J", start=0.0, stop=two_pi_mhz(60.0), points=3),
        quantities=("stability",),
        closed_form_check=True,
    )
    result = run_sweep(spec, baseline)
    assert spec.stability_only
    assert "closed_form_ok" in spec.columns()
    assert not any(column.startswith("qfi") for column in spec.columns())
    assert len(result.rows) == 3
    assert all(isinstance(row["stable"], bool) for row in result.rows)
    assert result.rows[0]["closed_form_ok"] in (True, False)


def test_two_axis_grid(baseline):
    spec = SweepSpec(
        axis=AxisSpec("T", values=(10e-3, 100e-3)),
        secondary=AxisSpec("g", values=(two_pi_mhz(40.0), two_pi_mhz(41.0), two_pi_mhz(42.0))),
        quantities=("qfi_a2",),
    )
    assert len(spec.points()) == 6
    assert spec.points()[1] == (10e-3, two_pi_mhz(41.0))


def test_presets():
    names = preset_names()
    assert {"fig2", "fig3", "fig4", "fig5a", "fig5b", "fig6a", "fig6b", "fig7a", "fig7d"} <= set(names)
    fig6a = figure_preset("fig6a")
    assert fig6a.name == "fig6a"
    assert fig6a.axis.name == "J"
    assert fig6a.quantities == ("ratios",)
    assert fig6a.notes
    assert figure_preset("fig5b").axis.grid()[0] < 0
    assert figure_preset("fig7a").quantities[-1] == "cfi_ogm"
    assert figure_preset("fig2").secondary.name == "T"


def test_unknown_preset():
    with pytest.raises(UnknownPreset) as excinfo:
        figure_preset("fig9")
    assert excinfo.value.reason == "unknown_preset"


def _series(result, quantity, **fixed):
    rows = [row for row in result.rows if all(row[k] == v for k, v in fixed.items())]
    return [row[quantity] for row in rows]


@pytest.mark.slow
def test_power_and_temperature_trends(baseline):
    spec = figure_preset("fig2")
    result = run_sweep(spec, baseline, jobs=4)
    for T in spec.secondary.grid():
        values = _series(result, "qfi_global", T=T)
        assert len(values) == spec.axis.points
        assert all(a < b for a, b in zip(values, values[1:]))
    for P_l in spec.axis.grid():
        values = _series(result, "qfi_global", P_l=P_l)
        assert all(a > b for a, b in zip(values, values[1:]))


@pytest.mark.slow
def test_cavity_decay_has_interior_optimum(baseline):
    spec = figure_preset("fig3")
    result = run_sweep(spec, baseline, jobs=4)
    for gamma_m in spec.secondary.grid():
        values = _series(result, "qfi_global", gamma_m=gamma_m)
        best = int(np.argmax(values))
        assert 0 < best < len(values) - 1
    for gamma_a in spec.axis.grid():
        values = _series(result, "qfi_global", gamma_a=gamma_a)
        assert all(a > b for a, b in zip(values, values[1:]))


@pytest.mark.slow
@pytest.mark.parametrize("preset", ["fig6a", "fig6b"])
def test_second_cavity_dominates_ratios(baseline, preset):
    result = run_sweep(figure_preset(preset), baseline, jobs=4)
    assert result.rows
    for row in result.rows:
        assert row["xi_a2"] > row["xi_a1"]
        assert row["xi_a2"] > row["xi_m"]


@pytest.mark.slow
def test_isolated_cavity_ratio_ordering(baseline):
    result = run_sweep(figure_preset("fig6a"), baseline, jobs=4)
    row = next(row for row in result.rows if row["J"] == 0.0)
    assert row["xi_a2"] > row["xi_m"] > row["xi_a1"]
    assert row["xi_a1"] <= 1e-8


@pytest.mark.slow
def test_detuning_sweep_peaks_on_red_side(baseline):
    result = run_sweep(figure_preset("fig5a"), baseline, jobs=4)
    detunings = [row["delta_a"] for row in result.rows]
    values = [row["qfi_global"] for row in result.rows]
    peaks = [i for i in range(1, len(values) - 1) if values[i - 1] < values[i] > values[i + 1]]
    assert sum(1 for i in peaks if detunings[i] > 0) >= 2
    assert detunings[int(np.argmax(values))] > 0
