"""Statistics and report writers on synthetic traces."""

from __future__ import annotations

import numpy as np
import pytest

from gridops.engine import SimulationTrace
from gridops.metrics import (congested_minutes, duration_curve,
                             evening_ramp_mw, exhausted_minutes,
                             excess_generation_minutes, histogram,
                             mileage_gwh, percentile_rank, summarize,
                             write_all)
from gridops.scenario import Generator, Scenario, ZonalNetwork


def make_trace(minutes=100, interfaces=("tie",), reg_units=("g1",)):
    return SimulationTrace(minutes=minutes, branch_names=["a-b"],
                           interface_names=list(interfaces),
                           reg_units=list(reg_units))


def test_nearest_rank_percentile():
    vals = np.arange(1, 101, dtype=float)   # 1..100
    assert percentile_rank(vals, 95.0) == 95.0
    assert percentile_rank(vals, 50.0) == 50.0
    assert percentile_rank(np.array([7.0]), 95.0) == 7.0


def test_duration_curve_descends():
    out = duration_curve(np.array([3.0, 1.0, 2.0]))
    assert list(out) == [3.0, 2.0, 1.0]


def test_histogram_edges_aligned():
    edges, counts = histogram(np.array([0.3, 1.7, 2.2, -0.4]), 1.0)
    assert edges[0] == -1.0 and edges[-1] == 3.0
    assert np.all(np.abs(edges - np.round(edges)) < 1e-12)
    assert counts.sum() == 4


def test_mileage_sums_absolute_movement():
    reg = np.array([[0.0], [5.0], [3.0], [3.0], [-2.0]])
    # Movement: 5 + 2 + 0 + 5 = 12 MW*min.
    assert mileage_gwh(reg) == pytest.approx(12.0 / 60_000.0)


def test_exhausted_counts_saturated_minutes():
    tr = make_trace(minutes=4)
    tr.reg_saturation = 50.0
    tr.regulation = np.array([[10.0], [50.0], [-50.0], [49.9995]])
    assert exhausted_minutes(tr) == 3


def test_congested_minutes_against_limit():
    tr = make_trace(minutes=3)
    tr.interface_flow[:, 0] = [10.0, 50.0, -50.0]
    tr.interface_limit[:, 0] = 50.0
    assert congested_minutes(tr) == {"tie": 2}


def test_excess_generation_floor():
    scn = Scenario(network=ZonalNetwork(bubbles=["a"]))
    scn.generators = [Generator(id="g", bubble="a", kind="must-run",
                                online=True, p_min=40.0, p_max=100.0)]
    tr = make_trace(minutes=3)
    tr.load[:] = [100.0, 35.0, 45.0]
    assert excess_generation_minutes(tr, scn) == 1


def test_evening_ramp_looks_after_solar_peak():
    tr = make_trace(minutes=300)
    m = np.arange(300, dtype=float)
    tr.load[:] = 100.0
    # Solar bump peaking at minute 100, gone by 220.
    tr.ver_delivered[:] = np.clip(80.0 * np.sin(np.pi * (m - 40) / 180), 0,
                                  None) * (m < 220)
    ramp = evening_ramp_mw(tr, window_min=60)
    net = tr.load - tr.ver_delivered
    brute = max(net[k + 60] - net[k] for k in range(100, 240))
    assert ramp == pytest.approx(brute)


def test_summarize_and_write(tmp_path):
    scn = Scenario(network=ZonalNetwork(bubbles=["a"]))
    tr = make_trace(minutes=10)
    tr.imbalance[:] = 0.5
    tr.imbalance[3] = 2.0
    rows = summarize(tr, scn, "demo")
    as_map = {(f, m): v for f, _, m, v, _ in rows}
    assert as_map[("imbalance", "minutes_above_1mw")] == 1
    assert as_map[("imbalance", "share_within_1mw")] == pytest.approx(0.9)
    write_all(str(tmp_path), tr, scn, "demo")
    text = (tmp_path / "report.csv").read_text().splitlines()
    assert text[0] == "family,scenario,metric,value,unit"
    assert any(line.startswith("imbalance,demo,p95_abs,") for line in text)
    assert (tmp_path / "duration_imbalance.csv").exists()
    assert (tmp_path / "hist_net_load.csv").exists()
    assert (tmp_path / "plotdata" / "regulation.csv").exists()
