import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from squeezamp import metrology as m


def test_sens_single_examples():
    # r^2 / (alpha T^2 (e^r - 1 - r)) at r = 1
    assert m.sens_single(1, 0.5, 4) == pytest.approx(1 / (16 * (math.e - 2)), rel=1e-12)
    assert m.sens_single(1, 0.5, 4) == pytest.approx(0.0870135, rel=1e-5)
    assert m.sens_single(1, 1e-8, 4) == pytest.approx(0.125, rel=1e-6)
    assert m.sens_single(2, 0.5, 4) == pytest.approx(m.sens_single(1, 0.5, 4) / 2, rel=1e-14)
    with pytest.raises(ValueError):
        m.sens_single(0, 0.5, 4)


def test_other_sensitivities():
    assert m.sens_entanglement_only(1, 4) == 0.125
    assert m.sens_squeeze_only(0.5, 4) == pytest.approx(0.5 / (math.e - 1), rel=1e-14)
    assert m.sens_squeeze_only(1e-12, 4) == pytest.approx(0.5, rel=1e-9)


def test_amp_factors():
    gs, ge = m.amp_factors(1, 0.5, 4)
    assert ge == pytest.approx(2 * (math.e - 2), rel=1e-12)
    assert gs == pytest.approx(4 * (math.e - 2) / (math.e - 1), rel=1e-12)
    assert m.amp_factors(1, 1e-9, 4)[1] == pytest.approx(1, rel=1e-8)
    assert m.amp_factors(1, 0.5, 200)[0] == pytest.approx(4, rel=1e-2)
    assert m.amp_factors(1, 5.0, 4)[0] < 1


def test_nbar_single():
    ref = (0.01 * (1 - math.exp(-1)) / 0.5) ** 2 + ((math.e - 1) / 0.5) ** 2 + math.sinh(1) ** 2
    assert m.nbar_single(0.01, 1, 0.5, 4) == pytest.approx(ref, rel=1e-14)
    assert m.nbar_single(0, 1.3, 1e-12, 4) == pytest.approx((1.3 * 2) ** 2, rel=1e-9)
    assert m.nbar_single(0, 0, 0.7, 4) == pytest.approx(math.sinh(1.4) ** 2, rel=1e-14)


def test_msp_closed_forms():
    rm = 0.8
    assert m.msp_phase(0.01, 1, 0.8, 8) == pytest.approx(0.32 * math.sinh(rm) ** 2 / rm ** 2, rel=1e-14)
    assert m.msp_sens(1, 0.8, 8) == pytest.approx(0.0253571, rel=1e-5)
    assert m.msp_nbar(0.01, 1, 0.8, 8) == pytest.approx(16 * math.sinh(rm) ** 2 / rm ** 2, rel=1e-14)
    assert m.msp_nbar(0.01, 1, 0.8, 8, field_term=True) > m.msp_nbar(0.01, 1, 0.8, 8)
    assert m.msp_phase(0.01, 1, 1e-9, 8) == pytest.approx(0.32, rel=1e-12)
    assert m.msp_sens(1, 1e-9, 8) == pytest.approx(2 / 64, rel=1e-12)


def test_gain_examples():
    T = m.msp_T_for_nbar(1, 4, 1e3)
    assert 4 * T / 8 == pytest.approx(math.asinh(math.sqrt(1e3)), rel=1e-4)
    assert m.gains_db(1, 4, T) == pytest.approx(8.82, abs=0.01)
    assert m.gains_db(1, 0.5, 3 * 8 / 0.5) == pytest.approx(10 * math.log10(math.sinh(3) / 3), rel=1e-12)


def test_hl_scaling_examples():
    n = 400.0
    assert m.hl_scaling(1 / math.sqrt(n), n) == pytest.approx(0.5)
    assert m.hl_scaling(1 / (2 * math.sqrt(n)), n) == pytest.approx(0.5 + math.log(2) / math.log(n))
    with pytest.raises(ValueError):
        m.hl_scaling(0.1, 1.0)


def test_bounds_and_qfi():
    assert m.successive_bound_gain(1e6) == pytest.approx(10 * math.log10(4 + 2 * math.sqrt(2) / 1e3))
    assert m.successive_bound_gain(1e30) == pytest.approx(10 * math.log10(4), abs=1e-12)
    assert m.qfi_closed("fock", 3) == 28
    assert m.qfi_closed("squeezed", 1) == pytest.approx(29.5562, rel=1e-5)
    with pytest.raises(ValueError):
        m.qfi_closed("thermal", 1)


def test_report_flags_and_consistency():
    r = m.report("msp", 1, 0.01, 0.8, 8)
    assert "sub_sql" in r.flags and r.delta_beta == pytest.approx(r.delta_eta * 8, rel=1e-12)
    assert math.isfinite(r.gain_db) and math.isfinite(r.k)
    assert "squeeze_only" in m.report("single", 0, 0.01, 0.5, 4).flags
    assert m.report("single", 1, 0.01, 0.5, -1).flags[0].startswith("error")
    assert "k_undefined" in m.report("msp", 1, 0.01, 4, 1).flags


def test_sweep_order_and_determinism(monkeypatch):
    g, T = [0.5, 1.0, 2.0], [1.0, 4.0]
    rows = m.sweep("single", 1, 0.01, g, T, workers=3)
    assert [(r.g, r.T) for r in rows] == [(a, b) for a in g for b in T]
    monkeypatch.setenv("SQUEEZAMP_THREADS", "1")
    assert repr(m.sweep("single", 1, 0.01, g, T)) == repr(rows)
    with pytest.raises(ValueError):
        m.sweep("single", 1, 0.01, [], T)


def test_single_squeeze_never_beats_sql():
    rows = m.sweep("single", 1, 0.01, np.linspace(0.1, 2, 20), np.linspace(1, 10, 20))
    assert all(r.delta_beta > r.sql for r in rows)


def test_optimal_g_is_four_alpha():
    for nbar in (1e2, 1e3, 1e4):
        costs = {k: m.msp_sens(1, k, m.msp_T_for_nbar(1, k, nbar)) * m.msp_T_for_nbar(1, k, nbar)
                 for k in (2, 3, 4, 6, 8)}
        assert min(costs, key=costs.get) == 4


@given(alpha=st.floats(0.1, 5), T=st.floats(0.1, 20))
def test_gain_continuous_at_four_alpha(alpha, T):
    g = 4 * alpha
    lo = m.gains_db(alpha, g * (1 - 1e-13), T)
    hi = m.gains_db(alpha, g * (1 + 1e-13), T)
    assert abs(lo - hi) < 1e-10


@given(alpha=st.floats(0.1, 5), T=st.floats(0.1, 20))
def test_entanglement_limit(alpha, T):
    assert m.sens_single(alpha, 1e-12, T) == pytest.approx(m.sens_entanglement_only(alpha, T), rel=1e-9)


@given(alpha=st.floats(0.1, 5), rm=st.floats(0.01, 6))
def test_sub_sql_identity(alpha, rm):
    g = 4 * alpha * 0.9
    T = 8 * rm / g
    ratio = m.msp_sens(alpha, g, T) * T * math.sqrt(m.msp_nbar(0, alpha, g, T))
    assert ratio == pytest.approx(rm / math.sinh(rm), rel=1e-12)
    assert ratio < 1


@given(alpha=st.floats(0.1, 3), g1=st.floats(0, 3), dg=st.floats(0, 1), T=st.floats(0.1, 10))
def test_sens_single_non_increasing_in_g(alpha, g1, dg, T):
    assert m.sens_single(alpha, g1 + dg, T) <= m.sens_single(alpha, g1, T) * (1 + 1e-12)
