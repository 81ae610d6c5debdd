import math

import pytest
from hypothesis import given, settings, strategies as st

from squeezamp.protocol import (MSP_SIGN_TABLE, ProtocolSpec, SegmentSpec, make_msp,
                                make_protocol, make_single_squeeze, validate_protocol, with_eta)


def test_single_squeeze_two_segments_when_no_free_time():
    spec = make_single_squeeze(0.01, 1.0, 0.5, 2.0, 4.0)
    assert len(spec) == 2
    assert [(s.sdf_sign, s.pd_sign) for s in spec] == [(1, 1), (-1, -1)]
    assert [s.duration for s in spec] == [2.0, 2.0]


def test_single_squeeze_free_segment():
    spec = make_single_squeeze(0.01, 1.0, 0.5, 1.0, 4.0)
    assert len(spec) == 3
    mid = spec.segments[1]
    assert mid.duration == 2.0 and mid.is_free
    assert (mid.sdf_sign, mid.pd_sign, mid.alpha, mid.g) == (0, 0, 0.0, 0.0)
    assert spec.total_T == 4.0


def test_pulse_longer_than_total_rejected():
    with pytest.raises(ValueError, match="pulse duration exceeds total time"):
        make_single_squeeze(0.01, 1.0, 0.5, 3.0, 4.0)


def test_msp_structure():
    spec = make_msp(0.01, 1.0, 0.8, 1.0)
    assert len(spec) == 8 and spec.total_T == 8.0
    assert [s.sdf_sign for s in spec] == [1, 1, 1, 1, -1, -1, -1, -1]
    assert [(s.sdf_sign, s.pd_sign) for s in spec] == list(MSP_SIGN_TABLE)


def test_msp_zero_drive_is_valid():
    assert validate_protocol(make_msp(0.0, 1.0, 0.8, 1.0)) == []
    spec = make_msp(0.01, 1.0, 0.0, 1.0)
    assert validate_protocol(spec) == []
    assert all(s.pd_sign == 0 for s in spec)


def test_validate_messages():
    spec = make_single_squeeze(0.01, 1.0, 0.5, 2.0, 4.0)
    assert validate_protocol(spec) == []
    off = ProtocolSpec(spec.segments, total_T=4.1)
    assert validate_protocol(off) == ["total_T inconsistent"]
    segs = (spec.segments[0], SegmentSpec(0.01, 0, 0.0, 0, 0.0, 0.0))
    assert validate_protocol(ProtocolSpec(segs, total_T=2.0)) == ["segment 1: duration must be > 0"]


def test_validate_sign_strength_and_provenance():
    bad = SegmentSpec(0.01, 1, 0.0, 0, 0.0, 1.0)
    assert any("sdf_sign is 0 iff alpha is 0" in p for p in validate_protocol(ProtocolSpec((bad,))))
    prov = SegmentSpec(0.01, 0, 0.0, 0, 0.0, 1.0, field_provenance=(0.02, 0.5, 1.0))
    assert validate_protocol(ProtocolSpec((prov,))) == []
    prov = SegmentSpec(0.01, 0, 0.0, 0, 0.0, 1.0, field_provenance=(0.02, 1.0, 1.0))
    assert validate_protocol(ProtocolSpec((prov,))) == ["segment 0: eta differs from E*q*z0"]


def test_make_protocol_defaults():
    assert make_protocol("single", 0.01, 1, 0.5, 4).segments[0].duration == 2.0
    assert make_protocol("msp", 0.01, 1, 0.8, 8).segments[0].duration == 1.0
    with pytest.raises(ValueError):
        make_protocol("triple", 0.01, 1, 0.5, 4)


def test_with_eta_keeps_free_segments():
    spec = with_eta(make_single_squeeze(0.01, 1.0, 0.5, 1.0, 4.0), 0.02)
    assert all(s.eta == 0.02 for s in spec)
    assert validate_protocol(spec) == []


pos = st.floats(0.01, 5.0)


@given(eta=st.floats(-1, 1), alpha=st.floats(0, 5), g=st.floats(0, 3), tau=pos,
       extra=st.floats(0, 5))
def test_single_squeeze_always_valid(eta, alpha, g, tau, extra):
    spec = make_single_squeeze(eta, alpha, g, tau, 2 * tau + extra)
    assert validate_protocol(spec) == []


@given(eta=st.floats(-1, 1), alpha=st.floats(0.01, 5), g=st.floats(0.01, 3), tau=pos)
def test_msp_sign_sums_and_reversal(eta, alpha, g, tau):
    spec = make_msp(eta, alpha, g, tau)
    assert sum(s.pd_sign for s in spec) == 0
    assert sum(s.sdf_sign for s in spec) == 0
    for k in range(8):
        assert spec.segments[k].sdf_sign == -spec.segments[7 - k].sdf_sign
    assert math.isclose(spec.total_T, 8 * tau)
