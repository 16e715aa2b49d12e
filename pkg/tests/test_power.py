import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from bpc.errors import InconsistentAssessmentError
from bpc.neighbors import ChannelAssessment
from bpc.power import (
    Branch,
    PowerConfig,
    PowerDecision,
    clear_channel_power,
    congested_power,
    decide_power,
    fixed_power_baseline,
    initial_decision,
    power_difference,
)


def assessment(S=63.51, max_bp=29.0, min_bp=25.0, ma_mp=29.0, mi_mp=26.0, d=23.0, F=2.027):
    return ChannelAssessment(
        F=F, S_pct=S, n=5, max_d_m=23.0, min_d_m=13.0,
        max_bp_dbm=max_bp, min_bp_dbm=min_bp, ma_mp_dbm=ma_mp, mi_mp_dbm=mi_mp,
        d_max_sender_m=d, window_end_ms=1000,
    )


CFG = PowerConfig()


@pytest.mark.parametrize("hi,lo,pd", [(29, 25, 4), (28, 28, 0), (33, 0, 33)])
def test_power_difference(hi, lo, pd):
    assert power_difference(hi, lo) == pd


def test_power_difference_inconsistent():
    with pytest.raises(InconsistentAssessmentError):
        power_difference(20, 25)


class TestCongested:
    def test_worked_example(self):
        d = congested_power(assessment(), CFG)
        assert d.branch is Branch.CONGESTED
        assert d.pow_u_dbm == pytest.approx(27.54, abs=0.01)
        assert d.pd_dbm == 4
        assert (d.advertise_max_p_dbm, d.advertise_min_p_dbm) == (29, 25)

    def test_zero_span_inside_gate(self):
        d = congested_power(assessment(max_bp=27, min_bp=27, mi_mp=26, ma_mp=29), CFG)
        assert d.branch is Branch.CONGESTED and d.pow_u_dbm == 27

    def test_zero_span_outside_gate(self):
        prev = PowerDecision(30.0, Branch.HOLD, 30, 30)
        d = congested_power(assessment(max_bp=25, min_bp=25), CFG, prev)
        assert d.branch is Branch.HOLD and d.pow_u_dbm == 30

    def test_gate_fails_low(self):
        # 25 + 4 * 0.20 = 25.8 <= MiMP 26
        prev = PowerDecision(31.0, Branch.CLEAR_MID, 29, 25)
        d = congested_power(assessment(S=20), CFG, prev)
        assert d.branch is Branch.HOLD
        assert d.pow_u_dbm == 31.0
        assert (d.advertise_max_p_dbm, d.advertise_min_p_dbm) == (29, 25)

    def test_gate_is_strict(self):
        # 25 + 4 * 0.25 = 26 == MiMP
        assert congested_power(assessment(S=25), CFG).branch is Branch.HOLD

    def test_gate_fail_without_previous_uses_initial(self):
        d = congested_power(assessment(S=20), PowerConfig(initial_power_dbm=30))
        assert d.pow_u_dbm == 30


class TestClearChannel:
    @pytest.mark.parametrize(
        "max_bp,d,power,branch",
        [
            (29, 250, 29, Branch.CLEAR_FAR),
            (29, 150, 31, Branch.CLEAR_MID),
            (29, 50, 33, Branch.CLEAR_NEAR),
            (32, 250, 32, Branch.CLEAR_FAR),
            (32, 150, 33, Branch.CAPPED),
            (32, 50, 33, Branch.CAPPED),
        ],
    )
    def test_branch_table(self, max_bp, d, power, branch):
        out = clear_channel_power(assessment(S=100, max_bp=max_bp, min_bp=max_bp - 4, d=d), CFG)
        assert out.pow_u_dbm == power
        assert out.branch is branch

    def test_thresholds_are_exclusive(self):
        assert clear_channel_power(assessment(S=100, d=200), CFG).branch is Branch.CLEAR_MID
        assert clear_channel_power(assessment(S=100, d=100), CFG).branch is Branch.CLEAR_NEAR

    def test_config_cap(self):
        out = clear_channel_power(assessment(S=100, d=250), PowerConfig(max_power_dbm=20))
        assert out.pow_u_dbm == 20 and out.branch is Branch.CAPPED


class TestDecide:
    def test_first_call_without_neighbors(self):
        d = decide_power(None, None, CFG)
        assert d.pow_u_dbm == 33 and d.branch is Branch.HOLD

    def test_hold_previous_without_neighbors(self):
        prev = PowerDecision(27.5, Branch.CONGESTED, 29, 25, 4)
        d = decide_power(None, prev, CFG)
        assert d.pow_u_dbm == 27.5 and d.branch is Branch.HOLD
        assert (d.advertise_max_p_dbm, d.advertise_min_p_dbm) == (29, 25)

    def test_worked_example(self):
        assert decide_power(assessment(), None, CFG).pow_u_dbm == pytest.approx(27.54, abs=0.01)

    def test_clear_dispatch(self):
        a = assessment(S=100, d=150)
        assert decide_power(a, None, CFG) == clear_channel_power(a, CFG)

    def test_fifty_percent_gate(self):
        cfg = PowerConfig(congestion_gate_pct=50)
        prev = PowerDecision(33.0, Branch.HOLD, 33, 33)
        held = decide_power(assessment(), prev, cfg)
        assert held.branch is Branch.HOLD and held.pow_u_dbm == 33
        assert (held.advertise_max_p_dbm, held.advertise_min_p_dbm) == (29, 25)
        adjusted = decide_power(assessment(S=40), prev, cfg)
        assert adjusted.branch is Branch.CONGESTED
        assert adjusted.pow_u_dbm == pytest.approx(25 + 4 * 0.4)

    def test_deterministic(self):
        a = assessment(S=71.3)
        assert decide_power(a, None, CFG) == decide_power(a, None, CFG)


class TestBaseline:
    def test_default(self):
        assert fixed_power_baseline(CFG).pow_u_dbm == 33

    def test_configured(self):
        d = fixed_power_baseline(PowerConfig(max_power_dbm=20))
        assert d.pow_u_dbm == 20 and d.branch is Branch.HOLD

    def test_repeatable(self):
        assert fixed_power_baseline(CFG) == fixed_power_baseline(CFG)


def test_initial_decision_advertises_own_power():
    d = initial_decision(CFG, 28.5)
    assert (d.pow_u_dbm, d.advertise_max_p_dbm, d.advertise_min_p_dbm) == (28.5, 28.5, 28.5)


def test_config_validation():
    with pytest.raises(ValueError):
        PowerConfig(mid_threshold_m=300)
    with pytest.raises(ValueError):
        PowerConfig(max_power_dbm=40)


dbm = st.integers(0, 3300).map(lambda v: v / 100)


@given(dbm, dbm, st.floats(0, 99.999), st.floats(0, 99.999))
def test_congested_bounds_and_monotone(p1, p2, s1, s2):
    lo, hi = sorted((p1, p2))
    s_lo, s_hi = sorted((s1, s2))
    # open gate so every candidate inside (0, 33) is adopted
    a_lo = assessment(S=s_lo, max_bp=hi, min_bp=lo, ma_mp=33.0, mi_mp=0.0)
    a_hi = assessment(S=s_hi, max_bp=hi, min_bp=lo, ma_mp=33.0, mi_mp=0.0)
    d_lo, d_hi = congested_power(a_lo, CFG), congested_power(a_hi, CFG)
    for d in (d_lo, d_hi):
        assert 0 <= d.pow_u_dbm <= 33
        if d.branch is Branch.CONGESTED:
            assert lo <= d.pow_u_dbm <= hi
    assume(d_lo.branch is Branch.CONGESTED and d_hi.branch is Branch.CONGESTED)
    assert d_lo.pow_u_dbm <= d_hi.pow_u_dbm


@given(dbm, st.integers(0, 3300), st.floats(0, 1000))
def test_clear_never_exceeds_cap_or_drops_below_max(max_bp, span, d):
    min_bp = max(max_bp - span / 100, 0.0)
    out = clear_channel_power(assessment(S=100, max_bp=max_bp, min_bp=min_bp, d=d), CFG)
    assert max_bp <= out.pow_u_dbm <= 33
