import pytest
from hypothesis import given, strategies as st

from ble_afh.link_sim import EventOutcome
from ble_afh.metrics import aggregate, updates_between


def outcome(e, acked=True, retx=False, sent=False, active=37, channel=None):
    return EventOutcome(e, e * 0.02, channel if channel is not None else e % 37, acked, retx, sent, active)


def test_link_pdr_counts_first_attempts():
    outs = []
    e = 0
    for i in range(100):
        acked = i not in (10, 50)
        outs.append(outcome(e, acked))
        e += 1
        if not acked:
            outs.append(outcome(e, True, retx=True))
            e += 1
    report = aggregate(outs)
    assert report.link_pdr == pytest.approx(0.98)
    assert report.retransmission_overhead == pytest.approx(2 / 102)
    assert report.ack_ratio == pytest.approx(100 / 102)


def test_update_overhead_example():
    outs = [outcome(e, sent=e < 257) for e in range(3000)]
    report = aggregate(outs)
    assert report.update_overhead == pytest.approx(0.0857, abs=5e-5)
    assert report.updates_per_minute == pytest.approx(257)
    assert updates_between(outs, 0, 60) == 257


def test_lossless_run_has_no_retransmissions():
    report = aggregate([outcome(e) for e in range(50)])
    assert report.retransmission_overhead == 0 and report.link_pdr == 1.0


def test_empty_input_rejected():
    with pytest.raises(ValueError):
        aggregate([])


def test_active_series_from_map_history():
    outs = [outcome(e, active=37 if e < 106 else 8) for e in range(200)]
    report = aggregate(outs, [(0, frozenset(range(37))), (106, frozenset(range(8)))])
    assert report.active_channels_series == [(0.0, 37), (pytest.approx(2.12), 8)]
    assert report.min_active_channels == 8
    assert report.median_active_channels == 37


def test_per_channel_counts():
    outs = [outcome(0, channel=3), outcome(1, acked=False, channel=3), outcome(2, retx=True, channel=4)]
    assert aggregate(outs).per_channel_summary == {3: (2, 1), 4: (1, 1)}


@given(st.lists(st.booleans(), min_size=1, max_size=300))
def test_pdr_and_first_attempt_losses_sum_to_one(acks):
    outs, prev = [], True
    for e, acked in enumerate(acks):
        outs.append(outcome(e, acked, retx=not prev))
        prev = acked
    report = aggregate(outs)
    first = [o for o in outs if not o.was_retransmission]
    lost_first = sum(not o.acked for o in first) / len(first)
    assert report.link_pdr + lost_first == pytest.approx(1.0)
    assert 0.0 <= report.link_pdr <= 1.0
    assert report.update_overhead == report.map_updates / report.total_events
