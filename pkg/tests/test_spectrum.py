import pytest
from hypothesis import given, strategies as st

from ble_afh.spectrum import (
    ADVERTISING_FREQUENCIES_MHZ,
    WifiChannel,
    adjacent_channels,
    data_channel_frequency,
    overlapped_ble_channels,
)

# Bluetooth band plan: 40 RF channels at 2402 + 2k MHz, k = 0..39; RF 0, 12
# and 39 are advertising, the rest are data channels in ascending order.
BAND_PLAN = [2402 + 2 * k for k in range(40) if k not in (0, 12, 39)]


def brute_force_overlap(center, half_width):
    return {i for i, f in enumerate(BAND_PLAN) if abs(f - center) <= half_width}


def test_frequency_examples():
    assert data_channel_frequency(0) == 2404
    assert data_channel_frequency(11) == 2428
    assert data_channel_frequency(36) == 2478


def test_frequency_matches_band_plan():
    assert [data_channel_frequency(i) for i in range(37)] == BAND_PLAN
    assert BAND_PLAN[-1] < 2480


def test_frequency_is_bijection_avoiding_advertising():
    freqs = {data_channel_frequency(i) for i in range(37)}
    assert len(freqs) == 37
    assert not freqs & set(ADVERTISING_FREQUENCIES_MHZ)


@pytest.mark.parametrize("bad", [-1, 37, 100])
def test_frequency_out_of_range(bad):
    with pytest.raises(ValueError):
        data_channel_frequency(bad)


def test_wifi_1_overlap():
    assert overlapped_ble_channels(WifiChannel(1)) == set(range(10))
    assert overlapped_ble_channels(WifiChannel(1)) == brute_force_overlap(2412, 11)


def test_wifi_13_overlap():
    got = overlapped_ble_channels(WifiChannel(13))
    assert got == brute_force_overlap(2472, 11)
    assert got == set(range(28, 37))


def test_zero_width_footprint_is_single_channel_or_empty():
    # Data channel 4 sits exactly at 2412 MHz, the Wifi 1 center.
    assert data_channel_frequency(4) == 2412
    assert overlapped_ble_channels(WifiChannel(1, half_width_mhz=0)) == {4}
    # Wifi 2 is centered at 2417 MHz, between data channels.
    assert overlapped_ble_channels(WifiChannel(2, half_width_mhz=0)) == frozenset()


def test_wifi_channel_validation():
    with pytest.raises(ValueError):
        WifiChannel(14)
    with pytest.raises(ValueError):
        WifiChannel(0)


@pytest.mark.parametrize("number", range(1, 14))
def test_all_wifi_channels_against_oracle(number):
    w = WifiChannel(number)
    got = overlapped_ble_channels(w)
    assert got == brute_force_overlap(w.center_mhz, 11)
    # contiguous within each frequency segment (0..10 and 11..36)
    for seg in (set(range(0, 11)), set(range(11, 37))):
        part = sorted(got & seg)
        assert part == list(range(part[0], part[-1] + 1)) if part else True


@given(st.integers(1, 13), st.floats(0, 40), st.floats(0, 40))
def test_overlap_monotone_in_half_width(number, a, b):
    lo, hi = sorted((a, b))
    assert overlapped_ble_channels(WifiChannel(number, lo)) <= overlapped_ble_channels(WifiChannel(number, hi))


def test_adjacent_guard_channels():
    assert adjacent_channels(frozenset(range(10))) == {10}
    assert adjacent_channels(frozenset(range(11, 22))) == {10, 22}
    assert adjacent_channels(frozenset()) == frozenset()
