"""BLE data-channel and 2.4 GHz Wifi channelization."""

from __future__ import annotations

from dataclasses import dataclass

NUM_DATA_CHANNELS = 37
ADVERTISING_FREQUENCIES_MHZ = (2402, 2426, 2480)
DATA_CHANNELS = tuple(range(NUM_DATA_CHANNELS))


def data_channel_frequency(index: int) -> int:
    """Center frequency in MHz of BLE data channel ``index`` (0..36)."""
    if not isinstance(index, int) or isinstance(index, bool):
        raise TypeError(f"channel index must be an int, got {index!r}")
    if not 0 <= index < NUM_DATA_CHANNELS:
        raise ValueError(f"BLE data channel index out of range [0, 36]: {index}")
    if index <= 10:
        return 2404 + 2 * index
    return 2428 + 2 * (index - 11)


@dataclass(frozen=True)
class WifiChannel:
    number: int
    half_width_mhz: float = 11.0

    def __post_init__(self):
        if not 1 <= self.number <= 13:
            raise ValueError(f"Wifi channel must be in [1, 13], got {self.number}")
        if self.half_width_mhz < 0:
            raise ValueError("half_width_mhz must be non-negative")

    @property
    def center_mhz(self) -> int:
        return 2412 + 5 * (self.number - 1)

    @property
    def footprint(self) -> tuple[float, float]:
        return (self.center_mhz - self.half_width_mhz, self.center_mhz + self.half_width_mhz)


def overlapped_ble_channels(wifi: WifiChannel) -> frozenset[int]:
    """Data channels whose center frequency falls inside the Wifi footprint."""
    lo, hi = wifi.footprint
    return frozenset(
        c for c in DATA_CHANNELS if lo <= data_channel_frequency(c) <= hi
    )


def adjacent_channels(run: frozenset[int]) -> frozenset[int]:
    # One guard channel on each side of the overlap run, by index.
    if not run:
        return frozenset()
    lo, hi = min(run), max(run)
    return frozenset(c for c in (lo - 1, hi + 1) if 0 <= c < NUM_DATA_CHANNELS)
