"""Slotted acoustic link emulator for the operator -> floater -> fish path.

The surface side transmits one byte per fixed slot (default 1.6 s). Between
slots the operator may submit any number of bytes; only the latest survives
("latest command wins"). Each transmission independently draws Bernoulli loss
and, if it survives, a truncated-normal propagation delay. Every transmission
is recorded with its ground-truth outcome so mission statistics never have to
be estimated.

Slot times are computed as t0 + k * slot_interval from the integer slot index
k, never by accumulating floats, so the cadence is drift-free over millions
of slots. All randomness comes from one seeded PCG64 generator: identical
(config, submit trace) pairs reproduce identical transmission records bit for
bit.
"""

import heapq
import math
from dataclasses import dataclass, field

import numpy as np

SEND_EVERY_SLOT = "every_slot"   # retransmit the last byte when nothing new arrived
SEND_ON_CHANGE = "on_change"     # transmit only when the byte differs from the last one sent


class NonMonotonicTimeError(ValueError):
    """advance() was called with a time earlier than a previous call."""


@dataclass(frozen=True, slots=True)
class LinkConfig:
    slot_interval: float = 1.6   # s between transmissions
    loss_prob: float = 0.15      # Bernoulli loss per transmitted slot
    delay_mean: float = 1.90     # s, propagation + processing delay mean
    delay_var: float = 0.13      # s^2, delay variance
    delay_min: float = 0.1       # s, truncation floor of the delay distribution
    rng_seed: int = 0
    send_mode: str = SEND_EVERY_SLOT

    def validate(self) -> "LinkConfig":
        if self.slot_interval <= 0.0:
            raise ValueError("slot_interval must be > 0")
        if not 0.0 <= self.loss_prob <= 1.0:
            raise ValueError("loss_prob must be in [0, 1]")
        if not self.delay_mean >= self.delay_min > 0.0:
            raise ValueError("need delay_mean >= delay_min > 0")
        if self.delay_var < 0.0:
            raise ValueError("delay_var must be >= 0")
        if self.send_mode not in (SEND_EVERY_SLOT, SEND_ON_CHANGE):
            raise ValueError(f"unknown send_mode {self.send_mode!r}")
        return self


@dataclass(slots=True)
class Transmission:
    """Ground-truth record of one transmitted slot."""

    seq: int
    t_sent: float
    byte: int
    lost: bool
    t_arrive: float | None  # None when lost


@dataclass(frozen=True, slots=True)
class Delivery:
    """A byte handed to the receiver, tagged for staleness filtering."""

    seq: int
    byte: int
    t_sent: float
    t_arrive: float


@dataclass(slots=True)
class AcousticLink:
    """Transmit-side state of the emulated channel.

    Owned by a single simulation driver: submit() between ticks, advance()
    once per tick with non-decreasing time.
    """

    config: LinkConfig
    t_start: float = 0.0
    records: list[Transmission] = field(default_factory=list)
    _pending: int | None = None
    _last_sent: int | None = None
    _slot_count: int = 0
    _seq: int = 0
    _in_flight: list[tuple[float, int, int, float]] = field(default_factory=list)  # (t_arrive, seq, byte, t_sent)
    _last_advance: float = -math.inf
    _rng: np.random.Generator = None  # type: ignore[assignment]

    def __post_init__(self) -> None:
        self.config.validate()
        self._rng = np.random.default_rng(self.config.rng_seed)

    @property
    def next_slot_time(self) -> float:
        return self.t_start + (self._slot_count + 1) * self.config.slot_interval

    @property
    def pending(self) -> int | None:
        return self._pending

    @property
    def last_sent(self) -> int | None:
        return self._last_sent

    def submit(self, byte: int, t: float) -> None:
        """Queue a byte for the next slot, replacing any byte queued earlier."""
        if not 0 <= byte <= 255:
            raise ValueError(f"not a byte value: {byte!r}")
        self._pending = byte

    def advance(self, t_now: float) -> list[Delivery]:
        """Fire every slot boundary up to t_now and return arrivals due by t_now."""
        if t_now < self._last_advance:
            raise NonMonotonicTimeError(f"advance({t_now}) after advance({self._last_advance})")
        self._last_advance = t_now

        while self.next_slot_time <= t_now:
            self._slot_count += 1
            t_slot = self.t_start + self._slot_count * self.config.slot_interval
            self._fire_slot(t_slot)

        delivered: list[Delivery] = []
        while self._in_flight and self._in_flight[0][0] <= t_now:
            t_arrive, seq, byte, t_sent = heapq.heappop(self._in_flight)
            delivered.append(Delivery(seq=seq, byte=byte, t_sent=t_sent, t_arrive=t_arrive))
        return delivered

    def _fire_slot(self, t_slot: float) -> None:
        byte = self._pending
        self._pending = None
        if self.config.send_mode == SEND_EVERY_SLOT:
            if byte is None:
                byte = self._last_sent  # repeat-last; nothing to repeat before the first submit
        else:  # on_change: stay silent unless the byte actually changed
            if byte is not None and byte == self._last_sent:
                byte = None
        if byte is None:
            return

        self._last_sent = byte
        self._seq += 1
        lost = bool(self._rng.random() < self.config.loss_prob)
        t_arrive: float | None = None
        if not lost:
            t_arrive = t_slot + self._draw_delay()
            heapq.heappush(self._in_flight, (t_arrive, self._seq, byte, t_slot))
        self.records.append(Transmission(seq=self._seq, t_sent=t_slot, byte=byte, lost=lost, t_arrive=t_arrive))

    def _draw_delay(self) -> float:
        """Truncated normal: redraw until the sample clears the delay floor."""
        sd = math.sqrt(self.config.delay_var)
        if sd == 0.0:
            return self.config.delay_mean
        while True:
            d = self.config.delay_mean + sd * self._rng.standard_normal()
            if d >= self.config.delay_min:
                return d


class StaleFilter:
    """Receiver-side suppression of deliveries overtaken by a newer one.

    With stochastic delay a slot can arrive after a later slot; executing the
    older command would invert the operator's intent, so anything with a seq
    below the highest seq already seen is dropped.
    """

    def __init__(self) -> None:
        self.highest_seq = 0

    def filter(self, delivered: list[Delivery]) -> list[Delivery]:
        fresh = []
        for d in delivered:
            if d.seq > self.highest_seq:
                self.highest_seq = d.seq
                fresh.append(d)
        return fresh


def transmissions_csv_rows(records: list[Transmission]) -> list[str]:
    """Render ground-truth transmission records as CSV lines (with header).

    Floats use repr so a parsed file reproduces the in-memory values exactly.
    """
    rows = ["seq,t_sent,byte,lost,t_arrive"]
    for r in records:
        arrive = "" if r.t_arrive is None else repr(r.t_arrive)
        rows.append(f"{r.seq},{r.t_sent!r},{r.byte},{int(r.lost)},{arrive}")
    return rows
