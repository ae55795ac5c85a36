"""
Value change dump of the digital pins inside a bounded tick window.

Full-run dumps at controller resolution are far too large, so only ticks in
[start, end) are recorded.
"""

import logging
from collections.abc import Callable
from dataclasses import dataclass
from pathlib import Path
from typing import TextIO

from vcd import VCDWriter

from simulation.controller import RobotSystem

logger = logging.getLogger(__name__)

SCOPE = "robot"
TIMESCALE = "1 ns"
# data fixa no cabeçalho
VCD_DATE = "fpga_robot_sim deterministic run"

Value = int | str


@dataclass(frozen=True)
class VcdSignal:
    """
    A recorded wire.

    Attributes:
        name: Variable name in the dump.
        width: Number of bits.
        probe: Callable returning the current level, or None for high-Z.
    """

    name: str
    width: int
    probe: Callable[[], int | None]

    def sample(self) -> Value:
        """Return the current value, 'z' when undriven."""
        value = self.probe()
        return "z" if value is None else value


def robot_signals(system: RobotSystem) -> list[VcdSignal]:
    """Return the pins of the PWM, L293D and ADC0809 handshake."""
    pwm = system.pwm
    motor = system.motor
    adc = system.adc
    controller = system.controller
    return [
        VcdSignal("pwm_out", 1, lambda: pwm.state.output),
        VcdSignal("ena", 1, lambda: motor.pins.ena),
        VcdSignal("enb", 1, lambda: motor.pins.enb),
        VcdSignal("ena_gated", 1, lambda: motor.pins.ena & pwm.state.output),
        VcdSignal("enb_gated", 1, lambda: motor.pins.enb & pwm.state.output),
        VcdSignal("a1", 1, lambda: motor.pins.a1),
        VcdSignal("a2", 1, lambda: motor.pins.a2),
        VcdSignal("a3", 1, lambda: motor.pins.a3),
        VcdSignal("a4", 1, lambda: motor.pins.a4),
        VcdSignal("start", 1, lambda: adc.pins.start),
        VcdSignal("ale", 1, lambda: adc.pins.ale),
        VcdSignal("oe", 1, lambda: adc.pins.oe),
        VcdSignal("eoc", 1, lambda: adc.pins.eoc),
        VcdSignal("addr", 3, lambda: adc.pins.addr),
        VcdSignal("data", 8, lambda: adc.pins.data),
        VcdSignal("adc_fault", 1, lambda: int(controller.fsm.fault)),
        VcdSignal("sevenseg", 7, lambda: system.display.pattern.bits),
    ]


class VcdRecorder:
    """
    Clocked recorder writing one VCD file.

    The first recorded tick provides the initial values; afterwards only
    actual changes are written. Timestamps are tick * period in ns.
    """

    name = "vcd-trace"

    def __init__(
        self,
        signals: list[VcdSignal],
        window: tuple[int, int],
        period_ns: int,
        filepath: str | Path,
    ) -> None:
        """
        Initialize the recorder; the file is opened on the first window tick.

        Args:
            signals: Wires to record.
            window: Tick range [start, end).
            period_ns: Controller clock period.
            filepath: Destination of the dump.

        Raises:
            ValueError: If the window is inverted or negative.
        """
        start, end = window
        if not 0 <= start <= end:
            raise ValueError(f"window must satisfy 0 <= start <= end, got {window}")
        self.signals = signals
        self.start, self.end = start, end
        self.period_ns = period_ns
        self.path = Path(filepath)
        self.changes = 0
        self._stream: TextIO | None = None
        self._writer: VCDWriter | None = None
        self._vars: list[object] = []
        self._last: list[Value] = []

    def _open(self, timestamp: int) -> None:
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self._stream = self.path.open("w", newline="\n")
        self._writer = VCDWriter(
            self._stream,
            timescale=TIMESCALE,
            date=VCD_DATE,
            init_timestamp=timestamp,
        )
        self._last = [signal.sample() for signal in self.signals]
        self._vars = [
            self._writer.register_var(
                SCOPE, signal.name, "wire", size=signal.width, init=value
            )
            for signal, value in zip(self.signals, self._last, strict=True)
        ]

    def step(self, tick: int) -> None:
        """Record changed values if ``tick`` lies in the window."""
        if not self.start <= tick < self.end:
            return
        timestamp = tick * self.period_ns
        if self._writer is None:
            self._open(timestamp)
            return
        for index, signal in enumerate(self.signals):
            value = signal.sample()
            if value != self._last[index]:
                self._writer.change(self._vars[index], timestamp, value)
                self._last[index] = value
                self.changes += 1

    def horizon(self, tick: int) -> int | None:
        """Ticks until the window opens, 0 inside it, None once it closed."""
        if tick < self.start:
            return self.start - tick
        if tick < self.end:
            return 0
        return None

    def skip(self, tick: int, count: int) -> None:  # noqa: ARG002
        """Nothing is recorded outside the window."""

    def close(self) -> Path:
        """
        Finish the dump; an empty window yields a header-only file.

        Returns:
            Path of the written file.
        """
        if self._writer is None:
            self._open(self.start * self.period_ns)
        self._writer.close()
        self._stream.close()
        logger.debug("Wrote %s with %d value changes", self.path, self.changes)
        return self.path
