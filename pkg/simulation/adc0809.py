"""
ADC0809 converter model and the FPGA-side acquisition handshake.

The converter side (``adc_step``) reacts to the START/ALE/OE pins driven by
the controller on the previous tick. The controller side
(``acquire_fsm_step``) produces those pins and latches the converted code.
"""

import logging
import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass, replace
from enum import Enum

from simulation.errors import ConfigurationError

logger = logging.getLogger(__name__)

N_CHANNELS = 8
FULL_SCALE = 256


@dataclass(frozen=True)
class AdcConfig:
    """
    Converter parameters.

    Attributes:
        vref: Reference voltage (full scale), volts.
        resolution_bits: Fixed at 8 for the ADC0809.
        conversion_ticks: Controller ticks per conversion.
        min_pulse_ns: Minimum START/ALE high time that starts a conversion.
    """

    vref: float = 5.0
    resolution_bits: int = 8
    conversion_ticks: int = 5000
    min_pulse_ns: int = 100

    def __post_init__(self) -> None:
        """Validate the configuration.

        Raises:
            ConfigurationError: If any field violates its invariant.
        """
        if not self.vref > 0:
            raise ConfigurationError(f"vref must be positive, got {self.vref}")
        if self.resolution_bits != 8:
            raise ConfigurationError(
                f"resolution_bits is fixed at 8, got {self.resolution_bits}"
            )
        if self.conversion_ticks < 1:
            raise ConfigurationError(
                f"conversion_ticks must be >= 1, got {self.conversion_ticks}"
            )
        if self.min_pulse_ns < 0:
            raise ConfigurationError(
                f"min_pulse_ns must be >= 0, got {self.min_pulse_ns}"
            )

    @property
    def lsb(self) -> float:
        """Voltage of one quantization step."""
        return self.vref / FULL_SCALE


class AdcPhase(Enum):
    """Converter handshake phases."""

    IDLE = "Idle"
    LATCHED = "Latched"
    CONVERTING = "Converting"
    DONE = "Done"


@dataclass(frozen=True, slots=True)
class AdcState:
    """Internal state of the converter."""

    phase: AdcPhase = AdcPhase.IDLE
    channel: int = 0
    result: int = 0
    ticks_remaining: int = 0
    start_high_ns: int = 0
    ale_high_ns: int = 0
    oe_high_ns: int = 0
    held_code: int = 0


@dataclass(frozen=True, slots=True)
class AdcPins:
    """
    Converter pins. ``data`` is None while the bus is high impedance.

    start, ale, oe and addr are driven by the controller; eoc and data by
    the converter.
    """

    start: int = 0
    ale: int = 0
    oe: int = 0
    eoc: int = 0
    addr: int = 0
    data: int | None = None


def quantize(v: float, cfg: AdcConfig) -> int:
    """
    Convert a voltage to an 8-bit code (ideal staircase).

    Args:
        v: Input voltage; values outside [0, vref] are clamped.
        cfg: Converter configuration.

    Returns:
        floor(clamp(v, 0, vref) / vref * 256), clamped to 255.

    Raises:
        ValueError: If ``v`` is not finite.
    """
    if not math.isfinite(v):
        raise ValueError(f"input voltage must be finite, got {v}")
    clamped = min(max(v, 0.0), cfg.vref)
    return min(math.floor(clamped / cfg.vref * FULL_SCALE), FULL_SCALE - 1)


def adc_step(
    state: AdcState,
    pins: AdcPins,
    v_in: Sequence[float],
    cfg: AdcConfig,
    period_ns: int = 20,
) -> tuple[AdcState, AdcPins]:
    """
    Advance the converter by one controller tick.

    A conversion starts on the falling edge of START when START was high for
    at least ``min_pulse_ns`` while a channel is latched. The channel is
    latched on the falling edge of a qualifying ALE pulse. Shorter pulses
    leave the state untouched.

    Args:
        state: Converter state.
        pins: Pin levels as driven during the previous tick.
        v_in: Voltages of the eight analog inputs.
        cfg: Converter configuration.
        period_ns: Controller clock period.

    Returns:
        Tuple (new state, new pins) with EOC and the data bus updated.
    """
    phase = state.phase
    channel = state.channel
    result = state.result
    remaining = state.ticks_remaining
    start_ns = state.start_high_ns
    ale_ns = state.ale_high_ns
    oe_ns = state.oe_high_ns
    held = state.held_code
    eoc = 0

    if phase is AdcPhase.DONE:
        if pins.oe:
            oe_ns += period_ns
        elif oe_ns > 0:
            # leitura concluída
            phase = AdcPhase.IDLE
            oe_ns = 0

    if pins.ale:
        ale_ns += period_ns
    elif ale_ns > 0:
        if ale_ns >= cfg.min_pulse_ns and phase in (AdcPhase.IDLE, AdcPhase.LATCHED):
            channel = pins.addr
            phase = AdcPhase.LATCHED
        ale_ns = 0

    started = False
    if pins.start:
        start_ns += period_ns
    elif start_ns > 0:
        if start_ns >= cfg.min_pulse_ns and phase is AdcPhase.LATCHED:
            phase = AdcPhase.CONVERTING
            remaining = cfg.conversion_ticks
            held = quantize(v_in[channel], cfg)
            started = True
        start_ns = 0

    if phase is AdcPhase.CONVERTING and not started:
        remaining -= 1
        if remaining == 0:
            phase = AdcPhase.DONE
            result = held
            eoc = 1

    data = result if phase is AdcPhase.DONE and pins.oe else None
    new_state = AdcState(
        phase=phase,
        channel=channel,
        result=result,
        ticks_remaining=remaining,
        start_high_ns=start_ns,
        ale_high_ns=ale_ns,
        oe_high_ns=oe_ns,
        held_code=held,
    )
    return new_state, replace(pins, eoc=eoc, data=data)


def adc_horizon(state: AdcState, pins: AdcPins) -> int | None:
    """Return how many ticks the converter can skip without an event."""
    if pins.eoc:
        return 0
    if (not pins.ale and state.ale_high_ns) or (not pins.start and state.start_high_ns):
        return 0
    expected = state.result if state.phase is AdcPhase.DONE and pins.oe else None
    if pins.data != expected:
        return 0
    if state.phase is AdcPhase.DONE and not pins.oe and state.oe_high_ns:
        return 0
    if state.phase is AdcPhase.CONVERTING:
        return state.ticks_remaining - 1
    return None


def adc_skip(state: AdcState, pins: AdcPins, count: int, period_ns: int) -> AdcState:
    """Advance ``count`` event-free ticks (see ``adc_horizon``)."""
    span_ns = count * period_ns
    return replace(
        state,
        start_high_ns=state.start_high_ns + (span_ns if pins.start else 0),
        ale_high_ns=state.ale_high_ns + (span_ns if pins.ale else 0),
        oe_high_ns=state.oe_high_ns
        + (span_ns if pins.oe and state.phase is AdcPhase.DONE else 0),
        ticks_remaining=state.ticks_remaining
        - (count if state.phase is AdcPhase.CONVERTING else 0),
    )


class AcquirePhase(Enum):
    """Controller-side acquisition phases."""

    START = "Start"
    PULSE = "Pulse"
    WAIT_EOC = "WaitEoc"
    READ = "Read"


@dataclass(frozen=True, slots=True)
class AcquireConfig:
    """Timing of the controller-side handshake, in controller ticks."""

    pulse_ticks: int = 5
    timeout_ticks: int = 50_000
    channel: int = 0

    @classmethod
    def from_adc(
        cls, cfg: AdcConfig, period_ns: int, channel: int = 0
    ) -> "AcquireConfig":
        """Derive the handshake timing from the converter configuration."""
        return cls(
            pulse_ticks=max(1, math.ceil(cfg.min_pulse_ns / period_ns)),
            timeout_ticks=10 * cfg.conversion_ticks,
            channel=channel,
        )


@dataclass(frozen=True, slots=True)
class AcquireState:
    """
    Controller-side acquisition state.

    Attributes:
        code: Distance register holding the last good sample.
        samples: Number of samples published so far.
        fresh: True on the tick a new sample is published.
        fault: Sticky flag raised when EOC does not arrive in time.
    """

    phase: AcquirePhase = AcquirePhase.START
    held_ticks: int = 0
    waited_ticks: int = 0
    code: int = 0
    samples: int = 0
    fresh: bool = False
    fault: bool = False


def _assert_pulse(pins: AdcPins, channel: int) -> AdcPins:
    return replace(pins, ale=1, start=1, oe=0, addr=channel)


def acquire_fsm_step(
    fsm: AcquireState, pins: AdcPins, cfg: AcquireConfig
) -> tuple[AcquireState, AdcPins]:
    """
    Advance the acquisition handshake by one controller tick.

    Sequence: assert ALE+START for ``pulse_ticks``, wait for EOC, assert OE,
    latch the data bus into the distance register, release OE and start the
    next cycle. Without EOC after ``timeout_ticks`` the fault flag is raised,
    the last good sample is kept and a new cycle starts.

    Args:
        fsm: Acquisition state.
        pins: Converter pins after this tick's converter step.
        cfg: Handshake timing.

    Returns:
        Tuple (new state, pin commands seen by the converter next tick).
    """
    if fsm.phase is AcquirePhase.START:
        return (
            replace(fsm, phase=AcquirePhase.PULSE, held_ticks=0, fresh=False),
            _assert_pulse(pins, cfg.channel),
        )

    if fsm.phase is AcquirePhase.PULSE:
        held = fsm.held_ticks + 1
        if held >= cfg.pulse_ticks:
            return (
                replace(
                    fsm,
                    phase=AcquirePhase.WAIT_EOC,
                    held_ticks=held,
                    waited_ticks=0,
                    fresh=False,
                ),
                replace(pins, ale=0, start=0),
            )
        return replace(fsm, held_ticks=held, fresh=False), pins

    if fsm.phase is AcquirePhase.WAIT_EOC:
        waited = fsm.waited_ticks + 1
        if pins.eoc:
            return (
                replace(fsm, phase=AcquirePhase.READ, waited_ticks=waited, fresh=False),
                replace(pins, oe=1),
            )
        if waited > cfg.timeout_ticks:
            if not fsm.fault:
                logger.warning(
                    "ADC timeout: no EOC within %d ticks, keeping last sample %d",
                    cfg.timeout_ticks,
                    fsm.code,
                )
            return (
                replace(
                    fsm,
                    phase=AcquirePhase.PULSE,
                    held_ticks=0,
                    waited_ticks=0,
                    fresh=False,
                    fault=True,
                ),
                _assert_pulse(pins, cfg.channel),
            )
        return replace(fsm, waited_ticks=waited, fresh=False), pins

    # READ: o barramento deve estar ativo neste ciclo
    if pins.data is None:
        waited = fsm.waited_ticks + 1
        if waited > cfg.timeout_ticks:
            logger.warning("ADC timeout: data bus never driven after OE")
            return (
                replace(
                    fsm,
                    phase=AcquirePhase.PULSE,
                    held_ticks=0,
                    waited_ticks=0,
                    fresh=False,
                    fault=True,
                ),
                _assert_pulse(pins, cfg.channel),
            )
        return replace(fsm, waited_ticks=waited, fresh=False), pins
    return (
        replace(
            fsm,
            phase=AcquirePhase.PULSE,
            held_ticks=0,
            waited_ticks=0,
            code=pins.data,
            samples=fsm.samples + 1,
            fresh=True,
        ),
        _assert_pulse(pins, cfg.channel),
    )


def acquire_horizon(fsm: AcquireState, cfg: AcquireConfig) -> int | None:
    """Return how many ticks the handshake can skip without an event."""
    if fsm.fresh:
        return 0
    if fsm.phase is AcquirePhase.PULSE:
        return cfg.pulse_ticks - fsm.held_ticks - 1
    if fsm.phase is AcquirePhase.WAIT_EOC:
        return cfg.timeout_ticks - fsm.waited_ticks
    return 0


def acquire_skip(fsm: AcquireState, count: int) -> AcquireState:
    """Advance ``count`` event-free ticks (see ``acquire_horizon``)."""
    if fsm.phase is AcquirePhase.PULSE:
        return replace(fsm, held_ticks=fsm.held_ticks + count)
    return replace(fsm, waited_ticks=fsm.waited_ticks + count)


class Adc0809:
    """
    Clocked converter block.

    Channel 0 is wired to the distance sensor; channels 1-7 read 0 V.
    A detached converter never answers the handshake.
    """

    name = "adc0809"

    def __init__(
        self,
        cfg: AdcConfig,
        period_ns: int,
        voltage_source: Callable[[], float],
        attached: bool = True,
    ) -> None:
        """
        Initialize the converter in the Idle phase with a floating data bus.

        Args:
            cfg: Converter configuration.
            period_ns: Controller clock period.
            voltage_source: Callable returning the channel 0 voltage.
            attached: When False the converter ignores every pin.
        """
        self.cfg = cfg
        self.period_ns = period_ns
        self.voltage_source = voltage_source
        self.attached = attached
        self.state = AdcState()
        self.pins = AdcPins()

    def inputs(self) -> list[float]:
        """Return the eight channel voltages."""
        return [self.voltage_source()] + [0.0] * (N_CHANNELS - 1)

    def step(self, tick: int) -> None:  # noqa: ARG002
        """Execute one tick."""
        if not self.attached:
            return
        self.state, self.pins = adc_step(
            self.state, self.pins, self.inputs(), self.cfg, self.period_ns
        )

    def horizon(self, tick: int) -> int | None:  # noqa: ARG002
        """Ticks until the next converter event."""
        if not self.attached:
            return None
        return adc_horizon(self.state, self.pins)

    def skip(self, tick: int, count: int) -> None:  # noqa: ARG002
        """Advance ``count`` event-free ticks."""
        if self.attached:
            self.state = adc_skip(self.state, self.pins, count, self.period_ns)
