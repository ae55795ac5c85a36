"""Unit tests for the ADC0809 model and the acquisition handshake."""

import logging
import math

import pytest

from simulation.adc0809 import (
    AcquireConfig,
    AcquirePhase,
    AcquireState,
    Adc0809,
    AdcConfig,
    AdcPhase,
    AdcPins,
    AdcState,
    acquire_fsm_step,
    adc_step,
    quantize,
)
from simulation.errors import ConfigurationError

PERIOD = 20


def _pulse(
    cfg: AdcConfig, width_ns: int, volts: float = 2.5
) -> tuple[AdcState, AdcPins]:
    """Drive ALE+START high for ``width_ns`` then low for one tick."""
    state, pins = AdcState(), AdcPins()
    for _ in range(width_ns // PERIOD):
        state, pins = adc_step(state, AdcPins(start=1, ale=1), [volts] * 8, cfg, PERIOD)
    return adc_step(state, AdcPins(), [volts] * 8, cfg, PERIOD)


def test_quantize_exaustivo() -> None:
    """
    Test the ideal staircase over a dense voltage sweep.

    Asserts:
        - code = floor(v * 256 / 5) clamped to 255 for v = k * 5 / 1024
        - Codes are monotonically non-decreasing
        - The error v - code * LSB is below 1 LSB except at full scale,
          where the top clamp makes it exactly 1 LSB
    """
    cfg = AdcConfig()
    previous = 0
    for k in range(1025):
        v = k * 5 / 1024
        code = quantize(v, cfg)
        assert code == min(k // 4, 255)
        assert code >= previous
        error = v - code * cfg.lsb
        assert error >= 0
        if k < 1024:
            assert error < cfg.lsb
        else:
            assert error == pytest.approx(cfg.lsb)
        previous = code


def test_quantize_exemplos() -> None:
    """
    Test the documented quantizer examples.

    Asserts:
        - 0 V -> 0, 2.5 V -> 128, 5 V -> 255, 6 V clamps to 255,
          negative voltages clamp to 0
        - NaN raises ValueError
    """
    cfg = AdcConfig()
    assert quantize(0.0, cfg) == 0
    assert quantize(2.5, cfg) == 128
    assert quantize(5.0, cfg) == 255
    assert quantize(6.0, cfg) == 255
    assert quantize(-1.0, cfg) == 0
    with pytest.raises(ValueError, match="finite"):
        quantize(math.nan, cfg)


@pytest.mark.parametrize("width_ns", [20, 40, 60, 80])
def test_adc_step_pulso_curto_nao_inicia(width_ns: int) -> None:
    """
    Test the minimum pulse width gate for short pulses.

    Args:
        width_ns: Pulse width below 100 ns.

    Asserts:
        - The converter stays Idle and EOC stays low
    """
    state, pins = _pulse(AdcConfig(conversion_ticks=10), width_ns)
    assert state.phase is AdcPhase.IDLE
    assert pins.eoc == 0


@pytest.mark.parametrize("width_ns", [100, 120, 200])
def test_adc_step_pulso_valido_inicia(width_ns: int) -> None:
    """
    Test the minimum pulse width gate for valid pulses.

    Args:
        width_ns: Pulse width of at least 100 ns.

    Asserts:
        - Conversion starts on the falling edge with the full tick count
    """
    state, _ = _pulse(AdcConfig(conversion_ticks=10), width_ns)
    assert state.phase is AdcPhase.CONVERTING
    assert state.ticks_remaining == 10


def test_adc_step_eoc_e_oe() -> None:
    """
    Test conversion timing and output-enable gating.

    Asserts:
        - EOC rises exactly conversion_ticks after the start edge, for one tick
        - The data bus stays high impedance until OE is asserted
        - The result is the input sampled at start, even if it changes
        - OE falling returns the converter to Idle and releases the bus
    """
    cfg = AdcConfig(conversion_ticks=10)
    state, pins = _pulse(cfg, 100, volts=2.5)

    ticks = 0
    while not pins.eoc:
        state, pins = adc_step(state, AdcPins(), [4.0] * 8, cfg, PERIOD)
        ticks += 1
        assert pins.data is None
    assert ticks == cfg.conversion_ticks
    assert state.phase is AdcPhase.DONE
    assert state.result == quantize(2.5, cfg)

    state, pins = adc_step(state, AdcPins(), [4.0] * 8, cfg, PERIOD)
    assert pins.eoc == 0
    assert pins.data is None

    state, pins = adc_step(state, AdcPins(oe=1), [4.0] * 8, cfg, PERIOD)
    assert pins.data == 128

    state, pins = adc_step(state, AdcPins(oe=0), [4.0] * 8, cfg, PERIOD)
    assert state.phase is AdcPhase.IDLE
    assert pins.data is None


def test_adc_step_start_sem_ale_ignorado() -> None:
    """
    Test the protocol violation of START without a latched channel.

    Asserts:
        - A long START pulse alone does not start a conversion
    """
    cfg = AdcConfig(conversion_ticks=10)
    state, pins = AdcState(), AdcPins()
    for _ in range(10):
        state, pins = adc_step(state, AdcPins(start=1), [1.0] * 8, cfg, PERIOD)
    state, pins = adc_step(state, AdcPins(), [1.0] * 8, cfg, PERIOD)
    assert state.phase is AdcPhase.IDLE


def test_adc_step_canal_selecionado() -> None:
    """
    Test channel latching.

    Asserts:
        - The address present while ALE is high selects the converted input
    """
    cfg = AdcConfig(conversion_ticks=2)
    volts = [0.0, 0.0, 0.0, 5.0, 0.0, 0.0, 0.0, 0.0]
    state, pins = AdcState(), AdcPins()
    for _ in range(5):
        state, pins = adc_step(
            state, AdcPins(start=1, ale=1, addr=3), volts, cfg, PERIOD
        )
    state, pins = adc_step(state, AdcPins(addr=3), volts, cfg, PERIOD)
    assert state.channel == 3
    for _ in range(2):
        state, pins = adc_step(state, AdcPins(), volts, cfg, PERIOD)
    assert state.result == 255


def test_adc_config_invalida() -> None:
    """
    Test configuration validation.

    Asserts:
        - conversion_ticks 0 and resolution 10 bits are rejected
    """
    with pytest.raises(ConfigurationError, match="conversion_ticks"):
        AdcConfig(conversion_ticks=0)
    with pytest.raises(ConfigurationError, match="resolution_bits"):
        AdcConfig(resolution_bits=10)


def test_acquire_config_from_adc() -> None:
    """
    Test the derived handshake timing.

    Asserts:
        - 100 ns at 20 ns gives a 5-tick pulse; at 10 us a single tick
        - The EOC timeout is ten conversion times
    """
    cfg = AdcConfig(conversion_ticks=50)
    assert AcquireConfig.from_adc(cfg, 20).pulse_ticks == 5
    fast = AcquireConfig.from_adc(cfg, 10_000)
    assert fast.pulse_ticks == 1
    assert fast.timeout_ticks == 500


def _closed_handshake(cfg: AdcConfig, volts: float, ticks: int) -> list[AcquireState]:
    adc = Adc0809(cfg, PERIOD, lambda: volts)
    acquire_cfg = AcquireConfig.from_adc(cfg, PERIOD)
    fsm = AcquireState()
    history = []
    for tick in range(ticks):
        adc.step(tick)
        fsm, adc.pins = acquire_fsm_step(fsm, adc.pins, acquire_cfg)
        history.append(fsm)
    return history


def test_acquire_fsm_publica_amostras() -> None:
    """
    Test the acquisition cycle against the converter.

    Asserts:
        - Samples are published with the converted code and no fault
        - Each publication is flagged fresh for exactly one tick
    """
    cfg = AdcConfig(conversion_ticks=20)
    history = _closed_handshake(cfg, 1.0, 200)

    fresh = [state for state in history if state.fresh]
    assert len(fresh) >= 2
    assert all(state.code == quantize(1.0, cfg) for state in fresh)
    assert [state.samples for state in fresh] == list(range(1, len(fresh) + 1))
    assert not history[-1].fault


def test_acquire_fsm_timeout(caplog: pytest.LogCaptureFixture) -> None:
    """
    Test the EOC timeout with a detached converter.

    Asserts:
        - The fault flag is raised and stays set
        - The last good sample (reset value 0) is kept
        - A warning is logged
    """
    cfg = AcquireConfig(pulse_ticks=1, timeout_ticks=10)
    fsm, pins = AcquireState(), AdcPins()
    with caplog.at_level(logging.WARNING):
        for _ in range(40):
            fsm, pins = acquire_fsm_step(fsm, pins, cfg)

    assert fsm.fault
    assert fsm.code == 0
    assert fsm.samples == 0
    assert fsm.phase in (AcquirePhase.PULSE, AcquirePhase.WAIT_EOC)
    assert "timeout" in caplog.text
