"""Fixed-step simulation kernel for the synchronous robot model."""

import bisect
import logging
from dataclasses import dataclass, field
from typing import Protocol, runtime_checkable

from simulation.errors import ConfigurationError

logger = logging.getLogger(__name__)

MAX_SIM_NS = 10**15


@dataclass(frozen=True, order=True, slots=True)
class SimTime:
    """Simulation time in integer nanoseconds since the start of the run."""

    ns: int = 0

    def __post_init__(self) -> None:
        """Validate the time range.

        Raises:
            ValueError: If the time is negative or beyond the guarded range.
        """
        if not 0 <= self.ns <= MAX_SIM_NS:
            raise ValueError(f"ns must be in [0, {MAX_SIM_NS}], got {self.ns}")

    @property
    def seconds(self) -> float:
        """Return the time in seconds."""
        return self.ns / 1e9


@dataclass(frozen=True)
class ClockConfig:
    """
    Timing configuration of a run.

    Attributes:
        controller_period_ns: Length of one controller (and PWM) clock tick.
        plant_period_ns: Length of one physics step. Must be an exact
            multiple of the controller period.
        fast_forward: Allow the kernel to jump over event-free ticks.
    """

    controller_period_ns: int = 20
    plant_period_ns: int = 1_000_000
    fast_forward: bool = True

    def __post_init__(self) -> None:
        """Validate the periods.

        Raises:
            ConfigurationError: If a period is not positive or the plant
                period is not a multiple of the controller period.
        """
        if self.controller_period_ns <= 0:
            raise ConfigurationError(
                "controller_period_ns must be a positive integer, "
                f"got {self.controller_period_ns}"
            )
        if self.plant_period_ns <= 0:
            raise ConfigurationError(
                "plant_period_ns must be a positive integer, "
                f"got {self.plant_period_ns}"
            )
        if self.plant_period_ns % self.controller_period_ns != 0:
            raise ConfigurationError(
                "plant_period_ns must be an exact multiple of controller_period_ns "
                f"({self.plant_period_ns} % {self.controller_period_ns} != 0)"
            )

    @property
    def plant_ratio(self) -> int:
        """Number of controller ticks per plant step."""
        return self.plant_period_ns // self.controller_period_ns

    @property
    def plant_dt(self) -> float:
        """Plant step in seconds."""
        return self.plant_period_ns / 1e9


class SynchronousComponent(Protocol):
    """Anything the kernel can clock once per controller tick."""

    def step(self, tick: int) -> None:
        """Execute one controller tick."""
        ...


@runtime_checkable
class SkippableComponent(Protocol):
    """
    Component able to advance several event-free ticks at once.

    ``horizon`` returns how many upcoming ticks (starting at ``tick``) may be
    replaced by a single ``skip`` call, or None when unbounded. ``skip`` must
    leave the component in exactly the state ``count`` calls to ``step``
    would have produced.
    """

    def step(self, tick: int) -> None:
        """Execute one controller tick."""
        ...

    def horizon(self, tick: int) -> int | None:
        """Return the number of skippable ticks from ``tick`` on."""
        ...

    def skip(self, tick: int, count: int) -> None:
        """Advance ``count`` event-free ticks starting at ``tick``."""
        ...


@dataclass(order=True)
class ComponentHandle:
    """Registration record returned by ``Simulator.register_component``."""

    order: int
    name: str = field(compare=False)
    component: SynchronousComponent = field(compare=False, repr=False)


class Simulator:
    """
    Deterministic fixed-step clock.

    Registered components are stepped once per controller tick in ascending
    order. Time only advances in whole controller periods.
    """

    def __init__(self, clock: ClockConfig | None = None) -> None:
        """
        Initialize the simulator at time zero.

        Args:
            clock: Timing configuration. Defaults to 50 MHz / 1 ms.
        """
        self.clock = clock if clock is not None else ClockConfig()
        self.tick = 0
        self.skipped_ticks = 0
        self._handles: list[ComponentHandle] = []

    @property
    def now(self) -> SimTime:
        """Current simulation time."""
        return SimTime(self.tick * self.clock.controller_period_ns)

    @property
    def handles(self) -> tuple[ComponentHandle, ...]:
        """Registered components in execution order."""
        return tuple(self._handles)

    def register_component(
        self, component: SynchronousComponent, order: int
    ) -> ComponentHandle:
        """
        Register a component to be stepped every controller tick.

        Args:
            component: Object with a ``step(tick)`` method.
            order: Execution position; lower orders run first.

        Returns:
            Handle describing the registration.

        Raises:
            ConfigurationError: If ``order`` is already taken.
        """
        for handle in self._handles:
            if handle.order == order:
                raise ConfigurationError(
                    f"order {order} is already registered by '{handle.name}'"
                )
        name = getattr(component, "name", type(component).__name__)
        handle = ComponentHandle(order=order, name=name, component=component)
        bisect.insort(self._handles, handle)
        logger.debug("Registered component %s at order %d", name, order)
        return handle

    def step(self) -> None:
        """Execute exactly one controller tick."""
        for handle in self._handles:
            handle.component.step(self.tick)
        self.tick += 1

    def run_until(self, t_end: SimTime | int) -> int:
        """
        Advance the simulation to the last tick boundary not after ``t_end``.

        Args:
            t_end: Target time, as SimTime or integer nanoseconds.

        Returns:
            Number of controller ticks executed.

        Raises:
            ValueError: If ``t_end`` lies before the current time.
        """
        end = t_end if isinstance(t_end, SimTime) else SimTime(int(t_end))
        if end < self.now:
            raise ValueError(
                f"t_end {end.ns} ns is in the past (current time {self.now.ns} ns)"
            )
        start_tick = self.tick
        target = end.ns // self.clock.controller_period_ns
        fast = self.clock.fast_forward and all(
            isinstance(h.component, SkippableComponent) for h in self._handles
        )
        components = [h.component for h in self._handles]

        while self.tick < target:
            span = self._span(components, target - self.tick) if fast else 1
            if span > 1:
                for component in components:
                    component.skip(self.tick, span)
                self.tick += span
                self.skipped_ticks += span
            else:
                for component in components:
                    component.step(self.tick)
                self.tick += 1

        return target - start_tick

    def _span(self, components: list[SkippableComponent], remaining: int) -> int:
        """Return how many ticks can be skipped at once (1 means step)."""
        span = remaining
        for component in components:
            horizon = component.horizon(self.tick)
            if horizon is not None and horizon < span:
                span = horizon
                if span <= 1:
                    return 1
        return span
