"""
Differential-drive kinematic plant and the 2-D obstacle world.

Two coaxial driven wheels plus a free caster: equal wheel speeds drive
straight, opposite speeds turn on the spot, anything else follows an arc.
"""

import logging
import math
from dataclasses import dataclass, field

from simulation.control import ControlParams
from simulation.errors import ConfigurationError
from simulation.kernel import ClockConfig
from simulation.motor_driver import MotorDriverUnit

logger = logging.getLogger(__name__)

STRAIGHT_EPS = 1e-9
INTEGRATORS = ("exact_arc", "euler")


@dataclass(frozen=True)
class RobotGeometry:
    """
    Robot dimensions and motor response.

    Attributes:
        wheel_radius: Wheel radius, m.
        axle_length: Distance between the driven wheels, m.
        omega_max: Wheel speed at full drive, rad/s.
        motor_tau: First-order motor time constant, s.
    """

    wheel_radius: float = 0.03
    axle_length: float = 0.15
    omega_max: float = 10.0
    motor_tau: float = 0.1

    def __post_init__(self) -> None:
        """Validate the geometry.

        Raises:
            ConfigurationError: If any field is not strictly positive.
        """
        for name in ("wheel_radius", "axle_length", "omega_max", "motor_tau"):
            if not getattr(self, name) > 0:
                raise ConfigurationError(
                    f"{name} must be strictly positive, got {getattr(self, name)}"
                )


def normalize_angle(theta: float) -> float:
    """Wrap an angle into (-pi, pi]; angles already inside are returned as is."""
    while theta > math.pi:
        theta -= 2 * math.pi
    while theta <= -math.pi:
        theta += 2 * math.pi
    return theta


@dataclass(frozen=True, slots=True)
class Pose:
    """Planar position (m) and heading (rad, in (-pi, pi])."""

    x: float = 0.0
    y: float = 0.0
    theta: float = 0.0

    def __post_init__(self) -> None:
        """Normalize the heading."""
        object.__setattr__(self, "theta", normalize_angle(self.theta))


@dataclass(frozen=True)
class Obstacle:
    """Circular obstacle (centre and radius in metres)."""

    x: float
    y: float
    radius: float

    def __post_init__(self) -> None:
        """Validate the radius.

        Raises:
            ConfigurationError: If the radius is not positive.
        """
        if not self.radius > 0:
            raise ConfigurationError(f"radius must be positive, got {self.radius}")

    def contains(self, x: float, y: float) -> bool:
        """Return True if the point lies inside or on the circle."""
        return math.hypot(x - self.x, y - self.y) <= self.radius


@dataclass(frozen=True)
class Scenario:
    """
    World description of a run.

    Attributes:
        name: Scenario label used for output naming.
        initial_pose: Pose at time zero.
        obstacles: Circular obstacles.
        duration_s: Simulated time, seconds.
        control: Control-law thresholds.
    """

    name: str = "scenario"
    initial_pose: Pose = field(default_factory=Pose)
    obstacles: tuple[Obstacle, ...] = ()
    duration_s: float = 10.0
    control: ControlParams = field(default_factory=ControlParams)

    def __post_init__(self) -> None:
        """Validate the scenario.

        Raises:
            ConfigurationError: If the duration is not positive or the robot
                starts inside an obstacle.
        """
        if not self.duration_s > 0:
            raise ConfigurationError(
                f"duration_s must be positive, got {self.duration_s}"
            )
        for index, obstacle in enumerate(self.obstacles):
            if obstacle.contains(self.initial_pose.x, self.initial_pose.y):
                raise ConfigurationError(
                    f"initial_pose lies inside obstacle {index} "
                    f"(centre {obstacle.x}, {obstacle.y})"
                )


def wheel_speed_step(
    omega: float, drive: int, duty_fraction: float, geom: RobotGeometry, dt: float
) -> float:
    """
    Advance one wheel's speed through the first-order motor lag.

    Args:
        omega: Current wheel speed, rad/s.
        drive: Drive direction in {-1, 0, +1}.
        duty_fraction: Averaged PWM high fraction in [0, 1].
        geom: Robot geometry.
        dt: Step length, s.

    Returns:
        New wheel speed, rad/s.

    Raises:
        ValueError: If dt is not positive.
    """
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    target = drive * duty_fraction * geom.omega_max
    return omega + (target - omega) * -math.expm1(-dt / geom.motor_tau)


def _body_rates(
    omega_l: float, omega_r: float, geom: RobotGeometry
) -> tuple[float, float]:
    v = geom.wheel_radius * (omega_l + omega_r) / 2
    w = geom.wheel_radius * (omega_r - omega_l) / geom.axle_length
    return v, w


def pose_step(
    pose: Pose, omega_l: float, omega_r: float, geom: RobotGeometry, dt: float
) -> Pose:
    """
    Integrate the pose exactly for constant wheel speeds over ``dt``.

    Args:
        pose: Current pose.
        omega_l: Left wheel speed, rad/s.
        omega_r: Right wheel speed, rad/s.
        geom: Robot geometry.
        dt: Step length, s.

    Returns:
        Pose at the end of the step (straight segment when |w| < 1e-9 rad/s,
        otherwise a circular arc of radius v/w).

    Raises:
        ValueError: If dt is not positive.
    """
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    v, w = _body_rates(omega_l, omega_r, geom)
    if abs(w) < STRAIGHT_EPS:
        return Pose(
            x=pose.x + v * dt * math.cos(pose.theta),
            y=pose.y + v * dt * math.sin(pose.theta),
            theta=pose.theta,
        )
    radius = v / w
    theta = pose.theta + w * dt
    return Pose(
        x=pose.x + radius * (math.sin(theta) - math.sin(pose.theta)),
        y=pose.y - radius * (math.cos(theta) - math.cos(pose.theta)),
        theta=theta,
    )


def euler_pose_step(
    pose: Pose, omega_l: float, omega_r: float, geom: RobotGeometry, dt: float
) -> Pose:
    """First-order (forward Euler) reference integrator."""
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    v, w = _body_rates(omega_l, omega_r, geom)
    return Pose(
        x=pose.x + v * dt * math.cos(pose.theta),
        y=pose.y + v * dt * math.sin(pose.theta),
        theta=pose.theta + w * dt,
    )


def raycast_distance(pose: Pose, scenario: Scenario, range_max: float) -> float:
    """
    Distance along the heading to the nearest obstacle boundary.

    Args:
        pose: Ray origin and direction.
        scenario: World with circular obstacles.
        range_max: Value returned when nothing is hit within range, cm.

    Returns:
        Distance in centimetres, capped at ``range_max``.
    """
    dx = math.cos(pose.theta)
    dy = math.sin(pose.theta)
    nearest = math.inf
    for obstacle in scenario.obstacles:
        # |f + t*d|^2 = r^2 com |d| = 1
        fx = pose.x - obstacle.x
        fy = pose.y - obstacle.y
        b = fx * dx + fy * dy
        c = fx * fx + fy * fy - obstacle.radius**2
        disc = b * b - c
        if disc < 0:
            continue
        root = math.sqrt(disc)
        for t in (-b - root, -b + root):
            if t >= 0:
                nearest = min(nearest, t)
                break
    return min(nearest * 100.0, range_max)


class PlantUnit:
    """
    Multi-rate bridge between the controller clock and the physics step.

    Every ``plant_ratio`` controller ticks the averaged signed drive of each
    wheel updates the wheel speeds, the pose and the raycast distance.
    """

    name = "plant"

    def __init__(
        self,
        scenario: Scenario,
        geometry: RobotGeometry,
        clock: ClockConfig,
        motor: MotorDriverUnit,
        range_max_cm: float = 150.0,
        integrator: str = "exact_arc",
    ) -> None:
        """
        Initialize the plant at the scenario's initial pose, wheels at rest.

        Args:
            scenario: World description.
            geometry: Robot geometry.
            clock: Timing configuration.
            motor: Driver stage whose accumulated drive is consumed.
            range_max_cm: Raycast range.
            integrator: "exact_arc" or "euler".

        Raises:
            ConfigurationError: If the integrator name is unknown.
        """
        if integrator not in INTEGRATORS:
            raise ConfigurationError(
                f"integrator must be one of {INTEGRATORS}, got '{integrator}'"
            )
        self.scenario = scenario
        self.geometry = geometry
        self.ratio = clock.plant_ratio
        self.dt = clock.plant_dt
        self.motor = motor
        self.range_max_cm = range_max_cm
        self._integrate = pose_step if integrator == "exact_arc" else euler_pose_step
        self.pose = scenario.initial_pose
        self.omega_l = 0.0
        self.omega_r = 0.0
        self.steps = 0
        self.distance_cm = raycast_distance(self.pose, scenario, range_max_cm)
        self.min_distance_cm = self.distance_cm
        self._phase = 0

    def measurement(self) -> tuple[int, float]:
        """Return (plant step index, raycast distance in cm)."""
        return self.steps, self.distance_cm

    def step(self, tick: int) -> None:  # noqa: ARG002
        """Execute one controller tick; physics runs on the last tick of a step."""
        self._phase += 1
        if self._phase == self.ratio:
            self._phase = 0
            self._advance()

    def horizon(self, tick: int) -> int | None:  # noqa: ARG002
        """Ticks before the next plant boundary."""
        return self.ratio - self._phase - 1

    def skip(self, tick: int, count: int) -> None:  # noqa: ARG002
        """Advance ``count`` ticks inside the current plant step."""
        self._phase += count

    def _advance(self) -> None:
        left_sum, right_sum = self.motor.take_sums()
        self.omega_l = self._wheel(self.omega_l, left_sum)
        self.omega_r = self._wheel(self.omega_r, right_sum)
        self.pose = self._integrate(
            self.pose, self.omega_l, self.omega_r, self.geometry, self.dt
        )
        self.distance_cm = raycast_distance(self.pose, self.scenario, self.range_max_cm)
        self.min_distance_cm = min(self.min_distance_cm, self.distance_cm)
        self.steps += 1

    def _wheel(self, omega: float, drive_sum: int) -> float:
        average = drive_sum / self.ratio
        drive = (average > 0) - (average < 0)
        return wheel_speed_step(omega, drive, abs(average), self.geometry, self.dt)
