import cmath
import logging
import math
import sys
from dataclasses import dataclass
from typing import Tuple

from expmap.core.config import get_config

logger = logging.getLogger(__name__)

# largest real part we exponentiate, e**700 is still a finite double
OVERFLOW_CAP = 700.0


class NumericalFailure(ArithmeticError):
    """Superclass of the numerical failures raised by expmap, commands exit with status 2."""


class EscapedToInfinity(NumericalFailure):
    """The next iterate would overflow, the orbit has escaped for all practical purposes."""

    def __init__(self, z):
        self.z = z
        super().__init__(f"iterate {z} exceeds the exponent range")


class PotentialOverflow(NumericalFailure):
    def __init__(self, step):
        self.step = step
        super().__init__(f"F overflows at step {step}")


class NoConvergence(NumericalFailure):
    """``orbit``, if any, is the orbit of smallest closure defect Newton's method came across."""

    def __init__(self, message, orbit=None):
        self.orbit = orbit
        super().__init__(message)


class DegenerateDerivative(NumericalFailure):
    """
    Newton's method met a cycle whose multiplier is (numerically) one. The orbit found so far
    is attached as ``orbit``, as the caller usually wants to report it as indifferent.
    """

    def __init__(self, orbit):
        self.orbit = orbit
        super().__init__(
            f"degenerate derivative at {orbit.points[0]}, multiplier {orbit.multiplier}"
        )


@dataclass(frozen=True)
class PeriodicOrbit:
    period: int
    points: Tuple[complex, ...]
    multiplier: complex

    @classmethod
    def from_points(cls, points):
        return cls(
            period=len(points),
            points=tuple(points),
            multiplier=math.prod(cmath.exp(point) for point in points),
        )

    def closure_defect(self, kappa):
        return max(
            abs(eval_map(kappa, point) - self.points[(j + 1) % self.period])
            for j, point in enumerate(self.points)
        )

    def is_primitive(self, tolerance):
        """No proper divisor of the period already closes the cycle."""
        return all(
            abs(self.points[d] - self.points[0]) > tolerance
            for d in divisors(self.period)
            if d < self.period
        )

    def matches(self, other, tolerance):
        """Equality up to a cyclic relabelling of the orbit points."""
        if self.period != other.period:
            return False
        return any(
            all(
                abs(self.points[(j + shift) % self.period] - point) < tolerance
                for j, point in enumerate(other.points)
            )
            for shift in range(self.period)
        )


class OrbitClassification:
    kind = None


@dataclass(frozen=True)
class Escaping(OrbitClassification):
    steps: int
    address_prefix: Tuple[int, ...]
    potential: float
    kind = "escaping"


@dataclass(frozen=True)
class Attracting(OrbitClassification):
    period: int
    multiplier: complex
    orbit_point: complex
    kind = "attracting"


@dataclass(frozen=True)
class Indifferent(OrbitClassification):
    period: int
    multiplier: complex
    kind = "indifferent"


@dataclass(frozen=True)
class Undetermined(OrbitClassification):
    steps: int
    kind = "undetermined"


def eval_map(kappa, z, overflow_cap=OVERFLOW_CAP):
    """Evaluate E_kappa(z) = exp(z) + kappa."""
    if z.real > overflow_cap:
        raise EscapedToInfinity(z)
    return cmath.exp(z) + kappa


def orbit(kappa, z0, nmax, overflow_cap=OVERFLOW_CAP):
    """Return [z0, ..., z_nmax], truncated where the next iterate would overflow."""
    if nmax < 1:
        raise ValueError("nmax must be at least 1")
    points = [complex(z0)]
    for _ in range(nmax):
        try:
            points.append(eval_map(kappa, points[-1], overflow_cap))
        except EscapedToInfinity:
            break
    return points


def F_iterate(t, n):
    """n-fold application of F(t) = exp(t) - 1 on the positive reals."""
    if t < 0:
        raise ValueError("F is only iterated on t >= 0")
    value = float(t)
    for step in range(1, n + 1):
        try:
            value = math.expm1(value)
        except OverflowError as e:
            raise PotentialOverflow(step) from e
    return value


def F_inverse_iterate(x, n):
    value = float(x)
    for _ in range(n):
        value = math.log1p(value)
    return value


def potential_estimate(points):
    """
    Estimate the potential t of an escaping orbit from its last point,
    using Re(z_j) = F^j(t) + o(1).
    """
    j = len(points) - 1
    return F_inverse_iterate(max(points[-1].real, 0.0), j)


def conjugate_parameter(kappa):
    """lambda = exp(kappa); translation by -kappa conjugates E_kappa to z -> lambda exp(z)."""
    return cmath.exp(kappa)


def eval_conjugate(lam, zeta, overflow_cap=OVERFLOW_CAP):
    if zeta.real > overflow_cap:
        raise EscapedToInfinity(zeta)
    return lam * cmath.exp(zeta)


def _cycle(kappa, z, n, overflow_cap):
    points = [z]
    for _ in range(n):
        points.append(eval_map(kappa, points[-1], overflow_cap))
    return points


def find_periodic_orbit(kappa, n, seed, config=None):
    """
    Newton's method for E^n(z) - z = 0. The derivative of E^n is the product of the
    exp(z_j) = z_{j+1} - kappa along the orbit.
    """
    core = (config or get_config()).core
    z = complex(seed)
    best, best_defect = None, math.inf
    for _ in range(core.newton_max_iter):
        try:
            points = _cycle(kappa, z, n, core.overflow_cap)
        except EscapedToInfinity as e:
            raise NoConvergence(
                f"period {n} Newton iterate escaped from seed {seed}", orbit=best
            ) from e
        if abs(points[n] - z) < best_defect:
            best, best_defect = PeriodicOrbit.from_points(points[:n]), abs(points[n] - z)
        derivative = math.prod(points[j + 1] - kappa for j in range(n))
        if abs(derivative - 1) < core.degenerate_tolerance:
            raise DegenerateDerivative(PeriodicOrbit.from_points(points[:n]))
        step = (points[n] - z) / (derivative - 1)
        z -= step
        if abs(step) < core.newton_tolerance * (1 + abs(z)):
            try:
                return PeriodicOrbit.from_points(_cycle(kappa, z, n - 1, core.overflow_cap))
            except EscapedToInfinity as e:
                raise NoConvergence(f"period {n} orbit through {z} escapes", orbit=best) from e
    raise NoConvergence(
        f"no period {n} orbit found from seed {seed} after {core.newton_max_iter} steps",
        orbit=best,
    )


def closes_at_rounding(orbit, kappa, config=None):
    """
    Whether the orbit closes up to rounding. Newton's method for a cycle of multiplier one
    converges only to about the square root of the machine precision, so at parabolic
    parameters this replaces the step size test.
    """
    core = (config or get_config()).core
    scale = 1 + max(abs(point) for point in orbit.points)
    try:
        return orbit.closure_defect(kappa) <= core.newton_tolerance * scale
    except EscapedToInfinity:
        return False


def orbit_tail(kappa, iterations, config=None):
    """
    A point where the singular orbit lingers: its last point, or the middle one if it escapes.
    Parabolic cycles attract the singular orbit, and it passes slowly near them just outside.
    """
    points = orbit(kappa, kappa, iterations, (config or get_config()).core.overflow_cap)
    if len(points) <= iterations:
        return points[len(points) // 2]
    return points[-1]


def divisors(n):
    return [d for d in range(1, n + 1) if n % d == 0]


def _classify_cycle(kappa, candidate, z, config):
    """Refine a cycle candidate found by cycle detection, smallest period first."""
    core = config.core
    for period in divisors(candidate):
        try:
            periodic_orbit = find_periodic_orbit(kappa, period, z, config)
        except DegenerateDerivative as e:
            return Indifferent(period=period, multiplier=e.orbit.multiplier)
        except NoConvergence as e:
            if e.orbit is None or not closes_at_rounding(e.orbit, kappa, config):
                continue
            periodic_orbit = e.orbit
        if min(abs(point - z) for point in periodic_orbit.points) > math.sqrt(
            core.cycle_tolerance
        ):
            # newton wandered off to a different cycle
            continue
        modulus = abs(periodic_orbit.multiplier)
        if modulus < 1 - core.attract_tolerance:
            return Attracting(
                period=period,
                multiplier=periodic_orbit.multiplier,
                orbit_point=periodic_orbit.points[0],
            )
        if abs(modulus - 1) <= core.attract_tolerance:
            return Indifferent(period=period, multiplier=periodic_orbit.multiplier)
    return None


def _trusted_prefix(points, strip_tolerance):
    """
    Strip indices of the forward orbit as long as rounding cannot have moved an iterate
    across a strip boundary: the error of Im(z_j) is about exp(Re z_{j-1}) * eps * |z_{j-1}|.
    """
    from expmap.core.symbolic import AmbiguousStrip, strip_index

    prefix = []
    for j, point in enumerate(points):
        if j > 0:
            previous = points[j - 1]
            if previous.real > OVERFLOW_CAP or math.exp(previous.real) * (
                1 + abs(previous)
            ) * sys.float_info.epsilon > strip_tolerance:
                break
        try:
            prefix.append(strip_index(point, strip_tolerance))
        except AmbiguousStrip:
            break
    return tuple(prefix)


def classify_singular_orbit(
    kappa, max_iter=None, escape_radius=None, attract_tol=None, config=None
):
    """
    Follow the orbit of the singular value kappa. Escape is declared once the real parts
    exceed the escape radius and keep growing for ``escape_streak`` steps (or the next
    exponential would overflow). Brent's cycle detection supplies Newton seeds for the
    attracting cycle. Anything else is Undetermined, this never raises.
    """
    config = (config or get_config()).override("core", attract_tolerance=attract_tol)
    core = config.core
    max_iter = core.max_iter if max_iter is None else max_iter
    escape_radius = core.escape_radius if escape_radius is None else escape_radius
    if escape_radius < 50:
        raise ValueError("the escape radius must be at least 50")
    if max_iter < 1:
        raise ValueError("max_iter must be at least 1")

    kappa = complex(kappa)
    points = [kappa]
    tortoise = kappa
    power, lam = 1, 0
    streak = 0
    refined_at = None

    def escaping(steps):
        return Escaping(
            steps=steps,
            address_prefix=_trusted_prefix(points, config.symbolic.strip_tolerance),
            potential=potential_estimate(points),
        )

    z = kappa
    for step in range(1, max_iter + 1):
        if z.real > core.overflow_cap:
            return escaping(step - 1)
        previous = z
        z = cmath.exp(z) + kappa
        points.append(z)
        lam += 1

        if z.real > escape_radius and (streak == 0 or z.real > previous.real):
            streak += 1
            if streak >= core.escape_streak or z.real > core.overflow_cap:
                return escaping(step)
        else:
            streak = 0

        if abs(z - tortoise) < core.cycle_tolerance and refined_at != tortoise:
            refined_at = tortoise
            if (classification := _classify_cycle(kappa, lam, z, config)) is not None:
                return classification
        if lam == power:
            tortoise = z
            power *= 2
            lam = 0
    return Undetermined(steps=max_iter)


def indifferent_cycle(kappa, max_period, iterations=20_000, tolerance=1e-3, config=None):
    """
    Look for a cycle of period <= max_period with |multiplier| = 1 within ``tolerance``,
    seeded from the tail of the singular orbit. Return the PeriodicOrbit or None.
    """
    config = config or get_config()
    seed = orbit_tail(kappa, iterations, config)
    for period in range(1, max_period + 1):
        try:
            candidate = find_periodic_orbit(kappa, period, seed, config)
        except DegenerateDerivative as e:
            candidate = e.orbit
        except NoConvergence as e:
            if e.orbit is None or not closes_at_rounding(e.orbit, kappa, config):
                continue
            candidate = e.orbit
        if abs(abs(candidate.multiplier) - 1) <= tolerance:
            return candidate
    logger.debug("no indifferent cycle of period <= %s at %s", max_period, kappa)
    return None
