import cmath
import logging
import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from scipy.special import lambertw

from expmap.core.config import get_config
from expmap.core.dynamics import (
    DegenerateDerivative,
    EscapedToInfinity,
    NoConvergence,
    NumericalFailure,
    PeriodicOrbit,
    divisors,
    eval_map,
    find_periodic_orbit,
    orbit_tail,
)
from expmap.core.rays import (
    TWO_PI_I,
    ContinuationBreakdown,
    LandingNotConverged,
    extrapolate_landing,
)
from expmap.core.symbolic import IntermediateAddress

logger = logging.getLogger(__name__)

# distance of the multiplier at a landing point from exp(2*pi*i*h)
LANDING_MULTIPLIER_TOLERANCE = 1e-6
# largest distance of a cycle multiplier from the root of unity it is polished onto
PARABOLIC_SEED_RADIUS = 0.25
PARABOLIC_ORBIT_ITERATIONS = 20_000


class SingularJacobian(NumericalFailure):
    pass


class DivergedToInfinity(ContinuationBreakdown):
    """A continuation left every bounded set, ``last_good`` is the last parameter reached."""


@dataclass(frozen=True)
class HyperbolicComponent:
    """
    A hyperbolic component of period ``period`` given by an attracting seed orbit.
    ``branch_tag`` fixes the normalization Phi_W = sum of the orbit points - 2*pi*i*branch_tag,
    chosen so that Phi_W at the seed is the principal logarithm of the seed multiplier.
    """

    period: int
    seed_kappa: complex
    seed_point: complex
    seed_multiplier: complex
    branch_tag: int
    intermediate_address: Optional[IntermediateAddress] = None
    intermediate_confirmed: Optional[bool] = None
    root: Optional[complex] = None

    def __post_init__(self):
        if self.period < 1:
            raise ValueError("periods are positive")
        if not abs(self.seed_multiplier) < 1:
            raise ValueError(f"the seed multiplier {self.seed_multiplier} is not attracting")

    @property
    def seed_log_multiplier(self):
        return log_multiplier(self, self.seed_kappa, self.seed_point)

    def __str__(self):
        return f"period {self.period} component at {self.seed_kappa:.6g}"


@dataclass(frozen=True)
class InternalRaySample:
    t: float
    kappa: complex
    point: complex
    multiplier: complex


@dataclass(frozen=True)
class InternalRay:
    component: HyperbolicComponent
    height: float
    samples: Tuple[InternalRaySample, ...]
    landing: Optional[complex] = None


@dataclass(frozen=True)
class BoundarySample:
    theta: float
    kappa: complex
    multiplier: complex


@dataclass(frozen=True)
class ComponentBoundary:
    component: HyperbolicComponent
    samples: Tuple[BoundarySample, ...]
    closed: bool

    @property
    def polyline(self):
        return [sample.kappa for sample in self.samples]


def cycle(kappa, z, n, config=None):
    """The n points z, E(z), ..., E^(n-1)(z)."""
    cap = (config or get_config()).core.overflow_cap
    points = [complex(z)]
    for _ in range(n - 1):
        points.append(eval_map(kappa, points[-1], cap))
    return points


def log_multiplier(component, kappa, z, config=None):
    """Phi_W at kappa, given a point z of the attracting cycle."""
    return sum(cycle(kappa, z, component.period, config)) - TWO_PI_I * component.branch_tag


def sector_index(component, kappa, z, config=None):
    return math.floor(log_multiplier(component, kappa, z, config).imag / (2 * math.pi))


def period_one_parameter(w, k=0):
    """The parameter with a fixed point of log-multiplier w in the period one component k."""
    return w + TWO_PI_I * k - cmath.exp(w)


def period_one_membership(kappa):
    """
    Whether E_kappa has an attracting fixed point. The fixed points are
    z = kappa - W(-exp(kappa)) with multiplier -W(-exp(kappa)), only the principal branch of
    Lambert's W can be smaller than one in modulus.
    """
    kappa = complex(kappa)
    if kappa.real > 1:
        return False
    return bool(abs(lambertw(-cmath.exp(kappa), 0)) < 1)


def component_from_seed(n, kappa, z, config=None, **extra):
    """Refine an attracting orbit of period n and build the component containing kappa."""
    config = config or get_config()
    orbit = find_periodic_orbit(kappa, n, z, config)
    if not orbit.is_primitive(config.components.dedup_tolerance):
        raise NoConvergence(f"the orbit found at {kappa} has a period smaller than {n}")
    if not abs(orbit.multiplier) < 1:
        raise NoConvergence(f"the period {n} orbit at {kappa} is not attracting")
    total = sum(orbit.points)
    branch_tag = round((total.imag - cmath.phase(orbit.multiplier)) / (2 * math.pi))
    return HyperbolicComponent(
        period=n,
        seed_kappa=complex(kappa),
        seed_point=orbit.points[0],
        seed_multiplier=orbit.multiplier,
        branch_tag=branch_tag,
        **extra,
    )


def period_one_component(k=0, config=None):
    return component_from_seed(1, period_one_parameter(-1, k), -1 + TWO_PI_I * k, config)


def _system(n, kappa, z, target, cap):
    """
    Residual and Jacobian in (z, kappa) of E^n(z) - z = 0, sum of z_j - target = 0.
    With a_j = dz_j/dz and b_j = dz_j/dkappa: a_(j+1) = e^(z_j) a_j, b_(j+1) = e^(z_j) b_j + 1.
    """
    a, b = 1, 0
    sum_a, sum_b, total = 0, 0, 0
    point = z
    for _ in range(n):
        total += point
        sum_a += a
        sum_b += b
        if point.real > cap:
            raise EscapedToInfinity(point)
        exponential = cmath.exp(point)
        a, b = exponential * a, exponential * b + 1
        point = exponential + kappa
    residual = np.array([point - z, total - target], dtype=complex)
    jacobian = np.array([[a - 1, b], [sum_a, sum_b]], dtype=complex)
    return residual, jacobian


def _solve(jacobian, right_hand_side, tolerance):
    determinant = jacobian[0, 0] * jacobian[1, 1] - jacobian[0, 1] * jacobian[1, 0]
    if abs(determinant) < tolerance * max(1.0, np.abs(jacobian).max()) ** 2:
        raise SingularJacobian(f"jacobian determinant {determinant:.3g}")
    return np.linalg.solve(jacobian, right_hand_side)


def solve_log_multiplier(n, target, seed, config=None):
    """Newton's method for an orbit of period n whose points sum to ``target``."""
    config = config or get_config()
    core = config.core
    kappa, z = (complex(value) for value in seed)
    for _ in range(core.newton_max_iter):
        try:
            residual, jacobian = _system(n, kappa, z, target, core.overflow_cap)
        except EscapedToInfinity as e:
            raise NoConvergence(f"period {n} orbit escapes during Newton's method") from e
        dz, dkappa = _solve(jacobian, -residual, config.components.singular_tolerance)
        z += complex(dz)
        kappa += complex(dkappa)
        if abs(dz) < core.newton_tolerance * (1 + abs(z)) and abs(
            dkappa
        ) < core.newton_tolerance * (1 + abs(kappa)):
            return kappa, z
    raise NoConvergence(f"no period {n} orbit with log-multiplier {target} near {seed}")


def solve_for_multiplier(n, mu, seed, config=None):
    """
    Newton's method for (kappa, z) with E^n(z) = z and multiplier mu. The logarithm of mu is
    taken on the sheet nearest to the seed orbit.
    """
    mu = complex(mu)
    if not 0 < abs(mu) <= 1:
        raise ValueError("the multiplier must satisfy 0 < |mu| <= 1")
    kappa, z = (complex(value) for value in seed)
    try:
        total = sum(cycle(kappa, z, n, config))
    except EscapedToInfinity as e:
        raise NoConvergence(f"the seed orbit of {seed} escapes") from e
    sheet = round((total.imag - cmath.phase(mu)) / (2 * math.pi))
    return solve_log_multiplier(n, cmath.log(mu) + TWO_PI_I * sheet, (kappa, z), config)


def _tangent(n, kappa, z, target, config):
    _, jacobian = _system(n, kappa, z, target, config.core.overflow_cap)
    dz, dkappa = _solve(
        jacobian, np.array([0, 1], dtype=complex), config.components.singular_tolerance
    )
    return complex(dz), complex(dkappa)


def continue_log_multiplier(component, w, start=None, max_steps=None, config=None):
    """
    Follow Phi_W^-1 along the segment from ``start`` = (w0, kappa0, z0), by default the seed,
    to w. Each step of length at most ``components.step`` is predicted along the tangent and
    corrected by Newton's method; failed steps are halved. Returns (kappa, z, steps).
    """
    config = config or get_config()
    settings = config.components
    n, shift = component.period, TWO_PI_I * component.branch_tag
    if start is None:
        start = (component.seed_log_multiplier, component.seed_kappa, component.seed_point)
    current, kappa, z = start
    target = complex(w)
    length, steps = settings.step, 0
    while current != target:
        distance = abs(target - current)
        following = (
            target if distance <= length else current + (target - current) * length / distance
        )
        try:
            dz, dkappa = _tangent(n, kappa, z, current + shift, config)
            delta = following - current
            next_kappa, next_z = solve_log_multiplier(
                n, following + shift, (kappa + dkappa * delta, z + dz * delta), config
            )
        except (NoConvergence, SingularJacobian, np.linalg.LinAlgError) as e:
            length /= 2
            if length < settings.step / 2**10:
                raise ContinuationBreakdown(
                    f"continuation in {component} stuck at w={current}: {e}", last_good=kappa
                ) from e
            continue
        if abs(next_kappa) > settings.divergence_radius:
            raise DivergedToInfinity(
                f"continuation in {component} diverges towards w={following}", last_good=kappa
            )
        current, kappa, z = following, next_kappa, next_z
        steps += 1
        if max_steps is not None and steps > max_steps:
            raise ContinuationBreakdown(
                f"continuation in {component} needs more than {max_steps} steps", last_good=kappa
            )
        length = min(settings.step, 2 * length)
    return kappa, z, steps


def phi_inverse(component, w, config=None):
    """The parameter kappa in W with Phi_W(kappa) = w."""
    w = complex(w)
    if w.real >= 0:
        raise ValueError("Phi_W takes values in the left half plane")
    return continue_log_multiplier(component, w, config=config)[0]


def internal_ray_grid(t_start, t_end, step, ratio):
    """Times from t_start to t_end, steps of at most ``step`` that shrink geometrically near 0."""
    times = [t_start]
    while times[-1] < t_end:
        times.append(min(times[-1] + step, times[-1] / ratio, t_end))
    return times


def internal_ray(component, height, t_start, t_end, config=None):
    """Sample t -> Phi_W^-1(t + 2*pi*i*h) for t_start <= t <= t_end < 0."""
    config = config or get_config()
    if not t_start < t_end < 0:
        raise ValueError("need t_start < t_end < 0")
    samples = []
    start = None
    for t in internal_ray_grid(
        t_start, t_end, config.components.step, config.rays.grid_factor
    ):
        w = complex(t, 2 * math.pi * height)
        try:
            kappa, z, _ = continue_log_multiplier(component, w, start=start, config=config)
        except DivergedToInfinity:
            raise
        except ContinuationBreakdown as e:
            last_t = samples[-1].t if samples else None
            raise ContinuationBreakdown(
                f"internal ray at height {height} of {component} breaks down after t={last_t}",
                last_good=e.last_good,
            ) from e
        start = (w, kappa, z)
        multiplier = cmath.exp(sum(cycle(kappa, z, component.period, config)))
        samples.append(InternalRaySample(t=t, kappa=kappa, point=z, multiplier=multiplier))
    return InternalRay(component=component, height=height, samples=tuple(samples))


def parabolic_parameter(kappa, n, seed=None, config=None):
    """
    The parameter near kappa at which a cycle of period d dividing n has a primitive q-th root
    of unity as multiplier, n = d * q. Divisors are tried in increasing order: the cycle of
    period d through the seed (by default the tail of the singular orbit) is refined at kappa,
    and if its multiplier is close to such a root, cycle and parameter are solved for together.
    Returns the parameter and its parabolic cycle.
    """
    config = config or get_config()
    kappa = complex(kappa)
    if seed is None:
        seed = orbit_tail(kappa, PARABOLIC_ORBIT_ITERATIONS, config)
    for d in divisors(n):
        q = n // d
        try:
            nearby = find_periodic_orbit(kappa, d, seed, config)
        except DegenerateDerivative as e:
            nearby = e.orbit
        except NoConvergence as e:
            if e.orbit is None:
                continue
            nearby = e.orbit
        p = round(cmath.phase(nearby.multiplier) * q / (2 * math.pi))
        root_of_unity = cmath.exp(TWO_PI_I * p / q)
        if math.gcd(p, q) != 1 or abs(nearby.multiplier - root_of_unity) > PARABOLIC_SEED_RADIUS:
            continue
        sheet = round(sum(nearby.points).imag / (2 * math.pi) - p / q)
        try:
            root, z = solve_log_multiplier(
                d, TWO_PI_I * (p / q + sheet), (kappa, nearby.points[0]), config
            )
        except (NoConvergence, SingularJacobian) as e:
            logger.debug("no parabolic parameter of period %s near %s: %s", d, kappa, e)
            continue
        return root, PeriodicOrbit.from_points(cycle(root, z, d, config))
    raise LandingNotConverged(f"no parabolic cycle of period dividing {n} near {kappa}")


def internal_ray_landing(component, height, config=None, ray=None):
    """
    Landing point of the internal ray at height h, extrapolated to t = 0 from samples down to
    -parabolic_cutoff and polished by Newton's method on the boundary. At a satellite root the
    Jacobian of the period n system is singular, there the landing point is polished on the
    parent cycle instead. The multiplier at the landing point must be exp(2*pi*i*h).
    """
    config = config or get_config()
    settings = config.components
    try:
        if ray is None:
            ray = internal_ray(component, height, -1.0, -settings.parabolic_cutoff, config)
        for sample in ray.samples:
            if abs(sample.kappa) > settings.divergence_radius:
                raise DivergedToInfinity(
                    f"internal ray of {component} reaches {sample.kappa}", last_good=sample.kappa
                )
    except DivergedToInfinity as e:
        logger.warning("internal ray at height %s of %s does not land: %s", height, component, e)
        raise
    tail = ray.samples[-config.rays.landing_samples :]
    landing, spread = extrapolate_landing(
        [sample.t for sample in tail], [sample.kappa for sample in tail]
    )
    if spread > config.rays.landing_tolerance:
        raise LandingNotConverged(f"landing fits of {component} spread by {spread:.3g}")

    expected = cmath.exp(TWO_PI_I * height)
    n, target = component.period, TWO_PI_I * (height + component.branch_tag)
    try:
        kappa, z = solve_log_multiplier(n, target, (landing, tail[-1].point), config)
        multiplier = cmath.exp(sum(cycle(kappa, z, n, config)))
    except (NoConvergence, SingularJacobian) as e:
        logger.debug("polishing the landing point %s on a parent cycle: %s", landing, e)
        kappa, parabolic = parabolic_parameter(landing, n, tail[-1].point, config)
        multiplier = parabolic.multiplier ** (n // parabolic.period)
    if abs(kappa - landing) > config.rays.landing_tolerance:
        raise LandingNotConverged(f"polished landing {kappa} is far from {landing}")
    if abs(multiplier - expected) > LANDING_MULTIPLIER_TOLERANCE:
        raise LandingNotConverged(
            f"multiplier {multiplier} at the landing point {kappa} differs from {expected}"
        )
    return kappa


def _boundary_point(component, theta, previous, config):
    n, target = component.period, TWO_PI_I * (theta / (2 * math.pi) + component.branch_tag)
    if previous is not None:
        try:
            return solve_log_multiplier(n, target, previous, config)
        except (NoConvergence, SingularJacobian):
            logger.debug("restarting the boundary of %s at theta=%s", component, theta)
    inside = complex(-config.components.parabolic_cutoff, theta)
    kappa, z, _ = continue_log_multiplier(component, inside, config=config)
    return solve_log_multiplier(n, target, (kappa, z), config)


def boundary_trace(component, thetas, config=None):
    """
    Follow the boundary Phi_W = i*theta over the angles, each point by Newton's method from
    its predecessor, restarting from inside the component where that fails. The boundary is
    closed if continuing once around the circle returns to the first point.
    """
    config = config or get_config()
    samples = []
    previous = None
    for theta in thetas:
        try:
            kappa, z = _boundary_point(component, theta, previous, config)
        except NumericalFailure as e:
            logger.warning("skipping theta=%s on the boundary of %s: %s", theta, component, e)
            previous = None
            continue
        samples.append(
            BoundarySample(
                theta=theta,
                kappa=kappa,
                multiplier=cmath.exp(sum(cycle(kappa, z, component.period, config))),
            )
        )
        previous = (kappa, z)
    closed = False
    if samples:
        try:
            around, _ = _boundary_point(
                component, samples[0].theta + 2 * math.pi, None, config
            )
            closed = abs(around - samples[0].kappa) <= config.components.dedup_tolerance
        except NumericalFailure as e:
            logger.debug("cannot continue the boundary of %s around: %s", component, e)
    return ComponentBoundary(component=component, samples=tuple(samples), closed=closed)
