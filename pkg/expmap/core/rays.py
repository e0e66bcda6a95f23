import cmath
import itertools
import logging
import math
import sys
from dataclasses import dataclass, replace
from typing import Optional, Tuple

from expmap.core.config import get_config
from expmap.core.dynamics import (
    NoConvergence,
    NumericalFailure,
    PotentialOverflow,
    F_iterate,
    indifferent_cycle,
)
from expmap.core.symbolic import address_of_escape, lex_sort_key
from expmap.extra.utils import DisjointSets, extrapolate_to_zero

logger = logging.getLogger(__name__)

TWO_PI_I = 2j * math.pi
# potentials from which the asymptotic seed t + 2*pi*i*s_1 is good enough to start a solve
DIRECT_SEED_POTENTIAL = 5.0
# the landing extrapolation needs samples down to this potential
LANDING_POTENTIAL = 0.05
# degrees of the polynomials fitted to the last samples of a ray
LANDING_DEGREES = (1, 2)


class BranchCollision(NumericalFailure):
    def __init__(self, w, kappa):
        self.w = w
        super().__init__(f"pullback of {w} meets the branch cut of the logarithm at kappa={kappa}")


class DepthOverflow(NumericalFailure):
    pass


class ContinuationBreakdown(NumericalFailure):
    """A continuation could not proceed. ``last_good`` is the last accepted parameter."""

    def __init__(self, message, last_good=None):
        self.last_good = last_good
        super().__init__(message)


class LandingNotConverged(NoConvergence):
    pass


class Unresolved(NumericalFailure):
    pass


@dataclass(frozen=True)
class RayPoint:
    t: float
    kappa: complex
    residual: float
    depth: int

    @property
    def error(self):
        """Error bar of kappa: the fixed point residual, but never below rounding."""
        return max(self.residual, 8 * sys.float_info.epsilon * (1 + abs(self.kappa)))


@dataclass(frozen=True)
class Landing:
    kappa: complex
    error: float


@dataclass(frozen=True)
class ParameterRay:
    address: object
    samples: Tuple[RayPoint, ...]
    landing: Optional[Landing] = None

    def __post_init__(self):
        if not self.samples:
            raise ValueError("a parameter ray has at least one sample")


def ray_depth(t, config=None):
    """Smallest N with F^N(t) above the depth radius."""
    rays = (config or get_config()).rays
    if t <= 0:
        raise ValueError("potentials are positive")
    value, depth = t, 0
    while value <= rays.depth_radius:
        depth += 1
        if depth > rays.max_depth:
            raise DepthOverflow(f"potential {t} needs more than {rays.max_depth} pullbacks")
        value = F_iterate(value, 1)
    return depth


def _pullback(kappa, s, t, depth, config):
    """
    The chain w_0 ... w_N together with d w_0 / d kappa. The derivative follows
    D_N = 0, D_(j-1) = (D_j - 1) / (w_j - kappa).
    """
    tolerance = config.rays.branch_tolerance
    try:
        top = F_iterate(t, depth)
    except PotentialOverflow as e:
        raise DepthOverflow(f"F^{depth}({t}) overflows at step {e.step}") from e
    w = top + TWO_PI_I * s.entry(depth + 1)
    chain = [w]
    derivative = 0j
    for j in range(depth, 0, -1):
        difference = w - kappa
        if abs(difference) < tolerance or (
            difference.real < 0 and abs(difference.imag) < tolerance
        ):
            raise BranchCollision(w, kappa)
        derivative = (derivative - 1) / difference
        w = cmath.log(difference) + TWO_PI_I * s.entry(j)
        chain.append(w)
    chain.reverse()
    return chain, derivative


def dynamic_ray_point(kappa, s, t, depth, config=None):
    """
    Pull F^N(t) + 2*pi*i*s_(N+1) back along the address with the principal logarithm,
    w_(j-1) = log(w_j - kappa) + 2*pi*i*s_j, and return w_0.
    """
    if t <= 0:
        raise ValueError("potentials are positive")
    return _pullback(complex(kappa), s, t, depth, config or get_config())[0][0]


def ray_orbit(kappa, s, t, depth, config=None):
    """The whole pulled back chain w_0 ... w_N, a piece of an orbit of E_kappa."""
    return _pullback(complex(kappa), s, t, depth, config or get_config())[0]


def orbit_defect(kappa, chain):
    """Largest relative defect |E(w_j) - w_(j+1)| / |w_(j+1) - kappa|, free of overflow."""
    return max(
        (
            abs(cmath.exp(w - cmath.log(following - kappa)) - 1)
            for w, following in zip(chain, chain[1:])
        ),
        default=0.0,
    )


def ray_point(s, t, seed, depth=None, config=None):
    """
    Solve kappa = w_0(kappa) at potential t. The fixed point step is preconditioned with the
    derivative of the pullback, kappa += lam * (G - kappa) / (1 - G'), and lam is reduced by
    the damping factor as long as the residual does not decrease.
    """
    config = config or get_config()
    rays = config.rays
    depth = ray_depth(t, config) if depth is None else depth
    kappa = complex(seed)
    chain, derivative = _pullback(kappa, s, t, depth, config)
    residual = abs(chain[0] - kappa)
    polished = False
    for _ in range(rays.max_iter):
        if residual < rays.residual_tolerance and polished:
            return RayPoint(t=t, kappa=kappa, residual=residual, depth=depth)
        polished = residual < rays.residual_tolerance
        step = (chain[0] - kappa) / (1 - derivative)
        lam = 1.0
        while True:
            candidate = kappa + lam * step
            try:
                candidate_chain, candidate_derivative = _pullback(candidate, s, t, depth, config)
                candidate_residual = abs(candidate_chain[0] - candidate)
            except BranchCollision:
                candidate_residual = math.inf
            if candidate_residual < residual or lam < rays.damping**10:
                break
            lam *= rays.damping
        if candidate_residual >= residual:
            if polished:
                # rounding level reached
                return RayPoint(t=t, kappa=kappa, residual=residual, depth=depth)
            raise ContinuationBreakdown(
                f"fixed point iteration for {s} at t={t} stalls at residual {residual:.3g}",
                last_good=kappa,
            )
        kappa, chain, derivative = candidate, candidate_chain, candidate_derivative
        residual = candidate_residual
    if residual < rays.residual_tolerance:
        return RayPoint(t=t, kappa=kappa, residual=residual, depth=depth)
    raise ContinuationBreakdown(
        f"fixed point iteration for {s} at t={t} did not converge in {rays.max_iter} steps",
        last_good=kappa,
    )


def trace_parameter_ray(s, t_max, t_min, grid_factor=None, config=None):
    """
    Follow the ray of s from t_max down to t_min on the grid t -> t / grid_factor, each solve
    seeded by linear extrapolation of the previous samples. On breakdown the ratio is refined
    to its square root.
    """
    config = config or get_config()
    rays = config.rays
    grid_factor = grid_factor or rays.grid_factor
    if not t_max > t_min > 0:
        raise ValueError("need t_max > t_min > 0")
    if grid_factor <= 1:
        raise ValueError("the grid factor must exceed 1")

    try:
        samples = [ray_point(s, t_max, t_max + TWO_PI_I * s.entry(1), config=config)]
    except BranchCollision as e:
        raise ContinuationBreakdown(f"cannot start the ray of {s} at t={t_max}") from e
    ratio = grid_factor
    refinements = 0
    while samples[-1].t > t_min:
        previous = samples[-1]
        t = max(previous.t / ratio, t_min)
        seed = previous.kappa
        if len(samples) > 1:
            before = samples[-2]
            seed += (previous.kappa - before.kappa) * (t - previous.t) / (previous.t - before.t)
        try:
            point = ray_point(s, t, seed, config=config)
            if abs(point.kappa - previous.kappa) > 10 * (previous.t - t):
                raise ContinuationBreakdown(
                    f"ray of {s} jumps from {previous.kappa} to {point.kappa} at t={t}",
                    last_good=previous.kappa,
                )
        except (ContinuationBreakdown, BranchCollision) as e:
            refinements += 1
            if refinements > rays.max_refinements:
                raise ContinuationBreakdown(
                    f"ray of {s} breaks down below t={previous.t}", last_good=previous.kappa
                ) from e
            ratio = math.sqrt(ratio)
            logger.debug("refining the grid of %s below t=%s: %s", s, previous.t, e)
            continue
        samples.append(point)
    logger.debug("traced %s with %s samples down to t=%s", s, len(samples), t_min)
    return ParameterRay(address=s, samples=tuple(samples))


def ray_at(s, t, config=None):
    """The ray point of s at potential t, reached by continuation from large potentials."""
    config = config or get_config()
    if t >= DIRECT_SEED_POTENTIAL:
        return ray_point(s, t, t + TWO_PI_I * s.entry(1), config=config)
    return trace_parameter_ray(s, 2 * DIRECT_SEED_POTENTIAL, t, config=config).samples[-1]


def ray_asymptotic_error(s, t, config=None):
    """|G_s(t) - t - 2*pi*i*s_1|."""
    return abs(ray_at(s, t, config).kappa - t - TWO_PI_I * s.entry(1))


def extrapolate_landing(ts, values):
    """
    Extrapolate samples to t = 0 with least squares polynomials of low degree. Returns the
    quadratic extrapolant and its distance to the linear one.
    """
    linear, quadratic = (extrapolate_to_zero(ts, values, degree) for degree in LANDING_DEGREES)
    return quadratic, abs(quadratic - linear)


def estimate_landing(ray, config=None):
    """
    Landing point of a ray traced down to LANDING_POTENTIAL. The fitted estimate of a periodic
    ray is polished by Newton's method onto the nearby parabolic parameter, the error bar is
    then that of Newton's method. Other estimates keep the spread of the fits as error bar.
    """
    from expmap.core.components import parabolic_parameter

    config = config or get_config()
    rays = config.rays
    samples = ray.samples[-rays.landing_samples :]
    if len(samples) < rays.landing_samples or samples[-1].t > LANDING_POTENTIAL:
        raise LandingNotConverged(
            f"the ray of {ray.address} stops at t={samples[-1].t}, too far from its landing point"
        )
    estimate, spread = extrapolate_landing(
        [point.t for point in samples], [point.kappa for point in samples]
    )
    if not cmath.isfinite(estimate):
        raise LandingNotConverged(f"the landing fit of {ray.address} is not finite")
    if ray.address.is_periodic:
        try:
            kappa, _ = parabolic_parameter(estimate, len(ray.address.period), config=config)
        except NoConvergence as e:
            logger.debug("cannot polish the landing point of %s: %s", ray.address, e)
        else:
            if abs(kappa - estimate) <= math.sqrt(rays.landing_tolerance) + 4 * spread:
                error = max(config.core.newton_tolerance, 8 * sys.float_info.epsilon)
                return Landing(kappa=kappa, error=error * (1 + abs(kappa)))
            logger.debug("parabolic parameter %s is too far from the fit %s", kappa, estimate)
    if spread > rays.landing_tolerance:
        raise LandingNotConverged(
            f"landing fits of {ray.address} spread by {spread:.3g} around {estimate}"
        )
    return Landing(kappa=estimate, error=spread)


def land(ray, config=None):
    """The ray with its landing estimate attached."""
    return replace(ray, landing=estimate_landing(ray, config))


def classify_landing(kappa, period, config=None):
    """The indifferent cycle of period at most 2*period at a landing parameter, or None."""
    config = config or get_config()
    return indifferent_cycle(
        kappa, 2 * period, tolerance=config.rays.landing_tolerance, config=config
    )


def vertical_order(addresses, t, config=None):
    """
    Indices of ``addresses`` sorted by Im G_s(t). Raises Unresolved if two imaginary parts
    cannot be told apart within the error bars of the ray points.
    """
    config = config or get_config()
    points = [ray_at(s, t, config) for s in addresses]
    order = sorted(range(len(addresses)), key=lambda i: points[i].kappa.imag)
    for i, j in zip(order, order[1:]):
        if points[j].kappa.imag - points[i].kappa.imag <= points[i].error + points[j].error:
            raise Unresolved(
                f"rays {addresses[i]} and {addresses[j]} are not separated at t={t}"
            )
    return order


def lexicographic_order(addresses):
    return sorted(range(len(addresses)), key=lambda i: lex_sort_key(addresses[i]))


def colanding(rays, config=None):
    """
    Group the addresses of rays whose landing estimates agree within their error bars,
    widened by the landing tolerance. Rays without a landing estimate stay alone.
    """
    tolerance = (config or get_config()).rays.landing_tolerance
    groups = DisjointSets(ray.address for ray in rays)
    landed = [ray for ray in rays if ray.landing is not None]
    for a, b in itertools.combinations(landed, 2):
        if abs(a.landing.kappa - b.landing.kappa) <= a.landing.error + b.landing.error + tolerance:
            groups.union(a.address, b.address)
    return groups.classes()


def ray_proximity(s, other, t, config=None):
    """Distance between the rays of two addresses at the same potential."""
    return abs(ray_at(s, t, config).kappa - ray_at(other, t, config).kappa)


def itinerary_depth(t, length):
    """Largest N < length for which F^N(t) is still a finite double."""
    depth = 0
    while depth + 1 < length:
        try:
            F_iterate(t, depth + 1)
        except PotentialOverflow:
            break
        depth += 1
    return depth


def ray_itinerary(point, s, length=5, config=None):
    """
    Strip indices of the orbit through the ray point, read off the pulled back chain: forward
    iteration loses the itinerary once real parts reach a few dozen. Returns the itinerary
    and the chain, the caller checks that the chain starts at kappa.
    """
    config = config or get_config()
    depth = max(point.depth, itinerary_depth(point.t, length))
    chain = ray_orbit(point.kappa, s, point.t, depth, config)
    itinerary = address_of_escape(chain[:length], config.symbolic.strip_tolerance)
    return itinerary, chain
