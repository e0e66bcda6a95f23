import cmath
import logging
import math
from dataclasses import replace

from expmap.core.components import (
    SingularJacobian,
    component_from_seed,
    continue_log_multiplier,
    cycle,
    log_multiplier,
    solve_log_multiplier,
)
from expmap.core.config import get_config
from expmap.core.dynamics import (
    Attracting,
    DegenerateDerivative,
    NoConvergence,
    NumericalFailure,
    find_periodic_orbit,
)
from expmap.core.rays import TWO_PI_I, Unresolved, ray_at
from expmap.core.rendering import RenderSpec, classify_grid
from expmap.core.symbolic import (
    AmbiguousStrip,
    ExternalAddress,
    IntermediateAddress,
    half_integer_index,
    strip_index,
)
from expmap.extra.utils import DisjointSets

logger = logging.getLogger(__name__)

# real part of Phi_W at the seed of a freshly found bifurcation child
CHILD_SEED_DEPTH = -1.0
# the tail of a component is reached once the cycle point before the singular value is this far left
TAIL_DEPTH = -5.0
TAIL_SEARCH_LIMIT = -100.0


def find_components(period, window, grid_step, config=None, workers=None):
    """
    Scan the window for parameters with an attracting cycle of the period. Hits adjacent on the
    grid are grouped, each group contributes its deepest point as seed, and groups that
    continuation shows to be one component are merged.
    """
    config = config or get_config()
    if grid_step <= 0:
        raise ValueError("the grid step must be positive")
    re_min, re_max, im_min, im_max = window
    spec = RenderSpec(
        window=window,
        width=max(1, math.ceil((re_max - re_min) / grid_step)),
        height=max(1, math.ceil((im_max - im_min) / grid_step)),
        max_iter=config.components.scan_max_iter,
        escape_radius=config.core.escape_radius,
        period_cap=period,
    )
    grid = classify_grid(spec, config, workers)
    hits = {
        (row, column): classification
        for row, line in enumerate(grid)
        for column, classification in enumerate(line)
        if isinstance(classification, Attracting) and classification.period == period
    }
    groups = DisjointSets(hits)
    for row, column in hits:
        for neighbour in ((row + 1, column), (row, column + 1)):
            if neighbour in hits:
                groups.union((row, column), neighbour)

    components = []
    for group in groups.classes():
        deepest = min(group, key=lambda pixel: abs(hits[pixel].multiplier))
        kappa = spec.parameter(*deepest)
        try:
            component = component_from_seed(period, kappa, hits[deepest].orbit_point, config)
        except NumericalFailure as e:
            logger.warning("dropping the seed %s: %s", kappa, e)
            continue
        if any(
            _comparable(known, component, config) and same_component(known, component, config)
            for known in components
        ):
            continue
        components.append(component)
    logger.info(
        "found %s components of period %s in %s from %s grid hits",
        len(components),
        period,
        window,
        len(hits),
    )
    return components


def _comparable(first, second, config):
    """Seeds of one period close enough for the census to test them with same_component."""
    return (
        first.period == second.period
        and abs(first.seed_kappa - second.seed_kappa) <= config.components.identity_radius
    )


def same_component(first, second, config=None):
    """
    Whether continuation inside ``first`` from its seed to the Phi-value of the seed of
    ``second`` ends at that seed, within the configured number of steps.
    """
    config = config or get_config()
    settings = config.components
    if first.period != second.period:
        return False
    target = log_multiplier(first, second.seed_kappa, second.seed_point, config)
    if abs(target - first.seed_log_multiplier) > settings.identity_steps * settings.step:
        return False
    try:
        kappa, _, _ = continue_log_multiplier(
            first, target, max_steps=settings.identity_steps, config=config
        )
    except NumericalFailure as e:
        logger.debug("no continuation from %s to %s: %s", first, second, e)
        return False
    return abs(kappa - second.seed_kappa) <= settings.dedup_tolerance * (1 + abs(kappa))


def _boundary_point(component, angle, config):
    """The parameter where the multiplier of the cycle is exp(2*pi*i*angle)."""
    inside = complex(-config.components.parabolic_cutoff, 2 * math.pi * angle)
    kappa, z, _ = continue_log_multiplier(component, inside, config=config)
    return solve_log_multiplier(
        component.period, TWO_PI_I * (angle + component.branch_tag), (kappa, z), config
    )


def bifurcation_child(component, p, q, config=None):
    """
    The component of period q*n attached to W where its multiplier is exp(2*pi*i*p/q).
    Just outside W the parent cycle is repelling and the child cycle surrounds each parent
    point at distance about (q*delta)^(1/q); Newton's method is started on such circles and
    the child found is moved to a deeper seed.
    """
    config = config or get_config()
    if q < 2 or not 0 < p < q or math.gcd(p, q) != 1:
        raise ValueError(f"{p}/{q} is not a reduced fraction in (0, 1) with q >= 2")
    n, child_period = component.period, q * component.period
    root, root_point = _boundary_point(component, p / q, config)
    logger.debug("%s/%s bifurcation point of %s at %s", p, q, component, root)

    for delta in (0.1 / q**2, 0.02 / q**2, 0.4 / q**2):
        try:
            kappa, parent_point = solve_log_multiplier(
                n, delta + TWO_PI_I * (p / q + component.branch_tag), (root, root_point), config
            )
        except (NoConvergence, SingularJacobian):
            continue
        parent_multiplier = cmath.exp(sum(cycle(kappa, parent_point, n, config)))
        if not abs(parent_multiplier) > 1:
            continue
        for scale in (1.0, 0.3, 3.0):
            radius = scale * (q * delta) ** (1 / q)
            for j in range(2 * q):
                seed = parent_point + radius * cmath.exp(TWO_PI_I * (j + 0.5) / (2 * q))
                try:
                    orbit = find_periodic_orbit(kappa, child_period, seed, config)
                except (NoConvergence, DegenerateDerivative):
                    continue
                if not (
                    abs(orbit.multiplier) < 1
                    and orbit.is_primitive(config.components.dedup_tolerance)
                ):
                    continue
                child = component_from_seed(child_period, kappa, orbit.points[0], config)
                return _deepen(child, root, config)
    raise NoConvergence(f"no {p}/{q} bifurcation child of {component} near {root}")


def _deepen(child, root, config):
    target = complex(CHILD_SEED_DEPTH, child.seed_log_multiplier.imag)
    try:
        kappa, z, _ = continue_log_multiplier(child, target, config=config)
    except NumericalFailure as e:
        logger.debug("keeping the shallow seed of %s: %s", child, e)
        return replace(child, root=root)
    return component_from_seed(child.period, kappa, z, config, root=root)


def bifurcation_children(component, max_depth, config=None):
    """The children p/q with q <= max_depth that are found, a missing child is only logged."""
    config = config or get_config()
    children = []
    for q in range(2, max_depth + 1):
        for p in range(1, q):
            if math.gcd(p, q) != 1:
                continue
            try:
                children.append(bifurcation_child(component, p, q, config))
            except NumericalFailure as e:
                logger.warning("missing the %s/%s child of %s: %s", p, q, component, e)
    return children


def chain_connectivity(components, max_depth, config=None):
    """
    Classes of components joined by chains of bifurcations p/q with q <= max_depth. Children
    act as connecting nodes; a child that cannot be found only removes its edge.
    """
    config = config or get_config()
    nodes = list(components)
    classes = DisjointSets(range(len(nodes)))
    for index, component in enumerate(components):
        for child in bifurcation_children(component, max_depth, config):
            match = next(
                (
                    i
                    for i, node in enumerate(nodes)
                    if _comparable(node, child, config) and same_component(node, child, config)
                ),
                None,
            )
            if match is None:
                nodes.append(child)
                match = len(nodes) - 1
            classes.union(index, match)
    partition = [
        [components[i] for i in group if i < len(components)] for group in classes.classes()
    ]
    partition = [group for group in partition if group]
    logger.info(
        "%s components fall into %s bifurcation classes (q <= %s)",
        len(components),
        len(partition),
        max_depth,
    )
    return partition


def _read_tail(component, kappa, z, config):
    """
    The intermediate address read from the cycle, or None while the cycle point preceding
    the singular value is not yet far enough to the left.
    """
    n = component.period
    points = cycle(kappa, z, n, config)
    last = min(range(n), key=lambda j: points[j].real)
    if points[last].real > TAIL_DEPTH:
        return None
    # z_0 is the image of the leftmost point and lies next to kappa
    ordered = points[last + 1 :] + points[: last + 1]
    try:
        tolerance = config.symbolic.strip_tolerance
        entries = [strip_index(point, tolerance) for point in ordered[: n - 2]]
    except AmbiguousStrip:
        return None
    final = half_integer_index(ordered[n - 2])
    if abs(ordered[n - 2].imag / (2 * math.pi) - float(final)) > 0.25:
        return None
    return IntermediateAddress(tuple(entries) + (final,))


def _bracketed(address, kappa, config):
    """Whether kappa lies between the rays of s_1 ... s_(n-2) k and s_1 ... s_(n-2) (k+1)."""
    prefix = tuple(int(entry) for entry in address.entries[:-1])
    k = math.floor(address.entries[-1])
    lower = ExternalAddress(prefix, (k,))
    upper = ExternalAddress(prefix, (k + 1,))
    t = max(kappa.real, 1.0)
    low, high = ray_at(lower, t, config), ray_at(upper, t, config)
    if high.kappa.imag - low.kappa.imag <= low.error + high.error:
        raise Unresolved(f"the rays of {lower} and {upper} coincide numerically at t={t}")
    return low.kappa.imag < kappa.imag < high.kappa.imag


def assign_intermediate_address(component, config=None):
    """
    Follow the internal ray of height 0 towards t -> -infinity into the tail of the component
    and read the intermediate address off the attracting cycle there. The reading is confirmed
    by the two parameter rays that should enclose the tail; ``intermediate_confirmed`` is None
    when they cannot be told apart in double precision.
    """
    config = config or get_config()
    if component.period < 2:
        raise ValueError("intermediate addresses label components of period at least two")
    start = None
    t = -1.0
    while t >= TAIL_SEARCH_LIMIT:
        kappa, z, _ = continue_log_multiplier(component, complex(t, 0), start=start, config=config)
        start = (complex(t, 0), kappa, z)
        address = _read_tail(component, kappa, z, config)
        if address is not None:
            break
        t -= 1.0
    else:
        raise NoConvergence(f"the tail of {component} is not reached before t={TAIL_SEARCH_LIMIT}")
    try:
        confirmed = _bracketed(address, kappa, config)
    except (Unresolved, NumericalFailure) as e:
        logger.debug("cannot confirm %s for %s: %s", address, component, e)
        confirmed = None
    logger.info("%s has intermediate address %s (confirmed: %s)", component, address, confirmed)
    return replace(component, intermediate_address=address, intermediate_confirmed=confirmed)

