"""
Desk checks of the statements the explorer is built to illustrate. Each check returns a
CheckResult; ``run_checks`` collects them into the report written by the verify command.
"""
import cmath
import itertools
import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Dict, List

import numpy as np

from expmap.core.census import bifurcation_child, chain_connectivity, find_components
from expmap.core.components import (
    DivergedToInfinity,
    boundary_trace,
    internal_ray,
    internal_ray_landing,
    period_one_component,
    period_one_membership,
    period_one_parameter,
    phi_inverse,
)
from expmap.core.config import get_config
from expmap.core.dynamics import Attracting, Escaping, NumericalFailure, classify_singular_orbit
from expmap.core.rays import (
    LANDING_POTENTIAL,
    TWO_PI_I,
    classify_landing,
    colanding,
    land,
    lexicographic_order,
    orbit_defect,
    ray_asymptotic_error,
    ray_itinerary,
    trace_parameter_ray,
    vertical_order,
)
from expmap.core.rendering import RenderSpec, classify_grid, encode_ppm, render
from expmap.core.symbolic import (
    Boundary,
    ExternalAddress,
    KneadingSequence,
    Order,
    Plain,
    kneading_sequence,
    lex_compare_bruteforce,
    periodic_addresses,
    shift,
)

logger = logging.getLogger(__name__)

ORACLE_TOLERANCE = 1e-9
LANDING_MULTIPLIER_TOLERANCE = 1e-6
INTERNAL_HEIGHTS = (0.0, 0.25, 0.5, 0.37)


@dataclass
class CheckResult:
    name: str
    passed: bool
    details: Dict = field(default_factory=dict)


@dataclass(frozen=True)
class Check:
    name: str
    description: str
    function: Callable


CHECKS: List[Check] = []


def check(name, description):
    def decorator(function):
        CHECKS.append(Check(name=name, description=description, function=function))
        return function

    return decorator


def sample_addresses(count=20):
    """Addresses with entries in [-2, 2] and pairwise distinct first two entries."""
    pairs = itertools.islice(itertools.product(range(-2, 3), repeat=2), count)
    return [
        ExternalAddress((), pair) if i % 2 == 0 else ExternalAddress(pair, (0,))
        for i, pair in enumerate(pairs)
    ]


def bruteforce_kneading(s):
    """K(s) from the interval definition, with explicit prefix comparisons only."""
    symbols = []
    u = s
    for _ in range(len(s.preperiod) + len(s.period)):
        first = u.entry(1)
        for k in (first - 1, first):
            lower = lex_compare_bruteforce(u, s.prepend(k))
            if lower == Order.EQUAL:
                symbols.append(Boundary(k))
                break
            upper = lex_compare_bruteforce(u, s.prepend(k + 1))
            if lower == Order.GREATER and upper == Order.LESS:
                symbols.append(Plain(k))
                break
        else:
            raise AssertionError(f"no kneading symbol for position {len(symbols) + 1} of {s}")
        u = shift(u)
    return KneadingSequence(tuple(symbols[: len(s.preperiod)]), tuple(symbols[len(s.preperiod) :]))


@check("period-one-oracle", "phi_inverse, internal rays, boundary and landing of period one")
def period_one_oracle(quick, config):
    component = period_one_component(0, config)
    rng = np.random.default_rng(0)
    count = 20 if quick else 200
    ws = -rng.uniform(0.02, 4.0, count) + 1j * rng.uniform(-3.0, 3.0, count)
    errors = [
        abs(phi_inverse(component, complex(w), config) - period_one_parameter(complex(w)))
        for w in ws
    ]
    ray = internal_ray(component, 0.25, -5.0, -config.components.parabolic_cutoff, config)
    errors += [
        abs(sample.kappa - period_one_parameter(complex(sample.t, math.pi / 2)))
        for sample in ray.samples
    ]
    boundary = boundary_trace(component, np.linspace(-math.pi, math.pi, 50).tolist(), config)
    errors += [
        abs(sample.kappa - period_one_parameter(1j * sample.theta)) for sample in boundary.samples
    ]
    errors += [
        abs(internal_ray_landing(component, h, config) - period_one_parameter(TWO_PI_I * h))
        for h in INTERNAL_HEIGHTS
    ]
    worst = max(errors)
    return CheckResult(
        "period-one-oracle",
        worst <= ORACLE_TOLERANCE and len(boundary.samples) == 50,
        {"samples": len(errors), "max_error": worst},
    )


@check("internal-ray-landing", "internal rays of periods 1, 2 and 3 land at indifferent points")
def internal_ray_landing_check(quick, config):
    parent = period_one_component(0, config)
    components = [parent, bifurcation_child(parent, 1, 2, config)]
    if not quick:
        components += [period_one_component(1, config), bifurcation_child(parent, 1, 3, config)]
    heights = (0.0, 0.37) if quick else INTERNAL_HEIGHTS
    landings, diverged = [], 0
    for component, height in itertools.product(components, heights):
        try:
            kappa = internal_ray_landing(component, height, config)
        except DivergedToInfinity:
            diverged += 1
            continue
        landings.append({"period": component.period, "height": height, "landing": kappa})
    return CheckResult(
        "internal-ray-landing",
        diverged == 0 and len(landings) == len(components) * len(heights),
        {"landings": landings, "diverged": diverged},
    )


@check("ray-asymptotics", "|G_s(t) - t - 2*pi*i*s_1| <= 10 (1 + t) exp(-t) for 5 <= t <= 20")
def ray_asymptotics(quick, config):
    potentials = (5.0, 20.0) if quick else (5.0, 7.5, 10.0, 12.5, 15.0, 20.0)
    worst = 0.0
    for s, t in itertools.product(sample_addresses(), potentials):
        ratio = ray_asymptotic_error(s, t, config) / (10 * (1 + t) * math.exp(-t))
        worst = max(worst, ratio)
    return CheckResult("ray-asymptotics", worst <= 1, {"max_ratio_to_bound": worst})


@check("vertical-order", "the vertical order of rays at t = 20 is the lexicographic order")
def vertical_order_check(quick, config):
    addresses = sample_addresses()
    vertical = vertical_order(addresses, 20.0, config)
    lexicographic = lexicographic_order(addresses)
    return CheckResult(
        "vertical-order",
        vertical == lexicographic,
        {"vertical": [addresses[i] for i in vertical]},
    )


@check("ray-landing", "the rays of [;0] and [;0,1] land at distinct parabolic parameters")
def ray_landing(quick, config):
    real_address, s = ExternalAddress((), (0,)), ExternalAddress((), (0, 1))
    real, ray = (
        land(trace_parameter_ray(address, 20.0, LANDING_POTENTIAL, config=config), config)
        for address in (real_address, s)
    )
    cycle = classify_landing(ray.landing.kappa, len(s.period), config)
    classes = colanding([real, ray], config)
    details = {
        "real_landing": real.landing.kappa,
        "landing": ray.landing.kappa,
        "colanding": classes,
        "cycle": None,
    }
    passed = abs(real.landing.kappa + 1) <= 1e-4 and cycle is not None and len(classes) == 2
    if cycle is not None:
        angle = cmath.phase(cycle.multiplier) / (2 * math.pi) % 1
        rational = min(abs(angle - a) for a in (0.0, 0.5, 1.0))
        details["cycle"] = {"period": cycle.period, "multiplier": cycle.multiplier}
        passed = (
            passed
            and cycle.period <= 2
            and abs(abs(cycle.multiplier) - 1) <= 1e-3
            and rational * 2 * math.pi <= 1e-2
        )
    return CheckResult("ray-landing", passed, details)


@check("kneading", "kneading sequences against the interval definition")
def kneading_check(quick, config):
    expected = {
        ExternalAddress((), (0,)): KneadingSequence((), (Boundary(0),)),
        ExternalAddress((), (0, 1)): KneadingSequence((), (Plain(0), Boundary(1))),
        ExternalAddress((1,), (0,)): KneadingSequence((Plain(0),), (Plain(-1),)),
        ExternalAddress((), (2, 0)): KneadingSequence((), (Plain(1), Boundary(0))),
    }
    mismatches = [
        s
        for s, kneading in expected.items()
        if kneading_sequence(s) != kneading or bruteforce_kneading(s) != kneading
    ]
    entries = range(-2, 3)
    addresses = list(periodic_addresses(entries, 3))
    addresses += [s.prepend(k) for s in addresses for k in entries]
    for s in addresses:
        kneading = kneading_sequence(s)
        if kneading.has_boundary_symbol != s.is_periodic or kneading != bruteforce_kneading(s):
            mismatches.append(s)
    return CheckResult(
        "kneading", not mismatches, {"addresses": len(addresses), "mismatches": mismatches}
    )


@check("ray-dynamics", "ray points with t >= 1 escape along their address")
def ray_dynamics(quick, config):
    addresses = sample_addresses()[: 3 if quick else 8]
    samples, failures = 0, []
    for s in addresses:
        for point in trace_parameter_ray(s, 20.0, 1.0, config=config).samples:
            samples += 1
            classification = classify_singular_orbit(point.kappa, config=config)
            itinerary, chain = ray_itinerary(point, s, config=config)
            consistent = (
                isinstance(classification, Escaping)
                and list(classification.address_prefix)
                == s.prefix(len(classification.address_prefix))
                and itinerary == s.prefix(len(itinerary))
                and abs(chain[0] - point.kappa) <= 1e-6 * (1 + abs(point.kappa))
                and orbit_defect(point.kappa, chain) <= 1e-6
            )
            if not consistent:
                failures.append({"address": s, "t": point.t, "kappa": point.kappa})
    return CheckResult("ray-dynamics", not failures, {"samples": samples, "failures": failures})


@check("census", "period three components in [0, 8] x (-pi, pi) and their bifurcation classes")
def census(quick, config):
    window = (0.0, 8.0, -math.pi, math.pi)
    components = find_components(3, window, 0.1 if quick else 0.05, config)
    classes = chain_connectivity(components, 2 if quick else 4, config)
    return CheckResult(
        "census",
        len(components) >= 5 and len(classes) > 1,
        {"components": len(components), "classes": [len(group) for group in classes]},
    )


@check("render", "deterministic rendering that agrees with the period one membership test")
def render_check(quick, config):
    spec = RenderSpec(window=(-2.5, -1.5, -0.2, 0.2), width=40, height=16, period_cap=4)
    images = [encode_ppm(render(spec, config, workers)) for workers in (1, 1, 2)]
    grid = classify_grid(spec, config)
    agreeing = sum(
        (isinstance(classification, Attracting) and classification.period == 1)
        == period_one_membership(spec.parameter(row, column))
        for row, line in enumerate(grid)
        for column, classification in enumerate(line)
    )
    agreement = agreeing / (spec.width * spec.height)
    return CheckResult(
        "render",
        len(set(images)) == 1 and agreement >= 0.99,
        {"identical": len(set(images)) == 1, "agreement": agreement},
    )


def run_checks(quick=False, config=None, names=None):
    config = config or get_config()
    results = []
    for entry in CHECKS:
        if names is not None and entry.name not in names:
            continue
        logger.info("running %s", entry.name)
        try:
            result = entry.function(quick, config)
        except NumericalFailure as e:
            logger.warning("%s failed numerically: %s", entry.name, e)
            result = CheckResult(entry.name, False, {"error": f"{type(e).__name__}: {e}"})
        results.append(result)
    return {
        "passed": all(result.passed for result in results),
        "quick": quick,
        "checks": [
            {"name": result.name, "passed": result.passed, "details": result.details}
            for result in results
        ],
    }
