import dataclasses
import math

import pytest

from expmap.core.dynamics import Escaping, classify_singular_orbit
from expmap.core.rays import (
    TWO_PI_I,
    BranchCollision,
    DepthOverflow,
    Landing,
    LandingNotConverged,
    ParameterRay,
    RayPoint,
    classify_landing,
    colanding,
    dynamic_ray_point,
    estimate_landing,
    land,
    lexicographic_order,
    orbit_defect,
    ray_asymptotic_error,
    ray_at,
    ray_depth,
    ray_itinerary,
    ray_orbit,
    ray_point,
    ray_proximity,
    trace_parameter_ray,
    vertical_order,
)
from expmap.core.symbolic import ExternalAddress

periodic = ExternalAddress.periodic


def test_ray_depth():
    assert ray_depth(20) == 1
    assert ray_depth(1) == 3
    with pytest.raises(ValueError):
        ray_depth(0)


def test_ray_depth_cap(config):
    with pytest.raises(DepthOverflow):
        ray_depth(0.05, config.override("rays", max_depth=2))


def test_dynamic_ray_point_without_pullback():
    assert dynamic_ray_point(0.3 + 2j, periodic(2, 0), 7.5, 0) == 7.5 + 2 * TWO_PI_I


def test_dynamic_ray_point_is_real_for_real_data(zero):
    assert dynamic_ray_point(0.5, zero, 2.0, 3).imag == 0


def test_dynamic_ray_point_on_real_ray(zero):
    point = ray_at(zero, 3.0)
    # the ray point is its own pullback
    assert dynamic_ray_point(point.kappa, zero, 3.0, point.depth) == pytest.approx(
        point.kappa, abs=1e-9
    )


def test_branch_collision(zero):
    with pytest.raises(BranchCollision):
        dynamic_ray_point(30, zero, 1.0, 3)


def test_ray_point_asymptotics(zero):
    assert abs(ray_at(zero, 20).kappa - 20) < 1e-6
    one = ExternalAddress((1,), (0,))
    assert abs(ray_at(one, 20).kappa.imag - 2 * math.pi) < 1e-6


def test_ray_point_residual(zero_one):
    point = ray_point(zero_one, 6.0, 6.0 + 0j)
    assert isinstance(point, RayPoint)
    assert point.residual < 1e-9
    assert point.error >= point.residual
    assert abs(dynamic_ray_point(point.kappa, zero_one, 6.0, point.depth) - point.kappa) < 1e-9


def test_ray_orbit_is_a_piece_of_an_orbit(zero_one):
    point = ray_point(zero_one, 6.0, 6.0 + 0j)
    chain = ray_orbit(point.kappa, zero_one, point.t, point.depth)
    assert len(chain) == point.depth + 1
    assert abs(chain[0] - point.kappa) < 1e-9
    assert orbit_defect(point.kappa, chain) < 1e-9


def test_asymptotic_error_decreases(zero):
    at_five, at_twenty = ray_asymptotic_error(zero, 5), ray_asymptotic_error(zero, 20)
    assert at_twenty < 1e-6
    assert at_five > at_twenty
    for t in (5, 8, 12, 20):
        assert ray_asymptotic_error(zero, t) <= 10 * (1 + t) * math.exp(-t)


def test_real_ray_lands_at_minus_one(zero):
    ray = trace_parameter_ray(zero, 20, 0.05)
    assert ray.samples[0].t == 20
    assert ray.samples[-1].t == 0.05
    assert all(point.kappa.imag == 0 for point in ray.samples)
    kappas = [point.kappa.real for point in ray.samples]
    assert all(a > b for a, b in zip(kappas, kappas[1:]))
    assert all(b.t < a.t for a, b in zip(ray.samples, ray.samples[1:]))
    landing = estimate_landing(ray)
    assert landing.kappa == pytest.approx(-1, abs=1e-9)
    assert landing.error <= 1e-9
    assert land(ray).landing == landing


def test_truncated_ray_does_not_land(zero):
    with pytest.raises(LandingNotConverged):
        estimate_landing(trace_parameter_ray(zero, 20, 1))


def test_trace_validates_range(zero):
    with pytest.raises(ValueError):
        trace_parameter_ray(zero, 1, 2)
    with pytest.raises(ValueError):
        trace_parameter_ray(zero, 20, 1, grid_factor=1)


def test_injectivity_proxy(zero_one):
    ray = trace_parameter_ray(zero_one, 20, 5)
    reals = [point.kappa.real for point in ray.samples]
    assert all(a > b for a, b in zip(reals, reals[1:]))


@pytest.mark.slow
def test_periodic_ray_lands_at_parabolic_parameter(zero, zero_one):
    ray = land(trace_parameter_ray(zero_one, 20, 0.05))
    assert ray.landing.kappa == pytest.approx(1 + math.pi * 1j, abs=1e-6)
    cycle = classify_landing(ray.landing.kappa, 2)
    assert cycle is not None
    assert cycle.period == 1
    assert cycle.multiplier == pytest.approx(-1, abs=1e-3)
    real = land(trace_parameter_ray(zero, 20, 0.05))
    assert colanding([real, ray]) == [[zero], [zero_one]]


def test_classify_landing_real():
    cycle = classify_landing(-1, 1)
    assert cycle.period == 1
    assert cycle.multiplier == pytest.approx(1, abs=1e-3)


def test_vertical_order():
    assert vertical_order([periodic(1), periodic(0), periodic(-1)], 20) == [2, 1, 0]
    assert vertical_order([periodic(0, 1), periodic(0, 2)], 20) == [0, 1]
    assert vertical_order([periodic(3)], 20) == [0]


def test_vertical_order_is_lexicographic():
    addresses = [
        periodic(1, -1),
        ExternalAddress((0, 2), (1,)),
        periodic(-2, 0),
        periodic(0, -1),
        ExternalAddress((2,), (0,)),
        periodic(-1, 2),
    ]
    assert vertical_order(addresses, 20) == lexicographic_order(addresses)


def test_rays_are_disjoint(zero, zero_one):
    t = 4.0
    a, b = ray_at(zero, t), ray_at(zero_one, t)
    assert abs(a.kappa - b.kappa) > a.error + b.error


def test_ray_proximity():
    s = ExternalAddress((0, 1, 0, 1, 0, 1), (2,))
    near = ray_proximity(s, periodic(0, 1), 3.0)
    assert near < ray_proximity(periodic(0, 2), periodic(0, 1), 3.0)


def test_itinerary_from_pullback(zero_one):
    for t in (1.0, 2.0, 8.0):
        point = ray_at(zero_one, t)
        itinerary, chain = ray_itinerary(point, zero_one)
        assert len(itinerary) >= 2
        assert itinerary == zero_one.prefix(len(itinerary))
        assert chain[0] == pytest.approx(point.kappa, abs=1e-8)
        assert orbit_defect(point.kappa, chain) < 1e-9
        assert isinstance(classify_singular_orbit(point.kappa), Escaping)


def test_itinerary_depth_five_at_small_potential(zero_one):
    itinerary, _ = ray_itinerary(ray_at(zero_one, 1.0), zero_one)
    assert itinerary == [0, 1, 0, 1, 0]


def test_colanding(zero):
    def landed(address, kappa, error=1e-5):
        ray = ParameterRay(address=address, samples=(RayPoint(1.0, kappa, 0.0, 3),))
        return dataclasses.replace(ray, landing=Landing(kappa=kappa, error=error))

    rays = [
        landed(periodic(0, 1), 1 + math.pi * 1j),
        landed(periodic(1, 0), 1 + math.pi * 1j + 1e-5),
        landed(zero, -1 + 0j),
        ParameterRay(address=periodic(2), samples=(RayPoint(1.0, 1 + 12j, 0.0, 3),)),
    ]
    assert colanding(rays) == [[periodic(0, 1), periodic(1, 0)], [zero], [periodic(2)]]
