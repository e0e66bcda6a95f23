import cmath
import math

import numpy as np
import pytest

from expmap.core.components import (
    DivergedToInfinity,
    HyperbolicComponent,
    boundary_trace,
    component_from_seed,
    continue_log_multiplier,
    internal_ray,
    internal_ray_grid,
    internal_ray_landing,
    log_multiplier,
    parabolic_parameter,
    period_one_component,
    period_one_membership,
    period_one_parameter,
    phi_inverse,
    sector_index,
    solve_for_multiplier,
)
from expmap.core.dynamics import NoConvergence
from expmap.core.rays import TWO_PI_I, LandingNotConverged

ORACLE_TOLERANCE = 1e-9


def test_period_one_component(period_one):
    assert period_one.period == 1
    assert period_one.branch_tag == 0
    assert period_one.seed_kappa == pytest.approx(-1 - math.exp(-1))
    assert period_one.seed_log_multiplier == pytest.approx(-1)
    assert sector_index(period_one, period_one.seed_kappa, period_one.seed_point) == 0


def test_period_one_component_on_another_branch():
    component = period_one_component(2)
    assert component.seed_kappa == pytest.approx(period_one_parameter(-1, 2))
    assert component.seed_log_multiplier == pytest.approx(-1)


def test_component_needs_attracting_seed():
    with pytest.raises(ValueError):
        HyperbolicComponent(
            period=1, seed_kappa=0j, seed_point=0j, seed_multiplier=1.5 + 0j, branch_tag=0
        )
    with pytest.raises(ValueError):
        HyperbolicComponent(
            period=0, seed_kappa=0j, seed_point=0j, seed_multiplier=0.5 + 0j, branch_tag=0
        )


def test_component_from_repelling_seed():
    # the fixed point of exp near 0.318 + 1.337i is repelling
    with pytest.raises(NoConvergence):
        component_from_seed(1, 0, 0.3 + 1.3j)


def test_phi_inverse_matches_closed_form(period_one):
    rng = np.random.default_rng(0)
    ws = -rng.uniform(0.02, 4.0, 25) + 1j * rng.uniform(-3.0, 3.0, 25)
    for w in ws:
        w = complex(w)
        assert abs(phi_inverse(period_one, w) - period_one_parameter(w)) <= ORACLE_TOLERANCE


def test_phi_inverse_is_a_right_inverse(period_one, config):
    w = -0.7 + 1.1j
    kappa, z, steps = continue_log_multiplier(period_one, w, config=config)
    assert steps > 0
    assert log_multiplier(period_one, kappa, z) == pytest.approx(w, abs=1e-10)


def test_phi_inverse_domain(period_one):
    with pytest.raises(ValueError):
        phi_inverse(period_one, 0.5 + 0j)


def test_internal_ray_grid():
    times = internal_ray_grid(-1.0, -1e-4, 0.05, 1.1)
    assert times[0] == -1.0
    assert times[-1] == -1e-4
    assert all(a < b for a, b in zip(times, times[1:]))
    assert all(b - a <= 0.05 + 1e-15 for a, b in zip(times, times[1:]))


def test_internal_ray_matches_closed_form(period_one):
    ray = internal_ray(period_one, 0.25, -5.0, -1e-4)
    assert ray.samples[0].t == -5.0
    assert ray.samples[-1].t == -1e-4
    for sample in ray.samples:
        w = complex(sample.t, math.pi / 2)
        assert abs(sample.kappa - period_one_parameter(w)) <= ORACLE_TOLERANCE
        assert abs(sample.multiplier - cmath.exp(w)) <= ORACLE_TOLERANCE


def test_internal_ray_validates_range(period_one):
    with pytest.raises(ValueError):
        internal_ray(period_one, 0, -1.0, 0.5)
    with pytest.raises(ValueError):
        internal_ray(period_one, 0, -1.0, -2.0)


@pytest.mark.parametrize("height", [0.0, 0.25, 0.5, 0.37])
def test_period_one_landing(period_one, height):
    landing = internal_ray_landing(period_one, height)
    assert abs(landing - period_one_parameter(TWO_PI_I * height)) <= ORACLE_TOLERANCE


def test_real_internal_ray_lands_at_minus_one(period_one):
    assert internal_ray_landing(period_one, 0) == pytest.approx(-1, abs=ORACLE_TOLERANCE)


@pytest.mark.slow
def test_period_two_root(period_two):
    assert period_two.period == 2
    assert period_two.root == pytest.approx(1 + math.pi * 1j, abs=1e-9)
    # the internal ray of height 0 lands at the root of the child
    assert internal_ray_landing(period_two, 0.0) == pytest.approx(
        period_two.root, abs=ORACLE_TOLERANCE
    )


def test_boundary_matches_closed_form(period_one):
    thetas = np.linspace(-math.pi, math.pi, 50).tolist()
    boundary = boundary_trace(period_one, thetas)
    assert len(boundary.samples) == 50
    for sample in boundary.samples:
        assert abs(sample.kappa - period_one_parameter(1j * sample.theta)) <= ORACLE_TOLERANCE
        assert abs(sample.multiplier) == pytest.approx(1, abs=1e-9)
    assert boundary.polyline[0] == boundary.samples[0].kappa


@pytest.mark.parametrize("height", [0.25, 0.5, 0.37])
def test_period_two_landing(period_two, height):
    # the multiplier at the landing point is checked by internal_ray_landing itself
    landing = internal_ray_landing(period_two, height)
    assert abs(landing - period_two.root) > 1e-2


def test_satellite_root_is_polished_on_the_parent_cycle(period_three):
    w = 2j * math.pi / 3
    assert period_three.root == pytest.approx(w - cmath.exp(w), abs=ORACLE_TOLERANCE)
    landing = internal_ray_landing(period_three, 0.0)
    assert landing == pytest.approx(period_three.root, abs=ORACLE_TOLERANCE)


def test_parabolic_parameter_of_period_one():
    root, parabolic = parabolic_parameter(-0.999, 1)
    assert root == pytest.approx(-1, abs=ORACLE_TOLERANCE)
    assert parabolic.period == 1
    assert parabolic.multiplier == pytest.approx(1, abs=ORACLE_TOLERANCE)


def test_parabolic_parameter_on_a_divisor_period():
    root, parabolic = parabolic_parameter(1.001 + math.pi * 1j, 2, seed=math.pi * 1j)
    assert root == pytest.approx(1 + math.pi * 1j, abs=ORACLE_TOLERANCE)
    assert parabolic.period == 1
    assert parabolic.multiplier == pytest.approx(-1, abs=ORACLE_TOLERANCE)


def test_no_parabolic_parameter_deep_inside():
    with pytest.raises(LandingNotConverged):
        parabolic_parameter(-3, 1)


def test_boundary_samples_are_distinct(period_one):
    thetas = np.linspace(-math.pi, math.pi, 720, endpoint=False).tolist()
    kappas = np.array(boundary_trace(period_one, thetas).polyline)
    assert len(kappas) == 720
    distances = np.abs(kappas[:, None] - kappas[None, :])
    assert distances[~np.eye(720, dtype=bool)].min() > 0


def test_boundary_does_not_cross_itself(period_one):
    # away from the cusp at -1 every pair is farther apart than a tenth of the local step
    thetas = np.linspace(0.25, 2 * math.pi - 0.25, 720).tolist()
    boundary = boundary_trace(period_one, thetas)
    kappas = np.array(boundary.polyline)
    assert all(abs(sample.multiplier) == pytest.approx(1, abs=1e-9) for sample in boundary.samples)
    steps = np.abs(np.diff(kappas))
    steps = np.append(steps, steps[-1])
    distances = np.abs(kappas[:, None] - kappas[None, :])
    local = np.minimum.outer(steps, steps) / 10
    assert (distances > local)[~np.eye(len(kappas), dtype=bool)].all()


def test_period_one_membership():
    assert period_one_membership(-2)
    assert period_one_membership(-1 - math.exp(-1))
    assert period_one_membership(period_one_parameter(-0.1 + 2j))
    assert not period_one_membership(-0.9)
    assert not period_one_membership(0)
    assert not period_one_membership(3 + 1j)


def test_solve_for_multiplier():
    kappa, z = solve_for_multiplier(1, 0.5, (-2, -1.84))
    assert z == pytest.approx(math.log(0.5))
    assert kappa == pytest.approx(math.log(0.5) - 0.5)


def test_solve_for_multiplier_validates_multiplier():
    with pytest.raises(ValueError):
        solve_for_multiplier(1, 0, (-2, -1.84))
    with pytest.raises(ValueError):
        solve_for_multiplier(1, 1.5, (-2, -1.84))


def test_internal_rays_of_period_one_stay_bounded(period_one):
    for height in (0.0, 0.37):
        try:
            internal_ray_landing(period_one, height)
        except DivergedToInfinity:
            pytest.fail(f"the internal ray at height {height} diverged")
