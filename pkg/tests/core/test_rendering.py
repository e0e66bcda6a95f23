import numpy as np
import pytest
from PIL import Image

from expmap.core.components import period_one_membership
from expmap.core.dynamics import Attracting, Escaping
from expmap.core.rays import trace_parameter_ray
from expmap.core.rendering import (
    RenderSpec,
    classify_grid,
    encode_ppm,
    overlay_rays,
    pixel_color,
    render,
    save_image,
)
from expmap.extra.colors import (
    ESCAPE_DARKEST,
    EXTERNAL_RAY_COLOR,
    HIGH_PERIOD_COLOR,
    UNDETERMINED_COLOR,
)

PERIOD_ONE_WINDOW = (-2.5, -1.5, -0.2, 0.2)


def test_render_spec_validation():
    with pytest.raises(ValueError):
        RenderSpec(width=0)
    with pytest.raises(ValueError):
        RenderSpec(window=(1.0, 1.0, -1.0, 1.0))
    with pytest.raises(ValueError):
        RenderSpec(period_cap=0)


def test_pixel_centers():
    spec = RenderSpec(window=(0.0, 4.0, -1.0, 1.0), width=4, height=2)
    assert spec.parameter(0, 0) == complex(0.5, 0.5)
    assert spec.parameter(1, 3) == complex(3.5, -0.5)
    assert spec.position(complex(2.0, 0.0)) == (2.0, 1.0)
    assert spec.contains(complex(4.0, 1.0))
    assert not spec.contains(complex(4.5, 0.0))


def test_single_pixel_of_period_one():
    spec = RenderSpec(window=(-2.1, -1.9, -0.1, 0.1), width=1, height=1)
    image = render(spec)
    assert image.shape == (1, 1, 3)
    assert tuple(image[0, 0]) == spec.palette[1]


def test_period_one_window_agrees_with_membership():
    spec = RenderSpec(window=PERIOD_ONE_WINDOW, width=20, height=8, period_cap=4)
    grid = classify_grid(spec)
    pixels = [
        (isinstance(classification, Attracting) and classification.period == 1)
        == period_one_membership(spec.parameter(row, column))
        for row, line in enumerate(grid)
        for column, classification in enumerate(line)
    ]
    assert sum(pixels) / len(pixels) >= 0.99
    image = render(spec)
    colored = np.all(image == np.array(spec.palette[1], dtype=np.uint8), axis=2)
    assert colored.mean() >= 0.99


def test_window_right_of_the_real_ray():
    # real parameters above -1 escape, the rows next to them hold tails of period three
    spec = RenderSpec(window=(3.0, 4.0, -0.2, 0.2), width=10, height=10)
    grid = classify_grid(spec)
    escaping = sum(isinstance(c, Escaping) for line in grid for c in line)
    assert escaping >= 20
    image = render(spec)
    for row, line in enumerate(grid):
        for column, classification in enumerate(line):
            if isinstance(classification, Escaping):
                red, green, blue = image[row, column]
                assert red == green == blue >= ESCAPE_DARKEST
            else:
                assert isinstance(classification, Attracting)
                assert classification.period >= 2


def test_rendering_does_not_depend_on_workers():
    spec = RenderSpec(window=(-3.0, 1.0, -2.0, 2.0), width=12, height=6, max_iter=200)
    single = encode_ppm(render(spec, workers=1))
    assert encode_ppm(render(spec, workers=1)) == single
    assert encode_ppm(render(spec, workers=2)) == single


def test_pixel_colors_of_classifications():
    spec = RenderSpec(period_cap=2)
    attracting = Attracting(period=2, multiplier=0.5, orbit_point=0j)
    assert pixel_color(attracting, spec) == spec.palette[2]
    high = Attracting(period=5, multiplier=0.5, orbit_point=0j)
    assert pixel_color(high, spec) == HIGH_PERIOD_COLOR
    escaping = Escaping(steps=3, address_prefix=(0,), potential=2.0)
    assert pixel_color(escaping, spec) != UNDETERMINED_COLOR


def test_overlay_without_rays_is_a_copy():
    image = np.full((4, 5, 3), 7, dtype=np.uint8)
    spec = RenderSpec(window=(0.0, 1.0, 0.0, 1.0), width=5, height=4)
    overlaid = overlay_rays(image, spec)
    assert np.array_equal(overlaid, image)
    assert overlaid is not image


def test_overlay_draws_the_real_ray(zero):
    spec = RenderSpec(window=(0.0, 20.0, -1.0, 1.0), width=40, height=10)
    image = np.zeros((spec.height, spec.width, 3), dtype=np.uint8)
    ray = trace_parameter_ray(zero, 20, 1)
    overlaid = overlay_rays(image, spec, rays=[ray])
    red = np.all(overlaid == np.array(EXTERNAL_RAY_COLOR, dtype=np.uint8), axis=2)
    # the ray of [;0] is the real axis to the right of the landing point
    assert red[spec.height // 2].sum() > spec.width // 2
    assert red.sum() == red[spec.height // 2].sum()


def test_encode_ppm():
    image = np.zeros((2, 3, 3), dtype=np.uint8)
    assert encode_ppm(image) == b"P6\n3 2\n255\n" + bytes(18)


def test_save_image(tmp_path):
    image = np.full((2, 3, 3), UNDETERMINED_COLOR, dtype=np.uint8)
    image[0, 0] = (10, 20, 30)
    save_image(image, tmp_path / "out.ppm")
    assert (tmp_path / "out.ppm").read_bytes() == encode_ppm(image)
    save_image(image, tmp_path / "out.png")
    with Image.open(tmp_path / "out.png") as png:
        assert np.array_equal(np.asarray(png.convert("RGB")), image)
    with pytest.raises(ValueError):
        save_image(image, tmp_path / "out.jpg")
