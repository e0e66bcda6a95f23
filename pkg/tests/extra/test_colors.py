import pytest

from expmap.extra.colors import (
    ESCAPE_DARKEST,
    ESCAPE_LIGHTEST,
    EXTERNAL_RAY_COLOR,
    HIGH_PERIOD_COLOR,
    INTERNAL_RAY_COLOR,
    UNDETERMINED_COLOR,
    escape_shade,
    hex_to_rgb,
    period_palette,
)


def test_hex_to_rgb():
    assert hex_to_rgb("#00ff80") == (0, 255, 128)
    for text in ("00ff80", "#0f8", "#00ff8g"):
        with pytest.raises(ValueError):
            hex_to_rgb(text)


def test_period_palette():
    palette = period_palette(8)
    assert sorted(palette) == list(range(1, 9))
    colors = set(palette.values())
    assert len(colors) == 8
    reserved = {UNDETERMINED_COLOR, HIGH_PERIOD_COLOR, EXTERNAL_RAY_COLOR, INTERNAL_RAY_COLOR}
    assert not colors & reserved


def test_escape_shade_is_monotone():
    shades = [escape_shade(steps)[0] for steps in range(0, 200, 5)]
    assert shades == sorted(shades)
    assert ESCAPE_DARKEST <= shades[0] and shades[-1] <= ESCAPE_LIGHTEST
    assert len(set(escape_shade(7))) == 1
