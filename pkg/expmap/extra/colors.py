import colorsys
import math

UNDETERMINED_COLOR = (0, 0, 0)
HIGH_PERIOD_COLOR = (255, 255, 255)
# reserved for overlays, fully saturated so that no period color comes close
EXTERNAL_RAY_COLOR = (255, 0, 0)
INTERNAL_RAY_COLOR = (0, 0, 255)

# gray levels of the escape ramp, kept away from the undetermined and high period colors
ESCAPE_DARKEST = 40
ESCAPE_LIGHTEST = 220


def hex_to_rgb(color: str):
    if len(color) != 7 or not color.startswith("#"):
        raise ValueError(f"{color!r} is not of the form #rrggbb")
    return int(color[1:3], 16), int(color[3:5], 16), int(color[5:7], 16)


def period_palette(period_cap):
    """Distinct hues for the periods 1 .. period_cap."""
    return {
        period: tuple(
            round(255 * channel)
            for channel in colorsys.hsv_to_rgb((period - 1) / period_cap, 0.55, 0.95)
        )
        for period in range(1, period_cap + 1)
    }


def escape_shade(steps, scale=16.0):
    """Gray for an orbit escaping after ``steps`` iterations, monotone in the steps."""
    level = ESCAPE_DARKEST + (ESCAPE_LIGHTEST - ESCAPE_DARKEST) * (1 - math.exp(-steps / scale))
    return (round(level),) * 3
