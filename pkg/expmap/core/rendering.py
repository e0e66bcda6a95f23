import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from itertools import repeat
from typing import Dict, Optional, Tuple

import numpy as np
from PIL import Image, ImageDraw

from expmap.core.config import get_config
from expmap.core.dynamics import (
    Attracting,
    Escaping,
    NumericalFailure,
    Undetermined,
    classify_singular_orbit,
)
from expmap.extra.colors import (
    EXTERNAL_RAY_COLOR,
    HIGH_PERIOD_COLOR,
    INTERNAL_RAY_COLOR,
    UNDETERMINED_COLOR,
    escape_shade,
    period_palette,
)

logger = logging.getLogger(__name__)

DEFAULT_WINDOW = (-6.0, 6.0, -4.0, 4.0)


@dataclass(frozen=True)
class RenderSpec:
    """
    A window (re_min, re_max, im_min, im_max) of the parameter plane sampled at pixel centers,
    row 0 at the top. ``palette`` maps attracting periods to colors and defaults to evenly
    spaced hues.
    """

    window: Tuple[float, float, float, float] = DEFAULT_WINDOW
    width: int = 800
    height: int = 600
    max_iter: int = 1000
    escape_radius: float = 50.0
    period_cap: int = 8
    palette: Optional[Dict[int, Tuple[int, int, int]]] = field(default=None, compare=False)

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ValueError("images are at least one pixel wide and high")
        re_min, re_max, im_min, im_max = self.window
        if not (re_min < re_max and im_min < im_max):
            raise ValueError(f"the window {self.window} is degenerate")
        if self.period_cap < 1:
            raise ValueError("the period cap is at least one")
        if self.palette is None:
            object.__setattr__(self, "palette", period_palette(self.period_cap))

    def parameter(self, row, column):
        re_min, re_max, im_min, im_max = self.window
        return complex(
            re_min + (column + 0.5) * (re_max - re_min) / self.width,
            im_max - (row + 0.5) * (im_max - im_min) / self.height,
        )

    def position(self, kappa):
        """Pixel coordinates (x, y) of a parameter, not necessarily inside the image."""
        re_min, re_max, im_min, im_max = self.window
        return (
            (kappa.real - re_min) / (re_max - re_min) * self.width,
            (im_max - kappa.imag) / (im_max - im_min) * self.height,
        )

    def contains(self, kappa):
        re_min, re_max, im_min, im_max = self.window
        return re_min <= kappa.real <= re_max and im_min <= kappa.imag <= im_max


def classify_row(spec, config, row):
    classifications = []
    for column in range(spec.width):
        kappa = spec.parameter(row, column)
        try:
            classification = classify_singular_orbit(
                kappa, max_iter=spec.max_iter, escape_radius=spec.escape_radius, config=config
            )
        except NumericalFailure as e:
            logger.warning("classifying %s failed: %s", kappa, e)
            classification = Undetermined(steps=0)
        classifications.append(classification)
    return classifications


def classify_grid(spec, config=None, workers=None):
    """
    Classify every pixel, one row per task. Rows are computed by the same code whatever the
    number of workers, so the result does not depend on it.
    """
    config = config or get_config()
    workers = workers or config.render.workers
    if workers <= 1:
        return [classify_row(spec, config, row) for row in range(spec.height)]
    with ProcessPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(classify_row, repeat(spec), repeat(config), range(spec.height)))


def pixel_color(classification, spec):
    if isinstance(classification, Attracting):
        return spec.palette.get(classification.period, HIGH_PERIOD_COLOR)
    if isinstance(classification, Escaping):
        return escape_shade(classification.steps)
    return UNDETERMINED_COLOR


def colorize(classifications, spec):
    image = np.zeros((spec.height, spec.width, 3), dtype=np.uint8)
    for row, line in enumerate(classifications):
        for column, classification in enumerate(line):
            image[row, column] = pixel_color(classification, spec)
    return image


def render(spec, config=None, workers=None):
    """The period colored image of the window as an (height, width, 3) uint8 array."""
    classifications = classify_grid(spec, config, workers)
    logger.info(
        "rendered %sx%s pixels of %s, %s attracting",
        spec.width,
        spec.height,
        spec.window,
        sum(isinstance(c, Attracting) for line in classifications for c in line),
    )
    return colorize(classifications, spec)


def _polyline(draw, spec, kappas, color):
    # consecutive points inside the window are joined, leaving the window breaks the line
    segment = []
    for kappa in kappas:
        if spec.contains(kappa):
            segment.append(spec.position(kappa))
            continue
        if len(segment) > 1:
            draw.line(segment, fill=color)
        elif segment:
            draw.point(segment, fill=color)
        segment = []
    if len(segment) > 1:
        draw.line(segment, fill=color)
    elif segment:
        draw.point(segment, fill=color)


def overlay_rays(image, spec, rays=(), internal=()):
    """Draw parameter rays and internal rays onto a copy of the image."""
    if not rays and not internal:
        return image.copy()
    canvas = Image.fromarray(image, mode="RGB")
    draw = ImageDraw.Draw(canvas)
    for ray in rays:
        _polyline(draw, spec, [point.kappa for point in ray.samples], EXTERNAL_RAY_COLOR)
    for internal_ray in internal:
        _polyline(draw, spec, [sample.kappa for sample in internal_ray.samples], INTERNAL_RAY_COLOR)
    return np.asarray(canvas, dtype=np.uint8).copy()


def encode_ppm(image):
    height, width, _ = image.shape
    return f"P6\n{width} {height}\n255\n".encode("ascii") + image.astype(np.uint8).tobytes()


def save_image(image, path):
    """Write the image as binary PPM or, for a .png path, as PNG."""
    path = str(path)
    if path.lower().endswith(".png"):
        Image.fromarray(image, mode="RGB").save(path, format="PNG")
    elif path.lower().endswith(".ppm"):
        with open(path, "wb") as f:
            f.write(encode_ppm(image))
    else:
        raise ValueError(f"cannot tell the image format of {path}, use .ppm or .png")
