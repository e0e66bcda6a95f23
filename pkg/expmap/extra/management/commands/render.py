import argparse
import logging

from expmap.core.components import internal_ray, period_one_component
from expmap.core.rays import LANDING_POTENTIAL, trace_parameter_ray
from expmap.core.rendering import DEFAULT_WINDOW, RenderSpec, overlay_rays, render, save_image
from expmap.extra.colors import hex_to_rgb, period_palette
from expmap.extra.commands import ExplorerCommand, external_address, positive_int, size, window

logger = logging.getLogger(__name__)

OVERLAY_T_MAX = 20.0
OVERLAY_T_START = -10.0


def period_color(text):
    """``PERIOD=#rrggbb``"""
    period, _, color = text.partition("=")
    try:
        return int(period), hex_to_rgb(color)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not of the form PERIOD=#rrggbb")


class Command(ExplorerCommand):
    help = "Render the parameter plane colored by the period of the attracting cycle."

    def add_arguments(self, parser):
        parser.add_argument(
            "--window", type=window, default=DEFAULT_WINDOW, metavar="RE0:RE1:IM0:IM1"
        )
        parser.add_argument("--size", type=size, default=(800, 600), metavar="WxH")
        parser.add_argument("--max-iter", type=positive_int, default=None)
        parser.add_argument("--period-cap", type=positive_int, default=None)
        parser.add_argument("--workers", type=positive_int, default=None)
        parser.add_argument(
            "--period-color",
            type=period_color,
            action="append",
            default=[],
            metavar="PERIOD=#RRGGBB",
            help="override the color of one period, repeatable",
        )
        parser.add_argument(
            "--overlay-ray", type=external_address, action="append", default=[], metavar="ADDRESS"
        )
        parser.add_argument(
            "--overlay-internal",
            type=float,
            action="append",
            default=[],
            metavar="H",
            help="internal ray of height H in the period one component of branch 0",
        )
        parser.add_argument("--output", default="expmap.ppm", help=".ppm or .png")

    def handle(self, *args, **options):
        if not options["output"].lower().endswith((".ppm", ".png")):
            raise self.usage_error("the output must be a .ppm or .png file")
        config = self.get_config(
            "render",
            max_iter=options["max_iter"],
            period_cap=options["period_cap"],
            workers=options["workers"],
        )
        palette = period_palette(config.render.period_cap)
        palette.update(dict(options["period_color"]))
        width, height = options["size"]
        spec = RenderSpec(
            window=options["window"],
            width=width,
            height=height,
            max_iter=config.render.max_iter,
            escape_radius=config.core.escape_radius,
            period_cap=config.render.period_cap,
            palette=palette,
        )
        image = render(spec, config)

        rays = [
            trace_parameter_ray(s, OVERLAY_T_MAX, LANDING_POTENTIAL, config=config)
            for s in options["overlay_ray"]
        ]
        internal = []
        if options["overlay_internal"]:
            component = period_one_component(0, config)
            internal = [
                internal_ray(
                    component, height, OVERLAY_T_START, -config.components.parabolic_cutoff, config
                )
                for height in options["overlay_internal"]
            ]
        image = overlay_rays(image, spec, rays, internal)
        save_image(image, options["output"])
        logger.info("wrote %s", options["output"])
        self.stdout.write(self.style.SUCCESS(f"Wrote {options['output']}."))
