import io
import logging

from expmap.core.rays import (
    LANDING_POTENTIAL,
    LandingNotConverged,
    classify_landing,
    land,
    trace_parameter_ray,
)
from expmap.core.serializers import RaySummary, RaySummarySerializer, render_json, write_ray_csv
from expmap.extra.commands import ExplorerCommand, external_address

logger = logging.getLogger(__name__)


class Command(ExplorerCommand):
    help = (
        "Trace the parameter ray of an external address and write its samples as CSV, "
        "together with a JSON summary of the landing point."
    )

    def add_arguments(self, parser):
        parser.add_argument("address", type=external_address, help="e.g. [;0] or [1;0]")
        parser.add_argument("--tmax", type=float, default=20.0)
        parser.add_argument("--tmin", type=float, default=LANDING_POTENTIAL)
        parser.add_argument("--grid-factor", type=float, default=None)
        parser.add_argument("--csv", metavar="PATH", help="write the samples here, not to stdout")
        parser.add_argument(
            "--summary", metavar="PATH", help="write the JSON summary here, not to stderr"
        )

    def handle(self, *args, **options):
        s, t_max, t_min = options["address"], options["tmax"], options["tmin"]
        if not t_max > t_min > 0:
            raise self.usage_error("need tmax > tmin > 0")
        config = self.get_config("rays", grid_factor=options["grid_factor"])
        if config.rays.grid_factor <= 1:
            raise self.usage_error("the grid factor must be larger than 1")

        ray = trace_parameter_ray(s, t_max, t_min, config=config)
        indifferent = None
        if t_min <= LANDING_POTENTIAL:
            try:
                ray = land(ray, config)
            except LandingNotConverged as e:
                logger.warning("no landing estimate for %s: %s", s, e)
            else:
                indifferent = classify_landing(ray.landing.kappa, len(s.period), config)

        samples = io.StringIO()
        write_ray_csv(ray, samples)
        self.write_output(samples.getvalue(), options["csv"])

        summary = render_json(
            RaySummarySerializer(RaySummary.from_ray(ray, indifferent)).data
        ).decode()
        if options["summary"] is None:
            self.stderr.write(summary, ending="")
        else:
            with open(options["summary"], "w", encoding="utf-8") as f:
                f.write(summary)
