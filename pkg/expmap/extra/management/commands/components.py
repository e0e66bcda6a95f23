import logging
import math

import numpy as np

from expmap.core.census import assign_intermediate_address, bifurcation_children, find_components
from expmap.core.components import boundary_trace
from expmap.core.dynamics import NumericalFailure
from expmap.core.serializers import ComponentRecord, dump_components
from expmap.extra.commands import ExplorerCommand, positive_int, window

logger = logging.getLogger(__name__)


class Command(ExplorerCommand):
    help = "Find the hyperbolic components of one period in a window and write them as JSON."

    def add_arguments(self, parser):
        parser.add_argument("period", type=positive_int)
        parser.add_argument(
            "--window",
            type=window,
            default=(0.0, 8.0, -math.pi, math.pi),
            metavar="RE0:RE1:IM0:IM1",
        )
        parser.add_argument("--grid-step", type=float, default=0.05)
        parser.add_argument("--workers", type=positive_int, default=None)
        parser.add_argument(
            "--boundary-points",
            type=int,
            default=0,
            metavar="N",
            help="sample the boundary at N angles in one sector around the seed",
        )
        parser.add_argument(
            "--children-depth",
            type=int,
            default=0,
            metavar="Q",
            help="attach the bifurcation children p/q with q <= Q",
        )
        parser.add_argument(
            "--intermediate",
            action="store_true",
            help="read the intermediate address off the tail of each component",
        )
        parser.add_argument("--output", metavar="PATH", help="write the JSON here, not to stdout")

    def handle(self, *args, **options):
        period = options["period"]
        if options["grid_step"] <= 0:
            raise self.usage_error("the grid step must be positive")
        config = self.get_config()
        components = find_components(
            period, options["window"], options["grid_step"], config, options["workers"]
        )
        records = []
        for component in components:
            if options["intermediate"] and period > 1:
                try:
                    component = assign_intermediate_address(component, config)
                except NumericalFailure as e:
                    logger.warning("no intermediate address for %s: %s", component, e)
            boundary = ()
            if (count := options["boundary_points"]) > 0:
                center = component.seed_log_multiplier.imag
                thetas = np.linspace(center - math.pi, center + math.pi, count)
                boundary = tuple(boundary_trace(component, thetas.tolist(), config).polyline)
            children = ()
            if options["children_depth"] >= 2:
                children = tuple(bifurcation_children(component, options["children_depth"], config))
            records.append(
                ComponentRecord(component=component, boundary=boundary, children=children)
            )
        self.write_output(dump_components(records).decode(), options["output"])
