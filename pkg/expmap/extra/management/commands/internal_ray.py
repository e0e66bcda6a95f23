import io

from expmap.core.components import internal_ray, internal_ray_landing, period_one_component
from expmap.core.serializers import RecordError, load_components, write_internal_ray_csv
from expmap.extra.commands import ExplorerCommand


def load_component(path, index):
    """The component at ``index`` in a file written by the components command."""
    with open(path, "rb") as f:
        records = load_components(f)
    if not 0 <= index < len(records):
        raise RecordError(f"{path} holds {len(records)} components, there is no index {index}")
    return records[index].component


class Command(ExplorerCommand):
    help = "Sample the internal ray t -> Phi_W^-1(t + 2*pi*i*h) of a hyperbolic component as CSV."

    def add_arguments(self, parser):
        which = parser.add_mutually_exclusive_group(required=True)
        which.add_argument(
            "--period-one-branch",
            type=int,
            metavar="K",
            help="the period one component, normalized on the branch through 2*pi*i*K - 1 - 1/e",
        )
        which.add_argument("--component", metavar="FILE", help="component records as JSON")
        parser.add_argument("--index", type=int, default=0, help="record index in --component")
        parser.add_argument("--height", type=float, required=True)
        parser.add_argument("--tstart", type=float, default=-10.0)
        parser.add_argument("--tend", type=float, default=None)
        parser.add_argument("--csv", metavar="PATH", help="write the samples here, not to stdout")
        parser.add_argument(
            "--landing",
            action="store_true",
            help="extrapolate the landing point and print it to stderr",
        )

    def handle(self, *args, **options):
        config = self.get_config()
        if options["component"] is not None:
            try:
                component = load_component(options["component"], options["index"])
            except (OSError, RecordError) as e:
                raise self.usage_error(str(e))
        else:
            component = period_one_component(options["period_one_branch"], config)
        t_end = options["tend"]
        if t_end is None:
            t_end = -config.components.parabolic_cutoff
        if not options["tstart"] < t_end < 0:
            raise self.usage_error("need tstart < tend < 0")

        ray = internal_ray(component, options["height"], options["tstart"], t_end, config)
        samples = io.StringIO()
        write_internal_ray_csv(ray, samples)
        self.write_output(samples.getvalue(), options["csv"])
        if options["landing"]:
            landing = internal_ray_landing(component, options["height"], config)
            self.stderr.write(f"landing {landing.real!r} {landing.imag!r}")
