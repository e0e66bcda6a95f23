from expmap.core.census import bifurcation_child, chain_connectivity
from expmap.core.components import period_one_component
from expmap.core.serializers import (
    ComponentRecord,
    Partition,
    PartitionSerializer,
    RecordError,
    dump_components,
    load_components,
    render_json,
)
from expmap.extra.commands import ExplorerCommand, fraction, positive_int


class Command(ExplorerCommand):
    help = (
        "Partition components into classes connected by bifurcation chains, or compute the "
        "p/q bifurcation child of a period one component."
    )

    def add_arguments(self, parser):
        source = parser.add_mutually_exclusive_group(required=True)
        source.add_argument("--components", metavar="FILE", help="component records as JSON")
        source.add_argument("--period-one-branch", type=int, metavar="K")
        parser.add_argument("--max-depth", type=positive_int, default=4, metavar="Q")
        parser.add_argument("--fraction", type=fraction, metavar="P/Q")
        parser.add_argument("--output", metavar="PATH", help="write the JSON here, not to stdout")

    def handle(self, *args, **options):
        config = self.get_config()
        if options["period_one_branch"] is not None:
            if options["fraction"] is None:
                raise self.usage_error("--period-one-branch needs --fraction p/q")
            parent = period_one_component(options["period_one_branch"], config)
            p, q = options["fraction"].numerator, options["fraction"].denominator
            child = bifurcation_child(parent, p, q, config)
            self.write_output(
                dump_components([ComponentRecord(component=child)]).decode(), options["output"]
            )
            return

        try:
            with open(options["components"], "rb") as f:
                records = load_components(f)
        except (OSError, RecordError) as e:
            raise self.usage_error(str(e))
        components = [record.component for record in records]
        partition = chain_connectivity(components, options["max_depth"], config)
        data = PartitionSerializer(
            Partition(max_depth=options["max_depth"], classes=tuple(map(tuple, partition)))
        ).data
        self.write_output(render_json(data).decode(), options["output"])
