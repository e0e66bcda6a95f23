from expmap.core.symbolic import first_kneading_disagreement, format_kneading, kneading_sequence
from expmap.extra.commands import ExplorerCommand, external_address


class Command(ExplorerCommand):
    help = "Print the kneading sequence of an external address."

    def add_arguments(self, parser):
        parser.add_argument("address", type=external_address, help="e.g. [;0,1] or [1;0]")
        parser.add_argument(
            "--compare",
            type=external_address,
            metavar="ADDRESS",
            help="also print the first position where the two kneading sequences differ",
        )

    def handle(self, *args, **options):
        s = options["address"]
        self.stdout.write(format_kneading(kneading_sequence(s)))
        if (other := options["compare"]) is not None:
            if other == s:
                raise self.usage_error("the addresses to compare must differ")
            disagreement = first_kneading_disagreement(s, other)
            if disagreement is None:
                self.stdout.write("never")
            else:
                self.stdout.write(
                    f"{disagreement.index}"
                    + (" (boundary compatible)" if disagreement.boundary_compatible else "")
                )
