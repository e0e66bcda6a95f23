from django.core.management import CommandError

from expmap.core.verification import CHECKS, run_checks
from expmap.extra.commands import NUMERICAL_FAILURE, ExplorerCommand
from expmap.extra.json import dumps


class Command(ExplorerCommand):
    help = "Run the acceptance checks and write a JSON pass/fail report."

    def add_arguments(self, parser):
        parser.add_argument(
            "--quick", action="store_true", help="smaller sample sets, for a run within minutes"
        )
        parser.add_argument(
            "--check",
            action="append",
            choices=[entry.name for entry in CHECKS],
            help="run only this check, repeatable",
        )
        parser.add_argument("--output", metavar="PATH", help="write the report here, not to stdout")

    def handle(self, *args, **options):
        report = run_checks(
            quick=options["quick"], config=self.get_config(), names=options["check"]
        )
        self.write_output(dumps(report), options["output"])
        failed = [check["name"] for check in report["checks"] if not check["passed"]]
        if failed:
            raise CommandError(f"failed checks: {', '.join(failed)}", returncode=NUMERICAL_FAILURE)
