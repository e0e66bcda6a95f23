import argparse
import math
import sys
from fractions import Fraction

from django.core.management import BaseCommand, CommandError
from django.core.management.base import CommandParser

from expmap.core.config import get_config
from expmap.core.dynamics import NumericalFailure
from expmap.core.symbolic import AddressSyntaxError, ExternalAddress, parse_address

USAGE_ERROR = 1
NUMERICAL_FAILURE = 2


class ExplorerParser(CommandParser):
    """argparse exits with status 2 on bad usage, explorer commands exit with 1."""

    def error(self, message):
        if self.called_from_command_line:
            self.print_usage(sys.stderr)
            self.exit(USAGE_ERROR, f"{self.prog}: error: {message}\n")
        raise CommandError(f"Error: {message}", returncode=USAGE_ERROR)


def address(text):
    try:
        return parse_address(text)
    except AddressSyntaxError as e:
        raise argparse.ArgumentTypeError(str(e))


def external_address(text):
    parsed = address(text)
    if not isinstance(parsed, ExternalAddress):
        raise argparse.ArgumentTypeError(f"{text} is not an external address [p1,...;q1,...]")
    return parsed


def window(text):
    """``re0:re1:im0:im1``"""
    try:
        bounds = tuple(float(part) for part in text.split(":"))
    except ValueError:
        bounds = ()
    if len(bounds) != 4 or not all(math.isfinite(bound) for bound in bounds):
        raise argparse.ArgumentTypeError(f"{text!r} is not of the form re0:re1:im0:im1")
    if not (bounds[0] < bounds[1] and bounds[2] < bounds[3]):
        raise argparse.ArgumentTypeError(f"the window {text!r} is empty")
    return bounds


def size(text):
    """``WIDTHxHEIGHT``"""
    width, _, height = text.lower().partition("x")
    try:
        width, height = int(width), int(height)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not of the form WIDTHxHEIGHT")
    if width < 1 or height < 1:
        raise argparse.ArgumentTypeError("images are at least one pixel wide and high")
    return width, height


def fraction(text):
    """``p/q`` with 0 < p/q < 1 in lowest terms."""
    try:
        p, q = (int(part) for part in text.split("/"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not of the form p/q")
    if not 0 < p < q or math.gcd(p, q) != 1:
        raise argparse.ArgumentTypeError(f"{text} is not a reduced fraction in (0, 1)")
    return Fraction(p, q)


def positive_int(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"{text} is not a positive integer")
    return value


class ExplorerCommand(BaseCommand):
    """
    Base of the explorer commands. Numerical failures end the command with exit status 2,
    invalid input with status 1 and a synopsis.
    """

    requires_system_checks = []

    def create_parser(self, prog_name, subcommand, **kwargs):
        parser = super().create_parser(prog_name, subcommand, **kwargs)
        parser.__class__ = ExplorerParser
        self.parser = parser
        return parser

    def execute(self, *args, **options):
        try:
            return super().execute(*args, **options)
        except NumericalFailure as e:
            raise CommandError(f"numerical failure: {e}", returncode=NUMERICAL_FAILURE) from e
        except ValueError as e:
            raise self.usage_error(str(e)) from e

    def usage_error(self, message):
        if getattr(self, "_called_from_command_line", False):
            self.stderr.write(self.parser.format_usage(), ending="")
        return CommandError(message, returncode=USAGE_ERROR)

    def get_config(self, section=None, **overrides):
        """The configuration from the settings, with command line values for one section."""
        config = get_config()
        if section is None:
            return config
        return config.override(section, **overrides)

    def write_output(self, content, path=None):
        """Write text to the file at ``path`` or to stdout."""
        if path is None:
            self.stdout.write(content, ending="")
            return
        with open(path, "w", encoding="utf-8", newline="") as f:
            f.write(content)
