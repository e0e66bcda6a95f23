#!/usr/bin/env python
"""expmap's command-line utility, the subcommands are django management commands."""
import os
import sys

# dashed names of the explorer subcommands, management commands are python modules
COMMAND_ALIASES = {
    "trace-ray": "trace_ray",
    "internal-ray": "internal_ray",
}


def main():
    os.environ.setdefault("DJANGO_SETTINGS_MODULE", "expmap.settings")
    try:
        from django.core.management import execute_from_command_line
    except ImportError as exc:
        raise ImportError(
            "Couldn't import Django. Are you sure it's installed and "
            "available on your PYTHONPATH environment variable? Did you "
            "forget to activate a virtual environment?"
        ) from exc
    argv = list(sys.argv)
    if len(argv) > 1:
        argv[1] = COMMAND_ALIASES.get(argv[1], argv[1])
    execute_from_command_line(argv)


if __name__ == "__main__":
    main()
