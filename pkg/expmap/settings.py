import datetime
import importlib.metadata as importlib_metadata
import os
from pathlib import Path

import environ

BASE_DIR = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))

env = environ.Env()
# for syntax see https://django-environ.readthedocs.io/en/latest/
# read key=value config from EXPMAP_CONFIG, falling back to expmap.env in the project root
EXPMAP_CONFIG = env.str("EXPMAP_CONFIG", default=os.path.join(BASE_DIR, "expmap.env"))
if os.path.exists(EXPMAP_CONFIG):
    environ.Env.read_env(env_file=EXPMAP_CONFIG)

# expmap never serves requests, the key only satisfies django's system checks
SECRET_KEY = env.str("SECRET_KEY", default="expmap-offline")
DEBUG = env.bool("DEBUG", default=False)
ALLOWED_HOSTS = []

try:
    EXPMAP_VERSION = importlib_metadata.version("expmap")
except importlib_metadata.PackageNotFoundError:
    # expmap is not installed as a package (e.g. development setup)
    EXPMAP_VERSION = "dev"

INSTALLED_APPS = [
    "expmap.core",
    "expmap.extra",
    "rest_framework",
]

DATABASES = {}

USE_I18N = True
LANGUAGE_CODE = "en"
USE_TZ = True
TIME_ZONE = "UTC"

# numerical configuration, environment variables are namespaced by their section
EXPMAP = {
    "core": {
        "escape_radius": env.float("CORE_ESCAPE_RADIUS", default=50.0),
        "max_iter": env.int("CORE_MAX_ITER", default=10_000),
        "overflow_cap": env.float("CORE_OVERFLOW_CAP", default=700.0),
        "escape_streak": env.int("CORE_ESCAPE_STREAK", default=3),
        "cycle_tolerance": env.float("CORE_CYCLE_TOLERANCE", default=1e-6),
        "attract_tolerance": env.float("CORE_ATTRACT_TOLERANCE", default=1e-6),
        "newton_max_iter": env.int("CORE_NEWTON_MAX_ITER", default=64),
        "newton_tolerance": env.float("CORE_NEWTON_TOLERANCE", default=1e-12),
        "degenerate_tolerance": env.float("CORE_DEGENERATE_TOLERANCE", default=1e-10),
    },
    "symbolic": {
        "strip_tolerance": env.float("SYMBOLIC_STRIP_TOLERANCE", default=1e-3),
    },
    "rays": {
        "grid_factor": env.float("RAYS_GRID_FACTOR", default=1.1),
        "depth_radius": env.float("RAYS_DEPTH_RADIUS", default=50.0),
        "max_depth": env.int("RAYS_MAX_DEPTH", default=200),
        "residual_tolerance": env.float("RAYS_RESIDUAL_TOLERANCE", default=1e-9),
        "max_iter": env.int("RAYS_MAX_ITER", default=100),
        "damping": env.float("RAYS_DAMPING", default=0.5),
        "max_refinements": env.int("RAYS_MAX_REFINEMENTS", default=8),
        "landing_samples": env.int("RAYS_LANDING_SAMPLES", default=8),
        "landing_tolerance": env.float("RAYS_LANDING_TOLERANCE", default=1e-3),
        "branch_tolerance": env.float("RAYS_BRANCH_TOLERANCE", default=1e-9),
    },
    "components": {
        "step": env.float("COMPONENTS_STEP", default=0.05),
        "parabolic_cutoff": env.float("COMPONENTS_PARABOLIC_CUTOFF", default=1e-4),
        "divergence_radius": env.float("COMPONENTS_DIVERGENCE_RADIUS", default=1e6),
        "identity_steps": env.int("COMPONENTS_IDENTITY_STEPS", default=1000),
        "identity_radius": env.float("COMPONENTS_IDENTITY_RADIUS", default=3.0),
        "dedup_tolerance": env.float("COMPONENTS_DEDUP_TOLERANCE", default=1e-6),
        "scan_max_iter": env.int("COMPONENTS_SCAN_MAX_ITER", default=500),
        "singular_tolerance": env.float("COMPONENTS_SINGULAR_TOLERANCE", default=1e-13),
    },
    "render": {
        "period_cap": env.int("RENDER_PERIOD_CAP", default=8),
        "max_iter": env.int("RENDER_MAX_ITER", default=1000),
        "workers": env.int("RENDER_WORKERS", default=1),
    },
}

# logging
LOGGING_FILE = env.str("LOGGING_FILE", default=None)
if LOGGING_FILE is not None:
    Path(LOGGING_FILE).parent.mkdir(parents=True, exist_ok=True)

LOGGING = {
    "version": 1,
    "disable_existing_loggers": False,
    "formatters": {
        "default": {"format": "[%(levelname)s] %(asctime)s %(name)s :: %(message)s"},
    },
    "handlers": {
        "console": {
            # stderr, stdout is reserved for data output of the commands
            "level": "DEBUG" if DEBUG else "WARNING",
            "class": "logging.StreamHandler",
            "formatter": "default",
        },
        "file": {
            "level": "DEBUG",
            "formatter": "default",
            **(
                {
                    "class": "logging.handlers.TimedRotatingFileHandler",
                    "filename": LOGGING_FILE,
                    "when": "midnight",
                    "backupCount": env.int("LOGGING_BACKUP_DAYS", default=14),
                    "atTime": datetime.time(4),
                    "encoding": "utf-8",
                }
                if LOGGING_FILE is not None
                else {
                    "class": "logging.NullHandler",
                }
            ),
        },
    },
    "loggers": {
        "expmap": {
            "handlers": ["console", "file"],
            "level": "DEBUG" if DEBUG else "INFO",
            "propagate": False,
        },
        "django": {
            "handlers": [],
            "level": "INFO",
            "propagate": True,
        },
    },
    "root": {
        "handlers": ["console", "file"],
        "level": "INFO",
    },
}

REST_FRAMEWORK = {
    # serializers are only used for the json records, no views or auth involved
    "UNAUTHENTICATED_USER": None,
    "DEFAULT_AUTHENTICATION_CLASSES": [],
    "DEFAULT_PERMISSION_CLASSES": [],
}
