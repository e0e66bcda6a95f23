import dataclasses
from dataclasses import dataclass

from django.conf import settings


@dataclass(frozen=True)
class CoreConfig:
    escape_radius: float = 50.0
    max_iter: int = 10_000
    overflow_cap: float = 700.0
    escape_streak: int = 3
    cycle_tolerance: float = 1e-6
    attract_tolerance: float = 1e-6
    newton_max_iter: int = 64
    newton_tolerance: float = 1e-12
    degenerate_tolerance: float = 1e-10


@dataclass(frozen=True)
class SymbolicConfig:
    strip_tolerance: float = 1e-3


@dataclass(frozen=True)
class RayConfig:
    grid_factor: float = 1.1
    depth_radius: float = 50.0
    max_depth: int = 200
    residual_tolerance: float = 1e-9
    max_iter: int = 100
    damping: float = 0.5
    max_refinements: int = 8
    landing_samples: int = 8
    landing_tolerance: float = 1e-3
    branch_tolerance: float = 1e-9


@dataclass(frozen=True)
class ComponentConfig:
    step: float = 0.05
    parabolic_cutoff: float = 1e-4
    divergence_radius: float = 1e6
    identity_steps: int = 1000
    identity_radius: float = 3.0
    dedup_tolerance: float = 1e-6
    scan_max_iter: int = 500
    singular_tolerance: float = 1e-13


@dataclass(frozen=True)
class RenderConfig:
    period_cap: int = 8
    max_iter: int = 1000
    workers: int = 1


@dataclass(frozen=True)
class ExplorerConfig:
    """
    All numerical knobs in one immutable record. The record is picklable, so worker
    processes receive it as an argument and never read django settings themselves.
    """

    core: CoreConfig = CoreConfig()
    symbolic: SymbolicConfig = SymbolicConfig()
    rays: RayConfig = RayConfig()
    components: ComponentConfig = ComponentConfig()
    render: RenderConfig = RenderConfig()

    def override(self, section, **values):
        """Return a copy with some keys of one section replaced, ignoring ``None`` values."""
        values = {key: value for key, value in values.items() if value is not None}
        if not values:
            return self
        return dataclasses.replace(
            self, **{section: dataclasses.replace(getattr(self, section), **values)}
        )


SECTIONS = {
    "core": CoreConfig,
    "symbolic": SymbolicConfig,
    "rays": RayConfig,
    "components": ComponentConfig,
    "render": RenderConfig,
}


def get_config():
    """
    Build the configuration record from ``settings.EXPMAP``.
    Without configured settings (plain library use) the defaults apply.
    """
    if not settings.configured:
        return ExplorerConfig()
    sections = getattr(settings, "EXPMAP", {})
    return ExplorerConfig(
        **{
            name: record(
                **{
                    key: value
                    for key, value in sections.get(name, {}).items()
                    if key in {field.name for field in dataclasses.fields(record)}
                }
            )
            for name, record in SECTIONS.items()
        }
    )
