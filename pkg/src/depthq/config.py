"""Pipeline configuration: defaults, file parsing, and CLI overrides.

Config files are flat key/value text. One ``key = value`` pair per line,
``#`` starts a comment, blank lines are ignored, and keys are dotted
(``ec.omega1 = 0.01``). Every key has a default, so an empty file is a
valid config. CLI flags override file values.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field, replace

from .edge_consistency import EcConfig
from .errors import ConfigError
from .raster import GaussianPass
from .regional_uncertainty import RuConfig

__all__ = [
    "PipelineConfig",
    "parse_config_file",
    "parse_components_value",
    "apply_overrides",
]

_COMPONENTS = ("ec", "ru", "mv")


@dataclass(frozen=True)
class PipelineConfig:
    """Validated settings for a full pipeline run."""

    ec: EcConfig = field(default_factory=EcConfig)
    ru: RuConfig = field(default_factory=RuConfig)
    components: frozenset[str] = frozenset(_COMPONENTS)
    slic_seed: int = 0
    noise_seed: int = 0
    out_dir: str | None = None
    jobs: int = 1

    def __post_init__(self) -> None:
        unknown = set(self.components) - set(_COMPONENTS)
        if unknown:
            raise ConfigError(f"unknown fusion components: {sorted(unknown)}")
        if self.jobs < 1:
            raise ConfigError(f"jobs must be >= 1, got {self.jobs}")


def _parse_float(key: str, raw: str) -> float:
    try:
        return float(raw)
    except ValueError:
        raise ConfigError(f"{key}: expected a number, got {raw!r}") from None


def _parse_int(key: str, raw: str) -> int:
    try:
        return int(raw, 10)
    except ValueError:
        raise ConfigError(f"{key}: expected an integer, got {raw!r}") from None


def _parse_components(key: str, raw: str) -> frozenset[str]:
    if raw.strip().lower() in ("", "none"):
        return frozenset()
    parts = [p.strip() for p in raw.split(",") if p.strip()]
    unknown = set(parts) - set(_COMPONENTS)
    if unknown:
        raise ConfigError(f"{key}: unknown components {sorted(unknown)}")
    return frozenset(parts)


def parse_components_value(raw: str) -> frozenset[str]:
    """Parse a comma-separated component list ('none' or '' for empty)."""
    return _parse_components("components", raw)


# Recognised keys and their value parsers; smoothing passes are flattened
# to four scalar keys.
_SCHEMA = {
    "ec.tc_mult": _parse_float,
    "ec.ta_mult": _parse_float,
    "ec.omega1": _parse_float,
    "ec.k_superpixels": _parse_int,
    "ec.pass1_side": _parse_int,
    "ec.pass1_sigma": _parse_float,
    "ec.pass2_side": _parse_int,
    "ec.pass2_sigma": _parse_float,
    "ru.omega2": _parse_float,
    "ru.k_superpixels": _parse_int,
    "ru.entropy_radius": _parse_int,
    "ru.entropy_bins": _parse_int,
    "ru.omega1": _parse_float,
    "fusion.components": _parse_components,
    "run.slic_seed": _parse_int,
    "run.noise_seed": _parse_int,
    "run.jobs": _parse_int,
}


def _read_pairs(path: str | os.PathLike) -> dict[str, str]:
    pairs: dict[str, str] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.split("#", 1)[0].strip()
            if not text:
                continue
            if "=" not in text:
                raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {line.rstrip()!r}")
            key, raw = text.split("=", 1)
            key = key.strip()
            if key not in _SCHEMA:
                raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
            pairs[key] = raw.strip()
    return pairs


def _build(values: dict[str, object]) -> PipelineConfig:
    base_ec = EcConfig()
    ec_kwargs = {
        f: values.get(f"ec.{f}", getattr(base_ec, f))
        for f in ("tc_mult", "ta_mult", "omega1", "k_superpixels")
    }
    p1, p2 = base_ec.passes
    ec_kwargs["passes"] = (
        GaussianPass(
            int(values.get("ec.pass1_side", p1.kernel_side)),
            float(values.get("ec.pass1_sigma", p1.sigma)),
        ),
        GaussianPass(
            int(values.get("ec.pass2_side", p2.kernel_side)),
            float(values.get("ec.pass2_sigma", p2.sigma)),
        ),
    )
    base_ru = RuConfig()
    ru_kwargs = {
        f: values.get(f"ru.{f}", getattr(base_ru, f))
        for f in ("omega2", "k_superpixels", "entropy_radius", "entropy_bins", "omega1")
    }
    try:
        return PipelineConfig(
            ec=EcConfig(**ec_kwargs),
            ru=RuConfig(**ru_kwargs),
            components=values.get("fusion.components", frozenset(_COMPONENTS)),
            slic_seed=int(values.get("run.slic_seed", 0)),
            noise_seed=int(values.get("run.noise_seed", 0)),
            jobs=int(values.get("run.jobs", 1)),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def parse_config_file(path: str | os.PathLike | None) -> PipelineConfig:
    """Build a PipelineConfig from a file; None yields pure defaults."""
    if path is None:
        return PipelineConfig()
    if not os.path.isfile(path):
        raise ConfigError(f"config file not found: {path}")
    pairs = _read_pairs(path)
    values = {key: _SCHEMA[key](key, raw) for key, raw in pairs.items()}
    return _build(values)


def apply_overrides(
    cfg: PipelineConfig,
    components: frozenset[str] | None = None,
    slic_seed: int | None = None,
    noise_seed: int | None = None,
    out_dir: str | None = None,
    jobs: int | None = None,
) -> PipelineConfig:
    """Layer CLI-level overrides (None means keep the current value)."""
    out = cfg
    if components is not None:
        out = replace(out, components=components)
    if slic_seed is not None:
        out = replace(out, slic_seed=slic_seed)
    if noise_seed is not None:
        out = replace(out, noise_seed=noise_seed)
    if out_dir is not None:
        out = replace(out, out_dir=out_dir)
    if jobs is not None:
        out = replace(out, jobs=jobs)
    return out
