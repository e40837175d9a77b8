"""JSON sweep configuration: parsing and validation.

Errors carry the JSON path of the offending field (``channel.epsilon_grid[2]``)
or the line/column of a syntax error.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import numpy as np

from ..channels import ChannelError, CombLine, SpectralModel, epsilon_from_slabs
from ..states import ScenarioKind, ScenarioSpec, StateError
from ..tomography import NOISE_NONE, NOISE_POISSON


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class PhaseChannelConfig:
    """Phase damping swept either by quartz retardation (in units of the
    center wavelength) through a spectrum, or directly by ``t`` with
    ``kappa = 1 - t``."""

    grid: tuple[float, ...]
    spectrum: SpectralModel | None = None
    delta_n: float = 0.01

    @property
    def direct(self) -> bool:
        return self.spectrum is None


@dataclass(frozen=True)
class AmplitudeChannelConfig:
    grid: tuple[float, ...]  # epsilon values


@dataclass(frozen=True)
class TomographyConfig:
    n_total: float
    seed: int = 0
    noise: str = NOISE_POISSON
    estimator: str = "mle"


@dataclass(frozen=True)
class OutputConfig:
    csv_path: Path | None = None
    svg_path: Path | None = None


@dataclass(frozen=True)
class SweepConfig:
    scenario: ScenarioSpec
    channel: PhaseChannelConfig | AmplitudeChannelConfig
    tomography: TomographyConfig | None = None
    outputs: OutputConfig = OutputConfig()


def _require_obj(value, path: str) -> dict:
    if not isinstance(value, dict):
        raise ConfigError(f"{path}: expected an object")
    return value


def _check_keys(obj: dict, path: str, required: set[str], optional: set[str] = frozenset()) -> None:
    unknown = set(obj) - required - optional
    if unknown:
        raise ConfigError(f"{path}: unknown key(s) {', '.join(sorted(unknown))}")
    missing = required - set(obj)
    if missing:
        raise ConfigError(f"{path}: missing key(s) {', '.join(sorted(missing))}")


def _number(value, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{path}: expected a number, got {value!r}")
    if not np.isfinite(value):
        raise ConfigError(f"{path}: must be finite")
    return float(value)


def _complex(value, path: str) -> complex:
    if isinstance(value, list):
        if len(value) != 2:
            raise ConfigError(f"{path}: complex values are written [re, im]")
        return complex(_number(value[0], f"{path}[0]"), _number(value[1], f"{path}[1]"))
    return complex(_number(value, path))


def _grid(value, path: str) -> tuple[float, ...]:
    if isinstance(value, dict):
        _check_keys(value, path, {"start", "stop", "num"})
        num = value["num"]
        if isinstance(num, bool) or not isinstance(num, int) or num < 1:
            raise ConfigError(f"{path}.num: expected a positive integer")
        pts = np.linspace(_number(value["start"], f"{path}.start"), _number(value["stop"], f"{path}.stop"), num)
        grid = tuple(float(x) for x in pts)
    elif isinstance(value, list):
        grid = tuple(_number(x, f"{path}[{i}]") for i, x in enumerate(value))
    else:
        raise ConfigError(f"{path}: expected a list of numbers or {{start, stop, num}}")
    if not grid:
        raise ConfigError(f"{path}: grid is empty")
    for i in range(1, len(grid)):
        if not grid[i] > grid[i - 1]:
            raise ConfigError(f"{path}[{i}]: grid must be strictly increasing")
    return grid


def _parse_scenario(obj, path="scenario") -> ScenarioSpec:
    obj = _require_obj(obj, path)
    _check_keys(obj, path, {"kind"}, {"alpha_sq", "kappa_a"})
    try:
        kind = ScenarioKind(obj["kind"])
    except ValueError:
        choices = ", ".join(k.value for k in ScenarioKind)
        raise ConfigError(f"{path}.kind: expected one of {choices}, got {obj['kind']!r}") from None
    kwargs: dict[str, Any] = {"kind": kind}
    if kind is ScenarioKind.PURE_ALPHA:
        if "kappa_a" in obj:
            raise ConfigError(f"{path}.kappa_a: not used by PureAlpha")
        if "alpha_sq" not in obj:
            raise ConfigError(f"{path}: missing key(s) alpha_sq")
        kwargs["alpha_sq"] = _number(obj["alpha_sq"], f"{path}.alpha_sq")
    else:
        if "alpha_sq" in obj:
            raise ConfigError(f"{path}.alpha_sq: mixed scenarios start from phi+")
        if "kappa_a" in obj:
            kwargs["kappa_a"] = _complex(obj["kappa_a"], f"{path}.kappa_a")
    try:
        return ScenarioSpec(**kwargs)
    except StateError as exc:
        raise ConfigError(f"{path}: {exc}") from None


def _parse_spectrum(obj, path: str) -> SpectralModel:
    obj = _require_obj(obj, path)
    _check_keys(obj, path, {"kind"}, {"center_wavelength", "fwhm_wavelength", "comb"})
    kwargs: dict[str, Any] = {"kind": obj["kind"]}
    for key in ("center_wavelength", "fwhm_wavelength"):
        if key in obj:
            kwargs[key] = _number(obj[key], f"{path}.{key}")
    if "comb" in obj:
        if obj["kind"] != "FabryPerotComb":
            raise ConfigError(f"{path}.comb: only valid for FabryPerotComb")
        if not isinstance(obj["comb"], list):
            raise ConfigError(f"{path}.comb: expected a list of lines")
        lines = []
        for i, ln in enumerate(obj["comb"]):
            lp = f"{path}.comb[{i}]"
            ln = _require_obj(ln, lp)
            _check_keys(ln, lp, {"weight", "center_offset", "fwhm"})
            lines.append(CombLine(*(_number(ln[k], f"{lp}.{k}") for k in ("weight", "center_offset", "fwhm"))))
        kwargs["comb"] = tuple(lines)
    try:
        return SpectralModel(**kwargs)
    except (ChannelError, ValueError) as exc:
        raise ConfigError(f"{path}: {exc}") from None


def _parse_channel(obj, path="channel"):
    obj = _require_obj(obj, path)
    ctype = obj.get("type")
    if ctype == "phase":
        if "dephasing_grid" in obj:
            _check_keys(obj, path, {"type", "dephasing_grid"})
            grid = _grid(obj["dephasing_grid"], f"{path}.dephasing_grid")
            if grid[0] < 0 or grid[-1] > 1:
                raise ConfigError(f"{path}.dephasing_grid: values must lie in [0, 1]")
            return PhaseChannelConfig(grid)
        _check_keys(obj, path, {"type", "spectrum", "retardation_grid"}, {"delta_n"})
        grid = _grid(obj["retardation_grid"], f"{path}.retardation_grid")
        if grid[0] < 0:
            raise ConfigError(f"{path}.retardation_grid[0]: retardation must be >= 0")
        delta_n = _number(obj.get("delta_n", 0.01), f"{path}.delta_n")
        if delta_n <= 0:
            raise ConfigError(f"{path}.delta_n: must be positive")
        return PhaseChannelConfig(grid, _parse_spectrum(obj["spectrum"], f"{path}.spectrum"), delta_n)
    if ctype == "amplitude":
        if "slab_pairs" in obj:
            _check_keys(obj, path, {"type", "slab_pairs"}, {"r_per_pair"})
            pairs = obj["slab_pairs"]
            if not isinstance(pairs, list) or not pairs:
                raise ConfigError(f"{path}.slab_pairs: expected a nonempty list of integers")
            r = _number(obj.get("r_per_pair", 0.46), f"{path}.r_per_pair")
            eps = []
            for i, n in enumerate(pairs):
                if isinstance(n, bool) or not isinstance(n, int):
                    raise ConfigError(f"{path}.slab_pairs[{i}]: expected an integer")
                try:
                    eps.append(epsilon_from_slabs(n, r))
                except ChannelError as exc:
                    raise ConfigError(f"{path}.slab_pairs[{i}]: {exc}") from None
            grid = _grid(eps, f"{path}.slab_pairs")
        else:
            _check_keys(obj, path, {"type", "epsilon_grid"})
            grid = _grid(obj["epsilon_grid"], f"{path}.epsilon_grid")
        if grid[0] < 0 or grid[-1] > 1:
            raise ConfigError(f"{path}: epsilon values must lie in [0, 1]")
        return AmplitudeChannelConfig(grid)
    raise ConfigError(f"{path}.type: expected 'phase' or 'amplitude', got {ctype!r}")


def _parse_tomography(obj, path="tomography") -> TomographyConfig | None:
    if obj is None:
        return None
    obj = _require_obj(obj, path)
    _check_keys(obj, path, {"n_total"}, {"seed", "noise", "estimator"})
    n_total = _number(obj["n_total"], f"{path}.n_total")
    if n_total <= 0:
        raise ConfigError(f"{path}.n_total: must be positive")
    seed = obj.get("seed", 0)
    if isinstance(seed, bool) or not isinstance(seed, int) or seed < 0:
        raise ConfigError(f"{path}.seed: expected a nonnegative integer")
    noise = obj.get("noise", NOISE_POISSON)
    if noise not in (NOISE_POISSON, NOISE_NONE):
        raise ConfigError(f"{path}.noise: expected '{NOISE_POISSON}' or '{NOISE_NONE}'")
    estimator = obj.get("estimator", "mle")
    if estimator not in ("mle", "linear"):
        raise ConfigError(f"{path}.estimator: expected 'mle' or 'linear'")
    return TomographyConfig(n_total, seed, noise, estimator)


def _parse_outputs(obj, path="outputs") -> OutputConfig:
    obj = _require_obj(obj, path)
    _check_keys(obj, path, set(), {"csv_path", "svg_path"})
    paths = {}
    for key in ("csv_path", "svg_path"):
        if key in obj and obj[key] is not None:
            if not isinstance(obj[key], str) or not obj[key]:
                raise ConfigError(f"{path}.{key}: expected a path string")
            paths[key] = Path(obj[key])
    return OutputConfig(**paths)


def parse_config(data: Any) -> SweepConfig:
    data = _require_obj(data, "<root>")
    _check_keys(data, "<root>", {"scenario", "channel"}, {"tomography", "outputs"})
    return SweepConfig(
        scenario=_parse_scenario(data["scenario"]),
        channel=_parse_channel(data["channel"]),
        tomography=_parse_tomography(data.get("tomography")),
        outputs=_parse_outputs(data.get("outputs", {})),
    )


def load_config(path) -> SweepConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"{path}: cannot read config ({exc.strerror or exc})") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}:{exc.lineno}:{exc.colno}: invalid JSON ({exc.msg})") from None
    try:
        return parse_config(data)
    except ConfigError as exc:
        raise ConfigError(f"{path}: {exc}") from None
