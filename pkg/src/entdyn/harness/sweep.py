"""Channel-parameter sweeps over a prepared initial state."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from ..channels import (
    KrausChannel,
    QuartzRetardation,
    amplitude_decay,
    apply_one_sided,
    kappa_from_spectrum,
    phase_damping,
)
from ..entanglement import bound_mixed, concurrence, factorization_pure
from ..states import pure_chi, scenario_state
from ..tomography import clip_to_density, linear_inversion, mle_reconstruct, simulate_counts
from .config import AmplitudeChannelConfig, SweepConfig


@dataclass(frozen=True)
class SweepRow:
    param: float
    c_left: float
    c_right: float
    gamma_left: float
    c_left_tomo: float | None = None


def channel_family(cfg: SweepConfig) -> Callable[[float], KrausChannel]:
    """Map a grid parameter to the channel it stands for."""
    ch = cfg.channel
    if isinstance(ch, AmplitudeChannelConfig):
        return amplitude_decay
    if ch.direct:
        return lambda t: phase_damping(1.0 - t)
    spectrum = ch.spectrum

    def family(waves: float) -> KrausChannel:
        ret = QuartzRetardation.from_waves(waves, spectrum.center_wavelength, ch.delta_n)
        return phase_damping(kappa_from_spectrum(ret, spectrum))

    return family


def point_seed(seed: int, index: int) -> int:
    return int(np.random.SeedSequence([int(seed), int(index)]).generate_state(1, np.uint64)[0] >> 1)


def tomography_concurrence(cfg: SweepConfig, rho0, param: float, ch: KrausChannel, index: int) -> float:
    tomo = cfg.tomography
    seed = point_seed(tomo.seed, index)
    if isinstance(cfg.channel, AmplitudeChannelConfig):
        rec = simulate_counts(rho0, None, tomo.n_total, seed, tomo.noise, epsilon=param)
    else:
        rec = simulate_counts(rho0, ch, tomo.n_total, seed, tomo.noise)
    if tomo.estimator == "mle":
        estimate = mle_reconstruct(rec)
    else:
        # linear inversion can leave small negative eigenvalues
        estimate = clip_to_density(linear_inversion(rec))
    return concurrence(estimate).concurrence


def evaluate_point(cfg: SweepConfig, family, rho0, index: int, param: float) -> SweepRow:
    ch = family(param)
    if cfg.scenario.is_pure:
        rep = factorization_pure(pure_chi(cfg.scenario.alpha_sq), ch)
    else:
        rep = bound_mixed(rho0, ch)
    tomo = None
    if cfg.tomography is not None:
        tomo = tomography_concurrence(cfg, rho0, param, ch, index)
    return SweepRow(param, rep.c_left, rep.c_right, rep.gamma_left, tomo)


def run_sweep(cfg: SweepConfig) -> list[SweepRow]:
    family = channel_family(cfg)
    rho0 = scenario_state(cfg.scenario)
    return [evaluate_point(cfg, family, rho0, i, p) for i, p in enumerate(cfg.channel.grid)]


def evolved_state(cfg: SweepConfig, param: float):
    return apply_one_sided(scenario_state(cfg.scenario), channel_family(cfg)(param), "B")
