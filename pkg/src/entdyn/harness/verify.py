"""Seeded property suites run by ``entdyn verify``."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from ..channels import (
    QuartzRetardation,
    SpectralModel,
    amplitude_decay,
    apply_one_sided,
    completeness_error,
    gaussian_kappa_closed_form,
    kappa_from_spectrum,
    phase_damping,
    random_cptp,
)
from ..entanglement import LAW_TOL, bound_mixed, concurrence, concurrence_pure, factorization_pure
from ..sampling import haar_unitary, random_chi, random_mixed, random_pure, rng_for
from ..states import apply_local, density_of, pure_chi, rho_phi_plus

# suite identifiers keep per-sample seed streams disjoint across suites
_FACT, _MIXED, _CHAN, _BOUNDS = 1, 2, 3, 4


@dataclass(frozen=True)
class SuiteResult:
    name: str
    passed: bool
    detail: str


def _kraus_count(i: int) -> int:
    return 1 + i % 4


def factorization_suite(samples: int, seed: int) -> SuiteResult:
    worst = 0.0
    for i in range(samples):
        rng = rng_for(seed, _FACT, i)
        chi = random_chi(rng) if i % 2 == 0 else random_pure(rng)
        ch = random_cptp(int(rng.integers(2**62)), _kraus_count(i))
        worst = max(worst, abs(factorization_pure(chi, ch).difference))
    return SuiteResult("factorization equality", worst < LAW_TOL, f"max |C_LP - C_RP| = {worst:.3e}")


def mixed_bound_suite(samples: int, seed: int) -> SuiteResult:
    violations = 0
    worst = -np.inf
    for i in range(samples):
        rng = rng_for(seed, _MIXED, i)
        rho0 = random_mixed(rng)
        ch = random_cptp(int(rng.integers(2**62)), _kraus_count(i))
        rep = bound_mixed(rho0, ch)
        worst = max(worst, rep.difference)
        violations += not rep.holds
    return SuiteResult(
        "mixed bound", violations == 0, f"violations = {violations}, max C_LM - C_RM = {worst:.3e}"
    )


def channel_suite(samples: int, seed: int) -> SuiteResult:
    channels = [amplitude_decay(e) for e in np.linspace(0, 1, 11)]
    channels += [phase_damping(k * np.exp(0.7j * k)) for k in np.linspace(0, 1, 11)]
    channels += [random_cptp(int(rng_for(seed, _CHAN, i).integers(2**62)), _kraus_count(i)) for i in range(samples)]
    worst_c = max(completeness_error(ch.operators) for ch in channels)
    worst_t = 0.0
    for i, ch in enumerate(channels):
        rho = random_mixed(rng_for(seed, _CHAN, samples + i))
        worst_t = max(worst_t, abs(np.trace(apply_one_sided(rho, ch, "B")).real - 1.0))
    ok = worst_c <= 1e-12 and worst_t <= 1e-12
    return SuiteResult(
        "channel completeness", ok, f"max |sum K^H K - I| = {worst_c:.3e}, max trace error = {worst_t:.3e}"
    )


def concurrence_bounds_suite(samples: int, seed: int) -> SuiteResult:
    lo, hi, lu = np.inf, -np.inf, 0.0
    for i in range(samples):
        rng = rng_for(seed, _BOUNDS, i)
        rho = random_mixed(rng, 1, 4)
        c = concurrence(rho).concurrence
        lo, hi = min(lo, c), max(hi, c)
        moved = apply_local(apply_local(rho, haar_unitary(rng), "A"), haar_unitary(rng), "B")
        lu = max(lu, abs(concurrence(moved).concurrence - c))
    ok = lo >= 0.0 and hi <= 1.0 and lu < LAW_TOL
    return SuiteResult(
        "concurrence bounds", ok, f"C in [{lo:.4f}, {hi:.4f}], local-unitary drift = {lu:.3e}"
    )


def analytic_suite(samples: int, seed: int) -> SuiteResult:
    worst = 0.0
    for a2 in (0.5, 0.2, 0.1):
        rho = density_of(pure_chi(a2))
        c0 = concurrence_pure(a2)
        for eps in np.linspace(0, 1, 11):
            c = concurrence(apply_one_sided(rho, amplitude_decay(eps), "B")).concurrence
            worst = max(worst, abs(c - c0 * np.sqrt(1.0 - eps)))
        for k in np.linspace(0, 1, 21):
            c = concurrence(apply_one_sided(rho, phase_damping(k), "B")).concurrence
            worst = max(worst, abs(c - c0 * k))
    for k in np.linspace(0, 1, 21):
        c = concurrence(apply_one_sided(rho_phi_plus(), phase_damping(k), "B")).concurrence
        worst = max(worst, abs(c - k))
    spec = SpectralModel()
    worst_k = 0.0
    for waves in np.linspace(0, 300, 31):
        ret = QuartzRetardation.from_waves(waves)
        worst_k = max(worst_k, abs(kappa_from_spectrum(ret, spec) - gaussian_kappa_closed_form(ret, spec)))
    ok = worst < 1e-12 and worst_k < 1e-6
    return SuiteResult(
        "analytic oracles", ok, f"max concurrence error = {worst:.3e}, max kappa quadrature error = {worst_k:.3e}"
    )


SUITES: tuple[Callable[[int, int], SuiteResult], ...] = (
    factorization_suite,
    mixed_bound_suite,
    channel_suite,
    concurrence_bounds_suite,
    analytic_suite,
)


def run_all(samples: int, seed: int) -> list[SuiteResult]:
    return [suite(samples, seed) for suite in SUITES]
