"""Wootters concurrence and the one-sided factorization law.

The spectrum of ``rho @ spin_flip(rho)`` is computed through the Hermitian
similar matrix ``sqrt(rho) @ spin_flip(rho) @ sqrt(rho)``, which has the same
eigenvalues but real, nonnegative ones and a symmetric eigensolver.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Callable

import numpy as np

from . import qmat
from .channels import KrausChannel, apply_one_sided
from .states import check_density, check_pure, density_of, rho_phi_plus

LAW_TOL = 1e-9
ESD_T_TOL = 1e-6
ESD_MAX_ITERS = 60

# Eigenvalues of sqrt(rho) rho~ sqrt(rho) are O(1); a structurally zero one
# comes out of the eigensolver at ~1e-17 and its square root would leave a
# ~3e-9 artefact in Gamma. Anything at or below this floor is treated as 0.
LAMBDA_FLOOR = 1e-14

SIGMA_YY = qmat.kron(qmat.SIGMA_Y, qmat.SIGMA_Y)


class NoSuddenDeathError(ValueError):
    """Gamma does not change sign over the requested parameter range."""


@dataclass(frozen=True)
class ConcurrenceResult:
    concurrence: float
    gamma: float
    sqrt_lambdas: tuple[float, float, float, float]


class LawMode(str, Enum):
    PURE_EQUALITY = "PureEquality"
    MIXED_BOUND = "MixedBound"


@dataclass(frozen=True)
class FactorizationReport:
    c_left: float
    c_right: float
    mode: LawMode
    gamma_left: float = float("nan")

    @property
    def difference(self) -> float:
        return self.c_left - self.c_right

    @property
    def holds(self) -> bool:
        if self.mode is LawMode.PURE_EQUALITY:
            return abs(self.difference) < LAW_TOL
        return self.difference <= LAW_TOL


def spin_flip(rho) -> np.ndarray:
    """Wootters tilde: ``(sy x sy) conj(rho) (sy x sy)``."""
    rho = qmat.as_matrix(rho)
    return SIGMA_YY @ rho.conj() @ SIGMA_YY


def concurrence(rho) -> ConcurrenceResult:
    rho = check_density(rho)
    root = qmat.sqrt_psd(rho)
    r = root @ spin_flip(rho) @ root
    r = 0.5 * (r + r.conj().T)
    lam = qmat.clamp_psd_eigenvalues(qmat.eigvals_hermitian(r))
    lam = np.where(lam <= LAMBDA_FLOOR, 0.0, lam)
    s = np.sqrt(lam)
    gamma = float(s[0] - s[1] - s[2] - s[3])
    return ConcurrenceResult(max(0.0, gamma), gamma, tuple(float(x) for x in s))


def concurrence_value(rho) -> float:
    return concurrence(rho).concurrence


def concurrence_pure(alpha_sq: float) -> float:
    """Closed form ``2 alpha beta`` for ``alpha|HH> + beta|VV>``."""
    if not 0.0 <= alpha_sq <= 1.0:
        raise ValueError(f"alpha_sq must lie in [0, 1], got {alpha_sq}")
    return 2.0 * np.sqrt(alpha_sq * (1.0 - alpha_sq))


def evolved_phi_plus_concurrence(ch: KrausChannel) -> float:
    return concurrence(apply_one_sided(rho_phi_plus(), ch, "B")).concurrence


def factorization_pure(chi, ch: KrausChannel) -> FactorizationReport:
    """Compare C[(1 x $)|chi><chi|] with C[(1 x $)|phi+><phi+|] * C(|chi>)."""
    rho = density_of(check_pure(chi))
    left = concurrence(apply_one_sided(rho, ch, "B"))
    right = evolved_phi_plus_concurrence(ch) * concurrence(rho).concurrence
    return FactorizationReport(left.concurrence, right, LawMode.PURE_EQUALITY, left.gamma)


def bound_mixed(rho0, ch: KrausChannel) -> FactorizationReport:
    """Evaluate the mixed-state upper bound C[(1 x $)rho0] <= C[(1 x $)phi+] * C(rho0)."""
    rho0 = check_density(rho0)
    left = concurrence(apply_one_sided(rho0, ch, "B"))
    right = evolved_phi_plus_concurrence(ch) * concurrence(rho0).concurrence
    return FactorizationReport(left.concurrence, right, LawMode.MIXED_BOUND, left.gamma)


def evolved_gamma(rho0, family: Callable[[float], KrausChannel], t: float) -> float:
    return concurrence(apply_one_sided(rho0, family(t), "B")).gamma


def esd_threshold(
    rho0,
    family: Callable[[float], KrausChannel],
    t_range: tuple[float, float],
    tol: float = ESD_T_TOL,
) -> float:
    """Locate the sudden-death point where Gamma of the evolved state crosses zero.

    Bisection on ``t`` between ``t_range[0]`` (Gamma > 0) and ``t_range[1]``
    (Gamma <= 0). Raises ``NoSuddenDeathError`` without a sign change.
    """
    lo, hi = float(t_range[0]), float(t_range[1])
    g_lo = evolved_gamma(rho0, family, lo)
    g_hi = evolved_gamma(rho0, family, hi)
    if not (g_lo > 0.0 and g_hi <= 0.0):
        raise NoSuddenDeathError(
            f"no ESD in range [{lo}, {hi}]: Gamma goes from {g_lo:.6g} to {g_hi:.6g}"
        )
    for _ in range(ESD_MAX_ITERS):
        if abs(hi - lo) <= tol:
            break
        mid = 0.5 * (lo + hi)
        if evolved_gamma(rho0, family, mid) > 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
