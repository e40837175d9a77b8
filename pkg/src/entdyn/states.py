"""Initial two-photon polarization states and local waveplate operations.

Basis order is (HH, HV, VH, VV) with H -> 0 and V -> 1; the first factor is
mode a (side ``"A"``), the second mode b (side ``"B"``).
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import qmat

NORM_TOL = 1e-12
DENSITY_TOL = 1e-10
UNITARY_TOL = 1e-10
DEFAULT_KAPPA_A = 0.4


class StateError(ValueError):
    pass


class ScenarioKind(str, Enum):
    PURE_ALPHA = "PureAlpha"
    MIXED_Q1 = "MixedQ1"
    MIXED_HWP1_Q1 = "MixedHWP1Q1"


@dataclass(frozen=True)
class ScenarioSpec:
    """Which initial state to prepare before the noisy channel."""

    kind: ScenarioKind
    alpha_sq: float = 0.5
    kappa_a: complex = DEFAULT_KAPPA_A

    def __post_init__(self):
        object.__setattr__(self, "kind", ScenarioKind(self.kind))
        if not 0.0 <= self.alpha_sq <= 1.0:
            raise StateError(f"alpha_sq must lie in [0, 1], got {self.alpha_sq}")
        if abs(self.kappa_a) > 1.0:
            raise StateError(f"|kappa_a| must be <= 1, got {abs(self.kappa_a)}")

    @property
    def is_pure(self) -> bool:
        return self.kind is ScenarioKind.PURE_ALPHA


def _check_side(side: str) -> str:
    if side not in ("A", "B"):
        raise StateError(f"side must be 'A' or 'B', got {side!r}")
    return side


def lift(op: np.ndarray, side: str) -> np.ndarray:
    """Embed a single-qubit operator into the two-qubit space."""
    if _check_side(side) == "A":
        return qmat.kron(op, qmat.I2)
    return qmat.kron(qmat.I2, op)


def check_pure(psi) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex).reshape(-1)
    if psi.shape != (4,):
        raise StateError(f"two-qubit pure state needs 4 amplitudes, got {psi.shape}")
    norm = np.linalg.norm(psi)
    if abs(norm - 1.0) > NORM_TOL:
        raise StateError(f"state is not normalized (norm {norm!r})")
    return psi


def check_density(rho, tol: float = DENSITY_TOL) -> np.ndarray:
    """Validate a 4x4 density matrix and return it as a complex array."""
    rho = qmat.as_matrix(rho)
    if rho.shape != (4, 4):
        raise StateError(f"density matrix must be 4x4, got {rho.shape}")
    herr = qmat.hermiticity_error(rho)
    if herr > tol:
        raise StateError(f"density matrix is not Hermitian (error {herr:.3e})")
    tr = np.trace(rho).real
    if abs(tr - 1.0) > tol:
        raise StateError(f"density matrix trace is {tr!r}, expected 1")
    w = qmat.eigvals_hermitian(rho)
    if w[-1] < -tol:
        raise StateError(f"density matrix has negative eigenvalue {w[-1]:.3e}")
    return rho


def pure_chi(alpha_sq: float) -> np.ndarray:
    """Amplitudes of alpha|HH> + beta|VV> with real nonnegative alpha, beta."""
    if not 0.0 <= alpha_sq <= 1.0:
        raise StateError(f"alpha_sq must lie in [0, 1], got {alpha_sq}")
    return np.array([np.sqrt(alpha_sq), 0.0, 0.0, np.sqrt(1.0 - alpha_sq)], dtype=complex)


def phi_plus() -> np.ndarray:
    return pure_chi(0.5)


def density_of(psi) -> np.ndarray:
    psi = check_pure(psi)
    return np.outer(psi, psi.conj())


def rho_phi_plus() -> np.ndarray:
    return density_of(phi_plus())


def waveplate_jones(kind: str, theta: float) -> np.ndarray:
    """Jones matrix of a half- or quarter-wave plate with fast axis at ``theta``.

    The quarter-wave plate carries a fixed ``exp(-i pi/4)`` global phase.
    """
    c, s = np.cos(theta), np.sin(theta)
    if kind == "half":
        c2, s2 = np.cos(2 * theta), np.sin(2 * theta)
        return np.array([[c2, s2], [s2, -c2]], dtype=complex)
    if kind == "quarter":
        off = (1 - 1j) * s * c
        return np.exp(-1j * np.pi / 4) * np.array(
            [[c * c + 1j * s * s, off], [off, s * s + 1j * c * c]], dtype=complex
        )
    raise StateError(f"unknown waveplate kind {kind!r} (expected 'half' or 'quarter')")


HADAMARD = waveplate_jones("half", np.pi / 8)


def apply_local(rho, u, side: str) -> np.ndarray:
    u = qmat.as_matrix(u)
    if u.shape != (2, 2):
        raise StateError(f"local operator must be 2x2, got {u.shape}")
    if np.max(np.abs(u.conj().T @ u - qmat.I2)) > UNITARY_TOL:
        raise StateError("local operator is not unitary")
    big = lift(u, side)
    return big @ qmat.as_matrix(rho) @ big.conj().T


def local_dephase(rho, kappa: complex, side: str) -> np.ndarray:
    """Scale the H/V coherences of one qubit by ``kappa`` (``rho_VH -> kappa rho_VH``)."""
    if abs(kappa) > 1.0:
        raise StateError(f"|kappa| must be <= 1, got {abs(kappa)}")
    rho = qmat.as_matrix(rho)
    # per-index factor d[i]: 1 for H, kappa for V on the chosen qubit
    bit = np.array([0, 0, 1, 1]) if _check_side(side) == "A" else np.array([0, 1, 0, 1])
    d = np.where(bit == 1, complex(kappa), 1.0)
    mask = np.outer(d, d.conj())
    same = bit[:, None] == bit[None, :]
    # populations and same-polarization blocks untouched
    mask = np.where(same, 1.0, mask)
    return rho * mask


def scenario_state(spec: ScenarioSpec) -> np.ndarray:
    if spec.kind is ScenarioKind.PURE_ALPHA:
        return density_of(pure_chi(spec.alpha_sq))
    rho = rho_phi_plus()
    if spec.kind is ScenarioKind.MIXED_HWP1_Q1:
        rho = apply_local(rho, HADAMARD, "A")
    return local_dephase(rho, spec.kappa_a, "A")
