"""Simulated 16-setting polarization tomography and state reconstruction.

Counts are simulated per analyzer setting ``(a, b)`` as ``N * Tr(rho Pi_ab)``,
optionally with Poisson noise. For the amplitude-decay channel the record is
assembled from the transmitted branch plus the reflected pairs distributed
over settings by their detection probability, which reproduces the full
channel expectation exactly.

Two estimators are provided: linear inversion of the 16x16 design matrix and
a maximum-likelihood fit over the Cholesky form ``rho = T^H T / Tr(T^H T)``.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.optimize import minimize

from . import qmat
from .channels import KrausChannel, apply_one_sided, reflected_branch, transmitted_branch

_S = 1.0 / math.sqrt(2.0)
BASIS_VECTORS = {
    "H": np.array([1.0, 0.0], dtype=complex),
    "V": np.array([0.0, 1.0], dtype=complex),
    "D": np.array([_S, _S], dtype=complex),
    "A": np.array([_S, -_S], dtype=complex),
    "R": np.array([_S, -1j * _S], dtype=complex),
    "L": np.array([_S, 1j * _S], dtype=complex),
}

STANDARD_SIXTEEN = (
    ("H", "H"), ("H", "V"), ("V", "V"), ("V", "H"),
    ("R", "H"), ("R", "V"), ("D", "V"), ("D", "H"),
    ("D", "R"), ("D", "D"), ("R", "D"), ("H", "D"),
    ("V", "D"), ("V", "L"), ("H", "L"), ("R", "L"),
)

NOISE_POISSON = "poisson"
NOISE_NONE = "none"
POISSON_INVERSION_MAX_MEAN = 30.0
CSV_HEADER = ("setting_a", "setting_b", "count")
CHOLESKY_JITTER = 1e-6


class TomographyError(ValueError):
    pass


@dataclass(frozen=True)
class CountRecord:
    settings: tuple[tuple[str, str], ...]
    counts: np.ndarray
    total_per_setting: float = float("nan")
    seed: int | None = None
    noise: str = NOISE_NONE

    def __post_init__(self):
        counts = np.asarray(self.counts, dtype=float).reshape(-1)
        if len(self.settings) != 16 or counts.shape != (16,):
            raise TomographyError("a count record needs exactly 16 settings and 16 counts")
        if not np.all(np.isfinite(counts)) or np.any(counts < 0):
            raise TomographyError("counts must be finite and nonnegative")
        for a, b in self.settings:
            basis_vector(a)
            basis_vector(b)
        object.__setattr__(self, "settings", tuple((str(a), str(b)) for a, b in self.settings))
        object.__setattr__(self, "counts", counts)


def basis_vector(label: str) -> np.ndarray:
    try:
        return BASIS_VECTORS[label].copy()
    except KeyError:
        raise TomographyError(f"unknown polarization label {label!r}") from None


def projector(a: str, b: str) -> np.ndarray:
    psi = np.kron(basis_vector(a), basis_vector(b))
    return np.outer(psi, psi.conj())


def standard_sixteen() -> list[tuple[str, str]]:
    return list(STANDARD_SIXTEEN)


def design_matrix(settings=STANDARD_SIXTEEN) -> np.ndarray:
    """Rows are flattened projectors so that ``B @ rho.ravel() = Tr(rho Pi)``.

    ``Tr(rho Pi) = sum_ij rho[i, j] Pi[j, i]``, hence the transpose.
    """
    return np.array([projector(a, b).T.reshape(-1) for a, b in settings])


def expected_counts(rho, n_total: float, settings=STANDARD_SIXTEEN) -> np.ndarray:
    rho = qmat.as_matrix(rho)
    return np.array([n_total * np.trace(rho @ projector(a, b)).real for a, b in settings])


def _setting_rng(seed: int, index: int) -> np.random.Generator:
    # stream keyed on (seed, setting) so draws do not depend on evaluation order
    return np.random.default_rng([int(seed), int(index)])


def poisson_draw(mean: float, rng: np.random.Generator) -> float:
    """Poisson variate: sequential-search inversion for small means, rounded normal above."""
    if mean <= 0.0:
        return 0.0
    if mean < POISSON_INVERSION_MAX_MEAN:
        u = rng.random()
        k = 0
        p = math.exp(-mean)
        cdf = p
        while u > cdf and p > 0.0:
            k += 1
            p *= mean / k
            cdf += p
        return float(k)
    draw = mean + math.sqrt(mean) * rng.standard_normal()
    return float(max(0.0, math.floor(draw + 0.5)))


def simulate_counts(
    rho_pre_channel,
    ch: KrausChannel | None,
    n_total: float,
    seed: int = 0,
    noise: str = NOISE_POISSON,
    epsilon: float | None = None,
) -> CountRecord:
    """Coincidence counts for the 16 standard settings.

    Pass ``epsilon`` (with ``ch=None``) to use the amplitude-decay bookkeeping:
    transmitted counts from the K0 branch plus reflected counts
    ``n_total * p * Tr(rho_r Pi)``.
    """
    if n_total <= 0:
        raise TomographyError(f"n_total must be positive, got {n_total}")
    if seed < 0:
        raise TomographyError(f"seed must be nonnegative, got {seed}")
    if noise not in (NOISE_POISSON, NOISE_NONE):
        raise TomographyError(f"noise must be {NOISE_POISSON!r} or {NOISE_NONE!r}, got {noise!r}")
    rho = qmat.as_matrix(rho_pre_channel)
    if epsilon is not None:
        if ch is not None:
            raise TomographyError("give either a channel or an amplitude-decay epsilon, not both")
        expected = expected_counts(transmitted_branch(rho, epsilon), n_total)
        if epsilon > 0.0:
            p, rho_r = reflected_branch(rho, epsilon)
            if rho_r is not None:
                expected = expected + expected_counts(rho_r, n_total * p)
    else:
        rho_out = rho if ch is None else apply_one_sided(rho, ch, "B")
        expected = expected_counts(rho_out, n_total)
    expected = np.clip(expected, 0.0, None)
    if noise == NOISE_POISSON:
        counts = np.array([poisson_draw(m, _setting_rng(seed, i)) for i, m in enumerate(expected)])
    else:
        counts = expected
    return CountRecord(STANDARD_SIXTEEN, counts, float(n_total), seed, noise)


def linear_inversion(rec: CountRecord) -> np.ndarray:
    """Hermitian, unit-trace solution of the linear tomography system (not PSD-projected)."""
    b = design_matrix(rec.settings)
    if abs(np.linalg.det(b)) < 1e-12:
        raise TomographyError("measurement settings are not tomographically complete")
    x = np.linalg.solve(b, rec.counts.astype(complex)).reshape(4, 4)
    x = 0.5 * (x + x.conj().T)
    tr = np.trace(x).real
    if tr <= 0:
        raise TomographyError("counts give a non-positive trace")
    return x / tr


def clip_to_density(x) -> np.ndarray:
    """Zero negative eigenvalues and renormalize."""
    w, v = qmat.eig_hermitian(x)
    w = np.clip(w, 0.0, None)
    if w.sum() <= 0:
        raise TomographyError("estimate has no positive weight")
    rho = (v * (w / w.sum())) @ v.conj().T
    return 0.5 * (rho + rho.conj().T)


# lower-triangular index layout for the 16 real Cholesky parameters
_DIAG = [(i, i) for i in range(4)]
_OFF = [(i, j) for i in range(4) for j in range(i)]


def params_to_t(x: np.ndarray) -> np.ndarray:
    t = np.zeros((4, 4), dtype=complex)
    for k, (i, j) in enumerate(_DIAG):
        t[i, j] = x[k]
    for k, (i, j) in enumerate(_OFF):
        t[i, j] = x[4 + 2 * k] + 1j * x[5 + 2 * k]
    return t


def t_to_params(t: np.ndarray) -> np.ndarray:
    x = np.zeros(16)
    for k, (i, j) in enumerate(_DIAG):
        x[k] = t[i, j].real
    for k, (i, j) in enumerate(_OFF):
        x[4 + 2 * k] = t[i, j].real
        x[5 + 2 * k] = t[i, j].imag
    return x


def _cholesky_lower_for(m: np.ndarray, jitter: float) -> np.ndarray:
    """Lower-triangular T with T^H T = m for positive semidefinite m.

    Pivots that vanish (rank-deficient m) are replaced by ``jitter`` on the
    factor's diagonal with a zero column beneath, so the factor exists for
    pure states and the optimizer starts strictly inside the cone.
    """
    # reversing the index order turns the usual L L^H factor into T^H T
    rev = np.eye(4)[::-1]
    a = rev @ m @ rev
    low = np.zeros((4, 4), dtype=complex)
    for j in range(4):
        d = a[j, j].real - np.sum(np.abs(low[j, :j]) ** 2)
        if d <= jitter * jitter:
            low[j, j] = jitter
            continue
        low[j, j] = np.sqrt(d)
        for i in range(j + 1, 4):
            low[i, j] = (a[i, j] - np.sum(low[i, :j] * low[j, :j].conj())) / low[j, j]
    return rev @ low.conj().T @ rev


def _vectors(settings) -> np.ndarray:
    return np.array([np.kron(basis_vector(a), basis_vector(b)) for a, b in settings])


def neg_log_likelihood(x: np.ndarray, psis: np.ndarray, counts: np.ndarray) -> tuple[float, np.ndarray]:
    """Poisson NLL ``sum(n_m - c_m ln n_m)`` with ``n_m = |T psi_m|^2`` and its gradient.

    The value is shifted by the constant ``sum(c_m ln c_m - c_m)`` so a perfect
    fit scores 0; that keeps late likelihood improvements visible to the
    optimizer's relative-reduction test.
    """
    t = params_to_t(x)
    u = psis @ t.T  # row m is T @ psi_m
    nbar = np.sum(np.abs(u) ** 2, axis=1)
    pos = counts > 0
    if np.any(nbar[pos] <= 0.0):
        return math.inf, np.zeros_like(x)
    cp = counts[pos]
    value = float(np.sum(nbar) - np.sum(cp) - np.sum(cp * np.log(nbar[pos] / cp)))
    w = np.ones_like(nbar)
    w[pos] -= counts[pos] / nbar[pos]
    # dL/dT_ij (Wirtinger, times 2) = 2 sum_m w_m u_mi conj(psi_mj)
    g = 2.0 * (u * w[:, None]).T @ psis.conj()
    grad = np.zeros_like(x)
    for k, (i, j) in enumerate(_DIAG):
        grad[k] = g[i, j].real
    for k, (i, j) in enumerate(_OFF):
        grad[4 + 2 * k] = g[i, j].real
        grad[5 + 2 * k] = g[i, j].imag
    return value, grad


def mle_reconstruct(rec: CountRecord, max_iters: int = 10_000, tol: float = 1e-10) -> np.ndarray:
    """Maximum-likelihood density matrix for a count record.

    The overall intensity is part of the fit (``T`` is unnormalized), so the
    record's nominal ``total_per_setting`` is not needed. Initialization is the
    eigenvalue-clipped linear-inversion estimate, Cholesky-factored with a
    small jitter on vanishing pivots.
    """
    counts = rec.counts
    psis = _vectors(rec.settings)
    rho0 = clip_to_density(linear_inversion(rec))
    model = np.array([np.vdot(p, rho0 @ p).real for p in psis])
    intensity = counts.sum() / model.sum()
    x0 = t_to_params(_cholesky_lower_for(intensity * rho0, CHOLESKY_JITTER * np.sqrt(intensity)))
    res = minimize(
        neg_log_likelihood,
        x0,
        args=(psis, counts),
        jac=True,
        method="L-BFGS-B",
        options={"maxiter": int(max_iters), "ftol": tol, "gtol": 1e-12 * max(1.0, counts.sum())},
    )
    if not np.isfinite(res.fun):
        raise TomographyError("likelihood became non-finite during reconstruction")
    t = params_to_t(res.x)
    rho = t.conj().T @ t
    rho = 0.5 * (rho + rho.conj().T)
    return rho / np.trace(rho).real


def fidelity(a, b) -> float:
    """Uhlmann fidelity ``(Tr sqrt(sqrt(a) b sqrt(a)))^2``."""
    root = qmat.sqrt_psd(qmat.as_matrix(a))
    m = root @ qmat.as_matrix(b) @ root
    w = qmat.clamp_psd_eigenvalues(qmat.eigvals_hermitian(0.5 * (m + m.conj().T)))
    return float(min(1.0, np.sum(np.sqrt(w)) ** 2))


def format_count(value: float) -> str:
    return f"{value:.17g}"


def record_to_csv(rec: CountRecord) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for (a, b), c in zip(rec.settings, rec.counts):
        writer.writerow((a, b, format_count(float(c))))
    return buf.getvalue()


def write_counts_csv(rec: CountRecord, path) -> None:
    path = Path(path)
    try:
        path.write_text(record_to_csv(rec), encoding="utf-8", newline="")
    except OSError as exc:
        raise OSError(f"cannot write count record to {path}: {exc}") from exc


def read_counts_csv(path) -> CountRecord:
    path = Path(path)
    with path.open(encoding="utf-8", newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or tuple(rows[0]) != CSV_HEADER:
        raise TomographyError(f"{path}: expected header {','.join(CSV_HEADER)}")
    body = rows[1:]
    if len(body) != 16:
        raise TomographyError(f"{path}: expected 16 data rows, found {len(body)}")
    settings = []
    counts = []
    for lineno, row in enumerate(body, start=2):
        if len(row) != 3:
            raise TomographyError(f"{path}:{lineno}: expected 3 fields, got {len(row)}")
        settings.append((row[0], row[1]))
        try:
            counts.append(float(row[2]))
        except ValueError:
            raise TomographyError(f"{path}:{lineno}: count {row[2]!r} is not a number") from None
    if tuple(settings) != STANDARD_SIXTEEN:
        raise TomographyError(f"{path}: settings are not in the standard 16-setting order")
    return CountRecord(tuple(settings), np.array(counts))
