from __future__ import annotations

import numpy as np
import pytest

from entdyn.channels import amplitude_decay, apply_one_sided, phase_damping
from entdyn.entanglement import concurrence
from entdyn.sampling import random_mixed, rng_for
from entdyn.states import check_density, density_of, pure_chi, rho_phi_plus
from entdyn.tomography import (
    NOISE_NONE,
    STANDARD_SIXTEEN,
    CountRecord,
    TomographyError,
    basis_vector,
    clip_to_density,
    design_matrix,
    expected_counts,
    fidelity,
    linear_inversion,
    mle_reconstruct,
    neg_log_likelihood,
    params_to_t,
    poisson_draw,
    projector,
    read_counts_csv,
    record_to_csv,
    simulate_counts,
    t_to_params,
    write_counts_csv,
    _vectors,
)


def test_circular_conventions():
    r, l = basis_vector("R"), basis_vector("L")
    assert np.allclose(r, [1 / np.sqrt(2), -1j / np.sqrt(2)])
    assert np.allclose(l, [1 / np.sqrt(2), 1j / np.sqrt(2)])
    assert abs(np.vdot(r, l)) < 1e-15


def test_projector_probabilities_on_phi_plus():
    rho = rho_phi_plus()
    assert abs(np.trace(rho @ projector("R", "L")).real - 0.5) < 1e-15
    assert abs(np.trace(rho @ projector("D", "D")).real - 0.5) < 1e-15
    assert abs(np.trace(rho @ projector("H", "V")).real) < 1e-15


def test_design_matrix_conditioning():
    b = design_matrix()
    assert b.shape == (16, 16)
    assert np.linalg.cond(b) < 20
    assert abs(np.linalg.det(b)) > 1e-3


def test_design_matrix_gives_traces(rng):
    b = design_matrix()
    rho = random_mixed(rng)
    direct = [np.trace(rho @ projector(a, c)).real for a, c in STANDARD_SIXTEEN]
    assert np.allclose((b @ rho.reshape(-1)).real, direct, atol=1e-15)


def test_unknown_label():
    with pytest.raises(TomographyError):
        basis_vector("Q")


def test_count_record_validates():
    with pytest.raises(TomographyError):
        CountRecord(STANDARD_SIXTEEN[:15], np.ones(15))
    with pytest.raises(TomographyError):
        CountRecord(STANDARD_SIXTEEN, -np.ones(16))


def test_linear_inversion_noiseless_exact(rng):
    for _ in range(50):
        rho = random_mixed(rng, 1, 4)
        rec = simulate_counts(rho, None, 1e4, noise=NOISE_NONE)
        assert np.max(np.abs(linear_inversion(rec) - rho)) < 1e-12


def test_linear_inversion_noisy_is_nearly_physical():
    worst = []
    for seed in range(20):
        rec = simulate_counts(rho_phi_plus(), None, 1e4, seed=seed)
        worst.append(np.linalg.eigvalsh(linear_inversion(rec))[0])
    assert np.median(worst) > -0.05


def test_clip_to_density_gives_valid_state():
    x = np.diag([0.6, 0.5, -0.1, 0.0]).astype(complex)
    rho = clip_to_density(x)
    check_density(rho)
    assert np.allclose(np.diag(rho).real, [6 / 11, 5 / 11, 0, 0])


def test_fidelity_examples():
    assert abs(fidelity(rho_phi_plus(), np.eye(4) / 4) - 0.25) < 1e-14
    assert abs(fidelity(rho_phi_plus(), rho_phi_plus()) - 1.0) < 1e-12


def test_poisson_sampler_moments():
    rng = np.random.default_rng(0)
    for mean in (0.0, 3.0, 25.0, 400.0):
        draws = np.array([poisson_draw(mean, rng) for _ in range(4000)])
        assert abs(draws.mean() - mean) < 4 * np.sqrt(max(mean, 1) / 4000)
        assert np.all(draws == np.round(draws)) and np.all(draws >= 0)


def test_simulated_counts_are_seeded():
    a = simulate_counts(rho_phi_plus(), phase_damping(0.5), 1e4, seed=9)
    b = simulate_counts(rho_phi_plus(), phase_damping(0.5), 1e4, seed=9)
    c = simulate_counts(rho_phi_plus(), phase_damping(0.5), 1e4, seed=10)
    assert np.array_equal(a.counts, b.counts)
    assert not np.array_equal(a.counts, c.counts)


def test_simulate_counts_validation():
    with pytest.raises(TomographyError):
        simulate_counts(rho_phi_plus(), None, 0)
    with pytest.raises(TomographyError):
        simulate_counts(rho_phi_plus(), None, 10, seed=-1)
    with pytest.raises(TomographyError):
        simulate_counts(rho_phi_plus(), amplitude_decay(0.2), 10, epsilon=0.2)


def test_amplitude_bookkeeping_counts():
    # transmitted branch plus relabelled reflected photons
    rho = density_of(pure_chi(0.2))
    eps = 0.5
    rec = simulate_counts(rho, None, 1000.0, noise=NOISE_NONE, epsilon=eps)
    p = eps * 0.8
    vh = np.zeros((4, 4))
    vh[2, 2] = 1
    k0 = np.diag([1.0, np.sqrt(1 - eps)])
    big = np.kron(np.eye(2), k0)
    expected = expected_counts(big @ rho @ big.T, 1000.0) + expected_counts(vh, 1000.0 * p)
    assert np.allclose(rec.counts, expected, atol=1e-10)


def test_amplitude_bookkeeping_equals_full_channel():
    for a2 in (0.5, 0.2):
        rho = density_of(pure_chi(a2))
        for eps in (0.0, 0.46, 1.0):
            rec = simulate_counts(rho, None, 1e4, noise=NOISE_NONE, epsilon=eps)
            full = expected_counts(apply_one_sided(rho, amplitude_decay(eps)), 1e4)
            assert np.max(np.abs(rec.counts - full)) < 1e-9


def test_reflected_counts_at_vh():
    rho = density_of(pure_chi(0.2))
    with_refl = simulate_counts(rho, None, 1e4, noise=NOISE_NONE, epsilon=0.46)
    i = STANDARD_SIXTEEN.index(("V", "H"))
    assert abs(with_refl.counts[i] - 0.46 * 0.8 * 1e4) < 1e-9


def test_nll_gradient_matches_finite_differences():
    rng = np.random.default_rng(5)
    rec = simulate_counts(random_mixed(rng), None, 500.0, seed=3)
    psis = _vectors(rec.settings)
    x = rng.standard_normal(16) * 3
    _, grad = neg_log_likelihood(x, psis, rec.counts)
    h = 1e-6
    fd = np.array(
        [
            (neg_log_likelihood(x + h * e, psis, rec.counts)[0] - neg_log_likelihood(x - h * e, psis, rec.counts)[0])
            / (2 * h)
            for e in np.eye(16)
        ]
    )
    assert np.max(np.abs(fd - grad)) < 1e-5 * max(1.0, np.max(np.abs(grad)))


def test_mle_noiseless_recovers_state():
    for rho in (rho_phi_plus(), apply_one_sided(rho_phi_plus(), phase_damping(0.3))):
        rec = simulate_counts(rho, None, 1e4, noise=NOISE_NONE)
        est = mle_reconstruct(rec)
        check_density(est)
        assert fidelity(rho, est) > 1 - 1e-8


def test_mle_noisy_is_valid_and_close():
    rec = simulate_counts(rho_phi_plus(), None, 1e4, seed=4)
    est = mle_reconstruct(rec)
    check_density(est)
    assert fidelity(rho_phi_plus(), est) > 0.98


def test_mle_init_params_roundtrip():
    t = np.tril(np.arange(16).reshape(4, 4) + 1j * np.arange(16).reshape(4, 4).T)
    t[np.diag_indices(4)] = np.arange(1, 5)
    assert np.allclose(params_to_t(t_to_params(t)), t)


def test_counts_csv_round_trip(tmp_path):
    rec = simulate_counts(rho_phi_plus(), phase_damping(0.7), 1234.5, seed=2, noise=NOISE_NONE)
    path = tmp_path / "counts.csv"
    write_counts_csv(rec, path)
    back = read_counts_csv(path)
    assert back.settings == rec.settings
    assert np.array_equal(back.counts, rec.counts)
    assert record_to_csv(back) == path.read_text()


def test_counts_csv_rejects_bad_files(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("a,b,c\n")
    with pytest.raises(TomographyError, match="header"):
        read_counts_csv(path)
    path.write_text("setting_a,setting_b,count\nH,H,1\n")
    with pytest.raises(TomographyError, match="16 data rows"):
        read_counts_csv(path)
    rows = ["setting_a,setting_b,count"] + [f"{a},{b},x" for a, b in STANDARD_SIXTEEN]
    path.write_text("\n".join(rows) + "\n")
    with pytest.raises(TomographyError, match="not a number"):
        read_counts_csv(path)


def test_mle_concurrence_converges_with_counts():
    medians = []
    for n_total in (1e3, 1e4, 1e5):
        errs = [
            abs(concurrence(mle_reconstruct(simulate_counts(rho_phi_plus(), None, n_total, seed=s))).concurrence - 1)
            for s in range(40)
        ]
        medians.append(np.median(errs))
    assert medians[0] > medians[1] > medians[2]
