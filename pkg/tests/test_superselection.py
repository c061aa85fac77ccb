import numpy as np
import pytest

from declab import (
    DimensionMismatch,
    InsufficientData,
    NonDecaying,
    NotComplete,
    NotIdempotent,
    NotOrthogonal,
    SectorStructure,
    bloch_to_density,
    block_diagonal_sectors,
    fit_power_law_decay,
    off_diagonal_norms,
    random_density,
    sector_probabilities,
    sector_project,
    validate_sectors,
)

Z_SECTORS = SectorStructure([np.diag([1.0, 0.0]), np.diag([0.0, 1.0])])


def random_sectors(dim, n_sectors, rng):
    """Random orthonormal frame chopped into n_sectors blocks."""
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    q, _ = np.linalg.qr(g)
    splits = np.sort(rng.choice(np.arange(1, dim), size=n_sectors - 1, replace=False))
    projectors = []
    for lo, hi in zip(np.r_[0, splits], np.r_[splits, dim]):
        block = q[:, lo:hi]
        projectors.append(block @ block.conj().T)
    return SectorStructure(projectors)


# --- validation


def test_validate_accepts_z_sectors():
    assert validate_sectors(Z_SECTORS) is Z_SECTORS


def test_validate_rejects_duplicate_projector():
    s = SectorStructure([np.diag([1.0, 0.0]), np.diag([1.0, 0.0])])
    with pytest.raises(NotOrthogonal) as err:
        validate_sectors(s)
    assert err.value.pair == (0, 1)


def test_validate_rejects_incomplete_family():
    with pytest.raises(NotComplete):
        validate_sectors(SectorStructure([np.diag([1.0, 0.0])]))


def test_validate_rejects_non_idempotent():
    s = SectorStructure([np.diag([0.5, 0.0]), np.diag([0.5, 1.0])])
    with pytest.raises(NotIdempotent) as err:
        validate_sectors(s)
    assert err.value.index == 0


def test_validate_rejects_non_hermitian_projector():
    p = np.array([[1.0, 1.0], [0.0, 0.0]])
    with pytest.raises(NotIdempotent):
        validate_sectors(SectorStructure([p, np.eye(2) - p]))


def test_block_diagonal_sectors_are_valid():
    s = validate_sectors(block_diagonal_sectors([2, 3, 1]))
    assert s.dim == 6
    assert s.labels == ("0", "1", "2")


# --- projection channel


def test_project_fixes_block_diagonal_states():
    rho = bloch_to_density([0, 0, 0.7])
    out = sector_project(rho, Z_SECTORS)
    assert np.allclose(out.matrix, rho.matrix, atol=1e-14)


def test_project_kills_coherences():
    out = sector_project(bloch_to_density([1, 0, 0]), Z_SECTORS)
    assert np.allclose(out.matrix, np.eye(2) / 2, atol=1e-14)


def test_project_output_commutes_with_projectors():
    rng = np.random.default_rng(20)
    w = random_density(4, rng)
    s = random_sectors(4, 2, rng)
    out = sector_project(w, s)
    for p in s.projectors:
        assert np.linalg.norm(out.matrix @ p - p @ out.matrix) < 1e-12


def test_project_channel_properties():
    rng = np.random.default_rng(21)
    for _ in range(20):
        dim = rng.integers(3, 9)
        w = random_density(dim, rng)
        s = random_sectors(dim, 2, rng)
        once = sector_project(w, s)
        twice = sector_project(once, s)
        assert np.abs(once.matrix - twice.matrix).max() < 1e-12
        assert abs(np.trace(once.matrix) - 1.0) < 1e-12
        assert np.linalg.eigvalsh(once.matrix)[0] >= -1e-10


def test_project_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        sector_project(random_density(3, np.random.default_rng(0)), Z_SECTORS)


# --- off-diagonal norms


def test_offdiag_zero_for_compatible_state():
    hs, tr = off_diagonal_norms(bloch_to_density([0, 0, 0.4]), Z_SECTORS)
    assert hs == pytest.approx(0.0, abs=1e-14)
    assert tr == pytest.approx(0.0, abs=1e-14)


def test_offdiag_x_state():
    hs, tr = off_diagonal_norms(bloch_to_density([1, 0, 0]), Z_SECTORS)
    assert hs == pytest.approx(1 / np.sqrt(2), abs=1e-12)
    assert tr == pytest.approx(1.0, abs=1e-12)


def test_offdiag_pythagoras_over_blocks():
    rng = np.random.default_rng(22)
    w = random_density(6, rng)
    s = random_sectors(6, 3, rng)
    hs, tr = off_diagonal_norms(w, s)
    blocks = 0.0
    for m, pm in enumerate(s.projectors):
        for n, pn in enumerate(s.projectors):
            if m != n:
                blocks += np.linalg.norm(pm @ w.matrix @ pn) ** 2
    assert abs(hs - np.sqrt(blocks)) < 1e-12
    assert hs <= tr + 1e-12


def test_offdiag_vanishes_after_projection():
    rng = np.random.default_rng(23)
    w = random_density(5, rng)
    s = random_sectors(5, 2, rng)
    hs, tr = off_diagonal_norms(sector_project(w, s), s)
    assert hs < 1e-12 and tr < 1e-12


# --- sector probabilities


def test_probabilities_maximally_mixed():
    probs = sector_probabilities(bloch_to_density([0, 0, 0]), Z_SECTORS)
    assert np.allclose(probs, [0.5, 0.5])


def test_probabilities_pure_north():
    probs = sector_probabilities(bloch_to_density([0, 0, 1]), Z_SECTORS)
    assert np.allclose(probs, [1.0, 0.0], atol=1e-14)


def test_probabilities_invariant_under_projection():
    rng = np.random.default_rng(24)
    w = random_density(6, rng)
    s = random_sectors(6, 3, rng)
    before = sector_probabilities(w, s)
    after = sector_probabilities(sector_project(w, s), s)
    assert np.abs(before - after).max() < 1e-12
    assert before.min() >= -1e-12
    assert abs(before.sum() - 1.0) < 1e-10


# --- power-law envelope fit


def test_fit_recovers_synthetic_power_law():
    t = np.linspace(0.0, 40.0, 400)
    samples = np.column_stack([t, (1.0 + t) ** -3])
    fit = fit_power_law_decay(samples, delta=1.0)
    assert fit.gamma == pytest.approx(3.0, abs=0.05)
    assert fit.C == pytest.approx(1.0, abs=0.05)
    assert not fit.superpolynomial


def test_fit_sinc_envelope_exponent():
    t = np.arange(0.5, 100.0, 0.05)
    samples = np.column_stack([t, np.abs(np.sin(t) / t)])
    fit = fit_power_law_decay(samples, delta=1.0, window=(10.0, 100.0))
    assert fit.gamma == pytest.approx(1.0, abs=0.1)


def test_fit_bound_dominates_window():
    t = np.arange(0.5, 60.0, 0.05)
    values = np.abs(np.sin(t) / t)
    fit = fit_power_law_decay(np.column_stack([t, values]), delta=1.0)
    lo, hi = fit.window
    inside = (t >= lo) & (t <= hi)
    assert np.all(fit.bound(t[inside]) >= values[inside] - 1e-15)


def test_fit_rejects_constant_series():
    t = np.linspace(0.0, 10.0, 50)
    with pytest.raises(NonDecaying):
        fit_power_law_decay(np.column_stack([t, np.ones_like(t)]), delta=1.0)


def test_fit_rejects_growing_series():
    t = np.linspace(0.0, 10.0, 50)
    with pytest.raises(NonDecaying):
        fit_power_law_decay(np.column_stack([t, 1.0 + t]), delta=1.0)


def test_fit_insufficient_data():
    t = np.linspace(0.0, 10.0, 6)
    with pytest.raises(InsufficientData):
        fit_power_law_decay(np.column_stack([t, (1.0 + t) ** -2]), delta=1.0)


def test_fit_flags_superpolynomial_decay():
    t = np.linspace(0.0, 8.0, 300)
    samples = np.column_stack([t, np.exp(-(t**2))])
    fit = fit_power_law_decay(samples, delta=1.0, window=(2.0, 8.0))
    assert fit.gamma > 20
    assert fit.superpolynomial


def test_fit_window_default_is_tail_half():
    t = np.linspace(0.0, 20.0, 100)
    fit = fit_power_law_decay(np.column_stack([t, (1.0 + t) ** -2]), delta=1.0)
    assert fit.window == (10.0, 20.0)


def test_fit_delta_is_honored():
    t = np.linspace(0.0, 30.0, 300)
    delta = 2.5
    samples = np.column_stack([t, (1.0 + delta * t) ** -4])
    fit = fit_power_law_decay(samples, delta=delta)
    assert fit.gamma == pytest.approx(4.0, abs=0.05)
    assert fit.delta == delta
