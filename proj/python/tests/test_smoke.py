import math

import numpy as np
import pytest

import schwinger_ed as se


def test_basis_and_vacuum():
    b = se.Basis(8)
    assert len(b) == math.comb(8, 4)
    i = b.index("10101010")
    assert b.config(i) == "10101010"
    with pytest.raises(IndexError):
        b.config(len(b))


def test_hamiltonian_is_symmetric_and_matches_eigh():
    b = se.Basis(8)
    (sector,) = se.sample_charge_sectors(8, 1, 3)
    h = se.Hamiltonian(se.ModelParams(8, J=2.0), sector, b)
    dense = h.dense()
    assert dense.shape == (h.dimension, h.dimension)
    np.testing.assert_allclose(dense, dense.T, atol=0)
    np.testing.assert_allclose(h.eigenvalues(), np.linalg.eigvalsh(dense), atol=1e-10)
    e, v = h.eigh()
    np.testing.assert_allclose(dense @ v, v * e, atol=1e-9)


def test_sectors_are_reproducible():
    a = se.sample_charge_sectors(10, 5, 11)
    b = se.sample_charge_sectors(10, 5, 11)
    assert [s.q for s in a] == [s.q for s in b]
    assert all(sum(s.q) == 0 for s in a)


def test_gap_ratio_bounds():
    b = se.Basis(10)
    sector = se.sample_charge_sectors(10, 1, 1)[0]
    r = se.sector_mean_r(se.Hamiltonian(se.ModelParams(10, J=0.5), sector, b).eigenvalues())
    assert 0.0 < r < 1.0


def test_entropy_identity_on_random_state():
    b = se.Basis(8)
    rng = np.random.default_rng(0)
    psi = rng.normal(size=len(b)) + 1j * rng.normal(size=len(b))
    psi /= np.linalg.norm(psi)
    s = se.entropies(psi, b, 4)
    assert s["S_E"] == pytest.approx(s["S_N"] + s["S_C"], abs=1e-12)
    assert s["S_N"] >= 0 and s["S_C"] >= 0


def test_quench_conserves_norm():
    b = se.Basis(8)
    sector = se.sample_charge_sectors(8, 1, 5)[0]
    q = se.quench(se.Hamiltonian(se.ModelParams(8, J=5.0), sector, b), b, t_min=1e-6, t_max=1e6, per_decade=5)
    assert len(q["t"]) == len(q["S_E"]) == 61
    np.testing.assert_allclose(q["norm"], 1.0, atol=1e-10)
    assert q["mu"][0] == pytest.approx(-1.0, abs=1e-9)


def test_krylov_dimensions_cover_the_basis():
    b = se.Basis(8)
    sector = se.sample_charge_sectors(8, 1, 2)[0]
    dims = se.krylov_dimensions(se.Hamiltonian(se.ModelParams(8, J=5.0), sector, b), b)
    assert sum(dims) == len(b)


def test_invalid_parameters_raise():
    with pytest.raises(ValueError):
        se.ModelParams(8, J=-1.0)
    with pytest.raises(ValueError):
        se.Basis(40)
