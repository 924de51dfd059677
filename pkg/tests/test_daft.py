import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from afdm import DaftParams, DimensionError, chirp_phase, daft, daft_matrix, idaft, subcarrier
from afdm.daft import chirp_diag

from oracles import daft_direct, daft_entry


def random_complex(rng, n):
    return rng.standard_normal(n) + 1j * rng.standard_normal(n)


def test_reduces_to_dft_when_chirps_vanish():
    rng = np.random.default_rng(0)
    x = random_complex(rng, 16)
    p = DaftParams(16, 0.0, 0.0)
    assert np.allclose(daft(x, p), np.fft.fft(x, norm="ortho"), atol=1e-12)


def test_single_point_transform_is_identity():
    p = DaftParams(1, 0.37, 0.11)
    z = np.array([2.0 - 1.5j])
    assert np.allclose(daft(z, p), z, atol=1e-15)
    assert np.allclose(idaft(z, p), z, atol=1e-15)


def test_energy_preserved_against_direct_summation():
    rng = np.random.default_rng(1)
    x = random_complex(rng, 16)
    p = DaftParams(16, 3 / 32, 1 / (2 * 16 * np.pi))
    S = daft(x, p)
    assert abs(np.linalg.norm(S) - np.linalg.norm(x)) < 1e-12
    ref = daft_direct(x, 16, p.c1, p.c2)
    assert np.allclose(S, ref, atol=1e-10)


def test_round_trip_several_sizes():
    rng = np.random.default_rng(2)
    for n in (8, 16, 64):
        x = random_complex(rng, n)
        p = DaftParams(n, 0.021, 1 / (2 * n))
        assert np.allclose(idaft(daft(x, p), p), x, atol=1e-12)


def test_inverse_of_impulse_is_constant():
    # 4-point IDFT of e_0 is the 1/2 vector
    p = DaftParams(4)
    e0 = np.zeros(4)
    e0[0] = 1.0
    assert np.allclose(idaft(e0, p), np.full(4, 0.5), atol=1e-14)


def test_two_point_matrix_is_hadamard():
    A = daft_matrix(DaftParams(2))
    assert np.allclose(A, np.array([[1, 1], [1, -1]]) / np.sqrt(2), atol=1e-15)


def test_matrix_is_unitary():
    for n in (8, 16, 256):
        p = DaftParams(n, 5 / (2 * n), 1 / (2 * n * np.pi))
        A = daft_matrix(p)
        assert np.max(np.abs(A @ A.conj().T - np.eye(n))) < 1e-12


def test_matrix_entries_match_elementwise_formula():
    p = DaftParams(8, 3 / 16, 0.0125)
    A = daft_matrix(p)
    for m in range(8):
        for k in range(8):
            assert abs(A[m, k] - daft_entry(m, k, 8, p.c1, p.c2)) < 1e-13


def test_chirp_diag_values():
    assert np.allclose(chirp_diag(0.0, 5), np.eye(5), atol=1e-15)
    d = chirp_diag(0.25, 2)
    assert np.allclose(d, np.diag([1.0, -1j]), atol=1e-15)


def test_chirp_phase_unit_modulus():
    ph = chirp_phase(0.7183, 64)
    assert np.allclose(np.abs(ph), 1.0, atol=1e-15)


def test_transform_matches_matrix_product():
    rng = np.random.default_rng(3)
    p = DaftParams(16, 3 / 32, 1 / (32 * np.pi))
    x = random_complex(rng, 16)
    assert np.allclose(daft(x, p), daft_matrix(p) @ x, atol=1e-12)


def test_subcarriers_are_orthonormal_columns_of_adjoint():
    p = DaftParams(16, 7 / 32, 1 / (32 * np.pi))
    B = np.stack([subcarrier(m, p) for m in range(16)], axis=1)
    assert np.allclose(B, daft_matrix(p).conj().T, atol=1e-12)
    assert np.max(np.abs(B.conj().T @ B - np.eye(16))) < 1e-12


def test_batched_transform_matches_per_row():
    rng = np.random.default_rng(4)
    p = DaftParams(8, 0.04, 0.01)
    X = rng.standard_normal((5, 8)) + 1j * rng.standard_normal((5, 8))
    batched = daft(X, p)
    for i in range(5):
        assert np.allclose(batched[i], daft(X[i], p), atol=1e-13)


def test_length_mismatch_raises():
    with pytest.raises(DimensionError):
        daft(np.zeros(7), DaftParams(8))
    with pytest.raises(DimensionError):
        DaftParams(0)


@settings(deadline=None, max_examples=40)
@given(
    n=st.integers(min_value=1, max_value=32),
    c1=st.floats(min_value=-1, max_value=1, allow_nan=False),
    c2=st.floats(min_value=-1, max_value=1, allow_nan=False),
    seed=st.integers(min_value=0, max_value=2**32 - 1),
)
def test_unitarity_property(n, c1, c2, seed):
    rng = np.random.default_rng(seed)
    x = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    p = DaftParams(n, c1, c2)
    S = daft(x, p)
    assert abs(np.linalg.norm(S) - np.linalg.norm(x)) < 1e-9 * max(1.0, np.linalg.norm(x))
    assert np.allclose(idaft(S, p), x, atol=1e-9)


@settings(deadline=None, max_examples=25)
@given(c=st.floats(min_value=-4, max_value=4, allow_nan=False))
def test_chirp_periodicity_in_rate(c):
    # rates differing by an integer give the same phases on integer k
    assert np.allclose(chirp_phase(c, 12), chirp_phase(c + 1.0, 12), atol=1e-9)
