import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from optdual import (
    DegenerateSignalError,
    Dictionary,
    NotAFrameError,
    build_gabor_dictionary,
    build_spike_fourier_dictionary,
    canonical_dual,
    coherence,
    frame_bounds,
    general_dual,
    null_space_projector,
    optimal_dual_from_solution,
)

from oracles import dft_atom, pairwise_coherence


@pytest.fixture(scope="module")
def gabor128():
    return build_gabor_dictionary(128, 30)


@pytest.fixture(scope="module")
def sf128():
    return build_spike_fourier_dictionary(128)


def random_frame(rng, n, d, complex_=False):
    A = rng.standard_normal((n, d))
    if complex_:
        A = A + 1j * rng.standard_normal((n, d))
    return Dictionary(A / np.linalg.norm(A, axis=0))


# --- construction -----------------------------------------------------------

def test_gabor_reference_size(gabor128):
    assert (gabor128.n, gabor128.d) == (128, 3840)
    assert gabor128.params["time_shifts"] == 64
    assert gabor128.params["frequencies"] == 60


def test_gabor_atoms_unit_norm(gabor128):
    np.testing.assert_allclose(np.linalg.norm(gabor128.atoms, axis=0), 1.0, atol=1e-12)


def test_gabor_coherence_matches_pairwise_sweep(gabor128):
    expected = pairwise_coherence(gabor128.atoms)
    assert coherence(gabor128) == pytest.approx(expected, abs=1e-12)
    assert expected >= 0.9


def test_gabor_flat_window_complete_modulation():
    D = build_gabor_dictionary(4, 1, window_std=np.inf, time_shifts=1)
    assert D.d == 4
    assert np.linalg.matrix_rank(D.atoms) == 4


@pytest.mark.parametrize("n, over, std, shifts", [
    (6, 2, 8.0, None),     # not a power of two
    (8, 0, 8.0, None),
    (8, 2, 0.0, None),
    (8, 2, -1.0, None),
    (8, 3, 8.0, 3),        # 3 does not divide 8
])
def test_gabor_rejects_bad_lattice(n, over, std, shifts):
    with pytest.raises(ValueError):
        build_gabor_dictionary(n, over, std, shifts)


def test_spike_fourier_shape_and_coherence(sf128):
    assert sf128.d == 256
    assert sf128.blocks == (128, 128)
    assert coherence(sf128) == pytest.approx(1 / np.sqrt(128), abs=1e-12)


def test_spike_fourier_cross_products_n4():
    D = build_spike_fourier_dictionary(4)
    cross = [abs(np.vdot(np.eye(4)[:, j], dft_atom(4, k))) for j in range(4) for k in range(4)]
    assert max(cross) == pytest.approx(0.5, abs=1e-15)
    # the dictionary's Fourier block is the same basis up to the 1/sqrt(2) factor
    F = D.atoms[:, 4:] * np.sqrt(2)
    np.testing.assert_allclose(F, np.stack([dft_atom(4, k) for k in range(4)], axis=1), atol=1e-14)


def test_spike_fourier_n2_parseval():
    A, B = frame_bounds(build_spike_fourier_dictionary(2))
    assert A == pytest.approx(1.0, abs=1e-10) and B == pytest.approx(1.0, abs=1e-10)


# --- coherence ----------------------------------------------------------------

def test_coherence_identity_is_zero():
    assert coherence(np.eye(5)) == 0.0


def test_coherence_duplicate_atoms_is_one():
    assert coherence(np.array([[1.0, 1.0]])) == pytest.approx(1.0)


def test_coherence_single_atom_rejected():
    with pytest.raises(ValueError):
        coherence(np.ones((3, 1)))


@given(c=st.floats(min_value=-1e3, max_value=1e3).filter(lambda c: abs(c) > 1e-3))
@settings(max_examples=25, deadline=None)
def test_coherence_scale_invariant(c):
    A = np.random.default_rng(1).standard_normal((4, 7))
    assert coherence(c * A) == pytest.approx(coherence(A), rel=1e-12)


# --- frame bounds -----------------------------------------------------------

def test_frame_bounds_parseval(sf128):
    A, B = frame_bounds(sf128)
    assert abs(A - 1) < 1e-10 and abs(B - 1) < 1e-10


def test_frame_bounds_repeated_identity():
    A, B = frame_bounds(np.hstack([np.eye(3), np.eye(3)]))
    assert A == pytest.approx(2.0) and B == pytest.approx(2.0)


def test_frame_bounds_gabor(gabor128):
    A, B = frame_bounds(gabor128)
    ev = np.linalg.eigvalsh(gabor128.atoms @ gabor128.atoms.conj().T)
    assert A == pytest.approx(ev[0], rel=1e-10) and B == pytest.approx(ev[-1], rel=1e-10)
    assert 0 < A <= B < np.inf


def test_frame_bounds_rank_deficient():
    A = np.array([[1.0, 2.0, 3.0], [2.0, 4.0, 6.0]])
    with pytest.raises(NotAFrameError, match="not a frame"):
        frame_bounds(A)


def test_too_few_atoms_is_not_a_frame():
    with pytest.raises(NotAFrameError):
        Dictionary(np.ones((3, 2)))


# --- duals ------------------------------------------------------------------

def test_canonical_dual_of_parseval_is_itself(sf128):
    dual = canonical_dual(sf128)
    assert np.max(np.abs(dual.matrix - sf128.atoms)) < 1e-10


def test_canonical_dual_of_orthonormal_basis():
    Q, _ = np.linalg.qr(np.random.default_rng(0).standard_normal((5, 5)))
    np.testing.assert_allclose(canonical_dual(Q).matrix, Q, atol=1e-12)


def test_canonical_dual_gabor(gabor128):
    assert canonical_dual(gabor128).reconstruction_error() < 1e-10


def test_singular_gram_refused():
    A = np.array([[1.0, 1.0, 1.0], [1.0, 1.0, 1.0 + 1e-9]])
    with pytest.raises(NotAFrameError):
        canonical_dual(A)


def test_projector_square_invertible_is_zero():
    A = np.random.default_rng(2).standard_normal((4, 4))
    P = null_space_projector(A)
    assert np.max(np.abs(P.P)) < 1e-12


def test_projector_trace_is_null_dimension(sf128):
    P = null_space_projector(sf128)
    assert np.trace(P.P).real == pytest.approx(128, abs=1e-8)


@pytest.mark.parametrize("complex_", [False, True])
def test_projector_invariants(complex_):
    D = random_frame(np.random.default_rng(3), 6, 15, complex_)
    P = null_space_projector(D)
    assert P.idempotence_error() < 1e-10
    assert P.symmetry_error() < 1e-10
    assert P.annihilation_error() < 1e-10


def test_matrix_free_projection_matches_explicit():
    D = random_frame(np.random.default_rng(4), 5, 9, True)
    v = np.random.default_rng(5).standard_normal(9)
    np.testing.assert_allclose(D.project_null(v), null_space_projector(D).P @ v, atol=1e-12)


def test_general_dual_zero_w_is_canonical():
    D = random_frame(np.random.default_rng(6), 4, 9)
    np.testing.assert_allclose(general_dual(D, np.zeros((9, 4))).rows, canonical_dual(D).rows,
                               atol=1e-14)


def test_general_dual_random_w_is_dual():
    rng = np.random.default_rng(7)
    D = random_frame(rng, 5, 12, True)
    for _ in range(20):
        W = rng.standard_normal((12, 5)) + 1j * rng.standard_normal((12, 5))
        assert general_dual(D, W).reconstruction_error() < 1e-10


def test_general_dual_single_column_w():
    rng = np.random.default_rng(8)
    D = random_frame(rng, 4, 8)
    W = np.zeros((8, 4))
    W[:, 2] = rng.standard_normal(8)
    P = null_space_projector(D).P
    diff = general_dual(D, W).rows - canonical_dual(D).rows
    np.testing.assert_allclose(diff, P @ W, atol=1e-12)
    # only the third column of Dt^* changes
    assert np.max(np.abs(np.delete(diff, 2, axis=1))) < 1e-14


def test_general_dual_shape_mismatch():
    D = random_frame(np.random.default_rng(9), 3, 5)
    with pytest.raises(ValueError):
        general_dual(D, np.zeros((3, 5)))


def test_perfect_reconstruction_random_signals():
    rng = np.random.default_rng(10)
    D = random_frame(rng, 6, 14, True)
    duals = [canonical_dual(D), general_dual(D, rng.standard_normal((14, 6)))]
    for _ in range(100):
        f = rng.standard_normal(6) + 1j * rng.standard_normal(6)
        for dual in duals:
            assert np.linalg.norm(D.synthesize(dual.analyze(f)) - f) < 1e-8 * np.linalg.norm(f)


# --- optimal dual -----------------------------------------------------------

def _null_vector(D, rng):
    return D.project_null(rng.standard_normal(D.d) + 1j * rng.standard_normal(D.d))


def test_optimal_dual_zero_pg_is_canonical():
    D = random_frame(np.random.default_rng(11), 4, 10)
    f = np.arange(1.0, 5.0)
    np.testing.assert_allclose(optimal_dual_from_solution(D, f, np.zeros(10)).rows,
                               canonical_dual(D).rows, atol=1e-14)


def test_optimal_dual_is_dual_and_maps_fhat():
    rng = np.random.default_rng(12)
    D = random_frame(rng, 5, 11, True)
    f = rng.standard_normal(5) + 1j * rng.standard_normal(5)
    pg = _null_vector(D, rng)
    Do = optimal_dual_from_solution(D, f, pg)
    assert Do.reconstruction_error() < 1e-10
    np.testing.assert_allclose(Do.analyze(f), canonical_dual(D).analyze(f) + pg, atol=1e-12)


def test_optimal_dual_matches_kronecker_least_squares():
    rng = np.random.default_rng(13)
    D = random_frame(rng, 3, 7)
    f = rng.standard_normal(3)
    g = rng.standard_normal(7)
    pg = D.project_null(g)
    # least-squares W of (f^T kron I_d) vec(W) = g, then Dt^* = Dbar^* + P W
    K = np.kron(f[None, :], np.eye(7))
    W = (np.linalg.pinv(K) @ g).reshape(3, 7).T
    P = null_space_projector(D).P
    expected = canonical_dual(D).rows + P @ W
    np.testing.assert_allclose(optimal_dual_from_solution(D, f, pg).rows, expected, atol=1e-12)


def test_optimal_dual_joint_rescaling():
    rng = np.random.default_rng(14)
    D = random_frame(rng, 4, 9, True)
    f = rng.standard_normal(4) + 0j
    pg = _null_vector(D, rng)
    a = optimal_dual_from_solution(D, f, pg).rows
    b = optimal_dual_from_solution(D, 2 * f, 2 * pg).rows
    np.testing.assert_allclose(a, b, atol=1e-10)


def test_optimal_dual_zero_signal():
    D = random_frame(np.random.default_rng(15), 3, 6)
    with pytest.raises(DegenerateSignalError, match="zero signal"):
        optimal_dual_from_solution(D, np.zeros(3), np.zeros(6))


def test_optimal_dual_rejects_off_range_pg():
    D = random_frame(np.random.default_rng(16), 3, 6)
    with pytest.raises(ValueError):
        optimal_dual_from_solution(D, np.ones(3), D.atoms.conj().T @ np.ones(3))
