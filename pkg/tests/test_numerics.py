import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from epdyn import numerics


def random_matrix(seed, n=4):
    rng = np.random.default_rng(seed)
    return rng.normal(size=(n, n)) + 1.0j * rng.normal(size=(n, n))


def test_eigensystem_reconstructs_matrix():
    a = random_matrix(7)
    es = numerics.eig_nonhermitian(a)
    rebuilt = (es.right_vectors.T * es.eigenvalues) @ es.left_duals.conj()
    np.testing.assert_allclose(rebuilt, a, atol=1e-12)


def test_eigensystem_pairing_is_kronecker_delta():
    es = numerics.eig_nonhermitian(random_matrix(11))
    assert es.pairing_defect() < 1e-12
    for i in range(es.dim):
        for j in range(es.dim):
            overlap = np.vdot(es.left_duals[i], es.right_vectors[j])
            assert abs(overlap - (1.0 if i == j else 0.0)) < 1e-12


def test_eigensystem_ordering_and_determinism():
    """Pairs come out sorted by decreasing imaginary part, bit-identical on reruns."""
    a = random_matrix(23)
    es1 = numerics.eig_nonhermitian(a)
    es2 = numerics.eig_nonhermitian(a)
    imag = es1.eigenvalues.imag
    assert np.all(np.diff(imag) <= 1e-12)
    assert np.array_equal(es1.eigenvalues, es2.eigenvalues)
    assert np.array_equal(es1.right_vectors, es2.right_vectors)
    assert np.array_equal(es1.left_duals, es2.left_duals)


def test_eigensystem_unit_norm_rights():
    es = numerics.eig_nonhermitian(random_matrix(3))
    np.testing.assert_allclose(np.linalg.norm(es.right_vectors, axis=1), 1.0, atol=1e-13)


def test_eig_rejects_jordan_block():
    with pytest.raises(numerics.DefectiveMatrix):
        numerics.eig_nonhermitian(np.array([[0.0, 1.0], [0.0, 0.0]]))


def test_eig_rejects_bad_shapes():
    with pytest.raises(ValueError):
        numerics.eig_nonhermitian(np.zeros((2, 3)))
    with pytest.raises(ValueError):
        numerics.eig_nonhermitian(np.zeros(4))
    with pytest.raises(ValueError):
        numerics.eig_nonhermitian(np.full((2, 2), np.nan))
    too_big = numerics.DIMENSION_CAP + 2
    with pytest.raises(ValueError):
        numerics.eig_nonhermitian(np.eye(too_big))


def test_matrix_exponential_diagonal():
    d = np.diag([1.0 + 0.5j, -0.25j])
    out = numerics.matrix_exponential(d, scale=2.0)
    np.testing.assert_allclose(out, np.diag(np.exp(2.0 * np.diag(d))), atol=1e-12)


def test_matrix_exponential_defective_input():
    """Jordan blocks go through the series fallback: exp([[0,s],[0,0]]) = [[1,s],[0,1]]."""
    out = numerics.matrix_exponential(np.array([[0.0, 1.0], [0.0, 0.0]]), scale=3.0)
    np.testing.assert_allclose(out, np.array([[1.0, 3.0], [0.0, 1.0]]), atol=1e-14)


def test_matrix_exponential_inverse_pairs():
    a = 0.3 * random_matrix(5, n=3)
    prod = numerics.matrix_exponential(a) @ numerics.matrix_exponential(a, scale=-1.0)
    np.testing.assert_allclose(prod, np.eye(3), atol=1e-12)


def test_fubini_study_extremes():
    p0 = np.diag([1.0, 0.0]).astype(complex)
    p1 = np.diag([0.0, 1.0]).astype(complex)
    assert numerics.fubini_study_distance(p0, p0) == pytest.approx(0.0, abs=1e-12)
    assert numerics.fubini_study_distance(p0, p1) == pytest.approx(np.pi / 2, abs=1e-12)


def test_fubini_study_basis_invariance():
    rng = np.random.default_rng(40)
    q, _ = np.linalg.qr(rng.normal(size=(3, 3)) + 1.0j * rng.normal(size=(3, 3)))
    v1 = np.array([1.0, 0.0, 0.0], dtype=complex)
    v2 = np.array([1.0, 1.0, 0.5], dtype=complex)
    v2 /= np.linalg.norm(v2)
    p1 = np.outer(v1, v1.conj())
    p2 = np.outer(v2, v2.conj())
    d_plain = numerics.fubini_study_distance(p1, p2)
    d_rotated = numerics.fubini_study_distance(q @ p1 @ q.conj().T, q @ p2 @ q.conj().T)
    assert d_rotated == pytest.approx(d_plain, abs=1e-10)


def test_fubini_study_input_validation():
    p = np.diag([1.0, 0.0]).astype(complex)
    with pytest.raises(numerics.NotAProjector):
        numerics.fubini_study_distance(p, 0.5 * np.eye(2))
    with pytest.raises(numerics.NotAProjector):
        numerics.fubini_study_distance(np.array([[0.5, 0.5j], [0.5j, 0.5]]), p)
    with pytest.raises(numerics.RankMismatch):
        numerics.fubini_study_distance(p, np.eye(2, dtype=complex))


def test_time_ordered_exponential_constant_scalar():
    g = np.array([[0.25 + 0.1j]])
    grid = np.linspace(0.0, 2.0, 9)
    expected = np.exp(-2.0 * g[0, 0])
    for form in (lambda t: g, [g] * 9, [g] * 8):
        out = numerics.time_ordered_exponential(form, grid)
        assert out[0, 0] == pytest.approx(expected, rel=1e-12)


def test_time_ordered_exponential_later_factors_left():
    a = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)
    b = np.array([[0.0, 0.0], [1.0, 0.0]], dtype=complex)
    out = numerics.time_ordered_exponential([a, b], [0.0, 1.0, 2.0])
    expected = numerics.matrix_exponential(b, -1.0) @ numerics.matrix_exponential(a, -1.0)
    np.testing.assert_allclose(out, expected, atol=1e-13)
    swapped = numerics.time_ordered_exponential([b, a], [0.0, 1.0, 2.0])
    assert not np.allclose(out, swapped)


def test_time_ordered_exponential_grid_validation():
    g = np.eye(1)
    with pytest.raises(numerics.GridTooCoarse):
        numerics.time_ordered_exponential(lambda t: g, [0.0])
    with pytest.raises(ValueError):
        numerics.time_ordered_exponential(lambda t: g, [0.0, 1.0, 0.5])
    with pytest.raises(ValueError):
        numerics.time_ordered_exponential([g] * 5, [0.0, 1.0, 2.0])


def test_wavefunction_distance_basics():
    psi = np.array([1.0, 1.0j]) / np.sqrt(2)
    assert numerics.wavefunction_distance(psi, psi) == 0.0
    orth = np.array([1.0, 1.0j * -1.0]) / np.sqrt(2)
    assert numerics.wavefunction_distance(psi, orth) == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(numerics.ZeroVector):
        numerics.wavefunction_distance(psi, np.zeros(2))
    with pytest.raises(ValueError):
        numerics.wavefunction_distance(psi, np.ones(3))


@settings(max_examples=50, deadline=None)
@given(
    seed=st.integers(min_value=0, max_value=10_000),
    scale_re=st.floats(min_value=-3.0, max_value=3.0, allow_nan=False),
    scale_im=st.floats(min_value=-3.0, max_value=3.0, allow_nan=False),
)
def test_wavefunction_distance_scale_invariant(seed, scale_re, scale_im):
    rng = np.random.default_rng(seed)
    psi = rng.normal(size=3) + 1.0j * rng.normal(size=3)
    phi = rng.normal(size=3) + 1.0j * rng.normal(size=3)
    scale = complex(scale_re, scale_im)
    base = numerics.wavefunction_distance(psi, phi)
    assert 0.0 <= base <= 1.0
    if abs(scale) > 1e-3:
        rescaled = numerics.wavefunction_distance(scale * psi, phi)
        assert rescaled == pytest.approx(base, abs=1e-10)
