"""Dense complex linear algebra used by the dynamics code.

Everything here is numpy-backed and stateless: biorthonormal
eigendecompositions of non-Hermitian matrices, matrix exponentials with a
series fallback for (near) defective inputs, time-ordered exponentials on a
grid, and the projective distances used by the comparison routines.

Conventions that the rest of the package relies on:

* Eigenpairs are ordered by decreasing imaginary part of the eigenvalue,
  ties broken by increasing real part.  The ordering is deterministic, so
  repeated runs on the same input give bit-identical output.
* Right eigenvectors have unit Euclidean norm.  The matching left duals are
  stored conjugated, so that ``np.vdot(left_duals[i], right_vectors[j])``
  is the Kronecker delta.  The bilinear left row (the row of the inverse
  eigenvector matrix) is recovered with ``left_duals[i].conj()``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

#: Largest matrix dimension accepted by the dense eigensolver wrapper.
DIMENSION_CAP = 512

#: Condition-number threshold (1-norm estimate) above which the eigenvector
#: matrix is declared numerically singular and the matrix defective.
DEFECTIVE_CONDITION = 1.0e12

#: Absolute tolerance on projector checks (idempotency, self-adjointness).
PROJECTOR_TOL = 1.0e-10

#: Norms below this are treated as underflowed to zero.
ZERO_FLOOR = 1.0e-300


class NonConvergence(Exception):
    """An iterative kernel (eigensolver or series) exhausted its budget."""


class DefectiveMatrix(Exception):
    """The eigenvector matrix is numerically singular; the input is within
    working precision of a non-diagonalizable matrix."""


class NotAProjector(Exception):
    """Input failed the idempotency or self-adjointness check."""


class RankMismatch(Exception):
    """The two projectors have different ranks."""


class GridTooCoarse(Exception):
    """The time grid has fewer than two points."""


class ZeroVector(Exception):
    """A vector norm underflowed to zero."""


@dataclass(frozen=True)
class BiorthonormalEigensystem:
    """Spectral data of a diagonalizable (possibly non-Hermitian) matrix.

    Attributes
    ----------
    eigenvalues:
        Complex eigenvalues in the canonical ordering (decreasing imaginary
        part, then increasing real part).
    right_vectors:
        Array of shape (n, dim); ``right_vectors[i]`` is the unit-norm right
        eigenvector of ``eigenvalues[i]``.
    left_duals:
        Array of shape (n, dim); stored conjugated so that
        ``np.vdot(left_duals[i], right_vectors[j]) == delta_ij``.
    sheet:
        Optional per-pair Riemann sheet tags attached by the model layer.
        ``None`` for plain matrix decompositions.
    """

    eigenvalues: np.ndarray
    right_vectors: np.ndarray
    left_duals: np.ndarray
    sheet: tuple | None = None

    @property
    def dim(self) -> int:
        return int(self.right_vectors.shape[1])

    def pairing_defect(self) -> float:
        """Largest deviation of <dual_i|right_j> from the identity."""
        overlap = self.left_duals.conj() @ self.right_vectors.T
        return float(np.max(np.abs(overlap - np.eye(len(self.eigenvalues)))))


def _as_square(m: np.ndarray) -> np.ndarray:
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("expected a square matrix, got shape %r" % (a.shape,))
    return a


def eig_nonhermitian(m: np.ndarray) -> BiorthonormalEigensystem:
    """Biorthonormal eigendecomposition of a general complex matrix.

    Raises
    ------
    DefectiveMatrix
        If the eigenvector matrix has an estimated 1-norm condition number
        above ``DEFECTIVE_CONDITION``.
    NonConvergence
        If the underlying QR iteration fails to converge.
    ValueError
        For non-square input or dimension above ``DIMENSION_CAP``.
    """
    a = _as_square(m)
    n = a.shape[0]
    if n > DIMENSION_CAP:
        raise ValueError("dimension %d exceeds the cap %d" % (n, DIMENSION_CAP))
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    try:
        lam, r = np.linalg.eig(a)
    except np.linalg.LinAlgError as exc:
        raise NonConvergence(str(exc)) from exc

    order = np.lexsort((lam.real, -lam.imag))
    lam = lam[order]
    r = np.ascontiguousarray(r[:, order])
    r /= np.linalg.norm(r, axis=0)

    try:
        rinv = np.linalg.inv(r)
    except np.linalg.LinAlgError as exc:
        raise DefectiveMatrix("eigenvector matrix is singular") from exc
    cond = np.linalg.norm(r, 1) * np.linalg.norm(rinv, 1)
    if not np.isfinite(cond) or cond > DEFECTIVE_CONDITION:
        raise DefectiveMatrix(
            "eigenvector condition estimate %.3e exceeds %.1e" % (cond, DEFECTIVE_CONDITION)
        )
    return BiorthonormalEigensystem(
        eigenvalues=lam,
        right_vectors=r.T.copy(),
        left_duals=rinv.conj(),
    )


def _taylor_scaled_exponential(a: np.ndarray, max_terms: int = 64) -> np.ndarray:
    """Scaling-and-squaring Taylor series for exp(a).

    The argument is halved until its 1-norm is at most 0.5, the series is
    summed to machine precision, then the result is squared back up.
    """
    n = a.shape[0]
    norm = np.linalg.norm(a, 1)
    squarings = 0
    if norm > 0.5:
        squarings = int(np.ceil(np.log2(norm / 0.5)))
    b = a / (2.0**squarings)
    result = np.eye(n, dtype=complex)
    term = np.eye(n, dtype=complex)
    for k in range(1, max_terms + 1):
        term = term @ b / k
        result = result + term
        if np.linalg.norm(term, 1) <= 1.0e-16 * np.linalg.norm(result, 1):
            break
    else:
        raise NonConvergence("matrix exponential series did not settle in %d terms" % max_terms)
    for _ in range(squarings):
        result = result @ result
    return result


def matrix_exponential(m: np.ndarray, scale: complex = 1.0) -> np.ndarray:
    """exp(scale * m) for a general complex square matrix.

    Diagonalizable input goes through the eigendecomposition; if that is
    rejected as defective the scaled Taylor series takes over, so Jordan
    blocks are handled too.
    """
    a = _as_square(m)
    try:
        es = eig_nonhermitian(a)
    except DefectiveMatrix:
        return _taylor_scaled_exponential(scale * a)
    r = es.right_vectors.T
    bilinear_left = es.left_duals.conj()
    return (r * np.exp(scale * es.eigenvalues)) @ bilinear_left


def _range_basis(p: np.ndarray, rank: int) -> np.ndarray:
    """Orthonormal basis (columns) of the range of an orthogonal projector."""
    evals, evecs = np.linalg.eigh(p)
    idx = np.argsort(evals)[::-1][:rank]
    return evecs[:, np.sort(idx)]


def fubini_study_distance(p1: np.ndarray, p2: np.ndarray) -> float:
    """Generalized Fubini-Study distance between two orthogonal projectors.

    Computed as arccos(|det(Z1^dagger Z2)|^2) where the Z are orthonormal
    range bases, which is basis independent.  Both inputs must be Hermitian
    idempotents of equal rank.
    """
    a = _as_square(p1)
    b = _as_square(p2)
    if a.shape != b.shape:
        raise ValueError("projectors act on different spaces")
    for name, p in (("first", a), ("second", b)):
        if np.linalg.norm(p @ p - p) > PROJECTOR_TOL:
            raise NotAProjector("%s argument is not idempotent" % name)
        if np.linalg.norm(p - p.conj().T) > PROJECTOR_TOL:
            raise NotAProjector("%s argument is not self-adjoint" % name)
    rank_a = int(round(float(np.trace(a).real)))
    rank_b = int(round(float(np.trace(b).real)))
    if abs(float(np.trace(a).real) - float(np.trace(b).real)) > 0.5:
        raise RankMismatch("ranks %d and %d differ" % (rank_a, rank_b))
    if rank_a == 0:
        return 0.0
    za = _range_basis(a, rank_a)
    zb = _range_basis(b, rank_b)
    overlap = abs(np.linalg.det(za.conj().T @ zb)) ** 2
    return float(np.arccos(np.clip(overlap, 0.0, 1.0)))


def time_ordered_exponential(
    generator: Callable[[float], np.ndarray] | Sequence[np.ndarray],
    t_grid: Sequence[float],
) -> np.ndarray:
    """Time-ordered product of exp(-generator * dt) factors over a grid.

    Later times multiply from the left.  ``generator`` is either a callable
    evaluated at interval midpoints, a sequence of matrices sampled on the
    grid nodes (averaged pairwise onto midpoints), or a sequence with one
    matrix per interval (used as given).
    """
    t = np.asarray(t_grid, dtype=float)
    if t.ndim != 1 or t.size < 2:
        raise GridTooCoarse("need at least two grid points")
    if np.any(np.diff(t) <= 0.0):
        raise ValueError("time grid must be strictly increasing")

    n_intervals = t.size - 1
    if callable(generator):
        factors = [generator(0.5 * (t[k] + t[k + 1])) for k in range(n_intervals)]
    else:
        samples = [np.asarray(g, dtype=complex) for g in generator]
        if len(samples) == t.size:
            factors = [0.5 * (samples[k] + samples[k + 1]) for k in range(n_intervals)]
        elif len(samples) == n_intervals:
            factors = samples
        else:
            raise ValueError(
                "generator series length %d matches neither the grid (%d) nor its intervals (%d)"
                % (len(samples), t.size, n_intervals)
            )

    dim = _as_square(factors[0]).shape[0]
    result = np.eye(dim, dtype=complex)
    for k in range(n_intervals):
        dt = t[k + 1] - t[k]
        result = matrix_exponential(factors[k], -dt) @ result
    return result


def wavefunction_distance(psi: np.ndarray, phi: np.ndarray) -> float:
    """Projective distance 1 - |<psi|phi>| / (|psi| |phi|).

    Invariant under rescaling of either argument, zero exactly on rays.
    """
    a = np.asarray(psi, dtype=complex).ravel()
    b = np.asarray(phi, dtype=complex).ravel()
    if a.shape != b.shape:
        raise ValueError("wavefunctions have different lengths")
    norm_a = float(np.linalg.norm(a))
    norm_b = float(np.linalg.norm(b))
    if norm_a < ZERO_FLOOR or norm_b < ZERO_FLOOR:
        raise ZeroVector("cannot compare a vector with underflowed norm")
    value = 1.0 - abs(np.vdot(a, b)) / (norm_a * norm_b)
    return float(min(max(value, 0.0), 1.0))
