"""Wavefunction representations built on the reduced wave operator.

Three levels of approximation are assembled here from the model frames and
the reduced wave-operator states: the strict adiabatic following of one
label, the almost-adiabatic form that corrects the direction by the
reduced coordinate and the phase by the accumulated eta, and the
generalization to a multi-state followed subspace where the scalar phase
factor becomes an anti-time-ordered matrix transport.

A gauge caveat applies to all amplitude-level output: at the path nodes of
the two-level family the raw eigenvector scale of the followed label
degenerates while the accumulated connection diverges in compensation.
Rays, projectors and renormalized populations are continuous; comparisons
should therefore use projective or renormalized measures, which is what
the analysis module provides.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import models
from .numerics import BiorthonormalEigensystem, time_ordered_exponential
from .propagators import PropagationPlan, rk4_step
from .waveop import WaveOperatorState, assemble_wave_operator

#: Relative singular-value floor of the effective overlap matrix.
OVERLAP_TOL = 1.0e-10


class SingularOverlap(Exception):
    """The effective-vector overlap matrix is numerically singular."""


@dataclass(frozen=True)
class RepresentedWavefunction:
    """A wavefunction assembled from a representation at one time.

    ``phase_breakdown`` carries the accumulated exponents: ``dynamical``
    is the eigenvalue integral (divide by hbar for the phase),
    ``connection`` the diagonal-connection integral and ``waveop`` the
    eta integral; ``psi`` equals the exponential of minus their sum (with
    the dynamical part times i/hbar) applied to the direction vector.  For
    multi-state followed subspaces no scalar split exists and the entries
    are zero; ``psi`` alone is meaningful there.
    """

    psi: np.ndarray
    phase_breakdown: dict[str, complex]
    sheet: int | None
    t: float


def adiabatic_wavefunction(
    model: models.TwoLevelModel,
    t: float,
    accumulators: WaveOperatorState,
) -> RepresentedWavefunction:
    """Strict adiabatic following of label 0 on the scheduled sheet.

    Only the accumulated dynamical and connection integrals of the state
    are used; the reduced coordinate and eta are deliberately ignored.
    """
    eig = models.two_level_eigensystem(model, t)
    phase = (
        -1.0j * accumulators.accumulated_dynamical / model.hbar
        - accumulators.accumulated_connection
    )
    psi = cmath.exp(phase) * eig.right_vectors[0]
    return RepresentedWavefunction(
        psi=psi,
        phase_breakdown={
            "dynamical": accumulators.accumulated_dynamical,
            "connection": accumulators.accumulated_connection,
            "waveop": 0.0j,
        },
        sheet=models.sheet_of(model, t),
        t=t,
    )


def almost_adiabatic_wavefunction(
    model: models.TwoLevelModel,
    t: float,
    state: WaveOperatorState,
) -> RepresentedWavefunction:
    """Almost-adiabatic form exp(phases) (phi_0 + x phi_1) at time t."""
    eig = models.two_level_eigensystem(model, t)
    phase = (
        -1.0j * state.accumulated_dynamical / model.hbar
        - state.accumulated_connection
        - state.accumulated_eta
    )
    direction = eig.right_vectors[0] + state.x * eig.right_vectors[1]
    return RepresentedWavefunction(
        psi=cmath.exp(phase) * direction,
        phase_breakdown={
            "dynamical": state.accumulated_dynamical,
            "connection": state.accumulated_connection,
            "waveop": state.accumulated_eta,
        },
        sheet=models.sheet_of(model, t),
        t=t,
    )


def effective_dynamical_phase_rate(
    state: WaveOperatorState,
    eig: BiorthonormalEigensystem,
) -> complex:
    """Effective eigenvalue seen by the followed component.

    The corrected direction u = phi_0 + x phi_1 is an exact eigenvector of
    nothing; the effective rate is its expectation <u|H u> / <u|u> with H
    reassembled from the eigensystem.  It reduces to the followed
    eigenvalue at x = 0.
    """
    u = eig.right_vectors[0] + state.x * eig.right_vectors[1]
    hu = (
        eig.eigenvalues[0] * eig.right_vectors[0]
        + state.x * eig.eigenvalues[1] * eig.right_vectors[1]
    )
    denom = np.vdot(u, u)
    if abs(denom) < 1.0e-300:
        raise SingularOverlap("corrected direction has zero norm")
    return complex(np.vdot(u, hu) / denom)


def eta_hat_rate(
    lambda_eff: complex,
    lambda_0: complex,
    eta_rate: complex,
    hbar: float = 1.0,
) -> complex:
    """Residual wave-operator rate once the effective eigenvalue is used.

    Defined so the two phase decompositions agree identically:
    -i lambda_0/hbar - eta = -i lambda_eff/hbar - eta_hat.
    """
    return eta_rate - 1.0j * (lambda_eff - lambda_0) / hbar


# ---------------------------------------------------------------------------
# Multi-state followed subspace.


@dataclass(frozen=True)
class ActiveSpaceProblem:
    """A level system with an m-dimensional followed subspace.

    ``frames(t)`` returns the full biorthonormal eigensystem with the
    followed labels first; it must be continuous in t and evaluable
    slightly beyond the propagation window (finite differences probe
    there).  ``frames_dot``, when given, supplies the analytic time
    derivatives of the right vectors and of the bilinear dual rows in the
    same gauge; without it derivatives fall back to finite differences.
    """

    hamiltonian: Callable[[float], np.ndarray]
    frames: Callable[[float], BiorthonormalEigensystem]
    active_dim: int
    hbar: float = 1.0
    initial_index: int = 0
    frame_step: float | None = None
    frames_dot: Callable[[float], tuple[np.ndarray, np.ndarray]] | None = None


@dataclass(frozen=True)
class MultidimWaveOperatorState:
    """Block reduced coordinate and accumulated transport at time t.

    ``y`` is the (dim - m) x m coordinate block mapping followed-frame
    coefficients to eliminated-frame coefficients; ``transport`` is the
    anti-time-ordered exponential of the effective generator, an m x m
    matrix applied to the initial followed coefficients.
    """

    y: np.ndarray
    t: float
    transport: np.ndarray


def _connection_matrix(problem: ActiveSpaceProblem, t: float, h: float) -> np.ndarray:
    """Full-frame connection <dual_i | d/dt right_j>."""
    es = problem.frames(t)
    if problem.frames_dot is not None:
        rights_dot, _ = problem.frames_dot(t)
    else:
        plus = problem.frames(t + h).right_vectors
        minus = problem.frames(t - h).right_vectors
        rights_dot = (plus - minus) / (2.0 * h)
    return es.left_duals.conj() @ rights_dot.T


def _matrix_riccati_rhs(problem: ActiveSpaceProblem, t: float, c: np.ndarray, h: float) -> np.ndarray:
    """Rate of the block coordinate in the moving frames.

    This is the block form of the scalar reduced equation: quadratic in the
    coordinate through the cross connection, linear through the eigenvalue
    mismatch and the diagonal connection blocks, plus the constant source.
    """
    es = problem.frames(t)
    m = problem.active_dim
    conn = _connection_matrix(problem, t, h)
    lam = es.eigenvalues
    a_pp = conn[:m, :m]
    a_pq = conn[:m, m:]
    a_qp = conn[m:, :m]
    a_qq = conn[m:, m:]
    lam_p = np.diag(lam[:m])
    lam_q = np.diag(lam[m:])
    return (
        c @ a_pq @ c
        - (1.0j / problem.hbar) * (lam_q @ c - c @ lam_p)
        - a_qq @ c
        + c @ a_pp
        - a_qp
    )


def _anchored_columns(s: np.ndarray) -> np.ndarray:
    """Deterministic labeling and gauge for eigenvector columns.

    Each column is assigned to the row of its dominant entry, columns are
    reordered accordingly, normalized, and phased so the dominant entry is
    real positive.  Works only while the dominant entries are distinct.
    """
    m = s.shape[1]
    anchors = np.argmax(np.abs(s), axis=0)
    if len(set(int(a) for a in anchors)) != m:
        raise models.AmbiguousTracking("effective vectors share a dominant component")
    order = np.argsort(anchors)
    s = s[:, order].copy()
    for b in range(m):
        s[:, b] /= np.linalg.norm(s[:, b])
        pivot = s[b, b]
        if abs(pivot) == 0.0:
            raise models.AmbiguousTracking("effective vector %d lost its anchor" % b)
        s[:, b] *= abs(pivot) / pivot
    return s


def _effective_frames(
    problem: ActiveSpaceProblem,
    es: BiorthonormalEigensystem,
    c: np.ndarray,
    h_matrix: np.ndarray,
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """(lambda_eff, phi_eff rows, chi rows, omega) at one time.

    ``phi_eff[b]`` are the effective vectors Omega-ready in the full space,
    ``chi[b]`` their duals with respect to the Hermitian overlap (stored so
    vdot(chi[b], phi_eff[c]) is the Kronecker delta).
    """
    m = problem.active_dim
    rights = es.right_vectors
    rows = es.left_duals.conj()

    p0 = rights[:m].T @ rows[:m]
    x_block = rights[m:].T @ (c @ rows[:m])
    omega = p0 + x_block

    h_small = np.empty((m, m), dtype=complex)
    omega_phi = omega @ rights[:m].T
    for b in range(m):
        for cc in range(m):
            h_small[b, cc] = rows[b] @ (h_matrix @ omega_phi[:, cc])
    _, s = np.linalg.eig(h_small)
    s = _anchored_columns(s)
    # the anchored columns are still exact eigenvectors, so the quotient
    # recovers each eigenvalue in the anchored order
    lam_sorted = np.empty(m, dtype=complex)
    for b in range(m):
        lam_sorted[b] = np.vdot(s[:, b], h_small @ s[:, b]) / np.vdot(s[:, b], s[:, b])
    phi_eff = (rights[:m].T @ s).T

    overlap = phi_eff.conj() @ phi_eff.T
    svals = np.linalg.svd(overlap, compute_uv=False)
    if svals[-1] < OVERLAP_TOL * svals[0]:
        raise SingularOverlap(
            "effective overlap condition %.3e below tolerance" % (svals[-1] / svals[0])
        )
    tinv = np.linalg.inv(overlap)
    chi = tinv.conj() @ phi_eff
    return lam_sorted, phi_eff, chi, omega


def _active_projector_dot(problem: ActiveSpaceProblem, t: float, h: float) -> np.ndarray:
    m = problem.active_dim
    if problem.frames_dot is not None:
        es = problem.frames(t)
        rights_dot, rows_dot = problem.frames_dot(t)
        rights = es.right_vectors
        rows = es.left_duals.conj()
        return rights_dot[:m].T @ rows[:m] + rights[:m].T @ rows_dot[:m]

    def p0_at(s: float) -> np.ndarray:
        fr = problem.frames(s)
        return fr.right_vectors[:m].T @ fr.left_duals[:m].conj()

    return (p0_at(t + h) - p0_at(t - h)) / (2.0 * h)


def _generator(problem: ActiveSpaceProblem, t: float, c: np.ndarray, h: float) -> np.ndarray:
    """Effective transport generator on the followed subspace.

    G[b, c] = i lambda_eff_b delta_bc / hbar + <chi_b | d/dt phi_eff_c>
              - <chi_b | P0dot Omega phi_eff_c>

    The difference form is exact for any dual set satisfying the pairing
    condition, which the Hermitian duals used here do.
    """
    m = problem.active_dim
    es = problem.frames(t)
    h_now = np.asarray(problem.hamiltonian(t), dtype=complex)
    lam_eff, phi_eff, chi, omega = _effective_frames(problem, es, c, h_now)

    if m == 1 and problem.frames_dot is not None:
        rights_dot, _ = problem.frames_dot(t)
        phi_eff_dot = rights_dot[:1]
    else:
        c_dot = _matrix_riccati_rhs(problem, t, c, h)
        h_plus = np.asarray(problem.hamiltonian(t + h), dtype=complex)
        h_minus = np.asarray(problem.hamiltonian(t - h), dtype=complex)
        _, phi_plus, _, _ = _effective_frames(problem, problem.frames(t + h), c + h * c_dot, h_plus)
        _, phi_minus, _, _ = _effective_frames(problem, problem.frames(t - h), c - h * c_dot, h_minus)
        phi_eff_dot = (phi_plus - phi_minus) / (2.0 * h)

    p0_dot = _active_projector_dot(problem, t, h)
    g = np.empty((m, m), dtype=complex)
    for b in range(m):
        for cc in range(m):
            g[b, cc] = np.vdot(chi[b], phi_eff_dot[cc]) - np.vdot(
                chi[b], p0_dot @ (omega @ phi_eff[cc])
            )
            if b == cc:
                g[b, cc] += 1.0j * lam_eff[b] / problem.hbar
    return g


def propagate_multidim(
    problem: ActiveSpaceProblem,
    plan: PropagationPlan,
) -> list[MultidimWaveOperatorState]:
    """Integrate the block coordinate and the effective transport.

    The coordinate runs under classical Runge-Kutta; the transport
    accumulates one anti-time-ordered factor per step from the generator
    at the two grid nodes, which matches the trapezoid quadrature of the
    scalar accumulators exactly in the one-dimensional case.
    """
    grid = plan.grid()
    dt = plan.dt
    h = problem.frame_step if problem.frame_step is not None else dt / 16.0
    m = problem.active_dim
    es0 = problem.frames(float(grid[0]))
    k = len(es0.eigenvalues) - m
    if k < 1:
        raise ValueError("the followed subspace must leave at least one eliminated label")

    c = np.zeros((k, m), dtype=complex)
    transport = np.eye(m, dtype=complex)
    states = [MultidimWaveOperatorState(y=c.copy(), t=float(grid[0]), transport=transport.copy())]
    g_prev = _generator(problem, float(grid[0]), c, h)

    for step in range(1, plan.n_steps + 1):
        t_prev = float(grid[step - 1])
        t_now = float(grid[step])

        def rate(t: float, value: np.ndarray) -> np.ndarray:
            return _matrix_riccati_rhs(problem, t, value, h)

        c = rk4_step(rate, t_prev, c, dt)
        g_now = _generator(problem, t_now, c, h)
        transport = time_ordered_exponential([g_prev, g_now], [t_prev, t_now]) @ transport
        g_prev = g_now
        if step % plan.record_every == 0 or step == plan.n_steps:
            states.append(
                MultidimWaveOperatorState(y=c.copy(), t=t_now, transport=transport.copy())
            )
    return states


def multidim_almost_adiabatic(
    problem: ActiveSpaceProblem,
    t: float,
    state: MultidimWaveOperatorState,
) -> RepresentedWavefunction:
    """Wavefunction of the multi-state almost-adiabatic representation.

    psi = sum_b transport[b, a] Omega phi_eff_b with a the initial label.
    The scalar phase breakdown does not exist for m > 1; the entries are
    zero and psi carries the whole content.
    """
    es = problem.frames(t)
    h_now = np.asarray(problem.hamiltonian(t), dtype=complex)
    _, phi_eff, _, omega = _effective_frames(problem, es, state.y, h_now)
    coeffs = state.transport[:, problem.initial_index]
    psi = np.zeros(es.dim, dtype=complex)
    for b in range(problem.active_dim):
        psi = psi + coeffs[b] * (omega @ phi_eff[b])
    return RepresentedWavefunction(
        psi=psi,
        phase_breakdown={"dynamical": 0.0j, "connection": 0.0j, "waveop": 0.0j},
        sheet=None,
        t=t,
    )


def two_level_active_problem(model: models.TwoLevelModel) -> ActiveSpaceProblem:
    """One-dimensional followed subspace of the two-level model.

    Frames follow the scheduled sheet; derivatives are analytic, so the
    block machinery reproduces the scalar route to roundoff.
    """

    def frames(t: float) -> BiorthonormalEigensystem:
        return models.two_level_eigensystem(model, t)

    def frames_dot(t: float) -> tuple[np.ndarray, np.ndarray]:
        return models.two_level_frame_derivatives(model, t)

    def hamiltonian(t: float) -> np.ndarray:
        return models.two_level_hamiltonian(model, t)

    return ActiveSpaceProblem(
        hamiltonian=hamiltonian,
        frames=frames,
        active_dim=1,
        hbar=model.hbar,
        frames_dot=frames_dot,
    )


def three_level_active_problem(model: models.ThreeLevelModel) -> ActiveSpaceProblem:
    """Two followed labels of the synthetic three-level system."""

    def hamiltonian(t: float) -> np.ndarray:
        return models.three_level_hamiltonian(model, t)

    return ActiveSpaceProblem(
        hamiltonian=hamiltonian,
        frames=models.anchored_eigenframes(hamiltonian),
        active_dim=2,
        hbar=model.hbar,
    )
