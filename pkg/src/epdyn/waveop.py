"""Reduced time-dependent wave-operator machinery.

The one-dimensional followed subspace of the two-level model is encoded by
a single complex coordinate x(t), the ratio of the transversal to the
longitudinal component of the wave operator in the instantaneous frames.
Its Riccati equation is integrated here in a pole-safe pair of coordinate
charts, together with the accumulated dynamical, connection and
wave-operator phases needed to reassemble wavefunctions.

Also provided: the intertwining operator V(t) relating the followed
projector at different times, the projector kernel entering the adiabatic
renormalization, the renormalized two-level Hamiltonian, the right-hand
side of the block wave-operator equation in a fixed frame, and the
effective evolution driven by the projected Hamiltonian.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import models
from .numerics import BiorthonormalEigensystem, time_ordered_exponential
from .propagators import PropagationPlan, Scheme, rk4_step

#: Chart-switch threshold on the magnitude of the active chart coordinate.
CHART_SWITCH = 1.5

#: Relative tolerance of the block-structure check of the Y equation.
BLOCK_TOL = 1.0e-8


class BlockViolation(Exception):
    """The Y argument left its fixed off-diagonal block."""


@dataclass(frozen=True)
class WaveOperatorState:
    """Reduced wave-operator coordinate and its accumulated phases at time t.

    ``accumulated_dynamical`` is the time integral of the followed
    eigenvalue (divide by hbar for the phase), ``accumulated_connection``
    the integral of the diagonal connection, ``accumulated_eta`` the
    integral of x times the off-diagonal coupling.
    """

    x: complex
    t: float
    accumulated_dynamical: complex
    accumulated_connection: complex
    accumulated_eta: complex


@dataclass(frozen=True)
class AssembledWaveOperator:
    """Wave operator and followed projector as matrices on the full space."""

    omega: np.ndarray
    p0: np.ndarray
    t: float


def scheduled_connection(model: models.TwoLevelModel, t: float) -> complex:
    """Diagonal connection on the scheduled sheet with the node fallback.

    At path nodes the scheduled sheet's split denominator vanishes exactly;
    the opposite sheet carries the one-sided continuation there.
    """
    sheet = models.sheet_of(model, t)
    try:
        return models.two_level_connection(model, t, sheet)
    except models.DenominatorDegenerate:
        return models.two_level_connection(model, t, -sheet)


def scheduled_eigenvalue(model: models.TwoLevelModel, t: float) -> complex:
    """Eigenvalue of the followed label on the scheduled sheet."""
    sheet = models.sheet_of(model, t)
    w_coord, z, _, w = models._branch_data(model, t)
    dp, dm = models._split_denominators(z, w, w_coord)
    half = 0.5 * model.hbar
    return half * dm if sheet == 1 else half * dp


def riccati_rhs_two_level(
    x: complex,
    t: float,
    model: models.TwoLevelModel,
    sheet: int | None = None,
) -> complex:
    """Riccati rate A x^2 - i (lambda_1 - lambda_0) x / hbar + A.

    The off-diagonal coupling A appears in both the quadratic and the
    constant slot for this family; the eigenvalue gap on the selected
    sheet equals sheet * hbar * w, making the rate explicitly sheet-odd.
    """
    if sheet is None:
        sheet = models.sheet_of(model, t)
    coupling = models.two_level_nonadiabatic_coupling(model, t, sheet)
    _, _, _, w = models._branch_data(model, t)
    return coupling * (x * x + 1.0) - 1.0j * sheet * w * x


def riccati_rhs_general(
    x: complex,
    t: float,
    coupling_ij: complex,
    coupling_ji: complex,
    gap: complex,
    hbar: float = 1.0,
) -> complex:
    """Generic scalar reduced wave-operator rate.

    ``coupling_ij`` couples the followed label into the eliminated one and
    multiplies x^2; ``coupling_ji`` is the constant source; ``gap`` is the
    eliminated-minus-followed eigenvalue difference.
    """
    return coupling_ij * x * x - 1.0j * gap * x / hbar + coupling_ji


def _chart_rate(model: models.TwoLevelModel, t: float, c: complex, chart: int) -> complex:
    """Rate of the active chart coordinate: chart 0 carries x, chart 1 carries 1/x."""
    sheet = models.sheet_of(model, t)
    base = models.two_level_nonadiabatic_coupling(model, t, 1)
    _, _, _, w = models._branch_data(model, t)
    if chart == 0:
        return sheet * (base * (c * c + 1.0) - 1.0j * w * c)
    return sheet * (-base * (1.0 + c * c) + 1.0j * w * c)


def propagate_reduced_waveop(
    model: models.TwoLevelModel,
    plan: PropagationPlan,
    scheme: Scheme = Scheme.RK4,
) -> list[WaveOperatorState]:
    """Integrate the reduced wave-operator coordinate along the plan's grid.

    The integration switches between the coordinate and its reciprocal
    whenever the active chart magnitude crosses the threshold, so poles of
    x(t) are crossed without loss of accuracy.  At every scheduled sheet
    switch the coordinate changes sign, which is the exact continuation
    through the node.  Accumulated phases are trapezoid integrals of the
    scheduled eigenvalue, connection and eta = x * coupling.

    Only first-order differencing and classical Runge-Kutta steps are
    meaningful for this scalar equation; ``plan.scheme`` is ignored in
    favour of the explicit argument.
    """
    if scheme not in (Scheme.RK4, Scheme.FOD):
        raise ValueError("the reduced equation supports the RK4 and FOD steps only")
    dt = plan.dt
    grid = plan.grid()

    c = 0.0 + 0.0j
    chart = 0

    def x_of(c_val: complex, chart_val: int) -> complex:
        if chart_val == 0:
            return c_val
        if c_val == 0.0:
            raise ZeroDivisionError("reciprocal chart hit an exact pole sample")
        return 1.0 / c_val

    def node_values(t: float, x_val: complex) -> tuple[complex, complex, complex]:
        lam = scheduled_eigenvalue(model, t)
        conn = scheduled_connection(model, t)
        eta = x_val * models.two_level_nonadiabatic_coupling(model, t)
        return lam, conn, eta

    acc_dyn = 0.0 + 0.0j
    acc_conn = 0.0 + 0.0j
    acc_eta = 0.0 + 0.0j
    lam_prev, conn_prev, eta_prev = node_values(grid[0], x_of(c, chart))

    states = [
        WaveOperatorState(
            x=x_of(c, chart),
            t=float(grid[0]),
            accumulated_dynamical=acc_dyn,
            accumulated_connection=acc_conn,
            accumulated_eta=acc_eta,
        )
    ]

    for step in range(1, plan.n_steps + 1):
        t_prev = float(grid[step - 1])
        t_now = float(grid[step])
        frozen_chart = chart

        def rate(t: float, value: complex) -> complex:
            return _chart_rate(model, t, value, frozen_chart)

        if scheme is Scheme.RK4:
            c = rk4_step(rate, t_prev, c, dt)
        else:
            c = c + dt * rate(t_prev, c)

        if models.sheet_of(model, t_now) != models.sheet_of(model, t_prev):
            c = -c
        if abs(c) > CHART_SWITCH:
            c = 1.0 / c
            chart = 1 - chart

        x_now = x_of(c, chart)
        lam, conn, eta = node_values(t_now, x_now)
        acc_dyn += 0.5 * dt * (lam_prev + lam)
        acc_conn += 0.5 * dt * (conn_prev + conn)
        acc_eta += 0.5 * dt * (eta_prev + eta)
        lam_prev, conn_prev, eta_prev = lam, conn, eta

        if step % plan.record_every == 0 or step == plan.n_steps:
            states.append(
                WaveOperatorState(
                    x=x_now,
                    t=t_now,
                    accumulated_dynamical=acc_dyn,
                    accumulated_connection=acc_conn,
                    accumulated_eta=acc_eta,
                )
            )
    return states


def assemble_wave_operator(
    x: complex,
    eig: BiorthonormalEigensystem,
    sheet: int | None = None,
    t: float = 0.0,
) -> AssembledWaveOperator:
    """Matrix form Omega = (|phi_0> + x |phi_1>) <dual_0| on the full space.

    Satisfies P0 Omega = P0, Omega P0 = Omega and Omega^2 = Omega by
    construction.  ``sheet`` is checked against the tag carried by the
    eigensystem when both are present.
    """
    if sheet is not None and eig.sheet is not None and eig.sheet[0] != sheet:
        raise ValueError("sheet argument %d contradicts the eigensystem tag %r" % (sheet, eig.sheet))
    row0 = eig.left_duals[0].conj()
    phi0 = eig.right_vectors[0]
    phi1 = eig.right_vectors[1]
    p0 = np.outer(phi0, row0)
    omega = np.outer(phi0 + x * phi1, row0)
    return AssembledWaveOperator(omega=omega, p0=p0, t=t)


def adiabatic_kernel(
    p0_of_t: Callable[[float], np.ndarray],
    t: float,
    fd_step: float,
    hbar: float = 1.0,
) -> np.ndarray:
    """Kernel i hbar (P0dot P0 + Q0dot Q0) from a projector family.

    The derivative is a central finite difference with the given step; the
    identity Q0dot = -P0dot collapses the kernel to
    i hbar P0dot (2 P0 - 1).
    """
    p_plus = np.asarray(p0_of_t(t + fd_step), dtype=complex)
    p_minus = np.asarray(p0_of_t(t - fd_step), dtype=complex)
    p_now = np.asarray(p0_of_t(t), dtype=complex)
    p_dot = (p_plus - p_minus) / (2.0 * fd_step)
    eye = np.eye(p_now.shape[0], dtype=complex)
    return 1.0j * hbar * (p_dot @ (2.0 * p_now - eye))


def renormalized_hamiltonian_two_level(
    model: models.TwoLevelModel,
    t: float,
    sheet: int | None = None,
) -> np.ndarray:
    """Two-level Hamiltonian in the renormalized adiabatic frame.

    Diagonal entries are the sheet's eigenvalues; the off-diagonal entries
    are -+ i hbar times the nonadiabatic coupling, which is what the
    adiabatic renormalization leaves after removing the kernel.
    """
    if sheet is None:
        sheet = models.sheet_of(model, t)
    eig = models.two_level_eigensystem(model, t, sheet)
    coupling = models.two_level_nonadiabatic_coupling(model, t, sheet)
    ihc = 1.0j * model.hbar * coupling
    return np.array(
        [[eig.eigenvalues[0], -ihc], [ihc, eig.eigenvalues[1]]],
        dtype=complex,
    )


def y_equation_rhs(
    y: np.ndarray,
    h_tilde: np.ndarray,
    p00: np.ndarray,
    q00: np.ndarray,
    hbar: float = 1.0,
) -> np.ndarray:
    """Rate of the fixed-frame block wave-operator coordinate Y.

    Y must live in the fixed off-diagonal block q00 Y p00; the rate
    (q00 - Y) h_tilde (p00 + Y) / (i hbar) is re-projected onto that block
    so roundoff cannot leak into the diagonal blocks.
    """
    y = np.asarray(y, dtype=complex)
    scale = max(1.0, float(np.linalg.norm(y)))
    if np.linalg.norm(q00 @ y @ p00 - y) > BLOCK_TOL * scale:
        raise BlockViolation("Y has components outside its off-diagonal block")
    rate = (q00 - y) @ h_tilde @ (p00 + y) / (1.0j * hbar)
    return q00 @ rate @ p00


def _frame_velocity(
    basis: Callable[[float], BiorthonormalEigensystem],
    t: float,
    h: float,
    segment: tuple[float, float],
) -> np.ndarray:
    """Finite-difference d/dt of the right vectors, confined to a segment.

    Central differences by default, shifted one-sided stencils near the
    segment boundaries so the difference never spans a frame jump.
    """
    lo, hi = segment
    if t - h < lo:
        f0 = basis(t).right_vectors
        f1 = basis(t + h).right_vectors
        f2 = basis(t + 2.0 * h).right_vectors
        return (-3.0 * f0 + 4.0 * f1 - f2) / (2.0 * h)
    if t + h > hi:
        f0 = basis(t).right_vectors
        f1 = basis(t - h).right_vectors
        f2 = basis(t - 2.0 * h).right_vectors
        return (3.0 * f0 - 4.0 * f1 + f2) / (2.0 * h)
    return (basis(t + h).right_vectors - basis(t - h).right_vectors) / (2.0 * h)


@dataclass(frozen=True)
class IntertwinerSeries:
    """Intertwining operators V(t_k) on the recorded grid."""

    times: np.ndarray
    operators: list[np.ndarray]


def intertwining_propagate(
    basis: Callable[[float], BiorthonormalEigensystem],
    plan: PropagationPlan,
    blocks: Sequence[Sequence[int]] | None = None,
    switch_times: Sequence[float] = (),
    block_connections: Callable[[float], list[np.ndarray]] | None = None,
) -> IntertwinerSeries:
    """Build V(t) intertwining the block projectors of a frame family.

    V(t) = sum over blocks of phi_i(t) M_b[i, j] <dual_j(t0)| with M_b the
    anti-time-ordered transport exp(-integral of the block connection).
    For any block-diagonal transport this satisfies V(t) P_b(t0) =
    P_b(t) V(t) identically; the quality of the numerical transport only
    affects the conditioning, not the intertwining property, apart from
    roundoff amplified by the magnitude of M_b.

    ``switch_times`` lists frame discontinuities (scheduled sheet switches).
    Upon crossing one, the transports are handed off by the overlap of the
    new duals with the previous-node vectors, which keeps V continuous and
    the transports moderate.  ``block_connections`` may supply analytic
    per-block connection matrices <dual_i | d/dt phi_j>; the default uses
    finite differences that never straddle a switch.
    """
    grid = plan.grid()
    dt = plan.dt
    es0 = basis(float(grid[0]))
    n = len(es0.eigenvalues)
    if blocks is None:
        blocks = [(i,) for i in range(n)]
    blocks = [tuple(b) for b in blocks]

    switches = sorted(float(s) for s in switch_times)
    boundaries = [float(grid[0])] + switches + [float(grid[-1])]

    def segment_of(t: float) -> tuple[float, float]:
        if t < boundaries[0]:
            return boundaries[0], boundaries[1]
        for k in range(len(boundaries) - 1):
            if t <= boundaries[k + 1]:
                return boundaries[k], boundaries[k + 1]
        return boundaries[-2], boundaries[-1]

    fd_h = dt / 16.0

    def connection_blocks(t: float) -> list[np.ndarray]:
        if block_connections is not None:
            return [np.atleast_2d(np.asarray(m, dtype=complex)) for m in block_connections(t)]
        es = basis(t)
        vel = _frame_velocity(basis, t, fd_h, segment_of(t))
        result = []
        for block in blocks:
            mat = np.empty((len(block), len(block)), dtype=complex)
            for a, i in enumerate(block):
                for bb, j in enumerate(block):
                    mat[a, bb] = np.vdot(es.left_duals[i], vel[j])
            result.append(mat)
        return result

    rows0 = [es0.left_duals[i].conj() for i in range(n)]
    transports = [np.eye(len(b), dtype=complex) for b in blocks]

    def assemble(es: BiorthonormalEigensystem) -> np.ndarray:
        v = np.zeros((es.dim, es.dim), dtype=complex)
        for b_idx, block in enumerate(blocks):
            m = transports[b_idx]
            for a, i in enumerate(block):
                for bb, j in enumerate(block):
                    v += m[a, bb] * np.outer(es.right_vectors[i], rows0[j])
        return v

    times = [float(grid[0])]
    operators = [assemble(es0)]
    conn_prev = connection_blocks(float(grid[0]))
    es_prev = es0

    switch_iter = iter(switches)
    next_switch = next(switch_iter, None)
    tol = 1.0e-9 * (plan.t1 - plan.t0)

    for step in range(1, plan.n_steps + 1):
        t_now = float(grid[step])
        es_now = basis(t_now)
        conn_now = connection_blocks(t_now)
        t_prev = float(grid[step - 1])
        for b_idx, block in enumerate(blocks):
            factor = time_ordered_exponential([conn_prev[b_idx], conn_now[b_idx]], [t_prev, t_now])
            transports[b_idx] = factor @ transports[b_idx]
        crossed = next_switch is not None and float(grid[step - 1]) < next_switch <= t_now + tol
        if crossed:
            for b_idx, block in enumerate(blocks):
                handoff = np.empty((len(block), len(block)), dtype=complex)
                for a, i in enumerate(block):
                    for bb, j in enumerate(block):
                        handoff[a, bb] = np.vdot(es_now.left_duals[i], es_prev.right_vectors[j])
                transports[b_idx] = handoff @ transports[b_idx]
            next_switch = next(switch_iter, None)
        if step % plan.record_every == 0 or step == plan.n_steps:
            times.append(t_now)
            operators.append(assemble(es_now))
        conn_prev = conn_now
        es_prev = es_now

    return IntertwinerSeries(times=np.asarray(times), operators=operators)


def effective_hamiltonian_two_level(
    model: models.TwoLevelModel,
    t: float,
    x: complex,
    fd_step: float | None = None,
) -> np.ndarray:
    """(P0 H + i hbar P0dot) Omega at time t for the given coordinate x.

    This generates the effective evolution of the followed component.  The
    projector derivative is a finite difference of the scheduled projector
    family, which is continuous through interior path nodes because the
    branch schedule switches there.  The path endpoints are nodes with no
    switch beyond them, so a probe outside [0, duration] would land on the
    wrong branch; the stencil becomes one sided (still second order) there.
    At the starting node the branch convention agrees with the outgoing
    loop and the result is regular; the terminal node carries the same
    outgoing convention with no loop left to follow it, so values exactly
    at t = duration are convention-bound and should not be relied on.
    """
    if fd_step is None:
        fd_step = 1.0e-7 * model.path.duration

    def p0_at(s: float) -> np.ndarray:
        es = models.two_level_eigensystem(model, s)
        return np.outer(es.right_vectors[0], es.left_duals[0].conj())

    eig = models.two_level_eigensystem(model, t)
    omega = assemble_wave_operator(x, eig, t=t).omega
    h2 = 2.0 * fd_step
    if t - fd_step < 0.0:
        p_dot = (-3.0 * p0_at(t) + 4.0 * p0_at(t + fd_step) - p0_at(t + h2)) / h2
    elif t + fd_step > model.path.duration:
        p_dot = (3.0 * p0_at(t) - 4.0 * p0_at(t - fd_step) + p0_at(t - h2)) / h2
    else:
        p_dot = (p0_at(t + fd_step) - p0_at(t - fd_step)) / h2
    h = models.two_level_hamiltonian(model, t)
    return (p0_at(t) @ h + 1.0j * model.hbar * p_dot) @ omega


def effective_evolution(
    model: models.TwoLevelModel,
    plan: PropagationPlan,
) -> tuple[np.ndarray, list[np.ndarray], list[complex]]:
    """Propagate i hbar dU/dt = H_eff(t) U on the plan's grid.

    The reduced coordinate is integrated once on the doubled grid so every
    Runge-Kutta stage sees the coordinate at its own time rather than an
    interpolation.  Returns (times, U samples, x samples) on the plan grid.
    """
    doubled = PropagationPlan(
        n_steps=2 * plan.n_steps,
        t0=plan.t0,
        t1=plan.t1,
        scheme=plan.scheme,
        record_every=1,
    )
    xs = [state.x for state in propagate_reduced_waveop(model, doubled)]
    dt = plan.dt
    grid = plan.grid()
    factor = -1.0j / model.hbar

    u = np.eye(2, dtype=complex)
    us = [u.copy()]
    for k in range(plan.n_steps):
        t = float(grid[k])
        h0 = effective_hamiltonian_two_level(model, t, xs[2 * k])
        hm = effective_hamiltonian_two_level(model, t + 0.5 * dt, xs[2 * k + 1])
        h1 = effective_hamiltonian_two_level(model, t + dt, xs[2 * k + 2])
        k1 = factor * (h0 @ u)
        k2 = factor * (hm @ (u + 0.5 * dt * k1))
        k3 = factor * (hm @ (u + 0.5 * dt * k2))
        k4 = factor * (h1 @ (u + dt * k3))
        u = u + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        us.append(u.copy())
    return grid, us, xs[::2]
