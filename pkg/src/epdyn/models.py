"""Concrete Hamiltonian families.

Two families ship with the package.  The first is an analytic two-level
system whose parameter plane carries an exceptional point; its eigensystem,
diagonal connection and off-diagonal coupling are available in closed form
on both Riemann sheets.  The second is a two-channel grid model of driven
photodissociation (kinetic operator assembled through the Fourier dual of a
uniform collocation grid, diagonal potentials, absorbing boundary), where
the same quantities are obtained numerically.

Model eigensystems are returned in adiabatic label order: index 0 is the
followed state.  This deliberately differs from the spectral ordering used
by ``numerics.eig_nonhermitian``; callers comparing the two must pair by
eigenvalue.

Branch conventions for the two-level family, relied on package-wide:

* ``w`` is the principal square root of ``W**2 + z**2`` with
  ``z = Delta - i*Gamma/4``.  When ``w**2`` falls on the negative real axis
  (within 1e-12 relative) the root on the ``-i`` side is taken.
* Sheet ``+1`` carries the frames built from ``w``; sheet ``-1`` swaps the
  two labels (equivalent to negating ``w`` up to per-vector gauge).
* Near path nodes where the coupling ``W`` vanishes, the raw eigenvector
  scale of one label degenerates while its dual grows reciprocally.  Rays,
  projectors, eigenvalues and scheduled coefficients all stay continuous;
  amplitude-level consumers must use projective or renormalized measures.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .numerics import BiorthonormalEigensystem

#: Default distance from the exceptional point below which closed-form
#: frames are refused.
EP_TOLERANCE = 1.0e-8

#: Relative threshold on the small split denominator of the connection.
DENOMINATOR_TOL = 1.0e-14

#: Absolute gap below which first-order perturbation coupling is refused.
GAP_TOLERANCE = 1.0e-10

#: Margin below which eigenpair tracking refuses to choose an assignment.
TRACKING_MARGIN = 1.0e-6


class ExceptionalPointProximity(Exception):
    """Parameters are within tolerance of the eigenvalue coalescence."""


class DenominatorDegenerate(Exception):
    """A split denominator of the closed-form connection underflowed.

    This happens at path nodes when the coefficients are requested on the
    sheet whose frame gauge degenerates there; the caller can usually fall
    back to the opposite sheet, where the coefficient is regular.
    """


class DegenerateGap(Exception):
    """Two eigenvalues are too close for first-order coupling formulas."""


class AmbiguousTracking(Exception):
    """Eigenpair continuation could not be decided within the margin."""


@dataclass(frozen=True)
class ParameterPath:
    """A closed path in a two-dimensional parameter plane.

    ``coord1`` and ``coord2`` map time to the two coordinates;
    ``coord1_dot`` and ``coord2_dot`` are their time derivatives, supplied
    analytically so drivers never rely on finite differences internally.
    """

    duration: float
    coord1: Callable[[float], float]
    coord2: Callable[[float], float]
    coord1_dot: Callable[[float], float]
    coord2_dot: Callable[[float], float]

    def __post_init__(self) -> None:
        if not self.duration > 0.0:
            raise ValueError("path duration must be positive")


def verify_path_derivatives(
    path: ParameterPath,
    n_points: int = 100,
    rtol: float = 1.0e-6,
    seed: int = 20260814,
) -> None:
    """Check the supplied derivatives against central differences.

    Raises ValueError when a derivative disagrees with its finite-difference
    estimate by more than ``rtol`` relative to the path's velocity scale.
    """
    rng = np.random.default_rng(seed)
    h = 1.0e-6 * path.duration
    times = rng.uniform(h, path.duration - h, size=n_points)
    scale = 0.0
    for t in times:
        scale = max(scale, abs(path.coord1_dot(t)), abs(path.coord2_dot(t)))
    scale = max(scale, 1.0e-300)
    for t in times:
        fd1 = (path.coord1(t + h) - path.coord1(t - h)) / (2.0 * h)
        fd2 = (path.coord2(t + h) - path.coord2(t - h)) / (2.0 * h)
        if abs(fd1 - path.coord1_dot(t)) > rtol * scale:
            raise ValueError("coord1_dot disagrees with finite differences at t=%g" % t)
        if abs(fd2 - path.coord2_dot(t)) > rtol * scale:
            raise ValueError("coord2_dot disagrees with finite differences at t=%g" % t)


def standard_two_level_path(duration: float, gamma: float = 0.5) -> ParameterPath:
    """Double loop through the node: a versine in the coupling coordinate
    and a sine in the detuning, each completing two turns over ``duration``.

    Both coordinates return to zero at t = 0, duration/2 and duration; the
    loop passes the degenerate-coupling node once per turn.
    """
    amp = gamma / 4.0
    rate = 4.0 * math.pi / duration

    def w_of(t: float) -> float:
        return amp * (1.0 - math.cos(rate * t))

    def d_of(t: float) -> float:
        return amp * math.sin(rate * t)

    def w_dot(t: float) -> float:
        return amp * rate * math.sin(rate * t)

    def d_dot(t: float) -> float:
        return amp * rate * math.cos(rate * t)

    return ParameterPath(
        duration=duration, coord1=w_of, coord2=d_of, coord1_dot=w_dot, coord2_dot=d_dot
    )


@dataclass(frozen=True)
class TwoLevelModel:
    """Dissipative two-level system on a parameter path.

    The Hamiltonian is ``(hbar/2) [[0, W], [W, 2*Delta - i*gamma/2]]`` with
    ``W = path.coord1(t)`` and ``Delta = path.coord2(t)``; ``gamma`` is the
    total width of the decaying level.  ``sheet_schedule`` lists
    ``(switch_time, sheet_sign)`` pairs applied in order; switch times must
    be strictly increasing and lie strictly inside ``(0, duration)``.
    """

    path: ParameterPath
    gamma: float = 0.5
    hbar: float = 1.0
    sheet_schedule: tuple[tuple[float, int], ...] = ()

    def __post_init__(self) -> None:
        if not self.gamma > 0.0:
            raise ValueError("gamma must be positive")
        if not self.hbar > 0.0:
            raise ValueError("hbar must be positive")
        previous = 0.0
        for switch_time, sign in self.sheet_schedule:
            if not 0.0 < switch_time < self.path.duration:
                raise ValueError("sheet switch at t=%g is outside (0, duration)" % switch_time)
            if switch_time <= previous:
                raise ValueError("sheet switch times must be strictly increasing")
            if sign not in (-1, 1):
                raise ValueError("sheet signs must be +1 or -1")
            previous = switch_time


def standard_two_level_model(duration: float, gamma: float = 0.5, hbar: float = 1.0) -> TwoLevelModel:
    """Standard double-loop model with one sheet switch at the half period."""
    return TwoLevelModel(
        path=standard_two_level_path(duration, gamma),
        gamma=gamma,
        hbar=hbar,
        sheet_schedule=((duration / 2.0, -1),),
    )


def sheet_of(model: TwoLevelModel, t: float) -> int:
    """Scheduled sheet at time t; switch nodes belong to the new sheet."""
    tol = 1.0e-12 * model.path.duration
    sheet = 1
    for switch_time, sign in model.sheet_schedule:
        if t >= switch_time - tol:
            sheet = sign
        else:
            break
    return sheet


def _branch_data(model: TwoLevelModel, t: float) -> tuple[float, complex, complex, complex]:
    """Path point and principal branch data: (W, z, w**2, w).

    The principal square root is taken, with the tie on the negative real
    axis (relative imaginary part below 1e-12) broken towards the -i side.
    """
    w_coord = model.path.coord1(t)
    z = model.path.coord2(t) - 0.25j * model.gamma
    wsq = w_coord * w_coord + z * z
    if wsq.real < 0.0 and abs(wsq.imag) <= 1.0e-12 * abs(wsq):
        w = -1.0j * math.sqrt(-wsq.real)
    else:
        w = cmath.sqrt(wsq)
    return w_coord, z, wsq, w


def _split_denominators(z: complex, w: complex, w_coord: float) -> tuple[complex, complex]:
    """(z + w, z - w) with the smaller factor recomputed stably.

    The product identity (z + w)(z - w) = -W**2 replaces whichever factor
    suffers cancellation, avoiding loss of precision near the path nodes.
    """
    dp = z + w
    dm = z - w
    if abs(dp) < abs(dm):
        dp = -(w_coord * w_coord) / dm if dm != 0.0 else dp
    else:
        dm = -(w_coord * w_coord) / dp if dp != 0.0 else dm
    return dp, dm


def two_level_hamiltonian(model: TwoLevelModel, t: float) -> np.ndarray:
    w_coord = model.path.coord1(t)
    z = model.path.coord2(t) - 0.25j * model.gamma
    return 0.5 * model.hbar * np.array([[0.0, w_coord], [w_coord, 2.0 * z]], dtype=complex)


def two_level_eigensystem(
    model: TwoLevelModel,
    t: float,
    sheet: int | None = None,
    ep_tolerance: float = EP_TOLERANCE,
) -> BiorthonormalEigensystem:
    """Closed-form biorthonormal frames at time t on the requested sheet.

    ``sheet=None`` uses the scheduled sheet.  Index 0 is the followed
    label: on sheet +1 the eigenvalue ``(hbar/2)(z - w)``, on sheet -1 the
    two labels are swapped.  Raises ExceptionalPointProximity when the
    branch radius |w| falls below ``ep_tolerance``.
    """
    if sheet is None:
        sheet = sheet_of(model, t)
    w_coord, z, _, w = _branch_data(model, t)
    if abs(w) <= ep_tolerance:
        raise ExceptionalPointProximity(
            "|w|=%.3e at t=%g is within %.1e of the exceptional point" % (abs(w), t, ep_tolerance)
        )
    dp, dm = _split_denominators(z, w, w_coord)
    half = 0.5 * model.hbar
    phi_a = np.array([dp, -w_coord], dtype=complex)
    phi_b = np.array([w_coord, dp], dtype=complex)
    norm = 2.0 * w * dp
    row_a = phi_a / norm
    row_b = phi_b / norm
    if sheet == 1:
        eigenvalues = np.array([half * dm, half * dp], dtype=complex)
        rights = np.array([phi_a, phi_b])
        rows = np.array([row_a, row_b])
    else:
        eigenvalues = np.array([half * dp, half * dm], dtype=complex)
        rights = np.array([phi_b, phi_a])
        rows = np.array([row_b, row_a])
    return BiorthonormalEigensystem(
        eigenvalues=eigenvalues,
        right_vectors=rights,
        left_duals=rows.conj(),
        sheet=(sheet, sheet),
    )


def two_level_frame_derivatives(
    model: TwoLevelModel,
    t: float,
    sheet: int | None = None,
    ep_tolerance: float = EP_TOLERANCE,
) -> tuple[np.ndarray, np.ndarray]:
    """Analytic time derivatives of the closed-form frames at time t.

    Returns ``(rights_dot, rows_dot)`` where row i differentiates the
    corresponding right vector and bilinear dual row of
    ``two_level_eigensystem`` in exactly its gauge and label order.  Near
    path nodes the dual rows grow like the inverse of the collapsing
    frame scale; the values stay finite off the exact node and the growth
    cancels structurally in gauge-invariant contractions.
    """
    if sheet is None:
        sheet = sheet_of(model, t)
    w_coord, z, _, w = _branch_data(model, t)
    if abs(w) <= ep_tolerance:
        raise ExceptionalPointProximity("branch radius %.3e below tolerance" % abs(w))
    dp, _ = _split_denominators(z, w, w_coord)
    w_dot, _, z_dot = _path_rates(model, t)
    w_pr_dot = (w_coord * w_dot + z * z_dot) / w
    dp_dot = z_dot + w_pr_dot

    phi_a = np.array([dp, -w_coord], dtype=complex)
    phi_b = np.array([w_coord, dp], dtype=complex)
    phi_a_dot = np.array([dp_dot, -w_dot], dtype=complex)
    phi_b_dot = np.array([w_dot, dp_dot], dtype=complex)
    norm = 2.0 * w * dp
    norm_dot = 2.0 * (w_pr_dot * dp + w * dp_dot)
    row_a_dot = phi_a_dot / norm - phi_a * (norm_dot / (norm * norm))
    row_b_dot = phi_b_dot / norm - phi_b * (norm_dot / (norm * norm))
    if sheet == 1:
        return np.array([phi_a_dot, phi_b_dot]), np.array([row_a_dot, row_b_dot])
    return np.array([phi_b_dot, phi_a_dot]), np.array([row_b_dot, row_a_dot])


def _path_rates(model: TwoLevelModel, t: float) -> tuple[float, float, complex]:
    w_dot = model.path.coord1_dot(t)
    d_dot = model.path.coord2_dot(t)
    return w_dot, d_dot, complex(d_dot)


def two_level_connection(
    model: TwoLevelModel,
    t: float,
    sheet: int | None = None,
    ep_tolerance: float = EP_TOLERANCE,
) -> complex:
    """Diagonal connection <dual_0 | d/dt right_0> of the followed label.

    The two labels share this value, so no label argument is needed.  The
    evaluation uses the cancellation-free split denominator; at path nodes
    the requested sheet's denominator vanishes identically and
    DenominatorDegenerate is raised (the opposite sheet stays regular).
    """
    if sheet is None:
        sheet = sheet_of(model, t)
    w_coord, z, _, w_pr = _branch_data(model, t)
    if abs(w_pr) <= ep_tolerance:
        raise ExceptionalPointProximity("branch radius %.3e below tolerance" % abs(w_pr))
    w_eff = sheet * w_pr
    dp_eff, _ = _split_denominators(z, w_eff, w_coord)
    if abs(dp_eff) <= DENOMINATOR_TOL * max(1.0, abs(z) + abs(w_eff)):
        raise DenominatorDegenerate(
            "split denominator %.3e at t=%g on sheet %+d" % (abs(dp_eff), t, sheet)
        )
    w_dot, _, z_dot = _path_rates(model, t)
    w_eff_dot = (w_coord * w_dot + z * z_dot) / w_eff
    return (w_coord * w_dot + dp_eff * (z_dot + w_eff_dot)) / (2.0 * w_eff * dp_eff)


def two_level_nonadiabatic_coupling(
    model: TwoLevelModel,
    t: float,
    sheet: int | None = None,
    ep_tolerance: float = EP_TOLERANCE,
) -> complex:
    """Off-diagonal coupling between the two labels on the given sheet.

    Equals <dual_0 | d/dt right_1> up to the per-vector gauge fixed by the
    closed-form frames; the opposite element is its negative.  Changes sign
    with the sheet, while ``w**2`` in the denominator is sheet-free.
    """
    if sheet is None:
        sheet = sheet_of(model, t)
    w_coord, z, wsq, w_pr = _branch_data(model, t)
    if abs(w_pr) <= ep_tolerance:
        raise ExceptionalPointProximity("branch radius %.3e below tolerance" % abs(w_pr))
    w_dot, _, z_dot = _path_rates(model, t)
    return sheet * (z * w_dot - w_coord * z_dot) / (2.0 * wsq)


# ---------------------------------------------------------------------------
# Grid model of two coupled channels with an absorbing boundary.


@dataclass(frozen=True)
class DvrModel:
    """Two-channel collocation-grid model driven along a parameter path.

    ``path.coord1`` is the field amplitude multiplying the transition
    dipole; ``path.coord2`` is the carrier frequency entering through the
    dressed upper channel.  ``v_g``, ``v_u``, ``mu`` and ``v_opt`` map a
    radial coordinate array to arrays of the same shape.
    """

    n_points: int
    r_max: float
    reduced_mass: float
    v_g: Callable[[np.ndarray], np.ndarray]
    v_u: Callable[[np.ndarray], np.ndarray]
    mu: Callable[[np.ndarray], np.ndarray]
    v_opt: Callable[[np.ndarray], np.ndarray]
    path: ParameterPath
    hbar: float = 1.0

    def __post_init__(self) -> None:
        if self.n_points < 8:
            raise ValueError("need at least 8 grid points")
        if self.n_points % 2 != 0:
            raise ValueError("the plane-wave dual basis requires an even point count")
        if not self.r_max > 0.0:
            raise ValueError("r_max must be positive")
        if not self.reduced_mass > 0.0:
            raise ValueError("reduced_mass must be positive")


def dvr_grid(model: DvrModel) -> np.ndarray:
    """Collocation points r_i = (i-1) r_max / N for i = 1..N."""
    return np.arange(model.n_points) * (model.r_max / model.n_points)


def _sample(f: Callable[[np.ndarray], np.ndarray], r: np.ndarray) -> np.ndarray:
    try:
        values = np.asarray(f(r), dtype=float)
        if values.shape == r.shape:
            return values
    except (TypeError, ValueError):
        pass
    return np.array([float(f(x)) for x in r])


def dvr_basis_and_kinetic(model: DvrModel) -> tuple[np.ndarray, np.ndarray]:
    """Collocation grid and the kinetic operator in grid coordinates.

    The kinetic operator is U^dagger diag(hbar^2 k^2 / 2m) U where U maps
    grid amplitudes to the plane-wave dual basis, U[j, i] =
    exp(i k_j r_i)/sqrt(N) with k_j = 2 pi (j - 1 - N/2)/r_max.  The result
    is real symmetric on the grid; its spectrum is the plane-wave multiset.
    """
    n = model.n_points
    grid = dvr_grid(model)
    k = 2.0 * math.pi * (np.arange(n) - n // 2) / model.r_max
    u = np.exp(1.0j * np.outer(k, grid)) / math.sqrt(n)
    t_dual = (model.hbar * k) ** 2 / (2.0 * model.reduced_mass)
    kinetic = (u.conj().T * t_dual) @ u
    return grid, kinetic


def dvr_hamiltonian(model: DvrModel, t: float) -> np.ndarray:
    """Two-channel Hamiltonian at time t in the grid tensor channel basis.

    Block layout (lower channel first):

        [[T + V_g - i V_opt,        W mu           ],
         [      W mu,         T + V_u - hbar w - i V_opt]]

    with W = coord1(t) and w = coord2(t).
    """
    n = model.n_points
    grid, kinetic = dvr_basis_and_kinetic(model)
    vg = _sample(model.v_g, grid)
    vu = _sample(model.v_u, grid)
    dipole = _sample(model.mu, grid)
    absorber = _sample(model.v_opt, grid)
    w_field = model.path.coord1(t)
    omega = model.path.coord2(t)

    h = np.zeros((2 * n, 2 * n), dtype=complex)
    h[:n, :n] = kinetic + np.diag(vg - 1.0j * absorber)
    h[n:, n:] = kinetic + np.diag(vu - model.hbar * omega - 1.0j * absorber)
    coupling = np.diag(w_field * dipole)
    h[:n, n:] = coupling
    h[n:, :n] = coupling
    return h


def _dvr_parameter_derivatives(model: DvrModel) -> tuple[np.ndarray, np.ndarray]:
    """(dH/dW, dH/domega), both time independent."""
    n = model.n_points
    grid = dvr_grid(model)
    dipole = _sample(model.mu, grid)
    d_field = np.zeros((2 * n, 2 * n), dtype=complex)
    d_field[:n, n:] = np.diag(dipole)
    d_field[n:, :n] = np.diag(dipole)
    d_omega = np.zeros((2 * n, 2 * n), dtype=complex)
    d_omega[n:, n:] = -model.hbar * np.eye(n)
    return d_field, d_omega


def hellmann_feynman_coupling(
    model: DvrModel,
    eig: BiorthonormalEigensystem,
    i: int,
    j: int,
    t: float,
) -> complex:
    """First-order coupling <dual_i | dH/dt | right_j> / (lambda_j - lambda_i).

    Valid for distinct indices only; raises DegenerateGap when the
    eigenvalue separation falls below the tolerance.
    """
    if i == j:
        raise ValueError("coupling is defined between distinct eigenpairs")
    gap = eig.eigenvalues[j] - eig.eigenvalues[i]
    if abs(gap) <= GAP_TOLERANCE:
        raise DegenerateGap("gap %.3e between pairs %d and %d" % (abs(gap), i, j))
    d_field, d_omega = _dvr_parameter_derivatives(model)
    h_dot = model.path.coord1_dot(t) * d_field + model.path.coord2_dot(t) * d_omega
    return complex(np.vdot(eig.left_duals[i], h_dot @ eig.right_vectors[j])) / gap


def bound_channel_states(model: DvrModel) -> tuple[np.ndarray, np.ndarray]:
    """Bound eigenstates of the uncoupled lower channel, without absorber.

    Returns (energies, vectors) of the real-symmetric T + V_g block with
    negative energy, in ascending order; vectors are rows.  These define
    the followed labels and the initial states of the grid scenarios.
    """
    grid, kinetic = dvr_basis_and_kinetic(model)
    h_g = kinetic.real + np.diag(_sample(model.v_g, grid))
    energies, vectors = np.linalg.eigh(h_g)
    bound = energies < 0.0
    return energies[bound], vectors[:, bound].T.copy()


@dataclass(frozen=True)
class TrackingResult:
    """Continuation of labeled eigenpairs from one time to the next."""

    permutation: tuple[int, ...]
    phases: np.ndarray
    sheet_switched: bool


def track_eigenpair(
    previous: BiorthonormalEigensystem,
    current: BiorthonormalEigensystem,
) -> TrackingResult:
    """Greedily match current eigenpairs to the previous labels.

    Label i keeps the current pair maximizing |<dual_prev_i | right_cur_j>|
    among the unassigned ones.  ``phases[i]`` multiplies the matched right
    vector to make that overlap real and positive.  ``sheet_switched`` is
    set when the matching permutes the spectral (decreasing imaginary part)
    ordering, the signature of a branch change.  Raises AmbiguousTracking
    when the best and runner-up overlaps differ by less than the margin.
    """
    n = len(previous.eigenvalues)
    if len(current.eigenvalues) != n:
        raise ValueError("eigensystem sizes differ")
    overlaps = previous.left_duals.conj() @ current.right_vectors.T
    magnitudes = np.abs(overlaps)
    assigned: list[int] = []
    phases = np.zeros(n, dtype=complex)
    available = list(range(n))
    for i in range(n):
        scores = [(magnitudes[i, j], j) for j in available]
        scores.sort(reverse=True)
        best_score, best_j = scores[0]
        if len(scores) > 1 and best_score - scores[1][0] < TRACKING_MARGIN:
            raise AmbiguousTracking(
                "labels %d and %d overlap label %d within %.1e"
                % (best_j, scores[1][1], i, TRACKING_MARGIN)
            )
        overlap = overlaps[i, best_j]
        phases[i] = overlap.conjugate() / abs(overlap)
        assigned.append(best_j)
        available.remove(best_j)

    prev_rank = np.empty(n, dtype=int)
    prev_rank[np.lexsort((previous.eigenvalues.real, -previous.eigenvalues.imag))] = np.arange(n)
    cur_rank = np.empty(n, dtype=int)
    cur_rank[np.lexsort((current.eigenvalues.real, -current.eigenvalues.imag))] = np.arange(n)
    switched = any(prev_rank[i] != cur_rank[assigned[i]] for i in range(n))
    return TrackingResult(permutation=tuple(assigned), phases=phases, sheet_switched=switched)


# ---------------------------------------------------------------------------
# A small synthetic system with a multi-state followed subspace.


@dataclass(frozen=True)
class ThreeLevelModel:
    """Three levels with a slowly switched symmetric coupling.

    The first two levels form the followed subspace; the third is the
    remote level integrated out by the wave-operator construction.  Widths
    sit on the diagonal, the real coupling matrix is ramped by sin^2.
    """

    duration: float
    hbar: float = 1.0
    energies: tuple[complex, complex, complex] = (0.0, 0.32 - 0.004j, 1.5 - 0.02j)
    couplings: tuple[float, float, float] = (0.05, 0.02, 0.03)

    def __post_init__(self) -> None:
        if not self.duration > 0.0:
            raise ValueError("duration must be positive")


def three_level_hamiltonian(model: ThreeLevelModel, t: float) -> np.ndarray:
    c01, c02, c12 = model.couplings
    ramp = math.sin(math.pi * t / model.duration) ** 2
    h = np.diag(np.asarray(model.energies, dtype=complex))
    mix = np.array(
        [[0.0, c01, c02], [c01, 0.0, c12], [c02, c12, 0.0]],
        dtype=complex,
    )
    return h + ramp * mix


def anchored_eigenframes(
    hamiltonian: Callable[[float], np.ndarray],
) -> Callable[[float], BiorthonormalEigensystem]:
    """History-free continuous frames for a weakly mixed level system.

    Eigenpairs are labeled by their dominant canonical-basis component and
    gauged so that this component is real and positive.  The recipe is
    deterministic and needs no propagation history, so the returned
    callable can be evaluated at arbitrary times (finite differencing
    included).  It is only valid while each eigenvector keeps a single
    dominant component; crossings raise AmbiguousTracking.
    """

    def frames(t: float) -> BiorthonormalEigensystem:
        h = np.asarray(hamiltonian(t), dtype=complex)
        n = h.shape[0]
        lam, vecs = np.linalg.eig(h)
        vecs = vecs / np.linalg.norm(vecs, axis=0)
        anchors = np.argmax(np.abs(vecs), axis=0)
        if len(set(int(a) for a in anchors)) != n:
            raise AmbiguousTracking("dominant components do not separate the eigenvectors")
        order = np.argsort(anchors)
        lam = lam[order]
        vecs = vecs[:, order]
        for b in range(n):
            pivot = vecs[b, b]
            if abs(pivot) < TRACKING_MARGIN:
                raise AmbiguousTracking("anchor component of label %d is too small" % b)
            vecs[:, b] *= abs(pivot) / pivot
        rinv = np.linalg.inv(vecs)
        return BiorthonormalEigensystem(
            eigenvalues=lam,
            right_vectors=vecs.T.copy(),
            left_duals=rinv.conj(),
        )

    return frames
