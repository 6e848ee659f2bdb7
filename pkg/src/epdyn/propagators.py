"""Wave-function propagation schemes on a uniform time grid.

The workhorse is the split second-order differencing scheme, which treats
the anti-Hermitian part of the Hamiltonian exactly and keeps the explicit
three-term recursion for the Hermitian part.  Plain second-order
differencing, first-order differencing and the stepwise exponential are
provided for cross-checks and convergence studies; a generic fourth-order
Runge-Kutta step serves the reduced equations elsewhere in the package.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, replace
from typing import Callable, Sequence

import numpy as np

from .numerics import matrix_exponential, wavefunction_distance

#: Norm growth factor over the initial state that aborts a propagation.
DIVERGENCE_FACTOR = 1.0e6

_trapezoid = getattr(np, "trapezoid", np.trapz)

#: Magnitude bound on Runge-Kutta stage values.
STAGE_BOUND = 1.0e12


class SchemeDivergence(Exception):
    """The propagated norm exceeded the divergence bound."""


class StageOverflow(Exception):
    """A Runge-Kutta stage left the trusted magnitude range."""


class Scheme(enum.Enum):
    SPLIT_SOD = "split-sod"
    SOD = "sod"
    FOD = "fod"
    SEO = "seo"
    RK4 = "rk4"


@dataclass(frozen=True)
class PropagationPlan:
    """Uniform grid and scheme selection for one propagation.

    ``record_every`` thins the stored samples; the initial and final states
    are always recorded regardless.
    """

    n_steps: int
    t0: float
    t1: float
    scheme: Scheme
    record_every: int = 1

    def __post_init__(self) -> None:
        if self.n_steps < 1:
            raise ValueError("n_steps must be at least 1")
        if not self.t1 > self.t0:
            raise ValueError("t1 must exceed t0")
        if self.record_every < 1:
            raise ValueError("record_every must be at least 1")

    @property
    def dt(self) -> float:
        return (self.t1 - self.t0) / self.n_steps

    def grid(self) -> np.ndarray:
        return self.t0 + self.dt * np.arange(self.n_steps + 1)


@dataclass(frozen=True)
class Trajectory:
    """Recorded propagation samples.

    ``states[k]`` is the wave function at ``times[k]``; ``norms_sq`` holds
    the squared Euclidean norms of exactly those states.
    """

    times: np.ndarray
    states: np.ndarray
    norms_sq: np.ndarray

    def __post_init__(self) -> None:
        if len(self.times) != len(self.states) or len(self.times) != len(self.norms_sq):
            raise ValueError("times, states and norms_sq must have equal length")

    @staticmethod
    def from_states(times: Sequence[float], states: Sequence[np.ndarray]) -> "Trajectory":
        arr = np.asarray(states, dtype=complex)
        norms = np.einsum("ij,ij->i", arr.conj(), arr).real
        return Trajectory(times=np.asarray(times, dtype=float), states=arr, norms_sq=norms)

    def state_at(self, t: float) -> np.ndarray:
        """State at the recorded sample nearest to t."""
        idx = int(np.argmin(np.abs(self.times - t)))
        return self.states[idx]


def _should_record(step: int, n_steps: int, record_every: int) -> bool:
    return step % record_every == 0 or step == n_steps


def _check_norm(psi: np.ndarray, norm0: float, step: int, t: float) -> None:
    if np.linalg.norm(psi) > DIVERGENCE_FACTOR * norm0:
        raise SchemeDivergence("norm diverged at step %d (t=%g)" % (step, t))


def split_sod_propagate(
    hermitian_part: Callable[[float], np.ndarray],
    dissipator: np.ndarray,
    psi0: np.ndarray,
    plan: PropagationPlan,
    hbar: float = 1.0,
) -> Trajectory:
    """Second-order differencing with the static anti-Hermitian part split off.

    With H(t) = H0(t) + D, D time independent and anti-Hermitian as an
    operator times -i (pure absorber), the recursion

        psi_{n+1} = E2 psi_{n-1} - 2i dt/hbar * E1 (H0(t_n) psi_n)

    with E1 = exp(-i dt D / hbar) and E2 = E1^2 treats the absorber exactly
    and is conditionally stable in the Hermitian part alone.  The first
    step is bootstrapped with the full stepwise exponential.
    """
    dt = plan.dt
    d = np.asarray(dissipator, dtype=complex)
    e1 = matrix_exponential(d, -1.0j * dt / hbar)
    e2 = matrix_exponential(d, -2.0j * dt / hbar)

    psi_prev = np.asarray(psi0, dtype=complex).copy()
    norm0 = float(np.linalg.norm(psi_prev))
    times = [plan.t0]
    states = [psi_prev.copy()]

    psi_cur = matrix_exponential(hermitian_part(plan.t0) + d, -1.0j * dt / hbar) @ psi_prev
    if _should_record(1, plan.n_steps, plan.record_every):
        times.append(plan.t0 + dt)
        states.append(psi_cur.copy())

    coeff = -2.0j * dt / hbar
    for step in range(2, plan.n_steps + 1):
        t_mid = plan.t0 + (step - 1) * dt
        psi_next = e2 @ psi_prev + coeff * (e1 @ (hermitian_part(t_mid) @ psi_cur))
        psi_prev, psi_cur = psi_cur, psi_next
        t_now = plan.t0 + step * dt
        _check_norm(psi_cur, norm0, step, t_now)
        if _should_record(step, plan.n_steps, plan.record_every):
            times.append(t_now)
            states.append(psi_cur.copy())
    return Trajectory.from_states(times, states)


def sod_propagate(
    hamiltonian: Callable[[float], np.ndarray],
    psi0: np.ndarray,
    plan: PropagationPlan,
    hbar: float = 1.0,
) -> Trajectory:
    """Plain second-order differencing: the split scheme with a zero absorber."""
    dim = np.asarray(psi0).shape[0]
    zero = np.zeros((dim, dim), dtype=complex)
    return split_sod_propagate(hamiltonian, zero, psi0, plan, hbar=hbar)


def fod_propagate(
    hamiltonian: Callable[[float], np.ndarray],
    psi0: np.ndarray,
    plan: PropagationPlan,
    hbar: float = 1.0,
) -> Trajectory:
    """First-order differencing psi_{n+1} = psi_n - i dt/hbar H(t_n) psi_n."""
    dt = plan.dt
    psi = np.asarray(psi0, dtype=complex).copy()
    norm0 = float(np.linalg.norm(psi))
    times = [plan.t0]
    states = [psi.copy()]
    coeff = -1.0j * dt / hbar
    for step in range(1, plan.n_steps + 1):
        t_prev = plan.t0 + (step - 1) * dt
        psi = psi + coeff * (hamiltonian(t_prev) @ psi)
        t_now = plan.t0 + step * dt
        _check_norm(psi, norm0, step, t_now)
        if _should_record(step, plan.n_steps, plan.record_every):
            times.append(t_now)
            states.append(psi.copy())
    return Trajectory.from_states(times, states)


def seo_propagate(
    hamiltonian: Callable[[float], np.ndarray],
    psi0: np.ndarray,
    plan: PropagationPlan,
    hbar: float = 1.0,
) -> Trajectory:
    """Stepwise exponential psi_{k+1} = exp(-i dt H(t_k)/hbar) psi_k.

    The Hamiltonian is frozen at the beginning of each interval, which is
    accurate exactly when the parameters move slowly compared to dt.
    """
    dt = plan.dt
    psi = np.asarray(psi0, dtype=complex).copy()
    norm0 = float(np.linalg.norm(psi))
    times = [plan.t0]
    states = [psi.copy()]
    for step in range(1, plan.n_steps + 1):
        t_prev = plan.t0 + (step - 1) * dt
        psi = matrix_exponential(hamiltonian(t_prev), -1.0j * dt / hbar) @ psi
        t_now = plan.t0 + step * dt
        _check_norm(psi, norm0, step, t_now)
        if _should_record(step, plan.n_steps, plan.record_every):
            times.append(t_now)
            states.append(psi.copy())
    return Trajectory.from_states(times, states)


def _stage_magnitude(value) -> float:
    return float(np.max(np.abs(value)))


def rk4_step(rhs: Callable[[float, object], object], t: float, state, dt: float):
    """One classical Runge-Kutta step for an arbitrary complex state.

    Works for scalars and arrays alike.  Raises StageOverflow when any
    stage magnitude exceeds the trusted range, which catches runaway
    solutions before they turn into infinities.
    """
    k1 = rhs(t, state)
    k2 = rhs(t + 0.5 * dt, state + 0.5 * dt * k1)
    k3 = rhs(t + 0.5 * dt, state + 0.5 * dt * k2)
    k4 = rhs(t + dt, state + dt * k3)
    for k in (k1, k2, k3, k4):
        if _stage_magnitude(k) > STAGE_BOUND:
            raise StageOverflow("stage magnitude exceeded %.1e at t=%g" % (STAGE_BOUND, t))
    return state + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def rk4_propagate(
    hamiltonian: Callable[[float], np.ndarray],
    psi0: np.ndarray,
    plan: PropagationPlan,
    hbar: float = 1.0,
) -> Trajectory:
    """Classical Runge-Kutta applied to the Schrodinger equation."""

    def rhs(t: float, psi: np.ndarray) -> np.ndarray:
        return (-1.0j / hbar) * (hamiltonian(t) @ psi)

    dt = plan.dt
    psi = np.asarray(psi0, dtype=complex).copy()
    norm0 = float(np.linalg.norm(psi))
    times = [plan.t0]
    states = [psi.copy()]
    for step in range(1, plan.n_steps + 1):
        t_prev = plan.t0 + (step - 1) * dt
        psi = rk4_step(rhs, t_prev, psi, dt)
        t_now = plan.t0 + step * dt
        _check_norm(psi, norm0, step, t_now)
        if _should_record(step, plan.n_steps, plan.record_every):
            times.append(t_now)
            states.append(psi.copy())
    return Trajectory.from_states(times, states)


def run_plan(
    plan: PropagationPlan,
    psi0: np.ndarray,
    hamiltonian: Callable[[float], np.ndarray],
    hbar: float = 1.0,
    hermitian_part: Callable[[float], np.ndarray] | None = None,
    dissipator: np.ndarray | None = None,
) -> Trajectory:
    """Dispatch a plan to the matching scheme.

    The split scheme needs the Hermitian part and the static absorber
    separately; the other schemes use the full Hamiltonian callable.
    """
    if plan.scheme is Scheme.SPLIT_SOD:
        if hermitian_part is None or dissipator is None:
            raise ValueError("the split scheme needs hermitian_part and dissipator")
        return split_sod_propagate(hermitian_part, dissipator, psi0, plan, hbar=hbar)
    if plan.scheme is Scheme.SOD:
        return sod_propagate(hamiltonian, psi0, plan, hbar=hbar)
    if plan.scheme is Scheme.FOD:
        return fod_propagate(hamiltonian, psi0, plan, hbar=hbar)
    if plan.scheme is Scheme.SEO:
        return seo_propagate(hamiltonian, psi0, plan, hbar=hbar)
    if plan.scheme is Scheme.RK4:
        return rk4_propagate(hamiltonian, psi0, plan, hbar=hbar)
    raise ValueError("unknown scheme %r" % (plan.scheme,))


def convergence_curve(
    runner: Callable[[PropagationPlan], Trajectory],
    reference: Trajectory,
    step_counts: Sequence[int],
    plan_template: PropagationPlan,
) -> list[tuple[int, float]]:
    """Mean projective distance to a reference over the first half window.

    For each step count a plan derived from the template is run and the
    wavefunction distance to the nearest-in-time reference sample is
    averaged (trapezoid weights) over [t0, (t0+t1)/2].  Returns (n, mean)
    pairs in the given order.
    """
    t_mid = 0.5 * (plan_template.t0 + plan_template.t1)
    ref_times = reference.times
    results: list[tuple[int, float]] = []
    for n in step_counts:
        traj = runner(replace(plan_template, n_steps=int(n)))
        mask = traj.times <= t_mid + 1.0e-9 * (plan_template.t1 - plan_template.t0)
        times = traj.times[mask]
        if len(times) < 2:
            raise ValueError("fewer than two samples inside the averaging window")
        distances = np.empty(len(times))
        for idx, t in enumerate(times):
            j = int(np.argmin(np.abs(ref_times - t)))
            distances[idx] = wavefunction_distance(traj.states[idx], reference.states[j])
        mean = float(_trapezoid(distances, times) / (times[-1] - times[0]))
        results.append((int(n), mean))
    return results
