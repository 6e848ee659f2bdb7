import numpy as np
import pytest

from epdyn import models, propagators
from epdyn.propagators import PropagationPlan, Scheme


def mixer_hamiltonian(t):
    return np.array([[0.0, np.sin(t)], [np.sin(t), 0.2]], dtype=complex)


PSI0 = np.array([1.0, 0.0], dtype=complex)


def test_plan_validation():
    with pytest.raises(ValueError):
        PropagationPlan(n_steps=0, t0=0.0, t1=1.0, scheme=Scheme.SOD)
    with pytest.raises(ValueError):
        PropagationPlan(n_steps=10, t0=1.0, t1=1.0, scheme=Scheme.SOD)
    with pytest.raises(ValueError):
        PropagationPlan(n_steps=10, t0=0.0, t1=1.0, scheme=Scheme.SOD, record_every=0)


def test_plan_grid():
    plan = PropagationPlan(n_steps=4, t0=1.0, t1=3.0, scheme=Scheme.SOD)
    assert plan.dt == pytest.approx(0.5)
    np.testing.assert_allclose(plan.grid(), [1.0, 1.5, 2.0, 2.5, 3.0])


def test_trajectory_consistency_checks():
    with pytest.raises(ValueError):
        propagators.Trajectory(
            times=np.zeros(3), states=np.zeros((2, 2), dtype=complex), norms_sq=np.zeros(3)
        )
    traj = propagators.Trajectory.from_states([0.0, 1.0], [PSI0, 2.0 * PSI0])
    np.testing.assert_allclose(traj.norms_sq, [1.0, 4.0])
    np.testing.assert_allclose(traj.state_at(0.9), 2.0 * PSI0)


def test_pure_absorber_is_exact():
    """With no Hermitian part the split scheme reduces to the exact decay."""
    dissipator = np.diag([0.0, -0.125j])
    zero = lambda t: np.zeros((2, 2), dtype=complex)  # noqa: E731
    psi0 = np.array([0.6, 0.8], dtype=complex)
    plan = PropagationPlan(n_steps=64, t0=0.0, t1=8.0, scheme=Scheme.SPLIT_SOD)
    traj = propagators.split_sod_propagate(zero, dissipator, psi0, plan)
    for t, psi in zip(traj.times, traj.states):
        expected = np.array([0.6, 0.8 * np.exp(-0.125 * t)], dtype=complex)
        np.testing.assert_allclose(psi, expected, atol=1e-12)


def test_schemes_agree_on_smooth_problem():
    plan = PropagationPlan(n_steps=800, t0=0.0, t1=2.0, scheme=Scheme.RK4)
    reference = propagators.run_plan(plan, PSI0, mixer_hamiltonian)
    for scheme, tol in ((Scheme.SOD, 1e-4), (Scheme.SEO, 5e-3)):
        traj = propagators.run_plan(
            PropagationPlan(n_steps=800, t0=0.0, t1=2.0, scheme=scheme), PSI0, mixer_hamiltonian
        )
        assert np.linalg.norm(traj.states[-1] - reference.states[-1]) < tol


@pytest.mark.parametrize(
    ("scheme", "band"),
    [(Scheme.SOD, (3.0, 5.5)), (Scheme.FOD, (1.6, 2.6))],
)
def test_differencing_error_orders(scheme, band):
    reference = propagators.run_plan(
        PropagationPlan(n_steps=3200, t0=0.0, t1=2.0, scheme=Scheme.RK4), PSI0, mixer_hamiltonian
    )

    def final_error(n):
        traj = propagators.run_plan(
            PropagationPlan(n_steps=n, t0=0.0, t1=2.0, scheme=scheme), PSI0, mixer_hamiltonian
        )
        return float(np.linalg.norm(traj.states[-1] - reference.states[-1]))

    ratio = final_error(50) / final_error(100)
    assert band[0] <= ratio <= band[1]


def test_fod_divergence_detected():
    stiff = lambda t: np.array([[0.0, 100.0], [100.0, 0.0]], dtype=complex)  # noqa: E731
    plan = PropagationPlan(n_steps=200, t0=0.0, t1=50.0, scheme=Scheme.FOD)
    with pytest.raises(propagators.SchemeDivergence):
        propagators.run_plan(plan, PSI0, stiff)


def test_rk4_step_accuracy_and_overflow():
    rhs = lambda t, y: 1.0j * y  # noqa: E731
    y = 1.0 + 0.0j
    n = 32
    dt = 1.0 / n
    for k in range(n):
        y = propagators.rk4_step(rhs, k * dt, y, dt)
    assert abs(y - np.exp(1.0j)) < 1e-8
    with pytest.raises(propagators.StageOverflow):
        propagators.rk4_step(lambda t, v: 1e13 * v, 0.0, 1.0 + 0.0j, 0.1)


def test_record_every_thins_but_keeps_endpoints():
    plan = PropagationPlan(n_steps=20, t0=0.0, t1=2.0, scheme=Scheme.SEO, record_every=7)
    traj = propagators.run_plan(plan, PSI0, mixer_hamiltonian)
    np.testing.assert_allclose(traj.times, [0.0, 0.7, 1.4, 2.0])


def test_run_plan_requires_split_ingredients():
    plan = PropagationPlan(n_steps=10, t0=0.0, t1=1.0, scheme=Scheme.SPLIT_SOD)
    with pytest.raises(ValueError):
        propagators.run_plan(plan, PSI0, mixer_hamiltonian)


def test_propagation_is_deterministic():
    model = models.standard_two_level_model(50.0)
    plan = PropagationPlan(n_steps=300, t0=0.0, t1=50.0, scheme=Scheme.SEO)
    h = lambda t: models.two_level_hamiltonian(model, t)  # noqa: E731
    a = propagators.run_plan(plan, PSI0, h)
    b = propagators.run_plan(plan, PSI0, h)
    assert np.array_equal(a.states, b.states)
    assert np.array_equal(a.norms_sq, b.norms_sq)


def test_split_scheme_tracks_two_level_reference():
    """The split scheme agrees with the stepwise exponential on the real model."""
    model = models.standard_two_level_model(50.0)
    h = lambda t: models.two_level_hamiltonian(model, t)  # noqa: E731

    def hermitian_part(t):
        full = h(t)
        return 0.5 * (full + full.conj().T)

    dissipator = np.diag([0.0, -0.25j * model.gamma])
    plan = PropagationPlan(n_steps=2000, t0=0.0, t1=50.0, scheme=Scheme.SPLIT_SOD)
    split = propagators.run_plan(
        plan, PSI0, h, hermitian_part=hermitian_part, dissipator=dissipator
    )
    seo = propagators.run_plan(
        PropagationPlan(n_steps=2000, t0=0.0, t1=50.0, scheme=Scheme.SEO), PSI0, h
    )
    assert np.linalg.norm(split.states[-1] - seo.states[-1]) < 1e-3
    assert split.norms_sq[-1] == pytest.approx(seo.norms_sq[-1], rel=5e-3)


def test_convergence_curve_shrinks_with_steps():
    model = models.standard_two_level_model(50.0)
    h = lambda t: models.two_level_hamiltonian(model, t)  # noqa: E731
    template = PropagationPlan(n_steps=100, t0=0.0, t1=50.0, scheme=Scheme.SOD)
    reference = propagators.run_plan(
        PropagationPlan(n_steps=2000, t0=0.0, t1=50.0, scheme=Scheme.RK4), PSI0, h
    )

    def runner(plan):
        return propagators.run_plan(plan, PSI0, h)

    curve = propagators.convergence_curve(runner, reference, [100, 200, 400], template)
    means = [m for _, m in curve]
    assert means[0] > means[1] > means[2]
    assert all(m >= 0.0 for m in means)
