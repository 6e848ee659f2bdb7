import numpy as np
import pytest

from epdyn import models, propagators, waveop
from epdyn.propagators import PropagationPlan, Scheme

T0 = 50.0


@pytest.fixture(scope="module")
def model():
    return models.standard_two_level_model(T0)


def test_scheduled_connection_regular_at_every_node(model):
    for t in (0.0, T0 / 2, T0):
        value = waveop.scheduled_connection(model, t)
        assert np.isfinite(value.real) and np.isfinite(value.imag)


def test_scheduled_connection_uses_opposite_sheet_at_switch_node(model):
    t = T0 / 2
    with pytest.raises(models.DenominatorDegenerate):
        models.two_level_connection(model, t, sheet=models.sheet_of(model, t))
    assert waveop.scheduled_connection(model, t) == models.two_level_connection(model, t, sheet=1)


def test_scheduled_eigenvalue_continuous_through_switch(model):
    eps = 1e-8 * T0
    below = waveop.scheduled_eigenvalue(model, T0 / 2 - eps)
    above = waveop.scheduled_eigenvalue(model, T0 / 2 + eps)
    assert abs(above - below) < 1e-6


def test_riccati_rhs_matches_general_form(model):
    rng = np.random.default_rng(31)
    for _ in range(10):
        t = float(rng.uniform(1.0, T0 - 1.0))
        x = complex(rng.normal(), rng.normal())
        for sheet in (1, -1):
            coupling = models.two_level_nonadiabatic_coupling(model, t, sheet)
            es = models.two_level_eigensystem(model, t, sheet)
            gap = es.eigenvalues[1] - es.eigenvalues[0]
            expected = waveop.riccati_rhs_general(x, t, coupling, coupling, gap, model.hbar)
            value = waveop.riccati_rhs_two_level(x, t, model, sheet)
            assert value == pytest.approx(expected, abs=1e-14)


def test_riccati_rhs_oracle_at_quarter_period(model):
    value = waveop.riccati_rhs_two_level(0.0, T0 / 4, model, sheet=1)
    assert value == pytest.approx(4.0 * np.pi / (3.0 * T0), abs=1e-14)


def test_reduced_integration_is_fourth_order(model):
    def x_at(n):
        plan = PropagationPlan(n_steps=n, t0=0.0, t1=T0 / 4, scheme=Scheme.RK4)
        return waveop.propagate_reduced_waveop(model, plan)[-1].x

    reference = x_at(1600)
    ratio = abs(x_at(100) - reference) / abs(x_at(200) - reference)
    assert 10.0 < ratio < 22.0


def test_reduced_integration_rejects_other_schemes(model):
    plan = PropagationPlan(n_steps=10, t0=0.0, t1=1.0, scheme=Scheme.RK4)
    with pytest.raises(ValueError):
        waveop.propagate_reduced_waveop(model, plan, scheme=Scheme.SOD)


def test_accumulators_are_trapezoid_integrals(model):
    plan = PropagationPlan(n_steps=24, t0=0.0, t1=T0 / 2, scheme=Scheme.RK4)
    states = waveop.propagate_reduced_waveop(model, plan)
    grid = np.array([s.t for s in states])
    lam = np.array([waveop.scheduled_eigenvalue(model, t) for t in grid])
    conn = np.array([waveop.scheduled_connection(model, t) for t in grid])
    eta = np.array(
        [s.x * models.two_level_nonadiabatic_coupling(model, s.t) for s in states]
    )
    dt = plan.dt
    final = states[-1]
    assert final.accumulated_dynamical == pytest.approx(
        complex(np.trapezoid(lam, dx=dt)), abs=1e-13
    )
    assert final.accumulated_connection == pytest.approx(
        complex(np.trapezoid(conn, dx=dt)), abs=1e-13
    )
    assert final.accumulated_eta == pytest.approx(complex(np.trapezoid(eta, dx=dt)), abs=1e-13)


def test_chart_switching_crosses_poles(model):
    plan = PropagationPlan(n_steps=2000, t0=0.0, t1=T0, scheme=Scheme.RK4)
    states = waveop.propagate_reduced_waveop(model, plan)
    xs = np.array([s.x for s in states])
    assert np.all(np.isfinite(xs))
    assert np.max(np.abs(xs)) > waveop.CHART_SWITCH


def test_coordinate_flips_sign_at_sheet_switch(model):
    plan = PropagationPlan(n_steps=2000, t0=0.0, t1=T0, scheme=Scheme.RK4)
    states = waveop.propagate_reduced_waveop(model, plan)
    half = plan.n_steps // 2
    before, after = states[half - 1].x, states[half].x
    # continuity of the underlying solution plus the flip at the node
    assert abs(after + before) < 0.05 * (1.0 + abs(after))


def test_assemble_wave_operator_invariants(model):
    rng = np.random.default_rng(8)
    for _ in range(6):
        t = float(rng.uniform(1.0, T0 - 1.0))
        x = complex(rng.normal(), rng.normal())
        es = models.two_level_eigensystem(model, t)
        out = waveop.assemble_wave_operator(x, es, t=t)
        np.testing.assert_allclose(out.p0 @ out.omega, out.p0, atol=1e-12)
        np.testing.assert_allclose(out.omega @ out.p0, out.omega, atol=1e-12)
        np.testing.assert_allclose(out.omega @ out.omega, out.omega, atol=1e-12)
        np.testing.assert_allclose(out.p0 @ out.p0, out.p0, atol=1e-12)


def test_assemble_wave_operator_sheet_check(model):
    es = models.two_level_eigensystem(model, 10.0, sheet=1)
    with pytest.raises(ValueError):
        waveop.assemble_wave_operator(0.1j, es, sheet=-1)


def test_adiabatic_kernel_matches_analytic_derivative(model):
    t = T0 / 4

    def p0_of(s):
        es = models.two_level_eigensystem(model, s)
        return np.outer(es.right_vectors[0], es.left_duals[0].conj())

    kernel = waveop.adiabatic_kernel(p0_of, t, fd_step=1e-6 * T0)
    es = models.two_level_eigensystem(model, t)
    rights_dot, rows_dot = models.two_level_frame_derivatives(model, t)
    p_dot = np.outer(rights_dot[0], es.left_duals[0].conj()) + np.outer(
        es.right_vectors[0], rows_dot[0]
    )
    expected = 1.0j * (p_dot @ (2.0 * p0_of(t) - np.eye(2)))
    np.testing.assert_allclose(kernel, expected, atol=1e-9)


def test_renormalized_hamiltonian_feeds_scalar_riccati(model):
    """The off-diagonal block rate of the Y equation in the renormalized frame
    is exactly the scalar reduced-coordinate rate."""
    p00 = np.diag([1.0, 0.0]).astype(complex)
    q00 = np.diag([0.0, 1.0]).astype(complex)
    rng = np.random.default_rng(14)
    for _ in range(8):
        t = float(rng.uniform(1.0, T0 - 1.0))
        y = complex(rng.normal(), rng.normal())
        sheet = models.sheet_of(model, t)
        h_tilde = waveop.renormalized_hamiltonian_two_level(model, t, sheet)
        y_block = np.array([[0.0, 0.0], [y, 0.0]], dtype=complex)
        rate = waveop.y_equation_rhs(y_block, h_tilde, p00, q00, hbar=model.hbar)
        scalar = waveop.riccati_rhs_two_level(y, t, model, sheet)
        assert rate[1, 0] == pytest.approx(scalar, abs=1e-12)
        assert abs(rate[0, 0]) < 1e-15 and abs(rate[0, 1]) < 1e-15 and abs(rate[1, 1]) < 1e-15


def test_y_equation_rejects_block_leakage():
    p00 = np.diag([1.0, 0.0]).astype(complex)
    q00 = np.diag([0.0, 1.0]).astype(complex)
    bad = np.array([[0.5, 0.0], [0.1, 0.0]], dtype=complex)
    with pytest.raises(waveop.BlockViolation):
        waveop.y_equation_rhs(bad, np.eye(2, dtype=complex), p00, q00)


def test_intertwining_property_two_level(model):
    plan = PropagationPlan(n_steps=200, t0=0.0, t1=T0, scheme=Scheme.RK4, record_every=10)

    def basis(t):
        return models.two_level_eigensystem(model, t)

    series = waveop.intertwining_propagate(basis, plan, switch_times=(T0 / 2,))
    p_start = None
    worst = 0.0
    for t, v in zip(series.times, series.operators):
        es = basis(float(t))
        p_t = np.outer(es.right_vectors[0], es.left_duals[0].conj())
        if p_start is None:
            p_start = p_t
        residual = v @ p_start - p_t @ v
        worst = max(worst, float(np.max(np.abs(residual))) / max(1.0, float(np.max(np.abs(v)))))
    assert worst < 1e-10


def test_effective_hamiltonian_bounded_at_start_and_switch(model):
    """The starting node and the scheduled switch node both have continuous
    projector families; the derivative stencil must not amplify either."""
    for t in (0.0, T0 / 2):
        h_eff = waveop.effective_hamiltonian_two_level(model, t, 0.0)
        assert np.max(np.abs(h_eff)) < 1.0


def test_effective_evolution_decomposition(model):
    n = 400
    plan = PropagationPlan(n_steps=n, t0=0.0, t1=T0 / 2, scheme=Scheme.RK4)
    grid, us, xs = waveop.effective_evolution(model, plan)
    assert len(us) == n + 1 and len(xs) == n + 1
    psi0 = np.array([1.0, 0.0], dtype=complex)
    reference = propagators.run_plan(
        plan, psi0, lambda t: models.two_level_hamiltonian(model, t), hbar=model.hbar
    )
    worst = 0.0
    for k in range(0, n + 1, 8):
        es = models.two_level_eigensystem(model, float(grid[k]))
        omega = waveop.assemble_wave_operator(xs[k], es, t=float(grid[k])).omega
        err = np.linalg.norm(omega @ (us[k] @ psi0) - reference.states[k])
        worst = max(worst, err / np.linalg.norm(reference.states[k]))
    assert worst < 1e-7
