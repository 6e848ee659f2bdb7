import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from epdyn import analysis
from epdyn.numerics import ZeroVector
from epdyn.propagators import Trajectory


def make_trajectory(times, states):
    return Trajectory.from_states(np.asarray(times, dtype=float), np.asarray(states, dtype=complex))


@pytest.fixture()
def decaying():
    times = np.linspace(0.0, 4.0, 9)
    states = np.array(
        [[np.exp(-0.3 * t) * np.cos(t), 1j * np.exp(-0.3 * t) * np.sin(t)] for t in times]
    )
    return make_trajectory(times, states)


def test_populations_sum_to_one_on_complete_basis(decaying):
    series = analysis.renormalized_populations(
        decaying, {"g": np.array([1.0, 0.0]), "u": np.array([0.0, 1.0])}
    )
    np.testing.assert_allclose(series.total(), np.ones(9), atol=1e-13)
    assert series.renormalized


@settings(max_examples=50, deadline=None)
@given(seed=st.integers(min_value=0, max_value=10_000))
def test_population_sum_invariant_under_decay(seed):
    rng = np.random.default_rng(seed)
    times = np.linspace(0.0, 1.0, 6)
    states = rng.normal(size=(6, 3)) + 1j * rng.normal(size=(6, 3))
    traj = make_trajectory(times, states)
    basis = {("s%d" % k): np.eye(3)[k] for k in range(3)}
    series = analysis.renormalized_populations(traj, basis)
    np.testing.assert_allclose(series.total(), np.ones(6), atol=1e-12)


def test_matrix_projector_matches_vector_form(decaying):
    v = np.array([0.6, 0.8j])
    p = np.outer(v, v.conj())
    series = analysis.renormalized_populations(decaying, {"ray": v, "proj": p})
    np.testing.assert_allclose(series.values["ray"], series.values["proj"], atol=1e-13)


def test_underflowed_samples_become_nan():
    times = np.array([0.0, 1.0])
    states = np.array([[1.0, 0.0], [1e-200, 0.0]])
    traj = make_trajectory(times, states)
    series = analysis.renormalized_populations(traj, {"g": np.array([1.0, 0.0])})
    assert series.values["g"][0] == pytest.approx(1.0)
    assert np.isnan(series.values["g"][1])


def test_zero_projector_rejected(decaying):
    with pytest.raises(ZeroVector):
        analysis.renormalized_populations(decaying, {"bad": np.zeros(2)})


def test_nonsquare_projector_rejected(decaying):
    with pytest.raises(ValueError):
        analysis.renormalized_populations(decaying, {"bad": np.zeros((2, 3))})


def test_dissipation_rate_reads_final_norm():
    times = np.array([0.0, 1.0])
    states = np.array([[1.0 + 0j, 0.0], [1e-3, 0.0]])
    traj = make_trajectory(times, states)
    assert analysis.dissipation_rate(traj) == pytest.approx(-6.0)


def test_dissipation_rate_underflow_raises():
    times = np.array([0.0, 1.0])
    states = np.array([[1.0, 0.0], [0.0, 0.0]])
    traj = make_trajectory(times, states)
    with pytest.raises(ZeroVector):
        analysis.dissipation_rate(traj)


def test_distance_series_zero_against_itself(decaying):
    times, dist = analysis.distance_series(decaying, decaying)
    np.testing.assert_allclose(dist, np.zeros(len(times)), atol=1e-12)
    np.testing.assert_array_equal(times, decaying.times)


def test_distance_series_aligns_to_finer_reference(decaying):
    fine_times = np.linspace(0.0, 4.0, 33)
    fine_states = np.array(
        [[np.exp(-0.3 * t) * np.cos(t), 1j * np.exp(-0.3 * t) * np.sin(t)] for t in fine_times]
    )
    reference = make_trajectory(fine_times, fine_states)
    _, dist = analysis.distance_series(decaying, reference)
    np.testing.assert_allclose(dist, np.zeros(9), atol=1e-12)


def test_incompatible_grids_rejected(decaying):
    shifted = make_trajectory(decaying.times + 0.31, decaying.states)
    with pytest.raises(ValueError, match="incompatible"):
        analysis.distance_series(decaying, shifted)


def test_norm_error_series_zero_against_itself(decaying):
    _, err = analysis.norm_error_series(decaying, decaying)
    np.testing.assert_allclose(err, np.zeros(9), atol=0.0)


def test_time_averaged_constant():
    times = np.linspace(2.0, 5.0, 17)
    assert analysis.time_averaged(times, np.full(17, 0.75)) == pytest.approx(0.75)


def test_time_averaged_validation():
    with pytest.raises(ValueError):
        analysis.time_averaged(np.array([1.0]), np.array([2.0]))
    with pytest.raises(ValueError):
        analysis.time_averaged(np.array([1.0, 1.0]), np.array([2.0, 2.0]))


def test_write_csv_deterministic_and_parsable(tmp_path):
    path = tmp_path / "series.csv"
    columns = {"t": np.array([0.0, 0.5]), "p0": np.array([1.0, 1.0 / 3.0])}
    analysis.write_csv(str(path), columns)
    first = path.read_bytes()
    analysis.write_csv(str(path), columns)
    assert path.read_bytes() == first
    rows = first.decode().strip().split("\n")
    assert rows[0].strip() == "t,p0"
    back = [float(x) for x in rows[2].split(",")]
    assert back[1] == 1.0 / 3.0  # format round-trips doubles exactly
    assert not (tmp_path / "series.csv.tmp").exists()


def test_write_csv_validation(tmp_path):
    with pytest.raises(ValueError):
        analysis.write_csv(str(tmp_path / "x.csv"), {})
    with pytest.raises(ValueError, match="mismatched"):
        analysis.write_csv(
            str(tmp_path / "x.csv"),
            {"a": np.array([1.0, 2.0]), "b": np.array([1.0])},
        )


def test_write_summary_json_sorted_and_newline_terminated(tmp_path):
    path = tmp_path / "summary.json"
    analysis.write_summary_json(str(path), {"zeta": 1, "alpha": {"b": 2, "a": 3}})
    text = path.read_text()
    assert text.endswith("\n")
    assert text.index('"alpha"') < text.index('"zeta"')
    analysis.write_summary_json(str(path), {"zeta": 1, "alpha": {"b": 2, "a": 3}})
    assert path.read_text() == text
