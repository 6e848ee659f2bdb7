"""Scenario runner tying the models, propagators and representations together.

Built-in scenarios reproduce the closed-loop two-level runs at the four
durations, the convergence study, the two-channel grid demonstration and
the synthetic three-level test of the block machinery.  Custom two-level
runs are described by an INI file with sections [model], [path], [plan]
and [outputs].  All outputs are deterministic: rerunning a scenario
produces byte-identical files.

Exit codes: 0 on success, 2 for configuration problems (including usage
errors), 3 when a propagation fails numerically.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import configparser
import json
import math
import os
import sys
from dataclasses import dataclass, replace

import numpy as np

from . import analysis, models, numerics, propagators, representations, waveop
from .propagators import PropagationPlan, Scheme, Trajectory

REPRESENTATION_NAMES = ("reference", "adiabatic", "almost_adiabatic")

#: Exceptions reported as numerical failures (exit code 3).
NUMERICAL_ERRORS = (
    propagators.SchemeDivergence,
    propagators.StageOverflow,
    numerics.NonConvergence,
    numerics.DefectiveMatrix,
    numerics.ZeroVector,
    numerics.GridTooCoarse,
    models.ExceptionalPointProximity,
    models.DenominatorDegenerate,
    models.DegenerateGap,
    models.AmbiguousTracking,
    waveop.BlockViolation,
    representations.SingularOverlap,
)


class ConfigError(Exception):
    """A scenario configuration failed validation."""


@dataclass(frozen=True)
class Scenario:
    """Everything needed to run one named experiment."""

    name: str
    kind: str
    duration: float
    n_steps: int
    scheme: Scheme
    representations: tuple[str, ...]
    gamma: float = 0.5
    hbar: float = 1.0
    record_every: int = 1
    out_dir: str = "results"
    out_format: str = "csv"
    description: str = ""
    expected_runtime: str = ""


def builtin_scenarios() -> dict[str, Scenario]:
    """The static manifest of named scenarios."""
    all_reps = REPRESENTATION_NAMES
    two_level = []
    for mult, runtime in ((1, "~1 s"), (2, "~1 s"), (5, "~2 s"), (10, "~2 s")):
        duration = 50.0 * mult
        two_level.append(
            Scenario(
                name="two-level-%dT0" % mult if mult > 1 else "two-level-T0",
                kind="two-level",
                duration=duration,
                n_steps=1000,
                scheme=Scheme.SPLIT_SOD,
                representations=all_reps,
                description="closed parameter loop around the degeneracy, duration %g"
                % duration,
                expected_runtime=runtime,
            )
        )
    scenarios = {s.name: s for s in two_level}
    scenarios["two-level-convergence"] = Scenario(
        name="two-level-convergence",
        kind="convergence",
        duration=50.0,
        n_steps=4000,
        scheme=Scheme.SPLIT_SOD,
        representations=("reference",),
        description="mean half-loop error vs step count for the differencing "
        "schemes and the corrected following (steps set the reference run)",
        expected_runtime="~10 s",
    )
    scenarios["dvr-demo"] = Scenario(
        name="dvr-demo",
        kind="dvr",
        duration=40000.0,
        n_steps=1000,
        scheme=Scheme.SEO,
        representations=("reference",),
        record_every=5,
        description="two-channel grid wavepacket with absorbing boundary, "
        "driven coupling loop, bound-population tracking",
        expected_runtime="~40 s",
    )
    scenarios["threelevel-multidim"] = Scenario(
        name="threelevel-multidim",
        kind="three-level",
        duration=240.0,
        n_steps=1200,
        scheme=Scheme.SEO,
        representations=("reference", "almost_adiabatic"),
        description="two followed labels out of three, block transport "
        "against a stepwise-exponential reference",
        expected_runtime="~15 s",
    )
    return scenarios


# ---------------------------------------------------------------------------
# Scenario ingredients.


def _two_level_parts(scenario: Scenario):
    model = models.standard_two_level_model(
        scenario.duration, gamma=scenario.gamma, hbar=scenario.hbar
    )

    def hamiltonian(t: float) -> np.ndarray:
        return models.two_level_hamiltonian(model, t)

    def hermitian_part(t: float) -> np.ndarray:
        w = model.path.coord1(t)
        d = model.path.coord2(t)
        return 0.5 * model.hbar * np.array([[0.0, w], [w, 2.0 * d]], dtype=complex)

    dissipator = np.diag([0.0, -0.25j * model.hbar * model.gamma])
    return model, hamiltonian, hermitian_part, dissipator


def _representation_trajectory(
    model: models.TwoLevelModel,
    plan: PropagationPlan,
    which: str,
    psi0: np.ndarray,
) -> Trajectory:
    """Sampled wavefunctions of one representation along the plan.

    The series is rescaled by one global constant so its initial sample
    equals ``psi0``; the raw frames carry an arbitrary complex scale.
    """
    states = waveop.propagate_reduced_waveop(model, plan)
    builder = (
        representations.adiabatic_wavefunction
        if which == "adiabatic"
        else representations.almost_adiabatic_wavefunction
    )
    times = np.array([s.t for s in states])
    psis = np.array([builder(model, s.t, s).psi for s in states])
    first = psis[0]
    scale = np.vdot(first, psi0) / np.vdot(first, first)
    return Trajectory.from_states(times, psis * scale)


def _first_half_mask(times: np.ndarray, duration: float) -> np.ndarray:
    half = 0.5 * duration
    return (times > 0.0) & (times <= half + 1.0e-9 * duration)


def _run_two_level(scenario: Scenario, out_dir: str) -> dict:
    model, hamiltonian, hermitian_part, dissipator = _two_level_parts(scenario)
    plan = PropagationPlan(
        n_steps=scenario.n_steps,
        t0=0.0,
        t1=scenario.duration,
        scheme=scenario.scheme,
        record_every=scenario.record_every,
    )
    psi0 = np.array([1.0, 0.0], dtype=complex)
    metrics: dict[str, float] = {}
    trajectories: dict[str, Trajectory] = {}

    if "reference" in scenario.representations:
        reference = propagators.run_plan(
            plan,
            psi0,
            hamiltonian,
            hbar=scenario.hbar,
            hermitian_part=hermitian_part,
            dissipator=dissipator,
        )
        trajectories["reference"] = reference
        metrics["dissipation_log10"] = analysis.dissipation_rate(reference)
        pops = analysis.renormalized_populations(
            reference,
            {"population_0": np.array([1.0, 0.0]), "population_1": np.array([0.0, 1.0])},
        )
        _write_series(
            os.path.join(out_dir, "populations"),
            {"time": pops.times, **pops.values},
            scenario.out_format,
        )
        mask = _first_half_mask(pops.times, scenario.duration)
        metrics["min_population_0_first_half"] = float(np.min(pops.values["population_0"][mask]))
        metrics["max_population_1_first_half"] = float(np.max(pops.values["population_1"][mask]))
        half_idx = int(np.argmin(np.abs(pops.times - 0.5 * scenario.duration)))
        metrics["population_0_at_half"] = float(pops.values["population_0"][half_idx])

    for which in ("adiabatic", "almost_adiabatic"):
        if which in scenario.representations:
            trajectories[which] = _representation_trajectory(model, plan, which, psi0)

    for name, traj in trajectories.items():
        filename = "trajectory" if name == "reference" else name
        _write_series(
            os.path.join(out_dir, filename),
            {
                "time": traj.times,
                "norm_sq": traj.norms_sq,
                "re_0": traj.states[:, 0].real,
                "im_0": traj.states[:, 0].imag,
                "re_1": traj.states[:, 1].real,
                "im_1": traj.states[:, 1].imag,
            },
            scenario.out_format,
        )

    if "reference" in trajectories:
        distance_columns: dict[str, np.ndarray] = {}
        for which in ("adiabatic", "almost_adiabatic"):
            if which not in trajectories:
                continue
            times, dist = analysis.distance_series(
                trajectories[which], trajectories["reference"]
            )
            distance_columns["time"] = times
            distance_columns[which] = dist
            mask = times <= 0.5 * scenario.duration + 1.0e-9 * scenario.duration
            metrics["mean_distance_first_half_%s" % which] = analysis.time_averaged(
                times[mask], dist[mask]
            )
        if distance_columns:
            _write_series(
                os.path.join(out_dir, "distances"), distance_columns, scenario.out_format
            )
    return metrics


def _run_convergence(scenario: Scenario, out_dir: str) -> dict:
    model, hamiltonian, hermitian_part, dissipator = _two_level_parts(scenario)
    psi0 = np.array([1.0, 0.0], dtype=complex)
    counts = [250, 500, 1000]
    ref_plan = PropagationPlan(
        n_steps=scenario.n_steps, t0=0.0, t1=scenario.duration, scheme=Scheme.SPLIT_SOD
    )
    reference = propagators.run_plan(
        ref_plan,
        psi0,
        hamiltonian,
        hbar=scenario.hbar,
        hermitian_part=hermitian_part,
        dissipator=dissipator,
    )

    def scheme_runner(plan: PropagationPlan) -> Trajectory:
        return propagators.run_plan(plan, psi0, hamiltonian, hbar=scenario.hbar)

    def almost_runner(plan: PropagationPlan) -> Trajectory:
        return _representation_trajectory(model, plan, "almost_adiabatic", psi0)

    template = replace(ref_plan, scheme=Scheme.SOD)
    curves = {
        "sod": propagators.convergence_curve(scheme_runner, reference, counts, template),
        "fod": propagators.convergence_curve(
            scheme_runner, reference, counts, replace(template, scheme=Scheme.FOD)
        ),
        "almost_adiabatic": propagators.convergence_curve(
            almost_runner, reference, counts, template
        ),
    }
    columns: dict[str, np.ndarray] = {"n": np.array(counts, dtype=float)}
    metrics: dict[str, float] = {}
    for family, curve in curves.items():
        means = np.array([m for _, m in curve])
        columns[family] = means
        slope = np.polyfit(np.log10(counts), np.log10(means), 1)[0]
        metrics["slope_%s" % family] = float(slope)
    _write_series(os.path.join(out_dir, "convergence"), columns, scenario.out_format)
    return metrics


def dvr_demo_model(duration: float = 40000.0, n_points: int = 100) -> models.DvrModel:
    """Two-channel grid model with a driven coupling loop.

    The lower channel holds a deep anharmonic well (19 bound states), the
    upper channel is repulsive, the transition moment saturates at large
    distance and a quartic absorber covers the last quarter of the grid.
    The drive encircles the coalescence of the 8th bound state with the
    dissociative resonance it couples to.
    """
    w_amp = 0.105
    omega_star = 0.10242
    d_omega = 0.0005
    rate = 4.0 * math.pi / duration

    def v_g(r: float) -> float:
        well = 1.0 - math.exp(-0.72 * (r - 2.0))
        return 0.103 * (well * well - 1.0)

    def v_u(r: float) -> float:
        return 0.15 * math.exp(-0.8 * (r - 2.0))

    def mu(r: float) -> float:
        return math.tanh(0.6 * r)

    def v_opt(r: float) -> float:
        if r <= 9.0:
            return 0.0
        s = (r - 9.0) / 3.0
        return 0.02 * s**4

    path = models.ParameterPath(
        duration=duration,
        coord1=lambda t: w_amp * (1.0 - math.cos(rate * t)),
        coord2=lambda t: omega_star + d_omega * math.sin(rate * t),
        coord1_dot=lambda t: w_amp * rate * math.sin(rate * t),
        coord2_dot=lambda t: d_omega * rate * math.cos(rate * t),
    )
    return models.DvrModel(
        n_points=n_points,
        r_max=12.0,
        reduced_mass=911.389,
        v_g=v_g,
        v_u=v_u,
        mu=mu,
        v_opt=v_opt,
        path=path,
    )


def _run_dvr(scenario: Scenario, out_dir: str) -> dict:
    model = dvr_demo_model(duration=scenario.duration)
    energies, bound = models.bound_channel_states(model)
    if len(energies) < 8:
        raise ConfigError("lower channel supports only %d bound states" % len(energies))
    n = model.n_points
    psi0 = np.zeros(2 * n, dtype=complex)
    psi0[:n] = bound[7]

    plan = PropagationPlan(
        n_steps=scenario.n_steps,
        t0=0.0,
        t1=scenario.duration,
        scheme=scenario.scheme,
        record_every=scenario.record_every,
    )

    def hamiltonian(t: float) -> np.ndarray:
        return models.dvr_hamiltonian(model, t)

    def hermitian_part(t: float) -> np.ndarray:
        h = models.dvr_hamiltonian(model, t)
        return 0.5 * (h + h.conj().T)

    grid, _ = models.dvr_basis_and_kinetic(model)
    absorber = np.array([model.v_opt(r) for r in grid], dtype=float)
    dissipator = -1.0j * np.diag(np.concatenate([absorber, absorber]))

    trajectory = propagators.run_plan(
        plan,
        psi0,
        hamiltonian,
        hbar=scenario.hbar,
        hermitian_part=hermitian_part,
        dissipator=dissipator,
    )
    bound_proj = np.zeros((2 * n, 2 * n), dtype=complex)
    bound_proj[:n, :n] = bound.T @ bound
    pops = analysis.renormalized_populations(trajectory, {"population_bound": bound_proj})
    _write_series(
        os.path.join(out_dir, "populations"),
        {
            "time": pops.times,
            "norm_sq": trajectory.norms_sq,
            "population_bound": pops.values["population_bound"],
        },
        scenario.out_format,
    )
    return {
        "dissipation_log10": analysis.dissipation_rate(trajectory),
        "final_bound_population": float(pops.values["population_bound"][-1]),
        "initial_level_energy": float(energies[7]),
        "bound_level_count": float(len(energies)),
    }


def _run_three_level(scenario: Scenario, out_dir: str) -> dict:
    model = models.ThreeLevelModel(duration=scenario.duration, hbar=scenario.hbar)
    problem = representations.three_level_active_problem(model)
    plan = PropagationPlan(
        n_steps=scenario.n_steps,
        t0=0.0,
        t1=scenario.duration,
        scheme=Scheme.RK4,
        record_every=scenario.record_every,
    )
    states = representations.propagate_multidim(problem, plan)
    times = np.array([s.t for s in states])
    psis = np.array(
        [representations.multidim_almost_adiabatic(problem, s.t, s).psi for s in states]
    )
    followed = Trajectory.from_states(times, psis)

    ref_plan = PropagationPlan(
        n_steps=2 * scenario.n_steps, t0=0.0, t1=scenario.duration, scheme=Scheme.SEO
    )
    psi0 = psis[0].copy()
    reference = propagators.run_plan(
        ref_plan,
        psi0,
        lambda t: models.three_level_hamiltonian(model, t),
        hbar=scenario.hbar,
    )
    dist_times, dist = analysis.distance_series(followed, reference)
    _write_series(
        os.path.join(out_dir, "distances"),
        {"time": dist_times, "almost_adiabatic": dist},
        scenario.out_format,
    )
    return {
        "mean_distance": analysis.time_averaged(dist_times, dist),
        "max_distance": float(np.max(dist)),
        "dissipation_log10": analysis.dissipation_rate(reference),
    }


_RUNNERS = {
    "two-level": _run_two_level,
    "convergence": _run_convergence,
    "dvr": _run_dvr,
    "three-level": _run_three_level,
}


def run_scenario(scenario: Scenario) -> str:
    """Run one scenario and write its outputs; returns the output directory."""
    if not scenario.representations:
        raise ConfigError("scenario %r requests no representations" % scenario.name)
    for rep in scenario.representations:
        if rep not in REPRESENTATION_NAMES:
            raise ConfigError(
                "unknown representation %r (choose from %s)"
                % (rep, ", ".join(REPRESENTATION_NAMES))
            )
    runner = _RUNNERS.get(scenario.kind)
    if runner is None:
        raise ConfigError("unknown scenario kind %r" % scenario.kind)
    out_dir = os.path.join(scenario.out_dir, scenario.name)
    os.makedirs(out_dir, exist_ok=True)
    metrics = runner(scenario, out_dir)
    analysis.write_summary_json(
        os.path.join(out_dir, "summary.json"),
        {
            "scenario": {
                "name": scenario.name,
                "kind": scenario.kind,
                "duration": scenario.duration,
                "gamma": scenario.gamma,
                "hbar": scenario.hbar,
                "n_steps": scenario.n_steps,
                "scheme": scenario.scheme.value,
                "record_every": scenario.record_every,
                "representations": list(scenario.representations),
            },
            "metrics": metrics,
        },
    )
    return out_dir


def _write_series(path_base: str, columns: dict[str, np.ndarray], fmt: str) -> None:
    if fmt == "csv":
        analysis.write_csv(path_base + ".csv", columns)
    else:
        payload = {
            "columns": list(columns.keys()),
            "data": {k: [float(v) for v in np.asarray(arr)] for k, arr in columns.items()},
        }
        analysis.write_summary_json(path_base + ".json", payload)


# ---------------------------------------------------------------------------
# Configuration files.

_CONFIG_SCHEMA = {
    "model": ("type", "gamma", "hbar"),
    "path": ("duration",),
    "plan": ("steps", "scheme", "record_every"),
    "outputs": ("directory", "representations", "format"),
}


def _config_float(parser: configparser.ConfigParser, section: str, key: str, default: float) -> float:
    if not parser.has_option(section, key):
        return default
    raw = parser.get(section, key)
    try:
        return float(raw)
    except ValueError:
        raise ConfigError("[%s] %s: invalid number %r" % (section, key, raw)) from None


def _config_int(parser: configparser.ConfigParser, section: str, key: str, default: int) -> int:
    if not parser.has_option(section, key):
        return default
    raw = parser.get(section, key)
    try:
        return int(raw)
    except ValueError:
        raise ConfigError("[%s] %s: invalid integer %r" % (section, key, raw)) from None


def load_config(path: str) -> Scenario:
    """Parse an INI scenario description into a Scenario.

    Only the closed-form two-level family is configurable this way; the
    grid and three-level scenarios are built-in.
    """
    parser = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    try:
        with open(path) as handle:
            parser.read_file(handle, source=path)
    except OSError as exc:
        raise ConfigError("cannot read %s: %s" % (path, exc)) from None
    except configparser.Error as exc:
        raise ConfigError(str(exc)) from None

    for section in parser.sections():
        if section not in _CONFIG_SCHEMA:
            raise ConfigError(
                "unknown section [%s] (expected: %s)"
                % (section, ", ".join(sorted(_CONFIG_SCHEMA)))
            )
        for key in parser.options(section):
            if key not in _CONFIG_SCHEMA[section]:
                raise ConfigError(
                    "[%s] unknown key %r (expected: %s)"
                    % (section, key, ", ".join(_CONFIG_SCHEMA[section]))
                )

    model_type = parser.get("model", "type", fallback="two-level")
    if model_type != "two-level":
        raise ConfigError("[model] type: only 'two-level' is configurable, got %r" % model_type)
    if not parser.has_option("path", "duration"):
        raise ConfigError("[path] duration is required")
    duration = _config_float(parser, "path", "duration", 0.0)
    if duration <= 0.0:
        raise ConfigError("[path] duration must be positive")
    gamma = _config_float(parser, "model", "gamma", 0.5)
    if gamma <= 0.0:
        raise ConfigError("[model] gamma must be positive")
    hbar = _config_float(parser, "model", "hbar", 1.0)
    if hbar <= 0.0:
        raise ConfigError("[model] hbar must be positive")
    steps = _config_int(parser, "plan", "steps", 1000)
    if steps < 1:
        raise ConfigError("[plan] steps must be at least 1")
    record_every = _config_int(parser, "plan", "record_every", 1)
    if record_every < 1:
        raise ConfigError("[plan] record_every must be at least 1")
    scheme_name = parser.get("plan", "scheme", fallback=Scheme.SPLIT_SOD.value)
    try:
        scheme = Scheme(scheme_name)
    except ValueError:
        raise ConfigError(
            "[plan] scheme: %r is not one of %s"
            % (scheme_name, ", ".join(s.value for s in Scheme))
        ) from None
    reps_raw = parser.get("outputs", "representations", fallback="reference")
    reps = tuple(r.strip() for r in reps_raw.split(",") if r.strip())
    if not reps:
        raise ConfigError("[outputs] representations must not be empty")
    for rep in reps:
        if rep not in REPRESENTATION_NAMES:
            raise ConfigError(
                "[outputs] representations: unknown %r (choose from %s)"
                % (rep, ", ".join(REPRESENTATION_NAMES))
            )
    out_format = parser.get("outputs", "format", fallback="csv")
    if out_format not in ("csv", "json"):
        raise ConfigError("[outputs] format must be csv or json, got %r" % out_format)
    name = os.path.splitext(os.path.basename(path))[0]
    return Scenario(
        name=name,
        kind="two-level",
        duration=duration,
        n_steps=steps,
        scheme=scheme,
        representations=reps,
        gamma=gamma,
        hbar=hbar,
        record_every=record_every,
        out_dir=parser.get("outputs", "directory", fallback="results"),
        out_format=out_format,
        description="custom two-level run from %s" % path,
    )


# ---------------------------------------------------------------------------
# Command line.


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="epdyn",
        description="propagation and representation scenarios for driven "
        "dissipative level systems",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    p_run = sub.add_parser("run", help="run one or more scenarios")
    p_run.add_argument(
        "targets",
        nargs="+",
        metavar="SCENARIO",
        help="builtin scenario name or path to an INI config",
    )
    p_run.add_argument("--steps", type=int, help="override the step count")
    p_run.add_argument(
        "--scheme", choices=[s.value for s in Scheme], help="override the scheme"
    )
    p_run.add_argument("--out", help="override the output directory")
    p_run.add_argument("--format", choices=["csv", "json"], help="series file format")
    p_list = sub.add_parser("list", help="list builtin scenarios")
    p_list.add_argument(
        "--format", choices=["text", "json"], default="text", help="listing format"
    )
    return parser


def _resolve_targets(args: argparse.Namespace) -> list[Scenario]:
    builtins = builtin_scenarios()
    scenarios = []
    for target in args.targets:
        if target in builtins:
            scenario = builtins[target]
        elif os.path.exists(target):
            scenario = load_config(target)
        else:
            raise ConfigError(
                "%r is neither a builtin scenario nor a config file (see 'epdyn list')"
                % target
            )
        if args.steps is not None:
            if args.steps < 1:
                raise ConfigError("--steps must be at least 1")
            scenario = replace(scenario, n_steps=args.steps)
        if args.scheme is not None:
            scenario = replace(scenario, scheme=Scheme(args.scheme))
        if args.out is not None:
            scenario = replace(scenario, out_dir=args.out)
        if args.format is not None:
            scenario = replace(scenario, out_format=args.format)
        scenarios.append(scenario)
    names = [s.name for s in scenarios]
    if len(set(names)) != len(names):
        raise ConfigError("scenario names must be unique within one run")
    return scenarios


def _run_one(scenario: Scenario) -> tuple[int, str]:
    try:
        out_dir = run_scenario(scenario)
    except ConfigError as exc:
        return 2, "scenario %s: config error: %s" % (scenario.name, exc)
    except NUMERICAL_ERRORS as exc:
        return 3, "scenario %s: %s: %s" % (scenario.name, type(exc).__name__, exc)
    return 0, "scenario %s: ok (wrote %s)" % (scenario.name, out_dir)


def _cmd_run(args: argparse.Namespace) -> int:
    try:
        scenarios = _resolve_targets(args)
    except ConfigError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 2
    if len(scenarios) == 1:
        results = [_run_one(scenarios[0])]
    else:
        with concurrent.futures.ThreadPoolExecutor(max_workers=len(scenarios)) as pool:
            results = list(pool.map(_run_one, scenarios))
    status = 0
    for code, message in results:
        stream = sys.stdout if code == 0 else sys.stderr
        print(message, file=stream)
        status = max(status, code)
    return status


def _cmd_list(args: argparse.Namespace) -> int:
    scenarios = builtin_scenarios()
    if args.format == "json":
        payload = [
            {
                "name": s.name,
                "kind": s.kind,
                "description": s.description,
                "expected_runtime": s.expected_runtime,
                "duration": s.duration,
                "n_steps": s.n_steps,
            }
            for s in scenarios.values()
        ]
        print(json.dumps(payload, indent=2, sort_keys=True))
        return 0
    width = max(len(name) for name in scenarios)
    for s in scenarios.values():
        print("%-*s  %s (%s)" % (width, s.name, s.description, s.expected_runtime))
    return 0


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    if args.command == "list":
        return _cmd_list(args)
    return _cmd_run(args)


if __name__ == "__main__":
    sys.exit(main())
