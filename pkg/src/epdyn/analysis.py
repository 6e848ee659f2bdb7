"""Observables and output files derived from propagation results.

Norm decay under an absorbing or anti-Hermitian part makes raw component
magnitudes uninformative, so populations are renormalized by the running
squared norm.  All writers are deterministic (fixed column order, fixed
float format, no timestamps) and atomic (temporary file in the target
directory, then ``os.replace``), so repeated runs of the same scenario
produce byte-identical files.
"""

from __future__ import annotations

import csv
import json
import os
from dataclasses import dataclass

import numpy as np

from .numerics import ZeroVector, wavefunction_distance
from .propagators import Trajectory

#: Smallest squared norm treated as nonzero.
NORM_FLOOR = 1.0e-300

_trapezoid = getattr(np, "trapezoid", np.trapz)

#: Scientific format used for every numeric CSV cell.
CSV_FORMAT = "%.16e"


@dataclass(frozen=True)
class PopulationSeries:
    """Populations on a set of labeled projectors.

    ``values`` maps each label to a real array over ``times``.  When
    ``renormalized`` is set, the label sum over a complete orthonormal
    projector set is one at every sample up to roundoff.  Samples whose
    running norm underflowed the floor are missing values (NaN), never
    garbage ratios.
    """

    times: np.ndarray
    values: dict[str, np.ndarray]
    renormalized: bool = True

    def total(self) -> np.ndarray:
        out = np.zeros_like(self.times, dtype=float)
        for series in self.values.values():
            out = out + series
        return out


def renormalized_populations(
    trajectory: Trajectory,
    projectors: dict[str, np.ndarray],
) -> PopulationSeries:
    """Populations |<v|psi>|^2 / (|v|^2 |psi|^2) along a trajectory.

    Each projector is either a vector (rank-one population on its ray) or
    a square matrix P, in which case the population is |P psi|^2 /
    <psi|psi>.  Samples with an underflowed norm are NaN; a zero
    projector raises ZeroVector.
    """
    n_samples = len(trajectory.times)
    values: dict[str, np.ndarray] = {}
    norms = np.asarray(trajectory.norms_sq, dtype=float)
    alive = norms >= NORM_FLOOR
    safe_norms = np.where(alive, norms, 1.0)
    for label, proj in projectors.items():
        proj = np.asarray(proj, dtype=complex)
        if proj.ndim == 1:
            vnorm = float(np.real(np.vdot(proj, proj)))
            if vnorm < NORM_FLOOR:
                raise ZeroVector("projector %r has zero norm" % label)
            amp = trajectory.states @ proj.conj()
            series = (amp.real**2 + amp.imag**2) / (vnorm * safe_norms)
        elif proj.ndim == 2 and proj.shape[0] == proj.shape[1]:
            series = np.empty(n_samples, dtype=float)
            for k in range(n_samples):
                projected = proj @ trajectory.states[k]
                series[k] = float(np.real(np.vdot(projected, projected))) / safe_norms[k]
        else:
            raise ValueError("projector %r is neither a vector nor square" % label)
        values[label] = np.where(alive, series, np.nan)
    return PopulationSeries(
        times=np.asarray(trajectory.times, dtype=float),
        values=values,
        renormalized=True,
    )


def dissipation_rate(trajectory: Trajectory) -> float:
    """log10 of the final squared norm (total loss over the run)."""
    final = float(trajectory.norms_sq[-1])
    if final < NORM_FLOOR:
        raise ZeroVector("final norm underflow, loss exceeds representable range")
    return float(np.log10(final))


def _align(times_a: np.ndarray, times_b: np.ndarray) -> np.ndarray:
    """Index into ``times_b`` of the nearest sample for each entry of a.

    Rejects grids whose nearest samples are further apart than half the
    finer spacing, which catches accidental comparison of unrelated runs.
    """
    times_b = np.asarray(times_b, dtype=float)
    idx = np.searchsorted(times_b, times_a)
    idx = np.clip(idx, 1, len(times_b) - 1)
    left = times_b[idx - 1]
    right = times_b[idx]
    idx = idx - (np.abs(times_a - left) < np.abs(times_a - right))
    spacing = np.min(np.diff(times_b)) if len(times_b) > 1 else np.inf
    gap = np.abs(times_b[idx] - times_a)
    if np.any(gap > 0.5 * spacing + 1.0e-12):
        raise ValueError("trajectories sample incompatible time grids")
    return idx


def distance_series(
    trajectory: Trajectory,
    reference: Trajectory,
) -> tuple[np.ndarray, np.ndarray]:
    """Projective distance to the nearest reference sample at each time."""
    times = np.asarray(trajectory.times, dtype=float)
    idx = _align(times, reference.times)
    dist = np.empty(len(times), dtype=float)
    for k in range(len(times)):
        dist[k] = wavefunction_distance(trajectory.states[k], reference.states[idx[k]])
    return times, dist


def norm_error_series(
    trajectory: Trajectory,
    reference: Trajectory,
) -> tuple[np.ndarray, np.ndarray]:
    """Relative squared-norm mismatch against a reference trajectory."""
    times = np.asarray(trajectory.times, dtype=float)
    idx = _align(times, reference.times)
    ref = reference.norms_sq[idx]
    err = np.abs(trajectory.norms_sq - ref) / np.maximum(ref, NORM_FLOOR)
    return times, err


def time_averaged(times: np.ndarray, values: np.ndarray) -> float:
    """Trapezoid mean of a sampled series over its time window."""
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    if len(times) < 2:
        raise ValueError("need at least two samples to average")
    span = float(times[-1] - times[0])
    if span <= 0.0:
        raise ValueError("time window has zero extent")
    return float(_trapezoid(values, times) / span)


def write_csv(path: str, columns: dict[str, np.ndarray]) -> None:
    """Write labeled real columns as CSV, atomically and deterministically.

    Column order is the mapping order; every cell uses the same scientific
    format with 17 significant digits, which round-trips double precision.
    """
    if not columns:
        raise ValueError("no columns to write")
    labels = list(columns.keys())
    arrays = [np.asarray(columns[label], dtype=float) for label in labels]
    n = len(arrays[0])
    for label, arr in zip(labels, arrays):
        if arr.ndim != 1 or len(arr) != n:
            raise ValueError("column %r has mismatched length" % label)
    tmp = path + ".tmp"
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    with open(tmp, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(labels)
        for k in range(n):
            writer.writerow([CSV_FORMAT % arr[k] for arr in arrays])
    os.replace(tmp, path)


def write_summary_json(path: str, payload: dict) -> None:
    """Write a JSON summary with sorted keys, atomically."""
    tmp = path + ".tmp"
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    with open(tmp, "w") as handle:
        json.dump(payload, handle, sort_keys=True, indent=2)
        handle.write("\n")
    os.replace(tmp, path)
