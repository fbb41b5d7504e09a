"""Model-free lookup maps over two control voltages.

A lookup map records the simulated reflectivity and leakage of one
subcircuit while two electrodes sweep a voltage grid, then serves as the
inversion target for operating-point searches and linear gate-voltage fits.
"""
from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .device import DeviceSpec, VoltageConfig
from .evolution import output_power, unitary
from .photon_stats import DegenerateSplittingError
from .subcircuits import SubcircuitPair, effective_reflectivity, leakage
from . import device as device_mod


class FlatCurveError(ValueError):
    """Reflectivity slice has no usable slope for a linear fit."""


def default_grid(limit: float = 10.0, step: float = 0.5) -> np.ndarray:
    """Uniform sweep from -limit to +limit inclusive."""
    n = int(round(2 * limit / step)) + 1
    return np.linspace(-limit, limit, n)


@dataclass(frozen=True)
class LookupMap:
    """Reflectivity and leakage of a subcircuit over a 2-D voltage grid.

    Tables are indexed [i_a, i_b] following grid_a x grid_b; leakage is in
    percent for each of the pair's two inputs.
    """

    electrode_a: int
    electrode_b: int
    grid_a: np.ndarray
    grid_b: np.ndarray
    eta: np.ndarray
    leakage_in1: np.ndarray
    leakage_in2: np.ndarray
    input_guides: tuple[int, int]
    fixed_voltages: np.ndarray | None = None

    def __post_init__(self):
        ga = np.asarray(self.grid_a, dtype=float)
        gb = np.asarray(self.grid_b, dtype=float)
        for name, g in (("grid_a", ga), ("grid_b", gb)):
            if g.ndim != 1 or g.size < 1:
                raise ValueError(f"{name} must be a non-empty 1-D vector")
            if g.size >= 2 and not np.all(np.diff(g) > 0):
                raise ValueError(f"{name} must be strictly increasing")
        shape = (ga.size, gb.size)
        for name, t in (("eta", self.eta), ("leakage_in1", self.leakage_in1),
                        ("leakage_in2", self.leakage_in2)):
            t = np.asarray(t, dtype=float)
            if t.shape != shape:
                raise ValueError(f"{name} has shape {t.shape}, expected {shape}")
        eta = np.asarray(self.eta, dtype=float)
        if np.any((eta < 0) | (eta > 1)):
            raise ValueError("eta entries must lie in [0, 1]")
        for name, t in (("leakage_in1", self.leakage_in1),
                        ("leakage_in2", self.leakage_in2)):
            t = np.asarray(t, dtype=float)
            if np.any((t < -1e-9) | (t > 100 + 1e-9)):
                raise ValueError(f"{name} entries must lie in [0, 100]")
        object.__setattr__(self, "grid_a", ga)
        object.__setattr__(self, "grid_b", gb)
        object.__setattr__(self, "eta", np.asarray(self.eta, dtype=float))
        object.__setattr__(self, "leakage_in1",
                           np.asarray(self.leakage_in1, dtype=float))
        object.__setattr__(self, "leakage_in2",
                           np.asarray(self.leakage_in2, dtype=float))

    @property
    def mean_leakage(self) -> np.ndarray:
        return 0.5 * (self.leakage_in1 + self.leakage_in2)


def build_lookup_map(
    spec: DeviceSpec,
    pair: SubcircuitPair,
    electrode_a: int,
    electrode_b: int,
    grid_a,
    grid_b,
    fixed_voltages: VoltageConfig | None = None,
) -> LookupMap:
    """Simulate the device over the grid and record eta plus both leakages.

    electrode_a / electrode_b are 1-based and must be distinct; all other
    electrodes stay at `fixed_voltages` (zero if omitted).  Cells fill in
    grid order, so two builds with identical inputs are bit-identical.
    """
    if electrode_a == electrode_b:
        raise ValueError(f"electrodes must be distinct, both are {electrode_a}")
    for e in (electrode_a, electrode_b):
        if not 1 <= e <= spec.n_electrodes:
            raise IndexError(f"electrode {e} out of range 1..{spec.n_electrodes}")
    ga = np.asarray(grid_a, dtype=float)
    gb = np.asarray(grid_b, dtype=float)
    for name, g in (("grid_a", ga), ("grid_b", gb)):
        if np.any(np.abs(g) > spec.voltage_limit):
            raise device_mod.VoltageBoundError(
                f"{name} exceeds voltage limit +/-{spec.voltage_limit} V"
            )
    base = (fixed_voltages.volts if fixed_voltages is not None
            else np.zeros(spec.n_electrodes))
    eta = np.empty((ga.size, gb.size))
    leak1 = np.empty_like(eta)
    leak2 = np.empty_like(eta)
    g1, g2 = pair.guides
    for ia, va in enumerate(ga):
        for ib, vb in enumerate(gb):
            volts = base.copy()
            volts[electrode_a - 1] = va
            volts[electrode_b - 1] = vb
            h = device_mod.build_hamiltonian(spec, VoltageConfig(volts))
            u = unitary(h, spec.coupling_length)
            try:
                eta[ia, ib] = effective_reflectivity(u, pair)
            except DegenerateSplittingError:
                eta[ia, ib] = 1.0  # eta is exactly 1 when no power crosses
            leak1[ia, ib] = leakage(output_power(u, g1), pair)
            leak2[ia, ib] = leakage(output_power(u, g2), pair)
    # clip rounding spill just outside the physical ranges
    np.clip(eta, 0.0, 1.0, out=eta)
    np.clip(leak1, 0.0, 100.0, out=leak1)
    np.clip(leak2, 0.0, 100.0, out=leak2)
    return LookupMap(
        electrode_a=electrode_a, electrode_b=electrode_b,
        grid_a=ga, grid_b=gb, eta=eta,
        leakage_in1=leak1, leakage_in2=leak2,
        input_guides=(g1, g2),
        fixed_voltages=base.copy(),
    )


@dataclass(frozen=True)
class SolveResult:
    """Outcome of a lookup-map inversion.

    When no cell satisfies the leakage cap, `found` is False and the fields
    carry the best infeasible candidate instead.
    """

    found: bool
    v_a: float
    v_b: float
    eta: float
    mean_leakage: float

    @property
    def voltages(self) -> tuple[float, float]:
        return (self.v_a, self.v_b)


def solve_voltage(
    lut: LookupMap, target_eta: float, max_leakage: float = 100.0
) -> SolveResult:
    """Pick the feasible cell closest to the target reflectivity.

    Ties break by lower mean leakage, then smaller voltage norm, then
    lexicographic grid order (implicit in the scan order).
    """
    mean_leak = lut.mean_leakage

    def key(ia, ib):
        return (
            abs(lut.eta[ia, ib] - target_eta),
            mean_leak[ia, ib],
            float(np.hypot(lut.grid_a[ia], lut.grid_b[ib])),
        )

    best = None
    best_key = None
    fallback = None
    fallback_key = None
    for ia in range(lut.grid_a.size):
        for ib in range(lut.grid_b.size):
            k = key(ia, ib)
            if mean_leak[ia, ib] <= max_leakage:
                if best_key is None or k < best_key:
                    best, best_key = (ia, ib), k
            if fallback_key is None or k < fallback_key:
                fallback, fallback_key = (ia, ib), k

    found = best is not None
    ia, ib = best if found else fallback
    return SolveResult(
        found=found,
        v_a=float(lut.grid_a[ia]),
        v_b=float(lut.grid_b[ib]),
        eta=float(lut.eta[ia, ib]),
        mean_leakage=float(mean_leak[ia, ib]),
    )


@dataclass(frozen=True)
class GateVoltage:
    target_eta: float
    voltage: float
    clamped: bool


def _monotone_run_containing(values: np.ndarray, index: int) -> tuple[int, int]:
    """Longest strictly monotone run (as [start, stop) slice) containing index."""
    n = values.size
    diffs = np.sign(np.diff(values))
    best = (index, index + 1)
    for direction in (1.0, -1.0):
        start = index
        while start > 0 and diffs[start - 1] == direction:
            start -= 1
        stop = index
        while stop < n - 1 and diffs[stop] == direction:
            stop += 1
        if (stop + 1 - start) > (best[1] - best[0]):
            best = (start, stop + 1)
    return best


def gate_voltages_by_linear_fit(
    lut: LookupMap,
    fixed_v_b: float,
    targets=(0.0, 0.5, 1.0),
) -> list[GateVoltage]:
    """Invert a 1-D reflectivity slice with a least-squares line.

    The slice runs along electrode_a at the grid_b point nearest fixed_v_b.
    Only the longest strictly monotone segment bracketing eta = 0.5 is
    fitted (the curves oscillate; the operating branch is the one fitted).
    Out-of-range solutions clamp to the grid's voltage extremes with a flag.
    """
    ib = int(np.argmin(np.abs(lut.grid_b - fixed_v_b)))
    etas = lut.eta[:, ib]
    if etas.size < 3:
        raise ValueError(f"slice needs >= 3 points, got {etas.size}")
    anchor = int(np.argmin(np.abs(etas - 0.5)))
    start, stop = _monotone_run_containing(etas, anchor)
    v = lut.grid_a[start:stop]
    y = etas[start:stop]
    if v.size < 2:
        raise FlatCurveError("no monotone segment around eta = 0.5")
    m, c = np.polyfit(v, y, 1)
    if abs(m) < 1e-6:
        raise FlatCurveError(f"reflectivity slope {m:.3g} below 1e-6 per volt")
    limit = float(max(abs(lut.grid_a[0]), abs(lut.grid_a[-1])))
    out = []
    for target in targets:
        raw = (target - c) / m
        clamped = abs(raw) > limit
        volt = float(np.clip(raw, -limit, limit))
        out.append(GateVoltage(target_eta=float(target), voltage=volt,
                               clamped=bool(clamped)))
    return out


# -- CSV / metadata I/O ------------------------------------------------------

def map_to_csv(lut: LookupMap, path) -> None:
    """Header `v_a, v_b, eta, leak_in1, leak_in2`, row-major over grid_a then grid_b."""
    with open(path, "w") as fh:
        fh.write("v_a,v_b,eta,leak_in1,leak_in2\n")
        for ia, va in enumerate(lut.grid_a):
            for ib, vb in enumerate(lut.grid_b):
                fh.write(",".join(
                    f"{x:.17g}" for x in (
                        va, vb, lut.eta[ia, ib],
                        lut.leakage_in1[ia, ib], lut.leakage_in2[ia, ib],
                    )
                ) + "\n")


def map_metadata(lut: LookupMap) -> dict:
    return {
        "electrode_a": lut.electrode_a,
        "electrode_b": lut.electrode_b,
        "input_guides": list(lut.input_guides),
        "grid_a_points": int(lut.grid_a.size),
        "grid_b_points": int(lut.grid_b.size),
        "fixed_voltages": (
            lut.fixed_voltages.tolist() if lut.fixed_voltages is not None else None
        ),
    }


def map_metadata_to_json(lut: LookupMap, path) -> None:
    with open(path, "w") as fh:
        json.dump(map_metadata(lut), fh, indent=2)
        fh.write("\n")
