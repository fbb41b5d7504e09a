"""Transfer unitaries and classical light propagation.

The array unitary over a length L is exp(-i H L).  Because H is real
symmetric tridiagonal we diagonalize it (H = Q diag(w) Q^T) and exponentiate
the eigenvalues, which keeps U unitary to rounding and lets a whole z-sweep
reuse one decomposition.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .device import TridiagonalHamiltonian


class NumericalFailureError(RuntimeError):
    """Eigensolver did not converge (should not occur for symmetric tridiagonal)."""


@dataclass(frozen=True)
class TransferUnitary:
    matrix: np.ndarray  # complex (N, N)
    length: float  # mm

    @property
    def n_guides(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class IntensityProfile:
    """Guide intensities sampled along the propagation direction."""

    z_points: np.ndarray  # mm, (n_steps,)
    intensities: np.ndarray  # (n_steps, N), rows sum to 1


def _eigh(h: TridiagonalHamiltonian):
    try:
        return eigh_tridiagonal(h.diag, h.offdiag)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - defensive
        raise NumericalFailureError(f"tridiagonal eigensolver failed: {exc}") from exc


def unitary(h: TridiagonalHamiltonian, length: float) -> TransferUnitary:
    """U = exp(-i H L) via eigendecomposition of the tridiagonal H."""
    if not length > 0:
        raise ValueError(f"length must be positive, got {length}")
    w, q = _eigh(h)
    u = (q * np.exp(-1j * w * length)) @ q.T
    return TransferUnitary(matrix=u, length=float(length))


def output_power(u: TransferUnitary, input_guide: int) -> np.ndarray:
    """|U[m, j]|^2 over output guides m for 1-based input guide j."""
    n = u.n_guides
    if not 1 <= input_guide <= n:
        raise IndexError(f"input_guide {input_guide} out of range 1..{n}")
    return np.abs(u.matrix[:, input_guide - 1]) ** 2


def propagation_profile(
    h: TridiagonalHamiltonian,
    length: float,
    n_steps: int = 200,
    input_guide: int = 1,
) -> IntensityProfile:
    """Intensity in every guide at n_steps points from z=0 to z=L."""
    if n_steps < 2:
        raise ValueError(f"n_steps must be >= 2, got {n_steps}")
    if not length > 0:
        raise ValueError(f"length must be positive, got {length}")
    n = h.n_guides
    if not 1 <= input_guide <= n:
        raise IndexError(f"input_guide {input_guide} out of range 1..{n}")
    w, q = _eigh(h)
    z = np.linspace(0.0, length, n_steps)
    c = q[input_guide - 1, :]  # expansion of the input state in eigenmodes
    phases = np.exp(-1j * np.outer(z, w))  # (n_steps, N)
    amps = (phases * c) @ q.T
    return IntensityProfile(z_points=z, intensities=np.abs(amps) ** 2)


# -- CSV export --------------------------------------------------------------

def _fmt(x: float) -> str:
    return f"{x:.17g}"


def profile_to_csv(profile: IntensityProfile, path) -> None:
    """Header `z_mm, P1..PN`, one row per z sample."""
    n = profile.intensities.shape[1]
    with open(path, "w") as fh:
        fh.write("z_mm," + ",".join(f"P{m}" for m in range(1, n + 1)) + "\n")
        for z, row in zip(profile.z_points, profile.intensities):
            fh.write(_fmt(z) + "," + ",".join(_fmt(p) for p in row) + "\n")


def unitary_to_csv(u: TransferUnitary, path) -> None:
    """Row-major interleaved real/imag parts: re11, im11, re12, im12, ..."""
    n = u.n_guides
    with open(path, "w") as fh:
        header = []
        for i in range(1, n + 1):
            for j in range(1, n + 1):
                header += [f"re{i}{j}", f"im{i}{j}"]
        fh.write(",".join(header) + "\n")
        cells = []
        for i in range(n):
            for j in range(n):
                cells += [_fmt(u.matrix[i, j].real), _fmt(u.matrix[i, j].imag)]
        fh.write(",".join(cells) + "\n")


def powers_to_csv(powers: np.ndarray, path) -> None:
    """Single-row power distribution with header `P1..PN`."""
    n = powers.size
    with open(path, "w") as fh:
        fh.write(",".join(f"P{m}" for m in range(1, n + 1)) + "\n")
        fh.write(",".join(_fmt(p) for p in powers) + "\n")
