"""Reduced two-dimensional measurement subspace.

Each subsystem's phase record is projected onto the constant mode and the
orthogonalized second harmonic of its phase distribution. The overlaps of the
phase-encoded state with the product basis give a two-qubit X-state whose
|00><11| coherence is the quantum resource for CHSH violation.

Double integrals over (phi1, phi2) with a translation-invariant kernel
E(phi1 - phi2) are reduced to a circular correlation evaluated by FFT;
:func:`direct_overlap` keeps the O(N^2) sum as a cross-check.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

from .circular_stats import (
    PhaseGrid,
    PhaseModel,
    grid_masses,
    gamma_of_density,
    harmonic_moment,
    pdf,
)
from .exceptions import DegenerateStateError, InvalidVisibilityError

__all__ = [
    "PhaseGrid",
    "LockingKernel",
    "ReducedOverlaps",
    "ReducedCoherence",
    "XState",
    "local_factor",
    "kappa_from_moments",
    "basis_variance_residual",
    "reduced_overlaps",
    "reduced_coherence",
    "direct_overlap",
    "FactorizationReport",
    "factorization_check",
    "xstate_from_visibility",
]

TRACE_FLOOR = 1e-14
MOMENT_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class LockingKernel:
    """Amplitude-level phase-locking kernel E(dphi), periodic in dphi.

    ``func`` maps phase differences to complex amplitudes. The kernel is used
    as given; :meth:`from_density` builds the square-normalized amplitude
    sqrt(p) of a phase-difference density.
    """

    func: Callable[[np.ndarray], np.ndarray]

    def __call__(self, dphi):
        return np.asarray(self.func(np.asarray(dphi, dtype=float)), dtype=complex)

    @classmethod
    def from_density(cls, density: PhaseModel) -> "LockingKernel":
        return cls(lambda d: np.sqrt(pdf(density, d)))

    @classmethod
    def constant(cls, value: complex = 1.0 / np.sqrt(2 * np.pi)) -> "LockingKernel":
        return cls(lambda d: np.full(np.shape(d), value, dtype=complex))

    def square_norm(self, grid: PhaseGrid) -> float:
        """Quadrature of |E|^2 over one turn (1 for a normalized kernel)."""
        return float(np.sum(np.abs(self(grid.nodes)) ** 2) * grid.weight)


class ReducedOverlaps(NamedTuple):
    o00: complex
    o11: complex
    trace: float


@dataclass(frozen=True)
class ReducedCoherence:
    value: complex
    trace: float


@dataclass(frozen=True)
class XState:
    """Two-qubit X-state in the ordered basis |00>, |01>, |10>, |11>.

    ``coherence`` is the |00><11| density-matrix element.
    """

    p00: float
    p01: float
    p10: float
    p11: float
    coherence: complex = 0.0j

    def __post_init__(self):
        pops = np.array([self.p00, self.p01, self.p10, self.p11])
        if np.any(pops < -1e-12) or abs(pops.sum() - 1.0) > 1e-10:
            raise InvalidVisibilityError("X-state populations must be >= 0 and sum to 1")
        if abs(self.coherence) > np.sqrt(max(self.p00 * self.p11, 0.0)) + 1e-10:
            raise InvalidVisibilityError("X-state coherence violates positivity |c| <= sqrt(p00*p11)")

    @property
    def visibility(self) -> complex:
        """Effective coherence Gamma_eff = 2 * matrix coherence."""
        return 2.0 * complex(self.coherence)

    def density_matrix(self) -> np.ndarray:
        rho = np.diag([self.p00, self.p01, self.p10, self.p11]).astype(complex)
        rho[0, 3] = self.coherence
        rho[3, 0] = np.conj(self.coherence)
        return rho


def local_factor(m: complex) -> float:
    """Per-side factor sqrt(1-|m|^2).

    Rounding in |m|^2 near 1 is ~1e-16, which the square root would inflate
    to ~1e-8, so spreads below 1e-12 count as a point mass.
    """
    if abs(m) > 1.0 + MOMENT_TOL:
        raise InvalidVisibilityError(f"second-harmonic moment modulus {abs(m)} exceeds 1")
    spread = 1.0 - abs(m) ** 2
    return float(np.sqrt(spread)) if spread > 1e-12 else 0.0


def kappa_from_moments(m_a: complex, m_b: complex) -> float:
    """Local coherence factor sqrt(1-|m_A|^2) * sqrt(1-|m_B|^2)."""
    fa, fb = local_factor(m_a), local_factor(m_b)
    return fa * fb


def basis_variance_residual(model: PhaseModel, grid: PhaseGrid) -> float:
    """|(1 - |m|^2) - sum_j P_j |exp(2i phi_j) - m|^2| on the grid measure."""
    w = grid_masses(model, grid)
    z = np.exp(2j * grid.nodes)
    m = np.sum(w * z)
    spread = np.sum(w * np.abs(z - m) ** 2)
    return float(abs((1.0 - abs(m) ** 2) - spread))


def _mode_weights(model: PhaseModel, grid: PhaseGrid):
    """Grid masses times the conjugated basis functions <0|phi>, <1|phi>."""
    w = grid_masses(model, grid)
    z = np.exp(2j * grid.nodes)
    m = np.sum(w * z)
    norm2 = 1.0 - abs(m) ** 2
    if norm2 <= TRACE_FLOOR:
        raise DegenerateStateError(
            "second-harmonic mode collapses (|m| = 1); the reduced basis is undefined"
        )
    one = w * np.conj(z - m) / np.sqrt(norm2)
    return w.astype(complex), one


def _kernel_correlation(a, b, kernel_values):
    """sum_{j,k} a_j b_k E(phi_j - phi_k) via circular convolution."""
    n = a.size
    b_rev = b[(-np.arange(n)) % n]
    c = np.fft.ifft(np.fft.fft(a) * np.fft.fft(b_rev))
    return complex(np.sum(kernel_values * c))


def direct_overlap(a, b, kernel: LockingKernel, grid: PhaseGrid) -> complex:
    """Dense O(N^2) evaluation of sum_{j,k} a_j b_k E(phi_j - phi_k)."""
    nodes = grid.nodes
    k = kernel(nodes[:, None] - nodes[None, :])
    return complex(a @ k @ b)


def reduced_overlaps(p_a: PhaseModel, p_b: PhaseModel, kernel: LockingKernel,
                     grid: PhaseGrid | None = None) -> ReducedOverlaps:
    """Overlaps <00|Psi>, <11|Psi> and the trace of the projected state."""
    grid = grid or PhaseGrid()
    a0, a1 = _mode_weights(p_a, grid)
    b0, b1 = _mode_weights(p_b, grid)
    e = kernel(grid.nodes)
    o = {
        (i, j): _kernel_correlation(a, b, e)
        for i, a in enumerate((a0, a1))
        for j, b in enumerate((b0, b1))
    }
    trace = float(sum(abs(v) ** 2 for v in o.values()))
    if trace <= TRACE_FLOOR:
        raise DegenerateStateError(f"projected state has vanishing trace ({trace:.3g})")
    return ReducedOverlaps(o[0, 0], o[1, 1], trace)


def reduced_coherence(p_a: PhaseModel, p_b: PhaseModel, kernel: LockingKernel,
                      grid: PhaseGrid | None = None) -> ReducedCoherence:
    """Normalized |00><11| coherence of the projected phase-encoded state."""
    o00, o11, trace = reduced_overlaps(p_a, p_b, kernel, grid)
    return ReducedCoherence(o00 * np.conj(o11) / trace, trace)


class FactorizationReport(NamedTuple):
    gamma_exact: complex
    kappa: float
    gamma_lock: complex
    factorized: complex
    discrepancy: float


def factorization_check(p_a: PhaseModel, p_b: PhaseModel, density: PhaseModel,
                        grid: PhaseGrid | None = None) -> FactorizationReport:
    """Compare the projected coherence with the product kappa * gamma.

    The kernel is sqrt(density). No equality is implied; the report exists
    to measure how far the two sides are apart for given inputs.
    """
    grid = grid or PhaseGrid()
    kernel = LockingKernel.from_density(density)
    exact = reduced_coherence(p_a, p_b, kernel, grid).value
    kappa = kappa_from_moments(harmonic_moment(p_a, 2), harmonic_moment(p_b, 2))
    gamma = gamma_of_density(density)
    prod = kappa * gamma
    return FactorizationReport(exact, kappa, gamma, prod, float(abs(exact - prod)))


def xstate_from_visibility(kappa: float, gamma: complex) -> XState:
    """Werner-like X-state whose exact correlator is |kg| cos2A cos2B + Re(kg) sin2A sin2B.

    Populations (1 +- |V|)/4 and matrix coherence V/2 with V = kappa*gamma.
    For real nonnegative V the correlator is V*cos(2(A-B)).
    """
    v = complex(kappa) * complex(gamma)
    if abs(v) > 1.0 + 1e-12:
        raise InvalidVisibilityError(f"|kappa*gamma| = {abs(v)} exceeds 1")
    r = min(abs(v), 1.0)
    same = 0.25 * (1.0 + r)
    diff = 0.25 * (1.0 - r)
    return XState(same, diff, diff, same, 0.5 * v)

