"""CHSH observable algebra for second-harmonic measurement settings.

A setting ``A`` selects the local observable cos(2A) sigma_z + sin(2A) sigma_x,
so every correlator is pi-periodic in each setting.
"""

from __future__ import annotations

from typing import Callable, NamedTuple

import numpy as np

from .exceptions import InvalidVisibilityError
from .reduced_subspace import XState

__all__ = [
    "TSIRELSON",
    "CLASSICAL_BOUND",
    "SettingsQuad",
    "CHSHEstimate",
    "correlator_diagonal",
    "correlator_visibility",
    "correlator_xstate_exact",
    "chsh_combine",
    "chsh_for",
    "canonical_settings",
    "s_max_visibility",
    "grid_max_chsh",
]

TSIRELSON = 2.0 * np.sqrt(2.0)
CLASSICAL_BOUND = 2.0


class SettingsQuad(NamedTuple):
    """Measurement angles (A, A', B, B') in radians."""

    a: float
    a_prime: float
    b: float
    b_prime: float

    def pairs(self):
        """Setting pairs in CHSH order (A,B), (A,B'), (A',B), (A',B')."""
        return [(self.a, self.b), (self.a, self.b_prime),
                (self.a_prime, self.b), (self.a_prime, self.b_prime)]


class CHSHEstimate(NamedTuple):
    """A CHSH value with its four correlators and standard errors."""

    s: float
    se: float
    correlators: tuple
    correlator_se: tuple
    settings: SettingsQuad
    kind: str
    convention: str | None = None
    n_windows: int | None = None
    seed: object = None

    def to_dict(self) -> dict:
        seed = self.seed if isinstance(self.seed, (int, type(None))) else str(self.seed)
        return {
            "kind": self.kind,
            "S": float(self.s),
            "se": float(self.se),
            "correlators": [float(x) for x in self.correlators],
            "correlator_se": [float(x) for x in self.correlator_se],
            "settings": [float(x) for x in self.settings],
            "convention": self.convention,
            "n_windows": self.n_windows,
            "seed": seed,
        }


def correlator_diagonal(a, b):
    """Product-state correlator cos(2A) cos(2B)."""
    return np.cos(2 * np.asarray(a)) * np.cos(2 * np.asarray(b))


def correlator_visibility(gamma_eff: complex, a, b):
    """Re[Gamma_eff * exp(-2i(A-B))]."""
    if abs(gamma_eff) > 1.0 + 1e-12:
        raise InvalidVisibilityError(f"|Gamma_eff| = {abs(gamma_eff)} exceeds 1")
    d = np.asarray(a) - np.asarray(b)
    return np.real(complex(gamma_eff) * np.exp(-2j * d))


def correlator_xstate_exact(state: XState, a, b):
    """Tr[rho (A(a) x B(b))] for an X-state.

    The sigma_z x sigma_x cross terms have no support on the X pattern, so only
    the population parity and the |00><11| coherence contribute.
    """
    a = np.asarray(a)
    b = np.asarray(b)
    parity = state.p00 - state.p01 - state.p10 + state.p11
    return (parity * np.cos(2 * a) * np.cos(2 * b)
            + 2.0 * np.real(state.coherence) * np.sin(2 * a) * np.sin(2 * b))


def chsh_combine(e_ab, e_abp, e_apb, e_apbp):
    return e_ab + e_abp + e_apb - e_apbp


def chsh_for(correlator: Callable, settings: SettingsQuad) -> float:
    """S for a correlator function evaluated at ``settings``."""
    return float(chsh_combine(*(correlator(x, y) for x, y in settings.pairs())))


def canonical_settings() -> SettingsQuad:
    """Optimal angles for a correlator proportional to cos(2(A-B))."""
    return SettingsQuad(0.0, np.pi / 4, np.pi / 8, -np.pi / 8)


def s_max_visibility(kappa: float, gamma: complex):
    """(S_max, violates) for E = |kappa*gamma| cos(2(A-B)); violation is strict."""
    v = abs(complex(kappa) * complex(gamma))
    if v > 1.0 + 1e-12:
        raise InvalidVisibilityError(f"|kappa*gamma| = {v} exceeds 1")
    s = TSIRELSON * v
    return float(s), bool(s > CLASSICAL_BOUND)


class GridMaximum(NamedTuple):
    s: float
    settings: SettingsQuad


def _signed_grid_max(m):
    """Max over (a, a', b, b') of M[a,b] + M[a,b'] + M[a',b] - M[a',b'].

    For fixed (b, b') the objective separates into a term in ``a`` and one in
    ``a'``, which makes the exhaustive search O(n^3). Returns the maximum and
    the lexicographically first index quad attaining it.
    """
    n = m.shape[0]
    v = m[:, :, None] - m[:, None, :]          # v[a', b, b']
    w = v.max(axis=0)                          # best a' per (b, b')
    best_per_a = np.empty(n)
    for i in range(n):
        best_per_a[i] = ((m[i, :, None] + m[i, None, :]) + w).max()
    s_star = best_per_a.max()
    i = int(np.argmax(best_per_a == s_star))
    full = (m[i, :, None] + m[i, None, :])[None, :, :] + v
    ip, j, jp = np.argwhere(full == s_star)[0]
    return float(s_star), (i, int(ip), int(j), int(jp))


def grid_max_chsh(correlator: Callable, resolution: float = np.pi / 180) -> GridMaximum:
    """Exhaustive max |S| over a uniform grid of all four settings in [0, pi).

    ``correlator`` must accept broadcast arrays. Ties go to the
    lexicographically smallest (A, A', B, B') index, positive S before
    negative.
    """
    if resolution > np.pi / 90 + 1e-15:
        raise ValueError("resolution must be at most pi/90")
    n = int(round(np.pi / resolution))
    angles = np.arange(n) * (np.pi / n)
    m = np.asarray(correlator(angles[:, None], angles[None, :]), dtype=float)
    m = np.broadcast_to(m, (n, n)).copy()
    s_pos, idx_pos = _signed_grid_max(m)
    s_neg, idx_neg = _signed_grid_max(-m)
    s, idx = (s_pos, idx_pos) if s_pos >= s_neg else (s_neg, idx_neg)
    return GridMaximum(s, SettingsQuad(*(float(angles[k]) for k in idx)))
