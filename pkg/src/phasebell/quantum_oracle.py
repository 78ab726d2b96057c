"""Exact two-qubit statevector benchmark for the traditional CHSH curve.

Qubit convention: amplitude index ``2*q1 + q0``, so bit 0 is circuit qubit 0
(the H and RZ target). Pauli labels follow the little-endian string order used
by common circuit toolkits: ``label[0]`` acts on qubit 1, ``label[1]`` on
qubit 0.
"""

from __future__ import annotations

from typing import Mapping, NamedTuple

import numpy as np

from .chsh_core import CHSHEstimate, SettingsQuad, canonical_settings, chsh_combine
from .exceptions import InsufficientDataError, InvalidObservableError

__all__ = [
    "PAULI",
    "PauliSum",
    "initial_state",
    "apply_1q",
    "apply_cx",
    "prepare_bell_with_phase",
    "bell_with_phase_closed_form",
    "ab_observable",
    "pauli_matrix",
    "pauli_expectation",
    "correlator_closed_form",
    "chsh_traditional",
]

_S2 = 1.0 / np.sqrt(2.0)
PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}
H = np.array([[1, 1], [1, -1]], dtype=complex) * _S2


def rz(theta) -> np.ndarray:
    """RZ rotation; an array of angles gives a stack of shape (n, 2, 2)."""
    theta = np.asarray(theta, dtype=float)
    out = np.zeros(theta.shape + (2, 2), dtype=complex)
    out[..., 0, 0] = np.exp(-0.5j * theta)
    out[..., 1, 1] = np.exp(0.5j * theta)
    return out


class PauliSum(dict):
    """Mapping of two-character Pauli labels to real coefficients."""

    def __init__(self, terms: Mapping[str, float] | None = None):
        super().__init__()
        for label, coeff in (terms or {}).items():
            if not isinstance(label, str) or len(label) != 2 or any(c not in PAULI for c in label):
                raise InvalidObservableError(f"bad Pauli label {label!r}")
            if np.iscomplexobj(coeff) and np.imag(coeff) != 0:
                raise InvalidObservableError(f"coefficient of {label} must be real")
            self[label] = float(np.real(coeff))

    def nonzero(self, tol: float = 1e-15) -> dict:
        return {k: v for k, v in self.items() if abs(v) > tol}


def initial_state(batch: int | None = None) -> np.ndarray:
    shape = (4,) if batch is None else (batch, 4)
    state = np.zeros(shape, dtype=complex)
    state[..., 0] = 1.0
    return state


def apply_1q(state: np.ndarray, gate: np.ndarray, qubit: int) -> np.ndarray:
    """Apply a 2x2 gate (or a stack of them, shape (n, 2, 2)) to one qubit."""
    psi = state.reshape(-1, 2, 2)  # (batch, q1, q0)
    if qubit == 0:
        psi = psi @ np.swapaxes(gate, -1, -2)
    elif qubit == 1:
        psi = gate @ psi
    else:
        raise ValueError("qubit must be 0 or 1")
    return psi.reshape(state.shape)


def apply_cx(state: np.ndarray, control: int, target: int) -> np.ndarray:
    out = state.copy()
    for idx in range(4):
        if (idx >> control) & 1:
            out[..., idx ^ (1 << target)] = state[..., idx]
    return out


def prepare_bell_with_phase(delta) -> np.ndarray:
    """H(0), CX(0->1), RZ(2*delta) on qubit 0, applied to |00>.

    A scalar ``delta`` gives shape (4,); an array of n phases gives (n, 4).
    """
    delta = np.asarray(delta, dtype=float)
    psi = initial_state(None if delta.ndim == 0 else delta.size)
    psi = apply_1q(psi, H, 0)
    psi = apply_cx(psi, 0, 1)
    return apply_1q(psi, rz(2.0 * delta.ravel()), 0)


def bell_with_phase_closed_form(delta: float) -> np.ndarray:
    return np.array([_S2, 0, 0, _S2 * np.exp(2j * delta)], dtype=complex)


def ab_observable(a: float, b: float) -> PauliSum:
    """A(a) x B(b) expanded as cAcB ZZ + cAsB ZX + sAcB XZ + sAsB XX."""
    ca, sa = np.cos(2 * a), np.sin(2 * a)
    cb, sb = np.cos(2 * b), np.sin(2 * b)
    return PauliSum({"ZZ": ca * cb, "ZX": ca * sb, "XZ": sa * cb, "XX": sa * sb})


def pauli_matrix(obs: Mapping[str, float]) -> np.ndarray:
    if not isinstance(obs, PauliSum):
        obs = PauliSum(obs)
    mat = np.zeros((4, 4), dtype=complex)
    for label, coeff in obs.items():
        mat += coeff * np.kron(PAULI[label[0]], PAULI[label[1]])
    return mat


def pauli_expectation(state: np.ndarray, obs: Mapping[str, float]):
    """<psi|O|psi> for one state (shape (4,)) or a batch (shape (n, 4))."""
    mat = pauli_matrix(obs)
    psi = np.asarray(state, dtype=complex)
    val = np.einsum("...i,ij,...j->...", psi.conj(), mat, psi)
    if np.max(np.abs(np.imag(val))) > 1e-10:
        raise InvalidObservableError("expectation is not real; observable is not Hermitian")
    return np.real(val)


def correlator_closed_form(a, b, delta):
    """cos2A cos2B + sin2A sin2B cos2(delta) for the phased Bell state."""
    return (np.cos(2 * a) * np.cos(2 * b)
            + np.sin(2 * a) * np.sin(2 * b) * np.cos(2 * np.asarray(delta)))


def chsh_traditional(sigma_l: float, n_samples: int = 500, seed=0,
                     shot_noise: int | None = None,
                     settings: SettingsQuad | None = None,
                     split_variance: bool = True) -> CHSHEstimate:
    """Monte-Carlo CHSH on phased Bell states with Gaussian phase jitter.

    delta ~ Normal(0, sigma_q**2) with sigma_q = sigma_L/sqrt(2) when
    ``split_variance`` (variance shared between the two qubits), else
    sigma_q = sigma_L. Each correlator is the sample mean of exact
    expectations, or of binomial estimates with ``shot_noise`` shots.
    The SE of S is the root-sum-square of the correlator SEs.
    """
    if n_samples < 2:
        raise InsufficientDataError("chsh_traditional needs n_samples >= 2")
    if sigma_l < 0:
        raise ValueError("sigma_L must be nonnegative")
    settings = settings or canonical_settings()
    rng = np.random.default_rng(seed)
    sigma_q = sigma_l / np.sqrt(2.0) if split_variance else sigma_l
    deltas = rng.normal(0.0, sigma_q, size=n_samples)
    states = prepare_bell_with_phase(deltas)
    means, ses = [], []
    for a, b in settings.pairs():
        vals = pauli_expectation(states, ab_observable(a, b))
        if shot_noise:
            p_up = np.clip(0.5 * (1.0 + vals), 0.0, 1.0)
            vals = 2.0 * rng.binomial(int(shot_noise), p_up) / shot_noise - 1.0
        means.append(float(vals.mean()))
        ses.append(float(vals.std(ddof=1) / np.sqrt(n_samples)))
    s = chsh_combine(*means)
    se = float(np.sqrt(np.sum(np.square(ses))))
    return CHSHEstimate(float(s), se, tuple(means), tuple(ses), settings, "oracle",
                        None, int(n_samples), seed)
