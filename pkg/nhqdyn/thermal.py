"""
Gibbs-like equilibrium states built from H0, H or H-dagger and the
KMS-like condition they satisfy
"""
import logging
from dataclasses import dataclass

import numpy as np

from nhqdyn.dynamics import GeneratorKind, Picture, _check_operator, heisenberg, spectral_triple
from nhqdyn.errors import DimMismatch, ValidationError
from nhqdyn.linalg import frozen

logger = logging.getLogger(__name__)

# Conditioning above which the KMS tolerance grows linearly
KMS_COND_FLOOR = 1e4

MATCHED_PICTURES = {
    GeneratorKind.H0: Picture.STANDARD,
    GeneratorKind.H: Picture.PSI,
    GeneratorKind.HDAGGER: Picture.PHI,
}

# Pairings outside the matched table, reported but never asserted
MIXED_PAIRINGS = (
    (GeneratorKind.H0, Picture.PSI),
    (GeneratorKind.H0, Picture.MIXED),
    (GeneratorKind.H, Picture.MIXED),
    (GeneratorKind.HDAGGER, Picture.MIXED),
)


@dataclass(frozen=True, eq=False)
class ThermalState:
    """omega(X) = tr(weight X) / Z with weight = e^{-beta G}"""
    kind: GeneratorKind
    beta: float
    weight: np.ndarray
    Z: complex

    @property
    def picture(self):
        return MATCHED_PICTURES[self.kind]


def _check_beta(beta):
    beta = float(beta)
    if not np.isfinite(beta) or beta <= 0:
        raise ValidationError(f"beta must be positive, got {beta!r}", field="beta")
    return beta


def partition_function(system, kind, beta):
    """Z = sum_k e^{-beta E_k} over the spectrum of the generator"""
    beta = _check_beta(beta)
    values, _, _ = spectral_triple(system, kind)
    return complex(np.sum(np.exp(-beta * values)))


def build_thermal(system, kind, beta):
    """
    Equilibrium state of the given generator at inverse temperature beta

    Args:
        system: BiorthogonalSystem
        kind: GeneratorKind (H0 -> omega_0, H -> omega_Psi, Hdagger -> omega_phi)
        beta: positive inverse temperature

    Returns:
        ThermalState
    """
    beta = _check_beta(beta)
    values, right, left = spectral_triple(system, kind)
    boltzmann = np.exp(-beta * values)
    weight = (right * boltzmann) @ left.conj().T
    Z = complex(np.sum(boltzmann))
    if system.all_real:
        Z = complex(Z.real)
    logger.debug(f"Thermal state {kind.value} at beta={beta}: Z={Z:.6g}")
    return ThermalState(kind, beta, frozen(weight), Z)


def expectation(state, X):
    """tr(weight X) / Z"""
    X = np.asarray(X, dtype=np.complex128)
    if X.shape != state.weight.shape:
        raise DimMismatch(f"Operator shape {X.shape} does not match state {state.weight.shape}",
                          expected=state.weight.shape[0], actual=X.shape[0] if X.ndim else None)
    return complex(np.trace(state.weight @ X) / state.Z)


def kms_residual(system, kind, A, B, t, beta, picture=None):
    """
    |omega(A(t) B) - omega(B A(t + i beta))|

    A(z) is evolved in the picture matched to kind unless picture is given.

    Args:
        system: BiorthogonalSystem
        kind: GeneratorKind of the state
        A, B: operators
        t: real time
        beta: inverse temperature
        picture: optional Picture override

    Returns:
        Non-negative residual
    """
    A = _check_operator(system, A)
    B = _check_operator(system, B)
    state = build_thermal(system, kind, beta)
    if picture is None:
        picture = state.picture
    At = heisenberg(system, picture, A, t)
    At_shifted = heisenberg(system, picture, A, t + 1j * state.beta)
    return abs(expectation(state, At @ B) - expectation(state, B @ At_shifted))


def kms_tolerance(system):
    """kms_tol, scaled by cond(S_phi)/1e4 once the condition number exceeds 1e4"""
    scale = max(1.0, system.condition / KMS_COND_FLOOR)
    return system.tol.kms_tol * scale


def kms_report(system, A, B, times, betas):
    """
    Matched-pair KMS residuals over a (t, beta) grid

    Returns:
        list of dicts with state, picture, t, beta, residual, tolerance, passed
    """
    tolerance = kms_tolerance(system)
    rows = []
    for kind, picture in MATCHED_PICTURES.items():
        for beta in betas:
            for t in times:
                residual = kms_residual(system, kind, A, B, t, beta, picture)
                rows.append({
                    "state": kind.value,
                    "picture": picture.value,
                    "t": float(t),
                    "beta": float(beta),
                    "residual": residual,
                    "tolerance": tolerance,
                    "passed": bool(residual <= tolerance),
                })
    return rows


def mixed_kms_report(system, A, B, t, beta):
    """Residuals for state/picture pairings outside the matched table"""
    return [
        {
            "state": kind.value,
            "picture": picture.value,
            "t": float(t),
            "beta": float(beta),
            "residual": kms_residual(system, kind, A, B, t, beta, picture),
        }
        for kind, picture in MIXED_PAIRINGS
    ]
