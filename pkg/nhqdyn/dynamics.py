"""
Time evolution in the three Schroedinger-like pictures and the Heisenberg maps
"""
import logging
from dataclasses import dataclass
from enum import Enum

import numpy as np

from nhqdyn.errors import DimMismatch, Overflow, ValidationError
from nhqdyn.linalg import as_matrix, as_vector, expm_series, frozen, operator_norm
from nhqdyn.metric import MetricKind, norms_squared

logger = logging.getLogger(__name__)


class GeneratorKind(Enum):
    """H0 drives Phi(t), H drives Phi_Psi(t), Hdagger drives Phi_phi(t)"""
    H0 = "H0"
    H = "H"
    HDAGGER = "Hdagger"


class Picture(Enum):
    """
    Heisenberg maps:
        MIXED:    e^{iH't} X e^{-iHt}
        PSI:      e^{iHt}  X e^{-iHt}
        PHI:      e^{iH't} X e^{-iH't}
        STANDARD: e^{iH0t} X e^{-iH0t}
    (H' = H-dagger)
    """
    MIXED = "mixed"
    PSI = "psi"
    PHI = "phi"
    STANDARD = "standard"


class BasisKind(Enum):
    PHI = "phi"
    PSI = "psi"
    E = "e"


@dataclass(frozen=True, eq=False)
class SpectralExpansion:
    """Coefficients of a vector in one of the system bases"""
    coefficients: np.ndarray
    basis_kind: BasisKind
    basis: np.ndarray

    def reconstruct(self):
        return self.basis @ self.coefficients


@dataclass(frozen=True, eq=False)
class EvolutionTrace:
    """States on a time grid plus their norms in every geometry"""
    times: np.ndarray
    states: np.ndarray
    norms: dict
    generator: GeneratorKind

    def variation(self, kind):
        """max - min of the norm series in the given geometry"""
        series = self.norms[kind]
        return float(series.max() - series.min())


def spectral_triple(system, generator):
    """
    (values, right, left) with G = right @ diag(values) @ left^H

    H: (E, phi, psi); Hdagger: (conj E, psi, phi); H0: (E, e, e)
    """
    E = system.eigenvalues
    if generator is GeneratorKind.H:
        return E, system.phi, system.psi
    if generator is GeneratorKind.HDAGGER:
        return np.conj(E), system.psi, system.phi
    return E, system.e, system.e


def generator_matrix(system, generator):
    if generator is GeneratorKind.H:
        return system.H
    if generator is GeneratorKind.HDAGGER:
        return system.Hdag
    return system.H0


def propagator(system, generator, t):
    """
    e^{-iGt} from the spectral resolution sum_k e^{-iE_k t} |r_k><l_k|

    Args:
        system: BiorthogonalSystem
        generator: GeneratorKind
        t: real or complex time

    Returns:
        Propagator matrix
    """
    values, right, left = spectral_triple(system, generator)
    phases = np.exp(-1j * values * t)
    return (right * phases) @ left.conj().T


def propagator_series_deviation(system, generator, t):
    """max entry deviation between the spectral and the series propagator"""
    G = generator_matrix(system, generator)
    reference = expm_series(-1j * G * t)
    return float(np.max(np.abs(propagator(system, generator, t) - reference)))


def expand(system, vector, basis=BasisKind.PHI):
    """
    Coefficients of vector in the phi, psi or e basis

    phi: c_k = <psi_k, v>; psi: c_k = <phi_k, v>; e: c_k = <e_k, v>
    """
    v = as_vector(vector, system.dim)
    if basis is BasisKind.PHI:
        vectors, duals = system.phi, system.psi
    elif basis is BasisKind.PSI:
        vectors, duals = system.psi, system.phi
    else:
        vectors, duals = system.e, system.e
    return SpectralExpansion(frozen(duals.conj().T @ v), basis, vectors)


def _grid(times):
    try:
        grid = np.asarray(times, dtype=float)
    except (TypeError, ValueError):
        raise ValidationError("Time grid entries must be numbers", field="times")
    if grid.ndim != 1 or grid.size == 0:
        raise ValidationError("Time grid must be a non-empty 1-D array", field="times")
    if not np.all(np.isfinite(grid)):
        raise ValidationError("Time grid entries must be finite", field="times")
    if grid.size > 1 and np.any(np.diff(grid) <= 0):
        raise ValidationError("Time grid must be strictly increasing", field="times")
    return grid


def evolve_states(system, generator, initial, times, rescaled=False):
    """
    (n_times, dim) array of e^{-iGt} initial, one decomposition for the whole grid

    With rescaled=True each row is divided by its largest mode magnitude
    |c_k| e^{Im(E_k) t}. Rows keep their direction, so normalized quantities
    are unchanged and long grids on a complex spectrum stay finite.
    """
    values, right, left = spectral_triple(system, generator)
    coefficients = left.conj().T @ initial
    exponents = -1j * np.outer(times, values)
    if rescaled:
        present = np.abs(coefficients) > 0
        if np.any(present):
            magnitudes = exponents.real[:, present] + np.log(np.abs(coefficients[present]))
            exponents = exponents - magnitudes.max(axis=1, keepdims=True)
            exponents[:, ~present] = -np.inf
    with np.errstate(over="ignore", invalid="ignore"):
        return (np.exp(exponents) * coefficients) @ right.T


def evolve_state(system, generator, initial, times):
    """
    Evolve a state over a time grid

    Args:
        system: BiorthogonalSystem
        generator: GeneratorKind
        initial: initial vector
        times: strictly increasing time grid

    Returns:
        EvolutionTrace with norms in all three geometries
    """
    initial = as_vector(initial, system.dim)
    grid = _grid(times)
    states = evolve_states(system, generator, initial, grid)
    if not np.all(np.isfinite(states)):
        raise Overflow("Evolved state overflows on this grid; shorten it or use a real spectrum")
    norms = {
        kind: frozen(np.sqrt(norms_squared(system, kind, states)))
        for kind in MetricKind
    }
    return EvolutionTrace(frozen(grid), frozen(states), norms, generator)


def picture_states(system, initial, times):
    """
    Phi(t) = e^{-iH0 t} Phi0 together with the derived pictures
    Phi_psi(t) = e^{-iHt} S_psi^(-1/2) Phi0 and Phi_phi(t) = e^{-iH't} S_phi^(-1/2) Phi0

    Returns:
        dict with keys "standard", "psi", "phi", each an (n_times, dim) array
    """
    initial = as_vector(initial, system.dim)
    grid = _grid(times)
    # S_psi^(-1/2) = S_phi^(1/2) and vice versa
    return {
        "standard": evolve_states(system, GeneratorKind.H0, initial, grid),
        "psi": evolve_states(system, GeneratorKind.H, system.S_phi_half @ initial, grid),
        "phi": evolve_states(system, GeneratorKind.HDAGGER, system.S_psi_half @ initial, grid),
    }


def _check_operator(system, X):
    X = as_matrix(X)
    if X.shape[0] != system.dim:
        raise DimMismatch(f"Operator has dimension {X.shape[0]}, expected {system.dim}",
                          expected=system.dim, actual=X.shape[0])
    return X


def heisenberg(system, picture, X, t):
    """
    Heisenberg-evolved operator X(t) in the given picture

    t may be complex (used for the KMS check).
    """
    X = _check_operator(system, X)
    if picture is Picture.MIXED:
        return propagator(system, GeneratorKind.HDAGGER, -t) @ X @ propagator(system, GeneratorKind.H, t)
    if picture is Picture.PSI:
        generator = GeneratorKind.H
    elif picture is Picture.PHI:
        generator = GeneratorKind.HDAGGER
    else:
        generator = GeneratorKind.H0
    return propagator(system, generator, -t) @ X @ propagator(system, generator, t)


def automorphism_defect(system, picture, X, Y, t):
    """||(XY)(t) - X(t) Y(t)||; zero unless the picture is MIXED"""
    X = _check_operator(system, X)
    Y = _check_operator(system, Y)
    product = heisenberg(system, picture, X @ Y, t)
    return operator_norm(product - heisenberg(system, picture, X, t) @ heisenberg(system, picture, Y, t))


def conservation_defect(system, picture, X, t):
    """||X(t) - X||: in the MIXED picture [H, X] = 0 does not keep X fixed"""
    X = _check_operator(system, X)
    return operator_norm(heisenberg(system, picture, X, t) - X)
