"""
The three inner-product geometries and their adjoints
"""
from enum import Enum

import numpy as np

from nhqdyn.errors import DimMismatch, NegativeNorm
from nhqdyn.linalg import as_matrix, as_vector, operator_norm


class MetricKind(Enum):
    """Standard: <f, g>; Phi: <S_phi f, g>; Psi: <S_psi f, g>"""
    STANDARD = "standard"
    PHI = "phi"
    PSI = "psi"


def gram(system, kind):
    """Gram matrix G of the geometry, so that <f, g>_kind = f^H G g"""
    if kind is MetricKind.STANDARD:
        return np.eye(system.dim, dtype=np.complex128)
    if kind is MetricKind.PHI:
        return system.S_phi
    return system.S_psi


def _half_root(system, kind):
    if kind is MetricKind.STANDARD:
        return np.eye(system.dim, dtype=np.complex128)
    if kind is MetricKind.PHI:
        return system.S_phi_half
    return system.S_psi_half


def inner(system, kind, f, g):
    """
    Inner product in the chosen geometry, conjugate-linear in f

    Args:
        system: BiorthogonalSystem
        kind: MetricKind
        f, g: vectors of dimension system.dim

    Returns:
        complex scalar
    """
    f = as_vector(f, system.dim)
    g = as_vector(g, system.dim)
    if kind is MetricKind.STANDARD:
        return complex(np.vdot(f, g))
    return complex(np.vdot(gram(system, kind) @ f, g))


def inner_half_form(system, kind, f, g):
    """<S^(1/2) f, S^(1/2) g>, equal to inner() by construction of S^(1/2)"""
    root = _half_root(system, kind)
    f = as_vector(f, system.dim)
    g = as_vector(g, system.dim)
    return complex(np.vdot(root @ f, root @ g))


def _checked_norm_squared(value, scale):
    if value.real < -1e-12 * max(1.0, scale):
        raise NegativeNorm(f"Squared norm is negative ({value.real:.3e}); metric is not positive")
    if abs(value.imag) > 1e-12 * max(1.0, abs(value.real)):
        raise NegativeNorm(f"Squared norm has imaginary part {value.imag:.3e}")
    return max(value.real, 0.0)


def norm(system, kind, f):
    """
    Norm induced by the chosen geometry

    Raises:
        NegativeNorm: the squared norm is not a non-negative real
    """
    f = as_vector(f, system.dim)
    value = inner(system, kind, f, f)
    return float(np.sqrt(_checked_norm_squared(value, float(np.vdot(f, f).real))))


def norms_squared(system, kind, states):
    """Squared norms of the rows of a (n_times, dim) state array"""
    G = gram(system, kind)
    values = np.einsum("ti,ij,tj->t", states.conj(), G, states)
    return np.maximum(values.real, 0.0)


def adjoint(system, kind, X):
    """
    Adjoint of X in the chosen geometry

    Standard: X-dagger; Phi: S_psi X-dagger S_phi (flat); Psi: S_phi X-dagger S_psi (sharp)
    """
    X = as_matrix(X)
    if X.shape[0] != system.dim:
        raise DimMismatch(f"Operator has dimension {X.shape[0]}, expected {system.dim}",
                          expected=system.dim, actual=X.shape[0])
    Xdag = X.conj().T
    if kind is MetricKind.STANDARD:
        return Xdag
    if kind is MetricKind.PHI:
        return system.S_psi @ Xdag @ system.S_phi
    return system.S_phi @ Xdag @ system.S_psi


def is_selfadjoint(system, kind, X):
    """
    Whether X equals its adjoint in the chosen geometry

    Returns:
        Tuple (is_selfadjoint, residual) with the test
        ||X - adjoint(X)|| <= sa_tol * (1 + ||X||)
    """
    X = as_matrix(X)
    residual = operator_norm(X - adjoint(system, kind, X))
    return residual <= system.tol.sa_tol * (1.0 + operator_norm(X)), residual


def norm_bounds(system):
    """
    Constants (lower, upper) with lower*||f|| <= ||f||_phi <= upper*||f||

    lower = 1 / ||S_phi^(-1/2)|| and upper = ||S_phi^(1/2)||
    """
    lower = 1.0 / operator_norm(system.S_psi_half)
    upper = operator_norm(system.S_phi_half)
    return lower, upper
