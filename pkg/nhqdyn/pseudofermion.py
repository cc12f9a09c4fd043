"""
Two-level pseudo-fermion algebras and the simplified SDS model
"""
import logging
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from nhqdyn.biortho import SDS_LEADING, NormalizationPolicy, build_system
from nhqdyn.errors import (
    InvalidMatrix, KernelNotOneDimensional, NormalizationError,
    NotPseudoFermionic, ParameterOutOfRange
)
from nhqdyn.linalg import as_matrix, fix_phase, frozen, operator_norm
from nhqdyn.metric import MetricKind, adjoint
from nhqdyn.tolerances import DEFAULT_TOLERANCES

logger = logging.getLogger(__name__)

# Standard fermion annihilator: f (1, 0) = 0, f-dagger (1, 0) = (0, 1)
FERMION = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=np.complex128)


def car_algebra():
    """(f, f-dagger) for the canonical fermion"""
    return FERMION.copy(), FERMION.conj().T.copy()


def similarity_algebra(T):
    """(T f T^-1, T f-dagger T^-1) for an invertible 2x2 T"""
    T = as_matrix(T)
    if T.shape != (2, 2):
        raise InvalidMatrix(f"Similarity must be 2x2, got {T.shape}")
    T_inv = np.linalg.inv(T)
    f, fdag = car_algebra()
    return T @ f @ T_inv, T @ fdag @ T_inv


def anticommutator(x, y):
    return x @ y + y @ x


def anticommutator_residual(a, b):
    """max of ||{a,b} - I||, ||{a,a}|| and ||{b,b}||"""
    identity = np.eye(a.shape[0])
    return max(
        operator_norm(anticommutator(a, b) - identity),
        operator_norm(anticommutator(a, a)),
        operator_norm(anticommutator(b, b)),
    )


@dataclass(frozen=True, eq=False)
class PseudoFermionAlgebra:
    """
    a, b with {a,b} = I and a^2 = b^2 = 0, the number operator N = ba and
    the two biorthonormal eigenbases built from the vacua of a and b-dagger
    """
    a: np.ndarray
    b: np.ndarray
    N: np.ndarray
    phi0: np.ndarray
    phi1: np.ndarray
    psi0: np.ndarray
    psi1: np.ndarray
    policy: NormalizationPolicy

    @property
    def Ndag(self):
        return self.N.conj().T

    @property
    def phi(self):
        return np.column_stack([self.phi0, self.phi1])

    @property
    def psi(self):
        return np.column_stack([self.psi0, self.psi1])

    @property
    def S_phi(self):
        return self.phi @ self.phi.conj().T

    @property
    def S_psi(self):
        return self.psi @ self.psi.conj().T

    @property
    def normalization(self):
        """(N_phi, N_psi): leading components of the vacua"""
        return complex(self.phi0[0]), complex(self.psi0[0])

    def scale(self):
        return max(1.0, operator_norm(self.a) * operator_norm(self.b),
                   operator_norm(self.S_phi) * operator_norm(self.S_psi))


def _kernel_line(M, name):
    kernel = scipy.linalg.null_space(M)
    if kernel.shape[1] != 1:
        raise KernelNotOneDimensional(f"ker({name}) has dimension {kernel.shape[1]}, expected 1")
    return kernel[:, 0]


def build_pf(a, b, policy=NormalizationPolicy.UNIT, tol=DEFAULT_TOLERANCES):
    """
    Build the pseudo-fermion algebra of (a, b)

    Args:
        a, b: 2x2 matrices
        policy: UNIT (unit phi0) or SDS (leading component of phi0 = 1/sqrt(2))
        tol: Tolerance table (pf_tol)

    Returns:
        PseudoFermionAlgebra

    Raises:
        NotPseudoFermionic: anticommutator residual above pf_tol
        KernelNotOneDimensional: ker(a) or ker(b-dagger) is not a line
    """
    a = as_matrix(a)
    b = as_matrix(b)
    if a.shape != (2, 2) or b.shape != (2, 2):
        raise InvalidMatrix(f"Pseudo-fermion operators must be 2x2, got {a.shape} and {b.shape}")

    residual = anticommutator_residual(a, b)
    limit = tol.pf_tol * max(1.0, operator_norm(a) * operator_norm(b))
    if residual > limit:
        raise NotPseudoFermionic(f"Anticommutator residual {residual:.3e} exceeds {limit:.1e}",
                                 residual=residual)

    phi0 = _kernel_line(a, "a")
    psi0 = _kernel_line(b.conj().T, "b^dagger")

    if policy is NormalizationPolicy.SDS:
        if abs(phi0[0]) < 1e-12:
            raise NormalizationError("Vacuum of a has a vanishing leading component")
        phi0 = phi0 / phi0[0] * SDS_LEADING
    else:
        phi0 = fix_phase(phi0[:, None])[:, 0]

    overlap = np.vdot(phi0, psi0)
    if abs(overlap) < np.finfo(float).eps:
        raise NormalizationError("Vacua of a and b^dagger are orthogonal")
    psi0 = psi0 / overlap

    phi1 = b @ phi0
    psi1 = a.conj().T @ psi0
    return PseudoFermionAlgebra(
        a=frozen(a), b=frozen(b), N=frozen(b @ a),
        phi0=frozen(phi0), phi1=frozen(phi1), psi0=frozen(psi0), psi1=frozen(psi1),
        policy=policy,
    )


def vacuum_first(system, a):
    """Reorder a two-level system so that index 0 is the eigenvector annihilated by a"""
    lowered = np.linalg.norm(a @ system.phi, axis=0) / np.linalg.norm(system.phi, axis=0)
    vacuum = int(np.argmin(lowered))
    return system.reordered([vacuum, 1 - vacuum])


def pf_hamiltonian(algebra, omega, shift=0.0):
    """H = omega N + shift I"""
    return omega * algebra.N + shift * np.eye(2, dtype=np.complex128)


@dataclass(frozen=True)
class AppendixItem:
    name: str
    residual: float
    tolerance: float
    passed: bool


@dataclass(frozen=True)
class AppendixReport:
    items: tuple

    @property
    def passed(self):
        return all(item.passed for item in self.items)

    def item(self, name):
        for entry in self.items:
            if entry.name == name:
                return entry
        raise KeyError(name)

    def to_dict(self):
        return {
            "passed": self.passed,
            "items": [
                {"name": i.name, "residual": i.residual, "tolerance": i.tolerance, "passed": i.passed}
                for i in self.items
            ],
        }


def verify_appendix(algebra, system=None, tol=DEFAULT_TOLERANCES):
    """
    Check the ladder, number-operator, biorthonormality, bound, mapping and
    intertwining relations of a pseudo-fermion algebra

    Args:
        algebra: PseudoFermionAlgebra
        system: optional BiorthogonalSystem of a Hamiltonian omega N + shift
        tol: Tolerance table (pf_tol)

    Returns:
        AppendixReport
    """
    a, b, N, Ndag = algebra.a, algebra.b, algebra.N, algebra.Ndag
    adag, bdag = a.conj().T, b.conj().T
    phi, psi = algebra.phi, algebra.psi
    S_phi, S_psi = algebra.S_phi, algebra.S_psi
    limit = tol.pf_tol * algebra.scale()

    def vec(x):
        return float(np.linalg.norm(x))

    levels = np.array([0.0, 1.0])
    residuals = {
        "anticommutators": anticommutator_residual(a, b),
        "vacuum_phi": vec(a @ algebra.phi0),
        "vacuum_psi": vec(bdag @ algebra.psi0),
        "lowering_phi": vec(a @ algebra.phi1 - algebra.phi0),
        "lowering_psi": vec(bdag @ algebra.psi1 - algebra.psi0),
        "raising_phi": vec(b @ algebra.phi1),
        "raising_psi": vec(adag @ algebra.psi1),
        "number_phi": operator_norm(N @ phi - phi * levels),
        "number_psi": operator_norm(Ndag @ psi - psi * levels),
        "biorthonormality": float(np.max(np.abs(phi.conj().T @ psi - np.eye(2)))),
        "s_phi_bound": max(0.0, operator_norm(S_phi) - vec(algebra.phi0) ** 2 - vec(algebra.phi1) ** 2),
        "s_psi_bound": max(0.0, operator_norm(S_psi) - vec(algebra.psi0) ** 2 - vec(algebra.psi1) ** 2),
        "mapping": max(operator_norm(S_phi @ psi - phi), operator_norm(S_psi @ phi - psi)),
        "intertwining_psi": operator_norm(S_psi @ N - Ndag @ S_psi),
        "intertwining_phi": operator_norm(S_phi @ Ndag - N @ S_phi),
        "riesz": operator_norm(S_phi @ S_psi - np.eye(2)),
    }
    if system is not None:
        residuals["commutes_with_number"] = operator_norm(system.H @ N - N @ system.H)
        residuals["system_intertwining"] = operator_norm(system.S_psi @ N - Ndag @ system.S_psi)

    # Positivity of S_phi is part of the Riesz property
    min_eigen = float(np.min(np.linalg.eigvalsh(0.5 * (S_phi + S_phi.conj().T))))
    items = [AppendixItem(name, float(r), limit, bool(r <= limit)) for name, r in residuals.items()]
    items.append(AppendixItem("riesz_positive", max(0.0, -min_eigen), limit, min_eigen > 0))
    report = AppendixReport(tuple(items))
    if not report.passed:
        failed = [i.name for i in items if not i.passed]
        logger.warning(f"Pseudo-fermion relations failed: {', '.join(failed)}")
    return report


@dataclass(frozen=True, eq=False)
class SdsModel:
    """H = -g [[0, 1-k], [1+k, 0]] with its pseudo-fermion structure"""
    g: float
    k: float
    alpha: float
    rho: float
    omega: float
    shift: float
    fit_residual: float
    H: np.ndarray
    algebra: PseudoFermionAlgebra
    system: object
    c: np.ndarray
    N0: np.ndarray
    H0: np.ndarray
    display_deviations: dict

    def to_dict(self):
        return {
            "g": self.g,
            "k": self.k,
            "alpha": self.alpha,
            "rho": self.rho,
            "omega": self.omega,
            "shift": self.shift,
            "fit_residual": self.fit_residual,
            "display_deviations": dict(self.display_deviations),
        }


def sds_matrices(g, k):
    """(H, a, b) of the SDS model"""
    alpha = np.sqrt((1.0 + k) / (1.0 - k))
    H = -g * np.array([[0.0, 1.0 - k], [1.0 + k, 0.0]], dtype=np.complex128)
    a = 0.5 * np.array([[1.0, 1.0 / alpha], [-alpha, -1.0]], dtype=np.complex128)
    b = 0.5 * np.array([[1.0, -1.0 / alpha], [alpha, -1.0]], dtype=np.complex128)
    return H, a, b


def _check_parameters(g, k):
    g, k = float(g), float(k)
    if not np.isfinite(k) or not -1.0 < k < 1.0:
        raise ParameterOutOfRange(f"k must lie in (-1, 1), got {k}", field="k")
    if not np.isfinite(g) or g == 0.0:
        raise ParameterOutOfRange(f"g must be a nonzero real, got {g}", field="g")
    return g, k


def _fit_number_decomposition(H, N):
    """Least-squares (omega, shift) with H ~ omega N + shift I"""
    design = np.column_stack([N.ravel(), np.eye(2).ravel()])
    (omega, shift), *_ = np.linalg.lstsq(design, H.ravel(), rcond=None)
    residual = operator_norm(H - omega * N - shift * np.eye(2))
    return omega, shift, residual


def _display_deviations(model_values, system, k, rho, alpha):
    omega, shift = model_values
    H = system.H
    flat_display = -np.array([[0.0, (1 + k) ** 2 / (1 - k)], [(1 - k) ** 2 / (1 + k), 0.0]])
    h0_display = rho * np.array([[0.0, -1.0], [-1.0, 0.0]])
    e_display = np.array([[1.0, 1.0], [-1.0, 1.0]]) / np.sqrt(2.0)
    overlaps = np.abs(np.einsum("ik,ik->k", system.e.conj(), e_display))

    deviations = {
        "omega": abs(omega - 2.0 * rho),
        "shift": abs(shift - rho),
        "h0": operator_norm(system.H0 - h0_display),
        "h_flat": operator_norm(adjoint(system, MetricKind.PHI, H) - flat_display),
        "h_sharp": operator_norm(adjoint(system, MetricKind.PSI, H) - H),
        "e_basis": float(np.max(1.0 - overlaps)),
    }
    if system.normalization is NormalizationPolicy.SDS:
        s_display = 2.0 * SDS_LEADING ** 2 * np.diag([1.0, alpha ** 2])
        deviations["s_phi"] = operator_norm(system.S_phi - s_display)
        deviations["s_psi"] = operator_norm(system.S_psi - np.linalg.inv(s_display))
    return {name: float(value) for name, value in deviations.items()}


def build_sds(g, k, policy=NormalizationPolicy.SDS, tol=DEFAULT_TOLERANCES):
    """
    Assemble the SDS model with basis index 0 on the pseudo-fermion vacuum

    Args:
        g: nonzero coupling
        k: asymmetry in (-1, 1)
        policy: NormalizationPolicy of the eigenvectors
        tol: Tolerance table

    Returns:
        SdsModel

    Raises:
        ParameterOutOfRange: |k| >= 1 or g == 0
    """
    g, k = _check_parameters(g, k)
    alpha = float(np.sqrt((1.0 + k) / (1.0 - k)))
    rho = float(-g * np.sqrt(1.0 - k ** 2))
    H, a, b = sds_matrices(g, k)

    algebra = build_pf(a, b, policy, tol)

    system = vacuum_first(build_system(H, policy, tol), a)

    omega, shift, fit_residual = _fit_number_decomposition(H, algebra.N)
    omega, shift = float(omega.real), float(shift.real)

    c = system.S_psi_half @ a @ system.S_phi_half
    N0 = c.conj().T @ c
    deviations = _display_deviations((omega, shift), system, k, rho, alpha)
    flagged = {name: value for name, value in deviations.items() if value > tol.pf_tol}
    if flagged:
        logger.info(f"SDS k={k}: computed forms differ from the displayed ones: {flagged}")

    return SdsModel(
        g=g, k=k, alpha=alpha, rho=rho, omega=omega, shift=shift,
        fit_residual=float(fit_residual), H=frozen(H), algebra=algebra, system=system,
        c=frozen(c), N0=frozen(N0), H0=system.H0, display_deviations=deviations,
    )
