"""
Biorthogonal eigenbases, metric operators and the Hermitian partner of a
non-self-adjoint Hamiltonian
"""
import logging
from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

from nhqdyn.errors import IllConditioned, NormalizationError, PairingAmbiguous
from nhqdyn.linalg import (
    EigenDecomposition, as_matrix, condition_psd, eigen_general, frozen,
    operator_norm, sqrt_psd
)
from nhqdyn.tolerances import DEFAULT_TOLERANCES

logger = logging.getLogger(__name__)

ORDERING_RULE = "ascending real part, ties by imaginary part"
SDS_LEADING = 1.0 / np.sqrt(2.0)


class NormalizationPolicy(Enum):
    """How the free scale of each phi_k is fixed before psi_k is rescaled"""
    UNIT = "unit"
    SDS = "sds"


class SpectrumKind(Enum):
    ALL_REAL = "all_real"
    SOME_COMPLEX = "some_complex"


@dataclass(frozen=True)
class SpectrumClass:
    kind: SpectrumKind
    max_imag: float

    @property
    def all_real(self):
        return self.kind is SpectrumKind.ALL_REAL


def classify_spectrum(eigenvalues, tol=DEFAULT_TOLERANCES):
    """
    Classify a spectrum as all-real or containing complex eigenvalues

    Args:
        eigenvalues: Iterable of complex eigenvalues
        tol: Tolerance table (real_tol)

    Returns:
        SpectrumClass
    """
    values = np.asarray(eigenvalues, dtype=np.complex128)
    max_imag = float(np.max(np.abs(values.imag))) if values.size else 0.0
    kind = SpectrumKind.ALL_REAL if max_imag <= tol.real_tol else SpectrumKind.SOME_COMPLEX
    return SpectrumClass(kind=kind, max_imag=max_imag)


def _apply_policy(vectors, policy):
    if policy is NormalizationPolicy.UNIT:
        return vectors / np.linalg.norm(vectors, axis=0)

    leading = vectors[0, :]
    if np.any(np.abs(leading) < 1e-12 * np.linalg.norm(vectors, axis=0)):
        raise NormalizationError("SDS normalization needs a nonzero first component in every phi_k")
    return vectors / leading * SDS_LEADING


def pair_adjoint_eigensystem(H, phi, tol=DEFAULT_TOLERANCES):
    """
    Eigenvectors of H-dagger matched to the eigenpairs of H

    Psi_k is the eigenvector of H-dagger whose eigenvalue equals conj(E_k),
    rescaled so that <phi_k, Psi_k> = 1.

    Args:
        H: Hamiltonian matrix
        phi: EigenDecomposition of H (already normalized)
        tol: Tolerance table (match_tol)

    Returns:
        EigenDecomposition of H-dagger in the order of phi

    Raises:
        PairingAmbiguous: zero or several candidates within match_tol
    """
    H = as_matrix(H, max_dim=tol.max_dim)
    Hdag = H.conj().T
    adjoint = eigen_general(Hdag, tol)
    window = tol.match_tol * max(1.0, operator_norm(H))

    chosen = []
    for k, target in enumerate(np.conj(phi.eigenvalues)):
        distances = np.abs(adjoint.eigenvalues - target)
        candidates = np.flatnonzero(distances <= window)
        if len(candidates) != 1:
            raise PairingAmbiguous(
                f"Eigenvalue {k} has {len(candidates)} adjoint candidates within {window:.1e}"
            )
        chosen.append(int(candidates[0]))
    if len(set(chosen)) != len(chosen):
        raise PairingAmbiguous("Two eigenvectors of H paired to the same adjoint eigenvector")

    psi = adjoint.right_vectors[:, chosen]
    overlaps = np.einsum("ik,ik->k", phi.right_vectors.conj(), psi)
    if np.any(np.abs(overlaps) < np.finfo(float).eps):
        raise PairingAmbiguous("Paired eigenvectors are orthogonal; cannot biorthonormalize")
    psi = psi / overlaps

    values = adjoint.eigenvalues[chosen]
    residuals = np.linalg.norm(Hdag @ psi - psi * values, axis=0)
    return EigenDecomposition(frozen(values), frozen(psi), frozen(residuals))


@dataclass(frozen=True, eq=False)
class BiorthogonalSystem:
    """
    Complete biorthogonal structure of H.

    phi, psi and e hold basis vectors as columns; index k is shared by
    eigenvalues[k], phi[:, k], psi[:, k] and e[:, k].
    """
    H: np.ndarray
    eigenvalues: np.ndarray
    phi: np.ndarray
    psi: np.ndarray
    S_phi: np.ndarray
    S_psi: np.ndarray
    S_phi_half: np.ndarray
    S_psi_half: np.ndarray
    H0: np.ndarray
    e: np.ndarray
    spectrum_class: SpectrumClass
    condition: float
    normalization: NormalizationPolicy
    quality: str
    tol: object = DEFAULT_TOLERANCES

    @property
    def dim(self):
        return self.H.shape[0]

    @property
    def Hdag(self):
        return self.H.conj().T

    @property
    def all_real(self):
        return self.spectrum_class.all_real

    def reordered(self, permutation):
        """Same system with basis index k taken from permutation[k]"""
        perm = list(permutation)
        if sorted(perm) != list(range(self.dim)):
            raise ValueError(f"Not a permutation of 0..{self.dim - 1}: {perm}")
        return replace(
            self,
            eigenvalues=frozen(self.eigenvalues[perm]),
            phi=frozen(self.phi[:, perm]),
            psi=frozen(self.psi[:, perm]),
            e=frozen(self.e[:, perm]),
        )

    def diagnostics(self):
        """Residual of every structural relation, keyed by name"""
        n = self.dim
        identity = np.eye(n)
        E = self.eigenvalues
        Hdag = self.Hdag
        return {
            "eigen_residual": operator_norm(self.H @ self.phi - self.phi * E),
            "adjoint_eigen_residual": operator_norm(Hdag @ self.psi - self.psi * np.conj(E)),
            "biorthonormality": float(np.max(np.abs(self.phi.conj().T @ self.psi - identity))),
            "resolution_of_identity": operator_norm(self.phi @ self.psi.conj().T - identity),
            "metric_product": operator_norm(self.S_phi @ self.S_psi - identity),
            "s_mapping": max(operator_norm(self.S_phi @ self.psi - self.phi),
                             operator_norm(self.S_psi @ self.phi - self.psi)),
            "intertwining_psi": operator_norm(self.S_psi @ self.H - Hdag @ self.S_psi),
            "intertwining_phi": operator_norm(self.S_phi @ Hdag - self.H @ self.S_phi),
            "h0_hermiticity": operator_norm(self.H0 - self.H0.conj().T),
            "h0_second_form": operator_norm(self.H0 - self.S_phi_half @ Hdag @ self.S_psi_half),
            "h0_eigen": operator_norm(self.H0 @ self.e - self.e * E),
            "h0_adjoint_eigen": operator_norm(self.H0.conj().T @ self.e - self.e * np.conj(E)),
            "e_orthonormality": operator_norm(self.e.conj().T @ self.e - identity),
            "half_roots_inverse": operator_norm(self.S_phi_half @ self.S_psi_half - identity),
        }

    def metadata(self):
        return {
            "dim": self.dim,
            "normalization": self.normalization.value,
            "ordering": ORDERING_RULE,
            "spectrum_class": self.spectrum_class.kind.value,
            "max_imag": self.spectrum_class.max_imag,
            "condition": self.condition,
            "quality": self.quality,
        }


def build_system(H, normalization=NormalizationPolicy.UNIT, tol=DEFAULT_TOLERANCES):
    """
    Build the biorthogonal system of H

    Args:
        H: Hamiltonian with distinct eigenvalues
        normalization: NormalizationPolicy for the phi_k
        tol: Tolerance table

    Returns:
        BiorthogonalSystem

    Raises:
        DegenerateSpectrum: repeated eigenvalues
        IllConditioned: cond(S_phi) > cond_limit with ill_conditioned_action = "raise"
    """
    H = frozen(as_matrix(H, max_dim=tol.max_dim))
    decomposition = eigen_general(H, tol)
    spectrum = classify_spectrum(decomposition.eigenvalues, tol)

    values = decomposition.eigenvalues
    if spectrum.all_real:
        values = values.real.astype(np.complex128)
    phi = _apply_policy(np.array(decomposition.right_vectors), normalization)
    residuals = np.linalg.norm(H @ phi - phi * values, axis=0)
    phi_pairs = EigenDecomposition(frozen(values), frozen(phi), frozen(residuals))

    psi = np.array(pair_adjoint_eigensystem(H, phi_pairs, tol).right_vectors)

    S_phi = phi @ phi.conj().T
    S_phi = 0.5 * (S_phi + S_phi.conj().T)
    S_psi = psi @ psi.conj().T
    S_psi = 0.5 * (S_psi + S_psi.conj().T)
    S_phi_half = sqrt_psd(S_phi, tol)
    S_psi_half = sqrt_psd(S_psi, tol)

    H0 = S_psi_half @ H @ S_phi_half
    e = S_psi_half @ phi

    condition = condition_psd(S_phi, tol)
    quality = "ok"
    if condition > tol.cond_limit:
        if tol.ill_conditioned_action == "raise":
            raise IllConditioned(f"cond(S_phi) = {condition:.3e} exceeds {tol.cond_limit:.1e}",
                                 condition=condition)
        logger.warning(f"cond(S_phi) = {condition:.3e} exceeds {tol.cond_limit:.1e}; results flagged")
        quality = "ill_conditioned"

    if not spectrum.all_real:
        logger.warning(
            f"Spectrum has complex eigenvalues (max |Im E| = {spectrum.max_imag:.3e}); "
            "no geometry conserves probability"
        )

    logger.debug(f"Built {H.shape[0]}-dim system, cond(S_phi) = {condition:.3e}")
    return BiorthogonalSystem(
        H=H,
        eigenvalues=frozen(values),
        phi=frozen(phi),
        psi=frozen(psi),
        S_phi=frozen(S_phi),
        S_psi=frozen(S_psi),
        S_phi_half=frozen(S_phi_half),
        S_psi_half=frozen(S_psi_half),
        H0=frozen(H0),
        e=frozen(e),
        spectrum_class=spectrum,
        condition=condition,
        normalization=normalization,
        quality=quality,
        tol=tol,
    )


def selfadjoint_obstruction(system, gram):
    """
    |<H phi_n, phi_n>_G - <phi_n, H phi_n>_G| for every eigenvector.

    For any positive definite G the value is 2 |Im E_n| ||phi_n||_G**2, so a
    single complex eigenvalue rules out every inner product in which H is
    self-adjoint.

    Args:
        system: BiorthogonalSystem
        gram: Hermitian positive definite matrix defining <f, g>_G = f^H G g
    """
    G = as_matrix(gram)
    Hphi = system.H @ system.phi
    left = np.einsum("ik,ij,jk->k", Hphi.conj(), G, system.phi)
    right = np.einsum("ik,ij,jk->k", system.phi.conj(), G, Hphi)
    return np.abs(left - right)


def matrix_with_spectrum(eigenvalues, rng, perturbation=0.5):
    """
    V diag(E) V^-1 with V = I + perturbation * (complex Gaussian) / sqrt(n)

    Args:
        eigenvalues: Target spectrum
        rng: numpy Generator
        perturbation: Distance of V from the identity (controls cond(S_phi))
    """
    E = np.asarray(eigenvalues, dtype=np.complex128)
    n = E.shape[0]
    noise = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    V = np.eye(n) + perturbation * noise / np.sqrt(n)
    return (V * E) @ np.linalg.inv(V)


def random_real_spectrum_matrix(rng, dim, min_gap=0.3, perturbation=0.5):
    """Random non-normal matrix with distinct real eigenvalues spaced at least min_gap apart"""
    steps = min_gap + rng.uniform(0.0, 1.0, dim)
    E = np.cumsum(steps)
    E = E - E.mean()
    return matrix_with_spectrum(E, rng, perturbation)
