"""
Transition-probability laws, closed-form special cases and the
discrimination report contrasting the laws
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from itertools import combinations

import numpy as np

from nhqdyn.dynamics import (
    BasisKind, GeneratorKind, SpectralExpansion, _grid, evolve_states
)
from nhqdyn.errors import IndexOutOfRange, Overflow, RangeViolation, SpectrumNotReal, ZeroVector
from nhqdyn.linalg import as_vector, frozen
from nhqdyn.metric import MetricKind, gram

logger = logging.getLogger(__name__)

NONCONSERVATIVE = "nonconservative"


class ProbabilityLaw(Enum):
    """Normalized overlap in the standard, Psi or phi geometry"""
    STANDARD = "standard"
    PSI = "psi"
    PHI = "phi"

    @property
    def metric(self):
        return {
            ProbabilityLaw.STANDARD: MetricKind.STANDARD,
            ProbabilityLaw.PSI: MetricKind.PSI,
            ProbabilityLaw.PHI: MetricKind.PHI,
        }[self]


ALL_LAWS = (ProbabilityLaw.STANDARD, ProbabilityLaw.PSI, ProbabilityLaw.PHI)


class OracleCase(Enum):
    """Final state of the closed-form cases for Phi0 = phi_a + phi_b"""
    PHI_TARGET = "phi"
    PSI_TARGET = "psi"


@dataclass(frozen=True)
class Scenario:
    name: str
    initial: np.ndarray = field(compare=False)
    final: np.ndarray = field(compare=False)
    times: np.ndarray = field(compare=False)
    generator: GeneratorKind = GeneratorKind.H


@dataclass(frozen=True, eq=False)
class TransitionTrace:
    times: np.ndarray
    values: dict
    initial: np.ndarray
    final: np.ndarray
    generator: GeneratorKind
    warnings: tuple = ()
    expansions: dict = field(default_factory=dict)


def _clamp(values, slack):
    values = np.asarray(values, dtype=float)
    if not np.all(np.isfinite(values)):
        raise Overflow("Transition probability is not finite on this grid")
    low, high = float(values.min()), float(values.max())
    if low < -slack or high > 1.0 + slack:
        bad = low if low < -slack else high
        raise RangeViolation(f"Transition probability {bad!r} outside [0, 1]", value=bad)
    return np.clip(values, 0.0, 1.0)


def _squared_norm(G, f, zero_tol, label):
    value = float(np.vdot(G @ f, f).real)
    if value <= zero_tol ** 2:
        raise ZeroVector(f"{label} vector has zero norm in this geometry")
    return value


def _law_values(system, law, final, states):
    G = gram(system, law.metric)
    tol = system.tol
    final_norm = _squared_norm(G, final, tol.zero_tol, "Final")
    overlaps = states @ (G @ final).conj()
    state_norms = np.einsum("ti,ij,tj->t", states.conj(), G, states).real
    if np.any(state_norms <= tol.zero_tol ** 2):
        raise ZeroVector("Evolved state has zero norm in this geometry")
    return _clamp(np.abs(overlaps) ** 2 / (final_norm * state_norms), tol.range_slack)


def probability(system, law, final, state):
    """
    |<final, state>_m|^2 / (||final||_m^2 ||state||_m^2) with m the law's geometry

    Raises:
        ZeroVector: either vector vanishes in the law's norm
        RangeViolation: result outside [0, 1] beyond range_slack
    """
    final = as_vector(final, system.dim)
    state = as_vector(state, system.dim)
    return float(_law_values(system, law, final, state[None, :])[0])


def transition_trace(system, laws, initial, final, generator=GeneratorKind.H, times=(0.0,)):
    """
    Evolve initial under generator and evaluate each law against final

    Args:
        system: BiorthogonalSystem
        laws: iterable of ProbabilityLaw
        initial, final: vectors
        generator: GeneratorKind, H by default
        times: strictly increasing time grid

    Returns:
        TransitionTrace
    """
    initial = as_vector(initial, system.dim)
    final = as_vector(final, system.dim)
    grid = _grid(times)
    states = evolve_states(system, generator, initial, grid, rescaled=not system.all_real)

    warnings = ()
    if not system.all_real:
        logger.warning("Transition trace on a complex spectrum: probabilities are not conserved")
        warnings = (NONCONSERVATIVE,)

    values = {law: frozen(_law_values(system, law, final, states)) for law in laws}
    return TransitionTrace(frozen(grid), values, frozen(initial), frozen(final), generator, warnings)


def hermitian_baseline(system, initial, final, times):
    """
    P(t) = |sum_k d_k conj(p_k) e^{-iE_k t}|^2 / (||final||^2 ||initial||^2)
    with d_k = <e_k, initial> and p_k = <e_k, final>, evolution by H0

    Raises:
        SpectrumNotReal: H0 is not Hermitian
    """
    if not system.all_real:
        raise SpectrumNotReal("The Hermitian baseline needs a real spectrum (H0 Hermitian)")
    initial = as_vector(initial, system.dim)
    final = as_vector(final, system.dim)
    grid = _grid(times)

    d = system.e.conj().T @ initial
    p = system.e.conj().T @ final
    norm_initial = float(np.vdot(initial, initial).real)
    norm_final = float(np.vdot(final, final).real)
    if norm_initial <= system.tol.zero_tol ** 2 or norm_final <= system.tol.zero_tol ** 2:
        raise ZeroVector("Baseline needs nonzero initial and final vectors")

    phases = np.exp(-1j * np.outer(grid, system.eigenvalues.real))
    amplitude = phases @ (d * p.conj())
    values = _clamp(np.abs(amplitude) ** 2 / (norm_initial * norm_final), system.tol.range_slack)

    expansions = {
        "d": SpectralExpansion(frozen(d), BasisKind.E, system.e),
        "p": SpectralExpansion(frozen(p), BasisKind.E, system.e),
    }
    return TransitionTrace(frozen(grid), {ProbabilityLaw.STANDARD: frozen(values)},
                           frozen(initial), frozen(final), GeneratorKind.H0, (), expansions)


def _cross(w, u, v):
    # w*u*v + c.c.
    return 2.0 * np.real(w * u * v)


def special_case_oracle(system, case, j, a, b, t):
    """
    Closed forms for Phi0 = phi_a + phi_b evolved by H and Phi_f = phi_j or psi_j,
    written in terms of inner products of basis vectors only

    Args:
        system: BiorthogonalSystem with a real spectrum
        case: OracleCase
        j, a, b: basis indices, a != b
        t: time or array of times

    Returns:
        dict ProbabilityLaw -> value(s)
    """
    n = system.dim
    for name, index in (("j", j), ("a", a), ("b", b)):
        if not 0 <= index < n:
            raise IndexOutOfRange(f"Index {name}={index} outside 0..{n - 1}")
    if a == b:
        raise IndexOutOfRange("Indices a and b must differ")
    if not system.all_real:
        raise SpectrumNotReal("Closed-form transition cases assume real eigenvalues")

    phi, psi, S_phi, S_psi = system.phi, system.psi, system.S_phi, system.S_psi
    E = system.eigenvalues.real
    times = np.asarray(t, dtype=float)
    w = np.exp(1j * (E[a] - E[b]) * times)
    delta = float(j == a) + float(j == b)

    def std(x, y):
        return np.vdot(x, y)

    def phi_ip(x, y):
        return np.vdot(S_phi @ x, y)

    def psi_ip(x, y):
        return np.vdot(S_psi @ x, y)

    fa, fb, fj = phi[:, a], phi[:, b], phi[:, j]
    pa, pb, pj = psi[:, a], psi[:, b], psi[:, j]

    standard_state = std(fa, fa).real + std(fb, fb).real + _cross(w, std(fa, fb), 1.0)
    phi_state = phi_ip(fa, fa).real + phi_ip(fb, fb).real + _cross(w, phi_ip(fa, fb), 1.0)

    def numerator(ip, x_j, x_a, x_b):
        return (abs(ip(x_j, x_a)) ** 2 + abs(ip(x_j, x_b)) ** 2
                + _cross(w, ip(x_a, x_j), ip(x_j, x_b)))

    if case is OracleCase.PHI_TARGET:
        result = {
            ProbabilityLaw.PSI: np.full_like(times, 0.5 * delta),
            ProbabilityLaw.STANDARD: numerator(std, fj, fa, fb) / (std(fj, fj).real * standard_state),
            ProbabilityLaw.PHI: numerator(phi_ip, fj, fa, fb) / (phi_ip(fj, fj).real * phi_state),
        }
    else:
        result = {
            ProbabilityLaw.STANDARD: delta / (std(pj, pj).real * standard_state),
            ProbabilityLaw.PSI: numerator(std, pj, pa, pb) / (2.0 * psi_ip(pj, pj).real),
            ProbabilityLaw.PHI: numerator(std, fj, fa, fb) / phi_state,
        }
    if times.ndim == 0:
        return {law: float(value) for law, value in result.items()}
    return {law: np.asarray(value, dtype=float) for law, value in result.items()}


@dataclass(frozen=True, eq=False)
class ScenarioResult:
    scenario: Scenario
    trace: TransitionTrace
    max_differences: dict
    distinguishable: dict
    adjoint_trace: TransitionTrace = None

    def verdict(self):
        pairs = [f"{p[0].value}|{p[1].value}" for p, flag in self.distinguishable.items() if flag]
        same = [f"{p[0].value}|{p[1].value}" for p, flag in self.distinguishable.items() if not flag]
        return {"distinguishable": pairs, "indistinguishable": same}


@dataclass(frozen=True, eq=False)
class DiscriminationReport:
    results: list
    threshold: float
    warnings: tuple = ()

    def to_dict(self):
        scenarios = []
        for result in self.results:
            entry = {
                "name": result.scenario.name,
                "generator": result.trace.generator.value,
                "laws": {
                    law.value: {"min": float(v.min()), "max": float(v.max())}
                    for law, v in result.trace.values.items()
                },
                "max_differences": {
                    f"{p[0].value}|{p[1].value}": d for p, d in result.max_differences.items()
                },
                "verdict": result.verdict(),
                "warnings": list(result.trace.warnings),
            }
            if result.adjoint_trace is not None:
                entry["adjoint_laws"] = {
                    law.value: {"min": float(v.min()), "max": float(v.max())}
                    for law, v in result.adjoint_trace.values.items()
                }
            scenarios.append(entry)
        return {"threshold": self.threshold, "warnings": list(self.warnings), "scenarios": scenarios}


def _evaluate_scenario(system, scenario, laws, threshold, include_hdagger):
    trace = transition_trace(system, laws, scenario.initial, scenario.final,
                             scenario.generator, scenario.times)
    differences = {}
    flags = {}
    for first, second in combinations(laws, 2):
        diff = float(np.max(np.abs(trace.values[first] - trace.values[second])))
        differences[(first, second)] = diff
        flags[(first, second)] = diff > threshold

    adjoint_trace = None
    if include_hdagger and scenario.generator is GeneratorKind.H:
        adjoint_trace = transition_trace(system, laws, scenario.initial, scenario.final,
                                         GeneratorKind.HDAGGER, scenario.times)
    return ScenarioResult(scenario, trace, differences, flags, adjoint_trace)


def discrimination_report(system, scenarios, laws=ALL_LAWS, threshold=None,
                          include_hdagger=False, workers=1):
    """
    Evaluate each scenario under every law and decide which law pairs an
    experiment could tell apart (max pointwise difference > threshold)

    Args:
        system: BiorthogonalSystem
        scenarios: list of Scenario
        laws: laws to compare
        threshold: defaults to the system's discrim_threshold
        include_hdagger: also evolve with H-dagger for comparison
        workers: scenario fan-out

    Returns:
        DiscriminationReport
    """
    laws = tuple(laws)
    if threshold is None:
        threshold = system.tol.discrim_threshold

    def evaluate(scenario):
        return _evaluate_scenario(system, scenario, laws, threshold, include_hdagger)

    if workers > 1 and len(scenarios) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(evaluate, scenarios))
    else:
        results = [evaluate(s) for s in scenarios]

    warnings = (NONCONSERVATIVE,) if not system.all_real else ()
    logger.info(f"Discrimination report: {len(results)} scenario(s), threshold {threshold:.1e}")
    return DiscriminationReport(results, threshold, warnings)
