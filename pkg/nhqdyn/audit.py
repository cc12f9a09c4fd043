"""
Invariant audit: every structural, dynamical, probabilistic and thermal
property of a built system, evaluated with seeded random vectors
"""
import logging
from dataclasses import dataclass

import numpy as np

from nhqdyn.dynamics import (
    GeneratorKind, Picture, automorphism_defect, evolve_state, heisenberg,
    propagator, propagator_series_deviation
)
from nhqdyn.errors import RangeViolation
from nhqdyn.linalg import operator_norm
from nhqdyn.metric import MetricKind, adjoint, inner
from nhqdyn.pseudofermion import verify_appendix
from nhqdyn.thermal import build_thermal, expectation, kms_report
from nhqdyn.transition import ALL_LAWS, transition_trace

logger = logging.getLogger(__name__)

AUDIT_TIMES = (0.3, 1.7)
AUDIT_BETAS = (0.5, 2.0)
AUDIT_GRID = np.linspace(0.0, 5.0, 101)

# Structural relations that only hold for a real spectrum
REAL_ONLY = ("intertwining_psi", "intertwining_phi", "h0_hermiticity", "h0_second_form")


@dataclass(frozen=True)
class AuditCheck:
    name: str
    module: str
    residual: float
    tolerance: float
    passed: bool
    informational: bool = False

    def to_dict(self):
        return {
            "name": self.name,
            "module": self.module,
            "residual": self.residual,
            "tolerance": self.tolerance,
            "passed": self.passed,
            "informational": self.informational,
        }


@dataclass(frozen=True)
class AuditReport:
    checks: tuple
    metadata: dict

    @property
    def all_passed(self):
        return all(c.passed for c in self.checks if not c.informational)

    def failed(self):
        return [c for c in self.checks if not c.informational and not c.passed]

    def check(self, name):
        for entry in self.checks:
            if entry.name == name:
                return entry
        raise KeyError(name)

    def to_dict(self):
        return {
            "all_passed": self.all_passed,
            "system": self.metadata,
            "checks": [c.to_dict() for c in self.checks],
        }


def random_vector(rng, dim):
    """Unit complex Gaussian vector"""
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return v / np.linalg.norm(v)


def random_operator(rng, dim):
    """Complex Gaussian matrix with unit spectral norm"""
    X = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return X / operator_norm(X)


class _Checks:
    """Collects AuditCheck entries for one module at a time"""

    def __init__(self):
        self.entries = []

    def add(self, module, name, residual, tolerance):
        residual = float(residual)
        self.entries.append(AuditCheck(name, module, residual, float(tolerance), residual <= tolerance))

    def note(self, module, name, residual):
        self.entries.append(AuditCheck(name, module, float(residual), None, True, True))


def _structure(checks, system, scale):
    for name, residual in system.diagnostics().items():
        if name in REAL_ONLY and not system.all_real:
            continue
        checks.add("biortho", name, residual, system.tol.bi_tol * scale)


def _adjoints(checks, system, rng, cond):
    tol = system.tol
    n = system.dim
    X, Y = random_operator(rng, n), random_operator(rng, n)
    f, g = random_vector(rng, n), random_vector(rng, n)
    limit = tol.sa_tol * cond ** 2

    for kind in MetricKind:
        Xa = adjoint(system, kind, X)
        checks.add("metric", f"involution_{kind.value}",
                   operator_norm(adjoint(system, kind, Xa) - X), limit)
        checks.add("metric", f"anti_homomorphism_{kind.value}",
                   operator_norm(adjoint(system, kind, X @ Y) - adjoint(system, kind, Y) @ Xa), limit)
        compatibility = abs(inner(system, kind, X @ f, g) - inner(system, kind, f, Xa @ g))
        checks.add("metric", f"compatibility_{kind.value}", compatibility, limit)

    bridge = (adjoint(system, MetricKind.PHI, X)
              - system.S_psi @ system.S_psi @ adjoint(system, MetricKind.PSI, X) @ system.S_phi @ system.S_phi)
    checks.add("metric", "flat_sharp_bridge", operator_norm(bridge), limit * cond ** 2)

    if system.all_real:
        H, Hdag = system.H, system.Hdag
        checks.add("metric", "h_sharp_selfadjoint",
                   operator_norm(adjoint(system, MetricKind.PSI, H) - H), limit * max(1.0, operator_norm(H)))
        checks.add("metric", "hdagger_flat_selfadjoint",
                   operator_norm(adjoint(system, MetricKind.PHI, Hdag) - Hdag), limit * max(1.0, operator_norm(H)))


def _dynamics(checks, system, rng, cond):
    tol = system.tol
    n = system.dim
    norm_H = max(1.0, operator_norm(system.H))
    limit = tol.xval_tol * cond * norm_H

    for generator in GeneratorKind:
        checks.add("dynamics", f"series_oracle_{generator.value}",
                   propagator_series_deviation(system, generator, 0.7), limit)
        group = (propagator(system, generator, 1.1)
                 - propagator(system, generator, 0.4) @ propagator(system, generator, 0.7))
        checks.add("dynamics", f"group_law_{generator.value}", np.max(np.abs(group)), limit)

    xi = random_vector(rng, n)
    conserved = {
        GeneratorKind.H: MetricKind.PSI,
        GeneratorKind.HDAGGER: MetricKind.PHI,
        GeneratorKind.H0: MetricKind.STANDARD,
    }
    for generator, kind in conserved.items():
        variation = evolve_state(system, generator, xi, AUDIT_GRID).variation(kind)
        if system.all_real:
            checks.add("dynamics", f"conservation_{generator.value}", variation, limit)
        else:
            checks.note("dynamics", f"conservation_{generator.value}", variation)

    X, Y = random_operator(rng, n), random_operator(rng, n)
    t = 0.9
    if system.all_real:
        xi_t = propagator(system, GeneratorKind.H, t) @ xi
        duality = abs(inner(system, MetricKind.PSI, xi, heisenberg(system, Picture.PSI, X, t) @ xi)
                      - inner(system, MetricKind.PSI, xi_t, X @ xi_t))
        checks.add("dynamics", "expectation_duality", duality, limit)

    for picture in (Picture.PSI, Picture.PHI, Picture.STANDARD):
        checks.add("dynamics", f"automorphism_{picture.value}",
                   automorphism_defect(system, picture, X, Y, t), limit)
    checks.note("dynamics", "automorphism_mixed", automorphism_defect(system, Picture.MIXED, X, Y, t))


def _transition(checks, system, rng):
    n = system.dim
    initial, final = random_vector(rng, n), random_vector(rng, n)
    try:
        trace = transition_trace(system, ALL_LAWS, initial, final, GeneratorKind.H, AUDIT_GRID)
    except RangeViolation as e:
        checks.add("transition", "probability_range", abs(e.value), system.tol.range_slack)
        return
    excess = max(max(float(v.max()) - 1.0, -float(v.min()), 0.0) for v in trace.values.values())
    checks.add("transition", "probability_range", excess, system.tol.range_slack)


def _thermal(checks, system, rng):
    n = system.dim
    A, B = random_operator(rng, n), random_operator(rng, n)
    for row in kms_report(system, A, B, AUDIT_TIMES, AUDIT_BETAS):
        name = f"kms_{row['state']}_t{row['t']}_beta{row['beta']}"
        checks.add("thermal", name, row["residual"], row["tolerance"])
    for kind in GeneratorKind:
        state = build_thermal(system, kind, AUDIT_BETAS[0])
        checks.add("thermal", f"normalization_{kind.value}",
                   abs(expectation(state, np.eye(n)) - 1.0), 1e-12 * max(1.0, system.condition))


def audit_system(system, rng, algebra=None):
    """
    Run every property check on a built system

    Args:
        system: BiorthogonalSystem
        rng: numpy Generator for the random vectors
        algebra: optional PseudoFermionAlgebra whose relations are added

    Returns:
        AuditReport
    """
    cond = max(1.0, system.condition)
    scale = cond * max(1.0, operator_norm(system.H))
    checks = _Checks()

    _structure(checks, system, scale)
    _adjoints(checks, system, rng, cond)
    _dynamics(checks, system, rng, cond)
    _transition(checks, system, rng)
    _thermal(checks, system, rng)

    if algebra is not None:
        for item in verify_appendix(algebra, system, system.tol).items:
            checks.add("pseudofermion", item.name, item.residual, item.tolerance)

    report = AuditReport(tuple(checks.entries), system.metadata())
    if report.all_passed:
        logger.info(f"Audit passed ({len(report.checks)} checks)")
    else:
        logger.warning(f"Audit failed: {', '.join(c.name for c in report.failed())}")
    return report
