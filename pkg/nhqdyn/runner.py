"""
Experiment runner: builds the model of a spec and produces every output file
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from nhqdyn.audit import audit_system, random_operator
from nhqdyn.cache import get_or_build_sds, get_or_build_system
from nhqdyn.dynamics import GeneratorKind, evolve_state
from nhqdyn.errors import ParseError
from nhqdyn.metric import MetricKind
from nhqdyn.output import write_json, write_trace_csv
from nhqdyn.pseudofermion import build_pf, pf_hamiltonian, vacuum_first
from nhqdyn.spec import parse_spec, spec_to_dict
from nhqdyn.thermal import kms_report, mixed_kms_report, partition_function
from nhqdyn.transition import Scenario, discrimination_report, transition_trace
from nhqdyn.utils import complex_to_wire, parse_state

logger = logging.getLogger(__name__)

DEFAULT_BETAS = (1.0,)
DEFAULT_KMS_TIMES = (0.3, 1.7)


@dataclass(frozen=True, eq=False)
class BuiltModel:
    system: object
    algebra: object = None
    sds: object = None


class Runner:
    """Runs spec documents against one configuration and tolerance table"""

    def __init__(self, cfg, tolerances):
        self.config = cfg
        self.tolerances = tolerances
        self.workers = max(1, int(cfg.WORKERS))
        self.out_dir = cfg.OUT_DIR

    def load(self, path):
        """Read and parse a spec file"""
        try:
            text = Path(path).read_text(encoding="utf-8")
        except UnicodeDecodeError as e:
            raise ParseError(f"Spec is not UTF-8: {e.reason}", path=str(path))
        return parse_spec(text, str(path))

    def tolerance_table(self, spec):
        return spec.tolerance_table(self.tolerances)

    def output_dir(self, spec):
        return Path(spec.outputs.dir or self.out_dir)

    def build(self, spec):
        """
        Build the model described by a spec

        Returns:
            BuiltModel with the system and, for sds/pf models, the algebra
        """
        tol = self.tolerance_table(spec)
        model = spec.model
        if model.kind == "sds":
            sds = get_or_build_sds(model.g, model.k, spec.normalization, tol)
            return BuiltModel(sds.system, sds.algebra, sds)
        if model.kind == "pf":
            algebra = build_pf(np.array(model.a), np.array(model.b), spec.normalization, tol)
            H = pf_hamiltonian(algebra, model.omega, model.shift)
            system = vacuum_first(get_or_build_system(H, spec.normalization, tol), algebra.a)
            return BuiltModel(system, algebra)
        system = get_or_build_system(np.array(model.matrix), spec.normalization, tol)
        return BuiltModel(system)

    def scenarios(self, spec, system):
        """Scenario objects with state expressions resolved against the system"""
        return [
            Scenario(
                name=s.name,
                initial=parse_state(s.initial).resolve(system),
                final=parse_state(s.final).resolve(system),
                times=np.array(s.grid),
                generator=s.generator,
            )
            for s in spec.scenarios
        ]

    def _map(self, fn, items):
        if self.workers > 1 and len(items) > 1:
            with ThreadPoolExecutor(max_workers=self.workers) as pool:
                return list(pool.map(fn, items))
        return [fn(item) for item in items]

    def write_system(self, spec, built):
        system = built.system
        data = {
            "model": spec_to_dict(spec)["model"],
            "metadata": system.metadata(),
            "eigenvalues": [complex_to_wire(E) for E in system.eigenvalues],
            "diagnostics": system.diagnostics(),
            "tolerances": system.tol.to_dict(),
        }
        if built.sds is not None:
            data["sds"] = built.sds.to_dict()
        return [write_json(self.output_dir(spec) / "system.json", data)]

    def audit(self, spec, built):
        """Run the invariant audit and write audit.json"""
        rng = np.random.default_rng(spec.seed)
        report = audit_system(built.system, rng, built.algebra)
        paths = []
        if "json" in spec.outputs.formats:
            paths.append(write_json(self.output_dir(spec) / "audit.json", report.to_dict()))
        return report, paths

    def evolve(self, spec, built):
        """Norm traces of every scenario's initial state, one CSV each"""
        system = built.system
        scenarios = self.scenarios(spec, system)

        def evolve_one(scenario):
            trace = evolve_state(system, scenario.generator, scenario.initial, scenario.times)
            columns = {f"norm_{kind.value}": trace.norms[kind] for kind in MetricKind}
            return scenario.name, trace, columns

        results = self._map(evolve_one, scenarios)
        paths = []
        if "csv" in spec.outputs.formats:
            for name, trace, columns in results:
                paths.append(write_trace_csv(self.output_dir(spec) / f"evolve_{name}.csv", trace.times, columns))
        return paths

    def transit(self, spec, built):
        """Transition traces per scenario for the requested laws"""
        system = built.system
        scenarios = self.scenarios(spec, system)

        def transit_one(scenario):
            return scenario.name, transition_trace(system, spec.laws, scenario.initial, scenario.final,
                                                   scenario.generator, scenario.times)

        results = self._map(transit_one, scenarios)
        paths = []
        if "csv" in spec.outputs.formats:
            for name, trace in results:
                columns = {law.value: trace.values[law] for law in spec.laws}
                paths.append(write_trace_csv(self.output_dir(spec) / f"transit_{name}.csv", trace.times, columns))
        return paths

    def discriminate(self, spec, built):
        system = built.system
        report = discrimination_report(
            system, self.scenarios(spec, system), spec.laws,
            include_hdagger=spec.include_hdagger, workers=self.workers,
        )
        data = report.to_dict()
        data["system"] = system.metadata()
        paths = []
        if "json" in spec.outputs.formats:
            paths.append(write_json(self.output_dir(spec) / "discrimination.json", data))
        return report, paths

    def thermal(self, spec, built, betas=None, times=None):
        """
        Partition functions and KMS residual tables

        Args:
            betas: Inverse temperatures overriding the spec's thermal block
            times: Real times overriding the spec's thermal block
        """
        system = built.system
        if betas is None:
            betas = spec.thermal.betas if spec.thermal else DEFAULT_BETAS
        if times is None:
            times = spec.thermal.times if spec.thermal else DEFAULT_KMS_TIMES

        rng = np.random.default_rng(spec.seed)
        A, B = random_operator(rng, system.dim), random_operator(rng, system.dim)
        matched = kms_report(system, A, B, times, betas)
        mixed = [row for beta in betas for t in times for row in mixed_kms_report(system, A, B, t, beta)]
        data = {
            "partition_functions": [
                {"state": kind.value, "beta": float(beta),
                 "Z": complex_to_wire(partition_function(system, kind, beta))}
                for kind in GeneratorKind for beta in betas
            ],
            "kms": matched,
            "mixed_kms": mixed,
            "all_passed": all(row["passed"] for row in matched),
        }
        paths = []
        if "json" in spec.outputs.formats:
            paths.append(write_json(self.output_dir(spec) / "thermal.json", data))
        return data, paths

    def run(self, spec):
        """
        Execute a whole spec: system, audit, traces, discrimination and thermal

        Returns:
            Tuple (summary dict, list of written paths)
        """
        built = self.build(spec)
        paths = self.write_system(spec, built)
        audit, audit_paths = self.audit(spec, built)
        paths += audit_paths
        paths += self.evolve(spec, built)
        paths += self.transit(spec, built)
        report, report_paths = self.discriminate(spec, built)
        paths += report_paths
        thermal, thermal_paths = self.thermal(spec, built)
        paths += thermal_paths
        summary = {
            "audit_passed": audit.all_passed,
            "kms_passed": thermal["all_passed"],
            "warnings": list(report.warnings),
            "files": [str(p) for p in paths],
        }
        logger.info(f"Run finished: {len(paths)} file(s)")
        return summary, paths
