"""
Numerical tolerance table
"""
from dataclasses import dataclass, fields, replace

from nhqdyn.errors import ValidationError


@dataclass(frozen=True)
class Tolerances:
    """Every threshold used by the kernel, overridable from config or a spec"""
    eig_tol: float = 1e-10
    herm_tol: float = 1e-10
    gap_tol: float = 1e-8
    psd_floor: float = 1e-12
    bi_tol: float = 1e-9
    real_tol: float = 1e-8
    match_tol: float = 1e-7
    cond_limit: float = 1e8
    sa_tol: float = 1e-9
    xval_tol: float = 1e-9
    zero_tol: float = 1e-14
    range_slack: float = 1e-12
    discrim_threshold: float = 1e-6
    kms_tol: float = 1e-8
    pf_tol: float = 1e-10
    max_dim: int = 64
    ill_conditioned_action: str = "warn"

    @classmethod
    def from_config(cls, cfg):
        """
        Build a table from a config class (see config.py)

        Args:
            cfg: Config class or object with upper-case attributes

        Returns:
            Tolerances instance
        """
        values = {}
        for f in fields(cls):
            attr = f.name.upper()
            if hasattr(cfg, attr):
                values[f.name] = getattr(cfg, attr)
        return cls(**values)

    def with_overrides(self, overrides):
        """
        Return a copy with the given entries replaced

        Args:
            overrides: Mapping of field name to value

        Raises:
            ValidationError: Unknown key or non-numeric value
        """
        if not overrides:
            return self
        known = {f.name: f.type for f in fields(self)}
        cleaned = {}
        for key, value in overrides.items():
            if key not in known:
                raise ValidationError(f"Unknown tolerance '{key}'", field=f"tolerances.{key}")
            if key == "ill_conditioned_action":
                if value not in ("warn", "raise"):
                    raise ValidationError(
                        "ill_conditioned_action must be 'warn' or 'raise'",
                        field=f"tolerances.{key}"
                    )
                cleaned[key] = value
                continue
            try:
                cleaned[key] = int(value) if key == "max_dim" else float(value)
            except (TypeError, ValueError):
                raise ValidationError(f"Tolerance '{key}' must be numeric", field=f"tolerances.{key}")
            if cleaned[key] <= 0:
                raise ValidationError(f"Tolerance '{key}' must be positive", field=f"tolerances.{key}")
        return replace(self, **cleaned)

    def to_dict(self):
        return {f.name: getattr(self, f.name) for f in fields(self)}


DEFAULT_TOLERANCES = Tolerances()
