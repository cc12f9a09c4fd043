"""
Exception hierarchy shared by every nhqdyn module
"""


class NhqdynError(Exception):
    """Base exception for nhqdyn computation errors"""
    error_type = "computation_error"
    exit_code = 1

    def payload(self):
        """Extra fields for the machine-readable error envelope"""
        return {}


class DimMismatch(NhqdynError):
    """Raised when operand dimensions do not agree"""
    error_type = "dim_mismatch"

    def __init__(self, message, expected=None, actual=None):
        super().__init__(message)
        self.expected = expected
        self.actual = actual

    def payload(self):
        return {"expected": self.expected, "actual": self.actual}


class NonConvergence(NhqdynError):
    """Raised when an eigensolver fails or leaves large residuals"""
    error_type = "non_convergence"


class DegenerateSpectrum(NhqdynError):
    """Raised when two eigenvalues are closer than the gap tolerance"""
    error_type = "degenerate_spectrum"

    def __init__(self, message, min_gap=0.0):
        super().__init__(message)
        self.min_gap = min_gap

    def payload(self):
        return {"min_gap": self.min_gap}


class NotHermitian(NhqdynError):
    """Raised when a Hermitian input is required"""
    error_type = "not_hermitian"

    def __init__(self, message, residual=0.0):
        super().__init__(message)
        self.residual = residual

    def payload(self):
        return {"residual": self.residual}


class NotPositive(NhqdynError):
    """Raised when a positive definite input is required"""
    error_type = "not_positive"


class Overflow(NhqdynError):
    """Raised when a matrix exponential would overflow"""
    error_type = "overflow"


class IllConditioned(NhqdynError):
    """Raised when cond(S_phi) exceeds the configured limit and raising is enabled"""
    error_type = "ill_conditioned"

    def __init__(self, message, condition=0.0):
        super().__init__(message)
        self.condition = condition

    def payload(self):
        return {"condition": self.condition}


class PairingAmbiguous(NhqdynError):
    """Raised when an H eigenvector cannot be paired with a unique H-dagger eigenvector"""
    error_type = "pairing_ambiguous"


class NormalizationError(NhqdynError):
    """Raised when a normalization policy cannot be applied"""
    error_type = "normalization_error"


class NegativeNorm(NhqdynError):
    """Raised when a squared norm comes out negative (broken metric positivity)"""
    error_type = "negative_norm"


class ZeroVector(NhqdynError):
    """Raised when a probability is requested for a zero vector"""
    error_type = "zero_vector"


class RangeViolation(NhqdynError):
    """Raised when a probability leaves [0, 1] beyond rounding slack"""
    error_type = "range_violation"

    def __init__(self, message, value=0.0):
        super().__init__(message)
        self.value = value

    def payload(self):
        return {"value": self.value}


class IndexOutOfRange(NhqdynError):
    """Raised when a basis index is outside 0..dim-1"""
    error_type = "index_out_of_range"


class SpectrumNotReal(NhqdynError):
    """Raised when an operation requires an all-real spectrum"""
    error_type = "spectrum_not_real"


class NotPseudoFermionic(NhqdynError):
    """Raised when (a, b) violate the pseudo-fermion anticommutators"""
    error_type = "not_pseudo_fermionic"

    def __init__(self, message, residual=0.0):
        super().__init__(message)
        self.residual = residual

    def payload(self):
        return {"residual": self.residual}


class KernelNotOneDimensional(NhqdynError):
    """Raised when a vacuum kernel is not a line"""
    error_type = "kernel_not_one_dimensional"


class ParameterOutOfRange(NhqdynError):
    """Raised when a model parameter is outside its admissible range"""
    error_type = "parameter_out_of_range"

    def __init__(self, message, field=None):
        super().__init__(message)
        self.field = field

    def payload(self):
        return {"field": self.field}


class SpecError(NhqdynError):
    """Base exception for experiment spec problems (usage errors)"""
    error_type = "spec_error"
    exit_code = 2


class ParseError(SpecError):
    """Raised when the spec document cannot be parsed"""
    error_type = "parse_error"

    def __init__(self, message, path="", line=None):
        super().__init__(message)
        self.path = path
        self.line = line

    def payload(self):
        return {"path": self.path, "line": self.line}


class ValidationError(SpecError):
    """Raised when a parsed spec field is invalid"""
    error_type = "validation_error"

    def __init__(self, message, field=""):
        super().__init__(message)
        self.field = field

    def payload(self):
        return {"field": self.field}


class InvalidMatrix(NhqdynError):
    """Raised when an operand is not a finite square matrix or vector"""
    error_type = "invalid_matrix"


class AuditFailed(NhqdynError):
    """Raised when a verification run finds failing checks"""
    error_type = "audit_failed"

    def __init__(self, message, failed=()):
        super().__init__(message)
        self.failed = list(failed)

    def payload(self):
        return {"failed": self.failed}
