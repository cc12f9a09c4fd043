"""
Utility functions for wire encoding, time grids and state expressions
"""
import re
from dataclasses import dataclass

import numpy as np

from nhqdyn.errors import IndexOutOfRange, ValidationError

_TERM = re.compile(
    r"\s*(?P<sign>[+-])?\s*"
    r"(?:(?P<coef>\([^()]*\)|\d+(?:\.\d*)?(?:[eE][+-]?\d+)?[ij]?|\.\d+(?:[eE][+-]?\d+)?[ij]?)\s*\*?\s*)?"
    r"(?P<symbol>phi|psi|e)(?P<index>\d+)\s*"
)


def complex_to_wire(z):
    """Encode a complex number as [re, im]"""
    z = complex(z)
    return [z.real, z.imag]


def complex_from_wire(value, field):
    """
    Decode a real number or an [re, im] pair

    Raises:
        ValidationError: anything else
    """
    if isinstance(value, bool):
        raise ValidationError("Expected a number or [re, im] pair", field=field)
    if isinstance(value, (int, float)):
        return complex(float(value), 0.0)
    if (isinstance(value, list) and len(value) == 2
            and all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in value)):
        return complex(float(value[0]), float(value[1]))
    raise ValidationError("Expected a number or [re, im] pair", field=field)


def matrix_to_wire(M):
    """Row arrays of [re, im] pairs"""
    return [[complex_to_wire(z) for z in row] for row in np.asarray(M)]


def matrix_from_wire(rows, field):
    """
    Decode a square matrix given as row arrays

    Returns:
        Tuple of tuples of complex
    """
    if not isinstance(rows, list) or not rows:
        raise ValidationError("Matrix must be a non-empty list of rows", field=field)
    n = len(rows)
    decoded = []
    for i, row in enumerate(rows):
        if not isinstance(row, list) or len(row) != n:
            raise ValidationError(f"Row {i} must have {n} entries", field=f"{field}[{i}]")
        decoded.append(tuple(complex_from_wire(v, f"{field}[{i}][{j}]") for j, v in enumerate(row)))
    return tuple(decoded)


def parse_grid(text, field="grid"):
    """
    Expand 'start:stop:steps' to steps + 1 inclusive samples

    Args:
        text: Grid sugar string
        field: Field path for error reports

    Returns:
        Tuple of floats
    """
    parts = str(text).split(":")
    if len(parts) != 3:
        raise ValidationError(f"Grid must look like start:stop:steps, got '{text}'", field=field)
    try:
        start, stop = float(parts[0]), float(parts[1])
        steps = int(parts[2])
    except ValueError:
        raise ValidationError(f"Grid must look like start:stop:steps, got '{text}'", field=field)
    return grid_from_range(start, stop, steps, field)


def grid_from_range(start, stop, steps, field="grid"):
    if steps < 1 or not np.isfinite(start) or not np.isfinite(stop) or stop <= start:
        raise ValidationError("Grid needs finite start < stop and steps >= 1", field=field)
    return tuple(float(t) for t in np.linspace(start, stop, steps + 1))


def check_grid(values, field="grid"):
    """Validate an explicit time grid (finite, strictly increasing)"""
    try:
        grid = tuple(float(t) for t in values)
    except (TypeError, ValueError):
        raise ValidationError("Grid entries must be numbers", field=field)
    if not grid:
        raise ValidationError("Grid must not be empty", field=field)
    if not all(np.isfinite(grid)):
        raise ValidationError("Grid entries must be finite", field=field)
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ValidationError("Grid must be strictly increasing", field=field)
    return grid


def _coefficient(text, field):
    if text is None:
        return 1.0 + 0.0j
    raw = text.strip("()").replace(" ", "").replace("i", "j")
    try:
        return complex(raw)
    except ValueError:
        raise ValidationError(f"Bad coefficient '{text}'", field=field)


@dataclass(frozen=True)
class StateExpression:
    """Linear combination of basis symbols such as '2*phi0 - (0.5+1i)*psi1'"""
    text: str
    terms: tuple

    def resolve(self, system):
        """
        Evaluate against a built system's bases

        Raises:
            IndexOutOfRange: a basis index beyond the system dimension
        """
        bases = {"phi": system.phi, "psi": system.psi, "e": system.e}
        vector = np.zeros(system.dim, dtype=np.complex128)
        for coefficient, symbol, index in self.terms:
            if index >= system.dim:
                raise IndexOutOfRange(f"{symbol}{index} is outside 0..{system.dim - 1}")
            vector = vector + coefficient * bases[symbol][:, index]
        return vector


def parse_state(text, field="state", dim=None):
    """
    Parse a state expression over phiN, psiN and eN

    Args:
        text: Expression string
        field: Field path for error reports
        dim: Optional dimension for index checks

    Returns:
        StateExpression
    """
    if not isinstance(text, str) or not text.strip():
        raise ValidationError("State expression must be a non-empty string", field=field)
    terms = []
    pos = 0
    while pos < len(text):
        match = _TERM.match(text, pos)
        if match is None or match.end() == pos:
            raise ValidationError(f"Cannot parse state expression near '{text[pos:]}'", field=field)
        if terms and match.group("sign") is None:
            raise ValidationError("Terms must be separated by + or -", field=field)
        coefficient = _coefficient(match.group("coef"), field)
        if match.group("sign") == "-":
            coefficient = -coefficient
        index = int(match.group("index"))
        if dim is not None and index >= dim:
            raise ValidationError(f"Index {index} exceeds dimension {dim}", field=field)
        terms.append((coefficient, match.group("symbol"), index))
        pos = match.end()
    return StateExpression(text, tuple(terms))
