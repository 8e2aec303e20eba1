"""Exception hierarchy.

Every error carries an ``error_kind`` tag and a ``context`` dict so the CLI
can emit a structured failure document.
"""

from __future__ import annotations

from typing import Any


class SpinLabError(Exception):
    error_kind = "domain_error"

    def __init__(self, message: str, **context: Any) -> None:
        super().__init__(message)
        self.message = message
        self.context = context

    def as_dict(self) -> dict[str, Any]:
        return {"error_kind": self.error_kind, "message": self.message, "context": self.context}


class DimensionError(SpinLabError, ValueError):
    error_kind = "dimension_mismatch"


class SiteIndexError(SpinLabError, IndexError):
    error_kind = "site_out_of_range"


class ParseError(SpinLabError, ValueError):
    error_kind = "parse_error"


class SectorError(SpinLabError, ValueError):
    error_kind = "sector_violation"


class NotHermitianError(SpinLabError, ValueError):
    error_kind = "not_hermitian"


class ConvergenceError(SpinLabError, RuntimeError):
    error_kind = "no_convergence"


class SingularMomentumError(SpinLabError, ValueError):
    error_kind = "singular_momentum"


class DegenerateStateError(SpinLabError, ValueError):
    error_kind = "degenerate_state"


class LatticeError(SpinLabError, ValueError):
    error_kind = "invalid_lattice"


class PathError(SpinLabError, ValueError):
    error_kind = "invalid_path"


class StabilityError(SpinLabError, ValueError):
    error_kind = "unstable_timestep"


class ParameterError(SpinLabError, ValueError):
    error_kind = "invalid_parameters"
