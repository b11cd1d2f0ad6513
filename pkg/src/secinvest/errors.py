"""Exception types shared across the engine.

Validation problems are collected into structured ``Violation`` records so
callers (CLI, HTTP service, UI) can report every problem at once instead of
failing on the first.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Violation:
    """One structural or attribute problem found while validating a graph."""

    code: str
    message: str
    where: str = ""

    def as_dict(self) -> dict:
        return {"code": self.code, "message": self.message, "where": self.where}


class SecinvestError(Exception):
    """Base class for all engine errors."""

    code = "Error"


class GraphValidationError(SecinvestError):
    """Raised when a raw graph description violates the attack-graph invariants."""

    code = "ValidationFailed"

    def __init__(self, violations: list[Violation]):
        self.violations = list(violations)
        summary = "; ".join(f"{v.code}({v.where}): {v.message}" for v in self.violations)
        super().__init__(f"invalid attack graph: {summary}")


class UnknownNode(SecinvestError):
    code = "UnknownNode"


class PathExplosion(SecinvestError):
    """Source-to-target path count exceeds the configured cap."""

    code = "PathExplosion"

    def __init__(self, count: int, cap: int):
        self.count = count
        self.cap = cap
        super().__init__(
            f"{count} source-to-target paths exceed the cap of {cap}; "
            "reduce the graph first"
        )


class NonConvergence(SecinvestError):
    """Solver stopped at its iteration limit with gap above tolerance."""

    code = "NonConvergence"

    def __init__(self, gap: float, tol: float, iterations: int):
        self.gap = gap
        self.tol = tol
        self.iterations = iterations
        super().__init__(
            f"solver reached {iterations} iterations with relative gap "
            f"{gap:.3e} > tol {tol:.3e}"
        )


class TooManyInvestableNodes(SecinvestError):
    code = "TooManyInvestableNodes"


class NotDecomposable(SecinvestError):
    """Graph is not fully reducible by the series/parallel/input calculus."""

    code = "NotDecomposable"


class DegenerateKappa(SecinvestError):
    """Series reduction attempted on a pair with equal sensitivities."""

    code = "DegenerateKappa"


class DegenerateDenominator(SecinvestError):
    """Closed form would divide by zero (kappa product at the degenerate point)."""

    code = "DegenerateDenominator"


class UnequalInputLosses(SecinvestError):
    """Input-node reduction requires equal stand-alone losses on all inputs."""

    code = "UnequalInputLosses"


class InfeasibleBackmap(SecinvestError):
    """Back-mapping produced a negative root share: the budget was not sufficient."""

    code = "InfeasibleBackmap"


class InvalidAnchor(SecinvestError):
    """Intervention anchor is missing or inconsistent with the intervention kind."""

    code = "InvalidAnchor"


class RegimeViolation(SecinvestError):
    """Closed-form loss requested outside the formula's validity regime."""

    code = "RegimeViolation"

    def __init__(self, condition: str):
        self.condition = condition
        super().__init__(f"closed form not valid: {condition}")


class DocumentError(SecinvestError):
    """Malformed graph/game/spec document."""

    code = "SyntaxError"

    def __init__(self, message: str, location: str = ""):
        self.location = location
        super().__init__(message if not location else f"{location}: {message}")
