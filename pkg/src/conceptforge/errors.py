"""Shared error hierarchy.

Every failure the engine can raise carries a stable machine-readable
``code``, the pipeline ``stage`` it came from, and a structured ``detail``
payload, so the CLI and the HTTP service can surface identical,
inspectable errors without free-text parsing.
"""

from __future__ import annotations

from typing import Any


class ForgeError(Exception):
    """Base class for all engine errors.

    Attributes:
        code: stable machine-readable token, e.g. ``cycle-rejected``.
        stage: pipeline stage that raised it (``store``, ``parse``,
            ``resolve``, ``expand``, ``harmonize``, ``emit``, ``evaluate``,
            ``cluster``, ``harvest``).
        detail: structured payload whose shape is fixed per code.
    """

    code = "error"
    stage = "engine"

    def __init__(self, message: str, *, stage: str | None = None, **detail: Any):
        super().__init__(message)
        self.message = message
        self.detail = detail
        if stage is not None:
            # instance override: the same failure kind can surface from
            # different pipeline stages (e.g. unknown id during resolve)
            self.stage = stage

    def to_payload(self) -> dict[str, Any]:
        return {
            "stage": self.stage,
            "code": self.code,
            "message": self.message,
            "detail": self.detail,
        }


# ---------------------------------------------------------------------------
# concept store

class DuplicateIdError(ForgeError):
    code = "duplicate-id"
    stage = "store"


class SnippetParseError(ForgeError):
    code = "snippet-parse"
    stage = "store"


class BrokenPartReferenceError(ForgeError):
    code = "broken-part-reference"
    stage = "store"


class AggregationCycleError(ForgeError):
    code = "aggregation-cycle"
    stage = "store"


class UnknownIdError(ForgeError):
    code = "unknown-id"
    stage = "store"


class CycleRejectedError(ForgeError):
    code = "cycle-rejected"
    stage = "store"


class DuplicateEdgeError(ForgeError):
    code = "duplicate-edge"
    stage = "store"


class FormatError(ForgeError):
    code = "format-error"
    stage = "store"


class IoError(ForgeError):
    code = "io-error"
    stage = "store"


class InvariantViolationError(ForgeError):
    code = "invariant-violation"
    stage = "store"


# ---------------------------------------------------------------------------
# minilang

class MiniParseError(ForgeError):
    code = "parse-error"
    stage = "parse"


class MiniRuntimeError(ForgeError):
    code = "runtime-error"
    stage = "evaluate"


class StepLimitExceededError(ForgeError):
    code = "step-limit-exceeded"
    stage = "evaluate"


# ---------------------------------------------------------------------------
# pdg / clustering

class RoundsMismatchError(ForgeError):
    code = "rounds-mismatch"
    stage = "cluster"


class ThresholdOutOfRangeError(ForgeError):
    code = "threshold-out-of-range"
    stage = "cluster"


# ---------------------------------------------------------------------------
# synthesis

class NoImplementationError(ForgeError):
    code = "no-implementation"
    stage = "resolve"


class ExpansionDepthExceededError(ForgeError):
    code = "expansion-depth-exceeded"
    stage = "expand"


class UnboundInputError(ForgeError):
    code = "unbound-input"
    stage = "harmonize"


class AmbiguousBindingError(ForgeError):
    code = "ambiguous-binding"
    stage = "harmonize"


class BackendUnsupportedConstructError(ForgeError):
    code = "backend-unsupported-construct"
    stage = "emit"


# ---------------------------------------------------------------------------
# harvester

class EmptyQueryError(ForgeError):
    code = "empty-query"
    stage = "harvest"


class ProviderUnreachableError(ForgeError):
    code = "provider-unreachable"
    stage = "harvest"


class RateLimitedError(ForgeError):
    code = "rate-limited"
    stage = "harvest"


class AuthMissingError(ForgeError):
    code = "auth-missing"
    stage = "harvest"


class FetchFailedError(ForgeError):
    code = "fetch-failed"
    stage = "harvest"
