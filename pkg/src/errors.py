"""
Custom exception definitions and registration for QTradeoff error handling.

This module defines the toolkit's exceptions and sets up global exception handlers
for standardized API error responses. Each exception corresponds to a failure mode
of the measurement operations and carries everything both surfaces need: the HTTP
status code for the API, the process exit code for the CLI, and a stable
`error_code`, `message` and `resolution` for the response body.

Exit codes: 0 ok, 1 domain/constraint violation, 2 I/O or parse error.
"""

from typing import Any, Callable
from fastapi import FastAPI, status
from fastapi.exceptions import RequestValidationError
from fastapi.requests import Request
from fastapi.responses import JSONResponse


class QTradeoffException(Exception):
    """Base class for all exceptions raised by QTradeoff."""

    status_code: int = status.HTTP_422_UNPROCESSABLE_ENTITY
    exit_code: int = 1
    error_code: str = "qtradeoff_error"
    message: str = "Measurement toolkit error"
    resolution: str = "Please check the inputs"

    def __init__(self, detail: str | None = None, **context: Any):
        self.detail = detail or self.message
        self.context = context
        super().__init__(self.detail)

    def to_dict(self) -> dict[str, Any]:
        """Response body shared by the API handlers and the CLI error output."""

        return {
            "message": self.message,
            "error_code": self.error_code,
            "detail": self.detail,
            "resolution": self.resolution,
            **self.context,
        }


class ConstraintViolation(QTradeoffException):
    """A state, POVM element, POVM or channel violates one of its invariants."""

    error_code = "constraint_violation"
    message = "Constraint violated"
    resolution = "Please provide values satisfying the named constraint"

    def __init__(self, constraint: str, detail: str | None = None, **context: Any):
        self.constraint = constraint
        super().__init__(
            detail or f"constraint violated: {constraint}",
            constraint=constraint,
            **context,
        )


class NonidealConditionViolated(QTradeoffException):
    """A marginal of the joint POVM is not a smeared projective measurement."""

    error_code = "nonideal_condition_violated"
    message = "Marginal POVM does not conform to the nonideal joint-measurement condition"
    resolution = "The marginal coefficient vector must be (anti)parallel to the observable axis"

    def __init__(self, observable: str, deviation: float):
        self.observable = observable
        self.deviation = deviation
        super().__init__(
            f"marginal {observable} deviates from its axis by {deviation:.6g} rad",
            observable=observable,
            deviation=deviation,
        )


class InfeasibleMagnitudes(QTradeoffException):
    """The sampler could not find a joint POVM with the requested marginal magnitudes."""

    error_code = "infeasible_magnitudes"
    message = "No joint POVM realises the requested marginal magnitudes"
    resolution = "Please lower |x_A| or |x_B| so that |x_A + x_B| + |x_A - x_B| <= 1"


class NoInformation(QTradeoffException):
    """The marginal carries no information (accuracy 0) where estimation needs some."""

    error_code = "no_information"
    message = "Measurement carries no information about the observable"
    resolution = "Please use a POVM with a nonzero marginal coefficient vector"


class SingularInformation(QTradeoffException):
    """The Fisher information is singular because q(+) is 0 or 1."""

    error_code = "singular_information"
    message = "Fisher information is singular at this point"
    resolution = "Please evaluate at a point with 0 < q(+) < 1"


class InvalidParameter(QTradeoffException):
    """A numeric argument is outside the range the operation accepts."""

    error_code = "invalid_parameter"
    message = "Invalid parameter"
    resolution = "Please check the documented range of the parameter"


class MalformedInput(QTradeoffException):
    """The input could not be read or parsed."""

    status_code = status.HTTP_400_BAD_REQUEST
    exit_code = 2
    error_code = "malformed_input"
    message = "Malformed input"
    resolution = "Please provide a readable file in the documented JSON schema"


ALL_ERRORS: tuple[type[QTradeoffException], ...] = (
    ConstraintViolation,
    NonidealConditionViolated,
    InfeasibleMagnitudes,
    NoInformation,
    SingularInformation,
    InvalidParameter,
    MalformedInput,
)


def create_exception_handler(
    status_code: int,
) -> Callable[[Request, Exception], JSONResponse]:
    """
    Factory function to create custom exception handlers.

    Args:
        status_code (int): HTTP status code to return.

    Returns:
        Callable: An async handler function to be registered with FastAPI.
    """

    async def exception_handler(
        request: Request, exc: QTradeoffException
    ) -> JSONResponse:
        return JSONResponse(
            status_code=status_code,
            content=exc.to_dict(),
        )

    return exception_handler


def register_all_errors(app: FastAPI):
    """
    Registers all QTradeoff-specific exceptions with FastAPI's global exception handlers.

    Args:
        app (FastAPI): The FastAPI application instance.
    """

    for error_class in ALL_ERRORS:
        app.add_exception_handler(
            error_class, create_exception_handler(error_class.status_code)
        )

    async def internal_server_error_handler(
        request: Request, exc: Exception
    ) -> JSONResponse:
        """
        Handler for uncaught server-side exceptions.
        """

        return JSONResponse(
            status_code=status.HTTP_500_INTERNAL_SERVER_ERROR,
            content={
                "message": "Internal server error",
                "error_code": "internal_server_error",
                "resolution": "Please contact support for assistance",
            },
        )

    async def request_validation_handler(
        request: Request, exc: RequestValidationError
    ) -> JSONResponse:
        """
        Report request bodies the way the parsers report files: a broken
        invariant is a ConstraintViolation, anything else is MalformedInput.
        """

        errors = exc.errors()
        violated = next((e for e in errors if e.get("type") == "constraint"), None)

        if violated is not None:
            error: QTradeoffException = ConstraintViolation(
                violated.get("ctx", {}).get("constraint", "constraint"),
                detail=violated["msg"],
            )
        else:
            first = errors[0] if errors else {"loc": (), "msg": "invalid request"}
            location = ".".join(str(part) for part in first["loc"]) or "request"
            error = MalformedInput(f"{location}: {first['msg']}")

        return JSONResponse(status_code=error.status_code, content=error.to_dict())

    app.add_exception_handler(RequestValidationError, request_validation_handler)

    app.add_exception_handler(
        status.HTTP_500_INTERNAL_SERVER_ERROR, internal_server_error_handler
    )
