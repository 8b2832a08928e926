"""
This module contains the API routes for validating joint POVMs and computing
outcome probabilities.

Routes:
- validate_povm: Check a joint POVM's invariants and the nonideal condition.
- povm_probabilities: Joint and marginal outcome probabilities on a state.
"""

from fastapi import APIRouter

from src.bloch.schemas import PovmRequest, ProbabilityReport, ProbabilityRequest
from src.bloch.service import PovmService
from src.channel.schemas import ValidationReport
from src.channel.service import ChannelService

povm_router = APIRouter()
povm_service = PovmService()
channel_service = ChannelService()


@povm_router.post("/validate", response_model=ValidationReport)
async def validate_povm(request: PovmRequest):
    """
    Validate a joint POVM against a pair of observables.

    Args:
        request (PovmRequest): The POVM document and the observables.

    Returns:
        ValidationReport: Conformance of both marginals.

    Raises:
        ConstraintViolation: If the POVM breaks one of its invariants.
    """

    povm = povm_service.load_povm(request.povm)

    return channel_service.validate(povm, request.observables)


@povm_router.post("/probabilities", response_model=ProbabilityReport)
async def povm_probabilities(request: ProbabilityRequest):
    return povm_service.probabilities(request)
