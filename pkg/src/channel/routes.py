"""
This module contains the API routes for the channel view of a joint POVM.

Routes:
- povm_accuracy: Channels, accuracies and trade-off verdicts of a joint POVM.
- accuracy_tradeoff: Trade-off verdicts and domain of a given accuracy pair.
"""

from fastapi import APIRouter

from src.bloch.schemas import PovmRequest
from src.bloch.service import PovmService
from src.channel.schemas import AccuracyPair, AccuracyReport
from src.channel.service import ChannelService
from src.optimal.schemas import TradeoffReport
from src.optimal.service import OptimalService

channel_router = APIRouter()
povm_service = PovmService()
channel_service = ChannelService()
optimal_service = OptimalService()


@channel_router.post("/accuracy", response_model=AccuracyReport)
async def povm_accuracy(request: PovmRequest):
    """
    Build the channels of both marginals and check the trade-off relations.

    Raises:
        ConstraintViolation: If the POVM breaks one of its invariants.
        NonidealConditionViolated: If a marginal is not a smeared projective measurement.
    """

    povm = povm_service.load_povm(request.povm)

    return channel_service.accuracy(povm, request.observables)


@channel_router.post("/tradeoff", response_model=TradeoffReport)
async def accuracy_tradeoff(pair: AccuracyPair):
    return optimal_service.tradeoff(pair)
