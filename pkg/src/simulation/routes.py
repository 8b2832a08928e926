"""
This module contains the API routes for estimation from measured counts and
for the sample-splitting baseline.

Routes:
- estimate_from_counts: Maximum-likelihood estimates of p_A(+) and p_B(+).
- split: Accuracies of measuring A and B on separate parts of the sample.
"""

from fastapi import APIRouter

from src.bloch.service import PovmService
from src.simulation.schemas import EstimateRequest, EstimationReport, SplitReport
from src.simulation.service import SimulationService

simulation_router = APIRouter()
povm_service = PovmService()
simulation_service = SimulationService()


@simulation_router.post("/estimate", response_model=EstimationReport)
async def estimate_from_counts(request: EstimateRequest):
    """
    Estimate both observables' distributions from the counts of one run.

    Raises:
        NonidealConditionViolated: If a marginal is not a smeared projective measurement.
        NoInformation: If a marginal has accuracy 0.
    """

    povm = povm_service.load_povm(request.povm)

    return simulation_service.estimate(povm, request.observables, request.counts)


@simulation_router.get("/split", response_model=SplitReport)
async def split(
    theta: float,
    xi: float,
    sub_accuracy_a: float = 1.0,
    sub_accuracy_b: float = 1.0,
    degrees: bool = False,
):
    obs = povm_service.observables_at(theta, degrees=degrees)

    return simulation_service.split(obs, xi, sub_accuracy_a, sub_accuracy_b)
