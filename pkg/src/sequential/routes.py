"""
This module contains the API route for a measurement of A followed by B.

Routes:
- get_sequential: The induced joint POVM and the error/back-action verdict.
"""

from fastapi import APIRouter

from src.bloch.service import PovmService
from src.sequential.schemas import SequentialReport
from src.sequential.service import SequentialService

sequential_router = APIRouter()
povm_service = PovmService()
sequential_service = SequentialService()


@sequential_router.get("/", response_model=SequentialReport)
async def get_sequential(theta: float, eta: float, degrees: bool = False):
    """
    Measure A with sharpness `eta` by the square-root instrument, then B.

    Args:
        theta (float): Angle between the observables.
        eta (float): Sharpness of the A measurement in [0, 1].
        degrees (bool): Interpret `theta` in degrees.

    Returns:
        SequentialReport: The induced POVM, conformance of its marginals and
            the check of E_A D_B >= sin^2(theta) when it applies.
    """

    obs = povm_service.observables_at(theta, degrees=degrees)

    return sequential_service.report(obs, eta)
