"""
This module contains the API routes for the optimal joint measurement.

Routes:
- get_optimal: The equality-achieving POVM for the canonical pair at angle theta.
- get_boundary: The analytic frontier value of X_B at a given X_A.
"""

from fastapi import APIRouter

from src.bloch.service import PovmService
from src.optimal.schemas import BoundaryPoint, OptimalReport
from src.optimal.service import OptimalService

optimal_router = APIRouter()
povm_service = PovmService()
optimal_service = OptimalService()


@optimal_router.get("/", response_model=OptimalReport)
async def get_optimal(theta: float, degrees: bool = False):
    """
    Construct the optimal joint POVM for observables at angle `theta`.

    Args:
        theta (float): Angle between the observables, in radians unless `degrees`.
        degrees (bool): Interpret `theta` in degrees.

    Returns:
        OptimalReport: The POVM, its accuracies and the closed-form value.
    """

    return optimal_service.optimal(povm_service.observables_at(theta, degrees=degrees))


@optimal_router.get("/boundary", response_model=BoundaryPoint)
async def get_boundary(theta: float, x_a: float, degrees: bool = False):
    obs = povm_service.observables_at(theta, degrees=degrees)

    return optimal_service.boundary(obs.theta, x_a)
