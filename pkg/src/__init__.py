"""
Main entry point for the QTradeoff FastAPI application.

This module initializes the FastAPI app, registers middleware and error handlers,
and includes the routers of every toolkit module (povm, channel, optimal,
simulation, sequential).

Long-running operations (frontier sweeps, fuzzing, asymptotic experiments) are
only exposed through the command line (`python -m src.cli`).
"""

from fastapi import FastAPI

from src.config import Config
from src.errors import register_all_errors
from src.logger import configure_logging
from src.middleware import register_middleware
from src.bloch.routes import povm_router
from src.channel.routes import channel_router
from src.optimal.routes import optimal_router
from src.simulation.routes import simulation_router
from src.sequential.routes import sequential_router


# API versioning and base path prefix
api_version = Config.API_VERSION
api_prefix = f"/api/{api_version}"

# OpenAPI/Swagger documentation description
api_description = """
    A REST API for the accuracy trade-off of simultaneous qubit measurements.

    This API allows users to:
    - Validate joint POVMs and check whether their marginals are smeared
      projective measurements of two observables.
    - Compute the classical channels, accuracies and errors of the marginals.
    - Check the accuracy trade-off and the error-product relation.
    - Construct the optimal joint measurement and evaluate the analytic frontier.
    - Estimate the observables' distributions from measured counts.
    - Compare with the sample-splitting strategy and with sequential measurement.

    It uses following technologies:
    - FastAPI for building the API.
    - Pydantic for data validation and pydantic-settings for configuration.
    - NumPy and SciPy for linear algebra, random sampling and optimization.
    - Rich for logging.
    - Typer for the command-line interface.
    - Pytest and Hypothesis for testing.
"""

configure_logging()

# Initialize FastAPI app
app = FastAPI(
    title="QTradeoff",
    description=api_description,
    api_version=api_version,
    license_info={"name": "MIT License", "url": "https://opensource.org/licenses/mit"},
    openapi_url=f"{api_prefix}/openapi.json",
    docs_url=f"{api_prefix}/docs",
    redoc_url=f"{api_prefix}/redoc",
)


# Register global error handlers and middleware
register_all_errors(app)

register_middleware(app)


@app.get("/")
async def hello_world():
    """
    Health check endpoint.

    Returns a simple welcome message to confirm the API is running.
    """

    return {"message": "QTradeoff says Hello World!"}


# Include all route routers with API version prefix and tag grouping
app.include_router(povm_router, prefix=f"{api_prefix}/povm", tags=["povm"])
app.include_router(channel_router, prefix=f"{api_prefix}/channel", tags=["channel"])
app.include_router(optimal_router, prefix=f"{api_prefix}/optimal", tags=["optimal"])
app.include_router(
    simulation_router, prefix=f"{api_prefix}/simulation", tags=["simulation"]
)
app.include_router(
    sequential_router, prefix=f"{api_prefix}/sequential", tags=["sequential"]
)
