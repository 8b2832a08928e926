"""
This module defines and registers global middleware for the FastAPI backend.

Middlewares included:
- Request logging through the `qtradeoff.api` logger.
- CORS configuration to allow all origins and headers.
- TrustedHostMiddleware to allow requests from specific hosts.
"""


import time
import logging
from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.middleware.trustedhost import TrustedHostMiddleware

from src.logger import get_logger

# Disable default Uvicorn access logs; requests are logged below
logging.getLogger("uvicorn.access").disabled = True

logger = get_logger("api")


def register_middleware(app: FastAPI):
    """
    Registers all necessary middleware components to the given FastAPI app.

    Args:
        app (FastAPI): The FastAPI application instance.
    """

    @app.middleware("http")
    async def custom_logging(request: Request, call_next):
        """
        Logs client, method, path, status code and processing time of each request.

        Args:
            request (Request): The incoming HTTP request.
            call_next (Callable): The next middleware or route handler in the chain.

        Returns:
            Response: The final HTTP response after request handling.
        """

        start_time = time.perf_counter()
        response = await call_next(request)
        processing_time = time.perf_counter() - start_time

        client = f"{request.client.host}:{request.client.port}" if request.client else "-"
        logger.info(
            "QTRADEOFF API LOGGER: %s - %s - %s - %d completed after %.6fs",
            client,
            request.method,
            request.url.path,
            response.status_code,
            processing_time,
        )

        return response

    # Enable Cross-Origin Resource Sharing (CORS)
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
        allow_credentials=True,
    )

    # Allow only requests from these trusted hostnames
    app.add_middleware(
        TrustedHostMiddleware,
        allowed_hosts=[
            "localhost",
            "127.0.0.1",
            "0.0.0.0",
            "testserver",  # FastAPI TestClient
        ],
    )
