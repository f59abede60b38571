from fastapi import FastAPI, status
from fastapi.middleware.cors import CORSMiddleware
from fastapi.exceptions import RequestValidationError
from starlette.exceptions import HTTPException as StarletteHTTPException
import logging
from datetime import datetime

from app.config import settings
from app.api import certificates, designs, responses, sweeps
from app.errors import (
    FilterDesignError,
    filter_design_exception_handler,
    http_exception_handler,
    validation_exception_handler,
)

VERSION = "1.0.0"
DESCRIPTION = "Minimax nonlinear-phase FIR filter design with optimality certificates"

# Configure logging
logging.basicConfig(
    level=getattr(logging, settings.LOG_LEVEL, logging.INFO),
    format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
)

# Create FastAPI app
app = FastAPI(
    title=settings.PROJECT_NAME,
    description=DESCRIPTION,
    version=VERSION,
    openapi_url=f"{settings.API_V1_PREFIX}/openapi.json",
    docs_url=f"{settings.API_V1_PREFIX}/docs",
    redoc_url=f"{settings.API_V1_PREFIX}/redoc",
)

# Set up CORS
app.add_middleware(
    CORSMiddleware,
    allow_origins=["*"],
    allow_methods=["*"],
    allow_headers=["*"],
)

# Add exception handlers
app.add_exception_handler(StarletteHTTPException, http_exception_handler)
app.add_exception_handler(RequestValidationError, validation_exception_handler)
app.add_exception_handler(FilterDesignError, filter_design_exception_handler)

# Include routers
app.include_router(designs.router, prefix=f"{settings.API_V1_PREFIX}/designs", tags=["Designs"])
app.include_router(certificates.router, prefix=f"{settings.API_V1_PREFIX}/certificates", tags=["Certificates"])
app.include_router(responses.router, prefix=f"{settings.API_V1_PREFIX}/responses", tags=["Frequency Response"])
app.include_router(sweeps.router, prefix=f"{settings.API_V1_PREFIX}/sweeps", tags=["Weight Sweeps"])

@app.get("/")
def read_root():
    """Root endpoint with API information"""
    return {
        "status_code": status.HTTP_200_OK,
        "status": True,
        "message": "Welcome to the Minimax FIR Design Service",
        "data": {
            "name": settings.PROJECT_NAME,
            "description": DESCRIPTION,
            "version": VERSION,
            "documentation": f"{settings.API_V1_PREFIX}/docs"
        }
    }

@app.get("/health")
def health_check():
    """Health check endpoint"""
    return {
        "status_code": status.HTTP_200_OK,
        "status": True,
        "message": "Service is healthy",
        "data": {
            "service": settings.PROJECT_NAME,
            "version": VERSION,
            "timestamp": datetime.now().isoformat(),
            "limits": {
                "root_order_limit": settings.ROOT_ORDER_LIMIT,
                "grid_density": settings.GRID_DENSITY,
            }
        }
    }
