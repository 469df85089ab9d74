"""Contract-design REST API server: optional module (pip install twincontract[server]).

Usage:
    uvicorn twincontract.server.app:app --reload

Environment variables:
    TWINCONTRACT_API_KEY          Bearer token for auth (optional; open mode if unset)
    TWINCONTRACT_SCENARIO         Default scenario file (default: the shipped default.toml)
    TWINCONTRACT_MAX_GRID_POINTS  Largest grid a request may ask for (default: 200000)
    LOG_LEVEL                     Logging level: DEBUG, INFO, WARNING (default: INFO)

Request headers:
    Authorization: Bearer <key>   required when TWINCONTRACT_API_KEY is set
    X-Request-ID: <uuid>          per-request trace ID (echoed in response)
"""

import json
import logging
import os

try:
    from dotenv import load_dotenv
    load_dotenv()
except ImportError:
    pass

try:
    from fastapi import FastAPI
except ImportError as exc:
    raise ImportError(
        "FastAPI is required for the twincontract server. "
        "Install it with: pip install twincontract[server]"
    ) from exc

from twincontract import __version__
from twincontract.experiments.scenario import Scenario, load_default_scenario, load_scenario

# ── Logging ───────────────────────────────────────────────────────────────────
# Bare format: every line is an NDJSON object.
logging.basicConfig(
    level=getattr(logging, os.getenv("LOG_LEVEL", "INFO").upper(), logging.INFO),
    format="%(message)s",
)
logger = logging.getLogger("twincontract.server")


def _load_default() -> Scenario:
    """Scenario from TWINCONTRACT_SCENARIO, or the shipped default."""
    path = os.getenv("TWINCONTRACT_SCENARIO")
    scenario = load_scenario(path) if path else load_default_scenario()
    logger.info(json.dumps({"event": "server_scenario", "name": scenario.name, "digest": scenario.digest}))
    return scenario


# ── FastAPI app ────────────────────────────────────────────────────────────────
# Import routes after dotenv is loaded so the API key is read correctly.
from twincontract.server.routes import router  # noqa: E402

app = FastAPI(
    title="Twin Migration Contract API",
    description=(
        "Designs bandwidth-reward contracts between a service provider and "
        "resource providers with private types, plus the complete-information "
        "and social-welfare benchmarks."
    ),
    version=__version__,
)
app.state.scenario = _load_default()
app.include_router(router)
