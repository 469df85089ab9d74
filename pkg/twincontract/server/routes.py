"""Contract-design API endpoint handlers."""

import json
import logging
import os
import time
import uuid
from datetime import datetime, timezone
from typing import Optional

from fastapi import APIRouter, Depends, HTTPException, Request, Response, status
from fastapi.security import HTTPAuthorizationCredentials, HTTPBearer

from twincontract.core.errors import InfeasibleBandwidthError, NoAdmissibleBandwidthError
from twincontract.experiments.harness import run_feasibility_matrix, run_mechanism, sweep_data_size
from twincontract.experiments.scenario import BITS_PER_MB, Scenario, ScenarioFile
from twincontract.server.models import (
    ContractItemOut,
    DesignRequest,
    DesignResponse,
    FeasibilityRequest,
    FeasibilityResponse,
    SweepRequest,
    SweepResponse,
    SweepRowOut,
)

logger = logging.getLogger("twincontract.server")
_MAX_GRID_POINTS = int(os.getenv("TWINCONTRACT_MAX_GRID_POINTS", "200000"))
router = APIRouter()


# ── Auth ───────────────────────────────────────────────────────────────────────
_API_KEY = os.getenv("TWINCONTRACT_API_KEY")
_bearer = HTTPBearer(auto_error=False)


def _check_auth(credentials: Optional[HTTPAuthorizationCredentials] = Depends(_bearer)) -> None:
    """Contract endpoints need the bearer key once TWINCONTRACT_API_KEY is configured."""
    if not _API_KEY:
        return
    if credentials is None or credentials.credentials != _API_KEY:
        raise HTTPException(
            status_code=status.HTTP_401_UNAUTHORIZED,
            detail="Invalid or missing API key",
            headers={"WWW-Authenticate": "Bearer"},
        )


# ── Helpers ────────────────────────────────────────────────────────────────────
def _request_id(request: Request, response: Response) -> str:
    request_id = request.headers.get("X-Request-ID") or str(uuid.uuid4())
    response.headers["X-Request-ID"] = request_id
    return request_id


def _resolve(request: Request, source: Optional[ScenarioFile]) -> Scenario:
    if source is None:
        return request.app.state.scenario
    try:
        scenario = source.resolve()
    except ValueError as exc:
        raise HTTPException(
            status_code=status.HTTP_422_UNPROCESSABLE_ENTITY,
            detail={"error": "Invalid scenario", "reason": str(exc)},
        ) from exc
    if scenario.grid.size > _MAX_GRID_POINTS:
        raise HTTPException(
            status_code=status.HTTP_422_UNPROCESSABLE_ENTITY,
            detail={"error": f"grid has {scenario.grid.size} points, server limit is {_MAX_GRID_POINTS}"},
        )
    return scenario


def _infeasible(request_id: str, endpoint: str, exc: Exception) -> HTTPException:
    logger.warning(json.dumps({
        "ts": datetime.now(timezone.utc).isoformat(),
        "event": "request_failed",
        "request_id": request_id,
        "endpoint": endpoint,
        "error": str(exc),
    }))
    return HTTPException(
        status_code=status.HTTP_422_UNPROCESSABLE_ENTITY,
        detail={"error": "No admissible bandwidth", "reason": str(exc)},
    )


def _log_request(request_id: str, endpoint: str, scenario: Scenario, t0: float, **extra) -> None:
    logger.info(json.dumps({
        "ts": datetime.now(timezone.utc).isoformat(),
        "request_id": request_id,
        "endpoint": endpoint,
        "scenario": scenario.digest,
        "wall_ms": int((time.monotonic() - t0) * 1000),
        **extra,
    }))


# ── Endpoints ──────────────────────────────────────────────────────────────────
@router.get("/health")
def health(request: Request):
    """Health check. No auth required."""
    scenario: Scenario = request.app.state.scenario
    return {
        "status": "ok",
        "auth": bool(_API_KEY),
        "scenario": {"name": scenario.name, "digest": scenario.digest, "types": scenario.spectrum.size},
    }


@router.get("/v1/scenarios/default")
def default_scenario(request: Request, _=Depends(_check_auth)):
    """The server's default scenario in request-body form."""
    return request.app.state.scenario.source.model_dump(mode="json")


@router.post("/v1/contracts/design", response_model=DesignResponse)
def design(req: DesignRequest, request: Request, response: Response, _=Depends(_check_auth)):
    """Design the contract of one mechanism."""
    t0 = time.monotonic()
    request_id = _request_id(request, response)
    scenario = _resolve(request, req.scenario)
    params = scenario.params
    if req.data_size_mb is not None:
        params = scenario.with_data_bits(req.data_size_mb * BITS_PER_MB)

    try:
        outcome = run_mechanism(req.mechanism, scenario.grid, scenario.spectrum, params)
    except (NoAdmissibleBandwidthError, InfeasibleBandwidthError) as exc:
        raise _infeasible(request_id, "design", exc) from exc

    _log_request(request_id, "design", scenario, t0, mechanism=req.mechanism, msp_utility=outcome.msp_utility)
    return DesignResponse(
        scenario_digest=scenario.digest,
        mechanism=req.mechanism,
        data_bits=params.task.data_bits,
        items=[
            ContractItemOut(
                type_index=n,
                theta=t.theta,
                probability=t.probability,
                bandwidth_hz=item.bandwidth_hz,
                reward=item.reward,
                mrp_utility=u,
            )
            for n, (t, item, u) in enumerate(
                zip(scenario.spectrum.types, outcome.contract, outcome.mrp_utilities), start=1
            )
        ],
        msp_utility=outcome.msp_utility,
        mrp_sum_utility=outcome.mrp_sum_utility,
        welfare=outcome.welfare,
        raw_bandwidths=outcome.raw_bandwidths,
        bunches=[list(b) for b in outcome.bunches],
    )


@router.post("/v1/contracts/feasibility", response_model=FeasibilityResponse)
def feasibility(req: FeasibilityRequest, request: Request, response: Response, _=Depends(_check_auth)):
    """Utility of every type under every item of the asymmetric-information contract."""
    t0 = time.monotonic()
    request_id = _request_id(request, response)
    scenario = _resolve(request, req.scenario)
    data_bits = None if req.data_size_mb is None else req.data_size_mb * BITS_PER_MB

    try:
        matrix = run_feasibility_matrix(scenario, data_bits)
    except (NoAdmissibleBandwidthError, InfeasibleBandwidthError) as exc:
        raise _infeasible(request_id, "feasibility", exc) from exc

    _log_request(request_id, "feasibility", scenario, t0, feasible=matrix.passed)
    return FeasibilityResponse(
        scenario_digest=scenario.digest,
        utilities=matrix.utilities.tolist(),
        ir_satisfied=matrix.ir_ok,
        ic_satisfied=matrix.ic_ok,
        feasible=matrix.passed,
    )


@router.post("/v1/sweeps", response_model=SweepResponse)
def sweep(req: SweepRequest, request: Request, response: Response, _=Depends(_check_auth)):
    """Data-size sweep. Points without an admissible bandwidth come back as failed rows."""
    t0 = time.monotonic()
    request_id = _request_id(request, response)
    scenario = _resolve(request, req.scenario)
    data_bits = None if req.data_sizes_mb is None else [mb * BITS_PER_MB for mb in req.data_sizes_mb]

    rows = sweep_data_size(scenario, req.mechanisms, data_bits)

    _log_request(request_id, "sweep", scenario, t0, rows=len(rows))
    return SweepResponse(
        scenario_digest=scenario.digest,
        rows=[
            SweepRowOut(
                mechanism=row.mechanism,
                data_bits=row.data_bits,
                bandwidths=row.bandwidths,
                rewards=row.rewards,
                msp_utility=row.msp_utility,
                mrp_sum_utility=row.mrp_sum_utility,
                status=row.status,
            )
            for row in rows
        ],
    )
