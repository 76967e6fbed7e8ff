"""HTTP front-end for the analysis handlers.

Run with ``uvicorn secantkit.service:app``. Invalid inputs (bad
polynomials, unstable blocks, infinite gains where finite ones are needed)
come back as 400; numerical failures inside an analysis come back as 500.
Simulation divergence is a verdict, not an error, and returns 200 with
``summary.diverged`` set.
"""

from __future__ import annotations

from fastapi import FastAPI
from fastapi.responses import JSONResponse

from .errors import ConvergenceError
from .handlers import (
    handle_cascade,
    handle_gain,
    handle_matrix,
    handle_nyquist,
    handle_simulate,
    handle_spr,
)
from .schemas import (
    CascadeRequest,
    CascadeResponse,
    GainRequest,
    GainResponse,
    MatrixRequest,
    MatrixResponse,
    NyquistRequest,
    NyquistResponse,
    SimulateRequest,
    SimulateResponse,
    SprRequest,
    SprResponse,
)

app = FastAPI(
    title="secantkit",
    description="Passivity gains, secant-condition checks, and cascade simulation.",
)


@app.exception_handler(ValueError)
async def _input_error(request, exc):
    return JSONResponse(status_code=400, content={"detail": str(exc)})


@app.exception_handler(ConvergenceError)
async def _numerical_error(request, exc):
    return JSONResponse(status_code=500, content={"detail": str(exc)})


@app.get("/health")
def health():
    return {"status": "ok"}


@app.post("/gain", response_model=GainResponse)
def gain(req: GainRequest):
    return handle_gain(req)


@app.post("/spr", response_model=SprResponse)
def spr(req: SprRequest):
    return handle_spr(req)


@app.post("/cascade", response_model=CascadeResponse)
def cascade(req: CascadeRequest):
    return handle_cascade(req)


@app.post("/matrix", response_model=MatrixResponse)
def matrix(req: MatrixRequest):
    return handle_matrix(req)


@app.post("/simulate", response_model=SimulateResponse)
def simulate(req: SimulateRequest):
    return handle_simulate(req)


@app.post("/nyquist", response_model=NyquistResponse)
def nyquist(req: NyquistRequest):
    return handle_nyquist(req)
