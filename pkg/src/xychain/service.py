"""FastAPI service wrapping the simulation package.

Endpoints accept the same JSON config documents as the CLI (optionally naming
a preset) and return the tabulated results plus a rendered CSV, so a thin
client can write byte-identical output files.
"""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from . import __version__, runner
from .errors import ConfigError, ConsistencyError, IntegrationError
from .presets import expand_config, preset_infos
from .schemas import (ConfigDocument, RunResult, SweepResult, VerifyRequest,
                      VerifyResult)
from .verify import run_verification


def create_app() -> FastAPI:
    app = FastAPI(title="xychain", version=__version__,
                  description="Driven anisotropic XY chain: magnetization, spin "
                              "correlators and two-site concurrence.")

    @app.exception_handler(ConfigError)
    async def _config_error(request: Request, exc: ConfigError):
        return JSONResponse(status_code=400, content={"code": 1, "message": str(exc)})

    @app.exception_handler(IntegrationError)
    async def _integration_error(request: Request, exc: IntegrationError):
        return JSONResponse(status_code=500,
                            content={"code": 2, "message": str(exc), "t": exc.t})

    @app.exception_handler(ConsistencyError)
    async def _consistency_error(request: Request, exc: ConsistencyError):
        return JSONResponse(status_code=500, content={"code": 2, "message": str(exc)})

    @app.get("/health")
    def health():
        return {"status": "ok", "version": __version__}

    @app.get("/presets")
    def presets():
        return {"presets": [p.model_dump() for p in preset_infos()]}

    @app.post("/run", response_model=RunResult)
    def run(doc: ConfigDocument):
        cfg = expand_config(doc.model_dump(by_alias=True, exclude_none=False), "run")
        res = runner.run_timeseries(cfg)
        return RunResult(columns=list(res.columns), rows=res.rows(), csv=res.to_csv())

    @app.post("/sweep", response_model=SweepResult)
    def sweep(doc: ConfigDocument, threads: int = 1):
        cfg = expand_config(doc.model_dump(by_alias=True, exclude_none=False), "sweep")
        res = runner.run_sweep(cfg, threads=threads)
        return SweepResult(columns=list(res.columns), rows=res.rows, csv=res.to_csv())

    @app.post("/verify", response_model=VerifyResult)
    def verify(req: VerifyRequest):
        report = run_verification(max_n=req.max_n, threads=req.threads, t_max=req.t_max)
        return report.to_schema()

    return app


app = create_app()
