"""HTTP service exposing the verification lab.

Stateless wrapper over the core package: every endpoint resolves a
catalog instance (by name or inline document), applies parameter
overrides, runs the requested computation and returns plain JSON.  The
CLI is a thin client of this app; `uvicorn susylab.service:app` serves it
standalone.

Error mapping: invalid instances/parameters give 422, computations that
are well-formed but ruled out by the physics (wrong phase, hierarchy
bound, single intersection, ...) give 409 with the exception class name.
"""

from __future__ import annotations

from typing import Any, Optional, Union

from fastapi import FastAPI, Query, Request
from fastapi.responses import JSONResponse
from pydantic import BaseModel, ConfigDict, Field

from . import __version__
from .errors import ParameterError, SusyLabError
from .errors import UnsupportedClassError
from .invariance import classify_phase, discrete_si_map
from .quadrature import hbar_sweep, verify_quantization
from .runner import (
    DEFAULT_QUANT_TOL,
    DEFAULT_RESIDUAL_TOL,
    SUITE_HBARS,
    figure_data,
    resolve_instance,
    run_suite,
    run_verify,
)
from .spectra import build_spectrum
from .superpotentials import ClassTag, catalog


class Overrides(BaseModel):
    """Parameter overrides; `lambda` is accepted under its usual name."""

    model_config = ConfigDict(populate_by_name=True)

    a: Optional[float] = None
    B: Optional[float] = None
    alpha: Optional[float] = None
    omega: Optional[float] = None
    hbar: Optional[float] = None
    lam: Optional[float] = Field(default=None, alias="lambda")

    def as_overrides(self) -> dict:
        out = {}
        for key in ("a", "B", "alpha", "omega", "hbar", "lam"):
            value = getattr(self, key)
            if value is not None:
                out[key] = value
        return out


class InstanceRequest(BaseModel):
    instance: Union[str, dict]
    overrides: Optional[Overrides] = None
    broken: bool = False

    def resolve(self):
        ov = self.overrides.as_overrides() if self.overrides else None
        return resolve_instance(self.instance, overrides=ov, broken=self.broken)


class SpectrumRequest(InstanceRequest):
    n_max: int = Field(default=9, ge=0, le=64)
    both_partners: bool = False


class QuantizationRequest(InstanceRequest):
    n: int = Field(ge=0, le=64)
    hbars: Optional[list[float]] = None


class VerifyRequest(InstanceRequest):
    n_max: int = Field(default=5, ge=0, le=32)
    hbars: Optional[list[float]] = None
    tol: float = DEFAULT_QUANT_TOL
    residual_tol: float = DEFAULT_RESIDUAL_TOL
    oracle: bool = False


class FigureDataRequest(InstanceRequest):
    samples: int = Field(default=400, ge=16, le=20000)
    x_min: Optional[float] = None
    x_max: Optional[float] = None
    n_levels: int = Field(default=5, ge=1, le=32)


class SuiteRequest(BaseModel):
    n_max: int = Field(default=7, ge=0, le=16)
    hbars: Optional[list[float]] = None
    tol: float = DEFAULT_QUANT_TOL
    residual_tol: float = DEFAULT_RESIDUAL_TOL
    skip_oracle: bool = False


def create_app() -> FastAPI:
    app = FastAPI(title="susylab", version=__version__,
                  description="SWKB/BSWKB verification lab for shape-invariant "
                              "superpotentials")

    @app.exception_handler(SusyLabError)
    async def _susylab_error(request: Request, exc: SusyLabError):
        status = 422 if isinstance(exc, ParameterError) else 409
        return JSONResponse(
            status_code=status,
            content={"error": type(exc).__name__, "detail": str(exc)},
        )

    @app.get("/health")
    def health() -> dict:
        return {"status": "ok", "version": __version__}

    @app.get("/catalog")
    def get_catalog(tag: Optional[str] = Query(default=None)) -> list[dict]:
        entries = catalog()
        if tag is not None:
            try:
                wanted = ClassTag(tag)
            except ValueError:
                raise ParameterError(
                    f"unknown tag {tag!r}; one of "
                    f"{[t.value for t in ClassTag]}")
            entries = [e for e in entries if e.tag is wanted]
        out = []
        for sp in entries:
            doc = sp.as_dict()
            doc["phase"] = classify_phase(sp).phase.value
            out.append(doc)
        return out

    @app.post("/phase")
    def post_phase(req: InstanceRequest) -> dict:
        sp = req.resolve()
        report = classify_phase(sp)
        doc: dict[str, Any] = report.as_dict()
        doc["instance"] = sp.name
        doc["params"] = sp.params.as_dict()
        try:
            doc.update(discrete_si_map(sp).as_dict())
        except UnsupportedClassError:
            doc["map"] = None
            doc["shift"] = None
        return doc

    @app.post("/spectrum")
    def post_spectrum(req: SpectrumRequest) -> dict:
        sp = req.resolve()
        result = build_spectrum(sp, req.n_max + 1)
        doc = result.as_dict()
        doc["params"] = sp.params.as_dict()
        if req.both_partners:
            doc["partners"] = _partner_table(sp, result)
        return doc

    @app.post("/quantization")
    def post_quantization(req: QuantizationRequest) -> dict:
        sp = req.resolve()
        if req.hbars:
            return {"reports": [r.as_dict() for r in hbar_sweep(sp, req.n, req.hbars)]}
        return verify_quantization(sp, req.n).as_dict()

    @app.post("/verify")
    def post_verify(req: VerifyRequest) -> dict:
        sp = req.resolve()
        outcome = run_verify(
            sp, n_max=req.n_max, hbars=tuple(req.hbars or (sp.params.hbar,)),
            tol=req.tol, residual_tol=req.residual_tol, with_oracle=req.oracle)
        return outcome.as_dict()

    @app.post("/figure-data")
    def post_figure_data(req: FigureDataRequest) -> dict:
        if not isinstance(req.instance, str) or req.instance.startswith("{"):
            raise ParameterError("figure-data works on named catalog entries")
        ov = req.overrides.as_overrides() if req.overrides else None
        files = figure_data(req.instance, samples=req.samples,
                            x_min=req.x_min, x_max=req.x_max,
                            n_levels=req.n_levels, overrides=ov)
        return {"files": files}

    @app.post("/suite")
    def post_suite(req: SuiteRequest) -> dict:
        outcome = run_suite(
            n_max=req.n_max, hbars=tuple(req.hbars or SUITE_HBARS),
            tol=req.tol, residual_tol=req.residual_tol,
            skip_oracle=req.skip_oracle)
        return outcome.as_dict()

    return app


def _partner_table(sp, result):
    """Level data for both partners: broken partners are degenerate,
    unbroken pairs shift by one index (E-_{n+1} = E+_n)."""
    minus = [{"n": lv.n, "E": lv.value} for lv in result.levels]
    if result.phase.value == "broken":
        plus = [{"n": lv.n, "E": lv.value} for lv in result.levels]
    else:
        plus = [{"n": lv.n - 1, "E": lv.value}
                for lv in result.levels if lv.n >= 1]
    return {"minus": minus, "plus": plus}


app = create_app()
