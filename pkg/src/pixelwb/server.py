"""HTTP API for the estimation pipeline and the illusion generator.

Stateless per request: uploads are processed in memory and rendered
artifacts (field / corrected PNGs) land in a per-request temp directory
that a TTL sweep reclaims.  JSON bodies use lower-camel-case keys.
"""

from __future__ import annotations

import json
import os
import shutil
import tempfile
import time
import uuid

import cv2
import numpy as np
from fastapi import FastAPI, File, Form, Query, Request, UploadFile
from fastapi.responses import FileResponse, JSONResponse, Response
from fastapi.staticfiles import StaticFiles

from . import illusions, pipeline
from .errors import PixelwbError
from .estimators import list_algorithms
from .imagecore import check_image, save_image, srgb_decode

DEFAULT_MAX_SIDE = 4096
DEFAULT_TTL_SECONDS = 600.0


class ApiError(Exception):
    def __init__(self, status: int, message: str):
        super().__init__(message)
        self.status = status
        self.message = message


class ArtifactStore:
    """Per-request artifact directories swept after a TTL."""

    def __init__(self, root: str | None = None, ttl: float = DEFAULT_TTL_SECONDS):
        self.root = root or tempfile.mkdtemp(prefix="pixelwb-artifacts-")
        self.ttl = ttl
        os.makedirs(self.root, exist_ok=True)

    def new_request_dir(self) -> tuple[str, str]:
        rid = uuid.uuid4().hex
        path = os.path.join(self.root, rid)
        os.makedirs(path)
        return rid, path

    def resolve(self, rid: str, name: str) -> str:
        # reject traversal: both components must stay inside the store
        path = os.path.realpath(os.path.join(self.root, rid, name))
        if not path.startswith(os.path.realpath(self.root) + os.sep):
            raise ApiError(400, "bad artifact path")
        return path

    def sweep(self, now: float | None = None) -> int:
        now = time.time() if now is None else now
        removed = 0
        for rid in os.listdir(self.root):
            path = os.path.join(self.root, rid)
            try:
                if now - os.path.getmtime(path) > self.ttl:
                    shutil.rmtree(path, ignore_errors=True)
                    removed += 1
            except OSError:
                continue
        return removed


def _decode_upload(data: bytes, transfer: str, max_side: int) -> np.ndarray:
    buf = np.frombuffer(data, dtype=np.uint8)
    raw = cv2.imdecode(buf, cv2.IMREAD_UNCHANGED)
    if raw is None:
        raise ApiError(400, "could not decode image; PNG expected")
    if raw.shape[0] > max_side or raw.shape[1] > max_side:
        raise ApiError(413, f"image exceeds the {max_side}x{max_side} limit")
    if raw.dtype == np.uint8:
        img = raw.astype(np.float64) / 255.0
    elif raw.dtype == np.uint16:
        img = raw.astype(np.float64) / 65535.0
    else:
        img = raw.astype(np.float64)
    if img.ndim == 2:
        img = np.repeat(img[:, :, None], 3, axis=2)
    elif img.shape[2] == 4:
        img = img[:, :, :3]
    img = img[:, :, ::-1].copy()  # cv2 decodes BGR
    if transfer == "srgb":
        img = srgb_decode(img)
    return check_image(img)


def _parse_params(text: str | None) -> tuple[pipeline.PipelineParams, str]:
    doc = {}
    if text:
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ApiError(400, f"params is not valid JSON: {exc}")
        if not isinstance(doc, dict):
            raise ApiError(400, "params must be a JSON object")
    known = {"beta", "sigma", "estimator", "confidence", "transfer"}
    unknown = set(doc) - known
    if unknown:
        raise ApiError(400, f"unknown params keys: {', '.join(sorted(unknown))}")
    transfer = doc.get("transfer", "linear")
    if transfer not in ("linear", "srgb"):
        raise ApiError(400, "transfer must be 'linear' or 'srgb'")
    try:
        params = pipeline.PipelineParams(
            beta=int(doc.get("beta", 8)),
            sigma=float(doc.get("sigma", 24.0)),
            estimator=str(doc.get("estimator", "gray-world")),
            confidence=str(doc.get("confidence", "off")),
        )
    except (PixelwbError, TypeError, ValueError) as exc:
        raise ApiError(400, str(exc))
    return params, transfer


def _parse_spec(doc) -> illusions.IllusionSpec:
    if not isinstance(doc, dict):
        raise ApiError(400, "spec must be a JSON object")
    try:
        return illusions.IllusionSpec.from_dict(doc)
    except PixelwbError as exc:
        raise ApiError(400, str(exc))


def _png_bytes(img: np.ndarray, depth: int = 16) -> bytes:
    scale, dtype = (65535.0, np.uint16) if depth == 16 else (255.0, np.uint8)
    raw = np.round(np.clip(img, 0.0, 1.0) * scale).astype(dtype)
    ok, buf = cv2.imencode(".png", raw[:, :, ::-1])
    if not ok:
        raise ApiError(500, "PNG encoding failed")
    return buf.tobytes()


def create_app(static_dir: str | None = None, max_side: int = DEFAULT_MAX_SIDE,
               artifact_root: str | None = None,
               ttl: float = DEFAULT_TTL_SECONDS) -> FastAPI:
    app = FastAPI(title="pixelwb")
    store = ArtifactStore(root=artifact_root, ttl=ttl)
    app.state.artifacts = store

    @app.exception_handler(ApiError)
    async def _api_error(request: Request, exc: ApiError):
        return JSONResponse(status_code=exc.status, content={"error": exc.message})

    @app.exception_handler(PixelwbError)
    async def _domain_error(request: Request, exc: PixelwbError):
        return JSONResponse(status_code=400, content={"error": str(exc)})

    @app.get("/api/algorithms")
    def algorithms():
        return {"algorithms": list_algorithms()}

    @app.post("/api/estimate")
    def estimate(image: UploadFile = File(...), params: str | None = Form(None)):
        store.sweep()
        t0 = time.monotonic()
        pp, transfer = _parse_params(params)
        img = _decode_upload(image.file.read(), transfer, max_side)
        t_load = time.monotonic()
        result = pipeline.run_pipeline(img, pp)
        t_run = time.monotonic()
        corrected = np.clip(pipeline.apply_correction(img, result.field), 0.0, 1.0)
        rid, outdir = store.new_request_dir()
        save_image(result.field, os.path.join(outdir, "field.png"),
                   transfer="linear", depth=16)
        save_image(corrected, os.path.join(outdir, "corrected.png"),
                   transfer=transfer, depth=16)
        t_done = time.monotonic()
        return {
            "globalEstimate": [float(c) for c in result.global_est],
            "params": pp.to_dict(),
            "flags": {
                "degenerateBlocks": result.degenerate_blocks,
                "flaggedPixels": result.flagged_pixels,
                "whitenessDegenerate": result.whiteness_degenerate,
            },
            "timings": {
                "loadSeconds": t_load - t0,
                "pipelineSeconds": t_run - t_load,
                "totalSeconds": t_done - t0,
            },
            "fieldUrl": f"/artifacts/{rid}/field.png",
            "correctedUrl": f"/artifacts/{rid}/corrected.png",
        }

    @app.get("/api/illusion")
    def illusion(spec: str = Query(...), view: str = Query("stimulus")):
        try:
            doc = json.loads(spec)
        except json.JSONDecodeError as exc:
            raise ApiError(400, f"spec is not valid JSON: {exc}")
        ispec = _parse_spec(doc)
        if max(ispec.width, ispec.height) > max_side:
            raise ApiError(413, f"canvas exceeds the {max_side}x{max_side} limit")
        if view not in ("stimulus", "target-only"):
            raise ApiError(400, "view must be 'stimulus' or 'target-only'")
        stim = illusions.generate_illusion(ispec)
        img = illusions.extract_target(stim) if view == "target-only" else stim.image
        return Response(content=_png_bytes(img), media_type="image/png")

    @app.post("/api/illusion/process")
    def illusion_process(body: dict):
        store.sweep()
        if not isinstance(body, dict):
            raise ApiError(400, "body must be a JSON object")
        unknown = set(body) - {"spec", "params"}
        if unknown:
            raise ApiError(400, f"unknown body keys: {', '.join(sorted(unknown))}")
        ispec = _parse_spec(body.get("spec"))
        if max(ispec.width, ispec.height) > max_side:
            raise ApiError(413, f"canvas exceeds the {max_side}x{max_side} limit")
        pp, _ = _parse_params(json.dumps(body.get("params", {})))
        stim = illusions.generate_illusion(ispec)
        result = pipeline.run_pipeline(stim.image, pp)
        corrected = np.clip(pipeline.apply_correction(stim.image, result.field), 0.0, 1.0)
        shifts = illusions.assimilation_shift(stim, corrected)
        rid, outdir = store.new_request_dir()
        save_image(stim.image, os.path.join(outdir, "stimulus.png"),
                   transfer="linear", depth=16)
        save_image(corrected, os.path.join(outdir, "output.png"),
                   transfer="linear", depth=16)
        save_image(result.field, os.path.join(outdir, "field.png"),
                   transfer="linear", depth=16)
        save_image(illusions.extract_target(stim),
                   os.path.join(outdir, "target_before.png"),
                   transfer="linear", depth=16)
        after = illusions.IllusionStimulus(corrected, stim.target_mask,
                                           stim.inducer_mask, stim.spec)
        save_image(illusions.extract_target(after),
                   os.path.join(outdir, "target_after.png"),
                   transfer="linear", depth=16)
        return {
            "params": pp.to_dict(),
            "globalEstimate": [float(c) for c in result.global_est],
            "regions": [s.to_dict() for s in shifts],
            "meanDeltaDeg": float(np.mean([s.delta_deg for s in shifts])),
            "stimulusUrl": f"/artifacts/{rid}/stimulus.png",
            "outputUrl": f"/artifacts/{rid}/output.png",
            "fieldUrl": f"/artifacts/{rid}/field.png",
            "targetBeforeUrl": f"/artifacts/{rid}/target_before.png",
            "targetAfterUrl": f"/artifacts/{rid}/target_after.png",
        }

    @app.get("/artifacts/{rid}/{name}")
    def artifact(rid: str, name: str):
        path = store.resolve(rid, name)
        if not os.path.isfile(path):
            raise ApiError(404, "artifact expired or unknown")
        return FileResponse(path, media_type="image/png")

    if static_dir:
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")

    return app
