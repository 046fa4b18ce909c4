"""HTTP/JSON service: dataset access, stateful exploration sessions, analytics."""
from __future__ import annotations

import threading
import uuid
from collections import Counter
from dataclasses import dataclass, field

import numpy as np
from fastapi import FastAPI, Request
from fastapi.encoders import jsonable_encoder
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from .analytics import AnalyticsError, nonoverlap_heatmap, quantile_histogram
from .dataset import Dataset, NormalizedDataset, WBC_PRIORITY, normalize
from .hyperblock import (HyperBlock, GeometryError, envelope,
                         hypercube_from_seed, impurity)
from .hyperclassifier import ClassifierError, HyperModel, classify_batch
from .linguistic import LinguisticError, describe
from .mhyper import HBModel, MHyperConfig, discover


class ApiError(Exception):
    """Error surfaced to clients as {code, message, detail}."""

    def __init__(self, status: int, code: str, message: str, detail=None):
        super().__init__(message)
        self.status = status
        self.code = code
        self.message = message
        self.detail = detail


class SeedRequest(BaseModel):
    pointId: int
    distance: float = 0.2


class DiscoverRequest(BaseModel):
    threshold: float = 0.0
    mode: str = "envelope-M1"


class MergeRequest(BaseModel):
    blockIds: list[int]


class CoordinatesRequest(BaseModel):
    mask: list[bool]


class ViewRequest(BaseModel):
    frequencyWidths: bool | None = None
    quantileQ: int | None = None
    sideBySide: list[int] | None = None


class ClassifyRequest(BaseModel):
    model_config = {"protected_namespaces": ()}

    model: dict
    points: list[list[float]]
    units: str = "normalized"


@dataclass
class Session:
    """One analyst's exploration state; mutations hold `lock`."""

    session_id: str
    fingerprint: str
    active_coordinates: list[bool]
    blocks: list[tuple[int, HyperBlock]] = field(default_factory=list)
    refused: list[tuple[int, HyperBlock]] = field(default_factory=list)
    seeds: list[dict] = field(default_factory=list)
    next_id: int = 0
    view_settings: dict = field(default_factory=lambda: {
        "frequencyWidths": False, "quantileQ": 4, "sideBySide": []})
    lock: threading.Lock = field(default_factory=threading.Lock)

    def take_id(self) -> int:
        bid = self.next_id
        self.next_id += 1
        return bid

    def find_block(self, block_id: int) -> HyperBlock:
        for bid, hb in self.blocks:
            if bid == block_id:
                return hb
        raise ApiError(404, "block_not_found", f"no block with id {block_id}")


def _block_json(bid: int, hb: HyperBlock) -> dict:
    out = hb.to_json()
    out.update({"id": bid, "memberCount": hb.member_count,
                "impurity": impurity(hb), "kind": hb.kind})
    return out


def _session_json(s: Session) -> dict:
    return {
        "sessionId": s.session_id,
        "datasetFingerprint": s.fingerprint,
        "activeCoordinates": list(s.active_coordinates),
        "blocks": [_block_json(bid, hb) for bid, hb in s.blocks],
        "refused": [_block_json(bid, hb) for bid, hb in s.refused],
        "seeds": list(s.seeds),
        "viewSettings": dict(s.view_settings),
    }


def _segment_frequencies(d: Dataset) -> list[dict]:
    """Counts of identical raw value pairs on each adjacent coordinate pair."""
    out = []
    for i in range(d.dimension - 1):
        pairs = Counter(zip(d.values[:, i].tolist(), d.values[:, i + 1].tolist()))
        segments = [{"values": [a, b], "count": n}
                    for (a, b), n in sorted(pairs.items())]
        out.append({"pair": [i, i + 1], "segments": segments})
    return out


def _class_priority(d: Dataset) -> tuple[str, ...]:
    if set(d.class_labels) == set(WBC_PRIORITY):
        return tuple(WBC_PRIORITY)
    return tuple(d.class_labels)


def create_app(dataset: Dataset) -> FastAPI:
    """Build the service around one loaded dataset."""
    nd: NormalizedDataset = normalize(dataset)
    app = FastAPI(title="hyperblocks", version="1.0")
    sessions: dict[str, Session] = {}
    registry_lock = threading.Lock()
    dataset_payload = {
        "coordinates": list(dataset.coordinate_names),
        "classLabels": list(dataset.class_labels),
        "classPriority": list(_class_priority(dataset)),
        "classCounts": dataset.class_counts(),
        "size": dataset.size,
        "droppedRows": dataset.dropped_rows,
        "fingerprint": dataset.fingerprint(),
        "points": [{"id": int(dataset.ids[i]),
                    "values": nd.values[i].tolist(),
                    "raw": dataset.values[i].tolist(),
                    "label": dataset.labels[i]}
                   for i in range(dataset.size)],
        "rawMin": nd.raw_min.tolist(),
        "rawMax": nd.raw_max.tolist(),
        "segmentFrequencies": _segment_frequencies(dataset),
    }

    @app.exception_handler(ApiError)
    async def on_api_error(request: Request, exc: ApiError):
        return JSONResponse(status_code=exc.status,
                            content={"code": exc.code, "message": exc.message,
                                     "detail": jsonable_encoder(exc.detail)})

    @app.exception_handler(RequestValidationError)
    async def on_validation_error(request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=422,
                            content={"code": "validation_error",
                                     "message": "request validation failed",
                                     "detail": jsonable_encoder(exc.errors())})

    @app.exception_handler(GeometryError)
    @app.exception_handler(ClassifierError)
    @app.exception_handler(AnalyticsError)
    @app.exception_handler(LinguisticError)
    async def on_domain_error(request: Request, exc: Exception):
        return JSONResponse(status_code=422,
                            content={"code": "domain_error", "message": str(exc),
                                     "detail": None})

    def get_session(session_id: str) -> Session:
        with registry_lock:
            s = sessions.get(session_id)
        if s is None:
            raise ApiError(404, "session_not_found", f"no session {session_id}")
        return s

    @app.get("/api/v1/dataset")
    def api_dataset():
        return dataset_payload

    @app.post("/api/v1/session", status_code=201)
    def api_create_session():
        s = Session(session_id=uuid.uuid4().hex,
                    fingerprint=dataset.fingerprint(),
                    active_coordinates=[True] * dataset.dimension)
        with registry_lock:
            sessions[s.session_id] = s
        return _session_json(s)

    @app.get("/api/v1/session/{session_id}")
    def api_get_session(session_id: str):
        return _session_json(get_session(session_id))

    @app.delete("/api/v1/session/{session_id}", status_code=204)
    def api_delete_session(session_id: str):
        with registry_lock:
            if sessions.pop(session_id, None) is None:
                raise ApiError(404, "session_not_found", f"no session {session_id}")

    @app.post("/api/v1/session/{session_id}/seed")
    def api_seed(session_id: str, body: SeedRequest):
        s = get_session(session_id)
        if not 0 <= body.pointId < dataset.size:
            raise ApiError(422, "invalid_point", f"no point {body.pointId}")
        if body.distance <= 0:
            raise ApiError(422, "invalid_distance", "distance must be positive")
        cube = hypercube_from_seed(nd.values[body.pointId], 2 * body.distance, nd)
        with s.lock:
            bid = s.take_id()
            s.blocks.append((bid, cube))
            s.seeds.append({"blockId": bid, "pointId": body.pointId,
                            "distance": body.distance})
        return {"block": _block_json(bid, cube), "memberCount": cube.member_count}

    @app.post("/api/v1/session/{session_id}/discover")
    def api_discover(session_id: str, body: DiscoverRequest):
        s = get_session(session_id)
        if not 0 <= body.threshold < 1:
            raise ApiError(422, "invalid_threshold", "threshold must be in [0, 1)")
        model = discover(nd, MHyperConfig(impurity_threshold=body.threshold,
                                          combine_mode=body.mode))
        with s.lock:
            s.blocks = [(s.take_id(), hb) for hb in model.blocks]
            s.refused = [(s.take_id(), hb) for hb in model.refused]
        return _session_json(s)

    @app.post("/api/v1/session/{session_id}/merge")
    def api_merge(session_id: str, body: MergeRequest):
        s = get_session(session_id)
        if len(set(body.blockIds)) < 2:
            raise ApiError(422, "invalid_merge", "need at least two distinct blocks")
        wanted = set(body.blockIds)
        with s.lock:
            chosen = [(bid, s.find_block(bid)) for bid in body.blockIds]
            merged = chosen[0][1]
            for _, hb in chosen[1:]:
                merged = envelope(merged, hb, nd)
            keep = [(bid, hb) for bid, hb in s.blocks if bid not in wanted]
            new_id = s.take_id()
            s.blocks = keep + [(new_id, merged)]
            s.seeds = [e for e in s.seeds if e["blockId"] not in wanted]
        return {"block": _block_json(new_id, merged)}

    @app.post("/api/v1/session/{session_id}/coordinates")
    def api_coordinates(session_id: str, body: CoordinatesRequest):
        s = get_session(session_id)
        if len(body.mask) != dataset.dimension:
            raise ApiError(422, "invalid_mask",
                           f"mask must have {dataset.dimension} entries")
        if not any(body.mask):
            raise ApiError(422, "invalid_mask",
                           "at least one coordinate must stay active")
        with s.lock:
            s.active_coordinates = list(body.mask)
        return _session_json(s)

    @app.post("/api/v1/session/{session_id}/view")
    def api_view(session_id: str, body: ViewRequest):
        s = get_session(session_id)
        with s.lock:
            if body.frequencyWidths is not None:
                s.view_settings["frequencyWidths"] = body.frequencyWidths
            if body.quantileQ is not None:
                if body.quantileQ < 1:
                    raise ApiError(422, "invalid_q", "quantileQ must be >= 1")
                s.view_settings["quantileQ"] = body.quantileQ
            if body.sideBySide is not None:
                for bid in body.sideBySide:
                    s.find_block(bid)
                s.view_settings["sideBySide"] = list(body.sideBySide)
        return _session_json(s)

    @app.get("/api/v1/session/{session_id}/blocks")
    def api_blocks(session_id: str):
        s = get_session(session_id)
        with s.lock:
            return {"blocks": [_block_json(bid, hb) for bid, hb in s.blocks],
                    "refused": [_block_json(bid, hb) for bid, hb in s.refused],
                    "seeds": list(s.seeds)}

    @app.get("/api/v1/session/{session_id}/heatmap")
    def api_heatmap(session_id: str):
        s = get_session(session_id)
        with s.lock:
            blocks = [hb for _, hb in s.blocks]
        if len(blocks) < 2:
            raise ApiError(409, "insufficient_blocks",
                           "heatmap needs at least two blocks")
        report = nonoverlap_heatmap(blocks)
        return {"heatmap": report.to_json(),
                "coordinates": list(dataset.coordinate_names),
                "argmaxCoordinate": dataset.coordinate_names[report.argmax]}

    @app.get("/api/v1/session/{session_id}/linguistic")
    def api_linguistic(session_id: str, target: str = "all",
                       block: int | None = None, threshold: float = 0.75):
        s = get_session(session_id)
        descriptions = []
        if target == "all":
            descriptions.append(describe(nd.values, nd.coordinate_names,
                                         threshold, subject="all data"))
        elif target == "class":
            for label in nd.class_labels:
                rows = [i for i, lab in enumerate(nd.labels) if lab == label]
                descriptions.append(describe(nd.values[rows], nd.coordinate_names,
                                             threshold, subject=f"class {label}"))
        elif target == "block":
            if block is None:
                raise ApiError(422, "missing_block", "target=block needs ?block=")
            with s.lock:
                hb = s.find_block(block)
            if not hb.member_ids:
                raise ApiError(422, "empty_block", "block has no members")
            rows = list(hb.member_ids)
            descriptions.append(describe(nd.values[rows], nd.coordinate_names,
                                         threshold, subject=f"block {block}"))
        else:
            raise ApiError(422, "invalid_target",
                           "target must be one of block, class, all")
        return {"descriptions": [desc.to_json() for desc in descriptions]}

    @app.get("/api/v1/session/{session_id}/quantiles")
    def api_quantiles(session_id: str, block: int, coord: int, q: int = 4):
        s = get_session(session_id)
        with s.lock:
            hb = s.find_block(block)
        if not 0 <= coord < dataset.dimension:
            raise ApiError(422, "invalid_coordinate", f"no coordinate {coord}")
        report = quantile_histogram(hb, nd, coord, q)
        return {"blockId": block, "coordinate": dataset.coordinate_names[coord],
                "quantiles": report.to_json()}

    @app.post("/api/v1/classify")
    def api_classify(body: ClassifyRequest):
        if body.units not in ("normalized", "raw"):
            raise ApiError(422, "invalid_units", "units must be normalized or raw")
        if not body.points:
            raise ApiError(422, "empty_points", "no points to classify")
        obj = body.model
        if "hbModel" in obj:
            model = HyperModel.from_json(obj)
        else:
            model = HyperModel(hb_model=HBModel.from_json(obj.get("model", obj)),
                               class_priority=_class_priority(dataset))
        points = np.asarray(body.points, dtype=float)
        if points.ndim != 2 or points.shape[1] != dataset.dimension:
            raise ApiError(422, "invalid_points",
                           f"points must be rows of {dataset.dimension} values")
        if body.units == "raw":
            span = np.where(nd.raw_max - nd.raw_min == 0, 1.0,
                            nd.raw_max - nd.raw_min)
            points = (points - nd.raw_min) / span
        results = classify_batch(points, model, nd)
        payload = []
        for i, c in enumerate(results):
            top = c.evidence[0] if c.evidence else None
            payload.append({"id": i, "outcome": c.outcome,
                            "ruleFired": c.rule_fired,
                            "topBlockId": top[0] if top else None,
                            "distance": top[1] if top else None})
        return {"classifications": payload}

    @app.get("/api/v1/session/{session_id}/export")
    def api_export(session_id: str):
        s = get_session(session_id)
        with s.lock:
            snapshot = _session_json(s)
        snapshot["dataset"] = {"fingerprint": dataset.fingerprint(),
                               "size": dataset.size,
                               "classCounts": dataset.class_counts()}
        return snapshot

    return app
