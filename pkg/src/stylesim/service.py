"""HTTP scoring service over the designer-loop engine.

All endpoints are thin serializers around library calls; no math happens
here, so a response is a pure function of (loaded artifacts, request). The
engine snapshot is swapped atomically by /admin/reload; requests read the
reference once, so none observes a half-loaded state.

Error responses always carry {"error": <kind>, "detail": <message>}.
"""

from __future__ import annotations

import logging
import threading

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, Response
from starlette.exceptions import HTTPException as StarletteHTTPException

from .catalog import STYLE_ATTRIBUTES, Style
from .designer_loop import EngineConfig, EngineState, load_engine, score_design
from .graph_io import FORMATS, export_graph_string
from .retrieval import top_k
from .simgraph import most_connected

log = logging.getLogger(__name__)

_MEDIA_TYPES = {
    "graphml": "application/xml",
    "gexf": "application/xml",
    "edge-csv": "text/csv",
}


class ApiError(Exception):
    def __init__(self, status: int, error: str, detail: str):
        super().__init__(detail)
        self.status = status
        self.error = error
        self.detail = detail


def _bad_request(detail: str) -> ApiError:
    return ApiError(400, "invalid_request", detail)


def _not_found(detail: str) -> ApiError:
    return ApiError(404, "not_found", detail)


def _neighbor_payload(engine: EngineState, sku: str, k: int) -> dict:
    ranked = top_k(engine.store, sku, k, scope="products")
    return {
        "sku": sku,
        "k": k,
        "truncated": ranked.truncated,
        "neighbors": [
            {
                "sku": neighbor_sku,
                "group": engine.catalog.get(neighbor_sku).group,
                "distance": dist,
            }
            for neighbor_sku, dist in ranked.entries
        ],
    }


def _parse_k(raw, default: int) -> int:
    if raw is None:
        return default
    try:
        k = int(raw)
    except (TypeError, ValueError):
        raise _bad_request(f"k must be an integer, got {raw!r}") from None
    if k < 1:
        raise _bad_request(f"k must be >= 1, got {k}")
    return k


def create_app(engine: EngineState) -> FastAPI:
    app = FastAPI(title="style similarity service", docs_url=None, redoc_url=None)
    app.state.engine = engine
    app.state.reload_lock = threading.Lock()

    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.exception_handler(ApiError)
    async def handle_api_error(_request: Request, exc: ApiError) -> JSONResponse:
        return JSONResponse(
            status_code=exc.status, content={"error": exc.error, "detail": exc.detail}
        )

    @app.exception_handler(StarletteHTTPException)
    async def handle_http_error(_request: Request, exc: StarletteHTTPException) -> JSONResponse:
        kind = {404: "not_found", 405: "method_not_allowed"}.get(exc.status_code, "error")
        return JSONResponse(
            status_code=exc.status_code, content={"error": kind, "detail": str(exc.detail)}
        )

    @app.exception_handler(RequestValidationError)
    async def handle_validation_error(
        _request: Request, exc: RequestValidationError
    ) -> JSONResponse:
        return JSONResponse(
            status_code=400, content={"error": "invalid_request", "detail": str(exc.errors())}
        )

    @app.exception_handler(Exception)
    async def handle_internal_error(_request: Request, exc: Exception) -> JSONResponse:
        log.exception("unhandled service error")
        return JSONResponse(
            status_code=500, content={"error": "internal", "detail": str(exc)}
        )

    @app.get("/health")
    async def health() -> dict:
        engine: EngineState = app.state.engine
        return {
            "status": "ok",
            "checkpoint_sha256": engine.checkpoint_sha256,
            "model_fingerprint": engine.model.fingerprint(),
            "input_dim": engine.input_dim,
            "graph": {"nodes": engine.graph.node_count, "edges": engine.graph.edge_count},
        }

    @app.get("/styles")
    async def styles() -> dict:
        return {
            "styles": [
                {"id": int(s), "name": s.label, "attributes": STYLE_ATTRIBUTES[s]}
                for s in Style
            ]
        }

    @app.get("/groups")
    async def groups() -> dict:
        engine: EngineState = app.state.engine
        graph_sizes = engine.graph.group_sizes()
        return {
            "groups": [
                {
                    "group": group,
                    "product_count": count,
                    "graph_product_count": graph_sizes.get(group, 0),
                }
                for group, count in engine.catalog.group_counts().items()
            ]
        }

    @app.get("/products/{sku}")
    async def product_detail(sku: str) -> dict:
        engine: EngineState = app.state.engine
        try:
            product = engine.catalog.get(sku)
        except KeyError:
            raise _not_found(f"unknown sku {sku!r}") from None
        in_graph = sku in engine.graph.nodes
        degrees = engine.graph.weighted_degrees() if in_graph else {}
        try:
            embedding = engine.store.embedding_of(sku, scope="products").tolist()
        except KeyError:
            embedding = None
        return {
            "sku": product.sku,
            "group": product.group,
            "name": product.display_name,
            "in_graph": in_graph,
            "weighted_degree": degrees.get(sku),
            "embedding": embedding,
        }

    @app.get("/products/{sku}/neighbors")
    async def product_neighbors(sku: str, request: Request) -> dict:
        engine: EngineState = app.state.engine
        k = _parse_k(request.query_params.get("k"), engine.config.default_k)
        if sku not in engine.catalog:
            raise _not_found(f"unknown sku {sku!r}")
        try:
            return _neighbor_payload(engine, sku, k)
        except KeyError:
            raise _not_found(f"sku {sku!r} has no embedding") from None

    @app.post("/score")
    async def score(request: Request) -> dict:
        engine: EngineState = app.state.engine
        try:
            body = await request.json()
        except Exception:
            raise _bad_request("request body must be valid JSON") from None
        if not isinstance(body, dict):
            raise _bad_request("request body must be a JSON object")
        features = body.get("features")
        if not isinstance(features, list) or not all(
            isinstance(x, (int, float)) and not isinstance(x, bool) for x in features
        ):
            raise _bad_request("'features' must be a list of numbers")
        if len(features) != engine.input_dim:
            raise _bad_request(
                f"'features' must have length {engine.input_dim}, got {len(features)}"
            )
        k = _parse_k(body.get("k"), engine.config.default_k)
        try:
            report = score_design(engine, features, k)
        except ValueError as exc:
            # e.g. non-finite values that survived JSON parsing
            raise _bad_request(str(exc)) from None
        return {
            "style_probs": list(report.style_probs),
            "top_neighbors": [
                {"sku": n.sku, "group": n.group, "distance": n.distance}
                for n in report.top_neighbors
            ],
            "group_connections": report.group_connections,
            "similarity_score": report.similarity_score,
            "flags": list(report.flags),
        }

    @app.get("/graph/groups")
    async def graph_groups() -> dict:
        engine: EngineState = app.state.engine
        gg = engine.groups
        return {
            "nodes": [
                {
                    "group": s.group,
                    "product_count": s.product_count,
                    "degree_sum": s.degree_sum,
                    "self_weight": gg.self_weights.get(s.group, 0.0),
                    "most_connected": most_connected(engine.graph, s.group).sku,
                }
                for s in gg.stats
            ],
            "edges": [
                {"source": a, "target": b, "weight": w}
                for (a, b), w in sorted(gg.edges.items())
            ],
        }

    @app.get("/graph/gaps")
    async def graph_gaps() -> dict:
        engine: EngineState = app.state.engine
        gaps = engine.gaps
        return {
            "groups": [
                {
                    "group": g.group,
                    "node_count": g.node_count,
                    "isolated_count": g.isolated_count,
                    "isolated_skus": list(g.isolated_skus),
                    "degree_min": g.degree_min,
                    "degree_median": g.degree_median,
                    "degree_max": g.degree_max,
                }
                for g in gaps.groups
            ],
            "zero_weight_pairs": [list(pair) for pair in gaps.zero_weight_pairs],
        }

    @app.get("/graph/export")
    async def graph_export(request: Request) -> Response:
        engine: EngineState = app.state.engine
        fmt = request.query_params.get("format", "graphml")
        if fmt not in FORMATS:
            raise _bad_request(f"unknown format {fmt!r} (expected one of: {', '.join(FORMATS)})")
        return Response(content=export_graph_string(engine.graph, fmt), media_type=_MEDIA_TYPES[fmt])

    @app.post("/admin/reload")
    async def admin_reload(request: Request) -> dict:
        engine: EngineState = app.state.engine
        token = engine.config.admin_token
        if not token:
            raise ApiError(403, "forbidden", "admin endpoints are disabled (no admin token configured)")
        if request.headers.get("x-admin-token") != token:
            raise ApiError(403, "forbidden", "missing or incorrect admin token")
        with app.state.reload_lock:
            fresh = load_engine(engine.config)
            app.state.engine = fresh
        return {
            "status": "reloaded",
            "checkpoint_sha256": fresh.checkpoint_sha256,
            "graph": {"nodes": fresh.graph.node_count, "edges": fresh.graph.edge_count},
        }

    return app


def serve(config: EngineConfig, host: str = "127.0.0.1") -> None:
    """Load the engine and serve it; blocks until interrupted."""
    import uvicorn

    engine = load_engine(config)
    app = create_app(engine)
    uvicorn.run(app, host=host, port=config.port, log_level="info")
