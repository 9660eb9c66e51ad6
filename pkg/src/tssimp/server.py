"""JSON HTTP facade for the explorer UI.

Routes (all under /api): datasets listing with lazy characteristics, single
simplifications, loyalty-target resolution, full evaluation curves, and
class prototypes. Sweeps can take a while, so resolve/curve requests that
exceed a 2-second budget return 202 with a job id for polling; identical
concurrent requests share one computation (single-flight caches).
"""

from __future__ import annotations

import itertools
import threading
from concurrent.futures import Future
from concurrent.futures import TimeoutError as FutureTimeout

from fastapi import FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from .characterize import characterize_dataset
from .classifiers import Classifier, fit_knn, fit_logreg, load_external_predictions
from .data import Dataset, discover_datasets, load_dataset, stratified_sample
from .errors import ConfigError, DataError
from .evaluation import EvaluationCurve, min_alpha_on_curve, sweep
from .prototypes import class_prototypes
from .simplifiers import AlgorithmId, ComplexityParam, reconstruct, simplify

JOB_WAIT_SECONDS = 2.0
DEFAULT_CLASSIFIER = "knn"  # no training latency; logreg/external per request


class SimplifyRequest(BaseModel):
    dataset: str
    instance_id: int = 0
    split: str = "test"
    algorithm: str = "rdp"
    alpha_c: float


class ResolveRequest(BaseModel):
    dataset: str
    algorithm: str = "rdp"
    classifier: str = DEFAULT_CLASSIFIER
    loyalty_target: float
    seed: int = 42
    sample_size: int = 100


class SessionState:
    """All server caches. Entries are immutable once published."""

    def __init__(self, data_dir: str, jobs: int = 1):
        self.data_dir = data_dir
        self.jobs = jobs
        self.lock = threading.Lock()
        self.datasets: dict[str, Dataset] = {}
        self.characteristics: dict[str, dict] = {}
        self.classifiers: dict[tuple, Classifier] = {}
        self.curves: dict[tuple, EvaluationCurve] = {}
        self.curve_futures: dict[tuple, Future] = {}
        self.request_futures: dict[tuple, Future] = {}
        self.job_ids: dict[tuple, str] = {}
        self.jobs_by_id: dict[str, Future] = {}
        self.counter = itertools.count(1)


def _get_dataset(state: SessionState, name: str) -> Dataset:
    with state.lock:
        d = state.datasets.get(name)
    if d is not None:
        return d
    try:
        d = load_dataset(state.data_dir, name)
    except (DataError, ConfigError) as exc:
        raise HTTPException(404, f"unknown dataset {name!r}: {exc}") from exc
    with state.lock:
        return state.datasets.setdefault(name, d)


def _parse_algorithm(text: str) -> AlgorithmId:
    try:
        return AlgorithmId.parse(text)
    except ValueError as exc:
        raise HTTPException(422, str(exc)) from exc


def _get_classifier(state: SessionState, d: Dataset, choice: str) -> Classifier:
    key = (d.name, choice)
    with state.lock:
        clf = state.classifiers.get(key)
        if clf is not None:
            return clf
    try:
        if choice == "logreg":
            clf = fit_logreg(d.train)
        elif choice == "knn":
            clf = fit_knn(d.train, k=5, metric="dtw")
        elif choice.startswith("external:"):
            clf = load_external_predictions(choice.split(":", 1)[1])
        else:
            raise HTTPException(
                422, f"unknown classifier {choice!r} (logreg | knn | external:<path>)")
    except ConfigError as exc:
        raise HTTPException(422, str(exc)) from exc
    except DataError as exc:
        raise HTTPException(400, str(exc)) from exc
    with state.lock:
        return state.classifiers.setdefault(key, clf)


def _curve_shared(state: SessionState, dataset: str, algorithm: str,
                  classifier: str, seed: int, sample_size: int) -> EvaluationCurve:
    """Compute-or-wait for one curve; at most one sweep runs per key."""
    choice = (dataset, algorithm, classifier, seed, sample_size)
    with state.lock:
        cached = state.curves.get(choice)
        if cached is not None:
            return cached
        fut = state.curve_futures.get(choice)
        owner = fut is None
        if owner:
            fut = Future()
            state.curve_futures[choice] = fut
    if not owner:
        return fut.result()
    try:
        d = _get_dataset(state, dataset)
        alg = _parse_algorithm(algorithm)
        clf = _get_classifier(state, d, classifier)
        pool = stratified_sample(d.test, sample_size, seed, dataset_name=d.name)
        curve = sweep(alg, clf, pool, jobs=state.jobs)
    except BaseException as exc:
        with state.lock:
            state.curve_futures.pop(choice, None)  # allow retry after failure
        fut.set_exception(exc)
        raise
    with state.lock:
        state.curves[choice] = curve
    fut.set_result(curve)
    return curve


def _submit(state: SessionState, key: tuple, fn) -> tuple[Future, str]:
    """Single-flight request jobs: one worker thread per distinct key."""
    with state.lock:
        fut = state.request_futures.get(key)
        if fut is not None:
            return fut, state.job_ids[key]
        fut = Future()
        job_id = f"job-{next(state.counter)}"
        state.request_futures[key] = fut
        state.job_ids[key] = job_id
        state.jobs_by_id[job_id] = fut

    def runner():
        try:
            fut.set_result(fn())
        except BaseException as exc:
            with state.lock:
                # failed requests may be retried; completed ones stay cached
                state.request_futures.pop(key, None)
                state.job_ids.pop(key, None)
            fut.set_exception(exc)

    threading.Thread(target=runner, daemon=True).start()
    return fut, job_id


def _await_or_202(fut: Future, job_id: str):
    try:
        return fut.result(timeout=JOB_WAIT_SECONDS)
    except FutureTimeout:
        return JSONResponse({"status": "running", "job_id": job_id}, status_code=202)


def _curve_payload(curve: EvaluationCurve) -> dict:
    return {
        "dataset": curve.dataset,
        "algorithm": curve.algorithm.value.lower(),
        "classifier": curve.classifier,
        "seed": curve.seed,
        "points": [
            {"alpha_c": p.alpha_c, "mean_complexity": p.mean_complexity,
             "loyalty": p.loyalty, "kappa": p.kappa,
             "mean_segments": p.mean_segments}
            for p in curve.points
        ],
    }


def create_app(data_dir: str, jobs: int = 1, static_dir: str | None = None) -> FastAPI:
    app = FastAPI(title="tssimp api")
    app.add_middleware(CORSMiddleware, allow_origins=["*"], allow_methods=["*"],
                       allow_headers=["*"])
    state = SessionState(data_dir, jobs)
    app.state.session = state

    @app.get("/api/datasets")
    def list_datasets():
        out = []
        for name in discover_datasets(state.data_dir):
            entry = {"name": name}
            try:
                d = _get_dataset(state, name)
                entry["length"] = d.series_length
                entry["classes"] = list(d.classes)
                entry["train_size"] = len(d.train)
                entry["test_size"] = len(d.test)
                with state.lock:
                    chars = state.characteristics.get(name)
                if chars is None:
                    chars = characterize_dataset(d).to_dict()
                    with state.lock:
                        state.characteristics.setdefault(name, chars)
                entry["characteristics"] = chars
            except HTTPException as exc:
                entry["error"] = str(exc.detail)
            except (DataError, ConfigError) as exc:
                entry["error"] = str(exc)
            out.append(entry)
        return out

    @app.post("/api/simplify")
    def simplify_one(req: SimplifyRequest):
        if not 0.0 <= req.alpha_c <= 1.0:
            raise HTTPException(422, f"alpha_c must be in [0, 1], got {req.alpha_c}")
        if req.split not in ("train", "test"):
            raise HTTPException(422, f"split must be train or test, got {req.split!r}")
        d = _get_dataset(state, req.dataset)
        split = d.split(req.split)
        if not 0 <= req.instance_id < len(split):
            raise HTTPException(404, f"instance {req.instance_id} out of range "
                                     f"({req.split} has {len(split)})")
        alg = _parse_algorithm(req.algorithm)
        inst = split[req.instance_id]
        s = simplify(alg, inst.series, ComplexityParam(req.alpha_c))
        body = s.to_dict()
        body.update({
            "dataset": d.name,
            "instance_id": req.instance_id,
            "split": req.split,
            "label": inst.label,
            "segment_count": s.segment_count,
            "complexity": (s.segment_count + 1) / s.original_length,
            "reconstruction": [float(v) for v in reconstruct(s).values],
            "original": [float(v) for v in inst.series.values],
        })
        return body

    @app.post("/api/resolve-loyalty")
    def resolve_loyalty(req: ResolveRequest):
        if not 0.0 < req.loyalty_target <= 1.0:
            raise HTTPException(422, "loyalty_target must be in (0, 1]")
        _get_dataset(state, req.dataset)  # 404 early for unknown names
        alg = _parse_algorithm(req.algorithm)
        key = ("resolve", req.dataset, alg.value, req.classifier, req.seed,
               req.sample_size, round(req.loyalty_target, 6))

        def compute() -> dict:
            curve = _curve_shared(state, req.dataset, alg.value, req.classifier,
                                  req.seed, req.sample_size)
            alpha_c, point = min_alpha_on_curve(curve, req.loyalty_target)
            return {
                "dataset": req.dataset,
                "algorithm": alg.value.lower(),
                "classifier": req.classifier,
                "seed": req.seed,
                "loyalty_target": req.loyalty_target,
                "alpha_c": alpha_c,
                "achieved_loyalty": point.loyalty,
                "kappa": point.kappa,
                "mean_segments": point.mean_segments,
                "mean_complexity": point.mean_complexity,
            }

        fut, job_id = _submit(state, key, compute)
        return _await_or_202(fut, job_id)

    @app.get("/api/curve")
    def get_curve(dataset: str, algorithm: str = "rdp",
                  classifier: str = DEFAULT_CLASSIFIER, seed: int = 42,
                  sample_size: int = 100):
        _get_dataset(state, dataset)
        alg = _parse_algorithm(algorithm)
        key = ("curve", dataset, alg.value, classifier, seed, sample_size)

        def compute() -> dict:
            return _curve_payload(_curve_shared(state, dataset, alg.value,
                                                classifier, seed, sample_size))

        fut, job_id = _submit(state, key, compute)
        return _await_or_202(fut, job_id)

    @app.get("/api/jobs/{job_id}")
    def job_status(job_id: str):
        with state.lock:
            fut = state.jobs_by_id.get(job_id)
        if fut is None:
            raise HTTPException(404, f"unknown job {job_id!r}")
        if not fut.done():
            return {"status": "running", "job_id": job_id}
        exc = fut.exception()
        if exc is not None:
            return {"status": "error", "job_id": job_id, "error": str(exc)}
        return {"status": "done", "job_id": job_id, "result": fut.result()}

    @app.get("/api/prototypes")
    def prototypes(dataset: str, k: int = 4, algorithm: str = "os",
                   alpha_c: float = 1.0, metric: str = "dtw", seed: int = 42):
        if not 0.0 <= alpha_c <= 1.0:
            raise HTTPException(422, f"alpha_c must be in [0, 1], got {alpha_c}")
        d = _get_dataset(state, dataset)
        alg = _parse_algorithm(algorithm)
        try:
            protos = class_prototypes(d, k, metric, seed)
        except ConfigError as exc:
            raise HTTPException(422, str(exc)) from exc
        except ValueError as exc:
            raise HTTPException(422, str(exc)) from exc
        classes = []
        for label in sorted(protos.by_class):
            entries = []
            for inst in protos.by_class[label]:
                s = simplify(alg, inst.series, ComplexityParam(alpha_c))
                entries.append({
                    "instance_id": inst.instance_id,
                    "label": inst.label,
                    "raw": [float(v) for v in inst.series.values],
                    "kept_indices": list(s.kept_indices),
                    "kept_values": [float(v) for v in s.kept_values],
                    "reconstruction": [float(v) for v in reconstruct(s).values],
                    "segment_count": s.segment_count,
                })
            classes.append({"label": label, "prototypes": entries})
        return {"dataset": d.name, "k_per_class": k, "metric": metric,
                "algorithm": alg.value.lower(), "alpha_c": alpha_c,
                "classes": classes}

    if static_dir:
        from fastapi.staticfiles import StaticFiles
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="static")
    return app


def serve(data_dir: str, host: str = "127.0.0.1", port: int = 8787,
          jobs: int = 1, static_dir: str | None = None) -> None:
    import uvicorn
    uvicorn.run(create_app(data_dir, jobs=jobs, static_dir=static_dir),
                host=host, port=port, log_level="warning")
