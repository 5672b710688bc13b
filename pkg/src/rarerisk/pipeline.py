"""Config-driven end-to-end pipeline.

Stages run in a fixed order: dataset, split, baseline, boost, confusion,
ga, analysis, clustering, reports. Every tuning constant comes from one
configuration document, every stage draws randomness only from its
configured seed, and all artifacts except the manifest (which carries
timestamps and wall-clock timings) are byte-identical across reruns of
the same configuration.
"""

from __future__ import annotations

import csv
import dataclasses
import hashlib
import json
import os
import time
import warnings
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Any

import numpy as np
import yaml

from . import analysis, boosting, clustering, genetic, logistic, render, reports
from .boosting import BoostConfig
from .dataset import DataSet, SynthSpec
from .dataset import base_rate as dataset_base_rate
from .dataset import load_csv, split_train_test, synthesize, write_csv
from .errors import ConfigError, RareRiskError, StageError
from .genetic import GaConfig

__all__ = [
    "PipelineConfig",
    "RunManifest",
    "load_config",
    "run_pipeline",
    "verify_manifest",
    "OUTPUT_DIR_ENV",
]

OUTPUT_DIR_ENV = "RARERISK_OUTPUT_DIR"

MANIFEST_FORMAT = "rarerisk.run_manifest"
MANIFEST_VERSION = 1

STAGES = (
    "dataset",
    "split",
    "baseline",
    "boost",
    "confusion",
    "ga",
    "analysis",
    "clustering",
    "reports",
)


@dataclass(frozen=True)
class PipelineConfig:
    """Fully resolved pipeline settings; one dataset source only."""

    output_dir: Path
    csv_path: Path | None
    csv_response: str | None
    synth: SynthSpec | None
    n_train: int
    split_seed: int
    boost: BoostConfig
    use_cv: bool
    threshold: float
    ga: GaConfig
    ga_repeats: int
    epsilon: float
    histogram_bins: int

    def __post_init__(self):
        if (self.csv_path is None) == (self.synth is None):
            raise ConfigError(
                "configure exactly one dataset source: dataset.csv or "
                "dataset.synth"
            )
        if self.n_train < 1:
            raise ConfigError("split.n_train must be positive")
        if self.split_seed < 0:
            raise ConfigError("split.seed must be non-negative")
        if not 0.0 < self.threshold < 1.0:
            raise ConfigError("boost.threshold must lie in (0, 1)")
        if self.ga_repeats < 1:
            raise ConfigError("ga.repeats must be at least 1")
        if not 0.0 <= self.epsilon < 0.5:
            raise ConfigError("analysis.epsilon must lie in [0, 0.5)")
        if self.histogram_bins < 1:
            raise ConfigError("report.histogram_bins must be at least 1")

    def to_dict(self) -> dict:
        doc: dict[str, Any] = {"output_dir": str(self.output_dir)}
        if self.csv_path is not None:
            doc["dataset"] = {"csv": str(self.csv_path)}
            if self.csv_response:
                doc["dataset"]["response"] = self.csv_response
        else:
            s = self.synth
            doc["dataset"] = {
                "synth": {
                    "n": s.n,
                    "p": s.p,
                    "base_rate": s.base_rate,
                    "effects": list(s.effects),
                    "on_rates": list(s.predictor_on_rates),
                    "seed": s.seed,
                }
            }
        doc["split"] = {"n_train": self.n_train, "seed": self.split_seed}
        doc["boost"] = dataclasses.asdict(self.boost)
        doc["boost"]["cv"] = self.use_cv
        doc["boost"]["threshold"] = self.threshold
        doc["ga"] = dataclasses.asdict(self.ga)
        doc["ga"]["repeats"] = self.ga_repeats
        doc["analysis"] = {"epsilon": self.epsilon}
        doc["report"] = {"histogram_bins": self.histogram_bins}
        return doc


def _require_keys(section: dict, allowed: set[str], where: str) -> None:
    if not isinstance(section, dict):
        raise ConfigError(f"{where} must be a mapping")
    unknown = set(section) - allowed
    if unknown:
        raise ConfigError(f"unknown keys in {where}: {sorted(unknown)}")


def _broadcast(value, p: int, default: float, what: str) -> tuple[float, ...]:
    if value is None:
        return tuple([default] * p)
    if isinstance(value, (int, float)):
        return tuple([float(value)] * p)
    values = [float(v) for v in value]
    if len(values) != p:
        raise ConfigError(f"dataset.synth.{what} must have length p={p}")
    return tuple(values)


def config_from_dict(doc: dict, base_dir: Path | None = None) -> PipelineConfig:
    """Build a validated PipelineConfig from a parsed YAML/JSON document."""
    if not isinstance(doc, dict):
        raise ConfigError("configuration root must be a mapping")
    base = Path(base_dir) if base_dir is not None else Path.cwd()
    _require_keys(
        doc,
        {"output_dir", "dataset", "split", "boost", "ga", "analysis", "report"},
        "config",
    )

    out = doc.get("output_dir") or os.environ.get(OUTPUT_DIR_ENV)
    if not out:
        raise ConfigError(
            f"output_dir missing (set it in the config or via ${OUTPUT_DIR_ENV})"
        )
    output_dir = (base / out).resolve() if not Path(out).is_absolute() else Path(out)

    ds_sec = doc.get("dataset")
    if not isinstance(ds_sec, dict):
        raise ConfigError("dataset section is required")
    _require_keys(ds_sec, {"csv", "response", "synth"}, "dataset")
    csv_path = csv_response = synth = None
    if "csv" in ds_sec and "synth" in ds_sec:
        raise ConfigError("dataset.csv and dataset.synth are mutually exclusive")
    if "csv" in ds_sec:
        raw = Path(ds_sec["csv"])
        csv_path = raw if raw.is_absolute() else (base / raw).resolve()
        csv_response = ds_sec.get("response")
    elif "synth" in ds_sec:
        s = ds_sec["synth"]
        _require_keys(
            s,
            {"n", "p", "base_rate", "effects", "on_rates", "seed"},
            "dataset.synth",
        )
        try:
            p = int(s["p"])
            synth = SynthSpec(
                n=int(s["n"]),
                p=p,
                base_rate=float(s.get("base_rate", 0.05)),
                effects=_broadcast(s.get("effects"), p, 0.0, "effects"),
                predictor_on_rates=_broadcast(
                    s.get("on_rates"), p, 0.5, "on_rates"
                ),
                seed=int(s.get("seed", 0)),
            )
        except KeyError as exc:
            raise ConfigError(f"dataset.synth missing key {exc}") from None
    else:
        raise ConfigError("dataset must contain either csv or synth")

    split_sec = doc.get("split")
    if not isinstance(split_sec, dict) or "n_train" not in split_sec:
        raise ConfigError("split.n_train is required")
    _require_keys(split_sec, {"n_train", "seed"}, "split")

    boost_sec = doc.get("boost") or {}
    _require_keys(
        boost_sec,
        {
            "cost_ratio",
            "interaction_depth",
            "shrinkage",
            "bag_fraction",
            "min_node",
            "max_trees",
            "cv_folds",
            "seed",
            "cv",
            "threshold",
        },
        "boost",
    )
    boost_sec = dict(boost_sec)
    use_cv = bool(boost_sec.pop("cv", True))
    threshold = float(boost_sec.pop("threshold", 0.5))

    ga_sec = doc.get("ga") or {}
    _require_keys(
        ga_sec,
        {
            "pop_size",
            "generations",
            "p_mutation",
            "p_crossover",
            "elitism_fraction",
            "seed",
            "repeats",
        },
        "ga",
    )
    ga_sec = dict(ga_sec)
    ga_repeats = int(ga_sec.pop("repeats", 1))

    analysis_sec = doc.get("analysis") or {}
    _require_keys(analysis_sec, {"epsilon"}, "analysis")
    report_sec = doc.get("report") or {}
    _require_keys(report_sec, {"histogram_bins"}, "report")

    try:
        return PipelineConfig(
            output_dir=output_dir,
            csv_path=csv_path,
            csv_response=csv_response,
            synth=synth,
            n_train=int(split_sec["n_train"]),
            split_seed=int(split_sec.get("seed", 0)),
            boost=BoostConfig(**boost_sec),
            use_cv=use_cv,
            threshold=threshold,
            ga=GaConfig(**ga_sec),
            ga_repeats=ga_repeats,
            epsilon=float(analysis_sec.get("epsilon", 0.0)),
            histogram_bins=int(report_sec.get("histogram_bins", 20)),
        )
    except ConfigError:
        raise
    except (TypeError, ValueError, RareRiskError) as exc:
        raise ConfigError(f"invalid configuration value: {exc}") from exc


def load_config(path: str | Path) -> PipelineConfig:
    """Parse a YAML (or JSON) configuration file."""
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    with open(path, encoding="utf-8") as fh:
        try:
            doc = yaml.safe_load(fh)
        except yaml.YAMLError as exc:
            raise ConfigError(f"cannot parse {path}: {exc}") from exc
    return config_from_dict(doc, base_dir=path.parent)


@dataclass
class RunManifest:
    config: dict
    seeds: dict
    stages: list[dict]
    artifacts: list[dict]
    status: str = "ok"
    failed_stage: str | None = None
    error: str | None = None
    created_utc: str = ""

    def to_dict(self) -> dict:
        return {
            "format": MANIFEST_FORMAT,
            "version": MANIFEST_VERSION,
            "created_utc": self.created_utc,
            "status": self.status,
            "failed_stage": self.failed_stage,
            "error": self.error,
            "config": self.config,
            "seeds": self.seeds,
            "stages": self.stages,
            "artifacts": self.artifacts,
        }


def _sha256(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()


class _Run:
    """Mutable state threaded through the pipeline stages."""

    def __init__(self, config: PipelineConfig):
        self.cfg = config
        self.out = config.output_dir
        self.manifest = RunManifest(
            config=config.to_dict(),
            seeds={
                "dataset": None if config.synth is None else config.synth.seed,
                "split": config.split_seed,
                "boost": config.boost.seed,
                "ga": config.ga.seed,
            },
            stages=[],
            artifacts=[],
        )
        self.data: DataSet | None = None
        self.train: DataSet | None = None
        self.test: DataSet | None = None
        self.model: boosting.BoostModel | None = None
        self.table: boosting.ConfusionTable | None = None
        self.trace: genetic.GaTrace | None = None
        self.repeat_traces: list[genetic.GaTrace] = []
        self.commonality: analysis.CommonalityReport | None = None
        self.reverse: analysis.ReverseCodingReport | None = None
        self.dendrogram: clustering.Dendrogram | None = None

    def add_artifact(self, path: Path, kind: str) -> None:
        self.manifest.artifacts.append(
            {
                "path": str(path.relative_to(self.out)),
                "kind": kind,
                "sha256": _sha256(path),
            }
        )

    def write_json(self, name: str, kind: str, doc: dict) -> None:
        path = self.out / name
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(doc, fh, indent=1, sort_keys=True, allow_nan=True)
            fh.write("\n")
        self.add_artifact(path, kind)


def _stage_dataset(run: _Run) -> None:
    cfg = run.cfg
    if cfg.synth is not None:
        run.data = synthesize(cfg.synth)
    else:
        run.data = load_csv(cfg.csv_path, response=cfg.csv_response)
    path = run.out / "dataset.csv"
    write_csv(run.data, path)
    run.add_artifact(path, "dataset")


def _stage_split(run: _Run) -> None:
    run.train, run.test = split_train_test(
        run.data, run.cfg.n_train, run.cfg.split_seed
    )


def _stage_baseline(run: _Run) -> None:
    model = logistic.fit_logistic(run.train)
    probs = logistic.predict_logistic(model, run.train.X)
    fig = run.out / "hist_logistic.svg"
    render.render_histogram(
        probs,
        run.cfg.histogram_bins,
        fig,
        title="Fitted risk probabilities: logistic baseline (train)",
    )
    run.add_artifact(fig, "histogram")
    run.write_json(
        "logistic_summary.json",
        "logistic_summary",
        {
            "intercept": model.intercept,
            "coefficients": model.coefficients.tolist(),
            "converged": model.converged,
            "iterations": model.iterations,
            "diagnostic": model.diagnostic,
            "max_fitted_probability": float(probs.max()),
            "mean_fitted_probability": float(probs.mean()),
            "train_base_rate": dataset_base_rate(run.train),
        },
    )


def _stage_boost(run: _Run) -> None:
    cfg = run.cfg
    if cfg.use_cv:
        run.model = boosting.fit_boost_cv(run.train, cfg.boost)
    else:
        run.model = boosting.fit_boost(run.train, cfg.boost)
    model_path = run.out / "model.json"
    boosting.save_model(run.model, model_path)
    run.add_artifact(model_path, "model")

    probs = run.model.predict(run.test.X)
    fig = run.out / "hist_boost_test.svg"
    render.render_histogram(
        probs,
        cfg.histogram_bins,
        fig,
        title="Predicted risk probabilities: weighted boosting (test)",
    )
    run.add_artifact(fig, "histogram")
    run.write_json(
        "boost_summary.json",
        "boost_summary",
        {
            "n_trees_used": run.model.n_trees_used,
            "n_trees_grown": len(run.model.trees),
            "intercept": run.model.intercept,
            "train_deviance_first": float(run.model.train_deviance[0])
            if len(run.model.train_deviance)
            else None,
            "train_deviance_last": float(run.model.train_deviance[-1])
            if len(run.model.train_deviance)
            else None,
            "cv_selected": run.cfg.use_cv,
            "test_fraction_above_threshold": float(
                np.mean(probs > cfg.threshold)
            ),
        },
    )


def _stage_confusion(run: _Run) -> None:
    run.table = boosting.confusion(run.model, run.test, run.cfg.threshold)
    for path in reports.write_confusion_table(run.table, run.out / "confusion"):
        kind = (
            "confusion_table" if path.suffix == ".csv" else "confusion_table_json"
        )
        run.add_artifact(path, kind)


def _stage_ga(run: _Run) -> None:
    cfg = run.cfg
    model = run.model

    def batch(members: np.ndarray) -> np.ndarray:
        return model.predict(members)

    run.trace = genetic.evolve(
        None, run.train.p, cfg.ga, batch_fitness=batch
    )
    for i in range(1, cfg.ga_repeats):
        repeat_cfg = dataclasses.replace(cfg.ga, seed=cfg.ga.seed + i)
        run.repeat_traces.append(
            genetic.evolve(None, run.train.p, repeat_cfg, batch_fitness=batch)
        )

    fig = run.out / "hist_ga.svg"
    render.render_histogram(
        run.trace.final.fitness,
        cfg.histogram_bins,
        fig,
        title="Predicted risk probabilities: evolved population",
    )
    run.add_artifact(fig, "histogram")


def _stage_analysis(run: _Run) -> None:
    cfg = run.cfg
    pop = run.trace.final
    run.commonality = analysis.commonality_importance(pop, cfg.epsilon)
    with warnings.catch_warnings():
        # An empty universal set is a legitimate outcome here; the report
        # itself records the notice.
        warnings.simplefilter("ignore", RuntimeWarning)
        run.reverse = analysis.reverse_coding_importance(
            run.model, pop, run.commonality
        )
    best_counts, global_max = analysis.nearest_match(pop, run.data)
    run.write_json(
        "analysis_summary.json",
        "analysis_summary",
        {
            "benchmark_mean_risk": run.reverse.benchmark_mean,
            "n_universal_predictors": len(run.commonality.universal),
            "nearest_match_global_max": global_max,
            "nearest_match_mean": float(best_counts.mean()),
            "population_size": pop.size,
            "epsilon": cfg.epsilon,
        },
    )
    if run.repeat_traces:
        _write_stability(run)


def _write_stability(run: _Run) -> None:
    """Commonality stability across repeated searches with shifted seeds."""
    all_traces = [run.trace] + run.repeat_traces
    props = np.vstack(
        [t.final.members.mean(axis=0) for t in all_traces]
    )
    eps = run.cfg.epsilon
    rows = [
        [
            "predictor",
            "mean_commonality",
            "min_commonality",
            "max_commonality",
            "n_always_on",
            "n_always_off",
        ]
    ]
    names = run.data.schema.names
    for j in range(props.shape[1]):
        col = props[:, j]
        rows.append(
            [
                names[j],
                f"{col.mean():.6f}",
                f"{col.min():.6f}",
                f"{col.max():.6f}",
                str(int(np.sum(col >= 1.0 - eps))),
                str(int(np.sum(col <= eps))),
            ]
        )
    path = run.out / "commonality_stability.csv"
    with open(path, "w", newline="", encoding="utf-8") as fh:
        csv.writer(fh).writerows(rows)
    run.add_artifact(path, "commonality_stability")


def _stage_clustering(run: _Run) -> None:
    pop = run.trace.final
    d = clustering.gower_binary_dissimilarity(pop)
    run.dendrogram = clustering.agnes_average_linkage(
        d, labels=run.data.schema.names
    )
    dg = run.dendrogram
    fig = run.out / "dendrogram.svg"
    render.render_dendrogram(dg, fig, title="Clustering of risk predictors")
    run.add_artifact(fig, "dendrogram")
    nwk = run.out / "dendrogram.newick"
    nwk.write_text(clustering.dendrogram_to_newick(dg) + "\n", encoding="utf-8")
    run.add_artifact(nwk, "dendrogram_newick")
    run.write_json(
        "dendrogram.json",
        "dendrogram_json",
        {
            "labels": list(dg.labels),
            "merges": dg.merges.tolist(),
            "heights": dg.heights.tolist(),
            "normalized_heights": dg.normalized_heights.tolist(),
            "first_merge_heights": dg.first_merge.tolist(),
            "agglomerative_coefficient": dg.agglomerative_coefficient,
        },
    )


def _stage_reports(run: _Run) -> None:
    names = run.data.schema.names
    importance = boosting.in_sample_importance(run.model)
    paths = reports.write_importance_table(
        names,
        importance,
        run.commonality,
        run.reverse,
        run.out / "importance",
    )
    for path in paths:
        kind = (
            "importance_table"
            if path.suffix == ".csv"
            else "importance_table_json"
        )
        run.add_artifact(path, kind)
    for path in reports.write_ga_trace(run.trace, run.out / "ga_trace"):
        kind = "ga_trace" if path.suffix == ".csv" else "ga_trace_json"
        run.add_artifact(path, kind)
    pop_path = run.out / "population.csv"
    genetic.save_population_csv(run.trace.final, pop_path, names=names)
    run.add_artifact(pop_path, "population")


_STAGE_FUNCS = {
    "dataset": _stage_dataset,
    "split": _stage_split,
    "baseline": _stage_baseline,
    "boost": _stage_boost,
    "confusion": _stage_confusion,
    "ga": _stage_ga,
    "analysis": _stage_analysis,
    "clustering": _stage_clustering,
    "reports": _stage_reports,
}


def run_pipeline(config: PipelineConfig) -> RunManifest:
    """Execute every stage, write all artifacts plus manifest.json.

    Any stage failure aborts the run; the manifest is still written with
    the failed stage named and the artifacts produced so far flagged as
    partial.
    """
    out = config.output_dir
    out.mkdir(parents=True, exist_ok=True)
    lock = out / ".lock"
    try:
        fd = os.open(lock, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
        os.close(fd)
    except FileExistsError:
        raise ConfigError(
            f"output directory {out} is locked by another run "
            f"(remove {lock} if stale)"
        ) from None

    run = _Run(config)
    try:
        for stage in STAGES:
            t0 = time.perf_counter()
            try:
                _STAGE_FUNCS[stage](run)
            except Exception as exc:
                run.manifest.status = "failed"
                run.manifest.failed_stage = stage
                run.manifest.error = f"{type(exc).__name__}: {exc}"
                for art in run.manifest.artifacts:
                    art["partial"] = True
                _write_manifest(run)
                raise StageError(stage, exc) from exc
            run.manifest.stages.append(
                {
                    "name": stage,
                    "seconds": round(time.perf_counter() - t0, 6),
                }
            )
        _write_manifest(run)
        return run.manifest
    finally:
        lock.unlink(missing_ok=True)


def _write_manifest(run: _Run) -> None:
    run.manifest.created_utc = datetime.now(timezone.utc).isoformat()
    path = run.out / "manifest.json"
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(run.manifest.to_dict(), fh, indent=1, sort_keys=True)
        fh.write("\n")


def verify_manifest(run_dir: str | Path) -> dict:
    """Recompute artifact digests and compare with the stored manifest.

    Returns {"ok": bool, "mismatched": [...], "missing": [...]}.
    """
    run_dir = Path(run_dir)
    manifest_path = run_dir / "manifest.json"
    if not manifest_path.exists():
        raise ConfigError(f"no manifest.json under {run_dir}")
    with open(manifest_path, encoding="utf-8") as fh:
        doc = json.load(fh)
    mismatched, missing = [], []
    for art in doc.get("artifacts", []):
        path = run_dir / art["path"]
        if not path.exists():
            missing.append(art["path"])
        elif _sha256(path) != art["sha256"]:
            mismatched.append(art["path"])
    return {
        "ok": not mismatched and not missing,
        "mismatched": mismatched,
        "missing": missing,
    }
