"""Benchmark harness: seeded multi-run generation across target sizes,
metric collection, and relative-distance reporting to one CSV.

Grid cells are (dataset, method, size, seed). The pipeline methods reuse
one cached embedding matrix, subgraph dataset and trained model per
(dataset, hyperparameters) group across every size and seed, so scaling
sweeps exercise a single model. Baselines are fitted once per dataset and
regenerated per cell.

CSV schema (exact column order):
    dataset, method, size_target, seed, n_nodes, n_edges, avg_degree, ede,
    gini, clustering, assortativity, rel_avg_degree, rel_ede, rel_gini,
    rel_clustering, rel_assortativity, wall_time_s
One aggregate row per (dataset, method, size_target) carries the mean over
that group's seed rows in the ``seed`` column slot ("mean"). ``null``
encodes undefined values. With ``timing = none`` (the default) the wall
time column is written as 0.0 so reruns are byte-identical; ``timing =
wall`` records measured times and is documented as non-reproducible.
"""

from __future__ import annotations

import configparser
import hashlib
import json
import math
import os
import tempfile
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .assembly import AssemblyInput, node_aggregation, threshold_matching
from .baselines import KronFitConfig, barabasi_albert, erdos_renyi, kronecker_generate, kronfit
from .denoiser import save_denoiser
from .diffusion import DiffusionConfig, sample_subgraphs, train_diffusion
from .embedding import EmbedConfig, save_embeddings, train_embeddings
from .graph import Graph, load_edge_list, save_edge_list
from .metrics import MetricsReport, compute_report, relative_distance
from .sampling import build_subgraph_dataset, empirical_sizes
from .seeding import mix_seed

CSV_COLUMNS = [
    "dataset", "method", "size_target", "seed", "n_nodes", "n_edges",
    "avg_degree", "ede", "gini", "clustering", "assortativity",
    "rel_avg_degree", "rel_ede", "rel_gini", "rel_clustering",
    "rel_assortativity", "wall_time_s",
]

PIPELINE_METHODS = ("lgsg-node-agg", "lgsg-threshold")
BASELINE_METHODS = ("er", "ba", "kronecker")


@dataclass
class SamplerConfig:
    capacity: int = 12
    walks_per_node: int = 8


@dataclass
class AssemblerConfig:
    headroom: float = 1.5
    deltas: tuple = (0.5,)


@dataclass
class RunConfig:
    datasets: list
    methods: list
    sizes: list = field(default_factory=lambda: [1.0, 1.5, 2.0])
    seeds: int = 5
    base_seed: int = 0
    timing: str = "none"  # none | wall
    reindex: bool = False
    externals: dict = field(default_factory=dict)
    embedding: EmbedConfig = field(default_factory=EmbedConfig)
    sampler: SamplerConfig = field(default_factory=SamplerConfig)
    diffusion: DiffusionConfig = field(default_factory=DiffusionConfig)
    assembler: AssemblerConfig = field(default_factory=AssemblerConfig)
    kronfit: KronFitConfig = field(default_factory=KronFitConfig)

    def __post_init__(self):
        if self.seeds < 1:
            raise ValueError("seeds must be >= 1")
        for s in self.sizes:
            if s <= 0:
                raise ValueError("size targets must be positive")
        known = PIPELINE_METHODS + BASELINE_METHODS
        for m in self.methods:
            if m not in known and not m.startswith("external:"):
                raise ValueError(f"unknown method {m!r}")
        if self.timing not in ("none", "wall"):
            raise ValueError("timing must be 'none' or 'wall'")

    def sizes_for(self, method):
        if method == "lgsg-threshold":
            return list(self.assembler.deltas)
        return list(self.sizes)


@dataclass
class BenchmarkRecord:
    dataset: str
    method: str
    size_target: float
    seed: int
    n_nodes: int | None = None
    n_edges: int | None = None
    metrics: dict = field(default_factory=dict)
    rel: dict = field(default_factory=dict)
    wall_time_s: float = 0.0
    error: str | None = None

    def csv_row(self):
        def fmt(x):
            if x is None:
                return "null"
            if isinstance(x, float):
                return repr(x)
            return str(x)

        cells = [self.dataset, self.method, fmt(self.size_target), fmt(self.seed)]
        cells += [fmt(self.n_nodes), fmt(self.n_edges)]
        for name in ("avg_degree", "ede", "gini", "clustering", "assortativity"):
            cells.append(fmt(self.metrics.get(name)))
        for name in ("avg_degree", "ede", "gini", "clustering", "assortativity"):
            cells.append(fmt(self.rel.get(name)))
        cells.append(fmt(self.wall_time_s))
        return ",".join(cells)


def _dataset_label(path) -> str:
    return Path(path).stem


def _sha256(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


@dataclass
class PipelineArtifacts:
    embeddings_path: str
    model_path: str
    model: object
    sizes: np.ndarray
    embedding_hash: str
    model_hash: str


class Harness:
    """Holds per-dataset caches (graphs, reports, fitted models) for a run."""

    def __init__(self, config: RunConfig, workdir=None):
        self.config = config
        self.workdir = Path(workdir) if workdir else None
        self._tmpdir = None
        self._graphs = {}
        self._reports = {}
        self._artifacts = {}
        self._kron = {}
        self.manifest = {"datasets": {}, "cells": []}

    def _artifact_dir(self) -> Path:
        if self.workdir is not None:
            self.workdir.mkdir(parents=True, exist_ok=True)
            return self.workdir
        if self._tmpdir is None:
            self._tmpdir = tempfile.TemporaryDirectory(prefix="lgsg-cache-")
        return Path(self._tmpdir.name)

    # -- cached inputs ---------------------------------------------------
    def graph(self, dataset_path) -> Graph:
        if dataset_path not in self._graphs:
            self._graphs[dataset_path] = load_edge_list(dataset_path, reindex=self.config.reindex)
        return self._graphs[dataset_path]

    def original_report(self, dataset_path) -> MetricsReport:
        if dataset_path not in self._reports:
            self._reports[dataset_path] = compute_report(self.graph(dataset_path))
        return self._reports[dataset_path]

    # -- cached pipeline stages -------------------------------------------
    def artifacts(self, dataset_path) -> PipelineArtifacts:
        """Embeddings + subgraph dataset + trained model, built once per
        (dataset, hyperparameters) and reused across sizes and seeds."""
        cfg = self.config
        key = (
            dataset_path,
            tuple(sorted(cfg.embedding.to_dict().items())),
            (cfg.sampler.capacity, cfg.sampler.walks_per_node),
            tuple(sorted(cfg.diffusion.to_dict().items())),
        )
        if key in self._artifacts:
            return self._artifacts[key]
        label = _dataset_label(dataset_path)
        g = self.graph(dataset_path)
        emb_seed = mix_seed(cfg.base_seed, label, "embedding")
        emb = train_embeddings(g, cfg.embedding, seed=emb_seed)
        dataset = build_subgraph_dataset(
            g, emb, cfg.sampler.walks_per_node, cfg.sampler.capacity,
            seed=mix_seed(cfg.base_seed, label, "sampler"),
        )
        model = train_diffusion(
            dataset, cfg.diffusion, seed=mix_seed(cfg.base_seed, label, "diffusion")
        )
        outdir = self._artifact_dir()
        emb_path = str(outdir / f"{label}.emb")
        model_path = str(outdir / f"{label}.model")
        save_embeddings(emb, emb_path, manifest={"seed": emb_seed, "config": cfg.embedding.to_dict()})
        save_denoiser(model, model_path)
        art = PipelineArtifacts(
            embeddings_path=emb_path,
            model_path=model_path,
            model=model,
            sizes=empirical_sizes(dataset),
            embedding_hash=_sha256(emb_path),
            model_hash=_sha256(model_path),
        )
        self._artifacts[key] = art
        self.manifest["datasets"].setdefault(label, {})["pipeline"] = {
            "embedding_checkpoint": emb_path,
            "embedding_sha256": art.embedding_hash,
            "model_checkpoint": model_path,
            "model_sha256": art.model_hash,
        }
        return art

    def kron_initiator(self, dataset_path):
        if dataset_path not in self._kron:
            label = _dataset_label(dataset_path)
            rng = np.random.default_rng(mix_seed(self.config.base_seed, label, "kronfit"))
            init = kronfit(self.graph(dataset_path), self.config.kronfit, rng)
            self._kron[dataset_path] = init
            self.manifest["datasets"].setdefault(label, {})["kronfit"] = {
                "theta": init.theta.tolist(), "k": init.k,
            }
        return self._kron[dataset_path]

    # -- cell execution ----------------------------------------------------
    def _generate(self, dataset_path, method, size, seed_idx) -> Graph:
        cfg = self.config
        label = _dataset_label(dataset_path)
        g_in = self.graph(dataset_path)
        cell_seed = mix_seed(cfg.base_seed, label, method, size, seed_idx)
        rng = np.random.default_rng(cell_seed)
        if method in PIPELINE_METHODS:
            art = self.artifacts(dataset_path)
            mean_size = float(art.sizes.mean())
            if method == "lgsg-node-agg":
                target = int(round(size * g_in.n)) if size <= 16 else int(size)
                count = int(math.ceil(cfg.assembler.headroom * target / mean_size))
            else:
                count = int(math.ceil(cfg.assembler.headroom * g_in.n / mean_size))
            samples = sample_subgraphs(
                art.model, count, art.sizes, seed=mix_seed(cell_seed, "generate")
            )
            inp = AssemblyInput.from_samples(samples)
            if method == "lgsg-node-agg":
                if inp.total_nodes < target:
                    raise RuntimeError(
                        f"generated only {inp.total_nodes} nodes for target {target}"
                    )
                return node_aggregation(inp, target).graph
            return threshold_matching(inp, float(size)).graph
        if method == "er":
            return erdos_renyi(g_in, self._n_out(g_in, size), rng)
        if method == "ba":
            return barabasi_albert(g_in, self._n_out(g_in, size), rng)
        if method == "kronecker":
            init = self.kron_initiator(dataset_path)
            n_out = self._n_out(g_in, size)
            k = max(1, int(math.ceil(math.log2(max(n_out, 2)))))
            return kronecker_generate(
                type(init)(init.theta, k), rng, n_out=n_out
            )
        if method.startswith("external:"):
            name = method.split(":", 1)[1]
            if name not in cfg.externals:
                raise RuntimeError(f"no edge list registered for external method {name!r}")
            return load_edge_list(cfg.externals[name])
        raise RuntimeError(f"unknown method {method!r}")

    @staticmethod
    def _n_out(g_in, size) -> int:
        # Multipliers are small floats; anything larger is an absolute count.
        return max(1, int(round(size * g_in.n))) if size <= 16 else int(size)

    def run_cell(self, dataset_path, method, size, seed_idx):
        label = _dataset_label(dataset_path)
        record = BenchmarkRecord(label, method, float(size), int(seed_idx))
        started = time.perf_counter()
        stage = "generate"
        try:
            out_graph = self._generate(dataset_path, method, size, seed_idx)
            stage = "metrics"
            report = compute_report(out_graph)
            record.n_nodes = report.n_nodes
            record.n_edges = report.n_edges
            record.metrics = {k: v for k, v in report.to_dict().items()
                              if k not in ("n_nodes", "n_edges")}
            record.rel = relative_distance(self.original_report(dataset_path), report)
        except Exception as exc:  # error rows keep the run going
            record.error = f"stage '{stage}' failed: {exc}"
            return record, None
        if self.config.timing == "wall":
            record.wall_time_s = time.perf_counter() - started
        return record, out_graph


def run_pipeline(config: RunConfig, dataset_path, method, size, seed, harness=None):
    """Run one grid cell; returns (Graph, BenchmarkRecord).

    Passing a shared ``harness`` keeps the trained-model caches across
    calls, which is how the benchmark grid reuses one model per dataset.
    """
    harness = harness or Harness(config)
    record, graph = harness.run_cell(dataset_path, method, size, seed)
    if record.error is not None:
        raise RuntimeError(record.error)
    return graph, record


def _aggregate(records):
    """One mean row per (dataset, method, size_target) over its seed rows."""
    groups = {}
    order = []
    for r in records:
        key = (r.dataset, r.method, r.size_target)
        if key not in groups:
            groups[key] = []
            order.append(key)
        groups[key].append(r)
    out = []
    for key in order:
        rows = [r for r in groups[key] if r.error is None]
        agg = BenchmarkRecord(key[0], key[1], key[2], "mean")
        if rows:
            def mean_of(values):
                vals = [v for v in values if v is not None]
                return math.fsum(vals) / len(vals) if vals else None

            agg.n_nodes = mean_of([r.n_nodes for r in rows])
            agg.n_edges = mean_of([r.n_edges for r in rows])
            for name in ("avg_degree", "ede", "gini", "clustering", "assortativity"):
                agg.metrics[name] = mean_of([r.metrics.get(name) for r in rows])
                agg.rel[name] = mean_of([r.rel.get(name) for r in rows])
            agg.wall_time_s = mean_of([r.wall_time_s for r in rows])
        else:
            agg.wall_time_s = None
        out.append(agg)
    return out


def run_benchmark(config: RunConfig, out_csv, workers=None):
    """Execute the full grid and write the CSV; returns the records.

    Emitted graphs go to ``<csv stem>_graphs/`` and a manifest (config
    echo, fitted parameters, checkpoint hashes, per-cell status) to
    ``<csv>.manifest.json``. Deterministic given the config; the exit
    status of the CLI is non-zero if any cell errored.
    """
    out_csv = Path(out_csv)
    out_csv.parent.mkdir(parents=True, exist_ok=True)
    graph_dir = out_csv.parent / f"{out_csv.stem}_graphs"
    graph_dir.mkdir(exist_ok=True)
    harness = Harness(config, workdir=graph_dir)

    cells = [
        (ds, method, size, seed)
        for ds in config.datasets
        for method in config.methods
        for size in config.sizes_for(method)
        for seed in range(config.seeds)
    ]
    if not cells:
        raise ValueError("empty benchmark grid")

    # Build shared artifacts sequentially before any parallel cells.
    for ds in config.datasets:
        self_methods = set(config.methods)
        if self_methods & set(PIPELINE_METHODS):
            harness.artifacts(ds)
        if "kronecker" in self_methods:
            harness.kron_initiator(ds)
        harness.original_report(ds)

    if workers is None:
        workers = int(os.environ.get("LGSG_WORKERS", "1"))
    results = [None] * len(cells)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = {pool.submit(harness.run_cell, *cell): i for i, cell in enumerate(cells)}
            for fut, i in futures.items():
                results[i] = fut.result()
    else:
        for i, cell in enumerate(cells):
            results[i] = harness.run_cell(*cell)

    records = []
    for (ds, method, size, seed), (record, graph) in zip(cells, results):
        records.append(record)
        safe_method = method.replace(":", "-")
        status = {"dataset": record.dataset, "method": method, "size": size, "seed": seed}
        if graph is not None:
            path = graph_dir / f"{record.dataset}_{safe_method}_{record.size_target}_{seed}.edges"
            save_edge_list(graph, path)
            status["graph_file"] = str(path)
            status["status"] = "ok"
        else:
            status["status"] = "error"
            status["error"] = record.error
        harness.manifest["cells"].append(status)

    lines = [",".join(CSV_COLUMNS)]
    lines += [r.csv_row() for r in records]
    lines += [r.csv_row() for r in _aggregate(records)]
    with open(out_csv, "w", encoding="utf-8", newline="") as fh:
        fh.write("\n".join(lines) + "\n")

    harness.manifest["config"] = config_to_dict(config)
    with open(f"{out_csv}.manifest.json", "w", encoding="utf-8") as fh:
        json.dump(harness.manifest, fh, indent=2, sort_keys=True)
    return records


# -- config file handling ---------------------------------------------------

def config_to_dict(config: RunConfig) -> dict:
    return {
        "run": {
            "datasets": list(config.datasets),
            "methods": list(config.methods),
            "sizes": list(config.sizes),
            "seeds": config.seeds,
            "base_seed": config.base_seed,
            "timing": config.timing,
            "reindex": config.reindex,
        },
        "externals": dict(config.externals),
        "embedding": config.embedding.to_dict(),
        "sampler": dict(config.sampler.__dict__),
        "diffusion": config.diffusion.to_dict(),
        "assembler": {"headroom": config.assembler.headroom,
                      "deltas": list(config.assembler.deltas)},
        "kronfit": {
            "iterations": config.kronfit.iterations,
            "swaps_per_iteration": config.kronfit.swaps_per_iteration,
            "lr": config.kronfit.lr,
        },
    }


def _split_list(raw):
    return [tok.strip() for tok in raw.split(",") if tok.strip()]


def load_config(path, overrides=None) -> RunConfig:
    """Parse the INI-style run configuration; CLI overrides win over file values.

    Sections: [run] (datasets, methods, sizes, seeds, base_seed, timing),
    [externals] (name = edge-list path), and one section per stage
    ([embedding], [sampler], [diffusion], [assembler], [kronfit]).
    """
    parser = configparser.ConfigParser()
    if not parser.read(path, encoding="utf-8"):
        raise FileNotFoundError(path)
    run = parser["run"] if parser.has_section("run") else {}
    overrides = overrides or {}

    def run_value(key, default=None):
        if key in overrides and overrides[key] is not None:
            return overrides[key]
        return run.get(key, default)

    datasets = run_value("datasets")
    methods = run_value("methods")
    if not datasets or not methods:
        raise ValueError("config must provide run.datasets and run.methods")
    if isinstance(datasets, str):
        datasets = _split_list(datasets)
    if isinstance(methods, str):
        methods = _split_list(methods)
    sizes = run_value("sizes", "1.0,1.5,2.0")
    if isinstance(sizes, str):
        sizes = [float(s) for s in _split_list(sizes)]

    def stage(section, cls):
        kwargs = {}
        if parser.has_section(section):
            for key, raw in parser.items(section):
                if key == "deltas":
                    kwargs[key] = tuple(float(x) for x in _split_list(raw))
                elif key in ("init_theta",):
                    vals = [float(x) for x in _split_list(raw)]
                    kwargs[key] = ((vals[0], vals[1]), (vals[2], vals[3]))
                else:
                    current = getattr(cls(), key, None)
                    if isinstance(current, bool):
                        kwargs[key] = raw.lower() in ("1", "true", "yes")
                    elif isinstance(current, int):
                        kwargs[key] = int(raw)
                    elif isinstance(current, float):
                        kwargs[key] = float(raw)
                    else:
                        kwargs[key] = raw
        return cls(**kwargs)

    externals = dict(parser.items("externals")) if parser.has_section("externals") else {}
    return RunConfig(
        datasets=datasets,
        methods=methods,
        sizes=sizes,
        seeds=int(run_value("seeds", 5)),
        base_seed=int(run_value("base_seed", 0)),
        timing=str(run_value("timing", "none")),
        reindex=str(run_value("reindex", "false")).lower() in ("1", "true", "yes"),
        externals=externals,
        embedding=stage("embedding", EmbedConfig),
        sampler=stage("sampler", SamplerConfig),
        diffusion=stage("diffusion", DiffusionConfig),
        assembler=stage("assembler", AssemblerConfig),
        kronfit=stage("kronfit", KronFitConfig),
    )
