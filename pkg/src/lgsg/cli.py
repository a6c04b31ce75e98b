"""Command-line front end: each pipeline stage runs standalone with explicit
artifact paths, plus the benchmark driver.

    lgsg embed      graph -> embedding checkpoint
    lgsg sample     graph + embeddings -> subgraph dataset
    lgsg train      dataset -> model checkpoint
    lgsg generate   model (+ dataset for the size histogram) -> samples
    lgsg assemble   samples -> output edge list (+ members manifest)
    lgsg metrics    graph (-> report JSON), optionally vs. an original
    lgsg benchmark  config file -> CSV + emitted graphs + manifest
"""

from __future__ import annotations

import argparse
import json
import sys

from .assembly import AssemblyInput, node_aggregation, threshold_matching
from .bench import load_config, run_benchmark
from .denoiser import load_denoiser, save_denoiser
from .diffusion import (
    DiffusionConfig,
    load_generated,
    sample_subgraphs,
    save_generated,
    train_diffusion,
)
from .embedding import EmbedConfig, load_embeddings, save_embeddings, train_embeddings
from .graph import load_edge_list, save_edge_list
from .metrics import compute_report, relative_distance
from .sampling import build_subgraph_dataset, empirical_sizes, load_dataset, save_dataset


def _add_embed(sub):
    p = sub.add_parser("embed", help="train node embeddings for a graph")
    p.add_argument("--graph", required=True)
    p.add_argument("--features", default=None, help="optional CSV feature file")
    p.add_argument("--out", required=True, help="embedding checkpoint path")
    p.add_argument("--dim", type=int, default=32)
    p.add_argument("--layers", type=int, default=2)
    p.add_argument("--epochs", type=int, default=5)
    p.add_argument("--lr", type=float, default=0.05)
    p.add_argument("--negatives", type=int, default=5)
    p.add_argument("--walk-len", type=int, default=5)
    p.add_argument("--pairs-per-node", type=int, default=2)
    p.add_argument("--neighbor-samples", type=int, default=10)
    p.add_argument("--reindex", action="store_true")
    p.add_argument("--seed", type=int, default=0)


def _add_sample(sub):
    p = sub.add_parser("sample", help="build the random-walk subgraph dataset")
    p.add_argument("--graph", required=True)
    p.add_argument("--features", default=None)
    p.add_argument("--embeddings", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--capacity", type=int, default=12)
    p.add_argument("--walks-per-node", type=int, default=8)
    p.add_argument("--reindex", action="store_true")
    p.add_argument("--seed", type=int, default=0)


def _add_train(sub):
    p = sub.add_parser("train", help="train the diffusion model on a dataset")
    p.add_argument("--dataset", required=True)
    p.add_argument("--out", required=True, help="model checkpoint path")
    p.add_argument("--timesteps", type=int, default=200)
    p.add_argument("--steps", type=int, default=3000)
    p.add_argument("--hidden", type=int, default=64)
    p.add_argument("--blocks", type=int, default=3)
    p.add_argument("--lr", type=float, default=0.02)
    p.add_argument("--optimizer", choices=["sgd", "adam"], default="sgd")
    p.add_argument("--seed", type=int, default=0)


def _add_generate(sub):
    p = sub.add_parser("generate", help="sample synthetic subgraphs from a model")
    p.add_argument("--model", required=True)
    p.add_argument("--dataset", required=True,
                   help="training dataset; supplies the size histogram")
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=0)


def _add_assemble(sub):
    p = sub.add_parser("assemble", help="merge generated subgraphs into one graph")
    p.add_argument("--generated", required=True)
    p.add_argument("--method", choices=["node-agg", "threshold"], required=True)
    p.add_argument("--nodes", type=int, default=None, help="target node count (node-agg)")
    p.add_argument("--delta", type=float, default=None, help="distance threshold (threshold)")
    p.add_argument("--out", required=True, help="output edge-list path")
    p.add_argument("--members", default=None, help="optional members manifest JSON")


def _add_metrics(sub):
    p = sub.add_parser("metrics", help="compute graph statistics")
    p.add_argument("--graph", required=True)
    p.add_argument("--original", default=None,
                   help="optional original graph for relative distances")
    p.add_argument("--out", default=None, help="report JSON path (default: stdout)")


def _add_benchmark(sub):
    p = sub.add_parser("benchmark", help="run the full benchmark grid")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True, help="output CSV path")
    p.add_argument("--datasets", default=None, help="comma list, overrides config")
    p.add_argument("--methods", default=None, help="comma list, overrides config")
    p.add_argument("--sizes", default=None, help="comma list, overrides config")
    p.add_argument("--seeds", type=int, default=None)
    p.add_argument("--base-seed", type=int, default=None)
    p.add_argument("--workers", type=int, default=None,
                   help="worker threads (default: LGSG_WORKERS or 1)")


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="lgsg")
    sub = parser.add_subparsers(dest="command", required=True)
    for add in (_add_embed, _add_sample, _add_train, _add_generate,
                _add_assemble, _add_metrics, _add_benchmark):
        add(sub)
    args = parser.parse_args(argv)

    if args.command == "embed":
        g = load_edge_list(args.graph, features_path=args.features, reindex=args.reindex)
        cfg = EmbedConfig(
            dim=args.dim, layers=args.layers, epochs=args.epochs, lr=args.lr,
            negatives=args.negatives, walk_len=args.walk_len,
            pairs_per_node=args.pairs_per_node, neighbor_sample_size=args.neighbor_samples,
        )
        emb = train_embeddings(g, cfg, seed=args.seed)
        save_embeddings(emb, args.out, manifest={"seed": args.seed, "config": cfg.to_dict()})
        print(f"wrote {emb.n}x{emb.d} embeddings to {args.out}")
        return 0

    if args.command == "sample":
        g = load_edge_list(args.graph, features_path=args.features, reindex=args.reindex)
        emb = load_embeddings(args.embeddings)
        samples = build_subgraph_dataset(g, emb, args.walks_per_node, args.capacity, seed=args.seed)
        save_dataset(samples, args.out)
        print(f"wrote {len(samples)} subgraph samples to {args.out}")
        return 0

    if args.command == "train":
        dataset = load_dataset(args.dataset)
        cfg = DiffusionConfig(
            timesteps=args.timesteps, steps=args.steps, hidden=args.hidden,
            blocks=args.blocks, lr=args.lr, optimizer=args.optimizer,
        )
        losses = []
        model = train_diffusion(dataset, cfg, seed=args.seed, loss_out=losses)
        save_denoiser(model, args.out)
        print(f"trained {args.steps} steps; final loss {losses[-1]:.4f}; wrote {args.out}")
        return 0

    if args.command == "generate":
        model = load_denoiser(args.model)
        sizes = empirical_sizes(load_dataset(args.dataset))
        samples = sample_subgraphs(model, args.count, sizes, seed=args.seed)
        save_generated(samples, args.out, capacity=model.capacity)
        print(f"wrote {len(samples)} generated subgraphs to {args.out}")
        return 0

    if args.command == "assemble":
        samples = load_generated(args.generated)
        inp = AssemblyInput.from_samples(samples)
        if args.method == "node-agg":
            if args.nodes is None:
                parser.error("--nodes is required for node-agg")
            assembled = node_aggregation(inp, args.nodes)
        else:
            if args.delta is None:
                parser.error("--delta is required for threshold")
            assembled = threshold_matching(inp, args.delta)
        save_edge_list(assembled.graph, args.out)
        if args.members:
            with open(args.members, "w", encoding="utf-8") as fh:
                json.dump({str(i): m for i, m in enumerate(assembled.members)}, fh, indent=0)
        print(f"assembled graph: {assembled.graph.n} nodes, "
              f"{assembled.graph.n_edges} edges -> {args.out}")
        return 0

    if args.command == "metrics":
        g = load_edge_list(args.graph)
        report = compute_report(g)
        payload = report.to_dict()
        if args.original:
            orig = compute_report(load_edge_list(args.original))
            payload["relative_to_original"] = relative_distance(orig, report)
        text = json.dumps(payload, indent=2)
        if args.out:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(text + "\n")
        else:
            print(text)
        return 0

    if args.command == "benchmark":
        overrides = {
            "datasets": args.datasets.split(",") if args.datasets else None,
            "methods": args.methods.split(",") if args.methods else None,
            "sizes": [float(s) for s in args.sizes.split(",")] if args.sizes else None,
            "seeds": args.seeds,
            "base_seed": args.base_seed,
        }
        config = load_config(args.config, overrides=overrides)
        records = run_benchmark(config, args.out, workers=args.workers)
        errors = [r for r in records if r.error is not None]
        print(f"wrote {len(records)} records to {args.out}; {len(errors)} cell error(s)")
        for r in errors:
            print(f"  {r.dataset}/{r.method}/{r.size_target}/seed={r.seed}: {r.error}",
                  file=sys.stderr)
        return 1 if errors else 0

    parser.error(f"unknown command {args.command!r}")
    return 2


if __name__ == "__main__":
    sys.exit(main())
