"""Command-line pipeline: validate -> split -> train -> embed -> graph build ->
export / recommend / score / gaps / serve, plus a synthetic dataset generator.

Every stage reads and writes plain files, so each step is independently
inspectable and reproducible from its inputs plus --seed.

Exit codes: 0 success, 1 validation or usage failure, 2 I/O failure,
3 internal error.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import catalog as cat
from . import comparisons as cmp
from . import designer_loop as loop
from . import graph_io
from . import retrieval as ret
from . import simgraph as sg
from . import style_model as sm
from . import synth

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_IO = 2
EXIT_INTERNAL = 3


class CliError(Exception):
    """Validation failure raised by command implementations."""


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage errors; the contract wants 1
    def error(self, message: str):
        self.print_usage(sys.stderr)
        raise CliError(message)


def _load_config_file(path: str) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        raw = json.load(fh)
    if not isinstance(raw, dict):
        raise CliError(f"{path}: config must be a JSON object")
    return raw


def _merge_config(args: argparse.Namespace, defaults: dict) -> None:
    """Fill unset (None) args from --config, then from per-key defaults."""
    file_values: dict = {}
    if getattr(args, "config", None):
        file_values = _load_config_file(args.config)
    for key, value in file_values.items():
        dest = key.replace("-", "_")
        if getattr(args, dest, None) is None and hasattr(args, dest):
            setattr(args, dest, value)
    for dest, value in defaults.items():
        if getattr(args, dest, None) is None:
            setattr(args, dest, value)


def _require(args: argparse.Namespace, *names: str) -> None:
    missing = [f"--{n.replace('_', '-')}" for n in names if getattr(args, n, None) is None]
    if missing:
        raise CliError(f"missing required options: {', '.join(missing)}")


def _load_dataset(args) -> tuple[cat.ProductCatalog, cat.ImageSet, cat.VoteTable]:
    _require(args, "products", "images", "votes")
    return cat.load_catalog(args.products, args.images, args.votes)


def _read_split(path: str) -> cmp.DatasetSplit:
    with open(path, "r", encoding="utf-8") as fh:
        raw = json.load(fh)
    return cmp.DatasetSplit(
        train=tuple(raw["train"]),
        validation=tuple(raw["validation"]),
        test=tuple(raw["test"]),
        ratios=tuple(raw["ratios"]),
        seed=int(raw["seed"]),
    )


def _write_split(split: cmp.DatasetSplit, path: str) -> None:
    payload = {
        "seed": split.seed,
        "ratios": list(split.ratios),
        "train": list(split.train),
        "validation": list(split.validation),
        "test": list(split.test),
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, separators=(",", ":"))
        fh.write("\n")


def cmd_validate(args) -> int:
    _require(args, "products", "images", "votes")
    report = cat.validate_files(args.products, args.images, args.votes)
    print(f"products={report.product_count}")
    print(f"images={report.image_count}")
    print(f"votes={report.vote_count}")
    for group, count in report.group_counts.items():
        print(f"group[{group}]={count}")
    for style, count in report.style_counts.items():
        print(f"votes[{style}]={count}")
    for warning in report.warnings:
        print(f"warning: {warning}", file=sys.stderr)
    if not report.ok:
        for error in report.errors:
            print(f"error: {error}", file=sys.stderr)
        return EXIT_VALIDATION
    print("ok")
    return EXIT_OK


def cmd_split(args) -> int:
    _merge_config(args, {"seed": 0})
    _, images, _ = _load_dataset(args)
    _require(args, "out")
    split = cmp.split_dataset(images.ids, seed=args.seed)
    _write_split(split, args.out)
    sizes = split.sizes
    print(f"train={sizes[0]} validation={sizes[1]} test={sizes[2]} -> {args.out}")
    return EXIT_OK


def cmd_train(args) -> int:
    _merge_config(
        args,
        {
            "seed": 0,
            "hidden": sm.DEFAULT_HIDDEN,
            "lr": 0.01,
            "epochs": 50,
            "batch_size": 32,
            "comparisons_per_epoch": 512,
            "threshold_x": 1,
        },
    )
    _, images, votes = _load_dataset(args)
    _require(args, "split", "checkpoint")
    split = _read_split(args.split)
    config = sm.TrainConfig(
        learning_rate=float(args.lr),
        epochs=int(args.epochs),
        batch_size=int(args.batch_size),
        comparisons_per_epoch=int(args.comparisons_per_epoch),
        threshold_x=int(args.threshold_x),
        seed=int(args.seed),
    )
    model = sm.init_model(images.dim, hidden=int(args.hidden), seed=int(args.seed))
    trained, history = sm.train(model, images, votes, split, config)
    sm.save_checkpoint(trained, args.checkpoint)
    first, last = history.epoch_losses[0], history.epoch_losses[-1]
    print(f"epochs={config.epochs} first_loss={first:.6f} last_loss={last:.6f}")
    print(f"validation_accuracy={history.validation_accuracy[-1]:.4f}")
    print(f"checkpoint={args.checkpoint}")
    return EXIT_OK


def cmd_eval(args) -> int:
    _merge_config(args, {"k": 5})
    catalog, images, votes = _load_dataset(args)
    _require(args, "split", "checkpoint")
    split = _read_split(args.split)
    model = sm.load_checkpoint(args.checkpoint)
    estimation = sm.evaluate_estimation(model, images, split.test, votes)
    store = ret.embed_all(model, images, catalog)
    retrieval = ret.retrieval_accuracy(store, split.test, votes, k=int(args.k))
    print(f"test_images={len(split.test)}")
    print(f"overall_accuracy={estimation.overall:.6f}")
    for style in cat.Style:
        print(f"accuracy_{style.label}={estimation.per_style[style]:.6f}")
    print(f"retrieval_k={int(args.k)}")
    print(f"retrieval_accuracy={retrieval:.6f}")
    return EXIT_OK


def cmd_embed(args) -> int:
    _merge_config(args, {})
    catalog, images, _ = _load_dataset(args)
    _require(args, "checkpoint", "embeddings")
    model = sm.load_checkpoint(args.checkpoint)
    store = ret.embed_all(model, images, catalog)
    ret.write_embeddings(store, args.embeddings)
    print(
        f"images={len(store.image_ids)} products={len(store.product_skus)} "
        f"skipped={len(store.skipped_products)} -> {args.embeddings}"
    )
    return EXIT_OK


def cmd_graph_build(args) -> int:
    _merge_config(
        args,
        {
            "wmin": sg.DEFAULT_W_MIN,
            "wmax": sg.DEFAULT_W_MAX,
            "min_group_size": sg.DEFAULT_MIN_GROUP_SIZE,
        },
    )
    catalog, images, _ = _load_dataset(args)
    _require(args, "embeddings", "graph")
    store = ret.read_embeddings(args.embeddings)
    graph = sg.build_graph(store, catalog)
    built_edges = graph.edge_count
    graph = sg.remove_overlap_edges(graph, images)
    graph = sg.filter_edges(graph, w_min=float(args.wmin), w_max=float(args.wmax))
    graph = sg.filter_small_groups(graph, min_group_size=int(args.min_group_size))
    fmt = args.format or graph_io.guess_format(args.graph)
    graph_io.export_graph(graph, fmt, args.graph)
    print(
        f"nodes={graph.node_count} edges={graph.edge_count} "
        f"(complete={built_edges}, duplicates={len(graph.duplicate_pairs)}) -> {args.graph}"
    )
    return EXIT_OK


def cmd_graph_export(args) -> int:
    _merge_config(args, {})
    _require(args, "graph", "out", "format")
    loaded = graph_io.read_graph(args.graph, graph_io.guess_format(args.graph))
    graph = graph_io.similarity_from_loaded(loaded)
    graph_io.export_graph(graph, args.format, args.out)
    print(f"nodes={graph.node_count} edges={graph.edge_count} -> {args.out}")
    return EXIT_OK


def cmd_recommend(args) -> int:
    _merge_config(args, {"k": 5})
    _require(args, "embeddings", "sku")
    store = ret.read_embeddings(args.embeddings)
    try:
        ranked = ret.top_k(store, args.sku, int(args.k), scope="products")
    except KeyError:
        raise CliError(f"unknown sku {args.sku!r}") from None
    for sku, dist in ranked.entries:
        print(f"{sku}\t{dist:.6f}")
    if ranked.truncated:
        print(f"note: only {len(ranked.entries)} neighbors available", file=sys.stderr)
    return EXIT_OK


def _parse_features(raw: str) -> list[float]:
    text = raw.strip()
    if not text.startswith("["):
        with open(text, "r", encoding="utf-8") as fh:
            text = fh.read().strip()
    values = json.loads(text)
    if not isinstance(values, list) or not all(
        isinstance(x, (int, float)) and not isinstance(x, bool) for x in values
    ):
        raise CliError("features must be a JSON array of numbers (inline or in a file)")
    return [float(x) for x in values]


def _engine_from_args(args) -> loop.EngineState:
    _require(args, "products", "checkpoint", "embeddings", "graph")
    config = loop.EngineConfig(
        products_path=args.products,
        checkpoint_path=args.checkpoint,
        embeddings_path=args.embeddings,
        graph_path=args.graph,
        w_min=float(args.wmin),
        w_max=float(args.wmax),
        default_k=int(args.k),
        port=int(getattr(args, "port", None) or 8000),
        admin_token=getattr(args, "admin_token", None),
    )
    return loop.load_engine(config)


def cmd_score(args) -> int:
    _merge_config(args, {"k": 5, "wmin": sg.DEFAULT_W_MIN, "wmax": sg.DEFAULT_W_MAX})
    _require(args, "features")
    engine = _engine_from_args(args)
    features = _parse_features(args.features)
    report = loop.score_design(engine, np.asarray(features), int(args.k))
    payload = {
        "style_probs": list(report.style_probs),
        "top_neighbors": [n._asdict() for n in report.top_neighbors],
        "group_connections": report.group_connections,
        "similarity_score": report.similarity_score,
        "flags": list(report.flags),
    }
    print(json.dumps(payload, indent=2, sort_keys=True))
    return EXIT_OK


def cmd_gaps(args) -> int:
    _merge_config(args, {})
    _require(args, "graph")
    loaded = graph_io.read_graph(args.graph, graph_io.guess_format(args.graph))
    graph = graph_io.similarity_from_loaded(loaded)
    gaps = loop.find_gaps(graph)
    payload = {
        "groups": [g._asdict() for g in gaps.groups],
        "zero_weight_pairs": [list(p) for p in gaps.zero_weight_pairs],
    }
    print(json.dumps(payload, indent=2, sort_keys=True))
    return EXIT_OK


def cmd_serve(args) -> int:
    from .service import serve

    _merge_config(
        args,
        {
            "k": 5,
            "wmin": sg.DEFAULT_W_MIN,
            "wmax": sg.DEFAULT_W_MAX,
            "port": 8000,
            "host": "127.0.0.1",
        },
    )
    _require(args, "products", "checkpoint", "embeddings", "graph")
    config = loop.EngineConfig(
        products_path=args.products,
        checkpoint_path=args.checkpoint,
        embeddings_path=args.embeddings,
        graph_path=args.graph,
        w_min=float(args.wmin),
        w_max=float(args.wmax),
        default_k=int(args.k),
        port=int(args.port),
        admin_token=args.admin_token,
    )
    serve(config, host=args.host)
    return EXIT_OK


def cmd_synth(args) -> int:
    _merge_config(
        args,
        {
            "seed": 42,
            "n_products": 400,
            "n_images": 1200,
            "dim": 16,
            "n_experts": 10,
            "fidelity": 0.8,
        },
    )
    _require(args, "out_dir")
    config = synth.SynthConfig(
        n_products=int(args.n_products),
        n_images=int(args.n_images),
        dim=int(args.dim),
        n_experts=int(args.n_experts),
        expert_fidelity=float(args.fidelity),
        seed=int(args.seed),
    )
    dataset = synth.generate_dataset(config)
    paths = synth.write_dataset(dataset, args.out_dir)
    print(
        f"products={len(dataset.catalog)} images={len(dataset.images)} "
        f"votes={len(dataset.votes)} -> {args.out_dir}"
    )
    for name in ("products", "images", "votes"):
        print(f"{name}={paths[name]}")
    return EXIT_OK


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="JSON config file; explicit flags win")
    parser.add_argument("--seed", type=int, help="random seed (default 0)")


def _add_dataset(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--products", help="products.jsonl path")
    parser.add_argument("--images", help="images.jsonl path")
    parser.add_argument("--votes", help="votes.jsonl path")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="stylesim", description=__doc__)
    sub = parser.add_subparsers(dest="command", metavar="command")

    p = sub.add_parser("validate", help="check dataset files & print a summary")
    _add_common(p)
    _add_dataset(p)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("split", help="write a train/validation/test split")
    _add_common(p)
    _add_dataset(p)
    p.add_argument("--out", help="output split JSON path")
    p.set_defaults(func=cmd_split)

    p = sub.add_parser("train", help="train the style model")
    _add_common(p)
    _add_dataset(p)
    p.add_argument("--split", help="split JSON from `split`")
    p.add_argument("--checkpoint", help="output checkpoint path")
    p.add_argument("--hidden", type=int, help="hidden layer width (default 32)")
    p.add_argument("--epochs", type=int, help="training epochs (default 50)")
    p.add_argument("--lr", type=float, help="learning rate (default 0.01)")
    p.add_argument("--batch-size", type=int, help="mini-batch size (default 32)")
    p.add_argument(
        "--comparisons-per-epoch", type=int, help="comparisons sampled per epoch (default 512)"
    )
    p.add_argument("--threshold-x", type=int, help="vote margin for a decisive label (default 1)")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", help="estimation + retrieval accuracy on the test split")
    _add_common(p)
    _add_dataset(p)
    p.add_argument("--split", help="split JSON from `split`")
    p.add_argument("--checkpoint", help="model checkpoint")
    p.add_argument("--k", type=int, help="retrieval depth (default 5)")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("embed", help="write image + product embeddings")
    _add_common(p)
    _add_dataset(p)
    p.add_argument("--checkpoint", help="model checkpoint")
    p.add_argument("--embeddings", help="output embeddings.jsonl path")
    p.set_defaults(func=cmd_embed)

    graph = sub.add_parser("graph", help="similarity graph operations")
    gsub = graph.add_subparsers(dest="graph_command", metavar="subcommand")

    p = gsub.add_parser("build", help="build + filter the product graph")
    _add_common(p)
    _add_dataset(p)
    p.add_argument("--embeddings", help="embeddings.jsonl from `embed`")
    p.add_argument("--graph", help="output graph path (.graphml/.gexf/.csv)")
    p.add_argument("--format", choices=graph_io.FORMATS, help="override output format")
    p.add_argument("--wmin", type=float, help="minimum edge weight (default 1)")
    p.add_argument("--wmax", type=float, help="maximum edge weight (default 10)")
    p.add_argument("--min-group-size", type=int, help="minimum products per group (default 10)")
    p.set_defaults(func=cmd_graph_build)

    p = gsub.add_parser("export", help="re-export a graph in another format")
    _add_common(p)
    p.add_argument("--graph", help="input graph (.graphml/.gexf)")
    p.add_argument("--format", choices=graph_io.FORMATS, help="output format")
    p.add_argument("--out", help="output path")
    p.set_defaults(func=cmd_graph_export)

    p = sub.add_parser("recommend", help="nearest products for a sku")
    _add_common(p)
    p.add_argument("--embeddings", help="embeddings.jsonl from `embed`")
    p.add_argument("--sku", help="seed product sku")
    p.add_argument("--k", type=int, help="neighbors to list (default 5)")
    p.set_defaults(func=cmd_recommend)

    p = sub.add_parser("score", help="score a candidate design feature vector")
    _add_common(p)
    p.add_argument("--products", help="products.jsonl path")
    p.add_argument("--checkpoint", help="model checkpoint")
    p.add_argument("--embeddings", help="embeddings.jsonl from `embed`")
    p.add_argument("--graph", help="graph file from `graph build`")
    p.add_argument("--features", help="JSON array of numbers, or a path to one")
    p.add_argument("--k", type=int, help="neighbors to report (default 5)")
    p.add_argument("--wmin", type=float, help="minimum edge weight (default 1)")
    p.add_argument("--wmax", type=float, help="maximum edge weight (default 10)")
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("gaps", help="report graph connectivity gaps")
    _add_common(p)
    p.add_argument("--graph", help="graph file from `graph build`")
    p.set_defaults(func=cmd_gaps)

    p = sub.add_parser("serve", help="serve the scoring HTTP API")
    _add_common(p)
    p.add_argument("--products", help="products.jsonl path")
    p.add_argument("--checkpoint", help="model checkpoint")
    p.add_argument("--embeddings", help="embeddings.jsonl from `embed`")
    p.add_argument("--graph", help="graph file from `graph build`")
    p.add_argument("--k", type=int, help="default neighbor count (default 5)")
    p.add_argument("--wmin", type=float, help="minimum edge weight (default 1)")
    p.add_argument("--wmax", type=float, help="maximum edge weight (default 10)")
    p.add_argument("--port", type=int, help="listen port (default 8000)")
    p.add_argument("--host", help="bind address (default 127.0.0.1)")
    p.add_argument("--admin-token", help="token required by /admin endpoints")
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("synth", help="generate the synthetic benchmark dataset")
    _add_common(p)
    p.add_argument("--out-dir", help="output directory for the three jsonl files")
    p.add_argument("--n-products", type=int, help="product count (default 400)")
    p.add_argument("--n-images", type=int, help="image count (default 1200)")
    p.add_argument("--dim", type=int, help="feature dimension (default 16)")
    p.add_argument("--n-experts", type=int, help="simulated experts (default 10)")
    p.add_argument("--fidelity", type=float, help="true-style vote probability (default 0.8)")
    p.set_defaults(func=cmd_synth)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        func = getattr(args, "func", None)
        if func is None:
            parser.print_help(sys.stderr)
            return EXIT_VALIDATION
        return func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (cat.CatalogError, cmp.SamplingError, ValueError, KeyError) as exc:
        message = exc.args[0] if exc.args else exc
        print(f"error: {message}", file=sys.stderr)
        return EXIT_VALIDATION
    except KeyboardInterrupt:
        return 130
    except Exception as exc:  # internal invariant violation
        print(f"internal error: {exc!r}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
