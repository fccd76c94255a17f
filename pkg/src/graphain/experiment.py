"""End-to-end experiment driver.

Per seed: build or load the graph, propagate once (the embedding is
label-independent), train the teacher, run the curriculum pipeline, and
evaluate.  The run seed drives the synthetic generation, split, feature
noise, and reducer through independent child streams, so seed lists compose
without interaction.
"""

from __future__ import annotations

import time
from contextlib import contextmanager
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .classifier import accuracy, make_reducer, predict, softmax_cross_entropy, train_linear
from .config import ExperimentConfig, config_hash, render_config
from .curriculum import (
    aux_from_graph,
    build_curriculum,
    build_knn_aux_graph,
    entropy_filter,
    estimate_labels_teacher,
    run_curriculum,
    smooth_labels,
    supervised_schedule,
)
from .diagnostics import layer_sweep, records_to_csv
from .errors import GraphainError, MissingMaskError
from .graph import Graph, normalized_adjacency
from .io import load_dataset
from .labels import one_hot_matrix
from .propagation import pairnorm_step, run_fuzzy_r_softgraphain, sgc_propagate
from .synthetic import add_feature_noise, gen_gaussian_cluster_graph, with_masks

RESULTS_HEADER = "seed,config_hash,task,split,accuracy,loss,wall_ms"


@dataclass(frozen=True)
class ResultRow:
    seed: int
    config_hash: str
    task: int
    split: str
    accuracy: float
    loss: float
    wall_ms: float


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def rows_to_csv(rows) -> str:
    lines = [RESULTS_HEADER]
    for r in rows:
        lines.append(
            f"{r.seed},{r.config_hash},{r.task},{r.split},"
            f"{_fmt(r.accuracy)},{_fmt(r.loss)},{_fmt(r.wall_ms)}"
        )
    return "\n".join(lines) + "\n"


def _child_seeds(seed: int) -> dict:
    ss = np.random.SeedSequence(seed)
    graph, split, noise, reducer = ss.spawn(4)
    return {
        "graph": graph.generate_state(1)[0],
        "split": split.generate_state(1)[0],
        "noise": noise.generate_state(1)[0],
        "reducer": reducer.generate_state(1)[0],
    }


@contextmanager
def _stage(name: str):
    try:
        yield
    except GraphainError as err:
        msg = err.args[0] if err.args else ""
        err.args = (f"[stage {name}] {msg}",)
        raise


def prepare_graph(cfg: ExperimentConfig, seed: int) -> Graph:
    """Build the seeded synthetic graph (with split) or load the dataset."""
    kids = _child_seeds(seed)
    if cfg.synthetic is not None:
        spec = replace(cfg.synthetic, seed=int(kids["graph"]))
        g = gen_gaussian_cluster_graph(spec)
        g = with_masks(g, cfg.train_frac, cfg.val_frac, int(kids["split"]))
    else:
        g = load_dataset(cfg.dataset_path, require_masks=True)
    if cfg.noisy_features:
        g = add_feature_noise(g, int(kids["noise"]))
    return g


def _make_reducer(cfg: ExperimentConfig, g: Graph, seed: int):
    if g.feature_dim == cfg.embedding_dim:
        return None
    return make_reducer(g.feature_dim, cfg.embedding_dim, int(_child_seeds(seed)["reducer"]))


def compute_embedding(cfg: ExperimentConfig, g: Graph, seed: int):
    """Embedding of the configured variant; returns (embedding, reducer)."""
    reducer = _make_reducer(cfg, g, seed)
    x = g.features if reducer is None else g.features @ reducer
    if cfg.variant == "rsoft":
        h = run_fuzzy_r_softgraphain(g, cfg.propagation, reducer=reducer).embedding
    elif cfg.variant == "sgc":
        op = normalized_adjacency(g, cfg.propagation.operator_mode)
        h = sgc_propagate(x, op, cfg.propagation.layers)
    else:
        op = normalized_adjacency(g, cfg.propagation.operator_mode)
        h = x
        for _ in range(cfg.propagation.layers):
            h = pairnorm_step(h, op, 1.0)
    return h, reducer


def _build_aux(cfg: ExperimentConfig, g: Graph, h: np.ndarray):
    mode = cfg.curriculum.aux_mode
    if mode == "input_graph":
        return aux_from_graph(g)
    if mode == "feature_knn":
        return build_knn_aux_graph(
            g.features, cfg.curriculum.knn_k, cfg.curriculum.gamma_prime, mode=mode
        )
    return build_knn_aux_graph(
        h, cfg.curriculum.knn_k, cfg.curriculum.gamma_prime, mode=mode
    )


def run_seed(cfg: ExperimentConfig, seed: int, with_curriculum: bool = True):
    """One seed of the pipeline; returns (rows, curriculum result, embedding)."""
    digest = config_hash(cfg)
    with _stage("dataset"):
        g = prepare_graph(cfg, seed)
        if g.train_mask.size == 0:
            raise MissingMaskError("train mask is empty")
        if (g.labels[g.train_mask] < 0).any():
            raise MissingMaskError("train mask contains unlabeled nodes")
    with _stage("propagation"):
        h, _ = compute_embedding(cfg, g, seed)
    num_classes = g.num_classes

    if with_curriculum:
        with _stage("teacher"):
            teacher_labels = one_hot_matrix(
                g.labels[g.train_mask], g.train_mask, g.n, num_classes
            )
            teacher = train_linear(h, teacher_labels, g.train_mask, cfg.train)
            _, teacher_probs = predict(h, teacher)
        with _stage("label-estimation"):
            estimated = estimate_labels_teacher(
                teacher_probs, g.labels[g.train_mask], g.train_mask
            )
        with _stage("entropy-filter"):
            filtered = entropy_filter(
                estimated, cfg.curriculum.mask_ratio, labeled_set=g.train_mask
            )
        with _stage("aux-graph"):
            aux = _build_aux(cfg, g, h)
        with _stage("label-smoothing"):
            snapshots = smooth_labels(aux, filtered, cfg.curriculum.n_t)
        schedule = build_curriculum(
            snapshots,
            cfg.curriculum.pacing_epochs,
            (g.train_mask, g.labels[g.train_mask]),
        )
    else:
        snapshots = None
        schedule = supervised_schedule(g.train_mask, g.labels[g.train_mask])

    with _stage("curriculum"):
        result = run_curriculum(
            g,
            cfg.propagation,
            schedule,
            cfg.train,
            embeddings=h,
            reset_on_finetune=cfg.curriculum.reset_on_finetune,
        )

    rows = []
    for m in result.metrics:
        wall = 0.0 if cfg.deterministic_timing else m.wall_ms
        rows.append(
            ResultRow(seed, digest, m.index, "train", m.train_accuracy, m.train_loss, wall)
        )
        rows.append(
            ResultRow(seed, digest, m.index, "val", m.val_accuracy, m.val_loss, wall)
        )

    with _stage("evaluation"):
        final_index = result.metrics[-1].index
        pred, _ = predict(h, result.classifier)
        start = time.perf_counter()
        test_set = (
            g.test_mask[g.labels[g.test_mask] >= 0] if g.test_mask.size else g.test_mask
        )
        if test_set.size:
            test_truth = one_hot_matrix(g.labels[test_set], test_set, g.n, num_classes)
            test_acc = accuracy(pred, g.labels, test_set)
            test_loss = softmax_cross_entropy(
                h, test_truth, result.classifier.w, test_set
            )
            wall = 0.0 if cfg.deterministic_timing else (time.perf_counter() - start) * 1e3
            rows.append(
                ResultRow(seed, digest, final_index, "test", test_acc, test_loss, wall)
            )
    return rows, result, g, snapshots


def run_experiment(cfg: ExperimentConfig, with_curriculum: bool = True, write_files: bool = True):
    """All seeds in order; optionally writes results, diagnostics, and the
    config echo under cfg.output_dir."""
    all_rows = []
    for seed in cfg.seeds:
        rows, _, g, _ = run_seed(cfg, seed, with_curriculum=with_curriculum)
        all_rows.extend(rows)
        if write_files:
            out = Path(cfg.output_dir)
            out.mkdir(parents=True, exist_ok=True)
            reducer = _make_reducer(cfg, g, seed)
            records = layer_sweep(
                g, cfg.propagation, variant=cfg.variant, reducer=reducer
            )
            records_to_csv(records, out / f"diagnostics_seed{seed}.csv")
    if write_files:
        out = Path(cfg.output_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / "results.csv").write_text(rows_to_csv(all_rows), encoding="utf-8")
        (out / "config_echo.txt").write_text(render_config(cfg), encoding="utf-8")
    return all_rows
