"""Dataset directory format.

edges.tsv      one `i<TAB>j` pair per line, 0-based, `#` starts a comment
features.csv   row i = features of node i, no header
labels.csv     `node,label` with a header line (optional file)
masks.csv      `node,split` with split in {train, val, test} (optional file)
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .errors import IndexOutOfRangeError, MissingMaskError, ParseError
from .graph import Graph, build_graph

EDGES_FILE = "edges.tsv"
FEATURES_FILE = "features.csv"
LABELS_FILE = "labels.csv"
MASKS_FILE = "masks.csv"

SPLIT_NAMES = ("train", "val", "test")


def _read_lines(path: Path):
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as err:
        raise ParseError(path, 0, f"cannot read file: {err}") from err
    for no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield no, line


def _load_edges(path: Path):
    edges = []
    for no, line in _read_lines(path):
        toks = line.split("\t")
        if len(toks) == 1:
            toks = line.split()
        if len(toks) != 2:
            raise ParseError(path, no, f"expected `i<TAB>j`, got {line!r}")
        try:
            edges.append((int(toks[0]), int(toks[1])))
        except ValueError as err:
            raise ParseError(path, no, f"bad node index: {err}") from err
    return edges


def _load_features(path: Path) -> np.ndarray:
    rows = []
    width = None
    for no, line in _read_lines(path):
        toks = line.split(",")
        if width is None:
            width = len(toks)
        elif len(toks) != width:
            raise ParseError(path, no, f"expected {width} columns, got {len(toks)}")
        try:
            rows.append([float(t) for t in toks])
        except ValueError as err:
            raise ParseError(path, no, f"bad float: {err}") from err
    if not rows:
        raise ParseError(path, 1, "empty feature file")
    return np.asarray(rows, dtype=np.float64)


def _load_pairs(path: Path, header: str):
    """Parse `node,value` lines, skipping an optional header."""
    out = []
    for no, line in _read_lines(path):
        if no == 1 and line.replace(" ", "") == header:
            continue
        toks = [t.strip() for t in line.split(",")]
        if len(toks) != 2:
            raise ParseError(path, no, f"expected `node,value`, got {line!r}")
        try:
            node = int(toks[0])
        except ValueError as err:
            raise ParseError(path, no, f"bad node index: {err}") from err
        out.append((no, node, toks[1]))
    return out


def load_dataset(directory, require_masks: bool = False) -> Graph:
    """Read a dataset directory back into a Graph.

    Labels and masks are optional files; ``require_masks`` turns a missing or
    empty train split into MissingMaskError.
    """
    directory = Path(directory)
    features = _load_features(directory / FEATURES_FILE)
    n = features.shape[0]
    edges = _load_edges(directory / EDGES_FILE)

    labels = None
    labels_path = directory / LABELS_FILE
    if labels_path.exists():
        labels = np.full(n, -1, dtype=np.int64)
        for no, node, value in _load_pairs(labels_path, "node,label"):
            if not 0 <= node < n:
                raise IndexOutOfRangeError(
                    f"{labels_path}:{no}: node {node} outside [0, {n})"
                )
            try:
                labels[node] = int(value)
            except ValueError as err:
                raise ParseError(labels_path, no, f"bad label: {err}") from err

    masks = None
    masks_path = directory / MASKS_FILE
    if masks_path.exists():
        split_sets = {name: [] for name in SPLIT_NAMES}
        for no, node, value in _load_pairs(masks_path, "node,split"):
            if not 0 <= node < n:
                raise IndexOutOfRangeError(
                    f"{masks_path}:{no}: node {node} outside [0, {n})"
                )
            if value not in SPLIT_NAMES:
                raise ParseError(masks_path, no, f"unknown split {value!r}")
            split_sets[value].append(node)
        masks = tuple(split_sets[name] for name in SPLIT_NAMES)
    elif require_masks:
        raise MissingMaskError(f"{masks_path} is missing")

    g = build_graph(edges, n, features, y=labels, masks=masks)
    if require_masks and g.train_mask.size == 0:
        raise MissingMaskError("dataset has an empty train split")
    return g


def save_dataset(g: Graph, directory) -> None:
    """Write a Graph as a dataset directory (labels/masks only when present)."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)

    edge_lines = [f"{i}\t{j}" for i, j in g.edges]
    (directory / EDGES_FILE).write_text(
        "\n".join(edge_lines) + ("\n" if edge_lines else ""), encoding="utf-8"
    )

    feat_lines = [
        ",".join(format(v, ".17g") for v in row) for row in g.features
    ]
    (directory / FEATURES_FILE).write_text(
        "\n".join(feat_lines) + "\n", encoding="utf-8"
    )

    labeled = np.flatnonzero(g.labels >= 0)
    if labeled.size:
        lines = ["node,label"]
        lines.extend(f"{int(v)},{int(g.labels[v])}" for v in labeled)
        (directory / LABELS_FILE).write_text("\n".join(lines) + "\n", encoding="utf-8")

    if g.train_mask.size or g.val_mask.size or g.test_mask.size:
        lines = ["node,split"]
        for name, mask in zip(SPLIT_NAMES, (g.train_mask, g.val_mask, g.test_mask)):
            lines.extend(f"{int(v)},{name}" for v in mask)
        (directory / MASKS_FILE).write_text("\n".join(lines) + "\n", encoding="utf-8")
