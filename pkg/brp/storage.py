"""
On-disk format for branched rough paths.

  <name>.json  header: schema_version, gamma, level, alphabet_size, grid times,
               tree list (canonical tree JSON), data file name, metadata
  <name>.csv   long form: tree, i, j, value for grid pairs i > j
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np
import pandas as pd

import config
from forest.trees import tree_from_json, tree_to_json
from increments.grid import Grid
from increments.increment import Increment2
from metrics.report import log

from .path import BranchedRoughPath


def _tree_key(t) -> str:
    return json.dumps(tree_to_json(t), separators=(",", ":"))


def save_brp(X: BranchedRoughPath, path: str | Path) -> Path:
    """Write X as <path>.json + <path>.csv; returns the header path."""
    header_path = Path(path).with_suffix(".json")
    data_path = header_path.with_suffix(".csv")
    header_path.parent.mkdir(parents=True, exist_ok=True)

    n = X.grid.size
    i, j = np.tril_indices(n, -1)
    frames = []
    for t in X.trees():
        frames.append(pd.DataFrame({
            "tree": _tree_key(t),
            "i": i,
            "j": j,
            "value": X[t].scalar()[i, j],
        }))
    pd.concat(frames, ignore_index=True).to_csv(data_path, index=False)

    header = {
        "schema_version": config.SCHEMA_VERSION,
        "gamma": X.gamma,
        "level": X.level,
        "alphabet_size": X.alphabet_size,
        "times": X.grid.times.tolist(),
        "trees": [tree_to_json(t) for t in X.trees()],
        "data": data_path.name,
        "metadata": X.metadata,
    }
    header_path.write_text(json.dumps(header, indent=2, default=str))
    log(f"Saved {len(X.trees())} trees on {n} grid points to {header_path}")
    return header_path


def load_brp(path: str | Path) -> BranchedRoughPath:
    header_path = Path(path).with_suffix(".json")
    header = json.loads(header_path.read_text())
    version = header.get("schema_version")
    if version != config.SCHEMA_VERSION:
        raise ValueError(f"{header_path} has schema version {version}, expected {config.SCHEMA_VERSION}")

    grid = Grid(header["times"])
    n = grid.size
    df = pd.read_csv(header_path.parent / header["data"])
    values = {}
    for key, block in df.groupby("tree", sort=False):
        t = tree_from_json(json.loads(key))
        arr = np.zeros((n, n))
        arr[block["i"].to_numpy(), block["j"].to_numpy()] = block["value"].to_numpy()
        values[t] = Increment2(grid, arr)

    expected = {tree_from_json(o) for o in header["trees"]}
    if set(values) != expected:
        raise ValueError(f"{header_path}: data file holds {len(values)} trees, header lists {len(expected)}")
    return BranchedRoughPath(
        grid, header["gamma"], header["alphabet_size"], values, header["level"], header.get("metadata"),
    )
