"""
Model file format.

A UTF-8 text file of ordered sections:

    FLPXR-MODEL
    VERSION 1
    [PARAMS]          key=value per hyperparameter
    [FEATURES]        one feature name per line, in matrix order
    [CATEGORIES]      name={json map raw value -> code}
    [PREP]            rate=<seconds>, horizons=<comma minutes>
    [BASE]            lon=<base score>, lat=<base score>
    [TREES lon N]     N blocks of "[TREE i n]" followed by n node rows
    [TREES lat N]
    [END]

Node rows read ``node_id kind feature threshold default_left left_id
right_id value``. Floats are written with ``repr`` (shortest round-trip),
so a loaded model predicts bit for bit like the saved one.
"""

import io
import logging
from pathlib import Path
from typing import IO, Dict, Iterator, List, Optional, Tuple, Union

import numpy as np
import orjson
from pydantic import ValidationError

from vesselcast.config import GbdtParams
from vesselcast.errors import ModelFormatError, SchemaError, UnsupportedVersionError
from vesselcast.features import FEATURE_NAMES, N_FEATURES, CategoryEncoders
from vesselcast.gbdt.booster import GbdtModel
from vesselcast.gbdt.tree import Tree, TreeEnsemble
from vesselcast.io_utils import atomic_output, open_source

logger = logging.getLogger(__name__)

MAGIC = "FLPXR-MODEL"
FORMAT_VERSION = 1

# file key -> GbdtParams field
PARAM_KEYS = {
    "n_estimators": "n_estimators",
    "learning_rate": "learning_rate",
    "max_depth": "max_depth",
    "n_bins": "n_bins",
    "lambda": "lambda_",
    "gamma": "gamma",
    "min_child_weight": "min_child_weight",
}


# ============================================================================
# Writing
# ============================================================================

def _tree_lines(index: int, tree: Tree) -> Iterator[str]:
    yield f"[TREE {index} {tree.n_nodes}]"
    for i in range(tree.n_nodes):
        if tree.feature[i] < 0:
            yield f"{i} leaf -1 nan 0 -1 -1 {float(tree.value[i])!r}"
        else:
            yield (
                f"{i} split {int(tree.feature[i])} {float(tree.threshold[i])!r} "
                f"{int(bool(tree.default_left[i]))} {int(tree.left[i])} {int(tree.right[i])} "
                f"{float(tree.value[i])!r}"
            )


def dumps(model: GbdtModel) -> str:
    """Serialize a model to its text form."""
    p = model.params
    lines = [MAGIC, f"VERSION {FORMAT_VERSION}", "[PARAMS]"]
    for key, attr in PARAM_KEYS.items():
        v = getattr(p, attr)
        lines.append(f"{key}={v!r}" if isinstance(v, float) else f"{key}={v}")

    lines.append("[FEATURES]")
    lines.extend(model.feature_names)

    lines.append("[CATEGORIES]")
    for name, mapping in model.encoders.to_dict().items():
        lines.append(f"{name}={orjson.dumps(mapping).decode()}")

    lines.append("[PREP]")
    lines.append(f"rate={'' if model.rate is None else model.rate}")
    lines.append(f"horizons={','.join(str(h) for h in model.horizons)}")

    lines.append("[BASE]")
    lines.append(f"lon={model.lon.base_score!r}")
    lines.append(f"lat={model.lat.base_score!r}")

    for target, ensemble in (("lon", model.lon), ("lat", model.lat)):
        lines.append(f"[TREES {target} {len(ensemble.trees)}]")
        for i, tree in enumerate(ensemble.trees):
            lines.extend(_tree_lines(i, tree))

    lines.append("[END]")
    return "\n".join(lines) + "\n"


def save_model(model: GbdtModel, sink: Union[str, Path, IO]) -> None:
    """Write a model to a path (atomically) or to an open text stream."""
    text = dumps(model)
    if isinstance(sink, (str, Path)):
        with atomic_output(sink) as f:
            f.write(text)
        logger.info(f"Saved model to {sink} ({len(text)} bytes)")
    else:
        sink.write(text)


# ============================================================================
# Reading
# ============================================================================

class _LineReader:
    """Sequential reader that knows which section it is in."""

    def __init__(self, text: str):
        self._lines = text.split("\n")
        if self._lines and self._lines[-1] == "":
            self._lines.pop()
        self._pos = 0
        self.section = "MAGIC"

    @property
    def line_no(self) -> int:
        return self._pos

    def next(self) -> str:
        if self._pos >= len(self._lines):
            raise ModelFormatError(self.section, "unexpected end of file (truncated model)", self._pos)
        line = self._lines[self._pos]
        self._pos += 1
        return line.rstrip("\r")

    def peek(self) -> Optional[str]:
        if self._pos >= len(self._lines):
            return None
        return self._lines[self._pos].rstrip("\r")

    def fail(self, message: str) -> ModelFormatError:
        return ModelFormatError(self.section, message, self._pos)

    def expect(self, header: str) -> None:
        line = self.next()
        self.section = header.strip("[]")
        if line != header:
            raise self.fail(f"expected {header!r}, found {line!r}")

    def key_values(self) -> Dict[str, str]:
        """Read key=value lines up to the next section header."""
        out: Dict[str, str] = {}
        while (line := self.peek()) is not None and not line.startswith("["):
            self.next()
            key, sep, value = line.partition("=")
            if not sep:
                raise self.fail(f"expected key=value, found {line!r}")
            out[key.strip()] = value.strip()
        return out

    def plain_lines(self) -> List[str]:
        out: List[str] = []
        while (line := self.peek()) is not None and not line.startswith("["):
            out.append(self.next())
        return out


def _parse_params(r: _LineReader) -> GbdtParams:
    r.expect("[PARAMS]")
    values = r.key_values()
    unknown = set(values) - set(PARAM_KEYS)
    if unknown:
        raise r.fail(f"unknown parameter(s) {sorted(unknown)}")
    missing = set(PARAM_KEYS) - set(values)
    if missing:
        raise r.fail(f"missing parameter(s) {sorted(missing)}")
    try:
        return GbdtParams(**{PARAM_KEYS[k]: v for k, v in values.items()})
    except ValidationError as e:
        raise r.fail(f"invalid parameters: {e}") from e


def _parse_categories(r: _LineReader) -> CategoryEncoders:
    r.expect("[CATEGORIES]")
    try:
        maps = {k: orjson.loads(v) for k, v in r.key_values().items()}
        return CategoryEncoders.from_dict(maps)
    except (orjson.JSONDecodeError, TypeError, ValueError, AttributeError) as e:
        raise r.fail(f"bad category map: {e}") from e


def _parse_prep(r: _LineReader) -> Tuple[Optional[int], Tuple[int, ...]]:
    r.expect("[PREP]")
    values = r.key_values()
    try:
        rate = int(values["rate"]) if values.get("rate") else None
        horizons = tuple(int(h) for h in values.get("horizons", "").split(",") if h)
    except ValueError as e:
        raise r.fail(f"bad preprocessing fingerprint: {e}") from e
    return rate, horizons


def _parse_base(r: _LineReader) -> Tuple[float, float]:
    r.expect("[BASE]")
    values = r.key_values()
    try:
        return float(values["lon"]), float(values["lat"])
    except (KeyError, ValueError) as e:
        raise r.fail(f"bad base scores: {e}") from e


def _parse_tree(r: _LineReader, index: int) -> Tree:
    header = r.next().strip("[]").split()
    if len(header) != 3 or header[0] != "TREE" or header[1] != str(index):
        raise r.fail(f"expected tree header for tree {index}, found {header}")
    try:
        n = int(header[2])
    except ValueError as e:
        raise r.fail(f"bad node count {header[2]!r}") from e
    if n < 1:
        raise r.fail(f"tree {index} has no nodes")

    feature = np.empty(n, dtype=np.int32)
    threshold = np.empty(n)
    default_left = np.empty(n, dtype=bool)
    left = np.empty(n, dtype=np.int32)
    right = np.empty(n, dtype=np.int32)
    value = np.empty(n)
    for i in range(n):
        parts = r.next().split()
        if len(parts) != 8:
            raise r.fail(f"tree {index}: node row needs 8 fields, got {len(parts)}")
        try:
            node_id = int(parts[0])
            kind = parts[1]
            feature[i] = int(parts[2])
            threshold[i] = float(parts[3])
            default_left[i] = parts[4] == "1"
            left[i] = int(parts[5])
            right[i] = int(parts[6])
            value[i] = float(parts[7])
        except ValueError as e:
            raise r.fail(f"tree {index}: bad node row: {e}") from e
        if node_id != i:
            raise r.fail(f"tree {index}: node ids out of order ({node_id} at position {i})")
        if kind == "leaf":
            if feature[i] != -1 or left[i] != -1 or right[i] != -1:
                raise r.fail(f"tree {index}: leaf {i} has a split")
        elif kind == "split":
            if feature[i] < 0 or not (i < left[i] < n and i < right[i] < n):
                raise r.fail(f"tree {index}: split {i} has invalid children or feature")
        else:
            raise r.fail(f"tree {index}: unknown node kind {kind!r}")
    return Tree(feature, threshold, default_left, left, right, value)


def _parse_trees(r: _LineReader, target: str, n_features: int) -> List[Tree]:
    line = r.next()
    r.section = f"TREES {target}"
    parts = line.strip("[]").split()
    if not line.startswith("[") or len(parts) != 3 or parts[:2] != ["TREES", target]:
        raise r.fail(f"expected [TREES {target} N], found {line!r}")
    try:
        count = int(parts[2])
    except ValueError as e:
        raise r.fail(f"bad tree count {parts[2]!r}") from e
    trees = [_parse_tree(r, i) for i in range(count)]
    for t in trees:
        if (t.feature >= n_features).any():
            raise r.fail("split on a feature index beyond the feature list")
    return trees


def loads(text: str) -> GbdtModel:
    """
    Parse a model from its text form.

    Raises:
        UnsupportedVersionError: the VERSION line names an unknown version.
        ModelFormatError: any other corruption, naming the section.
        SchemaError: a position model lists its features in another order.
    """
    r = _LineReader(text)
    if r.next() != MAGIC:
        raise r.fail(f"not a model file (missing {MAGIC} tag)")

    r.section = "VERSION"
    tag, _, version = r.next().partition(" ")
    if tag != "VERSION" or not version:
        raise r.fail("missing VERSION line")
    if version.strip() != str(FORMAT_VERSION):
        raise UnsupportedVersionError(version.strip())

    params = _parse_params(r)
    r.expect("[FEATURES]")
    features = tuple(r.plain_lines())
    if not features:
        raise r.fail("empty feature list")
    if len(features) == N_FEATURES and features != FEATURE_NAMES:
        raise SchemaError(
            f"model features {list(features)} do not match the expected order {list(FEATURE_NAMES)}"
        )
    encoders = _parse_categories(r)
    rate, horizons = _parse_prep(r)
    base_lon, base_lat = _parse_base(r)
    trees_lon = _parse_trees(r, "lon", len(features))
    trees_lat = _parse_trees(r, "lat", len(features))
    r.expect("[END]")

    for target, trees in (("lon", trees_lon), ("lat", trees_lat)):
        if len(trees) != params.n_estimators:
            raise ModelFormatError(
                f"TREES {target}",
                f"{len(trees)} trees but n_estimators={params.n_estimators}",
            )

    return GbdtModel(
        params=params,
        lon=TreeEnsemble(base_lon, params.learning_rate, trees_lon),
        lat=TreeEnsemble(base_lat, params.learning_rate, trees_lat),
        feature_names=features,
        encoders=encoders,
        rate=rate,
        horizons=horizons,
    )


def load_model(source: Union[str, Path, IO]) -> GbdtModel:
    """Load a model from a path or an open text stream."""
    if isinstance(source, (str, Path)):
        with open_source(source) as f:
            text = f.read()
    elif isinstance(source, io.TextIOBase):
        text = source.read()
    else:
        text = source.read().decode("utf-8")
    model = loads(text)
    logger.info(
        f"Loaded model: {len(model.trees_lon)} rounds, depth {model.params.max_depth}, "
        f"{len(model.feature_names)} features"
    )
    return model


def model_size_bytes(model: GbdtModel) -> int:
    """Size of the serialized model."""
    return len(dumps(model).encode("utf-8"))
