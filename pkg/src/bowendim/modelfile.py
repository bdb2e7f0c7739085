"""JSON model files.

A model file is a JSON object with ``"schema": "bowendim-model/1"``.  Rates
may be written as numbers or as fraction strings such as ``"1/3"``.  Every
problem is reported with the line of the offending value.

Example::

    {
      "schema": "bowendim-model/1",
      "name": "ternary",
      "kind": "diagonal",
      "alphabet_size": 2,
      "transitions": "full",
      "bands": [1],
      "unstable_rates": [[3], [3]],
      "stable_rates": ["1/3", "1/3"]
    }
"""

import hashlib
import json
import re
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from pathlib import Path

import jsonschema
import numpy as np

from .errors import ModelError
from .models import (BandStructure, CocycleHorseshoeModel, DiagonalHorseshoeModel,
                     GeometricRealization)
from .symbolic import DEFAULT_WORD_CAP, SubshiftOfFiniteType

SCHEMA_ID = "bowendim-model/1"

_number = {"oneOf": [{"type": "number"},
                     {"type": "string", "pattern": r"^\s*-?\d+(\.\d+)?\s*(/\s*\d+(\.\d+)?\s*)?$"}]}

SCHEMA = {
    "type": "object",
    "required": ["schema", "kind", "alphabet_size", "transitions", "bands", "stable_rates"],
    "additionalProperties": False,
    "properties": {
        "schema": {"const": SCHEMA_ID},
        "name": {"type": "string"},
        "description": {"type": "string"},
        "kind": {"enum": ["diagonal", "cocycle"]},
        "alphabet_size": {"type": "integer", "minimum": 1},
        "transitions": {"oneOf": [
            {"const": "full"},
            {"type": "array", "minItems": 1,
             "items": {"type": "array", "minItems": 1, "items": {"enum": [0, 1]}}}]},
        "bands": {"type": "array", "minItems": 1, "items": {"type": "integer", "minimum": 1}},
        "unstable_rates": {"type": "array", "items": {"type": "array", "items": _number}},
        "band_matrices": {"type": "array", "items": {
            "type": "array", "items": {"type": "array", "items": {"type": "array", "items": _number}}}},
        "stable_rates": {"type": "array", "items": _number},
        "placement": {
            "type": "object", "additionalProperties": False,
            "properties": {
                "unstable": {"type": "array", "items": {"type": "array", "items": _number}},
                "stable": {"type": "array", "items": _number}}},
        "caps": {
            "type": "object", "additionalProperties": False,
            "properties": {"words": {"type": "integer", "minimum": 1},
                           "levels": {"type": "integer", "minimum": 0}}},
        "tolerances": {
            "type": "object", "additionalProperties": False,
            "properties": {"root": {"type": "number", "exclusiveMinimum": 0}}},
    },
}


class ModelFileError(ModelError):
    """Problem in a model file; ``line`` is 1-based when known."""

    def __init__(self, message, location=None, line=None, source=None):
        super().__init__(message, location)
        self.line = line
        self.source = source
        where = "" if source is None else f"{source}:"
        where += "" if line is None else f"{line}:"
        if where:
            self.args = (f"{where} {self.args[0]}",)


def _skip(text, i):
    while i < len(text) and text[i] in " \t\r\n":
        i += 1
    return i


def value_offsets(text):
    """Map each JSON path (tuple of keys/indices) to the offset of its value."""
    decoder = json.JSONDecoder()
    offsets = {}

    def walk(i, path):
        i = _skip(text, i)
        offsets[path] = i
        ch = text[i]
        if ch == "{":
            i = _skip(text, i + 1)
            if text[i] == "}":
                return i + 1
            while True:
                key, i = json.decoder.scanstring(text, _skip(text, i) + 1)
                i = _skip(text, i) + 1  # colon
                i = _skip(text, walk(i, path + (key,)))
                if text[i] == "}":
                    return i + 1
                i += 1
        if ch == "[":
            i = _skip(text, i + 1)
            if text[i] == "]":
                return i + 1
            k = 0
            while True:
                i = _skip(text, walk(i, path + (k,)))
                k += 1
                if text[i] == "]":
                    return i + 1
                i += 1
        _, end = decoder.raw_decode(text, i)
        return end

    walk(0, ())
    return offsets


def _line_of(text, offsets, path):
    path = tuple(path)
    while path not in offsets and path:
        path = path[:-1]
    return text.count("\n", 0, offsets.get(path, 0)) + 1


def _parse_location(location):
    """Turn ``"unstable_rates[1][0]"`` into ``("unstable_rates", 1, 0)``."""
    if not location:
        return ()
    m = re.match(r"([A-Za-z_.]+)", location)
    path = tuple(m.group(1).split(".")) if m else ()
    for idx in re.findall(r"\[(\d+)\]", location):
        path += (int(idx),)
    return path


def _num(x):
    return float(Fraction(x.replace(" ", ""))) if isinstance(x, str) else float(x)


def _nums(a):
    if isinstance(a, list):
        return [_nums(x) for x in a]
    return _num(a)


@dataclass(frozen=True, eq=False)
class LoadedModel:
    """A validated model file with its realization and run settings."""

    name: str
    model: object
    realization: GeometricRealization
    word_cap: int = DEFAULT_WORD_CAP
    level_cap: int = 4
    root_tol: float = 1e-10
    digest: str = ""
    document: dict = field(default=None, repr=False)


def build(doc):
    """Build model objects from an already-parsed document."""
    l = doc["alphabet_size"]
    if doc["transitions"] == "full":
        A = np.ones((l, l), dtype=np.int8)
    else:
        rows = doc["transitions"]
        bad = next((i for i, row in enumerate(rows) if len(row) != l), None)
        if bad is not None:
            raise ModelError(f"row has {len(rows[bad])} entries, expected {l}",
                             f"transitions[{bad}]")
        if len(rows) != l:
            raise ModelError(f"transition matrix has {len(rows)} rows, expected {l}",
                             "transitions")
        A = np.array(rows)
    S = SubshiftOfFiniteType(A)
    bands = BandStructure(tuple(doc["bands"]))
    c = _nums(doc["stable_rates"])
    if doc["kind"] == "diagonal":
        if "unstable_rates" not in doc:
            raise ModelError("diagonal models need unstable_rates", "unstable_rates")
        rates = doc["unstable_rates"]
        if len(rates) != l:
            raise ModelError(f"expected {l} rows of rates", "unstable_rates")
        for i, row in enumerate(rates):
            if len(row) != bands.band_count:
                raise ModelError(f"expected {bands.band_count} rates", f"unstable_rates[{i}]")
        model = DiagonalHorseshoeModel(S, bands, np.array(_nums(rates)), np.array(c))
    else:
        if "band_matrices" not in doc:
            raise ModelError("cocycle models need band_matrices", "band_matrices")
        mats = [np.array(_nums(B)) for B in doc["band_matrices"]]
        model = CocycleHorseshoeModel(S, bands, tuple(mats), np.array(c))
    place = doc.get("placement", {})
    uo = place.get("unstable")
    so = place.get("stable")
    if uo is not None and (len(uo) != l or any(len(r) != bands.unstable_dim for r in uo)):
        raise ModelError(f"expected {l} offset vectors of length {bands.unstable_dim}",
                         "placement.unstable")
    if so is not None and len(so) != l:
        raise ModelError(f"expected {l} stable offsets", "placement.stable")
    real = GeometricRealization(model, None if uo is None else np.array(_nums(uo)),
                                None if so is None else np.array(_nums(so)))
    return model, real


def loads(text, source=None):
    """Parse, validate and build a model from JSON text."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelFileError(f"invalid JSON: {exc.msg}", None, exc.lineno, source) from None
    offsets = value_offsets(text)
    validator = jsonschema.Draft202012Validator(SCHEMA)
    errors = sorted(validator.iter_errors(doc), key=lambda e: list(map(str, e.absolute_path)))
    if errors:
        err = errors[0]
        path = tuple(err.absolute_path)
        loc = "".join(f"[{p}]" if isinstance(p, int) else f".{p}" for p in path).lstrip(".")
        raise ModelFileError(f"schema violation: {err.message}", loc or None,
                             _line_of(text, offsets, path), source)
    try:
        model, real = build(doc)
    except ModelFileError:
        raise
    except ModelError as exc:
        path = _parse_location(exc.location)
        raise ModelFileError(exc.message, exc.location, _line_of(text, offsets, path), source) from None
    caps = doc.get("caps", {})
    tols = doc.get("tolerances", {})
    digest = hashlib.sha256(text.encode()).hexdigest()
    return LoadedModel(doc.get("name", source or "model"), model, real,
                       caps.get("words", DEFAULT_WORD_CAP), caps.get("levels", 4),
                       tols.get("root", 1e-10), digest, doc)


def load(path):
    """Load a model file from disk."""
    path = Path(path)
    return loads(path.read_text(), str(path))


def demo_names():
    """Names of the bundled demo models."""
    files = resources.files("bowendim") / "data"
    return sorted(p.name[:-5] for p in files.iterdir() if p.name.endswith(".json"))


def demo_path(name):
    return Path(str(resources.files("bowendim") / "data" / f"{name}.json"))


def load_demo(name):
    """Load one of the bundled demo models by name."""
    return load(demo_path(name))
