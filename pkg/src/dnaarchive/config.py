"""Experiment configuration: nested JSON documents plus dotted-key overrides.

A document mirrors :class:`SimConfig` (``motility`` and ``layout`` are nested
sections) and may carry a ``sweep`` section with grid knobs::

    {"motility": {"D": 14}, "n_retrievers_per_cluster": 50,
     "sweep": {"repetitions": 3}}

Overrides such as ``motility.D=14`` are parsed as JSON values when possible
and as plain strings otherwise; they win over file values.
"""

from __future__ import annotations

import copy
import dataclasses
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Mapping

from .agent import MotilityParams
from .archive import LayoutMode
from .codec.plasmid import Encoding
from .engine import (
    DESTINATION_RADII,
    DIFFUSION_VALUES,
    RETRIEVER_COUNTS,
    START_RADII,
    ConfigInvalid,
    LayoutParams,
    SimConfig,
)


@dataclass(frozen=True)
class SweepParams:
    retriever_counts: tuple[int, ...] = RETRIEVER_COUNTS
    diffusion: tuple[float, ...] = DIFFUSION_VALUES
    encodings: tuple[str, ...] = ("basic", "goldman")
    repetitions: int = 10
    dest_points_per_circle: int = 8
    start_points_per_circle: int = 6
    dest_radii: tuple[float, ...] = DESTINATION_RADII
    start_radii: tuple[float, ...] = START_RADII

    def validate(self) -> "SweepParams":
        if self.repetitions < 1:
            raise ConfigInvalid("sweep.repetitions: must be >= 1")
        if self.dest_points_per_circle < 1 or self.start_points_per_circle < 1:
            raise ConfigInvalid("sweep: points per circle must be >= 1")
        for enc in self.encodings:
            try:
                Encoding(enc)
            except ValueError:
                raise ConfigInvalid(f"sweep.encodings: unknown encoding {enc!r}") from None
        if any(n < 0 for n in self.retriever_counts):
            raise ConfigInvalid("sweep.retriever_counts: counts must be >= 0")
        return self


@dataclass(frozen=True)
class Settings:
    sim: SimConfig
    sweep: SweepParams


def parse_value(text: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def parse_override(item: str) -> tuple[str, Any]:
    key, sep, value = item.partition("=")
    if not sep or not key.strip():
        raise ConfigInvalid(f"override {item!r}: expected key=value")
    return key.strip(), parse_value(value.strip())


def set_dotted(doc: dict, key: str, value: Any) -> None:
    parts = key.split(".")
    node = doc
    for p in parts[:-1]:
        child = node.setdefault(p, {})
        if not isinstance(child, dict):
            raise ConfigInvalid(f"{key}: {p} is not a section")
        node = child
    node[parts[-1]] = value


def merge(base: Mapping, top: Mapping) -> dict:
    """Recursive merge into a fresh document; neither input is modified or shared."""
    out = copy.deepcopy(dict(base))
    for k, v in top.items():
        if isinstance(v, Mapping):
            out[k] = merge(out[k] if isinstance(out.get(k), dict) else {}, v)
        else:
            out[k] = copy.deepcopy(v)
    return out


def load_document(path: str | Path) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigInvalid(f"config {path}: {exc.strerror}") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigInvalid(f"config {path}: line {exc.lineno}: {exc.msg}") from None
    if not isinstance(doc, dict):
        raise ConfigInvalid(f"config {path}: top level must be an object")
    return doc


def _coerce(section: str, cls, values: Mapping, converters: Mapping | None = None):
    if not isinstance(values, Mapping):
        raise ConfigInvalid(f"{section}: expected a section, got {values!r}")
    names = {f.name: f for f in dataclasses.fields(cls)}
    kwargs = {}
    for key, value in values.items():
        name = f"{section}.{key}" if section else key
        if key not in names:
            raise ConfigInvalid(f"{name}: unknown field")
        conv = (converters or {}).get(key)
        default = getattr(cls(), key) if conv is None else None
        try:
            if conv is not None:
                value = conv(value)
            elif isinstance(default, bool):
                if not isinstance(value, bool):
                    raise TypeError
            elif isinstance(default, int):
                if isinstance(value, bool) or not isinstance(value, int):
                    raise TypeError
            elif isinstance(default, float):
                if isinstance(value, bool) or not isinstance(value, (int, float)):
                    raise TypeError
                value = float(value)
            elif isinstance(default, str) and not isinstance(value, str):
                raise TypeError
        except (TypeError, ValueError):
            raise ConfigInvalid(f"{name}: invalid value {value!r}") from None
        kwargs[key] = value
    try:
        return cls(**kwargs)
    except ValueError as exc:
        raise ConfigInvalid(f"{section or 'config'}: {exc}") from None


def _optional_int(v):
    if v is None:
        return None
    if isinstance(v, bool) or not isinstance(v, int):
        raise TypeError
    return v


def _tuple_of(kind):
    def conv(v):
        if not isinstance(v, (list, tuple)) or not v:
            raise TypeError
        if kind is int and any(isinstance(x, bool) or not isinstance(x, int) for x in v):
            raise TypeError
        return tuple(kind(x) for x in v)

    return conv


def build_settings(doc: Mapping) -> Settings:
    doc = dict(doc)
    sweep_doc = doc.pop("sweep", {})
    motility = _coerce("motility", MotilityParams, doc.pop("motility", {}))
    layout = _coerce("layout", LayoutParams, doc.pop("layout", {}), {"mode": LayoutMode})
    sim = _coerce("", SimConfig, doc, {"encoding": Encoding, "replication": _optional_int,
                                       "seed": _optional_int})
    sim = dataclasses.replace(sim, motility=motility, layout=layout)
    if sim.seed is None:
        raise ConfigInvalid("seed: must be an integer")
    sweep = _coerce("sweep", SweepParams, sweep_doc, {
        "retriever_counts": _tuple_of(int),
        "diffusion": _tuple_of(float),
        "encodings": _tuple_of(str),
        "dest_radii": _tuple_of(float),
        "start_radii": _tuple_of(float),
    })
    return Settings(sim.validate(), sweep.validate())


def load_settings(path: str | Path | None = None, overrides=(), base: Mapping | None = None) -> Settings:
    """Preset defaults < config file < dotted overrides."""
    doc = merge({}, base or {})
    if path is not None:
        doc = merge(doc, load_document(path))
    for item in overrides:
        key, value = parse_override(item) if isinstance(item, str) else item
        set_dotted(doc, key, value)
    return build_settings(doc)
