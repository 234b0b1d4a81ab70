"""Scenario JSON, systems CSV and report grammars."""

from __future__ import annotations

import csv
import json
import math
from contextlib import contextmanager
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import NamedTuple

import jsonschema
from jsonschema.exceptions import best_match

from .constructions import RescaleMap, trivial_faithful_metric
from .core import (
    ExemplarSet,
    ExemplarSets,
    Metric,
    MetricKind,
    ObservationSchema,
    PropertyFramework,
    Provenance,
    SystemRecord,
    build_framework,
)
from .encoding import decode_real, encode_real
from .errors import (
    DuplicateSystemId,
    HeaderMismatch,
    NonFiniteFeature,
    ParseError,
    UnknownField,
    ValidationError,
)
from .thresholds import DEFAULT_EPSILON
from .update import GeneratorConfig

SCENARIO_VERSION = "1"


@lru_cache(maxsize=None)
def load_grammar(name: str) -> dict:
    """Load one of the shipped JSON schemas: "scenario", "report" or "trace"."""
    text = resources.files("vagueness").joinpath("schemas", f"{name}.schema.json").read_text("utf-8")
    return json.loads(text)


def _json_path(parts) -> str:
    out = "$"
    for p in parts:
        out += f"[{p}]" if isinstance(p, int) else f".{p}"
    return out


def validate_document(doc, grammar: str, where: str = "") -> None:
    """Validate ``doc`` against a shipped grammar, raising a path-qualified error."""
    validator = jsonschema.Draft202012Validator(load_grammar(grammar))
    errors = list(validator.iter_errors(doc))
    if not errors:
        return
    unknown = [e for e in errors if e.validator == "additionalProperties"]
    if not unknown:
        # unknown keys inside an if/then branch are reported one level down
        unknown = [c for e in errors for c in (e.context or ()) if c.validator == "additionalProperties"]
    err = unknown[0] if unknown else best_match(errors)
    prefix = f"{where}: " if where else ""
    cls = UnknownField if err.validator == "additionalProperties" else ParseError
    raise cls(f"{prefix}{_json_path(err.absolute_path)}: {err.message}")


@contextmanager
def _context(where: str):
    try:
        yield
    except ValidationError as exc:
        raise type(exc)(f"{where}: {exc}") from None


class SimulationConfig(NamedTuple):
    seed: int
    steps: int
    generator: GeneratorConfig


class Scenario(NamedTuple):
    """A parsed scenario file; unpacks as ``(framework, probes, simulation)`` plus ``epsilon``."""

    framework: PropertyFramework
    probes: tuple[SystemRecord, ...]
    simulation: SimulationConfig | None
    epsilon: float = DEFAULT_EPSILON


def _reject_constant(name):
    raise ParseError(f"non-standard JSON constant {name!r}")


def _system(doc, where) -> SystemRecord:
    with _context(where):
        return SystemRecord(doc["id"], tuple(doc["features"]), Provenance(doc.get("provenance", "apriori")))


def _metric(doc, exemplars: ExemplarSets, where: str) -> Metric:
    kind = MetricKind(doc["kind"])
    with _context(where):
        if kind is MetricKind.BINARIZED:
            base = _metric(doc["base"], exemplars, f"{where}.base")
            return Metric(kind, 0.0, 1.0, base=base, cut=doc["cut"], tolerance=doc.get("tolerance", DEFAULT_EPSILON))
        if kind is MetricKind.RESCALED:
            base = _metric(doc["base"], exemplars, f"{where}.base")
            m = doc["map"]
            rmap = RescaleMap(gamma0=m["gamma0"], eta0=m["eta0"], alpha=m["alpha"], beta=m["beta"])
            return Metric(kind, 0.0, rmap.beta, base=base, rescale_map=rmap)
        lower = decode_real(doc["lower"], f"{where}.lower")
        upper = decode_real(doc["upper"], f"{where}.upper")
        if kind is MetricKind.LINEAR_FEATURE:
            return Metric.linear(doc["weights"], doc.get("bias", 0.0), lower, upper)
        if kind is MetricKind.TRIVIAL_FAITHFUL and "table" not in doc:
            return trivial_faithful_metric(exemplars, lower, upper)
        return Metric(kind, lower, upper, table=tuple(doc["table"].items()))


def parse_scenario(doc: dict, where: str = "<scenario>") -> Scenario:
    """Build a :class:`Scenario` from an already-decoded JSON document."""
    validate_document(doc, "scenario", where)
    feats = doc["schema"]["features"]
    with _context(f"{where}: $.schema"):
        schema = ObservationSchema(tuple(f["name"] for f in feats), tuple(f.get("unit", "") for f in feats))
    ex_doc = doc["exemplars"]
    sets = {
        which.value: tuple(
            _system(s, f"{where}: $.exemplars.{which.value}[{i}]") for i, s in enumerate(ex_doc.get(which.value, []))
        )
        for which in ExemplarSet
    }
    with _context(f"{where}: $.exemplars"):
        exemplars = ExemplarSets(**sets)
    metric = _metric(doc["metric"], exemplars, f"{where}: $.metric")
    with _context(where):
        framework = build_framework(doc["observer"], doc["property"], schema, exemplars, metric)
    probes = tuple(_system(s, f"{where}: $.probes[{i}]") for i, s in enumerate(doc.get("probes", [])))
    seen = set()
    for i, p in enumerate(probes):
        with _context(f"{where}: $.probes[{i}]"):
            schema.check(p)
            if p.id in seen:
                raise DuplicateSystemId(f"probe id {p.id!r} repeated")
        seen.add(p.id)
    simulation = None
    if "simulation" in doc:
        sim = doc["simulation"]
        with _context(f"{where}: $.simulation.generator"):
            simulation = SimulationConfig(sim["seed"], sim["steps"], GeneratorConfig.from_dict(sim["generator"]))
    return Scenario(framework, probes, simulation, float(doc.get("epsilon", DEFAULT_EPSILON)))


def read_json(path) -> object:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"{path}: cannot read file ({exc.strerror})") from None
    try:
        return json.loads(text, parse_constant=_reject_constant)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
    except ParseError as exc:
        raise ParseError(f"{path}: {exc}") from None


def load_scenario(path) -> Scenario:
    return parse_scenario(read_json(path), str(path))


def _system_doc(rec: SystemRecord) -> dict:
    doc = {"id": rec.id, "features": list(rec.features)}
    if rec.provenance is not Provenance.APRIORI:
        doc["provenance"] = rec.provenance.value
    return doc


def metric_to_dict(metric: Metric) -> dict:
    kind = metric.kind
    if kind is MetricKind.BINARIZED:
        return {"kind": kind.value, "base": metric_to_dict(metric.base), "cut": metric.cut,
                "tolerance": metric.tolerance}
    if kind is MetricKind.RESCALED:
        m = metric.rescale_map
        return {"kind": kind.value, "base": metric_to_dict(metric.base),
                "map": {"gamma0": m.gamma0, "eta0": m.eta0, "alpha": m.alpha, "beta": m.beta}}
    doc = {"kind": kind.value}
    if kind is MetricKind.LINEAR_FEATURE:
        doc.update(weights=list(metric.weights), bias=metric.bias)
    else:
        doc["table"] = dict(metric.table)
    doc.update(lower=encode_real(metric.lower), upper=encode_real(metric.upper))
    return doc


def scenario_to_dict(scenario: Scenario) -> dict:
    fw = scenario.framework
    doc = {
        "version": SCENARIO_VERSION,
        "observer": fw.observer_id,
        "property": fw.property_name,
        "epsilon": scenario.epsilon,
        "schema": {"features": [
            {"name": n, "unit": u} for n, u in zip(fw.schema.feature_names, fw.schema.feature_units)
        ]},
        "metric": metric_to_dict(fw.metric),
        "exemplars": {w.value: [_system_doc(s) for s in fw.exemplars.members(w)] for w in ExemplarSet},
    }
    if scenario.probes:
        doc["probes"] = [_system_doc(p) for p in scenario.probes]
    if scenario.simulation is not None:
        sim = scenario.simulation
        doc["simulation"] = {"seed": sim.seed, "steps": sim.steps, "generator": sim.generator.to_dict()}
    return doc


def save_scenario(scenario: Scenario, path) -> None:
    Path(path).write_text(json.dumps(scenario_to_dict(scenario), indent=2, allow_nan=False) + "\n", encoding="utf-8")


_OPTIONAL_COLUMNS = ("provenance", "target")
_PROVENANCE_NAMES = {
    "apriori": Provenance.APRIORI,
    "determined": Provenance.DETERMINED_BY_METRIC,
    "determinedbymetric": Provenance.DETERMINED_BY_METRIC,
}


@dataclass(frozen=True)
class _Row:
    line: int
    record: SystemRecord
    target: ExemplarSet | None


def _read_rows(path, schema: ObservationSchema) -> list[_Row]:
    path = Path(path)
    try:
        handle = path.open(newline="", encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"{path}: cannot read file ({exc.strerror})") from None
    with handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if header is None:
            raise HeaderMismatch(f"{path}: empty file, expected a header row")
        header = [h.strip() for h in header]
        n = schema.dimension
        expected = ["id", *schema.feature_names]
        extras = header[n + 1:]
        if header[: n + 1] != expected or any(c not in _OPTIONAL_COLUMNS for c in extras) \
                or len(set(extras)) != len(extras):
            raise HeaderMismatch(
                f"{path}:1: header {header} does not match expected {expected} "
                f"(optionally followed by {list(_OPTIONAL_COLUMNS)})"
            )
        rows, seen = [], {}
        for line, raw in enumerate(reader, start=2):
            if not raw or all(not c.strip() for c in raw):
                continue
            if len(raw) != len(header):
                raise ParseError(f"{path}:{line}: expected {len(header)} columns, got {len(raw)}")
            cells = dict(zip(header, (c.strip() for c in raw)))
            sid = cells["id"]
            if sid in seen:
                raise DuplicateSystemId(f"{path}:{line}: system id {sid!r} already used on line {seen[sid]}")
            seen[sid] = line
            feats = []
            for name in schema.feature_names:
                try:
                    value = float(cells[name])
                except ValueError:
                    raise ParseError(f"{path}:{line}: column {name!r} is not a number: {cells[name]!r}") from None
                if not math.isfinite(value):
                    raise NonFiniteFeature(f"{path}:{line}: column {name!r} is not finite: {cells[name]!r}")
                feats.append(value)
            prov_cell = cells.get("provenance", "apriori").lower() or "apriori"
            if prov_cell not in _PROVENANCE_NAMES:
                raise ParseError(f"{path}:{line}: unknown provenance {cells['provenance']!r}")
            target = None
            if "target" in cells:
                try:
                    target = ExemplarSet(cells["target"].lower())
                except ValueError:
                    raise ParseError(f"{path}:{line}: unknown target set {cells['target']!r}") from None
            with _context(f"{path}:{line}"):
                record = SystemRecord(sid, tuple(feats), _PROVENANCE_NAMES[prov_cell])
            rows.append(_Row(line, record, target))
    return rows


def ingest_systems_csv(path, schema: ObservationSchema) -> list[SystemRecord]:
    """Read systems from a CSV with header ``id,<feature names...>[,provenance][,target]``."""
    return [row.record for row in _read_rows(path, schema)]


def ingest_updates_csv(path, schema: ObservationSchema) -> list[tuple[SystemRecord, ExemplarSet]]:
    """Like :func:`ingest_systems_csv` but every row must name its target exemplar set."""
    rows = _read_rows(path, schema)
    for row in rows:
        if row.target is None:
            raise HeaderMismatch(f"{path}:{row.line}: update rows need a 'target' column")
    return [(row.record, row.target) for row in rows]
