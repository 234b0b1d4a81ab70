"""Command-line interface.

Exit codes: 0 success, 1 internal error, 2 invalid input, 3 the framework
(or an update to it) is not faithful.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

from . import __version__
from .compare import (
    DEFAULT_GRID_POINTS,
    compare_observers,
    exemplar_box,
    merged_property,
    probe_grid,
    property_identity_analysis,
    shared_clear_agreement,
)
from .constructions import binarize_metric, build_rescale_map
from .core import Thresholds, metric_value
from .encoding import encode_real
from .errors import PreconditionUnmet, UnfaithfulFramework, ValidationError
from .fileio import ingest_systems_csv, ingest_updates_csv, load_scenario, validate_document
from .thresholds import (
    TIE_PRECEDENCE,
    check_faithfulness,
    classify_many,
    derive_thresholds,
    determine,
    pan_x_check,
    require_faithful,
    sharpness,
)
from .update import UpdateKind, apply_update, simulate_stream

EXIT_OK, EXIT_INTERNAL, EXIT_INVALID, EXIT_UNFAITHFUL = 0, 1, 2, 3

COMMANDS = ("thresholds", "classify", "faithfulness", "sharpness", "pan-check",
            "update", "simulate", "compare", "rescale", "binarize")


class _Outcome(Exception):
    """Carries a finished report together with a non-zero exit code."""

    def __init__(self, report, code):
        super().__init__(code)
        self.report = report
        self.code = code


def _th(th: Thresholds | None):
    if th is None:
        return None
    return {"eta0": encode_real(th.eta0), "gamma0": encode_real(th.gamma0)}


def _interval(pair):
    return None if pair is None else [encode_real(pair[0]), encode_real(pair[1])]


def _envelope(command, scenario, epsilon, **body):
    fw = scenario.framework
    return {"command": command, "observer": fw.observer_id, "property": fw.property_name,
            "epsilon": epsilon, **body}


def _systems(args, scenario):
    if args.systems:
        return ingest_systems_csv(args.systems, scenario.framework.schema)
    return list(scenario.probes)


def cmd_thresholds(args, scenario, eps):
    th = derive_thresholds(scenario.framework)
    return _envelope(
        "thresholds", scenario, eps,
        eta0=encode_real(th.eta0), gamma0=encode_real(th.gamma0),
        alpha=encode_real(th.alpha), beta=encode_real(th.beta), width=encode_real(th.width),
        intervals={
            "exhibits": _interval(th.exhibit_interval),
            "not_exhibits": _interval(th.non_exhibit_interval),
            "borderline": _interval(th.borderline_interval),
        },
    )


def cmd_classify(args, scenario, eps):
    fw = scenario.framework
    th = derive_thresholds(fw)
    dets = classify_many(fw, th, _systems(args, scenario), eps)
    return _envelope(
        "classify", scenario, eps, thresholds=_th(th), tie_precedence=TIE_PRECEDENCE.value,
        determinations=[
            {"id": d.system_id, "verdict": d.verdict.value, "value": encode_real(d.metric_value),
             "margin": encode_real(d.margin)}
            for d in dets
        ],
    )


def cmd_faithfulness(args, scenario, eps):
    report = check_faithfulness(scenario.framework, eps)
    out = _envelope(
        "faithfulness", scenario, eps, is_faithful=report.is_faithful,
        violations=[
            {"id": v.system_id, "set": None if v.membership is None else v.membership.value,
             "value": encode_real(v.metric_value), "condition": v.condition}
            for v in report.violations
        ],
        thresholds=_th(report.thresholds),
    )
    if not report.is_faithful:
        raise _Outcome(out, EXIT_UNFAITHFUL)
    return out


def cmd_sharpness(args, scenario, eps):
    th = derive_thresholds(scenario.framework)
    verdict = sharpness(scenario.framework, th, eps)
    return _envelope("sharpness", scenario, eps, weak_sharp=verdict.weak_sharp,
                     strong_sharp=verdict.strong_sharp, thresholds=_th(th))


def cmd_pan_check(args, scenario, eps):
    th = derive_thresholds(scenario.framework)
    rep = pan_x_check(scenario.framework, th, _systems(args, scenario), eps)
    return _envelope(
        "pan-check", scenario, eps, gamma_at_floor=rep.gamma_at_floor,
        non_exhibit_is_singleton=rep.non_exhibit_is_singleton,
        flagged_small_systems=list(rep.flagged_small_systems), above_gamma=list(rep.above_gamma),
        thresholds=_th(th),
    )


def cmd_update(args, scenario, eps):
    if not args.systems:
        raise PreconditionUnmet("update needs --systems with a 'target' column")
    fw = scenario.framework
    rows = ingest_updates_csv(args.systems, fw.schema)
    events = []
    violated = False
    for step, (record, target) in enumerate(rows):
        fw, event = apply_update(fw, record, target, probes=scenario.probes, epsilon=eps)
        events.append(replace(event, step=step).to_dict())
        if event.kind is UpdateKind.FAITHFULNESS_VIOLATION:
            violated = True
            break
    final = None if fw.quarantined or fw.is_draft else derive_thresholds(fw)
    out = _envelope("update", scenario, eps, events=events, quarantined=fw.quarantined, final_thresholds=_th(final))
    if violated:
        raise _Outcome(out, EXIT_UNFAITHFUL)
    return out


def cmd_simulate(args, scenario, eps):
    sim = scenario.simulation
    if sim is None:
        raise PreconditionUnmet("scenario has no 'simulation' block")
    seed = sim.seed if args.seed is None else args.seed
    steps = sim.steps if args.steps is None else args.steps
    trace = simulate_stream(scenario.framework, sim.generator, seed, steps, probes=scenario.probes, epsilon=eps)
    if trace.halted:
        raise _Outcome(trace, EXIT_UNFAITHFUL)
    return trace


def cmd_compare(args, scenario, eps):
    if not args.other:
        raise PreconditionUnmet("compare needs --other PATH naming the second observer's scenario")
    other = load_scenario(args.other)
    fw1, fw2 = scenario.framework, other.framework
    probes = _systems(args, scenario)
    if not probes:
        lows, highs = exemplar_box(fw1, fw2)
        probes = probe_grid(lows, highs, args.grid_points)
    rep = compare_observers(fw1, fw2, probes, eps)
    try:
        shared = shared_clear_agreement(fw1, fw2, probes, eps)
    except PreconditionUnmet:
        shared = None
    return _envelope(
        "compare", scenario, eps, other_observer=fw2.observer_id, probes=rep.probed,
        agreement_rate=rep.agreement_rate,
        agreed=[{"id": sid, "verdict": v.value} for sid, v in rep.agreed],
        opposite=[{"id": sid, "first": a.value, "second": b.value} for sid, a, b in rep.opposite],
        borderline_vs_decided=[
            {"id": sid, "first": a.value, "second": b.value} for sid, a, b in rep.borderline_vs_decided
        ],
        emergent_vagueness=rep.emergent_vagueness, shared_clear_agreement=shared,
    )


def cmd_rescale(args, scenario, eps):
    fw = scenario.framework
    th = require_faithful(fw, eps).thresholds
    rmap = build_rescale_map(th, fw.metric.lower, fw.metric.upper)
    target = rmap.target_thresholds()
    systems = _systems(args, scenario)
    values = []
    for s in systems:
        fw.schema.check(s)
        v = metric_value(fw.metric, s)
        r = rmap(v)
        values.append({"id": s.id, "value": encode_real(v), "rescaled": encode_real(r),
                       "verdict": determine(v, th, eps).value,
                       "rescaled_verdict": determine(r, target, eps).value})
    ident = property_identity_analysis(fw, merged_property(fw, eps), systems, eps)
    return _envelope(
        "rescale", scenario, eps,
        map={"gamma0": rmap.gamma0, "eta0": rmap.eta0, "alpha": rmap.alpha, "beta": rmap.beta, "seam": rmap.seam},
        target_thresholds=_th(target), values=values,
        differences=[{"id": sid, "first": a.value, "second": b.value} for sid, a, b in ident.differences],
    )


def cmd_binarize(args, scenario, eps):
    fw = scenario.framework
    th = require_faithful(fw, eps).thresholds
    binary = binarize_metric(fw.metric, th.eta0, eps)
    values = []
    for s in _systems(args, scenario):
        fw.schema.check(s)
        values.append({"id": s.id, "value": encode_real(metric_value(fw.metric, s)),
                       "binarized": metric_value(binary, s)})
    return _envelope("binarize", scenario, eps, eta0=encode_real(th.eta0), binarized_eta0=1.0, values=values)


HANDLERS = {
    "thresholds": cmd_thresholds, "classify": cmd_classify, "faithfulness": cmd_faithfulness,
    "sharpness": cmd_sharpness, "pan-check": cmd_pan_check, "update": cmd_update,
    "simulate": cmd_simulate, "compare": cmd_compare, "rescale": cmd_rescale, "binarize": cmd_binarize,
}


def render_table(report) -> str:
    """Plain-text rendering: scalars as ``key: value`` lines, lists of records as aligned columns."""
    lines = []
    tables = []
    for key, value in report.items():
        if isinstance(value, list) and value and isinstance(value[0], dict):
            tables.append((key, value))
        elif isinstance(value, (dict, list)):
            lines.append(f"{key}: {json.dumps(value)}")
        else:
            lines.append(f"{key}: {value}")
    for key, rows in tables:
        cols = list(rows[0])
        cells = [[json.dumps(r.get(c)) if isinstance(r.get(c), (dict, list)) else str(r.get(c)) for c in cols]
                 for r in rows]
        widths = [max(len(c), *(len(row[i]) for row in cells)) for i, c in enumerate(cols)]
        lines.append("")
        lines.append(f"{key}:")
        lines.append("  ".join(c.ljust(w) for c, w in zip(cols, widths)).rstrip())
        lines.append("  ".join("-" * w for w in widths))
        lines.extend("  ".join(v.ljust(w) for v, w in zip(row, widths)).rstrip() for row in cells)
    return "\n".join(lines) + "\n"


def _render(result, fmt) -> str:
    if hasattr(result, "to_jsonl"):
        if fmt == "json":
            return result.to_jsonl()
        header = result.header()
        rows = [{k: ev.to_dict()[k] for k in ("step", "kind", "target_set", "width_before", "width_after")}
                for ev in result.events]
        return render_table({**{k: v for k, v in header.items() if k != "width_series"}, "events": rows})
    validate_document(result, "report")
    if fmt == "json":
        return json.dumps(result, indent=2, allow_nan=False) + "\n"
    return render_table(result)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--scenario", required=True, metavar="PATH", help="scenario JSON file")
    common.add_argument("--systems", metavar="PATH", help="CSV of systems (id + one column per feature)")
    common.add_argument("--out", metavar="PATH", help="write the report here instead of standard output")
    common.add_argument("--format", choices=("json", "table"), default="json")
    common.add_argument("--epsilon", type=float, help="comparison tolerance (overrides the scenario)")
    common.add_argument("--seed", type=int, help="simulation seed (overrides the scenario)")

    parser = argparse.ArgumentParser(prog="vagueness", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")
    helps = {
        "thresholds": "derive eta0 / gamma0 and the determination intervals",
        "classify": "three-way verdict for each system",
        "faithfulness": "check that the metric separates the exemplars",
        "sharpness": "weak and strong sharpness",
        "pan-check": "floor-condition check over probe systems",
        "update": "apply a CSV stream of a priori exemplars",
        "simulate": "seeded exemplar-stream simulation (JSON-lines trace)",
        "compare": "compare two observers' frameworks",
        "rescale": "merged-region rescaling and the resulting determination changes",
        "binarize": "0/1 version of the metric",
    }
    for name in COMMANDS:
        p = sub.add_parser(name, parents=[common], help=helps[name])
        if name == "simulate":
            p.add_argument("--steps", type=int, help="number of steps (overrides the scenario)")
        if name == "compare":
            p.add_argument("--other", metavar="PATH", help="second observer's scenario")
            p.add_argument("--grid-points", type=int, default=DEFAULT_GRID_POINTS,
                           help="grid points per feature when no probes are given")
    return parser


def _emit(text: str, out) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def run_cli(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        scenario = load_scenario(args.scenario)
        eps = scenario.epsilon if args.epsilon is None else args.epsilon
        if eps < 0:
            raise ValidationError("--epsilon must be non-negative")
        try:
            result = HANDLERS[args.command](args, scenario, eps)
            code = EXIT_OK
        except _Outcome as outcome:
            result, code = outcome.report, outcome.code
        _emit(_render(result, args.format), args.out)
        return code
    except UnfaithfulFramework as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_UNFAITHFUL
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except Exception as exc:  # noqa: BLE001
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


def main() -> None:
    sys.exit(run_cli())
