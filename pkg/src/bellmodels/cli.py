"""Command-line entry point.

Exit codes: 0 ok, 1 unreadable/malformed input, 2 invalid values,
3 analysis found s_max > 2, 4 construction failed to round-trip (a defect),
5 post-selection requested on a model that never detects both particles.
"""
from __future__ import annotations

import argparse
import csv
import io
import sys
from dataclasses import dataclass
from pathlib import Path

from . import formats
from .bellstats import chsh, chsh_of_coupling, no_signalling
from .errors import BellModelError, EmptyTrials, ZeroDetection
from .formats import FormatError
from .kupczynski import (
    Model1Spec,
    Model3Spec,
    evaluate_model1,
    evaluate_model3,
    loophole_demo,
    postselect,
    universal_construct,
)
from .lhv import Coupling, LhvModel, enumerate_deterministic, predict
from .mcsim import compare, estimate, sample_trials
from .probcore import Alphabet, CondFamily, JointDist, SettingsDist, compose, factor

EXIT_OK, EXIT_PARSE, EXIT_INVALID, EXIT_VIOLATION, EXIT_MISMATCH, EXIT_NO_DETECTION = range(6)


@dataclass(frozen=True)
class RunConfig:
    command: str
    input: Path | None = None
    output: Path | None = None
    seed: int | None = None
    trials: int | None = None
    postselect: bool = False
    float_ingest: bool = False
    format: str = "json"

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> RunConfig:
        return cls(
            command=args.command,
            input=getattr(args, "input", None),
            output=getattr(args, "output", None),
            seed=getattr(args, "seed", None),
            trials=getattr(args, "trials", None),
            postselect=getattr(args, "postselect", False),
            float_ingest=getattr(args, "float_ingest", False),
            format=getattr(args, "format", "json"),
        )


def _emit(text: str, path: Path | None) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _load(cfg: RunConfig):
    return formats.load(cfg.input, float_ingest=cfg.float_ingest)


def _model_settings(spec: Model1Spec) -> SettingsDist:
    return spec.settings if spec.settings is not None else SettingsDist.uniform()


def _as_joint(obj) -> JointDist:
    """The law of (A, B, X, Y) a document describes; uniform settings unless it carries its own."""
    if isinstance(obj, JointDist):
        return obj
    if isinstance(obj, CondFamily):
        return compose(SettingsDist.uniform(), obj)
    if isinstance(obj, Model3Spec):
        return compose(SettingsDist.uniform(), evaluate_model3(obj))
    if isinstance(obj, LhvModel):
        return predict(obj, SettingsDist.uniform())
    if isinstance(obj, Model1Spec):
        return evaluate_model1(obj, _model_settings(obj))
    if isinstance(obj, Coupling):
        return compose(SettingsDist.uniform(), obj.family())
    raise FormatError(f"cannot derive a joint distribution from {type(obj).__name__}")


def cmd_analyze(cfg: RunConfig) -> int:
    obj = _load(cfg)
    doc = {"schema_version": formats.SCHEMA_VERSION, "kind": "analysis"}
    if isinstance(obj, CondFamily):
        cond = obj
    elif isinstance(obj, Model3Spec):
        cond = evaluate_model3(obj)
    elif isinstance(obj, LhvModel):
        cond = factor(predict(obj, SettingsDist.uniform()))[1]
    elif isinstance(obj, Coupling):
        cond = obj.family()
    else:
        joint = _as_joint(obj)
        if joint.alphabet is Alphabet.TERNARY:
            report = postselect(joint)
            doc["postselection"] = formats.to_json(report)
            cond = report.conditional_family
        else:
            _, cond = factor(joint)
    ch = chsh(cond)
    doc["chsh"] = formats.to_json(ch)
    doc["no_signalling"] = formats.to_json(no_signalling(cond))
    _emit(formats.dumps(doc), cfg.output)
    return EXIT_VIOLATION if ch.violates_local_bound else EXIT_OK


def cmd_construct(cfg: RunConfig) -> int:
    obj = _load(cfg)
    if isinstance(obj, JointDist):
        _, obj = factor(obj)
    if not isinstance(obj, CondFamily):
        raise FormatError("construct expects a conditional family (or joint) as target")
    target = obj
    spec = universal_construct(target)
    rebuilt = evaluate_model3(spec)
    mismatched = [
        (pair, xy) for pair in target.q for xy in target[pair] if rebuilt[pair][xy] != target[pair][xy]
    ]
    _emit(formats.dumps(spec), cfg.output)
    log = sys.stderr
    print(f"target: {cfg.input}", file=log)
    print("instrument spaces: {-1,+1} x {(party, setting)}, pairwise disjoint", file=log)
    print("source: one-point space", file=log)
    print(f"re-evaluated {sum(len(v) for v in target.q.values())} probabilities", file=log)
    if mismatched:
        print(f"match: FAILED at {mismatched}", file=log)
        return EXIT_MISMATCH
    print("match: exact", file=log)
    return EXIT_OK


def cmd_simulate(cfg: RunConfig) -> int:
    if cfg.trials is None or cfg.trials < 1:
        raise BellModelError(f"--trials must be a positive integer, got {cfg.trials}")
    joint = _as_joint(_load(cfg))
    trials = sample_trials(joint, cfg.trials, cfg.seed)
    if cfg.postselect:
        exact = postselect(joint).conditional_family
        kept = trials.postselected()
        if len(kept) == 0:
            raise ZeroDetection("no simulated trial survived post-selection")
        report = estimate(kept, seed=cfg.seed)
    else:
        exact = factor(joint, fallback_uniform=True)[1]
        report = estimate(trials, seed=cfg.seed)
    doc = {
        "schema_version": formats.SCHEMA_VERSION,
        "kind": "simulation",
        "trials": cfg.trials,
        "seed": cfg.seed,
        "postselect": cfg.postselect,
        "estimate": formats.to_json(report),
        "comparison": None if report.partial else formats.to_json(compare(report, exact)),
    }
    if cfg.output is not None:
        trials.to_csv(cfg.output)
        Path(f"{cfg.output}.report.json").write_text(formats.dumps(doc))
    else:
        sys.stdout.write(formats.dumps(doc))
    return EXIT_OK


def cmd_enumerate_lhv(cfg: RunConfig) -> int:
    rows = []
    for s in enumerate_deterministic():
        report = chsh_of_coupling(Coupling.point(s))
        rows.append((s, report))
    best = max(r.s_max for _, r in rows)
    if cfg.format == "json":
        doc = {
            "schema_version": formats.SCHEMA_VERSION,
            "kind": "lhv_enumeration",
            "strategies": [
                {**s._asdict(), "s_values": {formats.join_key(k): str(v) for k, v in r.s_values.items()},
                 "s_max": str(r.s_max)}
                for s, r in rows
            ],
            "max_abs_s": str(best),
        }
        _emit(formats.dumps(doc), cfg.output)
        return EXIT_OK
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["x1", "x2", "y1", "y2", "S11", "S12", "S21", "S22", "s_max"])
    for s, r in rows:
        writer.writerow([*s, *(str(r.s_values[k]) for k in sorted(r.s_values)), str(r.s_max)])
    buf.write(f"max |S| = {best}\n")
    _emit(buf.getvalue(), cfg.output)
    return EXIT_OK


def cmd_loophole_demo(cfg: RunConfig) -> int:
    spec = loophole_demo()
    spec = Model1Spec(spec.source, spec.p_instrument, spec.x_response, spec.y_response, SettingsDist.uniform())
    _emit(formats.dumps(spec), cfg.output)
    return EXIT_OK


COMMANDS = {
    "analyze": cmd_analyze,
    "construct": cmd_construct,
    "simulate": cmd_simulate,
    "enumerate-lhv": cmd_enumerate_lhv,
    "loophole-demo": cmd_loophole_demo,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--output", type=Path, help="write the result here instead of stdout")
    common.add_argument("--format", choices=("json", "csv"), default=None)
    common.add_argument("--float-ingest", action="store_true",
                        help="accept float probabilities and renormalize within 1e-9")

    parser = argparse.ArgumentParser(prog="bellmodels", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", parents=[common], help="CHSH and no-signalling report")
    p.add_argument("--input", type=Path, required=True)

    p = sub.add_parser("construct", parents=[common], help="build a contextual model reproducing a target family")
    p.add_argument("--input", type=Path, required=True)

    p = sub.add_parser("simulate", parents=[common], help="seeded Monte Carlo trials and estimates")
    p.add_argument("--input", type=Path, required=True)
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--postselect", action="store_true", help="keep only trials with x*y != 0")

    sub.add_parser("enumerate-lhv", parents=[common], help="CHSH values of the 16 deterministic strategies")
    sub.add_parser("loophole-demo", parents=[common], help="write the synthetic detection-loophole model")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.format is None:
        args.format = "csv" if args.command == "enumerate-lhv" else "json"
    cfg = RunConfig.from_args(args)
    try:
        return COMMANDS[cfg.command](cfg)
    except (FormatError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (ZeroDetection, EmptyTrials) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NO_DETECTION
    except (BellModelError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
