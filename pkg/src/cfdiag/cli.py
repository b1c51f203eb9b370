"""Command-line interface for diagnosis, benchmarking, and cross-checks.

Subcommands
-----------
``validate``
    Structural and numeric model check; prints an issue report.
``diagnose``
    Rank diseases for an evidence file under one measure or all of them.
``generate``
    Sample a vignette corpus (JSON lines) from a model.
``benchmark``
    Run the top-k ranking benchmark on a loaded or synthesized model and
    emit a JSON report (optionally also a CSV accuracy table).
``crosscheck``
    Compare the closed-form engine against the enumeration oracle (and
    optionally the Monte Carlo estimator) on seeded random evidence.

All randomness flows from the single ``--seed`` flag. Every consumer derives
an independent stream as ``SeedSequence([seed, purpose])`` with a fixed
purpose tag per stream: ``0x5649`` vignette generation, ``0x4D43`` Monte
Carlo, ``0x4E45`` network synthesis, ``0x4343`` crosscheck evidence. The
same argv therefore produces byte-identical output — reports carry no
timestamps, hostnames, or absolute paths.

Exit codes: 0 success, 1 validation or inference failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path
from typing import Sequence

import numpy as np

from .benchmark import evaluate_topk
from .errors import CfdiagError, ZeroLikelihoodError
from .inference import InferenceSettings
from .measures import MEASURE_KINDS, rank_all_measures, rank_diseases
from .montecarlo import mc_estimate_measure
from .network import (
    Evidence,
    NoisyOrNetwork,
    load_network,
    validate_network,
)
from .oracle import measure_oracle, posterior_oracle
from .randomnets import benchmark_network, random_evidence
from .vignettes import MaskingPolicy, generate_vignettes

__all__ = ["main", "build_parser"]

_SEED_SYNTH = 0x4E45  # network synthesis stream
_SEED_CROSS = 0x4343  # crosscheck evidence stream
_DEV_FLOOR = 1e-3  # |got - truth| / max(|truth|, floor): relative for O(1)
#                    values, effectively absolute near zero


def _np_scalar(obj):
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    raise TypeError(f"not JSON serializable: {type(obj).__name__}")


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, default=_np_scalar) + "\n"


def _emit(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


def _fail(message: str) -> int:
    print(f"error: {message}", file=sys.stderr)
    return 1


def _load_model(path: str) -> NoisyOrNetwork:
    """Load and validate; raises CfdiagError with the issue summary."""
    try:
        net = load_network(path)
    except FileNotFoundError:
        raise CfdiagError(f"model file not found: {path}") from None
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise CfdiagError(f"cannot parse model {path}: {exc}") from None
    report = validate_network(net)
    if not report.ok:
        raise CfdiagError(f"invalid model {path}: {report.summary()}")
    return net


def _load_evidence(path: str, net: NoisyOrNetwork) -> Evidence:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            ev = Evidence.from_dict(json.load(fh))
    except FileNotFoundError:
        raise CfdiagError(f"evidence file not found: {path}") from None
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise CfdiagError(f"cannot parse evidence {path}: {exc}") from None
    from .network import check_evidence

    check_evidence(net, ev)  # raises EvidenceError (a CfdiagError) on mismatch
    return ev


def _settings(args: argparse.Namespace) -> InferenceSettings:
    kw = {}
    if getattr(args, "threads", None) is not None:
        kw["threads"] = args.threads
    if getattr(args, "kernel", None) is not None:
        kw["kernel"] = args.kernel
    return InferenceSettings(**kw)


def _policy(args: argparse.Namespace) -> MaskingPolicy:
    return MaskingPolicy(
        risk_observe_prob=args.risk_observe_prob,
        mean_negative_symptoms=args.mean_negative_symptoms,
        reveal_all=args.reveal_all,
        disease_weighting=args.disease_weighting,
    )


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def _cmd_validate(args: argparse.Namespace) -> int:
    try:
        net = load_network(args.model)
    except FileNotFoundError:
        return _fail(f"model file not found: {args.model}")
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        return _fail(f"cannot parse model {args.model}: {exc}")
    report = validate_network(net)
    _emit(
        _dump(
            {
                "ok": report.ok,
                "issues": [
                    {"code": i.code, "node": i.node, "message": i.message}
                    for i in report.issues
                ],
                "counts": {
                    "risk_factors": len(net.risk_factors),
                    "diseases": len(net.diseases),
                    "symptoms": len(net.symptoms),
                },
            }
        ),
        args.out,
    )
    return 0 if report.ok else 1


def _trim_ranking(ranking, top: int):
    if top <= 0 or top >= len(ranking.entries):
        return ranking
    shown = {e.disease for e in ranking.entries[:top]}
    return replace(
        ranking,
        entries=ranking.entries[:top],
        posteriors=ranking.posteriors[:top],
        ties=tuple(t for t in ranking.ties if t.ahead in shown and t.behind in shown),
    )


def _cmd_diagnose(args: argparse.Namespace) -> int:
    net = _load_model(args.model)
    ev = _load_evidence(args.evidence, net)
    settings = _settings(args)
    if args.measure == "all":
        rankings = rank_all_measures(net, ev, settings=settings)
        payload = {
            "rankings": {
                m: _trim_ranking(r, args.top).to_dict() for m, r in rankings.items()
            }
        }
    else:
        ranking = rank_diseases(net, ev, measure=args.measure, settings=settings)
        payload = _trim_ranking(ranking, args.top).to_dict()
    _emit(_dump(payload), args.out)
    return 0


def _cmd_generate(args: argparse.Namespace) -> int:
    net = _load_model(args.model)
    policy = _policy(args)
    vignettes = generate_vignettes(net, args.n, args.seed, policy=policy)
    lines = "".join(json.dumps(v.to_dict(), sort_keys=True) + "\n" for v in vignettes)
    _emit(lines, args.out)
    return 0


def _cmd_benchmark(args: argparse.Namespace) -> int:
    if args.model is not None:
        net = _load_model(args.model)
        source = "file"
    else:
        rng = np.random.default_rng(np.random.SeedSequence([args.seed, _SEED_SYNTH]))
        net = benchmark_network(
            rng,
            n_risks=args.risks,
            n_diseases=args.diseases,
            n_symptoms=args.symptoms,
        )
        report = validate_network(net)
        if not report.ok:  # defensive; synthesis should always be valid
            return _fail(f"synthesized model invalid: {report.summary()}")
        source = "synthetic"
    policy = _policy(args)
    vignettes = generate_vignettes(net, args.vignettes, args.seed, policy=policy)
    echo = dict(policy.to_dict())
    echo.update(
        {
            "seed": args.seed,
            "n_vignettes": args.vignettes,
            "model_source": source,
            "model_size": {
                "risk_factors": len(net.risk_factors),
                "diseases": len(net.diseases),
                "symptoms": len(net.symptoms),
            },
        }
    )
    report = evaluate_topk(
        net,
        vignettes,
        k_max=args.k_max,
        settings=_settings(args),
        policy=echo,
    )
    _emit(report.to_json(), args.out)
    if args.csv is not None:
        Path(args.csv).write_text(report.to_csv(), encoding="utf-8")
    return 0


def _cmd_crosscheck(args: argparse.Namespace) -> int:
    net = _load_model(args.model)
    settings = _settings(args)
    rng = np.random.default_rng(np.random.SeedSequence([args.seed, _SEED_CROSS]))
    max_dev = {m: 0.0 for m in MEASURE_KINDS}
    scored = 0
    skipped = 0
    mc_cases: list[dict] = []
    for _ in range(args.trials):
        ev = random_evidence(net, rng)
        for _ in range(50):
            if ev.positive:
                break
            ev = random_evidence(net, rng)
        try:
            rankings = rank_all_measures(net, ev, settings=settings)
        except ZeroLikelihoodError:
            skipped += 1
            continue
        scored += 1
        post = {
            e.disease: p
            for e, p in zip(
                rankings["posterior"].entries, rankings["posterior"].posteriors
            )
        }
        values = {
            m: {e.disease: e.value for e in rankings[m].entries} for m in MEASURE_KINDS
        }
        for d in net.disease_ids:
            truth_p = posterior_oracle(net, ev, d)
            dev = abs(post[d] - truth_p) / max(abs(truth_p), _DEV_FLOOR)
            max_dev["posterior"] = max(max_dev["posterior"], dev)
            for kind in ("sufficiency", "disablement"):
                truth = measure_oracle(net, ev, d, kind)
                dev = abs(values[kind][d] - truth) / max(abs(truth), _DEV_FLOOR)
                max_dev[kind] = max(max_dev[kind], dev)
        if args.mc_samples and len(mc_cases) < 2 * 2:
            top = rankings["posterior"].entries[0].disease
            for kind in ("sufficiency", "disablement"):
                est = mc_estimate_measure(
                    net, ev, top, kind, args.mc_samples, args.seed
                )
                z = abs(est.value - values[kind][top]) / max(est.stderr, 1e-300)
                mc_cases.append(
                    {
                        "disease": top,
                        "kind": kind,
                        "closed": values[kind][top],
                        "estimate": est.value,
                        "stderr": est.stderr,
                        "z": z,
                        "ess": est.ess,
                        "low_ess": est.low_ess,
                    }
                )
    overall = float(max(max_dev.values())) if scored else float("nan")
    ok = True
    if args.fail_above is not None:
        ok = bool(scored > 0 and overall <= args.fail_above)
    payload = {
        "seed": args.seed,
        "trials": args.trials,
        "scored": scored,
        "skipped_zero_likelihood": skipped,
        "deviation_floor": _DEV_FLOOR,
        "max_deviation": {
            **{m: float(v) for m, v in max_dev.items()},
            "overall": overall,
        },
        "mc": (
            None
            if not args.mc_samples
            else {
                "samples": args.mc_samples,
                "max_z": max((c["z"] for c in mc_cases), default=0.0),
                "cases": mc_cases,
            }
        ),
        "fail_above": args.fail_above,
        "ok": ok,
    }
    _emit(_dump(payload), args.out)
    return 0 if ok else 1


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


def _add_engine_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument(
        "--threads",
        type=int,
        default=None,
        help="walk worker threads (default: CFDIAG_THREADS env var, else 1)",
    )
    p.add_argument(
        "--kernel",
        choices=("auto", "python", "numba"),
        default=None,
        help="subset-walk kernel (default auto)",
    )


def _add_policy_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument(
        "--risk-observe-prob",
        type=float,
        default=0.5,
        help="probability each risk factor is revealed (default 0.5)",
    )
    p.add_argument(
        "--mean-negative-symptoms",
        type=float,
        default=2.0,
        help="expected number of reported-absent symptoms (default 2.0)",
    )
    p.add_argument(
        "--reveal-all",
        action="store_true",
        help="reveal every risk factor and every symptom state",
    )
    p.add_argument(
        "--disease-weighting",
        choices=("uniform", "prevalence"),
        default="uniform",
        help="how the true disease is drawn per vignette (default uniform)",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cfdiag",
        description="Counterfactual diagnosis for three-layer noisy-OR networks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a model file for structural issues")
    p.add_argument("--model", required=True, help="model JSON file")
    p.add_argument("--out", default=None, help="write report here instead of stdout")
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("diagnose", help="rank diseases for an evidence file")
    p.add_argument("--model", required=True, help="model JSON file")
    p.add_argument("--evidence", required=True, help="evidence JSON file")
    p.add_argument(
        "--measure",
        choices=MEASURE_KINDS + ("all",),
        default="sufficiency",
        help="ranking measure (default sufficiency)",
    )
    p.add_argument(
        "--top", type=int, default=0, help="emit only the best N entries (0 = all)"
    )
    p.add_argument("--out", default=None, help="write ranking here instead of stdout")
    _add_engine_flags(p)
    p.set_defaults(func=_cmd_diagnose)

    p = sub.add_parser("generate", help="sample a vignette corpus (JSON lines)")
    p.add_argument("--model", required=True, help="model JSON file")
    p.add_argument("--n", type=int, required=True, help="number of vignettes")
    p.add_argument("--seed", type=int, required=True, help="master seed")
    p.add_argument("--out", default=None, help="output JSONL path (default stdout)")
    _add_policy_flags(p)
    p.set_defaults(func=_cmd_generate)

    p = sub.add_parser("benchmark", help="top-k ranking benchmark")
    p.add_argument("--model", default=None, help="model JSON file (default: synthesize)")
    p.add_argument(
        "--risks", type=int, default=10, help="synthetic model: risk factors (default 10)"
    )
    p.add_argument(
        "--diseases", type=int, default=30, help="synthetic model: diseases (default 30)"
    )
    p.add_argument(
        "--symptoms", type=int, default=50, help="synthetic model: symptoms (default 50)"
    )
    p.add_argument("--vignettes", type=int, required=True, help="corpus size")
    p.add_argument("--seed", type=int, required=True, help="master seed")
    p.add_argument("--k-max", type=int, default=20, help="largest k (default 20)")
    p.add_argument("--out", default=None, help="report JSON path (default stdout)")
    p.add_argument("--csv", default=None, help="also write accuracy CSV here")
    _add_policy_flags(p)
    _add_engine_flags(p)
    p.set_defaults(func=_cmd_benchmark)

    p = sub.add_parser(
        "crosscheck", help="compare the engine against the enumeration oracle"
    )
    p.add_argument("--model", required=True, help="model JSON file (must be small)")
    p.add_argument("--seed", type=int, required=True, help="master seed")
    p.add_argument("--trials", type=int, default=20, help="evidence draws (default 20)")
    p.add_argument(
        "--mc-samples",
        type=int,
        default=0,
        help="also sanity-check the Monte Carlo estimator with this many samples",
    )
    p.add_argument(
        "--fail-above",
        type=float,
        default=None,
        help="exit 1 when the overall max deviation exceeds this",
    )
    p.add_argument("--out", default=None, help="write report here instead of stdout")
    _add_engine_flags(p)
    p.set_defaults(func=_cmd_crosscheck)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CfdiagError as exc:
        return _fail(str(exc))
    except ValueError as exc:
        return _fail(str(exc))


if __name__ == "__main__":
    sys.exit(main())
