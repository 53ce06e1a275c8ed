"""Command-line entry points.

    omg run <panel|juggle|catch|medic> [--script f.jsonl] [--seed N]
            [--log out.jsonl] [--audio out.wav]
    omg replay --log f.jsonl [--script s.jsonl]
    omg metrics --log f.jsonl [--json]
    omg train-gestures --seed N --out model.json
    omg eval-gestures --model model.json --report report.json
    omg serve --port 7321
"""

from __future__ import annotations

import argparse
import json
import sys

from . import gestures, lstm
from .metrics import compute_metrics
from .recognizer import StreamConfig, evaluate_stream
from .scenarios import SCENARIO_NAMES, replay_verify, run_scenario


def _cmd_run(args) -> int:
    log = run_scenario(
        args.scenario,
        script=args.script,
        seed=args.seed,
        log_path=args.log,
        audio_path=args.audio,
        max_ticks=args.ticks,
    )
    counts: dict[str, int] = {}
    for e in log.events:
        counts[e.type] = counts.get(e.type, 0) + 1
    print(f"{args.scenario}: {len(log.events)} events over "
          f"{log.events[-1].tick if log.events else 0} ticks; "
          f"completed={log.completed}")
    for k in sorted(counts):
        print(f"  {k}: {counts[k]}")
    if args.log:
        print(f"log written to {args.log}")
    if args.audio:
        print(f"audio written to {args.audio}")
    return 0 if log.completed else 1


def _cmd_replay(args) -> int:
    result = replay_verify(args.log, script=args.script, scenario=args.scenario)
    if result.ok:
        print("replay OK: log matches byte for byte")
        return 0
    print(f"replay FAILED at line {result.first_divergent_line}: {result.detail}")
    return 1


def _cmd_metrics(args) -> int:
    report = compute_metrics(args.log)
    if args.json:
        print(json.dumps(report.to_dict(), indent=2))
    else:
        print(f"scenario: {report.scenario}  completed: {report.completed}")
        for t in report.tasks:
            took = "incomplete" if t.time_to_complete_s is None else f"{t.time_to_complete_s:.3f}s"
            print(f"  {t.name}: {took}  errors={t.error_count}")
        print(f"total errors: {report.total_errors}")
        if report.recognition:
            r = report.recognition
            print(f"recognition: n={r.count} median={r.median_s * 1e3:.0f}ms "
                  f"p95={r.p95_s * 1e3:.0f}ms")
    return 0


def _cmd_train(args) -> int:
    print(f"generating dataset (seed={args.seed}, {args.per_class}/class)...")
    data = gestures.generate_dataset(seed=args.seed, per_class_count=args.per_class)
    config = lstm.TrainConfig(seed=args.seed, epochs=args.epochs, hidden=args.hidden)
    print(f"training LSTM (hidden={config.hidden}, epochs={config.epochs})...")
    result = lstm.train(data, config)
    lstm.save_model(result.model, args.out)
    print(f"holdout accuracy: {result.holdout_accuracy:.4f}")
    print(f"model written to {args.out}")
    return 0


def _cmd_eval(args) -> int:
    model = lstm.load_model(args.model)
    data = gestures.generate_dataset(seed=args.seed, per_class_count=args.per_class)
    feats, labels = lstm.featurize_samples(data)
    accuracy = lstm.evaluate(model, feats, labels)
    stream = evaluate_stream(model, seed=args.seed + 1, n_gestures=args.stream_gestures,
                             config=StreamConfig())
    report = {
        "seed": args.seed,
        "batch_accuracy": accuracy,
        "stream": {
            "gestures": len(stream.script),
            "matched": stream.matched,
            "mislabeled": stream.mislabeled,
            "median_latency_s": stream.median_latency_s,
            "latencies_s": stream.latencies_s,
        },
    }
    with open(args.report, "w") as fh:
        json.dump(report, fh, indent=2)
    print(f"batch accuracy: {accuracy:.4f}")
    print(f"stream: {stream.matched}/{len(stream.script)} matched, "
          f"median latency {stream.median_latency_s * 1e3:.0f} ms")
    print(f"report written to {args.report}")
    return 0


def _cmd_serve(args) -> int:
    from .server import serve

    serve(port=args.port, host=args.host, out_dir=args.out_dir)
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="omg", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run a scenario from a trajectory script")
    p.add_argument("scenario", choices=SCENARIO_NAMES)
    p.add_argument("--script", default=None, help="trajectory JSONL (default: shipped script)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--log", default=None, help="write the event log here")
    p.add_argument("--audio", default=None, help="render contact tones to this WAV")
    p.add_argument("--ticks", type=int, default=None, help="cap the tick count")
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("replay", help="re-run a log's script and byte-compare")
    p.add_argument("--log", required=True)
    p.add_argument("--script", default=None)
    p.add_argument("--scenario", default=None)
    p.set_defaults(func=_cmd_replay)

    p = sub.add_parser("metrics", help="compute usability metrics from a log")
    p.add_argument("--log", required=True)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_metrics)

    p = sub.add_parser("train-gestures", help="train the gesture classifier")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--per-class", type=int, default=200)
    p.add_argument("--epochs", type=int, default=lstm.TrainConfig.epochs)
    p.add_argument("--hidden", type=int, default=lstm.TrainConfig.hidden)
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("eval-gestures", help="evaluate a trained model")
    p.add_argument("--model", required=True)
    p.add_argument("--report", required=True)
    p.add_argument("--seed", type=int, default=100)
    p.add_argument("--per-class", type=int, default=40)
    p.add_argument("--stream-gestures", type=int, default=12)
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("serve", help="serve live sessions (protocol v1)")
    p.add_argument("--port", type=int, default=7321)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--out-dir", default=None, help="write session logs here")
    p.set_defaults(func=_cmd_serve)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
