"""Command-line front end.

    stablelike <experiment> [flags]      run one experiment
    stablelike rerun MANIFEST            re-run a manifest and compare digests
    stablelike validate [flags]          print diagnostics only

Exit codes: 0 success, 1 configuration error, 2 runtime failure,
3 failed check (an experiment's own pass criterion, or a digest mismatch).
"""

from __future__ import annotations

import argparse
import json
import sys
import traceback

from .config import EXPERIMENTS, ConfigError, ExperimentConfig, validate
from .runner import OUT_ENV, rerun, run

EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME, EXIT_CHECK = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def parse_beta(text: str) -> dict:
    """``constant:1.5``, ``bump``, ``bump:low,amplitude,width`` or a JSON object."""
    text = text.strip()
    if text.startswith("{"):
        return json.loads(text)
    kind, _, rest = text.partition(":")
    if kind == "constant":
        return {"kind": "constant", "alpha": float(rest)}
    if kind in ("bump", "rational_bump"):
        vals = [float(v) for v in rest.split(",")] if rest else []
        keys = ("low", "amplitude", "width")
        return {"kind": "rational_bump", **dict(zip(keys, vals))}
    raise ValueError(f"cannot parse index descriptor {text!r}")


def _param(text: str) -> tuple[str, object]:
    key, sep, val = text.partition("=")
    if not sep:
        raise argparse.ArgumentTypeError(f"expected KEY=VALUE, got {text!r}")
    try:
        return key, json.loads(val)
    except json.JSONDecodeError:
        return key, val


def _add_run_flags(p: argparse.ArgumentParser):
    p.add_argument("--config", help="JSON config (or manifest) to start from")
    p.add_argument("--beta", help="index: constant:A, bump[:low,amp,width] or JSON")
    p.add_argument("--d", type=int)
    p.add_argument("--x0", help="comma-separated starting point")
    p.add_argument("--horizon", type=float)
    p.add_argument("--epsilon", help="cutoff in (0,1) or 'auto'")
    p.add_argument("--max-events", type=float, help="event budget per path for auto cutoff")
    p.add_argument("--n-paths", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--param", action="append", type=_param, default=[],
                   metavar="KEY=VALUE", help="estimator parameter (JSON value)")
    p.add_argument("--out", help=f"output directory (default ${OUT_ENV}/<experiment>-seed<N>)")
    p.add_argument("--workers", type=int, default=1)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="stablelike", description="Stable-like process experiments.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in EXPERIMENTS:
        p = sub.add_parser(name, help=f"run the {name} experiment")
        _add_run_flags(p)
        if name == "couple":
            p.add_argument("--replay", help="stream file (.bin, or .csv) to drive the pair")
    p = sub.add_parser("validate", help="print config diagnostics")
    p.add_argument("experiment", choices=EXPERIMENTS)
    _add_run_flags(p)
    p = sub.add_parser("rerun", help="re-run a manifest and compare digests")
    p.add_argument("manifest")
    p.add_argument("--out")
    p.add_argument("--workers", type=int, default=1)
    return parser


def config_from_args(experiment: str, args) -> ExperimentConfig:
    doc: dict = {}
    if args.config:
        doc = ExperimentConfig.load(args.config).to_dict()
    doc["experiment"] = experiment
    if args.beta:
        doc["beta"] = parse_beta(args.beta)
    if args.d is not None:
        doc["d"] = args.d
    if args.x0 is not None:
        doc["x0"] = [float(v) for v in args.x0.split(",")]
    for key in ("horizon", "n_paths", "seed", "max_events"):
        val = getattr(args, key)
        if val is not None:
            doc[key] = val
    if args.epsilon is not None:
        doc["epsilon"] = "auto" if args.epsilon == "auto" else float(args.epsilon)
    params = dict(doc.get("params") or {})
    params.update(dict(args.param))
    if getattr(args, "replay", None):
        params["replay"] = args.replay
    doc["params"] = params
    if args.out:
        doc["out_dir"] = args.out
    return ExperimentConfig.from_dict(doc)


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:   # usage errors and --help, as a return value
        return exc.code if isinstance(exc.code, int) else EXIT_CONFIG
    try:
        if args.command == "rerun":
            manifest, same = rerun(args.manifest, args.workers, args.out)
            for name, ok in sorted(same.items()):
                print(f"{'same' if ok else 'DIFF'}  {name}")
            return EXIT_OK if all(same.values()) else EXIT_CHECK
        experiment = args.experiment if args.command == "validate" else args.command
        config = config_from_args(experiment, args)
        if args.command == "validate":
            diags = validate(config)
            for d in diags:
                print(d)
            return EXIT_CONFIG if any(d.level == "error" for d in diags) else EXIT_OK
        for d in validate(config):
            if d.level == "warning":
                print(d, file=sys.stderr)
        manifest = run(config, workers=args.workers)
    except (ConfigError, ValueError, json.JSONDecodeError) as exc:
        if isinstance(exc, ConfigError):
            for d in exc.diagnostics:
                print(d, file=sys.stderr)
        else:
            print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception:  # noqa: BLE001 - report and map to the runtime exit code
        traceback.print_exc()
        return EXIT_RUNTIME
    print(json.dumps(manifest.summary, indent=2, sort_keys=True, default=str))
    print(f"outputs in {manifest.out_dir}")
    if manifest.summary.get("passed") is False:
        return EXIT_CHECK
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
