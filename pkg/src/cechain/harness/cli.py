"""Command-line entry point.

Exit codes: 0 success, 1 a check or verification failed, 2 bad configuration.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import tempfile
from pathlib import Path

import numpy as np

from .. import phych, sigpca, timebound
from ..protofsm import ALL_ACTIONS, ALL_DEFENSES, AdversaryAction, Defense, check_action_sets, model_check
from .ce import ce_run
from .config import ConfigError, ScenarioConfig, load_config

OUT_DIR_ENV = "CECHAIN_OUT_DIR"
DEFAULT_SNRS = [0.0, 3.0, 6.0, 9.0, 12.0, 15.0]


class CheckFailed(Exception):
    """Carries a finished report whose check did not pass."""

    def __init__(self, text: str, message: str):
        super().__init__(message)
        self.text = text


def _dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _rows_csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _fmt(x: float) -> str:
    return f"{x:.6g}"


def _section(cfg: ScenarioConfig, name: str, key: str, default):
    return cfg.section(name).get(key, default)


def _int(cfg, name, key, default, minimum=1) -> int:
    v = _section(cfg, name, key, default)
    if isinstance(v, bool) or not isinstance(v, int) or v < minimum:
        raise ConfigError(f"{name}.{key}: expected an integer >= {minimum}, got {v!r}")
    return v


def _snrs(cfg) -> list[float]:
    v = _section(cfg, "sweep", "snrs", DEFAULT_SNRS)
    if not isinstance(v, list) or not v or not all(isinstance(x, (int, float)) for x in v):
        raise ConfigError("sweep.snrs: expected a non-empty list of numbers")
    return [float(x) for x in v]


def _kind(cfg) -> str:
    kind = _section(cfg, "sweep", "kind", cfg.channel.kind if cfg.channel else "awgn")
    if kind not in ("awgn", "rayleigh"):
        raise ConfigError(f"sweep.kind: unknown channel {kind!r}")
    return kind


# -- subcommands ---------------------------------------------------------------

def cmd_ber_sweep(cfg: ScenarioConfig, fmt: str) -> str:
    kind = _kind(cfg)
    n_bits = _int(cfg, "sweep", "bits", 1_000_000)
    rows = []
    for i, snr in enumerate(_snrs(cfg)):
        model = phych.ChannelModel(kind, snr)
        ber = phych.empirical_ber(model, n_bits, [cfg.seed, i])
        rows.append({"snr_db": snr, "kind": kind, "ber": ber, "analytic": phych.flip_probability(model),
                     "bits": n_bits})
    if fmt == "json":
        return _dumps(rows)
    return _rows_csv(("snr_db", "kind", "ber", "analytic", "bits"),
                     [[_fmt(r["snr_db"]), kind, _fmt(r["ber"]), _fmt(r["analytic"]), n_bits] for r in rows])


def cmd_sr_sweep(cfg: ScenarioConfig, fmt: str) -> str:
    kind = _kind(cfg)
    snrs = _snrs(cfg)
    trials = _int(cfg, "sweep", "signatures", 10_000)
    n = _section(cfg, "sweep", "n_frames", None)
    if n is not None and n not in (13, 14, 15):
        raise ConfigError(f"sweep.n_frames: must be 13, 14 or 15, got {n!r}")
    rows = phych.SweepResult()
    for codec_kind in ("identity", "hamming_secded"):
        rows.extend(phych.ber_sr_sweep(snrs, n, codec_kind, trials, cfg.seed, kind))
    rows.sort(key=lambda r: (r.snr_db, r.coded))
    return _dumps(rows.to_json()) if fmt == "json" else rows.to_csv()


def _relay_samples(cfg: ScenarioConfig):
    count = _int(cfg, "relay", "count", 1000)
    t_alter = _section(cfg, "relay", "t_alter", cfg.timing.t_alter)
    try:
        relay_params = timebound.TimingParams.from_config(
            {**_timing_dict(cfg), "t_alter": t_alter})
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"relay.t_alter: {exc}") from None
    benign = timebound.sample_benign(cfg.timing, count, [cfg.seed, 0])
    relayed = timebound.sample_relayed(relay_params, count, [cfg.seed, 1])
    return benign + relayed


def _timing_dict(cfg: ScenarioConfig) -> dict:
    t = cfg.timing
    return {"d": t.d, "d_a1": t.d_a1, "d_a2": t.d_a2, "c": t.c, "t_other": t.t_other,
            "t_other_a": t.t_other_a, "t_in": t.t_in, "inter_frame_mean": t.inter_frame_mean}


def cmd_relay_sim(cfg: ScenarioConfig, fmt: str) -> str:
    samples = _relay_samples(cfg)
    if fmt == "json":
        return _dumps([{"duration_ms": s.duration_ms, "label": s.label} for s in samples])
    return timebound.to_csv(samples)


def cmd_detect(cfg: ScenarioConfig, fmt: str) -> str:
    src = _section(cfg, "detect", "samples", None)
    if src is not None:
        try:
            samples = timebound.from_csv(Path(src).read_text())
        except OSError as exc:
            raise ConfigError(f"detect.samples: cannot read {src} ({exc.strerror})") from None
        except ValueError as exc:
            raise ConfigError(f"detect.samples: {src}: {exc}") from None
    else:
        samples = _relay_samples(cfg)
    kind = _section(cfg, "detect", "kind", "forest")
    frac = _section(cfg, "detect", "test_fraction", 0.3)
    if kind not in ("forest", "threshold"):
        raise ConfigError(f"detect.kind: unknown detector {kind!r}")
    if not isinstance(frac, (int, float)) or not 0 < frac < 1:
        raise ConfigError("detect.test_fraction: must be in (0, 1)")
    train, test = timebound.split(samples, frac, cfg.seed)
    try:
        det = timebound.train_detector(train, kind, cfg.seed, n_trees=_int(cfg, "detect", "n_trees", 25, 25))
    except ValueError as exc:
        raise ConfigError(f"detect: {exc}") from None
    metrics = timebound.evaluate_detector(det, test)
    body = metrics.to_json()
    if fmt == "json":
        text = _dumps({"detector": kind, "metrics": body, "test_size": len(test)})
    else:
        names = ("Accuracy", "F1-score", "TPR", "TNR", "PPV", "NPV")
        text = _rows_csv(("detector",) + names, [[kind] + [_fmt(body[k]) for k in names]])
    need = _section(cfg, "detect", "require", {})
    short = [k for k, v in need.items() if body.get(k, 0.0) < v]
    if short:
        raise CheckFailed(text, f"detector below required {', '.join(short)}")
    return text


def cmd_fsm_check(cfg: ScenarioConfig, fmt: str) -> str:
    sec = cfg.section("fsm")
    try:
        defenses = frozenset(Defense(d) for d in sec.get("defenses", [d.value for d in ALL_DEFENSES]))
        actions = frozenset(AdversaryAction(a) for a in sec.get("actions", [a.value for a in ALL_ACTIONS]))
    except ValueError as exc:
        raise ConfigError(f"fsm: {exc}") from None
    depth = _int(cfg, "fsm", "depth", 40)
    runs = {}
    if sec.get("pairs", True):
        for combo, verdict in check_action_sets(depth, defenses, cfg.n_frames).items():
            if set(combo) <= {a.value for a in actions}:
                runs["+".join(combo)] = verdict
    runs["all"] = model_check(depth, defenses, actions, cfg.n_frames)
    safe = all(v.safe for v in runs.values())
    if fmt == "json":
        text = _dumps({
            "safe": safe,
            "defenses": sorted(d.value for d in defenses),
            "depth": depth,
            "runs": {k: {"safe": v.safe, "states": v.states_explored,
                         "counterexample": [s.to_json() for s in v.counterexample or []] or None}
                     for k, v in runs.items()},
        })
    else:
        text = _rows_csv(("actions", "safe", "states", "trace_length"),
                         [[k, str(v.safe).lower(), v.states_explored, len(v.counterexample or [])]
                          for k, v in runs.items()])
    if not safe:
        raise CheckFailed(text, "counterexample found")
    return text


def cmd_pca(cfg: ScenarioConfig, fmt: str) -> str:
    k = _int(cfg, "pca", "k", 2)
    if k > 3:
        raise ConfigError("pca.k: at most 3 components")
    src = _section(cfg, "pca", "csv", None)
    if src is not None:
        try:
            records = sigpca.ingest_csv(src)
        except OSError as exc:
            raise ConfigError(f"pca.csv: cannot read {src} ({exc.strerror})") from None
        except ValueError as exc:
            raise ConfigError(f"pca.csv: {src}: {exc}") from None
        rng = np.random.default_rng(cfg.seed)
        order = rng.permutation(len(records))
        cut = len(records) // 2
        train = [records[i] for i in order[cut:]]
        test = [records[i] for i in order[:cut]] or train
    else:
        per_class = _int(cfg, "pca", "per_class", 40)
        train = sigpca.synthetic_corpus(per_class, cfg.seed)
        test = sigpca.synthetic_corpus(per_class, cfg.seed + 1)
    if any(r.ap_label is None for r in train + test):
        raise ConfigError("pca.csv: every row needs an ap label")
    report = sigpca.fit_and_score(train, test, k)
    if fmt == "json":
        return _dumps(report.to_json())
    return _rows_csv(("target", "accuracy", "labels"),
                     [["ap", _fmt(report.ap.accuracy), " ".join(report.ap.labels)],
                      ["ce", _fmt(report.ce.accuracy), " ".join(report.ce.labels)]])


def cmd_ce_run(cfg: ScenarioConfig, fmt: str, benchmark: bool = False) -> str:
    report = ce_run(cfg, benchmark=benchmark)
    text = _dumps(report.to_json()) if fmt == "json" else report.to_csv()
    if not report.connected:
        raise CheckFailed(text, f"rejected: {report.reason}")
    return text


COMMANDS = {
    "ber-sweep": cmd_ber_sweep,
    "sr-sweep": cmd_sr_sweep,
    "relay-sim": cmd_relay_sim,
    "detect": cmd_detect,
    "fsm-check": cmd_fsm_check,
    "pca": cmd_pca,
    "ce-run": cmd_ce_run,
}


# -- plumbing ----------------------------------------------------------------------

def write_atomic(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise


def resolve_out(out: str | None, command: str, fmt: str) -> Path | None:
    """``$CECHAIN_OUT_DIR`` replaces the directory part of ``--out``."""
    env = os.environ.get(OUT_DIR_ENV)
    if env:
        name = Path(out).name if out else f"{command}.{fmt}"
        return Path(env) / name
    return Path(out) if out else None


def _seed(text: str) -> int:
    v = int(text, 0)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in an unsigned 64-bit integer")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cechain", description="Signature-chained CE simulator.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="JSON scenario file")
        p.add_argument("--seed", type=_seed, help="overrides the config seed")
        p.add_argument("--out", help="report path (stdout if omitted)")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        if name == "ce-run":
            p.add_argument("--benchmark", action="store_true",
                           help="also time this implementation's sign/verify (not reproducible)")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    code, msg = 0, None
    try:
        cfg = load_config(args.config, args.seed)
        fn = COMMANDS[args.command]
        kw = {"benchmark": args.benchmark} if args.command == "ce-run" else {}
        text = fn(cfg, args.format, **kw)
    except ConfigError as exc:
        prefix = "" if args.config is None or str(args.config) in str(exc) else f"{args.config}: "
        print(f"config error: {prefix}{exc}", file=sys.stderr)
        return 2
    except CheckFailed as exc:
        text, code, msg = exc.text, 1, str(exc)
    dest = resolve_out(args.out, args.command, args.format)
    if dest is None:
        sys.stdout.write(text)
    else:
        write_atomic(dest, text)
    if msg:
        print(f"{args.command}: {msg}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
