"""Command-line front end.

    hdbandit run    CONFIG [--out DIR] [--seed S] [--workers K]
    hdbandit sweep  CONFIG [--out DIR] [--seed S] [--workers K]
    hdbandit memory [--out DIR] [--num-actions N] [--dim D]
    hdbandit plot   CSV OUT.svg

Exit codes: 0 success, 1 usage or configuration error, 2 runtime failure.
All files are written only after the computation finished.

CSV schemas (UTF-8, comma separated, header row first):

    trajectory.csv  round,agent,mean_cumulative_reward,stderr
    summary.csv     agent,N,d,D,bits,epsilon,mean_reward,std,replicates
    memory.csv      algorithm,bits,d,kib
"""

import argparse
import csv
import io
import logging
import os
import sys
from dataclasses import replace

from . import harness, plot
from .harness import ConfigError, ExperimentConfig

log = logging.getLogger("hdbandit")

SEED_ENV = "HDBANDIT_SEED"
DEFAULT_OUT = "results"

TRAJECTORY_COLUMNS = ("round", "agent", "mean_cumulative_reward", "stderr")
SUMMARY_COLUMNS = ("agent", "N", "d", "D", "bits", "epsilon", "mean_reward", "std", "replicates")
MEMORY_COLUMNS = ("algorithm", "bits", "d", "kib")
SCHEMAS = {
    "trajectory": TRAJECTORY_COLUMNS,
    "summary": SUMMARY_COLUMNS,
    "memory": MEMORY_COLUMNS,
}

EXIT_OK, EXIT_USAGE, EXIT_RUNTIME = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _num(v):
    return format(float(v), ".10g")


def _csv_text(header, rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def trajectory_csv(results):
    rows = []
    for res in results:
        s = res.summary
        for t in range(s.trajectory_mean.shape[0]):
            rows.append((t + 1, res.spec.label, _num(s.trajectory_mean[t]),
                         _num(s.trajectory_stderr[t])))
    return _csv_text(TRAJECTORY_COLUMNS, rows)


def summary_csv(rows):
    return _csv_text(SUMMARY_COLUMNS, [
        (r.agent, r.num_actions, r.context_dim, r.dim, r.bits, _num(r.epsilon),
         _num(r.mean_reward), _num(r.std), r.replicates)
        for r in rows
    ])


def memory_csv(rows):
    return _csv_text(MEMORY_COLUMNS, [(r.algorithm, r.bits, r.d, _num(r.kib)) for r in rows])


def _write_all(out_dir, files):
    """Write ``{name: text}`` into ``out_dir``; each file lands atomically."""
    os.makedirs(out_dir, exist_ok=True)
    paths = []
    for name, text in files.items():
        path = os.path.join(out_dir, name)
        tmp = path + ".tmp"
        with open(tmp, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
        paths.append(path)
    return paths


def _seed_override(args):
    if args.seed is not None:
        return args.seed
    raw = os.environ.get(SEED_ENV)
    if raw is None or raw.strip() == "":
        return None
    raw = raw.strip()
    if not raw.isdigit() or int(raw) > 2**64 - 1:
        raise UsageError(f"{SEED_ENV} must be a decimal 64-bit unsigned integer, got {raw!r}")
    return int(raw)


def load_config(args):
    try:
        config = ExperimentConfig.from_json(args.config)
    except FileNotFoundError:
        raise UsageError(f"config file not found: {args.config}") from None
    except ConfigError as exc:
        raise UsageError(f"invalid config {args.config}: {exc}") from None
    seed = _seed_override(args)
    if seed is not None:
        try:
            config = replace(config, seed=seed)
        except ConfigError as exc:
            raise UsageError(str(exc)) from None
    return config


def _out_dir(args, config=None):
    if args.out:
        return args.out
    if config is not None and config.out_dir:
        return config.out_dir
    return DEFAULT_OUT


def cmd_run(args):
    config = load_config(args)
    log.info("run: N=%d d=%d D=%d T=%d R=%d seed=%d", config.num_actions, config.context_dim,
             config.dim, config.horizon, config.replicates, config.seed)
    results = harness.evaluate(config, workers=args.workers)
    rows = [
        harness.SweepRow(r.spec.label, config.num_actions, config.context_dim, config.dim,
                         r.spec.storage_bits, r.epsilon, r.summary.mean_reward, r.summary.std,
                         r.summary.replicates)
        for r in results
    ]
    for r in rows:
        log.info("%-22s eps=%-5g mean=%.4f std=%.4f", r.agent, r.epsilon, r.mean_reward, r.std)
    paths = _write_all(_out_dir(args, config), {
        "trajectory.csv": trajectory_csv(results),
        "summary.csv": summary_csv(rows),
    })
    for p in paths:
        log.info("wrote %s", p)
    return EXIT_OK


def cmd_sweep(args):
    config = load_config(args)

    def progress(n, d):
        log.info("cell N=%d d=%d done", n, d)

    rows = harness.sweep(config, workers=args.workers, progress=progress)
    for p in _write_all(_out_dir(args, config), {"summary.csv": summary_csv(rows)}):
        log.info("wrote %s", p)
    return EXIT_OK


def cmd_memory(args):
    rows = harness.memory_table(num_actions=args.num_actions, dim=args.dim)
    for p in _write_all(_out_dir(args), {"memory.csv": memory_csv(rows)}):
        log.info("wrote %s", p)
    return EXIT_OK


def read_csv(path):
    """Return ``(schema name, rows)``; raise :class:`UsageError` on bad input."""
    try:
        with open(path, encoding="utf-8", newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            rows = [r for r in reader if r]
    except FileNotFoundError:
        raise UsageError(f"CSV file not found: {path}") from None
    if not header:
        raise UsageError(f"empty CSV file: {path}")
    header = [h.strip() for h in header]
    for name, cols in SCHEMAS.items():
        if all(c in header for c in cols):
            break
    else:
        name, cols = max(SCHEMAS.items(), key=lambda kv: sum(c in header for c in kv[1]))
        missing = [c for c in cols if c not in header]
        raise UsageError(
            f"unrecognized CSV schema in {path}: missing column(s) {', '.join(missing)} "
            f"for the {name} schema"
        )
    if not rows:
        raise UsageError(f"no data rows in CSV file: {path}")
    records = [dict(zip(header, r)) for r in rows]
    return name, records


def render_plot(schema, records):
    if schema == "trajectory":
        series, bands = {}, {}
        for r in records:
            t, m, se = int(r["round"]), float(r["mean_cumulative_reward"]), float(r["stderr"])
            series.setdefault(r["agent"], []).append((t, m))
            bands.setdefault(r["agent"], []).append((t, m - se, m + se))
        return plot.line_chart(series, "Mean cumulative reward", "round",
                               "cumulative reward", bands=bands)
    if schema == "memory":
        series = {}
        for r in records:
            label = r["algorithm"] if r["algorithm"] in ("LinEPS", "HD-CB_REAL") \
                else f"{r['algorithm']} {r['bits']}-bit"
            series.setdefault(label, []).append((int(r["d"]), float(r["kib"])))
        return plot.line_chart(series, "Memory footprint", "context dimension d",
                               "KiB (log scale)", log_y=True)
    cells = sorted({(int(r["N"]), int(r["d"])) for r in records})
    index = {c: i + 1 for i, c in enumerate(cells)}
    series = {}
    for r in records:
        series.setdefault(r["agent"], []).append(
            (index[(int(r["N"]), int(r["d"]))], float(r["mean_reward"])))
    for pts in series.values():
        pts.sort()
    return plot.line_chart(series, "Mean reward per configuration",
                           "configuration (N, d) index", "mean reward")


def cmd_plot(args):
    schema, records = read_csv(args.csv)
    svg = render_plot(schema, records)
    out = args.out_path
    parent = os.path.dirname(os.path.abspath(out))
    os.makedirs(parent, exist_ok=True)
    tmp = out + ".tmp"
    with open(tmp, "w", encoding="utf-8") as fh:
        fh.write(svg)
    os.replace(tmp, out)
    log.info("wrote %s (%s schema)", out, schema)
    return EXIT_OK


def _seed_arg(text):
    if not text.isdigit() or int(text) > 2**64 - 1:
        raise argparse.ArgumentTypeError("seed must be a decimal 64-bit unsigned integer")
    return int(text)


def build_parser():
    # verbosity flags are accepted before or after the subcommand
    common = _Parser(add_help=False)
    common.add_argument("-v", "--verbose", action="count", default=argparse.SUPPRESS)
    common.add_argument("-q", "--quiet", action="store_true", default=argparse.SUPPRESS)
    parser = _Parser(prog="hdbandit", description=__doc__.split("\n")[0], parents=[common])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    for name, fn, helptext in (("run", cmd_run, "run the configured agents, tuning epsilon"),
                               ("sweep", cmd_sweep, "sweep the (N, d) grid")):
        p = sub.add_parser(name, help=helptext, parents=[common])
        p.add_argument("config", help="JSON experiment config")
        p.add_argument("--out", help="output directory (overrides config out_dir)")
        p.add_argument("--seed", type=_seed_arg, help=f"base seed (overrides {SEED_ENV} and config)")
        p.add_argument("--workers", type=int, default=1, help="parallel replicate processes")
        p.set_defaults(func=fn)

    p = sub.add_parser("memory", help="write the memory footprint table", parents=[common])
    p.add_argument("--out", help="output directory")
    p.add_argument("--num-actions", type=int, default=10)
    p.add_argument("--dim", type=int, default=1024)
    p.set_defaults(func=cmd_memory)

    p = sub.add_parser("plot", help="render a CSV output as SVG", parents=[common])
    p.add_argument("csv")
    p.add_argument("out_path")
    p.set_defaults(func=cmd_plot)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    verbose, quiet = getattr(args, "verbose", 0), getattr(args, "quiet", False)
    level = logging.WARNING if quiet else (logging.DEBUG if verbose > 1 else logging.INFO)
    log.setLevel(level)
    for old in list(log.handlers):
        log.removeHandler(old)
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("%(message)s"))
    log.addHandler(handler)
    log.propagate = False
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"hdbandit: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except KeyboardInterrupt:
        return EXIT_RUNTIME
    except Exception as exc:  # runtime failure
        log.debug("traceback", exc_info=True)
        print(f"hdbandit: runtime failure: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
