"""Command-line entry point: ``hardylab <subcommand> ...``.

Exit codes: 0 success, 2 when a growth comparison came back Inconclusive,
1 for every other error (the module's message is printed verbatim).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys

from .. import ergolab as el
from .. import lefun as lf
from .. import petlab as pl
from ..ergolab.systems import real_value
from ..errors import HardyLabError, InconclusiveError
from ..lefun.numbers import MP
from .config import ConfigError, ExperimentConfig
from .parser import parse_lefun

EXIT_OK, EXIT_ERROR, EXIT_INCONCLUSIVE = 0, 1, 2
EXPR_COMMANDS = ("classify", "decompose", "window")
CONFIG_COMMANDS = ("average", "weyl", "seminorm", "recurrence", "interval-check")


class Outcome:
    """What a subcommand produced: ladder reports or plain rows, plus an optional JSON document."""

    def __init__(self, reports=(), rows=(), document=None, inconclusive=False, failed=None):
        self.reports = list(reports)
        self.rows = list(rows)
        self.document = document
        self.inconclusive = inconclusive
        self.failed = failed  # message when the command ran but its check did not pass

    def summaries(self) -> list:
        out = []
        for rep in self.reports:
            for N, v, gap in zip(rep.Ns, rep.values, rep.gaps):
                v = complex(v)
                out.append(f"{rep.experiment_id} N={N} value={v.real:.6g}{v.imag:+.6g}j gap={gap:.6g}")
        for row in self.rows:
            out.append(" ".join(f"{k}={v}" for k, v in row.items()))
        return out

    def render(self, fmt: str) -> str:
        if fmt == "json":
            if self.document is not None:
                doc = self.document
            elif self.reports:
                doc = [rep.to_json() for rep in self.reports]
            else:
                doc = self.rows
            return json.dumps(doc, indent=2, sort_keys=True) + "\n"
        if self.reports:
            return el.write_csv(self.reports)
        if not self.rows:
            return ""
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=list(self.rows[0]), lineterminator="\n")
        w.writeheader()
        w.writerows(self.rows)
        return buf.getvalue()


def _functions(cfg: ExperimentConfig) -> list:
    if not cfg.functions:
        raise ConfigError(f"{cfg.command} needs at least one function")
    return [parse_lefun(s) for s in cfg.functions]


def _system(cfg: ExperimentConfig):
    if cfg.system is None:
        raise ConfigError(f"{cfg.command} needs a system")
    d = json.loads(json.dumps(cfg.system))
    return el.system_from_dict(d)


def _observables(cfg: ExperimentConfig, count: int | None = None) -> list:
    obs = cfg.params.get("observables")
    if obs is None:
        raise ConfigError(f"{cfg.command} needs params.observables")
    out = [el.CharacterObservable.from_dict(o) for o in json.loads(json.dumps(obs))]
    if count is not None and len(out) != count:
        raise ConfigError(f"expected {count} observables, got {len(out)}")
    return out


def _ladder(cfg: ExperimentConfig) -> tuple:
    if not cfg.ladder:
        raise ConfigError(f"{cfg.command} needs a ladder")
    return cfg.ladder


# expression commands --------------------------------------------------------------


def cmd_classify(cfg, opts) -> Outcome:
    rows, inconclusive = [], False
    for text, f in zip(cfg.functions, _functions(cfg)):
        try:
            res = lf.is_one_good(f)
            good, witness = ("true" if res.good else "false"), res.witness
        except InconclusiveError as e:
            good, witness, inconclusive = "Inconclusive", str(e), True
        rows.append({"expression": text, "one_good": good, "witness": witness})
    return Outcome(rows=rows, inconclusive=inconclusive)


def cmd_decompose(cfg, opts) -> Outcome:
    fs = _functions(cfg)
    dec = lf.decompose(fs)
    rows = []
    for i, text in enumerate(cfg.functions):
        rows.append(
            {
                "expression": text,
                "g": "; ".join(g.text for g in dec.g),
                "c": "; ".join(str(c) for c in dec.c[i]),
                "p": dec.poly_function(i).text,
                "residual": dec.residual[i].text if dec.residual else "0",
            }
        )
    return Outcome(rows=rows)


def cmd_window(cfg, opts) -> Outcome:
    fs = _functions(cfg)
    orders = cfg.params.get("orders")
    w = lf.find_window(fs, list(orders) if orders is not None else None)
    rows = [
        {"expression": text, "L": w.L.text, "order": k, "special": i == w.special}
        for i, (text, k) in enumerate(zip(cfg.functions, w.orders))
    ]
    return Outcome(rows=rows)


# petlab commands ---------------------------------------------------------------------


def _coefficient(x):
    if isinstance(x, int):
        return x
    if isinstance(x, str):
        return parse_lefun(x)
    raise ConfigError(f"family coefficients are integers or expression strings, got {x!r}")


def load_family(doc) -> pl.PolyFamily:
    """A family from ``{"family": [[c0, c1, ...], ...]}``; coefficients are integers or expressions in t."""
    members = doc.get("family") if isinstance(doc, dict) else doc
    if not isinstance(members, list) or not all(isinstance(m, list) for m in members):
        raise ConfigError("a family is a list of coefficient lists, lowest degree first")
    return pl.family(*(pl.poly(*(_coefficient(c) for c in m)) for m in members))


def _read_json(path: str):
    with open(path) as fh:
        return json.load(fh)


def cmd_pet_reduce(cfg, opts) -> Outcome:
    ref = cfg.params["family"]
    doc = _read_json(cfg.resolve(ref)) if isinstance(ref, str) else json.loads(json.dumps(ref))
    cert = pl.pet_reduce(load_family(doc))
    rows = [
        {"s": cert.s, "t": cert.t, "Y": " ".join(str(y) for y in sorted(cert.Y)), "steps": len(cert.trace)}
    ]
    return Outcome(rows=rows, document=cert.to_json())


def cmd_verify_cert(cfg, opts) -> Outcome:
    cert = pl.ReductionCertificate.from_json(_read_json(cfg.resolve(cfg.params["certificate"])))
    rep = pl.verify_certificate(cert)
    rows = [{"item": c.item, "passed": c.passed, "detail": c.detail} for c in rep.checks]
    failed = None if rep.passed else "; ".join(f"item {c.item} failed" for c in rep.checks if not c.passed)
    return Outcome(rows=rows, failed=failed)


# ergolab commands ---------------------------------------------------------------------


def cmd_average(cfg, opts) -> Outcome:
    sys_ = _system(cfg)
    as_ = _functions(cfg)
    fs = _observables(cfg, len(as_))
    mode = cfg.params.get("mode", "l2")
    if mode == "l2":
        rep = el.l2_ladder(sys_, fs, as_, _ladder(cfg), experiment_id=cfg.name, threads=opts.threads)
    elif mode == "pointwise":
        x = cfg.params.get("point")
        rep = el.pointwise_ladder(sys_, fs, as_, _ladder(cfg), x=x, experiment_id=cfg.name, threads=opts.threads)
    else:
        raise ConfigError(f"unknown averaging mode {mode!r}")
    return Outcome(reports=[rep])


def cmd_weyl(cfg, opts) -> Outcome:
    as_ = _functions(cfg)
    grid = cfg.params.get("frequencies")
    if grid is None:
        raise ConfigError("weyl needs params.frequencies")
    grid = json.loads(json.dumps(grid))
    if grid and not isinstance(grid[0], list):
        grid = [grid]
    reports = []
    for i, ts in enumerate(grid):
        eid = cfg.name if len(grid) == 1 else f"{cfg.name}[{','.join(str(x) for x in ts)}]"
        reports.append(el.weyl_ladder(as_, ts, _ladder(cfg), experiment_id=eid, threads=opts.threads))
    return Outcome(reports=reports)


def cmd_seminorm(cfg, opts) -> Outcome:
    sys_ = _system(cfg)
    ss = cfg.params.get("s", (1, 2))
    ss = [ss] if isinstance(ss, int) else list(ss)
    rows = []
    for j, f in enumerate(_observables(cfg)):
        for s in ss:
            est = el.hk_seminorm_approx(sys_, f, s, schedule=cfg.schedule)
            rows.append(
                {
                    "experiment_id": cfg.name,
                    "observable": j,
                    "s": s,
                    "schedule": " ".join(str(h) for h in est.schedule),
                    "value": repr(est.value),
                    "oracle": "" if est.oracle is None else repr(est.oracle),
                    "sensitivity": "" if est.sensitivity is None else repr(est.sensitivity),
                }
            )
    return Outcome(rows=rows)


def cmd_recurrence(cfg, opts) -> Outcome:
    sys_ = _system(cfg)
    as_ = _functions(cfg)
    box = cfg.params.get("box")
    if box is None:
        raise ConfigError("recurrence needs params.box")
    box = json.loads(json.dumps(box))
    if box and not isinstance(box[0], list):
        box = [box]
    Ns = _ladder(cfg)
    vals = tuple(complex(el.recurrence_average(sys_, box, as_, N, threads=opts.threads)) for N in Ns)
    measure = math.prod(min(1.0, float(real_value(b)[0] - real_value(a)[0])) for a, b in box)
    target = complex(measure ** (len(as_) + 1))
    return Outcome(reports=[el.AverageReport(cfg.name, "recurrence", Ns, vals, target)])


def cmd_interval_check(cfg, opts) -> Outcome:
    sys_ = _system(cfg)
    as_ = _functions(cfg)
    fs = _observables(cfg, len(as_))
    L = parse_lefun(cfg.params.get("window", "t^(3/5)"))
    d = int(cfg.params.get("d", 2))
    tol = float(cfg.params.get("tolerance", 0.02))
    rows, failed = [], []
    for R in _ladder(cfg):
        lhs, rhs = el.short_interval_double_average(sys_, fs, as_, R, L, d, threads=opts.threads)
        bound = rhs ** (1 / d)
        holds = lhs <= bound + tol
        if not holds:
            failed.append(R)
        rows.append({"experiment_id": cfg.name, "R": R, "lhs": repr(lhs), "rhs": repr(rhs), "bound": repr(bound), "holds": holds})
    return Outcome(rows=rows, failed=f"inequality fails at R={failed}" if failed else None)


HANDLERS = {
    "classify": cmd_classify,
    "decompose": cmd_decompose,
    "window": cmd_window,
    "pet-reduce": cmd_pet_reduce,
    "verify-cert": cmd_verify_cert,
    "average": cmd_average,
    "weyl": cmd_weyl,
    "seminorm": cmd_seminorm,
    "recurrence": cmd_recurrence,
    "interval-check": cmd_interval_check,
}


# driver ----------------------------------------------------------------------------------


class Options(argparse.Namespace):
    ladder = None
    precision_bits = None
    threads = 1
    out = None
    format = "csv"


def run(cfg: ExperimentConfig, opts=None, stdout=None, stderr=None) -> int:
    """Dispatch a config; writes the report and returns the exit code."""
    opts = opts or Options()
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        if opts.ladder:
            cfg = ExperimentConfig.from_json({**cfg.to_json(), "ladder": list(opts.ladder)}, cfg.base_dir)
        if opts.precision_bits:
            with MP.workprec(int(opts.precision_bits)):
                outcome = HANDLERS[cfg.command](cfg, opts)
        else:
            outcome = HANDLERS[cfg.command](cfg, opts)
    except InconclusiveError as e:
        print(f"Inconclusive: {e}", file=stderr)
        return EXIT_INCONCLUSIVE
    except (HardyLabError, ValueError, TypeError, KeyError, OSError) as e:
        print(f"error: {e}", file=stderr)
        return EXIT_ERROR
    text = outcome.render(opts.format)
    target = opts.out or cfg.output
    if target:
        with open(cfg.resolve(target) if not opts.out else target, "w", newline="") as fh:
            fh.write(text)
        log = stdout
    else:
        stdout.write(text)
        log = stderr
    for line in outcome.summaries():
        print(line, file=log)
    if outcome.failed:
        print(f"error: {outcome.failed}", file=stderr)
        return EXIT_ERROR
    return EXIT_INCONCLUSIVE if outcome.inconclusive else EXIT_OK


def _ladder_arg(text: str) -> tuple:
    try:
        return tuple(int(float(x)) for x in text.replace(" ", "").split(",") if x)
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"bad ladder {text!r}") from e


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--ladder", type=_ladder_arg, help="comma-separated N values, overrides the config")
    common.add_argument("--precision-bits", type=int, help="mpmath working precision for symbolic evaluation")
    common.add_argument("--threads", type=int, default=1)
    common.add_argument("--out", help="report path (default: config output, else stdout)")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    p = argparse.ArgumentParser(prog="hardylab", description="Hardy-sequence growth calculus, PET reduction and ergodic averages.")
    sub = p.add_subparsers(dest="command", required=True)
    for name in EXPR_COMMANDS:
        sp = sub.add_parser(name, parents=[common])
        sp.add_argument("expressions", nargs="+")
    sp = sub.add_parser("pet-reduce", parents=[common])
    sp.add_argument("family")
    sp = sub.add_parser("verify-cert", parents=[common])
    sp.add_argument("certificate")
    for name in CONFIG_COMMANDS:
        sp = sub.add_parser(name, parents=[common])
        sp.add_argument("config")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command in EXPR_COMMANDS:
            cfg = ExperimentConfig(name=args.command, command=args.command, functions=args.expressions)
        elif args.command == "pet-reduce":
            cfg = ExperimentConfig(name="pet-reduce", command="pet-reduce", params={"family": args.family})
        elif args.command == "verify-cert":
            cfg = ExperimentConfig(name="verify-cert", command="verify-cert", params={"certificate": args.certificate})
        else:
            cfg = ExperimentConfig.load(args.config)
            if cfg.command != args.command:
                raise ConfigError(f"config command {cfg.command!r} does not match subcommand {args.command!r}")
    except (HardyLabError, ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR
    return run(cfg, args)


if __name__ == "__main__":
    sys.exit(main())
