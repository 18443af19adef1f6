"""Command-line interface.

    robustprice price  --mu 0.5 --beta 1 --sigma 0.2
    robustprice tail   --mu 0.5 --beta 1 --sigma 0.3 --p 0.3
    robustprice sweep  --figure 3b
    robustprice sweep  --param price --from 0.01 --to 0.99 --steps 99 --mu 0.5 --beta 1 --sigma 0.33
    robustprice regions --mu 0.5 --beta 1 --steps 51
    robustprice queue  --mu 2 --beta 10 --sigma 2 --lam 5 --theta 2 --h 1
    robustprice bundle --mu 0.5 --beta 1 --sigma 0.4 --m 3
    robustprice verify --trials 100 --seed 7

Exit codes: 0 success, 1 verification failure, 2 invalid model parameters
(the error name is printed on stderr), 64 bad command line.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from . import __version__
from .bundling import BundleQuery, bundle_price, bundle_threshold
from .exceptions import RobustPriceError
from .guarantees import guarantee_ratio
from .market import MarketInfo, max_sigma
from .pricing import (classify_region, optimal_price, revenue_curve, thresholds,
                      worst_case_revenue)
from .queueing import QueueMarket, equilibrium, optimal_queue_price, tail_region
from .tailbound import witness_distribution, worst_case_tail
from .verification import run_all

EXIT_OK, EXIT_VERIFY, EXIT_DOMAIN, EXIT_USAGE = 0, 1, 2, 64

FIGURES = ("2a", "2b", "3a", "3b", "4", "5", "6a", "6b", "7a", "7b")
SWEEP_PARAMS = ("sigma", "sigma_lo", "sigma_hi", "beta", "price", "h", "lambda")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# -- formatting ------------------------------------------------------------

def fmt(x) -> str:
    """Shortest round-trip text of ``x`` rounded to 12 significant digits."""
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x)).lower()
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return repr(float(f"{float(x):.12g}"))
    return str(x)


def _round(obj):
    if isinstance(obj, dict):
        return {k: _round(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round(v) for v in obj]
    if isinstance(obj, (float, np.floating)):
        return float(f"{float(obj):.12g}")
    return obj


def to_json(obj) -> str:
    return json.dumps(_round(obj)) + "\n"


def to_csv(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) for v in row])
    return buf.getvalue()


@dataclass(frozen=True)
class SweepSpec:
    parameter: str
    start: float
    stop: float
    steps: int

    def __post_init__(self):
        if self.parameter not in SWEEP_PARAMS:
            raise UsageError(f"unknown sweep parameter {self.parameter!r}")
        if not self.start < self.stop:
            raise UsageError("--from must be smaller than --to")
        if self.steps < 2:
            raise UsageError("--steps must be at least 2")

    def values(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.steps)


# -- argument handling -------------------------------------------------------

def _market_parent() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("market")
    g.add_argument("--mu", type=float, help="mean valuation")
    g.add_argument("--sigma", type=float, help="shorthand for --sigma-lo X --sigma-hi X")
    g.add_argument("--sigma-lo", type=float, dest="sigma_lo", help="lower std bound (default 0)")
    g.add_argument("--sigma-hi", type=float, dest="sigma_hi",
                   help="upper std bound (default sqrt(mu(beta-mu)))")
    g.add_argument("--beta", type=float, help="upper bound of the valuation support")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="write output to this file instead of stdout")
    p.add_argument("--format", choices=("json", "csv"), default=None)
    return p


def market_from_args(args) -> MarketInfo:
    if args.mu is None or args.beta is None:
        raise UsageError("--mu and --beta are required")
    if args.sigma is not None:
        if args.sigma_lo is not None or args.sigma_hi is not None:
            raise UsageError("--sigma cannot be combined with --sigma-lo/--sigma-hi")
        lo = hi = args.sigma
    else:
        lo, hi = args.sigma_lo, args.sigma_hi
    data = {"mu": args.mu, "beta": args.beta}
    if lo is not None:
        data["sigma_lo"] = lo
    if hi is not None:
        data["sigma_hi"] = hi
    return MarketInfo.from_dict(data)


def _queue_from_args(args, m: MarketInfo) -> QueueMarket:
    if args.lam is None or args.theta is None or args.h is None:
        raise UsageError("--lam, --theta and --h are required")
    return QueueMarket(m, args.lam, args.theta, args.h)


def build_parser() -> argparse.ArgumentParser:
    parent = _market_parent()
    parser = _Parser(prog="robustprice",
                     description="Maximin pricing with mean, variance and support information.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sub.add_parser("price", parents=[parent], help="robust price, region and guarantee")

    t = sub.add_parser("tail", parents=[parent], help="worst-case tail probability at a price")
    t.add_argument("--p", type=float, required=True)
    t.add_argument("--witness", action="store_true", help="include an attaining distribution")

    s = sub.add_parser("sweep", parents=[parent], help="CSV data behind a figure or a custom sweep")
    s.add_argument("--figure", choices=FIGURES)
    s.add_argument("--param", choices=SWEEP_PARAMS)
    s.add_argument("--from", dest="start", type=float)
    s.add_argument("--to", dest="stop", type=float)
    s.add_argument("--steps", type=int)
    _queue_flags(s, required=False)

    r = sub.add_parser("regions", parents=[parent], help="thresholds and region map")
    r.add_argument("--steps", type=int, default=51, help="grid points per sigma axis")

    q = sub.add_parser("queue", parents=[parent], help="robust pricing of an unobservable queue")
    _queue_flags(q, required=True)
    q.add_argument("--p", type=float, help="evaluate the equilibrium at this price")
    q.add_argument("--from", dest="start", type=float)
    q.add_argument("--to", dest="stop", type=float)
    q.add_argument("--steps", type=int)

    b = sub.add_parser("bundle", parents=[parent], help="price a bundle of i.i.d. goods")
    b.add_argument("--m", type=int, required=True, help="bundle size")

    v = sub.add_parser("verify", parents=[parent], help="oracle agreement checks")
    v.add_argument("--trials", type=int, default=100)
    return parser


def _queue_flags(p, required: bool):
    p.add_argument("--lam", type=float, required=required, help="potential arrival rate")
    p.add_argument("--theta", type=float, required=required, help="service rate")
    p.add_argument("--h", type=float, required=required, help="waiting cost per unit time")


# -- commands ----------------------------------------------------------------

def cmd_price(args) -> tuple[str, str]:
    m = market_from_args(args)
    dec = optimal_price(m)
    rep = guarantee_ratio(m)
    if args.format == "csv":
        c = dec.candidates
        return "", to_csv(
            ["price", "region", "worst_case_revenue", "low", "mid", "high", "ratio"],
            [[dec.price, dec.region.value, dec.worst_case_revenue,
              c.p_low, c.p_mid, c.p_high, rep.ratio]])
    out = dec.to_dict()
    out["guarantee"] = rep.to_dict()
    return "", to_json(out)


def cmd_tail(args):
    m = market_from_args(args)
    res = worst_case_tail(m, args.p)
    if args.format == "csv":
        return "", to_csv(["p", "value", "region"], [[res.price, res.value, res.region.value]])
    out = res.to_dict()
    if args.witness:
        out["witness"] = witness_distribution(m, args.p).to_dict()
    return "", to_json(out)


def _price_axis(top: float, steps: int) -> np.ndarray:
    return np.linspace(0.0, top, steps + 1)[1:]


def _revenue_rows(markets, steps):
    for x, m in markets:
        prices = _price_axis(m.beta, steps)
        for p, r in zip(prices, revenue_curve(m, prices)):
            yield [x, p, r]


def _sigma_axis(mu, beta, steps):
    return np.linspace(0.0, max_sigma(mu, beta), steps + 2)[1:-1]


def _queue_revenue_rows(label_values, make_queue, top, steps, column="revenue"):
    for x in label_values:
        q = make_queue(x)
        for p in _price_axis(top, steps):
            eq = equilibrium(q, float(p))
            yield [x, p, eq.gamma_star if column == "gamma_star" else eq.revenue]


def figure_data(fig: str, steps: int | None = None) -> tuple[list[str], Iterable]:
    """Header and rows of one of the preset sweeps (``--figure``)."""
    mu, beta = 0.5, 1.0
    if fig == "2a":
        n = steps or 200
        ms = [(s, MarketInfo(mu, 0.0, s, beta)) for s in (0.30, 0.33, 0.36, 0.40)]
        return ["sigma_hi", "p", "revenue"], _revenue_rows(ms, n)
    if fig == "3a":
        n = steps or 200
        ms = [(s, MarketInfo(mu, s, s, beta)) for s in (0.20, 0.25, 0.30, 0.35)]
        return ["sigma", "p", "revenue"], _revenue_rows(ms, n)
    if fig in ("2b", "3b"):
        sig = _sigma_axis(mu, beta, steps or 400)
        if fig == "2b":
            rows = ([s, optimal_price(MarketInfo(mu, 0.0, s, beta)).price] for s in sig)
            return ["sigma_hi", "price"], rows
        return ["sigma", "price"], ([s, optimal_price(MarketInfo(mu, s, s, beta)).price] for s in sig)
    if fig == "4":
        sig = _sigma_axis(mu, beta, steps or 200)

        def rows():
            for s in sig:
                yield ["precise", s, guarantee_ratio(MarketInfo(mu, s, s, beta)).ratio]
            for s in sig:
                yield ["upper_only", s, guarantee_ratio(MarketInfo(mu, 0.0, s, beta)).ratio]
        return ["case", "sigma", "ratio"], rows()
    if fig == "5":
        return ["sigma_lo", "sigma_hi", "region"], region_map(mu, beta, steps or 51)

    lam, theta, mu_q = 5.0, 2.0, 2.0
    n = steps or 300
    if fig in ("6a", "6b"):
        col = "gamma_star" if fig == "6a" else "revenue"
        rows = _queue_revenue_rows(
            (2.0, 2.2, 2.4, 2.6),
            lambda s: QueueMarket(MarketInfo(mu_q, s, s, 10.0), lam, theta, 1.0),
            6.0, n, col)
        return ["sigma", "p", col], rows
    if fig == "7a":
        rows = _queue_revenue_rows(
            (1.0, 2.0, 3.0, 5.0),
            lambda h: QueueMarket(MarketInfo(mu_q, 2.0, 2.0, 10.0), lam, theta, h), 4.0, n)
        return ["h", "p", "revenue"], rows
    if fig == "7b":
        rows = _queue_revenue_rows(
            (8.0, 10.0, 12.0, 14.0),
            lambda b: QueueMarket(MarketInfo(mu_q, 2.0, 2.0, b), lam, theta, 1.0), 4.0, n)
        return ["beta", "p", "revenue"], rows
    raise UsageError(f"unknown figure {fig!r}")


def region_map(mu: float, beta: float, steps: int):
    axis = np.linspace(0.0, max_sigma(mu, beta), steps)
    for hi in axis:
        for lo in axis:
            if lo <= hi:
                yield [lo, hi, classify_region(MarketInfo(mu, lo, hi, beta)).value]


def _custom_sweep(args) -> tuple[list[str], Iterable]:
    if None in (args.param, args.start, args.stop, args.steps):
        raise UsageError("sweep needs --figure or all of --param/--from/--to/--steps")
    spec = SweepSpec(args.param, args.start, args.stop, args.steps)
    xs = spec.values()
    if spec.parameter == "price":
        m = market_from_args(args)
        return ["p", "revenue"], ([p, worst_case_revenue(m, p)] for p in xs)
    if spec.parameter in ("h", "lambda"):
        m = market_from_args(args)
        a = argparse.Namespace(**vars(args))
        # the swept flag need not be given
        if spec.parameter == "h":
            a.h = spec.start
        else:
            a.lam = spec.start
        base = _queue_from_args(a, m)
        key = "hold_cost" if spec.parameter == "h" else "lam"

        def qrows():
            for x in xs:
                res = optimal_queue_price(base.replace(**{key: float(x)}))
                yield [x, res.price, res.revenue, res.mode]
        return [spec.parameter, "price", "revenue", "mode"], qrows()

    def rows():
        for x in xs:
            a = argparse.Namespace(**vars(args))
            if spec.parameter == "sigma":
                a.sigma, a.sigma_lo, a.sigma_hi = float(x), None, None
            else:
                setattr(a, spec.parameter, float(x))
            m = market_from_args(a)
            dec = optimal_price(m)
            yield [x, dec.price, dec.worst_case_revenue, dec.region.value]
    return [spec.parameter, "price", "worst_case_revenue", "region"], rows()


def cmd_sweep(args):
    if args.figure is not None:
        header, rows = figure_data(args.figure, args.steps)
    else:
        header, rows = _custom_sweep(args)
    rows = list(rows)
    if args.format == "json":
        return "", to_json([dict(zip(header, r)) for r in rows])
    return "", to_csv(header, rows)


def cmd_regions(args):
    if args.mu is None or args.beta is None:
        raise UsageError("--mu and --beta are required")
    if args.steps < 2:
        raise UsageError("--steps must be at least 2")
    if args.format == "json":
        m = market_from_args(args)
        th = thresholds(m)
        out = {"f": th.f_val, "g": th.g_val, "h": th.h_val,
               "sigma_bar_star": th.sigma_bar_star, "sigma_star": th.sigma_star,
               "region": classify_region(m, th).value}
        return "", to_json(out)
    MarketInfo(args.mu, 0.0, 0.0, args.beta)  # validate mu, beta
    return "", to_csv(["sigma_lo", "sigma_hi", "region"], region_map(args.mu, args.beta, args.steps))


def cmd_queue(args):
    m = market_from_args(args)
    q = _queue_from_args(args, m)
    sweep = (args.start, args.stop, args.steps)
    if any(v is not None for v in sweep):
        if None in sweep:
            raise UsageError("a price sweep needs --from, --to and --steps")
        spec = SweepSpec("price", *sweep)
        rows = []
        for p in spec.values():
            eq = equilibrium(q, float(p))
            rows.append([eq.price, eq.gamma_star, eq.revenue, tail_region(q, eq).value])
        header = ["p", "gamma_star", "revenue", "region_of_tail"]
        if args.format == "json":
            return "", to_json([dict(zip(header, r)) for r in rows])
        return "", to_csv(header, rows)
    if args.p is not None:
        eq = equilibrium(q, args.p)
        out = {**eq.to_dict(), "region_of_tail": tail_region(q, eq).value}
    else:
        res = optimal_queue_price(q)
        out = {**res.to_dict(), "region_of_tail": tail_region(q, res.equilibrium).value}
    if args.format == "csv":
        keys = [k for k in out if k != "modes"]
        return "", to_csv(keys, [[out[k] for k in keys]])
    return "", to_json(out)


def cmd_bundle(args):
    base = market_from_args(args)
    dec = bundle_price(BundleQuery(base, args.m))
    out = dec.to_dict()
    out["threshold"] = bundle_threshold(base) if base.precise else None
    if args.format == "csv":
        return "", to_csv(["size", "price", "region", "bundle_price", "bundle_revenue"],
                          [[dec.size, dec.decision.price, dec.decision.region.value,
                            dec.bundle_price, dec.bundle_revenue]])
    return "", to_json(out)


def cmd_verify(args):
    if args.trials < 1:
        raise UsageError("--trials must be positive")
    results = run_all(args.trials, args.seed)
    ok = all(r.passed for r in results)
    err = ""
    if not ok:
        worst = [r for r in results if not r.passed]
        err = "".join(f"FAIL {r.name}: error {fmt(r.worst)} > {fmt(r.tol)} at "
                      f"{to_json(r.worst_instance)}" for r in worst)
    if args.format == "csv":
        text = to_csv(["check", "passed", "trials", "worst_error", "tol"],
                      [[r.name, r.passed, r.trials, r.worst, r.tol] for r in results])
    else:
        text = to_json({"passed": ok, "checks": [r.to_dict() for r in results]})
    return err, text, (EXIT_OK if ok else EXIT_VERIFY)


COMMANDS = {
    "price": cmd_price, "tail": cmd_tail, "sweep": cmd_sweep, "regions": cmd_regions,
    "queue": cmd_queue, "bundle": cmd_bundle, "verify": cmd_verify,
}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        result = COMMANDS[args.command](args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"robustprice: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except RobustPriceError as exc:
        print(f"{exc.name}: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    err, text = result[0], result[1]
    code = result[2] if len(result) > 2 else EXIT_OK
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if err:
        sys.stderr.write(err)
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
