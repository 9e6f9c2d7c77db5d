"""Command-line harness: validation, evaluation, ratio sweeps, reproductions.

Exit codes: 0 on success, 2 on input or validation errors, 3 when a resource
cap would be exceeded. Output is JSON by default (CSV via --format csv) and is
byte-identical across runs for fixed flags, including --seed.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from typing import Optional, Sequence

from .core import (
    Order,
    ValidationError,
    load_instance,
    load_order,
    save_instance,
    save_order,
    validate_order,
)
from .evaluation import (
    DEFAULT_PERM_CAP,
    CapExceededError,
    Objective,
    eval_exact,
    monte_carlo,
    order_ratio_sweep,
)
from .families import (
    FamilyInstance,
    closed_form_alg,
    example1,
    golden_lb,
    maxprob_lb,
    single_threshold_family,
    single_threshold_ratio_curve,
    threshold_for_alpha,
)
from .policies import GoldenPolicy, MaxProbPolicy, SingleThresholdPolicy, make_policy
from .thresholds import LAMBDA, LN_INV_LAMBDA, PHI


def _parse_order(text: str) -> Order:
    if os.path.exists(text):
        return load_order(text)
    return Order.from_string(text)


def _parse_orders(text: str) -> list[Order]:
    if os.path.exists(text):
        with open(text, "r", encoding="utf-8") as fh:
            data = json.load(fh)
        try:
            return [Order(tuple(int(i) for i in seq)) for seq in data["orders"]]
        except (TypeError, KeyError, ValueError):
            raise ValidationError('orders file must be {"orders": [[ids...], ...]}') from None
    return [Order.from_string(chunk) for chunk in text.split(";") if chunk.strip()]


def _emit(text: str) -> None:
    sys.stdout.write(text)
    if not text.endswith("\n"):
        sys.stdout.write("\n")


def _print_json(data: dict) -> None:
    _emit(json.dumps(data, indent=2))


def _print_kv_csv(rows: list[tuple[str, object]]) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["name", "value"])
    for name, value in rows:
        writer.writerow([name, repr(value) if isinstance(value, float) else value])
    _emit(buf.getvalue())


def cmd_constants(args: argparse.Namespace) -> int:
    data = {
        "phi": PHI,
        "one_over_phi": 1.0 / PHI,
        "lambda": LAMBDA,
        "ln_inv_lambda": LN_INV_LAMBDA,
    }
    if args.format == "csv":
        _print_kv_csv(list(data.items()))
    else:
        _print_json(data)
    return 0


def cmd_evaluate(args: argparse.Namespace) -> int:
    instance = load_instance(args.instance)
    order = _parse_order(args.order)
    validate_order(instance, order).raise_if_invalid()
    objective = Objective.parse(args.obj)
    policy = make_policy(args.policy, instance, order)
    if args.mc:
        result = monte_carlo(instance, order, policy, objective, samples=args.mc, seed=args.seed)
    else:
        result = eval_exact(instance, order, policy, objective)
    if args.format == "csv":
        _print_kv_csv(list(result.to_json_dict().items()))
    else:
        _print_json(result.to_json_dict())
    return 0


def cmd_ratio(args: argparse.Namespace) -> int:
    instance = load_instance(args.instance)
    objective = Objective.parse(args.obj)
    policy = make_policy(args.policy, instance)
    orders = _parse_orders(args.orders) if args.orders else None
    if orders:
        for order in orders:
            validate_order(instance, order).raise_if_invalid()
    report = order_ratio_sweep(
        instance,
        policy,
        objective,
        opt_kind=args.opt,
        orders=orders,
        perm_cap=args.perm_cap,
    )
    if args.format == "csv":
        _emit(report.to_csv())
    else:
        _print_json(report.to_json_dict())
    return 0


def _ratio_rows(fam: FamilyInstance, policy, objective: Objective) -> tuple[list[dict], float, str]:
    orders = [order for _, order in fam.canonical_orders]
    report = order_ratio_sweep(fam.instance, policy, objective, orders=orders)
    rows = []
    argmin_name = fam.canonical_orders[0][0]
    for (name, _), row in zip(fam.canonical_orders, report.per_order):
        rows.append(
            {
                "name": name,
                "order": list(row.order.sequence),
                "alg": row.alg,
                "opt": row.opt,
                "ratio": row.ratio,
            }
        )
        if row.order == report.argmin_order:
            argmin_name = name
    return rows, report.min_ratio, argmin_name


def _emit_family(fam: FamilyInstance, directory: str) -> None:
    os.makedirs(directory, exist_ok=True)
    save_instance(fam.instance, os.path.join(directory, "instance.json"))
    for name, order in fam.canonical_orders:
        save_order(order, os.path.join(directory, f"{name}.json"))


def cmd_reproduce(args: argparse.Namespace) -> int:
    if args.family == "example1":
        fam = example1(eps=args.eps if args.eps is not None else 1e-3)
        policy = GoldenPolicy(fam.instance)
        rows, min_ratio, argmin = _ratio_rows(fam, policy, Objective.expectation())
        report = _family_report(fam, rows, min_ratio, argmin)
    elif args.family == "golden-lb":
        fam = golden_lb(
            eps=args.eps if args.eps is not None else 1e-4,
            step=args.step if args.step is not None else 0.05,
        )
        policy = GoldenPolicy(fam.instance)
        rows, min_ratio, argmin = _ratio_rows(fam, policy, Objective.expectation())
        report = _family_report(fam, rows, min_ratio, argmin)
    elif args.family == "maxprob-lb":
        fam = maxprob_lb(n=args.n if args.n is not None else 200)
        policy = MaxProbPolicy(fam.instance, baseline=0.0)
        rows, min_ratio, argmin = _ratio_rows(fam, policy, Objective.winprob(0.0))
        report = _family_report(fam, rows, min_ratio, argmin)
        accept_branch = next(r["alg"] for r in rows if r["name"] == "decreasing")
        report["accept_branch_winprob"] = accept_branch
        report["accept_branch_minus_lambda"] = accept_branch - LAMBDA
    elif args.family == "single-threshold":
        n = args.n if args.n is not None else 10000
        T = args.T if args.T is not None else threshold_for_alpha(n, 1.12324)
        fam = single_threshold_family(n, T)
        curve = single_threshold_ratio_curve()
        alpha = fam.parameters["alpha"]
        exact = eval_exact(
            fam.instance,
            fam.order("three_period"),
            SingleThresholdPolicy(float(T)),
            Objective.winprob(0.0),
        ).value
        formula = closed_form_alg(alpha)
        report = {
            "family": fam.name,
            "parameters": _jsonable(fam.parameters),
            "alpha_star": curve.alpha_star,
            "max_ratio": curve.max_ratio,
            "exact_winprob": exact,
            "closed_form_winprob": formula,
            "exact_minus_closed_form": exact - formula,
            "limit_note": fam.limit_note,
        }
    else:  # pragma: no cover - argparse choices guard this
        raise ValidationError(f"unknown family {args.family!r}")

    if args.emit:
        _emit_family(fam, args.emit)
        report["emitted_to"] = args.emit
    if args.format == "csv":
        _print_kv_csv([(k, v) for k, v in report.items() if not isinstance(v, (list, dict))])
    else:
        _print_json(report)
    return 0


def _jsonable(params: dict) -> dict:
    return {k: (list(v) if isinstance(v, tuple) else v) for k, v in params.items()}


def _family_report(fam: FamilyInstance, rows: list[dict], min_ratio: float, argmin: str) -> dict:
    return {
        "family": fam.name,
        "parameters": _jsonable(fam.parameters),
        "orders": rows,
        "min_ratio": min_ratio,
        "argmin_order": argmin,
        "predicted_limit": fam.predicted_limit,
        "limit_note": fam.limit_note,
        "min_ratio_minus_limit": min_ratio - fam.predicted_limit,
    }


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="prophet-order",
        description="Order-unaware stopping policies, order-aware benchmarks, exact evaluation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_const = sub.add_parser("constants", help="print phi, 1/phi, lambda, ln(1/lambda)")
    p_const.add_argument("--format", choices=("json", "csv"), default="json")
    p_const.set_defaults(fn=cmd_constants)

    p_eval = sub.add_parser("evaluate", help="evaluate a policy on one arrival order")
    p_eval.add_argument("-i", "--instance", required=True, help="instance JSON path")
    p_eval.add_argument("-o", "--order", required=True, help="comma-separated ids or JSON path")
    p_eval.add_argument("-p", "--policy", required=True, help="policy spec, e.g. golden or threshold:1.5")
    p_eval.add_argument("--obj", required=True, help="expectation or winprob[:theta]")
    p_eval.add_argument("--mc", type=int, default=0, help="Monte Carlo sample count (0 = exact)")
    p_eval.add_argument("--seed", type=int, default=0, help="seed for --mc")
    p_eval.add_argument("--format", choices=("json", "csv"), default="json")
    p_eval.set_defaults(fn=cmd_evaluate)

    p_ratio = sub.add_parser("ratio", help="ratio vs the order-aware optimum across orders")
    p_ratio.add_argument("-i", "--instance", required=True)
    p_ratio.add_argument("-p", "--policy", required=True)
    p_ratio.add_argument("--obj", required=True)
    p_ratio.add_argument("--opt", choices=("opt-exp", "opt-maxprob"), default=None,
                         help="benchmark kind (default: inferred from the objective)")
    p_ratio.add_argument("--orders", default=None,
                         help='semicolon-separated id lists, or a JSON path {"orders": [...]}')
    p_ratio.add_argument("--perm-cap", type=int, default=DEFAULT_PERM_CAP)
    p_ratio.add_argument("--format", choices=("json", "csv"), default="json")
    p_ratio.set_defaults(fn=cmd_ratio)

    p_rep = sub.add_parser("reproduce", help="run a worst-case family and report ratios vs limits")
    p_rep.add_argument("family", choices=("example1", "golden-lb", "maxprob-lb", "single-threshold"))
    p_rep.add_argument("--eps", type=float, default=None)
    p_rep.add_argument("--step", type=float, default=None)
    p_rep.add_argument("--n", type=int, default=None)
    p_rep.add_argument("--T", type=int, default=None)
    p_rep.add_argument("--emit", default=None, help="directory to write the family's JSON files")
    p_rep.add_argument("--format", choices=("json", "csv"), default="json")
    p_rep.set_defaults(fn=cmd_reproduce)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (ValidationError, FileNotFoundError, json.JSONDecodeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except CapExceededError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    raise SystemExit(main())
