"""Command-line interface.

Exit codes: 0 success, 1 property-suite failure, 2 validation error,
3 solver non-convergence, 4 missing external data.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from pathlib import Path

import numpy as np

from .builders import AgeContactData
from .dynamics import default_t_end, integrate
from .equilibrium import equilibrium_csv, equilibrium_table, maximal_equilibrium, read_profile_csv
from .errors import HetsisError, MissingDataError
from .model import SISModel, require_valid
from .properties import run_property_suite
from .spectral import basic_reproduction_number, effective_reproduction_number
from .stability import check_maximality
from .strategies import calibrate_to_R0, cost
from .tables import run_table1, run_table2

log = logging.getLogger("hetsis")

COMMANDS = (
    "r0", "re", "equilibrium", "cost", "calibrate", "simulate",
    "check-maximality", "table1", "table2", "verify-properties",
)


def _scalars(values: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(values, indent=2) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(values.keys())
    w.writerow([repr(v) if isinstance(v, float) else v for v in values.values()])
    return buf.getvalue()


def _emit(text: str, out: str | None) -> None:
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _load_model(args) -> SISModel:
    if not args.model:
        raise HetsisError("--model is required for this command")
    path = Path(args.model)
    if not path.exists():
        raise MissingDataError(f"model file not found: {path}")
    m = SISModel.load_json(path)
    require_valid(m)
    return m


def _load_strategy(args, m: SISModel, required: bool):
    if not args.strategy:
        if required:
            raise HetsisError("--strategy is required for this command")
        return None
    return read_profile_csv(args.strategy, m)


def _load_contacts(args) -> AgeContactData | None:
    return AgeContactData.read_csv(args.contacts) if args.contacts else None


def cmd_r0(args) -> str:
    m = _load_model(args)
    return _scalars({"r0": basic_reproduction_number(m)}, args.format)


def cmd_re(args) -> str:
    m = _load_model(args)
    eta = _load_strategy(args, m, required=True)
    return _scalars({"re": effective_reproduction_number(m, eta)}, args.format)


def cmd_cost(args) -> str:
    m = _load_model(args)
    eta = _load_strategy(args, m, required=True)
    return _scalars({"cost": cost(m, eta), "re": effective_reproduction_number(m, eta)}, args.format)


def cmd_equilibrium(args) -> str:
    m = _load_model(args)
    eta = _load_strategy(args, m, required=False)
    res = maximal_equilibrium(m, eta)
    for note in res.notes:
        log.warning(note)
    if args.format == "json":
        return json.dumps(
            {
                "residual_sup": res.residual_sup,
                "iterations": res.iterations,
                "method": res.method,
                "re": res.re,
                "cost_equi": cost(m, 1.0 - res.g),
                "notes": list(res.notes),
                "types": equilibrium_table(m, res.g),
            },
            indent=2,
        ) + "\n"
    return equilibrium_csv(m, res.g)


def cmd_calibrate(args) -> str:
    if args.target_r0 is None:
        raise HetsisError("--target-r0 is required for calibrate")
    m = calibrate_to_R0(_load_model(args), args.target_r0)
    return json.dumps(m.to_dict(), indent=2) + "\n"


def cmd_simulate(args) -> str:
    m = _load_model(args)
    eta = _load_strategy(args, m, required=False)
    u0 = read_profile_csv(args.initial, m, column="g") if args.initial else np.ones(m.n)
    t_end = args.t_end if args.t_end is not None else default_t_end(m)
    traj = integrate(m, eta, u0, t_end, args.dt)
    if args.format == "json":
        return json.dumps(
            {"labels": list(traj.labels), "t": traj.times.tolist(), "states": traj.states.tolist()}
        ) + "\n"
    return traj.to_csv()


def cmd_check_maximality(args) -> str:
    m = _load_model(args)
    g = maximal_equilibrium(m).g
    h = read_profile_csv(args.equilibrium, m, column="g") if args.equilibrium else g
    return check_maximality(m, h, g_max=g).to_json() + "\n"


def cmd_table1(args) -> str:
    table = run_table1(_load_contacts(args), reciprocity_fix=args.reciprocity_fix)
    for notice in table.notices:
        log.warning(notice)
    return table.to_json() + "\n" if args.format == "json" else table.to_csv()


def cmd_table2(args) -> str:
    data = _load_contacts(args)
    if data is None:
        raise MissingDataError("table2 needs --contacts (age contact data CSV)")
    table = run_table2(data, reciprocity_fix=args.reciprocity_fix)
    if args.format == "json":
        return table.to_json() + "\n"
    return table.to_csv() + f"# groups above {100 * table.threshold:.1f}%: {table.above_uniform}\n"


HANDLERS = {
    "r0": cmd_r0,
    "re": cmd_re,
    "equilibrium": cmd_equilibrium,
    "cost": cmd_cost,
    "calibrate": cmd_calibrate,
    "simulate": cmd_simulate,
    "check-maximality": cmd_check_maximality,
    "table1": cmd_table1,
    "table2": cmd_table2,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--model", help="model JSON file")
    common.add_argument("--strategy", help="strategy CSV (label plus an eta or eta_equi column)")
    common.add_argument("--target-r0", type=float, dest="target_r0")
    common.add_argument("--contacts", help="age contact data CSV")
    common.add_argument("--out", help="output path (default: stdout)")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--reciprocity-fix", action="store_true", dest="reciprocity_fix",
                        help="symmetrize a non-reciprocal contact matrix")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="hetsis", description="Heterogeneous SIS epidemics and critical vaccination.")
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name, parents=[common])
        if name == "simulate":
            sp.add_argument("--t-end", type=float, dest="t_end")
            sp.add_argument("--dt", type=float)
            sp.add_argument("--initial", help="CSV with a g column giving the initial state")
        if name == "check-maximality":
            sp.add_argument("--equilibrium", help="CSV with a g column (default: the maximal equilibrium)")
        if name == "verify-properties":
            sp.add_argument("--inject-fault", action="store_true", help=argparse.SUPPRESS)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        if args.command == "verify-properties":
            report, ok = run_property_suite(args.seed, inject_fault=args.inject_fault)
            _emit(report, args.out)
            return 0 if ok else 1
        _emit(HANDLERS[args.command](args), args.out)
    except HetsisError as exc:
        log.error("%s", exc)
        return exc.exit_code if exc.exit_code != 1 else 2
    except (ValueError, json.JSONDecodeError) as exc:
        log.error("%s", exc)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
