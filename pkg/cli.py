import argparse
import logging
import sys

from tasks.bertrand import best_response_table
from tasks.bertrand_dynamics import run_dynamics, run_regulated_dynamics
from tasks.cournot import equilibrium_sweep
from tasks.regulator import sweep_tax
from tasks.report import (
    render_best_responses,
    render_dynamics,
    render_equilibria,
    render_policy,
    write_output,
)
from tasks.scenario import ScenarioError, load_scenario

logger = logging.getLogger("duopoly")

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_BAD_CONFIG = 2


# ---------------- COMMANDS ----------------
def cmd_dynamics(scenario):
    params = scenario.market_params()

    if scenario.regulated:
        trace = run_regulated_dynamics(
            params, scenario.p_i0, scenario.p_j0,
            max_changes=scenario.max_changes,
            last_mover=scenario.last_mover,
            numeric=scenario.numeric,
        )
    else:
        trace = run_dynamics(
            params, scenario.p_i0, scenario.p_j0,
            first_mover=scenario.first_mover,
            max_moves=scenario.max_moves,
            numeric=scenario.numeric,
        )
    return render_dynamics(trace)


def cmd_best_response(scenario):
    rows = best_response_table(scenario.market_params(), numeric=scenario.numeric)
    return render_best_responses(rows)


def cmd_equilibrium(scenario):
    points = equilibrium_sweep(scenario.gammas(), scenario.last_mover)
    return render_equilibria(points)


def cmd_sweep_tax(scenario):
    sweep = sweep_tax(
        scenario.gamma_c,
        (scenario.gamma_t_min, scenario.gamma_t_max),
        scenario.gamma_t_step,
        params=scenario.market_params(),
        last_mover=scenario.last_mover,
    )
    return render_policy(sweep)


COMMANDS = {
    "dynamics": cmd_dynamics,
    "best-response": cmd_best_response,
    "equilibrium": cmd_equilibrium,
    "sweep-tax": cmd_sweep_tax,
}


# ---------------- ARGUMENTS ----------------
def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key = value scenario file")
    common.add_argument("--output", help="CSV path (stdout when omitted)")
    common.add_argument("--distribution", choices=["uniform", "f1", "f2", "f3"],
                        help="user-type distribution")
    common.add_argument("-v", "--verbose", action="count", default=0,
                        help="-v for progress, -vv for debug output")

    parser = argparse.ArgumentParser(
        prog="duopoly",
        description="Two-stage capacity and price competition between two operators.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    dyn = sub.add_parser("dynamics", parents=[common], help="price war trace")
    dyn.add_argument("--regulated", action="store_true", default=None,
                     help="limit the number of price changes")
    dyn.add_argument("--numeric", action="store_true", default=None,
                     help="grid best responses even for uniform users")

    br = sub.add_parser("best-response", parents=[common], help="best reply of each operator over the price grid")
    br.add_argument("--numeric", action="store_true", default=None,
                    help="grid best responses even for uniform users")

    sub.add_parser("equilibrium", parents=[common], help="two-stage equilibrium over a gamma grid")
    sub.add_parser("sweep-tax", parents=[common], help="welfare and tax revenue over gamma_t")
    return parser


def configure_logging(verbosity):
    level = logging.WARNING
    if verbosity == 1:
        level = logging.INFO
    elif verbosity >= 2:
        level = logging.DEBUG

    logging.basicConfig(
        level=level,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
        force=True,
    )


# ---------------- MAIN ----------------
def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_BAD_CONFIG

    configure_logging(args.verbose)

    overrides = {
        "distribution": args.distribution,
        "regulated": getattr(args, "regulated", None),
        "numeric": getattr(args, "numeric", None),
    }

    try:
        scenario = load_scenario(args.config, overrides)
        scenario.validate_for(args.command)
    except ScenarioError as exc:
        logger.error("bad configuration: %s", exc)
        return EXIT_BAD_CONFIG

    try:
        text = COMMANDS[args.command](scenario)
        write_output(text, args.output or scenario.output)
    except Exception as exc:
        logger.error("%s failed: %s", args.command, exc, exc_info=args.verbose >= 2)
        return EXIT_RUNTIME

    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
