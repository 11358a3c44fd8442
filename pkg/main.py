import argparse
import importlib
import inspect
import logging
import sys
import traceback

from qec_errors import QecError

logging.basicConfig(level=logging.INFO, format='%(asctime)s - %(levelname)s - [%(filename)s:%(lineno)d] - %(message)s')

EXIT_UNEXPECTED = 1
EXIT_USAGE = 2

# ==============================================================================
# --- COMMAND TABLE ---
# ==============================================================================

COMMANDS = {
    'codes list': {'module_name': 'qec_cli', 'function_name': 'cmd_codes_list'},
    'codes check': {'module_name': 'qec_cli', 'function_name': 'cmd_codes_check'},
    'syndrome': {'module_name': 'qec_cli', 'function_name': 'cmd_syndrome'},
    'sweep': {'module_name': 'qec_cli', 'function_name': 'cmd_sweep'},
    'threshold': {'module_name': 'qec_cli', 'function_name': 'cmd_threshold'},
    'gadget audit': {'module_name': 'qec_cli', 'function_name': 'cmd_gadget_audit'},
    'oracle verify': {'module_name': 'qec_cli', 'function_name': 'cmd_oracle_verify'},
}


# ==============================================================================
# --- ARGUMENT PARSING ---
# ==============================================================================

def build_parser():
    parser = argparse.ArgumentParser(prog="qec", description="Quantum error-correction workbench")
    parser.add_argument("--verbose", action="store_true", help="log at DEBUG level")
    groups = parser.add_subparsers(dest="group", required=True)

    codes = groups.add_parser("codes", help="built-in and file-defined stabilizer codes")
    codes_actions = codes.add_subparsers(dest="action", required=True)
    codes_actions.add_parser("list", help="list the built-in codes")
    check = codes_actions.add_parser("check", help="validate a code and run the QECC check")
    check.add_argument("target", help="built-in name or path to a code file")

    syn = groups.add_parser("syndrome", help="syndrome and decoder correction of a Pauli error")
    syn.add_argument("code")
    syn.add_argument("pauli", help="e.g. IIXII or -iXYZ")

    sweep = groups.add_parser("sweep", help="Monte Carlo logical error rate over an epsilon grid")
    sweep.add_argument("config", help="path to a key = value experiment file")
    sweep.add_argument("--seed", type=int)
    sweep.add_argument("--workers", type=int)
    sweep.add_argument("--out")
    sweep.add_argument("--format", choices=("csv", "json"))

    threshold = groups.add_parser("threshold", help="fixed point of a concatenation level map")
    threshold.add_argument("--map", dest="map_name", required=True, choices=("repetition", "quadratic"))
    threshold.add_argument("--c", type=float)
    threshold.add_argument("--p0", type=float, help="also print the level sequence starting here")
    threshold.add_argument("--levels", type=int, default=3)
    threshold.add_argument("--out")

    gadget = groups.add_parser("gadget", help="fault-tolerance audit of a syndrome gadget")
    gadget_actions = gadget.add_subparsers(dest="action", required=True)
    audit = gadget_actions.add_parser("audit")
    audit.add_argument("code")
    audit.add_argument("generator", type=int)
    audit.add_argument("style", choices=("bare", "cat"))
    audit.add_argument("--workers", type=int, default=1)
    audit.add_argument("--out")

    oracle = groups.add_parser("oracle", help="dense-matrix consistency checks")
    oracle_actions = oracle.add_subparsers(dest="action", required=True)
    verify = oracle_actions.add_parser("verify")
    verify.add_argument("--only", nargs="*", help="run only the named checks")
    verify.add_argument("--out")
    return parser


def command_key(args):
    action = getattr(args, "action", None)
    return f"{args.group} {action}" if action else args.group


# ==============================================================================
# --- ROUTER ---
# ==============================================================================

def run_command(key, all_args):
    """
    Imports the handler for ``key`` and calls it with the parsed arguments it
    declares.

    Args:
        key (str): Entry of COMMANDS, e.g. ``'codes check'``.
        all_args (dict): Every parsed command-line value.

    Returns:
        int: The process exit status.
    """
    command_info = COMMANDS.get(key)
    if not command_info:
        logging.error(f"Unknown command '{key}'")
        return EXIT_USAGE

    try:
        module = importlib.import_module(command_info['module_name'])
        handler = getattr(module, command_info['function_name'])
        signature = inspect.signature(handler)
        args_to_pass = {name: all_args[name] for name in signature.parameters if name in all_args}
        logging.debug(f"Running '{key}' with {args_to_pass}")
        return handler(**args_to_pass)
    except QecError as e:
        logging.error(f"{type(e).__name__}: {e}")
        print(f"error: {e}", file=sys.stderr)
        return e.exit_code
    except Exception:
        logging.error(f"Unexpected failure in '{key}':\n{traceback.format_exc()}")
        print(f"error: unexpected failure in '{key}'; rerun with --verbose for details", file=sys.stderr)
        return EXIT_UNEXPECTED


def main(argv=None):
    args = build_parser().parse_args(argv)
    if args.verbose:
        logging.getLogger().setLevel(logging.DEBUG)
    return run_command(command_key(args), vars(args))


# ==============================================================================
# --- ENTRY POINT ---
# ==============================================================================
if __name__ == "__main__":
    sys.exit(main())
