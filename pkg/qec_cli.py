"""
Command handlers. ``main.py`` parses the command line and calls these with
only the arguments each one declares; every handler returns an exit status.
"""
from functools import lru_cache
import json
import logging
import sys

import numpy as np
import pandas as pd

from experiment_config import load_config
from ft_gadgets import GADGET_STYLES, ft_audit
from monte_carlo import LEVEL_MAPS, build_decoder, concat_recursion, sweep, threshold_scan
from oracle_suite import run_oracle_suite
from pauli_algebra import paulis_up_to_weight, parse_pauli, to_label
from qec_errors import ConfigError
from stabilizer_codes import (
    BUILTIN_CODES, builtin, distance, load_code, stabilizer_qecc_check, syndrome, validate_code,
)

EXIT_OK = 0
EXIT_FAILED = 1
DISTANCE_SEARCH_LIMIT = 3


# ==============================================================================
# --- OUTPUT HELPERS ---
# ==============================================================================

def _json_default(value):
    if isinstance(value, np.generic):
        return value.item()
    raise TypeError(f"cannot serialise {type(value).__name__}")


def emit_json(payload, out=None):
    text = json.dumps(payload, indent=2, default=_json_default, allow_nan=False)
    if out:
        with open(out, "w", encoding="utf-8") as handle:
            handle.write(text + "\n")
        logging.info(f"Wrote {out}")
    else:
        print(text)


def emit_table(frame):
    print(frame.to_string(index=False), file=sys.stderr)


@lru_cache(maxsize=None)
def cached_distance(name):
    code = builtin(name)
    return distance(code, min(code.n, DISTANCE_SEARCH_LIMIT))


def _distance_text(d):
    return f"d={d}" if d is not None else f"d>{DISTANCE_SEARCH_LIMIT}"


# ==============================================================================
# --- CODES ---
# ==============================================================================

def cmd_codes_list():
    rows = [{"name": name, "n": builtin(name).n, "k": builtin(name).k, "distance": cached_distance(name)}
            for name in BUILTIN_CODES]
    print(pd.DataFrame(rows).to_string(index=False))
    return EXIT_OK


def cmd_codes_check(target):
    """Validates a built-in or a code file and runs the stabilizer QECC check on all weight-<=1 errors."""
    code = load_code(target)
    report = validate_code(code)
    if not report.ok:
        print(f"{code.name}: INVALID")
        for issue in report.issues:
            print(f"  - {issue}")
        return EXIT_FAILED

    qecc = stabilizer_qecc_check(code, paulis_up_to_weight(code.n, 1))
    d = cached_distance(target) if target in BUILTIN_CODES else distance(code, min(code.n, DISTANCE_SEARCH_LIMIT))
    counts = qecc.counts()
    print(f"{code.name} [[{code.n},{code.k}]]: {len(code.generators)} generators, {_distance_text(d)}")
    print(f"  weight<=1 pairs: {counts['DETECTED']} detected, {counts['STABILIZER']} degenerate, "
          f"{counts['LOGICAL']} uncorrectable")
    for pair in qecc.violations[:10]:
        print(f"  - E{pair.alpha}^dagger E{pair.beta} = {pair.product_label} is a logical operator")
    return EXIT_OK if qecc.passes else EXIT_FAILED


def cmd_syndrome(code, pauli):
    stabilizer_code = load_code(code)
    error = parse_pauli(pauli)
    syn = syndrome(stabilizer_code, error)
    correction = build_decoder(stabilizer_code).correction(syn)
    print(f"syndrome:   {syn}")
    print(f"correction: {to_label(correction)}")
    return EXIT_OK


# ==============================================================================
# --- EXPERIMENTS ---
# ==============================================================================

def cmd_sweep(config, seed=None, workers=None, out=None, format=None):
    experiment = load_config(config).with_overrides(seed=seed, workers=workers, out=out, format=format).validate()
    code = load_code(experiment.code)
    result = sweep(experiment, code)
    if experiment.format == "csv":
        if experiment.out:
            result.to_csv(experiment.out)
            logging.info(f"Wrote {experiment.out}")
        else:
            sys.stdout.write(result.table.to_csv(index=False, lineterminator="\n"))
    else:
        emit_json(result.to_json_dict(), experiment.out)
    return EXIT_OK


def cmd_threshold(map_name, c=None, p0=None, levels=3, out=None):
    """Fixed point of a level map, plus the concatenation sequence from ``p0`` when given."""
    if map_name not in LEVEL_MAPS:
        raise ConfigError(f"--map must be one of {', '.join(LEVEL_MAPS)}")
    if map_name == "quadratic" and c is None:
        raise ConfigError("--map quadratic needs --c")
    result = threshold_scan(LEVEL_MAPS[map_name](c))
    payload = {"map": map_name, "c": c, "fixed_point": result.fixed_point,
               "isolated": result.isolated, "message": result.message}
    if p0 is not None:
        concat = concat_recursion(p0, levels, map_name, c)
        payload["sequence"] = concat.sequence
        if concat.closed_form is not None:
            payload["closed_form"] = concat.closed_form
    emit_json(payload, out)
    return EXIT_OK


def cmd_gadget_audit(code, generator, style, workers=1, out=None):
    stabilizer_code = load_code(code)
    if style not in GADGET_STYLES:
        raise ConfigError(f"style must be one of {', '.join(GADGET_STYLES)}")
    gadget = GADGET_STYLES[style](stabilizer_code, generator)
    report = ft_audit(gadget, stabilizer_code, workers=workers)
    emit_table(report.to_frame())
    print(f"{gadget.name}: max reduced residual weight {report.max_reduced_weight} -> {report.verdict}",
          file=sys.stderr)
    emit_json(report.to_dict(), out)
    return EXIT_OK


def cmd_oracle_verify(only=None, out=None):
    report = run_oracle_suite(only=only)
    emit_json(report.to_dict(), out)
    return EXIT_OK if report.passed else EXIT_FAILED
