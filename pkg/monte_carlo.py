from dataclasses import dataclass, field
from functools import partial
import logging
import math
from multiprocessing import Pool

import numpy as np
import pandas as pd
from scipy.optimize import bisect

from ft_gadgets import repeat_twice
from noise_channels import (
    channel_from_settings, pauli_channel_weights, pauli_equivalent, sample_error_bits, sample_pauli_error,
)
from pauli_algebra import PauliOperator, commutes, multiply, paulis_of_weight, to_label, to_symplectic
from qec_errors import EnumerationLimitError, QecError, ThresholdError
from rng_streams import CounterStream, batch_uniforms
from stabilizer_codes import Syndrome, in_normalizer, syndrome, symplectic_matrix

# --- LIMITS ---
MAX_DECODER_GENERATORS = 24
MAX_EXACT_QUBITS = 9
MAX_CONCAT_LEVELS = 4
BLOCK_SIZE = 4096  # trials per work unit; fixed so results do not depend on the worker count

SWEEP_COLUMNS = ["epsilon", "trials", "failures", "estimate", "stderr", "seed"]


# ==============================================================================
# --- LOOKUP-TABLE DECODER ---
# ==============================================================================

@dataclass
class Decoder:
    """
    Syndrome -> correction table plus the symplectic arrays used by the
    vectorised trial loop. Syndrome bit 0 is the most significant bit of the
    table index.
    """
    code: object
    table: dict
    unreachable: set
    gx: np.ndarray
    gz: np.ndarray
    correction_x: np.ndarray
    correction_z: np.ndarray
    logical_x: np.ndarray
    logical_z: np.ndarray

    def correction(self, syn):
        return self.table[syn.to_int()]

    def syndrome_indices(self, ex, ez):
        m = self.gx.shape[0]
        bits = (ex.astype(np.int64) @ self.gz.T.astype(np.int64) + ez.astype(np.int64) @ self.gx.T.astype(np.int64)) % 2
        weights = 1 << np.arange(m - 1, -1, -1, dtype=np.int64)
        return bits @ weights

    def failures(self, ex, ez, syndrome_index=None):
        """Boolean failure per row of sampled (x, z) error arrays."""
        if syndrome_index is None:
            syndrome_index = self.syndrome_indices(ex, ez)
        rx = ex ^ self.correction_x[syndrome_index]
        rz = ez ^ self.correction_z[syndrome_index]
        # residual anticommutes with some logical operator
        hits = (rx.astype(np.int64) @ self.logical_z.T.astype(np.int64)
                + rz.astype(np.int64) @ self.logical_x.T.astype(np.int64)) % 2
        return hits.any(axis=1)


def build_decoder(code):
    """
    Minimum-weight lookup table, searched in increasing weight with ties broken
    by the canonical text form. Syndromes no Pauli reaches map to the identity
    and are listed in ``unreachable``.
    """
    m = len(code.generators)
    if m > MAX_DECODER_GENERATORS:
        raise EnumerationLimitError(f"{m} generators: a 2**{m} entry table is too large")
    size = 2 ** m
    table = {0: PauliOperator.identity(code.n)}
    for w in range(1, code.n + 1):
        if len(table) == size:
            break
        for p in sorted(paulis_of_weight(code.n, w), key=to_label):
            index = syndrome(code, p).to_int()
            if index not in table:
                table[index] = p
    unreachable = set(range(size)) - set(table)
    for index in unreachable:
        table[index] = PauliOperator.identity(code.n)
    if unreachable:
        logging.warning(f"Decoder for '{code.name}': {len(unreachable)} unreachable syndromes")

    corrections = np.array([to_symplectic(table[i]) for i in range(size)], dtype=np.uint8)
    gens = symplectic_matrix(code.generators, code.n)
    logicals = symplectic_matrix(list(code.logical_x) + list(code.logical_z), code.n)
    n = code.n
    logging.info(f"Decoder for '{code.name}': {size} syndromes, max correction weight "
                 f"{max((t.x_bits | t.z_bits).bit_count() for t in table.values())}")
    return Decoder(code, table, unreachable, gens[:, :n], gens[:, n:], corrections[:, :n], corrections[:, n:],
                   logicals[:, :n], logicals[:, n:])


# ==============================================================================
# --- SINGLE TRIALS ---
# ==============================================================================

@dataclass(frozen=True)
class TrialResult:
    sampled_error: PauliOperator
    syndrome: Syndrome
    correction: PauliOperator
    logical_failure: bool


def correct_error(code, decoder, error, measured=None):
    """Decodes ``error`` from its syndrome (or from ``measured`` if given) and classifies the residual."""
    true_syndrome = syndrome(code, error)
    used = measured if measured is not None else true_syndrome
    correction = decoder.correction(used)
    residual = multiply(correction, error)
    if measured is None and not in_normalizer(code, residual):
        raise QecError(f"correction {to_label(correction)} does not reproduce the syndrome of {to_label(error)}")
    failure = not all(commutes(residual, op) for op in list(code.logical_x) + list(code.logical_z))
    if measured is not None and not in_normalizer(code, residual):
        failure = True
    return TrialResult(error, used, correction, failure)


def run_trial(code, decoder, channel, rng_stream, syndrome_flip_q=0.0):
    """
    One code-capacity trial: sample an error, read the syndrome, correct, and
    check the residual against the logical operators.

    With ``syndrome_flip_q > 0`` the syndrome is read through the repeat-twice
    rule with each bit flipped with that probability; a wrong accepted syndrome
    counts as a failure when the residual leaves the code space.
    """
    error = sample_pauli_error(code.n, channel, rng_stream)
    if syndrome_flip_q <= 0.0:
        return correct_error(code, decoder, error)
    true_bits = syndrome(code, error).bits
    accepted = repeat_twice(lambda: true_bits, syndrome_flip_q, rng_stream)
    return correct_error(code, decoder, error, Syndrome(accepted.syndrome))


# ==============================================================================
# --- SAMPLED RATES ---
# ==============================================================================

@dataclass(frozen=True)
class RatePoint:
    epsilon: float
    trials: int
    failures: int
    seed: int

    @property
    def estimate(self):
        return self.failures / self.trials

    @property
    def stderr(self):
        p = self.estimate
        return math.sqrt(p * (1 - p) / self.trials)

    def as_row(self):
        return {"epsilon": self.epsilon, "trials": self.trials, "failures": self.failures,
                "estimate": self.estimate, "stderr": self.stderr, "seed": self.seed}


def _blocks(trials):
    return [(start, min(BLOCK_SIZE, trials - start)) for start in range(0, trials, BLOCK_SIZE)]


def _count_block(decoder, channel, master_seed, block):
    start, count = block
    u = batch_uniforms(master_seed, start, count, decoder.code.n)
    ex, ez = sample_error_bits(u, channel)
    return int(decoder.failures(ex, ez).sum())


def _count_block_noisy(decoder, channel, master_seed, syndrome_flip_q, block):
    start, count = block
    failures = 0
    for j in range(start, start + count):
        result = run_trial(decoder.code, decoder, channel, CounterStream(master_seed, j), syndrome_flip_q)
        failures += int(result.logical_failure)
    return failures


def _map_blocks(task, blocks, workers):
    if workers > 1 and len(blocks) > 1:
        with Pool(processes=workers) as pool:
            return pool.map(task, blocks)
    return [task(block) for block in blocks]


def logical_error_rate(code, channel, trials, master_seed, workers=1, decoder=None, syndrome_flip_q=0.0):
    """
    Monte Carlo logical error rate.

    Trial ``j`` draws its error from stream ``(master_seed, j)``; blocks of
    BLOCK_SIZE trials are the unit of work, and the failure count is a sum, so
    the result is identical for any ``workers``.

    Args:
        code (StabilizerCode): the code.
        channel (NoiseChannel): a single-qubit Pauli channel.
        trials (int): number of trials, at least 1.
        master_seed (int): 64-bit experiment seed.
        workers (int): process count.
        decoder (Decoder | None): reuse a prebuilt table.
        syndrome_flip_q (float): syndrome-bit flip probability for repeat-twice reading.

    Returns:
        RatePoint: failures, estimate and standard error.
    """
    if trials < 1:
        raise QecError(f"trials must be at least 1, got {trials}")
    decoder = decoder or build_decoder(code)
    if syndrome_flip_q > 0.0:
        task = partial(_count_block_noisy, decoder, channel, master_seed, syndrome_flip_q)
    else:
        task = partial(_count_block, decoder, channel, master_seed)
    failures = sum(_map_blocks(task, _blocks(trials), workers))
    point = RatePoint(channel.epsilon, trials, failures, master_seed)
    logging.info(f"{code.name} {channel.kind} eps={channel.epsilon:g}: {failures}/{trials} "
                 f"= {point.estimate:.6g} +- {point.stderr:.2g}")
    return point


# ==============================================================================
# --- EXACT ENUMERATION ---
# ==============================================================================

def exact_logical_rate(code, channel, decoder=None):
    """
    Sum of P(pattern) over every one of the 4**n Pauli patterns the decoder fails on.

    Patterns are base-4 digits (I, X, Y, Z) per qubit, evaluated in one
    vectorised pass.
    """
    if code.n > MAX_EXACT_QUBITS:
        raise EnumerationLimitError(f"exact enumeration is limited to {MAX_EXACT_QUBITS} qubits, got {code.n}")
    decoder = decoder or build_decoder(code)
    weights = pauli_channel_weights(channel)
    letter_prob = np.array([weights[c] for c in "IXYZ"])
    n = code.n
    patterns = np.arange(4 ** n, dtype=np.int64)
    digits = (patterns[:, None] // (4 ** np.arange(n - 1, -1, -1, dtype=np.int64))[None, :]) % 4
    ex = ((digits == 1) | (digits == 2)).astype(np.uint8)
    ez = ((digits == 2) | (digits == 3)).astype(np.uint8)
    probabilities = np.prod(letter_prob[digits], axis=1)
    failed = decoder.failures(ex, ez)
    return float(probabilities[failed].sum())


# ==============================================================================
# --- CONCATENATION ---
# ==============================================================================

def repetition_map(p):
    return 3 * p ** 2 * (1 - p) + p ** 3


def quadratic_map(c):
    if c <= 0:
        raise QecError(f"the constant c must be positive, got {c}")
    return lambda p: c * p ** 2


@dataclass
class ConcatResult:
    sequence: list
    closed_form: list = None

    @property
    def max_closed_form_gap(self):
        if self.closed_form is None:
            return None
        return max(abs(a - b) for a, b in zip(self.sequence, self.closed_form))


def concat_recursion(p0, levels, kind="repetition", c=None):
    """
    Iterates the level-to-level failure map ``levels`` times.

    ``kind="repetition"`` uses ``3p^2(1-p) + p^3``; ``kind="quadratic"`` uses
    ``c p^2`` and also returns the closed form ``(c p0)^(2^k) / c``.
    """
    if not 0.0 <= p0 <= 1.0:
        raise QecError(f"p0 must lie in [0, 1], got {p0}")
    if kind == "repetition":
        level_map = repetition_map
    elif kind == "quadratic":
        level_map = quadratic_map(c if c is not None else 0)
    else:
        raise QecError(f"unknown level map '{kind}'")
    sequence = [p0]
    for _ in range(levels):
        sequence.append(level_map(sequence[-1]))
    closed = None
    if kind == "quadratic":
        closed = [(c * p0) ** (2 ** k) / c for k in range(levels + 1)]
    return ConcatResult(sequence, closed)


def _count_concat_block(levels, epsilon, master_seed, block):
    start, count = block
    bits = batch_uniforms(master_seed, start, count, 3 ** levels) < epsilon
    for _ in range(levels):
        bits = bits.reshape(count, -1, 3).sum(axis=2) >= 2
    return int(bits.reshape(count).sum())


def simulate_concatenated_repetition(levels, epsilon, trials, master_seed, workers=1):
    """
    Samples i.i.d. bit flips on ``3**levels`` bits and decodes by majority vote
    one level at a time.

    Returns:
        RatePoint: logical flip count and estimate.
    """
    if not 0 <= levels <= MAX_CONCAT_LEVELS:
        raise EnumerationLimitError(f"levels must lie in [0, {MAX_CONCAT_LEVELS}], got {levels}")
    if trials < 1:
        raise QecError(f"trials must be at least 1, got {trials}")
    task = partial(_count_concat_block, levels, epsilon, master_seed)
    failures = sum(_map_blocks(task, _blocks(trials), workers))
    return RatePoint(epsilon, trials, failures, master_seed)


@dataclass(frozen=True)
class OverheadResult:
    total_gates: int
    minimal_levels: int = None
    finite: bool = True


def overhead(levels, gates_per_level, original_gates, epsilon=None, epsilon_th=None, target=None):
    """
    Gate count ``N * G**k`` of a k-level simulation, plus the smallest k with
    ``2**k >= log(N eps_th / target) / log(eps_th / eps)`` when the noise
    parameters are given. ``finite`` is False when ``eps >= eps_th``.
    """
    if levels < 0 or gates_per_level <= 0 or original_gates <= 0:
        raise QecError("levels must be >= 0 and gate counts positive")
    total = original_gates * gates_per_level ** levels
    if epsilon is None:
        return OverheadResult(total)
    if epsilon_th is None or target is None:
        raise QecError("epsilon needs both epsilon_th and target")
    if epsilon < 0 or epsilon_th <= 0 or target <= 0:
        raise QecError(f"need epsilon >= 0 and positive epsilon_th and target, got {epsilon}, {epsilon_th}, {target}")
    if epsilon == 0:
        return OverheadResult(total, 0, True)
    if epsilon >= epsilon_th:
        logging.info(f"eps={epsilon} is not below eps_th={epsilon_th}: no finite concatenation depth")
        return OverheadResult(total, None, False)
    ratio = math.log(original_gates * epsilon_th / target) / math.log(epsilon_th / epsilon)
    minimal = 0 if ratio <= 1 else math.ceil(math.log2(ratio) - 1e-12)
    return OverheadResult(total, minimal, True)


# ==============================================================================
# --- THRESHOLD ---
# ==============================================================================

@dataclass(frozen=True)
class ThresholdResult:
    fixed_point: float = None
    isolated: bool = True
    message: str = ""


def threshold_scan(level_map, grid=None, zero_tol=1e-15):
    """
    Locates the first isolated fixed point of ``level_map`` on the grid and
    refines it by bisection on ``f(p) - p`` to 1e-13.

    A map equal to the identity on the whole grid yields an explicit
    non-isolated result; a grid without any sign change raises ThresholdError.
    """
    grid = np.linspace(0.0, 1.0, 2001)[1:] if grid is None else np.asarray(grid, dtype=float)
    gap = np.array([level_map(p) - p for p in grid])
    gap[np.abs(gap) < zero_tol] = 0.0
    if not np.any(gap):
        return ThresholdResult(None, False, "no isolated fixed point")
    for i in range(len(grid) - 1):
        if gap[i] * gap[i + 1] < 0:
            root = bisect(lambda p: level_map(p) - p, grid[i], grid[i + 1], xtol=1e-13)
            return ThresholdResult(float(root))
        if gap[i + 1] == 0 and i + 2 < len(grid) and gap[i] * gap[i + 2] < 0:
            return ThresholdResult(float(grid[i + 1]))
    raise ThresholdError("f(p) - p does not change sign on the grid")


LEVEL_MAPS = {"repetition": lambda c: repetition_map, "quadratic": quadratic_map}


# ==============================================================================
# --- SWEEPS ---
# ==============================================================================

@dataclass
class SweepResult:
    code_name: str
    channel_kind: str
    seed: int
    table: pd.DataFrame
    config: dict = field(default_factory=dict)

    def to_csv(self, path):
        self.table.to_csv(path, index=False, lineterminator="\n")

    def to_json_dict(self):
        return {"config": self.config, "code": self.code_name, "channel": self.channel_kind,
                "seed": self.seed, "points": self.table.to_dict(orient="records")}


def sweep(config, code, workers=None):
    """
    Runs logical_error_rate at every grid point of ``config``.

    The table has the columns of SWEEP_COLUMNS plus ``pseudo_threshold``
    (estimate strictly below epsilon). Timed kinds are sampled through their
    equivalent Pauli channel; ``epsilon`` is then that channel's rate and the
    grid value is kept in a trailing ``t`` column.
    """
    decoder = build_decoder(code)
    workers = workers or config.workers
    rows = []
    for value in config.grid():
        channel = pauli_equivalent(channel_from_settings(config.channel_settings(value)))
        point = logical_error_rate(code, channel, config.trials, config.seed, workers, decoder,
                                   config.syndrome_flip_q)
        rows.append(point.as_row())
    table = pd.DataFrame(rows, columns=SWEEP_COLUMNS)
    table["pseudo_threshold"] = table["estimate"] < table["epsilon"]
    if config.is_timed:
        table["t"] = config.grid()
    return SweepResult(code.name, config.kind, config.seed, table, config.to_dict())
