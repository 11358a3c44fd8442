from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from itertools import combinations
import logging
import os

import numpy as np

import dense_oracle
from css_gf2 import gf2_rank, gf2_solve
from pauli_algebra import (
    PauliOperator, adjoint, commutes, multiply, parse_pauli, paulis_of_weight,
    product_of, to_label, to_symplectic, weight,
)
from qec_errors import CodeDefinitionError, DimensionError, EnumerationLimitError

# --- CONSTANTS ---
MAX_GROUP_GENERATORS = 16  # 2**16 stabilizer elements is the enumeration ceiling
TRANSVERSAL_GATES = ("bitwise_H", "bitwise_X", "bitwise_Z", "bitwise_PI4", "transversal_CNOT")

# Encoded gate each bitwise operation is claimed to induce on steane7.
# Bitwise pi/4 lands on the inverse encoded phase gate because odd Hamming
# codewords have weight 3 mod 4.
TRANSVERSAL_CLAIMS = {
    "bitwise_H": "H",
    "bitwise_X": "X",
    "bitwise_Z": "Z",
    "bitwise_PI4": "PI4_DAGGER",
    "transversal_CNOT": "CNOT",
}


# ==============================================================================
# --- DOMAIN TYPES ---
# ==============================================================================

@dataclass(frozen=True)
class StabilizerCode:
    """
    An [[n, k]] stabilizer code: n - k commuting generators plus k logical pairs.

    Construction does not validate; call ``validate_code`` for a report.
    """
    name: str
    n: int
    k: int
    generators: tuple
    logical_x: tuple
    logical_z: tuple

    def __post_init__(self):
        for attr in ("generators", "logical_x", "logical_z"):
            object.__setattr__(self, attr, tuple(getattr(self, attr)))

    @property
    def num_generators(self):
        return len(self.generators)


@dataclass(frozen=True)
class Syndrome:
    """Bit i is 1 iff the error anticommutes with generator i."""
    bits: tuple

    def to_int(self):
        value = 0
        for b in self.bits:
            value = (value << 1) | b
        return value

    @classmethod
    def from_int(cls, value, length):
        return cls(tuple((value >> (length - 1 - i)) & 1 for i in range(length)))

    def __len__(self):
        return len(self.bits)

    def __str__(self):
        return "".join(str(b) for b in self.bits)


@dataclass
class ValidationReport:
    code_name: str
    issues: list = field(default_factory=list)

    @property
    def ok(self):
        return not self.issues


class PairClass(Enum):
    DETECTED = 1     # anticommutes with some generator
    STABILIZER = 2   # in the stabilizer group: benign
    LOGICAL = 3      # in N(S) but not S: the pair is not correctable


@dataclass(frozen=True)
class QeccPair:
    alpha: int
    beta: int
    product_label: str
    classification: PairClass


@dataclass
class QeccReport:
    code_name: str
    pairs: list

    @property
    def violations(self):
        return [p for p in self.pairs if p.classification is PairClass.LOGICAL]

    @property
    def passes(self):
        return not self.violations

    def counts(self):
        return {cls.name: sum(p.classification is cls for p in self.pairs) for cls in PairClass}


@dataclass
class TransversalImage:
    gate: str
    claimed: str
    encoded_gate: str
    logical_matrix: np.ndarray
    leakage: float
    mismatch: float

    @property
    def verified(self):
        return self.encoded_gate == self.claimed and self.leakage < 1e-10 and self.mismatch < 1e-10


# ==============================================================================
# --- VALIDATION ---
# ==============================================================================

def symplectic_matrix(operators, n):
    if not operators:
        return np.zeros((0, 2 * n), dtype=np.uint8)
    return np.array([to_symplectic(op) for op in operators], dtype=np.uint8)


def check_matrix(code):
    """Generator rows in ``[x | z]`` form, shape (n - k, 2n)."""
    return symplectic_matrix(code.generators, code.n)


def validate_code(code):
    """
    Lists every violated stabilizer-code invariant; an empty report means valid.

    Checks sizes, Hermiticity, pairwise commutation, GF(2) independence of the
    generators, and the commutation pattern of the logical operators.
    """
    report = ValidationReport(code.name)
    issues = report.issues
    everything = list(code.generators) + list(code.logical_x) + list(code.logical_z)
    wrong_size = [to_label(op) for op in everything if op.n != code.n]
    if wrong_size:
        issues.append(f"operators not on {code.n} qubits: {', '.join(wrong_size)}")
        return report

    if len(code.generators) != code.n - code.k:
        issues.append(f"expected {code.n - code.k} generators, found {len(code.generators)}")
    if len(code.logical_x) != code.k or len(code.logical_z) != code.k:
        issues.append(f"expected {code.k} logical X and Z operators, found "
                      f"{len(code.logical_x)} and {len(code.logical_z)}")

    for i, g in enumerate(code.generators):
        if not g.is_hermitian:
            issues.append(f"generator {i} ({to_label(g)}) is not Hermitian")
    for i, j in combinations(range(len(code.generators)), 2):
        if not commutes(code.generators[i], code.generators[j]):
            issues.append(f"generators {i} and {j} anticommute "
                          f"({to_label(code.generators[i])}, {to_label(code.generators[j])})")

    rank = gf2_rank(check_matrix(code))
    if rank < len(code.generators):
        issues.append(f"generators are dependent: rank {rank} < {len(code.generators)}")

    for kind, ops in (("logical_x", code.logical_x), ("logical_z", code.logical_z)):
        for i, op in enumerate(ops):
            bad = [j for j, g in enumerate(code.generators) if not commutes(op, g)]
            if bad:
                issues.append(f"{kind}[{i}] anticommutes with generators {bad}")
    for i, lx in enumerate(code.logical_x):
        for j, lz in enumerate(code.logical_z):
            if commutes(lx, lz) == (i == j):
                relation = "commute" if i == j else "anticommute"
                issues.append(f"logical_x[{i}] and logical_z[{j}] {relation}")
    for group in (code.logical_x, code.logical_z):
        for a, b in combinations(group, 2):
            if not commutes(a, b):
                issues.append(f"logical operators {to_label(a)} and {to_label(b)} anticommute")

    if issues:
        logging.warning(f"Code '{code.name}' failed validation with {len(issues)} issue(s).")
    return report


# ==============================================================================
# --- SYNDROMES AND GROUP MEMBERSHIP ---
# ==============================================================================

def syndrome(code, error):
    if error.n != code.n:
        raise DimensionError(f"error acts on {error.n} qubits, code has {code.n}")
    return Syndrome(tuple(0 if commutes(error, g) else 1 for g in code.generators))


def stabilizer_decomposition(code, p):
    """GF(2) coefficients expressing p's letters as a generator product, or None."""
    if p.n != code.n:
        raise DimensionError(f"operator acts on {p.n} qubits, code has {code.n}")
    return gf2_solve(check_matrix(code), to_symplectic(p))


def in_stabilizer_group(code, p, check_phase=True):
    """
    Membership in the stabilizer group. With ``check_phase`` the sign must match
    too, so ``-S`` for a stabilizer ``S`` is not a member.
    """
    coefficients = stabilizer_decomposition(code, p)
    if coefficients is None:
        return False
    if not check_phase:
        return True
    chosen = [g for g, c in zip(code.generators, coefficients) if c]
    return product_of(chosen, code.n).phase_exp == p.phase_exp


def in_normalizer(code, p):
    return all(commutes(p, g) for g in code.generators)


def is_logical_error(code, p):
    """True for elements of N(S) outside S, compared up to sign."""
    return in_normalizer(code, p) and not in_stabilizer_group(code, p, check_phase=False)


@lru_cache(maxsize=64)
def stabilizer_group(code):
    """
    All 2**(n-k) group elements as Hermitian letter strings, in generator-mask
    order: element ``i`` is the product of the generators whose bit is set in ``i``.
    Signs are dropped; use ``in_stabilizer_group`` when they matter.
    """
    m = len(code.generators)
    if m > MAX_GROUP_GENERATORS:
        raise EnumerationLimitError(f"{m} generators: stabilizer group has 2**{m} elements")
    elements = [(0, 0)]
    for g in code.generators:
        elements += [(x ^ g.x_bits, z ^ g.z_bits) for x, z in elements]
    return tuple(PauliOperator(code.n, x, z, (x & z).bit_count()) for x, z in elements)


def min_weight_representative(code, p):
    """
    Lowest-weight member of the coset ``p * S``; ties go to the first element
    in generator-mask order. Applying it twice gives the same weight.
    """
    best = None
    for s in stabilizer_group(code):
        candidate = ((p.x_bits ^ s.x_bits) | (p.z_bits ^ s.z_bits)).bit_count()
        if best is None or candidate < best[0]:
            best = (candidate, s)
    _, s = best
    x, z = p.x_bits ^ s.x_bits, p.z_bits ^ s.z_bits
    return PauliOperator(code.n, x, z, (x & z).bit_count())


def reduced_weight(code, p):
    return weight(min_weight_representative(code, p))


# ==============================================================================
# --- QECC CONDITIONS AND DISTANCE ---
# ==============================================================================

def classify_pair(code, e_alpha, e_beta):
    product = multiply(adjoint(e_alpha), e_beta)
    if not in_normalizer(code, product):
        return product, PairClass.DETECTED
    if in_stabilizer_group(code, product, check_phase=True):
        return product, PairClass.STABILIZER
    return product, PairClass.LOGICAL


def stabilizer_qecc_check(code, errors):
    """
    Classifies ``E_a^dagger E_b`` for every ordered pair of errors: detected,
    in the stabilizer (benign), or in N(S) minus S (violation). The error set is
    correctable iff no pair is a violation.
    """
    errors = list(errors)
    for e in errors:
        if e.n != code.n:
            raise DimensionError(f"error {to_label(e)} acts on {e.n} qubits, code has {code.n}")
    pairs = []
    for a, e_alpha in enumerate(errors):
        for b, e_beta in enumerate(errors):
            product, cls = classify_pair(code, e_alpha, e_beta)
            pairs.append(QeccPair(a, b, to_label(product), cls))
    report = QeccReport(code.name, pairs)
    if not report.passes:
        logging.info(f"QECC check on '{code.name}': {len(report.violations)} violating pair(s).")
    return report


def distance(code, max_weight):
    """
    Minimum weight of a logical error (N(S) minus S, sign ignored), searched in
    increasing weight.

    Args:
        code (StabilizerCode): the code.
        max_weight (int): largest weight to enumerate; cost is sum C(n, w) 3**w.

    Returns:
        int | None: the distance, or None when it is greater than ``max_weight``.
    """
    if not 0 <= max_weight <= code.n:
        raise DimensionError(f"max_weight must lie in [0, {code.n}]")
    generators = [(g.x_bits, g.z_bits) for g in code.generators]
    for w in range(1, max_weight + 1):
        for p in paulis_of_weight(code.n, w):
            anticommutes = any(((p.x_bits & gz).bit_count() + (p.z_bits & gx).bit_count()) % 2
                               for gx, gz in generators)
            if anticommutes:
                continue
            if not in_stabilizer_group(code, p, check_phase=False):
                logging.info(f"distance('{code.name}') = {w}, witness {to_label(p)}")
                return w
    return None


# ==============================================================================
# --- BUILT-IN CODES ---
# ==============================================================================

def _code(name, generators, logical_x, logical_z):
    gens = [parse_pauli(g) for g in generators]
    n = gens[0].n
    return StabilizerCode(name, n, n - len(gens), gens,
                          [parse_pauli(p) for p in logical_x], [parse_pauli(p) for p in logical_z])


def bitflip3():
    return _code("bitflip3", ["ZZI", "IZZ"], ["XXX"], ["ZII"])


def phaseflip3():
    return _code("phaseflip3", ["XXI", "IXX"], ["ZZZ"], ["XII"])


def shor9():
    # Logical pair chosen so that |0>_enc of the printed superposition is the +1 eigenstate of Z-bar.
    return _code(
        "shor9",
        ["ZZIIIIIII", "IZZIIIIII", "IIIZZIIII", "IIIIZZIII", "IIIIIIZZI", "IIIIIIIZZ",
         "XXXXXXIII", "XXXIIIXXX"],
        ["ZIIZIIZII"],
        ["XXXIIIIII"],
    )


def steane7():
    return _code(
        "steane7",
        ["IIIZZZZ", "IZZIIZZ", "ZIZIZIZ", "IIIXXXX", "IXXIIXX", "XIXIXIX"],
        ["XXXXXXX"],
        ["ZZZZZZZ"],
    )


def five_qubit():
    return _code("five_qubit", ["XZZXI", "IXZZX", "XIXZZ", "ZXIXZ"], ["XXXXX"], ["ZZZZZ"])


BUILTIN_CODES = {
    "bitflip3": bitflip3,
    "phaseflip3": phaseflip3,
    "shor9": shor9,
    "steane7": steane7,
    "five_qubit": five_qubit,
}


def builtin(name):
    if name not in BUILTIN_CODES:
        raise CodeDefinitionError(f"unknown built-in code '{name}'; known: {', '.join(BUILTIN_CODES)}")
    return BUILTIN_CODES[name]()


# ==============================================================================
# --- TEXT FORMAT ---
# ==============================================================================

def format_code_text(code):
    lines = [f"n={code.n} k={code.k} name={code.name}", "[generators]"]
    lines += [to_label(g) for g in code.generators]
    lines.append("[logical_x]")
    lines += [to_label(p) for p in code.logical_x]
    lines.append("[logical_z]")
    lines += [to_label(p) for p in code.logical_z]
    return "\n".join(lines) + "\n"


def parse_code_text(text):
    """
    Reads the code file format: a header ``n=<int> k=<int> name=<text>``
    followed by ``[generators]``, ``[logical_x]`` and ``[logical_z]`` sections
    with one Pauli label per line. ``#`` starts a comment.
    """
    header = None
    sections = {"generators": [], "logical_x": [], "logical_z": []}
    current = None
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if header is None:
            try:
                header = dict(part.split("=", 1) for part in line.split())
                n, k = int(header["n"]), int(header["k"])
            except (KeyError, ValueError):
                raise CodeDefinitionError(f"line {line_no}: header must read 'n=<int> k=<int> name=<text>'")
            continue
        if line.startswith("[") and line.endswith("]"):
            current = line[1:-1].strip()
            if current not in sections:
                raise CodeDefinitionError(f"line {line_no}: unknown section [{current}]")
            continue
        if current is None:
            raise CodeDefinitionError(f"line {line_no}: operator outside any section")
        sections[current].append(parse_pauli(line))
    if header is None:
        raise CodeDefinitionError("empty code file")
    for kind, ops in sections.items():
        for op in ops:
            if op.n != n:
                raise CodeDefinitionError(f"[{kind}] entry {to_label(op)} has {op.n} qubits, header says {n}")
    return StabilizerCode(header.get("name", "unnamed"), n, k,
                          sections["generators"], sections["logical_x"], sections["logical_z"])


def load_code(name_or_path):
    """A built-in by name, otherwise a code file on disk."""
    if name_or_path in BUILTIN_CODES:
        return builtin(name_or_path)
    if not os.path.exists(name_or_path):
        raise CodeDefinitionError(f"'{name_or_path}' is neither a built-in code nor a readable file")
    with open(name_or_path, encoding="utf-8") as handle:
        return parse_code_text(handle.read())


# ==============================================================================
# --- TRANSVERSAL GATES (checked against the dense oracle) ---
# ==============================================================================

def transversal_gate_image(code, gate):
    """
    Measures which encoded gate a bitwise operation induces on steane7.

    The bitwise operation is applied to the printed codewords with the dense
    oracle; the induced logical matrix is identified up to global phase.
    ``transversal_CNOT`` acts on two steane7 blocks, one CNOT per qubit pair.

    Args:
        code (StabilizerCode): must be steane7.
        gate (str): one of TRANSVERSAL_GATES.

    Returns:
        TransversalImage: identified gate, leakage out of the code space and
        distance from the closest named gate.
    """
    if code.name != "steane7":
        raise CodeDefinitionError(f"transversality is only asserted for steane7, not '{code.name}'")
    if gate not in TRANSVERSAL_CLAIMS:
        raise CodeDefinitionError(f"unknown transversal gate '{gate}'")

    zero = dense_oracle.encode_codeword("steane7", 1, 0)
    one = dense_oracle.encode_codeword("steane7", 0, 1)
    if gate == "transversal_CNOT":
        basis = [dense_oracle.tensor_states(a, b) for a in (zero, one) for b in (zero, one)]
        images = [dense_oracle.apply_transversal_cnot(state, code.n) for state in basis]
    else:
        single = {"bitwise_H": "H", "bitwise_X": "X", "bitwise_Z": "Z", "bitwise_PI4": "PI4"}[gate]
        matrix = dense_oracle.gate_constant(single)
        basis = [zero, one]
        images = [dense_oracle.apply_bitwise(state, matrix) for state in basis]

    logical, leakage = dense_oracle.logical_matrix(basis, images)
    encoded, mismatch = dense_oracle.identify_gate(logical)
    image = TransversalImage(gate, TRANSVERSAL_CLAIMS[gate], encoded, logical, leakage, mismatch)
    logging.info(f"{gate} on steane7 induces encoded {encoded} (leakage {leakage:.2e}, mismatch {mismatch:.2e})")
    return image
