from dataclasses import dataclass
from itertools import combinations, product

import numpy as np

from qec_errors import DimensionError, PauliParseError

# --- CONSTANTS ---
MAX_QUBITS = 1024

# Display prefix <-> exponent of i in front of the Hermitian letter string.
SIGN_PREFIXES = {"": 0, "+": 0, "+i": 1, "-": 2, "-i": 3}
PREFIX_FOR_EXPONENT = {0: "", 1: "+i", 2: "-", 3: "-i"}

# (x, z) bits for each single-qubit letter.
LETTER_BITS = {"I": (0, 0), "X": (1, 0), "Y": (1, 1), "Z": (0, 1)}
BITS_LETTER = {bits: letter for letter, bits in LETTER_BITS.items()}


# ==============================================================================
# --- PAULI OPERATOR TYPE ---
# ==============================================================================

@dataclass(frozen=True)
class PauliOperator:
    """
    An n-qubit Pauli operator in symplectic form.

    The operator is ``i**phase_exp * prod_q X_q**x_q Z_q**z_q`` with the X factor
    written before the Z factor on every qubit, so a qubit with both bits set
    carries ``XZ = -iY`` and the Hermitian ``Y`` needs one extra power of i.
    Bit vectors are Python ints; qubit 0 is the most significant of the n bits,
    which makes ``x_bits`` equal to the ket index it flips.

    Args:
        n (int): qubit count, at most MAX_QUBITS.
        x_bits (int): X-part bit vector.
        z_bits (int): Z-part bit vector.
        phase_exp (int): exponent of i, reduced mod 4.
    """
    n: int
    x_bits: int
    z_bits: int
    phase_exp: int = 0

    def __post_init__(self):
        if not 0 <= self.n <= MAX_QUBITS:
            raise DimensionError(f"qubit count {self.n} outside [0, {MAX_QUBITS}]")
        if self.x_bits < 0 or self.z_bits < 0 or (self.x_bits | self.z_bits) >> self.n:
            raise DimensionError(f"bit vectors do not fit in {self.n} qubits")
        object.__setattr__(self, "phase_exp", self.phase_exp % 4)

    @classmethod
    def identity(cls, n):
        return cls(n, 0, 0, 0)

    def _shift(self, qubit):
        if not 0 <= qubit < self.n:
            raise DimensionError(f"qubit {qubit} out of range for {self.n}-qubit operator")
        return self.n - 1 - qubit

    def x_at(self, qubit):
        return (self.x_bits >> self._shift(qubit)) & 1

    def z_at(self, qubit):
        return (self.z_bits >> self._shift(qubit)) & 1

    def letter(self, qubit):
        return BITS_LETTER[(self.x_at(qubit), self.z_at(qubit))]

    @property
    def y_count(self):
        return (self.x_bits & self.z_bits).bit_count()

    @property
    def display_exp(self):
        """Exponent of i in front of the Hermitian letter string."""
        return (self.phase_exp - self.y_count) % 4

    @property
    def is_hermitian(self):
        return self.display_exp in (0, 2)

    @property
    def support(self):
        return tuple(q for q in range(self.n) if self.x_at(q) or self.z_at(q))

    def letters(self):
        return "".join(self.letter(q) for q in range(self.n))

    def __str__(self):
        return to_label(self)

    def __mul__(self, other):
        return multiply(self, other)


# ==============================================================================
# --- TEXT FORM ---
# ==============================================================================

def parse_pauli(label):
    """
    Parses a Pauli label such as ``"XIZ"``, ``"-Y"`` or ``"+iXX"``.

    The optional sign prefix is one of ``+``, ``-``, ``+i``, ``-i`` (a Unicode
    minus is accepted too). Qubit 0 is the leftmost letter.

    Args:
        label (str): the text form.

    Returns:
        PauliOperator: the parsed operator.
    """
    if not isinstance(label, str):
        raise PauliParseError(repr(label), 0, "label must be text")
    text = label.strip().replace("−", "-")
    prefix = ""
    for candidate in ("+i", "-i", "+", "-"):
        if text.startswith(candidate):
            prefix = candidate
            break
    body = text[len(prefix):]
    if not body:
        raise PauliParseError(label, len(prefix), "no Pauli letters")
    if len(body) > MAX_QUBITS:
        raise PauliParseError(label, len(prefix) + MAX_QUBITS, f"more than {MAX_QUBITS} qubits")

    n = len(body)
    x_bits = z_bits = 0
    for offset, char in enumerate(body):
        if char not in LETTER_BITS:
            raise PauliParseError(label, len(prefix) + offset, f"unexpected character {char!r}")
        x, z = LETTER_BITS[char]
        shift = n - 1 - offset
        x_bits |= x << shift
        z_bits |= z << shift

    y_count = (x_bits & z_bits).bit_count()
    return PauliOperator(n, x_bits, z_bits, SIGN_PREFIXES[prefix] + y_count)


def to_label(p):
    """Canonical text form; the sign prefix is emitted only when it is not +1."""
    return PREFIX_FOR_EXPONENT[p.display_exp] + p.letters()


def from_letters(n, letters_by_qubit, sign=0):
    """Builds a Hermitian Pauli from a ``{qubit: letter}`` mapping, times ``i**sign``."""
    chars = ["I"] * n
    for qubit, char in letters_by_qubit.items():
        if not 0 <= qubit < n:
            raise DimensionError(f"qubit {qubit} out of range for {n} qubits")
        chars[qubit] = char
    p = parse_pauli("".join(chars))
    return PauliOperator(n, p.x_bits, p.z_bits, p.phase_exp + sign)


def single_qubit(n, qubit, letter):
    return from_letters(n, {qubit: letter})


# ==============================================================================
# --- GROUP ARITHMETIC ---
# ==============================================================================

def _require_same_size(a, b):
    if a.n != b.n:
        raise DimensionError(f"operators act on {a.n} and {b.n} qubits")


def multiply(a, b):
    """Returns ``a * b`` with exact phase: moving b's X past a's Z costs ``(-1)**|z_a & x_b|``."""
    _require_same_size(a, b)
    phase = a.phase_exp + b.phase_exp + 2 * (a.z_bits & b.x_bits).bit_count()
    return PauliOperator(a.n, a.x_bits ^ b.x_bits, a.z_bits ^ b.z_bits, phase)


def symplectic_product(a, b):
    _require_same_size(a, b)
    return ((a.x_bits & b.z_bits).bit_count() + (a.z_bits & b.x_bits).bit_count()) % 2


def commutes(a, b):
    return symplectic_product(a, b) == 0


def weight(p):
    return (p.x_bits | p.z_bits).bit_count()


def tensor(a, b):
    """``a`` on the first ``a.n`` qubits, ``b`` on the rest; phases add."""
    return PauliOperator(
        a.n + b.n,
        (a.x_bits << b.n) | b.x_bits,
        (a.z_bits << b.n) | b.z_bits,
        a.phase_exp + b.phase_exp,
    )


def adjoint(p):
    # (X^x Z^z)^dagger = Z^z X^x = (-1)^{|x & z|} X^x Z^z
    return PauliOperator(p.n, p.x_bits, p.z_bits, -p.phase_exp + 2 * (p.x_bits & p.z_bits).bit_count())


def hermitian_form(p):
    """Same letters, sign dropped."""
    return PauliOperator(p.n, p.x_bits, p.z_bits, p.y_count)


def product_of(operators, n):
    result = PauliOperator.identity(n)
    for op in operators:
        result = multiply(result, op)
    return result


# ==============================================================================
# --- NUMPY BRIDGE ---
# ==============================================================================

def to_symplectic(p):
    """Returns the length-2n uint8 vector ``[x | z]``."""
    bits = np.zeros(2 * p.n, dtype=np.uint8)
    for q in range(p.n):
        bits[q] = p.x_at(q)
        bits[p.n + q] = p.z_at(q)
    return bits


def from_symplectic(bits, phase_exp=0):
    """Inverse of ``to_symplectic``; the result is Hermitian times ``i**phase_exp``."""
    bits = np.asarray(bits, dtype=np.uint8).ravel()
    if bits.size % 2:
        raise DimensionError("symplectic vector must have even length")
    n = bits.size // 2
    x_bits = z_bits = 0
    for q in range(n):
        x_bits = (x_bits << 1) | int(bits[q] & 1)
        z_bits = (z_bits << 1) | int(bits[n + q] & 1)
    y_count = (x_bits & z_bits).bit_count()
    return PauliOperator(n, x_bits, z_bits, y_count + phase_exp)


def paulis_of_weight(n, w):
    """
    Yields every Hermitian n-qubit Pauli of weight exactly ``w``.

    Order: supports in lexicographic index order, letters X < Y < Z within a
    support. There are ``C(n, w) * 3**w`` of them.
    """
    for support in combinations(range(n), w):
        for letters in product("XYZ", repeat=w):
            yield from_letters(n, dict(zip(support, letters)))


def paulis_up_to_weight(n, max_weight):
    for w in range(max_weight + 1):
        yield from paulis_of_weight(n, w)
