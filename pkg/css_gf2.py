from dataclasses import dataclass
import logging

import numpy as np

from pauli_algebra import from_symplectic
from qec_errors import CodeDefinitionError, DimensionError, EnumerationLimitError

MAX_CODEWORD_ENUMERATION = 20  # kernel dimensions above this are not enumerated


# ==============================================================================
# --- BINARY MATRIX TYPE ---
# ==============================================================================

@dataclass(frozen=True, eq=False)
class BinaryMatrix:
    """
    Immutable matrix over GF(2), stored row-major as a read-only uint8 array.

    Columns are 0-based internally; the Hamming matrix documentation numbers
    them 1..7.
    """
    bits: np.ndarray

    def __post_init__(self):
        array = np.array(self.bits, dtype=np.uint8, copy=True)
        if array.ndim == 1:
            array = array.reshape(1, -1) if array.size else array.reshape(0, 0)
        if array.ndim != 2:
            raise DimensionError("a binary matrix needs two dimensions")
        if np.any(array > 1):
            raise ValueError("binary matrix entries must be 0 or 1")
        array.setflags(write=False)
        object.__setattr__(self, "bits", array)

    @classmethod
    def from_rows(cls, rows, cols=None):
        """Builds a matrix from 0/1 strings or integer sequences; ``cols`` fixes the width of an empty matrix."""
        parsed = [[int(c) for c in row] if isinstance(row, str) else list(row) for row in rows]
        if not parsed:
            return cls(np.zeros((0, cols or 0), dtype=np.uint8))
        return cls(np.array(parsed, dtype=np.uint8))

    @classmethod
    def zeros(cls, rows, cols):
        return cls(np.zeros((rows, cols), dtype=np.uint8))

    @classmethod
    def identity(cls, size):
        return cls(np.eye(size, dtype=np.uint8))

    @property
    def rows(self):
        return self.bits.shape[0]

    @property
    def cols(self):
        return self.bits.shape[1]

    def row(self, index):
        return self.bits[index]

    def __eq__(self, other):
        return isinstance(other, BinaryMatrix) and np.array_equal(self.bits, other.bits)

    def __hash__(self):
        return hash((self.bits.shape, self.bits.tobytes()))

    def __str__(self):
        return format_matrix_text(self)


def hamming_matrix():
    """Parity-check matrix of the [7,4] Hamming code; column i (1-based) is i in binary, top row most significant."""
    return BinaryMatrix.from_rows(["0001111", "0110011", "1010101"])


def parse_matrix_text(text, cols=None):
    """One row per line of 0/1 characters; blank lines and ``#`` comments are ignored."""
    rows = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if set(line) - {"0", "1"}:
            raise ValueError(f"line {line_no}: only 0 and 1 are allowed, got {line!r}")
        rows.append(line)
    widths = {len(r) for r in rows}
    if len(widths) > 1:
        raise DimensionError(f"rows have different lengths {sorted(widths)}")
    return BinaryMatrix.from_rows(rows, cols=cols)


def format_matrix_text(m):
    return "\n".join("".join(str(int(b)) for b in row) for row in m.bits)


# ==============================================================================
# --- ELIMINATION ---
# ==============================================================================

def row_reduce(m):
    """
    Reduced row echelon form over GF(2).

    Returns:
        tuple: (rref as np.ndarray, list of pivot columns).
    """
    a = np.array(m.bits if isinstance(m, BinaryMatrix) else m, dtype=np.uint8, copy=True)
    rows, cols = a.shape
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        candidates = np.nonzero(a[r:, c])[0]
        if candidates.size == 0:
            continue
        p = r + candidates[0]
        if p != r:
            a[[r, p]] = a[[p, r]]
        others = np.nonzero(a[:, c])[0]
        others = others[others != r]
        a[others] ^= a[r]
        pivots.append(c)
        r += 1
    return a, pivots


def gf2_rank(m):
    return len(row_reduce(m)[1])


def kernel_basis(m):
    """Rows span ``{v : m v = 0}``; there are ``cols - rank`` of them."""
    rref, pivots = row_reduce(m)
    cols = rref.shape[1]
    free = [c for c in range(cols) if c not in pivots]
    basis = np.zeros((len(free), cols), dtype=np.uint8)
    for i, f in enumerate(free):
        basis[i, f] = 1
        for r, p in enumerate(pivots):
            basis[i, p] = rref[r, f]
    return BinaryMatrix(basis)


def independent_rows(m):
    """Indices of rows kept by a left-to-right greedy pass that drops rows dependent on earlier ones."""
    kept = []
    basis = np.zeros((0, m.cols), dtype=np.uint8)
    for i in range(m.rows):
        trial = np.vstack([basis, m.bits[i:i + 1]])
        if len(row_reduce(trial)[1]) > len(kept):
            kept.append(i)
            basis = trial
    return kept


def gf2_solve(rows, target):
    """
    Finds coefficients ``c`` with ``c @ rows = target (mod 2)``.

    Args:
        rows (np.ndarray): shape (r, m) generator rows.
        target (np.ndarray): length-m vector.

    Returns:
        np.ndarray | None: length-r 0/1 coefficients, or None if target is outside the row span.
    """
    rows = np.asarray(rows, dtype=np.uint8)
    target = np.asarray(target, dtype=np.uint8).reshape(-1)
    r = rows.shape[0]
    if r == 0:
        return np.zeros(0, dtype=np.uint8) if not target.any() else None
    augmented = np.hstack([rows.T, target.reshape(-1, 1)])
    rref, pivots = row_reduce(augmented)
    if r in pivots:
        return None
    solution = np.zeros(r, dtype=np.uint8)
    for i, p in enumerate(pivots):
        solution[p] = rref[i, r]
    return solution


def in_row_space(m, vector):
    return gf2_solve(m.bits, vector) is not None


def row_space_equal(a, b):
    if a.cols != b.cols:
        return False
    return all(in_row_space(a, row) for row in b.bits) and all(in_row_space(b, row) for row in a.bits)


def gf2_inverse(square):
    square = np.asarray(square, dtype=np.uint8)
    size = square.shape[0]
    rref, pivots = row_reduce(np.hstack([square, np.eye(size, dtype=np.uint8)]))
    if pivots[:size] != list(range(size)):
        raise CodeDefinitionError("matrix is singular over GF(2)")
    return rref[:, size:]


# ==============================================================================
# --- CLASSICAL CODES ---
# ==============================================================================

def classical_syndrome(m, word):
    word = np.asarray(word, dtype=np.uint8).reshape(-1)
    if word.size != m.cols:
        raise DimensionError(f"word has length {word.size}, matrix has {m.cols} columns")
    return (m.bits.astype(np.int64) @ word) % 2


def codewords(m):
    """Every word in the kernel of ``m``."""
    basis = kernel_basis(m)
    if basis.rows > MAX_CODEWORD_ENUMERATION:
        raise EnumerationLimitError(f"kernel dimension {basis.rows} is too large to enumerate")
    coefficients = (np.arange(2 ** basis.rows)[:, None] >> np.arange(basis.rows)[None, ::-1]) & 1
    return (coefficients @ basis.bits.astype(np.int64)) % 2


def dual_contains(c1_checks, c2_gens):
    """
    True iff every generator row of C2 is orthogonal to every codeword of C1 = ker(c1_checks),
    i.e. C2 is contained in the dual of C1.
    """
    if c1_checks.cols != c2_gens.cols:
        raise DimensionError(f"column counts differ: {c1_checks.cols} vs {c2_gens.cols}")
    c1_basis = kernel_basis(c1_checks)
    if c1_basis.rows == 0 or c2_gens.rows == 0:
        return True
    return not np.any((c1_basis.bits.astype(np.int64) @ c2_gens.bits.T.astype(np.int64)) % 2)


# ==============================================================================
# --- CSS CONSTRUCTION ---
# ==============================================================================

def _logical_completion(kernel_of, span_of):
    """Vectors in ker(kernel_of) that extend rowspace(span_of), one per missing dimension."""
    basis = span_of.bits
    rank = gf2_rank(basis)
    extra = []
    for candidate in kernel_basis(kernel_of).bits:
        trial = np.vstack([basis, candidate[None, :]])
        trial_rank = gf2_rank(trial)
        if trial_rank > rank:
            basis, rank = trial, trial_rank
            extra.append(candidate)
    return np.array(extra, dtype=np.uint8).reshape(len(extra), kernel_of.cols)


def css_code(h_z, h_x, name="css"):
    """
    CSS construction: Z-type generators from the rows of ``h_z`` (they detect bit
    flips) and X-type generators from the rows of ``h_x`` (they detect phase flips).

    Dependent rows are dropped left to right, keeping printed order. Logical
    operators are completed from ker(h_z) mod rowspace(h_x) and ker(h_x) mod
    rowspace(h_z), then paired so that X_i and Z_j anticommute iff i == j.

    Args:
        h_z (BinaryMatrix): checks against bit flips.
        h_x (BinaryMatrix): checks against phase flips; may have zero rows.
        name (str): name of the resulting code.

    Returns:
        StabilizerCode: a code that passes ``validate_code``.
    """
    from stabilizer_codes import StabilizerCode

    if h_z.cols != h_x.cols:
        raise DimensionError(f"h_z has {h_z.cols} columns, h_x has {h_x.cols}")
    n = h_z.cols
    overlap = (h_x.bits.astype(np.int64) @ h_z.bits.T.astype(np.int64)) % 2
    if overlap.any():
        i, j = (int(v) for v in np.argwhere(overlap)[0])
        raise CodeDefinitionError(f"X-check row {i} and Z-check row {j} overlap on an odd number of qubits; "
                                  f"the generators would anticommute")

    z_rows = [h_z.bits[i] for i in independent_rows(h_z)]
    x_rows = [h_x.bits[i] for i in independent_rows(h_x)]
    if len(z_rows) < h_z.rows or len(x_rows) < h_x.rows:
        logging.info(f"css_code({name}): dropped {h_z.rows - len(z_rows)} Z and {h_x.rows - len(x_rows)} X dependent rows")

    hz_reduced = BinaryMatrix.from_rows(z_rows, cols=n)
    hx_reduced = BinaryMatrix.from_rows(x_rows, cols=n)
    k = n - len(z_rows) - len(x_rows)

    logical_x = _logical_completion(h_z, hx_reduced)
    logical_z = _logical_completion(h_x, hz_reduced)
    if logical_x.shape[0] != k or logical_z.shape[0] != k:
        raise CodeDefinitionError(f"could not complete {k} logical pairs for {name}")
    if k:
        pairing = (logical_x.astype(np.int64) @ logical_z.T.astype(np.int64)) % 2
        logical_z = (gf2_inverse(pairing).T.astype(np.int64) @ logical_z.astype(np.int64)) % 2

    def z_type(row):
        return from_symplectic(np.concatenate([np.zeros(n, dtype=np.uint8), row]))

    def x_type(row):
        return from_symplectic(np.concatenate([row, np.zeros(n, dtype=np.uint8)]))

    return StabilizerCode(
        name=name,
        n=n,
        k=k,
        generators=tuple(z_type(r) for r in z_rows) + tuple(x_type(r) for r in x_rows),
        logical_x=tuple(x_type(r) for r in logical_x),
        logical_z=tuple(z_type(r) for r in logical_z),
    )
