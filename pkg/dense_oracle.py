"""
Brute-force dense verifier.

State vectors are numpy arrays of ``2**n`` complex amplitudes with qubit 0 the
most significant bit of the basis index, matching the bit layout of
``PauliOperator``. Everything here is deliberately naive linear algebra so it
can be trusted as an independent check of the symplectic machinery.
"""
from dataclasses import dataclass
from itertools import product
import logging

import numpy as np

from css_gf2 import hamming_matrix
from pauli_algebra import PauliOperator
from qec_errors import DensityMatrixError, DimensionError, OracleError

# --- SIZE CEILINGS ---
MAX_DENSE_QUBITS = 10      # explicit 2**n x 2**n matrices
MAX_STATE_QUBITS = 14      # state vectors (two Steane blocks)
MAX_DENSITY_QUBITS = 6     # density matrices

# --- TOLERANCES ---
NORM_TOL = 1e-10

SQRT2 = np.sqrt(2.0)

# --- GATE CONSTANTS ---
GATES = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
    "H": np.array([[1, 1], [1, -1]], dtype=complex) / SQRT2,
    "PI8": np.diag([np.exp(1j * np.pi / 8), np.exp(-1j * np.pi / 8)]),
    "PI4": np.diag([1, 1j]),
    "PI4_DAGGER": np.diag([1, -1j]),
    "CNOT": np.array([[1, 0, 0, 0],
                      [0, 1, 0, 0],
                      [0, 0, 0, 1],
                      [0, 0, 1, 0]], dtype=complex),
}
for _matrix in GATES.values():
    _matrix.setflags(write=False)

PAULI_MATRICES = {"x": GATES["X"], "y": GATES["Y"], "z": GATES["Z"]}


def gate_constant(name):
    """Returns a copy of the named gate matrix (H, PI8, Z, X, CNOT, PI4 and a few helpers)."""
    if name not in GATES:
        raise OracleError(f"unknown gate '{name}'; known: {', '.join(GATES)}")
    return GATES[name].copy()


# ==============================================================================
# --- STATE VECTORS ---
# ==============================================================================

@dataclass(frozen=True, eq=False)
class StateVector:
    """
    A normalized pure state on n qubits.

    Args:
        n (int): qubit count, at most MAX_STATE_QUBITS.
        amplitudes (np.ndarray): ``2**n`` complex amplitudes, squared norm 1 to NORM_TOL.
    """
    n: int
    amplitudes: np.ndarray

    def __post_init__(self):
        if not 0 <= self.n <= MAX_STATE_QUBITS:
            raise DimensionError(f"state vectors are limited to {MAX_STATE_QUBITS} qubits, got {self.n}")
        amps = np.array(self.amplitudes, dtype=complex, copy=True).reshape(-1)
        if amps.size != 2 ** self.n:
            raise DimensionError(f"{self.n} qubits need {2 ** self.n} amplitudes, got {amps.size}")
        norm = np.vdot(amps, amps).real
        if abs(norm - 1.0) > NORM_TOL:
            raise OracleError(f"state is not normalized: squared norm {norm:.12f}")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def basis(cls, n, index):
        amps = np.zeros(2 ** n, dtype=complex)
        amps[index] = 1.0
        return cls(n, amps)

    @classmethod
    def from_bitstrings(cls, terms):
        """Builds a state from ``{"0101": amplitude}`` terms, normalizing the result."""
        n = len(next(iter(terms)))
        amps = np.zeros(2 ** n, dtype=complex)
        for bits, amplitude in terms.items():
            amps[int(bits, 2)] += amplitude
        return cls(n, amps / np.linalg.norm(amps))

    def inner(self, other):
        """``<self|other>``"""
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def distance(self, other):
        return float(np.linalg.norm(self.amplitudes - other.amplitudes))


def tensor_states(a, b):
    return StateVector(a.n + b.n, np.kron(a.amplitudes, b.amplitudes))


def superpose(states, coefficients):
    amps = sum(c * s.amplitudes for c, s in zip(coefficients, states))
    return StateVector(states[0].n, amps)


# ==============================================================================
# --- PAULI BRIDGE AND GATE APPLICATION ---
# ==============================================================================

def pauli_to_dense(p):
    """Dense matrix of ``i**phase_exp * prod X^x Z^z`` (X factor left of Z on each qubit)."""
    if p.n > MAX_DENSE_QUBITS:
        raise DimensionError(f"dense matrices are limited to {MAX_DENSE_QUBITS} qubits, got {p.n}")
    matrix = np.array([[1.0 + 0j]])
    for q in range(p.n):
        factor = np.eye(2, dtype=complex)
        if p.x_at(q):
            factor = factor @ GATES["X"]
        if p.z_at(q):
            factor = factor @ GATES["Z"]
        matrix = np.kron(matrix, factor)
    return (1j ** p.phase_exp) * matrix


def _parity(indices, mask):
    parity = np.zeros_like(indices)
    m, shift = mask, 0
    while m:
        if m & 1:
            parity ^= (indices >> shift) & 1
        m >>= 1
        shift += 1
    return parity


def apply_pauli_amplitudes(amplitudes, p):
    """``p`` applied to a raw amplitude vector by index permutation and signs."""
    indices = np.arange(amplitudes.size, dtype=np.int64)
    signs = 1 - 2 * _parity(indices, p.z_bits)
    out = np.empty_like(amplitudes, dtype=complex)
    out[indices ^ p.x_bits] = signs * amplitudes
    return (1j ** p.phase_exp) * out


def apply_pauli(state, p):
    if state.n != p.n:
        raise DimensionError(f"state has {state.n} qubits, operator has {p.n}")
    return StateVector(state.n, apply_pauli_amplitudes(state.amplitudes, p))


def apply_single_qubit(state, matrix, qubit):
    psi = state.amplitudes.reshape([2] * state.n)
    psi = np.moveaxis(np.tensordot(matrix, psi, axes=([1], [qubit])), 0, qubit)
    return StateVector(state.n, psi.reshape(-1))


def apply_bitwise(state, matrix):
    """The same single-qubit gate on every qubit."""
    for q in range(state.n):
        state = apply_single_qubit(state, matrix, q)
    return state


def hadamard_all(state):
    return apply_bitwise(state, GATES["H"])


def apply_transversal_cnot(state, block_n):
    """
    CNOT from qubit q of the first block to qubit q of the second, for every q.
    Acts on ``2 * block_n`` qubits as a basis permutation.
    """
    if state.n != 2 * block_n:
        raise DimensionError(f"transversal CNOT on two {block_n}-qubit blocks needs {2 * block_n} qubits")
    indices = np.arange(2 ** state.n, dtype=np.int64)
    control = indices >> block_n
    target = indices & ((1 << block_n) - 1)
    out = np.empty(2 ** state.n, dtype=complex)
    out[(control << block_n) | (target ^ control)] = state.amplitudes
    return StateVector(state.n, out)


# ==============================================================================
# --- CODEWORDS ---
# ==============================================================================

def _check_normalized(alpha, beta):
    norm = abs(alpha) ** 2 + abs(beta) ** 2
    if abs(norm - 1.0) > NORM_TOL:
        raise OracleError(f"|alpha|^2 + |beta|^2 = {norm:.12f}, expected 1")


def _basis_pair(code_name):
    if code_name == "bitflip3":
        return StateVector.from_bitstrings({"000": 1}), StateVector.from_bitstrings({"111": 1})
    if code_name == "phaseflip3":
        plus = StateVector(1, np.array([1, 1]) / SQRT2)
        minus = StateVector(1, np.array([1, -1]) / SQRT2)
        return tensor_states(tensor_states(plus, plus), plus), tensor_states(tensor_states(minus, minus), minus)
    if code_name == "shor9":
        blocks = []
        for sign in (1, -1):
            block = StateVector.from_bitstrings({"000": 1, "111": sign})
            blocks.append(tensor_states(tensor_states(block, block), block))
        return tuple(blocks)
    if code_name == "steane7":
        even = hamming_row_span()
        odd = [w ^ 0b1111111 for w in even]
        zero = np.zeros(2 ** 7, dtype=complex)
        one = np.zeros(2 ** 7, dtype=complex)
        zero[even] = 1 / np.sqrt(8)
        one[odd] = 1 / np.sqrt(8)
        return StateVector(7, zero), StateVector(7, one)
    raise OracleError(f"no printed codewords for '{code_name}'")


def hamming_row_span():
    """The 8 even-weight Hamming codewords as 7-bit integers (first column most significant)."""
    rows = [int("".join(str(b) for b in row), 2) for row in hamming_matrix().bits]
    words = set()
    for mask in range(8):
        word = 0
        for i, row in enumerate(rows):
            if (mask >> i) & 1:
                word ^= row
        words.add(word)
    return sorted(words)


def encode_codeword(code_name, alpha, beta):
    """
    ``alpha |0>_code + beta |1>_code`` from the printed superpositions.

    Args:
        code_name (str): bitflip3, phaseflip3, shor9 or steane7.
        alpha (complex): amplitude of the encoded zero.
        beta (complex): amplitude of the encoded one.

    Returns:
        StateVector: the encoded state.
    """
    _check_normalized(alpha, beta)
    zero, one = _basis_pair(code_name)
    return superpose([zero, one], [alpha, beta])


def codewords_from_stabilizers(code):
    """
    Encoded ``|0>`` and ``|1>`` for any small stabilizer code by projection.

    ``|0>`` is the projection of the first computational basis state with
    non-zero overlap onto the joint +1 eigenspace of the generators and of
    logical Z; ``|1> = X-bar |0>``. Needs ``code.k == 1``.
    """
    if code.k != 1:
        raise OracleError(f"projection is implemented for k = 1 codes, '{code.name}' has k = {code.k}")
    if code.n > MAX_STATE_QUBITS:
        raise DimensionError(f"{code.n} qubits exceed the state-vector limit {MAX_STATE_QUBITS}")
    projectors = list(code.generators) + [code.logical_z[0]]
    for index in range(2 ** code.n):
        amps = np.zeros(2 ** code.n, dtype=complex)
        amps[index] = 1.0
        for s in projectors:
            amps = 0.5 * (amps + apply_pauli_amplitudes(amps, s))
        norm = np.linalg.norm(amps)
        if norm > 1e-6:
            zero = StateVector(code.n, amps / norm)
            return zero, apply_pauli(zero, code.logical_x[0])
    raise OracleError(f"code space of '{code.name}' is empty")


def stabilizers_fix_codewords(code, codewords):
    """Largest ``||S|psi> - |psi>||`` over generators S and the given codewords."""
    worst = 0.0
    for state in codewords:
        for s in code.generators:
            worst = max(worst, apply_pauli(state, s).distance(state))
    return worst


def _require_orthonormal(states):
    gram = np.array([[a.inner(b) for b in states] for a in states])
    deviation = np.max(np.abs(gram - np.eye(len(states))))
    if deviation > NORM_TOL:
        raise OracleError(f"codewords are not orthonormal (deviation {deviation:.2e})")


# ==============================================================================
# --- QECC CONDITIONS ---
# ==============================================================================

@dataclass
class QeccConditionResult:
    c: np.ndarray          # fitted c_{alpha beta}
    violation: float       # max deviation from the c_{alpha beta} delta_{ij} structure
    overlaps: np.ndarray   # [alpha, i, beta, j] -> <psi_i| E_alpha^dagger E_beta |psi_j>

    @property
    def passes(self):
        return self.violation < NORM_TOL


def qecc_condition_matrix(codewords, errors):
    """
    Evaluates ``<psi_i| E_a^dagger E_b |psi_j>`` for all errors and codewords.

    ``c_ab`` is the average of the diagonal (i == j) entries; the violation is
    the largest entry-wise distance from ``c_ab * delta_ij``.

    Returns:
        QeccConditionResult: fitted matrix, violation and the raw overlaps.
    """
    _require_orthonormal(codewords)
    errors = list(errors)
    if not errors:
        raise OracleError("the error set is empty")
    images = np.array([[apply_pauli(psi, e).amplitudes for psi in codewords] for e in errors])
    overlaps = np.einsum("aix,bjx->aibj", images.conj(), images)
    diagonal = np.einsum("aibi->abi", overlaps)
    c = diagonal.mean(axis=2)
    target = np.einsum("ab,ij->aibj", c, np.eye(len(codewords)))
    violation = float(np.max(np.abs(overlaps - target)))
    logging.debug(f"QECC condition over {len(errors)} errors: violation {violation:.3e}")
    return QeccConditionResult(c, violation, overlaps)


def error_branch_probabilities(epsilon, n):
    """
    Bit-flip noise on ``|0...0>`` treated as Kraus branches ``sqrt(1-eps) I`` and
    ``sqrt(eps) X`` per qubit; returns the total branch probability for each
    number of flipped qubits, computed from the dense branch states.
    """
    if not 0.0 <= epsilon <= 1.0:
        raise OracleError(f"epsilon must lie in [0, 1], got {epsilon}")
    if n > MAX_DENSE_QUBITS:
        raise DimensionError(f"at most {MAX_DENSE_QUBITS} qubits, got {n}")
    ground = StateVector.basis(n, 0)
    totals = {k: 0.0 for k in range(n + 1)}
    for pattern in product((0, 1), repeat=n):
        x_bits = int("".join(map(str, pattern)), 2) if n else 0
        flipped = apply_pauli_amplitudes(ground.amplitudes, PauliOperator(n, x_bits, 0))
        weight = sum(pattern)
        branch = np.sqrt(epsilon) ** weight * np.sqrt(1 - epsilon) ** (n - weight) * flipped
        totals[weight] += float(np.vdot(branch, branch).real)
    return totals


# ==============================================================================
# --- LOGICAL ACTION ---
# ==============================================================================

def logical_matrix(basis, images):
    """
    Matrix of an operation restricted to the span of ``basis``.

    Args:
        basis (list[StateVector]): orthonormal encoded basis states.
        images (list[StateVector]): the operation applied to each basis state.

    Returns:
        tuple: (matrix with entry [a, b] = <basis_a|image_b>, largest norm of an
        image component outside the span).
    """
    _require_orthonormal(basis)
    matrix = np.array([[a.inner(img) for img in images] for a in basis])
    kept = np.sum(np.abs(matrix) ** 2, axis=0)
    leakage = float(np.sqrt(np.max(np.clip(1.0 - kept, 0.0, None))))
    return matrix, leakage


def identify_gate(matrix):
    """
    Closest named gate up to a global phase.

    Returns:
        tuple: (gate name, Frobenius distance to the phase-aligned gate).
    """
    best = (None, np.inf)
    for name, gate in GATES.items():
        if gate.shape != matrix.shape:
            continue
        overlap = np.trace(gate.conj().T @ matrix)
        if abs(overlap) < 1e-12:
            continue
        phase = overlap / abs(overlap)
        mismatch = float(np.linalg.norm(matrix - phase * gate))
        if mismatch < best[1]:
            best = (name, mismatch)
    if best[0] is None:
        raise OracleError("matrix is not close to any named gate")
    return best


# ==============================================================================
# --- COLLECTIVE NOISE ---
# ==============================================================================

SINGLET = StateVector.from_bitstrings({"01": 1, "10": -1})
TRIPLET_MINUS = StateVector.from_bitstrings({"00": 1})
TRIPLET_ZERO = StateVector.from_bitstrings({"01": 1, "10": 1})
TRIPLET_PLUS = StateVector.from_bitstrings({"11": 1})


def dfs4_codewords():
    """The 4-qubit collective-noise code built from singlets and triplets."""
    zero = tensor_states(SINGLET, SINGLET)
    one_amps = (tensor_states(TRIPLET_PLUS, TRIPLET_MINUS).amplitudes
                - tensor_states(TRIPLET_ZERO, TRIPLET_ZERO).amplitudes
                + tensor_states(TRIPLET_MINUS, TRIPLET_PLUS).amplitudes) / np.sqrt(3)
    return zero, StateVector(4, one_amps)


def dfs3_subsystem():
    """The two 3-qubit doublets; each dict entry spans one invariant two-dimensional subspace."""
    zero_pair = [StateVector.from_bitstrings({"010": 1, "100": -1}),
                 StateVector.from_bitstrings({"011": 1, "101": -1})]
    one_pair = [StateVector.from_bitstrings({"001": -2, "010": 1, "100": 1}),
                StateVector.from_bitstrings({"110": 2, "101": -1, "011": -1})]
    return {"zero": zero_pair, "one": one_pair}


def collective_operator(n, axis):
    """Dense ``S_axis = sum_i sigma_axis^i`` on n qubits."""
    if n > MAX_DENSE_QUBITS:
        raise DimensionError(f"collective operators are limited to {MAX_DENSE_QUBITS} qubits, got {n}")
    if axis not in PAULI_MATRICES:
        raise OracleError(f"axis must be one of x, y, z, got '{axis}'")
    sigma = PAULI_MATRICES[axis]
    total = np.zeros((2 ** n, 2 ** n), dtype=complex)
    for i in range(n):
        total += np.kron(np.kron(np.eye(2 ** i), sigma), np.eye(2 ** (n - 1 - i)))
    return total


@dataclass
class DfsAxisResult:
    axis: str
    eigenvalue: float
    residuals: list

    @property
    def passes(self):
        return max(self.residuals) < NORM_TOL


def dfs_check(states, n, axes=("x", "y", "z")):
    """
    Tests ``S_axis |psi> = c_axis |psi>`` for every state; ``c_axis`` is the
    Rayleigh quotient of the first state, so a state with another eigenvalue
    shows up as a residual.

    Returns:
        dict: axis -> DfsAxisResult.
    """
    results = {}
    for axis in axes:
        s = collective_operator(n, axis)
        first = states[0].amplitudes
        c = float(np.vdot(first, s @ first).real)
        residuals = [float(np.linalg.norm(s @ psi.amplitudes - c * psi.amplitudes)) for psi in states]
        results[axis] = DfsAxisResult(axis, c, residuals)
        if not results[axis].passes:
            logging.info(f"S_{axis} does not act as a constant: max residual {max(residuals):.3e}")
    return results


def subsystem_invariance(basis, n, axes=("x", "y", "z")):
    """
    Leakage ``||(I - P) S_axis P||`` (spectral norm) of each collective operator
    out of ``span(basis)``; the basis is orthonormalized first.
    """
    stacked = np.column_stack([b.amplitudes for b in basis])
    q, r = np.linalg.qr(stacked)
    q = q[:, np.abs(np.diag(r)) > 1e-12]
    projector = q @ q.conj().T
    complement = np.eye(2 ** n) - projector
    leakage = {}
    for axis in axes:
        s = collective_operator(n, axis)
        leakage[axis] = float(np.linalg.norm(complement @ s @ projector, 2))
    return leakage


# ==============================================================================
# --- DENSITY MATRICES ---
# ==============================================================================

def validate_density_matrix(rho, trace_tol=1e-9, eigen_tol=1e-9, hermitian_tol=1e-9):
    """Raises DensityMatrixError unless ``rho`` is Hermitian, unit trace and PSD within tolerance."""
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise DensityMatrixError(f"density matrix must be square, got shape {rho.shape}")
    dim = rho.shape[0]
    n = int(round(np.log2(dim))) if dim else -1
    if dim == 0 or 2 ** n != dim:
        raise DensityMatrixError(f"dimension {dim} is not a power of two")
    if n > MAX_DENSITY_QUBITS:
        raise DimensionError(f"density matrices are limited to {MAX_DENSITY_QUBITS} qubits, got {n}")
    if np.max(np.abs(rho - rho.conj().T)) > hermitian_tol:
        raise DensityMatrixError("density matrix is not Hermitian")
    trace = np.trace(rho).real
    if abs(trace - 1.0) > trace_tol:
        raise DensityMatrixError(f"trace is {trace:.12f}, expected 1")
    smallest = float(np.min(np.linalg.eigvalsh(rho)))
    if smallest < -eigen_tol:
        raise DensityMatrixError(f"negative eigenvalue {smallest:.3e}")
    return rho
