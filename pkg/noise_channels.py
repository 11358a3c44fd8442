from dataclasses import dataclass
from itertools import product
import logging
import math

import numpy as np
from scipy.linalg import expm

from dense_oracle import GATES, validate_density_matrix
from pauli_algebra import PauliOperator
from qec_errors import ChannelError, DimensionError

# --- CHANNEL KINDS ---
PAULI_KINDS = ("bit_flip", "phase_flip", "depolarizing_1q")
MIXTURE_KINDS = PAULI_KINDS + ("depolarizing_2q",)
TIMED_KINDS = ("phase_damping", "depolarizing_markov", "amplitude_damping")
ALL_KINDS = MIXTURE_KINDS + TIMED_KINDS
# Kinds a code-capacity sweep can sample: Pauli channels and their timed equivalents.
SWEEPABLE_KINDS = PAULI_KINDS + ("phase_damping", "depolarizing_markov")

# Decay-constant field used by each time-parameterised kind.
DECAY_FIELD = {"phase_damping": "gamma", "depolarizing_markov": "gamma_tilde", "amplitude_damping": "big_gamma"}

COMPLETENESS_TOL = 1e-12
SIGMA = (GATES["X"], GATES["Y"], GATES["Z"])


# ==============================================================================
# --- CHANNEL DESCRIPTION ---
# ==============================================================================

@dataclass(frozen=True)
class NoiseChannel:
    """
    Immutable description of a noise process.

    Pauli mixtures carry ``epsilon`` (for depolarizing_2q it is the two-qubit
    rate). Time-parameterised kinds carry one decay constant in 1/time units
    (``gamma``, ``gamma_tilde`` or ``big_gamma``) and a duration ``t``.
    """
    kind: str
    epsilon: float = None
    gamma: float = None
    gamma_tilde: float = None
    big_gamma: float = None
    t: float = 0.0

    def __post_init__(self):
        if self.kind not in ALL_KINDS:
            raise ChannelError(f"unknown channel kind '{self.kind}'; known: {', '.join(ALL_KINDS)}")
        if self.kind in MIXTURE_KINDS:
            if self.epsilon is None or not 0.0 <= self.epsilon <= 1.0:
                raise ChannelError(f"{self.kind} needs an error rate epsilon in [0, 1], got {self.epsilon}")
        else:
            rate = self.decay
            if rate is None or rate < 0:
                raise ChannelError(f"{self.kind} needs {DECAY_FIELD[self.kind]} >= 0, got {rate}")
            if self.t is None or self.t < 0:
                raise ChannelError(f"duration t must be >= 0, got {self.t}")

    @property
    def decay(self):
        return getattr(self, DECAY_FIELD[self.kind]) if self.kind in TIMED_KINDS else None

    @property
    def arity(self):
        return 2 if self.kind == "depolarizing_2q" else 1

    def at_time(self, t):
        """Same process, run for duration ``t``."""
        if self.kind not in TIMED_KINDS:
            raise ChannelError(f"{self.kind} is not time-parameterised")
        return NoiseChannel(self.kind, gamma=self.gamma, gamma_tilde=self.gamma_tilde,
                            big_gamma=self.big_gamma, t=t)


def bit_flip(epsilon):
    return NoiseChannel("bit_flip", epsilon=epsilon)


def phase_flip(epsilon):
    return NoiseChannel("phase_flip", epsilon=epsilon)


def depolarizing_1q(epsilon):
    return NoiseChannel("depolarizing_1q", epsilon=epsilon)


def depolarizing_2q(epsilon2):
    return NoiseChannel("depolarizing_2q", epsilon=epsilon2)


def phase_damping(gamma, t):
    return NoiseChannel("phase_damping", gamma=gamma, t=t)


def depolarizing_markov(gamma_tilde, t):
    return NoiseChannel("depolarizing_markov", gamma_tilde=gamma_tilde, t=t)


def amplitude_damping(big_gamma, t):
    return NoiseChannel("amplitude_damping", big_gamma=big_gamma, t=t)


def channel_from_settings(settings):
    """
    Builds a channel from config-style keys: ``kind`` plus ``epsilon`` /
    ``gamma`` / ``gamma_tilde`` / ``big_gamma`` and ``t``.
    """
    kind = settings.get("kind")
    if kind is None:
        raise ChannelError("channel settings need a 'kind'")
    fields = {key: settings.get(key) for key in ("epsilon", "gamma", "gamma_tilde", "big_gamma")}
    return NoiseChannel(kind, t=settings.get("t") or 0.0, **fields)


# ==============================================================================
# --- PAULI SAMPLING ---
# ==============================================================================

def sample_error_bits(uniforms, channel):
    """
    Per-qubit Pauli error from one uniform draw each, vectorised over any shape.

    depolarizing_1q splits ``[0, eps)`` into thirds for X, Y, Z; bit_flip and
    phase_flip use ``u < eps``.

    Returns:
        tuple: (x, z) uint8 arrays of the input shape.
    """
    if channel.kind not in PAULI_KINDS:
        raise ChannelError(f"cannot sample single-qubit Pauli errors from {channel.kind}")
    u = np.asarray(uniforms)
    eps = channel.epsilon
    if channel.kind == "bit_flip":
        return (u < eps).astype(np.uint8), np.zeros(u.shape, dtype=np.uint8)
    if channel.kind == "phase_flip":
        return np.zeros(u.shape, dtype=np.uint8), (u < eps).astype(np.uint8)
    x = u < 2 * eps / 3
    z = (u >= eps / 3) & (u < eps)
    return x.astype(np.uint8), z.astype(np.uint8)


def bits_to_int(bits):
    value = 0
    for b in bits:
        value = (value << 1) | int(b)
    return value


def sample_pauli_error(n, channel, rng_stream):
    """
    I.i.d. Pauli error on n qubits using ``n`` draws from ``rng_stream``.

    Args:
        n (int): qubit count.
        channel (NoiseChannel): bit_flip, phase_flip or depolarizing_1q.
        rng_stream (CounterStream): the trial's stream; never share one across threads.

    Returns:
        PauliOperator: a Hermitian error.
    """
    x, z = sample_error_bits(rng_stream.uniforms(n), channel)
    x_bits, z_bits = bits_to_int(x), bits_to_int(z)
    return PauliOperator(n, x_bits, z_bits, (x_bits & z_bits).bit_count())


def two_qubit_paulis():
    """The 16 two-qubit Pauli labels, ``II`` first, in I < X < Y < Z order."""
    return ["".join(pair) for pair in product("IXYZ", repeat=2)]


# ==============================================================================
# --- KRAUS REPRESENTATION ---
# ==============================================================================

@dataclass(frozen=True)
class KrausSet:
    """Operators ``M_mu`` with ``sum M^dagger M = I``; zero operators are dropped."""
    operators: tuple

    def __post_init__(self):
        ops = tuple(np.asarray(m, dtype=complex) for m in self.operators if np.any(np.abs(m) > 0))
        if not ops:
            raise ChannelError("a Kraus set needs at least one non-zero operator")
        dim = ops[0].shape[0]
        if any(m.shape != (dim, dim) for m in ops):
            raise ChannelError("Kraus operators must be square matrices of equal dimension")
        deviation = completeness_deviation(ops)
        if deviation > COMPLETENESS_TOL:
            raise ChannelError(f"Kraus operators are incomplete: deviation {deviation:.2e}")
        object.__setattr__(self, "operators", ops)

    @property
    def dim(self):
        return self.operators[0].shape[0]

    def apply(self, rho):
        return sum(m @ rho @ m.conj().T for m in self.operators)


def completeness_deviation(operators):
    dim = operators[0].shape[0]
    total = sum(m.conj().T @ m for m in operators)
    return float(np.max(np.abs(total - np.eye(dim))))


def _pauli_matrix(label):
    matrix = np.array([[1.0 + 0j]])
    for char in label:
        matrix = np.kron(matrix, GATES[char])
    return matrix


def kraus_set(channel):
    """
    Kraus operators whose induced map matches the closed-form action.

    Phase damping uses ``sqrt((1 +- lam)/2)`` times I and Z with
    ``lam = exp(-gamma t)``; Markovian depolarizing uses ``sqrt((1 + 3 lam)/4) I``
    and ``sqrt((1 - lam)/4) sigma``; amplitude damping uses the usual
    ``diag(1, sqrt(lam))`` and ``sqrt(1 - lam) |0><1|`` pair.
    """
    kind = channel.kind
    if kind in MIXTURE_KINDS:
        eps = channel.epsilon
        if kind == "bit_flip":
            ops = [math.sqrt(1 - eps) * GATES["I"], math.sqrt(eps) * GATES["X"]]
        elif kind == "phase_flip":
            ops = [math.sqrt(1 - eps) * GATES["I"], math.sqrt(eps) * GATES["Z"]]
        elif kind == "depolarizing_1q":
            ops = [math.sqrt(1 - eps) * GATES["I"]] + [math.sqrt(eps / 3) * s for s in SIGMA]
        else:
            labels = two_qubit_paulis()
            ops = [math.sqrt(1 - eps) * _pauli_matrix(labels[0])]
            ops += [math.sqrt(eps / 15) * _pauli_matrix(label) for label in labels[1:]]
        return KrausSet(tuple(ops))

    lam = math.exp(-channel.decay * channel.t)
    if kind == "phase_damping":
        ops = [math.sqrt((1 + lam) / 2) * GATES["I"], math.sqrt((1 - lam) / 2) * GATES["Z"]]
    elif kind == "depolarizing_markov":
        ops = [math.sqrt((1 + 3 * lam) / 4) * GATES["I"]] + [math.sqrt((1 - lam) / 4) * s for s in SIGMA]
    else:
        ops = [np.array([[1, 0], [0, math.sqrt(lam)]], dtype=complex),
               np.array([[0, math.sqrt(1 - lam)], [0, 0]], dtype=complex)]
    return KrausSet(tuple(ops))


# ==============================================================================
# --- CLOSED-FORM ACTION ---
# ==============================================================================

def apply_channel(rho, channel):
    """
    Exact closed-form action of ``channel`` on a density matrix.

    Args:
        rho (np.ndarray): 2x2 (or 4x4 for depolarizing_2q) density matrix.
        channel (NoiseChannel): the process.

    Returns:
        np.ndarray: the output density matrix.
    """
    rho = validate_density_matrix(rho)
    dim = 2 ** channel.arity
    if rho.shape != (dim, dim):
        raise DimensionError(f"{channel.kind} acts on {dim}x{dim} matrices, got {rho.shape}")
    kind = channel.kind

    if kind in MIXTURE_KINDS:
        eps = channel.epsilon
        if kind == "bit_flip":
            return (1 - eps) * rho + eps * GATES["X"] @ rho @ GATES["X"]
        if kind == "phase_flip":
            return (1 - eps) * rho + eps * GATES["Z"] @ rho @ GATES["Z"]
        if kind == "depolarizing_1q":
            return (1 - eps) * rho + (eps / 3) * sum(s @ rho @ s for s in SIGMA)
        twirl = sum(_pauli_matrix(label) @ rho @ _pauli_matrix(label) for label in two_qubit_paulis()[1:])
        return (1 - eps) * rho + (eps / 15) * twirl

    lam = math.exp(-channel.decay * channel.t)
    r00, r01, r10, r11 = rho[0, 0], rho[0, 1], rho[1, 0], rho[1, 1]
    if kind == "phase_damping":
        return np.array([[r00, lam * r01], [lam * r10, r11]], dtype=complex)
    if kind == "depolarizing_markov":
        return np.array([[(1 + lam * (r00 - r11)) / 2, lam * r01],
                         [lam * r10, (1 + lam * (r11 - r00)) / 2]], dtype=complex)
    half = math.sqrt(lam)
    return np.array([[r00 + (1 - lam) * r11, half * r01],
                     [half * r10, lam * r11]], dtype=complex)


def basis_density_matrices(qubits=1):
    """|0>, |1>, |+>, |+i> projectors; for two qubits all 16 tensor products."""
    kets = [np.array([1, 0]), np.array([0, 1]), np.array([1, 1]) / math.sqrt(2), np.array([1, 1j]) / math.sqrt(2)]
    singles = [np.outer(k, k.conj()).astype(complex) for k in kets]
    if qubits == 1:
        return singles
    return [np.kron(a, b) for a in singles for b in singles]


def kraus_deviation(channel):
    """Largest entry-wise gap between the Kraus map and the closed form over the basis states."""
    kraus = kraus_set(channel)
    return max(float(np.max(np.abs(kraus.apply(rho) - apply_channel(rho, channel))))
               for rho in basis_density_matrices(channel.arity))


# ==============================================================================
# --- MARKOVIAN GENERATORS ---
# ==============================================================================

@dataclass(frozen=True)
class GksMatrix:
    """3x3 GKS coefficients in the {sigma_x, sigma_y, sigma_z} basis; Hermitian and PSD."""
    values: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=complex)
        if values.shape != (3, 3):
            raise ChannelError(f"GKS matrix must be 3x3, got {values.shape}")
        if np.max(np.abs(values - values.conj().T)) > 1e-12:
            raise ChannelError("GKS matrix is not Hermitian")
        if np.min(np.linalg.eigvalsh(values)) < -1e-12:
            raise ChannelError("GKS matrix is not positive semi-definite")
        object.__setattr__(self, "values", values)


def gks_matrix(channel):
    if channel.kind not in TIMED_KINDS:
        raise ChannelError(f"no GKS matrix for {channel.kind}")
    rate = channel.decay
    if channel.kind == "phase_damping":
        values = np.diag([0, 0, rate / 2])
    elif channel.kind == "depolarizing_markov":
        values = np.eye(3) * rate / 4
    else:
        values = (rate / 4) * np.array([[1, -1j, 0], [1j, 1, 0], [0, 0, 0]])
    return GksMatrix(values)


def lindblad_generator(channel):
    """
    Superoperator ``L`` acting on row-major ``vec(rho)``:
    ``L rho = sum a_ab (F_a rho F_b^dagger - {F_b^dagger F_a, rho} / 2)`` with ``F = sigma``.

    With these jump operators the GKS matrices above generate exactly the
    closed-form actions; the halved normalisation ``sigma / sqrt(2)`` would
    halve every rate.
    """
    a = gks_matrix(channel).values
    eye = np.eye(2)
    generator = np.zeros((4, 4), dtype=complex)
    for i, f_a in enumerate(SIGMA):
        for j, f_b in enumerate(SIGMA):
            if a[i, j] == 0:
                continue
            f_b_dag = f_b.conj().T
            anti = f_b_dag @ f_a
            generator += a[i, j] * (np.kron(f_a, f_b_dag.T) - 0.5 * np.kron(anti, eye) - 0.5 * np.kron(eye, anti.T))
    return generator


def generator_deviation(channel):
    """Largest gap between ``exp(t L)`` and the closed form over the basis states."""
    propagator = expm(channel.t * lindblad_generator(channel))
    worst = 0.0
    for rho in basis_density_matrices():
        evolved = (propagator @ rho.reshape(-1)).reshape(2, 2)
        worst = max(worst, float(np.max(np.abs(evolved - apply_channel(rho, channel)))))
    logging.debug(f"{channel.kind}: exp(tL) deviates from the closed form by {worst:.2e}")
    return worst


def compose(channel, t1, t2):
    """
    Checks the semigroup law: runs ``E_t2`` then ``E_t1`` and compares with
    ``E_{t1+t2}``.

    Returns:
        float: largest entry-wise deviation over the basis states.
    """
    if channel.kind not in TIMED_KINDS:
        raise ChannelError(f"{channel.kind} is not time-parameterised")
    first, second, joint = channel.at_time(t2), channel.at_time(t1), channel.at_time(t1 + t2)
    worst = 0.0
    for rho in basis_density_matrices():
        chained = apply_channel(apply_channel(rho, first), second)
        worst = max(worst, float(np.max(np.abs(chained - apply_channel(rho, joint)))))
    return worst


def pauli_channel_weights(channel):
    """Probability of each single-qubit Pauli letter under a Pauli channel."""
    if channel.kind not in PAULI_KINDS:
        raise ChannelError(f"{channel.kind} is not a single-qubit Pauli channel")
    eps = channel.epsilon
    if channel.kind == "bit_flip":
        return {"I": 1 - eps, "X": eps, "Y": 0.0, "Z": 0.0}
    if channel.kind == "phase_flip":
        return {"I": 1 - eps, "X": 0.0, "Y": 0.0, "Z": eps}
    return {"I": 1 - eps, "X": eps / 3, "Y": eps / 3, "Z": eps / 3}


def pauli_equivalent(channel):
    """
    The single-qubit Pauli channel with the same action as ``channel``.

    Phase damping over ``t`` is a phase flip with ``eps = (1 - e^{-gamma t}) / 2``;
    the depolarizing process is depolarizing_1q with ``eps = 3 (1 - e^{-gamma_tilde t}) / 4``.
    Amplitude damping is not a Pauli mixture and is rejected.
    """
    if channel.kind in PAULI_KINDS:
        return channel
    if channel.kind == "phase_damping":
        return phase_flip((1 - math.exp(-channel.gamma * channel.t)) / 2)
    if channel.kind == "depolarizing_markov":
        return depolarizing_1q(3 * (1 - math.exp(-channel.gamma_tilde * channel.t)) / 4)
    raise ChannelError(f"{channel.kind} has no equivalent single-qubit Pauli channel")
