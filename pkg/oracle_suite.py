"""
The verification suite behind ``oracle verify``.

Each check compares the fast symplectic machinery (or a closed form) with a
dense brute-force computation and reports the worst residual against a
tolerance. Checks are registered by name so they can be run selectively.
"""
from dataclasses import dataclass
import logging

import numpy as np

import dense_oracle
import noise_channels
from css_gf2 import hamming_matrix
from pauli_algebra import from_symplectic, multiply, paulis_up_to_weight
from qec_errors import QecError
from rng_streams import CounterStream
from stabilizer_codes import TRANSVERSAL_GATES, builtin, syndrome, transversal_gate_image

ORACLE_SEED = 20240607
TIGHT_TOL = 1e-12
STATE_TOL = 1e-10
PRINTED_CODEWORDS = ("bitflip3", "phaseflip3", "shor9", "steane7")


@dataclass
class CheckResult:
    name: str
    residual: float
    tolerance: float
    detail: str = ""

    @property
    def passed(self):
        return bool(np.isfinite(self.residual)) and self.residual < self.tolerance

    def to_dict(self):
        residual = float(self.residual) if np.isfinite(self.residual) else None
        return {"name": self.name, "residual": residual, "tolerance": self.tolerance,
                "passed": self.passed, "detail": self.detail}


@dataclass
class OracleReport:
    results: list

    @property
    def passed(self):
        return all(r.passed for r in self.results)

    @property
    def failures(self):
        return [r for r in self.results if not r.passed]

    def to_dict(self):
        return {"passed": self.passed, "checks": [r.to_dict() for r in self.results]}


def _codewords(code):
    if code.name in PRINTED_CODEWORDS:
        return [dense_oracle.encode_codeword(code.name, 1, 0), dense_oracle.encode_codeword(code.name, 0, 1)]
    return list(dense_oracle.codewords_from_stabilizers(code))


# ==============================================================================
# --- CODE CHECKS ---
# ==============================================================================

def _qecc_check(name, codes):
    code = codes[name]
    codewords = _codewords(code)
    errors = list(paulis_up_to_weight(code.n, 1))
    result = dense_oracle.qecc_condition_matrix(codewords, errors)
    fixed = dense_oracle.stabilizers_fix_codewords(code, codewords)
    return CheckResult(f"qecc_{name}", max(result.violation, fixed), STATE_TOL,
                       f"{len(errors)} errors; structure deviation {result.violation:.2e}, "
                       f"generator residual {fixed:.2e}")


def check_qecc_shor9(codes):
    return _qecc_check("shor9", codes)


def check_qecc_steane7(codes):
    return _qecc_check("steane7", codes)


def check_qecc_five_qubit(codes):
    return _qecc_check("five_qubit", codes)


def check_stabilizers_fix_codewords(codes):
    worst, detail = 0.0, []
    for name, code in codes.items():
        residual = dense_oracle.stabilizers_fix_codewords(code, _codewords(code))
        worst = max(worst, residual)
        detail.append(f"{name}={residual:.1e}")
    return CheckResult("stabilizers_fix_codewords", worst, STATE_TOL, ", ".join(detail))


def check_codeword_orthonormality(codes):
    worst = 0.0
    for name in PRINTED_CODEWORDS:
        zero, one = _codewords(codes[name])
        worst = max(worst, abs(zero.inner(one)), abs(abs(zero.inner(zero)) - 1))
    return CheckResult("codeword_orthonormality", worst, TIGHT_TOL)


def check_steane_hadamard(codes):
    zero, one = _codewords(codes["steane7"])
    plus = dense_oracle.superpose([zero, one], [1 / np.sqrt(2), 1 / np.sqrt(2)])
    minus = dense_oracle.superpose([zero, one], [1 / np.sqrt(2), -1 / np.sqrt(2)])
    residual = max(dense_oracle.hadamard_all(zero).distance(plus),
                   dense_oracle.hadamard_all(one).distance(minus))
    return CheckResult("steane_hadamard", residual, STATE_TOL, "H^7 |0> and H^7 |1> against |+> and |->")


def check_hadamard_involution(codes):
    worst = 0.0
    for name in ("shor9", "steane7"):
        for state in _codewords(codes[name]):
            worst = max(worst, dense_oracle.hadamard_all(dense_oracle.hadamard_all(state)).distance(state))
    return CheckResult("hadamard_involution", worst, TIGHT_TOL)


def check_hamming_syndromes(codes):
    code = codes["steane7"]
    h = hamming_matrix()
    mismatches, seen = 0, set()
    for i in range(code.n):
        x_error = from_symplectic(np.eye(2 * code.n, dtype=np.uint8)[i])
        bits = syndrome(code, x_error).bits[:3]
        seen.add(bits)
        if bits != tuple(int(b) for b in h.bits[:, i]):
            mismatches += 1
    distinct_gap = code.n - len(seen)
    return CheckResult("hamming_syndromes", float(mismatches + distinct_gap), 0.5,
                       f"{mismatches} columns differ, {len(seen)} distinct syndromes")


def check_transversal_gates(codes):
    worst, detail = 0.0, []
    for gate in TRANSVERSAL_GATES:
        image = transversal_gate_image(codes["steane7"], gate)
        residual = max(image.leakage, image.mismatch) if image.encoded_gate == image.claimed else np.inf
        worst = max(worst, residual)
        detail.append(f"{gate}->{image.encoded_gate}")
    return CheckResult("transversal_gates", worst, STATE_TOL, ", ".join(detail))


def check_pauli_dense_product(codes):
    stream = CounterStream(ORACLE_SEED, 0)
    worst = 0.0
    for _ in range(50):
        bits = (stream.uniforms(12) < 0.5).astype(np.uint8)
        phases = (stream.uniforms(2) * 4).astype(int)
        a = from_symplectic(bits[:6], int(phases[0]))
        b = from_symplectic(bits[6:], int(phases[1]))
        dense_ab = dense_oracle.pauli_to_dense(multiply(a, b))
        product = dense_oracle.pauli_to_dense(a) @ dense_oracle.pauli_to_dense(b)
        worst = max(worst, float(np.max(np.abs(dense_ab - product))))
    return CheckResult("pauli_dense_product", worst, TIGHT_TOL, "50 random 3-qubit pairs")


# ==============================================================================
# --- CHANNEL CHECKS ---
# ==============================================================================

def _sample_channels():
    return [
        noise_channels.bit_flip(0.1), noise_channels.phase_flip(0.2), noise_channels.depolarizing_1q(0.3),
        noise_channels.depolarizing_2q(0.15), noise_channels.phase_damping(0.7, 1.3),
        noise_channels.depolarizing_markov(0.4, 2.0), noise_channels.amplitude_damping(1.1, 0.6),
    ]


def check_kraus_completeness(codes):
    worst = max(noise_channels.completeness_deviation(noise_channels.kraus_set(c).operators)
                for c in _sample_channels())
    return CheckResult("kraus_completeness", worst, TIGHT_TOL)


def check_kraus_matches_closed_form(codes):
    worst = max(noise_channels.kraus_deviation(c) for c in _sample_channels())
    return CheckResult("kraus_matches_closed_form", worst, TIGHT_TOL)


def check_semigroup(codes):
    stream = CounterStream(ORACLE_SEED, 1)
    worst = 0.0
    for kind in noise_channels.TIMED_KINDS:
        for _ in range(100):
            rate, t1, t2 = stream.uniforms(3) * np.array([3.0, 2.0, 2.0])
            channel = noise_channels.NoiseChannel(kind, t=0.0, **{noise_channels.DECAY_FIELD[kind]: float(rate)})
            worst = max(worst, noise_channels.compose(channel, float(t1), float(t2)))
    return CheckResult("semigroup", worst, TIGHT_TOL, "100 random (rate, t1, t2) per damping kind")


def check_gks_matrices(codes):
    expected = {
        "phase_damping": np.diag([0, 0, 1.0]),
        "depolarizing_markov": np.eye(3),
        "amplitude_damping": np.array([[1, -1j, 0], [1j, 1, 0], [0, 0, 0]]),
    }
    rates = {"phase_damping": 2.0, "depolarizing_markov": 4.0, "amplitude_damping": 4.0}
    worst = 0.0
    for kind, matrix in expected.items():
        channel = noise_channels.NoiseChannel(kind, t=0.8, **{noise_channels.DECAY_FIELD[kind]: rates[kind]})
        worst = max(worst, float(np.max(np.abs(noise_channels.gks_matrix(channel).values - matrix))))
        worst = max(worst, noise_channels.generator_deviation(channel))
    return CheckResult("gks_matrices", worst, 1e-10, "exact matrices and exp(tL) against the closed forms")


def check_error_discretisation(codes):
    worst = 0.0
    for eps in (0.01, 0.1):
        one = dense_oracle.error_branch_probabilities(eps, 1)
        worst = max(worst, abs(one[0] - (1 - eps)), abs(one[1] - eps))
        three = dense_oracle.error_branch_probabilities(eps, 3)
        worst = max(worst, abs(three[0] - (1 - eps) ** 3),
                    abs(three[2] + three[3] - (3 * eps ** 2 * (1 - eps) + eps ** 3)))
        if three[0] < 1 - 3 * eps or three[2] + three[3] > 3 * eps ** 2:
            worst = np.inf
    return CheckResult("error_discretisation", worst, TIGHT_TOL)


# ==============================================================================
# --- COLLECTIVE-NOISE CHECKS ---
# ==============================================================================

def check_dfs_singlet(codes):
    results = dense_oracle.dfs_check([dense_oracle.SINGLET], 2)
    worst = max(max(r.residuals) + abs(r.eigenvalue) for r in results.values())
    return CheckResult("dfs_singlet", worst, STATE_TOL)


def check_dfs_four_qubit(codes):
    results = dense_oracle.dfs_check(list(dense_oracle.dfs4_codewords()), 4)
    worst = max(max(r.residuals) + abs(r.eigenvalue) for r in results.values())
    return CheckResult("dfs_four_qubit", worst, STATE_TOL, "both codewords, all three axes")


def check_dfs_three_qubit_subsystem(codes):
    worst = 0.0
    for pair in dense_oracle.dfs3_subsystem().values():
        worst = max(worst, max(dense_oracle.subsystem_invariance(pair, 3).values()))
    return CheckResult("dfs_three_qubit_subsystem", worst, STATE_TOL)


CHECKS = {
    "qecc_shor9": check_qecc_shor9,
    "qecc_steane7": check_qecc_steane7,
    "qecc_five_qubit": check_qecc_five_qubit,
    "stabilizers_fix_codewords": check_stabilizers_fix_codewords,
    "codeword_orthonormality": check_codeword_orthonormality,
    "steane_hadamard": check_steane_hadamard,
    "hadamard_involution": check_hadamard_involution,
    "hamming_syndromes": check_hamming_syndromes,
    "transversal_gates": check_transversal_gates,
    "pauli_dense_product": check_pauli_dense_product,
    "kraus_completeness": check_kraus_completeness,
    "kraus_matches_closed_form": check_kraus_matches_closed_form,
    "semigroup": check_semigroup,
    "gks_matrices": check_gks_matrices,
    "error_discretisation": check_error_discretisation,
    "dfs_singlet": check_dfs_singlet,
    "dfs_four_qubit": check_dfs_four_qubit,
    "dfs_three_qubit_subsystem": check_dfs_three_qubit_subsystem,
}


def run_oracle_suite(only=None, codes=None):
    """
    Runs the named checks (all of them when ``only`` is None; none for an empty list).

    Args:
        only (list[str] | None): check names to run.
        codes (dict | None): replacement codes by built-in name, e.g. a deliberately broken shor9.

    Returns:
        OracleReport: one CheckResult per check, in registry order.
    """
    selected = list(CHECKS) if only is None else list(only)
    unknown = [name for name in selected if name not in CHECKS]
    if unknown:
        raise QecError(f"unknown oracle checks: {', '.join(unknown)}")
    code_set = {name: builtin(name) for name in ("bitflip3", "phaseflip3", "shor9", "steane7", "five_qubit")}
    code_set.update(codes or {})
    results = []
    for name in CHECKS:
        if name not in selected:
            continue
        try:
            result = CHECKS[name](code_set)
        except QecError as e:
            result = CheckResult(name, np.inf, 0.0, f"raised {type(e).__name__}: {e}")
        if not result.passed:
            logging.error(f"Oracle check {name} failed: residual {result.residual:.3e} ({result.detail})")
        results.append(result)
    logging.info(f"Oracle suite: {sum(r.passed for r in results)}/{len(results)} checks passed")
    return OracleReport(results)
