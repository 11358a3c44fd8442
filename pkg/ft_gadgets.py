"""
Syndrome-extraction gadgets and single-fault Pauli-frame audits.

A gadget is a list of Clifford steps on data qubits ``0..n-1`` followed by
ancillas. Faults are tracked as a Pauli frame (signs ignored): each step
conjugates the frame, each measurement records whether the frame flips its
outcome and then clears the measured qubit.
"""
from dataclasses import dataclass, field
from functools import partial
import logging
from multiprocessing import Pool

import pandas as pd

from noise_channels import two_qubit_paulis
from pauli_algebra import PauliOperator, parse_pauli, to_label, weight
from qec_errors import GadgetError
from stabilizer_codes import min_weight_representative

# --- STEP OPCODES ---
PREP_0 = "PREP_0"
PREP_PLUS = "PREP_PLUS"
H = "H"
CNOT = "CNOT"
MEAS_Z = "MEAS_Z"
MEAS_X = "MEAS_X"
PREPS = (PREP_0, PREP_PLUS)
MEASUREMENTS = (MEAS_Z, MEAS_X)
OPCODES = PREPS + (H, CNOT) + MEASUREMENTS

INPUT_STEP = -1
SINGLE_QUBIT_FAULTS = ("X", "Y", "Z")
MAX_REPEAT_DRAWS = 100


# ==============================================================================
# --- DOMAIN TYPES ---
# ==============================================================================

@dataclass(frozen=True)
class Step:
    op: str
    qubits: tuple

    def __str__(self):
        return f"{self.op}({', '.join(str(q) for q in self.qubits)})"


@dataclass(frozen=True)
class CliffordGadget:
    """
    Syndrome-extraction circuit for one generator.

    ``syndrome_steps`` are the measurements whose XOR is the syndrome bit;
    ``verify_steps`` are measurements whose ideal outcome is 0 and whose flip
    rejects the run.
    """
    name: str
    n_data: int
    n_ancilla: int
    steps: tuple
    syndrome_steps: tuple
    verify_steps: tuple = ()
    generator: PauliOperator = None

    def __post_init__(self):
        first_touch, last_touch = {}, {}
        for index, step in enumerate(self.steps):
            if step.op not in OPCODES:
                raise GadgetError(f"step {index}: unknown opcode {step.op}")
            expected = 2 if step.op == CNOT else 1
            if len(step.qubits) != expected or len(set(step.qubits)) != expected:
                raise GadgetError(f"step {index}: {step.op} needs {expected} distinct qubits")
            for q in step.qubits:
                if not 0 <= q < self.total_qubits:
                    raise GadgetError(f"step {index}: qubit {q} out of range")
                first_touch.setdefault(q, index)
                last_touch[q] = index
        for index, step in enumerate(self.steps):
            q = step.qubits[0]
            if step.op in PREPS and (q < self.n_data or first_touch[q] != index):
                raise GadgetError(f"step {index}: {step} must be the first touch of an ancilla")
            if step.op in MEASUREMENTS and last_touch[q] != index:
                raise GadgetError(f"step {index}: {step} must be the final touch of its qubit")
        for index in self.syndrome_steps + self.verify_steps:
            if self.steps[index].op not in MEASUREMENTS:
                raise GadgetError(f"step {index} is not a measurement")

    @property
    def total_qubits(self):
        return self.n_data + self.n_ancilla

    @property
    def data_qubits(self):
        return tuple(range(self.n_data))

    @property
    def ancilla_qubits(self):
        return tuple(range(self.n_data, self.total_qubits))


@dataclass(frozen=True)
class FaultLocation:
    """Where a fault can strike: before (measurements) or after step ``step`` on ``qubits``."""
    index: int
    step: int
    qubits: tuple
    kind: str  # "gate", "idle" or "input"


@dataclass(frozen=True)
class Fault:
    location: FaultLocation
    pauli: PauliOperator   # acts on len(location.qubits) qubits


@dataclass(frozen=True)
class FaultOutcome:
    location: FaultLocation
    injected: PauliOperator
    residual_data_error: PauliOperator
    syndrome_bit_flipped: bool
    rejected: bool


# ==============================================================================
# --- PAULI FRAME ---
# ==============================================================================

class PauliFrame:
    """Sign-free X/Z bits per qubit; Clifford steps act by conjugation."""

    def __init__(self, total_qubits):
        self.x = [0] * total_qubits
        self.z = [0] * total_qubits

    def inject(self, qubits, pauli):
        for i, q in enumerate(qubits):
            self.x[q] ^= pauli.x_at(i)
            self.z[q] ^= pauli.z_at(i)

    def clear(self, q):
        self.x[q] = self.z[q] = 0

    def apply_h(self, q):
        self.x[q], self.z[q] = self.z[q], self.x[q]

    def apply_cnot(self, control, target):
        self.x[target] ^= self.x[control]
        self.z[control] ^= self.z[target]

    def apply(self, step):
        """Applies one step; returns the measurement flip bit for MEAS steps, else None."""
        q = step.qubits[0]
        if step.op in PREPS:
            self.clear(q)
        elif step.op == H:
            self.apply_h(q)
        elif step.op == CNOT:
            self.apply_cnot(*step.qubits)
        else:
            flipped = self.x[q] if step.op == MEAS_Z else self.z[q]
            self.clear(q)
            return flipped
        return None

    def restricted(self, qubits):
        x_bits = z_bits = 0
        for q in qubits:
            x_bits = (x_bits << 1) | self.x[q]
            z_bits = (z_bits << 1) | self.z[q]
        return PauliOperator(len(qubits), x_bits, z_bits, (x_bits & z_bits).bit_count())


# ==============================================================================
# --- GADGET CONSTRUCTION ---
# ==============================================================================

def _generator_type(code, generator_index):
    if not 0 <= generator_index < len(code.generators):
        raise GadgetError(f"'{code.name}' has no generator {generator_index}")
    g = code.generators[generator_index]
    if g.x_bits == 0 and g.z_bits:
        return g, "Z"
    if g.z_bits == 0 and g.x_bits:
        return g, "X"
    raise GadgetError(f"generator {to_label(g)} is neither Z-type nor X-type")


def bare_syndrome_gadget(code, generator_index):
    """
    One ancilla collects the parity of the generator's support.

    Z-type generators: ancilla in |0>, CNOT from each support qubit onto the
    ancilla in qubit-index order, MEAS_Z. X-type generators reverse the CNOT
    direction with the ancilla in |+> and end with MEAS_X, so the ancilla
    picks up phase kickback.
    """
    g, kind = _generator_type(code, generator_index)
    a = code.n
    support = g.support
    if kind == "Z":
        steps = [Step(PREP_0, (a,))] + [Step(CNOT, (q, a)) for q in support] + [Step(MEAS_Z, (a,))]
    else:
        steps = [Step(PREP_PLUS, (a,))] + [Step(CNOT, (a, q)) for q in support] + [Step(MEAS_X, (a,))]
    return CliffordGadget(f"bare:{code.name}:{generator_index}", code.n, 1, tuple(steps),
                          syndrome_steps=(len(steps) - 1,), generator=g)


def cat_syndrome_gadget(code, generator_index):
    """
    Shor-style extraction with a verified cat-state ancilla.

    For a weight-w generator, ancillas ``a_0..a_{w-1}`` are prepared as
    ``|0...0> + |1...1>`` by H on ``a_0`` and a CNOT chain. A verification
    qubit collects ``a_0 XOR a_{w-1}``; a 1 rejects the run. Each ancilla then
    touches exactly one data qubit and is measured; the syndrome bit is the
    parity of the ancilla outcomes. For Z-type generators the ancillas are
    rotated into the even-parity superposition by H before the data CNOTs.
    """
    g, kind = _generator_type(code, generator_index)
    support = g.support
    w = len(support)
    ancillas = list(range(code.n, code.n + w))
    steps = [Step(PREP_0, (a,)) for a in ancillas]
    verify_steps = ()
    steps.append(Step(H, (ancillas[0],)))
    steps += [Step(CNOT, (ancillas[j], ancillas[j + 1])) for j in range(w - 1)]
    n_ancilla = w
    if w > 1:
        v = code.n + w
        n_ancilla += 1
        steps += [Step(PREP_0, (v,)), Step(CNOT, (ancillas[0], v)), Step(CNOT, (ancillas[-1], v)),
                  Step(MEAS_Z, (v,))]
        verify_steps = (len(steps) - 1,)

    if kind == "Z":
        steps += [Step(H, (a,)) for a in ancillas]
        steps += [Step(CNOT, (q, a)) for q, a in zip(support, ancillas)]
        measure = MEAS_Z
    else:
        steps += [Step(CNOT, (a, q)) for q, a in zip(support, ancillas)]
        measure = MEAS_X
    first_meas = len(steps)
    steps += [Step(measure, (a,)) for a in ancillas]
    return CliffordGadget(f"cat:{code.name}:{generator_index}", code.n, n_ancilla, tuple(steps),
                          syndrome_steps=tuple(range(first_meas, len(steps))),
                          verify_steps=verify_steps, generator=g)


GADGET_STYLES = {"bare": bare_syndrome_gadget, "cat": cat_syndrome_gadget}


# ==============================================================================
# --- FAULT LOCATIONS AND PROPAGATION ---
# ==============================================================================

def fault_locations(gadget, include_input=False):
    """
    Every step is a location on its own qubits, after the step (before it for
    measurements). Each data qubit the step leaves idle is a further location.
    ``include_input`` adds one location per data qubit before step 0.
    """
    locations = []
    if include_input:
        for q in gadget.data_qubits:
            locations.append(FaultLocation(len(locations), INPUT_STEP, (q,), "input"))
    for s, step in enumerate(gadget.steps):
        locations.append(FaultLocation(len(locations), s, step.qubits, "gate"))
        for q in gadget.data_qubits:
            if q not in step.qubits:
                locations.append(FaultLocation(len(locations), s, (q,), "idle"))
    return locations


def faults_at(location):
    labels = two_qubit_paulis()[1:] if len(location.qubits) == 2 else SINGLE_QUBIT_FAULTS
    return [Fault(location, parse_pauli(label)) for label in labels]


def propagate(gadget, fault=None, input_error=None):
    """
    Pushes a fault (and an optional data input error) through the gadget.

    Later steps are ideal. A gate fault lands after its step, or before it when
    the step is a measurement; an idle fault lands after the step.

    Args:
        gadget (CliffordGadget): the circuit.
        fault (Fault | None): the injected fault; None for a fault-free run.
        input_error (PauliOperator | None): error on the data block before step 0.

    Returns:
        FaultOutcome: residual data error, syndrome flip and rejection flag.
    """
    frame = PauliFrame(gadget.total_qubits)
    if input_error is not None:
        if input_error.n != gadget.n_data:
            raise GadgetError(f"input error acts on {input_error.n} qubits, gadget has {gadget.n_data} data qubits")
        frame.inject(gadget.data_qubits, input_error)

    location = fault.location if fault is not None else None
    if location is not None:
        if not -1 <= location.step < len(gadget.steps) or \
                any(not 0 <= q < gadget.total_qubits for q in location.qubits):
            raise GadgetError(f"invalid fault location {location}")
        if fault.pauli.n != len(location.qubits):
            raise GadgetError(f"fault {to_label(fault.pauli)} does not match location qubits {location.qubits}")
        if location.kind == "input":
            frame.inject(location.qubits, fault.pauli)

    flips = {}
    for s, step in enumerate(gadget.steps):
        at_step = location is not None and location.step == s
        measuring = step.op in MEASUREMENTS
        if at_step and location.kind == "gate" and measuring:
            frame.inject(location.qubits, fault.pauli)
        flip = frame.apply(step)
        if flip is not None:
            flips[s] = flip
        if at_step and not (location.kind == "gate" and measuring):
            frame.inject(location.qubits, fault.pauli)

    syndrome_flip = sum(flips[s] for s in gadget.syndrome_steps) % 2 == 1
    rejected = any(flips[s] for s in gadget.verify_steps)
    injected = fault.pauli if fault is not None else PauliOperator.identity(1)
    return FaultOutcome(location, injected, frame.restricted(gadget.data_qubits), syndrome_flip, rejected)


def gadget_syndrome_bit(gadget, input_error):
    """Fault-free syndrome bit the gadget reports for a data error."""
    return int(propagate(gadget, None, input_error).syndrome_bit_flipped)


# ==============================================================================
# --- AUDIT ---
# ==============================================================================

@dataclass
class LocationVerdict:
    location: FaultLocation
    step_text: str
    worst_fault: str
    residual: str
    reduced_residual: str
    reduced_weight: int
    rejected_faults: int


@dataclass
class AuditReport:
    gadget_name: str
    verdicts: list = field(default_factory=list)

    @property
    def max_reduced_weight(self):
        return max((v.reduced_weight for v in self.verdicts), default=0)

    @property
    def is_fault_tolerant(self):
        return self.max_reduced_weight <= 1

    @property
    def verdict(self):
        return "FT" if self.is_fault_tolerant else "NOT-FT"

    def to_frame(self):
        return pd.DataFrame([{
            "location": v.location.index,
            "step": v.location.step,
            "kind": v.location.kind,
            "op": v.step_text,
            "worst_fault": v.worst_fault,
            "residual": v.residual,
            "reduced_residual": v.reduced_residual,
            "reduced_weight": v.reduced_weight,
            "rejected_faults": v.rejected_faults,
        } for v in self.verdicts])

    def to_dict(self):
        return {
            "gadget": self.gadget_name,
            "max_reduced_weight": self.max_reduced_weight,
            "verdict": self.verdict,
            "locations": self.to_frame().to_dict(orient="records"),
        }


def _audit_location(gadget, code, location):
    worst = None
    rejected = 0
    for fault in faults_at(location):
        outcome = propagate(gadget, fault)
        if outcome.rejected:
            rejected += 1
            continue
        reduced = min_weight_representative(code, outcome.residual_data_error)
        candidate = (weight(reduced), fault, outcome, reduced)
        if worst is None or candidate[0] > worst[0]:
            worst = candidate
    step_text = str(gadget.steps[location.step]) if location.step >= 0 else "input"
    if worst is None:
        identity = to_label(PauliOperator.identity(gadget.n_data))
        return LocationVerdict(location, step_text, "-", identity, identity, 0, rejected)
    w, fault, outcome, reduced = worst
    return LocationVerdict(location, step_text, to_label(fault.pauli), to_label(outcome.residual_data_error),
                           to_label(reduced), w, rejected)


def ft_audit(gadget, code, locations=None, workers=1):
    """
    Exhaustive single-fault audit.

    Every fault ({X, Y, Z}, or the 15 two-qubit Paulis on a CNOT) at every
    location is propagated; the data residual is reduced modulo the stabilizer
    group and the worst accepted run per location is kept.

    Args:
        gadget (CliffordGadget): circuit built for ``code``.
        code (StabilizerCode): the code whose stabilizers reduce residuals.
        locations (list[FaultLocation] | None): subset to audit; defaults to all gadget locations.
        workers (int): processes for the location sweep; results are location-ordered either way.

    Returns:
        AuditReport: per-location verdicts and the FT flag (max reduced weight <= 1).
    """
    if gadget.n_data != code.n:
        raise GadgetError(f"gadget has {gadget.n_data} data qubits, '{code.name}' has {code.n}")
    if locations is None:
        locations = fault_locations(gadget)
    task = partial(_audit_location, gadget, code)
    if workers > 1 and len(locations) > 1:
        with Pool(processes=workers) as pool:
            verdicts = pool.map(task, locations)
    else:
        verdicts = [task(location) for location in locations]
    report = AuditReport(gadget.name, verdicts)
    logging.info(f"Audit of {gadget.name}: {len(locations)} locations, "
                 f"max reduced weight {report.max_reduced_weight} -> {report.verdict}")
    return report


# ==============================================================================
# --- REPEAT-TWICE ACCEPTANCE ---
# ==============================================================================

@dataclass(frozen=True)
class RepeatResult:
    syndrome: tuple
    attempts: int
    cap_hit: bool


def repeat_twice(syndrome_sampler, q, rng_stream, max_draws=MAX_REPEAT_DRAWS):
    """
    Measures the syndrome in pairs of rounds and accepts the first pair that agrees.

    Each round calls ``syndrome_sampler()`` for the true syndrome and flips every
    bit independently with probability ``q``. A disagreeing pair is discarded
    as a whole. After ``max_draws`` rounds the last round is returned with
    ``cap_hit`` set.

    Returns:
        RepeatResult: accepted syndrome and the number of rounds used.
    """
    if not 0.0 <= q <= 1.0:
        raise GadgetError(f"flip probability q must lie in [0, 1], got {q}")
    draws = 0
    last = ()
    while draws + 2 <= max_draws:
        rounds = []
        for _ in range(2):
            true_syndrome = tuple(syndrome_sampler())
            flips = rng_stream.uniforms(len(true_syndrome)) < q
            rounds.append(tuple(int(b) ^ int(f) for b, f in zip(true_syndrome, flips)))
        draws += 2
        last = rounds[1]
        if rounds[0] == rounds[1]:
            return RepeatResult(rounds[0], draws, False)
    logging.warning(f"repeat_twice gave up after {draws} rounds (q={q})")
    return RepeatResult(last, draws, True)


def repeat_twice_failure_probability(q, length):
    """Exact probability that an accepted pair differs from the true syndrome (no cap)."""
    agree_correct = ((1 - q) ** 2) ** length
    agree = ((1 - q) ** 2 + q ** 2) ** length
    return (agree - agree_correct) / agree


def expected_repeat_draws(q, length):
    """Mean number of rounds until acceptance (no cap): two per pair, geometric in pairs."""
    return 2.0 / (((1 - q) ** 2 + q ** 2) ** length)
