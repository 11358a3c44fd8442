import numpy as np
import pytest

from css_gf2 import hamming_matrix
from pauli_algebra import (
    PauliOperator, multiply, parse_pauli, paulis_up_to_weight, product_of, single_qubit, to_label, weight,
)
from qec_errors import CodeDefinitionError, DimensionError
from rng_streams import CounterStream
from stabilizer_codes import (
    BUILTIN_CODES, TRANSVERSAL_GATES, PairClass, StabilizerCode, Syndrome, builtin, classify_pair, distance,
    format_code_text, in_normalizer, in_stabilizer_group, is_logical_error, load_code, min_weight_representative,
    parse_code_text, reduced_weight, stabilizer_group, stabilizer_qecc_check, syndrome, transversal_gate_image,
    validate_code,
)

EXPECTED_SHAPES = {
    "bitflip3": (3, 1),
    "phaseflip3": (3, 1),
    "shor9": (9, 1),
    "steane7": (7, 1),
    "five_qubit": (5, 1),
}


def _replace_generator(code, index, generator):
    gens = list(code.generators)
    gens[index] = generator
    return StabilizerCode(code.name, code.n, code.k, gens, code.logical_x, code.logical_z)


class TestBuiltins:

    def test_every_builtin_is_valid(self, any_builtin):
        report = validate_code(any_builtin)
        assert report.ok, report.issues
        assert (any_builtin.n, any_builtin.k) == EXPECTED_SHAPES[any_builtin.name]
        assert any_builtin.num_generators == any_builtin.n - any_builtin.k

    def test_shor_generators(self, shor):
        labels = [to_label(g) for g in shor.generators]
        assert labels[:6] == ["ZZIIIIIII", "IZZIIIIII", "IIIZZIIII", "IIIIZZIII", "IIIIIIZZI", "IIIIIIIZZ"]
        assert all(weight(g) == 6 for g in shor.generators[6:])

    def test_five_qubit_cyclic(self):
        labels = [to_label(g) for g in builtin("five_qubit").generators]
        assert labels == ["XZZXI", "IXZZX", "XIXZZ", "ZXIXZ"]

    def test_steane_supports_follow_hamming_rows(self, steane):
        rows = hamming_matrix().bits
        for i, g in enumerate(steane.generators):
            bits = g.z_bits if i < 3 else g.x_bits
            assert bits == int("".join(str(b) for b in rows[i % 3]), 2)

    def test_unknown_builtin(self):
        with pytest.raises(CodeDefinitionError):
            builtin("toric")


class TestValidation:

    def test_anticommuting_generators(self):
        code = StabilizerCode("bad", 1, 0, [parse_pauli("X"), parse_pauli("Z")], [], [])
        report = validate_code(code)
        assert not report.ok
        assert any("anticommute" in issue for issue in report.issues)

    def test_duplicated_generator(self, steane):
        code = _replace_generator(steane, 1, steane.generators[0])
        report = validate_code(code)
        assert any("dependent" in issue for issue in report.issues)

    def test_non_hermitian_generator(self, bitflip):
        code = _replace_generator(bitflip, 0, PauliOperator(3, 0, 0b110, 1))
        assert any("Hermitian" in issue for issue in validate_code(code).issues)

    def test_logical_pairing(self, bitflip):
        code = StabilizerCode("bad", 3, 1, bitflip.generators, [parse_pauli("XXX")], [parse_pauli("ZZI")])
        assert any("logical_x[0] and logical_z[0] commute" in issue for issue in validate_code(code).issues)

    def test_wrong_size_operator(self, bitflip):
        code = StabilizerCode("bad", 3, 1, bitflip.generators, [parse_pauli("XX")], bitflip.logical_z)
        assert not validate_code(code).ok


class TestSyndrome:

    def test_bitflip_first_qubit(self, bitflip):
        assert syndrome(bitflip, parse_pauli("XII")).bits == (1, 0)

    def test_identity(self, any_builtin):
        assert not any(syndrome(any_builtin, PauliOperator.identity(any_builtin.n)).bits)

    @pytest.mark.parametrize("qubit", range(7))
    def test_steane_bit_flip_matches_hamming_column(self, steane, qubit):
        bits = syndrome(steane, single_qubit(7, qubit, "X")).bits
        assert bits[:3] == tuple(int(b) for b in hamming_matrix().bits[:, qubit])
        assert bits[3:] == (0, 0, 0)

    def test_size_mismatch(self, bitflip):
        with pytest.raises(DimensionError):
            syndrome(bitflip, parse_pauli("XX"))

    def test_integer_form(self):
        syn = Syndrome((1, 0, 1))
        assert syn.to_int() == 5
        assert Syndrome.from_int(5, 3) == syn
        assert str(syn) == "101"


class TestGroupMembership:

    def test_sign_matters(self, bitflip):
        minus = parse_pauli("-ZIZ")
        assert not in_stabilizer_group(bitflip, minus)
        assert in_stabilizer_group(bitflip, minus, check_phase=False)
        assert in_stabilizer_group(bitflip, parse_pauli("ZIZ"))

    def test_logical_error(self, bitflip):
        assert is_logical_error(bitflip, parse_pauli("ZII"))
        assert not is_logical_error(bitflip, parse_pauli("ZZI"))
        assert not in_normalizer(bitflip, parse_pauli("XII"))

    def test_group_size(self, steane):
        group = stabilizer_group(steane)
        assert len(group) == 64
        assert len({to_label(g) for g in group}) == 64

    def test_reduction_to_identity(self, shor):
        assert reduced_weight(shor, parse_pauli("ZZIIIIIII")) == 0

    def test_reduction_is_idempotent(self, steane):
        p = parse_pauli("IIIZZZI")
        once = min_weight_representative(steane, p)
        twice = min_weight_representative(steane, once)
        assert weight(twice) == weight(once) <= weight(p)
        assert to_label(once) == "IIIIIIZ"

    def test_logical_coset_keeps_weight_two(self, steane):
        assert reduced_weight(steane, parse_pauli("ZZZZIII")) == 2

    def test_two_qubit_z_error_stays_weight_two(self, steane):
        assert reduced_weight(steane, parse_pauli("IIIIIZZ")) == 2


class TestQeccConditions:

    def test_shor_weight_one_correctable(self, shor):
        report = stabilizer_qecc_check(shor, paulis_up_to_weight(9, 1))
        assert report.passes
        assert len(report.pairs) == 28 * 28

    def test_degenerate_pair(self, shor):
        product, cls = classify_pair(shor, parse_pauli("ZIIIIIIII"), parse_pauli("IZIIIIIII"))
        assert to_label(product) == "ZZIIIIIII"
        assert cls is PairClass.STABILIZER

    def test_phase_flip_not_correctable_by_bitflip_code(self, bitflip):
        report = stabilizer_qecc_check(bitflip, [PauliOperator.identity(3), parse_pauli("ZII")])
        assert not report.passes
        assert report.counts()["LOGICAL"] == 2

    @pytest.mark.parametrize("name", ["steane7", "five_qubit"])
    def test_weight_one_correctable(self, name):
        code = builtin(name)
        assert stabilizer_qecc_check(code, paulis_up_to_weight(code.n, 1)).passes


class TestDistance:

    @pytest.mark.parametrize("name, expected", [
        ("steane7", 3), ("five_qubit", 3), ("shor9", 3), ("bitflip3", 1), ("phaseflip3", 1),
    ])
    def test_distance(self, name, expected):
        code = builtin(name)
        assert distance(code, min(code.n, 3)) == expected

    def test_beyond_search_limit(self, steane):
        assert distance(steane, 2) is None

    def test_invalid_limit(self, steane):
        with pytest.raises(DimensionError):
            distance(steane, 8)


class TestCodeText:

    def test_round_trip(self, any_builtin):
        assert parse_code_text(format_code_text(any_builtin)) == any_builtin

    def test_comments_and_blank_lines(self):
        text = "# repetition\nn=3 k=1 name=rep\n\n[generators]\nZZI  # first\nIZZ\n[logical_x]\nXXX\n[logical_z]\nZII\n"
        code = parse_code_text(text)
        assert code.name == "rep"
        assert validate_code(code).ok

    @pytest.mark.parametrize("text", [
        "",
        "n=three k=1\n",
        "n=3 k=1\nZZI\n",
        "n=3 k=1\n[stabilizers]\nZZI\n",
        "n=3 k=1\n[generators]\nZZII\n",
    ])
    def test_malformed(self, text):
        with pytest.raises(CodeDefinitionError):
            parse_code_text(text)

    def test_load_from_file(self, tmp_path, steane):
        path = tmp_path / "steane.code"
        path.write_text(format_code_text(steane), encoding="utf-8")
        assert load_code(str(path)) == steane

    def test_load_unknown(self, tmp_path):
        with pytest.raises(CodeDefinitionError):
            load_code(str(tmp_path / "missing.code"))

    def test_builtin_names_win(self):
        assert load_code("shor9") == builtin("shor9")
        assert set(BUILTIN_CODES) == set(EXPECTED_SHAPES)


class TestTransversalGates:

    @pytest.mark.parametrize("gate", TRANSVERSAL_GATES)
    def test_claimed_image(self, steane, gate):
        image = transversal_gate_image(steane, gate)
        assert image.verified, (image.encoded_gate, image.leakage, image.mismatch)

    def test_bitwise_pi4_is_inverse_phase(self, steane):
        image = transversal_gate_image(steane, "bitwise_PI4")
        assert image.encoded_gate == "PI4_DAGGER"
        np.testing.assert_allclose(np.abs(image.logical_matrix), np.eye(2), atol=1e-10)

    def test_only_steane(self, shor):
        with pytest.raises(CodeDefinitionError):
            transversal_gate_image(shor, "bitwise_H")

    def test_unknown_gate(self, steane):
        with pytest.raises(CodeDefinitionError):
            transversal_gate_image(steane, "bitwise_T")


class TestSyndromeHomomorphism:

    def test_product_syndrome_is_xor(self, any_builtin):
        errors = list(paulis_up_to_weight(any_builtin.n, 1))
        for a in errors:
            for b in errors:
                expected = tuple(p ^ q for p, q in zip(syndrome(any_builtin, a).bits, syndrome(any_builtin, b).bits))
                assert syndrome(any_builtin, multiply(a, b)).bits == expected

    def test_group_elements_have_zero_syndrome(self, any_builtin):
        for element in stabilizer_group(any_builtin):
            assert not any(syndrome(any_builtin, element).bits)
            assert in_stabilizer_group(any_builtin, element, check_phase=False)

    def test_random_generator_products(self, any_builtin):
        stream = CounterStream(2024, 0)
        generators = any_builtin.generators
        for _ in range(50):
            chosen = [g for g, u in zip(generators, stream.uniforms(len(generators))) if u < 0.5]
            element = product_of(chosen, any_builtin.n)
            assert not any(syndrome(any_builtin, element).bits)
            assert in_stabilizer_group(any_builtin, element)

    def test_group_follows_generator_mask(self, steane):
        group = stabilizer_group(steane)
        assert group[0] == PauliOperator.identity(7)
        g0, g1 = steane.generators[0], steane.generators[1]
        assert (group[1].x_bits, group[1].z_bits) == (g0.x_bits, g0.z_bits)
        assert (group[3].x_bits, group[3].z_bits) == (g0.x_bits ^ g1.x_bits, g0.z_bits ^ g1.z_bits)
