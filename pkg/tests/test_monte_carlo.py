import math

import pytest

from experiment_config import ExperimentConfig
from monte_carlo import (
    BLOCK_SIZE, build_decoder, concat_recursion, correct_error, exact_logical_rate, logical_error_rate, overhead,
    quadratic_map, repetition_map, run_trial, simulate_concatenated_repetition, sweep, threshold_scan,
)
from noise_channels import bit_flip, depolarizing_1q
from pauli_algebra import PauliOperator, parse_pauli, paulis_of_weight, to_label
from qec_errors import EnumerationLimitError, QecError, ThresholdError
from rng_streams import CounterStream
from stabilizer_codes import Syndrome, builtin


class TestDecoder:

    def test_bitflip_table(self, bitflip):
        decoder = build_decoder(bitflip)
        assert to_label(decoder.correction(Syndrome((1, 0)))) == "XII"
        assert to_label(decoder.correction(Syndrome((0, 1)))) == "IIX"
        assert to_label(decoder.correction(Syndrome((0, 0)))) == "III"
        assert not decoder.unreachable

    def test_every_steane_syndrome_reached(self, steane):
        decoder = build_decoder(steane)
        assert len(decoder.table) == 64
        assert not decoder.unreachable


class TestCorrection:

    def test_two_flips_defeat_bitflip_code(self, bitflip):
        result = correct_error(bitflip, build_decoder(bitflip), parse_pauli("XXI"))
        assert to_label(result.correction) == "IIX"
        assert result.logical_failure

    @pytest.mark.parametrize("name, count", [("shor9", 27), ("steane7", 21), ("five_qubit", 15)])
    def test_single_qubit_errors_corrected(self, name, count):
        code = builtin(name)
        decoder = build_decoder(code)
        errors = list(paulis_of_weight(code.n, 1))
        assert len(errors) == count
        assert not any(correct_error(code, decoder, e).logical_failure for e in errors)

    def test_identity_is_trivial(self, steane):
        result = correct_error(steane, build_decoder(steane), PauliOperator.identity(7))
        assert not result.logical_failure

    def test_single_trial_is_reproducible(self, steane, seed):
        decoder = build_decoder(steane)
        a = run_trial(steane, decoder, depolarizing_1q(0.2), CounterStream(seed, 5))
        b = run_trial(steane, decoder, depolarizing_1q(0.2), CounterStream(seed, 5))
        assert a == b


class TestExactRate:

    @pytest.mark.parametrize("eps", [0.01, 0.05, 0.1, 0.3, 0.49])
    def test_bitflip_closed_form(self, bitflip, eps):
        expected = 3 * eps ** 2 * (1 - eps) + eps ** 3
        assert exact_logical_rate(bitflip, bit_flip(eps)) == pytest.approx(expected, abs=1e-12)

    @pytest.mark.parametrize("eps", [0.001, 0.005, 0.01, 1 / 36])
    def test_shor_bounded_by_pair_count(self, shor, eps):
        assert exact_logical_rate(shor, depolarizing_1q(eps)) <= 36 * eps ** 2

    def test_noiseless(self, steane):
        assert exact_logical_rate(steane, depolarizing_1q(0.0)) == 0.0

    def test_size_limit(self):
        code = builtin("shor9")
        wide = type(code)("wide", 10, 1, [], [], [])
        with pytest.raises(EnumerationLimitError):
            exact_logical_rate(wide, depolarizing_1q(0.1))


class TestSampledRate:

    def test_bitflip_within_four_sigma(self, bitflip, seed):
        trials = 20_000
        point = logical_error_rate(bitflip, bit_flip(0.1), trials, seed)
        expected = repetition_map(0.1)
        sigma = math.sqrt(expected * (1 - expected) / trials)
        assert abs(point.estimate - expected) < 4 * sigma
        assert point.stderr == pytest.approx(math.sqrt(point.estimate * (1 - point.estimate) / trials))

    @pytest.mark.slow
    def test_bitflip_million_trials(self, bitflip):
        trials = 1_000_000
        point = logical_error_rate(bitflip, bit_flip(0.1), trials, 20240607, workers=4)
        assert abs(point.estimate - 0.028) < 3 * math.sqrt(0.028 * 0.972 / trials)

    @pytest.mark.parametrize("name, eps", [("steane7", 0.01), ("steane7", 0.05), ("five_qubit", 0.05)])
    def test_agrees_with_enumeration(self, name, eps, seed):
        code, trials = builtin(name), 50_000
        expected = exact_logical_rate(code, depolarizing_1q(eps))
        point = logical_error_rate(code, depolarizing_1q(eps), trials, seed)
        assert abs(point.estimate - expected) < 4 * math.sqrt(expected * (1 - expected) / trials)

    @pytest.mark.slow
    def test_steane_million_trials(self, steane):
        trials = 1_000_000
        expected = exact_logical_rate(steane, depolarizing_1q(0.01))
        point = logical_error_rate(steane, depolarizing_1q(0.01), trials, 20240607, workers=4)
        assert abs(point.estimate - expected) < 3 * math.sqrt(expected * (1 - expected) / trials)

    def test_noiseless(self, steane, seed):
        assert logical_error_rate(steane, depolarizing_1q(0.0), 5000, seed).failures == 0

    def test_workers_do_not_change_counts(self, steane, seed):
        trials = 2 * BLOCK_SIZE + 17
        one = logical_error_rate(steane, depolarizing_1q(0.05), trials, seed, workers=1)
        two = logical_error_rate(steane, depolarizing_1q(0.05), trials, seed, workers=2)
        assert one == two

    def test_trials_must_be_positive(self, steane, seed):
        with pytest.raises(QecError):
            logical_error_rate(steane, depolarizing_1q(0.1), 0, seed)

    def test_noisy_syndrome_costs_accuracy(self, seed):
        code = builtin("five_qubit")
        clean = logical_error_rate(code, depolarizing_1q(0.01), 5000, seed)
        noisy = logical_error_rate(code, depolarizing_1q(0.01), 5000, seed, syndrome_flip_q=0.2)
        assert noisy.failures >= clean.failures


class TestConcatenation:

    def test_below_threshold_decreases(self):
        seq = concat_recursion(0.4, 4).sequence
        assert all(b < a for a, b in zip(seq, seq[1:]))

    def test_fixed_point_is_stationary(self):
        assert concat_recursion(0.5, 3).sequence == [0.5] * 4

    def test_quadratic_closed_form(self):
        result = concat_recursion(0.005, 3, kind="quadratic", c=100)
        assert result.sequence[3] == pytest.approx(0.5 ** 8 / 100, rel=1e-12)
        assert result.max_closed_form_gap < 1e-12

    def test_repetition_has_no_closed_form(self):
        assert concat_recursion(0.1, 2).max_closed_form_gap is None

    def test_invalid_inputs(self):
        with pytest.raises(QecError):
            concat_recursion(1.5, 2)
        with pytest.raises(QecError):
            concat_recursion(0.1, 2, kind="cubic")
        with pytest.raises(QecError):
            quadratic_map(0)

    @pytest.mark.parametrize("eps", [0.1, 0.3, 0.45, 0.55])
    @pytest.mark.parametrize("levels", [1, 2])
    def test_simulation_matches_recursion(self, levels, eps, seed):
        trials = 20_000
        expected = concat_recursion(eps, levels).sequence[-1]
        point = simulate_concatenated_repetition(levels, eps, trials, seed)
        assert abs(point.estimate - expected) < 4 * math.sqrt(expected * (1 - expected) / trials)

    @pytest.mark.slow
    @pytest.mark.parametrize("eps", [0.1, 0.3, 0.45, 0.55])
    def test_two_levels_million_trials(self, eps):
        trials = 1_000_000
        expected = concat_recursion(eps, 2).sequence[-1]
        point = simulate_concatenated_repetition(2, eps, trials, 20240607, workers=4)
        assert abs(point.estimate - expected) < 3 * math.sqrt(expected * (1 - expected) / trials)

    def test_simulation_noiseless(self, seed):
        assert simulate_concatenated_repetition(2, 0.0, 1000, seed).failures == 0

    def test_simulation_level_limit(self, seed):
        with pytest.raises(EnumerationLimitError):
            simulate_concatenated_repetition(5, 0.1, 10, seed)


class TestOverhead:

    def test_minimal_levels(self):
        # log(N eps_th / target) / log(eps_th / eps) = 7, so 2**3 is the first power that covers it
        result = overhead(3, 17, 1000, epsilon=0.005, epsilon_th=0.01, target=1000 * 0.01 * 0.5 ** 7)
        assert result.minimal_levels == 3
        assert result.total_gates == 1000 * 17 ** 3

    def test_exact_power(self):
        result = overhead(0, 17, 1000, epsilon=0.005, epsilon_th=0.01, target=1000 * 0.01 * 0.5 ** 8)
        assert result.minimal_levels == 3

    def test_zero_levels(self):
        assert overhead(0, 17, 1000).total_gates == 1000

    def test_above_threshold(self):
        result = overhead(2, 17, 1000, epsilon=0.02, epsilon_th=0.01, target=1e-6)
        assert not result.finite
        assert result.minimal_levels is None

    def test_noiseless_needs_no_levels(self):
        result = overhead(2, 17, 1000, epsilon=0.0, epsilon_th=0.01, target=1e-6)
        assert result.minimal_levels == 0
        assert result.finite

    def test_invalid(self):
        with pytest.raises(QecError):
            overhead(-1, 17, 1000)

    @pytest.mark.parametrize("kwargs", [
        {"epsilon": 0.001, "epsilon_th": 0.01},
        {"epsilon": 0.001, "target": 1e-6},
        {"epsilon": -0.001, "epsilon_th": 0.01, "target": 1e-6},
        {"epsilon": 0.001, "epsilon_th": 0.01, "target": 0.0},
    ])
    def test_incomplete_noise_parameters(self, kwargs):
        with pytest.raises(QecError):
            overhead(2, 17, 1000, **kwargs)


class TestThreshold:

    def test_repetition_map(self):
        assert threshold_scan(repetition_map).fixed_point == pytest.approx(0.5, abs=1e-9)

    def test_quadratic_map(self):
        assert threshold_scan(quadratic_map(36)).fixed_point == pytest.approx(1 / 36, abs=1e-12)

    def test_identity_map(self):
        result = threshold_scan(lambda p: p)
        assert not result.isolated
        assert result.fixed_point is None

    def test_no_sign_change(self):
        with pytest.raises(ThresholdError):
            threshold_scan(lambda p: p / 2)


class TestSweep:

    @staticmethod
    def _config(seed, **overrides):
        values = dict(code="bitflip3", kind="bit_flip", grid_start=0.3, grid_stop=0.7, grid_points=2,
                      trials=5000, seed=seed)
        values.update(overrides)
        return ExperimentConfig(**values).validate()

    def test_pseudo_threshold_flags(self, bitflip, seed):
        table = sweep(self._config(seed), bitflip).table
        assert table["pseudo_threshold"].tolist() == [True, False]
        assert list(table["trials"]) == [5000, 5000]

    def test_csv_independent_of_workers(self, bitflip, seed, tmp_path):
        config = self._config(seed, trials=3 * BLOCK_SIZE)
        one, eight = tmp_path / "one.csv", tmp_path / "eight.csv"
        sweep(config, bitflip, workers=1).to_csv(one)
        sweep(config, bitflip, workers=8).to_csv(eight)
        assert one.read_bytes() == eight.read_bytes()

    def test_json_payload(self, bitflip, seed):
        payload = sweep(self._config(seed, grid_points=1), bitflip).to_json_dict()
        assert payload["seed"] == seed
        assert payload["config"]["code"] == "bitflip3"
        assert len(payload["points"]) == 1

    def test_phase_damping_runs_over_duration(self, seed):
        config = self._config(seed, code="phaseflip3", kind="phase_damping", gamma=1.0, grid_start=0.2,
                              grid_stop=3.0, trials=2000)
        result = sweep(config, builtin("phaseflip3"))
        table = result.table
        assert list(table["t"]) == pytest.approx([0.2, 3.0])
        assert list(table["epsilon"]) == pytest.approx([(1 - math.exp(-0.2)) / 2, (1 - math.exp(-3.0)) / 2])
        assert result.channel_kind == "phase_damping"
        assert table["pseudo_threshold"].iloc[0]
