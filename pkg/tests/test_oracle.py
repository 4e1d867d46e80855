import itertools
import math

import numpy as np
import pytest

from unclone.oracle import (
    QprfKey,
    oracle_eval,
    oracle_from_table,
    oracle_new,
    oracle_unitary_apply,
    qprf_eval,
    qprf_oracle,
    reprogram,
)
from unclone.quantum import BitString, PureState, basis_state, random_pure_state, tensor


class TestDeterminism:
    def test_equal_seeds_agree(self):
        a = oracle_new(123, 16, 8)
        b = oracle_new(123, 16, 8)
        rng = np.random.default_rng(0)
        for _ in range(1000):
            x = BitString.random(16, rng)
            assert a.evaluate(x) == b.evaluate(x)

    def test_distinct_seeds_disagree_somewhere(self):
        a = oracle_new(1, 8, 8)
        b = oracle_new(2, 8, 8)
        probes = [BitString.from_int(i, 8) for i in range(64)]
        assert any(a.evaluate(x) != b.evaluate(x) for x in probes)

    def test_output_length(self):
        oracle = oracle_new(5, 6, 11)
        rng = np.random.default_rng(1)
        for _ in range(50):
            assert len(oracle.evaluate(BitString.random(6, rng))) == 11

    def test_repeated_eval_identical(self):
        oracle = oracle_new(7, 10, 4)
        x = BitString.from_int(513, 10)
        assert oracle.evaluate(x) == oracle.evaluate(x)

    def test_order_independence(self):
        oracle = oracle_new(9, 4, 3)
        inputs = list(BitString.all_strings(4))
        forward = {x: oracle.evaluate(x) for x in inputs}
        backward = {x: oracle.evaluate(x) for x in reversed(inputs)}
        assert forward == backward

    def test_rejects_zero_sizes(self):
        with pytest.raises(ValueError):
            oracle_new(0, 0, 4)
        with pytest.raises(ValueError):
            oracle_new(0, 4, 0)

    def test_input_length_checked(self):
        with pytest.raises(ValueError):
            oracle_new(0, 4, 4).evaluate(BitString("01"))


class TestReprogramming:
    def test_patched_point(self):
        oracle = oracle_new(11, 6, 4)
        x, y = BitString.from_int(33, 6), BitString("1010")
        patched = reprogram(oracle, x, y)
        assert oracle_eval(patched, x) == y

    def test_other_points_unchanged(self):
        oracle = oracle_new(11, 6, 4)
        x, y = BitString.from_int(33, 6), BitString("1010")
        patched = reprogram(oracle, x, y)
        rng = np.random.default_rng(2)
        for _ in range(100):
            s = BitString.random(6, rng)
            if s != x:
                assert patched.evaluate(s) == oracle.evaluate(s)

    def test_original_unchanged(self):
        oracle = oracle_new(11, 6, 4)
        x = BitString.from_int(33, 6)
        before = oracle.evaluate(x)
        reprogram(oracle, x, BitString("1111"))
        assert oracle.evaluate(x) == before

    def test_last_write_wins(self):
        oracle = oracle_new(11, 4, 2)
        x = BitString("0011")
        patched = reprogram(reprogram(oracle, x, BitString("01")), x, BitString("10"))
        assert patched.evaluate(x) == BitString("10")

    def test_size_mismatch(self):
        oracle = oracle_new(11, 4, 2)
        with pytest.raises(ValueError):
            reprogram(oracle, BitString("01"), BitString("00"))

    def test_average_identity_exhaustive(self):
        # E_H f(H) = E_H E_y f(H_{x,y}) over all of Bool(2, 1), exactly.
        rng = np.random.default_rng(3)
        tables = list(itertools.product((0, 1), repeat=4))
        values = {t: float(rng.normal()) for t in tables}

        def build(table):
            mapping = {
                BitString.from_int(i, 2): BitString([table[i]]) for i in range(4)
            }
            return oracle_from_table(mapping, 2, 1)

        def f_of(oracle):
            key = tuple(oracle.evaluate(BitString.from_int(i, 2))[0] for i in range(4))
            return values[key]

        for x in BitString.all_strings(2):
            lhs = math.fsum(f_of(build(t)) for t in tables) / len(tables)
            rhs = math.fsum(
                f_of(build(t).reprogram(x, BitString([y])))
                for t in tables
                for y in (0, 1)
            ) / (2 * len(tables))
            assert lhs == rhs

    def test_table_must_cover_domain(self):
        with pytest.raises(ValueError):
            oracle_from_table({BitString("00"): BitString("1")}, 2, 1)


class TestOracleUnitary:
    def test_basis_action(self):
        oracle = oracle_new(21, 2, 2)
        for x in BitString.all_strings(2):
            state = tensor(basis_state(x), basis_state(BitString("00")))
            out = oracle_unitary_apply(oracle, state, [0, 1], [2, 3])
            expected = tensor(basis_state(x), basis_state(oracle.evaluate(x)))
            assert np.allclose(out.amplitudes, expected.amplitudes)

    def test_involution(self):
        oracle = oracle_new(22, 2, 1)
        rng = np.random.default_rng(4)
        state = random_pure_state(3, rng)
        once = oracle_unitary_apply(oracle, state, [0, 1], [2])
        twice = oracle_unitary_apply(oracle, once, [0, 1], [2])
        assert np.allclose(twice.amplitudes, state.amplitudes)

    def test_linearity_on_superposition(self):
        oracle = oracle_new(23, 2, 2)
        x1, x2 = BitString("00"), BitString("11")
        amps = (
            tensor(basis_state(x1), basis_state(BitString("00"))).amplitudes
            + tensor(basis_state(x2), basis_state(BitString("00"))).amplitudes
        ) / math.sqrt(2)
        out = oracle_unitary_apply(oracle, PureState(amps), [0, 1], [2, 3])
        expected = (
            tensor(basis_state(x1), basis_state(oracle.evaluate(x1))).amplitudes
            + tensor(basis_state(x2), basis_state(oracle.evaluate(x2))).amplitudes
        ) / math.sqrt(2)
        assert np.allclose(out.amplitudes, expected)

    def test_norm_preserved_on_random_states(self):
        oracle = oracle_new(24, 2, 2)
        rng = np.random.default_rng(5)
        for _ in range(20):
            state = random_pure_state(5, rng)
            out = oracle_unitary_apply(oracle, state, [0, 3], [1, 4])
            assert abs(np.linalg.norm(out.amplitudes) - 1.0) < 1e-9

    def test_register_overlap_rejected(self):
        oracle = oracle_new(25, 2, 2)
        state = random_pure_state(4, np.random.default_rng(6))
        with pytest.raises(ValueError):
            oracle_unitary_apply(oracle, state, [0, 1], [1, 2])

    def test_register_size_mismatch(self):
        oracle = oracle_new(25, 2, 2)
        state = random_pure_state(4, np.random.default_rng(7))
        with pytest.raises(ValueError):
            oracle_unitary_apply(oracle, state, [0], [1, 2])


class TestQprf:
    def test_deterministic(self):
        key = QprfKey(BitString("10110010"))
        x = BitString("00001111")
        assert qprf_eval(key, x, 8) == qprf_eval(key, x, 8)

    def test_key_and_input_length_must_match(self):
        with pytest.raises(ValueError):
            qprf_eval(QprfKey(BitString("01")), BitString("0110"), 4)

    def test_bit_balance(self):
        # Mean output bit over 1000 inputs stays within 5 sigma of 1/2.
        key = QprfKey(BitString.from_int(0xAB, 8))
        rng = np.random.default_rng(8)
        ones = 0
        samples = 1000
        bits_per = 8
        for _ in range(samples):
            ones += qprf_eval(key, BitString.random(8, rng), bits_per).weight()
        total = samples * bits_per
        sigma = math.sqrt(total * 0.25)
        assert abs(ones - total / 2) < 5 * sigma

    def test_distinct_keys_disagree(self):
        key_a = QprfKey(BitString.from_int(3, 8))
        key_b = QprfKey(BitString.from_int(4, 8))
        probes = [BitString.from_int(i, 8) for i in range(64)]
        assert any(qprf_eval(key_a, x, 8) != qprf_eval(key_b, x, 8) for x in probes)

    def test_oracle_adapter_matches_direct_eval(self):
        key = QprfKey(BitString("110011"))
        adapter = qprf_oracle(key, 6, 5)
        rng = np.random.default_rng(9)
        for _ in range(50):
            x = BitString.random(6, rng)
            assert adapter.evaluate(x) == qprf_eval(key, x, 5)
