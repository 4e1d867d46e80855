import math

import numpy as np
import pytest

from unclone.oracle import QprfKey, oracle_from_table, oracle_new
from unclone.quantum import BitString, wiesner_state
from unclone.schemes import (
    CeKey,
    Ciphertext,
    FceKey,
    average_ciphertext,
    ce_dec,
    ce_dec_distribution,
    ce_enc,
    ce_keygen,
    conjugate_encryption,
    f_conjugate_encryption,
    fce_dec,
    fce_enc,
    fce_keygen,
    otp_classical,
)


def zero_oracle(lam, n):
    table = {x: BitString.zeros(n) for x in BitString.all_strings(lam)}
    return oracle_from_table(table, lam, n)


class TestConjugateKeygen:
    def test_key_size(self):
        key = ce_keygen(5, np.random.default_rng(0))
        assert len(key.r) + len(key.theta) == 10

    def test_seeded_reproducibility(self):
        assert ce_keygen(6, np.random.default_rng(4)) == ce_keygen(
            6, np.random.default_rng(4)
        )

    def test_bit_balance(self):
        rng = np.random.default_rng(1)
        ones = sum(
            ce_keygen(4, rng).r.weight() + ce_keygen(4, rng).theta.weight()
            for _ in range(10_000)
        )
        total = 10_000 * 8
        sigma = math.sqrt(total * 0.25)
        assert abs(ones - total / 2) < 5 * sigma


class TestConjugateEncryption:
    def test_trivial_key_is_plain_payload(self):
        key = CeKey(BitString("000"), BitString("000"))
        ct = ce_enc(key, BitString("000"))
        assert np.allclose(ct.quantum_state().amplitudes, [1] + [0] * 7)

    def test_pad_cancels_into_plus_state(self):
        key = CeKey(BitString("1"), BitString("1"))
        ct = ce_enc(key, BitString("1"))
        plus = wiesner_state(BitString("0"), BitString("1"))
        assert np.allclose(ct.quantum_state().amplitudes, plus.amplitudes)

    def test_ciphertext_size(self):
        scheme = conjugate_encryption(4)
        ct = scheme.enc(scheme.key_gen(np.random.default_rng(2)), BitString("0110"),
                        np.random.default_rng(3))
        assert ct.quantum_qubits == 4
        assert ct.classical_part is None

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            ce_enc(CeKey(BitString("00"), BitString("00")), BitString("0"))

    def test_roundtrip_exhaustive(self):
        for lam in (1, 2, 3):
            scheme = conjugate_encryption(lam)
            for key, _ in scheme.enumerate_keys():
                for m in BitString.all_strings(lam):
                    dist = ce_dec_distribution(key, ce_enc(key, m))
                    assert abs(dist.get(m, 0.0) - 1.0) < 1e-9

    def test_wrong_basis_positions_decode_uniformly(self):
        key = CeKey(BitString("00"), BitString("01"))
        wrong = CeKey(BitString("00"), BitString("11"))  # first basis flipped
        dist = ce_dec_distribution(wrong, ce_enc(key, BitString("00")))
        # Second qubit still decodes correctly; first is a coin flip.
        for m, p in dist.items():
            if m[1] == 0:
                assert abs(p - 0.5) < 1e-9
            else:
                assert p < 1e-9

    def test_aligned_decode_deterministic(self):
        key = CeKey(BitString("10"), BitString("01"))
        ct = ce_enc(key, BitString("11"))
        outcomes = {
            ce_dec(key, ct, np.random.default_rng(seed)) for seed in range(20)
        }
        assert outcomes == {BitString("11")}

    def test_perfect_secrecy_of_average_ciphertext(self):
        for lam in (1, 2, 3):
            scheme = conjugate_encryption(lam)
            for m in BitString.all_strings(lam):
                avg = average_ciphertext(scheme, m)
                assert np.allclose(
                    avg.matrix, np.eye(1 << lam) / (1 << lam), atol=1e-9
                )


class TestFceKeygen:
    def test_key_size(self):
        key = fce_keygen(7, np.random.default_rng(5))
        assert len(key.s) + len(key.theta) == 14

    def test_seeded_reproducibility(self):
        assert fce_keygen(5, np.random.default_rng(6)) == fce_keygen(
            5, np.random.default_rng(6)
        )

    def test_bit_balance(self):
        rng = np.random.default_rng(7)
        ones = sum(
            fce_keygen(4, rng).s.weight() + fce_keygen(4, rng).theta.weight()
            for _ in range(10_000)
        )
        total = 10_000 * 8
        assert abs(ones - total / 2) < 5 * math.sqrt(total * 0.25)


class TestFceEncryption:
    def test_zero_function_exposes_message(self):
        key = FceKey(BitString("0101"), BitString("1100"))
        m = BitString("110")
        ct = fce_enc(key, m, zero_oracle(4, 3), np.random.default_rng(8))
        assert ct.classical_part == m

    def test_roundtrip_random(self):
        rng = np.random.default_rng(9)
        scheme = f_conjugate_encryption(6, 4)
        for _ in range(100):
            key = scheme.key_gen(rng)
            m = BitString.random(4, rng)
            ct = scheme.enc(key, m, rng)
            assert scheme.dec(key, ct, rng) == m

    def test_fresh_randomness_per_encryption(self):
        rng = np.random.default_rng(10)
        key = FceKey(BitString.from_int(9, 6), BitString.from_int(20, 6))
        prf = QprfKey(key.s)
        pairs = [
            (
                fce_enc(key, BitString("0000"), prf, rng).quantum_x,
                fce_enc(key, BitString("0000"), prf, rng).quantum_x,
            )
            for _ in range(50)
        ]
        assert sum(a == b for a, b in pairs) <= 5

    def test_ciphertext_shape(self):
        scheme = f_conjugate_encryption(5, 3)
        rng = np.random.default_rng(11)
        ct = scheme.enc(scheme.key_gen(rng), BitString("010"), rng)
        assert ct.quantum_qubits == 5
        assert len(ct.classical_part) == 3

    def test_malformed_ciphertext_rejected(self):
        key = FceKey(BitString("01"), BitString("10"))
        with pytest.raises(ValueError):
            fce_dec(key, Ciphertext(None, BitString("00"), BitString("10")),
                    QprfKey(key.s), np.random.default_rng(12))

    def test_oracle_mode_requires_matching_signature(self):
        with pytest.raises(ValueError):
            f_conjugate_encryption(4, 3, prf=oracle_new(0, 4, 7))

    def test_classical_part_uniform_and_message_independent(self):
        # Key-averaged classical part under sampled oracles: per-value
        # frequencies within 4 sigma of uniform for every message.
        lam, n = 3, 2
        counts = {m: np.zeros(1 << n) for m in BitString.all_strings(n)}
        samples_per_m = 0
        for i in range(64):
            oracle = oracle_new(1000 + i, lam, n)
            for theta in BitString.all_strings(lam):
                for x in BitString.all_strings(lam):
                    for m in BitString.all_strings(n):
                        c = m ^ oracle.evaluate(x)
                        counts[m][c.to_int()] += 1
        samples = 64 * (1 << lam) * (1 << lam)
        expected = samples / (1 << n)
        sigma = math.sqrt(samples * (1 / (1 << n)) * (1 - 1 / (1 << n)))
        for m, table in counts.items():
            assert np.all(np.abs(table - expected) < 4 * sigma)


class TestOneTimePad:
    def test_roundtrip(self):
        scheme = otp_classical(4)
        rng = np.random.default_rng(13)
        key = scheme.key_gen(rng)
        m = BitString("1010")
        assert scheme.dec(key, scheme.enc(key, m, rng), rng) == m

    def test_ciphertext_copies_decrypt(self):
        scheme = otp_classical(3)
        rng = np.random.default_rng(14)
        key = scheme.key_gen(rng)
        ct = scheme.enc(key, BitString("011"), rng)
        duplicate = Ciphertext(ct.classical_part)
        assert scheme.dec(key, ct, rng) == scheme.dec(key, duplicate, rng)

    def test_ciphertext_distribution_message_independent(self):
        # Exhaustive over keys: the ciphertext multiset is the same for
        # every message.
        scheme = otp_classical(3)
        tables = {}
        for m in BitString.all_strings(3):
            seen = sorted(
                (m ^ key).to_int() for key, _ in scheme.enumerate_keys()
            )
            tables[m] = seen
        reference = tables[BitString("000")]
        assert all(table == reference for table in tables.values())


class TestCiphertextSampling:
    def test_matching_basis_is_deterministic(self):
        ct = Ciphertext(None, BitString("10"), BitString("01"))
        rng = np.random.default_rng(15)
        angles = [0.0, math.pi / 4]
        assert all(
            ct.sample_product_measurement(angles, rng) == BitString("10")
            for _ in range(20)
        )

    def test_orthogonal_basis_is_unbiased(self):
        ct = Ciphertext(None, BitString("0"), BitString("1"))
        rng = np.random.default_rng(16)
        draws = [ct.sample_product_measurement([0.0], rng)[0] for _ in range(2000)]
        assert abs(sum(draws) / 2000 - 0.5) < 5 * math.sqrt(0.25 / 2000)

    def test_no_quantum_part_rejected(self):
        with pytest.raises(ValueError):
            Ciphertext(BitString("01")).sample_product_measurement([0.0], None)
