import math

import numpy as np
import pytest

from unclone.attacks import (
    BREIDBART_SINGLE,
    CloningDistinguishingAttack,
    UnsupportedAttackError,
    breidbart_attack,
    breidbart_moe_strategy,
    copy_attack,
    guess_attack,
    moe_channel_to_state,
    random_cloning_distinguishing_attack,
    random_moe_strategy,
    seesaw_optimize_moe,
    split_measure_attack,
    transform_cd_to_cloning,
)
from unclone.games import (
    MessageDistribution,
    eval_cloning_distinguishing_game,
    eval_cloning_game,
    eval_moe_game,
    moe_game_bound,
)
from unclone.quantum import BitString, CapacityError, KrausChannel, Povm, basis_state
from unclone.schemes import conjugate_encryption, f_conjugate_encryption, otp_classical


class TestCopyAttack:
    def test_wins_always_against_classical(self):
        for lam in (1, 2, 3):
            report = eval_cloning_game(otp_classical(lam), copy_attack(), mode="exact")
            assert report.value == 1.0

    def test_dominates_guessing(self):
        lam = 2
        copied = eval_cloning_game(otp_classical(lam), copy_attack(), mode="exact")
        guessed = eval_cloning_game(
            otp_classical(lam), guess_attack(BitString.zeros(lam)), mode="exact"
        )
        assert copied.value > guessed.value

    def test_rejects_quantum_ciphertexts(self):
        with pytest.raises(UnsupportedAttackError):
            copy_attack().check_scheme(conjugate_encryption(2))


class TestGuessAttack:
    def test_uniform_messages(self):
        report = eval_cloning_game(
            conjugate_encryption(2), guess_attack(BitString("00")), mode="exact"
        )
        assert abs(report.value - 0.25) < 1e-9

    def test_point_mass_hits(self):
        dist = MessageDistribution.point_mass(BitString("10"))
        report = eval_cloning_game(
            conjugate_encryption(2), guess_attack(BitString("10")), dist, mode="exact"
        )
        assert abs(report.value - 1.0) < 1e-9

    def test_monte_carlo_matches_rate(self):
        scheme = f_conjugate_encryption(4, 3)
        report = eval_cloning_game(
            scheme,
            guess_attack(BitString("000")),
            mode="monte_carlo",
            trials=10_000,
            seed=21,
        )
        assert abs(report.value - 0.125) <= 3 * report.std_error


class TestBreidbartAttack:
    def test_single_qubit_value(self):
        report = eval_cloning_game(
            conjugate_encryption(1), breidbart_attack(), mode="exact"
        )
        assert abs(report.value - (2 + math.sqrt(2)) / 4) < 1e-9

    def test_product_structure(self):
        single = eval_cloning_game(
            conjugate_encryption(1), breidbart_attack(), mode="exact"
        ).value
        triple = eval_cloning_game(
            conjugate_encryption(3), breidbart_attack(), mode="exact"
        ).value
        assert abs(triple - single ** 3) < 1e-9

    def test_never_exceeds_bound(self):
        for lam in (1, 2, 3):
            report = eval_cloning_game(
                conjugate_encryption(lam), breidbart_attack(), mode="exact"
            )
            assert report.value <= moe_game_bound(lam) + 1e-9
        # Larger sizes follow from per-qubit independence.
        assert BREIDBART_SINGLE ** 4 <= moe_game_bound(4) + 1e-9

    def test_rejects_other_schemes(self):
        with pytest.raises(UnsupportedAttackError):
            breidbart_attack().check_scheme(otp_classical(2))
        with pytest.raises(UnsupportedAttackError):
            breidbart_attack().check_scheme(f_conjugate_encryption(2))


class TestSplitMeasureAttack:
    def test_two_qubit_value(self):
        report = eval_cloning_game(
            conjugate_encryption(2), split_measure_attack(), mode="exact"
        )
        assert abs(report.value - 0.25) < 1e-9

    def test_own_half_always_recovered(self):
        scheme = conjugate_encryption(2)
        rng = np.random.default_rng(33)
        attack = split_measure_attack()
        for _ in range(200):
            key = scheme.key_gen(rng)
            m = BitString.random(2, rng)
            ct = scheme.enc(key, m, rng)
            guess_b, guess_c = attack.run_trial(scheme, key, ct, rng)
            assert guess_b[0] == m[0]
            assert guess_c[1] == m[1]

    def test_below_breidbart(self):
        split = eval_cloning_game(
            conjugate_encryption(2), split_measure_attack(), mode="exact"
        ).value
        breidbart = eval_cloning_game(
            conjugate_encryption(2), breidbart_attack(), mode="exact"
        ).value
        assert split <= breidbart

    def test_odd_width_rejected(self):
        with pytest.raises(ValueError):
            split_measure_attack().check_scheme(conjugate_encryption(3))


class TestAttackValidity:
    """Exact-form channels and decoders must pass construction checks."""

    def test_built_in_attacks(self):
        scheme = conjugate_encryption(2)
        rng = np.random.default_rng(0)
        key = scheme.key_gen(rng)
        for attack in (breidbart_attack(), split_measure_attack(),
                       guess_attack(BitString("00"))):
            channel = attack.split_channel(scheme, None)
            assert channel.in_qubits == 2
            b, c = attack.side_qubits(scheme)
            assert channel.out_qubits == b + c
            attack.decode_povm("b", scheme, key, None)
            attack.decode_povm("c", scheme, key, None)


def trivial_cd_attack(mstar: BitString) -> CloningDistinguishingAttack:
    always_one = Povm(
        {BitString("0"): np.zeros((2, 2)), BitString("1"): np.eye(2)}
    )
    return CloningDistinguishingAttack(
        name="always-one",
        side_qubits=0,
        b_qubits=1,
        c_qubits=1,
        message_bits=len(mstar),
        gen_state=basis_state(mstar).to_density(),
        split=lambda scheme, classical: KrausChannel.identity(len(mstar)),
        decode_b=lambda key, classical: always_one,
        decode_c=lambda key, classical: always_one,
    )


class TestTransform:
    def test_trivial_attack_value_is_hit_probability(self):
        scheme = conjugate_encryption(2)
        transformed = transform_cd_to_cloning(trivial_cd_attack(BitString("11")))
        report = eval_cloning_game(scheme, transformed, mode="exact")
        assert abs(report.value - 0.25) < 1e-9

    def test_factor_two_inequality(self):
        scheme = conjugate_encryption(2)
        rng = np.random.default_rng(77)
        for _ in range(5):
            cd = random_cloning_distinguishing_attack(scheme, rng)
            original = eval_cloning_distinguishing_game(scheme, cd, mode="exact").value
            transformed = eval_cloning_game(
                scheme, transform_cd_to_cloning(cd), mode="exact"
            ).value
            assert transformed >= original / 2 - 1e-9

    def test_transformed_attack_is_valid(self):
        scheme = conjugate_encryption(2)
        rng = np.random.default_rng(78)
        cd = random_cloning_distinguishing_attack(scheme, rng)
        attack = transform_cd_to_cloning(cd)
        channel = attack.split_channel(scheme, None)  # trace preservation checked here
        b, c = attack.side_qubits(scheme)
        assert channel.out_qubits == b + c
        key = scheme.key_gen(rng)
        attack.decode_povm("b", scheme, key, None)
        attack.decode_povm("c", scheme, key, None)

    def test_sampled_view_matches_exact_view(self):
        scheme = conjugate_encryption(2)
        rng = np.random.default_rng(79)
        cd = random_cloning_distinguishing_attack(scheme, rng)
        attack = transform_cd_to_cloning(cd)
        exact = eval_cloning_game(scheme, attack, mode="exact").value
        mc = eval_cloning_game(
            scheme, attack, mode="monte_carlo", trials=1500, seed=4
        )
        assert abs(exact - mc.value) <= 4 * max(mc.std_error, 1e-6)


class TestMoeStrategies:
    def test_broadcast_strategy_value(self):
        report = eval_moe_game(breidbart_moe_strategy(1))
        assert abs(report.value - BREIDBART_SINGLE) < 1e-9

    def test_channel_and_state_forms_agree(self):
        for lam in (1, 2):
            channel_form = breidbart_moe_strategy(lam)
            state_form = moe_channel_to_state(channel_form)
            a = eval_moe_game(channel_form).value
            b = eval_moe_game(state_form).value
            assert abs(a - b) < 1e-9

    def test_random_strategies_respect_bound(self):
        rng = np.random.default_rng(50)
        for lam in (1, 2):
            for _ in range(25):
                strategy = random_moe_strategy(lam, 2, 2, rng)
                report = eval_moe_game(strategy)
                assert report.value <= moe_game_bound(lam) + 1e-9


class TestSeesaw:
    def test_reaches_optimum_window(self):
        values = [seesaw_optimize_moe(1, iters=200, seed=s).value for s in range(10)]
        best = max(values)
        assert 0.8530 <= best <= 0.8535534 + 1e-7
        assert all(v <= moe_game_bound(1) + 1e-9 for v in values)

    def test_monotone_history(self):
        result = seesaw_optimize_moe(1, iters=50, seed=3)
        history = result.history
        assert all(b >= a - 1e-12 for a, b in zip(history, history[1:]))

    def test_trivial_side_registers_still_reach_optimum(self):
        result = seesaw_optimize_moe(1, dim_b=1, dim_c=1, iters=200, seed=1)
        assert abs(result.value - BREIDBART_SINGLE) < 1e-6

    def test_strategy_value_matches_evaluator(self):
        result = seesaw_optimize_moe(1, iters=100, seed=5)
        report = eval_moe_game(result.strategy)
        assert abs(report.value - result.value) < 1e-9

    def test_two_qubit_search_respects_bound(self):
        result = seesaw_optimize_moe(2, iters=60, seed=0)
        assert result.value <= moe_game_bound(2) + 1e-9

    def test_size_cap(self):
        with pytest.raises(CapacityError):
            seesaw_optimize_moe(3)

    def test_returns_flag_without_raising(self):
        result = seesaw_optimize_moe(1, iters=2, seed=0)
        assert result.converged in (True, False)
        assert result.value <= moe_game_bound(1) + 1e-9
