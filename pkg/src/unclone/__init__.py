"""Uncloneable-encryption simulation toolkit.

Conjugate-coding encryption schemes, a quantum-accessible random oracle,
attack strategies, and exact/Monte-Carlo evaluators for the cloning,
distinguishing and cloning-distinguishing security games.
"""
from .quantum import (
    BitString,
    CapacityError,
    DensityOperator,
    KrausChannel,
    Povm,
    PureState,
    apply_channel,
    epr_state,
    measure,
    partial_trace,
    sample_measurement,
    tensor,
    wiesner_state,
)
from .oracle import (
    QprfKey,
    RandomOracle,
    oracle_eval,
    oracle_from_table,
    oracle_new,
    oracle_unitary_apply,
    qprf_eval,
    qprf_oracle,
    reprogram,
)
from .schemes import (
    CeKey,
    Ciphertext,
    FceKey,
    QecmScheme,
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
from .attacks import (
    BREIDBART_SINGLE,
    CloningAttack,
    CloningDistinguishingAttack,
    DistinguishingAttack,
    MoeChannelStrategy,
    MoeStrategy,
    SeesawResult,
    UnsupportedAttackError,
    breidbart_attack,
    breidbart_moe_strategy,
    copy_attack,
    guess_attack,
    moe_channel_to_state,
    random_moe_strategy,
    seesaw_optimize_moe,
    split_measure_attack,
    transform_cd_to_cloning,
)
from .games import (
    CurveRow,
    GameReport,
    MessageDistribution,
    bound_curves,
    eval_cloning_distinguishing_game,
    eval_cloning_game,
    eval_distinguishing_game,
    eval_moe_game,
    min_entropy_experiment,
    moe_game_bound,
    xor_shift_identity_check,
)

__version__ = "0.1.0"
