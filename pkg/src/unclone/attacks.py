"""Attack strategies against the encryption schemes.

A cloning attack is a splitting channel plus two keyed decoders.  Exact
game evaluation uses the channel/POVM form (``split_channel`` and
``decode_povm_*``); Monte Carlo evaluation uses ``run_trial``, which for
the built-in attacks samples per-qubit measurements so it scales past the
exact register cap.  Both views describe the same attack and are checked
against each other in the test suite.

Also provided: distinguishing and cloning-distinguishing attack
containers, the construction turning a cloning-distinguishing attack into
a plain cloning attack, strategies for the basis-guessing monogamy game,
and a seesaw optimizer that searches for good monogamy-game strategies by
alternating exact eigenvector updates with pairwise POVM ascent.
"""
from __future__ import annotations

import abc
import functools
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .quantum import (
    TOL,
    BitString,
    CapacityError,
    DensityOperator,
    KrausChannel,
    Povm,
    broadcast_measurement_channel,
    epr_state,
    project_register,
    random_density_operator,
    random_kraus_channel,
    random_povm,
    wiesner_state,
)
from .schemes import Ciphertext, Key, QecmScheme

BREIDBART_ANGLE = math.pi / 8
# Per-qubit success of a Breidbart measurement on a conjugate-coded qubit.
BREIDBART_SINGLE = math.cos(BREIDBART_ANGLE) ** 2

_BIT0 = BitString("0")
_BIT1 = BitString("1")


class UnsupportedAttackError(Exception):
    """Raised when an attack cannot run against the given scheme."""


def _basis_vector(angle: float, outcome: int) -> np.ndarray:
    if outcome == 0:
        return np.array([math.cos(angle), math.sin(angle)], dtype=complex)
    return np.array([math.sin(angle), -math.cos(angle)], dtype=complex)


def product_angle_povm(angles: Sequence[float]) -> Povm:
    """Projective product measurement with one basis angle per qubit."""
    n = len(angles)
    elements = {}
    for label in BitString.all_strings(n):
        vec = np.ones(1, dtype=complex)
        for angle, bit in zip(angles, label):
            vec = np.kron(vec, _basis_vector(angle, bit))
        elements[label] = np.outer(vec, vec.conj())
    return Povm(elements)


def _point_povm(qubits: int, outcomes: Sequence[BitString], point: BitString) -> Povm:
    """POVM that reports ``point`` with certainty; other labels get zero weight."""
    dim = 1 << qubits
    zero = np.zeros((dim, dim), dtype=complex)
    elements = {label: zero for label in outcomes}
    elements[point] = np.eye(dim, dtype=complex)
    return Povm(elements)


class CloningAttack(abc.ABC):
    """Splitting channel plus two keyed decoders producing message guesses."""

    name: str = "attack"
    # Oracle queries made by each decoder; recorded in reports.
    oracle_queries: tuple[int, int] = (0, 0)

    @abc.abstractmethod
    def check_scheme(self, scheme: QecmScheme) -> None:
        """Raise UnsupportedAttackError if the scheme is incompatible."""

    @abc.abstractmethod
    def side_qubits(self, scheme: QecmScheme) -> tuple[int, int]:
        """Qubit counts of the B and C registers produced by the split."""

    @abc.abstractmethod
    def split_channel(
        self, scheme: QecmScheme, classical_part: Optional[BitString]
    ) -> KrausChannel:
        """Channel from the quantum ciphertext register to H_B tensor H_C."""

    @abc.abstractmethod
    def decode_povm(
        self,
        side: str,
        scheme: QecmScheme,
        key: Key,
        classical_part: Optional[BitString],
    ) -> Povm:
        """Keyed decoder for side "b" or "c" as a POVM over message strings."""

    def run_trial(
        self,
        scheme: QecmScheme,
        key: Key,
        ct: Ciphertext,
        rng: np.random.Generator,
    ) -> tuple[BitString, BitString]:
        """Sample both decoders' outputs for one ciphertext.

        Default implementation samples from the exact joint distribution, so
        it only works within the exact register cap; scalable attacks
        override this with direct per-qubit sampling.
        """
        self.check_scheme(scheme)
        rho_bc = self.split_channel(scheme, ct.classical_part).apply(
            ct.quantum_density()
        )
        povm_b = self.decode_povm("b", scheme, key, ct.classical_part)
        povm_c = self.decode_povm("c", scheme, key, ct.classical_part)
        labels_b = list(povm_b.elements)
        labels_c = list(povm_c.elements)
        dim_b = 1 << povm_b.qubit_count
        dim_c = 1 << povm_c.qubit_count
        stack_b = np.stack([povm_b.elements[l] for l in labels_b])
        stack_c = np.stack([povm_c.elements[l] for l in labels_c])
        rho_t = rho_bc.matrix.reshape(dim_b, dim_c, dim_b, dim_c)
        # Joint table Tr[(E_b (x) E_c) rho] for all outcome pairs at once.
        joint = np.einsum("xij,ykl,jlik->xy", stack_b, stack_c, rho_t).real
        flat = np.clip(joint.reshape(-1), 0.0, None)
        flat = flat / flat.sum()
        pick = rng.choice(flat.size, p=flat)
        return labels_b[pick // len(labels_c)], labels_c[pick % len(labels_c)]


class CopyAttack(CloningAttack):
    """Duplicate a classical ciphertext; both sides decrypt honestly."""

    name = "copy"

    def check_scheme(self, scheme):
        if scheme.quantum_cipher_qubits != 0:
            raise UnsupportedAttackError(
                f"copy attack needs classical-only ciphertexts; {scheme.name} "
                f"uses {scheme.quantum_cipher_qubits} ciphertext qubits"
            )

    def side_qubits(self, scheme):
        return 0, 0

    def split_channel(self, scheme, classical_part):
        return KrausChannel.identity(0)

    def decode_povm(self, side, scheme, key, classical_part):
        dist = scheme.dec_distribution(key, Ciphertext(classical_part))
        outcomes = list(BitString.all_strings(scheme.message_bits))
        elements = {m: np.array([[dist.get(m, 0.0)]], dtype=complex) for m in outcomes}
        return Povm(elements)

    def run_trial(self, scheme, key, ct, rng):
        self.check_scheme(scheme)
        guess_b = scheme.dec(key, ct, rng)
        guess_c = scheme.dec(key, ct, rng)
        return guess_b, guess_c


class GuessAttack(CloningAttack):
    """Discard the ciphertext; both sides output a fixed message."""

    def __init__(self, m0: BitString):
        self.m0 = m0
        self.name = f"guess[{m0}]"

    def check_scheme(self, scheme):
        if scheme.message_bits != len(self.m0):
            raise UnsupportedAttackError(
                f"guess string has {len(self.m0)} bits, scheme messages have "
                f"{scheme.message_bits}"
            )

    def side_qubits(self, scheme):
        return 0, 0

    def split_channel(self, scheme, classical_part):
        dim = 1 << scheme.quantum_cipher_qubits
        # Full trace of the ciphertext register.
        ops = [np.eye(dim, dtype=complex)[i : i + 1, :] for i in range(dim)]
        return KrausChannel(ops)

    def decode_povm(self, side, scheme, key, classical_part):
        return _point_povm(0, list(BitString.all_strings(scheme.message_bits)), self.m0)

    def run_trial(self, scheme, key, ct, rng):
        return self.m0, self.m0


class BreidbartAttack(CloningAttack):
    """Measure each ciphertext qubit in the intermediate basis and broadcast.

    The intermediate basis bisects the computational and Hadamard bases, so
    each broadcast bit matches the conjugate-coded payload bit with
    probability cos^2(pi/8) regardless of the hidden basis choice.  Both
    decoders un-pad the broadcast with the revealed key.
    """

    name = "breidbart"

    def check_scheme(self, scheme):
        if scheme.name != "ce":
            raise UnsupportedAttackError(
                f"breidbart attack targets the conjugate scheme, not {scheme.name}"
            )

    def side_qubits(self, scheme):
        return scheme.lam, scheme.lam

    def split_channel(self, scheme, classical_part):
        return _breidbart_split(scheme.lam)

    def decode_povm(self, side, scheme, key, classical_part):
        return _broadcast_unpad_povm(scheme.lam, key.r)

    def run_trial(self, scheme, key, ct, rng):
        self.check_scheme(scheme)
        outcome = ct.sample_product_measurement([BREIDBART_ANGLE] * scheme.lam, rng)
        guess = outcome ^ key.r
        return guess, guess


@functools.lru_cache(maxsize=None)
def _breidbart_split(lam: int) -> KrausChannel:
    return broadcast_measurement_channel(product_angle_povm([BREIDBART_ANGLE] * lam))


@functools.lru_cache(maxsize=None)
def _broadcast_unpad_povm(lam: int, r: BitString) -> Povm:
    dim = 1 << lam
    elements = {}
    for m in BitString.all_strings(lam):
        proj = np.zeros((dim, dim), dtype=complex)
        idx = (m ^ r).to_int()
        proj[idx, idx] = 1.0
        elements[m] = proj
    return Povm(elements)


class SplitMeasureAttack(CloningAttack):
    """Route half the qubits to each side; decode in the revealed bases.

    Each side recovers its half of the pad-masked payload perfectly once
    the key is known and zero-fills the unseen positions.
    """

    name = "split-measure"

    def check_scheme(self, scheme):
        if scheme.name != "ce":
            raise UnsupportedAttackError(
                f"split-measure attack targets the conjugate scheme, not {scheme.name}"
            )
        if scheme.lam % 2 != 0:
            raise ValueError("split-measure attack needs an even qubit count")

    def side_qubits(self, scheme):
        half = scheme.lam // 2
        return half, half

    def split_channel(self, scheme, classical_part):
        return KrausChannel.identity(scheme.lam)

    def decode_povm(self, side, scheme, key, classical_part):
        half = scheme.lam // 2
        r, theta = key
        if side == "b":
            r_own, theta_own, own = r[:half], theta[:half], slice(0, half)
        else:
            r_own, theta_own, own = r[half:], theta[half:], slice(half, scheme.lam)
        dim = 1 << half
        zero = np.zeros((dim, dim), dtype=complex)
        basis = Povm.wiesner_basis(theta_own)
        elements = {}
        for m in BitString.all_strings(scheme.lam):
            rest = m[slice(half, scheme.lam)] if side == "b" else m[slice(0, half)]
            if rest.to_int() != 0:
                elements[m] = zero
            else:
                elements[m] = basis.elements[m[own] ^ r_own]
        return Povm(elements)

    def run_trial(self, scheme, key, ct, rng):
        self.check_scheme(scheme)
        r, theta = key
        half = scheme.lam // 2
        # Decoders measure their own qubits in the true bases, so outcomes
        # reproduce the payload bits exactly on those positions.
        angles = [0.0 if t == 0 else math.pi / 4 for t in theta]
        outcome = ct.sample_product_measurement(angles, rng)
        pad = outcome ^ r
        guess_b = pad[:half].concat(BitString.zeros(scheme.lam - half))
        guess_c = BitString.zeros(half).concat(pad[half:])
        return guess_b, guess_c


def copy_attack() -> CopyAttack:
    return CopyAttack()


def guess_attack(m0: BitString) -> GuessAttack:
    return GuessAttack(m0)


def breidbart_attack() -> BreidbartAttack:
    return BreidbartAttack()


def split_measure_attack() -> SplitMeasureAttack:
    return SplitMeasureAttack()


# Distinguishing-style attacks ------------------------------------------------


@dataclass(frozen=True, eq=False)
class DistinguishingAttack:
    """State preparation plus an unkeyed bit-valued guess on (side, ciphertext)."""

    name: str
    side_qubits: int
    message_bits: int
    gen_state: DensityOperator
    guess_povm: Callable[[QecmScheme, Optional[BitString]], Povm]

    def __post_init__(self):
        if self.gen_state.qubit_count != self.side_qubits + self.message_bits:
            raise ValueError("gen state must cover the side and message registers")


@dataclass(frozen=True, eq=False)
class CloningDistinguishingAttack:
    """State preparation, splitting on (side, ciphertext), keyed bit decoders."""

    name: str
    side_qubits: int
    b_qubits: int
    c_qubits: int
    message_bits: int
    gen_state: DensityOperator
    split: Callable[[QecmScheme, Optional[BitString]], KrausChannel]
    decode_b: Callable[[Key, Optional[BitString]], Povm]
    decode_c: Callable[[Key, Optional[BitString]], Povm]

    def __post_init__(self):
        if self.gen_state.qubit_count != self.side_qubits + self.message_bits:
            raise ValueError("gen state must cover the side and message registers")

    def message_branches(self) -> list[tuple[BitString, float, DensityOperator]]:
        return gen_message_branches(
            self.gen_state, self.side_qubits, self.message_bits
        )


def gen_message_branches(
    gen_state: DensityOperator, side_qubits: int, message_bits: int
) -> list[tuple[BitString, float, DensityOperator]]:
    """Computational-basis decomposition of a prepared message register.

    Returns (m', probability, normalized conditional side state); this is
    the dephasing step of measure-then-encrypt semantics.
    """
    register = list(range(side_qubits, side_qubits + message_bits))
    branches = []
    for m in BitString.all_strings(message_bits):
        block, prob = project_register(gen_state, register, m)
        if prob <= TOL:
            continue
        branches.append((m, prob, DensityOperator(block / prob)))
    return branches


@functools.lru_cache(maxsize=None)
def _qubit_reorder(old_order_groups: tuple[int, ...], new_order: tuple[int, ...]) -> np.ndarray:
    """Gather map regrouping qubit blocks: entry k is the old row index that
    lands at new row k, so ``matrix[map, :]`` applies the reordering."""
    total = sum(old_order_groups)
    starts = np.cumsum((0,) + old_order_groups[:-1])
    new_positions = [0] * total
    target = 0
    for group in new_order:
        for offset in range(old_order_groups[group]):
            new_positions[starts[group] + offset] = target
            target += 1
    indices = np.arange(1 << total)
    forward = np.zeros_like(indices)
    for old_pos, new_pos in enumerate(new_positions):
        bit = (indices >> (total - 1 - old_pos)) & 1
        forward |= bit << (total - 1 - new_pos)
    gather = np.empty_like(forward)
    gather[forward] = indices
    return gather


class TransformedCloningAttack(CloningAttack):
    """Cloning attack built from a cloning-distinguishing attack.

    The split regenerates the prepared side state, records the sampled
    candidate message alongside each output register, and runs the original
    split.  Each decoder runs the original bit decoder and outputs the all
    zero string on 0 and the recorded candidate on 1.
    """

    def __init__(self, cd: CloningDistinguishingAttack):
        self.cd = cd
        self.name = f"transformed[{cd.name}]"
        self._split_cache: dict = {}
        self._povm_cache: dict = {}

    def check_scheme(self, scheme):
        if scheme.message_bits != self.cd.message_bits:
            raise UnsupportedAttackError(
                "message size of the scheme and the transformed attack differ"
            )

    def side_qubits(self, scheme):
        n = self.cd.message_bits
        return self.cd.b_qubits + n, self.cd.c_qubits + n

    def split_channel(self, scheme, classical_part):
        cache_key = (scheme.name, scheme.lam, scheme.message_bits, classical_part)
        cached = self._split_cache.get(cache_key)
        if cached is not None:
            return cached
        channel = self._build_split(scheme, classical_part)
        self._split_cache[cache_key] = channel
        return channel

    def _build_split(self, scheme, classical_part):
        cd = self.cd
        n = cd.message_bits
        inner = cd.split(scheme, classical_part)
        if inner.in_qubits != cd.side_qubits + scheme.quantum_cipher_qubits:
            raise ValueError("inner split does not accept (side, ciphertext)")
        t_dim = 1 << scheme.quantum_cipher_qubits
        reorder = _qubit_reorder(
            (cd.b_qubits, cd.c_qubits, n, n), (0, 2, 1, 3)
        )
        ops = []
        for m_prime, prob, sigma in cd.message_branches():
            tag = np.zeros(1 << (2 * n), dtype=complex)
            tag[m_prime.to_int() * (1 << n) + m_prime.to_int()] = 1.0
            vals, vecs = np.linalg.eigh(sigma.matrix)
            for value, vector in zip(vals, vecs.T):
                if value < TOL:
                    continue
                prep = math.sqrt(prob * max(value, 0.0)) * np.kron(
                    vector.reshape(-1, 1), np.eye(t_dim, dtype=complex)
                )
                for kraus in inner.kraus_ops:
                    lifted = np.kron(kraus @ prep, tag.reshape(-1, 1))
                    ops.append(lifted[reorder, :])
        return KrausChannel(ops)

    def decode_povm(self, side, scheme, key, classical_part):
        cache_key = (side, key, classical_part)
        cached = self._povm_cache.get(cache_key)
        if cached is not None:
            return cached
        cd = self.cd
        n = cd.message_bits
        inner = (cd.decode_b if side == "b" else cd.decode_c)(key, classical_part)
        f0, f1 = inner.elements[_BIT0], inner.elements[_BIT1]
        tag_dim = 1 << n
        eye_tag = np.eye(tag_dim, dtype=complex)
        elements = {}
        for m in BitString.all_strings(n):
            proj = np.zeros((tag_dim, tag_dim), dtype=complex)
            proj[m.to_int(), m.to_int()] = 1.0
            element = np.kron(f1, proj)
            if m.to_int() == 0:
                element = element + np.kron(f0, eye_tag)
            elements[m] = element
        povm = Povm(elements)
        self._povm_cache[cache_key] = povm
        return povm


def transform_cd_to_cloning(cd: CloningDistinguishingAttack) -> TransformedCloningAttack:
    return TransformedCloningAttack(cd)


def random_cloning_distinguishing_attack(
    scheme: QecmScheme,
    rng: np.random.Generator,
    side_qubits: int = 1,
    b_qubits: int = 1,
    c_qubits: int = 1,
) -> CloningDistinguishingAttack:
    """Random attack instance with key-indexed random bit decoders."""
    n = scheme.message_bits
    gen_state = random_density_operator(side_qubits + n, rng)
    split = random_kraus_channel(
        side_qubits + scheme.quantum_cipher_qubits, b_qubits + c_qubits, rng
    )
    bit_labels = [_BIT0, _BIT1]
    decoders_b = {
        key: random_povm(b_qubits, bit_labels, rng)
        for key, _ in scheme.enumerate_keys()
    }
    decoders_c = {
        key: random_povm(c_qubits, bit_labels, rng)
        for key, _ in scheme.enumerate_keys()
    }
    return CloningDistinguishingAttack(
        name=f"random-cd[{rng.integers(1 << 30)}]",
        side_qubits=side_qubits,
        b_qubits=b_qubits,
        c_qubits=c_qubits,
        message_bits=n,
        gen_state=gen_state,
        split=lambda scheme_, classical: split,
        decode_b=lambda key, classical: decoders_b[key],
        decode_c=lambda key, classical: decoders_c[key],
    )


def random_distinguishing_attack(
    scheme: QecmScheme, rng: np.random.Generator, side_qubits: int = 1
) -> DistinguishingAttack:
    n = scheme.message_bits
    gen_state = random_density_operator(side_qubits + n, rng)
    povm = random_povm(
        side_qubits + scheme.quantum_cipher_qubits, [_BIT0, _BIT1], rng
    )
    return DistinguishingAttack(
        name=f"random-dist[{rng.integers(1 << 30)}]",
        side_qubits=side_qubits,
        message_bits=n,
        gen_state=gen_state,
        guess_povm=lambda scheme_, classical: povm,
    )


# Monogamy-game strategies ----------------------------------------------------


def _check_raw_density(matrix: np.ndarray) -> None:
    if not np.allclose(matrix, matrix.conj().T, atol=TOL, rtol=0.0):
        raise ValueError("strategy state is not Hermitian")
    if abs(np.trace(matrix) - 1.0) > TOL:
        raise ValueError("strategy state does not have unit trace")
    if np.linalg.eigvalsh(matrix).min() < -TOL:
        raise ValueError("strategy state is not positive semidefinite")


def _check_raw_povm_family(
    povms: dict[BitString, dict[BitString, np.ndarray]], lam: int, dim: int
) -> None:
    thetas = set(BitString.all_strings(lam))
    if set(povms) != thetas:
        raise ValueError("strategy needs one POVM per basis string")
    outcomes = set(BitString.all_strings(lam))
    for theta, family in povms.items():
        if set(family) != outcomes:
            raise ValueError(f"POVM for basis {theta} must cover all outcomes")
        total = np.zeros((dim, dim), dtype=complex)
        for x, element in family.items():
            if element.shape != (dim, dim):
                raise ValueError("POVM element has the wrong dimension")
            if not np.allclose(element, element.conj().T, atol=TOL, rtol=0.0):
                raise ValueError("POVM element is not Hermitian")
            if np.linalg.eigvalsh(element).min() < -TOL:
                raise ValueError("POVM element is not positive semidefinite")
            total = total + element
        if not np.allclose(total, np.eye(dim), atol=TOL, rtol=0.0):
            raise ValueError(f"POVM for basis {theta} does not sum to identity")


@dataclass(frozen=True, eq=False)
class MoeStrategy:
    """State form: tripartite state plus basis-indexed guessing POVMs.

    Side registers may have arbitrary (not just qubit) dimensions, so the
    matrices are raw arrays validated with the usual tolerances.
    """

    lam: int
    dim_b: int
    dim_c: int
    rho: np.ndarray
    povms_b: dict[BitString, dict[BitString, np.ndarray]]
    povms_c: dict[BitString, dict[BitString, np.ndarray]]

    def __post_init__(self):
        dim_a = 1 << self.lam
        total = dim_a * self.dim_b * self.dim_c
        if self.rho.shape != (total, total):
            raise ValueError(f"state must be {total}x{total}")
        _check_raw_density(self.rho)
        _check_raw_povm_family(self.povms_b, self.lam, self.dim_b)
        _check_raw_povm_family(self.povms_c, self.lam, self.dim_c)


@dataclass(frozen=True, eq=False)
class MoeChannelStrategy:
    """Channel form: a splitting channel plus basis-indexed guessing POVMs."""

    lam: int
    dim_b: int
    dim_c: int
    split_kraus: tuple[np.ndarray, ...]
    povms_b: dict[BitString, dict[BitString, np.ndarray]]
    povms_c: dict[BitString, dict[BitString, np.ndarray]]

    def __post_init__(self):
        dim_in = 1 << self.lam
        dim_out = self.dim_b * self.dim_c
        ops = tuple(np.asarray(k, dtype=complex) for k in self.split_kraus)
        for k in ops:
            if k.shape != (dim_out, dim_in):
                raise ValueError("split Kraus operators have the wrong shape")
        completeness = sum(k.conj().T @ k for k in ops)
        if not np.allclose(completeness, np.eye(dim_in), atol=TOL, rtol=0.0):
            raise ValueError("split is not trace preserving")
        object.__setattr__(self, "split_kraus", ops)
        _check_raw_povm_family(self.povms_b, self.lam, self.dim_b)
        _check_raw_povm_family(self.povms_c, self.lam, self.dim_c)

    def split_apply(self, rho_in: np.ndarray) -> np.ndarray:
        out = np.zeros(
            (self.dim_b * self.dim_c, self.dim_b * self.dim_c), dtype=complex
        )
        for k in self.split_kraus:
            out += k @ rho_in @ k.conj().T
        return out


def moe_channel_to_state(strategy: MoeChannelStrategy) -> MoeStrategy:
    """Apply the split to the second half of a maximally entangled state."""
    lam = strategy.lam
    dim_a = 1 << lam
    epr = epr_state(lam).to_density().matrix
    lifted = [np.kron(np.eye(dim_a, dtype=complex), k) for k in strategy.split_kraus]
    rho = np.zeros(
        (dim_a * strategy.dim_b * strategy.dim_c,) * 2, dtype=complex
    )
    for k in lifted:
        rho += k @ epr @ k.conj().T
    return MoeStrategy(
        lam=lam,
        dim_b=strategy.dim_b,
        dim_c=strategy.dim_c,
        rho=rho,
        povms_b=strategy.povms_b,
        povms_c=strategy.povms_c,
    )


def breidbart_moe_strategy(lam: int) -> MoeChannelStrategy:
    """Measure in the intermediate basis and hand both sides the outcome."""
    dim = 1 << lam
    channel = _breidbart_split(lam)
    point_povms = {}
    for theta in BitString.all_strings(lam):
        family = {}
        for x in BitString.all_strings(lam):
            proj = np.zeros((dim, dim), dtype=complex)
            proj[x.to_int(), x.to_int()] = 1.0
            family[x] = proj
        point_povms[theta] = family
    return MoeChannelStrategy(
        lam=lam,
        dim_b=dim,
        dim_c=dim,
        split_kraus=channel.kraus_ops,
        povms_b=point_povms,
        povms_c=dict(point_povms),
    )


def random_moe_strategy(
    lam: int, dim_b: int, dim_c: int, rng: np.random.Generator
) -> MoeStrategy:
    dim_a = 1 << lam
    total = dim_a * dim_b * dim_c
    g = rng.normal(size=(total, total)) + 1j * rng.normal(size=(total, total))
    rho = g @ g.conj().T
    rho /= np.trace(rho)
    return MoeStrategy(
        lam=lam,
        dim_b=dim_b,
        dim_c=dim_c,
        rho=rho,
        povms_b=_random_raw_povm_family(lam, dim_b, rng),
        povms_c=_random_raw_povm_family(lam, dim_c, rng),
    )


def _random_raw_povm_family(
    lam: int, dim: int, rng: np.random.Generator
) -> dict[BitString, dict[BitString, np.ndarray]]:
    family = {}
    for theta in BitString.all_strings(lam):
        raw = {}
        for x in BitString.all_strings(lam):
            g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
            raw[x] = g @ g.conj().T
        total = sum(raw.values())
        vals, vecs = np.linalg.eigh(total)
        inv_sqrt = vecs @ np.diag(1.0 / np.sqrt(vals)) @ vecs.conj().T
        family[theta] = {x: inv_sqrt @ m @ inv_sqrt for x, m in raw.items()}
    return family


# Seesaw optimizer ------------------------------------------------------------


@dataclass
class SeesawResult:
    strategy: MoeStrategy
    value: float
    iterations: int
    converged: bool
    history: list[float] = field(default_factory=list)


def _wiesner_projectors(lam: int) -> dict[BitString, dict[BitString, np.ndarray]]:
    out = {}
    for theta in BitString.all_strings(lam):
        per_theta = {}
        for x in BitString.all_strings(lam):
            vec = wiesner_state(x, theta).amplitudes
            per_theta[x] = np.outer(vec, vec.conj())
        out[theta] = per_theta
    return out


def _moe_objective(lam, rho, projectors, povms_b, povms_c) -> float:
    theta_count = 1 << lam
    total = 0.0
    for theta, per_theta in projectors.items():
        for x, proj in per_theta.items():
            op = np.kron(proj, np.kron(povms_b[theta][x], povms_c[theta][x]))
            total += float(np.trace(op @ rho).real)
    return total / theta_count


def _conditional_operator(rho_t, proj, other_povm, optimize_b: bool) -> np.ndarray:
    # rho_t indexed as [a, b, c, a', b', c']; contract everything except the
    # register being optimized, so the objective term becomes Tr[E T].
    if optimize_b:
        t = np.einsum("abcdef,da,fc->be", rho_t, proj, other_povm)
    else:
        t = np.einsum("abcdef,da,eb->cf", rho_t, proj, other_povm)
    return (t + t.conj().T) / 2.0


def _pair_ascent_povm(
    family: dict[BitString, np.ndarray], targets: dict[BitString, np.ndarray]
) -> dict[BitString, np.ndarray]:
    """One sweep of two-outcome exchanges, each optimal for its pair budget."""
    labels = list(family)
    updated = {x: family[x].copy() for x in labels}
    for i in range(len(labels)):
        for j in range(i + 1, len(labels)):
            x1, x2 = labels[i], labels[j]
            budget = updated[x1] + updated[x2]
            vals, vecs = np.linalg.eigh(budget)
            root = vecs @ np.diag(np.sqrt(np.clip(vals, 0.0, None))) @ vecs.conj().T
            gap = root @ (targets[x1] - targets[x2]) @ root
            gvals, gvecs = np.linalg.eigh((gap + gap.conj().T) / 2.0)
            positive = gvecs[:, gvals > 0.0]
            projector = positive @ positive.conj().T
            first = root @ projector @ root
            first = (first + first.conj().T) / 2.0
            updated[x1] = first
            updated[x2] = (budget - first + (budget - first).conj().T) / 2.0
    return updated


def seesaw_optimize_moe(
    lam: int,
    dim_b: Optional[int] = None,
    dim_c: Optional[int] = None,
    iters: int = 200,
    tol: float = 1e-10,
    seed: int = 0,
) -> SeesawResult:
    """Alternating maximization over (state, B POVMs, C POVMs).

    The state step is exact (top eigenvector of the payoff operator); the
    POVM steps use pairwise exchanges that cannot decrease the objective,
    so the value is monotone across iterations.  Returns the best strategy
    found with a convergence flag; never raises on non-convergence.
    """
    if lam > 2:
        raise CapacityError("seesaw search is limited to lam <= 2")
    if lam < 1:
        raise ValueError("lam must be positive")
    if iters < 1:
        raise ValueError("iters must be positive")
    dim_b = (1 << lam) if dim_b is None else dim_b
    dim_c = (1 << lam) if dim_c is None else dim_c
    if dim_b < 1 or dim_c < 1:
        raise ValueError("side dimensions must be at least 1")

    rng = np.random.default_rng(seed)
    dim_a = 1 << lam
    projectors = _wiesner_projectors(lam)
    povms_b = _random_raw_povm_family(lam, dim_b, rng)
    povms_c = _random_raw_povm_family(lam, dim_c, rng)
    theta_count = 1 << lam
    shape = (dim_a, dim_b, dim_c, dim_a, dim_b, dim_c)

    rho = None
    history: list[float] = []
    converged = False
    iterations = 0
    for iteration in range(1, iters + 1):
        iterations = iteration
        # State step: top eigenvector of the payoff operator.
        payoff = np.zeros((dim_a * dim_b * dim_c,) * 2, dtype=complex)
        for theta, per_theta in projectors.items():
            for x, proj in per_theta.items():
                payoff += np.kron(
                    proj, np.kron(povms_b[theta][x], povms_c[theta][x])
                )
        payoff /= theta_count
        vals, vecs = np.linalg.eigh(payoff)
        top = vecs[:, -1]
        rho = np.outer(top, top.conj())
        value = float(vals[-1].real)
        if history:
            assert value >= history[-1] - 1e-9, "seesaw objective decreased"
            value = max(value, history[-1])
        history.append(value)
        if len(history) >= 2 and abs(history[-1] - history[-2]) < tol:
            converged = True
            break

        # POVM steps given the new state.
        rho_t = rho.reshape(shape)
        for theta in projectors:
            targets_b = {
                x: _conditional_operator(
                    rho_t, projectors[theta][x], povms_c[theta][x], True
                )
                for x in projectors[theta]
            }
            povms_b[theta] = _pair_ascent_povm(povms_b[theta], targets_b)
        for theta in projectors:
            targets_c = {
                x: _conditional_operator(
                    rho_t, projectors[theta][x], povms_b[theta][x], False
                )
                for x in projectors[theta]
            }
            povms_c[theta] = _pair_ascent_povm(povms_c[theta], targets_c)

    strategy = MoeStrategy(
        lam=lam,
        dim_b=dim_b,
        dim_c=dim_c,
        rho=rho,
        povms_b=povms_b,
        povms_c=povms_c,
    )
    return SeesawResult(
        strategy=strategy,
        value=history[-1],
        iterations=iterations,
        converged=converged,
        history=history,
    )
