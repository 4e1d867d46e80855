"""Quantum encryptions of classical messages: key-gen/enc/dec triples.

Three schemes are provided:

* ``one_time_pad`` - classical XOR baseline; its ciphertexts can be
  copied freely, which is exactly what the cloning games demonstrate.
* ``conjugate_encryption`` - one-time pad carried by conjugate-coded
  qubits: message m becomes the product state of (m xor r) in bases theta.
* ``f_conjugate_encryption`` - a random payload x is conjugate-coded and
  the message is masked with f(s, x); f is either the keyed PRF or an
  externally supplied random oracle, selected per scheme instance.

Ciphertexts keep their classical part and a provenance description of the
quantum part (payload bits + bases) so that exact evaluators can rebuild
the state and Monte Carlo evaluators can sample single-qubit measurements
without materializing large registers.  Attack code must only touch the
quantum part through ``quantum_state``/``sample_product_measurement``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterator, NamedTuple, Optional, Sequence, Union

import numpy as np

from .oracle import QprfKey, RandomOracle, qprf_oracle
from .quantum import (
    BitString,
    DensityOperator,
    Povm,
    PureState,
    measure,
    wiesner_state,
)

_BREIDBART_ANGLE = math.pi / 8


class CeKey(NamedTuple):
    r: BitString
    theta: BitString


class FceKey(NamedTuple):
    s: BitString
    theta: BitString


Key = Union[BitString, CeKey, FceKey]


def _state_angle(bit: int, basis: int) -> float:
    """Bloch-circle angle of a conjugate-coded qubit (real amplitudes)."""
    if basis == 0:
        return 0.0 if bit == 0 else math.pi / 2
    return math.pi / 4 if bit == 0 else -math.pi / 4


@dataclass(frozen=True)
class Ciphertext:
    """Hybrid ciphertext: optional classical bits plus a conjugate-coded register."""

    classical_part: Optional[BitString]
    quantum_x: Optional[BitString] = None
    quantum_theta: Optional[BitString] = None

    def __post_init__(self):
        has_x = self.quantum_x is not None
        has_theta = self.quantum_theta is not None
        if has_x != has_theta:
            raise ValueError("quantum payload and bases must be given together")
        if has_x and len(self.quantum_x) != len(self.quantum_theta):
            raise ValueError("quantum payload and bases must have equal length")

    @property
    def quantum_qubits(self) -> int:
        return 0 if self.quantum_x is None else len(self.quantum_x)

    def quantum_state(self) -> PureState:
        if self.quantum_x is None:
            return PureState([1.0])
        return wiesner_state(self.quantum_x, self.quantum_theta)

    def quantum_density(self) -> DensityOperator:
        return self.quantum_state().to_density()

    def sample_product_measurement(
        self, angles: Sequence[float], rng: np.random.Generator
    ) -> BitString:
        """Measure each qubit in the basis {cos a|0>+sin a|1>, sin a|0>-cos a|1>}."""
        if self.quantum_x is None:
            raise ValueError("ciphertext has no quantum part")
        if len(angles) != self.quantum_qubits:
            raise ValueError("need one basis angle per qubit")
        outcome = []
        for angle, bit, basis in zip(angles, self.quantum_x, self.quantum_theta):
            p0 = math.cos(angle - _state_angle(bit, basis)) ** 2
            outcome.append(0 if rng.random() < p0 else 1)
        return BitString(outcome)


@dataclass(frozen=True)
class QecmScheme:
    """Descriptor bundling the key-gen/enc/dec triple with declared sizes."""

    name: str
    lam: int
    message_bits: int
    key_bits: int
    quantum_cipher_qubits: int
    classical_cipher_bits: int
    key_gen: Callable[[np.random.Generator], Key]
    enc: Callable[[Key, BitString, np.random.Generator], Ciphertext]
    dec: Callable[[Key, Ciphertext, np.random.Generator], BitString]
    dec_distribution: Callable[[Key, Ciphertext], dict[BitString, float]]
    enumerate_keys: Callable[[], Iterator[tuple[Key, float]]]
    enumerate_encryptions: Callable[[Key, BitString], Iterator[tuple[Ciphertext, float]]]
    uncloneable_t: Optional[float] = None
    prf_mode: Optional[str] = None  # None, "qprf", or "oracle"
    oracle: Optional[RandomOracle] = None

    @property
    def cipher_bits_total(self) -> int:
        return self.quantum_cipher_qubits + self.classical_cipher_bits

    def with_oracle(self, oracle: RandomOracle) -> "QecmScheme":
        if self.prf_mode != "oracle":
            raise ValueError(f"{self.name} is not an oracle-model scheme")
        return f_conjugate_encryption(self.lam, self.message_bits, prf=oracle)


# Conjugate encryption ------------------------------------------------------


def ce_keygen(lam: int, rng: np.random.Generator) -> CeKey:
    """Uniform independent pad and basis strings, lam bits each."""
    if lam < 1:
        raise ValueError("lam must be positive")
    return CeKey(BitString.random(lam, rng), BitString.random(lam, rng))


def ce_enc(key: CeKey, m: BitString) -> Ciphertext:
    r, theta = key
    if not (len(m) == len(r) == len(theta)):
        raise ValueError("message and key components must have equal length")
    return Ciphertext(None, quantum_x=m ^ r, quantum_theta=theta)


def ce_dec(key: CeKey, ct: Ciphertext, rng: np.random.Generator) -> BitString:
    r, theta = key
    if ct.quantum_qubits != len(theta):
        raise ValueError(
            f"ciphertext has {ct.quantum_qubits} qubits, key expects {len(theta)}"
        )
    angles = [_state_angle(0, t) for t in theta]
    c = ct.sample_product_measurement(angles, rng)
    return c ^ r


def ce_dec_distribution(
    key: CeKey, ct: Union[Ciphertext, DensityOperator]
) -> dict[BitString, float]:
    """Exact decryption distribution via the basis-theta POVM.

    Accepts an explicit DensityOperator so superposed or mixed ciphertext
    registers decode through the full outcome distribution.
    """
    r, theta = key
    rho = ct if isinstance(ct, DensityOperator) else ct.quantum_density()
    if rho.qubit_count != len(theta):
        raise ValueError(
            f"ciphertext has {rho.qubit_count} qubits, key expects {len(theta)}"
        )
    probs = measure(rho, Povm.wiesner_basis(theta))
    return {c ^ r: p for c, p in probs.items()}


def conjugate_encryption(lam: int) -> QecmScheme:
    if lam < 1:
        raise ValueError("lam must be positive")

    def enumerate_keys():
        weight = 1.0 / (1 << (2 * lam))
        for r in BitString.all_strings(lam):
            for theta in BitString.all_strings(lam):
                yield CeKey(r, theta), weight

    def enumerate_encryptions(key, m):
        yield ce_enc(key, m), 1.0

    return QecmScheme(
        name="ce",
        lam=lam,
        message_bits=lam,
        key_bits=2 * lam,
        quantum_cipher_qubits=lam,
        classical_cipher_bits=0,
        key_gen=lambda rng: ce_keygen(lam, rng),
        enc=lambda key, m, rng: ce_enc(key, m),
        dec=ce_dec,
        dec_distribution=ce_dec_distribution,
        enumerate_keys=enumerate_keys,
        enumerate_encryptions=enumerate_encryptions,
        uncloneable_t=lam * math.log2(1.0 + 1.0 / math.sqrt(2.0)),
    )


# PRF-masked conjugate encryption -------------------------------------------


def fce_keygen(lam: int, rng: np.random.Generator) -> FceKey:
    """Uniform independent PRF-key and basis strings, lam bits each."""
    if lam < 1:
        raise ValueError("lam must be positive")
    return FceKey(BitString.random(lam, rng), BitString.random(lam, rng))


def _resolve_prf(
    prf: Union[RandomOracle, QprfKey, None], s: BitString, out_bits: int
) -> RandomOracle:
    if isinstance(prf, RandomOracle):
        if prf.in_bits != len(s) or prf.out_bits != out_bits:
            raise ValueError("oracle signature does not match scheme parameters")
        return prf
    if isinstance(prf, QprfKey):
        return qprf_oracle(prf, len(s), out_bits)
    if prf is None:
        return qprf_oracle(QprfKey(s), len(s), out_bits)
    raise ValueError(f"unsupported prf source: {prf!r}")


def fce_enc(
    key: FceKey,
    m: BitString,
    prf: Union[RandomOracle, QprfKey, None],
    rng: np.random.Generator,
) -> Ciphertext:
    s, theta = key
    fn = _resolve_prf(prf, s, len(m))
    x = BitString.random(len(s), rng)
    return Ciphertext(m ^ fn.evaluate(x), quantum_x=x, quantum_theta=theta)


def fce_dec(
    key: FceKey,
    ct: Ciphertext,
    prf: Union[RandomOracle, QprfKey, None],
    rng: np.random.Generator,
) -> BitString:
    s, theta = key
    if ct.classical_part is None or ct.quantum_qubits != len(theta):
        raise ValueError("malformed ciphertext for this scheme")
    fn = _resolve_prf(prf, s, len(ct.classical_part))
    angles = [_state_angle(0, t) for t in theta]
    recovered = ct.sample_product_measurement(angles, rng)
    return ct.classical_part ^ fn.evaluate(recovered)


def f_conjugate_encryption(
    lam: int,
    message_bits: Optional[int] = None,
    prf: Union[RandomOracle, str] = "qprf",
) -> QecmScheme:
    """PRF-masked scheme.  ``prf="qprf"`` uses the keyed XOF with the key's s
    component; passing a RandomOracle evaluates that oracle instead (the
    oracle model), in which case s plays no role in masking."""
    if lam < 1:
        raise ValueError("lam must be positive")
    n = lam if message_bits is None else message_bits
    if n < 1:
        raise ValueError("message_bits must be positive")

    if isinstance(prf, RandomOracle):
        mode = "oracle"
        oracle: Optional[RandomOracle] = prf
        if oracle.in_bits != lam or oracle.out_bits != n:
            raise ValueError("oracle signature does not match scheme parameters")
    elif prf == "qprf":
        mode, oracle = "qprf", None
    else:
        raise ValueError(f"prf must be 'qprf' or a RandomOracle, got {prf!r}")

    def prf_for(key: FceKey) -> RandomOracle:
        return oracle if oracle is not None else qprf_oracle(QprfKey(key.s), lam, n)

    def enumerate_keys():
        weight = 1.0 / (1 << (2 * lam))
        for s in BitString.all_strings(lam):
            for theta in BitString.all_strings(lam):
                yield FceKey(s, theta), weight

    def enumerate_encryptions(key, m):
        fn = prf_for(key)
        weight = 1.0 / (1 << lam)
        for x in BitString.all_strings(lam):
            yield Ciphertext(m ^ fn.evaluate(x), x, key.theta), weight

    return QecmScheme(
        name="fce",
        lam=lam,
        message_bits=n,
        key_bits=2 * lam,
        quantum_cipher_qubits=lam,
        classical_cipher_bits=n,
        key_gen=lambda rng: fce_keygen(lam, rng),
        enc=lambda key, m, rng: fce_enc(key, m, prf_for(key), rng),
        dec=lambda key, ct, rng: fce_dec(key, ct, prf_for(key), rng),
        dec_distribution=lambda key, ct: _fce_dec_distribution(key, ct, prf_for(key)),
        enumerate_keys=enumerate_keys,
        enumerate_encryptions=enumerate_encryptions,
        uncloneable_t=math.log2(9.0) if mode == "oracle" else None,
        prf_mode=mode,
        oracle=oracle,
    )


def _fce_dec_distribution(
    key: FceKey, ct: Ciphertext, fn: RandomOracle
) -> dict[BitString, float]:
    s, theta = key
    if ct.classical_part is None or ct.quantum_qubits != len(theta):
        raise ValueError("malformed ciphertext for this scheme")
    probs = measure(ct.quantum_density(), Povm.wiesner_basis(theta))
    out: dict[BitString, float] = {}
    for recovered, p in probs.items():
        m = ct.classical_part ^ fn.evaluate(recovered)
        out[m] = out.get(m, 0.0) + p
    return out


# Classical one-time pad -----------------------------------------------------


def otp_classical(lam: int) -> QecmScheme:
    """Classical XOR baseline; everything lives in the classical part."""
    if lam < 1:
        raise ValueError("lam must be positive")

    def keygen(rng):
        return BitString.random(lam, rng)

    def enc(key, m, rng):
        if len(m) != lam:
            raise ValueError("message length must equal lam")
        return Ciphertext(m ^ key)

    def dec(key, ct, rng=None):
        return ct.classical_part ^ key

    def dec_distribution(key, ct):
        return {ct.classical_part ^ key: 1.0}

    def enumerate_keys():
        weight = 1.0 / (1 << lam)
        for k in BitString.all_strings(lam):
            yield k, weight

    def enumerate_encryptions(key, m):
        yield Ciphertext(m ^ key), 1.0

    return QecmScheme(
        name="otp",
        lam=lam,
        message_bits=lam,
        key_bits=lam,
        quantum_cipher_qubits=0,
        classical_cipher_bits=lam,
        key_gen=keygen,
        enc=enc,
        dec=dec,
        dec_distribution=dec_distribution,
        enumerate_keys=enumerate_keys,
        enumerate_encryptions=enumerate_encryptions,
        uncloneable_t=float(lam),
    )


def average_ciphertext(scheme: QecmScheme, m: BitString) -> DensityOperator:
    """Key- and randomness-averaged quantum part of Enc(m) (exact)."""
    total = None
    for key, pk in scheme.enumerate_keys():
        for ct, pe in scheme.enumerate_encryptions(key, m):
            rho = ct.quantum_density().matrix * (pk * pe)
            total = rho if total is None else total + rho
    return DensityOperator(total)
