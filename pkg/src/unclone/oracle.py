"""Quantum-accessible random oracle and a concrete keyed PRF instantiation.

An oracle value is a pure function of (seed, patches, input): each table
entry is derived as a keyed XOF digest of the input, so the full table is
never materialized and evaluation order cannot matter.  Reprogramming a
point returns a new oracle; originals are never mutated.

Coherent (superposition) queries apply the permutation
|x>|y> -> |x>|y xor H(x)> to a pure state's amplitudes and are only
feasible within the exact-simulation qubit cap.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from typing import Mapping, Sequence, Union

import numpy as np

from .quantum import MAX_QUBITS, BitString, CapacityError, PureState

_SEED_BYTES = 32


def _bits_to_bytes(bits: BitString) -> bytes:
    # Length prefix keeps distinct-length inputs from colliding.
    width = (len(bits) + 7) // 8
    return len(bits).to_bytes(4, "big") + bits.to_int().to_bytes(max(width, 1), "big")


def _digest_bits(material: bytes, out_bits: int) -> BitString:
    digest = hashlib.shake_256(material).digest((out_bits + 7) // 8)
    value = int.from_bytes(digest, "big") >> (len(digest) * 8 - out_bits)
    return BitString.from_int(value, out_bits)


def _normalize_seed(seed: Union[int, bytes]) -> bytes:
    if isinstance(seed, bytes):
        return hashlib.sha256(seed).digest()
    return hashlib.sha256(int(seed).to_bytes(16, "big", signed=True)).digest()


@dataclass(frozen=True)
class RandomOracle:
    """Seeded lazy function {0,1}^in_bits -> {0,1}^out_bits with point patches."""

    seed: bytes
    in_bits: int
    out_bits: int
    patches: Mapping[BitString, BitString] = field(default_factory=dict)

    def __post_init__(self):
        if self.in_bits < 1 or self.out_bits < 1:
            raise ValueError("in_bits and out_bits must be positive")
        if len(self.seed) != _SEED_BYTES:
            raise ValueError(f"seed must be {_SEED_BYTES} bytes")
        for x, y in self.patches.items():
            if len(x) != self.in_bits or len(y) != self.out_bits:
                raise ValueError("patch sizes do not match oracle signature")
        object.__setattr__(self, "patches", dict(self.patches))

    def evaluate(self, x: BitString) -> BitString:
        if len(x) != self.in_bits:
            raise ValueError(f"input has {len(x)} bits, oracle expects {self.in_bits}")
        patched = self.patches.get(x)
        if patched is not None:
            return patched
        return _digest_bits(b"oracle:" + self.seed + _bits_to_bytes(x), self.out_bits)

    def reprogram(self, x: BitString, y: BitString) -> "RandomOracle":
        if len(x) != self.in_bits or len(y) != self.out_bits:
            raise ValueError("reprogrammed point does not match oracle signature")
        patches = dict(self.patches)
        patches[x] = y
        return RandomOracle(self.seed, self.in_bits, self.out_bits, patches)

    def table(self) -> dict[BitString, BitString]:
        """Full function table; only sensible for small in_bits."""
        if self.in_bits > 20:
            raise CapacityError("refusing to materialize a table beyond 2^20 entries")
        return {x: self.evaluate(x) for x in BitString.all_strings(self.in_bits)}


def oracle_new(seed: Union[int, bytes], in_bits: int, out_bits: int) -> RandomOracle:
    return RandomOracle(_normalize_seed(seed), in_bits, out_bits)


def oracle_from_table(
    table: Mapping[BitString, BitString], in_bits: int, out_bits: int
) -> RandomOracle:
    """Fully explicit oracle: every point of the domain is a patch."""
    if set(table.keys()) != set(BitString.all_strings(in_bits)):
        raise ValueError("table must cover the whole domain")
    return RandomOracle(_normalize_seed(b"table"), in_bits, out_bits, dict(table))


def oracle_eval(oracle: RandomOracle, x: BitString) -> BitString:
    return oracle.evaluate(x)


def reprogram(oracle: RandomOracle, x: BitString, y: BitString) -> RandomOracle:
    return oracle.reprogram(x, y)


@dataclass(frozen=True)
class QprfKey:
    """Key for the keyed-XOF pseudorandom function."""

    bits: BitString

    def __len__(self) -> int:
        return len(self.bits)


def qprf_oracle(key: QprfKey, in_bits: int, out_bits: int) -> RandomOracle:
    """Wrap a PRF key as a RandomOracle so schemes stay oracle-generic."""
    seed = hashlib.sha256(b"qprf:" + _bits_to_bytes(key.bits)).digest()
    return RandomOracle(seed, in_bits, out_bits)


def qprf_eval(key: QprfKey, x: BitString, out_bits: int) -> BitString:
    if len(key) != len(x):
        raise ValueError(f"key has {len(key)} bits, input has {len(x)}")
    return qprf_oracle(key, len(x), out_bits).evaluate(x)


def oracle_unitary_apply(
    oracle: RandomOracle,
    state: PureState,
    query_qubits: Sequence[int],
    response_qubits: Sequence[int],
) -> PureState:
    """Apply the query unitary |x>|y> -> |x>|y xor H(x)> coherently."""
    query = [int(i) for i in query_qubits]
    response = [int(i) for i in response_qubits]
    q = state.qubit_count
    if len(query) != oracle.in_bits or len(response) != oracle.out_bits:
        raise ValueError("register sizes do not match the oracle signature")
    if set(query) & set(response):
        raise ValueError("query and response registers must be disjoint")
    if any(i < 0 or i >= q for i in query + response):
        raise ValueError(f"register indices must lie in [0, {q})")
    if q > MAX_QUBITS:
        raise CapacityError(f"{q} qubits exceeds the cap of {MAX_QUBITS}")

    # Qubit i holds bit (index >> (q - 1 - i)) & 1 under the MSB-first layout.
    shifts = [q - 1 - i for i in query]
    response_shifts = [q - 1 - i for i in response]
    indices = np.arange(1 << q)
    x_values = np.zeros(1 << q, dtype=np.int64)
    for position, shift in enumerate(shifts):
        bit = (indices >> shift) & 1
        x_values |= bit << (oracle.in_bits - 1 - position)

    # XOR mask per possible query value, spread over the response positions.
    masks = np.zeros(1 << oracle.in_bits, dtype=np.int64)
    for x_int in range(1 << oracle.in_bits):
        h = oracle.evaluate(BitString.from_int(x_int, oracle.in_bits))
        mask = 0
        for position, shift in enumerate(response_shifts):
            mask |= h[position] << shift
        masks[x_int] = mask

    targets = indices ^ masks[x_values]
    new_amps = np.zeros_like(state.amplitudes)
    new_amps[targets] = state.amplitudes
    return PureState(new_amps)
