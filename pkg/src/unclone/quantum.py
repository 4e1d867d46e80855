"""Exact finite-dimensional quantum arithmetic for multi-qubit registers.

States, channels and measurements are dense complex128 arrays.  Register
convention: qubit 0 is the first tensor factor and maps to the most
significant bit of the amplitude index, so ``|01>`` is index 1 on two
qubits.  All values are immutable after construction; every invariant
(normalization, positivity, trace preservation, POVM completeness) is
checked at construction time with an absolute tolerance of ``TOL``.

Registers are capped at ``MAX_QUBITS`` qubits; exact simulation beyond
that is out of scope and raises :class:`CapacityError`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Sequence, Union

import numpy as np

TOL = 1e-9
MAX_QUBITS = 14

_SQRT2_INV = 1.0 / math.sqrt(2.0)
HADAMARD = np.array([[_SQRT2_INV, _SQRT2_INV], [_SQRT2_INV, -_SQRT2_INV]], dtype=complex)
IDENTITY_1Q = np.eye(2, dtype=complex)


class CapacityError(Exception):
    """Raised when an exact computation would exceed the register cap."""


def _check_qubit_budget(qubits: int) -> None:
    if qubits > MAX_QUBITS:
        raise CapacityError(
            f"{qubits} qubits exceeds the exact-simulation cap of {MAX_QUBITS}"
        )


def _freeze(array: np.ndarray) -> np.ndarray:
    out = np.array(array, dtype=complex)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class BitString:
    """Fixed-length sequence of bits; position 0 is the most significant."""

    bits: tuple[int, ...]

    def __init__(self, bits: Union[str, Iterable[int]]):
        if isinstance(bits, str):
            values = tuple(int(b) for b in bits)
        else:
            values = tuple(int(b) for b in bits)
        if any(b not in (0, 1) for b in values):
            raise ValueError(f"bits must be 0 or 1, got {values!r}")
        object.__setattr__(self, "bits", values)

    @classmethod
    def zeros(cls, length: int) -> "BitString":
        return cls((0,) * length)

    @classmethod
    def ones(cls, length: int) -> "BitString":
        return cls((1,) * length)

    @classmethod
    def from_int(cls, value: int, length: int) -> "BitString":
        if value < 0 or value >= (1 << length):
            raise ValueError(f"{value} does not fit in {length} bits")
        return cls(tuple((value >> (length - 1 - i)) & 1 for i in range(length)))

    @classmethod
    def random(cls, length: int, rng: np.random.Generator) -> "BitString":
        return cls(tuple(int(b) for b in rng.integers(0, 2, size=length)))

    @classmethod
    def all_strings(cls, length: int) -> Iterator["BitString"]:
        for value in range(1 << length):
            yield cls.from_int(value, length)

    def to_int(self) -> int:
        out = 0
        for b in self.bits:
            out = (out << 1) | b
        return out

    def weight(self) -> int:
        return sum(self.bits)

    def concat(self, other: "BitString") -> "BitString":
        return BitString(self.bits + other.bits)

    def __xor__(self, other: "BitString") -> "BitString":
        if len(self) != len(other):
            raise ValueError(
                f"XOR requires equal lengths, got {len(self)} and {len(other)}"
            )
        return BitString(tuple(a ^ b for a, b in zip(self.bits, other.bits)))

    def __len__(self) -> int:
        return len(self.bits)

    def __iter__(self) -> Iterator[int]:
        return iter(self.bits)

    def __getitem__(self, index):
        if isinstance(index, slice):
            return BitString(self.bits[index])
        return self.bits[index]

    def __str__(self) -> str:
        return "".join(str(b) for b in self.bits)

    def __repr__(self) -> str:
        return f"BitString('{self}')"


@dataclass(frozen=True, eq=False)
class PureState:
    """Unit vector over ``2**qubit_count`` computational basis amplitudes."""

    amplitudes: np.ndarray
    qubit_count: int = field(init=False)

    def __init__(self, amplitudes: Sequence[complex]):
        amps = _freeze(np.asarray(amplitudes, dtype=complex).reshape(-1))
        dim = amps.shape[0]
        qubits = dim.bit_length() - 1
        if dim != (1 << qubits):
            raise ValueError(f"amplitude vector length {dim} is not a power of two")
        _check_qubit_budget(qubits)
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > TOL:
            raise ValueError(f"state norm {norm} differs from 1 beyond tolerance")
        object.__setattr__(self, "amplitudes", amps)
        object.__setattr__(self, "qubit_count", qubits)

    @property
    def dim(self) -> int:
        return self.amplitudes.shape[0]

    def to_density(self) -> "DensityOperator":
        return DensityOperator(np.outer(self.amplitudes, self.amplitudes.conj()))

    def inner(self, other: "PureState") -> complex:
        return complex(np.vdot(self.amplitudes, other.amplitudes))


@dataclass(frozen=True, eq=False)
class DensityOperator:
    """Positive unit-trace operator on a qubit register."""

    matrix: np.ndarray
    qubit_count: int = field(init=False)

    def __init__(self, matrix: np.ndarray):
        mat = _freeze(np.asarray(matrix, dtype=complex))
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise ValueError(f"density matrix must be square, got shape {mat.shape}")
        dim = mat.shape[0]
        qubits = dim.bit_length() - 1
        if dim != (1 << qubits):
            raise ValueError(f"dimension {dim} is not a power of two")
        _check_qubit_budget(qubits)
        if not np.allclose(mat, mat.conj().T, atol=TOL, rtol=0.0):
            raise ValueError("density matrix is not Hermitian within tolerance")
        trace = complex(np.trace(mat))
        if abs(trace - 1.0) > TOL:
            raise ValueError(f"trace {trace} differs from 1 beyond tolerance")
        eigenvalues = np.linalg.eigvalsh(mat)
        if eigenvalues.min() < -TOL:
            raise ValueError(
                f"density matrix has negative eigenvalue {eigenvalues.min()}"
            )
        object.__setattr__(self, "matrix", mat)
        object.__setattr__(self, "qubit_count", qubits)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def trace(self) -> float:
        return float(np.trace(self.matrix).real)


@dataclass(frozen=True, eq=False)
class KrausChannel:
    """CPTP map given by Kraus operators from in_qubits to out_qubits."""

    kraus_ops: tuple[np.ndarray, ...]
    in_qubits: int = field(init=False)
    out_qubits: int = field(init=False)

    def __init__(self, kraus_ops: Sequence[np.ndarray]):
        if len(kraus_ops) == 0:
            raise ValueError("a channel needs at least one Kraus operator")
        ops = tuple(_freeze(np.asarray(k, dtype=complex)) for k in kraus_ops)
        rows, cols = ops[0].shape
        for k in ops:
            if k.shape != (rows, cols):
                raise ValueError("all Kraus operators must share one shape")
        in_q = cols.bit_length() - 1
        out_q = rows.bit_length() - 1
        if cols != (1 << in_q) or rows != (1 << out_q):
            raise ValueError(f"Kraus shape {(rows, cols)} is not qubit-shaped")
        _check_qubit_budget(max(in_q, out_q))
        completeness = sum(k.conj().T @ k for k in ops)
        if not np.allclose(completeness, np.eye(cols), atol=TOL, rtol=0.0):
            raise ValueError("Kraus operators do not satisfy sum K†K = I")
        object.__setattr__(self, "kraus_ops", ops)
        object.__setattr__(self, "in_qubits", in_q)
        object.__setattr__(self, "out_qubits", out_q)

    def apply(self, rho: DensityOperator) -> DensityOperator:
        return apply_channel(self, rho)

    @classmethod
    def from_unitary(cls, unitary: np.ndarray) -> "KrausChannel":
        return cls([unitary])

    @classmethod
    def identity(cls, qubits: int) -> "KrausChannel":
        return cls([np.eye(1 << qubits, dtype=complex)])


@dataclass(frozen=True, eq=False)
class Povm:
    """Measurement as positive elements, labelled by BitStrings, summing to I."""

    elements: Mapping[BitString, np.ndarray]
    qubit_count: int = field(init=False)

    def __init__(self, elements: Mapping[BitString, np.ndarray]):
        if len(elements) == 0:
            raise ValueError("a POVM needs at least one element")
        frozen: dict[BitString, np.ndarray] = {}
        dim = None
        for label, mat in elements.items():
            arr = _freeze(np.asarray(mat, dtype=complex))
            if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
                raise ValueError("POVM elements must be square matrices")
            if dim is None:
                dim = arr.shape[0]
            elif arr.shape[0] != dim:
                raise ValueError("POVM elements must share one dimension")
            if not np.allclose(arr, arr.conj().T, atol=TOL, rtol=0.0):
                raise ValueError(f"element {label} is not Hermitian")
            if np.linalg.eigvalsh(arr).min() < -TOL:
                raise ValueError(f"element {label} is not positive semidefinite")
            frozen[label] = arr
        qubits = dim.bit_length() - 1
        if dim != (1 << qubits):
            raise ValueError(f"dimension {dim} is not a power of two")
        total = sum(frozen.values())
        if not np.allclose(total, np.eye(dim), atol=TOL, rtol=0.0):
            raise ValueError("POVM elements do not sum to the identity")
        object.__setattr__(self, "elements", dict(frozen))
        object.__setattr__(self, "qubit_count", qubits)

    @property
    def dim(self) -> int:
        return 1 << self.qubit_count

    @classmethod
    def computational(cls, qubits: int) -> "Povm":
        dim = 1 << qubits
        elements = {}
        for label in BitString.all_strings(qubits):
            proj = np.zeros((dim, dim), dtype=complex)
            proj[label.to_int(), label.to_int()] = 1.0
            elements[label] = proj
        return cls(elements)

    @classmethod
    def wiesner_basis(cls, theta: BitString) -> "Povm":
        """Projective measurement in the basis selected per qubit by theta."""
        elements = {}
        for label in BitString.all_strings(len(theta)):
            vec = wiesner_state(label, theta).amplitudes
            elements[label] = np.outer(vec, vec.conj())
        return cls(elements)


def basis_state(bits: BitString) -> PureState:
    amps = np.zeros(1 << len(bits), dtype=complex)
    amps[bits.to_int()] = 1.0
    return PureState(amps)


def wiesner_state(x: BitString, theta: BitString) -> PureState:
    """Product state encoding bit x_i in the computational (theta_i = 0)
    or Hadamard (theta_i = 1) basis."""
    if len(x) != len(theta):
        raise ValueError(f"length mismatch: |x| = {len(x)}, |theta| = {len(theta)}")
    if len(x) == 0:
        raise ValueError("need at least one qubit")
    _check_qubit_budget(len(x))
    amps = np.ones(1, dtype=complex)
    for xi, ti in zip(x, theta):
        column = np.zeros(2, dtype=complex)
        column[xi] = 1.0
        if ti:
            column = HADAMARD @ column
        amps = np.kron(amps, column)
    return PureState(amps)


def epr_state(n: int) -> PureState:
    """Maximally entangled state on 2n qubits; qubits 0..n-1 form register A."""
    if n < 1:
        raise ValueError("n must be positive")
    _check_qubit_budget(2 * n)
    dim = 1 << n
    amps = np.zeros(dim * dim, dtype=complex)
    for x in range(dim):
        amps[x * dim + x] = 1.0
    return PureState(amps / math.sqrt(dim))


def tensor(a, b):
    """Kronecker product of two states of the same kind; a's qubits come first."""
    if isinstance(a, PureState) and isinstance(b, PureState):
        _check_qubit_budget(a.qubit_count + b.qubit_count)
        return PureState(np.kron(a.amplitudes, b.amplitudes))
    if isinstance(a, DensityOperator) and isinstance(b, DensityOperator):
        _check_qubit_budget(a.qubit_count + b.qubit_count)
        return DensityOperator(np.kron(a.matrix, b.matrix))
    raise ValueError(
        f"tensor requires two values of the same kind, got {type(a).__name__} "
        f"and {type(b).__name__}"
    )


def partial_trace(rho: DensityOperator, keep: Iterable[int]) -> DensityOperator:
    """Reduced state on the kept qubits (0-based indices), order preserved."""
    q = rho.qubit_count
    keep_list = sorted(set(int(i) for i in keep))
    if any(i < 0 or i >= q for i in keep_list):
        raise ValueError(f"keep indices must lie in [0, {q}), got {keep_list}")
    drop = [i for i in range(q) if i not in keep_list]
    tensor_form = rho.matrix.reshape([2] * (2 * q))
    for offset, axis in enumerate(drop):
        # Axes shift left by one row/column pair per already-traced qubit.
        row = axis - offset
        tensor_form = np.trace(tensor_form, axis1=row, axis2=row + q - offset)
    kept = len(keep_list)
    return DensityOperator(tensor_form.reshape(1 << kept, 1 << kept))


def apply_channel(channel: KrausChannel, rho: DensityOperator) -> DensityOperator:
    if rho.qubit_count != channel.in_qubits:
        raise ValueError(
            f"channel expects {channel.in_qubits} qubits, state has {rho.qubit_count}"
        )
    out_dim = 1 << channel.out_qubits
    out = np.zeros((out_dim, out_dim), dtype=complex)
    for k in channel.kraus_ops:
        out += k @ rho.matrix @ k.conj().T
    return DensityOperator(out)


def measure(rho: DensityOperator, povm: Povm) -> dict[BitString, float]:
    """Outcome probabilities Tr[E_y rho] for every POVM element."""
    if rho.qubit_count != povm.qubit_count:
        raise ValueError(
            f"POVM expects {povm.qubit_count} qubits, state has {rho.qubit_count}"
        )
    probs = {}
    for label, element in povm.elements.items():
        p = float(np.trace(element @ rho.matrix).real)
        probs[label] = min(max(p, 0.0), 1.0)
    total = sum(probs.values())
    if abs(total - 1.0) > TOL:
        raise ValueError(f"outcome probabilities sum to {total}, not 1")
    return probs


def sample_measurement(
    rho: DensityOperator, povm: Povm, rng: np.random.Generator
) -> BitString:
    """Draw one outcome from the POVM distribution using the given RNG."""
    probs = measure(rho, povm)
    labels = list(probs.keys())
    weights = np.array([probs[l] for l in labels])
    weights = weights / weights.sum()
    index = rng.choice(len(labels), p=weights)
    return labels[index]


def project_register(
    rho: DensityOperator, register: Sequence[int], bits: BitString
) -> tuple[np.ndarray, float]:
    """Project the given qubits onto |bits> and trace them out.

    Returns the unnormalized reduced matrix on the remaining qubits and
    the branch probability (its trace).
    """
    q = rho.qubit_count
    register = [int(i) for i in register]
    if len(register) != len(bits):
        raise ValueError("register and bits must have equal length")
    if any(i < 0 or i >= q for i in register):
        raise ValueError(f"register indices must lie in [0, {q})")
    tensor_form = rho.matrix.reshape([2] * (2 * q))
    index: list = [slice(None)] * (2 * q)
    for pos, bit in zip(register, bits):
        index[pos] = bit
        index[pos + q] = bit
    block = tensor_form[tuple(index)]
    kept = q - len(register)
    block = block.reshape(1 << kept, 1 << kept)
    prob = float(np.trace(block).real)
    return block, prob


def permute_qubits(rho: DensityOperator, permutation: Sequence[int]) -> DensityOperator:
    """Reorder qubits so output position i holds input qubit permutation[i]."""
    q = rho.qubit_count
    perm = [int(i) for i in permutation]
    if sorted(perm) != list(range(q)):
        raise ValueError(f"permutation must rearrange 0..{q - 1}, got {perm}")
    tensor_form = rho.matrix.reshape([2] * (2 * q))
    axes = perm + [p + q for p in perm]
    out = np.transpose(tensor_form, axes).reshape(1 << q, 1 << q)
    return DensityOperator(out)


def hadamard_layer(theta: BitString) -> np.ndarray:
    """Unitary H^theta applied qubit-wise."""
    out = np.ones((1, 1), dtype=complex)
    for t in theta:
        out = np.kron(out, HADAMARD if t else IDENTITY_1Q)
    return out


def broadcast_measurement_channel(povm: Povm) -> KrausChannel:
    """Measure with the POVM and write the classical outcome, duplicated,
    into two fresh registers (measured register is consumed)."""
    q = povm.qubit_count
    out_qubits = 2 * q
    out_dim = 1 << out_qubits
    ops = []
    for label, element in povm.elements.items():
        # PSD square root of the element; one Kraus op per eigen-component.
        vals, vecs = np.linalg.eigh(element)
        idx = label.to_int() * (1 << q) + label.to_int()
        for value, vector in zip(vals, vecs.T):
            if value < TOL:
                continue
            op = np.zeros((out_dim, 1 << q), dtype=complex)
            op[idx, :] = math.sqrt(max(value, 0.0)) * vector.conj()
            ops.append(op)
    return KrausChannel(ops)


def random_density_operator(qubits: int, rng: np.random.Generator) -> DensityOperator:
    dim = 1 << qubits
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    mat = g @ g.conj().T
    return DensityOperator(mat / np.trace(mat))


def random_pure_state(qubits: int, rng: np.random.Generator) -> PureState:
    dim = 1 << qubits
    vec = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return PureState(vec / np.linalg.norm(vec))


def random_kraus_channel(
    in_qubits: int, out_qubits: int, rng: np.random.Generator, kraus_count: int = 0
) -> KrausChannel:
    """Random CPTP map sampled from a Haar-distributed Stinespring isometry."""
    d_in = 1 << in_qubits
    d_out = 1 << out_qubits
    k = kraus_count if kraus_count > 0 else d_in
    g = rng.normal(size=(d_out * k, d_in)) + 1j * rng.normal(size=(d_out * k, d_in))
    isometry, _ = np.linalg.qr(g)
    ops = [isometry[i * d_out : (i + 1) * d_out, :] for i in range(k)]
    return KrausChannel(ops)


def random_povm(
    qubits: int, outcomes: Sequence[BitString], rng: np.random.Generator
) -> Povm:
    """Random POVM over the given outcome labels (S^{-1/2} G S^{-1/2} form)."""
    dim = 1 << qubits
    raw = {}
    for label in outcomes:
        g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
        raw[label] = g @ g.conj().T
    total = sum(raw.values())
    vals, vecs = np.linalg.eigh(total)
    inv_sqrt = vecs @ np.diag(1.0 / np.sqrt(vals)) @ vecs.conj().T
    return Povm({label: inv_sqrt @ mat @ inv_sqrt for label, mat in raw.items()})
