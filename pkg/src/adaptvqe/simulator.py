"""Dense statevector engine for Pauli-sum Hamiltonians and ansatz generators.

States are dense complex vectors over the 2^n computational basis with qubit
0 as the least-significant bit of the index.  Generators are applied as
exponentials: when the Pauli terms of a generator mutually commute (true for
qubit-excitation and single-string generators) each term is applied with the
closed-form rotation ``exp(i t P) = cos(t) I + i sin(t) P``; otherwise a
dense matrix exponential restricted to the generator's support is used.

Analytic energy gradients are computed with one forward and one reverse sweep
over the ansatz elements.  Ledger charges nevertheless follow the hardware
model (1 unit per energy, 2 per gradient component), not the simulator cost.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.linalg
import scipy.sparse
import scipy.sparse.linalg

from .cost import CostLedger
from .paulis import PauliString, PauliSum

__all__ = [
    "MAX_QUBITS",
    "StateVector",
    "AnsatzState",
    "basis_state",
    "prepare",
    "apply_pauli_sum",
    "apply_generator_exponential",
    "expectation",
    "energy_and_gradient",
    "gradient_components",
]

MAX_QUBITS = 20

_IMAG_TOL = 1e-10
_DENSE_SUPPORT_CAP = 12

_LETTER_MATRICES = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def _check_qubit_cap(n_qubits: int) -> None:
    if n_qubits > MAX_QUBITS:
        raise ValueError(
            f"{n_qubits} qubits exceeds the dense-statevector cap of {MAX_QUBITS}"
        )


@lru_cache(maxsize=256)
def _parity_signs(n_qubits: int, z_mask: int) -> np.ndarray:
    """(-1)^popcount(index & z_mask) for every basis index, cached per mask."""
    idx = np.arange(1 << n_qubits, dtype=np.uint64)
    parity = np.bitwise_count(idx & np.uint64(z_mask)) & 1
    signs = (1 - 2 * parity).astype(np.int8)
    signs.setflags(write=False)
    return signs


@lru_cache(maxsize=256)
def _flip_indices(n_qubits: int, x_mask: int) -> np.ndarray:
    """The index permutation b -> b XOR x_mask (an involution)."""
    idx = (np.arange(1 << n_qubits, dtype=np.int64) ^ x_mask).astype(np.int32)
    idx.setflags(write=False)
    return idx


def _apply_string(amps: np.ndarray, n_qubits: int, string: PauliString) -> np.ndarray:
    """P|psi> via phase multiplication plus an index-XOR permutation."""
    y_count = (string.x_mask & string.z_mask).bit_count()
    out = amps * _parity_signs(n_qubits, string.z_mask)
    if y_count % 4:
        out = out * (1j ** (y_count % 4))
    if string.x_mask:
        out = out[_flip_indices(n_qubits, string.x_mask)]
    return out


@dataclass(frozen=True)
class StateVector:
    """Normalized amplitudes over the 2^n computational basis states."""

    n_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        _check_qubit_cap(self.n_qubits)
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.shape != (1 << self.n_qubits,):
            raise ValueError(
                f"expected {1 << self.n_qubits} amplitudes, got shape {amps.shape}"
            )
        amps = amps.copy()
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def overlap(self, other: "StateVector") -> complex:
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def fidelity(self, other: "StateVector") -> float:
        return abs(self.overlap(other)) ** 2


def basis_state(bitstring: str) -> StateVector:
    """The computational basis state for an occupation bitstring.

    Site 0 is the leftmost character and the least-significant index bit, so
    ``"1100"`` is index 3 on four qubits.
    """
    n_qubits = len(bitstring)
    _check_qubit_cap(n_qubits)
    index = 0
    for i, ch in enumerate(bitstring):
        if ch == "1":
            index |= 1 << i
        elif ch != "0":
            raise ValueError(f"invalid occupation bitstring {bitstring!r}")
    amps = np.zeros(1 << n_qubits, dtype=complex)
    amps[index] = 1.0
    return StateVector(n_qubits, amps)


@dataclass(frozen=True)
class AnsatzState:
    """A reference occupation bitstring plus ordered (generator, angle) pairs.

    The prepared state is ``exp(t_n A_n) ... exp(t_1 A_1)|ref>`` with element
    order matching ansatz growth order.  Generators must be anti-Hermitian.
    """

    reference: str
    elements: tuple[tuple[PauliSum, float], ...] = ()

    def __post_init__(self):
        n_qubits = len(self.reference)
        if not all(c in "01" for c in self.reference):
            raise ValueError(f"invalid reference bitstring {self.reference!r}")
        normalized = []
        for generator, theta in self.elements:
            if generator.n_qubits != n_qubits:
                raise ValueError("generator qubit count does not match reference")
            if not generator.is_anti_hermitian():
                raise ValueError("ansatz generator is not anti-Hermitian")
            theta = float(theta)
            if not np.isfinite(theta):
                raise ValueError("ansatz parameter is not finite")
            normalized.append((generator, theta))
        object.__setattr__(self, "elements", tuple(normalized))

    @property
    def n_qubits(self) -> int:
        return len(self.reference)

    @property
    def n_parameters(self) -> int:
        return len(self.elements)

    @property
    def parameters(self) -> np.ndarray:
        return np.array([theta for _, theta in self.elements], dtype=float)

    @property
    def generators(self) -> tuple[PauliSum, ...]:
        return tuple(gen for gen, _ in self.elements)

    def with_parameters(self, x: np.ndarray) -> "AnsatzState":
        if len(x) != self.n_parameters:
            raise ValueError("parameter vector length does not match ansatz")
        return AnsatzState(
            self.reference,
            tuple((gen, float(t)) for (gen, _), t in zip(self.elements, x)),
        )

    def grown(self, generator: PauliSum, theta: float = 0.0) -> "AnsatzState":
        return AnsatzState(self.reference, self.elements + ((generator, theta),))


def _apply_exponential_raw(amps: np.ndarray, n_qubits: int, generator: PauliSum,
                           theta: float) -> np.ndarray:
    """exp(theta * generator) |psi> for an anti-Hermitian generator."""
    if theta == 0.0 or generator.is_zero:
        return amps
    if generator.terms_mutually_commute():
        for string, coeff in generator:
            w = theta * coeff.imag
            if w == 0.0:
                continue
            amps = np.cos(w) * amps + 1j * np.sin(w) * _apply_string(amps, n_qubits, string)
        return amps
    support = sorted(set().union(*(s.support for s in generator.strings())))
    if len(support) <= _DENSE_SUPPORT_CAP:
        matrix = _dense_on_support(generator, support) * theta
        return _apply_dense_on_support(amps, n_qubits, support, scipy.linalg.expm(matrix))
    return scipy.sparse.linalg.expm_multiply(_sparse_full(generator) * theta, amps)


def _sparse_full(operator: PauliSum) -> "scipy.sparse.csr_matrix":
    """Full-dimension sparse matrix, for exponentials with wide support."""
    n_qubits = operator.n_qubits
    dim = 1 << n_qubits
    cols = np.arange(dim)
    out = None
    for string, coeff in operator:
        y_count = (string.x_mask & string.z_mask).bit_count()
        data = coeff * (1j ** (y_count % 4)) * _parity_signs(n_qubits, string.z_mask)
        rows = cols ^ string.x_mask
        term = scipy.sparse.csr_matrix((data, (rows, cols)), shape=(dim, dim))
        out = term if out is None else out + term
    return out


def _dense_on_support(operator: PauliSum, support: list[int]) -> np.ndarray:
    dim = 1 << len(support)
    out = np.zeros((dim, dim), dtype=complex)
    for string, coeff in operator:
        factor = np.eye(1, dtype=complex)
        for site in reversed(support):
            factor = np.kron(factor, _LETTER_MATRICES[string.letter(site)])
        out += coeff * factor
    return out


def _apply_dense_on_support(amps: np.ndarray, n_qubits: int, support: list[int],
                            matrix: np.ndarray) -> np.ndarray:
    m = len(support)
    axes = [n_qubits - 1 - s for s in reversed(support)]
    tensor = amps.reshape([2] * n_qubits)
    tensor = np.moveaxis(tensor, axes, range(m))
    flat = matrix @ tensor.reshape(1 << m, -1)
    tensor = np.moveaxis(flat.reshape([2] * n_qubits), range(m), axes)
    return np.ascontiguousarray(tensor).reshape(-1)


def apply_generator_exponential(state: StateVector, generator: PauliSum,
                                theta: float) -> StateVector:
    if generator.n_qubits != state.n_qubits:
        raise ValueError("generator qubit count does not match state")
    if not generator.is_anti_hermitian():
        raise ValueError("generator is not anti-Hermitian")
    return StateVector(
        state.n_qubits,
        _apply_exponential_raw(state.amplitudes, state.n_qubits, generator, theta),
    )


def apply_pauli_sum(state: StateVector, operator: PauliSum) -> StateVector:
    if operator.n_qubits != state.n_qubits:
        raise ValueError("operator qubit count does not match state")
    return StateVector(
        state.n_qubits,
        _apply_sum_raw(state.amplitudes, state.n_qubits, operator),
    )


def _apply_sum_raw(amps: np.ndarray, n_qubits: int, operator: PauliSum) -> np.ndarray:
    out = np.zeros_like(amps)
    for string, coeff in operator:
        out += coeff * _apply_string(amps, n_qubits, string)
    return out


def prepare(ansatz: AnsatzState) -> StateVector:
    """Apply the ansatz exponentials in growth order to the reference state."""
    _check_qubit_cap(ansatz.n_qubits)
    amps = basis_state(ansatz.reference).amplitudes
    for generator, theta in ansatz.elements:
        amps = _apply_exponential_raw(amps, ansatz.n_qubits, generator, theta)
    return StateVector(ansatz.n_qubits, amps)


def expectation(state: StateVector, observable: PauliSum) -> float:
    """<psi|O|psi> for a Hermitian observable, as a real number."""
    if not observable.is_hermitian():
        raise ValueError("observable is not Hermitian")
    if observable.n_qubits != state.n_qubits:
        raise ValueError("observable qubit count does not match state")
    value = complex(
        np.vdot(state.amplitudes,
                _apply_sum_raw(state.amplitudes, state.n_qubits, observable))
    )
    if abs(value.imag) > _IMAG_TOL:
        raise ValueError(f"expectation has imaginary residue {value.imag:.3e}")
    return value.real


def _forward_states(ansatz: AnsatzState) -> list[np.ndarray]:
    """States after 0, 1, ..., n ansatz elements."""
    states = [basis_state(ansatz.reference).amplitudes]
    for generator, theta in ansatz.elements:
        states.append(
            _apply_exponential_raw(states[-1], ansatz.n_qubits, generator, theta)
        )
    return states


def energy_and_gradient(
    ansatz: AnsatzState,
    hamiltonian: PauliSum,
    ledger: CostLedger | None = None,
) -> tuple[float, np.ndarray]:
    """Energy and the full analytic parameter gradient.

    dE/dt_j = 2 Re <psi| H U_n..U_{j+1} A_j |phi_j> with |phi_j> the state
    after the first j elements; the reverse sweep carries H|psi> backwards
    through the inverse unitaries.  Charges 1 + 2n cost units.
    """
    if not hamiltonian.is_hermitian():
        raise ValueError("Hamiltonian is not Hermitian")
    if hamiltonian.n_qubits != ansatz.n_qubits:
        raise ValueError("Hamiltonian qubit count does not match ansatz")
    n = ansatz.n_parameters
    if ledger is not None:
        ledger.charge_energy(1)
        ledger.charge_gradient(n)
    states = _forward_states(ansatz)
    psi = states[-1]
    lam = _apply_sum_raw(psi, ansatz.n_qubits, hamiltonian)
    energy = complex(np.vdot(psi, lam))
    if abs(energy.imag) > _IMAG_TOL:
        raise ValueError(f"energy has imaginary residue {energy.imag:.3e}")
    grad = np.empty(n, dtype=float)
    for j in range(n - 1, -1, -1):
        generator, theta = ansatz.elements[j]
        grad[j] = 2.0 * np.real(
            np.vdot(lam, _apply_sum_raw(states[j + 1], ansatz.n_qubits, generator))
        )
        lam = _apply_exponential_raw(lam, ansatz.n_qubits, generator, -theta)
    return energy.real, grad


def gradient_components(
    ansatz: AnsatzState,
    hamiltonian: PauliSum,
    indices: list[int],
    ledger: CostLedger | None = None,
) -> np.ndarray:
    """Partial derivatives for a subset of parameters; charges 2 per component."""
    n = ansatz.n_parameters
    wanted = sorted(set(indices))
    if wanted and (wanted[0] < 0 or wanted[-1] >= n):
        raise ValueError(f"gradient index out of range for {n} parameters")
    if ledger is not None:
        ledger.charge_gradient(len(wanted))
    if not wanted:
        return np.empty(0, dtype=float)
    states = _forward_states(ansatz)
    psi = states[-1]
    lam = _apply_sum_raw(psi, ansatz.n_qubits, hamiltonian)
    values = {}
    for j in range(n - 1, wanted[0] - 1, -1):
        generator, theta = ansatz.elements[j]
        if j in wanted:
            values[j] = 2.0 * np.real(
                np.vdot(lam, _apply_sum_raw(states[j + 1], ansatz.n_qubits, generator))
            )
        lam = _apply_exponential_raw(lam, ansatz.n_qubits, generator, -theta)
    return np.array([values[j] for j in indices], dtype=float)
