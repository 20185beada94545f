"""Operator pools for adaptive ansatz growth.

Two families are provided:

* the qubit-excitation (QE) pool: spin-adapted single and double qubit
  excitations that preserve particle number and the Z spin projection, with
  spin-orbital index parity encoding spin (alpha = even, beta = odd);
* the qubit pool: one operator ``i * P`` per distinct Pauli string appearing
  in a QE pool.

A nearest-neighbour qubit pool over weight <= 2 strings is also provided as
the documented convention for the built-in lattice-model Hamiltonians.

Doubles are built as products of single-site (Z-string-free) ladder
operators and rescaled so each of their eight Pauli strings carries a
coefficient of unit magnitude; singles keep the two-string
``(i/2)(X_p Y_q - Y_p X_q)`` form.  A uniform pool-wide scale is
configurable and defaults to 1, which cannot affect operator selection.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, product

from .paulis import PauliString, PauliSum

__all__ = [
    "OperatorPool",
    "build_qe_pool",
    "build_qubit_pool",
    "build_nearest_neighbor_pool",
    "qe_single",
    "qe_double",
    "particle_number_operator",
    "sz_projection_operator",
]

QE_KIND = "QE"
QUBIT_KIND = "Qubit"


@dataclass(frozen=True)
class OperatorPool:
    """A fixed, ordered set of anti-Hermitian generators with labels."""

    kind: str
    n_qubits: int
    operators: tuple[PauliSum, ...]
    labels: tuple[str, ...]

    def __post_init__(self):
        if len(self.operators) != len(self.labels):
            raise ValueError("operator and label counts differ")
        seen = set()
        for op in self.operators:
            if op.n_qubits != self.n_qubits:
                raise ValueError("pool operator qubit count mismatch")
            if op.is_zero:
                raise ValueError("pool contains a zero operator")
            if not op.is_anti_hermitian():
                raise ValueError("pool operator is not anti-Hermitian")
            if op in seen:
                raise ValueError("pool contains duplicate operators")
            seen.add(op)

    def __len__(self) -> int:
        return len(self.operators)

    def to_payload(self) -> list[dict]:
        """JSON-ready export: one entry per operator with its Pauli terms."""
        return [
            {
                "label": label,
                "terms": [
                    {"pauli": string.text(), "re": coeff.real, "im": coeff.imag}
                    for string, coeff in op
                ],
            }
            for label, op in zip(self.labels, self.operators)
        ]


def _qubit_ladder(site: int, n_qubits: int, creation: bool) -> PauliSum:
    """Single-site excitation ladder operator (X -+ iY)/2, no Z string."""
    x = PauliString.single("X", site, n_qubits)
    y = PauliString.single("Y", site, n_qubits)
    sign = -1j if creation else 1j
    return PauliSum(n_qubits, [(x, 0.5), (y, 0.5 * sign)])


def qe_single(p: int, q: int, n_qubits: int, scale: float = 1.0) -> PauliSum:
    """Single qubit excitation (i/2)(X_p Y_q - Y_p X_q)."""
    if p == q:
        raise ValueError("single excitation needs two distinct spin-orbitals")
    t = _qubit_ladder(p, n_qubits, True) @ _qubit_ladder(q, n_qubits, False)
    return (t - t.adjoint()) * scale


def qe_double(
    source: tuple[int, int],
    target: tuple[int, int],
    n_qubits: int,
    scale: float = 1.0,
) -> PauliSum:
    """Double qubit excitation moving a pair from ``source`` to ``target``.

    Expands to eight weight-4 X/Y strings with coefficients ``+-i * scale``.
    """
    p, q = source
    r, s = target
    if len({p, q, r, s}) != 4:
        raise ValueError("double excitation needs four distinct spin-orbitals")
    t = (
        _qubit_ladder(r, n_qubits, True)
        @ _qubit_ladder(s, n_qubits, True)
        @ _qubit_ladder(p, n_qubits, False)
        @ _qubit_ladder(q, n_qubits, False)
    )
    return (t - t.adjoint()) * (8.0 * scale)


def _spin(index: int) -> int:
    # alpha = even index, beta = odd index
    return index % 2


def build_qe_pool(
    n_qubits: int,
    n_electrons: int,
    include_singles: bool = True,
    scale: float = 1.0,
) -> OperatorPool:
    """All particle-number- and S_z-preserving single and double excitations.

    The excitations are generalized (not restricted to occupied->virtual), so
    the enumeration depends only on ``n_qubits``; ``n_electrons`` is validated
    because the pool is meaningful only alongside a reference determinant.
    Enumeration order is lexicographic on the index tuples, which fixes
    selection tie-breaking and pool files.
    """
    if not 0 < n_electrons < n_qubits:
        raise ValueError(
            f"electron count {n_electrons} invalid for {n_qubits} spin-orbitals"
        )
    operators: list[PauliSum] = []
    labels: list[str] = []
    if include_singles:
        for p, q in combinations(range(n_qubits), 2):
            if _spin(p) == _spin(q):
                operators.append(qe_single(p, q, n_qubits, scale))
                labels.append(f"single ({p})->({q})")
    for quartet in combinations(range(n_qubits), 4):
        i, j, k, l = quartet
        for pair_a, pair_b in (((i, j), (k, l)), ((i, k), (j, l)), ((i, l), (j, k))):
            if _spin(pair_a[0]) + _spin(pair_a[1]) != _spin(pair_b[0]) + _spin(pair_b[1]):
                continue
            operators.append(qe_double(pair_a, pair_b, n_qubits, scale))
            labels.append(f"double {pair_a}->{pair_b}")
    return OperatorPool(QE_KIND, n_qubits, tuple(operators), tuple(labels))


def build_qubit_pool(qe_pool: OperatorPool) -> OperatorPool:
    """One operator ``i * P`` per distinct Pauli string of a QE pool.

    Strings are collected in pool order (canonical order within each
    operator) and deduplicated, so the result is deterministic.
    """
    if qe_pool.kind != QE_KIND:
        raise ValueError(f"expected a QE pool, got kind {qe_pool.kind!r}")
    n_qubits = qe_pool.n_qubits
    seen: set[PauliString] = set()
    operators: list[PauliSum] = []
    labels: list[str] = []
    for op in qe_pool.operators:
        for string, _ in op:
            if string in seen:
                continue
            seen.add(string)
            operators.append(PauliSum(n_qubits, [(string, 1j)]))
            labels.append(_string_label(string))
    return OperatorPool(QUBIT_KIND, n_qubits, tuple(operators), tuple(labels))


def build_nearest_neighbor_pool(n_qubits: int, scale: float = 1.0) -> OperatorPool:
    """Qubit pool over all weight-1 and adjacent weight-2 Pauli strings.

    This is the documented pool convention for the built-in lattice models
    (open chains), where excitation-style pools have no meaning.
    """
    if n_qubits < 2:
        raise ValueError("nearest-neighbour pool needs at least 2 qubits")
    operators: list[PauliSum] = []
    labels: list[str] = []
    for site in range(n_qubits):
        for letter in "XYZ":
            string = PauliString.single(letter, site, n_qubits)
            operators.append(PauliSum(n_qubits, [(string, 1j * scale)]))
            labels.append(_string_label(string))
    for site in range(n_qubits - 1):
        for la, lb in product("XYZ", repeat=2):
            text = "I" * site + la + lb + "I" * (n_qubits - site - 2)
            string = PauliString.from_text(text)
            operators.append(PauliSum(n_qubits, [(string, 1j * scale)]))
            labels.append(_string_label(string))
    return OperatorPool(QUBIT_KIND, n_qubits, tuple(operators), tuple(labels))


def _string_label(string: PauliString) -> str:
    support = string.support
    letters = "".join(string.letter(site) for site in support)
    return f"string {letters} on {support}"


def particle_number_operator(n_qubits: int) -> PauliSum:
    """Total occupation number sum_i (I - Z_i)/2 as a PauliSum."""
    terms = [(PauliString.identity(n_qubits), 0.5 * n_qubits)]
    for i in range(n_qubits):
        terms.append((PauliString.single("Z", i, n_qubits), -0.5))
    return PauliSum(n_qubits, terms)


def sz_projection_operator(n_qubits: int) -> PauliSum:
    """Z spin projection (alpha = even index counts +1/2, beta = odd -1/2)."""
    terms: list[tuple[PauliString, complex]] = []
    identity_weight = 0.0
    for i in range(n_qubits):
        sign = 0.5 if i % 2 == 0 else -0.5
        identity_weight += 0.5 * sign
        terms.append((PauliString.single("Z", i, n_qubits), -0.5 * sign))
    terms.append((PauliString.identity(n_qubits), identity_weight))
    return PauliSum(n_qubits, terms)
