"""Hamiltonian file ingestion, built-in model Hamiltonians, and bundled fixtures.

The on-disk format is JSON: a qubit count, a list of Pauli terms with real
and imaginary coefficient parts, and a metadata block carrying the reference
occupation bitstring plus optional exact and mean-field energies.  Loading
canonicalizes term order and validates Hermiticity; saving emits canonical,
byte-deterministic JSON so files round-trip exactly.

Built-in chemistry-free models (transverse-field Ising and Heisenberg open
chains) make the full pipeline testable without electronic-structure input.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np
import scipy.sparse.linalg

from .paulis import PauliString, PauliSum
from .simulator import _dense_on_support, _sparse_full

__all__ = [
    "HamiltonianFile",
    "HamiltonianFormatError",
    "load_hamiltonian",
    "save_hamiltonian",
    "parse_hamiltonian_payload",
    "hamiltonian_payload",
    "builtin_model",
    "ground_state_energy",
    "dense_matrix",
    "bundled_fixture_path",
    "list_bundled_fixtures",
]

HERMITICITY_TOL = 1e-12
DIAGONALIZATION_CAP = 12
_DENSE_DIAG_CAP = 11

_VALID_UNITS = ("hartree", "dimensionless")


class HamiltonianFormatError(ValueError):
    """A Hamiltonian file failed validation; the message carries context."""


@dataclass
class HamiltonianFile:
    """A validated Hamiltonian plus the metadata needed to run on it."""

    n_qubits: int
    operator: PauliSum
    name: str
    reference_bitstring: str
    units: str = "hartree"
    n_electrons: int | None = None
    exact_ground_energy: float | None = None
    hf_energy: float | None = None
    extra_metadata: dict = field(default_factory=dict)


def dense_matrix(operator: PauliSum) -> np.ndarray:
    """Dense matrix of an operator (guarded by the diagonalization cap)."""
    if operator.n_qubits > DIAGONALIZATION_CAP:
        raise ValueError(
            f"{operator.n_qubits} qubits exceeds the dense cap of {DIAGONALIZATION_CAP}"
        )
    return _dense_on_support(operator, list(range(operator.n_qubits)))


def ground_state_energy(operator: PauliSum) -> float:
    """Lowest eigenvalue by diagonalization (cap: 12 qubits)."""
    if not operator.is_hermitian():
        raise ValueError("ground-state energy needs a Hermitian operator")
    if operator.n_qubits > DIAGONALIZATION_CAP:
        raise ValueError(
            f"{operator.n_qubits} qubits exceeds the diagonalization cap of "
            f"{DIAGONALIZATION_CAP}"
        )
    if operator.n_qubits <= _DENSE_DIAG_CAP:
        return float(np.linalg.eigvalsh(dense_matrix(operator))[0])
    values = scipy.sparse.linalg.eigsh(
        _sparse_full(operator), k=1, which="SA", return_eigenvectors=False
    )
    return float(values[0])


def parse_hamiltonian_payload(payload: dict, source: str = "<payload>") -> HamiltonianFile:
    """Validate and canonicalize a decoded Hamiltonian JSON object."""

    def fail(message: str) -> HamiltonianFormatError:
        return HamiltonianFormatError(f"{source}: {message}")

    if not isinstance(payload, dict):
        raise fail("top level must be a JSON object")
    n_qubits = payload.get("n_qubits")
    if not isinstance(n_qubits, int) or n_qubits < 1:
        raise fail(f"n_qubits must be a positive integer, got {n_qubits!r}")
    terms = payload.get("terms")
    if not isinstance(terms, list) or not terms:
        raise fail("terms must be a non-empty list")

    parsed: list[tuple[PauliString, complex]] = []
    for i, term in enumerate(terms):
        if not isinstance(term, dict):
            raise fail(f"term {i}: expected an object")
        pauli = term.get("pauli")
        if not isinstance(pauli, str) or len(pauli) != n_qubits:
            raise fail(f"term {i}: pauli must be a string of length {n_qubits}")
        try:
            string = PauliString.from_text(pauli)
        except ValueError as exc:
            raise fail(f"term {i}: {exc}") from None
        try:
            coeff = complex(float(term.get("re", 0.0)), float(term.get("im", 0.0)))
        except (TypeError, ValueError):
            raise fail(f"term {i}: re/im must be numbers") from None
        parsed.append((string, coeff))

    operator = PauliSum(n_qubits, parsed)
    bad = [(s.text(), c.imag) for s, c in operator if abs(c.imag) > HERMITICITY_TOL]
    if bad:
        string, imag = bad[0]
        raise fail(
            f"not Hermitian: term {string} has imaginary coefficient {imag:.3e}"
        )
    operator = PauliSum(n_qubits, [(s, c.real) for s, c in operator])

    metadata = payload.get("metadata", {})
    if not isinstance(metadata, dict):
        raise fail("metadata must be an object")
    reference = metadata.get("reference_bitstring")
    if not isinstance(reference, str) or len(reference) != n_qubits:
        raise fail(f"metadata.reference_bitstring must have length {n_qubits}")
    if any(c not in "01" for c in reference):
        raise fail("metadata.reference_bitstring must be over {0,1}")
    units = metadata.get("units", "hartree")
    if units not in _VALID_UNITS:
        raise fail(f"metadata.units must be one of {_VALID_UNITS}, got {units!r}")

    def optional_number(key: str) -> float | None:
        value = metadata.get(key)
        if value is None:
            return None
        if not isinstance(value, (int, float)):
            raise fail(f"metadata.{key} must be a number")
        return float(value)

    n_electrons = metadata.get("n_electrons")
    if n_electrons is not None and (not isinstance(n_electrons, int) or n_electrons < 0):
        raise fail("metadata.n_electrons must be a non-negative integer")

    known = {"name", "reference_bitstring", "units", "n_electrons",
             "exact_ground_energy", "hf_energy"}
    return HamiltonianFile(
        n_qubits=n_qubits,
        operator=operator,
        name=str(metadata.get("name", "unnamed")),
        reference_bitstring=reference,
        units=units,
        n_electrons=n_electrons,
        exact_ground_energy=optional_number("exact_ground_energy"),
        hf_energy=optional_number("hf_energy"),
        extra_metadata={k: v for k, v in metadata.items() if k not in known},
    )


def hamiltonian_payload(hfile: HamiltonianFile) -> dict:
    """Canonical JSON-ready form (terms in canonical order, metadata sorted)."""
    metadata: dict = {
        "name": hfile.name,
        "reference_bitstring": hfile.reference_bitstring,
        "units": hfile.units,
    }
    if hfile.n_electrons is not None:
        metadata["n_electrons"] = hfile.n_electrons
    if hfile.exact_ground_energy is not None:
        metadata["exact_ground_energy"] = hfile.exact_ground_energy
    if hfile.hf_energy is not None:
        metadata["hf_energy"] = hfile.hf_energy
    metadata.update(hfile.extra_metadata)
    return {
        "n_qubits": hfile.n_qubits,
        "terms": [
            {"pauli": string.text(), "re": coeff.real, "im": 0.0}
            for string, coeff in hfile.operator
        ],
        "metadata": metadata,
    }


def load_hamiltonian(path: str | Path, verify: bool = False) -> HamiltonianFile:
    """Load and validate a Hamiltonian JSON file.

    With ``verify`` the recorded exact ground-state energy (if any) is
    re-checked against a diagonalization of the loaded operator.
    """
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise HamiltonianFormatError(f"{path}: cannot read file: {exc}") from exc
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise HamiltonianFormatError(
            f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from exc
    hfile = parse_hamiltonian_payload(payload, source=str(path))
    if verify and hfile.exact_ground_energy is not None:
        recomputed = ground_state_energy(hfile.operator)
        if abs(recomputed - hfile.exact_ground_energy) > 1e-9:
            raise HamiltonianFormatError(
                f"{path}: recorded exact ground energy {hfile.exact_ground_energy!r} "
                f"disagrees with diagonalization {recomputed!r}"
            )
    return hfile


def save_hamiltonian(hfile: HamiltonianFile, path: str | Path) -> None:
    """Write canonical, byte-deterministic JSON (save/load round-trips)."""
    Path(path).write_text(
        json.dumps(hamiltonian_payload(hfile), indent=2, sort_keys=True) + "\n"
    )


def builtin_model(
    kind: str,
    n_qubits: int,
    coupling: float = 1.0,
    field_strength: float = 1.0,
    with_exact: bool = True,
) -> HamiltonianFile:
    """Built-in open-chain model Hamiltonians.

    ``tfim``: -J sum Z_i Z_{i+1} - h sum X_i;  ``heisenberg``:
    J sum (X X + Y Y + Z Z) on neighbours.  The exact ground energy is
    filled by diagonalization (cap 12 qubits) unless disabled.
    """
    kind = kind.lower()
    if n_qubits < 2:
        raise ValueError("builtin models need at least 2 qubits")
    terms: list[tuple[PauliString, complex]] = []
    if kind == "tfim":
        for i in range(n_qubits - 1):
            terms.append((
                PauliString.from_text(
                    "I" * i + "ZZ" + "I" * (n_qubits - i - 2)), -coupling))
        for i in range(n_qubits):
            terms.append((PauliString.single("X", i, n_qubits), -field_strength))
        name = f"tfim_n{n_qubits}_j{coupling:g}_h{field_strength:g}"
    elif kind == "heisenberg":
        for i in range(n_qubits - 1):
            for letter in "XYZ":
                terms.append((
                    PauliString.from_text(
                        "I" * i + letter * 2 + "I" * (n_qubits - i - 2)), coupling))
        name = f"heisenberg_n{n_qubits}_j{coupling:g}"
    else:
        raise ValueError(f"unknown builtin model kind {kind!r}")
    operator = PauliSum(n_qubits, terms)
    exact = None
    if with_exact:
        if n_qubits > DIAGONALIZATION_CAP:
            raise ValueError(
                f"exact energy requested but {n_qubits} qubits exceeds the "
                f"diagonalization cap of {DIAGONALIZATION_CAP}"
            )
        exact = ground_state_energy(operator)
    return HamiltonianFile(
        n_qubits=n_qubits,
        operator=operator,
        name=name,
        reference_bitstring="0" * n_qubits,
        units="dimensionless",
        exact_ground_energy=exact,
        extra_metadata={"kind": kind, "coupling": coupling,
                        "field": field_strength},
    )


def bundled_fixture_path(name: str) -> Path:
    """Path to a bundled fixture file, e.g. ``h2_sto3g_0p7414.json``."""
    root = resources.files("adaptvqe").joinpath("fixtures")
    candidate = root.joinpath(name)
    if not candidate.is_file():
        available = ", ".join(sorted(p.name for p in root.iterdir()))
        raise FileNotFoundError(f"no bundled fixture {name!r}; have: {available}")
    return Path(str(candidate))


def list_bundled_fixtures() -> list[str]:
    root = resources.files("adaptvqe").joinpath("fixtures")
    return sorted(p.name for p in root.iterdir() if p.name.endswith(".json"))
