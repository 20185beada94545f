"""Exact symbolic algebra on Pauli strings and sparse linear combinations of them.

A :class:`PauliString` is stored as a pair of bit masks (X-support and
Z-support, with Y = both), which makes products, commutation checks and
statevector application cheap.  A :class:`PauliSum` maps strings to complex
coefficients and is the common representation for Hamiltonians, pool
generators and ansatz generators.

Conventions (fixed globally):

* Qubit ``0`` is the least-significant bit of a basis-state index.
* The text form of a string (``"XYIZ"``) lists site 0 leftmost.
* Terms are ordered lexicographically on ``(x_mask, z_mask)`` so that
  equality and serialization are structural and deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping

__all__ = [
    "DEFAULT_PRUNE_TOL",
    "PauliString",
    "PauliSum",
    "multiply",
    "commutator",
    "jordan_wigner_ladder",
]

DEFAULT_PRUNE_TOL = 1e-12

_LETTER_TO_MASKS = {"I": (0, 0), "X": (1, 0), "Y": (1, 1), "Z": (0, 1)}
_MASKS_TO_LETTER = {v: k for k, v in _LETTER_TO_MASKS.items()}


@dataclass(frozen=True)
class PauliString:
    """A tensor product of single-qubit Pauli operators on ``n_qubits`` sites.

    ``x_mask`` has bit ``i`` set when site ``i`` carries X or Y; ``z_mask``
    has it set for Z or Y.  The string itself is always Hermitian; phases
    from products are reported separately by :func:`multiply`.
    """

    n_qubits: int
    x_mask: int
    z_mask: int

    def __post_init__(self):
        if self.n_qubits <= 0:
            raise ValueError(f"n_qubits must be positive, got {self.n_qubits}")
        full = (1 << self.n_qubits) - 1
        if self.x_mask & ~full or self.z_mask & ~full:
            raise ValueError("mask has support outside the declared qubit range")

    @classmethod
    def from_text(cls, text: str) -> "PauliString":
        """Parse the site-0-leftmost text form, e.g. ``"XYIZ"``."""
        x = z = 0
        for i, letter in enumerate(text):
            try:
                xb, zb = _LETTER_TO_MASKS[letter]
            except KeyError:
                raise ValueError(f"invalid Pauli letter {letter!r} in {text!r}") from None
            x |= xb << i
            z |= zb << i
        if not text:
            raise ValueError("empty Pauli string text")
        return cls(len(text), x, z)

    @classmethod
    def identity(cls, n_qubits: int) -> "PauliString":
        return cls(n_qubits, 0, 0)

    @classmethod
    def single(cls, letter: str, site: int, n_qubits: int) -> "PauliString":
        """A single non-identity letter at ``site``, identity elsewhere."""
        if not 0 <= site < n_qubits:
            raise ValueError(f"site {site} out of range for {n_qubits} qubits")
        xb, zb = _LETTER_TO_MASKS[letter]
        if (xb, zb) == (0, 0):
            return cls.identity(n_qubits)
        return cls(n_qubits, xb << site, zb << site)

    def letter(self, site: int) -> str:
        return _MASKS_TO_LETTER[((self.x_mask >> site) & 1, (self.z_mask >> site) & 1)]

    def text(self) -> str:
        return "".join(self.letter(i) for i in range(self.n_qubits))

    @property
    def is_identity(self) -> bool:
        return self.x_mask == 0 and self.z_mask == 0

    @property
    def weight(self) -> int:
        return ((self.x_mask | self.z_mask)).bit_count()

    @property
    def support(self) -> tuple[int, ...]:
        mask = self.x_mask | self.z_mask
        return tuple(i for i in range(self.n_qubits) if (mask >> i) & 1)

    def commutes_with(self, other: "PauliString") -> bool:
        """True iff the strings commute.

        Decided by the parity of the number of sites where both act
        non-trivially with different letters (the symplectic product).
        """
        _check_same_qubits(self, other)
        anti = (self.x_mask & other.z_mask).bit_count() + (self.z_mask & other.x_mask).bit_count()
        return anti % 2 == 0

    def sort_key(self) -> tuple[int, int]:
        return (self.x_mask, self.z_mask)

    def __str__(self) -> str:
        return self.text()


def _check_same_qubits(a, b) -> None:
    if a.n_qubits != b.n_qubits:
        raise ValueError(f"qubit-count mismatch: {a.n_qubits} vs {b.n_qubits}")


def multiply(a: PauliString, b: PauliString) -> tuple[complex, PauliString]:
    """Operator product ``a @ b`` as ``(phase, string)`` with phase in {1,-1,i,-i}.

    Uses the normal form P(x,z) = i^{|x&z|} X^x Z^z: commuting X^b past Z^a
    contributes (-1) per overlapping site, and the Y content of each factor
    contributes its own power of i.
    """
    _check_same_qubits(a, b)
    x3 = a.x_mask ^ b.x_mask
    z3 = a.z_mask ^ b.z_mask
    exponent = (
        (a.x_mask & a.z_mask).bit_count()
        + (b.x_mask & b.z_mask).bit_count()
        + 2 * (a.z_mask & b.x_mask).bit_count()
        - (x3 & z3).bit_count()
    ) % 4
    phase = (1 + 0j, 1j, -1 + 0j, -1j)[exponent]
    return phase, PauliString(a.n_qubits, x3, z3)


class PauliSum:
    """An immutable sparse linear combination of Pauli strings.

    Terms with coefficient magnitude below the pruning tolerance are dropped
    at construction, duplicates are combined, and iteration order is the
    canonical ``(x_mask, z_mask)`` order.
    """

    __slots__ = ("n_qubits", "_terms", "_hash")

    def __init__(
        self,
        n_qubits: int,
        terms: Mapping[PauliString, complex] | Iterable[tuple[PauliString, complex]] = (),
        prune_tol: float = DEFAULT_PRUNE_TOL,
    ):
        if n_qubits <= 0:
            raise ValueError(f"n_qubits must be positive, got {n_qubits}")
        items = terms.items() if isinstance(terms, Mapping) else terms
        combined: dict[PauliString, complex] = {}
        for string, coeff in items:
            if string.n_qubits != n_qubits:
                raise ValueError(
                    f"term on {string.n_qubits} qubits in a {n_qubits}-qubit sum"
                )
            combined[string] = combined.get(string, 0j) + complex(coeff)
        pruned = {s: c for s, c in combined.items() if abs(c) > prune_tol}
        ordered = sorted(pruned.items(), key=lambda item: item[0].sort_key())
        object.__setattr__(self, "n_qubits", n_qubits)
        object.__setattr__(self, "_terms", tuple(ordered))
        object.__setattr__(self, "_hash", None)

    def __setattr__(self, name, value):
        raise AttributeError("PauliSum is immutable")

    @classmethod
    def from_text_terms(
        cls, terms: Iterable[tuple[str, complex]], n_qubits: int | None = None
    ) -> "PauliSum":
        parsed = [(PauliString.from_text(text), coeff) for text, coeff in terms]
        if n_qubits is None:
            if not parsed:
                raise ValueError("cannot infer qubit count from empty term list")
            n_qubits = parsed[0][0].n_qubits
        return cls(n_qubits, parsed)

    @classmethod
    def zero(cls, n_qubits: int) -> "PauliSum":
        return cls(n_qubits, ())

    @classmethod
    def identity(cls, n_qubits: int, coeff: complex = 1.0) -> "PauliSum":
        return cls(n_qubits, [(PauliString.identity(n_qubits), coeff)])

    def items(self) -> tuple[tuple[PauliString, complex], ...]:
        return self._terms

    def coefficient(self, string: PauliString) -> complex:
        for s, c in self._terms:
            if s == string:
                return c
        return 0j

    def strings(self) -> tuple[PauliString, ...]:
        return tuple(s for s, _ in self._terms)

    @property
    def n_terms(self) -> int:
        return len(self._terms)

    @property
    def is_zero(self) -> bool:
        return not self._terms

    def is_hermitian(self, tol: float = DEFAULT_PRUNE_TOL) -> bool:
        """All coefficients real (each Pauli string is itself Hermitian)."""
        return all(abs(c.imag) <= tol for _, c in self._terms)

    def is_anti_hermitian(self, tol: float = DEFAULT_PRUNE_TOL) -> bool:
        """All coefficients purely imaginary."""
        return all(abs(c.real) <= tol for _, c in self._terms)

    def __iter__(self) -> Iterator[tuple[PauliString, complex]]:
        return iter(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    def __eq__(self, other) -> bool:
        if not isinstance(other, PauliSum):
            return NotImplemented
        return self.n_qubits == other.n_qubits and self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            object.__setattr__(self, "_hash", hash((self.n_qubits, self._terms)))
        return self._hash

    def __add__(self, other: "PauliSum") -> "PauliSum":
        _check_same_qubits(self, other)
        merged = dict(self._terms)
        for s, c in other._terms:
            merged[s] = merged.get(s, 0j) + c
        return PauliSum(self.n_qubits, merged)

    def __sub__(self, other: "PauliSum") -> "PauliSum":
        return self + (other * -1)

    def __mul__(self, scalar: complex) -> "PauliSum":
        return PauliSum(self.n_qubits, [(s, c * scalar) for s, c in self._terms])

    __rmul__ = __mul__

    def __neg__(self) -> "PauliSum":
        return self * -1

    def __matmul__(self, other: "PauliSum") -> "PauliSum":
        """Operator product, expanding term by term with phase tracking."""
        _check_same_qubits(self, other)
        out: dict[PauliString, complex] = {}
        for sa, ca in self._terms:
            for sb, cb in other._terms:
                phase, prod = multiply(sa, sb)
                out[prod] = out.get(prod, 0j) + ca * cb * phase
        return PauliSum(self.n_qubits, out)

    def adjoint(self) -> "PauliSum":
        return PauliSum(self.n_qubits, [(s, c.conjugate()) for s, c in self._terms])

    def terms_mutually_commute(self) -> bool:
        strings = self.strings()
        for i in range(len(strings)):
            for j in range(i + 1, len(strings)):
                if not strings[i].commutes_with(strings[j]):
                    return False
        return True

    def __repr__(self) -> str:
        body = " + ".join(f"({c:.6g})*{s.text()}" for s, c in self._terms[:6])
        if self.n_terms > 6:
            body += f" + ... ({self.n_terms} terms)"
        return f"PauliSum({body or '0'})"


def commutator(a: PauliSum, b: PauliSum) -> PauliSum:
    """``a @ b - b @ a`` with like terms combined and pruned.

    Pairs of strings either commute (no contribution) or anticommute
    (contribution ``2 * phase * product``), so only one product per pair is
    computed.
    """
    _check_same_qubits(a, b)
    out: dict[PauliString, complex] = {}
    for sa, ca in a:
        for sb, cb in b:
            if sa.commutes_with(sb):
                continue
            phase, prod = multiply(sa, sb)
            out[prod] = out.get(prod, 0j) + 2 * ca * cb * phase
    return PauliSum(a.n_qubits, out)


def jordan_wigner_ladder(index: int, creation: bool, n_qubits: int) -> PauliSum:
    """Fermionic ladder operator for mode ``index`` as a two-string PauliSum.

    Creation maps to ``1/2 * Z_0...Z_{index-1} (X_index - i Y_index)`` and
    annihilation to the ``+ i Y`` branch.  Modes with lower index sit earlier
    in the Z string, matching the qubit-0-is-LSB layout.
    """
    if not 0 <= index < n_qubits:
        raise ValueError(f"orbital index {index} out of range for {n_qubits} qubits")
    z_string = 0
    for k in range(index):
        z_string |= 1 << k
    x_term = PauliString(n_qubits, 1 << index, z_string)
    y_term = PauliString(n_qubits, 1 << index, z_string | (1 << index))
    sign = -1j if creation else 1j
    return PauliSum(n_qubits, [(x_term, 0.5), (y_term, 0.5 * sign)])
