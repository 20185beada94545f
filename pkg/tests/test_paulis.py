import numpy as np
import pytest

from adaptvqe.paulis import (
    PauliString,
    PauliSum,
    commutator,
    jordan_wigner_ladder,
    multiply,
)

from oracles import dense_basis_state, dense_pauli_sum, dense_string

UNIT_PHASES = (1 + 0j, -1 + 0j, 1j, -1j)


def random_string(rng, n_qubits):
    letters = "".join(rng.choice(list("IXYZ")) for _ in range(n_qubits))
    return PauliString.from_text(letters)


class TestPauliString:
    def test_text_round_trip(self):
        for text in ("XYIZ", "IIII", "ZZXY"):
            assert PauliString.from_text(text).text() == text

    def test_invalid_letter_rejected(self):
        with pytest.raises(ValueError, match="invalid Pauli letter"):
            PauliString.from_text("XQ")

    def test_support_and_weight(self):
        s = PauliString.from_text("XIYZ")
        assert s.support == (0, 2, 3)
        assert s.weight == 3

    def test_commutes_with(self):
        cases = [("XI", "IX", True), ("XX", "YY", True), ("XY", "YX", True),
                 ("XI", "YI", False), ("XZZXI", "IXZZX", True)]
        for a, b, expected in cases:
            assert PauliString.from_text(a).commutes_with(
                PauliString.from_text(b)) is expected

    def test_qubit_count_mismatch(self):
        with pytest.raises(ValueError, match="mismatch"):
            multiply(PauliString.from_text("X"), PauliString.from_text("XX"))


class TestMultiply:
    def test_involution(self):
        phase, product = multiply(PauliString.from_text("X"), PauliString.from_text("X"))
        assert phase == 1 and product.is_identity

    def test_xy_gives_iz(self):
        phase, product = multiply(PauliString.from_text("X"), PauliString.from_text("Y"))
        assert phase == 1j and product.text() == "Z"

    def test_xz_zx_product(self):
        # per-site phases (-i)(i) cancel; the product is YY
        phase, product = multiply(PauliString.from_text("XZ"), PauliString.from_text("ZX"))
        assert phase == 1 and product.text() == "YY"
        oracle = dense_string("XZ") @ dense_string("ZX")
        np.testing.assert_allclose(phase * dense_string("YY"), oracle, atol=1e-14)

    def test_random_products_match_dense_oracle(self):
        rng = np.random.default_rng(11)
        for _ in range(60):
            n = int(rng.integers(1, 5))
            a, b = random_string(rng, n), random_string(rng, n)
            phase, product = multiply(a, b)
            assert phase in UNIT_PHASES
            np.testing.assert_allclose(
                phase * dense_string(product.text()),
                dense_string(a.text()) @ dense_string(b.text()),
                atol=1e-14,
            )

    def test_phase_pair_encodes_commutation(self):
        # ab and ba share the phase exactly when the strings commute and
        # carry opposite (imaginary) phases when they anticommute, so the
        # conjugate product discriminates the two cases
        rng = np.random.default_rng(12)
        for _ in range(60):
            n = int(rng.integers(1, 5))
            a, b = random_string(rng, n), random_string(rng, n)
            forward = multiply(a, b)[0]
            backward = multiply(b, a)[0]
            assert forward * backward.conjugate() in (1, -1)
            assert (forward == backward) is a.commutes_with(b)
            assert (forward * backward.conjugate() == 1) is a.commutes_with(b)


class TestPauliSum:
    def test_combines_and_prunes(self):
        s = PauliSum.from_text_terms([("X", 0.5), ("X", -0.5), ("Z", 1.0)])
        assert s.n_terms == 1
        assert s.coefficient(PauliString.from_text("Z")) == 1.0

    def test_prune_tolerance_configurable(self):
        terms = [("X", 1e-9), ("Z", 1.0)]
        assert PauliSum.from_text_terms(terms).n_terms == 2
        assert PauliSum(1, [(PauliString.from_text("X"), 1e-9),
                            (PauliString.from_text("Z"), 1.0)],
                        prune_tol=1e-6).n_terms == 1

    def test_structural_equality_and_ordering(self):
        a = PauliSum.from_text_terms([("XI", 1.0), ("IZ", 2.0)])
        b = PauliSum.from_text_terms([("IZ", 2.0), ("XI", 1.0)])
        assert a == b
        assert [s.text() for s, _ in a] == [s.text() for s, _ in b]

    def test_hermiticity_classification(self):
        assert PauliSum.from_text_terms([("X", 1.0), ("Z", -2.5)]).is_hermitian()
        assert not PauliSum.from_text_terms([("X", 1j)]).is_hermitian()
        assert PauliSum.from_text_terms([("X", 1j), ("Y", -0.5j)]).is_anti_hermitian()
        assert not PauliSum.from_text_terms([("X", 1.0)]).is_anti_hermitian()

    def test_matmul_matches_dense(self):
        rng = np.random.default_rng(13)
        for _ in range(20):
            n = int(rng.integers(1, 4))
            a = PauliSum(n, [(random_string(rng, n), complex(*rng.normal(size=2)))
                             for _ in range(3)])
            b = PauliSum(n, [(random_string(rng, n), complex(*rng.normal(size=2)))
                             for _ in range(3)])
            if a.is_zero or b.is_zero:
                continue
            np.testing.assert_allclose(
                dense_pauli_sum(a @ b), dense_pauli_sum(a) @ dense_pauli_sum(b),
                atol=1e-12)

    def test_immutability(self):
        s = PauliSum.from_text_terms([("X", 1.0)])
        with pytest.raises(AttributeError):
            s.n_qubits = 3


class TestCommutator:
    def test_z_with_x(self):
        result = commutator(PauliSum.from_text_terms([("Z", 1.0)]),
                            PauliSum.from_text_terms([("X", 1.0)]))
        assert result == PauliSum.from_text_terms([("Y", 2j)])

    def test_disjoint_supports_commute(self):
        result = commutator(PauliSum.from_text_terms([("XI", 1.0)]),
                            PauliSum.from_text_terms([("IX", 1.0)]))
        assert result.is_zero

    def test_mixed_sum_matches_dense_oracle(self):
        a = PauliSum.from_text_terms([("Z", 1.0), ("X", 0.5)])
        b = PauliSum.from_text_terms([("Y", 1j)])
        da, db = dense_pauli_sum(a), dense_pauli_sum(b)
        np.testing.assert_allclose(
            dense_pauli_sum(commutator(a, b)), da @ db - db @ da, atol=1e-12)

    def test_antisymmetry(self):
        rng = np.random.default_rng(14)
        for _ in range(20):
            n = int(rng.integers(1, 4))
            a = PauliSum(n, [(random_string(rng, n), complex(*rng.normal(size=2)))
                             for _ in range(3)])
            b = PauliSum(n, [(random_string(rng, n), complex(*rng.normal(size=2)))
                             for _ in range(3)])
            assert commutator(a, b) == -commutator(b, a)

    def test_hermitian_with_anti_hermitian_is_hermitian(self):
        # real-coefficient sum against imaginary-coefficient sum: all-real output
        rng = np.random.default_rng(15)
        for _ in range(20):
            n = int(rng.integers(1, 4))
            a = PauliSum(n, [(random_string(rng, n), float(rng.normal()))
                             for _ in range(4)])
            b = PauliSum(n, [(random_string(rng, n), 1j * float(rng.normal()))
                             for _ in range(4)])
            assert commutator(a, b).is_hermitian()


class TestJordanWigner:
    def test_creation_on_first_orbital(self):
        op = jordan_wigner_ladder(0, True, 2)
        assert op == PauliSum.from_text_terms([("XI", 0.5), ("YI", -0.5j)])

    def test_annihilation_with_z_string(self):
        op = jordan_wigner_ladder(1, False, 2)
        assert op == PauliSum.from_text_terms([("ZX", 0.5), ("ZY", 0.5j)])

    def test_creation_acts_as_raising_operator(self):
        op = jordan_wigner_ladder(0, True, 1)
        state = dense_pauli_sum(op) @ dense_basis_state("0")
        np.testing.assert_allclose(state, dense_basis_state("1"), atol=1e-14)

    def test_index_out_of_range(self):
        with pytest.raises(ValueError, match="out of range"):
            jordan_wigner_ladder(3, True, 2)

    @pytest.mark.parametrize("n_qubits", [2, 3, 4])
    def test_canonical_anticommutation_dense(self, n_qubits):
        # {a_i, a_j^dag} = delta_ij I, brute force on dense matrices
        for i in range(n_qubits):
            for j in range(n_qubits):
                a_i = dense_pauli_sum(jordan_wigner_ladder(i, False, n_qubits))
                adag_j = dense_pauli_sum(jordan_wigner_ladder(j, True, n_qubits))
                anti = a_i @ adag_j + adag_j @ a_i
                expected = np.eye(2 ** n_qubits) if i == j else np.zeros_like(anti)
                np.testing.assert_allclose(anti, expected, atol=1e-14)

    @pytest.mark.parametrize("n_qubits", [3, 4])
    def test_nilpotency(self, n_qubits):
        for i in range(n_qubits):
            adag = dense_pauli_sum(jordan_wigner_ladder(i, True, n_qubits))
            np.testing.assert_allclose(adag @ adag, np.zeros_like(adag), atol=1e-14)
