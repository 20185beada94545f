#!/usr/bin/env python3
"""Generate the bundled molecular Hamiltonian fixtures.

Self-contained restricted Hartree-Fock for hydrogen chains in the STO-3G
basis (s-type Gaussians only, so every integral has a closed form), followed
by a Jordan-Wigner transformation of the second-quantized Hamiltonian into a
Pauli-sum JSON file.  Spin-orbitals are interleaved (alpha = even index,
beta = odd index) and ordered by orbital energy, so the mean-field
determinant occupies the lowest qubits.

Run from the repository root:

    python tools/generate_fixtures.py

The emitted metadata records the geometry, the SCF energy, and the exact
ground-state energy from dense diagonalization of the final Pauli sum; the
test suite re-verifies both numbers independently.
"""

from __future__ import annotations

import itertools
import sys
from pathlib import Path

import numpy as np
from scipy.special import erf

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from adaptvqe.hamiltonians import (
    HamiltonianFile,
    ground_state_energy,
    save_hamiltonian,
)
from adaptvqe.paulis import PauliSum, jordan_wigner_ladder
from adaptvqe.simulator import AnsatzState, expectation, prepare

ANGSTROM_TO_BOHR = 1.8897259886

# STO-3G hydrogen 1s: contraction of three primitives (exponent, coefficient)
STO3G_H = (
    (3.42525091, 0.15432897),
    (0.62391373, 0.53532814),
    (0.16885540, 0.44463454),
)


def boys_f0(t: float) -> float:
    if t < 1e-12:
        return 1.0
    return 0.5 * np.sqrt(np.pi / t) * erf(np.sqrt(t))


def _norm(alpha: float) -> float:
    return (2.0 * alpha / np.pi) ** 0.75


def one_electron_integrals(centers: np.ndarray, charges: np.ndarray):
    """Overlap, kinetic and nuclear-attraction matrices over 1s AOs."""
    n = len(centers)
    S = np.zeros((n, n))
    T = np.zeros((n, n))
    V = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            rij2 = float(np.sum((centers[i] - centers[j]) ** 2))
            for (a, ca), (b, cb) in itertools.product(STO3G_H, STO3G_H):
                pref = ca * cb * _norm(a) * _norm(b)
                p = a + b
                mu = a * b / p
                k = np.exp(-mu * rij2)
                S[i, j] += pref * (np.pi / p) ** 1.5 * k
                T[i, j] += pref * mu * (3.0 - 2.0 * mu * rij2) * (np.pi / p) ** 1.5 * k
                center_p = (a * centers[i] + b * centers[j]) / p
                for cidx in range(n):
                    t = p * float(np.sum((center_p - centers[cidx]) ** 2))
                    V[i, j] -= pref * charges[cidx] * 2.0 * np.pi / p * k * boys_f0(t)
    return S, T, V


def two_electron_integrals(centers: np.ndarray) -> np.ndarray:
    """(ij|kl) in chemist notation over 1s AOs."""
    n = len(centers)
    eri = np.zeros((n, n, n, n))
    for i, j, k, l in itertools.product(range(n), repeat=4):
        rij2 = float(np.sum((centers[i] - centers[j]) ** 2))
        rkl2 = float(np.sum((centers[k] - centers[l]) ** 2))
        total = 0.0
        for (a, ca), (b, cb), (c, cc), (d, cd) in itertools.product(STO3G_H, repeat=4):
            pref = ca * cb * cc * cd * _norm(a) * _norm(b) * _norm(c) * _norm(d)
            p = a + b
            q = c + d
            center_p = (a * centers[i] + b * centers[j]) / p
            center_q = (c * centers[k] + d * centers[l]) / q
            rpq2 = float(np.sum((center_p - center_q) ** 2))
            k_ab = np.exp(-a * b / p * rij2)
            k_cd = np.exp(-c * d / q * rkl2)
            t = p * q / (p + q) * rpq2
            total += (
                pref
                * 2.0 * np.pi ** 2.5 / (p * q * np.sqrt(p + q))
                * k_ab * k_cd * boys_f0(t)
            )
        eri[i, j, k, l] = total
    return eri


def restricted_hartree_fock(centers, charges, n_electrons,
                            max_cycles=500, tol=1e-12, mixing=0.5):
    """Closed-shell SCF; returns (total energy, MO coefficients, MO energies)."""
    S, T, V = one_electron_integrals(centers, charges)
    eri = two_electron_integrals(centers)
    h_core = T + V
    e_nuc = 0.0
    for a in range(len(centers)):
        for b in range(a + 1, len(centers)):
            e_nuc += charges[a] * charges[b] / np.linalg.norm(centers[a] - centers[b])

    s_val, s_vec = np.linalg.eigh(S)
    x = s_vec @ np.diag(s_val ** -0.5) @ s_vec.T
    n_occ = n_electrons // 2

    def fock(density):
        coulomb = np.einsum("pqrs,rs->pq", eri, density)
        exchange = np.einsum("prqs,rs->pq", eri, density)
        return h_core + coulomb - 0.5 * exchange

    density = np.zeros_like(S)
    energy = 0.0
    for cycle in range(max_cycles):
        f = fock(density)
        f_ortho = x.T @ f @ x
        mo_energies, c_ortho = np.linalg.eigh(f_ortho)
        coeffs = x @ c_ortho
        new_density = 2.0 * coeffs[:, :n_occ] @ coeffs[:, :n_occ].T
        if cycle > 0:
            new_density = mixing * new_density + (1.0 - mixing) * density
        new_energy = 0.5 * np.sum(new_density * (h_core + fock(new_density))) + e_nuc
        if abs(new_energy - energy) < tol and np.max(np.abs(new_density - density)) < 1e-10:
            density = new_density
            energy = new_energy
            break
        density, energy = new_density, new_energy
    else:
        raise RuntimeError("SCF did not converge")
    f = fock(density)
    mo_energies, c_ortho = np.linalg.eigh(x.T @ f @ x)
    coeffs = x @ c_ortho
    return energy, coeffs, mo_energies, h_core, eri, e_nuc


def jordan_wigner_hamiltonian(h_mo, eri_mo, e_nuc, n_qubits) -> PauliSum:
    """JW transform of the interleaved-spin second-quantized Hamiltonian."""
    n_spatial = h_mo.shape[0]

    def ladder(orbital, spin, creation):
        return jordan_wigner_ladder(2 * orbital + spin, creation, n_qubits)

    total = PauliSum.identity(n_qubits, e_nuc)
    for p in range(n_spatial):
        for q in range(n_spatial):
            if abs(h_mo[p, q]) < 1e-13:
                continue
            for spin in (0, 1):
                total = total + (ladder(p, spin, True) @ ladder(q, spin, False)) * h_mo[p, q]
    for p, q, r, s in itertools.product(range(n_spatial), repeat=4):
        coeff = 0.5 * eri_mo[p, q, r, s]
        if abs(coeff) < 1e-13:
            continue
        for sigma in (0, 1):
            for tau in (0, 1):
                term = (
                    ladder(p, sigma, True)
                    @ ladder(r, tau, True)
                    @ ladder(s, tau, False)
                    @ ladder(q, sigma, False)
                )
                total = total + term * coeff
    return total


def build_hydrogen_chain(name: str, spacing_angstrom: float, n_atoms: int) -> HamiltonianFile:
    centers = np.array(
        [[0.0, 0.0, i * spacing_angstrom * ANGSTROM_TO_BOHR] for i in range(n_atoms)]
    )
    charges = np.ones(n_atoms)
    n_electrons = n_atoms
    n_qubits = 2 * n_atoms

    e_hf, coeffs, mo_energies, h_core, eri, e_nuc = restricted_hartree_fock(
        centers, charges, n_electrons
    )
    h_mo = coeffs.T @ h_core @ coeffs
    eri_mo = np.einsum("ap,bq,abcd,cr,ds->pqrs", coeffs, coeffs, eri, coeffs, coeffs,
                       optimize=True)
    operator = jordan_wigner_hamiltonian(h_mo, eri_mo, e_nuc, n_qubits)

    reference = "1" * n_electrons + "0" * (n_qubits - n_electrons)
    hf_from_operator = expectation(prepare(AnsatzState(reference)), operator)
    if abs(hf_from_operator - e_hf) > 1e-9:
        raise RuntimeError(
            f"{name}: determinant energy {hf_from_operator!r} != SCF {e_hf!r}"
        )
    exact = ground_state_energy(operator)
    print(f"{name}: n_qubits={n_qubits} terms={operator.n_terms} "
          f"E_HF={e_hf:.10f} E_exact={exact:.10f} corr={exact - e_hf:.3e}")
    return HamiltonianFile(
        n_qubits=n_qubits,
        operator=operator,
        name=name,
        reference_bitstring=reference,
        units="hartree",
        n_electrons=n_electrons,
        exact_ground_energy=exact,
        hf_energy=hf_from_operator,
        extra_metadata={
            "basis": "sto-3g",
            "geometry": [["H", [0.0, 0.0, round(i * spacing_angstrom, 6)]]
                         for i in range(n_atoms)],
            "generator": "tools/generate_fixtures.py (in-repo RHF + Jordan-Wigner)",
        },
    )


def main():
    out_dir = Path(__file__).resolve().parent.parent / "src" / "adaptvqe" / "fixtures"
    out_dir.mkdir(parents=True, exist_ok=True)
    fixtures = [
        ("h2_sto3g_0p7414", 0.7414, 2),
        ("h4_sto3g_1p00", 1.00, 4),
        ("h4_sto3g_2p00", 2.00, 4),
    ]
    for name, spacing, atoms in fixtures:
        hfile = build_hydrogen_chain(name, spacing, atoms)
        save_hamiltonian(hfile, out_dir / f"{name}.json")
        print(f"  wrote {out_dir / (name + '.json')}")


if __name__ == "__main__":
    main()
