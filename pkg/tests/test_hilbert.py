import math

import numpy as np
import pytest

from zenojc import (
    DensityMatrix,
    JCParams,
    PureState,
    SpaceLayout,
    build_jc_hamiltonian,
    herm_eig,
    partial_trace_field,
    tensor_product,
    unitary_from_hamiltonian,
)
from zenojc.models import sigma_plus, sigma_z

from oracles import excitation_block, expm_propagate, herm_eig_2x2, loop_partial_trace_field


def random_hermitian(rng, dim, scale=1.0):
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return scale * 0.5 * (a + a.conj().T)


def random_density(rng, dim):
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    m = a @ a.conj().T
    return DensityMatrix(m / np.trace(m))


def basis_vector(index, dim):
    v = np.zeros(dim, dtype=np.complex128)
    v[index] = 1.0
    return v


class TestTensorProduct:
    def test_identity_factors(self):
        result = tensor_product(np.eye(2), np.eye(3))
        assert np.array_equal(result, np.eye(6))

    def test_sigma_z_acts_on_atom_factor(self):
        d = 4
        op = tensor_product(sigma_z(), np.eye(d))
        for n in range(d):
            excited = np.kron(basis_vector(0, 2), basis_vector(n, d))
            ground = np.kron(basis_vector(1, 2), basis_vector(n, d))
            assert np.array_equal(op @ excited, excited)
            assert np.array_equal(op @ ground, -ground)

    def test_raising_with_annihilation_transfers_excitation(self):
        # (sigma_+ x a) |g,1> = sqrt(1) |e,0>, built and multiplied explicitly
        d = 3
        a = np.diag(np.sqrt(np.arange(1, d)), 1).astype(complex)
        op = tensor_product(sigma_plus(), a)
        in_state = np.kron(basis_vector(1, 2), basis_vector(1, d))
        out_state = np.kron(basis_vector(0, 2), basis_vector(0, d))
        assert np.allclose(op @ in_state, out_state, atol=1e-15)

    def test_associativity_is_exact(self):
        rng = np.random.default_rng(11)
        for _ in range(10):
            # dyadic entries keep triple products bit-exact
            a, b, c = (
                (rng.integers(-4, 5, size=shape) + 1j * rng.integers(-4, 5, size=shape)) / 4.0
                for shape in ((2, 2), (3, 2), (2, 4))
            )
            left = tensor_product(tensor_product(a, b), c)
            right = tensor_product(a, tensor_product(b, c))
            assert np.array_equal(left, right)

    def test_composite_overflow_rejected(self):
        big = np.eye(200)
        with pytest.raises(ValueError, match="exceeds"):
            tensor_product(big, np.eye(100))

    def test_non_matrix_rejected(self):
        with pytest.raises(ValueError, match="2-dimensional"):
            tensor_product(np.ones(3), np.eye(2))


class TestPartialTrace:
    def test_product_state_recovers_atom(self):
        rng = np.random.default_rng(5)
        layout = SpaceLayout(field_dim=6)
        atom = random_density(rng, 2)
        vacuum = np.zeros((6, 6), dtype=complex)
        vacuum[0, 0] = 1.0
        composite = DensityMatrix(tensor_product(atom.matrix, vacuum))
        reduced = partial_trace_field(composite, layout)
        assert np.abs(reduced.matrix - atom.matrix).max() < 1e-12

    def test_maximally_entangled_gives_mixed_atom(self):
        layout = SpaceLayout(field_dim=2)
        bell = (np.kron(basis_vector(0, 2), basis_vector(0, 2))
                + np.kron(basis_vector(1, 2), basis_vector(1, 2))) / math.sqrt(2)
        reduced = partial_trace_field(PureState(bell).density_matrix(), layout)
        assert np.allclose(reduced.matrix, np.eye(2) / 2, atol=1e-15)

    def test_jc_evolution_against_loop_oracle(self):
        # evolve |e,0> with the independent expm propagator, contract by loop
        d = 8
        layout = SpaceLayout(field_dim=d)
        params = JCParams(omega_a=1.0, omega=1.0, g=0.1)
        h = build_jc_hamiltonian(params, d)
        psi0 = np.kron(basis_vector(0, 2), basis_vector(0, d))
        rho0 = np.outer(psi0, psi0.conj())
        t = 0.3 / params.g  # g t = 0.3
        evolved = expm_propagate(h, rho0, t)
        expected = loop_partial_trace_field(evolved, d)

        reduced = partial_trace_field(DensityMatrix(evolved), layout)
        assert np.abs(reduced.matrix - expected).max() < 1e-12
        assert np.trace(reduced.matrix @ reduced.matrix).real < 1.0 - 1e-4

    def test_dimension_mismatch_rejected(self):
        rng = np.random.default_rng(1)
        with pytest.raises(ValueError, match="does not match"):
            partial_trace_field(random_density(rng, 6), SpaceLayout(field_dim=4))


class TestHermEig:
    def test_diagonal_matrix(self):
        w, v = herm_eig(np.diag([1.0, 2.0, 3.0]).astype(complex))
        assert np.allclose(w, [1.0, 2.0, 3.0], atol=1e-15)
        assert np.allclose(np.abs(v), np.eye(3), atol=1e-15)

    def test_sigma_x_spectrum(self):
        sx = np.array([[0, 1], [1, 0]], dtype=complex)
        w, _ = herm_eig(sx)
        assert np.allclose(w, [-1.0, 1.0], atol=1e-15)

    def test_jc_dressed_splittings_match_block_oracle(self):
        # D = 2 on resonance: spectrum {-0.5, 0.4, 0.6, 1.5}, splitting 2g
        params = JCParams(omega_a=1.0, omega=1.0, g=0.1)
        w, _ = herm_eig(build_jc_hamiltonian(params, 2))
        lo, hi = herm_eig_2x2(excitation_block(params, 0))
        assert np.allclose(w, [-0.5, lo, hi, 1.5], atol=1e-12)
        assert abs((hi - lo) - 2 * params.g) < 1e-12

    def test_rejects_non_hermitian(self):
        with pytest.raises(ValueError, match="not Hermitian"):
            herm_eig(np.array([[0, 1], [0, 0]], dtype=complex))

    def test_reconstruction_error(self):
        rng = np.random.default_rng(3)
        for dim in (3, 10, 40):
            h = random_hermitian(rng, dim, scale=4.0)
            w, v = herm_eig(h)
            assert np.all(np.diff(w) >= 0)
            radius = np.abs(w).max()
            assert np.abs((v * w) @ v.conj().T - h).max() < 1e-9 * radius
            assert np.abs(v.conj().T @ v - np.eye(dim)).max() < 1e-10


class TestUnitaryFromHamiltonian:
    def test_zero_time_is_identity(self):
        rng = np.random.default_rng(7)
        u = unitary_from_hamiltonian(random_hermitian(rng, 5), 0.0)
        assert np.abs(u - np.eye(5)).max() < 1e-14

    def test_spin_half_full_period_is_global_phase(self):
        omega_a = 1.3
        h = 0.5 * omega_a * sigma_z()
        u = unitary_from_hamiltonian(h, 2 * math.pi / omega_a)
        assert np.abs(u + np.eye(2)).max() < 1e-12
        psi = np.array([0.6, 0.8], dtype=complex)
        assert abs(abs(psi.conj() @ u @ psi) - 1.0) < 1e-12

    def test_pi_half_pulse_inverts_population(self):
        # closed form: exp(-i sx t) = cos t - i sin t sx; at t = pi/2 -> -i sx
        sx = np.array([[0, 1], [1, 0]], dtype=complex)
        u = unitary_from_hamiltonian(sx, math.pi / 2)
        assert np.abs(u - (-1j * sx)).max() < 1e-12
        out = u @ np.array([1.0, 0.0])
        assert abs(abs(out[1]) - 1.0) < 1e-12
        assert abs(out[0]) < 1e-12

    def test_group_law(self):
        rng = np.random.default_rng(9)
        h = random_hermitian(rng, 8, scale=2.0)
        for t1, t2 in ((0.3, 1.1), (-0.7, 0.2), (5.0, -5.0)):
            lhs = unitary_from_hamiltonian(h, t1) @ unitary_from_hamiltonian(h, t2)
            rhs = unitary_from_hamiltonian(h, t1 + t2)
            assert np.abs(lhs - rhs).max() < 1e-9

    def test_unitarity(self):
        rng = np.random.default_rng(13)
        for dim in (2, 17, 38):
            u = unitary_from_hamiltonian(random_hermitian(rng, dim, scale=6.0), 3.7)
            assert np.abs(u.conj().T @ u - np.eye(dim)).max() < 1e-10

    def test_matches_expm_oracle(self):
        rng = np.random.default_rng(17)
        h = random_hermitian(rng, 6)
        rho = random_density(rng, 6)
        mine = unitary_from_hamiltonian(h, 0.9)
        assert np.abs(mine @ rho.matrix @ mine.conj().T - expm_propagate(h, rho.matrix, 0.9)).max() < 1e-12

    def test_infinite_time_rejected(self):
        with pytest.raises(ValueError, match="finite"):
            unitary_from_hamiltonian(np.eye(2), math.inf)


class TestValueTypes:
    def test_pure_state_norm_enforced(self):
        with pytest.raises(ValueError, match="norm"):
            PureState(np.array([1.0, 1.0]))

    def test_density_matrix_trace_enforced(self):
        with pytest.raises(ValueError, match="trace"):
            DensityMatrix(np.eye(2))

    def test_density_matrix_hermiticity_enforced(self):
        m = np.array([[0.5, 0.3], [0.0, 0.5]], dtype=complex)
        with pytest.raises(ValueError, match="Hermitian"):
            DensityMatrix(m)

    def test_density_matrix_positivity_enforced(self):
        m = np.diag([1.5, -0.5]).astype(complex)
        with pytest.raises(ValueError, match="eigenvalue"):
            DensityMatrix(m)

    def test_storage_is_frozen(self):
        rho = DensityMatrix(np.eye(2) / 2)
        with pytest.raises(ValueError):
            rho.matrix[0, 0] = 9.0

    def test_layout_requires_two_level_atom(self):
        with pytest.raises(ValueError, match="atom_dim"):
            SpaceLayout(field_dim=4, atom_dim=3)
