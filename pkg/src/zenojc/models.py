"""Jaynes-Cummings Hamiltonians: composite form and field-averaged reduction.

The composite Hamiltonian (rotating-wave form, hbar = 1) is

    H = (omega_a / 2) sigma_z (x) I  +  omega I (x) a†a  +  g (sigma_+ (x) a + sigma_- (x) a†)

in the (excited, ground) atomic basis. Averaging H over a field state |B>
gives the 2x2 generator of the measurement-frozen atomic evolution. The
identity-proportional field-energy terms (omega |alpha|^2 and the like) are
kept in that reduction: they commute out of the atomic evolution, so
retaining them preserves the exact identity  effective = <B|H|B>.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .hilbert import (
    HERM_TOL,
    PureState,
    SpaceLayout,
    as_complex_matrix,
    hermiticity_defect,
    tensor_product,
)
from .states import field_ladder_operators


def sigma_z() -> np.ndarray:
    """diag(+1, -1): excited state at +1."""
    return np.diag([1.0 + 0j, -1.0 + 0j])


def sigma_plus() -> np.ndarray:
    """Raising operator |e><g|."""
    return np.array([[0, 1], [0, 0]], dtype=np.complex128)


def sigma_minus() -> np.ndarray:
    """Lowering operator |g><e|."""
    return np.array([[0, 0], [1, 0]], dtype=np.complex128)


@dataclass(frozen=True)
class JCParams:
    """Atomic transition frequency, field mode frequency, and coupling (hbar = 1)."""

    omega_a: float
    omega: float
    g: float

    def __post_init__(self):
        for name in ("omega_a", "omega", "g"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value!r}")
        if self.g < 0:
            raise ValueError(f"coupling g must be nonnegative, got {self.g!r}")


def build_jc_hamiltonian(params: JCParams, field_dim: int) -> np.ndarray:
    """Composite Hamiltonian on the 2 * field_dim space.

    Block-diagonal in the total excitation number: each pair
    {|e, n>, |g, n+1>} is closed under it, with coupling entry g sqrt(n+1).
    """
    a, a_dag = field_ladder_operators(field_dim)
    eye_f = np.eye(field_dim, dtype=np.complex128)
    eye_a = np.eye(2, dtype=np.complex128)
    return (
        0.5 * params.omega_a * tensor_product(sigma_z(), eye_f)
        + params.omega * tensor_product(eye_a, a_dag @ a)
        + params.g * (tensor_product(sigma_plus(), a) + tensor_product(sigma_minus(), a_dag))
    )


def effective_hamiltonian(full_h, b: PureState, layout: SpaceLayout) -> np.ndarray:
    """Average the composite operator over the field state: entries <i|<B| H |j>|B>.

    Returns the 2x2 atomic operator. Hermitian whenever full_h is.
    """
    h = as_complex_matrix(full_h, "composite operator")
    if h.shape != (layout.composite_dim, layout.composite_dim):
        raise ValueError(
            f"composite operator shape {h.shape} does not match layout dimension {layout.composite_dim}"
        )
    if b.dim != layout.field_dim:
        raise ValueError(f"field state dimension {b.dim} does not match layout field_dim {layout.field_dim}")
    r = h.reshape(layout.atom_dim, layout.field_dim, layout.atom_dim, layout.field_dim)
    return np.einsum("imjn,m,n->ij", r, b.amplitudes.conj(), b.amplitudes)


@dataclass(frozen=True, eq=False)
class HamiltonianSet:
    """Composite Hamiltonian, its field-averaged 2x2 reduction, and the field state.

    Construction checks both matrices are Hermitian and that the reduction
    really is the field average of the composite operator (to HERM_TOL).
    """

    full: np.ndarray
    effective: np.ndarray
    b_state: PureState

    def __post_init__(self):
        full = as_complex_matrix(self.full, "composite Hamiltonian")
        eff = as_complex_matrix(self.effective, "effective Hamiltonian")
        layout = SpaceLayout(field_dim=self.b_state.dim)
        if full.shape != (layout.composite_dim, layout.composite_dim):
            raise ValueError(f"composite Hamiltonian shape {full.shape} does not match field state")
        if eff.shape != (2, 2):
            raise ValueError(f"effective Hamiltonian must be 2x2, got shape {eff.shape}")
        for name, m in (("composite", full), ("effective", eff)):
            defect = hermiticity_defect(m)
            if defect > HERM_TOL:
                raise ValueError(f"{name} Hamiltonian is not Hermitian (defect {defect:.3e})")
        expected = effective_hamiltonian(full, self.b_state, layout)
        mismatch = float(np.abs(eff - expected).max())
        if mismatch > HERM_TOL:
            raise ValueError(
                f"effective Hamiltonian deviates from the field average by {mismatch:.3e}"
            )
        full = full.copy()
        full.flags.writeable = False
        eff = eff.copy()
        eff.flags.writeable = False
        object.__setattr__(self, "full", full)
        object.__setattr__(self, "effective", eff)

    @property
    def layout(self) -> SpaceLayout:
        return SpaceLayout(field_dim=self.b_state.dim)


def build_hamiltonians(params: JCParams, b: PureState) -> HamiltonianSet:
    """Assemble the composite Hamiltonian and its reduction onto the field state b."""
    layout = SpaceLayout(field_dim=b.dim)
    full = build_jc_hamiltonian(params, b.dim)
    eff = effective_hamiltonian(full, b, layout)
    return HamiltonianSet(full=full, effective=eff, b_state=b)
