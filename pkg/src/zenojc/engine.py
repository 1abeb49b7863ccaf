"""Evolution routes for the measurement-driven protocol.

A run splits the total time T into N intervals; each interval is a free
unitary evolution followed by a projective measurement of the field onto
the state it started in. Three routes compute the resulting atomic
evolution:

    run_zeno_exact    - evolve the composite state and project, N times;
    run_superoperator - exponentiate the second-order generator of a single
                        evolve-and-project step on the atomic space alone;
    run_effective     - the many-measurement limit, a plain unitary evolution
                        under the field-averaged Hamiltonian.

Projections are renormalized and the success probability of each one is
tracked separately, so the product of the recorded survivals reconstructs
the norm of the unnormalized post-selected branch.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
import scipy.linalg

from .hilbert import (
    DensityMatrix,
    PureState,
    SpaceLayout,
    partial_trace_field,
    herm_eig,
    unitary_from_hamiltonian,
)
from .models import HamiltonianSet, JCParams, build_hamiltonians, effective_hamiltonian
from .states import (
    AtomicStateSpec,
    FieldStateSpec,
    default_truncation,
    realize_atomic_state,
    realize_field_state,
)

# A projection this unlikely means the post-selected branch is empty;
# continuing would divide by a denormal and produce meaningless statistics.
SURVIVAL_CUTOFF = 1e-14

# Post-measurement states must leave the field marginal on the measured state.
FACTORIZATION_TOL = 1e-10

ROUTE_EXACT = "exact"
ROUTE_SUPEROPERATOR = "superoperator"
ROUTE_EFFECTIVE = "effective"
ROUTES = (ROUTE_EXACT, ROUTE_SUPEROPERATOR, ROUTE_EFFECTIVE)


class SurvivalCutoffError(RuntimeError):
    """A projection succeeded with probability below SURVIVAL_CUTOFF."""

    def __init__(self, survival: float, step_index: int | None = None):
        self.survival = survival
        self.step_index = step_index
        where = f" at step {step_index}" if step_index is not None else ""
        super().__init__(
            f"survival probability {survival:.3e}{where} fell below the cutoff {SURVIVAL_CUTOFF:.0e}"
        )


@dataclass(frozen=True)
class ZenoRunConfig:
    """All physical and numerical parameters of one protocol run.

    truncation = None lets the field state pick its own adequate dimension.
    """

    params: JCParams
    field_spec: FieldStateSpec
    atom_spec: AtomicStateSpec
    total_time: float
    num_measurements: int
    truncation: int | None = None

    def __post_init__(self):
        if not (math.isfinite(self.total_time) and self.total_time > 0):
            raise ValueError(f"total_time must be finite and positive, got {self.total_time!r}")
        if not isinstance(self.num_measurements, int) or self.num_measurements < 1:
            raise ValueError(f"num_measurements must be a positive integer, got {self.num_measurements!r}")
        if self.truncation is not None and (not isinstance(self.truncation, int) or self.truncation < 2):
            raise ValueError(f"truncation must be an integer >= 2 or None, got {self.truncation!r}")

    def resolved_truncation(self) -> int:
        if self.truncation is not None:
            return self.truncation
        return default_truncation(self.field_spec)

    def replace_measurements(self, n: int) -> "ZenoRunConfig":
        """Copy of this config with a different measurement count."""
        return replace(self, num_measurements=n)


@dataclass(frozen=True)
class ZenoStep:
    """State of the atomic subsystem after one protocol step."""

    index: int
    time: float
    atom_state: DensityMatrix
    survival: float
    cumulative_survival: float

    def __post_init__(self):
        for name in ("survival", "cumulative_survival"):
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0 + 1e-12:
                raise ValueError(f"{name} {p!r} outside [0, 1]")


@dataclass(frozen=True, eq=False)
class ZenoTrace:
    """Per-step record of one run, tagged with the route that produced it."""

    route: str
    config: ZenoRunConfig
    truncation: int
    steps: tuple[ZenoStep, ...]

    def __post_init__(self):
        if self.route not in ROUTES:
            raise ValueError(f"unknown route {self.route!r}")
        if not self.steps:
            raise ValueError("trace must contain at least one step")

    @property
    def final_atom_state(self) -> DensityMatrix:
        return self.steps[-1].atom_state

    def times(self) -> np.ndarray:
        return np.array([s.time for s in self.steps])

    def excited_populations(self) -> np.ndarray:
        return np.array([s.atom_state.matrix[0, 0].real for s in self.steps])

    def __len__(self) -> int:
        return len(self.steps)

    def __repr__(self):
        return f"ZenoTrace(route={self.route!r}, steps={len(self.steps)})"


def _setup(cfg: ZenoRunConfig) -> tuple[SpaceLayout, PureState, DensityMatrix, HamiltonianSet]:
    dim = cfg.resolved_truncation()
    b = realize_field_state(cfg.field_spec, dim)
    atom0 = realize_atomic_state(cfg.atom_spec)
    hams = build_hamiltonians(cfg.params, b)
    return hams.layout, b, atom0, hams


def step_exact(
    rho: DensityMatrix, u: np.ndarray, b: PureState, layout: SpaceLayout
) -> tuple[DensityMatrix, float]:
    """One free evolution followed by a projection of the field onto b.

    Returns the renormalized post-measurement composite state, which
    factorizes as (atomic state) (x) |b><b|, and the probability that the
    projection succeeded. Raises SurvivalCutoffError when that probability
    falls below SURVIVAL_CUTOFF.
    """
    if rho.dim != layout.composite_dim:
        raise ValueError(f"state dimension {rho.dim} does not match layout {layout.composite_dim}")
    if b.dim != layout.field_dim:
        raise ValueError(f"field state dimension {b.dim} does not match layout {layout.field_dim}")
    if u.shape != (rho.dim, rho.dim):
        raise ValueError(f"propagator shape {u.shape} does not match state dimension {rho.dim}")

    evolved = u @ rho.matrix @ u.conj().T
    r = evolved.reshape(layout.atom_dim, layout.field_dim, layout.atom_dim, layout.field_dim)
    block = np.einsum("imjn,m,n->ij", r, b.amplitudes.conj(), b.amplitudes)
    survival = float(np.trace(block).real)
    if survival < SURVIVAL_CUTOFF:
        raise SurvivalCutoffError(survival)

    atom_next = block / survival
    rho_next = DensityMatrix(np.kron(atom_next, b.projector()))

    marginal = np.einsum("imin->mn", rho_next.matrix.reshape(r.shape))
    fidelity = float(np.real(b.amplitudes.conj() @ marginal @ b.amplitudes))
    if fidelity < 1.0 - FACTORIZATION_TOL:
        raise RuntimeError(f"post-measurement field marginal fidelity {fidelity!r} below tolerance")
    return rho_next, survival


def run_zeno_exact(cfg: ZenoRunConfig) -> ZenoTrace:
    """Exact protocol: N repetitions of unitary evolution plus projection.

    The per-step propagator is diagonalized once and reused for all N steps.
    """
    layout, b, atom0, hams = _setup(cfg)
    n = cfg.num_measurements
    dt = cfg.total_time / n
    u = unitary_from_hamiltonian(hams.full, dt)

    rho = DensityMatrix(np.kron(atom0.matrix, b.projector()))
    steps = []
    cumulative = 1.0
    for k in range(1, n + 1):
        try:
            rho, survival = step_exact(rho, u, b, layout)
        except SurvivalCutoffError as exc:
            raise SurvivalCutoffError(exc.survival, step_index=k) from None
        cumulative *= survival
        steps.append(
            ZenoStep(
                index=k,
                time=k * dt,
                atom_state=partial_trace_field(rho, layout),
                survival=survival,
                cumulative_survival=cumulative,
            )
        )
    return ZenoTrace(route=ROUTE_EXACT, config=cfg, truncation=layout.field_dim, steps=tuple(steps))


def pre_measurement_state(cfg: ZenoRunConfig, step: int | None = None) -> DensityMatrix:
    """Composite state after the free evolution of the given step, before its projection.

    step is 1-based and defaults to the last one. With a pure initial atomic
    state this state is pure, so its atom-field entanglement is well defined.
    """
    n = cfg.num_measurements
    if step is None:
        step = n
    if not 1 <= step <= n:
        raise ValueError(f"step must lie in [1, {n}], got {step}")
    layout, b, atom0, hams = _setup(cfg)
    dt = cfg.total_time / n
    u = unitary_from_hamiltonian(hams.full, dt)
    rho = DensityMatrix(np.kron(atom0.matrix, b.projector()))
    for k in range(1, step):
        try:
            rho, _ = step_exact(rho, u, b, layout)
        except SurvivalCutoffError as exc:
            raise SurvivalCutoffError(exc.survival, step_index=k) from None
    return DensityMatrix(u @ rho.matrix @ u.conj().T)


def step_generator(h_eff: np.ndarray, h2_eff: np.ndarray, dt: float) -> np.ndarray:
    """4x4 generator of one evolve-and-project step on the flattened atomic state.

    Acts on the row-major flattening of the 2x2 atomic density matrix as

        -i dt [h_eff, .] - (dt^2 / 2) {var, .},   var = h2_eff - h_eff^2,

    whose exponential reproduces the second-order expansion of the exact
    projected step through O(dt^2): the commutator drives the averaged
    unitary motion and the variance anticommutator encodes the survival
    decay. The trace of the propagated matrix is therefore the step's
    survival estimate rather than a conserved quantity.
    """
    eye = np.eye(2, dtype=np.complex128)
    var = h2_eff - h_eff @ h_eff
    commutator = np.kron(h_eff, eye) - np.kron(eye, h_eff.T)
    anticommutator = np.kron(var, eye) + np.kron(eye, var.T)
    return -1j * dt * commutator - 0.5 * dt * dt * anticommutator


def _expm(x: np.ndarray) -> np.ndarray:
    """exp(x) via eigendecomposition, with scaling-and-squaring as the fallback.

    The generator is not anti-Hermitian at finite dt, so the decomposition
    can in principle be defective; an ill-conditioned eigenvector matrix
    routes the computation through scipy's expm instead.
    """
    w, v = np.linalg.eig(x)
    cond = np.linalg.cond(v)
    if not np.isfinite(cond) or cond > 1e8:
        return scipy.linalg.expm(x)
    return (v * np.exp(w)) @ np.linalg.inv(v)


def run_superoperator(cfg: ZenoRunConfig) -> ZenoTrace:
    """Finite-N route: apply the exponentiated step generator N times.

    The per-step trace loss is reported as that step's survival estimate and
    the state is renormalized before it is recorded, mirroring the exact
    route's bookkeeping.
    """
    layout, b, atom0, hams = _setup(cfg)
    n = cfg.num_measurements
    dt = cfg.total_time / n
    h2_eff = effective_hamiltonian(hams.full @ hams.full, b, layout)
    step_map = _expm(step_generator(hams.effective, h2_eff, dt))

    vec = atom0.matrix.ravel()
    steps = []
    cumulative = 1.0
    for k in range(1, n + 1):
        vec = step_map @ vec
        m = vec.reshape(2, 2)
        survival = float(np.trace(m).real)
        if survival < SURVIVAL_CUTOFF:
            raise SurvivalCutoffError(survival, step_index=k)
        m = m / survival
        # rounding drifts Hermiticity at the 1e-16 scale per step; fold it
        # back so long runs stay within the density-matrix tolerance
        m = 0.5 * (m + m.conj().T)
        vec = m.ravel()
        cumulative *= survival
        steps.append(
            ZenoStep(
                index=k,
                time=k * dt,
                atom_state=DensityMatrix(m),
                survival=survival,
                cumulative_survival=cumulative,
            )
        )
    return ZenoTrace(route=ROUTE_SUPEROPERATOR, config=cfg, truncation=layout.field_dim, steps=tuple(steps))


def run_effective(cfg: ZenoRunConfig, samples: int | None = None) -> ZenoTrace:
    """Many-measurement limit: unitary atomic evolution under the field average.

    The trajectory is sampled at `samples` evenly spaced times (defaulting
    to one per measurement so the grid lines up with the other routes); all
    survival probabilities are identically 1 in this limit.
    """
    if samples is None:
        samples = cfg.num_measurements
    if samples < 1:
        raise ValueError(f"samples must be a positive integer, got {samples!r}")
    layout, b, atom0, hams = _setup(cfg)
    w, v = herm_eig(hams.effective)
    dt = cfg.total_time / samples

    steps = []
    for j in range(1, samples + 1):
        u = (v * np.exp(-1j * w * (j * dt))) @ v.conj().T
        m = u @ atom0.matrix @ u.conj().T
        steps.append(
            ZenoStep(
                index=j,
                time=j * dt,
                atom_state=DensityMatrix(m),
                survival=1.0,
                cumulative_survival=1.0,
            )
        )
    return ZenoTrace(route=ROUTE_EFFECTIVE, config=cfg, truncation=layout.field_dim, steps=tuple(steps))


def run_route(cfg: ZenoRunConfig, route: str) -> ZenoTrace:
    """Dispatch a run by route name."""
    if route == ROUTE_EXACT:
        return run_zeno_exact(cfg)
    if route == ROUTE_SUPEROPERATOR:
        return run_superoperator(cfg)
    if route == ROUTE_EFFECTIVE:
        return run_effective(cfg)
    raise ValueError(f"unknown route {route!r}")


def survival_probability(trace: ZenoTrace) -> float:
    """Probability that every projection of a protocol run succeeded."""
    product = 1.0
    for step in trace.steps:
        product *= step.survival
    return product
