"""State metrics and convergence diagnostics."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .hilbert import DensityMatrix, SpaceLayout, partial_trace_field

# Reduced-state eigenvalues below this are treated as exact zeros in the
# entropy sum (0 log 0 = 0), absorbing numerically negative values.
ENTROPY_EIG_FLOOR = 1e-14

# Entanglement entropy is only defined here for pure composite states.
PURE_COMPOSITE_TOL = 1e-8


def trace_distance(a: DensityMatrix, b: DensityMatrix) -> float:
    """Half the sum of absolute eigenvalues of (a - b); lies in [0, 1]."""
    if a.dim != b.dim:
        raise ValueError(f"dimension mismatch: {a.dim} vs {b.dim}")
    # canonical operand order makes the result bit-exactly symmetric
    # (eigenvalues of M and -M can differ in the last ulp otherwise)
    x, y = a.matrix, b.matrix
    if x.tobytes() > y.tobytes():
        x, y = y, x
    eigs = np.linalg.eigvalsh(x - y)
    return float(0.5 * np.abs(eigs).sum())


def purity(rho: DensityMatrix) -> float:
    """Tr[rho^2], between 1/dim (maximally mixed) and 1 (pure)."""
    m = rho.matrix
    return float(np.trace(m @ m).real)


def entanglement_entropy(rho_composite: DensityMatrix, layout: SpaceLayout) -> float:
    """Base-2 von Neumann entropy of the reduced atomic state.

    Quantifies the atom-field entanglement of a pure composite state: 0 for
    products, 1 for a maximally entangled qubit pair. Raises ValueError for
    mixed composite input, where this quantity would not measure
    entanglement.
    """
    if purity(rho_composite) < 1.0 - PURE_COMPOSITE_TOL:
        raise ValueError("composite state is not pure; entanglement entropy is undefined")
    reduced = partial_trace_field(rho_composite, layout)
    lam = np.linalg.eigvalsh(reduced.matrix)
    lam = lam[lam > ENTROPY_EIG_FLOOR]
    return float(-(lam * np.log2(lam)).sum())


@dataclass(frozen=True)
class ConvergenceReport:
    """Result of a power-law fit of error against measurement count.

    exact = True flags that at least one error vanished, so agreement is
    exact and no finite order can be fitted.
    """

    n_values: tuple[int, ...]
    errors: tuple[float, ...]
    fitted_order: float
    fit_residual: float
    exact: bool = False

    def __post_init__(self):
        if len(self.n_values) != len(self.errors):
            raise ValueError("n_values and errors must have equal length")
        if len(self.n_values) < 3:
            raise ValueError("a convergence fit needs at least 3 points")
        if any(b <= a for a, b in zip(self.n_values, self.n_values[1:])):
            raise ValueError("n_values must be strictly increasing")


def fit_convergence_order(points) -> ConvergenceReport:
    """Least-squares slope of log(error) against log(N).

    points is a sequence of (N, error) pairs with strictly increasing N.
    The residual is the root-mean-square misfit of the log-log line.
    Nonpositive errors short-circuit to an exact-agreement report, since
    their logarithm does not exist.
    """
    pts = [(int(n), float(e)) for n, e in points]
    n_values = tuple(n for n, _ in pts)
    errors = tuple(e for _, e in pts)
    if len(pts) < 3:
        raise ValueError("a convergence fit needs at least 3 points")
    if any(e <= 0.0 for e in errors):
        return ConvergenceReport(
            n_values=n_values,
            errors=errors,
            fitted_order=float("nan"),
            fit_residual=0.0,
            exact=True,
        )
    log_n = np.log(np.array(n_values, dtype=np.float64))
    log_e = np.log(np.array(errors, dtype=np.float64))
    slope, intercept = np.polyfit(log_n, log_e, 1)
    residual = float(np.sqrt(np.mean((log_e - (slope * log_n + intercept)) ** 2)))
    return ConvergenceReport(
        n_values=n_values,
        errors=errors,
        fitted_order=float(slope),
        fit_residual=residual,
    )
