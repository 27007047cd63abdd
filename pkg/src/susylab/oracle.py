"""Independent eigenvalue oracle: finite-difference Schrodinger solver.

Discretizes H = -hbar**2 d2/dx2 + V (units 2m = 1) with second-order
central differences and Dirichlet walls on a truncated interval, then
extracts the lowest eigenvalues of the symmetric tridiagonal matrix.
Nothing here touches shape invariance; the only shared ingredient with
the analytic side is the potential's closed form, which is the object
under test.

Eigenvalue error is O(h**2); ``solve_spectrum`` optionally Richardson-
extrapolates from nested grids (h and h/2) to O(h**4).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .errors import (
    EmptyInputError,
    GridTooCoarseError,
    ParameterError,
    TruncationError,
)
from .invariance import Phase, classify_phase
from .spectra import broken_energy, hierarchy_max_n, unbroken_energy
from .superpotentials import SuperpotentialInstance, standard_grid

#: Confinement margin: the potential at each cut must exceed E_max by this.
CONFINEMENT_MARGIN = 25.0
#: Offset of the grid start from a finite (singular) endpoint.
ENDPOINT_OFFSET = 1e-3
#: Default interior node count for acceptance-quality runs.
DEFAULT_NODES = 4000


@dataclass(frozen=True)
class GridSpec:
    """Truncated Dirichlet grid: n interior nodes on (xmin, xmax)."""

    xmin: float
    xmax: float
    n: int
    boundary: str = "dirichlet"

    def __post_init__(self):
        if self.n < 200:
            raise ParameterError("oracle grids need at least 200 interior nodes")
        if not self.xmin < self.xmax:
            raise ParameterError("grid requires xmin < xmax")

    def nodes(self) -> np.ndarray:
        return np.linspace(self.xmin, self.xmax, self.n + 2)[1:-1]

    @property
    def spacing(self) -> float:
        return (self.xmax - self.xmin) / (self.n + 1)

    def refined(self) -> "GridSpec":
        """Same interval with exactly halved spacing (nested nodes)."""
        return GridSpec(self.xmin, self.xmax, 2 * self.n + 1, self.boundary)


@dataclass(frozen=True)
class OracleSpectrum:
    which: str
    eigenvalues: tuple[float, ...]
    grid: GridSpec
    richardson_estimate: tuple[float, ...] | None = None

    def best(self) -> list[float]:
        if self.richardson_estimate is not None:
            return list(self.richardson_estimate)
        return list(self.eigenvalues)

    def as_dict(self) -> dict:
        out = {
            "which": self.which,
            "N": self.grid.n,
            "xmin": self.grid.xmin,
            "xmax": self.grid.xmax,
            "eigenvalues": list(self.eigenvalues),
        }
        if self.richardson_estimate is not None:
            out["richardson"] = list(self.richardson_estimate)
        return out


@dataclass(frozen=True)
class LevelComparison:
    n: int
    analytic: float
    numeric: float
    rel_error: float
    passed: bool


@dataclass(frozen=True)
class ComparisonReport:
    rows: tuple[LevelComparison, ...]
    rel_tol: float

    @property
    def all_pass(self) -> bool:
        return all(r.passed for r in self.rows)

    @property
    def worst(self) -> float:
        return max(r.rel_error for r in self.rows)

    def as_dict(self) -> dict:
        return {
            "rel_tol": self.rel_tol,
            "all_pass": self.all_pass,
            "levels": [vars(r) for r in self.rows],
        }


# ---------------------------------------------------------------------------
# grid construction
# ---------------------------------------------------------------------------

def build_grid(sp: SuperpotentialInstance, which: str, e_max: float,
               n: int = DEFAULT_NODES,
               margin: float = CONFINEMENT_MARGIN) -> GridSpec:
    """Truncation cuts for the Dirichlet grid.

    Infinite ends are expanded geometrically until V exceeds e_max +
    margin; TruncationError signals a potential that plateaus below it
    (levels would leak into the continuum).  Finite endpoints are domain
    walls: the cut sits a fixed small offset inside, with no threshold on
    V there -- the wall itself confines even where the partner structure
    cancels the 1/u**2 divergence (e.g. V_plus of broken Scarf at
    B - a = hbar).
    """
    threshold = e_max + margin
    scan = standard_grid(sp, 160)
    v_scan = sp.partner(scan, which)
    center = float(scan[int(np.argmin(v_scan))])
    xmin = _cut(sp, which, center, -1, threshold)
    xmax = _cut(sp, which, center, +1, threshold)
    return GridSpec(xmin, xmax, n)


def _cut(sp, which, center, side, threshold):
    d = sp.domain
    bound = d.x_right if side > 0 else d.x_left
    if math.isfinite(bound):
        width = d.width if math.isfinite(d.width) else 1.0
        return bound - side * ENDPOINT_OFFSET * min(1.0, width)
    step = max(1.0, 0.5 * abs(center))
    x = center + side * step
    for _ in range(200):
        if sp.partner(x, which) >= threshold:
            return x
        step *= 1.5
        x = center + side * step
        if step > 1e7:
            break
    raise TruncationError(
        f"{sp.name}: potential stays below E_max + {CONFINEMENT_MARGIN} "
        f"toward {'+' if side > 0 else '-'}infinity; levels near the "
        "continuum edge cannot be confined on a finite grid"
    )


# ---------------------------------------------------------------------------
# the solver
# ---------------------------------------------------------------------------

def fd_eigenvalues(x: np.ndarray, v: np.ndarray, hbar: float, k: int) -> np.ndarray:
    """Lowest k eigenvalues of the central-difference tridiagonal matrix."""
    h = x[1] - x[0]
    kin = hbar * hbar / (h * h)
    diag = 2.0 * kin + v
    off = np.full(x.size - 1, -kin)
    return eigh_tridiagonal(diag, off, eigvals_only=True,
                            select="i", select_range=(0, k - 1))


def solve_spectrum(sp: SuperpotentialInstance, which: str,
                   grid: GridSpec | None = None, k: int = 4,
                   richardson: bool = True,
                   e_max: float | None = None,
                   shift_tol: float = 1e-3) -> OracleSpectrum:
    """Lowest k eigenvalues of the chosen partner hamiltonian.

    With richardson=True the problem is solved on the grid and its nested
    refinement; the two-grid shift must stay below shift_tol (relative),
    otherwise GridTooCoarseError signals that the comparison would be
    discretization-limited.
    """
    if k < 1:
        raise ParameterError("k must be at least 1")
    if grid is None:
        if e_max is None:
            e_max = _analytic_e_max(sp, k)
        grid = build_grid(sp, which, e_max)
    x = grid.nodes()
    v = sp.partner(x, which)
    coarse = fd_eigenvalues(x, v, sp.params.hbar, k)
    if not richardson:
        return OracleSpectrum(which, tuple(float(e) for e in coarse), grid)
    fine_grid = grid.refined()
    xf = fine_grid.nodes()
    fine = fd_eigenvalues(xf, sp.partner(xf, which), sp.params.hbar, k)
    shift = np.abs(fine - coarse) / np.maximum(1.0, np.abs(fine))
    if np.any(shift > shift_tol):
        raise GridTooCoarseError(
            f"{sp.name}: two-grid eigenvalue shift {float(np.max(shift)):.2e} "
            f"exceeds {shift_tol:.0e}; refine the grid"
        )
    extrapolated = (4.0 * fine - coarse) / 3.0
    return OracleSpectrum(
        which,
        tuple(float(e) for e in fine),
        grid,
        tuple(float(e) for e in extrapolated),
    )


def _analytic_e_max(sp: SuperpotentialInstance, k: int) -> float:
    phase = classify_phase(sp).phase
    top = min(k - 1, max(hierarchy_max_n(sp, phase), 0))
    if phase is Phase.BROKEN:
        return broken_energy(sp, top)
    return unbroken_energy(sp, top)


# ---------------------------------------------------------------------------
# comparisons
# ---------------------------------------------------------------------------

def compare_spectra(analytic, numeric, rel_tol: float = 1e-3) -> ComparisonReport:
    """Per-level relative errors of numeric against analytic values.

    ``numeric`` may be an OracleSpectrum (its Richardson values are used
    when present) or a plain list.  Levels are truncated to the shorter
    list; zero analytic values are compared with an absolute floor of one
    energy unit.
    """
    if isinstance(numeric, OracleSpectrum):
        numeric = numeric.best()
    analytic = list(analytic)
    numeric = list(numeric)
    if not analytic or not numeric:
        raise EmptyInputError("compare_spectra needs non-empty level lists")
    count = min(len(analytic), len(numeric))
    rows = []
    for i in range(count):
        err = abs(numeric[i] - analytic[i]) / max(abs(analytic[i]), 1.0)
        rows.append(LevelComparison(
            n=i, analytic=float(analytic[i]), numeric=float(numeric[i]),
            rel_error=float(err), passed=bool(err <= rel_tol),
        ))
    return ComparisonReport(tuple(rows), rel_tol)


def verify_isospectrality(sp: SuperpotentialInstance,
                          grid: GridSpec | None = None, k: int = 4,
                          rel_tol: float = 1e-3) -> ComparisonReport:
    """Partner-spectrum relation, checked with two independent solves.

    Broken phase: H_minus and H_plus are isospectral level by level.
    Unbroken phase: H_minus levels 1..k match H_plus levels 0..k-1 and the
    H_minus ground level must vanish (within the grid tolerance).
    """
    phase = classify_phase(sp).phase
    if phase is Phase.BROKEN:
        minus = solve_spectrum(sp, "minus", grid=grid, k=k)
        plus = solve_spectrum(sp, "plus", grid=grid, k=k)
        return compare_spectra(minus.best(), plus.best(), rel_tol)
    minus = solve_spectrum(sp, "minus", grid=grid, k=k + 1)
    plus = solve_spectrum(sp, "plus", grid=grid, k=k)
    ground = minus.best()[0]
    if abs(ground) > rel_tol:
        raise GridTooCoarseError(
            f"{sp.name}: unbroken ground level {ground:.3e} not within "
            f"{rel_tol:.0e} of zero"
        )
    return compare_spectra(minus.best()[1:], plus.best(), rel_tol)


def convergence_exponent(sp: SuperpotentialInstance, which: str,
                         base_grid: GridSpec, levels: int = 2) -> list[float]:
    """Observed order of accuracy from three nested grids (h, h/2, h/4).

    Returns log2((E_h - E_h/2) / (E_h/2 - E_h/4)) per level; second-order
    differencing should give values near 2.
    """
    g1 = base_grid
    g2 = g1.refined()
    g3 = g2.refined()
    results = []
    for g in (g1, g2, g3):
        x = g.nodes()
        v = sp.partner(x, which)
        results.append(fd_eigenvalues(x, v, sp.params.hbar, levels))
    e1, e2, e3 = results
    return [float(np.log2(abs(e1[i] - e2[i]) / abs(e2[i] - e3[i])))
            for i in range(levels)]
