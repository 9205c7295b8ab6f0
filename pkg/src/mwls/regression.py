"""Local-polynomial basis spaces on hypercube partitions and empirical OLS.

The approximation space partitions [-R, R]^d into half-open cells of edge
length delta and carries all monomials of total degree <= n on each cell,
centered at the cell midpoint and scaled to unit cell coordinates.  Cells
decouple the least-squares problem: each one is solved independently on the
sample rows landing in it, with the minimal-norm solution on rank-deficient
cells and zero coefficients on empty ones.  Points outside the support
evaluate to zero.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field, replace

import numpy as np

__all__ = [
    "LocalPolynomialBasis",
    "LocalPolynomialEstimator",
    "cell_index",
    "evaluate_basis",
    "ols_fit",
    "truncate_estimator",
    "save_estimator_csv",
]


def _graded_powers(degree: int, d: int) -> np.ndarray:
    """Monomial multi-indices of total degree <= degree, graded order."""
    rows = []
    for total in range(degree + 1):
        for combo in itertools.combinations_with_replacement(range(d), total):
            p = [0] * d
            for axis in combo:
                p[axis] += 1
            rows.append(p)
    return np.array(rows, dtype=int)


@dataclass(frozen=True)
class LocalPolynomialBasis:
    """Piecewise-polynomial space: degree-n monomials per hypercube cell.

    Args:
        degree: maximal total degree n >= 0 of the per-cell polynomials.
        delta: cell edge length.
        radius: half-width R of the support [-R, R]^d.
        d: state dimension.
        out_dim: number of output components fitted jointly (1 for y, q for z).
    """

    degree: int
    delta: float
    radius: float
    d: int
    out_dim: int = 1
    cells_per_axis: int = field(init=False, compare=False)
    powers: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if self.degree < 0:
            raise ValueError(f"degree must be >= 0, got {self.degree}")
        if self.delta <= 0.0:
            raise ValueError(f"cell edge must be positive, got {self.delta}")
        if self.radius <= 0.0:
            raise ValueError(f"support half-width must be positive, got {self.radius}")
        if self.d < 1:
            raise ValueError(f"state dimension must be >= 1, got {self.d}")
        if self.out_dim < 1:
            raise ValueError(f"output dimension must be >= 1, got {self.out_dim}")
        # ceil(2R/delta) with protection against float fuzz in the division
        per_axis = max(1, int(math.ceil(2.0 * self.radius / self.delta - 1e-12)))
        object.__setattr__(self, "cells_per_axis", per_axis)
        object.__setattr__(self, "powers", _graded_powers(self.degree, self.d))

    @property
    def n_cells(self) -> int:
        return self.cells_per_axis**self.d

    @property
    def monomials(self) -> int:
        """Per-cell monomial count C(n + d, d)."""
        return self.powers.shape[0]

    @property
    def K(self) -> int:
        """Total dimension of the approximation space."""
        return self.n_cells * self.monomials

    def _cells_of(self, points: np.ndarray) -> np.ndarray:
        """Cell id per row of (M, d) points; -1 for points outside."""
        outside = np.any(np.abs(points) > self.radius, axis=1)
        k = np.floor((points + self.radius) / self.delta).astype(int)
        np.clip(k, 0, self.cells_per_axis - 1, out=k)
        flat = k[:, 0]
        for axis in range(1, self.d):
            flat = flat * self.cells_per_axis + k[:, axis]
        return np.where(outside, -1, flat)

    def _midpoints(self, cells: np.ndarray) -> np.ndarray:
        """Cell midpoints, shape (len(cells), d)."""
        k = np.empty((cells.size, self.d), dtype=int)
        rest = cells
        for axis in range(self.d - 1, -1, -1):
            k[:, axis] = rest % self.cells_per_axis
            rest = rest // self.cells_per_axis
        return -self.radius + (k + 0.5) * self.delta

    def _design_rows(self, points: np.ndarray, cells: np.ndarray) -> np.ndarray:
        """Scaled monomial rows, shape (M, monomials), for in-support points."""
        u = (points - self._midpoints(cells)) / (0.5 * self.delta)
        return np.prod(u[:, None, :] ** self.powers[None, :, :], axis=2)


def cell_index(basis: LocalPolynomialBasis, x) -> int:
    """Cell id of a point, or -1 outside [-R, R]^d.

    Cells are half-open along each axis; the boundary x_k = R falls into
    the last cell.
    """
    point = np.atleast_1d(np.asarray(x, dtype=float)).reshape(1, basis.d)
    return int(basis._cells_of(point)[0])


def evaluate_basis(basis: LocalPolynomialBasis, x) -> np.ndarray:
    """Length-K coefficient pattern of a point: the monomials of its cell
    in that cell's block, zeros elsewhere; all zeros outside the support."""
    point = np.atleast_1d(np.asarray(x, dtype=float)).reshape(1, basis.d)
    out = np.zeros(basis.K)
    cell = basis._cells_of(point)[0]
    if cell < 0:
        return out
    row = basis._design_rows(point, np.array([cell]))[0]
    start = cell * basis.monomials
    out[start : start + basis.monomials] = row
    return out


@dataclass(frozen=True, eq=False)
class LocalPolynomialEstimator:
    """Fitted piecewise polynomial, optionally truncated.

    Evaluation is the cell polynomial inside [-R, R]^d, zero outside, and
    clamped componentwise to [-level, level] when a truncation level is set.
    """

    basis: LocalPolynomialBasis
    coefficients: np.ndarray = field(repr=False)  # (n_cells, monomials, out_dim)
    level: float | None = None

    def evaluate(self, points) -> np.ndarray:
        """Estimator values, shape (M, out_dim), for (M, d) points."""
        pts = np.asarray(points, dtype=float)
        if pts.ndim == 1:
            pts = pts.reshape(-1, self.basis.d)
        cells = self.basis._cells_of(pts)
        out = np.zeros((pts.shape[0], self.basis.out_dim))
        inside = cells >= 0
        if np.any(inside):
            rows = self.basis._design_rows(pts[inside], cells[inside])
            blocks = self.coefficients[cells[inside]]
            out[inside] = np.einsum("mc,mco->mo", rows, blocks)
        if self.level is not None:
            np.clip(out, -self.level, self.level, out=out)
        return out

    def __call__(self, points) -> np.ndarray:
        return self.evaluate(points)


def ols_fit(
    responses, basis: LocalPolynomialBasis, points
) -> LocalPolynomialEstimator:
    """Empirical least squares of responses on the basis at sample points.

    Minimizes the mean squared residual over the approximation space.  The
    disjoint cell supports decouple the problem: each cell is solved by
    SVD-based least squares on its own rows (minimal-norm coefficients when
    rank-deficient), empty cells keep zero coefficients, and rows outside
    the support do not influence the fit (their basis row is zero).

    Args:
        responses: per-row outputs, shape (M,) or (M, out_dim).
        basis: the approximation space; out_dim must match the responses.
        points: per-row states, shape (M, d).
    """
    resp = np.asarray(responses, dtype=float)
    if resp.ndim == 1:
        resp = resp[:, None]
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        pts = pts[:, None]
    if resp.shape[0] != pts.shape[0]:
        raise ValueError(
            f"responses and points disagree on row count: {resp.shape[0]} vs {pts.shape[0]}"
        )
    if resp.shape[0] < 1:
        raise ValueError("at least one sample row is required")
    if resp.shape[1] != basis.out_dim:
        raise ValueError(
            f"responses have {resp.shape[1]} components, basis fits {basis.out_dim}"
        )
    if pts.shape[1] != basis.d:
        raise ValueError(f"points have dimension {pts.shape[1]}, basis expects {basis.d}")
    bad = ~np.all(np.isfinite(resp), axis=1)
    if np.any(bad):
        raise ValueError(f"non-finite response at row {int(np.argmax(bad))}")

    cells = basis._cells_of(pts)
    coef = np.zeros((basis.n_cells, basis.monomials, basis.out_dim))
    order = np.argsort(cells, kind="stable")
    sorted_cells = cells[order]
    boundaries = np.flatnonzero(np.diff(sorted_cells)) + 1
    for group in np.split(order, boundaries):
        cell = cells[group[0]]
        if cell < 0:
            continue
        design = basis._design_rows(pts[group], np.full(group.size, cell))
        rcond = np.finfo(float).eps * max(design.shape)
        solution, *_ = np.linalg.lstsq(design, resp[group], rcond=rcond)
        coef[cell] = solution
    return LocalPolynomialEstimator(basis=basis, coefficients=coef, level=None)


def truncate_estimator(
    estimator: LocalPolynomialEstimator, level: float
) -> LocalPolynomialEstimator:
    """Clamp the estimator's values componentwise to [-level, level].

    The clamp is 1-Lipschitz on values, so truncation never increases the
    distance to any function already bounded by the level.
    """
    if level < 0.0:
        raise ValueError(f"truncation level must be >= 0, got {level}")
    return replace(estimator, level=float(level))


def save_estimator_csv(estimator: LocalPolynomialEstimator, path: str, **provenance) -> None:
    """Dump the coefficient table (cell, multi-index, component, coefficient).

    Provenance keyword pairs are written as leading `# key=value` lines.
    """
    basis = estimator.basis
    with open(path, "w") as fh:
        fh.write(f"# degree={basis.degree}\n")
        fh.write(f"# delta={basis.delta!r}\n")
        fh.write(f"# radius={basis.radius!r}\n")
        fh.write(f"# d={basis.d}\n")
        fh.write(f"# out_dim={basis.out_dim}\n")
        fh.write(f"# level={estimator.level!r}\n")
        for key, value in provenance.items():
            fh.write(f"# {key}={value}\n")
        fh.write("cell,multi_index,component,coefficient\n")
        for cell in range(basis.n_cells):
            for j, power in enumerate(basis.powers):
                tag = "-".join(str(p) for p in power)
                for comp in range(basis.out_dim):
                    value = estimator.coefficients[cell, j, comp]
                    fh.write(f"{cell},{tag},{comp},{value:.17g}\n")
