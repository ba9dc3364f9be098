"""Bistochastic matrices of order three.

A 3x3 bistochastic matrix is determined by its upper-left 2x2 minor, written
as the vector b = (b1, b2, b3, b4):

    B(b) = [ b1           b2           1-b1-b2
             b3           b4           1-b3-b4
             1-b1-b3      1-b2-b4      b1+b2+b3+b4-1 ]

The polynomial

    Q(b) = 4*b1*b2*b3*b4 - (b1+b2+b3+b4-1 - b1*b4 - b2*b3)**2

equals sixteen times the squared area of the unitarity triangle built from
any pair of rows or columns of a would-be unitary preimage.  Its sign decides
everything: Q > 0 means B is unistochastic (B_ij = |U_ij|**2 for some unitary
U), Q = 0 means orthostochastic (a real orthogonal preimage exists), and
Q < 0 means no preimage exists at all.  On the whole polytope Q ranges over
[-1/16, 1/27]; the minimum is attained at the Schur matrix (P + P^2)/2 and
the maximum at the flat matrix W.

This module holds the data model, the Q test and chain-link test, entropies,
the named special matrices, and the geometry of the polytope itself
(triangulation volume, the embedding Gram determinant, and a grid-plus-refine
search for the extreme values of Q).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, NamedTuple, Sequence

import numpy as np

__all__ = [
    "ENTRY_ATOL",
    "SUM_ATOL",
    "Q_CLASS_TOL",
    "Q_MIN",
    "Q_MAX",
    "MAX_BALL_RADIUS",
    "BVector",
    "BistochasticMatrix",
    "MatrixClass",
    "UnistochasticityVerdict",
    "q_of",
    "q_values",
    "classify",
    "link_lengths",
    "chain_link_feasible",
    "entropy",
    "entropy_values",
    "generalized_entropy",
    "generalized_entropy_values",
    "matrix_from_b",
    "feasible_b_mask",
    "birkhoff_volume_triangulation",
    "birkhoff_b_volume",
    "triangulation_simplex_volumes",
    "embedding_gram_matrix",
    "embedding_gram_determinant",
    "embedding_jacobian",
    "q_product_form",
    "x_interval",
    "b_from_product_coords",
    "ExtremeQResult",
    "extreme_q_search",
    "W",
    "SCHUR",
    "IDENTITY",
    "P",
    "P2",
    "P12",
    "P13",
    "P23",
    "NAMED_MATRICES",
]

#: entries in [-ENTRY_ATOL, 0) are treated as rounding noise and clamped to 0
ENTRY_ATOL = 1e-12
#: row and column sums must match 1 within this tolerance on construction
SUM_ATOL = 1e-10
#: |Q| at or below this classifies as the orthostochastic boundary
Q_CLASS_TOL = 1e-12

Q_MIN = -1.0 / 16.0
Q_MAX = 1.0 / 27.0

#: radius of the largest ball around W (Hilbert-Schmidt metric) that fits
#: inside the unistochastic set
MAX_BALL_RADIUS = math.sqrt(2.0) / 3.0


def _nine_entries(b1, b2, b3, b4):
    """The nine matrix entries of B(b), broadcasting over array arguments."""
    return (
        b1,
        b2,
        1.0 - b1 - b2,
        b3,
        b4,
        1.0 - b3 - b4,
        1.0 - b1 - b3,
        1.0 - b2 - b4,
        b1 + b2 + b3 + b4 - 1.0,
    )


@dataclass(frozen=True)
class BVector:
    """The four free entries (B11, B12, B21, B22) of a 3x3 bistochastic matrix.

    Validates on construction that all nine induced matrix entries are
    nonnegative within ENTRY_ATOL.
    """

    b1: float
    b2: float
    b3: float
    b4: float

    def __post_init__(self) -> None:
        for name in ("b1", "b2", "b3", "b4"):
            object.__setattr__(self, name, float(getattr(self, name)))
        worst = min(_nine_entries(self.b1, self.b2, self.b3, self.b4))
        if worst < -ENTRY_ATOL or not math.isfinite(worst):
            raise ValueError(
                f"b = {self.as_tuple()} leaves the bistochastic polytope "
                f"(most negative induced entry: {worst:.3e})"
            )

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.b1, self.b2, self.b3, self.b4)

    def as_array(self) -> np.ndarray:
        return np.array(self.as_tuple())

    @classmethod
    def from_array(cls, arr) -> "BVector":
        b1, b2, b3, b4 = np.asarray(arr, dtype=float).reshape(4)
        return cls(b1, b2, b3, b4)


def matrix_from_b(b) -> np.ndarray:
    """Assemble the full 3x3 entries array from b, shape (..., 4) -> (..., 3, 3)."""
    arr = np.asarray(b, dtype=float)
    b1, b2, b3, b4 = np.moveaxis(arr, -1, 0)
    entries = np.stack(_nine_entries(b1, b2, b3, b4), axis=-1)
    return entries.reshape(arr.shape[:-1] + (3, 3))


def feasible_b_mask(b, atol: float = 0.0) -> np.ndarray:
    """Boolean mask over b arrays of shape (..., 4): all nine entries >= -atol."""
    arr = np.asarray(b, dtype=float)
    b1, b2, b3, b4 = np.moveaxis(arr, -1, 0)
    entries = np.stack(_nine_entries(b1, b2, b3, b4), axis=-1)
    return np.min(entries, axis=-1) >= -atol


@dataclass(frozen=True, eq=False)
class BistochasticMatrix:
    """A 3x3 matrix with nonnegative entries and unit row and column sums."""

    entries: np.ndarray

    def __post_init__(self) -> None:
        arr = np.array(self.entries, dtype=float)
        if arr.shape != (3, 3):
            raise ValueError(f"expected a 3x3 matrix, got shape {arr.shape}")
        # rounding noise from |U_ij|**2 style constructions is clamped, real
        # negativity is an error
        tiny = (arr < 0.0) & (arr >= -ENTRY_ATOL)
        arr[tiny] = 0.0
        if np.any(arr < 0.0):
            raise ValueError(f"negative entry {arr.min():.3e} in matrix")
        rows = arr.sum(axis=1)
        cols = arr.sum(axis=0)
        if np.max(np.abs(rows - 1.0)) > SUM_ATOL or np.max(np.abs(cols - 1.0)) > SUM_ATOL:
            raise ValueError(
                f"row sums {rows} / column sums {cols} deviate from 1 "
                f"by more than {SUM_ATOL:g}"
            )
        arr.setflags(write=False)
        object.__setattr__(self, "entries", arr)

    @classmethod
    def from_entries(cls, entries, renormalize: bool = False) -> "BistochasticMatrix":
        """Build from a 3x3 array.

        With ``renormalize=True`` the input is first balanced by Sinkhorn
        iteration (alternate row and column scaling).  Renormalization never
        happens silently; the default raises on sums that are off by more
        than SUM_ATOL.
        """
        arr = np.array(entries, dtype=float)
        if renormalize:
            if arr.shape != (3, 3) or np.any(arr < -ENTRY_ATOL) or np.any(arr.sum(axis=1) <= 0):
                raise ValueError("cannot renormalize: not a positive 3x3 array")
            arr = np.clip(arr, 0.0, None)
            for _ in range(200):
                arr /= arr.sum(axis=1, keepdims=True)
                arr /= arr.sum(axis=0, keepdims=True)
                if (
                    np.max(np.abs(arr.sum(axis=1) - 1.0)) <= SUM_ATOL / 4
                    and np.max(np.abs(arr.sum(axis=0) - 1.0)) <= SUM_ATOL / 4
                ):
                    break
        return cls(arr)

    @classmethod
    def from_b(cls, b) -> "BistochasticMatrix":
        if not isinstance(b, BVector):
            b = BVector.from_array(b)
        return cls(matrix_from_b(b.as_array()))

    @property
    def bvec(self) -> BVector:
        e = self.entries
        return BVector(e[0, 0], e[0, 1], e[1, 0], e[1, 1])

    def __array__(self, dtype=None, copy=None):
        arr = self.entries
        if dtype is not None:
            arr = arr.astype(dtype)
        return np.array(arr) if copy else arr


class MatrixClass(enum.Enum):
    UNISTOCHASTIC = "Unistochastic"
    ORTHOSTOCHASTIC = "Orthostochastic"
    NOT_UNISTOCHASTIC = "NotUnistochastic"

    def __str__(self) -> str:  # pragma: no cover - cosmetic
        return self.value


@dataclass(frozen=True)
class UnistochasticityVerdict:
    """Outcome of the unistochasticity decision for one matrix."""

    q_value: float
    classification: MatrixClass
    link_lengths: tuple[float, float, float]


def _q_poly(b1, b2, b3, b4):
    return 4.0 * b1 * b2 * b3 * b4 - (b1 + b2 + b3 + b4 - 1.0 - b1 * b4 - b2 * b3) ** 2


def q_of(b: BVector) -> float:
    """Q(b) = 4 b1 b2 b3 b4 - (b1+b2+b3+b4-1 - b1 b4 - b2 b3)^2.

    Equals 16 A^2 where A is the (possibly imaginary) area of the unitarity
    triangle, and 4 J^2 in terms of the Jarlskog invariant of any unitary
    preimage.  Lies in [-1/16, 1/27] for every bistochastic b.
    """
    if not isinstance(b, BVector):
        b = BVector.from_array(b)
    return float(_q_poly(b.b1, b.b2, b.b3, b.b4))


def q_values(b) -> np.ndarray:
    """Vectorized Q over an array of b vectors, shape (..., 4) -> (...)."""
    b1, b2, b3, b4 = np.moveaxis(np.asarray(b, dtype=float), -1, 0)
    return _q_poly(b1, b2, b3, b4)


def link_lengths(B: BistochasticMatrix) -> tuple[float, float, float]:
    """Link lengths of the unitarity triangle built from columns 1 and 2.

    Row j contributes the link |U_j1| |U_j2| = sqrt(B_j1 B_j2), so the triple
    is (sqrt(b1 b2), sqrt(b3 b4), sqrt(B31 B32)).
    """
    e = np.clip(B.entries, 0.0, None)
    return (
        math.sqrt(e[0, 0] * e[0, 1]),
        math.sqrt(e[1, 0] * e[1, 1]),
        math.sqrt(e[2, 0] * e[2, 1]),
    )


def classify(B: BistochasticMatrix) -> UnistochasticityVerdict:
    """Decide whether B is unistochastic from the sign of Q.

    |Q| <= Q_CLASS_TOL is reported as Orthostochastic: Q is a degree-4
    polynomial in entries bounded by 1, so an absolute 1e-12 band sits safely
    above double rounding and far below any geometric separation of interest.
    """
    if not isinstance(B, BistochasticMatrix):
        B = BistochasticMatrix.from_entries(np.asarray(B, dtype=float))
    q = q_of(B.bvec)
    if q > Q_CLASS_TOL:
        cls = MatrixClass.UNISTOCHASTIC
    elif q < -Q_CLASS_TOL:
        cls = MatrixClass.NOT_UNISTOCHASTIC
    else:
        cls = MatrixClass.ORTHOSTOCHASTIC
    return UnistochasticityVerdict(q, cls, link_lengths(B))


def chain_link_feasible(lengths: Sequence[float]) -> bool:
    """Can segments of the given lengths be closed into a polygon?

    True iff the largest length does not exceed the sum of all others, the
    closure condition for the chain of links |U_j1| |U_j2| formed by a pair
    of columns of a unitary matrix.  For three links this is the triangle
    inequality.
    """
    ls = [float(x) for x in lengths]
    if not ls:
        raise ValueError("chain_link_feasible needs at least one length")
    if any(x < 0.0 or not math.isfinite(x) for x in ls):
        raise ValueError("link lengths must be finite and nonnegative")
    return 2.0 * max(ls) <= sum(ls)


def _entries_entropy(entries: np.ndarray) -> np.ndarray:
    e = np.asarray(entries, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(e > 0.0, e * np.log(np.where(e > 0.0, e, 1.0)), 0.0)
    return -terms.sum(axis=(-2, -1)) / 3.0


def entropy(B: BistochasticMatrix) -> float:
    """Shannon entropy S(B) = -(1/3) sum_ij B_ij ln B_ij, with 0 ln 0 := 0.

    Ranges from 0 (permutation matrices) to ln 3 (the flat matrix W).
    """
    return float(_entries_entropy(B.entries))


def entropy_values(b) -> np.ndarray:
    """Vectorized entropy over b arrays of shape (..., 4)."""
    return _entries_entropy(matrix_from_b(b))


def _entries_generalized_entropy(entries: np.ndarray, q: float) -> np.ndarray:
    e = np.asarray(entries, dtype=float)
    # 0**q is 0 for the purpose of these sums even at q = 0 (the q -> 0
    # entropy counts the support), which differs from numpy's 0.0**0.0 == 1.0
    powered = np.where(e > 0.0, np.where(e > 0.0, e, 1.0) ** q, 0.0)
    return (e - powered).sum(axis=(-2, -1)) / (3.0 * (q - 1.0))


def generalized_entropy(B: BistochasticMatrix, q: float) -> float:
    """Tsallis-type entropy S_q(B) = (1/(3(q-1))) sum_ij (B_ij - B_ij^q).

    Defined for q >= 0; at q = 1 it returns the Shannon entropy, its limit.
    """
    q = float(q)
    if q < 0.0:
        raise ValueError(f"generalized entropy needs q >= 0, got {q}")
    if q == 1.0:
        return entropy(B)
    return float(_entries_generalized_entropy(B.entries, q))


def generalized_entropy_values(b, q: float) -> np.ndarray:
    """Vectorized S_q over b arrays of shape (..., 4)."""
    q = float(q)
    if q < 0.0:
        raise ValueError(f"generalized entropy needs q >= 0, got {q}")
    if q == 1.0:
        return entropy_values(b)
    return _entries_generalized_entropy(matrix_from_b(b), q)


# ---------------------------------------------------------------------------
# named matrices


def _bmat(rows) -> BistochasticMatrix:
    return BistochasticMatrix.from_entries(rows)


IDENTITY = _bmat([[1, 0, 0], [0, 1, 0], [0, 0, 1]])
#: the cyclic permutation (1 -> 2 -> 3 -> 1) acting on rows
P = _bmat([[0, 1, 0], [0, 0, 1], [1, 0, 0]])
P2 = _bmat([[0, 0, 1], [1, 0, 0], [0, 1, 0]])
P12 = _bmat([[0, 1, 0], [1, 0, 0], [0, 0, 1]])
P13 = _bmat([[0, 0, 1], [0, 1, 0], [1, 0, 0]])
P23 = _bmat([[1, 0, 0], [0, 0, 1], [0, 1, 0]])
#: flat (van der Waerden) matrix, the center of the polytope; Q(W) = 1/27
W = _bmat([[1 / 3] * 3] * 3)
#: Schur's matrix (P + P^2)/2, the farthest point from the unistochastic set;
#: Q = -1/16
SCHUR = _bmat([[0, 0.5, 0.5], [0.5, 0, 0.5], [0.5, 0.5, 0]])

NAMED_MATRICES: dict[str, BistochasticMatrix] = {
    "identity": IDENTITY,
    "P": P,
    "P2": P2,
    "P12": P12,
    "P13": P13,
    "P23": P23,
    "W": W,
    "schur": SCHUR,
}


# ---------------------------------------------------------------------------
# polytope geometry, exact where it can be


def _det_fraction(m: list[list[Fraction]]) -> Fraction:
    n = len(m)
    if n == 1:
        return m[0][0]
    det = Fraction(0)
    sign = 1
    for j in range(n):
        minor = [row[:j] + row[j + 1 :] for row in m[1:]]
        if m[0][j] != 0:
            det += sign * m[0][j] * _det_fraction(minor)
        sign = -sign
    return det


# b coordinates (B11, B12, B21, B22) of the six permutation vertices
_VERTEX_B = {
    "P": (0, 1, 0, 0),
    "P2": (0, 0, 1, 0),
    "identity": (1, 0, 0, 1),
    "P12": (0, 1, 1, 0),
    "P13": (0, 0, 0, 1),
    "P23": (1, 0, 0, 0),
}

# the polytope splits into three 4-simplices: the equilateral triangle
# (P, P2, identity) joined with each side of the opposite triangle
_SIMPLEX_VERTICES = (
    ("P", "P2", "identity", "P12", "P13"),
    ("P", "P2", "identity", "P13", "P23"),
    ("P", "P2", "identity", "P12", "P23"),
)


def triangulation_simplex_volumes() -> tuple[Fraction, Fraction, Fraction]:
    """Exact b-coordinate volumes of the three simplices (each 1/24)."""
    vols = []
    for names in _SIMPLEX_VERTICES:
        verts = [[Fraction(x) for x in _VERTEX_B[n]] for n in names]
        edges = [[v[i] - verts[0][i] for i in range(4)] for v in verts[1:]]
        vols.append(abs(_det_fraction(edges)) / Fraction(math.factorial(4)))
    return tuple(vols)


def birkhoff_b_volume() -> Fraction:
    """Exact volume 1/8 of the polytope in b coordinates (Lebesgue on R^4)."""
    return sum(triangulation_simplex_volumes(), Fraction(0))


def embedding_gram_matrix() -> np.ndarray:
    """Gram matrix of the four coordinate directions of b -> B(b) in R^9."""
    basis = []
    for i in range(4):
        step = [0.0] * 4
        step[i] = 1.0
        zero = matrix_from_b(np.zeros(4))
        basis.append((matrix_from_b(np.array(step)) - zero).reshape(9))
    g = np.array([[float(np.dot(u, v)) for v in basis] for u in basis])
    return np.rint(g).astype(int)


def embedding_gram_determinant() -> int:
    """Exact determinant (81) of the embedding Gram matrix."""
    g = embedding_gram_matrix()
    m = [[Fraction(int(x)) for x in row] for row in g]
    det = _det_fraction(m)
    assert det.denominator == 1
    return int(det)


def embedding_jacobian() -> int:
    """Volume scale factor 9 = sqrt(81) of the affine embedding into R^9."""
    det = embedding_gram_determinant()
    root = math.isqrt(det)
    assert root * root == det
    return root


def birkhoff_volume_triangulation() -> float:
    """4-volume 9/8 of the polytope as a subset of R^9.

    Computed exactly: the three simplex volumes (rational determinants) sum
    to 1/8 in b coordinates, and the embedding multiplies volumes by 9.
    """
    return float(embedding_jacobian() * birkhoff_b_volume())


# ---------------------------------------------------------------------------
# extreme values of Q


def q_product_form(b1: float, s: float, t: float, x: float) -> float:
    """Q in the coordinates b2 = s(1-b1), b3 = t(1-b1), b4 = (1-s)(1-t) + b1 s t + x.

    Q = -(1-b1)^2 (x^2 - 4 b1 s t (1-s)(1-t)), decreasing in x^2, which
    makes the extreme-value search separable and nearly trivial.
    """
    return -((1.0 - b1) ** 2) * (x * x - 4.0 * b1 * s * t * (1.0 - s) * (1.0 - t))


def x_interval(b1: float, s: float, t: float) -> tuple[float, float]:
    """Feasibility interval [-min(l1,l2), min(u1,u2)] of the x coordinate."""
    u1 = s * (1.0 - t) + b1 * t * (1.0 - s)
    u2 = t * (1.0 - s) + b1 * s * (1.0 - t)
    l1 = (1.0 - s) * (1.0 - t) + b1 * s * t
    l2 = s * t + b1 * (1.0 - s) * (1.0 - t)
    return -min(l1, l2), min(u1, u2)


def b_from_product_coords(b1: float, s: float, t: float, x: float) -> BVector:
    b4 = (1.0 - s) * (1.0 - t) + b1 * s * t + x
    return BVector(b1, s * (1.0 - b1), t * (1.0 - b1), b4)


class ExtremeQResult(NamedTuple):
    min_point: BVector
    min_value: float
    max_point: BVector
    max_value: float


_INV_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def _golden_section(f: Callable[[float], float], lo: float, hi: float,
                    minimize: bool, tol: float = 1e-13) -> tuple[float, float]:
    """Golden-section scan of f on [lo, hi]; returns (argopt, optvalue)."""
    sign = 1.0 if minimize else -1.0
    a, b = lo, hi
    c = b - _INV_GOLDEN * (b - a)
    d = a + _INV_GOLDEN * (b - a)
    fc, fd = sign * f(c), sign * f(d)
    while b - a > tol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - _INV_GOLDEN * (b - a)
            fc = sign * f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INV_GOLDEN * (b - a)
            fd = sign * f(d)
    xs = [(a + b) / 2.0, c, d]
    vals = [sign * f(xs[0]), fc, fd]
    i = int(np.argmin(vals))
    return xs[i], sign * vals[i]


def _q_of_unit_coords(p: np.ndarray) -> float:
    b1, s, t, xi = p
    xlo, xhi = x_interval(b1, s, t)
    return q_product_form(b1, s, t, xlo + xi * (xhi - xlo))


def _refine(p0: np.ndarray, v0: float, minimize: bool, span: float, tol: float) -> tuple[np.ndarray, float]:
    """Cyclic per-coordinate golden-section refinement, strict improvements only."""
    p, best = p0.copy(), v0
    for _ in range(60):
        improved = 0.0
        for i in range(4):
            lo = max(0.0, p[i] - span)
            hi = min(1.0, p[i] + span)

            def along(c: float, i: int = i) -> float:
                trial = p.copy()
                trial[i] = c
                return _q_of_unit_coords(trial)

            c, v = _golden_section(along, lo, hi, minimize)
            gain = (best - v) if minimize else (v - best)
            if gain > 0.0:
                p[i] = c
                best = v
                improved = max(improved, gain)
        if improved < tol / 10.0:
            break
    return p, best


def extreme_q_search(grid_resolution: int = 64, refine_tolerance: float = 1e-9) -> ExtremeQResult:
    """Locate the minimum and maximum of Q over the whole polytope.

    Scans a regular grid in the product coordinates (b1, s, t, xi), where xi
    in [0, 1] sweeps the feasible x interval, then polishes each extremum
    with per-coordinate golden-section refinement.  The scan iterates in
    ascending coordinate order and only accepts strict improvements, so ties
    resolve to the first point encountered; the Q minimum lands on the Schur
    vector (0, 1/2, 1/2, 0) and the maximum on the flat matrix.
    """
    if grid_resolution < 8:
        raise ValueError("grid_resolution must be at least 8")
    nodes = np.linspace(0.0, 1.0, grid_resolution + 1)
    s_grid, t_grid = np.meshgrid(nodes, nodes, indexing="ij")

    best_min = math.inf
    best_max = -math.inf
    argmin = argmax = None
    for b1 in nodes:
        u1 = s_grid * (1.0 - t_grid) + b1 * t_grid * (1.0 - s_grid)
        u2 = t_grid * (1.0 - s_grid) + b1 * s_grid * (1.0 - t_grid)
        l1 = (1.0 - s_grid) * (1.0 - t_grid) + b1 * s_grid * t_grid
        l2 = s_grid * t_grid + b1 * (1.0 - s_grid) * (1.0 - t_grid)
        xlo = -np.minimum(l1, l2)
        xhi = np.minimum(u1, u2)
        prod = 4.0 * b1 * s_grid * t_grid * (1.0 - s_grid) * (1.0 - t_grid)
        # shape (s, t, xi); C-order argmin matches the ascending scan order
        x = xlo[..., None] + nodes[None, None, :] * (xhi - xlo)[..., None]
        qv = -((1.0 - b1) ** 2) * (x * x - prod[..., None])
        i_min = int(np.argmin(qv))
        i_max = int(np.argmax(qv))
        v_min = float(qv.flat[i_min])
        v_max = float(qv.flat[i_max])
        if v_min < best_min:
            si, ti, xii = np.unravel_index(i_min, qv.shape)
            best_min = v_min
            argmin = np.array([b1, nodes[si], nodes[ti], nodes[xii]])
        if v_max > best_max:
            si, ti, xii = np.unravel_index(i_max, qv.shape)
            best_max = v_max
            argmax = np.array([b1, nodes[si], nodes[ti], nodes[xii]])

    span = 2.0 / grid_resolution
    pmin, vmin = _refine(argmin, best_min, True, span, refine_tolerance)
    pmax, vmax = _refine(argmax, best_max, False, span, refine_tolerance)

    def to_b(p: np.ndarray) -> BVector:
        b1, s, t, xi = p
        xlo, xhi = x_interval(b1, s, t)
        return b_from_product_coords(b1, s, t, xlo + xi * (xhi - xlo))

    return ExtremeQResult(to_b(pmin), vmin, to_b(pmax), vmax)
