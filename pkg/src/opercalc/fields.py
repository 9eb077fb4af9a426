"""
Sampled functions, measures, quadrature and dense operator helpers.

Fields are thin immutable wrappers around numpy arrays that remember the
grid they were sampled on:

* :class:`LineField` on a uniform grid t_j = t0 + j*dt,
* :class:`PlaneField` on a tensor grid, indexed ``values[ix, iy]``,
* :class:`CyclicField` on Z_n,
* :class:`DiskField` on a polar Gauss-Legendre grid of the unit disk,
  optionally carrying a closed-form evaluator for exact pointwise work.

Operators are plain complex ``ndarray`` matrices; the helpers here give
the products and norms used by the exact checks.
"""

import csv
from dataclasses import dataclass, field as dc_field
from typing import Callable

import numpy as np


class FieldError(ValueError):
    """Grid mismatch, too small grids or malformed input."""


class ShapeError(FieldError):
    """Incompatible shapes between operands."""


# ------------------------------------------------------------------- grids


@dataclass(frozen=True)
class LineGrid:
    n: int
    step: float
    origin: float

    def __post_init__(self):
        if self.n < 2 or not self.step > 0:
            raise FieldError("line grid needs n >= 2 and step > 0")

    @classmethod
    def window(cls, n, a, b):
        """n nodes a, a+h, ..., b-h with h = (b-a)/n (periodic cell)."""
        return cls(int(n), (b - a) / n, float(a))

    @property
    def nodes(self):
        return self.origin + self.step * np.arange(self.n)

    def dual(self):
        """Frequency grid used by :func:`dft`."""
        return LineGrid(self.n, 1.0 / (self.n * self.step), -0.5 / self.step)

    def index_shift(self, x, tol=1e-9):
        """x as an integer number of steps; raises if off the lattice."""
        m = x / self.step
        k = int(np.round(m))
        if abs(m - k) > tol:
            raise FieldError(f"shift {x} is not a multiple of the grid step {self.step}")
        return k


@dataclass(frozen=True)
class PlaneGrid:
    x: LineGrid
    y: LineGrid

    @classmethod
    def window(cls, n, a, b, ny=None, c=None, d=None):
        ny = n if ny is None else ny
        c = a if c is None else c
        d = b if d is None else d
        return cls(LineGrid.window(n, a, b), LineGrid.window(ny, c, d))

    @property
    def shape(self):
        return (self.x.n, self.y.n)

    def mesh(self):
        return np.meshgrid(self.x.nodes, self.y.nodes, indexing="ij")

    def complex_nodes(self):
        X, Y = self.mesh()
        return X + 1j * Y

    @property
    def cell(self):
        return self.x.step * self.y.step


class _Field:
    def __init__(self, values):
        v = np.array(values, dtype=complex)
        v.setflags(write=False)
        self.values = v

    def _check(self, other):
        if type(self) is not type(other) or self.values.shape != other.values.shape:
            raise FieldError("grid mismatch")

    def __add__(self, other):
        self._check(other)
        return self.like(self.values + other.values)

    def __sub__(self, other):
        self._check(other)
        return self.like(self.values - other.values)

    def __mul__(self, c):
        return self.like(self.values * c)

    __rmul__ = __mul__


class LineField(_Field):
    def __init__(self, grid: LineGrid, values):
        super().__init__(values)
        if self.values.shape != (grid.n,):
            raise FieldError("line field sample count does not match grid")
        self.grid = grid

    @classmethod
    def from_function(cls, grid, f):
        return cls(grid, f(grid.nodes))

    def like(self, values):
        return LineField(self.grid, values)

    def _check(self, other):
        super()._check(other)
        if other.grid != self.grid:
            raise FieldError("line grids differ")


class PlaneField(_Field):
    """Samples ``values[ix, iy]``; ``complex_coords`` marks z = x + iy use."""

    def __init__(self, grid: PlaneGrid, values, complex_coords=False, interior=None):
        super().__init__(values)
        if self.values.shape != grid.shape:
            raise FieldError("plane field sample count does not match grid")
        self.grid = grid
        self.complex_coords = complex_coords
        self.interior = np.ones(grid.shape, bool) if interior is None else interior

    @classmethod
    def from_function(cls, grid, f, complex_coords=False):
        if complex_coords:
            return cls(grid, f(grid.complex_nodes()), True)
        X, Y = grid.mesh()
        return cls(grid, f(X, Y))

    def like(self, values):
        return PlaneField(self.grid, values, self.complex_coords)

    def _check(self, other):
        super()._check(other)
        if other.grid != self.grid:
            raise FieldError("plane grids differ")


class CyclicField(_Field):
    def __init__(self, values):
        super().__init__(values)
        if self.values.ndim != 1 or self.values.size < 2:
            raise FieldError("cyclic field needs n >= 2 samples")

    @property
    def n(self):
        return self.values.size

    def like(self, values):
        return CyclicField(values)


@dataclass(frozen=True)
class BoxGrid:
    """Tensor product of line grids, e.g. a lattice box in H1 as (s, x, y)."""

    axes: tuple

    @property
    def shape(self):
        return tuple(a.n for a in self.axes)

    def mesh(self):
        return np.meshgrid(*(a.nodes for a in self.axes), indexing="ij")

    @property
    def cell(self):
        return float(np.prod([a.step for a in self.axes]))


class BoxField(_Field):
    def __init__(self, grid: BoxGrid, values):
        super().__init__(values)
        if self.values.shape != grid.shape:
            raise FieldError("box field sample count does not match grid")
        self.grid = grid

    @classmethod
    def from_function(cls, grid, f):
        return cls(grid, f(*grid.mesh()))

    def like(self, values):
        return BoxField(self.grid, values)

    def _check(self, other):
        super()._check(other)
        if other.grid != self.grid:
            raise FieldError("box grids differ")


# --------------------------------------------------------------------- disk


@dataclass(frozen=True)
class DiskQuadrature:
    """Polar Gauss-Legendre rule on {|z| <= r_max}.

    Weights are GL weight * r * 2 pi / n_theta * (1-r^2)^power, so
    ``power = 0`` integrates against area, ``-1`` against the weight of
    the Bergman integral and ``-2`` against the invariant measure.
    """

    n_r: int
    n_theta: int
    r_max: float
    power: float = 0.0

    def __post_init__(self):
        if self.n_r < 4 or self.n_theta < 4:
            raise FieldError("disk quadrature needs n_r, n_theta >= 4")
        if not 0 < self.r_max < 1:
            raise FieldError("disk quadrature needs 0 < r_max < 1")

    def _radial(self):
        x, w = np.polynomial.legendre.leggauss(self.n_r)
        r = 0.5 * self.r_max * (x + 1)
        return r, 0.5 * self.r_max * w

    @property
    def radii(self):
        return self._radial()[0]

    @property
    def angles(self):
        return 2 * np.pi * np.arange(self.n_theta) / self.n_theta

    @property
    def nodes(self):
        return self.radii[:, None] * np.exp(1j * self.angles)[None, :]

    def weights_for(self, power):
        r, w = self._radial()
        wr = w * r * (2 * np.pi / self.n_theta) * (1 - r * r) ** power
        return np.broadcast_to(wr[:, None], (self.n_r, self.n_theta))

    @property
    def weights(self):
        return self.weights_for(self.power)

    def with_power(self, power):
        return DiskQuadrature(self.n_r, self.n_theta, self.r_max, power)


def disk_quadrature(n_r, n_theta, r_max, weight="lebesgue") -> "Measure":
    powers = {"lebesgue": 0.0, "bergman": -1.0, "invariant": -2.0}
    if weight not in powers:
        raise FieldError(f"unknown disk weight {weight!r}")
    q = DiskQuadrature(int(n_r), int(n_theta), float(r_max), powers[weight])
    return Measure("disk", q.weights, quadrature=q)


@dataclass(frozen=True)
class Seed:
    """Finite sum of terms c z^k conj(z)^m (1-|z|^2)^q."""

    terms: tuple

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        out = np.zeros(z.shape, complex)
        a = 1 - np.abs(z) ** 2
        for c, k, m, q in self.terms:
            out = out + c * z ** k * np.conj(z) ** m * a ** q
        return out

    @classmethod
    def monomial(cls, k, q=0, c=1.0):
        return cls(((c, k, 0, q),))


class DiskField(_Field):
    """Samples on a :class:`DiskQuadrature` grid.

    ``evaluator`` is an optional closed form used wherever values off the
    nodes are needed; a :class:`Seed` is one such closed form.
    """

    def __init__(self, quad: DiskQuadrature, values, evaluator: Callable | None = None,
                 valid=None):
        super().__init__(values)
        if self.values.shape != (quad.n_r, quad.n_theta):
            raise FieldError("disk field sample count does not match quadrature")
        self.quad = quad
        self.evaluator = evaluator
        self.valid = np.ones(self.values.shape, bool) if valid is None else valid

    @classmethod
    def from_seed(cls, quad, seed):
        return cls(quad, seed(quad.nodes), evaluator=seed)

    def like(self, values):
        return DiskField(self.quad, values)

    def _check(self, other):
        super()._check(other)
        if other.quad.n_r != self.quad.n_r or other.quad.r_max != self.quad.r_max:
            raise FieldError("disk quadratures differ")

    def __call__(self, z):
        if self.evaluator is None:
            raise FieldError("disk field has no closed form to evaluate off the nodes")
        return self.evaluator(z)


class Kernel:
    """Complex samples on a homogeneous space together with their measure.

    ``domain`` is a list of points (finite quotients), a :class:`PlaneGrid`
    or a :class:`DiskQuadrature`; ``weights`` has the shape of ``values``.
    ``evaluator`` optionally gives the kernel in closed form.
    """

    def __init__(self, values, weights, domain=None, evaluator=None):
        v = np.array(values, dtype=complex)
        v.setflags(write=False)
        w = np.broadcast_to(np.asarray(weights, float), v.shape)
        if not np.all(np.isfinite(v)):
            raise FieldError("kernel values must be finite")
        self.values = v
        self.weights = w
        self.domain = domain
        self.evaluator = evaluator

    def like(self, values, evaluator=None):
        return Kernel(values, self.weights, self.domain, evaluator)

    def __call__(self, x):
        if self.evaluator is None:
            raise FieldError("kernel has no closed form")
        return self.evaluator(x)

    def norm(self):
        return float(np.sqrt(np.sum(self.weights * np.abs(self.values) ** 2)))


# ------------------------------------------------------------------ measures


@dataclass(frozen=True)
class Measure:
    """Quadrature weights for :func:`inner_product`."""

    domain: str
    weights: np.ndarray = dc_field(repr=False)
    quadrature: DiskQuadrature | None = None


def line_measure(grid: LineGrid) -> Measure:
    return Measure("line", np.full(grid.n, grid.step))


def plane_measure(grid: PlaneGrid) -> Measure:
    return Measure("plane", np.full(grid.shape, grid.cell))


def counting_measure(n, normalized=False, shape=None) -> Measure:
    shape = (n,) if shape is None else shape
    return Measure("cyclic", np.full(shape, 1.0 / n if normalized else 1.0))


def default_measure(f) -> Measure:
    if isinstance(f, LineField):
        return line_measure(f.grid)
    if isinstance(f, PlaneField):
        return plane_measure(f.grid)
    if isinstance(f, CyclicField):
        return counting_measure(f.n)
    if isinstance(f, BoxField):
        return Measure("box", np.full(f.grid.shape, f.grid.cell))
    if isinstance(f, DiskField):
        return Measure("disk", f.quad.weights, quadrature=f.quad)
    if isinstance(f, np.ndarray):
        return Measure("array", np.ones(f.shape))
    raise FieldError(f"no default measure for {type(f).__name__}")


def _values(f):
    return f.values if isinstance(f, _Field) else np.asarray(f)


def inner_product(a, b, m: Measure | None = None) -> complex:
    """sum_j w_j a_j conj(b_j), conjugate linear in ``b``."""
    va, vb = _values(a), _values(b)
    if va.shape != vb.shape:
        raise FieldError(f"grid mismatch {va.shape} vs {vb.shape}")
    w = default_measure(a).weights if m is None else m.weights
    if np.shape(w) != va.shape:
        raise FieldError("measure does not match field")
    return complex(np.sum(w * va * np.conj(vb)))


def norm(a, m=None) -> float:
    return float(np.sqrt(max(inner_product(a, a, m).real, 0.0)))


# ----------------------------------------------------------------- transforms


def dft(f):
    """Discrete Fourier transform.

    On Z_n: unitary, hat f(k) = n^{-1/2} sum_g f(g) exp(-2 pi i k g / n).
    On a line grid: the Riemann sum dt * sum_j f(t_j) exp(-2 pi i xi t_j),
    returned on ``f.grid.dual()``.
    """
    if isinstance(f, CyclicField):
        return CyclicField(np.fft.fft(f.values, norm="ortho"))
    if isinstance(f, LineField):
        g, d = f.grid, f.grid.dual()
        j = np.arange(g.n)
        u = np.fft.fft(f.values * np.exp(-2j * np.pi * d.origin * g.step * j))
        return LineField(d, g.step * np.exp(-2j * np.pi * d.nodes * g.origin) * u)
    raise FieldError(f"dft not defined for {type(f).__name__}")


def idft(F, grid: LineGrid | None = None):
    """Inverse of :func:`dft`; ``grid`` is the target line grid."""
    if isinstance(F, CyclicField):
        return CyclicField(np.fft.ifft(F.values, norm="ortho"))
    if isinstance(F, LineField):
        d = F.grid
        g = grid if grid is not None else LineGrid(d.n, 1.0 / (d.n * d.step),
                                                   -0.5 / d.step)
        gd = g.dual()
        if g.n != d.n or not np.isclose(gd.step, d.step, rtol=1e-12) \
                or not np.isclose(gd.origin, d.origin, rtol=1e-12):
            raise FieldError("target grid is not dual to the frequency grid")
        j = np.arange(g.n)
        u = F.values * np.exp(2j * np.pi * d.nodes * g.origin) / g.step
        v = np.fft.ifft(u) * np.exp(2j * np.pi * d.origin * g.step * j)
        return LineField(g, v)
    raise FieldError(f"idft not defined for {type(F).__name__}")


_ONE_SIDED = {
    0: np.array([-25.0, 48.0, -36.0, 16.0, -3.0]),
    1: np.array([-3.0, -10.0, 18.0, -6.0, 1.0]),
}


def _diff_axis(a, h, axis):
    a = np.moveaxis(a, axis, 0)
    n = a.shape[0]
    if n < 5:
        raise FieldError("finite differences need at least 5 nodes per axis")
    out = np.empty_like(a)
    out[2:-2] = (a[:-4] - 8 * a[1:-3] + 8 * a[3:-1] - a[4:]) / (12 * h)
    for i, c in _ONE_SIDED.items():
        out[i] = np.tensordot(c, a[:5], axes=(0, 0)) / (12 * h)
        out[n - 1 - i] = -np.tensordot(c, a[::-1][:5], axes=(0, 0)) / (12 * h)
    return np.moveaxis(out, 0, axis)


def finite_difference(f: PlaneField, which: str) -> PlaneField:
    """Fourth order derivative ``dx``, ``dy`` or ``dzbar`` = (dx + i dy)/2.

    The two outermost rows and columns use one-sided stencils and are
    marked ``False`` in the returned field's ``interior`` mask.
    """
    g = f.grid
    if which == "dx":
        v = _diff_axis(f.values, g.x.step, 0)
    elif which == "dy":
        v = _diff_axis(f.values, g.y.step, 1)
    elif which in ("dzbar", "dz"):
        sign = 1 if which == "dzbar" else -1
        v = 0.5 * (_diff_axis(f.values, g.x.step, 0)
                   + sign * 1j * _diff_axis(f.values, g.y.step, 1))
    else:
        raise FieldError(f"unknown derivative {which!r}")
    interior = np.zeros(g.shape, bool)
    interior[2:-2, 2:-2] = True
    return PlaneField(g, v, f.complex_coords, interior)


# ------------------------------------------------------------------ matrices


def matrix_multiply(A, B):
    A, B = np.asarray(A), np.asarray(B)
    if A.ndim != 2 or B.ndim != 2 or A.shape[1] != B.shape[0]:
        raise ShapeError(f"cannot multiply {A.shape} by {B.shape}")
    return A @ B


def frobenius(A) -> float:
    return float(np.linalg.norm(np.asarray(A)))


def norm2(A, iterations=50) -> float:
    """Spectral norm estimate by power iteration on A^H A.

    Starts from a fixed vector so results are deterministic.
    """
    A = np.asarray(A, dtype=complex)
    v = np.ones(A.shape[1], complex) + 0.5j * np.cos(np.arange(A.shape[1]))
    v /= np.linalg.norm(v)
    s = 0.0
    for _ in range(iterations):
        w = A.conj().T @ (A @ v)
        s = np.linalg.norm(w)
        if s == 0:
            return 0.0
        v = w / s
    return float(np.sqrt(s))


def relative_error(A, B) -> float:
    """||A - B||_F / max(||B||_F, tiny)."""
    d = frobenius(np.asarray(A) - np.asarray(B))
    return d / max(frobenius(B), 1e-300)


# ------------------------------------------------------------------------ csv

FIELD_HEADER = ["idx0", "idx1", "re", "im"]
MATRIX_HEADER = ["row", "col", "re", "im"]
SYMBOL_HEADER = ["x1_0", "x1_1", "x2_0", "x2_1", "re", "im"]


def _fmt(x) -> str:
    return "%.17g" % x


def write_array_csv(path, values):
    """1-D or 2-D complex array in the ``idx0,idx1,re,im`` layout."""
    v = np.asarray(values, dtype=complex)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(FIELD_HEADER)
        if v.ndim == 1:
            for i, c in enumerate(v):
                w.writerow([i, "", _fmt(c.real), _fmt(c.imag)])
        elif v.ndim == 2:
            for (i, j), c in np.ndenumerate(v):
                w.writerow([i, j, _fmt(c.real), _fmt(c.imag)])
        else:
            raise ShapeError("only 1-D and 2-D fields can be written")


def read_array_csv(path) -> np.ndarray:
    rows = _read_rows(path, FIELD_HEADER)
    if not rows:
        raise FieldError(f"{path}: no samples")
    one_d = all(r[1] == "" for r in rows)
    idx = [(int(r[0]),) if one_d else (int(r[0]), int(r[1])) for r in rows]
    shape = tuple(max(i[k] for i in idx) + 1 for k in range(len(idx[0])))
    out = np.zeros(shape, complex)
    seen = np.zeros(shape, bool)
    for i, r in zip(idx, rows):
        out[i] = complex(float(r[2]), float(r[3]))
        seen[i] = True
    if not seen.all():
        raise ShapeError(f"{path}: missing samples")
    return out


def write_matrix_csv(path, A):
    A = np.asarray(A, dtype=complex)
    if A.ndim != 2:
        raise ShapeError("operator must be a matrix")
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(MATRIX_HEADER)
        for (i, j), c in np.ndenumerate(A):
            w.writerow([i, j, _fmt(c.real), _fmt(c.imag)])


def read_matrix_csv(path) -> np.ndarray:
    rows = _read_rows(path, MATRIX_HEADER)
    n = max(int(r[0]) for r in rows) + 1
    m = max(int(r[1]) for r in rows) + 1
    A = np.zeros((n, m), complex)
    for r in rows:
        A[int(r[0]), int(r[1])] = complex(float(r[2]), float(r[3]))
    if len(rows) != n * m:
        raise ShapeError(f"{path}: expected {n * m} entries, got {len(rows)}")
    return A


def write_symbol_csv(path, points1, points2, values):
    """Symbol grid with x1 fast and x2 slow: values[i2, i1]."""
    values = np.asarray(values, dtype=complex)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SYMBOL_HEADER)
        for i2, b in enumerate(points2):
            for i1, a in enumerate(points1):
                c = values[i2, i1]
                w.writerow([*(_fmt(t) for t in _pair(a)), *(_fmt(t) for t in _pair(b)),
                            _fmt(c.real), _fmt(c.imag)])


def _pair(x):
    if isinstance(x, complex):
        return (x.real, x.imag)
    if np.ndim(x) == 0:
        return (x, 0)
    return tuple(x)[:2]


def _read_rows(path, header):
    try:
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
    except OSError as e:
        raise FieldError(f"cannot read {path}: {e}") from None
    if not rows or [c.strip() for c in rows[0]] != header:
        raise FieldError(f"{path}: expected header {','.join(header)}")
    body = [r for r in rows[1:] if r]
    for k, r in enumerate(body, start=2):
        if len(r) != len(header):
            raise FieldError(f"{path}:{k}: expected {len(header)} columns")
        try:
            [float(c) for c in r[len(header) - 2:]]
            int(r[0])
        except ValueError:
            raise FieldError(f"{path}:{k}: malformed number") from None
    return body
