"""
Covariant transforms, reproducing kernels and covariant symbols.

The covariant transform of a vector v with respect to a fiducial
functional F is the function g -> F(pi(g) v) on the group.  For a
pairing with a mother wavelet f whose line is invariant under pi(H)
it descends to the quotient X = H\\G.  Two orientations appear below:

* :func:`covariant_transform` and :func:`induced_wavelet_transform`
  evaluate <pi(s(x)) v, f>;
* :class:`FiniteFrame` works with the analysis map
  W_f v(x) = <v, pi(s(x)) f>, which is the form that composes under the
  twisted convolution of :mod:`opercalc.relconv`.

Continuous transforms carry a single normalization constant fixed by
one calibration input (``fsb_constant``, ``bergman_constant``).
"""

from dataclasses import dataclass

import numpy as np

from . import groups as G
from .fields import (CyclicField, DiskField, DiskQuadrature, FieldError, Kernel,
                     LineField, LineGrid, PlaneField, PlaneGrid, _Field,
                     default_measure, finite_difference, inner_product)
from .reps import RepError, Representation


class TransformError(ValueError):
    """Violated precondition of a transform."""


# ---------------------------------------------------------------- fiducials


@dataclass(frozen=True)
class Fiducial:
    """Fiducial functional F.

    ``kind`` is ``"pairing"`` (F(v) = <v, wavelet>), ``"delta"`` (value at
    the origin node) or ``"one"`` (integral against the constant 1).  On
    grids ``delta`` is the basis vector at the origin scaled by 1/step so
    that F(v) = v(0); on Z_n it is the honest basis vector.
    """

    kind: str
    wavelet: object = None

    def __post_init__(self):
        if self.kind not in ("pairing", "delta", "one"):
            raise TransformError(f"unknown fiducial kind {self.kind!r}")
        if self.kind == "pairing" and self.wavelet is None:
            raise TransformError("a pairing fiducial needs a wavelet")

    @classmethod
    def pairing(cls, f):
        return cls("pairing", f)

    def vector(self, like):
        """The fiducial as a field on the grid of ``like``."""
        if self.kind == "pairing":
            return self.wavelet
        if self.kind == "one":
            return like.like(np.ones(like.values.shape, complex))
        return like.like(_delta_values(like))

    def __call__(self, v):
        return inner_product(v, self.vector(v))


def _delta_values(f):
    out = np.zeros(f.values.shape, complex)
    if isinstance(f, CyclicField):
        out[0] = 1.0
        return out
    if isinstance(f, LineField):
        out[_origin_index(f.grid)] = 1.0 / f.grid.step
        return out
    if isinstance(f, PlaneField):
        out[_origin_index(f.grid.x), _origin_index(f.grid.y)] = 1.0 / f.grid.cell
        return out
    raise TransformError(f"no delta fiducial on {type(f).__name__}")


def _origin_index(grid: LineGrid):
    k = -grid.origin / grid.step
    if abs(k - round(k)) > 1e-9 or not 0 <= round(k) < grid.n:
        raise TransformError("grid has no node at the origin")
    return int(round(k))


def delta_vector(n):
    """Unit mass at 0 on Z_n."""
    e = np.zeros(n, complex)
    e[0] = 1.0
    return CyclicField(e)


def constant_vector(n):
    return CyclicField(np.ones(n, complex))


# ------------------------------------------------------- covariant transform


def covariant_transform(F, r: Representation, v, sample):
    """[W_F v](g) = F(pi(g) v) for every g in ``sample``."""
    if not isinstance(F, Fiducial):
        F = Fiducial.pairing(F)
    return [F(r.apply(g, v)) for g in sample]


def subgroup_samples(q: G.Quotient):
    """A few elements of the subgroup of ``q`` used for eigenvector checks."""
    grp = q.group
    if isinstance(q, G.CentreHeisenberg):
        return [grp(0.25, 0.0, 0.0), grp(-0.7, 0.0, 0.0)]
    if isinstance(q, G.LineHeisenberg):
        return [grp(0.3, 0.0, 0.0), grp(0.0, 0.0, 0.5), grp(0.2, 0.0, -1.0)]
    if isinstance(q, G.CentreAHW):
        return [grp(grp.root(1), 0, 0), grp(np.exp(0.3j), 0, 0)]
    if isinstance(q, G.LineAHW):
        return [grp(grp.root(1), 0, 0), grp(1.0, 0, 1), grp(1.0, 0, q.n - 1)]
    if isinstance(q, G.DyninM):
        return [grp(0.3, 0, 0, 0, 0, 0, 0), grp(0, 0.5, 0, 0, 0, 0, 0),
                grp(0, 0, 0.5, -0.5, 0, 0, 0)]
    if isinstance(q, G.DiskSU11):
        return [grp(np.exp(0.7j), 0j), grp(np.exp(-2.1j), 0j)]
    raise TransformError(f"no subgroup samples for {q.name}")


def check_eigenvector(f, r: Representation, q: G.Quotient, tol=1e-10):
    """Raise unless pi(h) f is a multiple of f for the sampled h in H."""
    nf = inner_product(f, f).real
    if nf == 0:
        return
    for h in subgroup_samples(q):
        g = r.apply(h, f)
        c = inner_product(g, f) / nf
        res = np.sqrt(max(inner_product(g - f * c, g - f * c).real, 0.0) / nf)
        if res > tol:
            raise TransformError(f"wavelet is not an eigenvector of pi({h}); residual {res:.3g}")


def induced_wavelet_transform(f, r: Representation, v, quotient: G.Quotient | None = None,
                              points=None, check=True) -> Kernel:
    """v~(x) = <pi(s(x)) v, f> sampled over the points of X = H\\G.

    ``quotient`` is the quotient carrying the kernel (default: the one of
    the representation); ``points`` defaults to all points of a finite
    quotient.
    """
    q = quotient or r.quotient
    if q.group != r.group:
        raise TransformError("quotient and representation use different groups")
    if check:
        check_eigenvector(f, r, q)
    if points is None:
        if not hasattr(q, "points"):
            raise TransformError("points are required for an infinite quotient")
        points = q.points()
    vals = [inner_product(r.apply(q.s(x), v), f) for x in points]
    n = len(points)
    w = 1.0 / q.n if isinstance(q, G.CentreAHW) else 1.0
    return Kernel(np.array(vals, complex), np.full(n, w), domain=list(points))


# ------------------------------------------------------------ finite frames


class FiniteFrame:
    """Coherent states phi_x = pi(s(x)) f over a finite quotient.

    ``r`` is an AHW representation and ``quotient`` the quotient whose
    sections label the states (default: the centre, X = Z_n x Z_n).
    Weights are 1/n so that, for a unit f, the frame operator is the
    identity.
    """

    def __init__(self, r: Representation, f, quotient: G.Quotient | None = None):
        q = quotient or G.CentreAHW(r.group)
        self.rep = r
        self.quotient = q
        self.points = q.points()
        self.n = r.group.n
        self.f = np.asarray(f.values if isinstance(f, _Field) else f, complex)
        self.weights = np.full(len(self.points), 1.0 / self.n)
        self.sections = [q.s(x) for x in self.points]
        self.matrices = [r.matrix(g) for g in self.sections]
        self.vectors = np.stack([M @ self.f for M in self.matrices], axis=1)

    @property
    def constant(self):
        return float(np.vdot(self.f, self.f).real)

    def analysis(self, v):
        """W_f v(x) = <v, phi_x>."""
        v = np.asarray(v.values if isinstance(v, _Field) else v, complex)
        return self.vectors.conj().T @ v

    def synthesis(self, k):
        """sum_x w_x k(x) phi_x."""
        return self.vectors @ (self.weights * np.asarray(k, complex))

    def frame_operator(self):
        return (self.vectors * self.weights) @ self.vectors.conj().T

    def gram(self):
        """K[y, x] = <phi_x, phi_y>, the conjugated reproducing kernel."""
        return self.vectors.conj().T @ self.vectors

    def frame_residual(self):
        S = self.frame_operator()
        return float(np.max(np.abs(S - self.constant * np.eye(S.shape[0]))))


def tight_frame_residual(r: Representation, f) -> float:
    return FiniteFrame(r, f).frame_residual()


# -------------------------------------------------------- reproducing kernel


class ReproducingKernel:
    """Integral operator v -> int v(x) conj(k_y(x)) dx.

    Built from a matrix K[y, x] = conj(k_y(x)) over flattened nodes, or
    from a callable acting on weighted samples.
    """

    def __init__(self, matrix=None, apply=None):
        if (matrix is None) == (apply is None):
            raise TransformError("give exactly one of matrix or apply")
        self.matrix = None if matrix is None else np.asarray(matrix, complex)
        self._apply = apply

    @classmethod
    def from_frame(cls, frame: FiniteFrame):
        return cls(matrix=frame.gram() / frame.constant)

    @classmethod
    def fsb(cls, grid: PlaneGrid, hbar=1.0, c=None):
        F = FSB(grid, hbar, c)
        return cls(apply=lambda wv: F.c * F.integrate(wv))

    def __call__(self, weighted):
        if self.matrix is not None:
            return self.matrix @ weighted.reshape(-1)
        return self._apply(weighted)


def reproducing_apply(v, k: ReproducingKernel, weights=None):
    """Quadrature of v(y) = int v(x) conj(k_y(x)) dx.

    ``v`` is a :class:`Kernel`, a field or an array; ``weights`` defaults
    to the measure carried by ``v``.
    """
    if isinstance(v, Kernel):
        vals, w = v.values, v.weights if weights is None else weights
    elif isinstance(v, _Field):
        vals = v.values
        w = default_measure(v).weights if weights is None else weights
    else:
        vals = np.asarray(v, complex)
        w = np.ones(vals.shape) if weights is None else weights
    out = np.asarray(k(np.asarray(w) * vals)).reshape(vals.shape)
    if isinstance(v, Kernel):
        return v.like(out)
    if isinstance(v, _Field):
        return v.like(out)
    return out


# ------------------------------------------------------------ Fourier-Wigner


def fourier_wigner(v: LineField, f: LineField, hbar=1.0) -> PlaneField:
    """W(x, y) = int exp(2 pi i hbar y t) v(t + x/2) conj(f(t - x/2)) dt.

    x runs over even multiples 2 m dt (m = -N/2 .. N/2-1) so the half
    shifts land on nodes; y runs over the N-point grid with step
    1/(hbar N dt) centred at 0.  Samples beyond the window are zero.
    """
    if v.grid != f.grid:
        raise FieldError("fourier_wigner needs a common grid")
    g = v.grid
    n, dt = g.n, g.step
    m = np.arange(-(n // 2), n - n // 2)
    xg = LineGrid(n, 2 * dt, 2 * dt * m[0])
    dy = 1.0 / (hbar * n * dt)
    yg = LineGrid(n, dy, -dy * (n // 2))
    t = g.nodes
    j = np.arange(n)
    pa = j[:, None] + m[None, :]
    pb = j[:, None] - m[None, :]
    va = np.where((pa >= 0) & (pa < n), v.values[np.clip(pa, 0, n - 1)], 0)
    fb = np.where((pb >= 0) & (pb < n), f.values[np.clip(pb, 0, n - 1)], 0)
    prod = va * np.conj(fb)
    E = np.exp(2j * np.pi * hbar * np.outer(yg.nodes, t))
    W = dt * (E @ prod)
    return PlaneField(PlaneGrid(xg, yg), W.T)


# ----------------------------------------------------------------------- FSB


def fsb_kernel(z, w, hbar=1.0):
    """k(z, w) = exp(pi hbar z conj(w)) exp(-pi hbar (|z|^2 + |w|^2)/2)."""
    z = np.asarray(z, complex)
    w = np.asarray(w, complex)
    return np.exp(np.pi * hbar * (z * np.conj(w) - 0.5 * (np.abs(z) ** 2 + np.abs(w) ** 2)))


def fsb_gaussian(grid: PlaneGrid, hbar=1.0, centre=0j) -> PlaneField:
    """exp(-pi hbar |z - centre|^2 / 2), the calibration input."""
    z = grid.complex_nodes()
    return PlaneField(grid, np.exp(-0.5 * np.pi * hbar * np.abs(z - centre) ** 2), True)


class FSB:
    """Quadrature of P v(z) = c int k(z, w) v(w) dA(w) on a plane grid.

    The kernel factors as exp(-pi hbar |z-w|^2/2) exp(i pi hbar (y a - x b))
    for z = x + iy, w = a + ib, so the four dimensional sum is done as
    two matrix products.  ``c`` defaults to the value fitted on the
    Gaussian eigen-input (see :func:`fsb_constant`).
    """

    def __init__(self, grid: PlaneGrid, hbar=1.0, c=None):
        self.grid = grid
        self.hbar = float(hbar)
        x, y = grid.x.nodes, grid.y.nodes
        h = self.hbar
        self._A = np.exp(-0.5 * np.pi * h * (x[:, None] - x[None, :]) ** 2)   # [x, a]
        self._B = np.exp(-0.5 * np.pi * h * (y[:, None] - y[None, :]) ** 2)   # [y, b]
        self._F = np.exp(1j * np.pi * h * np.outer(y, x))                     # [y, a]
        self._E = np.exp(-1j * np.pi * h * np.outer(x, y))                    # [x, b]
        self.c = fsb_constant(grid, hbar, self) if c is None else float(c)

    def integrate(self, wv):
        """sum_w k(z, w) wv(w) over grid nodes, with weights already applied."""
        wv = np.asarray(wv, complex).reshape(self.grid.shape)
        nx, ny = self.grid.shape
        # T[x, y, a] = sum_b E[x, b] B[y, b] wv[a, b]
        M = (self._E[:, None, :] * self._B[None, :, :]).reshape(nx * ny, ny)
        T = (M @ wv.T).reshape(nx, ny, nx)
        return np.einsum("xa,ya,xya->xy", self._A, self._F, T)

    def __call__(self, f):
        vals = f.values if isinstance(f, _Field) else np.asarray(f)
        out = self.c * self.grid.cell * self.integrate(vals)
        if isinstance(f, PlaneField):
            return PlaneField(self.grid, out, True)
        return out


def fsb_constant(grid: PlaneGrid, hbar=1.0, op: FSB | None = None) -> float:
    """c_F making the Gaussian exp(-pi hbar |z|^2/2) a fixed point at z = 0."""
    g = fsb_gaussian(grid, hbar)
    if op is None:
        op = FSB(grid, hbar, c=1.0)
    i0 = int(np.argmin(np.abs(grid.x.nodes)))
    j0 = int(np.argmin(np.abs(grid.y.nodes)))
    raw = grid.cell * op.integrate(g.values)[i0, j0]
    return float((g.values[i0, j0] / raw).real)


def fsb_transform(f: PlaneField, hbar=1.0, c=None) -> PlaneField:
    return FSB(f.grid, hbar, c)(f)


# ------------------------------------------------------------------ Bergman


def bergman_constant(n_r=200, n_theta=256) -> float:
    """c_B making v = 1 - |z|^2 a fixed point (the full disk has area pi)."""
    q = DiskQuadrature(n_r, n_theta, 1.0 - 1e-15)
    return 1.0 / float(np.sum(q.weights_for(0.0)))


class BergmanProjection:
    """[P v](w) = c (1-|w|^2) int v(z) / (1 - conj(z) w)^2 dA(z) / (1-|z|^2).

    The source integral runs over the whole disk with a Gauss-Legendre rule
    on (0, 1) when ``v`` has a closed form, otherwise over ``v``'s own
    nodes.  Expanding the kernel, P v = (1-|w|^2) sum_j a_j w^j with
    a_j = c (j+1) int v conj(z)^j dA/(1-|z|^2) for j < ``degree``.
    """

    def __init__(self, n_r=200, n_theta=256, degree=None, c=None):
        self.source = DiskQuadrature(n_r, n_theta, 1.0 - 1e-15)
        self.degree = n_theta // 2 if degree is None else int(degree)
        self.c = bergman_constant(n_r, n_theta) if c is None else float(c)

    def coefficients(self, v) -> np.ndarray:
        if isinstance(v, DiskField) and v.evaluator is None:
            quad, vals = v.quad, v.values
        else:
            quad = self.source
            zq = quad.nodes
            vals = v(zq) if callable(v) else v.evaluator(zq)
        w = quad.weights_for(-1.0) * vals
        j = np.arange(self.degree)
        if self.degree > quad.n_theta:
            raise FieldError("degree exceeds the angular resolution")
        # sum_theta w v e^{-i j theta} by FFT, then the radial factor r^j
        ang = np.fft.fft(w, axis=1)[:, : self.degree]
        moments = np.sum(quad.radii[:, None] ** j[None, :] * ang, axis=0)
        return self.c * (j + 1) * moments

    def __call__(self, v, quad: DiskQuadrature | None = None) -> DiskField:
        a = self.coefficients(v)
        if quad is None:
            if not isinstance(v, DiskField):
                raise FieldError("target quadrature required for callable input")
            quad = v.quad
        ev = _bergman_series(a)
        return DiskField(quad, ev(quad.nodes), evaluator=ev)


def _bergman_series(a):
    coef = np.asarray(a, complex)

    def ev(z):
        z = np.asarray(z, complex)
        if np.any(np.abs(z) >= 1):
            raise FieldError("Bergman image evaluated outside the disk")
        return (1 - np.abs(z) ** 2) * np.polynomial.polynomial.polyval(z, coef)

    ev.coefficients = coef
    return ev


def bergman_project(v: DiskField, c=None, n_r=200, n_theta=256) -> DiskField:
    return BergmanProjection(n_r, n_theta, c=c)(v)


def toeplitz_covariant_symbol_bergman(a: DiskField, w, z, c=None) -> complex:
    """c (1-|w|^2)(1-|z|^2) int a(t) / ((1 + conj(w) t)^2 (1 + z conj(t))^2) dA(t).

    Quadrature over ``a``'s own nodes; ``c`` defaults to 1/pi.
    """
    c = 1.0 / np.pi if c is None else c
    t = a.quad.nodes
    wt = a.quad.weights_for(0.0)
    den = (1 + np.conj(w) * t) ** 2 * (1 + z * np.conj(t)) ** 2
    val = np.sum(wt * a.values / den)
    return complex(c * (1 - abs(w) ** 2) * (1 - abs(z) ** 2) * val)


# --------------------------------------------------------- image equations


def _disk_to_plane(F: DiskField, n=129):
    r = 0.9 * F.quad.r_max / np.sqrt(2)
    grid = PlaneGrid.window(n, -r, r)
    if F.evaluator is None:
        raise FieldError("Bergman residual needs a closed-form disk field")
    z = grid.complex_nodes()
    return PlaneField(grid, F.evaluator(z), True)


def _pde_terms(F, which):
    if which == "fsb":
        P = F
        d = finite_difference(P, "dzbar").values
        z = P.grid.complex_nodes()
        return d, z * P.values, P
    if which == "bergman":
        P = _disk_to_plane(F) if isinstance(F, DiskField) else F
        d = finite_difference(P, "dzbar").values
        z = P.grid.complex_nodes()
        return -d, z / (1 - np.abs(z) ** 2) * P.values, P
    raise TransformError(f"unknown image equation {which!r}")


def fit_pde_constant(F, which="fsb") -> complex:
    """Least-squares c for (d_zbar + c z) F = 0 (FSB) or (c z/(1-|z|^2) - d_zbar) F = 0."""
    d, m, P = _pde_terms(F, which)
    mask = np.zeros(P.grid.shape, bool)
    mask[2:-2, 2:-2] = True
    d, m = d[mask], m[mask]
    den = np.vdot(m, m)
    if den == 0:
        return 0j
    return complex(-np.vdot(m, d) / den)


def image_pde_residual(F, which="fsb", c=None, hbar=1.0) -> float:
    """Interior max of the image equation residual relative to max |F|.

    FSB: (d_zbar + c z) F.  Bergman: (c z/(1-|z|^2) - d_zbar) F; disk fields
    are resampled on a square inside the quadrature radius.  Default
    constants are pi hbar / 2 and -1.
    """
    if c is None:
        c = 0.5 * np.pi * hbar if which == "fsb" else -1.0
    d, m, P = _pde_terms(F, which)
    scale = np.max(np.abs(P.values))
    if scale == 0:
        return 0.0
    res = np.abs(d + c * m)[2:-2, 2:-2]
    return float(np.max(res) / scale)


# ------------------------------------------------------------ Berezin symbols


@dataclass
class SymbolGrid:
    """Two-point symbol A~(x1, x2) stored as values[i2, i1] (x1 fast)."""

    points1: list
    points2: list
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, complex)
        if self.values.shape != (len(self.points2), len(self.points1)):
            raise FieldError("symbol grid shape does not match its points")

    def diagonal(self):
        if len(self.points1) != len(self.points2):
            raise FieldError("diagonal needs a square symbol grid")
        return np.diag(self.values).copy()

    def __call__(self, x1, x2):
        return self.values[self.points2.index(x2), self.points1.index(x1)]


def _apply_op(A, v):
    if callable(A):
        return A(v)
    A = np.asarray(A)
    vals = v.values if isinstance(v, _Field) else np.asarray(v)
    out = A @ vals
    return v.like(out) if isinstance(v, _Field) else out


def berezin_covariant_symbol(A, f, l, r: Representation, x1, x2,
                             quotient: G.Quotient | None = None, check=True) -> complex:
    """A~(x1, x2) = <A pi(s(x1)) f, pi(s(x2)) l>."""
    q = quotient or r.quotient
    if check:
        check_eigenvector(f, r, q)
        check_eigenvector(l, r, q)
    a = _apply_op(A, r.apply(q.s(x1), f))
    return inner_product(a, r.apply(q.s(x2), l))


def berezin_symbol_grid(A, f, l, r: Representation, quotient: G.Quotient | None = None,
                        points1=None, points2=None, check=True) -> SymbolGrid:
    """Full symbol grid; on AHW this is the matrix Psi^H A Phi."""
    q = quotient or (G.CentreAHW(r.group) if isinstance(r.group, G.AHW) else r.quotient)
    if check:
        check_eigenvector(f, r, q)
        check_eigenvector(l, r, q)
    p1 = list(q.points()) if points1 is None else list(points1)
    p2 = list(q.points()) if points2 is None else list(points2)
    if isinstance(r.group, G.AHW) and not callable(A):
        fv = np.asarray(f.values if isinstance(f, _Field) else f, complex)
        lv = np.asarray(l.values if isinstance(l, _Field) else l, complex)
        Phi = np.stack([r.matrix(q.s(x)) @ fv for x in p1], axis=1)
        Psi = np.stack([r.matrix(q.s(x)) @ lv for x in p2], axis=1)
        return SymbolGrid(p1, p2, Psi.conj().T @ np.asarray(A) @ Phi)
    a = [_apply_op(A, r.apply(q.s(x), f)) for x in p1]
    b = [r.apply(q.s(x), l) for x in p2]
    vals = np.array([[inner_product(ai, bj) for ai in a] for bj in b])
    return SymbolGrid(p1, p2, vals)


def symbol_compose(At: SymbolGrid, Bt: SymbolGrid, weights, frame_constant=1.0) -> SymbolGrid:
    """(AB)~(x, y) = int B~(x, z) A~(z, y) dz / ||f||^2.

    ``weights`` is the measure on the middle variable (1/n on Z_n x Z_n).
    Valid when the states built from the wavelet form a tight frame with
    constant ``frame_constant``.
    """
    if len(Bt.points2) != len(At.points1):
        raise FieldError("middle grids of the two symbols differ")
    w = np.broadcast_to(np.asarray(weights, float), (len(At.points1),))
    vals = (At.values * w) @ Bt.values / frame_constant
    return SymbolGrid(Bt.points1, At.points2, vals)


def kn_berezin_symbol(A, r: Representation) -> np.ndarray:
    """S[g, xi] = <A pi(s(0, xi)) 1, pi(s(-g, xi)) delta> on Z_n.

    For A = kn_quantize(a) this recovers a(g, xi) exactly.
    """
    if r.flavor != "ahw-schrodinger":
        raise RepError("the Kohn-Nirenberg symbol uses the ahw-schrodinger flavor")
    n = r.group.n
    q = G.CentreAHW(r.group)
    one, delta = np.ones(n, complex), np.zeros(n, complex)
    delta[0] = 1.0
    A = np.asarray(A)
    S = np.empty((n, n), complex)
    for xi in range(n):
        a = A @ (r.matrix(q.s((0, xi))) @ one)
        for g in range(n):
            b = r.matrix(q.s(((-g) % n, xi))) @ delta
            S[g, xi] = np.vdot(b, a)
    return S
