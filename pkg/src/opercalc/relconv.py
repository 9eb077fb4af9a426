"""
Relative convolutions, quantizers and twisted convolutions.

A kernel k on X = H\\G defines the operator

    pi(k) = int_X k(x) pi(s(x)) dx.

Composition of two such operators is again a relative convolution whose
kernel is the twisted convolution k1 # k2.  It is derived from the
semigroup product s(x1) s(x2) = h s(x) on X.  For a central subgroup
pi(h) is the scalar chi(h):

    (k1 # k2)(x) = int k1(x x2^{-1}) k2(x2) chi(h(x x2^{-1}, x2)) dx2.

The generic path builds this from the quotient maps alone.  The closed
forms for AHW, H1 and SU(1,1) are faster and are checked against it.
"""

from functools import lru_cache

import numpy as np

from . import groups as G
from .covtrans import BergmanProjection, FSB, FiniteFrame, _bergman_series
from .fields import (DiskField, DiskQuadrature, FieldError, Kernel, LineField,
                     LineGrid, PlaneField, PlaneGrid, ShapeError, _Field)
from .reps import Character, RepError, Representation


class QuadratureGuard(ArithmeticError):
    """A grid is too small for the data it has to carry."""


# ------------------------------------------------------------------ operator


class RelConvOperator:
    """Operator realized as a matrix or as a closure over fields."""

    def __init__(self, matrix=None, apply=None, kernel=None, rep=None, grid=None):
        if matrix is None and apply is None:
            raise ValueError("operator needs a matrix or a closure")
        self.matrix = None if matrix is None else np.asarray(matrix, complex)
        self._apply = apply
        self.kernel = kernel
        self.rep = rep
        self.grid = grid

    def __call__(self, f):
        if self.matrix is not None:
            vals = f.values if isinstance(f, _Field) else np.asarray(f)
            if vals.shape[0] != self.matrix.shape[1]:
                raise ShapeError(f"operator of size {self.matrix.shape} applied to {vals.shape}")
            out = self.matrix @ vals
            return f.like(out) if isinstance(f, _Field) else out
        return self._apply(f)

    def __matmul__(self, other):
        if self.matrix is not None and other.matrix is not None:
            return RelConvOperator(self.matrix @ other.matrix, grid=self.grid)
        return RelConvOperator(apply=lambda f: self(other(f)), grid=self.grid)


# ---------------------------------------------------- integrated representation


def integrated_rep(values, elements, r: Representation, weights=None) -> RelConvOperator:
    """pi(k) = sum_j w_j k(g_j) pi(g_j): quadrature of the group integral.

    Elements must be compatible with the grids the operator will act on.
    On AHW the result is a matrix.
    """
    vals = np.asarray(values, complex)
    w = np.ones(len(elements)) if weights is None else np.asarray(weights, float)
    if len(vals) != len(elements) or len(w) != len(elements):
        raise ShapeError("kernel, elements and weights differ in length")
    if isinstance(r.group, G.AHW):
        M = sum(c * wi * r.matrix(g) for c, wi, g in zip(vals, w, elements))
        return RelConvOperator(np.asarray(M), rep=r)

    def apply(f):
        out = None
        for c, wi, g in zip(vals, w, elements):
            if c == 0:
                continue
            term = r.apply(g, f) * complex(c * wi)
            out = term if out is None else out + term
        return f * 0.0 if out is None else out

    return RelConvOperator(apply=apply, rep=r)


def finite_ahw_elements(n):
    """The finite subgroup mu_n x Z_n x Z_n of AHW(n), centre index slowest."""
    grp = G.AHW(n)
    return [grp(grp.root(m), g, c) for m in range(n) for c in range(n) for g in range(n)]


def _ahw_key(el):
    z, g, c = el.data
    m = int(round(np.angle(z) * el.group.n / (2 * np.pi))) % el.group.n
    return (m, g, c)


def group_convolution(k1, k2, elements):
    """(k1 * k2)(g) = sum_h k1(h) k2(h^{-1} g) on a finite group."""
    index = {_ahw_key(e): i for i, e in enumerate(elements)}
    k1, k2 = np.asarray(k1, complex), np.asarray(k2, complex)
    out = np.zeros(len(elements), complex)
    for i, h in enumerate(elements):
        if k1[i] == 0:
            continue
        hi = h.inv()
        for j, g in enumerate(elements):
            out[j] += k1[i] * k2[index[_ahw_key(hi * g)]]
    return out


def central_integral(ks, s_nodes, hbar=1.0):
    """Trapezoid rule for int k(s) exp(2 pi i hbar s) ds along the centre."""
    return complex(np.trapezoid(np.asarray(ks) * np.exp(2j * np.pi * hbar * np.asarray(s_nodes)),
                                s_nodes))


# ------------------------------------------------------- relative convolution


def relative_convolution(k, r: Representation, grid: LineGrid | None = None,
                         quotient: G.Quotient | None = None) -> RelConvOperator:
    """pi(k) = int_X k(x) pi(s(x)) dx.

    * AHW: ``k`` is a :class:`Kernel` over the points of X (default the centre,
      Z_n x Z_n, weights 1/n), the operator is the matrix sum.
    * Schrodinger on a line grid: ``k`` is a :class:`PlaneField` over (x, y)
      whose x-step equals the line step; the operator is materialized.
    * SU(1,1): ``k`` is a :class:`Kernel` over a disk quadrature (invariant
      measure); the operator acts on disk fields with a closed form.
    """
    if isinstance(r.group, G.AHW):
        q = quotient or G.CentreAHW(r.group)
        basis = _ahw_basis(_quotient_key(r.quotient), r.flavor, r.group.n, r.hbar, r.k,
                           _quotient_key(q))
        vals, w = _kernel_arrays(k, basis.shape[0], 1.0 / r.group.n)
        M = np.tensordot(np.asarray(vals, complex) * w, basis, axes=1)
        return RelConvOperator(M, kernel=k, rep=r)
    if r.flavor == "schrodinger":
        if not isinstance(k, PlaneField):
            raise RepError("Heisenberg relative convolution takes a PlaneField kernel")
        if grid is None:
            raise RepError("a line grid is required")
        return RelConvOperator(_heisenberg_matrix(k, grid, r.hbar), kernel=k, rep=r, grid=grid)
    if r.flavor == "su11":
        return _su11_relconv(k, r)
    raise RepError(f"relative convolution not realized for {r.flavor}")


@lru_cache(maxsize=64)
def _ahw_basis(rkey, flavor, n, hbar, k, qkey):
    """Matrices pi(s(x)) stacked over the points of X, built once per setting."""
    r = Representation(G.make_quotient(*rkey, n=n), flavor, hbar, k)
    q = G.make_quotient(*qkey, n=n)
    out = np.stack([r.matrix(q.s(x)) for x in q.points()])
    out.setflags(write=False)
    return out


def _kernel_arrays(k, n, default_w):
    if isinstance(k, Kernel):
        vals, w = k.values, k.weights
    else:
        vals = np.asarray(k.values if isinstance(k, _Field) else k, complex).reshape(-1)
        w = np.full(vals.shape, default_w)
    if len(vals) != n:
        raise ShapeError(f"kernel has {len(vals)} values, quotient has {n} points")
    return vals, w


def _center_index(g: LineGrid):
    k = -g.origin / g.step
    if abs(k - round(k)) > 1e-9:
        raise FieldError("grid has no node at 0")
    return int(round(k))


def _heisenberg_matrix(k: PlaneField, grid: LineGrid, hbar):
    """M[i, j] = dx dy sum_y k(t_j - t_i, y) exp(i pi hbar y (t_i + t_j))."""
    gx, gy = k.grid.x, k.grid.y
    if not np.isclose(gx.step, grid.step, rtol=1e-12):
        raise ShapeError("kernel x-step must equal the line step")
    n = grid.n
    c = _center_index(gx)
    t = grid.nodes
    s = t[0] * 2 + grid.step * np.arange(2 * n - 1)          # t_i + t_j
    E = np.exp(1j * np.pi * hbar * np.outer(gy.nodes, s))     # [y, i+j]
    T = k.values @ E                                           # [x, i+j]
    i, j = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    xi = j - i + c
    inside = (xi >= 0) & (xi < gx.n)
    M = np.zeros((n, n), complex)
    M[inside] = T[xi[inside], (i + j)[inside]]
    return gx.step * gy.step * M


# ---------------------------------------------------------- Weyl quantization


def symbol_grid(line: LineGrid, hbar=1.0, periodic=False) -> PlaneGrid:
    """(q, p) grid for Weyl symbols on ``line``.

    p is the line itself.  q is the dual of the zero-padded line of 2n
    nodes, scaled by 1/hbar, so the q-sums resolve every difference
    t - t' in the window without periodic wrap.  With ``periodic`` q is
    the plain dual grid and the window is treated as a circle.
    """
    m = line.n if periodic else 2 * line.n
    d = LineGrid(m, line.step, line.origin).dual()
    return PlaneGrid(LineGrid(d.n, d.step / hbar, d.origin / hbar), line)


def _midpoints(sig):
    """Samples on the half-step p grid: 4th-order interpolation, zero outside."""
    nq, n = sig.shape
    z = np.zeros((nq, 1), sig.dtype)
    pad = np.hstack([z, sig, z, z])
    half = (-pad[:, :-3] + 9 * pad[:, 1:-2] + 9 * pad[:, 2:-1] - pad[:, 3:]) / 16
    out = np.empty((nq, 2 * n), sig.dtype)
    out[:, 0::2] = sig
    out[:, 1::2] = half
    return out


def _check_symbol(sigma: PlaneField, line: LineGrid, hbar, periodic=False):
    ref = symbol_grid(line, hbar, periodic)
    g = sigma.grid
    ok = (g.x.n == ref.x.n and g.y.n == ref.y.n and np.isclose(g.x.step, ref.x.step)
          and np.isclose(g.y.step, ref.y.step) and np.isclose(g.x.origin, ref.x.origin)
          and np.isclose(g.y.origin, ref.y.origin))
    if not ok:
        raise ShapeError("symbol must be sampled on symbol_grid(line, hbar)")


def weyl_quantize(sigma: PlaneField, line: LineGrid, hbar=1.0, guard=False,
                  periodic=False) -> RelConvOperator:
    """[Au](t) = hbar sum_j sum_q dq sigma(q, (t + t_j)/2) e^{2 pi i hbar (t - t_j) q} u(t_j) dt.

    ``sigma`` lives on ``symbol_grid(line, hbar)``, q (frequency) first and
    p (position) second.  Half-node values of p use 4th-order
    interpolation.  With ``guard`` the quantizer refuses symbols whose
    kernel reaches the periodic wrap of the difference variable.
    ``periodic`` selects the circle model of :func:`symbol_grid`, in which
    plane waves periodic on the window are exact eigenfunctions of
    symbols depending on q alone.
    """
    _check_symbol(sigma, line, hbar, periodic)
    n, dt = line.n, line.step
    qg = sigma.grid.x
    mid = _midpoints(np.asarray(sigma.values, complex))[:, : 2 * n - 1]   # [q, i+j]
    d = dt * np.arange(-(n - 1), n)                                       # t_i - t_j
    E = np.exp(2j * np.pi * hbar * np.outer(d, qg.nodes))                 # [i-j, q]
    U = E @ mid                                                           # [i-j, i+j]
    if guard:
        _wrap_guard(sigma)
    i, j = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    W = hbar * dt * qg.step * U[i - j + n - 1, i + j]
    return RelConvOperator(W, kernel=sigma, grid=line)


def _wrap_guard(sigma: PlaneField, tol=1e-8):
    """Mass of sigma's difference-variable transform near the periodic wrap."""
    a = np.fft.fft(np.asarray(sigma.values), axis=0)
    mass = np.abs(a) ** 2
    n = mass.shape[0]
    band = np.zeros(n, bool)
    band[n // 2 - n // 8: n // 2 + n // 8] = True
    total = mass.sum()
    if total > 0 and mass[band].sum() / total > tol:
        raise QuadratureGuard(f"symbol kernel reaches the window edge "
                              f"(fraction {mass[band].sum() / total:.2e} > {tol:g})")


def weyl_apply(sigma: PlaneField, u: LineField, hbar=1.0, guard=False,
               periodic=False) -> LineField:
    return weyl_quantize(sigma, u.grid, hbar, guard, periodic)(u)


def symbol_fourier(sigma: PlaneField, line: LineGrid, hbar=1.0) -> PlaneField:
    """hbar^2 sigma^(x, y), sigma^ = int sigma(q, p) e^{-2 pi i hbar (x q + y p)} dq dp.

    The p-integral runs over the same half-step samples the Weyl
    quantizer uses, so relative_convolution(symbol_fourier(sigma)) and
    weyl_quantize(sigma) are two evaluations of one discretization.  The
    result lives on x = t-differences (step dt, centred) and y with step
    1/(hbar n dt) over 2n nodes.
    """
    _check_symbol(sigma, line, hbar)
    n, dt = line.n, line.step
    qg = sigma.grid.x
    mid = _midpoints(np.asarray(sigma.values, complex))                    # [q, 2n]
    p = line.origin + 0.5 * dt * np.arange(2 * n)
    xg = LineGrid(2 * n, dt, -dt * n)
    dy = 1.0 / (hbar * n * dt)
    yg = LineGrid(2 * n, dy, -dy * n)
    Ex = np.exp(-2j * np.pi * hbar * np.outer(xg.nodes, qg.nodes))
    Ey = np.exp(-2j * np.pi * hbar * np.outer(p, yg.nodes))
    hat = (Ex @ mid @ Ey) * qg.step * 0.5 * dt
    return PlaneField(PlaneGrid(xg, yg), hbar ** 2 * hat)


# ----------------------------------------------------------- Kohn-Nirenberg


def kn_quantize(a) -> RelConvOperator:
    """[A u](y) = (1/n) sum_x sum_xi a(y, xi) w^{xi (y - x)} u(x) on Z_n.

    ``a`` is an n x n array indexed [g, xi].
    """
    a = np.asarray(a, complex)
    n = a.shape[0]
    if a.shape != (n, n):
        raise ShapeError("Kohn-Nirenberg symbol must be n x n")
    w = np.exp(2j * np.pi * np.outer(np.arange(n), np.arange(n)) / n)   # w^{xi y}
    # A[y, x] = (1/n) sum_xi a[y, xi] w^{xi y} conj(w^{xi x})
    A = ((a * w) @ w.conj().T) / n
    return RelConvOperator(A)


def kn_to_relconv_kernel(a) -> np.ndarray:
    """Relative-convolution kernel sigma(g, chi), flattened g fast, with kn_quantize(a) = pi(sigma)."""
    a = np.asarray(a, complex)
    n = a.shape[0]
    w = np.exp(2j * np.pi * np.outer(np.arange(n), np.arange(n)) / n)
    s2 = (w.conj() @ a.T) / n            # s2[g, g'] = (1/n) sum_xi a(g', xi) conj(xi(g))
    sig = s2 @ w.conj()                  # sig[g, chi] = sum_g' s2[g, g'] conj(chi(g'))
    return sig.T.reshape(-1)


# ------------------------------------------------------- twisted convolution


def _finite_key(x):
    return tuple(x) if isinstance(x, tuple) else x


@lru_cache(maxsize=64)
def _twist_table(qkey, n, hbar, k):
    q = G.make_quotient(qkey[0], qkey[1], n=n)
    chi = Character(q, hbar, k)
    pts = q.points()
    index = {_finite_key(p): i for i, p in enumerate(pts)}
    m = len(pts)
    idx = np.empty((m, m), int)
    phase = np.empty((m, m), complex)
    sec = [q.s(x) for x in pts]
    inv = [G.inverse(g) for g in sec]
    for i, x in enumerate(pts):
        for j in range(m):
            i1 = index[_finite_key(q.p(sec[i] * inv[j]))]      # x1 = x x2^{-1}
            g = sec[i1] * sec[j]                                 # s(x1) s(x2) = h s(x)
            if q.point_distance(q.p(g), x) > 1e-12:
                raise G.GroupError("division is inconsistent with the product")
            h = q.r(g)
            idx[i, j] = i1
            phase[i, j] = chi(h) * q.modular_ratio(h)
    return idx, phase


def _quotient_key(q):
    for key, cls in G.QUOTIENTS.items():
        if type(q) is cls:
            return key
    raise G.GroupError(f"unregistered quotient {q.name}")


def twisted_convolution_generic(k1, k2, quotient: G.Quotient, hbar=1.0, k=1, weights=None):
    """(k1 # k2)(x) = sum_x2 w k1(x x2^{-1}) k2(x2) chi(h) Delta_H/Delta_G(h).

    h is the subgroup part of s(x x2^{-1}) s(x2).  On finite quotients the
    index and phase tables are built once from the quotient maps.  For
    kernels on grids, pass :class:`Kernel` objects whose ``domain`` lists
    the points; points falling outside the domain contribute zero.
    """
    if isinstance(quotient, (G.CentreAHW, G.LineAHW)):
        n = quotient.n
        idx, phase = _twist_table(_quotient_key(quotient), n, float(hbar), int(k))
        v1, w = _kernel_arrays(k1, idx.shape[0], 1.0 / n)
        v2, _ = _kernel_arrays(k2, idx.shape[0], 1.0 / n)
        w = w if weights is None else np.broadcast_to(weights, v1.shape)
        out = np.sum(v1[idx] * (w * v2)[None, :] * phase, axis=1)
        return Kernel(out, w, domain=quotient.points()) if isinstance(k1, Kernel) else out
    return _twisted_points(k1, k2, quotient, hbar, k)


def _round_key(x, digits=9):
    if isinstance(x, complex):
        return (round(x.real, digits) + 0.0, round(x.imag, digits) + 0.0)
    if isinstance(x, tuple):
        return tuple(round(float(v), digits) + 0.0 for v in x)
    return round(float(x), digits) + 0.0


def _twisted_points(k1: Kernel, k2: Kernel, q: G.Quotient, hbar, k):
    """Pointwise generic path over an explicit list of nodes."""
    if list(k1.domain) != list(k2.domain):
        raise FieldError("kernels live on different nodes")
    pts = list(k1.domain)
    chi = Character(q, hbar, k)
    index = {_round_key(p): i for i, p in enumerate(pts)}
    v1 = np.asarray(k1.values).reshape(-1)
    wv2 = (np.asarray(k2.weights) * np.asarray(k2.values)).reshape(-1)
    out = np.zeros(len(pts), complex)
    for i, x in enumerate(pts):
        acc = 0j
        for j, x2 in enumerate(pts):
            if wv2[j] == 0:
                continue
            x1 = q.div(x, x2)
            if k1.evaluator is not None:
                a = k1.evaluator(x1)
            else:
                i1 = index.get(_round_key(x1))
                if i1 is None:
                    continue
                a = v1[i1]
            h = q.product(x1, x2)[1]
            acc += a * wv2[j] * chi(h) * q.modular_ratio(h)
        out[i] = acc
    return k1.like(out.reshape(np.shape(k1.values)))


def plane_kernel(f: PlaneField) -> Kernel:
    """A PlaneField as a :class:`Kernel` on the points (x, y) of the centre quotient."""
    X, Y = f.grid.mesh()
    pts = list(zip(X.reshape(-1).tolist(), Y.reshape(-1).tolist()))
    return Kernel(f.values.reshape(-1), np.full(len(pts), f.grid.cell), domain=pts)


def twisted_convolution_ahw(k1, k2, n=None, k=1):
    """Closed form on Z_n x Z_n: sum over (g2, c2) of
    k1(g - g2, c - c2) k2(g2, c2) w^{k c2 (g - g2)} / n."""
    v1 = np.asarray(k1.values if isinstance(k1, Kernel) else k1, complex).reshape(-1)
    v2 = np.asarray(k2.values if isinstance(k2, Kernel) else k2, complex).reshape(-1)
    n = n or int(round(np.sqrt(v1.size)))
    A = v1.reshape(n, n)          # [c, g]
    B = v2.reshape(n, n)
    out = np.zeros((n, n), complex)
    g = np.arange(n)
    for c2 in range(n):
        for g2 in range(n):
            b = B[c2, g2]
            if b == 0:
                continue
            ph = np.exp(2j * np.pi * k * c2 * ((g - g2) % n) / n)
            out += b * np.roll(np.roll(A, c2, axis=0), g2, axis=1) * ph[None, :]
    out = out.reshape(-1) / n
    if isinstance(k1, Kernel):
        return Kernel(out, k1.weights, domain=k1.domain)
    return out


def twisted_convolution_heisenberg(k1: PlaneField, k2: PlaneField, hbar=1.0) -> PlaneField:
    """(k1 # k2)(x, y) = sum k1(x - x2, y - y2) k2(x2, y2) e^{i pi hbar (x y2 - x2 y)} dx2 dy2.

    Loops over x2 and convolves along y with FFTs.  Both axes must contain
    0 as a node; values shifted beyond the grid are zero.  ``hbar = 0``
    gives the ordinary convolution.
    """
    if k1.grid != k2.grid:
        raise FieldError("twisted convolution needs a common grid")
    g = k1.grid
    nx, ny = g.shape
    cx, cy = _center_index(g.x), _center_index(g.y)
    x, y = g.x.nodes, g.y.nodes
    A, B = np.asarray(k1.values), np.asarray(k2.values)
    L = 2 * ny
    out = np.zeros((nx, ny), complex)
    ex = np.exp(1j * np.pi * hbar * np.outer(x, y))          # e^{i pi hbar x y2}  [x, y2]
    for j in range(nx):
        if not np.any(B[j]):
            continue
        di = np.arange(nx) - j + cx                          # index of x - x2
        ok = (di >= 0) & (di < nx)
        rows = np.zeros((nx, ny), complex)
        rows[ok] = A[di[ok]]
        b = B[j][None, :] * ex                               # [x, y2]
        conv = np.fft.ifft(np.fft.fft(rows, L, axis=1) * np.fft.fft(b, L, axis=1), axis=1)
        # linear convolution index m corresponds to y-index (m - cy)
        seg = conv[:, cy: cy + ny]
        out += seg * np.exp(-1j * np.pi * hbar * x[j] * y)[None, :]
    return PlaneField(g, g.cell * out)


# ------------------------------------------------------------ SU(1,1) disk


def su11_kernel(quad: DiskQuadrature, func) -> Kernel:
    """Kernel on the disk with invariant-measure weights and a closed form."""
    q = quad.with_power(-2.0)
    return Kernel(func(q.nodes), q.weights, domain=q, evaluator=func)


def _su11_relconv(k: Kernel, r: Representation):
    """[pi(k) v](z) = int k(w) (w conj(z) + 1)/(conj(w) z + 1) v((z + w)/(conj(w) z + 1)) dmu(w)."""
    wq = np.asarray(k.domain.nodes).reshape(-1)
    kw = (np.asarray(k.weights) * np.asarray(k.values)).reshape(-1)

    def evaluator_for(ev):
        def out(z):
            z = np.asarray(z, complex)
            flat = z.reshape(-1)
            res = np.empty(flat.shape, complex)
            step = max(1, 200000 // max(len(wq), 1))
            for a in range(0, len(flat), step):
                zz = flat[a: a + step, None]
                den = np.conj(wq)[None, :] * zz + 1
                fac = (wq[None, :] * np.conj(zz) + 1) / den
                res[a: a + step] = (fac * ev((zz + wq[None, :]) / den)) @ kw
            return res.reshape(z.shape)
        return out

    def apply(v):
        if isinstance(v, DiskField):
            if v.evaluator is None:
                raise FieldError("SU(1,1) relative convolution needs a closed-form field")
            ev = evaluator_for(v.evaluator)
            return DiskField(v.quad, ev(v.quad.nodes), evaluator=ev)
        return evaluator_for(v)

    return RelConvOperator(apply=apply, kernel=k, rep=r)


def twisted_convolution_su11(k1: Kernel, k2: Kernel) -> Kernel:
    """Closed form on the disk:
    (k1 # k2)(z) = int k1((z - w)/(1 - z conj(w))) k2(w) (1 - z conj(w))/(1 - conj(z) w) dmu(w).
    """
    if k1.evaluator is None:
        raise FieldError("the first kernel needs a closed form")
    z = np.asarray(k1.domain.nodes).reshape(-1)
    w = np.asarray(k2.domain.nodes).reshape(-1)
    wv = (np.asarray(k2.weights) * np.asarray(k2.values)).reshape(-1)
    out = np.empty(z.shape, complex)
    step = max(1, 200000 // len(w))
    for a in range(0, len(z), step):
        zz = z[a: a + step, None]
        d = 1 - zz * np.conj(w)[None, :]
        x1 = (zz - w[None, :]) / d
        ph = d / (1 - np.conj(zz) * w[None, :])
        out[a: a + step] = (k1.evaluator(x1) * ph) @ wv
    return k1.like(out.reshape(np.shape(k1.values)))


def su11_kernel_points(k: Kernel) -> Kernel:
    """Same kernel with its nodes listed as points, for the generic path."""
    pts = [complex(z) for z in np.asarray(k.domain.nodes).reshape(-1)]
    return Kernel(np.asarray(k.values).reshape(-1), np.asarray(k.weights).reshape(-1),
                  domain=pts, evaluator=k.evaluator)


# ------------------------------------------------ contravariant transform, theta


def contravariant_transform(k, w, r: Representation, quotient: G.Quotient | None = None):
    """M_w(k) = sum_x (1/n) k(x) pi(s(x))^{-1} w on Z_n x Z_n."""
    if not isinstance(r.group, G.AHW):
        raise RepError("contravariant transform is realized on AHW")
    q = quotient or G.CentreAHW(r.group)
    pts = q.points()
    vals, wt = _kernel_arrays(k, len(pts), 1.0 / r.group.n)
    wv = np.asarray(w.values if isinstance(w, _Field) else w, complex)
    out = np.zeros(wv.shape, complex)
    for c, wi, x in zip(vals, wt, pts):
        if c != 0:
            out += c * wi * (r.matrix(q.s(x)).conj().T @ wv)
    return out


def contravariant_matrix(w, r: Representation, quotient=None):
    """Matrix of k -> M_w(k), columns indexed like the quotient points."""
    q = quotient or G.CentreAHW(r.group)
    wv = np.asarray(w.values if isinstance(w, _Field) else w, complex)
    n = r.group.n
    return np.stack([(r.matrix(q.s(x)).conj().T @ wv) / n for x in q.points()], axis=1)


def right_regular(k, g: G.GroupElement, r: Representation, quotient=None):
    """(R(g) k)(x) = chi(h(x, g)) k(x.g), the action intertwined by M_w."""
    q = quotient or G.CentreAHW(r.group)
    pts = q.points()
    index = {p: i for i, p in enumerate(pts)}
    chi = Character(q, r.hbar, r.k)
    vals = np.asarray(k, complex)
    return np.array([chi(q.cocycle(x, g)) * vals[index[q.act(x, g)]] for x in pts])


def covariant_matrix(v, r: Representation, quotient=None):
    """Matrix of u -> W_v u with W_v u(x) = <pi(s(x)) u, v>."""
    q = quotient or G.CentreAHW(r.group)
    vv = np.asarray(v.values if isinstance(v, _Field) else v, complex)
    return np.stack([r.matrix(q.s(x)).conj().T @ vv for x in q.points()], axis=0).conj()


def theta_form(w, v, r: Representation):
    """theta with M_w W_v = theta I; returns (theta, ||M_w W_v - theta I||_F).

    theta(w, v) = <w, v>: linear in w, conjugate linear in v.
    """
    M = contravariant_matrix(w, r) @ covariant_matrix(v, r)
    n = M.shape[0]
    th = np.trace(M) / n
    return complex(th), float(np.linalg.norm(M - th * np.eye(n)))


def wavelet_kernel(u, v, r: Representation):
    """W_v u(x) = <u, pi(s(x)) v>, so that pi(W_v u) = |u><v|."""
    return FiniteFrame(r, v).analysis(u)


def wavelet_twist_identity(u1, v1, u2, v2, r: Representation):
    """Residuals of W_{v1}u1 # W_{v2}u2 = theta(u2, v1) W_{v2}u1 and of the
    reproducing case W_f v # W_f f = W_f v (f = v1 normalized)."""
    q = G.CentreAHW(r.group)
    a = wavelet_kernel(u1, v1, r)
    b = wavelet_kernel(u2, v2, r)
    th, _ = theta_form(u2, v1, r)
    lhs = twisted_convolution_generic(a, b, q, r.hbar, r.k)
    rhs = th * wavelet_kernel(u1, v2, r)
    f = np.asarray(v1, complex) / np.linalg.norm(v1)
    vt = wavelet_kernel(u1, f, r)
    ft = wavelet_kernel(f, f, r)
    rep = twisted_convolution_generic(vt, ft, q, r.hbar, r.k) - vt
    return float(np.max(np.abs(lhs - rhs))), float(np.max(np.abs(rep)))


def reproducing_literal_residual(v, f, r: Representation):
    """max |f~ # v~ - v~|, the reversed order of the reproducing identity."""
    q = G.CentreAHW(r.group)
    f = np.asarray(f, complex) / np.linalg.norm(f)
    vt = wavelet_kernel(v, f, r)
    ft = wavelet_kernel(f, f, r)
    return float(np.max(np.abs(twisted_convolution_generic(ft, vt, q, r.hbar, r.k) - vt)))


# ------------------------------------------------------------------ Toeplitz


def toeplitz_operator(a, space="fsb", grid: PlaneGrid | None = None, hbar=1.0,
                      N=16, projection: BergmanProjection | None = None) -> RelConvOperator:
    """T_a = P a P.

    ``space="fsb"``: closure u -> P(a P u) on a plane grid (``a`` a PlaneField,
    an array or a callable of z).  ``space="bergman"``: the (N+1) x (N+1) matrix whose column
    j holds the Taylor coefficients of P(a e_j), e_j = (1-|z|^2) z^j.
    """
    if space == "fsb":
        g = grid or a.grid
        P = FSB(g, hbar)
        if callable(a):
            av = np.asarray(a(g.complex_nodes()))
        else:
            av = np.asarray(a.values if isinstance(a, _Field) else a)

        def apply(u):
            pu = P(u)
            return P(PlaneField(g, av * pu.values, True))

        return RelConvOperator(apply=apply, grid=g)
    if space == "bergman":
        P = projection or BergmanProjection()
        if isinstance(a, (int, float, complex)):
            c = a
            a_ev = lambda z: c * np.ones(np.shape(z), complex)  # noqa: E731
        else:
            a_ev = a.evaluator if isinstance(a, DiskField) else a
            if a_ev is None:
                raise FieldError("Bergman Toeplitz symbol needs a closed form")
        M = np.zeros((N + 1, N + 1), complex)
        for j in range(N + 1):
            def src(z, j=j):
                return a_ev(z) * (1 - np.abs(z) ** 2) * z ** j
            M[:, j] = P.coefficients(src)[: N + 1]

        def apply(v):
            if not isinstance(v, DiskField):
                raise FieldError("Bergman Toeplitz operator acts on disk fields")
            c = P.coefficients(v)[: N + 1]
            ev = _bergman_series(M @ c)
            return DiskField(v.quad, ev(v.quad.nodes), evaluator=ev)

        return RelConvOperator(M, apply=apply)
    raise ValueError(f"unknown space {space!r}")


# -------------------------------------------------------------------- Dynin


def dynin_lattice(nodes_s, nodes_x, nodes_y):
    """Elements (0,0,0,0,s,x,y) of the Dynin group on a product lattice."""
    grp = G.Dynin()
    return [grp(0, 0, 0, 0, s, x, y) for s in nodes_s for x in nodes_x for y in nodes_y]


def dynin_heisenberg_convolution(k1, elements, r: Representation):
    """Operator of the kernel delta(z,t,u,v) k1(s,x,y): f(X) -> sum_g k1(g) f(X.g)."""
    return integrated_rep(k1, elements, r)


def dynin_multiplication(k2, tuv, r: Representation):
    """Operator of the kernel k2(t,u,v) delta(z,s,x,y): multiplication by
    sum k2(t,u,v) e^{2 pi i hbar (t s' + u x' + v y')}."""
    grp = r.group
    elements = [grp(0, t, u, v, 0, 0, 0) for t, u, v in tuv]
    return integrated_rep(k2, elements, r)
