"""
Induced representations realized on sampled fields.

A representation induced from a character chi of H acts on functions on
X = H\\G by

    [pi(g) f](x) = chi(r(s(x) g)) f(x.g).

:meth:`Representation.generic` evaluates this formula pointwise from the
quotient maps.  :meth:`Representation.apply` uses the closed forms of the
named flavors on grids:

==================  =============  ====================================
flavor              quotient       space
==================  =============  ====================================
``schrodinger``     H_x\\H1         LineField
``schrodinger-84``  H_x\\H1         LineField (phase e^{pi i(2s+y(2t-x))})
``fsb``             Z\\H1           PlaneField
``ahw-fsb``         T\\AHW(n)       CyclicField of length n^2, g fast
``ahw-schrodinger`` H_G\\AHW(n)     CyclicField of length n
``dynin``           M\\D            BoxField over (s, x, y)
``su11``            K\\SU(1,1)      DiskField with a closed-form evaluator
==================  =============  ====================================

Grid shifts must be multiples of the grid step.  Samples shifted in from
outside the window are set to zero; pass ``interpolate=True`` to use a
band-limited (Fourier phase) shift instead.
"""

from dataclasses import dataclass

import numpy as np
from scipy.interpolate import RegularGridInterpolator

from . import groups as G
from .fields import (BoxField, CyclicField, DiskField, FieldError, LineField,
                     PlaneField)


class RepError(ValueError):
    """Incompatible flavor, element or field."""


# ---------------------------------------------------------------- characters


@dataclass(frozen=True)
class Character:
    """Unitary character of the subgroup of ``quotient``.

    ``hbar`` is used for real-line subgroups (Heisenberg, Dynin) and the
    integer ``k`` for the AHW centre and H_G.  The K subgroup of SU(1,1)
    always uses e^{i phi} -> e^{-2 i phi}.
    """

    quotient: G.Quotient
    hbar: float = 1.0
    k: int = 1

    def __post_init__(self):
        if int(self.k) != self.k or self.k == 0:
            raise RepError("k must be a nonzero integer")

    def __call__(self, h: G.GroupElement) -> complex:
        q = self.quotient
        if h.group != q.group:
            raise RepError("element is not in the quotient's group")
        if not q.in_subgroup(h, tol=1e-9):
            raise RepError(f"{h} is not in subgroup {q.subgroup}")
        if isinstance(q, (G.CentreHeisenberg, G.LineHeisenberg)):
            return complex(np.exp(2j * np.pi * self.hbar * h.data[0]))
        if isinstance(q, (G.CentreAHW, G.LineAHW)):
            return complex(h.data[0] ** int(self.k))
        if isinstance(q, G.DyninM):
            return complex(np.exp(2j * np.pi * self.hbar * h.data[0]))
        if isinstance(q, G.DiskSU11):
            return complex(G.DiskSU11.phase(h) ** -2)
        raise RepError(f"no character for {q.name}")


def character(c: Character, h: G.GroupElement) -> complex:
    return c(h)


# ----------------------------------------------------------- representations

FLAVORS = {
    "schrodinger": G.LineHeisenberg,
    "schrodinger-84": G.LineHeisenberg,
    "fsb": G.CentreHeisenberg,
    "ahw-fsb": G.CentreAHW,
    "ahw-schrodinger": G.LineAHW,
    "dynin": G.DyninM,
    "su11": G.DiskSU11,
}


class Representation:
    """Induced representation of ``quotient`` with a given flavor."""

    def __init__(self, quotient: G.Quotient, flavor: str | None = None,
                 hbar: float = 1.0, k: int = 1):
        if flavor is None:
            flavor = next(f for f, cls in FLAVORS.items() if isinstance(quotient, cls))
        if flavor not in FLAVORS:
            raise RepError(f"unknown flavor {flavor!r}")
        if not isinstance(quotient, FLAVORS[flavor]):
            raise RepError(f"flavor {flavor} does not live on {quotient.name}")
        self.quotient = quotient
        self.group = quotient.group
        self.flavor = flavor
        self.hbar = float(hbar)
        self.k = int(k)
        self.chi = Character(quotient, self.hbar, self.k)

    @classmethod
    def named(cls, flavor, n=None, hbar=1.0, k=1):
        q = FLAVORS[flavor]
        if q in (G.CentreAHW, G.LineAHW):
            return cls(q(G.AHW(n or 4)), flavor, hbar, k)
        return cls(q(), flavor, hbar, k)

    def __repr__(self):
        return f"Representation({self.flavor}, {self.quotient.name}, hbar={self.hbar}, k={self.k})"

    # generic pointwise formula

    def generic(self, g: G.GroupElement, f):
        """pi(g) f as a callable on points, from the quotient maps alone."""
        q = self.quotient

        def out(x):
            return self.chi(q.cocycle(x, g)) * f(q.act(x, g))

        return out

    def generic_value(self, g, f, x):
        return self.generic(g, f)(x)

    # closed forms

    def apply(self, g: G.GroupElement, f, interpolate=False):
        """pi(g) f on a sampled field using the flavor's closed form."""
        if g.group != self.group:
            raise RepError("element does not belong to the represented group")
        fl = self.flavor
        if fl in ("schrodinger", "schrodinger-84"):
            if not isinstance(f, LineField):
                raise RepError(f"{fl} acts on LineField")
            return self._line(g, f, interpolate)
        if fl == "fsb":
            if not isinstance(f, PlaneField):
                raise RepError("fsb acts on PlaneField")
            return self._plane(g, f, interpolate)
        if fl in ("ahw-fsb", "ahw-schrodinger"):
            if not isinstance(f, CyclicField):
                raise RepError(f"{fl} acts on CyclicField")
            M = self.matrix(g)
            if M.shape[0] != f.n:
                raise RepError(f"field has {f.n} samples, expected {M.shape[0]}")
            return CyclicField(M @ f.values)
        if fl == "dynin":
            if not isinstance(f, BoxField):
                raise RepError("dynin acts on BoxField")
            return self._dynin(g, f)
        if fl == "su11":
            if not isinstance(f, DiskField):
                raise RepError("su11 acts on DiskField")
            return self._disk(g, f, interpolate)
        raise RepError(fl)

    def __call__(self, g, f, **kw):
        return self.apply(g, f, **kw)

    def _line(self, g, f, interpolate):
        s, x, y = g.data
        t = f.grid.nodes
        h = self.hbar
        if self.flavor == "schrodinger":
            phase = np.exp(1j * np.pi * h * (2 * s + 2 * t * y + x * y))
            shifted = _shift(f.values, f.grid, x, interpolate)
        else:
            phase = np.exp(1j * np.pi * h * (2 * s + y * (2 * t - x)))
            shifted = _shift(f.values, f.grid, -x, interpolate)
        return LineField(f.grid, phase * shifted)

    def _plane(self, g, f, interpolate):
        s, x, y = g.data
        X, Y = f.grid.mesh()
        phase = np.exp(1j * np.pi * self.hbar * (2 * s + X * y - x * Y))
        v = _shift(f.values, f.grid.x, x, interpolate, axis=0)
        v = _shift(v, f.grid.y, y, interpolate, axis=1)
        return PlaneField(f.grid, phase * v, f.complex_coords)

    def _dynin(self, g, f):
        z, t, u, v, s, x, y = g.data
        gs, gx, gy = f.grid.axes
        S, X, Y = f.grid.mesh()
        h = self.hbar
        phase = np.exp(1j * np.pi * h * (2 * z + 2 * S * t + s * t + 0.5 * (X * y - x * Y) * t
                                         + (2 * X + x) * u + (2 * Y + y) * v))
        src = [(S + s + 0.5 * (X * y - x * Y) - gs.origin) / gs.step,
               (X + x - gx.origin) / gx.step, (Y + y - gy.origin) / gy.step]
        idx = []
        for a in src:
            k = np.round(a)
            if np.max(np.abs(a - k)) > 1e-9:
                raise FieldError("dynin shift is not compatible with the lattice box")
            idx.append(k.astype(int))
        inside = np.ones(S.shape, bool)
        for k, n in zip(idx, f.grid.shape):
            inside &= (k >= 0) & (k < n)
        out = np.zeros(S.shape, complex)
        out[inside] = f.values[tuple(k[inside] for k in idx)]
        return BoxField(f.grid, phase * out)

    def _disk(self, g, f, interpolate):
        al, be = g.data
        zq = f.quad.nodes

        def factor(z):
            return (be * np.conj(z) + np.conj(al)) / (np.conj(be) * z + al)

        if f.evaluator is not None:
            ev = f.evaluator

            def out(z):
                z = np.asarray(z, complex)
                return factor(z) * ev(G.DiskSU11.mobius(z, g))

            w = G.DiskSU11.mobius(zq, g)
            valid = f.valid & (np.abs(w) < f.quad.r_max)
            return DiskField(f.quad, out(zq), evaluator=out, valid=valid)
        if not interpolate:
            raise FieldError("su11 on a sampled disk field needs a closed form "
                             "or interpolate=True")
        ip = _disk_interpolator(f)
        w = G.DiskSU11.mobius(zq, g)
        valid = f.valid & (np.abs(w) < f.quad.r_max)
        return DiskField(f.quad, factor(zq) * ip(w), valid=valid)

    # exact matrices on Z_n

    def points(self):
        if not hasattr(self.quotient, "points"):
            raise RepError("matrix realization needs a finite quotient")
        return self.quotient.points()

    def matrix(self, g: G.GroupElement) -> np.ndarray:
        """Matrix of pi(g) in the delta basis; column j is pi(g) e_j."""
        pts = self.points()
        index = {p: i for i, p in enumerate(pts)}
        q = self.quotient
        M = np.zeros((len(pts), len(pts)), complex)
        for i, x in enumerate(pts):
            j = index[q.act(x, g)]
            M[i, j] = self.chi(q.cocycle(x, g))
        return M


def rep_apply(r: Representation, g, f, interpolate=False):
    return r.apply(g, f, interpolate=interpolate)


def rep_matrix(r: Representation, g) -> np.ndarray:
    if r.flavor not in ("ahw-fsb", "ahw-schrodinger"):
        raise RepError("rep_matrix is defined for the AHW flavors")
    return r.matrix(g)


# --------------------------------------------------------------------- shifts


def _shift(values, grid, x, interpolate, axis=0):
    """values(t + x) along ``axis``, zero outside the window."""
    if interpolate:
        n = values.shape[axis]
        xi = np.fft.fftfreq(n, d=grid.step)
        shape = [1] * values.ndim
        shape[axis] = n
        ph = np.exp(2j * np.pi * xi * x).reshape(shape)
        return np.fft.ifft(np.fft.fft(values, axis=axis) * ph, axis=axis)
    k = grid.index_shift(x)
    v = np.moveaxis(np.asarray(values), axis, 0)
    out = np.zeros_like(v)
    n = v.shape[0]
    if k >= 0:
        if k < n:
            out[: n - k] = v[k:]
    else:
        if -k < n:
            out[-k:] = v[: n + k]
    return np.moveaxis(out, 0, axis)


def _disk_interpolator(f: DiskField):
    q = f.quad
    r = np.concatenate([[0.0], q.radii])
    th = np.concatenate([q.angles, [2 * np.pi]])
    centre = np.mean(f.values[0])
    v = np.vstack([np.full((1, q.n_theta), centre), f.values])
    v = np.hstack([v, v[:, :1]])
    re = RegularGridInterpolator((r, th), v.real, bounds_error=False, fill_value=None)
    im = RegularGridInterpolator((r, th), v.imag, bounds_error=False, fill_value=None)

    def ev(z):
        pts = np.stack([np.minimum(np.abs(z), q.radii[-1]),
                        np.mod(np.angle(z), 2 * np.pi)], axis=-1)
        return re(pts) + 1j * im(pts)

    return ev


# --------------------------------------------------------------- lift / pull


def lift(f, c: Character):
    """F(g) = chi(r(g)) f(p(g)), an H-equivariant function on G.

    ``f`` is a callable on points of the quotient.
    """
    q = c.quotient

    def F(g):
        return c(q.r(g)) * f(q.p(g))

    return F


def pull(F, quotient: G.Quotient, points):
    """f(x) = F(s(x)) sampled at ``points``."""
    return np.array([F(quotient.s(x)) for x in points], dtype=complex)


def cyclic_function(values, quotient):
    """Turn sample values indexed like ``quotient.points()`` into a callable."""
    index = {p: i for i, p in enumerate(quotient.points())}
    vals = np.asarray(values)
    return lambda x: vals[index[x]]
