"""
Group laws, subgroups, sections and homogeneous actions.

Four groups are provided: the Heisenberg group H1, the abstract
Heisenberg-Weyl group over Z_n (``AHW``), the seven dimensional Dynin
group and SU(1,1).  Each quotient ``H\\G`` is described by a
:class:`Quotient` object carrying the maps

* ``p``: G -> X, the coset coordinate,
* ``s``: X -> G, a section with p(s(x)) = x,
* ``r``: G -> H, the subgroup part with g = r(g) s(p(g)),

from which the right action x.g = p(s(x) g) and the cocycle
h(x, g) = s(x) g s(x.g)^{-1} follow.

Subgroup elements are returned as elements of the parent group which
satisfy the membership equations of the subgroup.
"""

from dataclasses import dataclass
from typing import Any

import numpy as np


class GroupError(ValueError):
    """Raised on tag mismatch, malformed payloads or domain violations."""


@dataclass(frozen=True)
class GroupElement:
    """A payload tuple tagged with the group it belongs to."""

    group: "Group"
    data: tuple

    def __mul__(self, other):
        return multiply(self, other)

    def inv(self):
        return inverse(self)

    def __repr__(self):
        return f"{self.group.name}{self.data}"


class Group:
    """Base class; subclasses implement the law on payload tuples."""

    name = "group"
    fields: tuple = ()

    def __call__(self, *data):
        return GroupElement(self, self.normalize(tuple(data)))

    def normalize(self, data):
        if len(data) != len(self.fields):
            raise GroupError(
                f"{self.name} expects {len(self.fields)} components, got {len(data)}")
        return tuple(float(c) for c in data)

    def identity(self):
        return self(*self._identity())

    def _identity(self):
        return (0.0,) * len(self.fields)

    def _mul(self, a, b):
        raise NotImplementedError

    def _inv(self, a):
        return tuple(-c for c in a)

    def random(self, rng, scale=1.0):
        return self(*(scale * rng.uniform(-1, 1, len(self.fields))))

    def distance(self, a: GroupElement, b: GroupElement) -> float:
        """Component-wise sup distance between payloads."""
        return float(np.max(np.abs(np.subtract(a.data, b.data))))

    def to_dict(self, a: GroupElement):
        return {k: _jsonable(v) for k, v in zip(self.fields, a.data)}

    def __eq__(self, other):
        return type(self) is type(other) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def key(self):
        return (self.name,)


def _jsonable(v):
    if isinstance(v, complex):
        return [v.real, v.imag]
    if isinstance(v, float) and v.is_integer() and abs(v) < 2**53:
        return int(v)
    return v


class Heisenberg(Group):
    """H1 with (s,x,y)(s',x',y') = (s+s'+(xy'-x'y)/2, x+x', y+y')."""

    name = "heisenberg"
    fields = ("s", "x", "y")

    def _mul(self, a, b):
        s, x, y = a
        s2, x2, y2 = b
        return (s + s2 + 0.5 * (x * y2 - x2 * y), x + x2, y + y2)


class AHW(Group):
    """Abstract Heisenberg-Weyl group T x Z_n x Z_n.

    (z1,g1,c1)(z2,g2,c2) = (z1 z2 c2(g1), g1+g2, c1+c2) where the
    character c acts by c(g) = exp(2 pi i c g / n).
    """

    name = "ahw"
    fields = ("z", "g", "chi")

    def __init__(self, n: int):
        n = int(n)
        if n < 2:
            raise GroupError("AHW needs n >= 2")
        self.n = n
        self._roots = np.exp(2j * np.pi * np.arange(n) / n)

    def key(self):
        return (self.name, self.n)

    def root(self, m):
        """exp(2 pi i m / n) from a table, so lattice values are exact."""
        return complex(self._roots[int(m) % self.n])

    def char(self, chi, g):
        return self.root(int(chi) * int(g))

    def normalize(self, data):
        if len(data) != 3:
            raise GroupError(f"ahw expects 3 components, got {len(data)}")
        z, g, chi = data
        z = complex(z)
        if abs(abs(z) - 1.0) > 1e-12:
            raise GroupError(f"ahw z must be unimodular, got |z|={abs(z)}")
        for label, v in (("g", g), ("chi", chi)):
            if float(v) != int(round(float(np.real(v)))):
                raise GroupError(f"ahw {label} must be an integer residue")
        return (z, int(round(float(np.real(g)))) % self.n,
                int(round(float(np.real(chi)))) % self.n)

    def _identity(self):
        return (1.0 + 0j, 0, 0)

    def _mul(self, a, b):
        z1, g1, c1 = a
        z2, g2, c2 = b
        return (z1 * z2 * self.char(c2, g1), (g1 + g2) % self.n, (c1 + c2) % self.n)

    def _inv(self, a):
        z, g, c = a
        return (z.conjugate() * self.char(c, g), (-g) % self.n, (-c) % self.n)

    def random(self, rng, lattice=False, scale=None):
        if lattice:
            z = self.root(rng.integers(self.n))
        else:
            z = np.exp(2j * np.pi * rng.uniform())
        return self(z, rng.integers(self.n), rng.integers(self.n))

    def distance(self, a, b):
        z1, g1, c1 = a.data
        z2, g2, c2 = b.data
        if g1 != g2 or c1 != c2:
            return np.inf
        return abs(z1 - z2)

    def to_dict(self, a):
        z, g, c = a.data
        return {"z": [z.real, z.imag], "g": g, "chi": c}


class Dynin(Group):
    """Step three nilpotent group on R^7 with coordinates (z,t,u,v,s,x,y).

    The cubic correction to the central coordinate carries the
    coefficient 1/8, which is what makes the law associative.
    """

    name = "dynin"
    fields = ("z", "t", "u", "v", "s", "x", "y")
    cubic = 1.0 / 8.0

    def _mul(self, a, b):
        z, t, u, v, s, x, y = a
        z2, t2, u2, v2, s2, x2, y2 = b
        zz = (z + z2 + 0.5 * (s * t2 - s2 * t) + 0.5 * (x * u2 - x2 * u)
              + 0.5 * (y * v2 - y2 * v)
              + self.cubic * (y * x2 * t - x * y2 * t + y2 * x * t2 - x2 * y * t2))
        return (zz, t + t2,
                u + u2 + 0.25 * (y * t2 - y2 * t),
                v + v2 - 0.25 * (x * t2 - x2 * t),
                s + s2 + 0.5 * (x * y2 - x2 * y), x + x2, y + y2)


class SU11(Group):
    """SU(1,1) as pairs (alpha, beta) for [[alpha, beta], [conj beta, conj alpha]]."""

    name = "su11"
    fields = ("alpha", "beta")

    def normalize(self, data):
        if len(data) != 2:
            raise GroupError(f"su11 expects 2 components, got {len(data)}")
        a, b = complex(data[0]), complex(data[1])
        det = abs(a) ** 2 - abs(b) ** 2
        if not det > 0:
            raise GroupError("su11 needs |alpha|^2 - |beta|^2 > 0")
        c = 1.0 / np.sqrt(det)
        return (a * c, b * c)

    def _identity(self):
        return (1.0 + 0j, 0j)

    def _mul(self, a, b):
        a1, b1 = a
        a2, b2 = b
        return (a1 * a2 + b1 * b2.conjugate(), a1 * b2 + b1 * a2.conjugate())

    def _inv(self, a):
        al, be = a
        return (al.conjugate(), -be)

    def random(self, rng, radius=0.9):
        z = radius * np.sqrt(rng.uniform()) * np.exp(2j * np.pi * rng.uniform())
        phi = 2 * np.pi * rng.uniform()
        c = 1.0 / np.sqrt(1 - abs(z) ** 2)
        e = np.exp(1j * phi)
        return self(e * c, e * c * z)

    def distance(self, a, b):
        return float(max(abs(a.data[0] - b.data[0]), abs(a.data[1] - b.data[1])))

    def matrix(self, a):
        al, be = a.data
        return np.array([[al, be], [be.conjugate(), al.conjugate()]])


def multiply(a: GroupElement, b: GroupElement) -> GroupElement:
    """Group product a*b under the law of their common group."""
    if a.group != b.group:
        raise GroupError(f"cannot multiply {a.group.name} by {b.group.name}")
    return a.group(*a.group._mul(a.data, b.data))


def inverse(a: GroupElement) -> GroupElement:
    return a.group(*a.group._inv(a.data))


# ---------------------------------------------------------------- quotients


class Quotient:
    """Right coset space H\\G with explicit p, s and r maps.

    Points are plain numbers or tuples.  Subclasses provide ``p``, ``s``
    and ``r``; the action, cocycle, semigroup product and division are
    derived from them.
    """

    name = "quotient"
    subgroup = "H"
    central = False

    def __init__(self, group: Group):
        self.group = group

    def p(self, g: GroupElement):
        raise NotImplementedError

    def s(self, x) -> GroupElement:
        raise NotImplementedError

    def r(self, g: GroupElement) -> GroupElement:
        raise NotImplementedError

    def origin(self):
        return self.p(self.group.identity())

    def act(self, x, g: GroupElement):
        """Right action x.g = p(s(x) g)."""
        return self.p(self.s(x) * g)

    def cocycle(self, x, g: GroupElement) -> GroupElement:
        """h(x, g) with s(x) g = h(x, g) s(x.g)."""
        return self.r(self.s(x) * g)

    def product(self, x1, x2):
        """Semigroup product: s(x1) s(x2) = h s(x); returns (x, h)."""
        g = self.s(x1) * self.s(x2)
        return self.p(g), self.r(g)

    def div(self, x, x2):
        """The unique x1 = x x2^{-1} with product(x1, x2)[0] == x."""
        return self.p(self.s(x) * inverse(self.s(x2)))

    def modular_ratio(self, h: GroupElement) -> float:
        """Delta_H(h) / Delta_G(h); identically 1 for every quotient here."""
        return 1.0

    def random_point(self, rng):
        return self.p(self.group.random(rng))

    def point_distance(self, x1, x2) -> float:
        return float(np.max(np.abs(np.subtract(x1, x2))))

    def in_subgroup(self, h: GroupElement, tol=1e-12) -> bool:
        return self.point_distance(self.p(h), self.origin()) <= tol


class CentreHeisenberg(Quotient):
    """Z\\H1 identified with the plane (x, y)."""

    name = "heisenberg/centre"
    subgroup = "Z"
    central = True

    def __init__(self, group=None):
        super().__init__(group or Heisenberg())

    def p(self, g):
        return (g.data[1], g.data[2])

    def s(self, x):
        return self.group(0.0, x[0], x[1])

    def r(self, g):
        return self.group(g.data[0], 0.0, 0.0)


class LineHeisenberg(Quotient):
    """H_x\\H1 with H_x = {(s,0,y)}, identified with the real line."""

    name = "heisenberg/line"
    subgroup = "H_x"

    def __init__(self, group=None):
        super().__init__(group or Heisenberg())

    def p(self, g):
        return g.data[1]

    def s(self, x):
        return self.group(0.0, x, 0.0)

    def r(self, g):
        s, x, y = g.data
        return self.group(s + 0.5 * x * y, 0.0, y)

    def point_distance(self, x1, x2):
        return abs(x1 - x2)


class CentreAHW(Quotient):
    """The centre T of AHW(n); X = Z_n x Z_n."""

    name = "ahw/centre"
    subgroup = "T"
    central = True

    def __init__(self, group):
        if isinstance(group, int):
            group = AHW(group)
        super().__init__(group)
        self.n = group.n

    def p(self, g):
        return (g.data[1], g.data[2])

    def s(self, x):
        return self.group(1.0, x[0], x[1])

    def r(self, g):
        return self.group(g.data[0], 0, 0)

    def points(self):
        """All n^2 points, g fast and chi slow."""
        return [(g, c) for c in range(self.n) for g in range(self.n)]

    def random_point(self, rng):
        return (int(rng.integers(self.n)), int(rng.integers(self.n)))

    def point_distance(self, x1, x2):
        return 0.0 if tuple(x1) == tuple(x2) else np.inf


class LineAHW(Quotient):
    """H_G\\AHW with H_G = {(z,0,chi)}; X = Z_n."""

    name = "ahw/line"
    subgroup = "H_G"

    def __init__(self, group):
        if isinstance(group, int):
            group = AHW(group)
        super().__init__(group)
        self.n = group.n

    def p(self, g):
        return g.data[1]

    def s(self, x):
        return self.group(1.0, x, 0)

    def r(self, g):
        return self.group(g.data[0], 0, g.data[2])

    def points(self):
        return list(range(self.n))

    def random_point(self, rng):
        return int(rng.integers(self.n))

    def point_distance(self, x1, x2):
        return 0.0 if x1 == x2 else np.inf


class DyninM(Quotient):
    """M\\D with M = {(z,t,u,v,0,0,0)}, identified with H1 as (s,x,y)."""

    name = "dynin/m"
    subgroup = "M"

    def __init__(self, group=None):
        super().__init__(group or Dynin())

    def p(self, g):
        return tuple(g.data[4:])

    def s(self, x):
        return self.group(0.0, 0.0, 0.0, 0.0, *x)

    def r(self, g):
        z, t, u, v, s, x, y = g.data
        return self.group(z + 0.5 * s * t + 0.5 * x * u + 0.5 * y * v, t,
                          u + 0.25 * y * t, v - 0.25 * x * t, 0.0, 0.0, 0.0)


class DiskSU11(Quotient):
    """K\\SU(1,1) with K the diagonal subgroup; X is the unit disk.

    p(g) = beta/alpha, s(z) = (1, z)/sqrt(1-|z|^2) and
    r(g) = diag(alpha/|alpha|, conj(alpha)/|alpha|).
    """

    name = "su11/disk"
    subgroup = "K"

    def __init__(self, group=None):
        super().__init__(group or SU11())

    def p(self, g):
        al, be = g.data
        return be / al

    def s(self, x):
        x = complex(x)
        if not abs(x) < 1:
            raise GroupError(f"disk point must satisfy |z| < 1, got {abs(x)}")
        c = 1.0 / np.sqrt(1.0 - abs(x) ** 2)
        return self.group(c, c * x)

    def r(self, g):
        al = g.data[0]
        return self.group(al / abs(al), 0j)

    def random_point(self, rng, radius=0.9):
        return complex(radius * np.sqrt(rng.uniform()) * np.exp(2j * np.pi * rng.uniform()))

    def point_distance(self, x1, x2):
        return abs(complex(x1) - complex(x2))

    @staticmethod
    def phase(h: GroupElement) -> complex:
        """e^{i phi} for h = diag(e^{i phi}, e^{-i phi}) in K."""
        return complex(h.data[0])

    @staticmethod
    def mobius(z, g: GroupElement):
        """Closed form of z.g; accepts arrays."""
        al, be = g.data
        return (np.conj(al) * z + be) / (np.conj(be) * z + al)


GROUPS = {"heisenberg": Heisenberg, "ahw": AHW, "dynin": Dynin, "su11": SU11}

QUOTIENTS = {
    ("heisenberg", "centre"): CentreHeisenberg,
    ("heisenberg", "line"): LineHeisenberg,
    ("ahw", "centre"): CentreAHW,
    ("ahw", "line"): LineAHW,
    ("dynin", "m"): DyninM,
    ("su11", "k"): DiskSU11,
}

SUBGROUP_ALIASES = {"z": "centre", "center": "centre", "t": "centre", "h_x": "line",
                    "hx": "line", "h_g": "line", "hg": "line", "k": "k", "m": "m"}


def make_group(name: str, n: Any = None) -> Group:
    name = name.lower()
    if name not in GROUPS:
        raise GroupError(f"unknown group {name!r}")
    if name == "ahw":
        return AHW(8 if n is None else n)
    return GROUPS[name]()


def make_quotient(group: str, subgroup: str | None = None, n=None) -> Quotient:
    """Quotient by name, e.g. ``make_quotient("ahw", "centre", n=4)``."""
    group = group.lower()
    default = {"heisenberg": "centre", "ahw": "centre", "dynin": "m", "su11": "k"}
    sub = (subgroup or default.get(group, "")).lower()
    sub = SUBGROUP_ALIASES.get(sub, sub)
    key = (group, sub)
    if key not in QUOTIENTS:
        raise GroupError(f"no quotient {group}/{subgroup}")
    return QUOTIENTS[key](make_group(group, n))


def all_quotients(n=6):
    return [make_quotient(g, s, n=n) for g, s in QUOTIENTS]
