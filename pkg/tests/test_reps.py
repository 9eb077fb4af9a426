import numpy as np
import pytest

from opercalc import fields as F
from opercalc import groups as G
from opercalc.reps import (Character, Representation, RepError, character, lift, pull,
                           rep_apply, rep_matrix, cyclic_function)

from conftest import crandn

LINE = F.LineGrid(64, 0.125, -4.0)
PLANE = F.PlaneGrid(F.LineGrid(32, 0.25, -4.0), F.LineGrid(32, 0.25, -4.0))


def gauss_line(c=0.3):
    return F.LineField.from_function(LINE, lambda t: np.exp(-np.pi * (t - c) ** 2) * (1 + 0.2j * t))


def gauss_plane():
    return F.PlaneField.from_function(PLANE, lambda x, y: np.exp(-4 * (x ** 2 + (y - 0.5) ** 2)) * (1 + 0.1j * x))


def test_characters():
    cz = Character(G.CentreHeisenberg())
    H = G.Heisenberg()
    assert character(cz, H.identity()) == 1
    assert abs(cz(H(0.25, 0, 0)) - 1j) < 1e-15
    ck = Character(G.DiskSU11())
    assert abs(ck(G.SU11()(1j, 0)) + 1) < 1e-15
    with pytest.raises(RepError):
        cz(H(0, 1, 0))
    with pytest.raises(RepError):
        Character(G.CentreAHW(3), k=0)


def test_character_multiplicative(rng):
    for q in G.all_quotients(5):
        c = Character(q, hbar=0.7, k=2)
        for _ in range(20):
            x = q.random_point(rng)
            h1 = q.cocycle(x, q.group.random(rng))
            h2 = q.cocycle(q.random_point(rng), q.group.random(rng))
            assert abs(c(h1 * h2) - c(h1) * c(h2)) < 1e-12
            assert abs(abs(c(h1)) - 1) < 1e-12


def test_schrodinger_central():
    r = Representation.named("schrodinger", hbar=0.5)
    f = gauss_line()
    out = r.apply(r.group(0.3, 0, 0), f)
    assert np.max(np.abs(out.values - np.exp(2j * np.pi * 0.5 * 0.3) * f.values)) == 0


@pytest.mark.parametrize("flavor", ["schrodinger", "schrodinger-84", "fsb"])
def test_identity_acts_trivially(flavor):
    r = Representation.named(flavor)
    f = gauss_plane() if flavor == "fsb" else gauss_line()
    assert np.array_equal(r.apply(r.group.identity(), f).values, f.values)


def test_ahw_schrodinger_n2_matrix():
    r = Representation.named("ahw-schrodinger", n=2)
    M = r.matrix(r.group(1, 1, 1))
    assert np.allclose(M, [[0, 1], [-1, 0]], atol=1e-15)


def test_rep_matrix_oracles():
    r = Representation.named("ahw-schrodinger", n=3)
    A = r.group
    assert np.array_equal(rep_matrix(r, A.identity()), np.eye(3))
    assert np.array_equal(rep_matrix(r, A(1, 1, 0)), np.roll(np.eye(3), 1, axis=1))
    w = np.exp(2j * np.pi / 3)
    assert np.allclose(rep_matrix(r, A(1, 0, 1)), np.diag([1, w, w * w]), atol=1e-15)
    with pytest.raises(RepError):
        rep_matrix(Representation.named("schrodinger"), G.Heisenberg().identity())


@pytest.mark.parametrize("flavor", ["ahw-schrodinger", "ahw-fsb"])
def test_rep_matrix_homomorphism(flavor, rng):
    for n in (2, 3, 5, 8):
        r = Representation.named(flavor, n=n, k=2)
        for _ in range(10):
            a, b = r.group.random(rng), r.group.random(rng)
            M = r.matrix(a) @ r.matrix(b)
            assert np.max(np.abs(M - r.matrix(a * b))) < 1e-12
            U = r.matrix(a)
            assert np.max(np.abs(U.conj().T @ U - np.eye(U.shape[0]))) < 1e-12


def test_line_homomorphism_and_unitarity(rng):
    for flavor in ("schrodinger",):
        r = Representation.named(flavor, hbar=0.75)
        f, g = gauss_line(), gauss_line(-0.5)
        for _ in range(10):
            a = r.group(rng.uniform(-1, 1), 0.125 * rng.integers(-4, 5), rng.uniform(-1, 1))
            b = r.group(rng.uniform(-1, 1), 0.125 * rng.integers(-4, 5), rng.uniform(-1, 1))
            lhs = r.apply(a, r.apply(b, f))
            assert np.max(np.abs(lhs.values - r.apply(a * b, f).values)) < 1e-10
            ip = F.inner_product(r.apply(a, f), r.apply(a, g))
            assert abs(ip - F.inner_product(f, g)) < 1e-10


def test_plane_homomorphism_and_unitarity(rng):
    r = Representation.named("fsb", hbar=1.0)
    f = gauss_plane()
    for _ in range(10):
        a = r.group(rng.uniform(-1, 1), 0.25 * rng.integers(-3, 4), 0.25 * rng.integers(-3, 4))
        b = r.group(rng.uniform(-1, 1), 0.25 * rng.integers(-3, 4), 0.25 * rng.integers(-3, 4))
        lhs = r.apply(a, r.apply(b, f))
        assert np.max(np.abs(lhs.values - r.apply(a * b, f).values)) < 1e-10
        assert abs(F.norm(r.apply(a, f)) - F.norm(f)) < 1e-10


def test_off_lattice_shift_rejected():
    r = Representation.named("schrodinger")
    with pytest.raises(F.FieldError):
        r.apply(r.group(0, 0.01, 0), gauss_line())
    out = rep_apply(r, r.group(0, 0.01, 0), gauss_line(), interpolate=True)
    assert out.values.shape == (64,)


def test_schrodinger_84_flavor_relation():
    # rho_{-1}(-s,-x,-y) equals the schrodinger-84 flavor at hbar = 1; rho_1 gives the conjugate phase
    f = gauss_line()
    old = Representation.named("schrodinger-84", hbar=1.0)
    neg = Representation.named("schrodinger", hbar=-1.0)
    pos = Representation.named("schrodinger", hbar=1.0)
    H = G.Heisenberg()
    g = H(0.3, 0.5, -0.7)
    a = old.apply(g, f).values
    assert np.max(np.abs(neg.apply(g.inv(), f).values - a)) < 1e-12
    assert np.max(np.abs(pos.apply(g.inv(), f).values - a)) > 1e-2


def test_generic_matches_closed_form_line():
    r = Representation.named("schrodinger", hbar=0.6)
    f = gauss_line()
    g = r.group(0.2, 0.375, -0.4)
    vals = gauss_line().values
    fn = lambda x: np.interp(x, LINE.nodes, vals.real) + 1j * np.interp(x, LINE.nodes, vals.imag)  # noqa: E731
    gen = np.array([r.generic_value(g, fn, t) for t in LINE.nodes[:40]])
    assert np.max(np.abs(gen - r.apply(g, f).values[:40])) < 1e-12


def test_dynin_m_multiplication():
    r = Representation.named("dynin", hbar=1.0)
    box = F.BoxGrid((F.LineGrid(8, 0.5, -2), F.LineGrid(8, 0.5, -2), F.LineGrid(8, 0.5, -2)))
    f = F.BoxField.from_function(box, lambda s, x, y: np.exp(-(s * s + x * x + y * y)))
    S, X, Y = box.mesh()
    z, t, u, v = 0.1, 0.7, -0.3, 0.25
    out = r.apply(r.group(z, t, u, v, 0, 0, 0), f)
    ph = np.exp(2j * np.pi * (z + t * S + u * X + v * Y))
    assert np.max(np.abs(out.values - ph * f.values)) < 1e-12


def test_su11_homomorphism_on_seed(rng):
    q = F.DiskQuadrature(20, 24, 0.95)
    r = Representation.named("su11")
    f = F.DiskField.from_seed(q, F.Seed(((1, 3, 0, 1), (0.5, 0, 2, 2))))
    z = 0.7 * q.nodes[::3, ::5].reshape(-1)
    for _ in range(10):
        a, b = r.group.random(rng, 0.7), r.group.random(rng, 0.7)
        assert np.max(np.abs(r.apply(a, r.apply(b, f))(z) - r.apply(a * b, f)(z))) < 1e-10


def test_su11_unitarity_on_disk():
    q = F.DiskQuadrature(200, 256, 0.95, power=-2)
    r = Representation.named("su11")
    g = G.DiskSU11().s(0.1)
    worst = 0.0
    # z^k (1-|z|^2)^q of total degree <= 8 with q >= 2
    for q_ in (2, 3, 4):
        for k in range(0, 9 - 2 * q_):
            f = F.DiskField.from_seed(q, F.Seed(((1.0, k, 0, q_),)))
            worst = max(worst, abs(F.norm(r.apply(g, f)) / F.norm(f) - 1))
    assert worst <= 2e-3


def test_su11_needs_closed_form():
    q = F.DiskQuadrature(8, 8, 0.9)
    r = Representation.named("su11")
    f = F.DiskField(q, np.ones((8, 8)))
    with pytest.raises(F.FieldError):
        r.apply(G.DiskSU11().s(0.1), f)
    out = r.apply(G.DiskSU11().s(0.1), f, interpolate=True)
    assert out.values.shape == (8, 8)


def test_central_elements_are_scalar():
    r = Representation.named("ahw-fsb", n=4, k=3)
    z = np.exp(2j * np.pi / 4)
    assert np.allclose(r.matrix(r.group(z, 0, 0)), z ** 3 * np.eye(16))


def test_lift_and_pull(rng):
    q = G.CentreAHW(4)
    c = Character(q, k=1)
    vals = crandn(rng, 16)
    f = cyclic_function(vals, q)
    Fg = lift(f, c)
    assert np.array_equal(pull(Fg, q, q.points()), vals)
    h = q.group(1j, 0, 0)
    x = (2, 3)
    assert abs(Fg(h * q.s(x)) - 1j * f(x)) < 1e-15
    triv = lift(lambda x: 1.0, c)
    assert np.allclose(pull(triv, q, q.points()), 1)


def test_flavor_checks():
    with pytest.raises(RepError):
        Representation(G.CentreHeisenberg(), "schrodinger")
    r = Representation.named("fsb")
    with pytest.raises(RepError):
        r.apply(r.group.identity(), gauss_line())
    with pytest.raises(RepError):
        r.apply(G.Dynin().identity(), gauss_plane())
