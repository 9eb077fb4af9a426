import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from opercalc import covtrans as C
from opercalc import fields as F
from opercalc import groups as G
from opercalc import relconv as RC
from opercalc.reps import Representation

from conftest import crandn


def zn(n, k=1):
    return Representation.named("ahw-schrodinger", n=n, k=k)


def unit(rng, n):
    v = crandn(rng, n)
    return F.CyclicField(v / np.linalg.norm(v))


# ------------------------------------------------------------- covariant


def test_covariant_transform_identity(rng):
    r = zn(5)
    v, f = F.CyclicField(crandn(rng, 5)), unit(rng, 5)
    e = r.group.identity()
    assert C.covariant_transform(f, r, v, [e])[0] == F.inner_product(v, f)
    assert abs(C.covariant_transform(f, r, f, [e])[0] - 1) < 1e-15


def test_covariant_transform_matrix_oracle(rng):
    r = zn(4)
    v, f = F.CyclicField(crandn(rng, 4)), F.CyclicField(crandn(rng, 4))
    q = G.CentreAHW(r.group)
    els = [q.s(x) for x in q.points()]
    got = C.covariant_transform(C.Fiducial.pairing(f), r, v, els)
    want = [np.vdot(f.values, r.matrix(g) @ v.values) for g in els]
    assert np.max(np.abs(np.subtract(got, want))) < 1e-13


def test_fiducials_on_grids():
    g = F.LineGrid(16, 0.25, -2.0)
    v = F.LineField.from_function(g, lambda t: 1 + t ** 2)
    assert abs(C.Fiducial("delta")(v) - 1.0) < 1e-12
    assert abs(C.Fiducial("one")(v) - g.step * np.sum(1 + g.nodes ** 2)) < 1e-12
    with pytest.raises(C.TransformError):
        C.Fiducial("delta")(F.LineField(F.LineGrid(4, 0.3, 0.1), np.ones(4)))
    with pytest.raises(C.TransformError):
        C.Fiducial("pairing")


def test_intertwining_right_regular(rng):
    r = zn(6)
    f, v = F.CyclicField(crandn(rng, 6)), F.CyclicField(crandn(rng, 6))
    Fi = C.Fiducial.pairing(f)
    for _ in range(20):
        g, g2 = r.group.random(rng), r.group.random(rng)
        a = C.covariant_transform(Fi, r, r.apply(g, v), [g2])[0]
        b = C.covariant_transform(Fi, r, v, [g2 * g])[0]
        assert abs(a - b) <= 1e-12


def test_induced_transform_zero_and_eigen_check(rng):
    r = zn(4)
    f = C.delta_vector(4)
    k = C.induced_wavelet_transform(f, r, F.CyclicField(np.zeros(4)), G.CentreAHW(r.group))
    assert np.all(k.values == 0) and np.allclose(k.weights, 0.25)
    C.check_eigenvector(f, r, r.quotient)            # H_G multiplies delta_0 by chi(0)
    bad = C.constant_vector(4)
    with pytest.raises(C.TransformError, match=r"pi\(ahw\("):
        C.induced_wavelet_transform(bad, r, bad)


def test_induced_transform_delta_matrix_oracle(rng):
    n = 5
    r = zn(n)
    q = G.CentreAHW(r.group)
    v = F.CyclicField(crandn(rng, n))
    k = C.induced_wavelet_transform(C.delta_vector(n), r, v, q)
    want = [(r.matrix(q.s(x)) @ v.values)[0] for x in q.points()]
    assert np.max(np.abs(k.values - want)) < 1e-15
    # W v(g, chi) = w^{0} v(g): the modulated shift evaluated at 0
    assert np.allclose(k.values[:n], v.values)


def test_induced_transform_heisenberg_any_wavelet():
    r = Representation.named("fsb")
    g = F.PlaneGrid.window(16, -2, 2)
    f = F.PlaneField(g, crandn(np.random.default_rng(0), 16, 16))
    C.check_eigenvector(f, r, G.CentreHeisenberg())


# -------------------------------------------------------- finite frames


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 12), st.integers(0, 2 ** 31))
def test_tight_frame(n, seed):
    rng = np.random.default_rng(seed)
    f = unit(rng, n)
    assert C.tight_frame_residual(zn(n), f) <= 1e-10


def test_frame_reproducing_zn(rng):
    n = 6
    r = zn(n)
    f = unit(rng, n)
    fr = C.FiniteFrame(r, f)
    K = C.ReproducingKernel.from_frame(fr)
    for _ in range(5):
        img = fr.analysis(crandn(rng, n))
        out = C.reproducing_apply(img, K, fr.weights)
        assert np.max(np.abs(out - img)) <= 1e-10
    assert np.all(C.reproducing_apply(np.zeros(n * n), K, fr.weights) == 0)


# ------------------------------------------------------- Fourier-Wigner


def test_fourier_wigner_gaussian():
    g = F.LineGrid.window(256, -8, 8)
    f = F.LineField.from_function(g, lambda t: 2 ** 0.25 * np.exp(-np.pi * t ** 2))
    W = C.fourier_wigner(f, f)
    X, Y = W.grid.mesh()
    i, j = np.unravel_index(np.argmax(np.abs(W.values)), W.grid.shape)
    assert X[i, j] == 0 and Y[i, j] == 0
    assert abs(W.values[i, j] - 1) < 1e-12
    # closed-form ambiguity function of the normalized Gaussian
    ref = np.exp(-np.pi * (X ** 2 + Y ** 2) / 2)
    assert np.max(np.abs(np.abs(W.values) - ref)) < 1e-10


def test_fourier_wigner_isometry(rng):
    g = F.LineGrid.window(128, -8, 8)
    t = g.nodes
    v1 = F.LineField(g, np.exp(-np.pi * (t - 0.5) ** 2) * (1 + 1j * t))
    v2 = F.LineField(g, np.exp(-np.pi * (t + 0.3) ** 2 / 2))
    f = F.LineField(g, 2 ** 0.25 * np.exp(-np.pi * t ** 2))
    lhs = F.inner_product(v1, v2)
    rhs = F.inner_product(C.fourier_wigner(v1, f), C.fourier_wigner(v2, f))
    assert abs(lhs - rhs) < 1e-10
    with pytest.raises(F.FieldError):
        C.fourier_wigner(v1, F.LineField(F.LineGrid.window(64, -8, 8), np.ones(64)))


# ------------------------------------------------------------------ FSB


def test_fsb_kernel_values(rng):
    assert C.fsb_kernel(0, 0) == 1
    z = crandn(rng, 10)
    assert np.allclose(np.abs(C.fsb_kernel(z, z, 0.7)), 1, atol=1e-14)


def test_fsb_constant_and_idempotency():
    g = F.PlaneGrid.window(64, -4, 4)
    P = C.FSB(g)
    assert abs(P.c - 1.0) < 1e-6
    z = g.complex_nodes()
    v = F.PlaneField(g, np.exp(-np.abs(z - 0.5) ** 2) * (1 + 0.3j * z.imag), True)
    Pv = P(v)
    assert F.norm(P(Pv) - Pv) / F.norm(Pv) < 1e-6


def test_fsb_image_pde():
    g = F.PlaneGrid.window(96, -3, 3)
    P = C.FSB(g)
    ref = P(C.fsb_gaussian(g))
    c = C.fit_pde_constant(ref)
    assert abs(c - np.pi / 2) < 1e-3
    assert C.image_pde_residual(ref, "fsb", c) < 1e-4
    z = g.complex_nodes()
    held = P(F.PlaneField(g, np.exp(-np.abs(z + 0.3j) ** 2), True))
    assert abs(C.fit_pde_constant(held) - c) < 1e-3
    res = C.image_pde_residual(held, "fsb", c)
    assert res < 1e-4
    noise = F.PlaneField(g, crandn(np.random.default_rng(1), 96, 96), True)
    assert C.image_pde_residual(noise, "fsb", c) > 10 * res
    assert C.image_pde_residual(F.PlaneField(g, np.zeros(g.shape), True)) == 0.0


def test_fsb_reproducing_apply_zero():
    g = F.PlaneGrid.window(16, -2, 2)
    K = C.ReproducingKernel.fsb(g)
    z = F.PlaneField(g, np.zeros(g.shape))
    assert np.all(C.reproducing_apply(z, K).values == 0)


def test_fsb_toeplitz_berezin_two_paths():
    # A = T_1 = P: <P phi_z, phi_z> against the direct quadrature of |phi_z|^2
    g = F.PlaneGrid.window(64, -4, 4)
    r = Representation.named("fsb")
    P = C.FSB(g)
    f = C.fsb_gaussian(g)
    T1 = RC.toeplitz_operator(lambda z: np.ones_like(z), "fsb", grid=g, projection=P)
    q = G.CentreHeisenberg()
    for x in [(0.0, 0.0), (0.5, -0.25)]:
        a = C.berezin_covariant_symbol(T1, f, f, r, x, x, q)
        phi = r.apply(q.s(x), f)
        assert abs(a - F.inner_product(phi, phi)) < 1e-6


# -------------------------------------------------------------- Bergman


@pytest.fixture(scope="module")
def bergman():
    return C.BergmanProjection(200, 256), F.DiskQuadrature(200, 256, 0.95)


def test_bergman_constant():
    assert abs(C.bergman_constant() - 1 / np.pi) < 1e-12


def test_bergman_monomials(bergman):
    B, quad = bergman
    for k in range(9):
        v = F.DiskField.from_seed(quad, F.Seed.monomial(k, q=1))
        out = B(v)
        assert F.norm(out - v) / F.norm(v) <= 1e-3
    zero = B(F.DiskField.from_seed(quad, F.Seed(((0.0, 0, 0, 0),))))
    assert np.max(np.abs(zero.values)) == 0


def test_bergman_idempotent_and_pde(bergman):
    B, quad = bergman
    v = F.DiskField.from_seed(quad, F.Seed(((1, 3, 2, 1), (0.5j, 0, 4, 0), (1, 6, 0, 0))))
    P = B(v)
    assert F.norm(B(P) - P) / F.norm(P) <= 1e-3
    c = C.fit_pde_constant(P, "bergman")
    assert abs(c + 1) < 1e-4
    assert C.image_pde_residual(P, "bergman") < 1e-4
    ctrl = F.DiskField.from_seed(quad, F.Seed(((1, 0, 2, 1),)))
    assert C.image_pde_residual(ctrl, "bergman") > 10 * C.image_pde_residual(P, "bergman")


def test_bergman_outside_disk(bergman):
    B, quad = bergman
    P = B(F.DiskField.from_seed(quad, F.Seed.monomial(1, q=1)))
    with pytest.raises(F.FieldError):
        P(1.2)


def test_toeplitz_symbol_bergman():
    quad = F.DiskQuadrature(200, 256, 0.95)
    one = F.DiskField(quad, np.ones((200, 256)))
    assert abs(C.toeplitz_covariant_symbol_bergman(one, 0, 0) - 0.95 ** 2) < 1e-12
    assert C.toeplitz_covariant_symbol_bergman(one.like(np.zeros((200, 256))), 0.1, 0.2) == 0
    a = F.DiskField(quad, np.cos(3 * quad.nodes.real) + np.abs(quad.nodes))
    w, z = 0.2 - 0.4j, 0.5j
    s1 = C.toeplitz_covariant_symbol_bergman(a, w, z)
    s2 = C.toeplitz_covariant_symbol_bergman(a, z, w)
    assert abs(s1 - np.conj(s2)) <= 1e-10


# -------------------------------------------------------------- Berezin


def test_berezin_identity_origin(rng):
    r = zn(4)
    f = unit(rng, 4)
    q = G.CentreAHW(r.group)
    assert abs(C.berezin_covariant_symbol(np.eye(4), f, f, r, (0, 0), (0, 0), q) - 1) < 1e-15


def test_berezin_matrix_oracle(rng):
    r = zn(4)
    q = G.CentreAHW(r.group)
    f = unit(rng, 4)
    A = crandn(rng, 4, 4)
    S = C.berezin_symbol_grid(A, f, f, r)
    for x1, x2 in [((0, 0), (1, 2)), ((3, 1), (2, 2))]:
        want = np.vdot(r.matrix(q.s(x2)) @ f.values, A @ r.matrix(q.s(x1)) @ f.values)
        assert abs(S(x1, x2) - want) < 1e-14
        assert abs(C.berezin_covariant_symbol(A, f, f, r, x1, x2, q) - want) < 1e-14
    assert np.allclose(S.diagonal(), [S(x, x) for x in q.points()])


@pytest.mark.parametrize("n", [4, 8])
def test_symbol_compose(n, rng):
    r = zn(n)
    f = unit(rng, n)
    A, B = crandn(rng, n, n), crandn(rng, n, n)
    At, Bt = C.berezin_symbol_grid(A, f, f, r), C.berezin_symbol_grid(B, f, f, r)
    ABt = C.berezin_symbol_grid(A @ B, f, f, r)
    assert np.max(np.abs(C.symbol_compose(At, Bt, 1 / n).values - ABt.values)) <= 1e-10
    It = C.berezin_symbol_grid(np.eye(n), f, f, r)
    assert np.max(np.abs(C.symbol_compose(At, It, 1 / n).values - At.values)) <= 1e-10
    Zt = C.berezin_symbol_grid(np.zeros((n, n)), f, f, r)
    assert np.all(C.symbol_compose(Zt, Bt, 1 / n).values == 0)


@pytest.mark.parametrize("n", [2, 3, 5, 8])
def test_kn_symbol_recovery(n, rng):
    r = zn(n)
    a = crandn(rng, n, n)
    assert np.max(np.abs(C.kn_berezin_symbol(RC.kn_quantize(a).matrix, r) - a)) <= 1e-12
