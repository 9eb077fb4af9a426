"""
Property suites run by ``opercalc verify``.

Each suite takes a :class:`RunConfig` and returns a list of
``(case, residual, tolerance)`` triples.  All randomness comes from
``numpy.random.default_rng(cfg.seed)``.
"""

import tempfile
from pathlib import Path

import numpy as np

from . import covtrans as C
from . import fields as F
from . import groups as G
from . import relconv as RC
from .reps import Representation


def _crandn(rng, *shape):
    return rng.normal(size=shape) + 1j * rng.normal(size=shape)


def group_axioms(cfg, count=1000):
    rng = np.random.default_rng(cfg.seed)
    out = []
    for grp in (G.Heisenberg(), G.AHW(cfg.n), G.Dynin(), G.SU11()):
        e = grp.identity()
        worst = 0.0
        for _ in range(count):
            a, b, c = (grp.random(rng) for _ in range(3))
            worst = max(worst, grp.distance((a * b) * c, a * (b * c)),
                        grp.distance(a * e, a), grp.distance(e * a, a),
                        grp.distance(a * a.inv(), e), grp.distance(a.inv() * a, e))
        out.append((grp.name, worst, cfg.tolerance("group-axioms")))
    return out


def section_cocycle(cfg, count=1000):
    rng = np.random.default_rng(cfg.seed + 1)
    out = []
    for q in G.all_quotients(cfg.n):
        worst = 0.0
        for _ in range(count):
            g = q.group.random(rng)
            x = q.random_point(rng)
            worst = max(worst, q.point_distance(q.p(q.s(x)), x),
                        q.group.distance(q.r(g) * q.s(q.p(g)), g),
                        q.group.distance(q.s(x) * g, q.cocycle(x, g) * q.s(q.act(x, g))))
        out.append((q.name, worst, cfg.tolerance("section-cocycle")))
    return out


def _zn_rep(n, k=1):
    return Representation.named("ahw-schrodinger", n=n, k=k)


def twist_zn(cfg, ns=None, pairs=20):
    rng = np.random.default_rng(cfg.seed + 2)
    ns = [cfg.n] if ns is None else ns
    hom = closed = assoc = 0.0
    for n in ns:
        r = _zn_rep(n)
        q = G.CentreAHW(r.group)
        op = lambda k: RC.relative_convolution(k, r).matrix  # noqa: E731
        for _ in range(pairs):
            k1, k2, k3 = (_crandn(rng, n * n) for _ in range(3))
            kg = RC.twisted_convolution_generic(k1, k2, q)
            kc = RC.twisted_convolution_ahw(k1, k2, n)
            scale = n * np.linalg.norm(k1) * np.linalg.norm(k2)
            hom = max(hom, np.linalg.norm(op(kg) - op(k1) @ op(k2)) / scale,
                      np.linalg.norm(op(kc) - op(k1) @ op(k2)) / scale)
            closed = max(closed, np.max(np.abs(kg - kc)) / np.max(np.abs(kg)))
            l = RC.twisted_convolution_generic(kg, k3, q)
            rr = RC.twisted_convolution_generic(k1, RC.twisted_convolution_generic(k2, k3, q), q)
            assoc = max(assoc, np.max(np.abs(l - rr)) / np.max(np.abs(l)))
    return [("homomorphism (scaled)", hom, cfg.tolerance("twist-zn")),
            ("closed = generic", closed, cfg.tolerance("twist-closed")),
            ("associativity", assoc, cfg.tolerance("twist-assoc"))]


def _line(cfg):
    L = cfg.line
    return F.LineGrid.window(int(L["n"]), float(L["a"]), float(L["b"]))


def weyl(cfg):
    line = _line(cfg)
    t = line.nodes
    sg = RC.symbol_grid(line, cfg.hbar)
    Q, P = sg.mesh()
    u = F.LineField(line, np.exp(-np.pi * (t - 0.5) ** 2) * (1 + 0.3j * t))

    def op(s, **kw):
        return RC.weyl_quantize(F.PlaneField(sg, s), line, cfg.hbar, **kw)

    out = []
    iu = op(np.ones(sg.shape))(u)
    out.append(("sigma = 1 is the identity", F.norm(iu - u) / F.norm(u),
                cfg.tolerance("weyl-identity")))
    pu = op(P)(u)
    out.append(("sigma = p multiplies by t", float(np.max(np.abs(pu.values - t * u.values))),
                cfg.tolerance("weyl-position")))
    sp = RC.symbol_grid(line, cfg.hbar, periodic=True)
    Qp, _ = sp.mesh()
    om = 2.0 / (line.n * line.step)
    e = np.exp(2j * np.pi * om * t)
    de = F.finite_difference(F.PlaneField(F.PlaneGrid(line, line),
                                          np.outer(e, np.ones(line.n))), "dx").values[:, 0]
    qe = RC.weyl_quantize(F.PlaneField(sp, Qp), line, cfg.hbar, periodic=True).matrix @ e
    m = slice(4, -4)
    res = np.max(np.abs(qe[m] - de[m] / (2j * np.pi * cfg.hbar)))
    out.append(("sigma = q is d/dt / (2 pi i hbar)", float(res), cfg.tolerance("weyl-derivative")))
    s1 = np.exp(-np.pi * (Q ** 2 + P ** 2))
    s2 = np.exp(-np.pi * ((Q - 0.3) ** 2 / 2 + 2 * (P + 0.2) ** 2)) * (1 + 0.2 * P)
    W1, W2 = op(s1).matrix, op(s2).matrix
    out.append(("real symbol gives self-adjoint operator",
                float(np.max(np.abs(W1 - W1.conj().T))), cfg.tolerance("weyl-selfadjoint")))
    r = Representation.named("schrodinger", hbar=cfg.hbar)
    h1 = RC.symbol_fourier(F.PlaneField(sg, s1), line, cfg.hbar)
    h2 = RC.symbol_fourier(F.PlaneField(sg, s2), line, cfg.hbar)
    R1 = RC.relative_convolution(h1, r, grid=line).matrix
    out.append(("relative convolution of sigma^ = Weyl", F.relative_error(R1, W1),
                cfg.tolerance("weyl-relconv")))
    h12 = RC.twisted_convolution_heisenberg(h1, h2, cfg.hbar)
    R12 = RC.relative_convolution(h12, r, grid=line).matrix
    out.append(("Op(s1)Op(s2) = pi(s1^ # s2^)", F.relative_error(R12, W1 @ W2),
                cfg.tolerance("weyl-compose")))
    return out


def kn_dual(cfg, ns=(2, 3, 4, 5, 6, 7, 8), count=50):
    rng = np.random.default_rng(cfg.seed + 3)
    worst = 0.0
    for i in range(count):
        n = ns[i % len(ns)]
        r = _zn_rep(n)
        a = _crandn(rng, n, n)
        A = RC.kn_quantize(a).matrix
        B = RC.relative_convolution(RC.kn_to_relconv_kernel(a), r).matrix
        worst = max(worst, float(np.max(np.abs(A - B))))
    return [("kn_quantize = relative_convolution", worst, cfg.tolerance("kn-dual"))]


def _hermite_functions(line, kmax):
    from scipy.special import eval_hermite
    t = line.nodes
    out = []
    for k in range(kmax + 1):
        v = eval_hermite(k, np.sqrt(2 * np.pi) * t) * np.exp(-np.pi * t ** 2)
        f = F.LineField(line, v.astype(complex))
        out.append(f * (1.0 / F.norm(f)))
    return out


def fourier_wigner(cfg):
    line = F.LineGrid.window(256, -8.0, 8.0)
    h = _hermite_functions(line, 5)
    pairs = [(0, 0), (0, 1), (1, 1), (2, 3), (3, 3), (4, 2), (1, 5), (5, 5), (2, 2), (0, 4)]
    f = h[0]
    worst = 0.0
    for a, b in pairs:
        W1, W2 = C.fourier_wigner(h[a], f), C.fourier_wigner(h[b], f)
        worst = max(worst, abs(F.inner_product(h[a], h[b]) - F.inner_product(W1, W2)))
    return [("isometry on Gaussian-Hermite pairs", worst, cfg.tolerance("fourier-wigner"))]


def fsb(cfg):
    out = []
    pg = F.PlaneGrid.window(128, -4.0, 4.0)
    P = C.FSB(pg, cfg.hbar)
    z = pg.complex_nodes()
    u = F.PlaneField(pg, np.exp(-np.abs(z - 0.5 - 0.3j) ** 2) * (1 + z.real), True)
    Pu = P(u)
    out.append(("idempotency", F.norm(P(Pu) - Pu) / F.norm(Pu), cfg.tolerance("fsb-idempotent")))
    p3 = F.PlaneGrid.window(128, -3.0, 3.0)
    P3 = C.FSB(p3, cfg.hbar)
    c = C.fit_pde_constant(P3(C.fsb_gaussian(p3, cfg.hbar)))
    z3 = p3.complex_nodes()
    held = P3(F.PlaneField(p3, np.exp(-np.abs(z3 - 0.4) ** 2) * (1 + 1j * z3.imag), True))
    res = C.image_pde_residual(held, "fsb", c)
    out.append(("image PDE residual (held-out)", res, cfg.tolerance("fsb-pde")))
    ctrl = F.PlaneField(p3, np.exp(-np.abs(z3) ** 2), True)
    ratio = C.image_pde_residual(ctrl, "fsb", c) / max(res, 1e-300)
    # separation passes when the control exceeds the image residual by the factor
    out.append(("non-image control separation (inverse ratio)", 1.0 / ratio,
                1.0 / cfg.tolerance("fsb-separation")))
    pr = F.PlaneGrid.window(64, -4.0, 4.0)
    r = Representation.named("fsb", hbar=cfg.hbar)
    zr = pr.complex_nodes()
    v = F.PlaneField(pr, np.exp(-np.abs(zr - 0.3) ** 2) * (1 + 0.5 * zr.real), True)
    X, Y = pr.mesh()
    pts = list(zip(X.reshape(-1), Y.reshape(-1)))
    img = C.induced_wavelet_transform(C.fsb_gaussian(pr, cfg.hbar), r, v, G.CentreHeisenberg(),
                                      points=pts)
    kern = F.Kernel(img.values.reshape(pr.shape), pr.cell, domain=pr)
    rep = C.reproducing_apply(kern, C.ReproducingKernel.fsb(pr, cfg.hbar))
    out.append(("reproducing formula fixes image fields",
                float(np.max(np.abs(rep.values - kern.values)) / np.max(np.abs(kern.values))),
                cfg.tolerance("fsb-reproducing")))
    return out


def berezin(cfg, ns=(4, 8), pairs=20):
    rng = np.random.default_rng(cfg.seed + 4)
    comp = kn = frame = 0.0
    for n in ns:
        r = _zn_rep(n)
        f = _crandn(rng, n)
        f = F.CyclicField(f / np.linalg.norm(f))
        frame = max(frame, C.tight_frame_residual(r, f))
        for _ in range(pairs):
            A, B = _crandn(rng, n, n), _crandn(rng, n, n)
            At = C.berezin_symbol_grid(A, f, f, r)
            Bt = C.berezin_symbol_grid(B, f, f, r)
            ABt = C.berezin_symbol_grid(A @ B, f, f, r)
            comp = max(comp, float(np.max(np.abs(C.symbol_compose(At, Bt, 1.0 / n).values
                                                 - ABt.values))))
            a = _crandn(rng, n, n)
            kn = max(kn, float(np.max(np.abs(C.kn_berezin_symbol(RC.kn_quantize(a).matrix, r) - a))))
    return [("tight frame", frame, cfg.tolerance("tight-frame")),
            ("symbol_compose = (AB)~", comp, cfg.tolerance("berezin-compose")),
            ("Kohn-Nirenberg symbol recovery", kn, cfg.tolerance("kn-symbol"))]


def schur_theta(cfg, ns=(4, 8)):
    rng = np.random.default_rng(cfg.seed + 5)
    th = e51 = rep = 0.0
    for n in ns:
        r = _zn_rep(n)
        for _ in range(10):
            w, v = _crandn(rng, n), _crandn(rng, n)
            theta, res = RC.theta_form(w, v, r)
            th = max(th, res / n, abs(theta - np.vdot(v, w)))
            a, b = RC.wavelet_twist_identity(*(_crandn(rng, n) for _ in range(4)), r)
            e51, rep = max(e51, a), max(rep, b)
    return [("M_w W_v = theta I (scaled by n)", th, cfg.tolerance("theta")),
            ("wavelet twist identity", e51, cfg.tolerance("eq51")),
            ("reproducing identity v~ # f~ = v~", rep, cfg.tolerance("reproducing-zn"))]


def contravariant(cfg, n=None):
    rng = np.random.default_rng(cfg.seed + 6)
    n = n or cfg.n
    r = _zn_rep(n)
    worst = cov = 0.0
    for _ in range(10):
        k, w = _crandn(rng, n * n), _crandn(rng, n)
        g = r.group.random(rng, lattice=True)
        lhs = RC.contravariant_transform(RC.right_regular(k, g, r), w, r)
        rhs = r.matrix(g) @ RC.contravariant_transform(k, w, r)
        worst = max(worst, float(np.max(np.abs(lhs - rhs))))
        f, v = F.CyclicField(_crandn(rng, n)), F.CyclicField(_crandn(rng, n))
        gp = r.group.random(rng)
        Fi = C.Fiducial.pairing(f)
        a = C.covariant_transform(Fi, r, r.apply(g, v), [gp])[0]
        b = C.covariant_transform(Fi, r, v, [gp * g])[0]
        cov = max(cov, abs(a - b))
    return [("contravariant intertwining", worst, cfg.tolerance("contravariant")),
            ("covariant intertwining", cov, cfg.tolerance("covariant-intertwine"))]


def _su11_kernels(quad):
    f1 = lambda w: np.exp(-np.abs(w) ** 2 / 0.05) * (1 + 0.5 * w)  # noqa: E731
    f2 = lambda w: np.exp(-np.abs(w - 0.1) ** 2 / 0.04) * (1 - 0.3j * np.conj(w))  # noqa: E731
    return RC.su11_kernel(quad, f1), RC.su11_kernel(quad, f2)


def bergman(cfg):
    d = cfg.disk
    quad = F.DiskQuadrature(int(d["n_r"]), int(d["n_theta"]), float(d["r_max"]))
    B = C.BergmanProjection(int(d["n_r"]), int(d["n_theta"]))
    out = []
    rng = np.random.default_rng(cfg.seed + 7)
    r = Representation.named("su11")
    seed = F.Seed(((1.0, 2, 0, 0), (0.5j, 1, 1, 0)))
    fld = F.DiskField.from_seed(quad, seed)
    worst = 0.0
    zs = 0.8 * quad.nodes[::17, ::23].reshape(-1)
    for _ in range(5):
        g1, g2 = r.group.random(rng, 0.6), r.group.random(rng, 0.6)
        a = r.apply(g1, r.apply(g2, fld))(zs)
        b = r.apply(g1 * g2, fld)(zs)
        worst = max(worst, float(np.max(np.abs(a - b))))
    out.append(("SU(1,1) representation composition", worst, cfg.tolerance("su11-rep")))
    mono = 0.0
    for k in range(9):
        v = F.DiskField.from_seed(quad, F.Seed.monomial(k, q=1))
        mono = max(mono, F.norm(B(v) - v) / F.norm(v))
    out.append(("monomial fixed points", mono, cfg.tolerance("bergman-monomial")))
    idem = 0.0
    for s in (F.Seed(((1, 2, 1, 1), (0.5j, 0, 3, 1), (1, 6, 0, 1))),
              F.Seed(((1, 0, 0, 1), (0.3, 1, 4, 2), (-1, 3, 3, 1)))):
        P = B(F.DiskField.from_seed(quad, s))
        idem = max(idem, F.norm(B(P) - P) / F.norm(P))
    out.append(("projection idempotency", idem, cfg.tolerance("bergman-idempotent")))
    N = 8
    T = RC.toeplitz_operator(lambda z: np.abs(z) ** 2, "bergman", N=N, projection=B).matrix
    j = np.arange(N + 1)
    out.append(("radial Toeplitz diagonalization",
                float(np.max(np.abs(T - np.diag((j + 1) / (j + 2))))), cfg.tolerance("toeplitz-radial")))
    a = F.DiskField(quad, np.abs(quad.nodes) ** 2 + 0.3 * quad.nodes.real)
    w0, z0 = 0.3 + 0.2j, -0.1j
    sym = abs(C.toeplitz_covariant_symbol_bergman(a, w0, z0)
              - np.conj(C.toeplitz_covariant_symbol_bergman(a, z0, w0)))
    out.append(("covariant symbol conjugate symmetry", sym, cfg.tolerance("bergman-symmetry")))
    kq = F.DiskQuadrature(32, 48, 0.9)
    k1, k2 = _su11_kernels(kq)
    k12 = RC.twisted_convolution_su11(k1, k2)
    P1, P2, P12 = (RC.relative_convolution(k, r) for k in (k1, k2, k12))
    zt = np.array([0, 0.1, 0.2j, -0.3 + 0.1j, 0.4])
    one = F.Seed.monomial(0)
    lhs, rhs = P1(P2(one))(zt), P12(one)(zt)
    out.append(("SU(1,1) twisted convolution, constant seed",
                float(np.max(np.abs(lhs - rhs)) / np.max(np.abs(lhs))), cfg.tolerance("su11-twist")))
    return out


def dynin(cfg):
    rng = np.random.default_rng(cfg.seed + 8)
    r = Representation.named("dynin", hbar=cfg.hbar)
    box = F.BoxGrid((F.LineGrid(96, 0.125, -6.0), F.LineGrid(16, 0.5, -4.0),
                     F.LineGrid(16, 0.5, -4.0)))

    def fc(s, x, y):
        return np.exp(-3 * (s ** 2 / 4 + x ** 2 + y ** 2)) * (1 + 0.2j * s + 0.1 * x)

    f = F.BoxField.from_function(box, fc)
    S, X, Y = box.mesh()
    grp = r.group
    mult = 0.0
    for _ in range(5):
        z, t, u, v = rng.uniform(-1, 1, 4)
        out = r.apply(grp(z, t, u, v, 0, 0, 0), f)
        ph = np.exp(2j * np.pi * cfg.hbar * (z + t * S + u * X + v * Y))
        mult = max(mult, float(np.max(np.abs(out.values - ph * f.values))))
    hom = 0.0
    lat = [(-0.25, 0.5, 0.0), (0.125, -0.5, 0.5), (0.0, 0.0, -0.5)]
    for a in lat:
        for b in lat:
            ga = grp(0.1, 0.2, -0.3, 0.4, *a)
            gb = grp(-0.2, 0.1, 0.5, 0.0, *b)
            lhs = r.apply(ga, r.apply(gb, f))
            rhs = r.apply(ga * gb, f)
            hom = max(hom, float(np.max(np.abs(lhs.values - rhs.values))))
    els = RC.dynin_lattice([-0.125, 0.0, 0.125], [-0.5, 0.0, 0.5], [-0.5, 0.0, 0.5])
    k1 = _crandn(rng, 27)
    conv = RC.dynin_heisenberg_convolution(k1, els, r)(f)
    q = G.DyninM()
    kern = 0.0
    for _ in range(100):
        i, j, l = rng.integers(10, 86), rng.integers(3, 13), rng.integers(3, 13)
        x0 = (S[i, j, l], X[i, j, l], Y[i, j, l])
        val = sum(c * fc(*q.p(G.multiply(q.s(x0), g))) for c, g in zip(k1, els))
        kern = max(kern, abs(val - conv.values[i, j, l]))
    tuv = [(t, u, v) for t in (-0.5, 0, 0.5) for u in (-0.5, 0, 0.5) for v in (-0.5, 0, 0.5)]
    k2 = _crandn(rng, 27)
    m = RC.dynin_multiplication(k2, tuv, r)(f)
    sym = sum(c * np.exp(2j * np.pi * cfg.hbar * (t * S + u * X + v * Y)) for c, (t, u, v) in zip(k2, tuv))
    kern = max(kern, float(np.max(np.abs(m.values - sym * f.values))))
    return [("M acts by multiplication", mult, cfg.tolerance("dynin-mult")),
            ("lattice homomorphism", hom, cfg.tolerance("dynin-hom")),
            ("delta-structured kernels", kern, cfg.tolerance("dynin-kernels"))]


def cli_roundtrip(cfg):
    from .cli import main
    with tempfile.TemporaryDirectory() as d:
        d = Path(d)
        line = _line(cfg)
        sg = RC.symbol_grid(line, cfg.hbar)
        F.write_array_csv(d / "sigma.csv", np.ones(sg.shape))
        t = line.nodes
        u = np.exp(-np.pi * t ** 2) * (1 + 0.5j * t)
        F.write_array_csv(d / "u.csv", u)
        common = ["--hbar", str(cfg.hbar), "--line", f"{line.n},{line.origin},{line.origin + line.n * line.step}"]
        rc1 = main(["quantize", "--scheme", "weyl", "--in", str(d / "sigma.csv"),
                    "--out", str(d / "op.csv"), *common])
        rc2 = main(["apply", "--op", str(d / "op.csv"), "--in", str(d / "u.csv"),
                    "--out", str(d / "v.csv")])
        if rc1 or rc2:
            return [("quantize -> apply round trip", np.inf, cfg.tolerance("cli-roundtrip"))]
        v = F.read_array_csv(d / "v.csv")
        res = float(np.linalg.norm(v - u) / np.linalg.norm(u))
    return [("quantize -> apply round trip", res, cfg.tolerance("cli-roundtrip"))]


SUITES = {
    "group-axioms": group_axioms,
    "section-cocycle": section_cocycle,
    "twist-zn": twist_zn,
    "weyl": weyl,
    "kn-dual": kn_dual,
    "fourier-wigner": fourier_wigner,
    "fsb": fsb,
    "berezin": berezin,
    "schur-theta": schur_theta,
    "contravariant": contravariant,
    "bergman-su11": bergman,
    "dynin": dynin,
    "cli-roundtrip": cli_roundtrip,
}
