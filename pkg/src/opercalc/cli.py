"""
Command line front end.

Subcommands::

    opercalc group {mul,inv,act,section,cocycle} --group G [--subgroup H] [--n N] LITERAL...
    opercalc quantize --scheme {weyl,kn,relconv} --in SYMBOL.csv --out OP.csv
    opercalc compose --in A.csv --in B.csv --out C.csv [--twist {generic,closed}]
    opercalc apply --op OP.csv --in FIELD.csv --out FIELD.csv
    opercalc symbol --scheme {berezin,kn} --op OP.csv --out SYMBOL.csv
    opercalc verify {SUITE,all} [--json REPORT.json] [--n N] [--timing]

Exit codes: 0 ok, 1 verify failure, 2 parse or configuration error,
3 shape error, 4 numerical guard.
"""

import argparse
import json
import sys
import time
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import covtrans as C
from . import fields as F
from . import groups as G
from . import relconv as RC
from .config import ConfigError, load_config, threads
from .reps import Representation, RepError

EXIT_OK, EXIT_FAIL, EXIT_PARSE, EXIT_SHAPE, EXIT_GUARD = 0, 1, 2, 3, 4


class ParseError(ValueError):
    """Malformed command line literal."""


# ------------------------------------------------------------------ literals


def _number(text, label):
    t = text.strip().replace(" ", "")
    try:
        v = complex(t)
    except ValueError:
        raise ParseError(f"invalid value {text!r} for field {label}") from None
    return v.real if v.imag == 0 and "j" not in t else v


def parse_element(text, grp: G.Group):
    parts = text.split(",")
    if len(parts) != len(grp.fields):
        raise ParseError(f"{grp.name} element needs {len(grp.fields)} fields "
                         f"({','.join(grp.fields)}), got {len(parts)}")
    vals = [_number(p, f) for p, f in zip(parts, grp.fields)]
    try:
        return grp(*vals)
    except (G.GroupError, TypeError, ValueError) as e:
        raise ParseError(str(e)) from None


def parse_point(text, q: G.Quotient):
    parts = [_number(p, f"x{i}") for i, p in enumerate(text.split(","))]
    o = q.origin()
    size = len(o) if isinstance(o, tuple) else 1
    if len(parts) != size:
        raise ParseError(f"{q.name} point needs {size} fields, got {len(parts)}")
    if isinstance(q, (G.CentreAHW, G.LineAHW)):
        for i, v in enumerate(parts):
            if isinstance(v, complex) or v != int(v):
                raise ParseError(f"field x{i} of a Z_n point must be an integer")
        parts = [int(v) % q.n for v in parts]
    if isinstance(q, G.DiskSU11):
        return complex(parts[0])
    return tuple(parts) if size > 1 else parts[0]


def _json_value(v):
    if isinstance(v, (tuple, list)):
        return [_json_value(c) for c in v]
    if isinstance(v, np.generic):
        v = v.item()
    return G._jsonable(v)


def dumps(obj):
    return json.dumps(obj, separators=(",", ":"))


# ------------------------------------------------------------------ commands


def cmd_group(args, out=None):
    out = out or sys.stdout
    q = G.make_quotient(args.group, args.subgroup, n=args.n)
    grp = q.group
    lits = args.literals
    need = {"mul": 2, "inv": 1, "act": 2, "section": 1, "cocycle": 2}[args.op]
    if len(lits) != need:
        raise ParseError(f"group {args.op} takes {need} literal(s), got {len(lits)}")
    if args.op == "mul":
        res = grp.to_dict(parse_element(lits[0], grp) * parse_element(lits[1], grp))
    elif args.op == "inv":
        res = grp.to_dict(parse_element(lits[0], grp).inv())
    elif args.op == "act":
        res = {"x": _json_value(q.act(parse_point(lits[0], q), parse_element(lits[1], grp)))}
    elif args.op == "section":
        res = grp.to_dict(q.s(parse_point(lits[0], q)))
    else:
        res = grp.to_dict(q.cocycle(parse_point(lits[0], q), parse_element(lits[1], grp)))
    print(dumps({k: _json_value(v) for k, v in res.items()}), file=out)
    return EXIT_OK


def _line_arg(text, cfg):
    if text:
        try:
            n, a, b = text.split(",")
            return F.LineGrid.window(int(n), float(a), float(b))
        except ValueError:
            raise ParseError(f"--line expects n,a,b, got {text!r}") from None
    L = cfg.line
    return F.LineGrid.window(int(L["n"]), float(L["a"]), float(L["b"]))


def _config(args):
    over = {"hbar": getattr(args, "hbar", None), "n": getattr(args, "n", None),
            "k": getattr(args, "k", None), "seed": getattr(args, "seed", None)}
    return load_config(getattr(args, "config", None), over)


def _ahw_kernel(arr, n):
    """[g, chi] array -> flat kernel with g fast."""
    if arr.shape != (n, n):
        raise F.ShapeError(f"AHW kernel must be {n} x {n}, got {arr.shape}")
    return arr.T.reshape(-1)


def cmd_quantize(args):
    cfg = _config(args)
    arr = F.read_array_csv(args.input)
    if args.scheme == "weyl":
        line = _line_arg(args.line, cfg)
        sg = RC.symbol_grid(line, cfg.hbar, args.periodic)
        if arr.shape != sg.shape:
            raise F.ShapeError(f"Weyl symbol must be sampled on a {sg.shape} grid, got {arr.shape}")
        op = RC.weyl_quantize(F.PlaneField(sg, arr), line, cfg.hbar,
                              guard=args.guard, periodic=args.periodic)
    elif args.scheme == "kn":
        op = RC.kn_quantize(arr)
    else:
        group = args.group or cfg.group
        if group == "ahw":
            n = arr.shape[0]
            r = Representation.named("ahw-schrodinger", n=n, k=cfg.k)
            op = RC.relative_convolution(_ahw_kernel(arr, n), r)
        elif group == "heisenberg":
            line = _line_arg(args.line, cfg)
            r = Representation.named("schrodinger", hbar=cfg.hbar)
            op = RC.relative_convolution(F.PlaneField(relconv_grid(line, cfg.hbar), arr), r, grid=line)
        else:
            raise ConfigError(f"relconv quantization is realized for ahw and heisenberg, not {group}")
    F.write_matrix_csv(args.output, op.matrix)
    return EXIT_OK


def relconv_grid(line, hbar=1.0):
    """Kernel grid of Heisenberg relative convolution on ``line`` (2n x 2n nodes)."""
    n, dt = line.n, line.step
    dy = 1.0 / (hbar * n * dt)
    return F.PlaneGrid(F.LineGrid(2 * n, dt, -dt * n), F.LineGrid(2 * n, dy, -dy * n))


def _read_header(path):
    try:
        with open(path) as fh:
            return fh.readline().strip()
    except OSError as e:
        raise F.FieldError(f"cannot read {path}: {e}") from None


def cmd_compose(args):
    cfg = _config(args)
    a, b = args.inputs
    ha, hb = _read_header(a), _read_header(b)
    if ha.startswith("row") and hb.startswith("row"):
        A, B = F.read_matrix_csv(a), F.read_matrix_csv(b)
        if A.shape[1] != B.shape[0]:
            raise F.ShapeError(f"cannot compose {A.shape} with {B.shape}")
        F.write_matrix_csv(args.output, A @ B)
        return EXIT_OK
    k1, k2 = F.read_array_csv(a), F.read_array_csv(b)
    if k1.shape != k2.shape:
        raise F.ShapeError(f"kernel shapes differ: {k1.shape} vs {k2.shape}")
    group = args.group or cfg.group
    if group == "ahw":
        n = k1.shape[0]
        f1, f2 = _ahw_kernel(k1, n), _ahw_kernel(k2, n)
        if args.twist == "closed":
            out = RC.twisted_convolution_ahw(f1, f2, n, cfg.k)
        else:
            out = RC.twisted_convolution_generic(f1, f2, G.CentreAHW(n), k=cfg.k)
        F.write_array_csv(args.output, np.asarray(out).reshape(n, n).T)
    elif group == "heisenberg":
        line = _line_arg(args.line, cfg)
        pg = relconv_grid(line, cfg.hbar)
        if k1.shape != pg.shape:
            raise F.ShapeError(f"Heisenberg kernels must be {pg.shape}, got {k1.shape}")
        out = RC.twisted_convolution_heisenberg(F.PlaneField(pg, k1), F.PlaneField(pg, k2), cfg.hbar)
        F.write_array_csv(args.output, out.values)
    else:
        raise ConfigError(f"kernel composition is realized for ahw and heisenberg, not {group}")
    return EXIT_OK


def cmd_apply(args):
    A = F.read_matrix_csv(args.op)
    u = F.read_array_csv(args.input)
    if u.ndim != 1 or u.shape[0] != A.shape[1]:
        raise F.ShapeError(f"operator of size {A.shape} cannot act on a field of shape {u.shape}")
    F.write_array_csv(args.output, A @ u)
    return EXIT_OK


def cmd_symbol(args):
    cfg = _config(args)
    A = F.read_matrix_csv(args.op)
    n = A.shape[0]
    if A.shape != (n, n):
        raise F.ShapeError(f"symbols need a square operator, got {A.shape}")
    r = Representation.named("ahw-schrodinger", n=n, k=cfg.k)
    if args.scheme == "kn":
        F.write_array_csv(args.output, C.kn_berezin_symbol(A, r))
        return EXIT_OK
    if args.wavelet:
        f = F.read_array_csv(args.wavelet)
        if f.shape != (n,):
            raise F.ShapeError(f"wavelet must have {n} samples, got {f.shape}")
    else:
        f = C.delta_vector(n).values
    f = F.CyclicField(np.asarray(f, complex))
    S = C.berezin_symbol_grid(A, f, f, r)
    F.write_symbol_csv(args.output, S.points1, S.points2, S.values)
    return EXIT_OK


def run_suites(names, cfg, timing=None):
    """Run suites by name; results keep the order of ``names``."""
    from .suites import SUITES

    def one(name):
        t0 = time.perf_counter()
        cases = SUITES[name](cfg)
        return name, cases, time.perf_counter() - t0

    with ThreadPoolExecutor(max_workers=threads()) as ex:
        done = list(ex.map(one, names))
    results, suites = [], []
    for name, cases, dt in done:
        rows = []
        for case, res, tol in cases:
            res = float(res)
            rows.append({"suite": name, "case": case,
                         "residual": res if np.isfinite(res) else str(res),
                         "tolerance": float(tol), "pass": bool(res <= tol)})
        entry = {"suite": name, "cases": len(rows), "passed": sum(r["pass"] for r in rows)}
        if timing:
            entry["seconds"] = round(dt, 3)
        suites.append(entry)
        results.extend(rows)
        if timing is not None:
            print(f"{name}: {dt:.2f} s", file=sys.stderr)
    npass = sum(r["pass"] for r in results)
    return {"results": results, "suites": suites,
            "summary": {"suites": len(suites), "cases": len(results),
                        "passed": npass, "failed": len(results) - npass}}


def cmd_verify(args, out=None):
    out = out or sys.stdout
    from .suites import SUITES
    cfg = _config(args)
    if args.suite == "all":
        names = list(SUITES)
    elif args.suite in SUITES:
        names = [args.suite]
    else:
        raise ConfigError(f"unknown suite {args.suite!r}; choose from {', '.join(SUITES)} or all")
    report = run_suites(names, cfg, timing=args.timing)
    for r in report["results"]:
        mark = "PASS" if r["pass"] else "FAIL"
        print(f"{mark} {r['suite']}: {r['case']} residual={r['residual']} tol={r['tolerance']:g}",
              file=out)
    s = report["summary"]
    print(f"{s['passed']}/{s['cases']} cases passed in {s['suites']} suites", file=out)
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(report, fh, indent=1, sort_keys=True)
            fh.write("\n")
    return EXIT_OK if s["failed"] == 0 else EXIT_FAIL


# -------------------------------------------------------------------- parser


def _group_arguments(g):
    g.add_argument("op", choices=["mul", "inv", "act", "section", "cocycle"])
    g.add_argument("literals", nargs="*")
    g.add_argument("--group", required=True, choices=sorted(G.GROUPS))
    g.add_argument("--subgroup")
    g.add_argument("--n", type=int)


def build_parser():
    p = argparse.ArgumentParser(prog="opercalc", description=__doc__.split("\n\n")[1].strip())
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--config", help="JSON configuration file")
        sp.add_argument("--hbar", type=float)
        sp.add_argument("--k", type=int)
        sp.add_argument("--n", type=int)

    g = sub.add_parser("group", help="group and quotient maps")
    _group_arguments(g)

    q = sub.add_parser("quantize", help="symbol or kernel to operator matrix")
    common(q)
    q.add_argument("--scheme", choices=["weyl", "kn", "relconv"], default="weyl")
    q.add_argument("--group", choices=["ahw", "heisenberg"])
    q.add_argument("--line", help="line grid as n,a,b")
    q.add_argument("--periodic", action="store_true")
    q.add_argument("--no-guard", dest="guard", action="store_false")
    q.add_argument("--in", dest="input", required=True)
    q.add_argument("--out", dest="output", required=True)

    c = sub.add_parser("compose", help="compose two operators or twist two kernels")
    common(c)
    c.add_argument("--in", dest="inputs", action="append", required=True)
    c.add_argument("--out", dest="output", required=True)
    c.add_argument("--group", choices=["ahw", "heisenberg"])
    c.add_argument("--twist", choices=["generic", "closed"], default="closed")
    c.add_argument("--line", help="line grid as n,a,b")

    a = sub.add_parser("apply", help="apply an operator to a field")
    a.add_argument("--op", required=True)
    a.add_argument("--in", dest="input", required=True)
    a.add_argument("--out", dest="output", required=True)

    s = sub.add_parser("symbol", help="Berezin or Kohn-Nirenberg symbol of a Z_n operator")
    common(s)
    s.add_argument("--scheme", choices=["berezin", "kn"], default="berezin")
    s.add_argument("--op", required=True)
    s.add_argument("--wavelet")
    s.add_argument("--out", dest="output", required=True)

    v = sub.add_parser("verify", help="run property suites")
    common(v)
    v.add_argument("suite")
    v.add_argument("--json")
    v.add_argument("--seed", type=int)
    v.add_argument("--timing", action="store_true", help="record wall-clock seconds per suite")
    return p


COMMANDS = {"group": cmd_group, "quantize": cmd_quantize, "compose": cmd_compose,
            "apply": cmd_apply, "symbol": cmd_symbol, "verify": cmd_verify}


def main(argv=None):
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    try:
        if argv and argv[0] == "group":
            # literals may follow the options, so parse them intermixed
            gp = argparse.ArgumentParser(prog="opercalc group")
            _group_arguments(gp)
            args = gp.parse_intermixed_args(argv[1:])
            args.command = "group"
        else:
            args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_PARSE if e.code else EXIT_OK
    if args.command == "compose" and len(args.inputs) != 2:
        print("error: compose takes exactly two --in files", file=sys.stderr)
        return EXIT_PARSE
    try:
        return COMMANDS[args.command](args)
    except RC.QuadratureGuard as e:
        print(f"error: quadrature guard: {e}", file=sys.stderr)
        return EXIT_GUARD
    except F.ShapeError as e:
        print(f"error: shape: {e}", file=sys.stderr)
        return EXIT_SHAPE
    except (ParseError, ConfigError, G.GroupError, F.FieldError, RepError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
