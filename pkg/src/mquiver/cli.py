"""Command-line interface: every subcommand prints a JSON report.

Exit status is 0 when the report passes, 1 when it fails or is
indeterminate, and 2 for invalid input.
"""
import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import cxmat, jsonio, normal_form, quiver, real_implosion, sl2, steinberg
from .errors import MQuiverError, NotASolution
from .jsonio import Report, complex_to_json, matrix_to_json

EXIT_PASS, EXIT_FAIL, EXIT_INVALID = 0, 1, 2


class UsageError(Exception):
    pass


def _cjson(values):
    return [complex_to_json(z) for z in values]


def _tol(args):
    return cxmat.DEFAULT_TOL if args.tol is None else args.tol


def _write_or_embed(args, doc, data, key="quiver"):
    if getattr(args, "out", None):
        jsonio._write_json(doc, args.out)
        data["out"] = args.out
    else:
        data[key] = doc


def _complex_list(text):
    try:
        return jsonio.parse_complex_list(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _complex(text):
    try:
        return jsonio.parse_complex(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _angles(text):
    try:
        return jsonio.parse_angle_list(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _angle(text):
    try:
        return jsonio.parse_angle(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def verify_file(path, tol):
    """Report for one quiver file; scalars are inferred when the file has none."""
    q, s, _ = jsonio.load_quiver_document(path)
    inputs = {"file": jsonio.quiver_to_document(q, s), "tol": tol}
    tols = {"equations": tol, "minpoly": tol, "xk_recursion": tol}
    if s is None:
        try:
            s = quiver.infer_scalars(q, tol)
        except NotASolution as exc:
            res = {"equations": exc.residual if exc.residual is not None else float("inf")}
            return Report("verify", inputs, res, {"equations": tol}, {"path": path, "error": str(exc)}, tolerance=tol)
    res = {
        "equations": quiver.equation_residual(q, s),
        "minpoly": quiver.minpoly_residual(q, s),
        "xk_recursion": quiver.xk_recursion_residual(q, s),
    }
    return Report("verify", inputs, res, tols, {"path": path, "q": _cjson(s.q)}, tolerance=tol)


def _verify_job(job):
    path, tol = job
    try:
        return verify_file(path, tol).to_dict(), None
    except (MQuiverError, ValueError) as exc:
        return None, f"{path}: {exc}"


def cmd_verify(args):
    tol = _tol(args)
    jobs = [(p, tol) for p in args.files]
    if args.jobs > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_verify_job, jobs))
    else:
        results = [_verify_job(j) for j in jobs]
    errors = [err for _, err in results if err]
    if errors:
        raise UsageError("; ".join(errors))
    dicts = [d for d, _ in results]
    payload = dicts[0] if len(dicts) == 1 else dicts
    ok = all(d["verdict"] == "pass" for d in dicts)
    return payload, ok


def cmd_infer_q(args):
    tol = _tol(args)
    q, _, _ = jsonio.load_quiver_document(args.file)
    inputs = {"file": jsonio.quiver_to_document(q), "tol": tol}
    try:
        s = quiver.infer_scalars(q, tol)
    except NotASolution as exc:
        res = exc.residual if exc.residual is not None else float("inf")
        return Report("infer-q", inputs, {"equations": res}, {"equations": tol}, {"error": str(exc)}, tolerance=tol)
    res = {"equations": quiver.equation_residual(q, s)}
    return Report("infer-q", inputs, res, {"equations": tol}, {"q": _cjson(s.q)}, tolerance=tol)


def cmd_toric(args):
    tol = _tol(args)
    if len(args.q) != args.n - 1:
        raise UsageError(f"--q needs {args.n - 1} values for n={args.n}")
    s = quiver.ScalarChain(tuple(args.q))
    q = quiver.gen_toric(args.n, s)
    inputs = {"n": args.n, "q": _cjson(s.q)}
    data = {"q": _cjson(s.q)}
    doc = jsonio.quiver_to_document(q, s, {"generator": "toric"})
    _write_or_embed(args, doc, data)
    res = {"equations": quiver.equation_residual(q, s)}
    return Report("toric", inputs, res, {"equations": tol}, data, tolerance=tol)


def cmd_random(args):
    tol = _tol(args)
    q, s = quiver.gen_random(args.n, args.seed, bound=args.bound)
    inputs = {"n": args.n, "seed": args.seed, "bound": args.bound}
    data = {"q": _cjson(s.q)}
    doc = jsonio.quiver_to_document(q, s, {"generator": "random", "seed": args.seed, "bound": args.bound})
    _write_or_embed(args, doc, data)
    res = {
        "equations": quiver.equation_residual(q, s),
        "minpoly": quiver.minpoly_residual(q, s),
        "xk_recursion": quiver.xk_recursion_residual(q, s),
    }
    return Report("random", inputs, res, dict.fromkeys(res, tol), data, tolerance=tol)


def cmd_reduce(args):
    tol = _tol(args)
    q, s, meta = jsonio.load_quiver_document(args.file)
    if s is None:
        s = quiver.infer_scalars(q, tol)
    gauge, reduced = normal_form.reduce_to_standard(q, tol)
    y = quiver.endo_Y(reduced)
    inputs = {"file": jsonio.quiver_to_document(q, s), "tol": tol}
    data = {
        "gauge": [matrix_to_json(g) for g in gauge.factors],
        "Y": matrix_to_json(y),
        "q": _cjson(s.q),
    }
    _write_or_embed(args, jsonio.quiver_to_document(reduced, s, meta), data)
    diag_err = float(np.max(np.abs(np.diagonal(y) - np.array(s.borel_diagonal()))))
    lower = float(cxmat.fro(np.tril(y, -1)))
    res = {
        "equations": quiver.equation_residual(reduced, s),
        "y_diagonal": diag_err,
        "y_lower": lower,
    }
    tols = {"equations": tol, "y_diagonal": 1e-8, "y_lower": 1e-8 * max(1.0, cxmat.fro(y))}
    return Report("reduce", inputs, res, tols, data, tolerance=tol)


def cmd_reconstruct(args):
    tol = _tol(args)
    y = jsonio.load_borel(args.borel, "B1")
    q, s = normal_form.reconstruct_from_borel(y, tol)
    inputs = {"borel": matrix_to_json(y.m), "variant": y.variant}
    data = {"q": _cjson(s.q)}
    _write_or_embed(args, jsonio.quiver_to_document(q, s, {"generator": "reconstruct"}), data)
    y_back = quiver.endo_Y(q)
    res = {
        "equations": quiver.equation_residual(q, s),
        "round_trip": cxmat.fro(y_back - y.m) / max(1.0, cxmat.fro(y.m)),
    }
    return Report("reconstruct", inputs, res, {"equations": tol, "round_trip": 1e-10}, data, tolerance=tol)


def cmd_decompose(args):
    tol = _tol(args)
    q, s, _ = jsonio.load_quiver_document(args.file)
    if s is None:
        s = quiver.infer_scalars(q, tol)
    dec = quiver.eigenspace_decompose(q, s, args.tau, tol)
    margins = [m for m in dec.iso_margins if m is not None]
    worst = min(margins, default=1.0)
    inputs = {"file": jsonio.quiver_to_document(q, s), "tau": complex_to_json(args.tau), "tol": tol}
    data = {
        "dims": list(dec.dims),
        "node_params": _cjson(dec.node_params),
        "iso_margins": [m for m in dec.iso_margins],
        "bases": [matrix_to_json(b) for b in dec.bases],
    }
    res = {
        "equations": dec.equation_residual,
        "leakage": dec.leakage,
        "kernel_agreement": dec.kernel_agreement,
        "iso_inverse_margin": float("inf") if worst == 0 else 1.0 / worst,
    }
    tols = {"equations": tol, "leakage": 1e-8, "kernel_agreement": 1e-8, "iso_inverse_margin": 1e6}
    return Report("decompose", inputs, res, tols, data, tolerance=tol)


def _level(values):
    try:
        return steinberg.TorusLevel(tuple(values))
    except MQuiverError as exc:
        raise UsageError(str(exc)) from None


def cmd_steinberg(args):
    tol = _tol(args)
    m = jsonio.load_matrix(args.matrix)
    lam = _level(args.lam)
    dev = steinberg.steinberg_membership(m, lam)
    inputs = {"matrix": matrix_to_json(m), "lambda": _cjson(lam.lambdas), "tol": tol}
    data = {
        "class_functions": _cjson(steinberg.class_functions(m)),
        "reference": _cjson(steinberg.class_functions(lam.matrix())),
        "regularity": steinberg.regularity(m),
        "centralizer_dim": steinberg.centralizer_dim(m),
    }
    return Report("steinberg", inputs, {"membership": dev}, {"membership": tol}, data, tolerance=tol)


def cmd_springer(args):
    tol = _tol(args)
    lam = _level(args.lam)
    if lam.n != args.n:
        raise UsageError(f"--lambda needs {args.n} values")
    rng = np.random.default_rng(args.seed)
    u = cxmat.random_special_linear(args.n, rng)
    n_part = cxmat.random_unitriangular(args.n, rng, args.bound)
    image = steinberg.springer_image(u, lam, n_part, tol)
    inputs = {"n": args.n, "lambda": _cjson(lam.lambdas), "seed": args.seed, "bound": args.bound}
    data = {
        "u": matrix_to_json(u),
        "n_part": matrix_to_json(n_part),
        "image": matrix_to_json(image),
        "regularity": steinberg.regularity(image),
    }
    res = {"membership": steinberg.steinberg_membership(image, lam)}
    return Report("springer", inputs, res, {"membership": 1e-8}, data, tolerance=tol)


def cmd_cover(args):
    tol = _tol(args)
    m, variant = jsonio.load_matrix_document(args.borel)
    if args.lifts:
        y = normal_form.BorelElement(m, variant or "B1")
        lifts = normal_form.cover_lifts(y)
        roots = normal_form.lift_roots(y)
        back = max(cxmat.fro(normal_form.cover_rho(b).m - y.m) for b in lifts)
        det_err = max(abs(z ** y.n * y.det() - 1) for z in roots)
        inputs = {"borel": matrix_to_json(y.m), "variant": y.variant, "lifts": True}
        data = {"z1": _cjson(roots), "lifts": [matrix_to_json(b.m) for b in lifts]}
        res = {"rho_of_lift": back, "z1_power_det": det_err}
        return Report("cover", inputs, res, {"rho_of_lift": 1e-10, "z1_power_det": 1e-10}, data, tolerance=tol)
    b = normal_form.BorelElement(m, variant or "B")
    image = normal_form.cover_rho(b)
    z1 = b.m[0, 0]
    inputs = {"borel": matrix_to_json(b.m), "variant": b.variant, "lifts": False}
    data = {"rho": matrix_to_json(image.m), "z1": complex_to_json(z1)}
    res = {"z1_power_det": abs(z1 ** b.n * image.det() - 1)}
    return Report("cover", inputs, res, {"z1_power_det": 1e-10}, data, tolerance=tol)


def cmd_hjs(args):
    tol = _tol(args)
    p = real_implosion.AlcovePoint(tuple(args.thetas))
    s = real_implosion.qs_from_alcove(p)
    q = real_implosion.hjs_toric_quiver(s)
    check = real_implosion.stabilizer_check(p)
    y = real_implosion.alcove_to_b1(p)
    inputs = {"thetas": list(p.thetas)}
    data = {
        "q": _cjson(s.q),
        "Y_diagonal": _cjson(y.diagonal),
        "runs": [list(r) for r in check.stratum.runs],
        "collapsed_dims": list(check.stratum.collapsed_dims),
        "stabilizer_blocks": list(check.stratum.stabilizer_blocks),
        "predicted_dim": check.predicted_dim,
        "measured_dim": check.measured_dim,
        "is_vertex": check.stratum.is_vertex,
        "decomposition_ok": check.decomposition_ok,
    }
    _write_or_embed(args, jsonio.quiver_to_document(q, s, {"generator": "hjs"}), data)
    res = {
        "equations": quiver.equation_residual(q, s),
        "stabilizer_mismatch": abs(check.predicted_dim - check.measured_dim),
        "forward": check.forward_residual,
    }
    tols = {"equations": 1e-10, "stabilizer_mismatch": 0, "forward": tol}
    return Report("hjs", inputs, res, tols, data, tolerance=tol)


def _sl2_point(args):
    if len(args.u) != 4 or len(args.v) != 3:
        raise UsageError("--u needs a,b,c,d and --v needs e,f,e'")
    return sl2.SL2Point(*args.u, *args.v)


def _point_inputs(p):
    return {"u": matrix_to_json(p.u()), "v": matrix_to_json(p.v())}


def cmd_sl2(args):
    tol = _tol(args)
    if args.sl2_command == "invariants":
        p = _sl2_point(args)
        a, c, e, ep, x, y = sl2.sl2_invariants(p)
        data = {"a": complex_to_json(a), "c": complex_to_json(c), "e": complex_to_json(e),
                "eprime": complex_to_json(ep), "x": complex_to_json(x), "y": complex_to_json(y)}
        res = {"relation": sl2.sl2_relation_residual(p)}
        return Report("sl2-invariants", _point_inputs(p), res, {"relation": tol}, data, tolerance=tol)
    if args.sl2_command == "quadric":
        p = _sl2_point(args)
        a, c, e, big_x, big_y = sl2.sl2_quadric_coords(p)
        data = {"a": complex_to_json(a), "c": complex_to_json(c), "e": complex_to_json(e),
                "X": complex_to_json(big_x), "Y": complex_to_json(big_y)}
        res = {"quadric": sl2.sl2_quadric_residual(p)}
        return Report("sl2-quadric", _point_inputs(p), res, {"quadric": tol}, data, tolerance=tol)
    if args.sl2_command == "slice":
        u = None
        if args.u is not None:
            if len(args.u) != 4:
                raise UsageError("--u needs a,b,c,d")
            u = np.array(args.u, dtype=np.complex128).reshape(2, 2)
        out = sl2.sl2_real_slice(args.theta, u)
        data = {"x": complex_to_json(out.x), "y": complex_to_json(out.y),
                "compat_point": None if out.compat_point is None else _point_inputs(out.compat_point)}
        inputs = {"theta": args.theta, "u": None if u is None else matrix_to_json(u)}
        res = {"real_slice": out.residual, "compat": out.compat_residual}
        return Report("sl2-slice", inputs, res, {"real_slice": tol, "compat": tol}, data, tolerance=tol)
    # domain
    if len(args.alpha) != 2 or len(args.beta) != 2:
        raise UsageError("--alpha and --beta need two values each")
    (a1, a2), (b1, b2) = args.alpha, args.beta
    verdict = sl2.sl2_quiver_domain(a1, a2, b1, b2)
    q = quiver.Quiver((1, 2), (np.array([[a1], [a2]]),), (np.array([[b1, b2]]),), check=False)
    agree = verdict == q.in_m_mult()
    inputs = {"alpha": _cjson(args.alpha), "beta": _cjson(args.beta)}
    data = {"in_domain": bool(verdict), "quiver_invertible": bool(q.in_m_mult())}
    return Report("sl2-domain", inputs, {"disagreement": 0.0 if agree else 1.0}, {"disagreement": 0.0}, data,
                  tolerance=tol)


def build_parser():
    parser = argparse.ArgumentParser(prog="mquiver", description="Multiplicative quiver toolkit.")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")
    sub.required = True

    def add(name, func, help_text, tol=True):
        p = sub.add_parser(name, help=help_text)
        if tol:
            p.add_argument("--tol", type=float, default=None, help="tolerance (default from MQUIVER_TOL or 1e-9)")
        p.set_defaults(func=func)
        return p

    p = add("verify", cmd_verify, "check equations, minimal polynomial and X_k recursion")
    p.add_argument("files", nargs="+")
    p.add_argument("--jobs", type=int, default=1, help="worker processes for several files")

    p = add("infer-q", cmd_infer_q, "recover the scalar chain of a solution")
    p.add_argument("file")

    p = add("toric", cmd_toric, "build a toric full-flag solution")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--q", type=_complex_list, required=True, help="comma separated, e.g. 2,1+i")
    p.add_argument("--out")

    p = add("random", cmd_random, "random standard-form solution")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--bound", type=float, default=10.0)
    p.add_argument("--out")

    p = add("reduce", cmd_reduce, "gauge into the Borel normal form")
    p.add_argument("file")
    p.add_argument("--out")

    p = add("reconstruct", cmd_reconstruct, "rebuild a quiver from Y in B_1")
    p.add_argument("--borel", required=True)
    p.add_argument("--out")

    p = add("decompose", cmd_decompose, "generalized eigenspace subquiver")
    p.add_argument("file")
    p.add_argument("--tau", type=_complex, required=True)

    p = add("steinberg", cmd_steinberg, "Steinberg fibre membership")
    p.add_argument("--matrix", required=True)
    p.add_argument("--lambda", dest="lam", type=_complex_list, required=True)

    p = add("springer", cmd_springer, "random point of the Steinberg fibre")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--lambda", dest="lam", type=_complex_list, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--bound", type=float, default=1.0, help="bound on the unitriangular entries")

    p = add("cover", cmd_cover, "the cover B -> B_1 and its lifts")
    p.add_argument("--borel", required=True)
    p.add_argument("--lifts", action="store_true")

    p = add("hjs", cmd_hjs, "stratum of an alcove point")
    p.add_argument("--thetas", type=_angles, required=True, help="e.g. pi/2,-pi/2")
    p.add_argument("--out")

    p = add("sl2", cmd_sl2, "SL(2) invariants, quadric, real slice and domain check", tol=False)
    sl2_sub = p.add_subparsers(dest="sl2_command", metavar="SL2COMMAND")
    sl2_sub.required = True
    for name in ("invariants", "quadric"):
        sp = sl2_sub.add_parser(name)
        sp.add_argument("--u", type=_complex_list, required=True, help="a,b,c,d")
        sp.add_argument("--v", type=_complex_list, required=True, help="e,f,e'")
    sp = sl2_sub.add_parser("slice")
    sp.add_argument("--theta", type=_angle, required=True)
    sp.add_argument("--u", type=_complex_list, default=None, help="a,b,c,d of an SU(2) element")
    sp = sl2_sub.add_parser("domain")
    sp.add_argument("--alpha", type=_complex_list, required=True)
    sp.add_argument("--beta", type=_complex_list, required=True)
    for sp in sl2_sub.choices.values():
        sp.add_argument("--tol", type=float, default=None)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_INVALID
    try:
        result = args.func(args)
    except (UsageError, MQuiverError, ValueError, OSError) as exc:
        print(f"mquiver {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    if isinstance(result, Report):
        print(result.to_json())
        return EXIT_PASS if result.verdict == "pass" else EXIT_FAIL
    payload, ok = result
    print(json.dumps(payload, sort_keys=True, indent=1, allow_nan=False))
    return EXIT_PASS if ok else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
