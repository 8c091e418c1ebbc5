"""Batch front-end: gap checks, spectra, invariants, table queries, products.

Exit codes: 0 all checks passed, 1 a spectral-gap assumption failed or a
demo/invariant check did not pass, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import catalog
from .classification import (
    ko_s_alpha_beta,
    ko_s_orthant,
    ko_t_hat,
    product_invariant_predict,
    strong_group_lookup,
)
from .compressions import Slope, build_orthant, fredholm_criterion, slope_normalize
from .invariants import (
    PathFamily,
    corner_invariant,
    localized_fredholm_index,
    localized_kernel_count,
    spectral_flow,
    z2_spectral_flow,
)
from .models import AntiUnitary, detect_az_class, load_model, save_model, verify_symmetry_relations
from .products import product_hamiltonian
from .spectra import GapClosedError, spectrum
from .stability import perturbed_model

BUILTIN_MODELS = {
    "ssh": lambda: catalog.model_ssh(),
    "kitaev": lambda: catalog.model_kitaev(),
    "pwave": lambda: catalog.model_pwave(),
    "cii": lambda: catalog.model_cii_chain(),
}


def _fmt(x):
    if isinstance(x, float):
        return float(f"{x:.17g}")
    return x


def _emit(doc, args):
    text = json.dumps(doc, indent=1, default=_fmt)
    if getattr(args, "out", None):
        with open(args.out, "w") as f:
            f.write(text + "\n")
    else:
        print(text)


def _resolve_model(spec):
    if spec in BUILTIN_MODELS:
        return BUILTIN_MODELS[spec]()
    model, syms = load_model(spec)
    if syms is None:
        raise SystemExit("model file carries no symmetry block")
    return model, syms


def _threads():
    n = os.environ.get("CORNERLAB_THREADS")
    if n:
        for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
            os.environ.setdefault(var, n)


def cmd_gap(args):
    model, syms = _resolve_model(args.model)
    k = args.codim or model.dim
    report = fredholm_criterion(model, syms, k, momentum_grid=args.grid,
                                L=args.L, tol=args.tol)
    _emit({"passed": bool(report.passed), "face_gaps": list(report.face_gaps),
           "assumption": report.assumption, "tol": report.tol}, args)
    if not report.passed:
        print(f"error: Assumption {report.assumption} violated "
              f"(min face gap {min(report.face_gaps):.3e})", file=sys.stderr)
        return 1
    return 0


def cmd_spectrum(args):
    model, syms = _resolve_model(args.model)
    k = args.codim or model.dim
    op = build_orthant(model, k, momentum=(), L=args.L)
    sp = spectrum(op)
    rows = ["index,eigenvalue,localization"]
    for i, (e, l) in enumerate(zip(sp.eigenvalues, sp.localization)):
        rows.append(f"{i},{e:.17g},{l:.17g}")
    text = "\n".join(rows)
    if args.out:
        with open(args.out, "w") as f:
            f.write(text + "\n")
    else:
        print(text)
    return 0


def cmd_invariant(args):
    model, syms = _resolve_model(args.model)
    info = detect_az_class(syms)
    k = args.codim or model.dim
    kwargs = {}
    if args.alpha and args.beta:
        kwargs.update(alpha=Slope.parse(args.alpha), beta=Slope.parse(args.beta),
                      convex=args.convex)
    try:
        rep = corner_invariant(model, syms, info, k=k, L=args.L, grid=args.grid,
                               zero_threshold=args.zero_eps,
                               loc_threshold=args.loc_lambda, **kwargs)
    except GapClosedError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    doc = rep.to_dict()
    if args.stability_trials:
        rng_seed = args.seed
        gap = min(rep.face_gaps)

        def value_of(m):
            return corner_invariant(m, syms, info, k=k, L=args.L, grid=args.grid,
                                    zero_threshold=args.zero_eps,
                                    loc_threshold=args.loc_lambda,
                                    **kwargs).invariant.value

        rng = np.random.default_rng(rng_seed)
        agree = True
        for _ in range(args.stability_trials):
            pert = perturbed_model(model, syms, gap / 5, rng)
            agree = agree and (value_of(pert) == rep.invariant.value)
        doc["stability"] = {"perturbation_agrees": bool(agree),
                            "trials": args.stability_trials, "seed": rng_seed}
    _emit(doc, args)
    return 0


def cmd_classify(args):
    group = strong_group_lookup(args.az_class, args.n, args.k)
    _emit({"class": args.az_class, "n": args.n, "k": args.k,
           "group": str(group)}, args)
    return 0


def cmd_ko_table(args):
    alpha = Slope.parse(args.alpha) if args.alpha else None
    beta = Slope.parse(args.beta) if args.beta else None
    if args.algebra == "S":
        group = ko_s_alpha_beta(args.i, alpha, beta)
    elif args.algebra == "T":
        group = ko_t_hat(args.i, alpha, beta)
    elif args.algebra == "orthant":
        group = ko_s_orthant(args.i)
    else:
        raise SystemExit(f"unknown algebra {args.algebra!r}")
    doc = {"algebra": args.algebra, "i": args.i, "group": str(group)}
    if alpha is not None and beta is not None and not (alpha.irrational or beta.irrational):
        doc["t"] = slope_normalize(alpha, beta).t_num
    _emit(doc, args)
    return 0


def cmd_product(args):
    f1 = _resolve_model(args.model)
    f2 = _resolve_model(args.model2)
    res = product_hamiltonian(f1, f2)
    extra = {
        "provenance": {
            "construction_tag": res.construction_tag,
            "candidates": list(res.candidates),
            "ambiguity": list(res.ambiguity),
            "class": res.class_name,
            "factors": [args.model, args.model2],
        }
    }
    if args.out:
        save_model(args.out, res.model, res.syms, extra)
    else:
        print(json.dumps(extra["provenance"], indent=1))
    return 0


def _demo_rows():
    rows = []

    def check(name, got, expect):
        rows.append((name, got, expect, got == expect))

    hat = catalog.operator_hatA(L=20)
    check("index(A-hat)", localized_fredholm_index(hat).value, -1)
    chk = catalog.operator_checkA(L=20)
    check("index(A-check)", localized_fredholm_index(chk).value, +1)
    g = catalog.operator_G(3, 8)
    check("index(G)", localized_fredholm_index(g).value, +1)
    resid = float(np.abs(g.matrix @ catalog.g_kernel_vector(g)).max())
    check("G kernel residual < 1e-12", resid < 1e-12, True)

    grid = np.linspace(-1, 1, 9)
    check("csf(scalar path)", spectral_flow(PathFamily.from_function(
        lambda s: np.array([[s]]), grid)), 1)
    check("csf(diag(s,-s))", spectral_flow(PathFamily.from_function(
        lambda s: np.diag([s, -s]), grid)), 0)
    j = AntiUnitary(np.array([[0, -1], [1, 0]], dtype=complex), -1)
    check("qsf(diag(s,-s))", z2_spectral_flow(PathFamily.from_function(
        lambda s: np.diag([s, -s]), grid, equivariance=j)).value, 1)
    check("csf^D(is)", spectral_flow(PathFamily.from_function(
        lambda s: np.array([[s]]), grid)), 1)
    check("csf^C(diag(is,is))", spectral_flow(PathFamily.from_function(
        lambda s: np.diag([s, s]), grid)), 2)

    ssh = catalog.model_ssh()
    kit = catalog.model_kitaev()
    for name, f1, f2, expect in [("SSHxSSH (BDI) ind", ssh, ssh, 1),
                                 ("KitaevxKitaev (DIII) ind2", kit, kit, 1)]:
        res = product_hamiltonian(f1, f2)
        info = detect_az_class(res.syms)
        rep = corner_invariant(res.model, res.syms, info, k=2, L=14,
                               zero_threshold=1e-3)
        check(name, rep.invariant.value, expect)
    return rows


def cmd_demo(args):
    rows = _demo_rows()
    width = max(len(r[0]) for r in rows)
    ok = True
    for name, got, expect, passed in rows:
        ok &= passed
        print(f"{name:<{width}}  got={got!r:>6} expect={expect!r:>6} "
              f"{'PASS' if passed else 'FAIL'}")
    print("demo suite:", "PASS" if ok else "FAIL")
    return 0 if ok else 1


def build_parser():
    p = argparse.ArgumentParser(prog="cornerlab",
                                description="corner-state invariant laboratory")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--L", type=int, default=16)
        sp.add_argument("--grid", type=int, default=16)
        sp.add_argument("--codim", type=int, default=None)
        sp.add_argument("--zero-eps", dest="zero_eps", type=float, default=None)
        sp.add_argument("--loc-lambda", dest="loc_lambda", type=float, default=0.8)
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--output", choices=("json", "csv"), default="json")
        sp.add_argument("--out", default=None)

    sp = sub.add_parser("gap", help="check the spectral gap assumptions")
    sp.add_argument("--model", required=True)
    sp.add_argument("--tol", type=float, default=1e-8)
    common(sp)
    sp.set_defaults(fn=cmd_gap)

    sp = sub.add_parser("spectrum", help="corner spectrum as CSV")
    sp.add_argument("--model", required=True)
    common(sp)
    sp.set_defaults(fn=cmd_spectrum)

    sp = sub.add_parser("invariant", help="numerical corner invariant")
    sp.add_argument("--model", required=True)
    sp.add_argument("--alpha", default=None)
    sp.add_argument("--beta", default=None)
    sp.add_argument("--convex", type=lambda s: s.lower() != "false", default=True)
    sp.add_argument("--stability-trials", type=int, default=0)
    common(sp)
    sp.set_defaults(fn=cmd_invariant)

    sp = sub.add_parser("classify", help="strong invariant group lookup")
    sp.add_argument("--class", dest="az_class", required=True)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--out", default=None)
    sp.set_defaults(fn=cmd_classify)

    sp = sub.add_parser("ko-table", help="KO-group table lookup")
    sp.add_argument("--algebra", choices=("S", "T", "orthant"), default="S")
    sp.add_argument("--i", type=int, required=True)
    sp.add_argument("--alpha", default=None)
    sp.add_argument("--beta", default=None)
    sp.add_argument("--out", default=None)
    sp.set_defaults(fn=cmd_ko_table)

    sp = sub.add_parser("product", help="product of two models")
    sp.add_argument("--model", required=True)
    sp.add_argument("--model2", required=True)
    sp.add_argument("--out", default=None)
    sp.set_defaults(fn=cmd_product)

    sp = sub.add_parser("demo", help="reproduce the built-in check suite")
    sp.add_argument("--suite", default="paper")
    sp.set_defaults(fn=cmd_demo)
    return p


def main(argv=None):
    _threads()
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except GapClosedError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
