"""Command-line front end: runs estimators and checks, writes CSV + manifest.

Every run writes one CSV of results and a JSON manifest carrying the full
parameter set, master seed, version, and SHA-256 digests of the outputs;
`percolab replay manifest.json` re-executes the run and verifies digests.

Exit codes: 0 complete/PASS, 1 usage or runtime error, 2 any FAIL verdict,
3 INCONCLUSIVE-only.
"""

import argparse
import csv
import hashlib
import json
import os
import sys
import tempfile
import time

import numpy as np

from . import __version__
from .bernoulli import (
    estimate_pc_crossing,
    estimate_theta_n,
    theta_curve,
)
from .boolmodel import (
    StarPair,
    TruncationPolicy,
    estimate_annulus,
    estimate_theta_r,
    insertion_tolerance,
    lambda_scan,
    vacancy_probability,
    verify_russo_continuum,
)
from .exact import (
    connection_event,
    origin_to_boundary_event,
    verify_fkg,
    verify_russo,
)
from .lattice import build_box_graph
from .osss import (
    make_sequential_algorithm,
    make_sphere_algorithm,
    osss_differential_check,
    revealment_sum_bound_check,
    verify_osss,
)
from .ppp import (
    Box,
    RadiusDist,
    grid_count_tv,
    unit_square,
    verify_count_independence,
    verify_mecke,
    verify_superposition,
    verify_void_probability,
)
from .sharpness import (
    check_differential_inequality,
    fit_exponential_decay,
    fit_linear_growth,
    partial_sums,
    tilted_ramp_family,
    validate_lemma_family,
)


def _parse_grid(text):
    """Parse 'a:b:step' into an inclusive grid."""
    try:
        a, b, step = (float(v) for v in text.split(":"))
    except ValueError as exc:
        raise argparse.ArgumentTypeError("grid must be a:b:step") from exc
    n = int(round((b - a) / step))
    return [round(a + i * step, 10) for i in range(n + 1)]


def _parse_floats(text):
    return [float(v) for v in text.split(",")]


def _parse_ints(text):
    return [int(v) for v in text.split(",")]


def _configure_threads(threads):
    if threads is None:
        threads = os.environ.get("PERCOLAB_THREADS")
    if threads:
        import numba

        numba.set_num_threads(int(threads))


def _fmt(v):
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _write_csv(path, fieldnames, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(fieldnames)
        for row in rows:
            w.writerow([_fmt(row.get(k, "")) for k in fieldnames])


def _digest(path):
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        h.update(fh.read())
    return h.hexdigest()


def _write_manifest(out_dir, name, argv, args, outputs):
    manifest = {
        "command": list(argv),
        "parameters": {k: v for k, v in sorted(vars(args).items())
                       if k not in ("func", "out")},
        "seed": getattr(args, "seed", None),
        "version": __version__,
        "timestamp": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
        "outputs": {os.path.basename(p): _digest(p) for p in outputs},
    }
    path = os.path.join(out_dir, f"{name}_manifest.json")
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path


def _exit_code(verdicts):
    verdicts = [v for v in verdicts if v]
    if any(v == "FAIL" for v in verdicts):
        return 2
    if verdicts and all(v == "INCONCLUSIVE" for v in verdicts):
        return 3
    return 0


BERNOULLI_FIELDS = ["model", "d", "n", "p", "estimate", "stderr", "replicas",
                    "seed"]
OSSS_FIELDS = ["check", "d", "n", "p", "k", "edge", "delta", "inf", "cov",
               "slack_v1", "slack_v2", "verdict"]
BOOL_FIELDS = ["model", "d", "lambda", "nu", "r", "stat", "estimate", "stderr",
               "trunc_err", "replicas", "seed"]
FIT_FIELDS = ["fit", "kind", "param", "value", "stderr", "r2"]
EXACT_FIELDS = ["check", "d", "n", "p", "probability", "derivative",
                "pivotal_sum", "covariance_sum", "residual_pivotal",
                "residual_covariance", "verdict"]
PPP_FIELDS = ["check", "d", "lambda", "observed", "expected", "sigma",
              "runs", "seed", "verdict"]


# ---------------------------------------------------------------------------
# command handlers: each returns (csv name, fieldnames, rows, verdicts)

def _cmd_bernoulli_theta(args):
    est = estimate_theta_n(args.d, args.n, args.p, args.replicas, args.seed)
    row = {"model": "theta", "d": args.d, "n": args.n, "p": args.p,
           "estimate": est.value, "stderr": est.stderr,
           "replicas": est.replicas, "seed": est.seed}
    return "bernoulli_theta", BERNOULLI_FIELDS, [row], []


def _cmd_bernoulli_curve(args):
    ns = args.n_list if args.n_list else [args.n]
    grid = args.p_grid if args.p_grid else [args.p]
    curve = theta_curve(args.d, ns, grid, args.replicas, args.seed)
    rows = [{"model": "theta", "d": args.d, "n": r.n, "p": r.p,
             "estimate": r.estimate, "stderr": r.stderr,
             "replicas": r.replicas, "seed": r.seed} for r in curve.rows]
    return "bernoulli_curve", BERNOULLI_FIELDS, rows, []


def _cmd_bernoulli_pc(args):
    est = estimate_pc_crossing(args.d, args.n, args.replicas, args.seed)
    row = {"model": "crossing_pc", "d": args.d, "n": args.n, "p": est.value,
           "estimate": est.value, "stderr": est.stderr,
           "replicas": est.replicas, "seed": est.seed}
    return "bernoulli_pc", BERNOULLI_FIELDS, [row], []


def _cmd_exact_russo(args):
    g = build_box_graph(args.d, args.n)
    A = origin_to_boundary_event(g)
    rows, verdicts = [], []
    for p in (args.p_grid if args.p_grid else [args.p]):
        rep = verify_russo(A, p)
        verdict = "PASS" if rep.passed else "FAIL"
        verdicts.append(verdict)
        rows.append({"check": "russo", "d": args.d, "n": args.n, "p": p,
                     "probability": rep.probability,
                     "derivative": rep.derivative,
                     "pivotal_sum": rep.pivotal_sum,
                     "covariance_sum": rep.covariance_sum,
                     "residual_pivotal": rep.residual_pivotal,
                     "residual_covariance": rep.residual_covariance,
                     "verdict": verdict})
    return "exact_russo", EXACT_FIELDS, rows, verdicts


def _cmd_exact_fkg(args):
    g = build_box_graph(args.d, args.n)
    A = origin_to_boundary_event(g)
    neighbor = [0] * args.d
    neighbor[0] = 1
    B = connection_event(g, g.origin, g.vertex_index(neighbor))
    slack = verify_fkg(A, B, args.p)
    verdict = "PASS" if slack >= -1e-12 else "FAIL"
    row = {"check": "fkg", "d": args.d, "n": args.n, "p": args.p,
           "probability": slack, "derivative": "", "pivotal_sum": "",
           "covariance_sum": "", "residual_pivotal": "",
           "residual_covariance": "", "verdict": verdict}
    return "exact_fkg", EXACT_FIELDS, [row], [verdict]


def _cmd_osss_verify(args):
    g = build_box_graph(args.d, args.n)
    f = origin_to_boundary_event(g)
    rows, verdicts = [], []
    algos = [(1, make_sphere_algorithm(g, 1)),
             ("", make_sequential_algorithm(f))]
    for k, T in algos:
        rep = verify_osss(g, args.p, T, f)
        verdict = "PASS" if rep.passed else "FAIL"
        verdicts.append(verdict)
        for e in range(g.n_edges):
            rows.append({"check": f"osss[{T.name}]", "d": args.d, "n": args.n,
                         "p": args.p, "k": k, "edge": e,
                         "delta": float(rep.revealments[e]),
                         "inf": float(rep.influences[e]),
                         "cov": float(rep.covariances[e]),
                         "slack_v1": rep.slack_v1, "slack_v2": rep.slack_v2,
                         "verdict": verdict})
    return "osss_verify", OSSS_FIELDS, rows, verdicts


def _cmd_osss_revealment(args):
    g = build_box_graph(args.d, args.n)
    mode = "exact" if g.n_edges <= 24 else "mc"
    rep = revealment_sum_bound_check(args.d, args.n, args.p, mode=mode,
                                     replicas=args.replicas, seed=args.seed)
    rows = []
    for e in range(g.n_edges):
        rows.append({"check": "revealment-sum", "d": args.d, "n": args.n,
                     "p": args.p, "k": "", "edge": e,
                     "delta": float(rep.edge_sums[e]), "inf": "", "cov": "",
                     "slack_v1": 4.0 * rep.sigma_n - float(rep.edge_sums[e]),
                     "slack_v2": "", "verdict": rep.verdict})
    return "osss_revealment", OSSS_FIELDS, rows, [rep.verdict]


def _cmd_osss_diffcheck(args):
    rep = osss_differential_check(args.d, args.n, args.p, args.replicas,
                                  args.seed)
    row = {"check": "variance-chain", "d": args.d, "n": args.n, "p": args.p,
           "k": "", "edge": "", "delta": "", "inf": "", "cov": "",
           "slack_v1": rep.slack, "slack_v2": rep.slack_stderr,
           "verdict": rep.verdict}
    return "osss_diffcheck", OSSS_FIELDS, [row], [rep.verdict]


def _cmd_ppp_counts(args):
    window = unit_square()
    rows, verdicts = [], []
    for res in verify_void_probability(args.lam, window, args.replicas,
                                       args.seed):
        rows.append({"check": res.name, "d": 2, "lambda": args.lam,
                     "observed": res.observed, "expected": res.expected,
                     "sigma": res.sigma, "runs": args.replicas,
                     "seed": args.seed, "verdict": res.verdict})
        verdicts.append(res.verdict)
    box_a = Box((0.0, 0.0), (0.4, 0.4))
    box_b = Box((0.6, 0.6), (1.0, 1.0))
    res = verify_count_independence(args.lam, window, box_a, box_b,
                                    args.replicas, args.seed)
    rows.append({"check": res.name, "d": 2, "lambda": args.lam,
                 "observed": res.observed, "expected": res.expected,
                 "sigma": res.sigma, "runs": args.replicas, "seed": args.seed,
                 "verdict": res.verdict})
    verdicts.append(res.verdict)
    return "ppp_counts", PPP_FIELDS, rows, verdicts


def _cmd_ppp_mecke(args):
    window = unit_square()
    rows, verdicts = [], []
    for family in ("indicator", "count-weight", "pair-kernel"):
        res = verify_mecke(args.lam, window, family, args.replicas, args.seed)
        rows.append({"check": res.name, "d": 2, "lambda": args.lam,
                     "observed": res.observed, "expected": res.expected,
                     "sigma": res.sigma, "runs": args.replicas,
                     "seed": args.seed, "verdict": res.verdict})
        verdicts.append(res.verdict)
    return "ppp_mecke", PPP_FIELDS, rows, verdicts


def _cmd_ppp_superpose(args):
    lams = args.lam_list if args.lam_list else [args.lam, args.lam]
    window = unit_square()
    rows, verdicts = [], []
    for res in verify_superposition(lams[0], lams[1], window, args.replicas,
                                    args.seed):
        rows.append({"check": res.name, "d": 2, "lambda": sum(lams),
                     "observed": res.observed, "expected": res.expected,
                     "sigma": res.sigma, "runs": args.replicas,
                     "seed": args.seed, "verdict": res.verdict})
        verdicts.append(res.verdict)
    return "ppp_superpose", PPP_FIELDS, rows, verdicts


def _cmd_ppp_grid(args):
    window = unit_square()
    eps_list = (0.2, 0.1, 0.05)
    tvs = [grid_count_tv(e, args.lam, window, args.replicas, args.seed)
           for e in eps_list]
    monotone = all(a >= b for a, b in zip(tvs, tvs[1:]))
    verdict = "PASS" if monotone and tvs[-1] < 0.05 else "FAIL"
    rows = [{"check": f"grid-tv(eps={e})", "d": 2, "lambda": args.lam,
             "observed": tv, "expected": 0.0, "sigma": "",
             "runs": args.replicas, "seed": args.seed, "verdict": verdict}
            for e, tv in zip(eps_list, tvs)]
    return "ppp_grid", PPP_FIELDS, rows, [verdict]


def _nu(args):
    return RadiusDist.decode(args.nu)


def _bool_row(args, stat, est, d):
    return {"model": "boolean", "d": d, "lambda": args.lam, "nu": args.nu,
            "r": getattr(args, "r", ""), "stat": stat, "estimate": est.value,
            "stderr": est.stderr,
            "trunc_err": getattr(est, "trunc_err", 0.0),
            "replicas": est.replicas, "seed": est.seed}


def _cmd_boolean_theta(args):
    est = estimate_theta_r(args.lam, _nu(args), args.r, args.replicas,
                           args.seed, d=args.d,
                           trunc=TruncationPolicy(args.trunc_eps))
    return "boolean_theta", BOOL_FIELDS, [_bool_row(args, "theta_r", est,
                                                    args.d)], []


def _cmd_boolean_annulus(args):
    est = estimate_annulus(args.lam, _nu(args), args.r, args.replicas,
                           args.seed, d=args.d,
                           trunc=TruncationPolicy(args.trunc_eps))
    return "boolean_annulus", BOOL_FIELDS, [_bool_row(args, "annulus", est,
                                                      args.d)], []


def _cmd_boolean_vacancy(args):
    rep = vacancy_probability(args.lam, _nu(args), args.replicas, args.seed,
                              d=args.d, trunc=TruncationPolicy(args.trunc_eps))
    row = _bool_row(args, "vacancy", rep.mc, args.d)
    closed = dict(row)
    closed["stat"] = "vacancy_closed_form"
    closed["estimate"] = rep.closed_form
    closed["stderr"] = 0.0
    return "boolean_vacancy", BOOL_FIELDS, [row, closed], [rep.verdict]


def _cmd_boolean_cit(args):
    star = StarPair(args.d, 4.0, 5.0)
    rep = insertion_tolerance(args.lam, star, _nu(args), args.replicas,
                              args.seed)
    row = _bool_row(args, "c_it", rep.mc, args.d)
    closed = dict(row)
    closed["stat"] = "c_it_closed_form"
    closed["estimate"] = rep.closed_form
    closed["stderr"] = 0.0
    return "boolean_cit", BOOL_FIELDS, [row, closed], [rep.verdict]


def _cmd_boolean_scan(args):
    rep = lambda_scan(_nu(args), args.r_list, args.lam_grid, args.replicas,
                      args.seed, d=args.d,
                      trunc=TruncationPolicy(args.trunc_eps))
    rows = [{"model": "boolean", "d": args.d, "lambda": r.lam, "nu": args.nu,
             "r": r.r, "stat": r.stat, "estimate": r.estimate,
             "stderr": r.stderr, "trunc_err": r.trunc_err,
             "replicas": args.replicas, "seed": args.seed}
            for r in rep.rows]
    return "boolean_scan", BOOL_FIELDS, rows, []


def _cmd_boolean_russo(args):
    rep = verify_russo_continuum(args.lam, _nu(args), args.replicas, args.seed,
                                 d=args.d)
    rows = []
    for stat, est in (("russo_fd", rep.fd), ("russo_piv", rep.piv)):
        row = {"model": "boolean", "d": args.d, "lambda": args.lam,
               "nu": args.nu, "r": "", "stat": stat, "estimate": est.value,
               "stderr": est.stderr, "trunc_err": 0.0,
               "replicas": est.replicas, "seed": est.seed}
        rows.append(row)
    rows.append({"model": "boolean", "d": args.d, "lambda": args.lam,
                 "nu": args.nu, "r": "", "stat": "russo_closed_form",
                 "estimate": rep.closed_form, "stderr": 0.0, "trunc_err": 0.0,
                 "replicas": args.replicas, "seed": args.seed})
    return "boolean_russo", BOOL_FIELDS, rows, [rep.verdict]


def _cmd_sharp_sums(args):
    thetas = [1.0] + [
        estimate_theta_n(args.d, k, args.p, args.replicas, args.seed).value
        for k in range(1, args.n)
    ]
    table = partial_sums(thetas)
    rows = [{"fit": "partial-sum", "kind": "discrete", "param": int(s),
             "value": float(v), "stderr": float(e), "r2": ""}
            for s, v, e in zip(table.scales, table.sums, table.stderrs)]
    return "sharp_sums", FIT_FIELDS, rows, []


def _cmd_sharp_check(args):
    grid = args.p_grid if args.p_grid else _parse_grid("0.3:0.7:0.02")
    ns = args.n_list if args.n_list else [2, 4, 8]
    cells = check_differential_inequality(args.d, ns, grid, args.c,
                                          args.replicas, args.seed)
    rows = [{"fit": "diff-ineq", "kind": cell.verdict,
             "param": f"n={int(cell.scale)};p={cell.param}",
             "value": cell.slack, "stderr": cell.slack_stderr, "r2": ""}
            for cell in cells]
    return "sharp_check", FIT_FIELDS, rows, [c.verdict for c in cells]


def _cmd_sharp_fitdecay(args):
    ns = args.n_list if args.n_list else [8, 16, 24, 32]
    ests = [estimate_theta_n(args.d, n, args.p, args.replicas, args.seed)
            for n in ns]
    fit = fit_exponential_decay(ns, [e.value for e in ests],
                                [e.stderr for e in ests])
    rows = [{"fit": "decay", "kind": ",".join(fit.flags) or "DECAYING",
             "param": f"p={args.p}", "value": fit.slope,
             "stderr": fit.slope_stderr, "r2": fit.r2}]
    return "sharp_fitdecay", FIT_FIELDS, rows, []


def _cmd_sharp_fitgrowth(args):
    grid = args.p_grid if args.p_grid else [0.55, 0.6, 0.65, 0.7]
    ests = [estimate_theta_n(args.d, args.n, p, args.replicas, args.seed)
            for p in grid]
    fit = fit_linear_growth(grid, [e.value for e in ests],
                            [e.stderr for e in ests], pc=0.5)
    rows = [{"fit": "growth", "kind": ",".join(fit.flags) or "ENVELOPE",
             "param": f"n={args.n}", "value": fit.rate,
             "stderr": fit.slope_stderr, "r2": ""}]
    return "sharp_fitgrowth", FIT_FIELDS, rows, []


def _cmd_sharp_lemma(args):
    f, fp = tilted_ramp_family(pc=0.5)
    rep = validate_lemma_family(f, fp, c=args.c if args.c else 0.1)
    verdict = "PASS" if rep.passed else "FAIL"
    rows = [{"fit": "lemma", "kind": verdict,
             "param": f"beta=[{rep.beta_interval[0]},{rep.beta_interval[1]}]",
             "value": rep.growth_rate, "stderr": "", "r2": ""}]
    return "sharp_lemma", FIT_FIELDS, rows, [verdict]


def _run_command(args, argv):
    out_dir = args.out or "."
    os.makedirs(out_dir, exist_ok=True)
    name, fields, rows, verdicts = args.func(args)
    csv_path = os.path.join(out_dir, f"{name}.csv")
    _write_csv(csv_path, fields, rows)
    _write_manifest(out_dir, name, argv, args, [csv_path])
    code = _exit_code(verdicts)
    print(f"{name}: wrote {csv_path} "
          f"({len(rows)} rows, exit {code})")
    return code


def _cmd_replay(args, argv):
    with open(args.manifest, encoding="utf-8") as fh:
        manifest = json.load(fh)
    with tempfile.TemporaryDirectory() as tmp:
        command = list(manifest["command"])
        # redirect output to the scratch directory
        if "--out" in command:
            command[command.index("--out") + 1] = tmp
        else:
            command += ["--out", tmp]
        code = main(command)
        if code == 1:
            return 1
        for fname, digest in manifest["outputs"].items():
            path = os.path.join(tmp, fname)
            if not os.path.exists(path) or _digest(path) != digest:
                print(f"replay: digest mismatch for {fname}", file=sys.stderr)
                return 2
    print("replay: digests match")
    return 0


def _add_common(sp):
    sp.add_argument("--d", type=int, default=2)
    sp.add_argument("--n", type=int, default=1)
    sp.add_argument("--n-list", type=_parse_ints, default=None)
    sp.add_argument("--p", type=float, default=0.5)
    sp.add_argument("--p-grid", type=_parse_grid, default=None)
    sp.add_argument("--lambda", dest="lam", type=float, default=1.0)
    sp.add_argument("--lambda-list", dest="lam_list", type=_parse_floats,
                    default=None)
    sp.add_argument("--lambda-grid", dest="lam_grid", type=_parse_grid,
                    default=None)
    sp.add_argument("--nu", type=str, default="fixed:1.0")
    sp.add_argument("--r", type=float, default=2.0)
    sp.add_argument("--r-list", type=_parse_floats, default=None)
    sp.add_argument("--replicas", type=int, default=10_000)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out", type=str, default=None)
    sp.add_argument("--threads", type=int, default=None)
    sp.add_argument("--trunc-eps", type=float, default=1e-3)
    sp.add_argument("--c", type=float, default=0.25)


COMMANDS = {
    ("bernoulli", "theta"): _cmd_bernoulli_theta,
    ("bernoulli", "curve"): _cmd_bernoulli_curve,
    ("bernoulli", "pc"): _cmd_bernoulli_pc,
    ("exact", "russo"): _cmd_exact_russo,
    ("exact", "fkg"): _cmd_exact_fkg,
    ("osss", "verify"): _cmd_osss_verify,
    ("osss", "revealment"): _cmd_osss_revealment,
    ("osss", "diffcheck"): _cmd_osss_diffcheck,
    ("ppp", "counts"): _cmd_ppp_counts,
    ("ppp", "mecke"): _cmd_ppp_mecke,
    ("ppp", "superpose"): _cmd_ppp_superpose,
    ("ppp", "grid"): _cmd_ppp_grid,
    ("boolean", "theta"): _cmd_boolean_theta,
    ("boolean", "annulus"): _cmd_boolean_annulus,
    ("boolean", "vacancy"): _cmd_boolean_vacancy,
    ("boolean", "cit"): _cmd_boolean_cit,
    ("boolean", "scan"): _cmd_boolean_scan,
    ("boolean", "russo"): _cmd_boolean_russo,
    ("sharp", "sums"): _cmd_sharp_sums,
    ("sharp", "check"): _cmd_sharp_check,
    ("sharp", "fitdecay"): _cmd_sharp_fitdecay,
    ("sharp", "fitgrowth"): _cmd_sharp_fitgrowth,
    ("sharp", "lemma"): _cmd_sharp_lemma,
}


def build_parser():
    parser = argparse.ArgumentParser(prog="percolab")
    sub = parser.add_subparsers(dest="group", required=True)
    groups = {}
    for (group, action), func in COMMANDS.items():
        if group not in groups:
            gp = sub.add_parser(group)
            groups[group] = gp.add_subparsers(dest="action", required=True)
        sp = groups[group].add_parser(action)
        _add_common(sp)
        sp.set_defaults(func=func)
    replay = sub.add_parser("replay")
    replay.add_argument("manifest")
    replay.set_defaults(func=None, action="replay")
    return parser


def main(argv=None):
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 1 if exc.code else 0
    _configure_threads(getattr(args, "threads", None))
    try:
        if args.group == "replay":
            return _cmd_replay(args, argv)
        return _run_command(args, argv)
    except Exception as exc:  # CLI boundary: report, do not traceback
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
