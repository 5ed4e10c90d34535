"""Command-line front end.

Subcommands: cg-sweep, walk-exact, walk-mc, coupled, threshold, qoracle,
xeb, reduction-demo, validate.  Options may come from a TOML config file
(--config); command-line flags override config values.  Identical
config+seed produces byte-identical output files.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

try:
    import tomllib
except ImportError:  # Python < 3.11
    import tomli as tomllib

import numpy as np

from . import __version__, architectures, cg_chain, coupled_walk, csvio
from . import metrics, qoracle, reduction, walk_exact, walk_mc
from .errors import ParameterError
from .noise import NoiseChannel, channel_from_spec, make_depolarizing

CG_SWEEP_HEADER = ["s", "z0", "z1", "z2", "z0m1", "z1m1", "z2m1", "fbar",
                   "ratio", "tvd_uniform_bound", "tvd_wn_bound",
                   "wn_reference", "valid"]


def _default_threads() -> int:
    return int(os.environ.get("WNRQC_THREADS", "1"))


def _add_channel_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--q", type=int, default=2, help="local dimension")
    p.add_argument("--channel", default="depolarizing",
                   choices=["depolarizing", "dephasing", "rotation", "custom"])
    p.add_argument("--eps", type=float, help="depolarizing/dephasing strength")
    p.add_argument("--theta", type=float, help="rotation angle")
    p.add_argument("--r", type=float, help="custom channel average infidelity")
    p.add_argument("--u", type=float, help="custom channel unitarity")


def _add_arch_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--arch", default="complete_graph",
                   choices=["ring1d", "complete_graph", "lattice"])
    p.add_argument("--n", type=int, help="qudit count")
    p.add_argument("--s", type=int, help="gate count (complete_graph)")
    p.add_argument("--depth", type=int, help="layer count (ring1d/lattice)")
    p.add_argument("--dims", help="comma-separated lattice dimensions")
    p.add_argument("--arch-seed", type=int, default=0,
                   help="seed for random diagrams")


def _add_common_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="TOML config file; flags override")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="output path (default stdout)")
    p.add_argument("--format", default="csv", choices=["csv", "json"])
    p.add_argument("--threads", type=int, default=None,
                   help="worker threads (default WNRQC_THREADS or 1)")


def _apply_config(args: argparse.Namespace, parser: argparse.ArgumentParser) -> None:
    """Fill args from a TOML table; explicit flags win because we only
    override values still at their subcommand-parser defaults."""
    if not getattr(args, "config", None):
        return
    with open(args.config, "rb") as f:
        table = tomllib.load(f)
    sub = None
    for action in parser._actions:
        if isinstance(action, argparse._SubParsersAction):
            sub = action.choices[args.command]
    known = {a.dest for a in sub._actions}
    for key, value in table.items():
        dest = key.replace("-", "_")
        if dest not in known:
            raise ParameterError(f"unknown config key {key!r} in {args.config}")
        if getattr(args, dest) == sub.get_default(dest):
            setattr(args, dest, value)


def _channel(args) -> NoiseChannel:
    spec = {"kind": args.channel, "q": args.q}
    if args.channel in ("depolarizing", "dephasing"):
        if args.eps is None:
            raise ParameterError(f"--eps required for {args.channel}")
        spec["eps"] = args.eps
    elif args.channel == "rotation":
        if args.theta is None:
            raise ParameterError("--theta required for rotation")
        spec["theta"] = args.theta
    else:
        if args.r is None or args.u is None:
            raise ParameterError("--r and --u required for custom")
        spec.update(r=args.r, u=args.u)
    return channel_from_spec(spec)


def _diagram(args) -> architectures.CircuitDiagram:
    if args.n is None:
        raise ParameterError("--n is required (flag or config)")
    if args.arch == "ring1d":
        if args.depth is None:
            raise ParameterError("--depth required for ring1d")
        return architectures.gen_ring1d(args.n, args.depth)
    if args.arch == "lattice":
        if args.depth is None or not args.dims:
            raise ParameterError("--depth and --dims required for lattice")
        dims = [int(x) for x in str(args.dims).split(",")]
        if int(np.prod(dims)) != args.n:
            raise ParameterError(f"--n {args.n} does not match dims product {dims}")
        return architectures.gen_lattice(dims, args.depth)
    if args.s is None:
        raise ParameterError("--s required for complete_graph")
    return architectures.gen_complete_graph(args.n, args.s, args.arch_seed)


def _emit(args, kind: str, header: list, rows: list, json_obj=None) -> None:
    if args.format == "json":
        obj = json_obj if json_obj is not None else [dict(zip(header, r)) for r in rows]
        text = json.dumps(obj, indent=2, sort_keys=True) + "\n"
    else:
        text = csvio.render_csv(kind, header, rows)
    if args.out:
        with open(args.out, "w", encoding="ascii", newline="\n") as f:
            f.write(text)
    else:
        sys.stdout.write(text)


def _bound_row(s: int, zt: metrics.ZTriple, wn_ref) -> list:
    rep = metrics.bounds_from_ztriple(zt)
    return [s, zt.z0, zt.z1, zt.z2, zt.z0m1, zt.z1m1, zt.z2m1, rep.fbar,
            rep.ratio, rep.tvd_uniform_bound, rep.tvd_wn_bound, wn_ref,
            rep.valid]


def cmd_cg_sweep(args) -> int:
    if args.n is None:
        raise ParameterError("--n is required (flag or config)")
    channel = _channel(args)
    if args.s_list:
        s_list = [int(x) for x in str(args.s_list).split(",")]
    else:
        if args.s_max is None:
            raise ParameterError("need --s-list or --s-max")
        s_list = sorted(set(np.linspace(max(args.s_min, 1), args.s_max,
                                        args.s_points).astype(int).tolist()))
    sweep = cg_chain.sweep_cg(args.n, args.q, channel, s_list)
    eps = channel.param if channel.kind in ("depolarizing", "dephasing") else None
    rows = []
    for s, zt in sweep:
        ref = (2.0 * eps * math.sqrt(s) / 3.0) if eps is not None else None
        rows.append(_bound_row(s, zt, ref))
    _emit(args, "cg-sweep", CG_SWEEP_HEADER, rows)
    return 0


def cmd_walk_exact(args) -> int:
    channel = _channel(args)
    diagram = _diagram(args)
    zm1 = [walk_exact.run_zm1(diagram, args.q, sig, n_cap=args.n_cap)
           for sig in (0.0, channel.sigma1, channel.sigma2)]
    zt = metrics.ZTriple(*zm1, provenance="exact")
    _emit(args, "walk", CG_SWEEP_HEADER, [_bound_row(diagram.s, zt, None)])
    return 0


def cmd_walk_mc(args) -> int:
    channel = _channel(args)
    threads = args.threads if args.threads is not None else _default_threads()
    if args.arch == "complete_graph" and args.resample:
        if args.n is None or args.s is None:
            raise ParameterError("--n and --s required for --resample")
        spec = ("complete_graph", args.n, args.s)
    else:
        spec = _diagram(args)
    zt = walk_mc.estimate_ztriple_mc(spec, args.q, channel, args.samples,
                                     args.seed, threads=threads)
    row = _bound_row(args.s if args.s else spec.s, zt, None)
    header = CG_SWEEP_HEADER + ["z0_se", "z1_se", "z2_se"]
    _emit(args, "walk", header, [row + list(zt.se)])
    return 0


def cmd_coupled(args) -> int:
    diagram = _diagram(args)
    if args.sigma is not None:
        sigma = args.sigma
    else:
        channel = _channel(args)
        sigma = channel.sigma1 if args.walk == "z1" else channel.sigma2
    if args.samples:
        reports = coupled_walk.mc_coupled(diagram, args.q, sigma, args.samples,
                                          args.seed,
                                          resample_pairs=args.arch == "complete_graph")
    else:
        _, reports = coupled_walk.run_coupled(diagram, args.q, sigma,
                                              n_cap=args.n_cap,
                                              report_every=args.report_every)
    nw = len(reports[0].w_profile)
    header = ["t", "m_ss"] + [f"w{k}" for k in range(nw)]
    rows = [[r.t, r.m_ss] + list(r.w_profile) for r in reports]
    _emit(args, "coupled", header, rows)
    return 0


def cmd_threshold(args) -> int:
    if not args.n_list:
        raise ParameterError("--n-list is required (flag or config)")
    n_values = [int(x) for x in str(args.n_list).split(",")]
    rows = []
    traces = {}
    for n in n_values:
        s_min = args.s_min if args.s_min else int(10 * n * math.log(n))
        s_max = args.s_max if args.s_max else 5 * s_min
        res = metrics.threshold_scan(
            n, args.q, lambda e: make_depolarizing(args.q, e), (s_min, s_max),
            dead_band=args.dead_band)
        rows.append([n, res.status, res.eps_star,
                     None if res.eps_star is None else n * res.eps_star,
                     res.bracket[0], res.bracket[1], len(res.trace)])
        traces[n] = [{"eps": e, "slope": sl, "dead_band": band}
                     for e, sl, band in res.trace]
    header = ["n", "status", "eps_star", "n_times_eps_star",
              "bracket_lo", "bracket_hi", "evaluations"]
    json_obj = {"results": [dict(zip(header, r)) for r in rows], "traces": traces}
    _emit(args, "threshold", header, rows, json_obj=json_obj)
    return 0 if all(r[1] == "converged" for r in rows) else 3


def cmd_qoracle(args) -> int:
    channel = _channel(args)
    threads = args.threads if args.threads is not None else _default_threads()
    if args.arch == "complete_graph" and args.resample:
        if args.n is None or args.s is None:
            raise ParameterError("--n and --s required for --resample")
        spec = ("complete_graph", args.n, args.s)
    else:
        spec = _diagram(args)
    results = list(qoracle._instance_iter(spec, args.q, channel, args.instances,
                                          args.seed, args.max_dim, threads))
    dim = float(args.q) ** args.n
    header = ["instance", "sum_pi2", "sum_pipn", "sum_pn2", "tvd_uniform"]
    rows = [[k, r.sum_pi2, r.sum_pipn, r.sum_pn2, r.tvd_uniform]
            for k, r in enumerate(results)]
    z0 = dim * np.mean([r.sum_pi2 for r in results])
    z1 = dim * np.mean([r.sum_pipn for r in results])
    z2 = dim * np.mean([r.sum_pn2 for r in results])
    rows.append(["mean", z0 / dim, z1 / dim, z2 / dim,
                 float(np.mean([r.tvd_uniform for r in results]))])
    _emit(args, "qoracle", header, rows,
          json_obj={"z0": z0, "z1": z1, "z2": z2, "instances": args.instances})
    return 0


def cmd_xeb(args) -> int:
    channel = _channel(args)
    threads = args.threads if args.threads is not None else _default_threads()
    if args.arch == "complete_graph" and args.resample:
        if args.n is None or args.s is None:
            raise ParameterError("--n and --s required for --resample")
        spec = ("complete_graph", args.n, args.s)
    else:
        spec = _diagram(args)
    res = qoracle.xeb_estimate(spec, args.q, channel, args.instances,
                               args.shots, args.seed, threads=threads)
    zt = cg_chain.run_ztriple_cg(args.n, args.q, args.s, channel) \
        if args.arch == "complete_graph" else None
    header = ["fhat", "se", "ci_lo", "ci_hi", "instances", "shots",
              "fbar_exact", "fhat_over_z0m1"]
    row = [res.fhat, res.se, res.ci95[0], res.ci95[1], res.instances, res.shots,
           None if zt is None else zt.z1m1 / zt.z0m1,
           None if zt is None else res.fhat / zt.z0m1]
    _emit(args, "xeb", header, [row])
    return 0


def cmd_reduction_demo(args) -> int:
    rng_diag = architectures.gen_complete_graph(args.n, args.s or 10 * args.n,
                                                args.arch_seed)
    inst = qoracle.simulate_instance(rng_diag, args.q, None, args.seed)
    f_grid = [float(x) for x in str(args.f_grid).split(",")]
    reports = []
    for fidelity in f_grid:
        reports.append(reduction.reduction_experiment(
            inst.p_ideal, args.n, args.q, fidelity, args.k, args.nu, args.mu,
            args.samples, args.seed,
            normalize_acceptance=args.normalize_acceptance))
    text = json.dumps(reports, indent=2, sort_keys=True) + "\n"
    if args.out:
        with open(args.out, "w", encoding="ascii", newline="\n") as f:
            f.write(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_validate(args) -> int:
    """Cross-engine agreement matrix at a configurable scale; non-zero exit
    on any failure.  --corrupt-sigma halves the flip rate fed to the walk
    engines (negative control: the quantum comparison must then fail)."""
    q = 2
    quick = args.scale == "quick"
    checks = []
    channel = make_depolarizing(q, 0.1)
    sigma1 = 0.5 * channel.sigma1 if args.corrupt_sigma else channel.sigma1

    diag2 = architectures.CircuitDiagram(n=2, gates=np.array([[0, 1]] * 5,
                                                             dtype=np.int32))
    zt2 = cg_chain.run_ztriple_cg(2, q, 5, channel)
    dev = abs(zt2.z1m1 - walk_exact.run_zm1(diag2, q, channel.sigma1))
    checks.append(("cg_chain == walk_exact at n=2", dev <= 1e-12, f"dev={dev:.2e}"))

    def chain_zm1(n: int, s: int) -> float:
        dist = cg_chain.initial_weight_dist(n, q)
        dist = cg_chain.evolve_weight_dist(dist, n, q, sigma1, s)
        return cg_chain.weighted_excess(dist, q)

    n_diag = 2000 if quick else 100000
    mean, se = walk_exact.run_zm1_cg_average(6, q, sigma1, 20, n_diag, seed=args.seed)
    dev = abs(mean - chain_zm1(6, 20)) / se
    checks.append(("walk_exact diagram-avg vs cg_chain", dev <= 3.0, f"{dev:.2f} se"))

    samples = 50000 if quick else 1000000
    st = walk_mc.estimate_z(("complete_graph", 6, 20), q, sigma1, samples, args.seed)
    dev = abs(st.zm1 - chain_zm1(6, 20)) / st.se
    checks.append(("walk_mc vs cg_chain", dev <= 3.0, f"{dev:.2f} se"))

    inst = 400 if quick else 4000
    zq = qoracle.estimate_ztriple_quantum(("complete_graph", 4, 12), q, channel,
                                          inst, args.seed)
    dev = abs(zq.z1m1 - chain_zm1(4, 12)) / zq.se[1]
    checks.append(("qoracle vs cg_chain (fbar path)", dev <= 3.0, f"{dev:.2f} se"))

    d6 = architectures.gen_ring1d(6, 4)
    _, reports = coupled_walk.run_coupled(d6, q, channel.sigma1)
    zm1 = walk_exact.run_zm1(d6, q, channel.sigma1)
    bound = (q**6 - 1) * reports[-1].m_ss
    checks.append(("coupled destined-mass lower bound", zm1 + 1e-15 >= bound,
                   f"zm1={zm1:.3e} bound={bound:.3e}"))

    failed = 0
    for name, ok, detail in checks:
        print(f"{'PASS' if ok else 'FAIL'}  {name}  ({detail})")
        failed += 0 if ok else 1
    return 1 if failed else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wnrqc",
        description="Walk engines and white-noise error bounds for noisy "
                    "random quantum circuits")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("cg-sweep", help="exact complete-graph bound sweep")
    _add_common_args(p); _add_channel_args(p)
    p.add_argument("--n", type=int)
    p.add_argument("--s-list", help="comma-separated gate counts")
    p.add_argument("--s-min", type=int, default=1)
    p.add_argument("--s-max", type=int)
    p.add_argument("--s-points", type=int, default=100)
    p.set_defaults(func=cmd_cg_sweep)

    p = sub.add_parser("walk-exact", help="exact 2^n walk on one diagram")
    _add_common_args(p); _add_channel_args(p); _add_arch_args(p)
    p.add_argument("--n-cap", type=int, default=walk_exact.DEFAULT_N_CAP)
    p.set_defaults(func=cmd_walk_exact)

    p = sub.add_parser("walk-mc", help="Monte Carlo walk estimate")
    _add_common_args(p); _add_channel_args(p); _add_arch_args(p)
    p.add_argument("--samples", type=int, default=100000)
    p.add_argument("--resample", action="store_true",
                   help="redraw complete-graph pairs per trajectory")
    p.set_defaults(func=cmd_walk_mc)

    p = sub.add_parser("coupled", help="coupled-walk destined-mass dump")
    _add_common_args(p); _add_channel_args(p); _add_arch_args(p)
    p.add_argument("--sigma", type=float, help="explicit flip rate")
    p.add_argument("--walk", default="z1", choices=["z1", "z2"],
                   help="which channel flip rate to use when --sigma absent")
    p.add_argument("--samples", type=int,
                   help="Monte Carlo trajectories (default: exact engine)")
    p.add_argument("--report-every", type=int, default=1)
    p.add_argument("--n-cap", type=int, default=coupled_walk.DEFAULT_N_CAP)
    p.set_defaults(func=cmd_coupled)

    p = sub.add_parser("threshold", help="noise-threshold scan per n")
    _add_common_args(p)
    p.add_argument("--q", type=int, default=2)
    p.add_argument("--n-list", help="comma-separated n values")
    p.add_argument("--s-min", type=int)
    p.add_argument("--s-max", type=int)
    p.add_argument("--dead-band", type=float, default=None)
    p.set_defaults(func=cmd_threshold)

    p = sub.add_parser("qoracle", help="exact quantum instance ensemble")
    _add_common_args(p); _add_channel_args(p); _add_arch_args(p)
    p.add_argument("--instances", type=int, default=1000)
    p.add_argument("--resample", action="store_true")
    p.add_argument("--max-dim", type=int, default=qoracle.DEFAULT_MAX_DIM)
    p.set_defaults(func=cmd_qoracle)

    p = sub.add_parser("xeb", help="linear cross-entropy statistic")
    _add_common_args(p); _add_channel_args(p); _add_arch_args(p)
    p.add_argument("--instances", type=int, default=1000)
    p.add_argument("--shots", type=int, default=100)
    p.add_argument("--resample", action="store_true")
    p.set_defaults(func=cmd_xeb)

    p = sub.add_parser("reduction-demo", help="rejection-sampling reduction demo")
    _add_common_args(p)
    p.add_argument("--n", type=int, default=6)
    p.add_argument("--q", type=int, default=2)
    p.add_argument("--s", type=int)
    p.add_argument("--arch-seed", type=int, default=0)
    p.add_argument("--k", type=float, default=50.0)
    p.add_argument("--f-grid", default="1,0.5,0.25")
    p.add_argument("--nu", type=float, default=0.0)
    p.add_argument("--mu", type=float, default=0.0)
    p.add_argument("--samples", type=int, default=100000)
    p.add_argument("--normalize-acceptance", action="store_true",
                   help="divide the acceptance threshold by F (rounds then "
                        "stay below 4k for any F)")
    p.set_defaults(func=cmd_reduction_demo)

    p = sub.add_parser("validate", help="cross-engine agreement matrix")
    _add_common_args(p)
    p.add_argument("--scale", default="quick", choices=["quick", "full"])
    p.add_argument("--corrupt-sigma", action="store_true",
                   help="negative-control test hook: corrupt the flip-rate "
                        "mapping; validation must then fail")
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _apply_config(args, parser)
        return args.func(args)
    except ParameterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
