"""Batch command-line interface.

Configuration comes from an optional JSON file plus flag overrides (flags
win).  Every command prints a JSON summary to stdout (seed included) and
writes CSV to --out where applicable.  Exit codes: 0 pass, 1 check
failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import sys
import time
from dataclasses import dataclass

import numpy as np

from . import kernels
from .arithmetic import diophantine_gamma
from .circle import verify_A1, verify_A2
from .cocycle import (
    Mat2,
    angle_contraction_rate,
    constant_cocycle,
    diag_rotation_cocycle,
    lyapunov_L,
    rotation_cocycle,
)
from .critical import build_critical_sets, build_scales
from .graphs import (
    backward_measure_stream,
    empirical_measure_stream,
    estimate_attractor,
    estimate_repeller,
    measure_distance,
    pushforward_measure,
)
from .skew import SkewProductMap, TorusPoint, omega_preset, system_preset
from .circle import SineFiberMap


@dataclass
class ExperimentConfig:
    map_preset: str = "example1"
    eps: float = 0.01
    rho: float = 2.0
    kappa: float = 2.5
    omega: str = "golden"
    steps: int = 100000
    grid: int = 50
    depth: int = 200
    seed: int = 0
    K: float = 10.0
    eta: float = 0.1
    mode: str = "practical"
    stages: int = 3
    out: str | None = None

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**d)

    def serialize(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def parse(cls, s: str) -> "ExperimentConfig":
        return cls.from_dict(json.loads(s))


def load_config(args) -> ExperimentConfig:
    cfg = ExperimentConfig()
    if args.config:
        with open(args.config) as fh:
            cfg = ExperimentConfig.from_dict(json.load(fh))
    for name in ("map", "eps", "rho", "kappa", "omega", "steps", "grid",
                 "depth", "seed", "K", "eta", "mode", "stages", "out"):
        val = getattr(args, name, None)
        if val is not None:
            key = "map_preset" if name == "map" else name
            setattr(cfg, key, val)
    if cfg.steps < 1:
        raise SystemExit2("steps must be >= 1")
    return cfg


class SystemExit2(SystemExit):
    def __init__(self, msg):
        print(f"error: {msg}", file=sys.stderr)
        super().__init__(2)


def build_system(cfg: ExperimentConfig) -> SkewProductMap:
    return system_preset(cfg.map_preset, omega=cfg.omega, eps=cfg.eps,
                         K=cfg.K, eta=cfg.eta)


def emit(payload: dict, out: str | None = None) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True, default=_jsonable)
    print(text)
    if out:
        with open(out, "w") as fh:
            fh.write(text + "\n")


def _jsonable(o):
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    if isinstance(o, float) and not math.isfinite(o):
        return repr(o)
    raise TypeError(f"not JSON serializable: {type(o)}")


def _fmt(v: float) -> str:
    return f"{v:.17g}"


# ---------------------------------------------------------------------------
# commands


def cmd_verify(cfg: ExperimentConfig) -> int:
    T = build_system(cfg)
    a1 = verify_A1(T.g, cfg.kappa)
    a2 = verify_A2(T.f, cfg.eps, cfg.rho)
    prof = diophantine_gamma(T.omega, 10**4)
    dioph_ok = prof.gamma_Q > 0.0
    report = {
        "seed": cfg.seed,
        "map_preset": cfg.map_preset,
        "omega": T.omega,
        "A1": {
            "passed": a1.passed,
            "degree": a1.degree,
            "max_slope": a1.max_slope,
            "min_slope": a1.min_slope,
            "easy_degree1": a1.easy_degree1,
            "failures": a1.failures,
        },
        "A2": {
            "passed": a2.passed,
            "witness_A": [a2.A.start, a2.A.length] if a2.A else None,
            "witness_B": [a2.B.start, a2.B.length] if a2.B else None,
            "failures": a2.failures,
        },
        "diophantine": {
            "passed": dioph_ok,
            "gamma_Q": prof.gamma_Q,
            "attaining_q": prof.attaining_q,
        },
        "passed": a1.passed and a2.passed and dioph_ok,
    }
    emit(report, cfg.out)
    return 0 if report["passed"] else 1


def cmd_orbit(cfg: ExperimentConfig, resume: bool = False,
              checkpoint: str | None = None) -> int:
    if not cfg.out:
        raise SystemExit2("orbit requires --out for the CSV")
    T = build_system(cfg)
    ckpt_path = checkpoint or cfg.out + ".ckpt.json"
    start_n = 0
    x, y = 0.0, 0.0
    mode = "w"
    if resume:
        try:
            with open(ckpt_path) as fh:
                ck = json.load(fh)
            start_n = ck["n"]
            x = float.fromhex(ck["x"])
            y = float.fromhex(ck["y"])
            mode = "a"
        except FileNotFoundError:
            pass
    n = cfg.steps
    chunk = 1 << 16
    with open(cfg.out, mode) as fh:
        if mode == "w":
            fh.write("n,x,y,logfp\n")
            fh.write(f"0,{_fmt(x)},{_fmt(y)},{_fmt(math.log(T.f.derivative(y)))}\n")
            start_n = 0
        k = start_n
        while k < n:
            m = min(chunk, n - k)
            xs = np.empty(m + 1)
            ys = np.empty(m + 1)
            logs = np.empty(m + 1)
            kernels.orbit_fill(*T._gd, *T._fd, T.omega, x, y, m, xs, ys, logs)
            rows = [
                f"{k + j},{_fmt(xs[j])},{_fmt(ys[j])},{_fmt(logs[j])}\n"
                for j in range(1, m + 1)
            ]
            fh.writelines(rows)
            x, y = float(xs[m]), float(ys[m])
            k += m
    with open(ckpt_path, "w") as fh:
        json.dump({"n": n, "x": x.hex(), "y": y.hex()}, fh)
    emit({"rows": n + 1, "out": cfg.out, "checkpoint": ckpt_path,
          "map_preset": cfg.map_preset, "omega": T.omega, "seed": cfg.seed})
    return 0


def cmd_lyapunov(cfg: ExperimentConfig) -> int:
    T = build_system(cfg)
    rng = np.random.default_rng(cfg.seed)
    p = TorusPoint(rng.random(), rng.random())
    _, _, s = T.orbit_reduce(p.x, p.y, cfg.steps)
    emit({
        "lyapunov": s / cfg.steps,
        "n": cfg.steps,
        "map_preset": cfg.map_preset,
        "omega": T.omega,
        "seed": cfg.seed,
        "start": [p.x, p.y],
    }, cfg.out)
    return 0


def cmd_graphs(cfg: ExperimentConfig) -> int:
    if not cfg.out:
        raise SystemExit2("graphs requires --out for the CSV")
    T = build_system(cfg)
    sets = build_critical_sets(T.f, cfg.eps)
    grid = np.arange(cfg.grid) / cfg.grid
    u = estimate_attractor(T, grid, cfg.depth, seed=sets.beta)
    s = estimate_repeller(T, grid, cfg.depth, seed=sets.A.midpoint())
    with open(cfg.out, "w") as fh:
        fh.write("x,u,s,residual_u,residual_s\n")
        for i in range(len(grid)):
            fh.write(
                f"{_fmt(grid[i])},{_fmt(u.values[i])},{_fmt(s.values[i])},"
                f"{_fmt(u.residuals[i])},{_fmt(s.residuals[i])}\n"
            )
    from .circle import circle_dist

    emit({
        "grid": cfg.grid,
        "depth": cfg.depth,
        "max_residual_u": float(np.max(u.residuals)),
        "max_residual_s": float(np.max(s.residuals)),
        "min_dist_u_s": float(min(
            circle_dist(float(a), float(b)) for a, b in zip(u.values, s.values)
        )),
        "applicable": u.applicable,
        "out": cfg.out,
        "seed": cfg.seed,
    })
    return 0


def cmd_scales(cfg: ExperimentConfig) -> int:
    T = build_system(cfg)
    sets = build_critical_sets(T.f, cfg.eps)
    run = build_scales(T, sets, mode=cfg.mode, stages=cfg.stages)
    payload = {"stages": run.summary(), "stopped": run.stopped,
               "mode": cfg.mode, "seed": cfg.seed}
    emit(payload, cfg.out)
    ok = run.stopped is None and all(
        p.component_count == 2 and p.boundary_gap > 0 for p in run.probes
    )
    return 0 if ok else 1


def cmd_probe(cfg: ExperimentConfig, stage: int = 0) -> int:
    if not cfg.out:
        raise SystemExit2("probe requires --out for the CSV")
    T = build_system(cfg)
    sets = build_critical_sets(T.f, cfg.eps)
    run = build_scales(T, sets, mode=cfg.mode, stages=stage + 1)
    if len(run.probes) <= stage:
        emit({"error": f"probe unavailable at stage {stage}", "stopped": run.stopped})
        return 1
    probe = run.probes[stage]
    with open(cfg.out, "w") as fh:
        fh.write("x,lift_phi\n")
        for curve in probe.samples:
            for xx, ll in zip(curve.xs, curve.lifts):
                fh.write(f"{_fmt(xx)},{_fmt(ll)}\n")
    emit({"probe": probe.summary(), "out": cfg.out, "seed": cfg.seed})
    return 0


def cmd_cocycle(cfg: ExperimentConfig, preset: str = "example2",
                trace_out: str | None = None) -> int:
    w = omega_preset(cfg.omega)
    rng = np.random.default_rng(cfg.seed)
    x0 = rng.random()
    if preset == "example2":
        phi = SineFiberMap(0.05 / (2.0 * math.pi))
        C = diag_rotation_cocycle(cfg.K, phi, w)
    elif preset == "diag":
        C = constant_cocycle(w, Mat2(cfg.K, 0.0, 0.0, 1.0 / cfg.K))
    elif preset == "rotation":
        C = rotation_cocycle(w)
    else:
        raise SystemExit2(f"unknown cocycle preset {preset!r}")
    trace = np.empty(cfg.steps) if trace_out else None
    L = lyapunov_L(C, x0, cfg.steps, trace)
    v, w2 = (1.0, 0.0), (0.0, 1.0)
    th = rng.random() * math.pi
    v = (math.cos(th), math.sin(th))
    w2 = (-math.sin(th), math.cos(th))
    rep = angle_contraction_rate(C, x0, v, w2, cfg.steps)
    if trace_out is not None:
        with open(trace_out, "w") as fh:
            fh.write("n,log_norm\n")
            for i in range(cfg.steps):
                fh.write(f"{i + 1},{_fmt(trace[i])}\n")
    emit({
        "L": L,
        "angle_rate": rep.rate,
        "two_L_from_vectors": rep.L_comparison,
        "n": cfg.steps,
        "K": cfg.K,
        "preset": preset,
        "omega": w,
        "seed": cfg.seed,
    }, cfg.out)
    return 0


def cmd_dioph(cfg: ExperimentConfig) -> int:
    from .arithmetic import continued_fraction

    w = omega_preset(cfg.omega)
    prof = diophantine_gamma(w, max(cfg.steps, 10**4))
    cf = continued_fraction(w)
    emit({
        "omega": w,
        "gamma_Q": prof.gamma_Q,
        "Q": prof.Q,
        "attaining_q": prof.attaining_q,
        "convergents": [[p, q] for p, q in cf.convergents[:20]],
        "coefficients": cf.coefficients[:20],
        "rational": cf.rational,
        "seed": cfg.seed,
    }, cfg.out)
    return 0 if prof.gamma_Q > 0 else 1


def cmd_lemmas(cfg: ExperimentConfig) -> int:
    """Return-time, resonant-window, and clear-translate checks on seeded
    random instances; pass/fail JSON with witnesses."""
    from .arithmetic import find_clear_translate, resonant_window_check, return_gap_bound
    from .circle import ArcInterval, ArcSet

    w = omega_preset(cfg.omega)
    gamma = diophantine_gamma(w, 10**4).gamma_Q
    rng = np.random.default_rng(cfg.seed)

    gap_ok = True
    gap_witness = None
    for _ in range(200):
        delta = float(rng.uniform(1e-5, 0.02))
        arc = ArcInterval(float(rng.random()), delta)
        bound = return_gap_bound(gamma, delta)
        aset = ArcSet([arc])
        for k in range(1, min(bound, 200) + 1):
            if aset.intersects(aset.translate(k * w)):
                gap_ok = False
                gap_witness = {"arc": [arc.start, arc.length], "k": k, "bound": bound}
                break

    nu = 3
    I1 = ArcInterval(float(rng.random()), 0.01)
    I2 = I1.translate(nu * w).translate(0.002)
    wrep = resonant_window_check(I1, I2, nu, w, gamma)

    ct_ok = True
    ct_detail = None
    for trial in range(5):
        r = np.random.default_rng(cfg.seed + trial)
        obstacles = [(ArcSet([ArcInterval(float(r.random()), 1e-5)]), 200, 1)]
        J = ArcSet([ArcInterval(float(r.random()), 1e-6)])
        res = find_clear_translate(J, obstacles, w, 400)
        if res.hypothesis_failures or res.admissible_count < 200 or res.k is None:
            ct_ok = False
            ct_detail = {"failures": res.hypothesis_failures,
                         "admissible": res.admissible_count}

    payload = {
        "omega": w,
        "gamma_Q": gamma,
        "seed": cfg.seed,
        "return_gap": {"passed": gap_ok, "witness": gap_witness},
        "resonant_window": {
            "passed": wrep.passed,
            "nu": wrep.nu,
            "N": wrep.N,
            "J": [wrep.J.start, wrep.J.length],
            "failures": wrep.failures,
        },
        "clear_translate": {"passed": ct_ok, "detail": ct_detail},
        "passed": gap_ok and wrep.passed and ct_ok,
    }
    emit(payload, cfg.out)
    return 0 if payload["passed"] else 1


def cmd_measures(cfg: ExperimentConfig) -> int:
    T = build_system(cfg)
    rng = np.random.default_rng(cfg.seed)
    p = TorusPoint(rng.random(), rng.random())
    shape = (cfg.grid, cfg.grid)
    fwd = empirical_measure_stream(T, p, cfg.steps, shape)
    bwd = backward_measure_stream(T, p, cfg.steps, shape)
    sets = build_critical_sets(T.f, cfg.eps)
    # the reference needs to be denser than the orbit histograms it is
    # compared against, or the TV floor is its own sampling error
    push = pushforward_measure(T, shape, cfg.depth, 40 * cfg.grid * cfg.grid,
                               seed=sets.beta)
    emit({
        "tv_forward_vs_pushforward": measure_distance(fwd, push),
        "tv_forward_vs_backward": measure_distance(fwd, bwd),
        "n": cfg.steps,
        "grid": cfg.grid,
        "map_preset": cfg.map_preset,
        "seed": cfg.seed,
    }, cfg.out)
    return 0


def cmd_bench(cfg: ExperimentConfig) -> int:
    from . import _kernels_ref as pure

    T = build_system(cfg)
    n = cfg.steps
    res = {"implementation": kernels.IMPLEMENTATION, "n": n, "seed": cfg.seed}
    t0 = time.perf_counter()
    kernels.orbit_reduce(*T._gd, *T._fd, T.omega, 0.1, 0.2, n)
    res["selected_steps_per_s"] = n / (time.perf_counter() - t0)
    np_pure = max(n // 100, 1000)
    t0 = time.perf_counter()
    pure.orbit_reduce(*T._gd, *T._fd, T.omega, 0.1, 0.2, np_pure)
    res["pure_steps_per_s"] = np_pure / (time.perf_counter() - t0)
    if kernels.COMPILED:
        res["speedup"] = res["selected_steps_per_s"] / res["pure_steps_per_s"]
    emit(res, cfg.out)
    return 0


# ---------------------------------------------------------------------------


def make_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="snalab",
                                 description="quasi-periodically forced circle map lab")
    ap.add_argument("--config", help="JSON config file (flags override)")
    ap.add_argument("--map", help="system preset: t0 | example1 | kkho | arctan")
    ap.add_argument("--eps", type=float)
    ap.add_argument("--rho", type=float)
    ap.add_argument("--kappa", type=float)
    ap.add_argument("--omega", help="golden | silver | invroot2 | float literal")
    ap.add_argument("--steps", type=int)
    ap.add_argument("--grid", type=int)
    ap.add_argument("--depth", type=int)
    ap.add_argument("--seed", type=int)
    ap.add_argument("--K", type=float)
    ap.add_argument("--eta", type=float)
    ap.add_argument("--mode", choices=["paper", "practical"])
    ap.add_argument("--stages", type=int)
    ap.add_argument("--out")
    sub = ap.add_subparsers(dest="command", required=True)
    sub.add_parser("verify")
    p_orbit = sub.add_parser("orbit")
    p_orbit.add_argument("--resume", action="store_true")
    p_orbit.add_argument("--checkpoint")
    sub.add_parser("lyapunov")
    sub.add_parser("graphs")
    sub.add_parser("scales")
    p_probe = sub.add_parser("probe")
    p_probe.add_argument("--stage", type=int, default=0)
    p_coc = sub.add_parser("cocycle")
    p_coc.add_argument("--preset", default="example2",
                       choices=["example2", "diag", "rotation"])
    p_coc.add_argument("--trace-out")
    sub.add_parser("dioph")
    sub.add_parser("lemmas")
    sub.add_parser("measures")
    sub.add_parser("bench")
    return ap


def main(argv=None) -> int:
    ap = make_parser()
    args = ap.parse_args(argv)
    try:
        cfg = load_config(args)
        if args.command == "verify":
            return cmd_verify(cfg)
        if args.command == "orbit":
            return cmd_orbit(cfg, resume=args.resume, checkpoint=args.checkpoint)
        if args.command == "lyapunov":
            return cmd_lyapunov(cfg)
        if args.command == "graphs":
            return cmd_graphs(cfg)
        if args.command == "scales":
            return cmd_scales(cfg)
        if args.command == "probe":
            return cmd_probe(cfg, stage=args.stage)
        if args.command == "cocycle":
            return cmd_cocycle(cfg, preset=args.preset, trace_out=args.trace_out)
        if args.command == "dioph":
            return cmd_dioph(cfg)
        if args.command == "lemmas":
            return cmd_lemmas(cfg)
        if args.command == "measures":
            return cmd_measures(cfg)
        if args.command == "bench":
            return cmd_bench(cfg)
        raise SystemExit2(f"unknown command {args.command}")
    except SystemExit:
        raise
    except (ValueError, RuntimeError) as e:
        emit({"error": str(e), "type": type(e).__name__})
        return 1


if __name__ == "__main__":
    sys.exit(main())
