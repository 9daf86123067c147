"""Experiment harness CLI.

Subcommands
-----------
``solve``            run one solver on y/dictionary files, write result.json
``synth-bench``      Monte Carlo benchmark on random Gaussian dictionaries
``threshold-sweep``  single-block thresholding-behavior study
``doa-bench``        multi-snapshot DOA scenario sweep

Every experiment writes a delimited trial table plus ``summary.json``
embedding the fully resolved configuration and the library version; unless
``--no-figures`` is given, a companion PNG figure is rendered next to the
tables.  Trial tables are byte-deterministic for a fixed seed; wall-clock
timings live only in the summary.

Exit codes: 0 on success, 1 on solver failure, 2 on config/parse errors.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .baselines import hard_threshold_reference, oracle_mmse
from .doa import (
    ArrayGeometry,
    DoaGrid,
    SourceModel,
    build_grid_dictionary,
    extract_doas,
    simulate_sources,
)
from .errors import BlockSblError, ParseError
from .inference import PosteriorState, SolverConfig, fast_solve, slow_solve, update_weights
from .io import read_matrix, read_vector, write_matrix
from .metrics import TrialResult, nmse, ospa, support_accuracy
from .model import HyperpriorSpec, build_instance, mmv_to_block
from . import report


# ---------------------------------------------------------------------------
# small helpers
# ---------------------------------------------------------------------------


def _trial_rng(seed: int, *key: int) -> np.random.Generator:
    """Per-trial substream; identical under serial and parallel execution."""
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=tuple(key)))


def _fmt(v) -> str:
    if isinstance(v, float):
        return f"{v:.12g}"
    return str(v)


def _write_csv(path, fieldnames, rows) -> None:
    with open(path, "w") as fh:
        fh.write(",".join(fieldnames) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(row[k]) for k in fieldnames) + "\n")


def _write_summary(path, config: dict, aggregates: dict, timing: dict) -> None:
    doc = {
        "library_version": __version__,
        "config": config,
        "aggregates": aggregates,
        # wall-clock section: excluded from the determinism guarantee
        "timing": timing,
    }
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _parse_prior_token(token: str) -> tuple[str, HyperpriorSpec]:
    """Parse 'kind[:param[:param...]]' into a labeled HyperpriorSpec."""
    parts = token.split(":")
    try:
        kind, params = parts[0], [float(p) for p in parts[1:]]
        if kind == "jeffreys":
            return token, HyperpriorSpec.jeffreys()
        if kind == "scaled-jeffreys":
            return token, HyperpriorSpec.scaled_jeffreys(params[0] if params else 1.0)
        if kind == "gamma":
            a, c = (params + [1.0, 1.0])[:2]
            return token, HyperpriorSpec.gamma(a, c)
        if kind == "inverse-gamma":
            return token, HyperpriorSpec.inverse_gamma(params[0] if params else 1.0)
        if kind == "gig":
            a, b, c = (params + [1.0, 1.0, 0.0])[:3]
            return token, HyperpriorSpec.gig(a, b, c)
    except (ValueError, IndexError) as exc:
        raise ParseError(f"bad prior token {token!r}: {exc}") from None
    raise ParseError(f"unknown prior {kind!r}")


def _prior_from_args(args) -> HyperpriorSpec:
    kind = args.prior
    try:
        if kind == "jeffreys":
            return HyperpriorSpec.jeffreys()
        if kind == "scaled-jeffreys":
            return HyperpriorSpec.scaled_jeffreys(args.c if args.c is not None else 1.0)
        if kind == "gamma":
            return HyperpriorSpec.gamma(args.a if args.a is not None else 1.0,
                                        args.c if args.c is not None else 1.0)
        if kind == "inverse-gamma":
            return HyperpriorSpec.inverse_gamma(args.b if args.b is not None else 1.0)
        if kind == "gig":
            if args.a is None or args.b is None:
                raise ParseError("--prior gig requires --a and --b")
            return HyperpriorSpec.gig(args.a, args.b, args.c if args.c is not None else 0.0)
    except ValueError as exc:
        raise ParseError(str(exc)) from None
    raise ParseError(f"unknown prior {kind!r}")


def _solver_config(args) -> SolverConfig:
    kwargs = {}
    if getattr(args, "chi", None) is not None:
        kwargs["chi"] = args.chi
    if getattr(args, "max_iterations", None) is not None:
        kwargs["max_iterations"] = args.max_iterations
    if getattr(args, "tol", None) is not None:
        kwargs["objective_rel_tol"] = args.tol
    try:
        return SolverConfig(**kwargs)
    except ValueError as exc:
        raise ParseError(str(exc)) from None


def _load_config(args) -> dict:
    if getattr(args, "config", None) is None:
        return {}
    try:
        with open(args.config) as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ParseError(f"cannot read config {args.config}: {exc}") from None
    if not isinstance(doc, dict):
        raise ParseError("config file must hold a JSON object")
    return doc


def _resolve(args, config: dict, key: str, default):
    cli_val = getattr(args, key.replace("-", "_"), None)
    if cli_val is not None:
        return cli_val
    if key in config:
        return config[key]
    return default


def _int_list(text: str) -> list[int]:
    return [int(t) for t in str(text).split(",") if t != ""]


def _float_list(text: str) -> list[float]:
    return [float(t) for t in str(text).split(",") if t != ""]


# ---------------------------------------------------------------------------
# solve
# ---------------------------------------------------------------------------


def cmd_solve(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    y = read_vector(args.y)
    phi = read_matrix(args.dict)
    if args.blocks is not None:
        sizes = _int_list(args.blocks)
    elif args.block_size is not None:
        if phi.shape[1] % args.block_size:
            raise ParseError(
                f"--block-size {args.block_size} does not divide M = {phi.shape[1]}"
            )
        sizes = [args.block_size] * (phi.shape[1] // args.block_size)
    else:
        raise ParseError("one of --blocks or --block-size is required")
    precisions = None
    if args.precision is not None:
        b_row = read_matrix(args.precision)
        precisions = [b_row] * len(sizes)
    inst = build_instance(y, phi, sizes, intra_block_precisions=precisions)
    prior = _prior_from_args(args)
    cfg = _solver_config(args)

    solver = args.solver
    if solver == "auto":
        solver = "slow" if prior.kind == "gig" else "fast"
    state = (fast_solve if solver == "fast" else slow_solve)(inst, prior, cfg)

    result = {
        "library_version": __version__,
        "solver": solver,
        "prior": {"kind": prior.kind, "a": prior.a, "b": prior.b, "c": prior.c},
        "lambda": state.lam,
        "gamma": [g if np.isfinite(g) else "inf" for g in state.gamma],
        "active": state.active.astype(int).tolist(),
        "iterations": state.iteration,
        "converged": state.converged,
        "objective": state.objective,
        "objective_trace": list(state.objective_trace),
        "x_hat_real": np.real(state.x_hat).tolist(),
        "x_hat_imag": np.imag(state.x_hat).tolist(),
    }
    with open(out / "result.json", "w") as fh:
        json.dump(result, fh, indent=2)
        fh.write("\n")
    write_matrix(out / "x_hat.txt", state.x_hat)
    if not args.no_figures:
        report.save_solve_figure(state.x_hat, state.objective_trace, out / "solve.png")
    print(f"wrote {out / 'result.json'}")
    return 0


# ---------------------------------------------------------------------------
# synth-bench
# ---------------------------------------------------------------------------


def make_synth_trial(rng, n, m, block_size, delta, snr_db_target):
    """One random benchmark problem: unit-norm Gaussian dictionary, random
    block support at the requested sparsity ratio, unit-variance weights,
    noise scaled to the target SNR."""
    K = m // block_size
    phi = rng.standard_normal((n, m))
    phi /= np.linalg.norm(phi, axis=0, keepdims=True)
    k_active = max(1, round(delta * n / block_size))
    support = np.sort(rng.choice(K, size=k_active, replace=False))
    x = np.zeros(m)
    for i in support:
        x[i * block_size : (i + 1) * block_size] = rng.standard_normal(block_size)
    px = phi @ x
    lam = 10.0 ** (snr_db_target / 10.0) * n / float(px @ px)
    y = px + rng.standard_normal(n) / np.sqrt(lam)
    inst = build_instance(y, phi, [block_size] * K)
    return inst, x, support, lam


def _synth_one_trial(params: dict, trial: int) -> dict:
    rng = _trial_rng(params["seed"], trial)
    inst, x_true, support, _ = make_synth_trial(
        rng, params["n"], params["m"], params["block_size"], params["delta"],
        params["snr_db"],
    )
    prior = HyperpriorSpec(**params["prior"])
    cfg = SolverConfig(chi=params["chi"], max_iterations=params["max_iterations"])
    t0 = time.perf_counter()
    state = fast_solve(inst, prior, cfg)
    est = np.flatnonzero(state.active)
    result = TrialResult(
        nmse=nmse(x_true, state.x_hat),
        support_accuracy=support_accuracy(support, est, inst.blocks.K),
        iterations=state.iteration,
        active_count=int(state.active.sum()),
        runtime_seconds=time.perf_counter() - t0,
    )
    row = {
        "trial": trial,
        "nmse": result.nmse,
        "support_accuracy": result.support_accuracy,
        "iterations": result.iterations,
        "active_count": result.active_count,
        "nmse_oracle": nmse(x_true, oracle_mmse(inst, support)),
    }
    if params["oracle"]:
        slow_cfg = SolverConfig(max_iterations=params["slow_iterations"])
        slow = slow_solve(inst, prior, slow_cfg)
        row["slow_nmse"] = nmse(x_true, slow.x_hat)
        row["support_match"] = int(np.array_equal(np.flatnonzero(slow.active), est))
    return {"row": row, "runtime": result.runtime_seconds}


def run_synth_bench(params: dict):
    """Run all trials (optionally in a process pool) in trial-index order."""
    trials = params["trials"]
    jobs = params.get("jobs", 1)
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            outs = list(pool.map(_synth_one_trial, [params] * trials, range(trials)))
    else:
        outs = [_synth_one_trial(params, t) for t in range(trials)]
    rows = [o["row"] for o in outs]
    runtimes = [o["runtime"] for o in outs]
    aggregates = {
        "mean_nmse": float(np.mean([r["nmse"] for r in rows])),
        "mean_nmse_oracle": float(np.mean([r["nmse_oracle"] for r in rows])),
        "mean_support_accuracy": float(np.mean([r["support_accuracy"] for r in rows])),
        "median_iterations": float(np.median([r["iterations"] for r in rows])),
        "mean_active_count": float(np.mean([r["active_count"] for r in rows])),
    }
    if params["oracle"]:
        aggregates["support_match_rate"] = float(np.mean([r["support_match"] for r in rows]))
        aggregates["mean_slow_nmse"] = float(np.mean([r["slow_nmse"] for r in rows]))
    timing = {
        "mean_solve_seconds": float(np.mean(runtimes)),
        "total_solve_seconds": float(np.sum(runtimes)),
    }
    return rows, aggregates, timing


def cmd_synth_bench(args) -> int:
    config = _load_config(args)
    n = int(_resolve(args, config, "n", 200))
    m = int(_resolve(args, config, "m", 2 * n))
    block_size = int(_resolve(args, config, "block-size", 10))
    delta = float(_resolve(args, config, "delta", 0.2))
    if not (0.0 < delta <= 1.0):
        raise ParseError(f"delta must lie in (0, 1], got {delta}")
    if m % block_size:
        raise ParseError(f"block size {block_size} does not divide M = {m}")
    trials = int(_resolve(args, config, "trials", 100))
    if trials < 1:
        raise ParseError("trials must be >= 1")
    prior = _prior_from_args(args)
    if prior.kind == "gig":
        raise ParseError("synth-bench drives the fast solver; gig is not supported")
    params = {
        "n": n,
        "m": m,
        "block_size": block_size,
        "delta": delta,
        "snr_db": float(_resolve(args, config, "snr-db", 15.0)),
        "trials": trials,
        "seed": int(_resolve(args, config, "seed", 0)),
        "chi": args.chi if args.chi is not None else float(config.get("chi", 1.0)),
        "max_iterations": int(_resolve(args, config, "max-iterations", 200)),
        "prior": {"kind": prior.kind, "a": prior.a, "b": prior.b, "c": prior.c},
        "oracle": bool(args.oracle or config.get("oracle", False)),
        "slow_iterations": int(config.get("slow_iterations", 2000)),
        "jobs": int(_resolve(args, config, "jobs", 1)),
    }
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    rows, aggregates, timing = run_synth_bench(params)
    fields = list(rows[0].keys())
    _write_csv(out / "trials.csv", fields, rows)
    _write_summary(out / "summary.json", params, aggregates, timing)
    if not args.no_figures:
        report.save_synth_figure(rows, aggregates["mean_nmse_oracle"], out / "synth_bench.png")
    print(
        f"trials={trials} mean_nmse={aggregates['mean_nmse']:.4g} "
        f"mean_support_accuracy={aggregates['mean_support_accuracy']:.4f} "
        f"median_iterations={aggregates['median_iterations']:.0f}"
    )
    return 0


# ---------------------------------------------------------------------------
# threshold-sweep
# ---------------------------------------------------------------------------

_SWEEP_DEFAULT_PRIORS = "jeffreys,scaled-jeffreys:1,gamma:1:1,inverse-gamma:1"


def run_threshold_sweep(sizes, alphas, priors, chi: float = 1.0):
    """Single fast update on y = alpha*ones(d) with the noise precision
    pinned at 1; emits the RMS amplitude ||x_hat||/sqrt(d) per prior plus
    the hard-threshold reference curve."""
    from . import fastupdate as fu

    rows = []
    for d in sizes:
        for label, spec in priors:
            for alpha in alphas:
                inst_a = build_instance(alpha * np.ones(d), np.eye(d), [d])
                state = PosteriorState(
                    gamma=np.array([np.inf]),
                    lam=1.0,
                    x_hat=np.zeros(d),
                    sigma_hat=np.zeros((0, 0)),
                    active=np.array([False]),
                    iteration=0,
                    objective=0.0,
                )
                sb = fu.sigma_bar(state, inst_a, 0)
                data = fu.block_local_data(sb, inst_a, 0, 1.0)
                res = fu.theorem1_limit(spec, data, 0.0, chi=chi)
                if np.isfinite(res.limit):
                    post = PosteriorState(
                        gamma=np.array([res.limit]),
                        lam=1.0,
                        x_hat=np.zeros(d),
                        sigma_hat=np.zeros((0, 0)),
                        active=np.array([True]),
                        iteration=0,
                        objective=0.0,
                    )
                    x_hat, _ = update_weights(post, inst_a)
                else:
                    x_hat = np.zeros(d)
                rows.append(
                    {"d": d, "prior": label, "alpha": float(alpha),
                     "rms": float(np.linalg.norm(x_hat) / np.sqrt(d))}
                )
        for alpha in alphas:
            ref = hard_threshold_reference(alpha * np.ones(d), d)
            rows.append({"d": d, "prior": "hard", "alpha": float(alpha),
                         "rms": float(np.linalg.norm(ref) / np.sqrt(d))})
    return rows


def cmd_threshold_sweep(args) -> int:
    config = _load_config(args)
    sizes = _int_list(_resolve(args, config, "d", "2,10"))
    a0, a1, count = (
        float(_resolve(args, config, "alpha-min", 0.0)),
        float(_resolve(args, config, "alpha-max", 3.0)),
        int(_resolve(args, config, "alpha-count", 121)),
    )
    alphas = np.linspace(a0, a1, count)
    priors = [
        _parse_prior_token(tok)
        for tok in str(_resolve(args, config, "priors", _SWEEP_DEFAULT_PRIORS)).split(",")
    ]
    chi = args.chi if args.chi is not None else float(config.get("chi", 1.0))
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    rows = run_threshold_sweep(sizes, alphas, priors, chi=chi)
    _write_csv(out / "threshold_sweep.csv", ["d", "prior", "alpha", "rms"], rows)
    _write_summary(
        out / "summary.json",
        {"d": sizes, "alphas": [a0, a1, count],
         "priors": [label for label, _ in priors], "chi": chi},
        {},
        {},
    )
    if not args.no_figures:
        report.save_threshold_figure(rows, out / "threshold_sweep.png")
    print(f"wrote {out / 'threshold_sweep.csv'} ({len(rows)} rows)")
    return 0


# ---------------------------------------------------------------------------
# doa-bench
# ---------------------------------------------------------------------------


def _doa_one_trial(params: dict, case: dict, snr_index: int, trial: int) -> dict:
    snr_db_val = params["snr_db"][snr_index]
    rng = _trial_rng(params["seed"], case["index"], snr_index, trial)
    geom = ArrayGeometry.uniform(params["sensors"], spacing=params["spacing"],
                                 wavelength=params["wavelength"])
    grid = DoaGrid.sin_spaced(params["grid_size"])
    model = SourceModel(
        doas_deg=np.asarray(params["doas"]),
        ar_coeff=case["beta"],
        snapshots=params["snapshots"],
    )
    Y, truth = simulate_sources(model, geom, grid, snr_db_val, rng)
    cov = model.amplitude_covariance()
    if case["correlated_prior"] and params["snapshots"] > 1:
        b_row = np.linalg.inv(cov)
        b_row = 0.5 * (b_row + b_row.conj().T)
    else:
        b_row = np.eye(params["snapshots"])
    psi = build_grid_dictionary(geom, grid)
    inst = mmv_to_block(Y, psi, b_row)
    prior = HyperpriorSpec.scaled_jeffreys(case["c"])
    cfg = SolverConfig(max_iterations=params["max_iterations"])
    t0 = time.perf_counter()
    state = fast_solve(inst, prior, cfg)
    est = extract_doas(state, grid)
    result = TrialResult(
        nmse=nmse(truth.amplitudes.reshape(-1), state.x_hat),
        support_accuracy=support_accuracy(truth.support, np.flatnonzero(state.active),
                                          inst.blocks.K),
        iterations=state.iteration,
        active_count=int(state.active.sum()),
        runtime_seconds=time.perf_counter() - t0,
        ospa=ospa(est, truth.doas_deg, cutoff=params["ospa_cutoff"],
                  order=params["ospa_order"]),
    )
    return {
        "row": {
            "beta": case["beta"],
            "snr_db": snr_db_val,
            "trial": trial,
            "ospa": result.ospa,
            "n_est": len(est),
            "iterations": result.iterations,
        },
        "runtime": result.runtime_seconds,
    }


def run_doa_bench(params: dict):
    rows, runtimes = [], []
    curves: dict[str, list] = {}
    for case in params["cases"]:
        for snr_index, snr_db_val in enumerate(params["snr_db"]):
            vals = []
            for trial in range(params["trials"]):
                outcome = _doa_one_trial(params, case, snr_index, trial)
                rows.append(outcome["row"])
                runtimes.append(outcome["runtime"])
                vals.append(outcome["row"]["ospa"])
            label = f"beta={case['beta']}"
            curves.setdefault(label, []).append((snr_db_val, float(np.mean(vals))))
    aggregates = {
        "mean_ospa": {
            label: {f"{snr:g}": v for snr, v in pts} for label, pts in curves.items()
        }
    }
    timing = {
        "mean_solve_seconds": float(np.mean(runtimes)),
        "total_solve_seconds": float(np.sum(runtimes)),
    }
    return rows, curves, aggregates, timing


def cmd_doa_bench(args) -> int:
    config = _load_config(args)
    sensors = int(_resolve(args, config, "sensors", 100))
    betas = _float_list(_resolve(args, config, "betas", "0,0.5,0.95"))
    c_values = _float_list(_resolve(args, config, "c-values", ""))
    if not c_values:
        # reference parameterization: c = 2 except 1.5 under strong correlation
        c_values = [1.5 if b >= 0.9 else 2.0 for b in betas]
    if len(c_values) != len(betas):
        raise ParseError("--c-values must match --betas in length")
    trials = int(_resolve(args, config, "trials", 50))
    params = {
        "sensors": sensors,
        "grid_size": int(_resolve(args, config, "grid-size", 2 * sensors)),
        "snapshots": int(_resolve(args, config, "snapshots", 10)),
        "doas": _float_list(_resolve(args, config, "doas", "-2,3,50")),
        "spacing": float(_resolve(args, config, "spacing", 0.5)),
        "wavelength": float(_resolve(args, config, "wavelength", 1.0)),
        "snr_db": _float_list(_resolve(args, config, "snr-db", "0,5,10,15,20")),
        "trials": trials,
        "seed": int(_resolve(args, config, "seed", 0)),
        "max_iterations": int(_resolve(args, config, "max-iterations", 200)),
        "ospa_cutoff": float(_resolve(args, config, "ospa-cutoff", 5.0)),
        "ospa_order": int(_resolve(args, config, "ospa-order", 1)),
        "correlated_prior": not bool(config.get("identity_prior", False)),
        "cases": [],
    }
    for idx, (beta, c) in enumerate(zip(betas, c_values)):
        params["cases"].append(
            {"index": idx, "beta": beta, "c": c,
             "correlated_prior": not bool(config.get("identity_prior", False))}
        )
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    rows, curves, aggregates, timing = run_doa_bench(params)
    _write_csv(out / "doa_trials.csv",
               ["beta", "snr_db", "trial", "ospa", "n_est", "iterations"], rows)
    _write_summary(out / "summary.json", params, aggregates, timing)
    if not args.no_figures:
        report.save_doa_figure(curves, out / "doa_bench.png")
    print(f"wrote {out / 'doa_trials.csv'} ({len(rows)} rows)")
    return 0


# ---------------------------------------------------------------------------
# parser / entry point
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="blocksbl",
        description="Block-sparse Bayesian learning experiment harness",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, prior_default=None):
        p.add_argument("--out", default="results", help="output directory")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--config", default=None, help="JSON config file")
        p.add_argument("--prior", default=prior_default,
                       choices=["jeffreys", "scaled-jeffreys", "gamma",
                                "inverse-gamma", "gig"])
        p.add_argument("--a", type=float, default=None, help="hyperprior parameter a")
        p.add_argument("--b", type=float, default=None, help="hyperprior parameter b")
        p.add_argument("--c", type=float, default=None, help="hyperprior parameter c")
        p.add_argument("--chi", type=float, default=None,
                       help="stability threshold in (0, 1]; 1 keeps all fixed points")
        p.add_argument("--trials", type=int, default=None)
        p.add_argument("--max-iterations", type=int, default=None)
        p.add_argument("--no-figures", action="store_true")

    p = sub.add_parser("solve", help="solve one instance from files")
    add_common(p, prior_default="jeffreys")
    p.add_argument("--y", required=True, help="observation vector file")
    p.add_argument("--dict", required=True, help="dictionary matrix file")
    p.add_argument("--blocks", default=None, help="comma-separated block sizes")
    p.add_argument("--block-size", type=int, default=None, help="uniform block size")
    p.add_argument("--precision", default=None,
                   help="shared intra-block precision matrix file")
    p.add_argument("--solver", default="auto", choices=["auto", "fast", "slow"])
    p.add_argument("--tol", type=float, default=None)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("synth-bench", help="random-dictionary Monte Carlo benchmark")
    add_common(p, prior_default="scaled-jeffreys")
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--m", type=int, default=None)
    p.add_argument("--block-size", type=int, default=None)
    p.add_argument("--delta", type=float, default=None, help="sparsity ratio")
    p.add_argument("--snr-db", type=float, default=None)
    p.add_argument("--oracle", action="store_true",
                   help="also run the slow solver for comparison")
    p.add_argument("--jobs", type=int, default=None, help="parallel trial workers")
    p.set_defaults(func=cmd_synth_bench)

    p = sub.add_parser("threshold-sweep", help="single-block thresholding study")
    add_common(p)
    p.add_argument("--d", default=None, help="comma-separated block sizes")
    p.add_argument("--alpha-min", type=float, default=None)
    p.add_argument("--alpha-max", type=float, default=None)
    p.add_argument("--alpha-count", type=int, default=None)
    p.add_argument("--priors", default=None,
                   help="comma-separated prior tokens, e.g. jeffreys,scaled-jeffreys:1")
    p.set_defaults(func=cmd_threshold_sweep)

    p = sub.add_parser("doa-bench", help="multi-snapshot DOA scenario sweep")
    add_common(p)
    p.add_argument("--sensors", type=int, default=None)
    p.add_argument("--grid-size", type=int, default=None)
    p.add_argument("--snapshots", type=int, default=None)
    p.add_argument("--doas", default=None, help="comma-separated true DOAs in degrees")
    p.add_argument("--betas", default=None, help="comma-separated AR(1) coefficients")
    p.add_argument("--c-values", default=None,
                   help="scaled-Jeffreys c per beta case")
    p.add_argument("--snr-db", default=None, help="comma-separated array SNRs in dB")
    p.set_defaults(func=cmd_doa_bench)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except BlockSblError as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        # malformed numeric config values (bad list entries, bad priors)
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
