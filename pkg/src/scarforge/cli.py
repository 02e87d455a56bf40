"""Command-line front end: ``scarforge <group> <command> [options]``.

Every command prints one JSON report on stdout. The exit status is 0 when all
checks in the report pass, 1 when a check fails and 2 on usage errors.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from fractions import Fraction

import numpy as np

from . import circuits, dynamics, hamiltonians, metrics, mpscompile, qsim, refstates, scarprep, xiprep
from .errors import ScarforgeError


class UsageError(Exception):
    pass


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise UsageError(msg)


def _check(checks: dict, name: str, ok: bool) -> None:
    checks[name] = bool(ok)


# ----------------------------------------------------------------- xi


def cmd_xi_linear(a) -> dict:
    _require(a.n >= 4, "--n must be >= 4")
    _require(a.xi >= 0, "--xi must be >= 0")
    m = a.n - 2
    circ = xiprep.build_linear_circuit(m, a.xi, tilde=a.tilde)
    out = circuits.simulate(circ)
    oracle = refstates.strip(refstates.xi_state(a.n, a.xi))
    if a.tilde:
        oracle = refstates.tilde_transform(oracle, first_site=2)
    fid = metrics.fidelity(out, oracle)
    if a.out:
        circuits.save(circ, a.out)
    checks = {}
    _check(checks, "fidelity", fid >= 1 - a.tol)
    return {
        "params": {"n": a.n, "m": m, "xi": a.xi, "tilde": a.tilde},
        "metrics": {"fidelity": fid, "angles": list(xiprep.angle_schedule(m, a.xi, a.tilde).theta),
                    "gate_counts": circuits.gate_counts(circ)},
        "checks": checks,
    }


def cmd_xi_stitch(a) -> dict:
    _require(a.n >= 4, "--n must be >= 4")
    _require(a.block >= 1 and (a.n - 2) % a.block == 0, "--block must divide n-2")
    _require(a.xi >= 0, "--xi must be >= 0")
    m, k = a.block, (a.n - 2) // a.block
    plan = xiprep.StitchPlan(k, m, a.xi)
    _require(plan.n_qubits <= qsim.MAX_QUBITS, f"stitched register needs {plan.n_qubits} qubits")
    circ = xiprep.build_stitch_circuit(plan, tilde=not a.signed)
    if a.out:
        circuits.save(circ, a.out)
    state, p_sim = xiprep.run_stitch(plan, tilde=not a.signed)
    p_exact = xiprep.success_probability_exact(m, k, a.xi)
    oracle = refstates.xi_inner_state(plan.n_primary, a.xi, tilde=not a.signed)
    res: dict = {"success_probability": p_exact, "success_probability_simulated": p_sim,
                 "gate_counts": circuits.gate_counts(circ)}
    checks = {}
    if a.xi == 1.0:
        frac = xiprep.success_probability_closed(m, k)
        res["success_probability_exact"] = f"{frac.numerator}/{frac.denominator}"
        _check(checks, "closed_form", abs(float(frac) - p_exact) < a.tol)
    _check(checks, "simulated_probability", abs(p_sim - p_exact) < a.tol)
    if state is not None:
        fid = metrics.fidelity(state, oracle)
        res["postselected_fidelity"] = fid
        _check(checks, "postselected_fidelity", fid >= 1 - a.tol)
    if a.shots:
        out = circuits.simulate(circ)
        counts = qsim.sample(out, a.shots, a.seed)
        n_anc = plan.n_ancillas
        ok = sum(c for i, c in counts.items() if i & ((1 << n_anc) - 1) == 0)
        res["success_probability_sampled"] = ok / a.shots
    return {"params": {"n": a.n, "block": m, "k_blocks": k, "xi": a.xi, "signed": a.signed,
                       "shots": a.shots, "seed": a.seed},
            "metrics": res, "checks": checks}


# ----------------------------------------------------------------- sk


def cmd_sk_mps(a) -> dict:
    _require(a.m >= 1 and a.k >= 0, "need --m >= 1 and --k >= 0")
    _require(math.comb(a.m - a.k + 1, a.k) >= 1 if a.m - a.k + 1 >= 0 else False, "no constrained strings for (m, k)")
    _require(a.m <= 20, "--m must be <= 20")
    mps = mpscompile.projected_dicke_mps(a.m, a.k)
    stair = mpscompile.compile_mps(mps)
    circ = stair.circuit(m=a.m, k=a.k)
    if a.out:
        circuits.save(circ, a.out)
    fid = metrics.fidelity(circuits.simulate(circ), refstates.projected_dicke(a.m, a.k))
    res = {"fidelity": fid, "bond_dimensions": list(stair.bonds), "n_blocks": len(stair.blocks),
           "block_widths": [len(w) for w, _ in stair.blocks], "gate_counts": circuits.gate_counts(circ)}
    if a.k >= 1:
        res["depth_estimate"] = mpscompile.depth_estimate(a.m, a.k)
    return {"params": {"m": a.m, "k": a.k}, "metrics": res, "checks": {"fidelity": fid >= 1 - a.tol}}


def cmd_sk_variational(a) -> dict:
    _require(a.k >= 1 and a.n >= 2 * a.k + 2, "need k >= 1 and n >= 2k+2")
    _require(a.restarts >= 1, "--restarts must be >= 1")
    _require(a.n <= 22, "--n must be <= 22")
    r = scarprep.optimize_ansatz(a.n, a.k, a.restarts, a.seed, stop_below=a.stop_below)
    spec = scarprep.build_ansatz(a.n, a.k)
    circ = scarprep.ansatz_circuit(spec, r.theta, final_z=True)
    fid = metrics.fidelity(circuits.simulate(circ), refstates.scar_state(a.n, a.k))
    if a.out:
        circuits.save(circ, a.out)
    if a.csv:
        with open(a.csv, "w") as fh:
            fh.write(r.history_csv())
    res = {"infidelity": r.infidelity, "circuit_fidelity": fid, "n_params": spec.n_params,
           "sector_dim": refstates.count_constrained(a.n, a.k), "best_restart": r.best_restart,
           "restarts_run": len(r.history), "angles": list(r.theta),
           "gate_counts": circuits.gate_counts(scarprep.ansatz_circuit(spec, r.theta, strip_boundary=True))}
    checks = {"infidelity": r.infidelity < a.tol, "circuit_consistent": abs((1 - fid) - r.infidelity) < 1e-9}
    return {"params": {"n": a.n, "k": a.k, "restarts": a.restarts, "seed": a.seed}, "metrics": res, "checks": checks}


def cmd_sk_kmax(a) -> dict:
    _require(a.n % 2 == 0 and a.n >= 6, "--n must be even and >= 6")
    N = a.n
    comp = scarprep.kmax_compressed_circuit(N)
    cstate = circuits.simulate(comp)
    hj = hamiltonians.expectation(hamiltonians.build_HJ_compressed(N), cstate)
    checks = {"H_J": abs(hj + (N - 3)) < a.tol}
    res: dict = {"H_J": hj, "H_J_ideal": -(N - 3), "H_Delta": hamiltonians.H_DELTA_COMPRESSED,
                 "H_lambda": hamiltonians.H_LAMBDA_COMPRESSED}
    if a.compressed:
        circ = comp
        dist = metrics.distribution_from_state(cstate)
        res["fib_projection_weight"] = sum(p for i, p in dist.probs.items()
                                           if scarprep.compressed_fib_projection(qsim.bitstring(i, comp.n_qubits)))
        full = scarprep.decode_state(cstate)
    else:
        circ = scarprep.kmax_circuit(N)
        full = circuits.simulate(circ)
    target = refstates.tilde_transform(refstates.scar_state(N, N // 2 - 1))
    fid = metrics.fidelity(full, target)
    _check(checks, "fidelity", fid >= 1 - a.tol)
    res["fidelity"] = fid
    res["gate_counts"] = circuits.gate_counts(circ)
    if not a.compressed:
        _check(checks, "two_qubit_gates", res["gate_counts"]["two_qubit"] == N - 3)
    if a.out:
        circuits.save(circ, a.out)
    return {"params": {"n": N, "compressed": a.compressed}, "metrics": res, "checks": checks}


# ----------------------------------------------------------------- adiabatic


def cmd_adiabatic_sweep(a) -> dict:
    _require(4 <= a.n <= 16, "--n must be in [4, 16]")
    _require(a.t >= 0 and a.steps >= 1, "need --t >= 0 and --steps >= 1")
    r = dynamics.adiabatic_evolve(dynamics.SweepConfig(a.n, a.t, a.steps), record=bool(a.csv))
    if a.csv:
        metrics.write_csv(a.csv, ["s_over_T", "overlap"], r.curve)
    checks = {}
    if a.min_fidelity is not None:
        _check(checks, "fidelity", r.fidelity >= a.min_fidelity)
    return {"params": {"n": a.n, "t": a.t, "steps": a.steps, "backend": r.backend},
            "metrics": {"fidelity": r.fidelity}, "checks": checks}


def cmd_adiabatic_gap(a) -> dict:
    _require(4 <= a.n <= 16, "--n must be in [4, 16]")
    _require(a.points >= 2, "--points must be >= 2")
    g = dynamics.gap_scan(a.n, a.points)
    if a.csv:
        metrics.write_csv(a.csv, ["s_over_T", "gap"], zip(g.s_over_T.tolist(), g.gaps.tolist()))
    checks = {"gap_positive": g.minimum > 0, "minimum_at_end": g.argmin == 1.0}
    return {"params": {"n": a.n, "points": a.points},
            "metrics": {"min_gap": g.minimum, "argmin_s_over_T": g.argmin, "degenerate_points": g.degenerate,
                        "reference_gap_infinite_N": 1 - 1 / math.sqrt(2)},
            "checks": checks}


def cmd_adiabatic_tstar(a) -> dict:
    _require(4 <= a.n <= 16, "--n must be in [4, 16]")
    T = dynamics.find_Tstar(a.n, a.target, a.steps)
    if a.csv:
        metrics.write_csv(a.csv, ["N", "T_star"], [(a.n, T)])
    return {"params": {"n": a.n, "target": a.target, "steps": a.steps}, "metrics": {"T_star": T}, "checks": {}}


# ----------------------------------------------------------------- verify


def cmd_verify_revival(a) -> dict:
    _require(a.n >= 4, "--n must be >= 4")
    period = dynamics.revival_period(a.delta, a.j)
    auto = a.t == "auto"
    try:
        t = period if auto else float(a.t)
    except ValueError:
        raise UsageError("--t must be a number or 'auto'") from None
    f = dynamics.revival_fidelity(a.n, a.xi, a.delta, a.j, t)
    checks = {}
    if auto:
        _check(checks, "revival", abs(f - 1) < a.tol)
    if a.csv:
        ts = np.linspace(0, 2 * period, 201)
        metrics.write_csv(a.csv, ["t", "revival"],
                          [(float(x), dynamics.revival_fidelity(a.n, a.xi, a.delta, a.j, x)) for x in ts])
    return {"params": {"n": a.n, "xi": a.xi, "delta": a.delta, "j": a.j, "t": t},
            "metrics": {"fidelity": f, "period": period}, "checks": checks}


def cmd_verify_project_mz(a) -> dict:
    _require(4 <= a.n <= qsim.MAX_QUBITS, "--n out of range")
    _require(0 <= a.k <= refstates.max_tower_k(a.n), "--k out of range for the scar tower")
    xi = refstates.xi_state(a.n, a.xi)
    state, prob = dynamics.project_magnetization(xi, a.k)
    fid = metrics.fidelity(state, refstates.scar_state(a.n, a.k))
    Z = refstates.normalization_Z(a.n, a.xi)
    expect = abs(a.xi) ** (2 * a.k) * refstates.count_constrained(a.n, a.k) / Z
    res = {"fidelity": fid, "probability": prob, "probability_expected": expect}
    if a.xi == 1.0:
        fr = Fraction(refstates.count_constrained(a.n, a.k), refstates.fib(a.n))
        res["probability_exact"] = f"{fr.numerator}/{fr.denominator}"
    checks = {"fidelity": abs(fid - 1) < a.tol, "probability": abs(prob - expect) < a.tol}
    return {"params": {"n": a.n, "xi": a.xi, "k": a.k}, "metrics": res, "checks": checks}


# ----------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="scarforge", description="Scar-state preparation circuits and checks.")
    p.add_argument("--timing", action="store_true", help="include wall time in the report")
    groups = p.add_subparsers(dest="group", required=True)

    def sub(group, name, fn, tol):
        s = group.add_parser(name)
        s.set_defaults(fn=fn)
        s.add_argument("--tol", type=float, default=tol, help=f"check tolerance (default {tol:g})")
        return s

    xi = groups.add_parser("xi", help="|xi> state circuits").add_subparsers(dest="cmd", required=True)
    s = sub(xi, "linear", cmd_xi_linear, 1e-10)
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--xi", type=float, required=True)
    s.add_argument("--tilde", action="store_true")
    s.add_argument("--out")
    s = sub(xi, "stitch", cmd_xi_stitch, 1e-10)
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--block", type=int, required=True)
    s.add_argument("--xi", type=float, default=1.0)
    s.add_argument("--signed", action="store_true", help="append the odd-site Z layer")
    s.add_argument("--shots", type=int, default=0)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out")

    sk = groups.add_parser("sk", help="scar eigenstate circuits").add_subparsers(dest="cmd", required=True)
    s = sub(sk, "mps", cmd_sk_mps, 1e-8)
    s.add_argument("--m", type=int, required=True)
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--out")
    s = sub(sk, "variational", cmd_sk_variational, 1e-8)
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--restarts", type=int, default=scarprep.DEFAULT_RESTARTS)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--stop-below", type=float, default=scarprep.EARLY_EXIT)
    s.add_argument("--csv", help="per-restart infidelity history")
    s.add_argument("--out")
    s = sub(sk, "kmax", cmd_sk_kmax, 1e-10)
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--compressed", action="store_true")
    s.add_argument("--out")

    ad = groups.add_parser("adiabatic", help="adiabatic preparation").add_subparsers(dest="cmd", required=True)
    s = sub(ad, "sweep", cmd_adiabatic_sweep, 0.0)
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--t", type=float, required=True)
    s.add_argument("--steps", type=int, default=1000)
    s.add_argument("--min-fidelity", type=float)
    s.add_argument("--csv")
    s = sub(ad, "gap", cmd_adiabatic_gap, 0.0)
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--points", type=int, default=21)
    s.add_argument("--csv")
    s = sub(ad, "tstar", cmd_adiabatic_tstar, 0.0)
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--target", type=float, default=0.99)
    s.add_argument("--steps", type=int, default=1000)
    s.add_argument("--csv")

    ve = groups.add_parser("verify", help="analytic checks").add_subparsers(dest="cmd", required=True)
    s = sub(ve, "revival", cmd_verify_revival, 1e-12)
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--xi", type=float, required=True)
    s.add_argument("--delta", type=float, required=True)
    s.add_argument("--j", type=float, required=True)
    s.add_argument("--t", default="auto")
    s.add_argument("--csv")
    s = sub(ve, "project-mz", cmd_verify_project_mz, 1e-12)
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--xi", type=float, required=True)
    s.add_argument("--k", type=int, required=True)
    return p


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    t0 = time.perf_counter()
    try:
        report = args.fn(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"scarforge: error: {exc}", file=sys.stderr)
        return 2
    except ScarforgeError as exc:
        print(f"scarforge: error: {exc}", file=sys.stderr)
        return 1
    report = {"command": " ".join([args.group, args.cmd]), "argv": argv, **report}
    report["pass"] = all(report["checks"].values())
    if args.timing:
        report["wall_time"] = time.perf_counter() - t0
    print(json.dumps(metrics.jsonable(report), indent=1, sort_keys=False))
    return 0 if report["pass"] else 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
