"""Command-line entry point: ``toda <subcommand> ...``.

Exit codes: 0 success, 1 validation or input error, 2 verification failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import bargmann, core, painleve, sim, spectral, verify
from .exact import frac_str
from .jets import JetError, jet_lift, parse_potential


class CliError(Exception):
    pass


def _emit(doc) -> None:
    json.dump(doc, sys.stdout, indent=2, sort_keys=False)
    sys.stdout.write("\n")


def _parse_time(text: str, exact: bool):
    try:
        return Fraction(text) if exact else float(Fraction(text))
    except (ValueError, ZeroDivisionError) as exc:
        raise CliError(f"bad time value {text!r}") from exc


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise CliError(msg)


def _moment_table(args):
    spec = parse_potential(args.potential)
    t0 = _parse_time(args.t0, args.exact)
    _require(args.order >= 0, "--order must be non-negative")
    if args.exact and spec.kind in ("sec2", "sech2"):
        raise CliError(f"{spec.kind} has no exact jets; drop --exact")
    u0 = jet_lift(spec, t0, args.order)
    return core.moments_from_initial(u0, u0, args.order)


def cmd_coeffs(args) -> int:
    _require(args.n >= 0, "--n must be non-negative")
    _require(args.order >= 2 * args.n + 1, f"--order must be at least 2n+1 = {2 * args.n + 1}")
    m = _moment_table(args)
    rc = core.recurrence_from_moments(m, args.n)
    _emit({"potential": args.potential, "t0": args.t0, **rc.to_json()})
    return 0


def cmd_moments(args) -> int:
    m = _moment_table(args)
    _emit({"potential": args.potential, "t0": args.t0, **m.to_json()})
    return 0


def cmd_painleve(args) -> int:
    _require(0 <= args.N <= painleve.N_CAP or args.allow_large, f"--N must lie in 0..{painleve.N_CAP}")
    sol = painleve.pii_solution(args.N, allow_large=args.allow_large)
    _emit(sol.to_json(residual_zero=painleve.pii_residual(sol).is_zero()))
    return 0


def cmd_darboux(args) -> int:
    _require(args.N >= 0, "--N must be non-negative")
    q = bargmann.soliton_polynomial(args.N)
    doc = q.to_json()
    if args.t is not None:
        t = float(Fraction(args.t))
        a = bargmann.poles(q, t)
        doc["t"] = t
        doc["roots"] = [float(x) for x in a]
        doc["residues"] = [float(x) for x in -bargmann.pole_velocities(q, t, a)]
        if t == 0 and args.roots:
            doc["roots_exact"] = [frac_str(r) for r in bargmann.exact_poles_at_zero(args.N)]
    elif args.roots:
        raise CliError("--roots needs --t")
    _emit(doc)
    return 0


def cmd_spectrum(args) -> int:
    J = spectral.JacobiMatrix.from_json(spectral.load_json(args.file))
    sd = spectral.eigendecompose(J, args.c0)
    doc = {"x": [float(v) for v in sd.x], "w": [float(v) for v in sd.w], "per_skew": spectral.is_per_skew(J)}
    if doc["per_skew"]:
        rep = spectral.perskew_property_checks(J, args.c0)
        doc["checks"] = {"symmetry": rep.symmetry, "ww": rep.ww, "pph": rep.pph}
    _emit(doc)
    return 0


def cmd_inverse(args) -> int:
    d = spectral.load_json(args.file)
    if "tau" in d:
        exact = all(isinstance(v, (int, str)) for v in d["x_half"] + d["tau"])
        conv = Fraction if exact else float
        J = spectral.perskew_from_tau([conv(v) for v in d["x_half"]], [conv(v) for v in d["tau"]], d["parity"])
    elif "w" in d:
        J = spectral.inverse_from_weights(spectral.SpectralData.from_json(d))
    elif "x" in d:
        J = spectral.persymmetric_from_spectrum([float(v) for v in d["x"]])
    else:
        raise CliError("spectral data needs x and w, x alone, or x_half, tau and parity")
    _emit(J.to_json())
    return 0


def _load_init(path: str) -> sim.TodaState:
    d = spectral.load_json(path)
    mode = d.get("mode", "molecule")
    u_right = None
    if "right_boundary" in d:
        rb = d["right_boundary"]
        u_right = sim.right_boundary_from_potential(parse_potential(rb["potential"]), int(rb["n"]))
    if d.get("mirror_full"):
        return sim.mirror_init(d["b"], d["u"])
    return sim.TodaState(d["b"], d["u"], mode, float(d.get("t0", 0.0)), u_right)


def cmd_simulate(args) -> int:
    _require(args.tol > 0, "--tol must be positive")
    init = _load_init(args.init)
    traj = sim.simulate(init, args.t_end, args.tol, args.samples)
    try:
        sim.eigenflow(traj)
    except (sim.SimulationError, spectral.SpectralError) as exc:
        print(f"eigenvalue tracking skipped: {exc}", file=sys.stderr)
    sim.write_csv(traj, args.out)
    summary = {"samples": int(traj.times.size), "out": args.out}
    if traj.mode == "molecule":
        summary["hamiltonian_drift"] = sim.hamiltonian_drift(traj)
    _emit(summary)
    return 0


def cmd_kdv(args) -> int:
    _require(args.m >= 1, "--m must be at least 1")
    spec = parse_potential(args.potential)
    exact = spec.kind == "linear" and args.exact
    t0 = _parse_time(args.t0, exact)
    U = -jet_lift(spec, t0, args.m + 1)
    rep = core.kdv_moment_identification(U, args.m)
    sig = core.kdv_densities(U, args.m)
    _emit({
        "potential": args.potential,
        "t0": args.t0,
        "sigma": [core._emit(s) for s in sig],
        "identified": rep.passed,
        "max_deviation": rep.max_deviation,
    })
    return 0 if rep.passed else 2


def cmd_verify(args) -> int:
    names = list(verify.SUITES) if args.suite == "all" else [args.suite]
    failed = False
    for name in names:
        res = verify.run_suite(name)
        status = "PASS" if res.passed else "FAIL"
        print(f"{status} {name} ({res.seconds:.2f}s)")
        for f in res.failures():
            print(f"    {f}")
        failed = failed or not res.passed
    return 2 if failed else 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="toda", description="Toda chain / Schrodinger correspondence toolkit.")
    sub = p.add_subparsers(dest="command", required=True)

    def potential_args(sp, order_default=12):
        sp.add_argument("--potential", required=True,
                        help="centrifugal:alpha=<r> | sec2:alpha=<r> | sech2:N=<int> | linear | series:<c0,c1,...>")
        sp.add_argument("--t0", default="1", help="base point (rational or decimal)")
        sp.add_argument("--order", type=int, default=order_default, help="jet order K")
        sp.add_argument("--exact", action="store_true", help="exact rational jets (rational potentials only)")

    sp = sub.add_parser("coeffs", help="recurrence coefficients u_n, b_n of a potential",
                        description="Recurrence coefficients u_n = H_{n-1}H_{n+1}/H_n^2 and "
                                    "b_n = d/dt log(H_{n+1}/H_n) from the moments of c_0 = u_0.")
    potential_args(sp)
    sp.add_argument("--n", type=int, default=4, help="highest index n")
    sp.set_defaults(func=cmd_coeffs)

    sp = sub.add_parser("moments", help="moments c_0..c_K of a potential",
                        description="Moments from c_1 = c_0' and c_{n+1} = c_n' + (u_0/c_0) sum c_s c_{n-1-s}, "
                                    "with c_0 = u_0 the named potential.")
    potential_args(sp)
    sp.set_defaults(func=cmd_moments)

    sp = sub.add_parser("painleve", help="rational Painleve-II solution V_N",
                        description="V_N = d/dt log(H_{N+1}/H_N) from the linear-potential Hankel determinants, "
                                    "checked exactly against V'' = 2V^3 - 4tV + 4(alpha + 1/2), alpha = N + 1/2.")
    sp.add_argument("--N", type=int, required=True)
    sp.add_argument("--allow-large", action="store_true", help=f"permit N > {painleve.N_CAP}")
    sp.set_defaults(func=cmd_painleve)

    sp = sub.add_parser("darboux", help="soliton polynomial Q_N and its zeros",
                        description="Q_{N+1} = (z + 2(N+1)y) Q_N - 2(1-y^2) dQ_N/dy with y = tanh t; "
                                    "with --t also the poles a_k(t) and residues A_k = -a_k'.")
    sp.add_argument("--N", type=int, required=True)
    sp.add_argument("--t", default=None)
    sp.add_argument("--roots", action="store_true", help="include exact roots at t = 0")
    sp.set_defaults(func=cmd_darboux)

    sp = sub.add_parser("spectrum", help="eigenvalues and weights of a Jacobi matrix",
                        description="Eigenvalues x_s and weights w_s (squared first eigenvector components) "
                                    "of a monic Jacobi matrix {\"b\": [...], \"u\": [...]}; per-skew matrices "
                                    "also get the symmetry and product-law checks.")
    sp.add_argument("--file", required=True)
    sp.add_argument("--c0", type=float, default=1.0, help="total mass of the weights")
    sp.set_defaults(func=cmd_spectrum)

    sp = sub.add_parser("inverse", help="Jacobi matrix from spectral data",
                        description="Reconstruct J from {\"x\", \"w\"} (Stieltjes procedure), from a symmetric "
                                    "{\"x\"} (persymmetric), or from {\"x_half\", \"tau\", \"parity\"} "
                                    "(per-skew, pi_{N-1} pattern).")
    sp.add_argument("--file", required=True)
    sp.set_defaults(func=cmd_inverse)

    sp = sub.add_parser("simulate", help="integrate a finite Toda chain",
                        description="Integrate b_k' = u_{k+1} - u_k, u_k' = u_k (b_k - b_{k-1}) from a JSON "
                                    "initial state {\"mode\", \"b\", \"u\", \"t0\", \"right_boundary\"?, "
                                    "\"mirror_full\"?}; writes CSV.")
    sp.add_argument("--init", required=True)
    sp.add_argument("--t-end", type=float, required=True)
    sp.add_argument("--tol", type=float, default=1e-10)
    sp.add_argument("--samples", type=int, default=101)
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("kdv", help="KdV densities and their identification with moments",
                        description="sigma_1 = -U, sigma_{m+1} = sigma_m' + sum sigma_k sigma_{m-k}, compared "
                                    "with c_{m-1} for c_0 = u_0 = -U.")
    sp.add_argument("--potential", required=True)
    sp.add_argument("--t0", default="0")
    sp.add_argument("--m", type=int, default=8)
    sp.add_argument("--exact", action="store_true")
    sp.set_defaults(func=cmd_kdv)

    sp = sub.add_parser("verify", help="run bundled verification suites",
                        description="Run the property suites; TODA_SEED seeds the randomized ones.")
    sp.add_argument("--suite", default="all", choices=["all", *verify.SUITES])
    sp.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 1 if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except (CliError, ValueError, ArithmeticError, JetError, OSError, KeyError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
