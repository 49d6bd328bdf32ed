"""Batch command-line front end.

Subcommands: horizons, direct, verify, asympt, invert, cam.  Results are
written atomically (temp file + rename) as deterministic JSON or CSV; one
summary line is printed per partial wave.  Exit codes: 0 success, 1 usage
or I/O failure, 2 mathematics failure (a verification invariant violated),
so CI can tell regressions from misuse.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from .config import SolverConfig, parse_config_file
from .exports import atomic_write_text, csv_lines, json_dumps
from .geometry import BlackHoleParams, InadmissibleParametersError, find_horizons
from .inverse import InverseProblem, recover_parameters, synthesize_reflection_data
from .potentials import build_profile
from .scattering import compute_smatrix, extract_scattering
from .asymptotics import exponents, predict_AL_blocks, estimate_width

USAGE_EXIT = 1
MATH_EXIT = 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(USAGE_EXIT, f"{self.prog}: error: {message}\n")


def _parse_nset(spec: str):
    """'1..10' or '1,2,4,8' (or a mix) -> sorted list of ints."""
    out = set()
    for part in spec.split(","):
        part = part.strip()
        if ".." in part:
            lo, hi = part.split("..", 1)
            out.update(range(int(lo), int(hi) + 1))
        elif part:
            out.add(int(part))
    if not out or min(out) < 1:
        raise ValueError(f"invalid n specification '{spec}'")
    return sorted(out)


def _add_bh_args(sp):
    sp.add_argument("--M", type=float, required=True, help="black-hole mass")
    sp.add_argument("--Q", type=float, required=True, help="black-hole charge")
    sp.add_argument("--Lambda", type=float, required=True,
                    help="cosmological constant")
    sp.add_argument("--m", type=float, default=0.0, help="Dirac field mass")
    sp.add_argument("--q", type=float, default=0.0, help="Dirac field charge")


def _add_common(sp):
    sp.add_argument("--out", required=True, help="output file path")
    sp.add_argument("--format", choices=("json", "csv"), default="json")
    sp.add_argument("--config", default=None,
                    help="flat key=value solver-config override file")


def _params(args) -> BlackHoleParams:
    return BlackHoleParams(M=args.M, Q=args.Q, Lambda=args.Lambda,
                           m_dirac=args.m, q_dirac=args.q)


def _config(args) -> SolverConfig:
    cfg = SolverConfig()
    if getattr(args, "config", None):
        cfg.apply_overrides(parse_config_file(args.config))
    return cfg


def build_parser() -> _Parser:
    ap = _Parser(prog="dsrn-scatter",
                 description="Dirac partial-wave scattering on dS-RN "
                             "exteriors and parameter recovery")
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("horizons", help="horizon roots and surface gravities")
    _add_bh_args(sp)
    _add_common(sp)

    sp = sub.add_parser("direct", help="S-matrix sweep over partial waves")
    _add_bh_args(sp)
    sp.add_argument("--lambda", dest="lam", type=float, required=True,
                    help="energy")
    sp.add_argument("--n", required=True, help="partial waves, e.g. 1..10")
    sp.add_argument("--tol", type=float, default=None)
    _add_common(sp)

    sp = sub.add_parser("verify", help="run the module invariant suites")
    _add_bh_args(sp)
    sp.add_argument("--lambda", dest="lam", type=float, default=1.0)
    sp.add_argument("--n", default="1,2,4")
    sp.add_argument("--out", default=None)
    sp.add_argument("--config", default=None)

    sp = sub.add_parser("asympt", help="numeric vs predicted A_hat_L table")
    _add_bh_args(sp)
    sp.add_argument("--lambda", dest="lam", type=float, required=True)
    sp.add_argument("--n", default="8..32")
    _add_common(sp)

    sp = sub.add_parser("invert", help="recover (M, Q, Lambda) from data")
    sp.add_argument("--data", required=True,
                    help="JSON file from 'direct' (or an inverse problem file)")
    sp.add_argument("--init-perturb", type=float, default=0.1,
                    help="relative perturbation of the generating parameters "
                         "used as the initial guess")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--tol", type=float, default=None)
    _add_common(sp)

    sp = sub.add_parser("cam", help="complex angular momentum grid export")
    _add_bh_args(sp)
    sp.add_argument("--lambda", dest="lam", type=float, required=True)
    sp.add_argument("--re", default="1..32", help="Re z range, e.g. 1..32")
    sp.add_argument("--im", default="-8..8", help="Im z range")
    sp.add_argument("--nre", type=int, default=9, help="grid points along Re")
    sp.add_argument("--nim", type=int, default=9, help="grid points along Im")
    _add_common(sp)
    return ap


def _write(args, payload, csv_payload=None):
    if args.format == "csv" and csv_payload is not None:
        atomic_write_text(args.out, csv_payload)
    else:
        atomic_write_text(args.out, json_dumps(payload))
    print(f"wrote {args.out}")


def cmd_horizons(args) -> int:
    h = find_horizons(_params(args))
    payload = h.to_dict()
    rows = [["r_n", h.r_n, h.kappa_n], ["r_c", h.r_c, h.kappa_c],
            ["r_minus", h.r_minus, h.kappa_minus],
            ["r_plus", h.r_plus, h.kappa_plus]]
    _write(args, payload, csv_lines(["root", "r", "kappa"], rows))
    return 0


def cmd_direct(args) -> int:
    cfg = _config(args)
    tol = args.tol if args.tol is not None else cfg.ode_rtol
    p = _params(args)
    prof = build_profile(p, grid_step=cfg.profile_grid_step)
    ns = _parse_nset(args.n)
    waves = []
    rows = []
    for n in ns:
        s = compute_smatrix(args.lam, n, prof, tol=tol,
                            tail_eps=cfg.tail_eps)
        d = s.to_dict()
        waves.append(d)
        print(f"n={n:3d}  unitarity={s.residuals['unitarity']:.3e}  "
              f"x_spread={s.residuals['x_spread']:.3e}")
        for name, block in (("TL", s.T_L), ("R", s.R), ("L", s.L),
                            ("TR", s.T_R)):
            for i in range(2):
                for j in range(2):
                    rows.append([n, name, i, j, block[i, j].real,
                                 block[i, j].imag])
    payload = {
        "params": p.to_dict(),
        "lambda": args.lam,
        "beta": prof.phase_beta(),
        "width_A": prof.width_A(),
        "waves": waves,
    }
    _write(args, payload,
           csv_lines(["n", "block", "row", "col", "re", "im"], rows))
    return 0


def _verify_battery(p, lam, ns, cfg):
    """Condensed runtime checks; returns (ok, report dict)."""
    from .jost import GAMMA0, GAMMA1, GAMMA2, GAMMA3

    checks = {}

    h = find_horizons(p)
    checks["horizon_order"] = bool(h.r_n < 0 < h.r_c < h.r_minus < h.r_plus)
    checks["residue_identity"] = bool(abs(np.sum(1.0 / h.kappas)) < 1e-10)
    checks["kappa_signs"] = bool(h.kappa_minus > 0 > h.kappa_plus)
    F_res = max(abs(1 - 2 * p.M / r + p.Q**2 / r**2 - p.Lambda * r**2 / 3.0)
                for r in h.roots if r > 0)
    checks["root_residual"] = bool(F_res < 1e-12)

    gams = (GAMMA0, GAMMA1, GAMMA2, GAMMA3)
    anti_ok = True
    for i, gi in enumerate(gams):
        for j, gj in enumerate(gams):
            want = 2.0 * (i == j) * np.eye(4)
            anti_ok &= bool(np.abs(gi @ gj + gj @ gi - want).max() == 0.0)
    checks["dirac_anticommutation"] = anti_ok

    prof = build_profile(p, grid_step=cfg.profile_grid_step)
    x_test = np.linspace(-20.0, 30.0, 7)
    a, b, c = prof.potential_abc(x_test)
    checks["a_positive"] = bool(np.all(a > 0))
    r = np.array([prof.radius(float(x)) for x in x_test])
    checks["b_over_a_eq_mr"] = bool(
        np.max(np.abs(b / a - p.m_dirac * r)) < 1e-10 * max(1.0, p.m_dirac))

    worst = 0.0
    for n in ns:
        data, fr, fl = extract_scattering(lam, n, prof, tol=cfg.ode_rtol,
                                          tail_eps=cfg.tail_eps,
                                          spread_tol=cfg.spread_tol)
        s = compute_smatrix(lam, n, prof, tol=cfg.ode_rtol,
                            tail_eps=cfg.tail_eps)
        worst = max(worst, data.x_spread,
                    max(data.residuals.values()),
                    s.residuals["unitarity"])
        print(f"n={n:3d}  worst residual so far {worst:.3e}")
    checks["scattering_relations"] = bool(worst < 1e-8)
    checks["worst_scattering_residual"] = float(worst)
    ok = all(v for v in checks.values() if isinstance(v, bool))
    return ok, checks


def cmd_verify(args) -> int:
    cfg = _config(args)
    ok, checks = _verify_battery(_params(args), args.lam,
                                 _parse_nset(args.n), cfg)
    report = {"ok": ok, "checks": checks}
    if args.out:
        atomic_write_text(args.out, json_dumps(report))
    for k, v in sorted(checks.items()):
        status = v if not isinstance(v, bool) else ("pass" if v else "FAIL")
        print(f"  {k}: {status}")
    print("verify:", "pass" if ok else "FAIL")
    return 0 if ok else MATH_EXIT


def cmd_asympt(args) -> int:
    cfg = _config(args)
    p = _params(args)
    prof = build_profile(p, grid_step=cfg.profile_grid_step)
    ns = _parse_nset(args.n)
    exp_set = exponents(args.lam, prof)
    rows = []
    al1_seq = {}
    for n in ns:
        data, _, _ = extract_scattering(args.lam, n, prof, tol=cfg.ode_rtol,
                                        tail_eps=cfg.tail_eps)
        al1 = data.AL_blocks[0]
        al1_seq[n] = al1
        pred = predict_AL_blocks(args.lam, n, exp_set, prof)[0]
        ratio = al1[0, 0] / pred[0, 0]
        rows.append([n, abs(al1[0, 0]), abs(pred[0, 0]), ratio.real,
                     ratio.imag])
        print(f"n={n:3d}  |numeric|={abs(al1[0, 0]):.6e}  "
              f"|predicted|={abs(pred[0, 0]):.6e}  |ratio-1|={abs(ratio-1):.3e}")
    payload = {
        "params": p.to_dict(), "lambda": args.lam,
        "width_A_quadrature": prof.width_A(),
        "rows": [{"n": r[0], "numeric": r[1], "predicted": r[2],
                  "ratio_re": r[3], "ratio_im": r[4]} for r in rows],
    }
    growth = sorted(n for n in ns if n >= 8)
    if len(set(growth)) >= 4:
        payload["width_A_estimated"] = estimate_width(
            al1_seq, growth[:5] if len(growth) >= 5 else growth)
    _write(args, payload,
           csv_lines(["n", "numeric", "predicted", "ratio_re", "ratio_im"],
                     rows))
    return 0


def cmd_invert(args) -> int:
    import json

    cfg = _config(args)
    tol = args.tol if args.tol is not None else cfg.inverse_tol
    with open(args.data) as fh:
        blob = json.loads(fh.read())
    truth = BlackHoleParams.from_dict(blob["params"])
    lam = float(blob["lambda"])
    data = {}
    for wave in blob["waves"]:
        n = int(wave["n"])
        L = np.array([[complex(*wave["blocks"]["L"][0]),
                       complex(*wave["blocks"]["L"][1])],
                      [complex(*wave["blocks"]["L"][2]),
                       complex(*wave["blocks"]["L"][3])]])
        data[n] = L
    if args.seed:
        rng = np.random.default_rng(args.seed)
        scale = 1.0 + args.init_perturb * rng.uniform(-1.0, 1.0, size=3)
    else:
        scale = np.full(3, 1.0 + args.init_perturb)
    init = BlackHoleParams(
        M=truth.M * scale[0], Q=truth.Q * scale[1],
        Lambda=truth.Lambda * scale[2],
        m_dirac=truth.m_dirac, q_dirac=truth.q_dirac)
    prob = InverseProblem(lam=lam, n_set=tuple(sorted(data)), data=data,
                          which="L", field_params=(truth.m_dirac,
                                                   truth.q_dirac),
                          init=init)
    res = recover_parameters(prob, tol=tol,
                             max_iter=cfg.inverse_max_iter,
                             solver_tol=cfg.inverse_solver_tol,
                             tail_eps=cfg.inverse_tail_eps,
                             grid_step=cfg.inverse_grid_step)
    print(f"recovered M={res.params.M:.8f} Q={res.params.Q:.8f} "
          f"Lambda={res.params.Lambda:.8f} residual={res.residual:.3e} "
          f"iters={res.iterations} converged={res.converged}")
    payload = {
        "lambda": lam,
        "n_set": sorted(int(n) for n in data),
        "which": "L",
        "init": init.to_dict(),
        "result": res.to_dict(),
    }
    _write(args, payload)
    return 0 if res.converged else MATH_EXIT


def cmd_cam(args) -> int:
    cfg = _config(args)
    p = _params(args)
    prof = build_profile(p, grid_step=cfg.profile_grid_step)

    def _range(spec, count):
        lo, hi = (float(v) for v in spec.split("..", 1))
        return np.linspace(lo, hi, count)

    res = _range(args.re, args.nre)
    ims = _range(args.im, args.nim)
    if np.max(np.abs(res)) > cfg.z_max:
        raise ValueError(f"|Re z| must stay within {cfg.z_max}")
    rows = []
    for zr in res:
        for zi in ims:
            z = complex(zr, zi)
            try:
                data, _, _ = extract_scattering(
                    args.lam, z, prof, tol=cfg.ode_rtol,
                    tail_eps=cfg.tail_eps, spread_tol=1.0)
                al1 = data.AL_blocks[0]
                al3 = data.AL_blocks[2]
                refl = al3 @ np.linalg.inv(al1)
                rows.append([zr, zi, abs(al1[0, 0]),
                             float(np.angle(al1[0, 0])), abs(refl[0, 0]),
                             float(np.angle(refl[0, 0])), data.x_spread])
            except Exception as exc:  # pole or solver failure: report row
                rows.append([zr, zi, float("nan"), float("nan"),
                             float("nan"), float("nan"), float("nan")])
                print(f"z=({zr},{zi}): {type(exc).__name__}: {exc}")
        print(f"Re z = {zr}: done")
    header = ["re_z", "im_z", "abs_AL1_00", "arg_AL1_00", "abs_L_00",
              "arg_L_00", "x_spread"]
    payload = {
        "params": p.to_dict(), "lambda": args.lam,
        "grid": {"re": list(res), "im": list(ims)},
        "rows": [dict(zip(header, r)) for r in rows],
    }
    _write(args, payload, csv_lines(header, rows))
    return 0


_COMMANDS = {
    "horizons": cmd_horizons,
    "direct": cmd_direct,
    "verify": cmd_verify,
    "asympt": cmd_asympt,
    "invert": cmd_invert,
    "cam": cmd_cam,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (OSError, ValueError, KeyError, InadmissibleParametersError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_EXIT


if __name__ == "__main__":
    sys.exit(main())
