"""Command-line entry points.

Subcommands:
    synth       approximate a unitary (JSON matrix or --rz angle)
    craft       constrained mixed synthesis around a target
    cptp-craft  measurement-feedback crafting for a Z rotation
    whitenoise  damping-factor sweep for random layered circuits
    sweep       run a configured experiment and emit CSV/JSON reports

Complex matrices travel as {"matrix": [[[re, im], ...], ...]}.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .channels import rz
from .craftopt import ConstraintFamily, craft, uncrafted_mix
from .cptpcraft import mix_pair, search_pair
from .harness import (
    ExperimentConfig,
    emit_report,
    run_experiment,
    write_csv,
    WN_COLUMNS,
    haar_target,
)
from .shiftgen import ShiftSpec, build_candidates
from .synthesis import SynthRequest, synth_rz, synth_su2


def matrix_from_json(payload: dict) -> np.ndarray:
    m = payload["matrix"]
    return np.array([[complex(z[0], z[1]) for z in row] for row in m])


def matrix_to_json(u: np.ndarray) -> dict:
    return {"matrix": [[[float(z.real), float(z.imag)] for z in row]
                       for row in np.asarray(u)]}


def _cmd_synth(args):
    if args.rz is not None:
        res = synth_rz(args.rz, args.eps)
        target = rz(args.rz)
    else:
        with open(args.target_json) as fh:
            target = matrix_from_json(json.load(fh))
        res = synth_su2(SynthRequest(target=target, epsilon=args.eps))
    out = {
        "word": res.word.word_str(),
        "omega_exp": res.word.omega_exp,
        "achieved": res.achieved,
        "tcount": res.tcount,
        "target": matrix_to_json(target),
    }
    with open(args.out, "w") as fh:
        json.dump(out, fh, indent=1)
    print(f"tcount={res.tcount} achieved={res.achieved:.3e} -> {args.out}")


def _cmd_craft(args):
    if args.rz is not None:
        target = rz(args.rz)
    else:
        target = haar_target(args.haar_seed)
    spec = ShiftSpec(c=args.c, eps=args.eps, bigr=args.bigr,
                     vecset=args.vecset)
    cands = build_candidates(target, spec)
    if args.constraint == "none":
        sol = uncrafted_mix(cands)
    else:
        sol = craft(cands, ConstraintFamily(args.constraint))
    with open(args.out, "w") as fh:
        fh.write(sol.to_json())
    print(f"constraint={args.constraint} success={sol.success} "
          f"d={sol.d_diamond:.3e} support={sol.support_size} -> {args.out}")


def _cmd_cptp_craft(args):
    pair = search_pair(args.theta, eps_base=args.eps, pool_budget=args.pool)
    chi, ptm = mix_pair(pair, args.theta)
    payload = json.loads(pair.to_json())
    payload["chi"] = chi.as_dict()
    payload["mixed_ptm"] = [[float(x) for x in row] for row in ptm.gamma]
    from .cptpcraft import feedback_channel

    payload["audit_ptms"] = {
        "plus": [[float(x) for x in row]
                 for row in feedback_channel(pair.plus.word, args.theta).gamma],
        "minus": [[float(x) for x in row]
                  for row in feedback_channel(pair.minus.word, args.theta).gamma],
    }
    with open(args.out, "w") as fh:
        json.dump(payload, fh, indent=1)
    print(f"mu_tilde={pair.mu_tilde:.3e} p_z={pair.p_z:.3e} -> {args.out}")


def _cmd_whitenoise(args):
    cfg = ExperimentConfig(
        kind="whitenoise", n_qubits=args.n, p_dep=args.p,
        eps_coh_list=[args.eps_coh], layers_list=[args.layers],
        instances=args.seeds, base_seed=args.base_seed,
    )
    rows, columns = run_experiment(cfg)
    write_csv(rows, columns, args.out)
    print(f"{len(rows)} rows -> {args.out}")


def _cmd_sweep(args):
    with open(args.config) as fh:
        payload = json.load(fh)
    payload["kind"] = args.experiment
    payload["out_dir"] = args.out_dir
    cfg = ExperimentConfig(**payload)
    rows, columns = run_experiment(cfg)
    csv_path, json_path = emit_report(rows, columns, cfg.kind, args.out_dir)
    print(f"{len(rows)} rows -> {csv_path}, summary -> {json_path}")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="craftsynth",
                                description="Clifford+T synthesis with "
                                            "remnant-error crafting")
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("synth", help="approximate a single-qubit unitary")
    sp.add_argument("--target-json", help="JSON file with the target matrix")
    sp.add_argument("--rz", type=float, help="synthesize Rz(theta) instead")
    sp.add_argument("--eps", type=float, required=True)
    sp.add_argument("--out", required=True)
    sp.set_defaults(fn=_cmd_synth)

    cp = sub.add_parser("craft", help="error-crafted mixed synthesis")
    cp.add_argument("--constraint", required=True,
                    choices=["pauli", "depol", "xy", "none"])
    cp.add_argument("--c", type=float, required=True)
    cp.add_argument("--bigr", type=int, default=1)
    cp.add_argument("--eps", type=float, required=True)
    cp.add_argument("--vecset", default="pauli7")
    group = cp.add_mutually_exclusive_group(required=True)
    group.add_argument("--rz", type=float)
    group.add_argument("--haar-seed", type=int)
    cp.add_argument("--out", required=True)
    cp.set_defaults(fn=_cmd_craft)

    qp = sub.add_parser("cptp-craft", help="feedback crafting for Rz")
    qp.add_argument("--theta", type=float, required=True)
    qp.add_argument("--eps", type=float, required=True)
    qp.add_argument("--pool", type=int, default=64)
    qp.add_argument("--out", required=True)
    qp.set_defaults(fn=_cmd_cptp_craft)

    wp = sub.add_parser("whitenoise", help="damping-factor sweep")
    wp.add_argument("--n", type=int, default=2)
    wp.add_argument("--p", type=float, default=1e-3)
    wp.add_argument("--eps-coh", type=float, default=0.0)
    wp.add_argument("--layers", type=int, default=400)
    wp.add_argument("--seeds", type=int, default=10)
    wp.add_argument("--base-seed", type=int, default=0)
    wp.add_argument("--out", required=True)
    wp.set_defaults(fn=_cmd_whitenoise)

    ep = sub.add_parser("sweep", help="run a configured experiment")
    ep.add_argument("--experiment", required=True)
    ep.add_argument("--config", required=True)
    ep.add_argument("--out-dir", required=True)
    ep.set_defaults(fn=_cmd_sweep)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "synth" and args.rz is None and not args.target_json:
        print("synth needs --target-json or --rz", file=sys.stderr)
        return 2
    args.fn(args)
    return 0


if __name__ == "__main__":
    sys.exit(main())
