"""Experiment orchestration: sweeps, CSV/JSON reports, overhead calculator.

Each experiment kind maps a config onto per-instance rows; rows are pure
functions of (config, instance index) with seeds derived stably from
(base_seed, index), so reruns are byte-identical regardless of worker
count.  Partial failures (infeasible crafts, missing-sign pools) are
flagged in their rows, never dropped.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .channels import ChiDiag, nonpauli_residual, rz, unitary_diamond
from .craftopt import ConstraintFamily, craft, uncrafted_mix
from .cptpcraft import NoOppositeSigns, mix_pair, search_pair
from .shiftgen import ShiftSpec, build_candidates
from .synthesis import SynthRequest, synth_su2, synth_rz, synth_via_axial
from .whitenoise import (
    NoiseLayerSpec,
    damping_factors,
    effective_noise_ptm,
    rescaled_bias,
)

SCHEMA_VERSION = "v1"


class ConfigError(ValueError):
    pass


class SchemaError(ValueError):
    pass


KINDS = ("fig1_accuracy", "fig1_failrate", "fig2_residual", "fig3_ratios",
         "fig5_tradeoff", "whitenoise")


@dataclass
class ExperimentConfig:
    kind: str
    eps_list: list = field(default_factory=list)
    c_list: list = field(default_factory=list)
    r_list: list = field(default_factory=list)
    theta_list: list = field(default_factory=list)
    instances: int = 1
    base_seed: int = 0
    out_dir: str = "results"
    vecset: str = "pauli7"
    axial: bool = False          # synthesize shifted targets via axial pipeline
    families: list = field(default_factory=lambda: ["depol", "xy"])
    pool_scale: float = 0.6      # cptp pool = max(pool_min, pool_scale/eps)
    pool_min: int = 24
    n_qubits: int = 2
    p_dep: float = 1e-3
    eps_coh_list: list = field(default_factory=lambda: [0.0])
    layers_list: list = field(default_factory=lambda: [400])
    n_jobs: int = 1

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigError(f"unknown experiment kind {self.kind!r}")
        if self.instances < 1:
            raise ConfigError("instances must be >= 1")
        needs = {
            "fig1_accuracy": ("eps_list", "c_list", "r_list"),
            "fig1_failrate": ("eps_list", "c_list", "r_list"),
            "fig2_residual": ("eps_list", "c_list", "r_list"),
            "fig3_ratios": ("eps_list", "c_list", "r_list"),
            "fig5_tradeoff": ("eps_list", "theta_list"),
            "whitenoise": ("eps_coh_list", "layers_list"),
        }[self.kind]
        for name in needs:
            if not getattr(self, name):
                raise ConfigError(f"{self.kind} requires a non-empty {name}")

    @classmethod
    def from_json(cls, payload: str) -> "ExperimentConfig":
        return cls(**json.loads(payload))


def derived_seed(base_seed: int, *indices: int) -> int:
    ss = np.random.SeedSequence([int(base_seed), *map(int, indices)])
    return int(ss.generate_state(1, dtype=np.uint64)[0] % (2**63))


def haar_target(seed: int) -> np.ndarray:
    rng = np.random.Generator(np.random.Philox(seed))
    z = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    q, r = np.linalg.qr(z)
    return q @ np.diag(np.diag(r) / np.abs(np.diag(r)))


def random_angle(seed: int) -> float:
    rng = np.random.Generator(np.random.Philox(seed))
    return float(rng.uniform(-np.pi, np.pi))


def _synthesize_shifted(target, spec: ShiftSpec, axial: bool):
    if not axial:
        return build_candidates(target, spec)
    # per-rotation accounting: each shifted target through the axial pipeline
    from .channels import fix_sign, magic_vec
    from .shiftgen import Candidate, CandidateSet, shift_unitary

    out = CandidateSet(target=target, spec=spec)
    tdag = target.conj().T
    for k in range(1, spec.bigr + 1):
        radius = k * spec.c * spec.eps / spec.bigr
        for v in spec.vectors():
            shifted = shift_unitary(v, radius) @ target
            res = synth_via_axial(shifted, spec.eps)
            u = res.matrix
            out.candidates.append(Candidate(
                word=res.word, u_float=u,
                r_rel=fix_sign(magic_vec(u @ tdag)),
                shift_vec=np.asarray(v, dtype=float), rung=k,
                tcount=res.tcount, achieved=res.achieved,
            ))
    return out


# --- per-kind row generators --------------------------------------------------

FIG1_COLUMNS = ["kind", "eps", "c", "r", "instance", "seed", "d_diamond",
                "success", "failure", "g1_used", "support_size", "bound_lo",
                "bound_hi", "det_achieved", "det_tcount"]


def _fig1_rows(cfg: ExperimentConfig, with_bounds: bool):
    jobs = []
    for eps in cfg.eps_list:
        for c in cfg.c_list:
            for r_f in cfg.r_list:
                for i in range(cfg.instances):
                    jobs.append((float(eps), float(c), int(r_f), i))

    def run(job):
        eps, c, r_f, i = job
        seed = derived_seed(cfg.base_seed, i)
        target = haar_target(seed)
        t0 = time.perf_counter()
        spec = ShiftSpec(c=c, eps=eps, bigr=r_f, vecset=cfg.vecset)
        cands = _synthesize_shifted(target, spec, cfg.axial)
        sol = craft(cands, ConstraintFamily("pauli"))
        det = synth_su2(SynthRequest(target=target, epsilon=eps))
        return {
            "kind": cfg.kind, "eps": eps, "c": c, "r": r_f, "instance": i,
            "seed": seed,
            "d_diamond": sol.d_diamond, "success": sol.success,
            "failure": sol.failure or "",
            "g1_used": sol.g1_used, "support_size": sol.support_size,
            "bound_lo": ((c - 1) * eps) ** 2 if with_bounds else "",
            "bound_hi": ((c + 1) * eps) ** 2 if with_bounds else "",
            "det_achieved": det.achieved, "det_tcount": det.tcount,
            "wallclock": time.perf_counter() - t0,
        }

    return _run_jobs(cfg, jobs, run), FIG1_COLUMNS


FIG2_COLUMNS = ["kind", "eps", "c", "r", "instance", "seed", "theta",
                "d_crafted", "d_uncrafted", "res_crafted", "res_uncrafted",
                "ratio", "success", "failure"]


def _fig2_rows(cfg: ExperimentConfig):
    jobs = []
    for eps in cfg.eps_list:
        for c in cfg.c_list:
            for r_f in cfg.r_list:
                for i in range(cfg.instances):
                    jobs.append((float(eps), float(c), int(r_f), i))

    def run(job):
        eps, c, r_f, i = job
        seed = derived_seed(cfg.base_seed, i)
        theta = random_angle(seed)
        target = rz(theta)
        t0 = time.perf_counter()
        spec = ShiftSpec(c=c, eps=eps, bigr=r_f, vecset=cfg.vecset)
        cands = build_candidates(target, spec)
        crafted = craft(cands, ConstraintFamily("pauli"))
        free = uncrafted_mix(cands)
        res_c = nonpauli_residual(crafted.m) if crafted.success else float("nan")
        res_u = nonpauli_residual(free.m)
        ratio = res_u / res_c if crafted.success and res_c > 0 else float("inf")
        return {
            "kind": cfg.kind, "eps": eps, "c": c, "r": r_f, "instance": i,
            "seed": seed, "theta": theta,
            "d_crafted": crafted.d_diamond, "d_uncrafted": free.d_diamond,
            "res_crafted": res_c, "res_uncrafted": res_u, "ratio": ratio,
            "success": crafted.success, "failure": crafted.failure or "",
            "wallclock": time.perf_counter() - t0,
        }

    return _run_jobs(cfg, jobs, run), FIG2_COLUMNS


FIG3_COLUMNS = ["kind", "family", "eps", "c", "r", "instance", "seed",
                "target_kind", "d_diamond", "q_x", "q_y", "q_z", "p_total",
                "g1_used", "g2_used", "max_ratio_gap", "success", "failure"]


def _fig3_rows(cfg: ExperimentConfig):
    jobs = []
    for fam in cfg.families:
        for eps in cfg.eps_list:
            for c in cfg.c_list:
                for r_f in cfg.r_list:
                    for i in range(cfg.instances):
                        jobs.append((fam, float(eps), float(c), int(r_f), i))

    def run(job):
        fam, eps, c, r_f, i = job
        seed = derived_seed(cfg.base_seed, i)
        # depolarizing constraint on generic targets, XY bias on Z rotations
        if fam == "xy":
            target_kind = "rz"
            target = rz(random_angle(seed))
        else:
            target_kind = "haar"
            target = haar_target(seed)
        t0 = time.perf_counter()
        spec = ShiftSpec(c=c, eps=eps, bigr=r_f, vecset="depol9")
        cands = build_candidates(target, spec)
        sol = craft(cands, ConstraintFamily(fam))
        qx, qy, qz = sol.chi.ratios if sol.success else (float("nan"),) * 3
        gap = max(abs(qx - qy), abs(qy - qz), abs(qx - qz)) \
            if sol.success else float("nan")
        return {
            "kind": cfg.kind, "family": fam, "eps": eps, "c": c, "r": r_f,
            "instance": i, "seed": seed, "target_kind": target_kind,
            "d_diamond": sol.d_diamond, "q_x": qx, "q_y": qy, "q_z": qz,
            "p_total": sol.chi.p if sol.success else float("nan"),
            "g1_used": sol.g1_used, "g2_used": sol.g2_used,
            "max_ratio_gap": gap, "success": sol.success,
            "failure": sol.failure or "",
            "wallclock": time.perf_counter() - t0,
        }

    return _run_jobs(cfg, jobs, run), FIG3_COLUMNS


FIG5_COLUMNS = ["kind", "eps", "theta", "pool", "final_rate", "mu_tilde",
                "tcount_pair_mean", "tcount_pair_max", "plain_tcount",
                "plain_achieved", "failure"]


def _fig5_rows(cfg: ExperimentConfig):
    jobs = [(float(eps), float(th)) for eps in cfg.eps_list
            for th in cfg.theta_list]

    def run(job):
        eps, theta = job
        pool = max(cfg.pool_min, int(math.ceil(cfg.pool_scale / eps)))
        t0 = time.perf_counter()
        failure = ""
        final_rate = mu_tilde = t_mean = t_max = float("nan")
        for attempt in range(3):
            try:
                pair = search_pair(theta, eps_base=eps, pool_budget=pool * (2**attempt))
            except NoOppositeSigns:
                failure = "no_opposite_signs"
                continue
            chi, _ = mix_pair(pair, theta)
            final_rate = chi.chi_zz
            mu_tilde = pair.mu_tilde
            t_mean = pair.p_plus * pair.plus.tcount + pair.p_minus * pair.minus.tcount
            t_max = max(pair.plus.tcount, pair.minus.tcount)
            failure = ""
            break
        plain = synth_rz(theta, eps)
        return {
            "kind": cfg.kind, "eps": eps, "theta": theta, "pool": pool,
            "final_rate": final_rate, "mu_tilde": mu_tilde,
            "tcount_pair_mean": t_mean, "tcount_pair_max": t_max,
            "plain_tcount": plain.tcount, "plain_achieved": plain.achieved,
            "failure": failure,
            "wallclock": time.perf_counter() - t0,
        }

    return _run_jobs(cfg, jobs, run), FIG5_COLUMNS


WN_COLUMNS = ["kind", "seed", "n", "p_dep", "eps_coh", "L", "k_min",
              "k_max", "k_mean", "k_theory", "dev", "bias", "bound"]


def _whitenoise_rows(cfg: ExperimentConfig):
    jobs = [(float(ec), int(ll), s) for ec in cfg.eps_coh_list
            for ll in cfg.layers_list for s in range(cfg.instances)]

    def run(job):
        eps_coh, layers, s = job
        seed = derived_seed(cfg.base_seed, s)
        spec = NoiseLayerSpec(n=cfg.n_qubits, p_dep=cfg.p_dep,
                              eps_coh=eps_coh, layers=layers, seed=seed)
        t0 = time.perf_counter()
        rep = damping_factors(effective_noise_ptm(spec), cfg.p_dep, layers)
        rho = np.zeros((2**cfg.n_qubits,) * 2, dtype=complex)
        rho[0, 0] = 1.0
        obs = np.kron(np.diag([1.0, -1.0]), np.eye(2**(cfg.n_qubits - 1)))
        bias, bound = rescaled_bias(spec, rho, obs)
        return {
            "kind": cfg.kind, "seed": s, "n": cfg.n_qubits, "p_dep": cfg.p_dep,
            "eps_coh": eps_coh, "L": layers,
            "k_min": float(np.min(rep.k)), "k_max": float(np.max(rep.k)),
            "k_mean": rep.k_mean_emp, "k_theory": rep.k_mean_theory,
            "dev": rep.max_dev, "bias": bias, "bound": bound,
            "wallclock": time.perf_counter() - t0,
        }

    return _run_jobs(cfg, jobs, run), WN_COLUMNS


def _run_jobs(cfg: ExperimentConfig, jobs, fn):
    if cfg.n_jobs > 1:
        with ThreadPoolExecutor(max_workers=cfg.n_jobs) as pool:
            return list(pool.map(fn, jobs))
    return [fn(job) for job in jobs]


def run_experiment(cfg: ExperimentConfig):
    """Dispatch on cfg.kind; returns (rows, columns)."""
    dispatch = {
        "fig1_accuracy": lambda: _fig1_rows(cfg, with_bounds=True),
        "fig1_failrate": lambda: _fig1_rows(cfg, with_bounds=True),
        "fig2_residual": lambda: _fig2_rows(cfg),
        "fig3_ratios": lambda: _fig3_rows(cfg),
        "fig5_tradeoff": lambda: _fig5_rows(cfg),
        "whitenoise": lambda: _whitenoise_rows(cfg),
    }
    return dispatch[cfg.kind]()


# --- sampling-overhead calculator ---------------------------------------------

OVERHEAD_METHODS = ("pec", "rescaling", "ed_pec", "ed_rescaling")


def overhead_report(chi: ChiDiag, layers: int, method: str) -> dict:
    """Per-gate sampling overhead gamma and the multiplicative total gamma^L."""
    if method not in OVERHEAD_METHODS:
        raise ValueError(f"unknown method {method!r}")
    p = chi.p
    qx, qy, qz = chi.ratios
    if method == "pec":
        gamma = 1.0 + 4.0 * p
    elif method == "rescaling":
        gamma = 1.0 + 2.0 * p
    elif method == "ed_pec":
        gamma = 1.0 + (qx + qy + 4.0 * qz) * p
    else:
        gamma = 1.0 + (qx + qy + 2.0 * qz) * p
    log_total = layers * math.log(gamma)
    return {
        "method": method, "gamma": gamma, "layers": layers,
        "log_total": log_total,
        "total": math.exp(log_total) if log_total < 700 else float("inf"),
    }


def overhead_ratio(p_a: float, p_b: float, layers: int,
                   method: str = "pec") -> float:
    """gamma(p_b)^L / gamma(p_a)^L for pure-rate chi inputs."""
    chi_a = ChiDiag(1 - p_a, 0.0, 0.0, p_a)
    chi_b = ChiDiag(1 - p_b, 0.0, 0.0, p_b)
    la = overhead_report(chi_a, layers, method)["log_total"]
    lb = overhead_report(chi_b, layers, method)["log_total"]
    return math.exp(lb - la)


# --- report emission -----------------------------------------------------------


def write_csv(rows, columns, path):
    if not rows:
        raise SchemaError("refusing to write an empty table")
    for row in rows:
        missing = [c for c in columns if c not in row]
        if missing:
            raise SchemaError(f"row missing columns {missing}")
    buf = io.StringIO()
    buf.write(f"#schema={SCHEMA_VERSION}\n")
    writer = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({c: row[c] for c in columns})
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "w") as fh:
        fh.write(buf.getvalue())


def read_csv(path):
    with open(path) as fh:
        first = fh.readline()
        if not first.startswith("#schema="):
            raise SchemaError("missing schema header line")
        version = first.strip().split("=", 1)[1]
        if version != SCHEMA_VERSION:
            raise SchemaError(f"unsupported schema version {version}")
        reader = csv.DictReader(fh)
        return list(reader)


def fit_loglog_slope(x, y):
    """Least-squares slope of log2(y) against log2(x) with standard error."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    keep = (x > 0) & (y > 0) & np.isfinite(y)
    lx = np.log2(x[keep])
    ly = np.log2(y[keep])
    if lx.size < 2:
        raise SchemaError("need at least two points for a slope fit")
    a = np.stack([lx, np.ones_like(lx)], axis=1)
    coef, res, *_ = np.linalg.lstsq(a, ly, rcond=None)
    dof = max(lx.size - 2, 1)
    resid = ly - a @ coef
    var = float(resid @ resid) / dof
    cov = var * np.linalg.inv(a.T @ a)
    return float(coef[0]), float(np.sqrt(max(cov[0, 0], 0.0)))


def _col(rows, name, where=None):
    out = []
    for row in rows:
        if where and not where(row):
            continue
        v = row[name]
        out.append(float(v) if not isinstance(v, float) else v)
    return np.array(out)


def emit_report(rows, columns, kind: str, out_dir: str, stem: str | None = None):
    """CSV plus a JSON summary with medians/quartiles and per-kind slopes."""
    if not rows:
        raise SchemaError("empty table")
    stem = stem or kind
    csv_path = os.path.join(out_dir, f"{stem}.csv")
    write_csv(rows, columns, csv_path)
    summary: dict = {"kind": kind, "rows": len(rows), "schema": SCHEMA_VERSION}
    if rows and "wallclock" in rows[0]:
        summary["wallclock_total"] = float(sum(r["wallclock"] for r in rows))

    def stats(values):
        values = values[np.isfinite(values)]
        if values.size == 0:
            return None
        return {
            "median": float(np.median(values)),
            "q1": float(np.percentile(values, 25)),
            "q3": float(np.percentile(values, 75)),
            "mean": float(np.mean(values)),
        }

    if kind in ("fig1_accuracy", "fig1_failrate"):
        cells = {}
        for row in rows:
            key = (row["eps"], row["c"], row["r"])
            cells.setdefault(key, []).append(row)
        summary["cells"] = [
            {
                "eps": k[0], "c": k[1], "r": k[2],
                "n": len(v),
                "failure_rate": float(np.mean([not r["success"] for r in v])),
                "d_stats": stats(_col(v, "d_diamond", lambda r: r["success"])),
            }
            for k, v in sorted(cells.items())
        ]
    elif kind == "fig2_residual":
        summary["res_crafted"] = stats(_col(rows, "res_crafted",
                                            lambda r: r["success"]))
        summary["res_uncrafted"] = stats(_col(rows, "res_uncrafted"))
        summary["ratio_median"] = stats(_col(rows, "ratio",
                                             lambda r: r["success"]))
    elif kind == "fig3_ratios":
        fams = {}
        for row in rows:
            fams.setdefault(row["family"], []).append(row)
        summary["families"] = {
            fam: {
                "n": len(v),
                "success_rate": float(np.mean([bool(r["success"]) for r in v])),
                "q_z": stats(_col(v, "q_z", lambda r: r["success"])),
                "max_ratio_gap": stats(_col(v, "max_ratio_gap",
                                            lambda r: r["success"])),
            }
            for fam, v in fams.items()
        }
    elif kind == "fig5_tradeoff":
        eps = _col(rows, "eps", lambda r: not r["failure"])
        rate = _col(rows, "final_rate", lambda r: not r["failure"])
        if np.unique(eps).size >= 2:
            slope, err = fit_loglog_slope(eps, rate)
            summary["rate_vs_eps_slope"] = {"slope": slope, "stderr": err}
        keep = np.isfinite(rate) & (rate > 0)
        if np.any(keep):
            t = _col(rows, "tcount_pair_mean", lambda r: not r["failure"])[keep]
            acc = rate[keep]
            a = np.stack([np.log2(1 / acc), np.ones_like(acc)], axis=1)
            coef, *_ = np.linalg.lstsq(a, t, rcond=None)
            summary["tcount_vs_accuracy_slope"] = float(coef[0])
    elif kind == "whitenoise":
        summary["k_mean"] = stats(_col(rows, "k_mean"))
        summary["dev"] = stats(_col(rows, "dev"))
        summary["bias_within_bound"] = bool(all(
            float(r["bias"]) <= float(r["bound"]) + 1e-12 for r in rows))

    json_path = os.path.join(out_dir, f"{stem}_summary.json")
    with open(json_path, "w") as fh:
        json.dump(summary, fh, indent=1, sort_keys=True)
    return csv_path, json_path
