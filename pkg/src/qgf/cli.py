"""Command-line experiment runner: ``qgf <command> --config run.json [--out DIR] [--seed N] [--set k=v]``."""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from . import cv, resources
from .config import EXACT_GROUND, ExperimentConfig, load_config
from .errors import AllDegenerate, ConfigError, DegenerateDenominator, ResourceLimitError, UnderflowAnnihilated
from .filters import FilterParams, cosine_coefficients, filter_response, response
from .noise import CHANNELS, NoiseModel, mitigated_table, noisy_overlap_table
from .overlap import EXACT, OverlapTable, SampledMode, compute_table
from .pauli import MAX_DENSE_QUBITS, build_tfim, diagonalize
from .scan import ScanGrid, grid_scan, iterative_deepen
from .states import TrotterConfig, prepare_ghz_z, prepare_qaoa_random, prepare_x_ground, random_state

EXIT_OK, EXIT_CONFIG, EXIT_RESOURCE, EXIT_DEGENERATE = 0, 2, 3, 4


class _Run:
    """Resolved inputs shared by the subcommands."""

    def __init__(self, cfg: ExperimentConfig, out: Path):
        self.cfg = cfg
        self.out = out
        m = cfg.model
        self.h = build_tfim(m.n, m.J, m.g, m.periodic).shifted(m.shift)
        self.spectrum = diagonalize(self.h) if m.n <= MAX_DENSE_QUBITS else None
        self._psi = None

    @property
    def lambda0(self) -> float | None:
        return None if self.spectrum is None else self.spectrum.ground_energy

    @property
    def psi(self) -> np.ndarray:
        if self._psi is None:
            s = self.cfg.initial_state
            n = self.cfg.model.n
            self._psi = {
                "ghz_z": lambda: prepare_ghz_z(n),
                "x_ground": lambda: prepare_x_ground(n),
                "qaoa_random": lambda: prepare_qaoa_random(n, s.seed),
                "random": lambda: random_state(n, s.seed),
            }[s.kind]()
        return self._psi

    def anchor_energy(self, anchor, where: str) -> float:
        if anchor == EXACT_GROUND:
            if self.lambda0 is None:
                raise ConfigError("exact anchoring needs a diagonalizable model", where)
            return self.lambda0
        return float(anchor)

    def grid(self) -> ScanGrid:
        s = self.cfg.scan
        lo, hi = s.mu_range
        if s.mu_anchor is not None:
            base = self.anchor_energy(s.mu_anchor, "scan.mu_anchor")
            lo, hi = base + lo, base + hi
        return ScanGrid.from_ranges((lo, hi), s.mu_step, s.inv_sigma_sq_range, s.inv_sigma_sq_step)

    def evolver(self) -> TrotterConfig | None:
        steps = self.cfg.mode.trotter_steps
        return None if steps is None else TrotterConfig(steps, self.cfg.filter.delta_y)

    def mode(self):
        md = self.cfg.mode
        if md.kind == "sampled":
            return SampledMode(md.shots, md.seed)
        if md.kind == "noisy":
            raise ConfigError("noisy tables are produced by the noise command", "mode.kind")
        return EXACT

    def error(self, energy: float) -> float | None:
        return None if self.lambda0 is None else energy - self.lambda0

    def write_json(self, name: str, data) -> None:
        (self.out / name).write_text(json.dumps(data, indent=2, sort_keys=True) + "\n")

    def save_table(self, name: str, t: OverlapTable) -> None:
        (self.out / "tables").mkdir(exist_ok=True)
        t.save(self.out / "tables" / f"{name}.json")


def _write_csv(path: Path, header: list[str], rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([repr(float(x)) if isinstance(x, (float, np.floating)) else x for x in row])


def cmd_scan(run: _Run) -> dict:
    cfg = run.cfg
    m_y = cfg.filter.cutoffs()[-1]
    t = compute_table(run.h, run.psi, cfg.filter.delta_y, m_y, run.mode(), run.evolver(), run.spectrum)
    run.save_table("table", t)
    result = grid_scan(t, run.grid())
    result.to_csv(run.out / "scan.csv")
    return {
        "best_mu": result.best_mu,
        "best_inv_sigma_sq": result.best_inv_sigma_sq,
        "best_energy": result.best_energy,
        "exact_lambda0": run.lambda0,
        "error": run.error(result.best_energy),
        "m_y": m_y,
        "phi_m": t.phi_m,
    }


def cmd_iterate(run: _Run) -> dict:
    cfg = run.cfg
    stages, table = iterative_deepen(
        run.h, run.psi, cfg.filter.delta_y, cfg.filter.cutoffs(), run.grid(),
        mode=run.mode(), evolver=run.evolver(), spectrum=run.spectrum,
    )
    run.save_table("table", table)
    rows = []
    for st in stages:
        st.scan.to_csv(run.out / f"scan_m{st.m_y}.csv")
        err = run.error(st.best_energy)
        rows.append((st.m_y, st.phi_m, st.scan.best_mu, st.scan.best_inv_sigma_sq, st.best_energy,
                     "" if err is None else err))
    _write_csv(run.out / "iterate.csv", ["m_y", "phi_m", "best_mu", "best_inv_sigma_sq", "best_energy", "error"], rows)
    last = stages[-1]
    return {"best_energy": last.best_energy, "exact_lambda0": run.lambda0, "error": run.error(last.best_energy),
            "stages": len(stages)}


def cmd_noise(run: _Run) -> dict:
    cfg = run.cfg
    md = cfg.mode
    if md.steps_per_slice is None:
        raise ConfigError("the noise command requires steps_per_slice", "mode.steps_per_slice")
    if run.lambda0 is None:
        raise ResourceLimitError("noise curves need the exact ground energy")
    dy = cfg.filter.delta_y
    cutoffs = cfg.filter.cutoffs()
    m_max = cutoffs[-1]
    trotter = TrotterConfig(md.steps_per_slice, dy)
    grid = run.grid()
    clean = compute_table(run.h, run.psi, dy, m_max, evolver=trotter)
    run.save_table("noiseless", clean)
    channels = CHANNELS if md.channel == "both" else (md.channel,)
    summary = {"exact_lambda0": run.lambda0, "zne_scales": list(md.zne_scales), "channels": {}}
    for ch in channels:
        tables = []
        for scale in md.zne_scales:
            t = noisy_overlap_table(run.h, run.psi, dy, m_max, trotter, NoiseModel(ch, min(1.0, md.p * scale)))
            run.save_table(f"{ch}_x{scale:g}", t)
            tables.append(t)
        mitigated = mitigated_table(tables, md.zne_scales)
        rows = []
        for m in cutoffs:
            e = [grid_scan(t.truncated(m), grid).best_energy for t in (clean, tables[0], mitigated)]
            rows.append((m, m * dy, *e, *(x - run.lambda0 for x in e)))
        _write_csv(
            run.out / f"noise_{ch}.csv",
            ["m_y", "phi_m", "noiseless_energy", "noisy_energy", "mitigated_energy",
             "noiseless_error", "noisy_error", "mitigated_error"],
            rows,
        )
        summary["channels"][ch] = {
            "mitigated_below_noisy": bool(all(abs(r[7]) < abs(r[6]) for r in rows)),
            "final_noisy_error": rows[-1][6],
            "final_mitigated_error": rows[-1][7],
        }
    return summary


def cmd_cv(run: _Run) -> dict:
    c = run.cfg.cv
    if run.spectrum is None:
        raise ResourceLimitError("the qumode filter model needs a full eigendecomposition")
    shifts = np.asarray(c.shifts, dtype=float)
    if c.anchor is not None:
        shifts = shifts - run.anchor_energy(c.anchor, "cv.anchor")
    records = cv.cv_iterate(run.h, run.psi, c.s, shifts, run.spectrum)
    cv.write_cv_csv(records, run.out / "cv.csv")
    return {"exact_lambda0": run.lambda0, "final_error": records[-1].energy_error,
            "final_success_prob": records[-1].success_probability, "stages": len(records)}


def cmd_filter_response(run: _Run) -> dict:
    r = run.cfg.response
    lam = np.linspace(*r.lambda_range, r.n_lambda)
    rows = []
    for s in r.inv_sigma_sq:
        sigma_sq = 1.0 / s
        for phi in r.phi_m:
            m_y = int(round(phi / r.delta_y))
            g = filter_response(FilterParams(r.mu, s, r.delta_y, m_y), lam)
            window = phi * sigma_sq / 2
            # cosine filter matched to the same window: L = window, delta = sigma / sqrt 2
            try:
                cc = cosine_coefficients(window, np.sqrt(sigma_sq / 2), r.mu, np.sqrt(2 / sigma_sq) * window)
                cos_g = response(cc, lam).real
            except ValueError:
                cos_g = np.full_like(lam, np.nan)
            gauss = np.exp(-((lam - r.mu) ** 2) / sigma_sq)
            rows += [(s, phi, window, x, gi.real, gi.imag, ge, ci) for x, gi, ge, ci in zip(lam, g, gauss, cos_g)]
    _write_csv(run.out / "response.csv",
               ["inv_sigma_sq", "phi_m", "window", "lambda", "re_g", "im_g", "gaussian", "cosine"], rows)
    return {"curves": len(r.inv_sigma_sq) * len(r.phi_m), "points_per_curve": r.n_lambda}


def cmd_budget(run: _Run) -> dict:
    b = run.cfg.budget
    inputs = resources.ResourceInputs(b.a0_sq, b.epsilon, b.sigma_sq, b.lambda_m, b.big_l, b.delta_gap)
    y, shots = resources.shot_profile(inputs, b.delta_y)
    rows = [(int(yi), yi * b.delta_y, s) for yi, s in zip(y, shots)]
    _write_csv(run.out / "budget.csv", ["y", "t", "shots"], rows)
    t_star, worst = resources.worst_case_gate_count(inputs)
    summary = {
        "phi_m": resources.max_evolution_time(inputs),
        "total_shots": resources.total_shots(inputs, b.delta_y),
        "total_shots_closed_form": resources.total_shots_closed_form(inputs, b.delta_y),
        "worst_case_time": t_star,
        "worst_case_gate_count": worst,
        "gate_count_at_phi_m": resources.trotter_gate_count(inputs, resources.max_evolution_time(inputs), b.eps_term),
    }
    w = csv.writer(sys.stdout)
    w.writerow(["y", "t", "shots"])
    w.writerows([(yi, repr(float(t)), repr(float(s))) for yi, t, s in rows])
    sys.stdout.write("\n")
    w.writerow(["quantity", "estimate"])
    w.writerows([(k, repr(float(v))) for k, v in summary.items()])
    return summary


COMMANDS = {
    "scan": cmd_scan,
    "iterate": cmd_iterate,
    "noise": cmd_noise,
    "cv": cmd_cv,
    "filter-response": cmd_filter_response,
    "budget": cmd_budget,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qgf", description="Gaussian-filter ground-state experiments.")
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("--config", help="JSON experiment file (defaults are used for anything missing)")
    parser.add_argument("--out", help="output directory (overrides output.directory)")
    parser.add_argument("--seed", type=int, help="seed for the initial state and shot sampling")
    parser.add_argument("--set", dest="overrides", action="append", default=[], metavar="SECTION.KEY=VALUE",
                        help="override one config field; VALUE is parsed as JSON when possible")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    overrides = list(args.overrides)
    if args.seed is not None:
        if args.seed < 0:
            print("error: --seed must be non-negative", file=sys.stderr)
            return EXIT_CONFIG
        overrides += [f"initial_state.seed={args.seed}", f"mode.seed={args.seed}"]
    if args.out is not None:
        overrides.append(f"output.directory={json.dumps(args.out)}")
    try:
        cfg = load_config(args.config, overrides)
        out = Path(cfg.output.directory)
        out.mkdir(parents=True, exist_ok=True)
        (out / "config-resolved.json").write_text(cfg.to_json())
        run = _Run(cfg, out)
        summary = COMMANDS[args.command](run)
        run.write_json("summary.json", {"command": args.command, **summary})
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ResourceLimitError as exc:
        print(f"resource limit: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except (DegenerateDenominator, AllDegenerate, UnderflowAnnihilated) as exc:
        print(f"degenerate filter: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except ValueError as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
