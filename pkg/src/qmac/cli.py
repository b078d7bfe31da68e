"""Command-line front end.

    qmac <command> --config <path> [--out <path>] [--format json|csv]
                   [--seed <u64>] [--threads <n>] [--figure]

Exit status: 0 success, 1 invalid input, 2 computation error (or a failed
invariant in ``check``). Outputs are written atomically; nothing is written
when a command fails.
"""
from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

import numpy as np

from . import formats
from .coding import (
    DEFAULT_DELTA,
    Codebook,
    error_probability,
    random_code_average,
    sizes_from_rates,
    trial_generator,
)
from .converse import codebook_entropies, converse_bounds
from .ensemble import conditional_densities, is_density_matrix, joint_density, require_valid, validate_ensemble
from .entropy import (
    DEFAULT_DIM_CAP,
    ENTROPY_TOL,
    conditional_entropies,
    holevo_information,
    shannon_entropy,
    ssa_witness_check,
)
from .errors import ComputationError, ConfigError, InputError, QmacError
from .region import SamplerPlan, hull_convergence, pentagon, region_union
from .superdense import SchmidtState, superdense_bounds, pauli_ensemble, superdense_ensemble

COMMANDS = ("entropy", "region", "simulate", "superdense", "converse", "check")


class Run:
    """Parsed configuration plus command-line overrides."""

    def __init__(self, command: str, config: dict, base_dir: Path, args):
        self.command = command
        self.cfg = config
        self.base = base_dir
        self.seed = args.seed if args.seed is not None else config.get("seed")
        self.threads = max(1, int(args.threads or config.get("threads", 1)))
        env_cap = os.environ.get("QMAC_DIM_CAP")
        try:
            self.dim_cap = int(env_cap) if env_cap else int(config.get("dimension_cap", DEFAULT_DIM_CAP))
        except ValueError:
            raise ConfigError("dimension cap must be an integer") from None
        self.delta = float(config.get("delta", DEFAULT_DELTA))

    def require_seed(self) -> int:
        if self.seed is None:
            raise ConfigError(f"command {self.command!r} is randomized and needs a seed")
        seed = int(self.seed)
        if not 0 <= seed < 2 ** 64:
            raise ConfigError("seed must be an unsigned 64-bit integer")
        return seed

    def ensemble(self):
        raw = self.cfg.get("ensemble")
        if raw is None:
            raise ConfigError("config has no 'ensemble'")
        if isinstance(raw, str):
            raw = formats.load_json(self.base / raw)
        return formats.ensemble_from_dict(raw)


# --- commands ------------------------------------------------------------------
# each returns (json_payload, csv_header, csv_rows, figure_or_None)

def cmd_entropy(run: Run):
    e = require_valid(run.ensemble())
    prof = conditional_entropies(e)
    payload = prof.to_dict()
    payload.update({"h_p": shannon_entropy(e.p), "h_q": shannon_entropy(e.q)})
    rows = [(k, payload[k]) for k in sorted(payload)]
    return payload, ("quantity", "bits"), rows, None


def cmd_region(run: Run, want_figure: bool):
    e = require_valid(run.ensemble())
    n_random = int(run.cfg.get("random_samples", 0))
    plan = SamplerPlan(
        grid_step=run.cfg.get("grid_step", 0.05),
        random_samples=n_random,
        seed=run.require_seed() if n_random else None,
    )
    region = region_union(e, plan)
    base = pentagon(conditional_entropies(e))
    payload = {
        "region": region.to_dict(),
        "configured_pentagon": base.to_dict(),
        "profile": conditional_entropies(e).to_dict(),
        "sampler": {"grid_step": plan.grid_step, "random_samples": plan.random_samples, "seed": plan.seed},
        "convergence": hull_convergence(e, plan),
    }
    rows = [(x, y) for x, y in region.vertices]
    fig = None
    if want_figure:
        from .plotting import region_figure
        fig = region_figure([("union over distributions", region), ("configured p, q", base)],
                            title="Achievable rate region")
    return payload, ("r1", "r2"), rows, fig


def _alice_strings_for(opts: dict, e, L: int) -> list:
    if "alice_strings" in opts:
        strings = [formats.split_string(s, e.alphabet_a) for s in opts["alice_strings"]]
        if any(len(s) != L for s in strings):
            raise ConfigError("alice_strings must match every requested L; use alice_cycle instead")
        return strings
    cycles = opts.get("alice_cycle")
    if not cycles:
        raise ConfigError("random_code needs 'alice_strings' or 'alice_cycle'")
    out = []
    for c in cycles:
        letters = formats.split_string(c, e.alphabet_a)
        out.append(tuple(letters[t % len(letters)] for t in range(L)))
    return out


def cmd_simulate(run: Run, want_figure: bool):
    e = require_valid(run.ensemble())
    if "codebook" in run.cfg:
        cb = formats.codebook_from_dict(run.cfg["codebook"], e)
        res = error_probability(e, cb, run.delta, run.dim_cap)
        payload = {"mode": "codebook", "delta": run.delta, "codebook": cb.to_dict(), **res.to_dict()}
        header = ("alice_index",) + tuple(f"bob_{j}" for j in range(cb.N))
        rows = [(i, *res.success[i]) for i in range(cb.M)]
        return payload, header, rows, None

    opts = run.cfg.get("random_code")
    if not isinstance(opts, dict):
        raise ConfigError("simulate needs 'codebook' or 'random_code'")
    seed = run.require_seed()
    lengths = opts.get("L", 2)
    lengths = [int(x) for x in (lengths if isinstance(lengths, list) else [lengths])]
    trials = int(opts.get("trials", 100))
    results = []
    for L in lengths:
        alice = _alice_strings_for(opts, e, L)
        if "N" in opts:
            N = int(opts["N"])
        elif "R2" in opts:
            N = sizes_from_rates(0.0, float(opts["R2"]), L)[1]
        else:
            raise ConfigError("random_code needs 'N' or 'R2'")
        avg = random_code_average(e, alice, N, L, run.delta, trials, seed, run.dim_cap, run.threads)
        results.append({"L": L, "M": len(alice), "N": N, **avg.to_dict()})
    payload = {"mode": "random_code", "delta": run.delta, "seed": seed, "results": results}
    rows = [(r["L"], r["M"], r["N"], r["trials"], r["mean"], r["std"], r["sem"]) for r in results]
    fig = None
    if want_figure:
        from .plotting import error_trend_figure
        fig = error_trend_figure([r["L"] for r in results], [r["mean"] for r in results],
                                 [r["sem"] for r in results], title="Random-code average error")
    return payload, ("L", "M", "N", "trials", "mean", "std", "sem"), rows, fig


def _unitary_ensemble(opts: dict, n: int):
    ens = pauli_ensemble(
        n,
        include_shifts=bool(opts.get("shifts", True)),
        include_phases=bool(opts.get("phases", True)),
        full_permutations=bool(opts.get("full_permutations", False)),
    )
    if "subset" in opts:
        idx = [int(i) for i in opts["subset"]]
        if not idx or any(i < 0 or i >= len(ens.unitaries) for i in idx):
            raise ConfigError(f"subset indices must lie in [0, {len(ens.unitaries)})")
        ens = ens.subset(idx)
    return ens


def cmd_superdense(run: Run, want_figure: bool):
    amps = run.cfg.get("schmidt")
    if amps is None:
        raise ConfigError("superdense needs 'schmidt' amplitudes")
    s = SchmidtState(np.asarray(amps, dtype=float))
    ens_a = _unitary_ensemble(run.cfg.get("alice", {}), s.n)
    ens_b = _unitary_ensemble(run.cfg.get("bob", {}), s.n)
    rep = superdense_bounds(s, ens_a, ens_b)
    payload = rep.to_dict()
    payload["alice_unitaries"] = list(ens_a.labels)
    payload["bob_unitaries"] = list(ens_b.labels)
    if run.cfg.get("emit_ensemble"):
        payload["ensemble"] = formats.ensemble_to_dict(superdense_ensemble(s, ens_a, ens_b))
    p = rep.profile
    rows = [
        ("sum", p.h_joint, rep.sum_bound, rep.slacks["sum"]),
        ("alice", p.h_cond_a, rep.alice_bound, rep.slacks["alice"]),
        ("bob", p.h_cond_b, rep.bob_bound, rep.slacks["bob"]),
    ]
    fig = None
    if want_figure:
        from .plotting import region_figure
        fig = region_figure([("induced ensemble", pentagon(p))],
                            title=f"Superdense MAC, N={s.n}, $H_E$={rep.h_e:.3f}",
                            bounds=(rep.alice_bound, rep.bob_bound, rep.sum_bound))
    return payload, ("constraint", "value", "bound", "slack"), rows, fig


def _random_codebook(e, M, N, L, rng) -> Codebook:
    a = rng.choice(len(e.alphabet_a), size=(M, L), p=e.p)
    b = rng.choice(len(e.alphabet_b), size=(N, L), p=e.q)
    return Codebook(L, [[e.alphabet_a[k] for k in r] for r in a], [[e.alphabet_b[k] for k in r] for r in b])


def cmd_converse(run: Run):
    e = require_valid(run.ensemble())
    books = []
    if "codebook" in run.cfg:
        books.append(formats.codebook_from_dict(run.cfg["codebook"], e))
    opts = run.cfg.get("random_codebooks")
    if opts:
        seed = run.require_seed()
        for t in range(int(opts.get("count", 1))):
            books.append(_random_codebook(e, int(opts["M"]), int(opts["N"]), int(opts["L"]),
                                          trial_generator(seed, t)))
    if not books:
        raise ConfigError("converse needs 'codebook' or 'random_codebooks'")
    reports, rows = [], []
    for idx, cb in enumerate(books):
        rep = codebook_entropies(e, cb, run.dim_cap)
        bounds = converse_bounds(rep, cb.length_L)
        reports.append({"codebook": cb.to_dict(), "report": rep.to_dict(), "bounds": bounds.to_dict()})
        for k, prof in enumerate(rep.per_position):
            rows.append((idx, k, prof.h_joint, prof.h_cond_a, prof.h_cond_b))
    payload = {"codebooks": reports, "all_hold": all(r["report"]["inequalities_hold"] for r in reports)}
    return payload, ("codebook", "position", "h", "h_cond_A", "h_cond_B"), rows, None


def cmd_check(run: Run):
    e = run.ensemble()
    problems = validate_ensemble(e)
    checks = [("ensemble_valid", not problems, float(len(problems)))]
    if not problems:
        prof = conditional_entropies(e)
        rho = joint_density(e)
        wit = ssa_witness_check(e, run.dim_cap)
        rho_a = conditional_densities(e, "A")
        rho_b = conditional_densities(e, "B")
        holevo_a = holevo_information(rho_a, e.p)
        holevo_b = holevo_information(rho_b, e.q)
        checks += [
            ("density_matrix", is_density_matrix(rho), float(np.trace(rho).real)),
            ("concavity_h_cond_A", prof.h_cond_a <= prof.h_joint + ENTROPY_TOL, prof.h_joint - prof.h_cond_a),
            ("concavity_h_cond_B", prof.h_cond_b <= prof.h_joint + ENTROPY_TOL, prof.h_joint - prof.h_cond_b),
            ("subadditivity", prof.h_cond_a + prof.h_cond_b >= prof.h_joint - ENTROPY_TOL,
             prof.h_cond_a + prof.h_cond_b - prof.h_joint),
            ("ssa_witness_identities", wit.identities_hold,
             max(abs(v) for v in wit.identity_errors.values())),
            ("ssa_slack_nonnegative", wit.ssa_slack >= -ENTROPY_TOL, wit.ssa_slack),
            ("holevo_alice_nonnegative", holevo_a >= -ENTROPY_TOL, holevo_a),
            ("holevo_bob_nonnegative", holevo_b >= -ENTROPY_TOL, holevo_b),
        ]
    payload = {
        "checks": [{"name": n, "pass": bool(ok), "value": float(v)} for n, ok, v in checks],
        "all_pass": all(ok for _, ok, _ in checks),
        "problems": problems,
    }
    return payload, ("check", "pass", "value"), [(n, bool(ok), float(v)) for n, ok, v in checks], None


# --- driver ----------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        # usage errors are invalid input, status 1
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="qmac", description="Quantum multiple-access channel laboratory.")
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--config", required=True, help="JSON run configuration")
    ap.add_argument("--out", help="output path (default: stdout)")
    ap.add_argument("--format", choices=("json", "csv"), help="output format (default json)")
    ap.add_argument("--seed", type=int, help="64-bit seed; overrides the config")
    ap.add_argument("--threads", type=int, help="worker threads for Monte Carlo trials")
    ap.add_argument("--figure", action="store_true",
                    help="also render a PNG next to --out (region, simulate, superdense)")
    return ap


def execute(args) -> int:
    cfg_path = Path(args.config)
    config = formats.load_json(cfg_path)
    if not isinstance(config, dict):
        raise ConfigError("config must be a JSON object")
    if "command" in config and config["command"] != args.command:
        raise ConfigError(f"config is for {config['command']!r}, not {args.command!r}")
    out_cfg = config.get("output", {}) or {}
    out = args.out or out_cfg.get("path")
    fmt = args.format or out_cfg.get("format", "json")
    if fmt not in ("json", "csv"):
        raise ConfigError(f"unknown output format {fmt!r}")
    run = Run(args.command, config, cfg_path.parent, args)
    want_fig = bool(args.figure and out)

    cmd = args.command
    if cmd in ("region", "simulate", "superdense"):
        payload, header, rows, fig = globals()[f"cmd_{cmd}"](run, want_fig)
    else:
        payload, header, rows, fig = globals()[f"cmd_{cmd}"](run)
    payload = {"command": cmd, **payload}
    text = formats.dumps(payload) if fmt == "json" else formats.csv_text(header, rows)

    if out:
        formats.write_atomic(out, text)
        if fig is not None:
            from .plotting import figure_bytes
            formats.write_atomic(Path(out).with_suffix(".png"), figure_bytes(fig), binary=True)
    else:
        sys.stdout.write(text)
    if cmd == "check" and not payload["all_pass"]:
        print("qmac: one or more invariant checks failed", file=sys.stderr)
        return 2
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return execute(args)
    except InputError as exc:
        print(f"qmac: invalid input: {exc}", file=sys.stderr)
        return 1
    except (ComputationError, np.linalg.LinAlgError, MemoryError) as exc:
        print(f"qmac: computation error: {exc}", file=sys.stderr)
        return 2
    except QmacError as exc:
        print(f"qmac: {exc}", file=sys.stderr)
        return 2
    except (ValueError, TypeError, KeyError) as exc:
        print(f"qmac: invalid input: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
