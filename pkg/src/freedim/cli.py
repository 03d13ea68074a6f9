"""Configuration ingestion, scenario dispatch, and report emission.

One JSON config file per run; scenarios cover the dimension report, dual
operators, the spectral clamp sweep, finite and free group inputs, and the
semicontinuity counterexample.  Reports are deterministic for a fixed
config and seed (wall time goes to stderr, never into the report bytes).
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import tempfile
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from . import __version__
from .algebra import build_algebra, gns_structure
from .cocycles import delta_report
from .cutoff import CutoffFamily, convergence_sweep, spectral_radius
from .derivations import (
    DerivationSpec,
    construct_dual_operator,
    derivation_well_defined,
    fisher_report,
    inner_spec,
)
from .errors import (
    ComputationError,
    ConfigError,
    FreedimError,
    UnsupportedFormat,
)
from .groups import (
    BettiInput,
    FiniteGroupTable,
    betti_delta_formula,
    counterexample_report,
    cyclic_group,
    direct_product,
    from_mult_table,
    permutation_from_cycles,
    regular_rep_algebra,
    schreier_graph,
    symmetric_element_index,
    symmetric_group,
    word_str,
)
from .tolerances import residual_tol

SCENARIOS = (
    "delta",
    "dual_system",
    "cutoff",
    "group_finite",
    "group_free",
    "counterexample",
)

_TOP_KEYS = {"scenario", "algebra", "group", "parameters"}
_PARAM_KEYS = {
    "delta": {"seed"},
    "dual_system": {"seed", "dual"},
    "cutoff": {"seed", "r_grid", "dim", "n_ops", "A", "X", "smooth"},
    "group_finite": {"seed"},
    "group_free": {"rank", "images"},
    "counterexample": {"k_values"},
}
_NEEDS_ALGEBRA = {"delta", "dual_system"}
_NEEDS_GROUP = {"group_finite"}


@dataclass
class ScenarioConfig:
    scenario: str
    algebra: Optional[dict]
    group: Optional[dict]
    parameters: dict
    seed: int
    verbose: bool
    config_hash: str


@dataclass
class RunReport:
    scenario: str
    seed: int
    config_hash: str
    results: dict
    provenance: dict = field(default_factory=dict)
    residuals: dict = field(default_factory=dict)
    sweep_rows: Optional[list[tuple[float, float]]] = None

    def payload(self) -> dict:
        return {
            "schema": 1,
            "tool": "freedim",
            "tool_version": __version__,
            "scenario": self.scenario,
            "seed": self.seed,
            "config_hash": self.config_hash,
            "results": self.results,
            "provenance": self.provenance,
            "residuals": self.residuals,
        }


# ---------------------------------------------------------------------------
# value serialization
# ---------------------------------------------------------------------------

def _clean(value):
    """JSON-safe copy: fractions as 'p/q', non-finite floats as strings."""
    if isinstance(value, Fraction):
        return f"{value.numerator}/{value.denominator}"
    if isinstance(value, (np.bool_, bool)):
        return bool(value)
    if isinstance(value, (np.floating, float)):
        f = float(value)
        if not np.isfinite(f):
            return "inf" if f > 0 else ("-inf" if f < 0 else "nan")
        return f
    if isinstance(value, (np.integer, int)):
        return int(value)
    if isinstance(value, complex):
        return [value.real, value.imag]
    if isinstance(value, np.ndarray):
        return _clean(value.tolist())
    if isinstance(value, dict):
        return {str(k): _clean(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_clean(v) for v in value]
    return value


def matrix_to_pairs(mat: np.ndarray) -> list:
    """Complex matrix as nested [re, im] pairs."""
    m = np.asarray(mat, dtype=complex)
    return [[[float(x.real), float(x.imag)] for x in row] for row in m]


def _parse_matrix(raw, where: str) -> np.ndarray:
    arr = np.asarray(raw, dtype=float)
    if arr.ndim != 3 or arr.shape[2] != 2 or arr.shape[0] != arr.shape[1]:
        raise ConfigError(
            f"{where}: expected a square matrix of [re, im] pairs, got shape "
            f"{arr.shape}"
        )
    return arr[:, :, 0] + 1j * arr[:, :, 1]


# ---------------------------------------------------------------------------
# config validation
# ---------------------------------------------------------------------------

def _check_keys(d: dict, allowed: set, required: set, where: str) -> None:
    unknown = sorted(set(d) - allowed)
    if unknown:
        raise ConfigError(f"{where}: unknown keys {unknown}")
    missing = sorted(required - set(d))
    if missing:
        raise ConfigError(f"{where}: missing required keys {missing}")


def load_config(path: str, scenario: str, seed_override: Optional[int],
                verbose: bool) -> ScenarioConfig:
    try:
        with open(path, "rb") as fh:
            raw_bytes = fh.read()
        raw = json.loads(raw_bytes)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")

    if scenario not in SCENARIOS:
        raise ConfigError(f"unknown scenario {scenario!r}")
    _check_keys(raw, _TOP_KEYS, set(), "config")
    if "scenario" in raw and raw["scenario"] != scenario:
        raise ConfigError(
            f"config is for scenario {raw['scenario']!r}, not {scenario!r}"
        )

    if scenario in _NEEDS_ALGEBRA and "algebra" not in raw:
        raise ConfigError(f"scenario {scenario!r} requires an algebra section")
    if scenario in _NEEDS_GROUP and "group" not in raw:
        raise ConfigError(f"scenario {scenario!r} requires a group section")
    if scenario not in _NEEDS_ALGEBRA and "algebra" in raw:
        raise ConfigError(f"scenario {scenario!r} does not take an algebra section")
    if scenario not in _NEEDS_GROUP | {"group_free"} and "group" in raw:
        raise ConfigError(f"scenario {scenario!r} does not take a group section")

    params = raw.get("parameters", {})
    if not isinstance(params, dict):
        raise ConfigError("parameters must be an object")
    _check_keys(params, _PARAM_KEYS[scenario], set(), "parameters")

    if scenario == "dual_system" and "dual" not in params:
        raise ConfigError("dual_system requires parameters.dual")
    if scenario == "cutoff" and "r_grid" not in params:
        raise ConfigError("cutoff requires parameters.r_grid")
    if scenario == "group_free" and "rank" not in params:
        raise ConfigError("group_free requires parameters.rank")

    seed = params.get("seed", 0)
    if not isinstance(seed, int):
        raise ConfigError("seed must be an integer")
    if seed_override is not None:
        seed = seed_override

    digest = hashlib.sha256(
        json.dumps(raw, sort_keys=True, separators=(",", ":")).encode()
    ).hexdigest()
    return ScenarioConfig(
        scenario=scenario,
        algebra=raw.get("algebra"),
        group=raw.get("group"),
        parameters=params,
        seed=seed,
        verbose=verbose,
        config_hash=digest,
    )


def _build_algebra_from_config(section: dict):
    _check_keys(
        section, {"blocks", "weights", "generators", "labels", "subalgebra_mode"},
        {"blocks", "weights", "generators"}, "algebra",
    )
    gens = [
        _parse_matrix(g, f"algebra.generators[{k}]")
        for k, g in enumerate(section["generators"])
    ]
    return build_algebra(
        section["blocks"],
        section["weights"],
        gens,
        labels=section.get("labels"),
        subalgebra_mode=bool(section.get("subalgebra_mode", False)),
    )


def _build_group_from_config(section: dict) -> tuple[FiniteGroupTable, Optional[list]]:
    _check_keys(
        section, {"kind", "n", "factors", "mult", "generating_set"}, {"kind"},
        "group",
    )
    kind = section["kind"]
    if kind == "cyclic":
        table = cyclic_group(int(section["n"]))
    elif kind == "symmetric":
        table = symmetric_group(int(section["n"]))
    elif kind == "product":
        factors = [_build_group_from_config(f)[0] for f in section["factors"]]
        if len(factors) < 2:
            raise ConfigError("product groups need at least two factors")
        table = factors[0]
        for f in factors[1:]:
            table = direct_product(table, f)
    elif kind == "table":
        table = from_mult_table(section["mult"])
    else:
        raise ConfigError(f"unknown group kind {kind!r}")
    return table, section.get("generating_set")


# ---------------------------------------------------------------------------
# scenario execution
# ---------------------------------------------------------------------------

def _delta_results(rep) -> dict:
    blocks = []
    b = len(rep.block_sizes)
    for i in range(b):
        for j in range(b):
            blocks.append({
                "i": i,
                "j": j,
                "size_i": rep.block_sizes[i],
                "size_j": rep.block_sizes[j],
                "multiplicity": int(rep.multiplicities[i, j]),
            })
    return {
        "Delta": rep.Delta,
        "Delta_fraction": rep.fractions["Delta"],
        "beta0": rep.beta0,
        "beta0_fraction": rep.fractions["beta0"],
        "closed_form_beta0": rep.closed_form_beta0,
        "dim_H0": rep.dim_H0,
        "dim_H1": rep.dim_H1,
        "dim_H2": rep.dim_H2,
        "pinned": {
            "delta_star": rep.delta_star,
            "delta_blackstar": rep.delta_blackstar,
            "status": "pinned, not computed: the dimension chain collapses "
                      "in finite dimensions",
        },
        "blocks": blocks,
        "block_sizes": list(rep.block_sizes),
        "weights": list(rep.weights),
        "agreement": rep.agreement,
        "subspace_distances": rep.distances,
    }


def _run_delta(config: ScenarioConfig) -> RunReport:
    algebra = _build_algebra_from_config(config.algebra)
    rep = delta_report(algebra, seed=config.seed)
    return RunReport(
        scenario="delta",
        seed=config.seed,
        config_hash=config.config_hash,
        results=_delta_results(rep),
        provenance={
            "Delta": "computed (trace-weighted dimension of the weak-limit "
                     "cocycle space)",
            "delta_star": "pinned",
            "delta_blackstar": "pinned",
            "beta0": "defined as 1 - Delta; closed form is a cross-check",
        },
        residuals=rep.distances,
    )


def _run_dual_system(config: ScenarioConfig) -> RunReport:
    algebra = _build_algebra_from_config(config.algebra)
    gns = gns_structure(algebra)
    dual = config.parameters["dual"]
    if not isinstance(dual, dict) or "type" not in dual:
        raise ConfigError("parameters.dual must be an object with a 'type'")
    kind = dual["type"]

    if kind == "fisher":
        _check_keys(dual, {"type"}, set(), "parameters.dual")
        rep = fisher_report(algebra, gns)
        return RunReport(
            scenario="dual_system",
            seed=config.seed,
            config_hash=config.config_hash,
            results={
                "mode": "fisher",
                "value": rep.value,
                "slots": [
                    {
                        "slot": s.slot,
                        "well_defined": s.well_defined,
                        "defect": s.defect,
                        "xi_norm_sq": s.xi_norm_sq,
                    }
                    for s in rep.slots
                ],
            },
            provenance={"value": "sum of squared conjugate-vector norms, "
                                 "+inf when a slot fails to descend"},
        )

    if kind == "inner":
        _check_keys(dual, {"type", "matrix"}, {"matrix"}, "parameters.dual")
        B = _parse_matrix(dual["matrix"], "parameters.dual.matrix")
        if B.shape != (gns.dim, gns.dim):
            raise ConfigError(
                f"dual matrix must be {gns.dim} x {gns.dim} on this algebra"
            )
        spec = inner_spec(gns, algebra.generators, B)
    elif kind == "free_difference_quotient":
        _check_keys(dual, {"type", "slot"}, {"slot"}, "parameters.dual")
        spec = DerivationSpec.free_difference_quotient(int(dual["slot"]))
    elif kind == "explicit":
        _check_keys(dual, {"type", "targets"}, {"targets"}, "parameters.dual")
        spec = DerivationSpec.from_targets([
            _parse_matrix(t, f"parameters.dual.targets[{k}]")
            for k, t in enumerate(dual["targets"])
        ])
    else:
        raise ConfigError(f"unknown dual type {kind!r}")

    ok, defect, _ = derivation_well_defined(gns, algebra.generators, spec)
    results = {"mode": kind, "well_defined": ok, "defect": defect}
    residuals = {"well_definedness_defect": defect}
    if ok:
        rep = construct_dual_operator(gns, spec, tol=residual_tol())
        residuals.update({
            "Y1": rep.residual_Y1,
            "commutators": rep.residual_commutators,
            "adjoint": rep.residual_adjoint,
        })
        results["xi_norm"] = float(np.linalg.norm(rep.xi))
        if config.verbose:
            results["Y"] = matrix_to_pairs(rep.Y)
            results["xi"] = [[float(x.real), float(x.imag)] for x in rep.xi]
    return RunReport(
        scenario="dual_system",
        seed=config.seed,
        config_hash=config.config_hash,
        results=results,
        provenance={"construction": "operator assembled on the cyclic basis "
                                    "from the induced derivative map"},
        residuals=residuals,
    )


def _run_cutoff(config: ScenarioConfig) -> RunReport:
    params = config.parameters
    grid = [float(r) for r in params["r_grid"]]
    if not grid or any(r <= 0 for r in grid):
        raise ConfigError("r_grid must be a nonempty list of positive reals")
    smooth = bool(params.get("smooth", False))

    if "A" in params:
        A = _parse_matrix(params["A"], "parameters.A")
        Xs = [
            _parse_matrix(x, f"parameters.X[{k}]")
            for k, x in enumerate(params.get("X", []))
        ]
        if not Xs:
            raise ConfigError("explicit cutoff runs need parameters.X")
    else:
        dim = int(params.get("dim", 8))
        n_ops = int(params.get("n_ops", 2))
        rng = np.random.default_rng(config.seed)

        def herm(d):
            m = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
            return (m + m.conj().T) / 2.0

        A = herm(dim)
        Xs = [herm(dim) for _ in range(n_ops)]

    rows = convergence_sweep(A, Xs, grid, smooth=smooth)
    rho = spectral_radius(A)
    family = CutoffFamily(max(grid), smooth=smooth)
    sample = np.linspace(-max(grid), max(grid), 101)
    inside = sample[np.abs(sample) <= family.R]
    conditions = {
        "fixes_inner_interval": bool(
            np.abs(family.f(inside) - inside).max() == 0.0 if inside.size else True
        ),
        "bounded_by_R_plus_1": bool(
            np.abs(family.f(np.linspace(-10 * family.R, 10 * family.R, 201))).max()
            <= family.R + 1.0 + 1e-12
        ),
        "quotient_bounded_by_2": bool(
            np.abs(
                family.g(*np.meshgrid(np.linspace(-5 * family.R, 5 * family.R, 101),
                                      np.linspace(-5 * family.R, 5 * family.R, 101)))
            ).max() <= 2.0 + 1e-12
        ),
    }
    return RunReport(
        scenario="cutoff",
        seed=config.seed,
        config_hash=config.config_hash,
        results={
            "spectral_radius": rho,
            "smooth": smooth,
            "sweep": [{"R": r, "hs_error": e} for r, e in rows],
            "zero_beyond_radius": bool(
                all(e <= 1e-10 for r, e in rows if r >= rho)
            ),
            "conditions": conditions,
        },
        provenance={"sweep": "computed from the eigendecomposition of A"},
        sweep_rows=rows,
    )


def _run_group_finite(config: ScenarioConfig) -> RunReport:
    table, gen_set = _build_group_from_config(config.group)
    algebra = regular_rep_algebra(table, generating_set=gen_set, seed=config.seed)
    rep = delta_report(algebra, seed=config.seed)
    formula = betti_delta_formula(BettiInput.finite_group(table.order))
    results = _delta_results(rep)
    results.update({
        "group_order": table.order,
        "formula_delta": formula,
        "formula_abs_error": abs(formula - rep.Delta),
        "generators": list(algebra.labels),
    })
    return RunReport(
        scenario="group_finite",
        seed=config.seed,
        config_hash=config.config_hash,
        results=results,
        provenance={
            "Delta": "computed from the regular representation",
            "formula_delta": "1 - 1/|G| from the Betti inputs of a finite group",
        },
        residuals={"formula_abs_error": abs(formula - rep.Delta)},
    )


def _resolve_images(raw_images, group_section) -> list[int]:
    """Homomorphism images as element indices or 1-based cycle notation."""
    out = []
    for im in raw_images:
        if isinstance(im, str):
            if group_section.get("kind") != "symmetric":
                raise ConfigError(
                    "cycle-notation images require a symmetric group section"
                )
            degree = int(group_section["n"])
            out.append(
                symmetric_element_index(
                    permutation_from_cycles(im, degree), degree
                )
            )
        else:
            out.append(int(im))
    return out


def _run_group_free(config: ScenarioConfig) -> RunReport:
    rank = int(config.parameters["rank"])
    delta = betti_delta_formula(BettiInput.free_group(rank))
    results = {"rank": rank, "delta": delta}
    if "images" in config.parameters:
        if config.group is None:
            raise ConfigError("parameters.images requires a group section")
        table, _ = _build_group_from_config(config.group)
        images = _resolve_images(config.parameters["images"], config.group)
        graph = schreier_graph(rank, images, table)
        results["kernel"] = {
            "index": graph.index,
            "rank": graph.rank,
            "generators": [word_str(w, graph.names)
                           for w in graph.subgroup_generators],
            "kernel_verified": graph.kernel_verified,
            "kernel_delta": betti_delta_formula(BettiInput.free_group(graph.rank)),
        }
    return RunReport(
        scenario="group_free",
        seed=config.seed,
        config_hash=config.config_hash,
        results=results,
        provenance={"delta": "Betti formula for a free group (pinned)"},
    )


def _run_counterexample(config: ScenarioConfig) -> RunReport:
    k_values = config.parameters.get("k_values", [1, 2, 3, 4, 5, 10, 100])
    report = counterexample_report([int(k) for k in k_values])
    return RunReport(
        scenario="counterexample",
        seed=config.seed,
        config_hash=config.config_hash,
        results=report,
        provenance=report["provenance"],
    )


_RUNNERS = {
    "delta": _run_delta,
    "dual_system": _run_dual_system,
    "cutoff": _run_cutoff,
    "group_finite": _run_group_finite,
    "group_free": _run_group_free,
    "counterexample": _run_counterexample,
}


def run_scenario(config: ScenarioConfig) -> RunReport:
    """Dispatch to the owning module and aggregate the results."""
    runner = _RUNNERS[config.scenario]
    try:
        return runner(config)
    except ConfigError:
        raise
    except FreedimError as exc:
        raise ComputationError(f"{type(exc).__name__}: {exc}") from exc


# ---------------------------------------------------------------------------
# emission
# ---------------------------------------------------------------------------

def _text_lines(report: RunReport) -> list[str]:
    lines = [f"scenario: {report.scenario}", f"seed: {report.seed}"]
    r = report.results
    if report.scenario in ("delta", "group_finite"):
        lines.append(
            f"Delta = {r['Delta']!r} ({_clean(r['Delta_fraction'])})"
        )
        lines.append(f"beta0 = {r['beta0']!r} ({_clean(r['beta0_fraction'])})")
        lines.append(
            f"dim H0 = {r['dim_H0']!r}, dim H1 = {r['dim_H1']!r}, "
            f"dim H2 = {r['dim_H2']!r}"
        )
        lines.append(
            f"pinned: delta_star = delta_blackstar = {r['pinned']['delta_star']!r}"
        )
        if report.scenario == "group_finite":
            lines.append(
                f"group order {r['group_order']}: formula value "
                f"{r['formula_delta']!r}, abs error {r['formula_abs_error']!r}"
            )
    elif report.scenario == "dual_system":
        lines.append(f"mode: {r['mode']}")
        if r.get("mode") == "fisher":
            lines.append(f"fisher value = {_clean(r['value'])}")
            for slot in r["slots"]:
                lines.append(
                    f"  slot {slot['slot']}: well_defined={slot['well_defined']} "
                    f"defect={slot['defect']!r}"
                )
        else:
            lines.append(f"well_defined = {r['well_defined']}")
            lines.append(f"defect = {r['defect']!r}")
            for key, val in report.residuals.items():
                lines.append(f"residual {key} = {val!r}")
    elif report.scenario == "cutoff":
        lines.append(f"spectral radius = {r['spectral_radius']!r}")
        for row in r["sweep"]:
            lines.append(f"R = {row['R']!r}: hs_error = {row['hs_error']!r}")
        lines.append(f"zero beyond radius: {r['zero_beyond_radius']}")
    elif report.scenario == "group_free":
        lines.append(f"delta(free group, rank {r['rank']}) = {r['delta']!r}")
        if "kernel" in r:
            k = r["kernel"]
            lines.append(
                f"kernel: index {k['index']}, rank {k['rank']}, "
                f"generators {', '.join(k['generators'])}"
            )
            lines.append(f"kernel membership verified: {k['kernel_verified']}")
    elif report.scenario == "counterexample":
        for row in r["per_k"]:
            lines.append(
                f"k = {row['k']}: delta = {row['delta']!r}, shrinking-coordinate "
                f"norm bound {row['shrink_norm_bound']!r}"
            )
        lim = r["limit"]
        lines.append(
            f"limit: kernel index {lim['kernel_index']}, rank "
            f"{lim['kernel_rank']}, delta = {lim['delta']!r}"
        )
        lines.append("liminf delta = 2 < 3 = delta(limit)")
    return lines


def emit_report(report: RunReport, fmt: str) -> bytes:
    """Serialize a report as json, csv (sweeps only) or a text summary."""
    if fmt == "json":
        payload = _clean(report.payload())
        return (json.dumps(payload, sort_keys=True, indent=2) + "\n").encode()
    if fmt == "csv":
        if report.sweep_rows is None:
            raise UnsupportedFormat(
                f"csv output is only available for sweep scenarios, "
                f"not {report.scenario!r}"
            )
        lines = ["R,hs_error"]
        lines += [f"{r!r},{e!r}" for r, e in report.sweep_rows]
        return ("\n".join(lines) + "\n").encode()
    if fmt == "text":
        return ("\n".join(_text_lines(report)) + "\n").encode()
    raise UnsupportedFormat(f"unknown format {fmt!r}")


def _write_atomic(path: str, payload: bytes) -> None:
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".freedim-")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(payload)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def main(argv: Optional[list[str]] = None) -> int:
    parser = argparse.ArgumentParser(
        prog="freedim",
        description="dimension workbench for finite tracial matrix algebras",
    )
    parser.add_argument("scenario", choices=SCENARIOS)
    parser.add_argument("--config", required=True, help="path to a JSON config")
    parser.add_argument("--format", default="json", choices=("json", "csv", "text"))
    parser.add_argument("--seed", type=int, default=None,
                        help="override the config seed")
    parser.add_argument("--verbose", action="store_true",
                        help="include matrices in dual-system reports")
    parser.add_argument("--output", default=None,
                        help="write the report to this file (atomically)")
    args = parser.parse_args(argv)

    start = time.perf_counter()
    try:
        config = load_config(args.config, args.scenario, args.seed, args.verbose)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2

    try:
        report = run_scenario(config)
        payload = emit_report(report, args.format)
    except UnsupportedFormat as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except ComputationError as exc:
        print(f"computation error: {exc}", file=sys.stderr)
        return 1
    except FreedimError as exc:
        print(f"computation error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1

    if args.output:
        _write_atomic(args.output, payload)
    else:
        sys.stdout.buffer.write(payload)
        sys.stdout.buffer.flush()
    elapsed = time.perf_counter() - start
    print(f"freedim {args.scenario}: completed in {elapsed:.3f}s", file=sys.stderr)
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
