"""Experiment runner exposing named scenarios with reproducible seeds.

Every scenario resolves its parameters from built-in defaults, an optional
flat JSON config file, and command-line flags (flags win), runs the relevant
library routines, and emits a report in which each quantity carries its
value, the closed form it is checked against, the tolerance used, and a
pass/fail flag. Exit status: 0 when all checks pass, 1 on a tolerance
failure, 2 on a usage or configuration error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import hidden_circle, measurement, repframe, singlet
from .errors import SingletPathsError
from .hilbert import SIGMA1, SIGMA2, SIGMA3, random_hermitian, tensor

__all__ = ["main", "run_scenario", "scenario_names"]

OUTPUT_DIR_ENV = "SINGLETPATHS_OUTDIR"

_ANGLE_KEYS = ("phi", "delta_omega", "delta_omega2", "chi")


@dataclass(frozen=True)
class QuantityResult:
    """One reported number with its reference value and verdict."""

    quantity: str
    label: str
    value: complex
    std_err: float | None = None
    closed_form: complex | None = None
    tolerance: float | None = None
    passed: bool | None = None


@dataclass(frozen=True)
class RunReport:
    scenario: str
    parameters: dict
    seed: int
    results: tuple
    passed: bool
    duration_s: float


def _checked(quantity, label, value, closed_form, tolerance, std_err=None) -> QuantityResult:
    value = complex(value)
    closed = complex(closed_form)
    return QuantityResult(
        quantity=quantity,
        label=label,
        value=value,
        std_err=std_err,
        closed_form=closed,
        tolerance=float(tolerance),
        passed=bool(abs(value - closed) <= tolerance),
    )


def _path_label(label) -> str:
    signs = {1: "+", -1: "-"}
    return "(" + ",".join(signs[s] for s in label) + ")"


# ---------------------------------------------------------------------------
# scenarios

def _scenario_bell_test(params: dict) -> list[QuantityResult]:
    shift_b = params["delta_omega"]
    shift_c = params["delta_omega2"]
    report = hidden_circle.bell_test(shift_b, shift_c)

    def quantum(angle_1: float, angle_2: float) -> float:
        v1 = (math.cos(angle_1), math.sin(angle_1), 0.0)
        v2 = (math.cos(angle_2), math.sin(angle_2), 0.0)
        return singlet.correlation_strong(v1, v2)

    def model(shift: float) -> float:
        # cells() needs a shift strictly inside (0, pi); fall back to the
        # limiting closed form at the endpoints
        if 0.0 < shift < math.pi:
            return hidden_circle.correlation(shift)
        return -math.cos(shift)

    e_ref_b = model(shift_b)
    e_ref_c = model(shift_c)
    rows = [
        _checked("correlation", "E(ref,b)", e_ref_b, quantum(0.0, shift_b), 1e-12),
        _checked("correlation", "E(ref,c)", e_ref_c, quantum(0.0, shift_c), 1e-12),
        _checked("correlation", "E(b,c)", report.correlation_bc, quantum(shift_b, shift_c), 1e-12),
        _checked("bell", "lhs", report.lhs, abs(quantum(0.0, shift_b) - quantum(0.0, shift_c)), 1e-12),
        QuantityResult("bell", "classical_rhs", complex(report.bell_rhs)),
        QuantityResult(
            "bell",
            "model_bound",
            complex(report.model_bound),
            tolerance=1e-12,
            passed=report.lhs <= report.model_bound + 1e-12,
        ),
        QuantityResult("bell", "violated", complex(float(report.violated))),
    ]
    return rows


def _named_pair_observables(phi: float) -> dict[str, np.ndarray]:
    return {
        "sigma1_A": singlet.op_a(SIGMA1),
        "sigma2_A": singlet.op_a(SIGMA2),
        "sigma3_A": singlet.op_a(SIGMA3),
        "sigma_phi_B": singlet.op_b(singlet.sigma_axis(phi)),
        "sigma1_B": singlet.op_b(SIGMA1),
        "sigma2_B": singlet.op_b(SIGMA2),
        "sigma3_B": singlet.op_b(SIGMA3),
        "sigma1A_sigma2B": tensor(SIGMA1, SIGMA2),
    }


def _closed_form_value(name: str, sign_a: int, sign_b: int, phi: float) -> complex:
    cot_term = (sign_b + math.cos(phi) * sign_a) / math.sin(phi)
    product_term = (sign_a * sign_b + math.cos(phi)) / math.sin(phi)
    return {
        "sigma1_A": complex(sign_a),
        "sigma_phi_B": complex(sign_b),
        "sigma1_B": complex(-sign_a),
        "sigma2_B": complex(cot_term),
        "sigma2_A": complex(-cot_term),
        "sigma3_B": -1j * product_term,
        "sigma3_A": 1j * product_term,
        "sigma1A_sigma2B": complex(product_term),
    }[name]


def _scenario_weak_values(params: dict) -> list[QuantityResult]:
    choice = singlet.CscoChoice(params["phi"])
    psi = singlet.build_singlet()
    rows = []
    for name, obs in _named_pair_observables(choice.phi).items():
        table = singlet.pseudo_value_table(obs, choice, psi)
        for label in singlet.LABELS:
            rows.append(
                _checked(
                    name,
                    _path_label(label),
                    table[label],
                    _closed_form_value(name, *label, choice.phi),
                    1e-10,
                )
            )
    return rows


def _scenario_hidden_mc(params: dict) -> list[QuantityResult]:
    delta = params["delta_omega"]
    count = params["samples"]
    batch = hidden_circle.sample(count, params["seed"])
    rows = []
    for cell in hidden_circle.cells(delta):
        closed = hidden_circle.cell_probability(cell)
        freq = float(np.mean(np.asarray(hidden_circle.in_cell(batch.omegas, cell))))
        stderr = math.sqrt(max(freq * (1.0 - freq), 1e-300) / count)
        rows.append(
            _checked(
                "cell_probability",
                _path_label((cell.sign_a, cell.sign_b)),
                freq,
                closed,
                5.0 * stderr,
                std_err=stderr,
            )
        )
        expected = (1.0 - cell.sign_a * cell.sign_b * math.cos(delta)) / 4.0
        rows.append(
            _checked(
                "cell_probability_closed",
                _path_label((cell.sign_a, cell.sign_b)),
                closed,
                expected,
                1e-12,
            )
        )
    estimate, stderr = hidden_circle.correlation_mc(batch, delta)
    rows.append(
        _checked("correlation", "mc", estimate, -math.cos(delta), 5.0 * stderr, std_err=stderr)
    )
    rows.append(
        _checked("correlation", "closed", hidden_circle.correlation(delta), -math.cos(delta), 1e-12)
    )
    transformed = np.asarray(hidden_circle.frame_transform(batch.omegas, delta))
    pvalue = hidden_circle.density_chi2_pvalue(transformed)
    rows.append(
        QuantityResult(
            quantity="transform_chi2",
            label="pvalue",
            value=complex(pvalue),
            tolerance=1e-3,
            passed=pvalue > 1e-3,
        )
    )
    return rows


def _scenario_repframe_check(params: dict) -> list[QuantityResult]:
    choice_source = singlet.CscoChoice(params["phi"])
    choice_target = singlet.CscoChoice(params["delta_omega"])
    psi = singlet.build_singlet()
    basis_source = singlet.csco_eigenbasis(choice_source)
    basis_target = singlet.csco_eigenbasis(choice_target)
    matrix = repframe.pseudo_prob_matrix(basis_source, basis_target, psi)

    rows = [
        _checked(
            "bayes",
            "row_sums",
            float(np.max(np.abs(matrix.entries.sum(axis=1) - 1.0))),
            0.0,
            1e-10,
        ),
        _checked(
            "bayes",
            "mixture",
            float(
                np.max(
                    np.abs(
                        matrix.source_probabilities @ matrix.entries
                        - matrix.target_probabilities
                    )
                )
            ),
            0.0,
            1e-10,
        ),
    ]

    rng = np.random.default_rng(params["seed"])
    worst = 0.0
    for _ in range(params["samples"]):
        obs = random_hermitian(4, rng)
        values_source = singlet.pseudo_value_table(obs, choice_source, psi).values
        values_target = singlet.pseudo_value_table(obs, choice_target, psi).values
        worst = max(worst, repframe.verify_transform(matrix, values_source, values_target))
    rows.append(_checked("transform", "max_residual", worst, 0.0, 1e-10))

    generators = [
        singlet.op_a(SIGMA1),
        singlet.op_b(singlet.sigma_axis(choice_target.phi)),
        singlet.op_a(SIGMA1) @ singlet.op_b(singlet.sigma_axis(choice_target.phi)),
    ]
    source_tables = np.array(
        [singlet.pseudo_value_table(g, choice_source, psi).values for g in generators]
    )
    target_tables = np.array(
        [singlet.pseudo_value_table(g, choice_target, psi).values for g in generators]
    )
    for row in range(4):
        rank = repframe.omega_rank(matrix, row, source_tables[:, row], target_tables)
        rows.append(
            _checked("omega_rank", _path_label(singlet.LABELS[row]), float(rank), 3.0, 0.5)
        )
    return rows


def _scenario_collapse(params: dict) -> list[QuantityResult]:
    choice = singlet.CscoChoice(params["phi"])
    outcomes = (1, -1) if params["outcome"] == "both" else (int(params["outcome"]),)
    rows = []
    for outcome in outcomes:
        ensemble = measurement.eight_paths(0.0, choice)
        marginal = measurement.marginalize_device(measurement.bayes_update(ensemble, outcome))
        rows.append(
            _checked(
                "collapse_residual",
                f"outcome{outcome:+d}",
                measurement.verify_collapse(marginal),
                0.0,
                1e-10,
            )
        )
        for slot, sign_b in enumerate(marginal.labels):
            expected = (1.0 - outcome * sign_b * math.cos(choice.phi)) / 2.0
            rows.append(
                _checked(
                    "marginal_probability",
                    f"outcome{outcome:+d},B{sign_b:+d}",
                    marginal.probabilities[slot],
                    expected,
                    1e-12,
                )
            )
    return rows


def _scenario_pointer(params: dict) -> list[QuantityResult]:
    choice = singlet.CscoChoice(params["phi"])
    psi = singlet.build_singlet()
    trials = params["samples"]
    rng = np.random.default_rng(params["seed"])
    obs_strong = singlet.op_a(SIGMA1)
    outcomes = np.array(
        [
            measurement.strong_pointer_measure(psi, obs_strong, params["eta"], rng).outcome
            for _ in range(trials)
        ]
    )
    rows = []
    for value, born in ((1.0, 0.5), (-1.0, 0.5)):
        freq = float(np.mean(outcomes == value))
        stderr = math.sqrt(born * (1.0 - born) / trials)
        rows.append(
            _checked(
                "born_frequency",
                f"outcome{value:+.0f}",
                freq,
                born,
                5.0 * stderr,
                std_err=stderr,
            )
        )

    pointer = measurement.gaussian_pointer(params["delta_q"], params["eta"])
    postselect = singlet.csco_eigenbasis(choice)[0]
    for name in ("sigma1_A", "sigma2_B", "sigma3_B"):
        obs = _named_pair_observables(choice.phi)[name]
        shift = measurement.weak_pointer_shift(psi, obs, postselect, pointer)
        rows.append(
            _checked(
                "pointer_position_per_eta",
                name,
                shift.position / pointer.strength,
                shift.weak_value.real,
                10.0 * pointer.strength / pointer.width,
            )
        )
        rows.append(
            QuantityResult(
                quantity="pointer_momentum",
                label=name,
                value=complex(shift.momentum),
            )
        )
    return rows


def _scenario_toy_model(params: dict) -> list[QuantityResult]:
    grid = repframe.random_toy_grid(params["grid_n"], params["seed"])
    ptilde = repframe.toy_solve(grid)
    rows = [
        _checked("toy_constraints", "max_residual", repframe.toy_residual(grid, ptilde), 0.0, 1e-9),
        QuantityResult("toy_entries", "min", complex(float(ptilde.min()))),
        QuantityResult("toy_entries", "max", complex(float(ptilde.max()))),
        QuantityResult(
            "toy_entries",
            "outside_unit_interval",
            complex(float(bool(ptilde.min() < 0.0 or ptilde.max() > 1.0))),
        ),
    ]
    return rows


SCENARIOS = {
    "bell-test": (
        _scenario_bell_test,
        "Bell-type comparison for a direction triple (reference, b, c)",
        {"delta_omega": 3.0 * math.pi / 4.0, "delta_omega2": math.pi / 4.0},
    ),
    "weak-values": (
        _scenario_weak_values,
        "Path-value tables of the named polarization observables vs closed forms",
        {"phi": math.pi / 2.0},
    ),
    "hidden-mc": (
        _scenario_hidden_mc,
        "Monte Carlo checks of the circle model: cells, correlation, density fit",
        {"delta_omega": math.pi / 2.0, "samples": 100_000, "seed": 7},
    ),
    "repframe-check": (
        _scenario_repframe_check,
        "Pseudo-probability transform between two commuting pairs",
        {"phi": math.pi / 2.0, "delta_omega": math.pi / 3.0, "samples": 20, "seed": 11},
    ),
    "collapse": (
        _scenario_collapse,
        "Bayes update and device marginalization vs the collapsed photon-B state",
        {"phi": math.pi / 3.0, "outcome": "both"},
    ),
    "pointer": (
        _scenario_pointer,
        "Projective Born sampling and weak Gaussian-pointer shifts",
        {
            "phi": math.pi / 3.0,
            "eta": 1e-3,
            "delta_q": 1.0,
            "samples": 20_000,
            "seed": 5,
        },
    ),
    "toy-model": (
        _scenario_toy_model,
        "Finely resolved grid model solved for its conditional weights",
        {"grid_n": 3, "seed": 2},
    ),
}


def scenario_names() -> tuple[str, ...]:
    return tuple(sorted(SCENARIOS))


# ---------------------------------------------------------------------------
# plumbing

def _resolve_parameters(scenario: str, config: dict, flags: dict, degrees: bool) -> dict:
    _, _, defaults = SCENARIOS[scenario]
    params = dict(defaults)
    unknown = set(config) - set(defaults) - {"scenario", "out", "format"}
    if unknown:
        raise ValueError(f"unknown config keys for {scenario}: {sorted(unknown)}")
    params.update({k: v for k, v in config.items() if k in defaults})
    params.update({k: v for k, v in flags.items() if k in defaults and v is not None})
    if degrees:
        for key in _ANGLE_KEYS:
            if key in params:
                params[key] = math.radians(params[key])
    for key in ("samples", "seed", "grid_n"):
        if key in params:
            params[key] = int(params[key])
    return params


def run_scenario(scenario: str, params: dict) -> RunReport:
    """Execute one scenario with fully resolved parameters."""
    runner, _, _ = SCENARIOS[scenario]
    start = time.perf_counter()
    results = tuple(runner(params))
    duration = time.perf_counter() - start
    passed = all(r.passed for r in results if r.passed is not None)
    return RunReport(
        scenario=scenario,
        parameters=dict(params),
        seed=int(params.get("seed", 0)),
        results=results,
        passed=passed,
        duration_s=duration,
    )


def report_to_dict(report: RunReport) -> dict:
    return {
        "scenario": report.scenario,
        "parameters": {
            k: (v if isinstance(v, (int, str, bool)) else float(v))
            for k, v in sorted(report.parameters.items())
        },
        "seed": report.seed,
        "results": [
            {
                "quantity": r.quantity,
                "label": r.label,
                "re": r.value.real,
                "im": r.value.imag,
                "std_err": r.std_err,
                "closed_form_re": None if r.closed_form is None else r.closed_form.real,
                "closed_form_im": None if r.closed_form is None else r.closed_form.imag,
                "tolerance": r.tolerance,
                "pass": r.passed,
            }
            for r in report.results
        ],
        "passed": report.passed,
        "duration_s": report.duration_s,
    }


def _write_report(report: RunReport, out_path: Path, fmt: str) -> None:
    out_path.parent.mkdir(parents=True, exist_ok=True)
    if fmt == "json":
        out_path.write_text(json.dumps(report_to_dict(report), indent=2, sort_keys=True) + "\n")
        return
    import csv as _csv

    with out_path.open("w", newline="") as handle:
        writer = _csv.writer(handle)
        writer.writerow(
            [
                "scenario",
                "quantity",
                "label",
                "re",
                "im",
                "std_err",
                "closed_form_re",
                "closed_form_im",
                "pass",
            ]
        )
        for r in report.results:
            writer.writerow(
                [
                    report.scenario,
                    r.quantity,
                    r.label,
                    repr(r.value.real),
                    repr(r.value.imag),
                    "" if r.std_err is None else repr(r.std_err),
                    "" if r.closed_form is None else repr(r.closed_form.real),
                    "" if r.closed_form is None else repr(r.closed_form.imag),
                    "" if r.passed is None else str(r.passed).lower(),
                ]
            )


def _format_line(r: QuantityResult) -> str:
    value = f"{r.value.real:+.9g}" + (f"{r.value.imag:+.9g}i" if r.value.imag else "")
    parts = [f"{r.quantity} {r.label}: {value}"]
    if r.std_err is not None:
        parts.append(f"se {r.std_err:.3g}")
    if r.closed_form is not None:
        closed = f"{r.closed_form.real:+.9g}" + (
            f"{r.closed_form.imag:+.9g}i" if r.closed_form.imag else ""
        )
        parts.append(f"expected {closed}")
    if r.passed is not None:
        parts.append(f"tol {r.tolerance:.3g} -> {'PASS' if r.passed else 'FAIL'}")
    return " | ".join(parts)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="singletpaths",
        description="Run verification scenarios for the singlet path-ensemble library.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_parser = sub.add_parser("run", help="run one scenario and report per-quantity checks")
    run_parser.add_argument("--scenario", required=True, choices=scenario_names())
    run_parser.add_argument("--config", type=Path, help="flat JSON file with parameter overrides")
    run_parser.add_argument("--phi", type=float)
    run_parser.add_argument("--delta-omega", dest="delta_omega", type=float)
    run_parser.add_argument("--delta-omega2", dest="delta_omega2", type=float)
    run_parser.add_argument("--chi", type=float)
    run_parser.add_argument("--samples", type=int)
    run_parser.add_argument("--seed", type=int)
    run_parser.add_argument("--eta", type=float)
    run_parser.add_argument("--delta-q", dest="delta_q", type=float)
    run_parser.add_argument("--grid-n", dest="grid_n", type=int)
    run_parser.add_argument("--outcome", choices=("both", "1", "-1"))
    run_parser.add_argument("--out", type=Path, help="write the report to this file")
    run_parser.add_argument("--format", choices=("csv", "json"), default="json")
    run_parser.add_argument(
        "--degrees", action="store_true", help="interpret angle parameters as degrees"
    )

    list_parser = sub.add_parser("list-scenarios", help="enumerate scenarios and parameters")
    list_parser.add_argument("--json", action="store_true")

    args = parser.parse_args(argv)

    if args.command == "list-scenarios":
        if args.json:
            schema = {
                name: {"description": desc, "parameters": defaults}
                for name, (_, desc, defaults) in sorted(SCENARIOS.items())
            }
            print(json.dumps(schema, indent=2, sort_keys=True))
        else:
            for name, (_, desc, defaults) in sorted(SCENARIOS.items()):
                print(f"{name}: {desc}")
                for key, value in defaults.items():
                    print(f"    {key} = {value}")
        return 0

    config: dict = {}
    if args.config is not None:
        try:
            config = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            print(f"error: cannot read config {args.config}: {exc}", file=sys.stderr)
            return 2
        if not isinstance(config, dict):
            print("error: config file must hold a flat JSON object", file=sys.stderr)
            return 2
        if config.get("scenario", args.scenario) != args.scenario:
            print("error: config scenario does not match --scenario", file=sys.stderr)
            return 2

    flags = {
        key: getattr(args, key)
        for key in (
            "phi",
            "delta_omega",
            "delta_omega2",
            "chi",
            "samples",
            "seed",
            "eta",
            "delta_q",
            "grid_n",
            "outcome",
        )
    }
    try:
        params = _resolve_parameters(args.scenario, config, flags, args.degrees)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    try:
        report = run_scenario(args.scenario, params)
    except SingletPathsError as exc:
        print(f"error in scenario {args.scenario}: {exc}", file=sys.stderr)
        return 2

    for result in report.results:
        print(_format_line(result))
    status = "PASS" if report.passed else "FAIL"
    print(f"{report.scenario}: {status} ({len(report.results)} quantities, {report.duration_s:.3f} s)")

    if args.out is not None:
        out_path = Path(args.out)
        if not out_path.is_absolute():
            out_path = Path(os.environ.get(OUTPUT_DIR_ENV, ".")) / out_path
        fmt = args.format
        if args.out.suffix in (".csv", ".json"):
            fmt = args.out.suffix.lstrip(".")
        _write_report(report, out_path, fmt)
        print(f"report written to {out_path}")

    return 0 if report.passed else 1


if __name__ == "__main__":
    raise SystemExit(main())
