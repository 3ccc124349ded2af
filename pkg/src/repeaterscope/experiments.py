"""Named experiments behind the command-line front end.

Each experiment writes one CSV in the shared schema plus an echo of the
effective configuration, so every output directory is self-describing.

* ``relay-expectation``: exact expected delivered pairs of a plain relay
  (deterministic swaps, no distillation) versus inter-repeater spacing and
  segment count, next to the crude M * pi0 bound.
* ``mtp-sweep``: two-way protocol metrics versus distance, one curve per
  segment count.
* ``envelope-compare``: per-distance best configurations of the two-way
  protocol (both decision rules), the single-success baseline and the
  parity-code one-way chain.
* ``cost-compare``: the same envelope selections, emitted under their own
  experiment label for the cost-centric figures.
* ``validate``: the engine-versus-oracle acceptance checks.
"""

from __future__ import annotations

from pathlib import Path

from . import acceptance
from .config import Config, effective_text
from .csvio import report_row, write_rows
from .optimizer import envelope
from .pmfengine import link_success_prob, min_over_segments_expectation
from .policy import DecisionRule
from .twoway import evaluate_2gnc, evaluate_mtp

EXPERIMENTS = (
    "relay-expectation",
    "mtp-sweep",
    "envelope-compare",
    "cost-compare",
    "validate",
)


def _write_outputs(out_dir: Path, name: str, rows: list[dict], config: Config) -> Path:
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = out_dir / f"{name}.csv"
    write_rows(csv_path, rows)
    (out_dir / "effective_config.txt").write_text(
        effective_text(config), encoding="utf-8"
    )
    return csv_path


def run_relay_expectation(config: Config, out_dir: Path) -> int:
    rows = []
    for channels in config.relay_channels:
        for spacing in config.relay_spacings_km:
            pi0 = link_success_prob(spacing, config.eta_c, config.l_att_km)
            for n_segments in config.n_segment_options:
                rows.append(
                    {
                        "experiment": "relay-expectation",
                        "architecture": "relay",
                        "distance_km": float(spacing),
                        "n_segments": n_segments,
                        "channels": channels,
                        "eta_c": config.eta_c,
                        "expected_pairs": min_over_segments_expectation(
                            channels, pi0, n_segments
                        ),
                    }
                )
            rows.append(
                {
                    "experiment": "relay-expectation",
                    "architecture": "bound",
                    "distance_km": float(spacing),
                    "channels": channels,
                    "eta_c": config.eta_c,
                    "expected_pairs": channels * pi0,
                }
            )
    _write_outputs(out_dir, "relay-expectation", rows, config)
    return 0


def run_mtp_sweep(config: Config, out_dir: Path) -> int:
    rule = config.decision_rule()
    rows = []
    for n_segments in config.n_segment_options:
        for distance in config.distances_km:
            params = config.chain_params(distance_km=distance, n_segments=n_segments)
            report = evaluate_mtp(params, rule)
            rows.append(report_row(report, "mtp-sweep"))
    _write_outputs(out_dir, "mtp-sweep", rows, config)
    return 0


def _envelope_rows(config: Config, experiment: str) -> list[dict]:
    grid = config.sweep_grid()
    base = config.chain_params()
    rows = []
    variants = (
        ("mtp", DecisionRule.skr(), "max_skr_per_channel_use", "mtp-skr"),
        ("mtp", DecisionRule.fidelity_threshold(config.f_th), "max_skr_per_channel_use", "mtp-fth"),
        ("2gnc", DecisionRule.skr(), "min_qubits_per_unit_key", "2gnc"),
        ("qpc", DecisionRule.skr(), "min_qubits_per_unit_key", "qpc"),
    )
    for arch, rule, objective, label in variants:
        points = envelope(arch, grid, base, objective, rule, workers=config.workers)
        for point in points:
            if point.report is None:
                continue
            if arch == "qpc":
                cfg = point.config
                config_label = (
                    f"QPC(n={cfg['qpc_n']},m={cfg['qpc_m']}) "
                    f"spacing={cfg['spacing_km']}km"
                )
                row = report_row(point.report, experiment, config_label=config_label)
            else:
                row = report_row(point.report, experiment)
            row["architecture"] = label
            rows.append(row)
    return rows


def run_envelope_compare(config: Config, out_dir: Path) -> int:
    _write_outputs(out_dir, "envelope-compare", _envelope_rows(config, "envelope-compare"), config)
    return 0


def run_cost_compare(config: Config, out_dir: Path) -> int:
    _write_outputs(out_dir, "cost-compare", _envelope_rows(config, "cost-compare"), config)
    return 0


def run_validate(config: Config, out_dir: Path) -> int:
    results = acceptance.run_all(seed=config.seed, trials=config.trials)
    out_dir.mkdir(parents=True, exist_ok=True)
    lines = ["criterion,passed,detail"]
    width = max(len(r.name) for r in results)
    for result in results:
        status = "PASS" if result.passed else "FAIL"
        print(f"{result.name:<{width}}  {status}  {result.detail}")
        detail = result.detail.replace('"', "'")
        lines.append(f'{result.name},{status},"{detail}"')
    (out_dir / "validate.csv").write_text("\n".join(lines) + "\n", encoding="utf-8")
    (out_dir / "effective_config.txt").write_text(effective_text(config), encoding="utf-8")
    failed = [r for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} criteria passed")
    return 1 if failed else 0


def run_experiment(name: str, config: Config, out_dir) -> int:
    """Dispatch one named experiment; returns the process exit code."""
    runners = {
        "relay-expectation": run_relay_expectation,
        "mtp-sweep": run_mtp_sweep,
        "envelope-compare": run_envelope_compare,
        "cost-compare": run_cost_compare,
        "validate": run_validate,
    }
    if name not in runners:
        raise ValueError(
            f"unknown experiment {name!r}; choose one of {', '.join(EXPERIMENTS)}"
        )
    return runners[name](config, Path(out_dir))
