"""The `twosex` command line: eigen, simulate and experiment."""

from __future__ import annotations
from inspect import Parameter, signature
from pathlib import Path
import json
from ..eigen.core import classify, solve_eigen
from ..experiments.core import EXPERIMENTS
from ..experiments.report import Thresholds, to_plain
from ..log import logger
from ..model.core import population_vector
from ..operator.exceptions import InfiniteOperator
from ..simulation.core import batch_extinction, simulate
from .config import build_model, load_config, resolve_seed, simulation_options, solver_options
from .core import CLI, EXIT_ASSERTION, EXIT_INFINITE, EXIT_OK
from .decorators import run_options
from .exceptions import ConfigError

cli = CLI("twosex")

# filled in by the command, never by the experiment block
INJECTED = {"model", "seed", "thresholds", "threads", "eigen"}


def _prepare(config: str, seed: int | None, out: str | None) -> tuple[dict, int, Path]:
    run = load_config(config)
    run["seed"] = resolve_seed(run, seed)
    out_dir = Path(out or run["output"])
    run["output"] = str(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    return run, run["seed"], out_dir


def _write_json(path: Path, document: dict):
    path.write_text(json.dumps(to_plain(document), sort_keys=True, indent=2) + "\n")
    logger.debug("Wrote", path=str(path))


@cli.command(name="eigen")
@run_options
def cmd_eigen(config: str, seed: int | None = None, out: str | None = None, threads: int | None = None, format: str = "csv"):
    """Solve for the eigenpair (lambda*, z*) of M and classify the model."""
    run, seed, out_dir = _prepare(config, seed, out)
    model = build_model(run, seed)
    document = {"config": run, "fingerprint": model.fingerprint, "model": model.spec.describe()}

    try:
        result = solve_eigen(model, seed=seed, threads=threads, **solver_options(run))
    except InfiniteOperator as e:
        regime = classify(e)
        document.update(classification=regime, infinite={"point": e.point, "components": list(e.components)})
        _write_json(out_dir / "eigen.json", document)
        cli.echo({"class": regime, "point": e.point, "components": list(e.components)})
        logger.warning(str(e))
        return EXIT_INFINITE

    regime = classify(result, run["solver"]["critical_band"])
    document.update(result=result.describe(), classification=regime)
    _write_json(out_dir / "eigen.json", document)
    if format == "csv":
        lines = ["component,z_star"] + [f"{i},{value!r}" for i, value in enumerate(result.z_star.tolist())]
        (out_dir / "eigen.csv").write_text("\n".join(lines) + "\n")
    cli.echo(
        {
            "lambda_star": result.lambda_star,
            "z_star": result.z_star,
            "residual": result.residual,
            "iterations": result.iterations,
            "n0": result.n0,
            "class": regime,
        }
    )
    logger.success("Eigenpair solved", lambda_star=result.lambda_star, classification=str(regime))
    return EXIT_OK


@cli.command(name="simulate")
@run_options
def cmd_simulate(config: str, seed: int | None = None, out: str | None = None, threads: int | None = None, format: str = "csv"):
    """Simulate trajectories and estimate the extinction probability by the horizon."""
    run, seed, out_dir = _prepare(config, seed, out)
    model = build_model(run, seed)
    block = run["simulation"]
    if block.get("z0") is None:
        raise ConfigError("simulate needs simulation.z0")
    start = population_vector(block["z0"], model.p)
    options = simulation_options(run)

    trajectories = [
        simulate(model, start, block["horizon"], seed, trial=k, escape_cap=block["escape_cap"], **options)
        for k in range(block["trajectories"])
    ]
    summary = batch_extinction(
        model, start, block["horizon"], block["trials"], seed, threads, escape_cap=block["escape_cap"], **options
    )

    document = {"config": run, "fingerprint": model.fingerprint, "summary": summary.to_dict()}
    if format == "csv":
        for trajectory in trajectories:
            trajectory.to_csv(out_dir / f"trajectory_{trajectory.trial:04d}.csv")
    else:
        document["trajectories"] = [_frame_records(trajectory.to_frame()) for trajectory in trajectories]
    _write_json(out_dir / "simulation.json", document)

    cli.echo({key: value for key, value in summary.to_dict().items() if key != "survivor_quantiles"})
    logger.success("Simulation finished", q_hat=summary.q_hat, trials=summary.trials)
    return EXIT_OK


def _frame_records(frame) -> dict:
    """Column lists with missing entries as null."""
    return frame.astype(object).where(frame.notna(), None).to_dict(orient="list")


def _experiment_arguments(name: str, params: dict, run: dict) -> dict:
    """Experiment keyword arguments: the experiment block, then simulation defaults."""
    parameters = {
        key: parameter
        for key, parameter in signature(EXPERIMENTS[name]).parameters.items()
        if parameter.kind is not Parameter.VAR_KEYWORD and key not in INJECTED
    }
    unknown = sorted(set(params) - set(parameters))
    if unknown:
        raise ConfigError(f"Unexpected keys in experiment.params for {name}: {', '.join(unknown)}")

    block = run["simulation"]
    arguments = dict(params)
    for key in ("z0", "horizon", "trials", "escape_cap"):
        if key in parameters and key not in arguments and block.get(key) is not None:
            arguments[key] = block[key]
    if "solver" in parameters and "solver" not in arguments:
        arguments["solver"] = run["solver"]
    missing = sorted(
        key for key, parameter in parameters.items() if parameter.default is Parameter.empty and key not in arguments
    )
    if missing:
        raise ConfigError(f"experiment {name} needs {', '.join(missing)}")
    return arguments


@cli.command(name="experiment")
@run_options
def cmd_experiment(config: str, seed: int | None = None, out: str | None = None, threads: int | None = None, format: str = "csv"):
    """Run one named experiment and write its report; exit 3 if an assertion fails."""
    run, seed, out_dir = _prepare(config, seed, out)
    if not run.get("experiment"):
        raise ConfigError("experiment needs an experiment block")
    name = run["experiment"]["name"]
    arguments = _experiment_arguments(name, run["experiment"]["params"], run)
    arguments.update(seed=seed, threads=threads, thresholds=Thresholds.from_dict(run["thresholds"]), **simulation_options(run))

    if name != "extinction_sweep":
        model = build_model(run, seed)
        arguments["model"] = model
        if "eigen" in signature(EXPERIMENTS[name]).parameters:
            arguments["eigen"] = solve_eigen(model, seed=seed, threads=threads, **solver_options(run))

    report = EXPERIMENTS[name](**arguments)
    report.write_json(out_dir / f"{name}.json", extra=to_plain({"config": run}))
    if format == "csv":
        report.write_csv(out_dir / f"{name}.csv")

    for note in report.notes:
        logger.info(note)
    summary = report.summary()
    cli.echo({key: summary[key] for key in ("experiment", "fingerprint", "passed", "cells", "failures")})
    if not report.passed:
        logger.error("Statistical assertion failed", experiment=name, failures=len(report.failures))
        return EXIT_ASSERTION
    logger.success("Experiment passed", experiment=name, cells=len(report.cells))
    return EXIT_OK


def main() -> int:
    return cli.run()
