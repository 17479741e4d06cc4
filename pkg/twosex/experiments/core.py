"""
Monte Carlo checks of the limit theorems for bisexual branching processes.

Every experiment is a pure function of (model, parameters, seed) and
returns an ExperimentReport whose cells carry a sample size, a standard
error and, where something is asserted, a pass/fail flag computed from
`Thresholds`.
"""

from __future__ import annotations
import numpy as np
from ..decorators import CellFailure, record_failures, timed
from ..eigen.core import CRITICAL_BAND, Criticality, EigenResult, classify, solve_eigen
from ..log import logger
from ..model.core import COUNT_DTYPE, ValidatedModel, one_norm, population_vector, real_vector, require_valid
from ..model.examples import FAMILIES, Family
from ..model.exceptions import TwosexError
from ..operator.core import DEFAULT_TOL, eval_M_batch, eval_P_batch, iterate_M, primitivity_index
from ..operator.exceptions import InfiniteOperator, NotPrimitive
from ..simulation.core import ESCAPE_CAP, Trajectory, batch_extinction, run_trials
from .exceptions import NoSurvivors, PreconditionFailed, UnknownExperiment
from .oracles import exact_law
from .report import ExperimentReport, Thresholds, mean_and_stderr

P_TOL = 1e-6


def _full_paths(experiment: str, simulation: dict) -> dict:
    """Simulation options for an experiment that reads whole trajectories."""
    if simulation.get("escape_cap") is not None:
        raise PreconditionFailed(f"The {experiment} experiment needs full trajectories and does not take escape_cap")
    return simulation


def _state_at(run: Trajectory, n: int, p: int) -> np.ndarray:
    """Z_n of a trial; absorbed trials stay at 0."""
    if run.escaped_at is not None:
        raise PreconditionFailed(f"Trial {run.trial} escaped at generation {run.escaped_at}; Z_{n} is unknown")
    return run.z_path[n] if n < len(run.z_path) else np.zeros(p, dtype=COUNT_DTYPE)


def _summary(values) -> dict:
    values = np.asarray(values, dtype=float)
    mean, stderr = mean_and_stderr(values)
    return {
        "n": int(values.size),
        "mean": mean,
        "stderr": stderr,
        "median": float(np.median(values)),
        "q05": float(np.quantile(values, 0.05)),
        "q95": float(np.quantile(values, 0.95)),
    }


def _binomial_stderr(share: float, n: int) -> float:
    return float(np.sqrt(share * (1 - share) / n)) if n else float("nan")


@timed
def lln_experiment(
    model: ValidatedModel,
    z_inf,
    n: int,
    m_grid,
    trials: int,
    seed: int,
    thresholds: Thresholds = Thresholds(),
    threads: int | None = None,
    tol: float = DEFAULT_TOL,
    **simulation,
) -> ExperimentReport:
    """E|Z_n^m/m - M^n(z_inf)|_1 for Z_0 = floor(m z_inf), across m.

    Each cell after the first asserts the error did not grow by more than
    `lln_sigma` combined standard errors.
    """
    direction = real_vector(z_inf, model.p)
    if not np.any(direction):
        raise PreconditionFailed("z_inf must be nonzero")
    simulation = _full_paths("lln", simulation)
    target = iterate_M(model, direction, n, tol)
    report = ExperimentReport(
        "lln", model.fingerprint, {"z_inf": direction, "n": n, "m_grid": list(m_grid), "trials": trials}, seed
    )

    previous = None
    for k, m in enumerate(sorted(m_grid)):
        start = np.floor(m * direction).astype(COUNT_DTYPE)
        runs = run_trials(model, start, n, trials, seed, threads, first_trial=k * trials, **simulation)
        errors = [one_norm(_state_at(run, n, model.p) / m - target) for run in runs]
        error, stderr = mean_and_stderr(errors)
        passed = None
        if previous is not None:
            slack = thresholds.lln_sigma * np.hypot(stderr, previous[1])
            passed = bool(error <= previous[0] + slack)
        report.add(
            m=int(m),
            n=trials,
            generations=n,
            error=error,
            stderr=stderr,
            exact_start=bool(np.all(start == m * direction)),
            passed=passed,
        )
        logger.info("LLN cell", m=m, error=error, stderr=stderr)
        previous = (error, stderr)
    return report


@timed
def profile_experiment(
    model: ValidatedModel,
    z0,
    horizon: int,
    trials: int,
    seed: int,
    eigen: EigenResult,
    thresholds: Thresholds = Thresholds(),
    threads: int | None = None,
    p_tol: float = P_TOL,
    **simulation,
) -> ExperimentReport:
    """Survivor profile Z_N/|Z_N| against z*, growth ratio against lambda*, and C_N = P(Z_N)/lambda*^N.

    Survival is approximated by survival up to `horizon`.
    """
    if horizon < 1:
        raise ValueError("horizon must be at least 1")
    regime = classify(eigen)
    simulation = _full_paths("profile", simulation)
    if regime is Criticality.SUBCRITICAL:
        raise PreconditionFailed(f"The profile experiment needs a non-subcritical model, got {regime}")
    lam, z_star = eigen.lambda_star, eigen.z_star
    report = ExperimentReport(
        "profile",
        model.fingerprint,
        {"z0": population_vector(z0, model.p), "horizon": horizon, "trials": trials, "lambda_star": lam, "z_star": z_star},
        seed,
    )
    if regime is not Criticality.SUPERCRITICAL:
        report.note(f"model is {regime}; survivor statistics are degenerate")

    runs = run_trials(model, z0, horizon, trials, seed, threads, **simulation)
    survivors = [run for run in runs if not run.extinct]
    report.add(statistic="survival", n=trials, value=len(survivors) / trials, stderr=_binomial_stderr(len(survivors) / trials, trials), passed=None)
    if not survivors:
        report.note(str(NoSurvivors(trials, horizon)))
        report.add(statistic="profile_distance", n=0, passed=False)
        return report

    final = np.array([_state_at(run, horizon, model.p) for run in survivors], dtype=float)
    before = np.array([_state_at(run, horizon - 1, model.p) for run in survivors], dtype=float)
    sizes = final.sum(axis=1)

    distance = np.abs(final / sizes[:, None] - z_star).sum(axis=1)
    stats = _summary(distance)
    report.add(
        statistic="profile_distance",
        threshold=thresholds.profile_median_distance,
        passed=bool(stats["median"] < thresholds.profile_median_distance),
        **stats,
    )

    ratio = sizes / before.sum(axis=1)
    stats = _summary(ratio)
    report.add(
        statistic="norm_ratio",
        threshold=thresholds.profile_ratio_tolerance,
        target=lam,
        passed=bool(abs(stats["median"] - lam) <= thresholds.profile_ratio_tolerance),
        **stats,
    )

    p_values, _ = eval_P_batch(model, final, lam, p_tol)
    c_limit = p_values / lam**horizon
    report.add(statistic="c_limit", passed=None, **_summary(c_limit))
    low = float(np.mean(c_limit < thresholds.c_floor))
    report.add(
        statistic="c_below_floor",
        n=len(survivors),
        value=low,
        stderr=_binomial_stderr(low, len(survivors)),
        threshold=thresholds.c_floor,
        passed=None,
    )
    if low > 0.5:
        report.note("survivor mass of C_N collapses toward 0")

    predicted = (c_limit / lam)[:, None] * (z_star @ model.V.values)
    observed = np.array([run.w_path[horizon - 1] for run in survivors], dtype=float) / lam**horizon
    gap = np.abs(observed - predicted).sum(axis=1) / np.maximum(predicted.sum(axis=1), np.finfo(float).tiny)
    report.add(statistic="w_profile_gap", passed=None, **_summary(gap))

    match model.offspring.vlogv_finite():
        case True:
            report.note("E(V log V) is finite for every row, so C is non-degenerate at 0")
        case False:
            report.note("some row has E(V log V) = infinity; C may vanish on survival")
        case None:
            report.note("E(V log V) unknown for callback rows")
    return report


@timed
def corridor_experiment(
    model: ValidatedModel,
    z0,
    horizon: int,
    trials: int,
    eps: float,
    seed: int,
    thresholds: Thresholds = Thresholds(),
    threads: int | None = None,
    tol: float = DEFAULT_TOL,
    **simulation,
) -> ExperimentReport:
    """Share of trials whose transitions stay in [(1-eps)M(Z_n), (1+eps)M(Z_n)] from some N < horizon on."""
    if not 0 < eps < 1:
        raise ValueError("eps must lie in (0, 1)")
    simulation = _full_paths("corridor", simulation)
    parameters = {"z0": population_vector(z0, model.p), "horizon": horizon, "trials": trials, "eps": eps}
    try:
        parameters["n0"] = primitivity_index(model)
    except NotPrimitive:
        parameters["n0"] = None
    report = ExperimentReport("corridor", model.fingerprint, parameters, seed)

    runs = run_trials(model, z0, horizon, trials, seed, threads, **simulation)
    paths = [np.array(run.z_path, dtype=float) for run in runs]
    starts = np.vstack([path[:-1] for path in paths if len(path) > 1] or [np.zeros((0, model.p))])
    images = eval_M_batch(model, starts, tol).values if len(starts) else starts

    onsets, offset = [], 0
    for path in paths:
        steps = len(path) - 1
        expected = images[offset : offset + steps]
        offset += steps
        following = path[1:]
        inside = np.all(((1 - eps) * expected <= following) & (following <= (1 + eps) * expected), axis=1)
        outside = np.flatnonzero(~inside)
        onsets.append(int(outside[-1]) + 1 if outside.size else 0)

    onsets = np.array(onsets)
    share = float(np.mean(onsets < horizon))
    report.add(
        statistic="corridor_fraction",
        n=trials,
        value=share,
        stderr=_binomial_stderr(share, trials),
        threshold=thresholds.corridor_fraction,
        passed=bool(share >= thresholds.corridor_fraction),
    )
    for onset, count in zip(*np.unique(onsets, return_counts=True)):
        report.add(statistic="onset", onset=int(onset), n=trials, count=int(count), value=count / trials, passed=None)
    return report


@timed
def supermartingale_experiment(
    model: ValidatedModel,
    z0,
    horizon: int,
    trials: int,
    eigen: EigenResult,
    seed: int,
    thresholds: Thresholds = Thresholds(),
    binning: str = "generation",
    threads: int | None = None,
    p_tol: float = P_TOL,
    **simulation,
) -> ExperimentReport:
    """Mean increments of C_n = P(Z_n)/lambda*^n, stratified by n (or by n and decade of |Z_n|).

    Each stratum with at least two draws asserts mean <= sigma * stderr +
    supermartingale_atol.
    """
    if binning not in ("generation", "decade"):
        raise ValueError(f"binning must be generation or decade, got {binning!r}")
    simulation = _full_paths("supermartingale", simulation)
    lam = eigen.lambda_star
    report = ExperimentReport(
        "supermartingale",
        model.fingerprint,
        {"z0": population_vector(z0, model.p), "horizon": horizon, "trials": trials, "binning": binning, "lambda_star": lam},
        seed,
    )
    runs = run_trials(model, z0, horizon, trials, seed, threads, **simulation)
    states = np.array([[_state_at(run, n, model.p) for n in range(horizon + 1)] for run in runs], dtype=float)
    flat = states.reshape(-1, model.p)
    unique, inverse = np.unique(flat, axis=0, return_inverse=True)
    p_values, _ = eval_P_batch(model, unique, lam, p_tol)
    c = p_values[inverse.reshape(-1)].reshape(trials, horizon + 1) / lam ** np.arange(horizon + 1)
    increments = np.diff(c, axis=1)

    def judge(values, **where):
        mean, stderr = mean_and_stderr(values)
        passed = bool(mean <= thresholds.sigma * stderr + thresholds.supermartingale_atol) if len(values) > 1 else None
        report.add(n=int(len(values)), mean_increment=mean, stderr=stderr, passed=passed, **where)

    for n in range(horizon):
        if binning == "generation":
            judge(increments[:, n], generation=n)
            continue
        sizes = states[:, n].sum(axis=1)
        alive = sizes > 0
        decades = np.floor(np.log10(sizes[alive])).astype(int)
        for decade in np.unique(decades):
            judge(increments[alive, n][decades == decade], generation=n, decade=int(decade))
    return report


@timed
def domination_experiment(
    model: ValidatedModel,
    z0,
    z0_tilde,
    z1,
    z1_tilde,
    n: int,
    trials: int,
    seed: int,
    thresholds: Thresholds = Thresholds(),
    exact: bool = False,
    limit: int = 100,
    threads: int | None = None,
    **simulation,
) -> ExperimentReport:
    """P(Z_n >= z1 + z1~ | Z_0 = z0 + z0~) against P(Z_n >= z1 | z0) * P(Z_n >= z1~ | z0~).

    Three independent Monte Carlo batches; with `exact=True` the exact
    truncated laws are compared as well, with the truncated mass as slack.
    """
    simulation = _full_paths("domination", simulation)
    a, b = population_vector(z0, model.p), population_vector(z0_tilde, model.p)
    x, y = population_vector(z1, model.p), population_vector(z1_tilde, model.p)
    report = ExperimentReport(
        "domination",
        model.fingerprint,
        {"z0": a, "z0_tilde": b, "z1": x, "z1_tilde": y, "n": n, "trials": trials, "exact": exact},
        seed,
    )

    def reach(start, target, batch: int) -> tuple[float, float]:
        runs = run_trials(model, start, n, trials, seed, threads, first_trial=batch * trials, **simulation)
        share = float(np.mean([np.all(_state_at(run, n, model.p) >= target) for run in runs]))
        return share, _binomial_stderr(share, trials)

    joint, joint_se = reach(a + b, x + y, 0)
    left, left_se = reach(a, x, 1)
    right, right_se = reach(b, y, 2)
    product = left * right
    product_se = float(np.hypot(right * left_se, left * right_se))
    combined = float(np.hypot(joint_se, product_se))
    report.add(statistic="joint", method="monte_carlo", n=trials, value=joint, stderr=joint_se, passed=None)
    report.add(statistic="product", method="monte_carlo", n=trials, value=product, stderr=product_se, passed=None)
    report.add(
        statistic="difference",
        method="monte_carlo",
        n=trials,
        value=joint - product,
        stderr=combined,
        passed=bool(joint >= product - thresholds.sigma * combined),
    )

    if exact:
        joint_law = exact_law(model, a + b, n, limit)
        left_law, right_law = exact_law(model, a, n, limit), exact_law(model, b, n, limit)
        lhs = joint_law.probability_at_least(x + y)
        rhs = left_law.probability_at_least(x) * right_law.probability_at_least(y)
        lost = joint_law.lost + left_law.lost + right_law.lost
        report.add(statistic="joint", method="exact", n=0, value=lhs, stderr=0.0, passed=None)
        report.add(statistic="product", method="exact", n=0, value=rhs, stderr=0.0, passed=None)
        report.add(
            statistic="difference", method="exact", n=0, value=lhs - rhs, stderr=0.0, lost=lost, passed=bool(lhs >= rhs - lost - 1e-12)
        )
    return report


@record_failures(TwosexError)
def _sweep_cell(family: Family, value: float, fixed: dict, z0, horizon, trials, seed, solver, threads, escape_cap, simulation) -> dict:
    model = require_valid(family.model(value, **fixed))
    options = {key: item for key, item in solver.items() if key != "critical_band"}
    try:
        eigen = solve_eigen(model, seed=seed, threads=threads, **options)
        lam, regime = eigen.lambda_star, classify(eigen, solver.get("critical_band", CRITICAL_BAND))
    except InfiniteOperator as e:
        lam, regime = float("inf"), classify(e)
    start = np.full(model.p, z0, dtype=COUNT_DTYPE) if np.isscalar(z0) else population_vector(z0, model.p)
    summary = batch_extinction(model, start, horizon, trials, seed, threads, escape_cap=escape_cap, **simulation)
    return {"lambda_star": lam, "classification": regime, "summary": summary}


@timed
def extinction_sweep(
    family: str | Family,
    parameter_grid,
    z0,
    horizon: int,
    trials: int,
    seed: int,
    thresholds: Thresholds = Thresholds(),
    fixed: dict | None = None,
    solver: dict | None = None,
    threads: int | None = None,
    escape_cap: float | None = ESCAPE_CAP,
    **simulation,
) -> ExperimentReport:
    """lambda* and extinction frequency across a one-parameter family.

    Cells with lambda* <= 1 - margin assert q_hat >= sweep_subcritical_q;
    cells with lambda* >= 1 + margin assert q_hat <= sweep_supercritical_q.
    Cells in between are reported but not asserted; failing cells are
    recorded and the sweep continues.
    """
    if isinstance(family, str):
        if family not in FAMILIES:
            raise UnknownExperiment(f"Unknown model family {family!r}; choose from {', '.join(FAMILIES)}")
        family = FAMILIES[family]
    fixed, solver = dict(fixed or {}), dict(solver or {})
    report = ExperimentReport(
        "extinction_sweep",
        family.name,
        {"family": family.name, "parameter": family.parameter, "grid": list(parameter_grid), "fixed": fixed, "z0": z0, "horizon": horizon, "trials": trials},
        seed,
    )

    for value in parameter_grid:
        outcome = _sweep_cell(family, value, fixed, z0, horizon, trials, seed, solver, threads, escape_cap, simulation)
        if isinstance(outcome, CellFailure):
            report.add(**{family.parameter: value}, error=outcome.error, message=outcome.message, passed=None)
            report.note(f"{family.parameter}={value}: {outcome.error}")
            continue
        lam, summary = outcome["lambda_star"], outcome["summary"]
        passed = None
        if lam <= 1 - thresholds.sweep_subcritical_margin:
            passed = summary.q_hat >= thresholds.sweep_subcritical_q
        elif lam >= 1 + thresholds.sweep_supercritical_margin and np.isfinite(lam):
            passed = summary.q_hat <= thresholds.sweep_supercritical_q
        report.add(
            **{family.parameter: value},
            lambda_star=lam,
            lambda_exact=family.exact_lambda(value, **fixed),
            classification=outcome["classification"],
            q_hat=summary.q_hat,
            ci_low=summary.ci95[0],
            ci_high=summary.ci95[1],
            n=trials,
            stderr=_binomial_stderr(summary.q_hat, trials),
            escaped=summary.escaped,
            passed=None if passed is None else bool(passed),
        )
        logger.info("Sweep cell", parameter=value, lambda_star=lam, q_hat=summary.q_hat)
    return report


EXPERIMENTS = {
    "lln": lln_experiment,
    "profile": profile_experiment,
    "corridor": corridor_experiment,
    "supermartingale": supermartingale_experiment,
    "domination": domination_experiment,
    "extinction_sweep": extinction_sweep,
}
