"""Monte-Carlo harness for contamination studies.

Tables are drawn cell by cell from the binomial model; one designated cell
may instead be generated under shifted parameters, mimicking an outlying
cell that the fitted model does not describe.  Studies report, per tuning
parameter, either the root mean squared estimation error against the clean
truth or the rejection proportion of the two-sided Z-type test.

Reproducibility contract: every replication draws from its own
Philox4x64-10 counter-based stream keyed by ``(seed, replication_index)``,
and aggregation runs in replication order, so a report depends only on the
specification and seed, never on the worker count.
"""

from __future__ import annotations

import csv
import dataclasses
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtri

from .errors import DegenerateVariance, NoInteriorData, SingularInformation
from .estimator import SolverConfig, fit
from .inference import LinearHypothesis, z_statistic
from .model import FailureTable, ModelParams, TestPlan, cell_probs

_MODES = ("none", "alpha0_shift", "alpha1_shift")


@dataclass(frozen=True)
class ContaminationScheme:
    """Which cell deviates from the model, and how.

    ``alpha0_shift`` replaces the baseline rate in the chosen cell by
    ``value`` (with 0 < value <= alpha0); ``alpha1_shift`` replaces the
    stress coefficient (value <= alpha1).  Both reductions stretch the
    outlying cell's lifetimes.
    """

    mode: str = "none"
    cell: tuple[int, int] = (0, 0)
    value: float | None = None

    def __post_init__(self):
        if self.mode not in _MODES:
            raise ValueError(f"mode must be one of {_MODES}, got {self.mode!r}")
        if self.mode != "none" and self.value is None:
            raise ValueError(f"mode {self.mode!r} requires a value")
        object.__setattr__(self, "cell", (int(self.cell[0]), int(self.cell[1])))

    def contaminated_params(self, true_params: ModelParams) -> ModelParams:
        if self.mode == "alpha0_shift":
            if not 0.0 < self.value <= true_params.alpha0:
                raise ValueError(
                    "alpha0_shift requires 0 < value <= alpha0, got "
                    f"{self.value} vs alpha0={true_params.alpha0}"
                )
            return ModelParams(self.value, true_params.alpha1)
        if self.mode == "alpha1_shift":
            if not self.value <= true_params.alpha1:
                raise ValueError(
                    "alpha1_shift requires value <= alpha1, got "
                    f"{self.value} vs alpha1={true_params.alpha1}"
                )
            return ModelParams(true_params.alpha0, self.value)
        return true_params


@dataclass(frozen=True)
class SimulationSpec:
    """Complete description of one Monte-Carlo scenario."""

    plan: TestPlan
    true_params: ModelParams
    contamination: ContaminationScheme
    betas: tuple[float, ...]
    replications: int
    seed: int
    hypothesis: LinearHypothesis | None = None
    level: float = 0.05

    def __post_init__(self):
        betas = tuple(float(b) for b in self.betas)
        if not betas:
            raise ValueError("betas must be non-empty")
        if any(b < 0 for b in betas):
            raise ValueError("betas must be >= 0")
        object.__setattr__(self, "betas", betas)
        if self.replications < 1:
            raise ValueError("replications must be >= 1")
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError("seed must fit in 64 bits")
        i, j = self.contamination.cell
        if not (0 <= i < self.plan.shape[0] and 0 <= j < self.plan.shape[1]):
            raise ValueError("contaminated cell index outside the plan")
        # validate the shift against the true parameters right away
        self.contamination.contaminated_params(self.true_params)
        if not 0.0 < self.level < 1.0:
            raise ValueError("level must be in (0, 1)")

    def to_dict(self) -> dict:
        return {
            "plan": {
                "temps": list(map(float, self.plan.temps)),
                "times": list(map(float, self.plan.times)),
                "devices": self.plan.devices.tolist(),
            },
            "true_params": [self.true_params.alpha0, self.true_params.alpha1],
            "contamination": {
                "mode": self.contamination.mode,
                "cell": list(self.contamination.cell),
                "value": self.contamination.value,
            },
            "betas": list(self.betas),
            "replications": self.replications,
            "seed": int(self.seed),
            "hypothesis": None
            if self.hypothesis is None
            else {
                "m": list(map(float, self.hypothesis.m)),
                "d": self.hypothesis.d,
                "level": self.level,
            },
        }


@dataclass(frozen=True)
class SimulationReport:
    """Aggregated study output; see ``to_rows`` for the flat CSV layout."""

    kind: str
    spec: SimulationSpec
    betas: tuple[float, ...]
    used: tuple[int, ...]
    failed_fits: tuple[int, ...]
    rmse_alpha0: tuple[float, ...] | None = None
    rmse_alpha1: tuple[float, ...] | None = None
    rmse_combined: tuple[float, ...] | None = None
    rejection_rate: tuple[float, ...] | None = None

    @property
    def seed(self) -> int:
        return self.spec.seed

    def to_dict(self) -> dict:
        out = {
            "kind": self.kind,
            "spec": self.spec.to_dict(),
            "betas": list(self.betas),
            "used": list(self.used),
            "failed_fits": list(self.failed_fits),
        }
        for name in ("rmse_alpha0", "rmse_alpha1", "rmse_combined",
                     "rejection_rate"):
            val = getattr(self, name)
            if val is not None:
                out[name] = list(val)
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def to_rows(self, x_value=None) -> list[dict]:
        """One flat dict per tuning parameter, ready for CSV writing."""
        rows = []
        for idx, beta in enumerate(self.betas):
            row = {
                "beta": beta,
                "x": x_value,
                "rmse_alpha0": None,
                "rmse_alpha1": None,
                "rmse_combined": None,
                "rejection_rate": None,
                "used": self.used[idx],
                "failed_fits": self.failed_fits[idx],
            }
            for name in ("rmse_alpha0", "rmse_alpha1", "rmse_combined",
                         "rejection_rate"):
                val = getattr(self, name)
                if val is not None:
                    row[name] = val[idx]
            rows.append(row)
        return rows


REPORT_CSV_COLUMNS = (
    "beta", "x", "rmse_alpha0", "rmse_alpha1", "rmse_combined",
    "rejection_rate", "used", "failed_fits",
)


def _csv_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_report_csv(path, reports, x_values=None) -> None:
    """Write plot-ready rows, one per (tuning parameter, x value)."""
    reports = list(reports)
    if x_values is None:
        x_values = [None] * len(reports)
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.DictWriter(handle, fieldnames=REPORT_CSV_COLUMNS)
        writer.writeheader()
        for report, x in zip(reports, x_values):
            for row in report.to_rows(x_value=x):
                writer.writerow({k: _csv_cell(row[k]) for k in REPORT_CSV_COLUMNS})


def _replication_rng(seed: int, index: int) -> np.random.Generator:
    key = np.array([seed, index], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def generate_table(spec: SimulationSpec, replication_index: int
                   ) -> FailureTable:
    """Draw one table; deterministic given (seed, replication_index)."""
    rng = _replication_rng(spec.seed, replication_index)
    F, _, _ = cell_probs(spec.true_params, spec.plan)
    if spec.contamination.mode != "none":
        shifted = spec.contamination.contaminated_params(spec.true_params)
        Fc, _, _ = cell_probs(shifted, spec.plan)
        F = F.copy()
        i, j = spec.contamination.cell
        F[i, j] = Fc[i, j]
    counts = rng.binomial(spec.plan.devices, F)
    return FailureTable(plan=spec.plan, counts=counts)


def _fit_replication(spec: SimulationSpec, index: int):
    """Per-beta estimates (and Z statistics) for one replication.

    Returns a list aligned with spec.betas; entries are None for failed
    fits (no interior data, non-convergence, or degenerate inference).
    """
    table = generate_table(spec, index)
    out = []
    if not table.has_interior_cell():
        return [None] * len(spec.betas)
    warm = None
    for beta in spec.betas:
        if warm is None:
            config = SolverConfig()
        else:
            config = SolverConfig(grid_init=False, init=warm)
        try:
            result = fit(table, beta, config)
        except NoInteriorData:
            out.append(None)
            continue
        if not result.converged:
            out.append(None)
            continue
        warm = result.params
        entry = {"alpha0": result.params.alpha0, "alpha1": result.params.alpha1}
        if spec.hypothesis is not None:
            try:
                z = z_statistic(result, spec.plan, spec.hypothesis)
            except (SingularInformation, DegenerateVariance):
                out.append(None)
                continue
            entry["statistic"] = z.statistic
        out.append(entry)
    return out


def _run_replications(spec: SimulationSpec, workers: int):
    indices = range(spec.replications)
    if workers <= 1:
        return [_fit_replication(spec, i) for i in indices]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda i: _fit_replication(spec, i), indices))


def rmse_study(spec: SimulationSpec, workers: int = 1) -> SimulationReport:
    """Root mean squared error of the estimates against the clean truth.

    Contamination is treated as misspecification: errors are always
    measured against ``spec.true_params``.  Replications whose fit fails
    are dropped from the averages and counted in ``failed_fits``.
    """
    if spec.hypothesis is not None:
        raise ValueError("rmse_study expects a spec without a hypothesis")
    results = _run_replications(spec, workers)
    truth = spec.true_params.as_array()
    rmse0, rmse1, rmse_c, used, failed = [], [], [], [], []
    for b_idx in range(len(spec.betas)):
        sq = np.array(
            [
                (np.array([rep[b_idx]["alpha0"], rep[b_idx]["alpha1"]]) - truth)
                ** 2
                for rep in results
                if rep[b_idx] is not None
            ]
        )
        n_used = sq.shape[0]
        used.append(n_used)
        failed.append(spec.replications - n_used)
        if n_used == 0:
            rmse0.append(float("nan"))
            rmse1.append(float("nan"))
            rmse_c.append(float("nan"))
        else:
            rmse0.append(float(np.sqrt(np.mean(sq[:, 0]))))
            rmse1.append(float(np.sqrt(np.mean(sq[:, 1]))))
            rmse_c.append(float(np.sqrt(np.mean(sq.sum(axis=1)))))
    return SimulationReport(
        kind="rmse",
        spec=spec,
        betas=spec.betas,
        used=tuple(used),
        failed_fits=tuple(failed),
        rmse_alpha0=tuple(rmse0),
        rmse_alpha1=tuple(rmse1),
        rmse_combined=tuple(rmse_c),
    )


def level_power_study(spec: SimulationSpec, workers: int = 1
                      ) -> SimulationReport:
    """Proportion of replications with |Z| above the two-sided critical value.

    With true parameters satisfying the null this estimates the empirical
    significance level; under an alternative it estimates power.
    """
    if spec.hypothesis is None:
        raise ValueError("level_power_study requires a hypothesis in the spec")
    z_crit = -ndtri(spec.level / 2.0)
    results = _run_replications(spec, workers)
    rates, used, failed = [], [], []
    for b_idx in range(len(spec.betas)):
        stats = np.array(
            [
                rep[b_idx]["statistic"]
                for rep in results
                if rep[b_idx] is not None
            ]
        )
        n_used = stats.size
        used.append(n_used)
        failed.append(spec.replications - n_used)
        rates.append(
            float(np.mean(np.abs(stats) > z_crit)) if n_used else float("nan")
        )
    return SimulationReport(
        kind="level_power",
        spec=spec,
        betas=spec.betas,
        used=tuple(used),
        failed_fits=tuple(failed),
        rejection_rate=tuple(rates),
    )


def contamination_sweep(
    spec: SimulationSpec,
    strengths,
    workers: int = 1,
):
    """Run the matching study across contamination strengths.

    ``strengths`` are relative reductions s in [0, 1): strength s maps to a
    contaminated value (1 - s) * alpha0 (or alpha1, per the spec's mode).
    Strength 0 means no contamination.  Returns (reports, strengths).
    """
    base_mode = spec.contamination.mode
    if base_mode == "none":
        raise ValueError("sweep requires an alpha0_shift or alpha1_shift scheme")
    reference = (
        spec.true_params.alpha0
        if base_mode == "alpha0_shift"
        else spec.true_params.alpha1
    )
    reports = []
    strengths = [float(s) for s in strengths]
    for s in strengths:
        if s == 0.0:
            scheme = ContaminationScheme(mode="none")
        else:
            scheme = ContaminationScheme(
                mode=base_mode,
                cell=spec.contamination.cell,
                value=(1.0 - s) * reference,
            )
        variant = dataclasses.replace(spec, contamination=scheme)
        if spec.hypothesis is None:
            reports.append(rmse_study(variant, workers=workers))
        else:
            reports.append(level_power_study(variant, workers=workers))
    return reports, strengths
