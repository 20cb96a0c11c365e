# ------------------------------------------------------------------------------
# Monte Carlo RMSE benchmark: two sources at a fixed separation with random
# DOAs, swept over an SNR grid and a grid of delta multipliers of the
# expected noise norm e_n = sigma_n sqrt(M).
#
# Trial t uses seed + t for both the DOA draw and the noise, so every cell of
# the grid sees the same instances and results do not depend on scheduling.
# ------------------------------------------------------------------------------

import concurrent.futures
import csv
import dataclasses
import itertools
import logging
import os

import numpy as np
import scipy.stats

from . import files
from . import geometry
from . import pipeline
from . import simulate
from . import utils


logger = logging.getLogger(__name__)


MATCHING = 'optimal-assignment'

CSV_COLUMNS = ('snr_db', 'delta_mult', 'rmse_deg', 'n_trials', 'n_failed', 'separation_deg', 'matching')


@dataclasses.dataclass(frozen=True)
class BenchmarkSpec:
    geometry: object
    snr_grid: tuple
    delta_multipliers: tuple = (1.0,)
    separation_deg: float = 30.0
    n_trials: int = 50
    seed: int = 0
    noise_kind: str = 'white'
    estimator: dict = dataclasses.field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, 'snr_grid', tuple(float(s) for s in self.snr_grid))
        object.__setattr__(self, 'delta_multipliers', tuple(float(d) for d in self.delta_multipliers))
        if self.n_trials < 1:
            raise utils.GridfreeError("Benchmark needs n_trials >= 1, got %r." % self.n_trials)
        if not self.snr_grid or not self.delta_multipliers:
            raise utils.GridfreeError("Benchmark SNR and delta grids must be nonempty.")
        if any(not d > 0 for d in self.delta_multipliers):
            raise utils.GridfreeError("Delta multipliers must be positive.")
        if self.noise_kind not in simulate.NOISE_KINDS:
            raise utils.GridfreeError("Unknown noise kind '%s'." % self.noise_kind)

    @classmethod
    def from_dict(cls, data):
        try:
            return cls(**data)
        except TypeError as err:
            raise utils.GridfreeError("Bad benchmark spec: %s" % err)

    def to_dict(self):
        return dataclasses.asdict(self)


@dataclasses.dataclass
class BenchmarkResult:
    spec: BenchmarkSpec
    rows: list
    trials: list
    trend: dict

    def to_record(self):
        return {
            'schema': 'gridfree.benchmark/1',
            'matching': MATCHING,
            'spec': self.spec.to_dict(),
            'rows': self.rows,
            'trend': self.trend,
            'trials': self.trials,
        }


# One trial. Runs in a worker process so takes and returns plain values.
def run_trial(spec, snr_db, delta_mult, trial):
    seed = spec.seed + trial
    rng = np.random.default_rng(seed)
    truth = simulate.random_pair(rng, spec.separation_deg)
    sc = simulate.Scenario(
        spec.geometry,
        tuple(simulate.Source(doa, phase_deg=phase) for doa, phase in zip(truth, rng.uniform(-180, 180, 2))),
        simulate.NoiseSpec(spec.noise_kind, snr_db=snr_db),
        seed,
    )
    record = {'snr_db': snr_db, 'delta_mult': delta_mult, 'trial': trial, 'seed': seed,
              'truth_deg': list(truth)}
    try:
        g = sc.array()
        y, sigma_n = simulate.synth_snapshot(sc, g)
        cfg = pipeline.EstimatorConfig(**dict(spec.estimator, sigma_n=sigma_n, delta_mult=delta_mult, seed=seed))
        result = pipeline.estimate(y, g, cfg)
    except utils.GridfreeError as err:
        record.update(status='failed', error=str(err), estimate_deg=[], errors_deg=[])
        return record
    errors = pipeline.match_doas(result.doas_deg, truth)
    record.update(status='ok', error=None, estimate_deg=[float(d) for d in result.doas_deg],
                  errors_deg=[float(e) for e in errors], delta=float(result.config['delta']),
                  beta=result.config['beta'])
    return record


def _run_trial(job):
    return run_trial(*job)


def run_benchmark(spec, jobs=1):
    geometry.from_spec(spec.geometry)
    grid = list(itertools.product(spec.snr_grid, spec.delta_multipliers, range(spec.n_trials)))
    logger.info("benchmark: %d SNRs x %d deltas x %d trials = %d solves on %d worker(s)",
                len(spec.snr_grid), len(spec.delta_multipliers), spec.n_trials, len(grid), jobs)

    jobs_list = [(spec, snr, mult, trial) for snr, mult, trial in grid]
    if jobs > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=jobs) as executor:
            trials = list(executor.map(_run_trial, jobs_list, chunksize=max(1, len(jobs_list) // (4 * jobs))))
    else:
        trials = [_run_trial(job) for job in jobs_list]
    trials.sort(key=lambda t: (t['snr_db'], t['delta_mult'], t['trial']))

    rows = []
    for snr, mult in itertools.product(sorted(spec.snr_grid), sorted(spec.delta_multipliers)):
        cell = [t for t in trials if t['snr_db'] == snr and t['delta_mult'] == mult]
        errors = [e for t in cell if t['status'] == 'ok' for e in t['errors_deg']]
        failed = sum(1 for t in cell if t['status'] != 'ok')
        rmse = float(np.sqrt(np.mean(np.square(errors)))) if errors else float('nan')
        if failed:
            logger.warning("benchmark: %d of %d trials failed at SNR %g dB, delta %g e_n",
                           failed, len(cell), snr, mult)
        rows.append({'snr_db': snr, 'delta_mult': mult, 'rmse_deg': rmse, 'n_trials': len(cell),
                     'n_failed': failed, 'separation_deg': spec.separation_deg, 'matching': MATCHING})

    return BenchmarkResult(spec, rows, trials, snr_trend(rows))


# Spearman rank correlation of RMSE against SNR for each delta multiplier.
# A non-positive value means RMSE does not grow with SNR.
def snr_trend(rows):
    trend = {}
    for mult in sorted({row['delta_mult'] for row in rows}):
        series = sorted((row['snr_db'], row['rmse_deg']) for row in rows
                        if row['delta_mult'] == mult and np.isfinite(row['rmse_deg']))
        if len(series) < 2:
            trend[str(mult)] = None
            continue
        snrs, rmses = zip(*series)
        if np.ptp(rmses) == 0:
            trend[str(mult)] = 0.0
            continue
        rho, _ = scipy.stats.spearmanr(snrs, rmses)
        trend[str(mult)] = float(rho)
    return trend


# The spec with the estimator settings resolved to the values every trial
# used. delta and beta vary by trial and are echoed as their ranges.
def effective_config(result):
    config = result.spec.to_dict()
    estimator = pipeline.EstimatorConfig(**result.spec.estimator).to_dict()
    for name in ('delta', 'beta'):
        values = [t[name] for t in result.trials if t.get(name) is not None]
        if result.spec.estimator.get(name) is None:
            estimator[name] = [min(values), max(values)] if values else None
    estimator.update(sigma_n='per trial from snr_db', delta_mult=list(result.spec.delta_multipliers),
                     seed='seed + trial')
    config['estimator'] = estimator
    config['matching'] = MATCHING
    return config


def write_csv(result, path):
    with open(path, 'w', newline='', encoding='utf-8') as file:
        for line in utils.comment_lines(effective_config(result)):
            file.write(line + '\n')
        writer = csv.DictWriter(file, fieldnames=CSV_COLUMNS)
        writer.writeheader()
        for row in result.rows:
            writer.writerow(dict(row, rmse_deg='%.6g' % row['rmse_deg']))


def write_outputs(result, out_dir):
    os.makedirs(out_dir, exist_ok=True)
    csv_path = os.path.join(out_dir, 'benchmark.csv')
    json_path = os.path.join(out_dir, 'benchmark.json')
    write_csv(result, csv_path)
    files.save_json(utils.plain(result.to_record()), json_path)
    return csv_path, json_path
