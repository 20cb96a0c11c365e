# ------------------------------------------------------------------------------
# Tests for the Monte Carlo benchmark runner.
# ------------------------------------------------------------------------------

import csv
import os
import tempfile

import numpy as np

import helpers
from gridfree import benchmark
from gridfree import utils


def small_spec(**changes):
    values = dict(geometry={'uca': {'M': 12, 'radius': 1.0}}, snr_grid=[30.0], delta_multipliers=[1.0],
                  separation_deg=60.0, n_trials=1, seed=3)
    values.update(changes)
    return benchmark.BenchmarkSpec(**values)


def test_spec_validation():
    for changes in ({'n_trials': 0}, {'snr_grid': []}, {'delta_multipliers': []},
                    {'delta_multipliers': [0.0]}, {'noise_kind': 'brown'}):
        try:
            small_spec(**changes)
        except utils.GridfreeError:
            continue
        assert False, "expected GridfreeError for %r" % (changes,)
    try:
        benchmark.BenchmarkSpec.from_dict({'geometry': {}, 'snr_grid': [1], 'bogus': 1})
    except utils.GridfreeError:
        return
    assert False, "expected GridfreeError"


def test_single_trial_is_deterministic():
    first = benchmark.run_benchmark(small_spec())
    second = benchmark.run_benchmark(small_spec())
    assert len(first.rows) == 1
    assert first.rows == second.rows
    assert first.trials == second.trials
    trial = first.trials[0]
    assert trial['seed'] == 3 and trial['status'] == 'ok'
    assert first.rows[0]['rmse_deg'] < 1.0
    assert first.rows[0]['matching'] == 'optimal-assignment'


def test_trials_share_instances_across_cells():
    result = benchmark.run_benchmark(small_spec(snr_grid=[20.0, 30.0], delta_multipliers=[0.5, 2.0], n_trials=2))
    assert len(result.rows) == 4
    assert [(r['snr_db'], r['delta_mult']) for r in result.rows] == [(20.0, 0.5), (20.0, 2.0), (30.0, 0.5), (30.0, 2.0)]
    truths = {(t['trial'], tuple(t['truth_deg'])) for t in result.trials}
    assert len(truths) == 2
    assert all(r['n_trials'] == 2 for r in result.rows)


def test_failures_are_counted():
    spec = small_spec(estimator={'solver': 'NO_SUCH_SOLVER'})
    result = benchmark.run_benchmark(spec)
    assert result.rows[0]['n_failed'] == 1
    assert np.isnan(result.rows[0]['rmse_deg'])
    assert 'conic' in result.trials[0]['error']


def test_snr_trend():
    rows = [{'snr_db': s, 'delta_mult': 1.0, 'rmse_deg': r} for s, r in ((0, 3.0), (10, 1.0), (20, 0.2), (30, 0.1))]
    assert abs(benchmark.snr_trend(rows)['1.0'] + 1.0) < 1e-12
    rows = [{'snr_db': s, 'delta_mult': 2.0, 'rmse_deg': 0.5} for s in (0, 10)]
    assert benchmark.snr_trend(rows)['2.0'] == 0.0
    assert benchmark.snr_trend(rows[:1])['2.0'] is None


def test_outputs_embed_config():
    result = benchmark.run_benchmark(small_spec())
    with tempfile.TemporaryDirectory() as directory:
        csv_path, json_path = benchmark.write_outputs(result, directory)
        with open(csv_path) as file:
            lines = file.read().splitlines()
        assert os.path.isfile(json_path)
    comments = [line for line in lines if line.startswith('#')]
    assert any(line.startswith('# n_trials: 1') for line in comments)
    assert any(line.startswith('# geometry:') for line in comments)
    rows = list(csv.DictReader(line for line in lines if not line.startswith('#')))
    assert list(rows[0]) == list(benchmark.CSV_COLUMNS)
    assert rows[0]['matching'] == 'optimal-assignment'


def test_csv_echoes_resolved_estimator():
    result = benchmark.run_benchmark(small_spec(estimator={'n_fill': 60}))
    estimator = benchmark.effective_config(result)['estimator']
    assert estimator['circle_tol'] == 0.02 and estimator['support_thresh'] == 0.05
    assert estimator['n_fill'] == 60
    assert estimator['merge_coherence'] == 0.5
    low, high = estimator['beta']
    assert 0 < low <= high
    assert estimator['delta'][0] == result.trials[0]['delta']
    with tempfile.TemporaryDirectory() as directory:
        csv_path, _ = benchmark.write_outputs(result, directory)
        with open(csv_path) as file:
            line = next(line for line in file if line.startswith('# estimator: '))
    for text in ("'circle_tol': 0.02", "'n_fill': 60", "'support_thresh': 0.05", "'beta': ["):
        assert text in line, text
