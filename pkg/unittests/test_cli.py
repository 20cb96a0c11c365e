# ------------------------------------------------------------------------------
# Tests for the command line interface.
# ------------------------------------------------------------------------------

import contextlib
import io
import json
import os
import tempfile

import helpers
import gridfree
from gridfree import files
from gridfree import interface


def run(*argv):
    with contextlib.redirect_stdout(io.StringIO()) as out, contextlib.redirect_stderr(io.StringIO()) as err:
        status = interface.main(list(argv))
    return status, out.getvalue(), err.getvalue()


def test_analyze_uca():
    with tempfile.TemporaryDirectory() as directory:
        status, out, _ = run('analyze-geometry', '--uca', 'M=40 radius=2', '--out-dir', directory)
        assert status == 0
        record = files.load_json(os.path.join(directory, 'analysis.json'))
        assert os.path.isfile(os.path.join(directory, 'bandwidths.csv'))
    assert record['P_min'] == 59
    assert record['P_recommended'] == 63
    assert len(record['sensors']) == 40
    assert 'P min = 59' in out


def test_analyze_origin_sensor():
    with tempfile.TemporaryDirectory() as directory:
        path = os.path.join(directory, 'array.csv')
        with open(path, 'w') as file:
            file.write('x,y\n0,0\n')
        status, _, _ = run('analyze-geometry', '--geometry', path, '--out-dir', directory)
        record = files.load_json(os.path.join(directory, 'analysis.json'))
    assert status == 0
    assert record['P_min'] == 1


def test_analyze_rpa_is_deterministic():
    records = []
    for _ in range(2):
        with tempfile.TemporaryDirectory() as directory:
            run('analyze-geometry', '--rpa', 'M=30 min_spacing=0.25 max_radius=2 seed=7', '--out-dir', directory)
            records.append(files.load_json(os.path.join(directory, 'analysis.json')))
    assert records[0] == records[1]


def test_analyze_heatmap_and_svg():
    with tempfile.TemporaryDirectory() as directory:
        status, _, _ = run('analyze-geometry', '--uca', 'M=8 radius=1', '--out-dir', directory, '--svg')
        assert status == 0
        assert os.path.isfile(os.path.join(directory, 'spectrum.csv'))
        with open(os.path.join(directory, 'spectrum.svg')) as file:
            assert file.read().startswith('<svg')


def test_estimate_writes_result_and_figures():
    with tempfile.TemporaryDirectory() as directory:
        scenario = os.path.join(directory, 'sc.yaml')
        with open(scenario, 'w') as file:
            file.write('geometry: {uca: {M: 16, radius: 1}}\nsources: [{doa_deg: 35}]\n'
                       'estimator: {delta: 1.0e-6}\n')
        status, out, _ = run('estimate', scenario, '--out-dir', directory, '--svg')
        assert status == 0
        record = files.load_json(os.path.join(directory, 'result.json'))
        for name in ('roots.csv', 'profile.csv', 'cbf.csv', 'roots.svg', 'cbf.svg', 'profile.svg'):
            assert os.path.isfile(os.path.join(directory, name)), name
    assert json.loads(out) == record
    assert record['schema'] == 'gridfree.result/1'
    assert helpers.worst_miss(record['doas_deg'], [35.0]) < 0.05
    assert record['truth_deg'] == [35.0]
    assert record['config']['delta'] == 1e-6


def test_simulate_then_estimate_snapshot():
    with tempfile.TemporaryDirectory() as directory:
        status, _, _ = run('simulate', '--preset', 'two-close-rpa', '--seed', '1', '--out-dir', directory)
        assert status == 0
        for name in ('snapshot.csv', 'scenario.yaml', 'geometry.csv'):
            assert os.path.isfile(os.path.join(directory, name))
        status, out, _ = run('estimate', '--geometry', os.path.join(directory, 'geometry.csv'),
                             '--snapshot', os.path.join(directory, 'snapshot.csv'), '--sigma', '0.1')
    assert status == 0
    assert len(json.loads(out)['doas_deg']) >= 1


def test_exit_codes():
    status, _, err = run('estimate', '--uca', 'M=8 radius=1')
    assert status == 2 and err.startswith('Error:')
    status, _, _ = run('estimate', '/no/such/scenario.yaml')
    assert status == 4
    status, _, _ = run('analyze-geometry', '--uca', 'M=8 radius=1', '--ula', 'M=3')
    assert status == 2
    with tempfile.TemporaryDirectory() as directory:
        snapshot = os.path.join(directory, 'y.csv')
        with open(snapshot, 'w') as file:
            file.write('re,im\n' + '1,0\n' * 8)
        status, _, err = run('estimate', '--uca', 'M=8 radius=1', '--snapshot', snapshot)
    assert status == 3
    assert "'delta'" in err


def test_bad_flag_exits_with_validation_status():
    try:
        run('estimate', '--P', 'many')
    except SystemExit as exit:
        assert exit.code == 2
        return
    assert False, "expected SystemExit"


def test_version():
    assert gridfree.__version__.count('.') == 2


def leading_comments(path):
    with open(path) as file:
        lines = file.read().splitlines()
    return [line for line in lines if line.startswith('#')], lines


def test_estimate_csv_files_embed_resolved_config():
    with tempfile.TemporaryDirectory() as directory:
        scenario = os.path.join(directory, 'sc.yaml')
        with open(scenario, 'w') as file:
            file.write('geometry: {uca: {M: 16, radius: 1}}\nsources: [{doa_deg: -20}]\n'
                       'estimator: {delta: 1.0e-6, n_fill: 90}\n')
        status, _, _ = run('estimate', scenario, '--out-dir', directory, '--svg')
        assert status == 0
        for name in ('cbf.csv', 'roots.csv', 'profile.csv'):
            comments, lines = leading_comments(os.path.join(directory, name))
            assert lines[0].startswith('#'), name
            for key in ('circle_tol', 'support_thresh', 'merge_coherence', 'beta'):
                assert any(line.startswith('# %s: ' % key) for line in comments), (name, key)
            assert '# n_fill: 90' in comments
            assert '# delta: 1e-06' in comments
            assert not any('np.' in line for line in comments)


def test_simulated_files_embed_settings_and_reload():
    with tempfile.TemporaryDirectory() as directory:
        status, _, _ = run('simulate', '--preset', 'two-close-uca', '--seed', '2', '--out-dir', directory)
        assert status == 0
        snapshot = os.path.join(directory, 'snapshot.csv')
        geometry_path = os.path.join(directory, 'geometry.csv')
        for path in (snapshot, geometry_path):
            comments, lines = leading_comments(path)
            assert lines[0].startswith('#')
            assert '# M: 40' in comments
            assert any(line.startswith('# sigma_n: ') for line in comments)
            assert any(line.startswith('# seed: ') for line in comments)
        assert len(files.load_snapshot(snapshot)) == 40
        g = gridfree.geometry.load_geometry(geometry_path)
        assert g.M == 40 and abs(g.max_radius - 2.0) < 1e-9


def test_run_preset_rejects_unknown_name():
    try:
        interface.run_preset('no-such-preset')
    except gridfree.GridfreeError as err:
        assert 'two-close-rpa' in str(err)
        return
    assert False, "expected GridfreeError"
