# ------------------------------------------------------------------------------
# Functions for registering and running subcommands. Each handler takes the
# parsed argparse namespace, writes its files, prints a summary to stdout and
# returns the record it produced.
# ------------------------------------------------------------------------------

import csv
import logging
import os
import pprint

import numpy as np

from . import benchmark
from . import files
from . import geometry
from . import manifold
from . import pipeline
from . import poly
from . import prune
from . import simulate
from . import svg
from . import utils


logger = logging.getLogger(__name__)


# Recommended P leaves this relative margin above the minimum DFT length.
RECOMMENDED_MARGIN = 1.05

# CBF grid step in degrees for overlays and peak reports.
CBF_STEP_DEG = 0.1


# Map command names to registered handler functions.
commandmap = {}


# Decorator function for registering command handlers.
def register(*names):

    def register_command_handler(func):
        for name in names:
            commandmap[name] = func
        return func

    return register_command_handler


# Run a command.
def process(name, args):
    if name not in commandmap:
        raise utils.GridfreeError("Unrecognized command '%s'." % name)
    return commandmap[name](args)


# ------------------------------------------------------------------------------
# Shared argument handling.
# ------------------------------------------------------------------------------


# Geometry spec named by the --geometry/--uca/--rpa/--ula flags, or None.
def geometry_spec(args):
    parser = utils.ParamParser()
    chosen = [(name, getattr(args, name, None)) for name in ('uca', 'rpa', 'ula')]
    chosen = [(name, value) for name, value in chosen if value is not None]
    if getattr(args, 'geometry', None):
        chosen.append(('file', args.geometry))
    if len(chosen) > 1:
        raise utils.GridfreeError("Give at most one of --geometry, --uca, --rpa, --ula.")
    if not chosen:
        return None
    name, value = chosen[0]
    if name == 'file':
        return value
    pargs, kwargs = parser.parse(value)
    if pargs:
        raise utils.GridfreeError("Geometry parameters must be key=value pairs, got %r." % value)
    return {name: kwargs}


# Estimator settings given on the command line.
def cli_settings(args):
    names = {
        'gamma_db': 'gamma_db', 'P': 'P', 'delta': 'delta', 'delta_mult': 'delta_mult',
        'sigma': 'sigma_n', 'beta': 'beta', 'n_fill': 'n_fill', 'circle_tol': 'circle_tol',
        'seed': 'seed',
    }
    return {field: getattr(args, arg, None) for arg, field in names.items()}


# The scenario for a command: a scenario file, a preset, or bare geometry.
def load_inputs(args):
    overrides, snapshot = {}, None
    if getattr(args, 'scenario', None) and getattr(args, 'preset', None):
        raise utils.GridfreeError("Give a scenario file or --preset, not both.")
    if getattr(args, 'scenario', None):
        sc, overrides, snapshot = files.load_scenario(args.scenario)
    elif getattr(args, 'preset', None):
        sc = simulate.make_preset(args.preset, args.seed or 0)
    else:
        spec = geometry_spec(args)
        if spec is None:
            raise utils.GridfreeError("No scenario: give a scenario file, --preset, or a geometry.")
        sc = simulate.Scenario(spec, ())

    spec = geometry_spec(args)
    if spec is not None and sc.geometry != spec:
        sc = simulate.Scenario(spec, sc.sources, sc.noise, sc.seed)
    if getattr(args, 'snapshot', None):
        snapshot = args.snapshot
    return sc, overrides, snapshot


def out_path(args, name):
    directory = args.out_dir or '.'
    os.makedirs(directory, exist_ok=True)
    return os.path.join(directory, name)


def debug_print(args, heading, value):
    if args.debug:
        print(utils.title(heading))
        print(value if isinstance(value, str) else pprint.pformat(value))


# ------------------------------------------------------------------------------
# Command handlers.
# ------------------------------------------------------------------------------


# Bandwidth report for a geometry: P and N, per-sensor bandwidths and,
# optionally, the coefficient power heat map.
@register('analyze-geometry')
def analyze_geometry(args):
    sc, overrides, _ = load_inputs(args)
    g = sc.array()
    gamma_db = args.gamma_db if args.gamma_db is not None else overrides.get('gamma_db', manifold.DEFAULT_GAMMA_DB)
    P_min = manifold.min_dft_length(g.max_radius, gamma_db)
    P_recommended = utils.next_odd(RECOMMENDED_MARGIN * P_min)
    rows = manifold.sensor_bandwidths(g, gamma_db)

    record = {
        'M': g.M,
        'max_radius': g.max_radius,
        'gamma_db': gamma_db,
        'P_min': P_min,
        'N_min': (P_min - 1) // 2,
        'P_recommended': P_recommended,
        'P_used': args.P or P_min,
        'sensors': [
            {'index': i, 'x': xy[0], 'y': xy[1], 'radius': radius, 'N': N, 'P': P}
            for i, ((radius, N, P), xy) in enumerate(zip(rows, g.xy.tolist()))
        ],
    }
    if g.max_radius >= manifold.FIT_MIN_RADIUS:
        record['P_fit'] = manifold.FIT_SLOPE * g.max_radius + manifold.FIT_INTERCEPT

    print('M = %d, max radius = %.4f wavelengths, gamma = %g dB' % (g.M, g.max_radius, gamma_db))
    print('P min = %d (N = %d), P recommended = %d' % (P_min, (P_min - 1) // 2, P_recommended))

    if args.out_dir or args.svg or args.heatmap:
        settings = {key: record[key] for key in ('M', 'max_radius', 'gamma_db', 'P_min', 'P_recommended', 'P_used')}
        with open(out_path(args, 'bandwidths.csv'), 'w', newline='', encoding='utf-8') as file:
            for line in utils.comment_lines(settings):
                file.write(line + '\n')
            writer = csv.writer(file)
            writer.writerow(['sensor', 'x', 'y', 'radius', 'N', 'P'])
            for sensor in record['sensors']:
                writer.writerow([sensor['index'], '%.9g' % sensor['x'], '%.9g' % sensor['y'],
                                 '%.9g' % sensor['radius'], sensor['N'], sensor['P']])
        files.save_json(utils.plain(record), out_path(args, 'analysis.json'))

    if args.heatmap or args.svg:
        radii = np.arange(0.0, np.ceil(max(g.max_radius, 1.0)) + 1e-9, 0.25)
        k, table = manifold.spectrum_table(radii, (P_recommended - 1) // 2 + 8)
        with open(out_path(args, 'spectrum.csv'), 'w', newline='', encoding='utf-8') as file:
            file.write('# power of the Fourier-series coefficients in dB\n')
            for line in utils.comment_lines(dict(settings, radius_step=0.25, k_max=int(k[-1]))):
                file.write(line + '\n')
            writer = csv.writer(file)
            writer.writerow(['radius'] + ['k=%d' % index for index in k])
            for radius, row in zip(radii, table):
                writer.writerow(['%g' % radius] + ['%.2f' % value for value in row])
        if args.svg:
            svg.spectrum_heatmap(radii, k, table, floor_db=gamma_db).save(out_path(args, 'spectrum.svg'))

    debug_print(args, 'RESULT', record)
    return record


@register('estimate')
def estimate(args):
    sc, overrides, snapshot = load_inputs(args)
    g = sc.array()
    defaults = {}
    if snapshot:
        y = files.load_snapshot(snapshot)
    elif sc.sources:
        y, sigma_n = simulate.synth_snapshot(sc, g)
        defaults['sigma_n'] = sigma_n
    else:
        raise utils.GridfreeError("Nothing to estimate: the scenario has no sources and no snapshot.")

    cfg = files.make_config(defaults, overrides, cli_settings(args))
    debug_print(args, 'CONFIG', cfg.to_dict())
    result = pipeline.estimate(y, g, cfg)

    record = result.to_record()
    if sc.sources:
        record['truth_deg'] = [float(d) for d in sc.doas_deg]
        record['rmse_deg'] = pipeline.doa_rmse(result.doas_deg, sc.doas_deg)
        record['scenario'] = files.scenario_to_dict(sc)
    record['cbf_peaks_deg'] = cbf_report(y, g, result)

    if args.out_dir or args.svg:
        files.save_json(utils.plain(record), out_path(args, 'result.json'))
        poly.write_roots_csv(result.roots, out_path(args, 'roots.csv'), record['config'])
        if result.pruning is not None:
            prune.write_profile_csv(result.pruning, out_path(args, 'profile.csv'), record['config'])
    if args.svg:
        write_estimate_figures(args, y, g, result, sc.doas_deg, record['config'])

    print(files.highlight_json(utils.plain(record), args.pygmentize))
    return record


# Full-circle CBF grid in degrees, ending at 180.
def cbf_grid():
    return np.arange(-180.0, 180.0, CBF_STEP_DEG) + CBF_STEP_DEG


# Local maxima of the CBF spectrum on a fine grid.
def cbf_report(y, g, result):
    grid = cbf_grid()
    spectrum = pipeline.cbf_spectrum(y, g, grid)
    peaks = pipeline.cbf_peaks(spectrum, grid, circular=True, prominence=0.05 * spectrum.max())
    return [float(p) for p in peaks]


def write_estimate_figures(args, y, g, result, truth_deg, config):
    grid = cbf_grid()
    spectrum = pipeline.cbf_spectrum(y, g, grid)
    with open(out_path(args, 'cbf.csv'), 'w', newline='', encoding='utf-8') as file:
        for line in utils.comment_lines(dict(config, cbf_step_deg=CBF_STEP_DEG)):
            file.write(line + '\n')
        writer = csv.writer(file)
        writer.writerow(['angle_deg', 'cbf'])
        for angle, value in zip(grid, spectrum):
            writer.writerow(['%.2f' % angle, '%.9g' % value])
    svg.root_scatter(result.roots).save(out_path(args, 'roots.svg'))
    svg.cbf_overlay(grid, spectrum, result.doas_deg, result.amplitudes, truth_deg).save(out_path(args, 'cbf.svg'))
    if result.pruning is not None:
        svg.profile_stems(result.pruning).save(out_path(args, 'profile.svg'))


# Synthesizes a snapshot and writes it alongside the scenario it came from.
@register('simulate')
def simulate_snapshot(args):
    sc, _, _ = load_inputs(args)
    if args.seed is not None:
        sc = simulate.Scenario(sc.geometry, sc.sources, sc.noise, args.seed)
    g = sc.array()
    y, sigma_n = simulate.synth_snapshot(sc, g)

    settings = dict(files.scenario_to_dict(sc), M=g.M, sigma_n=sigma_n)
    snapshot_path = out_path(args, 'snapshot.csv')
    files.save_snapshot(y, snapshot_path, settings)
    files.save_scenario(sc, out_path(args, 'scenario.yaml'))
    geometry.save_geometry(g, out_path(args, 'geometry.csv'), settings)

    clean = geometry.steering_matrix(g, np.radians(sc.doas_deg)) @ sc.amplitudes
    record = {
        'M': g.M,
        'sigma_n': sigma_n,
        'e_n': sigma_n * np.sqrt(g.M),
        'noise_norm': float(np.linalg.norm(y - clean)),
        'snapshot': snapshot_path,
        'scenario': files.scenario_to_dict(sc),
    }
    print('Wrote %s (M = %d, sigma_n = %.4g).' % (snapshot_path, g.M, sigma_n))
    debug_print(args, 'RESULT', record)
    return record


# Monte Carlo RMSE study over SNR and delta multipliers.
@register('benchmark')
def run_benchmark(args):
    data = files.load_yaml(args.scenario) if args.scenario else {}
    if args.snr_grid:
        data['snr_grid'] = [float(v) for v in args.snr_grid.replace(',', ' ').split()]
    if args.delta_mults:
        data['delta_multipliers'] = [float(v) for v in args.delta_mults.replace(',', ' ').split()]
    if args.separation is not None:
        data['separation_deg'] = args.separation
    if args.trials is not None:
        data['n_trials'] = args.trials
    if args.seed is not None:
        data['seed'] = args.seed
    spec = geometry_spec(args)
    if spec is not None:
        data['geometry'] = spec
    data.setdefault('geometry', {'uca': {'M': 40, 'radius': 2.0}})
    estimator = {k: v for k, v in cli_settings(args).items() if v is not None and k not in ('seed', 'delta_mult', 'sigma_n')}
    data['estimator'] = dict(data.get('estimator') or {}, **estimator)

    spec = benchmark.BenchmarkSpec.from_dict(data)
    debug_print(args, 'CONFIG', spec.to_dict())
    result = benchmark.run_benchmark(spec, jobs=args.jobs or 1)
    csv_path, json_path = benchmark.write_outputs(result, args.out_dir or '.')
    if args.svg:
        svg.rmse_lines(result.rows).save(out_path(args, 'rmse.svg'))

    print('%8s  %8s  %10s  %6s  %6s' % ('snr_db', 'delta', 'rmse_deg', 'trials', 'failed'))
    for row in result.rows:
        print('%8g  %8g  %10.4f  %6d  %6d' % (row['snr_db'], row['delta_mult'], row['rmse_deg'],
                                              row['n_trials'], row['n_failed']))
    print('Spearman(RMSE, SNR): %s' % ', '.join('%s: %s' % item for item in result.trend.items()))
    print('Wrote %s and %s.' % (csv_path, json_path))
    return result.to_record()
