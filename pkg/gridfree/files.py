# ------------------------------------------------------------------------------
# Reading and writing scenario files, snapshots and result records.
#
# Scenario files are YAML documents of the form:
#
#   geometry: {uca: {M: 40, radius: 2}}     # or a path to an x,y CSV file
#   sources:
#     - {doa_deg: 40}
#     - {doa_deg: 50, magnitude: 1, phase_deg: 30}
#   noise: {kind: one_over_f, snr_db: 20}
#   seed: 3
#   snapshot: measured.csv                  # optional, replaces synthesis
#   estimator: {P: 63, delta_mult: 1.0}     # optional EstimatorConfig values
#
# Relative paths inside a scenario file are resolved against its directory.
# ------------------------------------------------------------------------------

import dataclasses
import json
import os

import numpy as np
import yaml

from . import geometry
from . import pipeline
from . import simulate
from . import utils


# Use the Pygments module for colouring JSON on the terminal, if it's available.
try:
    import pygments
    import pygments.lexers
    import pygments.formatters
except ImportError:
    pygments = None


# Reads a YAML document into a dictionary.
def load_yaml(path):
    with open(path, encoding='utf-8') as file:
        try:
            data = yaml.safe_load(file) or {}
        except yaml.YAMLError as err:
            raise utils.GridfreeError("Malformed YAML in '%s': %s" % (path, err))
    if not isinstance(data, dict):
        raise utils.GridfreeError("Expected a mapping at the top of '%s'." % path)
    return data


def _resolve(path, base):
    if base and not os.path.isabs(path):
        return os.path.join(base, path)
    return path


# Builds a Scenario from a parsed mapping.
def scenario_from_dict(data, base=None):
    if 'geometry' not in data:
        raise utils.GridfreeError("Scenario has no 'geometry' entry.")
    spec = data['geometry']
    if isinstance(spec, str):
        spec = _resolve(spec, base)

    sources = []
    for entry in data.get('sources') or []:
        if isinstance(entry, (int, float)):
            entry = {'doa_deg': entry}
        try:
            sources.append(simulate.Source(**entry))
        except TypeError as err:
            raise utils.GridfreeError("Bad source entry %r: %s" % (entry, err))

    noise = data.get('noise') or {'sigma_n': 0.0}
    try:
        noise = simulate.NoiseSpec(**noise)
    except TypeError as err:
        raise utils.GridfreeError("Bad noise entry %r: %s" % (noise, err))

    return simulate.Scenario(spec, sources, noise, int(data.get('seed', 0)))


def scenario_to_dict(sc):
    spec = sc.geometry
    if isinstance(spec, geometry.ArrayGeometry):
        spec = {'points': {'xy': spec.xy.tolist()}}
    return {
        'geometry': spec,
        'sources': [
            {'doa_deg': s.doa_deg, 'magnitude': s.magnitude, 'phase_deg': s.phase_deg}
            for s in sc.sources
        ],
        'noise': {'kind': sc.noise.kind, 'sigma_n': sc.noise.sigma_n, 'snr_db': sc.noise.snr_db},
        'seed': sc.seed,
    }


# Loads a scenario file. Returns the scenario, any estimator overrides it
# carries and the path of a measured snapshot if it names one.
def load_scenario(path):
    data = load_yaml(path)
    base = os.path.dirname(os.path.abspath(path))
    scenario = scenario_from_dict(data, base)
    overrides = data.get('estimator') or {}
    snapshot = data.get('snapshot')
    if snapshot:
        snapshot = _resolve(snapshot, base)
    return scenario, overrides, snapshot


def save_scenario(sc, path):
    with open(path, 'w', encoding='utf-8') as file:
        yaml.safe_dump(scenario_to_dict(sc), file, sort_keys=False)


# Snapshot CSV: one 're,im' row per sensor, in sensor order. Leading '#'
# lines and the header line are optional.
def load_snapshot(path):
    try:
        values = np.loadtxt(path, delimiter=',', comments='#', ndmin=2,
                            skiprows=utils.header_rows(path))
    except ValueError as err:
        raise utils.GridfreeError("Malformed snapshot file '%s': %s" % (path, err))
    if values.shape[1] != 2:
        raise utils.GridfreeError("Snapshot file '%s' must have two columns (re, im)." % path)
    return values[:, 0] + 1j * values[:, 1]


def save_snapshot(y, path, config=None):
    y = np.asarray(y, dtype=complex)
    header = '\n'.join(utils.comment_lines(config) + ['re,im'])
    np.savetxt(path, np.column_stack([y.real, y.imag]), delimiter=',', fmt='%.17g',
               header=header, comments='')


# Builds an EstimatorConfig from file values overlaid with command line values.
def make_config(*layers):
    values = {}
    for layer in layers:
        values.update({key: value for key, value in (layer or {}).items() if value is not None})
    fields = {field.name for field in dataclasses.fields(pipeline.EstimatorConfig)}
    unknown = sorted(set(values) - fields)
    if unknown:
        raise utils.GridfreeError("Unknown estimator settings: %s." % ', '.join(unknown))
    return pipeline.EstimatorConfig(**values)


def to_json(record):
    return json.dumps(record, indent=2)


def save_json(record, path):
    with open(path, 'w', encoding='utf-8') as file:
        file.write(to_json(record) + '\n')


def load_json(path):
    with open(path, encoding='utf-8') as file:
        try:
            return json.load(file)
        except json.JSONDecodeError as err:
            raise utils.GridfreeError("Malformed JSON in '%s': %s" % (path, err))


# JSON text for the terminal, coloured when Pygments is available.
def highlight_json(record, pygmentize=False):
    text = to_json(record)
    if pygmentize and pygments:
        lexer = pygments.lexers.JsonLexer()
        formatter = pygments.formatters.TerminalFormatter()
        return pygments.highlight(text, lexer, formatter).rstrip('\n')
    return text
