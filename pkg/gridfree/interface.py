# ------------------------------------------------------------------------------
# This module defines the package's API.
# ------------------------------------------------------------------------------

import argparse
import logging
import os
import sys

import gridfree

from . import commands
from . import files
from . import geometry
from . import pipeline
from . import simulate
from . import utils


# ------------------------------------------------------------------------------
# Library interface.
# ------------------------------------------------------------------------------


# Estimates DOAs and amplitudes from a snapshot. Keyword arguments are
# EstimatorConfig settings, e.g. sigma_n=0.1 or delta=0.5.
def estimate(y, g, **settings):
    return pipeline.estimate(y, g, pipeline.EstimatorConfig(**settings))


# Synthesizes the named preset and estimates from it. Returns the scenario
# and the estimate.
def run_preset(name, seed=0, **settings):
    sc = simulate.make_preset(name, seed)
    g = sc.array()
    y, sigma_n = simulate.synth_snapshot(sc, g)
    settings.setdefault('sigma_n', sigma_n)
    return sc, pipeline.estimate(y, g, pipeline.EstimatorConfig(**settings))


# Loads a scenario file and estimates from it, honouring any estimator
# settings and measured snapshot it names.
def run_scenario(path, **settings):
    sc, overrides, snapshot = files.load_scenario(path)
    g = sc.array()
    defaults = {}
    if snapshot:
        y = files.load_snapshot(snapshot)
    else:
        y, defaults['sigma_n'] = simulate.synth_snapshot(sc, g)
    return sc, pipeline.estimate(y, g, files.make_config(defaults, overrides, settings))


# ------------------------------------------------------------------------------
# Command line interface.
# ------------------------------------------------------------------------------


# Command line helptext.
helptext = """
Usage: %s <command> [FLAGS] [OPTIONS] [SCENARIO]

  Gridless single-snapshot direction-of-arrival estimation for planar arrays
  of arbitrary geometry.

  Example:

    $ gridfree estimate --preset two-close-uca --P 63 --out-dir out --svg

Commands:
  analyze-geometry      Report the DFT length P and per-sensor bandwidths.
  estimate              Estimate DOAs from a scenario or measured snapshot.
  simulate              Synthesize a snapshot from a scenario.
  benchmark             Run a Monte Carlo RMSE study.

Geometry:
  --geometry <file>     CSV file of x,y sensor positions in wavelengths.
  --uca <params>        Circular array, e.g. "M=40 radius=2".
  --rpa <params>        Random planar array, e.g. "M=30 min_spacing=0.25
                        max_radius=2 seed=7".
  --ula <params>        Linear array, e.g. "M=8 spacing=0.5".

Options:
  --preset <name>       Built-in scenario: two-close-uca, five-source-uca,
                        two-close-rpa.
  --snapshot <file>     Measured snapshot CSV (re,im per sensor).
  --gamma-db <db>       Fourier-series truncation threshold (default: -160).
  --P <n>               Override the DFT length (odd).
  --delta <x>           Noise-norm bound.
  --delta-mult <x>      Bound as a multiple of sigma_n sqrt(M) (default: 1).
  --sigma <x>           Per-sensor noise standard deviation.
  --beta <x>            Sparse pruning weight.
  --n-fill <n>          Random fill angles for pruning (default: 180).
  --circle-tol <x>      Root distance from the unit circle (default: 0.02).
  --seed <n>            Random seed.
  --jobs <n>            Benchmark worker processes (default: 1).
  --out-dir <dir>       Directory for output files.
  --snr-grid <list>     Benchmark SNR values in dB, e.g. "0 10 20 30".
  --delta-mults <list>  Benchmark delta multipliers, e.g. "0.5 1 2".
  --separation <deg>    Benchmark source separation (default: 30).
  --trials <n>          Benchmark trials per cell (default: 50).

Flags:
  -d, --debug           Run in debug mode.
  -h, --help            Print the application's help text and exit.
  --heatmap             Write the coefficient power table (analyze-geometry).
  -p, --pygmentize      Colour the JSON result on the terminal.
  --svg                 Write SVG figures.
  --verbose             Log progress messages.
  -v, --version         Print the application's version number and exit.

Exit status:
  0 success, 2 invalid input, 3 estimation stage failure, 4 I/O failure.
""" % os.path.basename(sys.argv[0])


# Custom argparse action to override the default help text.
class HelpAction(argparse.Action):
    def __call__(self, parser, namespace, values, option_string=None):
        print(helptext.strip())
        sys.exit()


# Parser errors exit with the validation status rather than argparse's own.
class ArgumentParser(argparse.ArgumentParser):
    def error(self, message):
        sys.stderr.write('Error: %s\n' % message)
        sys.exit(2)


def make_parser():
    parser = ArgumentParser(add_help=False)
    parser.add_argument('-v', '--version',
        action="version",
        version=gridfree.__version__,
    )
    parser.add_argument('-h', '--help',
        action=HelpAction,
        nargs=0,
    )
    parser.add_argument('command',
        choices=sorted(commands.commandmap),
    )
    parser.add_argument('scenario',
        nargs='?',
        help="scenario or benchmark YAML file",
    )
    parser.add_argument('-d', '--debug', action="store_true")
    parser.add_argument('--verbose', action="store_true")
    parser.add_argument('-p', '--pygmentize', action="store_true")
    parser.add_argument('--svg', action="store_true")
    parser.add_argument('--heatmap', action="store_true")
    parser.add_argument('--geometry')
    parser.add_argument('--uca')
    parser.add_argument('--rpa')
    parser.add_argument('--ula')
    parser.add_argument('--preset', choices=sorted(simulate.presets))
    parser.add_argument('--snapshot')
    parser.add_argument('--gamma-db', type=float)
    parser.add_argument('--P', type=int)
    parser.add_argument('--delta', type=float)
    parser.add_argument('--delta-mult', type=float)
    parser.add_argument('--sigma', type=float)
    parser.add_argument('--beta', type=float)
    parser.add_argument('--n-fill', type=int)
    parser.add_argument('--circle-tol', type=float)
    parser.add_argument('--seed', type=int)
    parser.add_argument('--jobs', type=int, default=1)
    parser.add_argument('--out-dir')
    parser.add_argument('--snr-grid')
    parser.add_argument('--delta-mults')
    parser.add_argument('--separation', type=float)
    parser.add_argument('--trials', type=int)
    return parser


def configure_logging(args):
    level = logging.WARNING
    if args.verbose:
        level = logging.INFO
    if args.debug:
        level = logging.DEBUG
    logging.basicConfig(level=level, format='%(levelname)s %(name)s: %(message)s')


# Entry point for the command line utility. Returns the exit status.
def main(argv=None):
    args = make_parser().parse_args(argv)
    configure_logging(args)
    try:
        commands.process(args.command, args)
    except utils.StageError as err:
        sys.stderr.write('Error: %s\n' % err)
        return 3
    except utils.GridfreeError as err:
        sys.stderr.write('Error: %s\n' % err)
        return 2
    except OSError as err:
        sys.stderr.write('Error: %s\n' % err)
        return 4
    return 0
