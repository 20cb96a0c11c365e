# ------------------------------------------------------------------------------
# Utility functions and classes.
# ------------------------------------------------------------------------------

import re
import shutil

import numpy as np


# Exception class for reporting errors.
class GridfreeError(Exception):
    pass


# Raised by the estimation pipeline. Names the stage that failed so that
# callers never receive a partial result without knowing where it broke.
class StageError(GridfreeError):

    def __init__(self, stage, cause):
        self.stage = stage
        self.cause = cause
        super().__init__("Stage '%s' failed: %s" % (stage, cause))


# Wraps angles in radians into the half-open interval (-pi, pi].
def wrap_angle(theta):
    wrapped = np.pi - np.mod(np.pi - np.asarray(theta, dtype=float), 2 * np.pi)
    if np.ndim(wrapped) == 0:
        return float(wrapped)
    return wrapped


# Wraps angles in degrees into the half-open interval (-180, 180]. Angles
# already in range are returned unchanged.
def wrap_degrees(theta):
    theta = np.asarray(theta, dtype=float)
    inside = (theta > -180.0) & (theta <= 180.0)
    wrapped = np.where(inside, theta, 180.0 - np.mod(180.0 - theta, 360.0))
    if wrapped.ndim == 0:
        return float(wrapped)
    return wrapped


# Absolute circular distance between angles in radians, in [0, pi].
def angular_distance(a, b):
    return np.abs(wrap_angle(np.asarray(a) - np.asarray(b)))


# Smallest odd integer greater than or equal to x.
def next_odd(x):
    n = int(np.ceil(x - 1e-12))
    return n if n % 2 == 1 else n + 1


# Utility class for parsing parameter strings of the form:
#
#   M=40 radius=2 seed=7
#
# Keys may be separated by spaces or commas. Values are converted to ints
# or floats where possible; unkeyed values are returned positionally.
class ParamParser:

    args_regex = re.compile(r"""
        (?:([^\s,'"=]+)=)?          # an optional key, followed by...
        (
            "((?:[^\\"]|\\.)*)"     # a double-quoted value, or
            |
            '((?:[^\\']|\\.)*)'     # a single-quoted value
        )
        |
        ([^\s,'"=]+)=([^\s,]+)      # a key followed by an unquoted value
        |
        ([^\s,]+)                   # an unkeyed, unquoted value
    """, re.VERBOSE)

    def parse(self, argstr):
        pargs, kwargs = [], {}
        for match in self.args_regex.finditer(argstr or ''):
            if match.group(2) or match.group(5):
                key = match.group(1) or match.group(5)
                value = match.group(3) or match.group(4) or match.group(6)
                if match.group(3) is None and match.group(4) is None:
                    value = self.convert(value)
                if key:
                    kwargs[key] = value
                else:
                    pargs.append(value)
            else:
                pargs.append(self.convert(match.group(7)))
        return pargs, kwargs

    @staticmethod
    def convert(value):
        for kind in (int, float):
            try:
                return kind(value)
            except ValueError:
                pass
        return value


# Converts numpy scalars and arrays into JSON-friendly values; NaN becomes None.
def plain(value):
    if isinstance(value, dict):
        return {key: plain(item) for key, item in value.items()}
    if isinstance(value, (list, tuple, np.ndarray)):
        return [plain(item) for item in value]
    if isinstance(value, np.generic):
        value = value.item()
    if isinstance(value, float) and np.isnan(value):
        return None
    return value


# Renders a settings mapping as '# key: value' lines for the top of a CSV
# file.
def comment_lines(settings):
    return ['# %s: %r' % (key, value) for key, value in plain(settings or {}).items()]


# Number of lines to skip before the numeric rows of a CSV file: leading
# comment or blank lines, plus one header line if the first remaining line
# does not start with a number.
def header_rows(path):
    count = 0
    with open(path, encoding='utf-8') as file:
        for line in file:
            stripped = line.strip()
            if not stripped or stripped.startswith('#'):
                count += 1
                continue
            return count + 1 if stripped[0] not in '+-.0123456789' else count
    return count


# Formats title text for output on the command line.
def title(text):
    cols, _ = shutil.get_terminal_size()
    line = '\u001B[90m' + '─' * cols + '\u001B[0m'
    return line + '\n' + text.center(cols) + '\n' + line
