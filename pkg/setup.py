#!/usr/bin/env python3
"""
Gridfree estimates the directions of arrival of coherent narrowband sources
from a single array snapshot, without a search grid, for planar arrays of
arbitrary geometry. This package can be used as both a command line tool and
an importable library.

On the command line::

    $ gridfree estimate --preset two-close-uca --P 63

As a library::

    >>> import gridfree
    >>> g = gridfree.geometry.make_uca(40, 2.0)
    >>> result = gridfree.estimate(y, g, sigma_n=0.1)
    >>> result.doas_deg

"""

import os
import re
import io
import setuptools


filepath = os.path.join(os.path.dirname(__file__), 'gridfree', '__init__.py')
with io.open(filepath, encoding='utf-8') as metafile:
    regex = r'''^__([a-z]+)__ = ["'](.*)["']'''
    meta = dict(re.findall(regex, metafile.read(), flags=re.MULTILINE))


setuptools.setup(
    name = 'gridfree',
    version = meta['version'],
    packages = ['gridfree'],
    entry_points = {
        'console_scripts': [
            'gridfree = gridfree:main',
        ],
    },
    python_requires = '>=3.8',
    install_requires = [
        'numpy>=1.20',
        'scipy>=1.7',
        'cvxpy>=1.3',
        'pyyaml',
        'pygments',
    ],
    license = 'Public Domain',
    description = ('Gridless single-snapshot DOA estimation for arbitrary planar arrays.'),
    long_description = __doc__,
    classifiers = [
        'Programming Language :: Python :: 3',
        'Operating System :: OS Independent',
        'License :: Public Domain',
        'Topic :: Scientific/Engineering',
    ],
)
