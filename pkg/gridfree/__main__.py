# ---------------------------------------------------------
# This module makes the package directly executable. To
# run a gridfree package located on Python's import search
# path:
#
#   $ python -m gridfree
#
# To run an arbitrary gridfree package:
#
#   $ python /path/to/gridfree/package
#
# ---------------------------------------------------------

import os
import sys


# Python doesn't automatically add the package's parent directory to the
# module search path so we need to do so manually before we can import
# gridfree.
sys.path.insert(0, os.path.dirname(os.path.dirname(__file__)))


import gridfree
sys.exit(gridfree.main())
