"""
Symatch - Symmetry Matching Decoders for Bivariate Bicycle Codes

Exact minimum-weight matching on code symmetries, the cylinder trick for
logical readout, and the benchmark harness used to compare decoder variants
under code-capacity bit-flip noise.
"""

__version__ = "0.3.1"
__author__ = "Symatch Development Team"
__email__ = "dev@symatch.org"
__license__ = "MIT"

# Version info tuple for programmatic access
VERSION_INFO = tuple(map(int, __version__.split('.')))

# Application metadata
APP_NAME = "Symatch"
APP_DESCRIPTION = "Symmetry matching decoders for bivariate bicycle codes"
APP_URL = "https://github.com/symatch/symatch"

# Decoder families shipped with this release
SUPPORTED_DECODERS = [
    "symatch",
    "simplex-symatch",
    "lr-symatch",
    "lr-simplex-symatch",
    "bp-symatch",
    "bp-simplex-symatch",
    "bp-lr-symatch",
    "bp-lr-simplex-symatch",
    "correlated-symatch",
]
