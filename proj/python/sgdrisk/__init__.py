"""Exact risk trajectories, closed-form bias/variance bounds, and Monte
Carlo certification for constant-step-size SGD on Gaussian linear
regression.

Everything runs in the eigenbasis of the data covariance: a problem is a
descending spectrum, a noise level, a step size, a batch size, and the
squared eigen-coordinates of the initial offset.
"""

try:
    from ._sgdrisk import *  # noqa: F401,F403  installed-package layout
    from ._sgdrisk import __doc__ as _core_doc  # noqa: F401
except ImportError:  # in-tree build: extension sits on PYTHONPATH
    from _sgdrisk import *  # noqa: F401,F403

__version__ = "0.1.0"
