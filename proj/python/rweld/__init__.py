"""Random conformal welding of Gaussian multiplicative chaos measures."""

from ._rweld import *  # noqa: F401,F403
from ._rweld import __doc__  # noqa: F401
