"""Photon retrieval efficiency of subwavelength atomic arrays."""

from ._arraymem import *  # noqa: F401,F403
from ._arraymem import __doc__  # noqa: F401
