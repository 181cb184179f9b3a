"""Cascaded two-photon emission simulator.

A single three-level ladder emitter coupled to two independent lossy
cavities: Lindblad master-equation dynamics, steady states, two-time
correlation functions, Hong-Ou-Mandel indistinguishability, photon-pair
statistics and the fitting helpers used to analyze them. The heavy lifting
lives in the compiled extension; this package only re-exports it.
"""

from cascade_qed._core import *  # noqa: F401,F403
from cascade_qed._core import __version__  # noqa: F401
