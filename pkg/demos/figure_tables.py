"""
Figure data as CSV
==================

Regenerates the sensitivity-versus-phonon tables with the same writer the
command line uses.  Redirect to a file and plot with any tool.
"""

import numpy as np

from squeezamp import metrology
from squeezamp.cli import format_sweep

alpha, eta = 1.0, 0.01

# single squeeze over g and T
rows = metrology.sweep("single", alpha, eta, np.linspace(0.1, 2, 5), np.linspace(1, 10, 4))
print(format_sweep(rows), end="")

# eight segments at g = 4 alpha, T chosen so n_bar spans 1e2..1e5
T_list = [metrology.msp_T_for_nbar(alpha, 4 * alpha, n) for n in np.geomspace(1e2, 1e5, 7)]
rows = metrology.sweep("msp", alpha, eta, [4 * alpha], T_list)
print(format_sweep(rows).split("\n", 1)[1], end="")
