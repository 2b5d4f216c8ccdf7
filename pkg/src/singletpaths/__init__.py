"""Weak-value path ensembles and hidden-variable simulations for the polarization singlet.

The package splits into five layers:

* :mod:`singletpaths.hilbert` -- dense complex linear algebra on tiny spaces,
* :mod:`singletpaths.singlet` -- four-path ensembles, weak values, dynamics,
* :mod:`singletpaths.repframe` -- transforms between path representations,
* :mod:`singletpaths.hidden_circle` -- the finely resolved model on the circle,
* :mod:`singletpaths.measurement` -- collapse dynamics and pointer models,

plus :mod:`singletpaths.cli`, an experiment runner with reproducible seeds.
"""

from . import cli, errors, hidden_circle, hilbert, measurement, repframe, singlet

__all__ = [
    "cli",
    "errors",
    "hidden_circle",
    "hilbert",
    "measurement",
    "repframe",
    "singlet",
]

__version__ = "0.1.0"
