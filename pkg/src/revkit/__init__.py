"""revkit: tools for generalized reversible computing.

Subpackages:

* :mod:`revkit.grc` -- digital state spaces, conditioned operations, reversibility
  classification and information-loss / Landauer-heat accounting.
* :mod:`revkit.bennett` -- compile AND/OR/NOT netlists into compute/copy/decompute
  reversible schedules; reversible pebble game strategies.
* :mod:`revkit.twolal` -- discrete-tick simulator for two-level adiabatic logic (2LAL).
* :mod:`revkit.energy` -- physical constants and figure-of-merit calculators.
"""

__version__ = "0.1.0"
