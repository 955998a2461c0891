"""lindrad: a desk-scale numerical laboratory for the dissipative dynamics
of a radiating relativistic electron.

Layers, cross-validated against one another:

* Dirac/Foldy-Wouthuysen spinor algebra,
* Lindblad density-matrix evolution with vacuum-fluctuation jump operators,
* the radiation-reaction emission kernel and its closed-form friction force,
* classical equations of motion (Lorentz, Landau-Lifshitz, corrected
  Ehrenfest, Sokolov-like variant),
* a Fokker-Planck / Langevin kinetic pair with rank-one diffusion,
* a Wigner / Moyal phase-space toolkit.
"""

__version__ = "0.1.0"

from .units import ModelConstants, derived_constants

__all__ = ["ModelConstants", "derived_constants", "__version__"]
