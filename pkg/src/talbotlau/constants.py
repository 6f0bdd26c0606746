"""Physical constants (CODATA 2018, SI units)."""

import math

C = 299792458.0                    # speed of light [m/s]
H = 6.62607015e-34                 # Planck constant [J s]
HBAR = H / (2.0 * math.pi)         # reduced Planck constant [J s]
E_CHARGE = 1.602176634e-19         # elementary charge [C]
ELECTRON_MASS = 9.1093837015e-31   # electron rest mass [kg]
MU_0 = 1.25663706212e-6            # vacuum permeability [N/A^2]

EV = E_CHARGE                      # 1 eV in joules
