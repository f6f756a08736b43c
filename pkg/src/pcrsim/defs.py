# This program is free software: you can redistribute it and/or modify it under the terms of the GNU General Public License as published by the Free Software Foundation, either version 3 of the License, or (at your option) any later version.
# This program is distributed in the hope that it will be useful, but WITHOUT ANY WARRANTY; without even the implied warranty of MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE. See the GNU General Public License for more details.
# You should have received a copy of the GNU General Public License along with this program. If not, see <https://www.gnu.org/licenses/>.
# Version: 1.0.0 / 2026.10.19

"""pcrsim definitions."""

from scipy import constants

# Physical constants (CODATA, SI units).

KBOLTZMANN = constants.k # J/K.
QELECTRON = constants.e  # C.
ZEROCELSIUS = constants.zero_Celsius # 273.15 K.

# Units.
#
#  - Voltages in V, currents in A, resistances in ohms, temperatures in °C, lengths in µm.
#  - Temperature coefficients (TC) in ppm/°C, line sensitivities (LS) in %/V.

# Solver defaults.

NEWTON_TOL_I = 1.e-15 # Current residual tolerance (A).
NEWTON_TOL_V = 1.e-7  # Voltage residual tolerance (V).
MAX_ITER = 100        # Maximum number of Newton iterations.
BRACKET = 100.        # Bisection bracket [I_est/BRACKET, BRACKET*I_est].

# Saturation: V_DS > SATURATION*U_T.

SATURATION = 4.

# Default temperature validity range and sweeps (°C).

TVALID = (-55., 125.)
TSTEP = 5.
TNORM = 25. # Temperature for 25 °C normalizations and I_REF reports.

# Default two-point trimming temperatures (°C).

TWOPOINT = (-35., 65.)

# Named process corners.

CORNERS = ("TT", "FF", "SS", "FS", "SF")

# CSV float format (9 significant digits).

FLOATFMT = "%.8e"

# Exit codes.

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NUMERICAL = 3

###############
# Exceptions. #
###############

class CardError(ValueError):
  """Invalid technology card or settings."""

class TrimError(ValueError):
  """Trimming code or target outside the configured span."""

class ModelDomainError(ValueError):
  """Model evaluated outside its domain of validity."""

class ConvergenceError(ArithmeticError):
  """Solver failed to converge."""

class HeadroomError(ConvergenceError):
  """No physical operating point at this supply voltage."""
