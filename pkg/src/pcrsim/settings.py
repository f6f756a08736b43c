# This program is free software: you can redistribute it and/or modify it under the terms of the GNU General Public License as published by the Free Software Foundation, either version 3 of the License, or (at your option) any later version.
# This program is distributed in the hope that it will be useful, but WITHOUT ANY WARRANTY; without even the implied warranty of MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE. See the GNU General Public License for more details.
# You should have received a copy of the GNU General Public License along with this program. If not, see <https://www.gnu.org/licenses/>.
# Version: 1.0.0 / 2026.10.19

"""Run settings.

   Settings files contain a single python dictionary literal, e.g.:
     {"max_iter": 200, "threads": 4}
   Missing keys take their default values."""

import ast
from .defs import NEWTON_TOL_I, NEWTON_TOL_V, MAX_ITER, CardError
from .utils import message

def get_default_settings():
  """Return default settings as a dictionnary."""
  return {"newton_tol_i": NEWTON_TOL_I, "newton_tol_v": NEWTON_TOL_V, "max_iter": MAX_ITER, "fallback_bisection": True, "threads": 1, "chunk_size": 64, "verbose": True}

def settings_from_dict(settings):
  """Return the default settings updated with dictionnary 'settings'.
     Raise CardError if a key is unknown or has a wrong type."""
  defaults = get_default_settings()
  merged = dict(defaults)
  for key, value in settings.items():
    if key not in defaults: raise CardError(f"Error, unknown settings keyword '{key}'.")
    default = defaults[key]
    if isinstance(default, bool):
      if not isinstance(value, bool): raise CardError(f"Error, settings keyword '{key}' must be True or False.")
    elif isinstance(default, int):
      if isinstance(value, bool) or not isinstance(value, int): raise CardError(f"Error, settings keyword '{key}' must be an integer.")
    elif isinstance(default, float):
      if isinstance(value, bool) or not isinstance(value, (int, float)): raise CardError(f"Error, settings keyword '{key}' must be a number.")
      value = float(value)
    merged[key] = value
  if merged["newton_tol_i"] <= 0. or merged["newton_tol_v"] <= 0.: raise CardError("Error, solver tolerances must be > 0.")
  if merged["max_iter"] < 8: raise CardError("Error, max_iter must be >= 8.")
  if merged["threads"] < 1 or merged["chunk_size"] < 1: raise CardError("Error, threads and chunk_size must be >= 1.")
  return merged

def load_settings(filename):
  """Read settings in file 'filename'.
     Raise CardError if the file can not be read or is invalid."""
  message(f"Loading settings {filename}...")
  try:
    with open(filename, "r") as f:
      string = f.read()
    settings = ast.literal_eval(string)
  except (OSError, ValueError, SyntaxError):
    raise CardError(f"Error, failed to read settings file {filename}.") from None
  if not isinstance(settings, dict): raise CardError(f"Error, settings file {filename} must contain a dictionnary.")
  return settings_from_dict(settings)
