# This program is free software: you can redistribute it and/or modify it under the terms of the GNU General Public License as published by the Free Software Foundation, either version 3 of the License, or (at your option) any later version.
# This program is distributed in the hope that it will be useful, but WITHOUT ANY WARRANTY; without even the implied warranty of MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE. See the GNU General Public License for more details.
# You should have received a copy of the GNU General Public License along with this program. If not, see <https://www.gnu.org/licenses/>.
# Version: 1.0.0 / 2026.10.19

"""pcrsim utils."""

import sys
import numpy as np
import dask
from .defs import ZEROCELSIUS

#############
# Messages. #
#############

# Print messages ?

verbose = True

def set_verbose(flag):
  """Print messages if 'flag' is True."""
  global verbose
  verbose = bool(flag)

def message(string):
  """Print message 'string' on the standard error (the standard output carries the CSV data)."""
  if verbose: print(string, file = sys.stderr)

def warning(string):
  """Print warning 'string'."""
  message("Warning, "+string)

################
# Temperature. #
################

def kelvin(temp):
  """Return temperature 'temp' (°C) in kelvin."""
  return temp+ZEROCELSIUS

##########
# Grids. #
##########

def grid(start, stop, step):
  """Return the inclusive grid start, start+step, ..., stop.
     'step' must divide stop-start (to within 1e-9 step)."""
  if step <= 0.: raise ValueError("Error, step must be > 0.")
  if stop <= start: raise ValueError("Error, stop must be > start.")
  n = (stop-start)/step
  nint = int(round(n))
  if abs(n-nint) > 1.e-9*max(1., n): raise ValueError(f"Error, step {step} does not divide the range [{start}, {stop}].")
  x = start+step*np.arange(nint+1, dtype = np.float64)
  x[-1] = stop
  return x

###############
# Statistics. #
###############

def nearest_rank(data, q):
  """Return the q-th percentile (0 < q <= 100) of 'data' by the nearest-rank method."""
  data = np.asarray(data, dtype = np.float64)
  if data.size == 0: raise ValueError("Error, no data.")
  return float(np.percentile(data, q, method = "inverted_cdf"))

def linear_slope(x, y):
  """Return the least-squares slope of y(x)."""
  x = np.asarray(x, dtype = np.float64)
  y = np.asarray(y, dtype = np.float64)
  return float(np.polyfit(x, y, 1)[0])

##################
# Parallel maps. #
##################

# Default number of items per dask task.

chunksize = 64

def set_chunksize(size):
  """Set the default number of items per dask task."""
  global chunksize
  if size < 1: raise ValueError("Error, the chunk size must be >= 1.")
  chunksize = int(size)

def _map_chunk(function, chunk):
  """Apply 'function' to all items of 'chunk'."""
  return [function(item) for item in chunk]

def parallel_map(function, items, threads = 1, size = None):
  """Return [function(item) for item in items], evaluated by 'threads' dask threads.
     The items are split in chunks of 'size' items (default: set_chunksize). The results are returned in input order,
     so that they do not depend on the number of threads."""
  items = list(items)
  if threads <= 1 or len(items) <= 1: return _map_chunk(function, items)
  if size is None: size = chunksize
  chunks = [items[i:i+size] for i in range(0, len(items), size)]
  tasks = [dask.delayed(_map_chunk)(function, chunk) for chunk in chunks]
  results = dask.compute(*tasks, scheduler = "threads", num_workers = threads)
  return [result for chunk in results for result in chunk]
