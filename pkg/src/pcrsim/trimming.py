# This program is free software: you can redistribute it and/or modify it under the terms of the GNU General Public License as published by the Free Software Foundation, either version 3 of the License, or (at your option) any later version.
# This program is distributed in the hope that it will be useful, but WITHOUT ANY WARRANTY; without even the implied warranty of MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE. See the GNU General Public License for more details.
# You should have received a copy of the GNU General Public License along with this program. If not, see <https://www.gnu.org/licenses/>.
# Version: 1.0.0 / 2026.10.19

"""Trimming.

   TC trimming: the effective width of M5 is tc_fixed_w+code*tc_unit_w (binary-weighted parallel branches of widths
   2^i*tc_unit_w, i = 0...tc_bits-1, on top of an always-on branch).
   I_REF trimming: either a series resistor r_fixed+sum_i (1-bit_i)*2^i*r_unit (a set bit shorts the segment), or a
   binary-weighted output mirror i_out = i_ref*(mirror_fixed+code)/mirror_ref.
   The TC should be trimmed first, then I_REF."""

import dataclasses
from dataclasses import dataclass
import numpy as np
from .defs import TSTEP, TNORM, TWOPOINT, TrimError
from .utils import message, parallel_map

@dataclass(frozen = True)
class TrimState:
  """Trimming codes."""
  tc_code: int = 0
  iref_code: int = 0

@dataclass(frozen = True)
class TcScanRow:
  """Result of a TC trimming code: effective width of M5 (µm), box TC (ppm/°C), two-point error, i_ref at 25 °C (A)."""
  code: int
  w5: float
  box_tc: float
  two_point_error: float
  i_ref_25: float

################
# Code checks. #
################

def _check_code(code, bits, what):
  """Check that 'code' is an integer in [0, 2^bits[."""
  if isinstance(code, bool) or not isinstance(code, (int, np.integer)) or not 0 <= code < 2**bits:
    raise TrimError(f"Error, {what} code {code} out of range [0, {2**bits-1}].")

def _config(card):
  """Return the trimming configuration of card 'card'."""
  if card.trim is None: raise TrimError(f"Error, card {card.name} has no trimming configuration.")
  return card.trim

def trim_state(card, tc_code = None, iref_code = None):
  """Return the TrimState of card 'card' with codes 'tc_code' and 'iref_code' (default: card nominal codes)."""
  cfg = _config(card)
  state = TrimState(tc_code = cfg.tc_code if tc_code is None else tc_code, iref_code = cfg.iref_code if iref_code is None else iref_code)
  _check_code(state.tc_code, cfg.tc_bits, "TC")
  _check_code(state.iref_code, cfg.iref_bits, "I_REF")
  return state

############
# Mapping. #
############

def tc_trim_effective_w5(cfg, tc_code):
  """Return the effective width (µm) of M5 for TC code 'tc_code'."""
  _check_code(tc_code, cfg.tc_bits, "TC")
  return cfg.tc_fixed_w+int(tc_code)*cfg.tc_unit_w

def iref_trim_resistance(cfg, iref_code):
  """Return the trimmed resistance (ohms) for I_REF code 'iref_code' (series_resistor style)."""
  if cfg.iref_style != "series_resistor": raise TrimError("Error, the I_REF trimming style is not series_resistor.")
  _check_code(iref_code, cfg.iref_bits, "I_REF")
  return cfg.r_fixed+(2**cfg.iref_bits-1-int(iref_code))*cfg.r_unit

def iout_trim_mirror(cfg, iref_code, i_ref):
  """Return the output current (A) of the trimmed output mirror for I_REF code 'iref_code' and reference current 'i_ref'."""
  if cfg.iref_style != "output_mirror": raise TrimError("Error, the I_REF trimming style is not output_mirror.")
  _check_code(iref_code, cfg.iref_bits, "I_REF")
  return i_ref*(cfg.mirror_fixed+int(iref_code))/cfg.mirror_ref

def apply_trim(card, state):
  """Return card 'card' trimmed with TrimState 'state'.
     M5 gets the effective TC-trimmed width, the replica M5B tracks it, and the resistor gets the trimmed value
     (series_resistor style)."""
  cfg = _config(card)
  m5, m5b = card.device("M5"), card.device("M5B")
  w5 = tc_trim_effective_w5(cfg, state.tc_code)
  scale = w5/(m5.W*m5.mult)
  devices = dict(card.devices)
  devices["M5"] = dataclasses.replace(m5, W = w5/m5.mult)
  devices["M5B"] = dataclasses.replace(m5b, W = m5b.W*scale)
  resistor = card.resistor
  if cfg.iref_style == "series_resistor":
    resistor = dataclasses.replace(resistor, r_ref = iref_trim_resistance(cfg, state.iref_code))
  else:
    _check_code(state.iref_code, cfg.iref_bits, "I_REF")
  return dataclasses.replace(card, devices = devices, resistor = resistor)

#############
# Searches. #
#############

def two_point_error(i1, i2):
  """Return the two-point trimming error |i1-i2|/mean(i1, i2)."""
  return abs(i1-i2)/(.5*(i1+i2))

def _states(card, opts):
  """Return the TrimState of options 'opts' (default: card nominal codes)."""
  return opts.trim if opts.trim is not None else trim_state(card)

def tc_scan(card, v_dd, t_range, opts, step = TSTEP, two_point = TWOPOINT, threads = 1):
  """Scan all TC codes of card 'card' at supply 'v_dd' over the temperature range 't_range' = (t_min, t_max).
     The I_REF code is that of options 'opts' (default: card nominal code).
     Return the list of TcScanRow, by increasing code."""
  from .analysis import sweep_temperature, box_tc # The circuit solvers import this module.
  from .circuits import solve_pcr
  cfg = _config(card)
  iref_code = _states(card, opts).iref_code
  tmin, tmax = t_range
  t1, t2 = two_point
  def scan(code):
    copts = opts.replace(trim = TrimState(tc_code = code, iref_code = iref_code))
    series = sweep_temperature(card, v_dd, tmin, tmax, step, copts)
    i1 = solve_pcr(card, v_dd, t1, copts).i_ref
    i2 = solve_pcr(card, v_dd, t2, copts).i_ref
    i25 = solve_pcr(card, v_dd, TNORM, copts).i_ref
    return TcScanRow(code = code, w5 = tc_trim_effective_w5(cfg, code), box_tc = box_tc(series), two_point_error = two_point_error(i1, i2), i_ref_25 = i25)
  message(f"Scanning {2**cfg.tc_bits} TC trimming codes...")
  return parallel_map(scan, list(range(2**cfg.tc_bits)), threads = threads)

def _first_argmin(values):
  """Return the index of the first minimum of 'values' (lowest code on ties)."""
  return int(np.argmin(np.asarray(values, dtype = np.float64)))

def best_tc_code(rows, method = "full_profile"):
  """Return (tc_code, box TC in ppm/°C) of the list of TcScanRow 'rows' with the lowest box TC (method = "full_profile")
     or the lowest two-point error (method = "two_point"). Ties are broken by the lowest code."""
  if method == "full_profile":
    best = rows[_first_argmin([row.box_tc for row in rows])]
  elif method == "two_point":
    best = rows[_first_argmin([row.two_point_error for row in rows])]
  else:
    raise ValueError(f"Error, unknown TC trimming method '{method}'.")
  return best.code, best.box_tc

def search_tc_trim(card, v_dd, t_range, opts, method = "full_profile", two_point = TWOPOINT, step = TSTEP, threads = 1):
  """Search the TC code of card 'card' minimizing the temperature dependence of I_REF at supply 'v_dd'.
     method = "full_profile": exhaustive scan of the box TC over the full temperature grid.
     method = "two_point": minimize |I(t1)-I(t2)|/I_mean, with (t1, t2) = two_point.
     Ties are broken by the lowest code. Return (tc_code, achieved box TC in ppm/°C)."""
  from .analysis import sweep_temperature, box_tc # The circuit solvers import this module.
  from .circuits import solve_pcr
  cfg = _config(card)
  iref_code = _states(card, opts).iref_code
  tmin, tmax = t_range
  codes = list(range(2**cfg.tc_bits))
  if method == "full_profile":
    def metric(code):
      copts = opts.replace(trim = TrimState(tc_code = code, iref_code = iref_code))
      return box_tc(sweep_temperature(card, v_dd, tmin, tmax, step, copts))
    tcs = parallel_map(metric, codes, threads = threads)
    best = _first_argmin(tcs)
    return codes[best], tcs[best]
  if method == "two_point":
    t1, t2 = two_point
    def metric(code):
      copts = opts.replace(trim = TrimState(tc_code = code, iref_code = iref_code))
      return two_point_error(solve_pcr(card, v_dd, t1, copts).i_ref, solve_pcr(card, v_dd, t2, copts).i_ref)
    errors = parallel_map(metric, codes, threads = threads)
    code = codes[_first_argmin(errors)]
    copts = opts.replace(trim = TrimState(tc_code = code, iref_code = iref_code))
    return code, box_tc(sweep_temperature(card, v_dd, tmin, tmax, step, copts))
  raise ValueError(f"Error, unknown TC trimming method '{method}'.")

def iref_scan(card, v_dd, temp, opts, threads = 1):
  """Scan all I_REF codes of card 'card' at supply 'v_dd' and temperature 'temp'.
     The TC code is that of options 'opts' (default: card nominal code).
     Return the list of achieved currents (i_ref for series_resistor, i_out for output_mirror), by increasing code."""
  from .circuits import solve_pcr # The circuit solvers import this module.
  cfg = _config(card)
  tc_code = _states(card, opts).tc_code
  codes = list(range(2**cfg.iref_bits))
  if cfg.iref_style == "output_mirror":
    i_ref = solve_pcr(card, v_dd, temp, opts.replace(trim = TrimState(tc_code = tc_code, iref_code = cfg.iref_code))).i_ref
    return [iout_trim_mirror(cfg, code, i_ref) for code in codes]
  def achieved(code):
    return solve_pcr(card, v_dd, temp, opts.replace(trim = TrimState(tc_code = tc_code, iref_code = code))).i_ref
  message(f"Scanning {len(codes)} I_REF trimming codes...")
  return parallel_map(achieved, codes, threads = threads)

def search_iref_trim(card, v_dd, temp, target, opts, threads = 1):
  """Search the I_REF code of card 'card' bringing the output current closest to 'target' (A) at supply 'v_dd' and
     temperature 'temp'. The TC code must be already set in options 'opts' (default: card nominal code).
     Ties are broken by the lowest code. Return (iref_code, achieved current). Raise TrimError if the target is outside
     the achievable span."""
  currents = np.asarray(iref_scan(card, v_dd, temp, opts, threads = threads), dtype = np.float64)
  lo, hi = currents.min(), currents.max()
  if not lo <= target <= hi: raise TrimError(f"Error, target {target:.6e} A outside the achievable span [{lo:.6e}, {hi:.6e}] A.")
  errors = np.abs(currents-target)
  emin = errors.min()
  code = int(np.flatnonzero(errors <= emin+1.e-9*emin+1.e-24)[0])
  return code, float(currents[code])
