# This program is free software: you can redistribute it and/or modify it under the terms of the GNU General Public License as published by the Free Software Foundation, either version 3 of the License, or (at your option) any later version.
# This program is distributed in the hope that it will be useful, but WITHOUT ANY WARRANTY; without even the implied warranty of MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE. See the GNU General Public License for more details.
# You should have received a copy of the GNU General Public License along with this program. If not, see <https://www.gnu.org/licenses/>.
# Version: 1.0.0 / 2026.10.19

"""Sweeps and metrics.

   Temperature and supply sweeps, box-method TC (ppm/°C) and LS (%/V), analytic TC and LS, DC PSRR,
   figures of merit, 2T sizing maps and corner scans."""

import math
import dataclasses
from dataclasses import dataclass
import numpy as np
from .defs import TSTEP, TNORM, CORNERS, ConvergenceError, ModelDomainError
from .utils import kelvin, grid, linear_slope, parallel_map
from .techcard import apply_corner
from .devmodel import BiasPoint, gamma_star, phi_fp, delta_vt_body, mosfet_ids, small_signal, resistor_tcr
from .circuits import CircuitOptions, solve_pcr, supply_current, v_b2_closed_form, v_b2_closed_form_slope, prepare_card, use_m7
from .trimming import TrimState, trim_state, search_tc_trim

###########
# Sweeps. #
###########

@dataclass(frozen = True)
class SweepSeries:
  """Sweep series: variable ("temperature" or "supply"), sweep values x, operating points, held value (v_dd or temp) and circuit options."""
  variable: str
  x: np.ndarray
  points: tuple
  fixed: float
  opts: CircuitOptions

  @property
  def samples(self):
    """Return the list of (x, OperatingPoint) pairs."""
    return list(zip(self.x, self.points))

  @property
  def i_ref(self):
    """Return the reference currents (A)."""
    return np.array([op.i_ref for op in self.points], dtype = np.float64)

  @property
  def v_b2(self):
    """Return the body bias voltages (V)."""
    return np.array([np.nan if op.v_b2 is None else op.v_b2 for op in self.points], dtype = np.float64)

  def column(self, name):
    """Return the operating point attribute 'name' along the sweep."""
    return np.array([np.nan if getattr(op, name) is None else getattr(op, name) for op in self.points], dtype = np.float64)

def _sweep(solve, xs, what, threads):
  """Solve all points of a sweep; abort with the offending point on failure."""
  def point(x):
    try:
      return solve(x)
    except (ConvergenceError, ModelDomainError) as err:
      raise type(err)(f"Error, sweep aborted at {what} = {x:g}: {err}") from err
  return tuple(parallel_map(point, xs, threads = threads))

def sweep_temperature(card, v_dd, t_min, t_max, step = TSTEP, opts = None, threads = 1):
  """Sweep the temperature of the current reference of card 'card' from 't_min' to 't_max' (°C, inclusive) by 'step',
     at supply 'v_dd' (V). Return a SweepSeries."""
  if opts is None: opts = CircuitOptions()
  temps = grid(t_min, t_max, step)
  points = _sweep(lambda temp: solve_pcr(card, v_dd, float(temp), opts), temps, "T", threads)
  return SweepSeries(variable = "temperature", x = temps, points = points, fixed = v_dd, opts = opts)

def sweep_supply(card, temp, v_min, v_max, step, opts = None, threads = 1):
  """Sweep the supply of the current reference of card 'card' from 'v_min' to 'v_max' (V, inclusive) by 'step',
     at temperature 'temp' (°C). Return a SweepSeries."""
  if opts is None: opts = CircuitOptions()
  vdds = grid(v_min, v_max, step)
  points = _sweep(lambda v_dd: solve_pcr(card, float(v_dd), temp, opts), vdds, "v_dd", threads)
  return SweepSeries(variable = "supply", x = vdds, points = points, fixed = temp, opts = opts)

################
# Box metrics. #
################

def box_coefficient(x, y, reference = "mean", x_ref = TNORM):
  """Return the box coefficient (max(y)-min(y))/(y_ref*(max(x)-min(x))) of the series y(x).
     y_ref is the mean of y (reference = "mean") or y interpolated at x_ref (reference = "t25")."""
  x = np.asarray(x, dtype = np.float64)
  y = np.asarray(y, dtype = np.float64)
  span = x[-1]-x[0]
  if x.size < 2 or span <= 0.: raise ValueError("Error, degenerate sweep range.")
  if reference == "mean":
    yref = np.mean(y)
  elif reference == "t25":
    if not x[0] <= x_ref <= x[-1]: raise ValueError(f"Error, {x_ref} outside the sweep range.")
    yref = np.interp(x_ref, x, y)
  else:
    raise ValueError(f"Error, unknown reference '{reference}'.")
  return float((np.max(y)-np.min(y))/(yref*span))

def box_tc(s, reference = "mean"):
  """Return the box-method TC (ppm/°C) of the temperature series 's'.
     The current is normalized by its mean (reference = "mean") or by its value at 25 °C (reference = "t25")."""
  if s.variable != "temperature": raise ValueError("Error, box TC requires a temperature series.")
  return 1.e6*box_coefficient(s.x, s.i_ref, reference = reference)

def box_ls(s):
  """Return the box-method LS (%/V) of the supply series 's'."""
  if s.variable != "supply": raise ValueError("Error, box LS requires a supply series.")
  return 100.*box_coefficient(s.x, s.i_ref)

def v_b2_slope(s):
  """Return the least-squares slope dV_B2/dT (V/°C) of the temperature series 's'."""
  if s.variable != "temperature": raise ValueError("Error, V_B2 slope requires a temperature series.")
  return linear_slope(s.x, s.v_b2)

def average_ls(card, temps, v_min, v_max, step, opts = None, threads = 1):
  """Return the box LS (%/V) averaged over the temperatures 'temps', and the list of LS at each temperature."""
  ls = [box_ls(sweep_supply(card, temp, v_min, v_max, step, opts, threads = threads)) for temp in temps]
  return float(np.mean(ls)), ls

################
# Analytic TC. #
################

def analytic_tc_conventional(card, temp):
  """Return the analytic TC (ppm/°C) of the conventional reference at temperature 'temp': -(1/R)dR/dT+1/T."""
  return 1.e6*(-resistor_tcr(card.resistor, temp)+1./kelvin(temp))

def analytic_tc_proposed_terms(card, temp, trim = None):
  """Return the terms (ppm/°C) of the analytic TC of the proposed reference at temperature 'temp':
     {"resistor": -(1/R)dR/dT, "gamma": (1/gamma*)dgamma*/dT, "v_b2": (1/V_B2)dV_B2/dT}, with the closed-form V_B2.
     For the bulk_sqrt body model, gamma* = -Delta V_T/V_B2 is the effective body factor at V_B2."""
  if trim is not None: card = prepare_card(card, CircuitOptions(trim = trim))
  v = v_b2_closed_form(card, temp)
  if v == 0.: raise ModelDomainError("Error, V_B2 = 0: the analytic TC is undefined.")
  dv = v_b2_closed_form_slope(card, temp)
  m2 = card.device("M2")
  if m2.body_model == "bulk_sqrt":
    phi2 = 2.*phi_fp(m2, temp)
    arg = phi2-v
    if arg <= 0.: raise ModelDomainError("Error, V_B2 out of the domain of the bulk body model.")
    g = -delta_vt_body(m2, v, temp)
    dg = m2.gamma_b*(m2.k_phi/math.sqrt(phi2)-(2.*m2.k_phi-dv)/(2.*math.sqrt(arg)))
    dgamma = dg/g-dv/v
  else:
    dgamma = m2.gamma_star_ref*m2.k_gamma/gamma_star(m2, temp)
  return {"resistor": -1.e6*resistor_tcr(card.resistor, temp), "gamma": 1.e6*dgamma, "v_b2": 1.e6*dv/v}

def analytic_tc_proposed(card, temp, trim = None):
  """Return the analytic TC (ppm/°C) of the proposed reference at temperature 'temp':
     -(1/R)dR/dT+(1/gamma*)dgamma*/dT+(1/V_B2)dV_B2/dT."""
  terms = analytic_tc_proposed_terms(card, temp, trim)
  return terms["resistor"]+terms["gamma"]+terms["v_b2"]

################
# Analytic LS. #
################

@dataclass(frozen = True)
class LineSensitivity:
  """Analytic line sensitivity: small-signal i_ref/v_dd (A/V) of the full and simplified forms, and the normalized values."""
  g_full: float
  g_simplified: float
  fractional: float
  percent: float
  percent_simplified: float

def ls_formula(topology, g_m1, g_d2, g_d3, g_mb2 = 0., g_d6 = 0., g_m5 = 1., r = 1., J = 1.):
  """Return the small-signal i_ref/v_dd (A/V), full and simplified forms:
       conventional: (1/J)(g_d3/g_m1)(1/R-g_m1)+g_d2 ~ g_d2;
       proposed: (g_d3/g_m1)(1/R-g_m1)+g_d2+g_mb2(g_d6/g_m5) ~ g_d2+g_mb2(g_d6/g_m5)."""
  if topology == "conventional":
    return (g_d3/g_m1)*(1./r-g_m1)/J+g_d2, g_d2
  body = g_mb2*g_d6/g_m5
  return (g_d3/g_m1)*(1./r-g_m1)+g_d2+body, g_d2+body

def analytic_ls(card, op, opts = None):
  """Return the analytic LineSensitivity of the current reference of card 'card' at operating point 'op'."""
  if opts is None: opts = CircuitOptions(topology = op.topology)
  card = prepare_card(card, opts)
  temp, v_dd = op.temp, op.v_dd
  vdsf = opts.vds_factors
  J, K = (card.mirror_J, card.mirror_K) if op.topology == "conventional" else (1., 1.)
  def ss(role, v_gs, v_bs, v_ds):
    return small_signal(card.device(role), BiasPoint(v_gs = v_gs, v_bs = v_bs, v_ds = v_ds, temp = temp), vds_factors = vdsf)
  v_bs2 = op.v_b2 if op.topology == "proposed" else 0.
  ss1 = ss("M1", op.v_gs1, 0., op.v_ds1)
  ss2 = ss("M2", op.v_gs2, v_bs2, op.v_ds2)
  m3 = card.device("M3")
  b3 = BiasPoint(v_gs = op.v_sg4, v_bs = 0., v_ds = v_dd-op.v_gs1, temp = temp)
  g_d3 = op.i_b1*ss("M3", op.v_sg4, 0., v_dd-op.v_gs1).g_d/mosfet_ids(m3, b3, vds_factors = vdsf)
  g_m1 = ss1.g_m/K
  if op.topology == "proposed":
    g_m5 = ss("M5", op.v_b2, 0., op.v_b2).g_m
    g_d6 = ss("M6", 0., 0., op.v_ds6).g_d
    if use_m7(card, opts):
      g_d7 = ss("M7", 0., 0., v_dd-op.v_b2-op.v_ds6).g_d
      g_d6 = g_d6*g_d7/(g_d6+g_d7) if g_d6+g_d7 > 0. else 0.
    full, simplified = ls_formula("proposed", g_m1, ss2.g_d, g_d3, ss2.g_mb, g_d6, g_m5, op.r)
  else:
    full, simplified = ls_formula("conventional", g_m1, ss2.g_d, g_d3, r = op.r, J = J)
  return LineSensitivity(g_full = full, g_simplified = simplified, fractional = full/op.i_ref, percent = 100.*full/op.i_ref, percent_simplified = 100.*simplified/op.i_ref)

def dc_psrr(ls, i_ref, v_dd):
  """Return the DC PSRR (dB) 20*log10[(i_ref/v_dd)/(I_REF/V_DD)] for the small-signal line sensitivity 'ls' = i_ref/v_dd (A/V),
     the reference current 'i_ref' (A) and the supply 'v_dd' (V)."""
  if ls <= 0. or i_ref <= 0. or v_dd <= 0.: raise ValueError("Error, the DC PSRR requires positive inputs.")
  return 20.*math.log10(ls/(i_ref/v_dd))

#####################
# Figures of merit. #
#####################

@dataclass(frozen = True)
class FomInputs:
  """Figure of merit inputs: TC (ppm/°C), temperature range (°C), area (mm²), supply and reference currents (A).
     area, i_vdd and i_ref may be None when unknown."""
  tc: float
  t_min: float
  t_max: float
  area: float = None
  i_vdd: float = None
  i_ref: float = None

  def __post_init__(self):
    if self.t_max <= self.t_min: raise ValueError("Error, t_max must be > t_min.")
    if self.tc < 0.: raise ValueError("Error, tc must be >= 0.")
    for name in ("area", "i_vdd", "i_ref"):
      value = getattr(self, name)
      if value is not None and value <= 0.: raise ValueError(f"Error, {name} must be > 0.")

def fom1(f):
  """Return FoM1 = TC/(T_max-T_min)*Area (ppm/°C²·mm²)."""
  if f.area is None: raise ValueError("Error, FoM1 requires the area.")
  return f.tc/(f.t_max-f.t_min)*f.area

def fom2(f):
  """Return FoM2 = TC/(T_max-T_min)*I_VDD/I_REF (ppm/°C²)."""
  if f.i_vdd is None or f.i_ref is None: raise ValueError("Error, FoM2 requires the supply and reference currents.")
  return f.tc/(f.t_max-f.t_min)*f.i_vdd/f.i_ref

def simulated_fom(card, v_dd, t_range, area, opts = None, step = TSTEP, threads = 1):
  """Return (FoM1, FoM2, FomInputs) of the simulated current reference of card 'card' with area 'area' (mm²)."""
  if opts is None: opts = CircuitOptions()
  tmin, tmax = t_range
  tc = box_tc(sweep_temperature(card, v_dd, tmin, tmax, step, opts, threads = threads))
  op = solve_pcr(card, v_dd, TNORM, opts)
  f = FomInputs(tc = tc, t_min = tmin, t_max = tmax, area = area, i_vdd = supply_current(card, op, opts), i_ref = op.i_out)
  return fom1(f), fom2(f), f

###################
# 2T sizing maps. #
###################

@dataclass(frozen = True)
class SizeCell:
  """2T sizing map cell: V_B2 slope (µV/°C), box TC (ppm/°C), convergence flag and error message."""
  w5: float
  w6: float
  v_b2_slope: float
  tc: float
  converged: bool
  error: str = ""

def resize_2t(card, w5, w6):
  """Return card 'card' with total widths 'w5' (M5) and 'w6' (M6) (µm). The replica devices are scaled alike, and M7 (M7B)
     follows M6 (M6B) when they are identical."""
  devices = dict(card.devices)
  m5, m6 = card.device("M5"), card.device("M6")
  s5, s6 = w5/(m5.W*m5.mult), w6/(m6.W*m6.mult)
  for role, scale, follower in (("M5", s5, None), ("M6", s6, "M7"), ("M5B", s5, None), ("M6B", s6, "M7B")):
    p = card.device(role)
    devices[role] = dataclasses.replace(p, W = p.W*scale)
    if follower is not None and card.has(follower):
      q = card.device(follower)
      if dataclasses.replace(q, name = p.name) == p: devices[follower] = dataclasses.replace(q, W = q.W*scale)
  return dataclasses.replace(card, devices = devices)

def size_sweep_2t(card, w5_grid, w6_grid, v_dd, t_range, opts = None, step = TSTEP, threads = 1):
  """Sweep the total widths of M5 and M6 over the grids 'w5_grid' x 'w6_grid' (µm).
     For each pair, return the V_B2 slope (µV/°C) and box TC (ppm/°C) over 't_range' at supply 'v_dd'.
     Return the list of SizeCell (w5 major order); failed cells are flagged, not raised. TC trimming is disabled."""
  if len(w5_grid) == 0 or len(w6_grid) == 0: raise ValueError("Error, empty width grid.")
  if opts is None: opts = CircuitOptions()
  opts = opts.replace(trim = None)
  tmin, tmax = t_range
  def cell(pair):
    w5, w6 = pair
    try:
      s = sweep_temperature(resize_2t(card, w5, w6), v_dd, tmin, tmax, step, opts)
      return SizeCell(w5 = w5, w6 = w6, v_b2_slope = 1.e6*v_b2_slope(s), tc = box_tc(s), converged = True)
    except (ConvergenceError, ModelDomainError) as err:
      return SizeCell(w5 = w5, w6 = w6, v_b2_slope = math.nan, tc = math.nan, converged = False, error = str(err))
  pairs = [(float(w5), float(w6)) for w5 in w5_grid for w6 in w6_grid]
  return parallel_map(cell, pairs, threads = threads)

#################
# Corner scans. #
#################

@dataclass(frozen = True)
class CornerCell:
  """Corner scan cell: corner (name or pair), i_ref at 25 °C (A), box TC (ppm/°C), V_B2 slope (V/°C), TC code, error message."""
  corner: object
  i_ref_25: float
  tc: float
  v_b2_slope: float
  tc_code: int = None
  error: str = ""

  @property
  def converged(self):
    return self.error == ""

def corner_cell(card, corner, v_dd, t_range, opts, flavors = None, trimmed = False, step = TSTEP):
  """Return the CornerCell of card 'card' in corner 'corner' (name, or pair for the flavors 'flavors'),
     optionally after TC trimming (full profile)."""
  tmin, tmax = t_range
  ccard = apply_corner(card, corner, flavors)
  try:
    code = None
    copts = opts
    if trimmed:
      base = opts.trim if opts.trim is not None else trim_state(card)
      code, tc = search_tc_trim(ccard, v_dd, t_range, opts.replace(trim = base), step = step)
      copts = opts.replace(trim = TrimState(tc_code = code, iref_code = base.iref_code))
    s = sweep_temperature(ccard, v_dd, tmin, tmax, step, copts)
    slope = v_b2_slope(s) if opts.topology == "proposed" else math.nan
    return CornerCell(corner = corner, i_ref_25 = solve_pcr(ccard, v_dd, TNORM, copts).i_ref, tc = box_tc(s), v_b2_slope = slope, tc_code = code)
  except (ConvergenceError, ModelDomainError) as err:
    return CornerCell(corner = corner, i_ref_25 = math.nan, tc = math.nan, v_b2_slope = math.nan, error = str(err))

def corner_scan(card, v_dd, t_range, opts = None, trimmed = False, step = TSTEP, threads = 1):
  """Return the list of CornerCell of the named corners TT, FF, SS, FS, SF (declared by the card) applied to all flavors."""
  if opts is None: opts = CircuitOptions()
  corners = [name for name in CORNERS if name in card.corners]
  return parallel_map(lambda name: corner_cell(card, name, v_dd, t_range, opts, trimmed = trimmed, step = step), corners, threads = threads)
