# This program is free software: you can redistribute it and/or modify it under the terms of the GNU General Public License as published by the Free Software Foundation, either version 3 of the License, or (at your option) any later version.
# This program is distributed in the hope that it will be useful, but WITHOUT ANY WARRANTY; without even the implied warranty of MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE. See the GNU General Public License for more details.
# You should have received a copy of the GNU General Public License along with this program. If not, see <https://www.gnu.org/licenses/>.
# Version: 1.0.0 / 2026.10.19

"""Variability.

   Monte-Carlo engine (local mismatch and global process variations), analytic variance of I_REF, and skewed corner scans.

   Random numbers: each trial draws from independent streams numpy.random.default_rng(SeedSequence([seed, trial, kind])),
   so that the results only depend on the seed and trial index, not on the evaluation order or number of threads."""

import math
import dataclasses
from dataclasses import dataclass, field
import numpy as np
from .defs import TSTEP, TNORM, CORNERS, CardError, ConvergenceError, ModelDomainError
from .utils import message, nearest_rank, parallel_map
from .devmodel import thermal_voltage, body_slope, resistor_value
from .circuits import CircuitOptions, solve_pcr, prepare_card
from .analysis import sweep_temperature, box_tc, corner_cell
from .trimming import TrimState, trim_state, search_tc_trim, search_iref_trim

# Devices with local V_T0 mismatch. M3-M4 are accounted for by the mirror ratio error, M7 and M7B carry no mismatch.

MISMATCH_ROLES = ("M1", "M2", "M5", "M6", "M5B", "M6B")

# Random stream kinds.

MISMATCH = 0
PROCESS = 1

##################
# Mismatch spec. #
##################

@dataclass(frozen = True)
class MismatchSpec:
  """Mismatch specification: Pelgrom coefficients a_vt per flavor (V.µm, linear coefficient), relative sigma of the
     M3-M4 mirror ratio, and seed (64-bit integer)."""
  a_vt: dict = field(default_factory = dict)
  sigma_mirror: float = 0.
  seed: int = 0

  def __post_init__(self):
    if any(avt < 0. for avt in self.a_vt.values()): raise ValueError("Error, a_vt must be >= 0.")
    if self.sigma_mirror < 0.: raise ValueError("Error, sigma_mirror must be >= 0.")
    if not 0 <= self.seed < 2**64: raise ValueError("Error, the seed must be a 64-bit unsigned integer.")

  @classmethod
  def from_card(cls, card, seed = 0, scale = 1., mirror_scale = 1.):
    """Return the mismatch specification of card 'card', with the a_vt's scaled by 'scale' and sigma_mirror by 'mirror_scale'."""
    return cls(a_vt = {flavor: scale*avt for flavor, avt in card.mismatch.a_vt.items()}, sigma_mirror = mirror_scale*card.mismatch.sigma_mirror, seed = seed)

  def sigma_vt(self, p):
    """Return the sigma (V) of the V_T0 of MOSFET 'p': a_vt/sqrt(W*L*mult)."""
    return self.a_vt.get(p.flavor, 0.)/math.sqrt(p.area())

def _rng(seed, trial, kind):
  """Return the random generator of trial 'trial' and stream 'kind'."""
  return np.random.default_rng(np.random.SeedSequence([seed, trial, kind]))

def sample_mismatch(spec, card, trial_index):
  """Return card 'card' perturbed by the local mismatch of trial 'trial_index':
     independent normal V_T0 offsets (sigma = a_vt/sqrt(W*L*mult)) on M1, M2, M5, M6, M5B, M6B and a normal
     mirror ratio error (sigma = sigma_mirror)."""
  if trial_index < 0: raise ValueError("Error, the trial index must be >= 0.")
  roles = [role for role in MISMATCH_ROLES if card.has(role)]
  sigmas = [spec.sigma_vt(card.device(role)) for role in roles]
  if spec.sigma_mirror == 0. and not any(sigmas): return card
  z = _rng(spec.seed, trial_index, MISMATCH).standard_normal(len(MISMATCH_ROLES)+1)
  devices = dict(card.devices)
  for role, sigma, zi in zip(roles, sigmas, z):
    p = card.device(role)
    devices[role] = dataclasses.replace(p, vt0_ref = p.vt0_ref+sigma*zi)
  return dataclasses.replace(card, devices = devices, mirror_delta = card.mirror_delta+spec.sigma_mirror*z[-1])

def sample_process(card, seed, trial_index):
  """Return card 'card' perturbed by the global process variations of trial 'trial_index':
     per flavor normal V_T0 shift (sigma_dvt0) and log-normal isq factor (sigma_ln_isq), log-normal resistor factor (sigma_ln_r)."""
  proc = card.process
  flavors = card.flavors()
  rng = _rng(seed, trial_index, PROCESS)
  z = rng.standard_normal(2*len(flavors)+1)
  shifts = {flavor: (proc.sigma_dvt0*z[2*i], math.exp(proc.sigma_ln_isq*z[2*i+1])) for i, flavor in enumerate(flavors)}
  devices = {}
  for role, p in card.devices.items():
    dvt0, mult = shifts[p.flavor]
    devices[role] = dataclasses.replace(p, vt0_ref = p.vt0_ref+dvt0, isq_ref = p.isq_ref*mult)
  rmult = math.exp(proc.sigma_ln_r*z[-1])
  resistor = dataclasses.replace(card.resistor, r_ref = card.resistor.r_ref*rmult)
  trim = card.trim
  if trim is not None and trim.iref_style == "series_resistor":
    trim = dataclasses.replace(trim, r_unit = trim.r_unit*rmult, r_fixed = trim.r_fixed*rmult)
  return dataclasses.replace(card, devices = devices, resistor = resistor, trim = trim)

def sample_card(card, spec, trial_index, mode):
  """Return the card of Monte-Carlo trial 'trial_index' in mode 'mode' ("mismatch", "process" or "both")."""
  if mode not in ("mismatch", "process", "both"): raise ValueError(f"Error, unknown Monte-Carlo mode '{mode}'.")
  if mode in ("process", "both"): card = sample_process(card, spec.seed, trial_index)
  if mode in ("mismatch", "both"): card = sample_mismatch(spec, card, trial_index)
  return card

################
# Monte-Carlo. #
################

@dataclass(frozen = True)
class McResult:
  """Monte-Carlo result: number of trials n and of failed trials, mean, sigma and sigma/mean of i_ref at 25 °C,
     median and 99th percentile (nearest rank) of the per-trial box TC (metric "box_tc"), and optionally the per-trial
     values (NaN for failed trials) and TC codes."""
  n: int
  failed: int
  mean: float
  sigma: float
  sigma_over_mu: float
  median_tc: float = math.nan
  p99_tc: float = math.nan
  i_ref: np.ndarray = None
  tc: np.ndarray = None
  tc_codes: np.ndarray = None

def mc_run(card, v_dd, t_range, spec, n, mode = "mismatch", metric = "iref_at_25C", opts = None, trim = "none", iref_target = None,
           step = TSTEP, threads = 1, retain = False):
  """Run 'n' Monte-Carlo trials of the current reference of card 'card' at supply 'v_dd' and return a McResult.
     mode: "mismatch" (sample_mismatch), "process" (sample_process) or "both".
     metric: "iref_at_25C" (i_ref at 25 °C) or "box_tc" (i_ref at 25 °C and box TC over 't_range').
     trim: "none", "tc" (per-trial full-profile TC trimming) or "tc_iref" (then I_REF trimming to 'iref_target',
     default the nominal output current at 25 °C).
     Trials failing to converge are counted; the run aborts if more than 1% of the trials fail."""
  if n < 2: raise ValueError("Error, n >= 2 required.")
  if metric not in ("iref_at_25C", "box_tc"): raise ValueError(f"Error, unknown Monte-Carlo metric '{metric}'.")
  if trim not in ("none", "tc", "tc_iref"): raise ValueError(f"Error, unknown Monte-Carlo trimming '{trim}'.")
  if opts is None: opts = CircuitOptions()
  tmin, tmax = t_range
  if trim != "none":
    base = opts.trim if opts.trim is not None else trim_state(card)
    if trim == "tc_iref" and iref_target is None: iref_target = solve_pcr(card, v_dd, TNORM, opts.replace(trim = base)).i_out
  def trial(index):
    try:
      tcard = sample_card(card, spec, index, mode)
      topts = opts
      code = -1
      if trim != "none":
        code, tc = search_tc_trim(tcard, v_dd, t_range, opts.replace(trim = base), step = step)
        state = TrimState(tc_code = code, iref_code = base.iref_code)
        if trim == "tc_iref":
          iref_code, achieved = search_iref_trim(tcard, v_dd, TNORM, iref_target, opts.replace(trim = state))
          state = TrimState(tc_code = code, iref_code = iref_code)
        topts = opts.replace(trim = state)
      i25 = solve_pcr(tcard, v_dd, TNORM, topts).i_out
      tc = box_tc(sweep_temperature(tcard, v_dd, tmin, tmax, step, topts)) if metric == "box_tc" else math.nan
      return i25, tc, code
    except (ConvergenceError, ModelDomainError, ValueError):
      return math.nan, math.nan, -1
  message(f"Monte-Carlo: {n} trials ({mode}, {metric})...")
  results = parallel_map(trial, list(range(n)), threads = threads)
  irefs = np.array([r[0] for r in results], dtype = np.float64)
  tcs = np.array([r[1] for r in results], dtype = np.float64)
  codes = np.array([r[2] for r in results], dtype = np.int64)
  ok = np.isfinite(irefs)
  if metric == "box_tc": ok &= np.isfinite(tcs)
  failed = int(n-np.count_nonzero(ok))
  message(f"Monte-Carlo: {n} trials, {failed} failed.")
  if failed > 0.01*n: raise ConvergenceError(f"Error, {failed} of {n} Monte-Carlo trials failed to converge.")
  valid = irefs[ok]
  if valid.size < 2: raise ConvergenceError("Error, less than two successful Monte-Carlo trials.")
  mean = float(np.mean(valid))
  sigma = float(np.std(valid, ddof = 1))
  median_tc = p99_tc = math.nan
  if metric == "box_tc":
    median_tc = nearest_rank(tcs[ok], 50.)
    p99_tc = nearest_rank(tcs[ok], 99.)
  return McResult(n = n, failed = failed, mean = mean, sigma = sigma, sigma_over_mu = sigma/mean, median_tc = median_tc, p99_tc = p99_tc,
                  i_ref = irefs if retain else None, tc = tcs if retain and metric == "box_tc" else None,
                  tc_codes = codes if retain and trim != "none" else None)

######################
# Analytic variance. #
######################

def lognormal_log_variance(s):
  """Return the variance of ln(1+dI/I) for a relative mirror error of sigma 's' as [exp(s²)-1]*exp(2+s²) (log-normal expression)."""
  return math.expm1(s*s)*math.exp(2.+s*s)

def delta_log_variance(s):
  """Return the variance of ln(1+dI/I) for a relative mirror error of sigma 's' to first order (delta method): s²."""
  return s*s

@dataclass(frozen = True)
class VarianceBreakdown:
  """Analytic variance of I_REF: mean current i_ref (A), terms (A²) {"vt_pair", "v_b2", "mirror"} with the mirror term
     computed by the delta method (terms_delta) and by the log-normal expression (terms_lognormal), and the resulting
     sigmas (A) and sigma/mean."""
  i_ref: float
  terms_delta: dict
  terms_lognormal: dict
  sigma_delta: float
  sigma_lognormal: float
  sigma_over_mu_delta: float
  sigma_over_mu_lognormal: float

def analytic_sigma_iref(card, spec, temp, v_dd = None, opts = None):
  """Return the analytic VarianceBreakdown of I_REF at temperature 'temp' and supply 'v_dd' (default: card nominal supply):
       sigma²(I_REF) = sigma²(dV_T0,1-2)/R²+(gamma*/R)²sigma²(V_B2)+(nU_T/R)²sigma²(ln(1+dI/I)),
     with sigma²(dV_T0,1-2) = a_vt²/(W1L1) + a_vt²/(W2L2) and sigma²(V_B2) = a_vt²/(W5L5)+(n5/n6)²a_vt²/(W6L6)."""
  if opts is None: opts = CircuitOptions()
  if v_dd is None: v_dd = card.v_dd_nominal
  op = solve_pcr(card, v_dd, temp, opts)
  tcard = prepare_card(card, opts)
  r = resistor_value(tcard.resistor, temp)
  m1, m2 = tcard.device("M1"), tcard.device("M2")
  J = tcard.mirror_J if opts.topology == "conventional" else 1.
  vt_pair = (spec.sigma_vt(m1)**2+spec.sigma_vt(m2)**2)/r**2
  if opts.topology == "proposed":
    m5, m6 = tcard.device("M5"), tcard.device("M6")
    var_vb2 = spec.sigma_vt(m5)**2+(m5.n/m6.n)**2*spec.sigma_vt(m6)**2
    v_b2 = (body_slope(m2, op.v_b2, temp)/r)**2*var_vb2
  else:
    v_b2 = 0.
  scale = (m1.n*thermal_voltage(temp)/(J*r))**2
  terms_delta = {"vt_pair": vt_pair, "v_b2": v_b2, "mirror": scale*delta_log_variance(spec.sigma_mirror)}
  terms_lognormal = {"vt_pair": vt_pair, "v_b2": v_b2, "mirror": scale*lognormal_log_variance(spec.sigma_mirror)}
  sigma_delta = math.sqrt(terms_delta["vt_pair"]+terms_delta["v_b2"]+terms_delta["mirror"])
  sigma_lognormal = math.sqrt(terms_lognormal["vt_pair"]+terms_lognormal["v_b2"]+terms_lognormal["mirror"])
  return VarianceBreakdown(i_ref = op.i_ref, terms_delta = terms_delta, terms_lognormal = terms_lognormal, sigma_delta = sigma_delta,
                           sigma_lognormal = sigma_lognormal, sigma_over_mu_delta = sigma_delta/op.i_ref, sigma_over_mu_lognormal = sigma_lognormal/op.i_ref)

########################
# Skewed corner scans. #
########################

@dataclass(frozen = True)
class SkewedCell:
  """Skewed corner scan cell: corners of the two flavors, i_ref at 25 °C (A), box TC (ppm/°C), V_B2 slope change
     relative to (TT, TT) (V/°C), TC code (trimmed scans) and error message."""
  corner_a: str
  corner_b: str
  i_ref_25: float
  tc: float
  v_b2_slope_delta: float
  tc_code: int = None
  error: str = ""

  @property
  def converged(self):
    return self.error == ""

def skewed_corner_scan(card, flavors, v_dd, t_range, opts = None, trimmed = False, step = TSTEP, threads = 1):
  """Scan the 5x5 skewed corners (cornerA, cornerB) in {TT, FF, SS, FS, SF}² applied to the device flavors 'flavors' = (flavorA, flavorB).
     Optionally trim the TC of each cell (full profile). Return the list of SkewedCell (cornerA major order)."""
  if opts is None: opts = CircuitOptions()
  if len(flavors) != 2: raise ValueError("Error, a skewed corner scan requires two flavors.")
  for flavor in flavors:
    if flavor not in card.flavors(): raise CardError(f"Error, no device of flavor {flavor} in card {card.name}.")
  pairs = [(ca, cb) for ca in CORNERS for cb in CORNERS]
  message(f"Scanning {len(pairs)} skewed corners ({flavors[0]}, {flavors[1]})...")
  cells = parallel_map(lambda pair: corner_cell(card, pair, v_dd, t_range, opts, flavors = flavors, trimmed = trimmed, step = step), pairs, threads = threads)
  reference = cells[pairs.index(("TT", "TT"))].v_b2_slope
  return [SkewedCell(corner_a = pair[0], corner_b = pair[1], i_ref_25 = cell.i_ref_25, tc = cell.tc, v_b2_slope_delta = cell.v_b2_slope-reference,
                     tc_code = cell.tc_code, error = cell.error) for pair, cell in zip(pairs, cells)]
