# This program is free software: you can redistribute it and/or modify it under the terms of the GNU General Public License as published by the Free Software Foundation, either version 3 of the License, or (at your option) any later version.
# This program is distributed in the hope that it will be useful, but WITHOUT ANY WARRANTY; without even the implied warranty of MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE. See the GNU General Public License for more details.
# You should have received a copy of the GNU General Public License along with this program. If not, see <https://www.gnu.org/licenses/>.
# Version: 1.0.0 / 2026.10.19

"""DC operating points of the current references.

   The 2T body bias generator:
     - M6 (zero V_GS, optionally stacked under the zero-V_GS device M7) sits between V_DD and the V_B2 node,
     - M5 (diode-connected) sits between the V_B2 node and the ground,
     - the parasitic p-well/deep n-well junction injects I_DIO = I(V_DNW-V_B2) into the V_B2 node, where V_DNW is
       either V_DD or the output of a diode-free replica generator (M5B, M6B, M7B).
   The node equation I_DS5 = I_DS6+I_DIO is solved for V_B2 by a scalar Newton method with a bisection fallback.

   The peaking current reference (conventional PTAT or proposed CWT):
     - the pMOS mirror M4 (diode-connected, M2 branch) -> M3 (M1 branch) delivers I_B1 = J*m*(1+delta)*I, where I
       is the M2 branch current, m = sat(M3)/sat(M4) accounts for the finite output conductance of the mirror and
       delta is a mirror ratio error (Monte-Carlo),
     - I_B1 flows through the resistor R into the drain of M1, whose gate sits at the top of R (V_GS1) and whose drain
       drives the gate of M2: V_DS1 = V_GS2 = V_GS1-R*I_B1,
     - M1 is K times narrower than M2 (evaluated at K*I_B1); the drain of M2 sits at V_DD-V_SG4,
     - in the proposed topology, J = K = 1 and the body of M2 is biased at V_B2 (forward body bias).
   The loop equation f(I) = V_GS1-R*I_B1-V_GS2 = 0 is solved for I by a scalar Newton method started from the
   closed-form estimate, with a bisection fallback on [I_est/100, 100*I_est] (the I = 0 root is never bracketed).
   The reference current is I_REF = I_B1/J."""

import math
import dataclasses
from dataclasses import dataclass, field
from scipy import optimize
from .defs import NEWTON_TOL_I, NEWTON_TOL_V, MAX_ITER, BRACKET, SATURATION, CardError, ModelDomainError, ConvergenceError, HeadroomError
from .devmodel import BiasPoint, thermal_voltage, vt0, isq, mosfet_ids, mosfet_vgs, small_signal, vds_factor, resistor_value, junction_current, junction_conductance
from .trimming import apply_trim, trim_state, iout_trim_mirror
from .utils import kelvin

# Topologies.

TOPOLOGIES = ("conventional", "proposed")

# Inner fixed-point iterations (drain factors).

INNER_ITER = 50
INNER_TOL = 1.e-13

############
# Options. #
############

@dataclass(frozen = True)
class SolverOptions:
  """Scalar solver options: tolerances on currents (A) and voltages (V), maximum number of Newton iterations,
     bisection fallback, and method ("newton" or "bisection")."""
  newton_tol_i: float = NEWTON_TOL_I
  newton_tol_v: float = NEWTON_TOL_V
  max_iter: int = MAX_ITER
  fallback_bisection: bool = True
  method: str = "newton"

  def __post_init__(self):
    if self.newton_tol_i <= 0. or self.newton_tol_v <= 0.: raise ValueError("Error, solver tolerances must be > 0.")
    if self.max_iter < 8: raise ValueError("Error, max_iter must be >= 8.")
    if self.method not in ("newton", "bisection"): raise ValueError(f"Error, unknown solver method '{self.method}'.")

  @classmethod
  def from_settings(cls, settings):
    """Return solver options from the run settings dictionnary 'settings'."""
    return cls(newton_tol_i = settings["newton_tol_i"], newton_tol_v = settings["newton_tol_v"], max_iter = settings["max_iter"], fallback_bisection = settings["fallback_bisection"])

@dataclass(frozen = True)
class CircuitOptions:
  """Circuit options.
     include_m7 = None uses M7 (and M7B) if the card declares it. trim = None uses the card as is.
     vds_factors = False evaluates all devices with the ideal saturated subthreshold law."""
  topology: str = "proposed"
  include_diode: bool = True
  include_replica: bool = True
  include_m7: bool = None
  trim: object = None
  vds_factors: bool = True
  solver: SolverOptions = field(default_factory = SolverOptions)

  def __post_init__(self):
    if self.topology not in TOPOLOGIES: raise ValueError(f"Error, unknown topology '{self.topology}'.")

  def replace(self, **changes):
    """Return a copy of the options with fields 'changes' replaced."""
    return dataclasses.replace(self, **changes)

#####################
# Operating points. #
#####################

@dataclass(frozen = True)
class GeneratorPoint:
  """Operating point of the 2T body bias generator."""
  v_b2: float
  v_dnw: float
  i_dio: float
  i_5: float
  i_6: float
  v_ds6: float
  i_replica: float
  iterations: int
  saturated: dict

@dataclass(frozen = True)
class OperatingPoint:
  """Operating point of a current reference.
     v_b2, v_dnw and v_ds6 are None for the conventional topology."""
  topology: str
  v_dd: float
  temp: float
  i_ref: float
  i_m2: float
  i_b1: float
  i_out: float
  r: float
  v_b2: float
  v_dnw: float
  v_gs1: float
  v_gs2: float
  v_sg4: float
  v_ds1: float
  v_ds2: float
  v_ds4: float
  v_ds6: float
  i_dio: float
  i_2t: float
  i_replica: float
  saturated: dict
  converged: bool
  iterations: int

  def all_saturated(self):
    """Return True if all devices are saturated."""
    return all(self.saturated.values())

###################
# Scalar solvers. #
###################

def solve_scalar(residual, x0, lo, hi, xtol, ftol, solver, what = "operating point"):
  """Solve residual(x) = 0 for x in ]lo, hi[.
     residual(x) returns (f(x), df/dx). Newton iterations start from x0 and are damped to stay inside ]lo, hi[.
     Convergence requires both |f| <= ftol and |dx| <= xtol. Falls back to bisection on [lo, hi] if Newton fails
     and solver.fallback_bisection is True. Return (x, number of iterations). Raise ConvergenceError on failure."""
  x = min(max(x0, lo), hi)
  if solver.method == "newton":
    if x <= lo or x >= hi: x = (lo+hi)/2.
    for iteration in range(1, solver.max_iter+1):
      f, df = residual(x)
      if not (math.isfinite(f) and math.isfinite(df)) or df == 0.: break
      dx = f/df
      xnew = x-dx
      if xnew <= lo:
        xnew = (x+lo)/2.
      elif xnew >= hi:
        xnew = (x+hi)/2.
      if abs(f) <= ftol and abs(xnew-x) <= xtol: return xnew, iteration
      x = xnew
    if not solver.fallback_bisection: raise ConvergenceError(f"Error, Newton iterations failed to converge for the {what}.")
  try:
    x, r = optimize.bisect(lambda x: residual(x)[0], lo, hi, xtol = xtol, maxiter = max(solver.max_iter, 200), full_output = True, disp = False)
  except ValueError:
    raise ConvergenceError(f"Error, no sign change of the residual on the bracket [{lo:.6e}, {hi:.6e}] for the {what}.") from None
  if not r.converged: raise ConvergenceError(f"Error, bisection failed to converge for the {what}.")
  return x, r.iterations

############
# Helpers. #
############

def prepare_card(card, opts):
  """Return card 'card' with the trimming state of options 'opts' applied."""
  if opts.trim is None: return card
  return apply_trim(card, opts.trim)

def use_m7(card, opts):
  """Return True if the stacked device M7 is used for card 'card' and options 'opts'."""
  if opts.include_m7 is None: return card.has("M7")
  if opts.include_m7 and not card.has("M7"): raise CardError("Error, the card does not declare device M7.")
  return bool(opts.include_m7)

def _check_temperature(card, temp):
  """Check that temperature 'temp' is within the validity range of card 'card'."""
  tmin, tmax = card.t_range
  if not tmin <= temp <= tmax: raise ModelDomainError(f"Error, temperature {temp} °C out of the card validity range [{tmin}, {tmax}] °C.")

def _same_device(p, q):
  """Return True if MOSFETs 'p' and 'q' have identical parameters (but names)."""
  return dataclasses.replace(q, name = p.name) == p

def _factor(p, v_ds, temp, vds_factors):
  """Return the drain factor of MOSFET 'p' (1 if vds_factors is False). v_ds is floored at U_T."""
  if not vds_factors: return 1.
  return vds_factor(p, max(v_ds, thermal_voltage(temp)), temp)

def _ids(p, v_gs, v_bs, v_ds, temp, vds_factors):
  """Return the drain current of MOSFET 'p'."""
  return mosfet_ids(p, BiasPoint(v_gs = v_gs, v_bs = v_bs, v_ds = v_ds, temp = temp), vds_factors = vds_factors)

def _gd(p, v_gs, v_bs, v_ds, temp, vds_factors):
  """Return the output conductance of MOSFET 'p'."""
  if not vds_factors: return 0.
  return small_signal(p, BiasPoint(v_gs = v_gs, v_bs = v_bs, v_ds = v_ds, temp = temp), strict = False).g_d

def diode_vsg(p, i, temp, vds_factors = True):
  """Return the V_SG of the diode-connected pMOS 'p' carrying current 'i'."""
  v = mosfet_vgs(p, i, 0., temp)
  if not vds_factors: return v
  for iteration in range(INNER_ITER):
    vnew = mosfet_vgs(p, i/_factor(p, v, temp, True), 0., temp)
    if abs(vnew-v) <= INNER_TOL: return vnew
    v = vnew
  return v

###########################
# 2T body bias generator. #
###########################

def _generator_closed_form(m5, m6, temp):
  """Return the closed-form output voltage of the 2T generator made of M5 'm5' and M6 'm6'."""
  ratio = isq(m6, temp)*m6.size()/(isq(m5, temp)*m5.size())
  return vt0(m5, temp)-(m5.n/m6.n)*vt0(m6, temp)+m5.n*thermal_voltage(temp)*math.log(ratio)

def v_b2_closed_form(card, temp, trim = None):
  """Return the closed-form V_B2 (V) of the 2T generator of card 'card' at temperature 'temp' (°C).
     The effective width of M5 is set by TrimState 'trim' if not None."""
  if trim is not None: card = apply_trim(card, trim)
  return _generator_closed_form(card.device("M5"), card.device("M6"), temp)

def v_b2_closed_form_slope(card, temp, trim = None):
  """Return the analytic temperature derivative dV_B2/dT (V/°C) of the closed-form V_B2."""
  if trim is not None: card = apply_trim(card, trim)
  m5, m6 = card.device("M5"), card.device("M6")
  tk = kelvin(temp)
  ratio = isq(m6, temp)*m6.size()/(isq(m5, temp)*m5.size())
  dlnratio = ((2.-m6.m_mu)-(2.-m5.m_mu))/tk
  ut = thermal_voltage(temp)
  return m5.k_vt-(m5.n/m6.n)*m6.k_vt+m5.n*(ut/tk)*math.log(ratio)+m5.n*ut*dlnratio

def _top_stack(m6, m7, v_node, v_top, temp, vds_factors):
  """Return the current, V_DS6 and output conductance of the zero-V_GS stack M6 (+ M7) between v_node and v_top."""
  span = v_top-v_node
  if m7 is None:
    v_ds6 = span
  elif not vds_factors or _same_device(m6, m7) or span <= 0.:
    v_ds6 = span/2.
  else:
    g = lambda x: _ids(m6, 0., 0., x-v_node, temp, True)-_ids(m7, 0., 0., v_top-x, temp, True)
    v_ds6 = optimize.brentq(g, v_node, v_top, xtol = 1.e-12)-v_node
  i6 = _ids(m6, 0., 0., v_ds6, temp, vds_factors)
  g6 = _gd(m6, 0., 0., v_ds6, temp, vds_factors)
  if m7 is None: return i6, v_ds6, g6
  g7 = _gd(m7, 0., 0., span-v_ds6, temp, vds_factors)
  gs = g6*g7/(g6+g7) if g6+g7 > 0. else 0.
  return i6, v_ds6, gs

def _solve_generator(m5, m6, m7, v_top, diode, v_dnw, temp, opts):
  """Solve the node equation of a 2T generator. Return (V, I5, I6, V_DS6, I_DIO, iterations)."""
  vds_factors = opts.vds_factors
  def residual(v):
    i5 = _ids(m5, v, 0., v, temp, vds_factors)
    g5 = i5/(m5.n*thermal_voltage(temp))+_gd(m5, v, 0., v, temp, vds_factors)
    i6, v_ds6, g6 = _top_stack(m6, m7, v, v_top, temp, vds_factors)
    if diode is None:
      idio = gj = 0.
    else:
      idio = junction_current(diode, v_dnw-v, temp)
      gj = junction_conductance(diode, v_dnw-v, temp)
    return i5-i6-idio, g5+g6+gj
  v0 = _generator_closed_form(m5, m6, temp)
  hi = v_top if vds_factors else max(v_top, 2.*abs(v0)+1.)
  if hi <= 0.: raise HeadroomError(f"Error, no operating point of the 2T generator at v_dd = {v_top:g} V.")
  if not 0. < v0 < hi: v0 = hi/2.
  v, iterations = solve_scalar(residual, v0, 0., hi, opts.solver.newton_tol_v, opts.solver.newton_tol_i, opts.solver, what = f"2T generator at T = {temp:g} °C")
  i5 = _ids(m5, v, 0., v, temp, vds_factors)
  i6, v_ds6, g6 = _top_stack(m6, m7, v, v_top, temp, vds_factors)
  idio = junction_current(diode, v_dnw-v, temp) if diode is not None else 0.
  return v, i5, i6, v_ds6, idio, iterations

def _check_2t_headroom(v, v_dd, stacked, temp, what):
  """Check that the zero-V_GS stack of a 2T generator with output 'v' keeps its devices saturated at supply 'v_dd'."""
  room = SATURATION*thermal_voltage(temp)*(2. if stacked else 1.)
  if v_dd-v <= room:
    raise HeadroomError(f"Error, no headroom for the {what} at v_dd = {v_dd:g} V, T = {temp:g} °C (output {v:.4f} V, M6{'/M7' if stacked else ''} need {room:.4f} V).")

def solve_2t(card, v_dd, temp, opts = None):
  """Solve the 2T body bias generator of card 'card' at supply 'v_dd' (V) and temperature 'temp' (°C).
     The replica (if included) is solved first, without diode load, and biases the deep n-well.
     Return a GeneratorPoint. Raise HeadroomError if the supply leaves no room to saturate M6 (and M7)."""
  if opts is None: opts = CircuitOptions()
  _check_temperature(card, temp)
  card = prepare_card(card, opts)
  m7 = use_m7(card, opts)
  iterations = 0
  i_replica = 0.
  if opts.include_replica:
    m7b = card.device("M7B") if m7 and card.has("M7B") else None
    v_dnw, i5b, i_replica, v_ds6b, _, it = _solve_generator(card.device("M5B"), card.device("M6B"), m7b, v_dd, None, 0., temp, opts)
    _check_2t_headroom(v_dnw, v_dd, m7b is not None, temp, "2T replica")
    iterations += it
  else:
    v_dnw = v_dd
  diode = card.diode_pw_dnw if opts.include_diode else None
  v_b2, i5, i6, v_ds6, i_dio, it = _solve_generator(card.device("M5"), card.device("M6"), card.device("M7") if m7 else None, v_dd, diode, v_dnw, temp, opts)
  _check_2t_headroom(v_b2, v_dd, m7, temp, "2T generator")
  iterations += it
  ut = thermal_voltage(temp)
  saturated = {"M5": v_b2 > SATURATION*ut, "M6": v_ds6 > SATURATION*ut}
  if m7: saturated["M7"] = v_dd-v_b2-v_ds6 > SATURATION*ut
  return GeneratorPoint(v_b2 = v_b2, v_dnw = v_dnw if opts.include_replica else None, i_dio = i_dio, i_5 = i5, i_6 = i6, v_ds6 = v_ds6,
                        i_replica = i_replica, iterations = iterations, saturated = saturated)

######################
# Current reference. #
######################

@dataclass
class _Loop:
  """Loop state of the current reference at a given M2 branch current."""
  v_sg4: float
  v_gs1: float
  v_gs2: float
  v_ds1: float
  v_ds2: float
  i_b1: float
  m: float

def _mirror_ratios(card, topology):
  """Return the mirror ratios (J, K) of the current reference."""
  if topology == "proposed": return 1., 1.
  return card.mirror_J, card.mirror_K

def _loop(devices, r, J, K, delta, v_bs2, v_dd, temp, vds_factors, i):
  """Return the loop state for M2 branch current 'i'."""
  m1, m2, m3, m4 = devices
  ut = thermal_voltage(temp)
  v_sg4 = diode_vsg(m4, i, temp, vds_factors)
  v_ds2 = v_dd-v_sg4
  f4 = _factor(m4, v_sg4, temp, vds_factors)
  v_gs1 = mosfet_vgs(m1, K*J*(1.+delta)*i, 0., temp)
  for iteration in range(INNER_ITER):
    m = _factor(m3, v_dd-v_gs1, temp, vds_factors)/f4
    i_b1 = J*m*(1.+delta)*i
    v_ds1 = v_gs1-r*i_b1
    vnew = mosfet_vgs(m1, K*i_b1/_factor(m1, v_ds1, temp, vds_factors), 0., temp)
    converged = abs(vnew-v_gs1) <= INNER_TOL
    v_gs1 = vnew
    if converged: break
  m = _factor(m3, v_dd-v_gs1, temp, vds_factors)/f4
  i_b1 = J*m*(1.+delta)*i
  v_ds1 = v_gs1-r*i_b1
  v_gs2 = mosfet_vgs(m2, i/_factor(m2, v_ds2, temp, vds_factors), v_bs2, temp)
  return _Loop(v_sg4 = v_sg4, v_gs1 = v_gs1, v_gs2 = v_gs2, v_ds1 = v_ds1, v_ds2 = v_ds2, i_b1 = i_b1, m = m)

def closed_form_iref(card, temp, topology = "proposed", v_b2 = 0., trim = None):
  """Return the closed-form reference current (A) of the current reference of card 'card' at temperature 'temp':
       conventional: n*U_T*ln(J*K)/(J*R) for matched M1, M2;
       proposed: (V_T1-V_T2(V_BS2 = v_b2))/R for matched M1, M2.
     Mismatched M1, M2 are accounted for through their ideal gate-source voltages."""
  if trim is not None: card = apply_trim(card, trim)
  J, K = _mirror_ratios(card, topology)
  r = resistor_value(card.resistor, temp)
  v_bs2 = v_b2 if topology == "proposed" else 0.
  iref = 1.e-9
  for iteration in range(INNER_ITER): # Exact in one pass for matched slope factors.
    dv = mosfet_vgs(card.device("M1"), K*J*iref, 0., temp)-mosfet_vgs(card.device("M2"), iref, v_bs2, temp)
    inew = dv/(J*r)
    if inew <= 0.: return inew
    if abs(inew-iref) <= 1.e-6*iref: return inew
    iref = inew
  return iref

def solve_pcr(card, v_dd, temp, opts = None):
  """Solve the current reference of card 'card' at supply 'v_dd' (V) and temperature 'temp' (°C).
     Return an OperatingPoint. Raise ConvergenceError if the solver fails, HeadroomError if there is no
     physical operating point at this supply."""
  if opts is None: opts = CircuitOptions()
  _check_temperature(card, temp)
  card = prepare_card(card, opts)
  topology = opts.topology
  J, K = _mirror_ratios(card, topology)
  if topology == "conventional" and J*K <= 1.: raise CardError("Error, the conventional topology requires mirror_J*mirror_K > 1.")
  if topology == "proposed":
    gen = solve_2t(card, v_dd, temp, opts)
    v_bs2 = gen.v_b2
  else:
    gen = None
    v_bs2 = 0.
  devices = (card.device("M1"), card.device("M2"), card.device("M3"), card.device("M4"))
  r = resistor_value(card.resistor, temp)
  delta = card.mirror_delta
  ut = thermal_voltage(temp)
  est = closed_form_iref(card, temp, topology, v_bs2)/(1.+delta)
  if est <= 0.: raise ConvergenceError(f"Error, no positive reference current at T = {temp:g} °C (the reference is unstable at zero I_REF).")
  n1, n2 = devices[0].n, devices[1].n
  def residual(i):
    s = _loop(devices, r, J, K, delta, v_bs2, v_dd, temp, opts.vds_factors, i)
    return s.v_gs1-r*s.i_b1-s.v_gs2, (n1-n2)*ut/i-r*J*s.m*(1.+delta)
  i, iterations = solve_scalar(residual, est, est/BRACKET, est*BRACKET, opts.solver.newton_tol_i, opts.solver.newton_tol_v, opts.solver, what = f"current reference at v_dd = {v_dd:g} V, T = {temp:g} °C")
  s = _loop(devices, r, J, K, delta, v_bs2, v_dd, temp, opts.vds_factors, i)
  if s.v_ds2 <= 0. or s.v_ds1 <= 0. or v_dd-s.v_gs1 <= 0. or (gen is not None and v_dd-gen.v_b2 <= 0.):
    raise HeadroomError(f"Error, no valid operating point at v_dd = {v_dd:g} V, T = {temp:g} °C (V_SG4 = {s.v_sg4:.4f} V, V_GS1 = {s.v_gs1:.4f} V).")
  i_ref = s.i_b1/J
  saturated = {"M1": s.v_ds1 > SATURATION*ut, "M2": s.v_ds2 > SATURATION*ut, "M3": v_dd-s.v_gs1 > SATURATION*ut, "M4": s.v_sg4 > SATURATION*ut}
  if gen is not None:
    saturated.update(gen.saturated)
    iterations += gen.iterations
  i_out = i_ref
  if card.trim is not None and card.trim.iref_style == "output_mirror":
    state = opts.trim if opts.trim is not None else trim_state(card)
    i_out = iout_trim_mirror(card.trim, state.iref_code, i_ref)
  return OperatingPoint(topology = topology, v_dd = v_dd, temp = temp, i_ref = i_ref, i_m2 = i, i_b1 = s.i_b1, i_out = i_out, r = r,
                        v_b2 = gen.v_b2 if gen is not None else None, v_dnw = gen.v_dnw if gen is not None else None,
                        v_gs1 = s.v_gs1, v_gs2 = s.v_gs2, v_sg4 = s.v_sg4, v_ds1 = s.v_ds1, v_ds2 = s.v_ds2, v_ds4 = s.v_sg4,
                        v_ds6 = gen.v_ds6 if gen is not None else None, i_dio = gen.i_dio if gen is not None else 0.,
                        i_2t = gen.i_6 if gen is not None else 0., i_replica = gen.i_replica if gen is not None else 0.,
                        saturated = saturated, converged = True, iterations = iterations)

def loop_residuals(card, op, opts = None):
  """Re-evaluate the operating point 'op' through the device models and return the residuals
     {"loop": V, "m1": A, "m2": A, "2t": A} of the loop, branch and 2T node equations."""
  if opts is None: opts = CircuitOptions()
  card = prepare_card(card, opts)
  J, K = _mirror_ratios(card, op.topology)
  temp = op.temp
  v_bs2 = op.v_b2 if op.topology == "proposed" else 0.
  m1, m2 = card.device("M1"), card.device("M2")
  residuals = {
    "loop": op.v_gs1-op.r*op.i_b1-op.v_gs2,
    "m1": _ids(m1, op.v_gs1, 0., op.v_ds1, temp, opts.vds_factors)-K*op.i_b1,
    "m2": _ids(m2, op.v_gs2, v_bs2, op.v_ds2, temp, opts.vds_factors)-op.i_m2}
  if op.topology == "proposed":
    diode = card.diode_pw_dnw if opts.include_diode else None
    v_dnw = op.v_dnw if op.v_dnw is not None else op.v_dd
    m5 = card.device("M5")
    i5 = _ids(m5, op.v_b2, 0., op.v_b2, temp, opts.vds_factors)
    i6 = _ids(card.device("M6"), 0., 0., op.v_ds6, temp, opts.vds_factors)
    idio = junction_current(diode, v_dnw-op.v_b2, temp) if diode is not None else 0.
    residuals["2t"] = i5-i6-idio
  return residuals

###################
# Supply voltage. #
###################

def vdd_min_formula(v_gs1, v_sg4, v_b2, temp):
  """Return the minimum supply voltage 4U_T+max(V_GS1, V_SG4, V_B2) (V); v_b2 may be None."""
  drives = [v_gs1, v_sg4] if v_b2 is None else [v_gs1, v_sg4, v_b2]
  return SATURATION*thermal_voltage(temp)+max(drives)

def vdd_min(card, temp, opts = None, v_dd = None):
  """Return the minimum supply voltage (V) of the current reference of card 'card' at temperature 'temp',
     evaluated at the operating point solved at supply 'v_dd' (default: card nominal supply)."""
  if v_dd is None: v_dd = card.v_dd_nominal
  op = solve_pcr(card, v_dd, temp, opts)
  return vdd_min_formula(op.v_gs1, op.v_sg4, op.v_b2, temp)

def supply_current(card, op, opts = None):
  """Return the total supply current I_VDD (A) of operating point 'op':
     M1 and M2 branches, 2T and replica branches, deep n-well leakages drawn from V_DD, and output mirror branch."""
  if opts is None: opts = CircuitOptions()
  card = prepare_card(card, opts)
  i_vdd = op.i_b1+op.i_m2
  if op.topology == "proposed":
    i_vdd += op.i_2t+op.i_replica
    if opts.include_diode and not opts.include_replica: i_vdd += max(op.i_dio, 0.)
    if card.diode_nw is not None:
      v_dnw = op.v_dnw if op.v_dnw is not None else op.v_dd
      i_vdd += max(junction_current(card.diode_nw, v_dnw, op.temp), 0.)
  if card.trim is not None and card.trim.iref_style == "output_mirror": i_vdd += op.i_out
  return i_vdd
