# This program is free software: you can redistribute it and/or modify it under the terms of the GNU General Public License as published by the Free Software Foundation, either version 3 of the License, or (at your option) any later version.
# This program is distributed in the hope that it will be useful, but WITHOUT ANY WARRANTY; without even the implied warranty of MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE. See the GNU General Public License for more details.
# You should have received a copy of the GNU General Public License along with this program. If not, see <https://www.gnu.org/licenses/>.
# Version: 1.0.0 / 2026.10.19

"""Device models.

   Subthreshold MOSFET (with body effect and small-signal conductances), resistor and reverse-biased junction.
   pMOS devices are handled with magnitudes: v_gs, v_ds, v_bs stand for V_SG, V_SD, V_SB."""

import math
from dataclasses import dataclass
from .defs import KBOLTZMANN, QELECTRON, ZEROCELSIUS, SATURATION, ModelDomainError
from .utils import kelvin

@dataclass(frozen = True)
class BiasPoint:
  """Bias point of a MOSFET (V, °C)."""
  v_gs: float
  v_bs: float
  v_ds: float
  temp: float

@dataclass(frozen = True)
class SmallSignal:
  """Small-signal conductances of a MOSFET (S)."""
  g_m: float
  g_d: float
  g_mb: float

####################
# Thermal voltage. #
####################

def thermal_voltage(temp):
  """Return the thermal voltage kT/q (V) at temperature 'temp' (°C)."""
  if temp <= -ZEROCELSIUS: raise ModelDomainError(f"Error, temperature {temp} °C is below absolute zero.")
  return KBOLTZMANN*kelvin(temp)/QELECTRON

def saturated(v_ds, temp):
  """Return True if drain voltage 'v_ds' saturates a subthreshold MOSFET (V_DS > 4U_T) at temperature 'temp'."""
  return v_ds > SATURATION*thermal_voltage(temp)

####################
# MOSFET: statics. #
####################

def vt0(p, temp):
  """Return the zero-V_BS threshold voltage V_T0(T) of MOSFET 'p'."""
  return p.vt0_ref+p.k_vt*(temp-p.t_ref)

def isq(p, temp):
  """Return the specific sheet current I_SQ(T) of MOSFET 'p' (folds the U_T² and mobility temperature laws)."""
  return p.isq_ref*(kelvin(temp)/kelvin(p.t_ref))**(2.-p.m_mu)

def gamma_star(p, temp):
  """Return the linearized body factor gamma*(T) of MOSFET 'p'."""
  return p.gamma_star_ref*(1.+p.k_gamma*(temp-p.t_ref))

def phi_fp(p, temp):
  """Return the Fermi potential phi_fp(T) of MOSFET 'p' (bulk_sqrt body model)."""
  return p.phi_fp_ref+p.k_phi*(temp-p.t_ref)

def delta_vt_body(p, v_bs, temp):
  """Return the threshold voltage shift (V) of MOSFET 'p' due to body bias 'v_bs' at temperature 'temp'.
     A forward body bias (v_bs > 0) lowers the threshold voltage."""
  if p.body_model == "bulk_sqrt":
    phi2 = 2.*phi_fp(p, temp)
    arg = phi2-v_bs
    if arg <= 0. or phi2 <= 0.: raise ModelDomainError(f"Error, body bias {v_bs} V out of the domain of the bulk body model (2phi_fp = {phi2} V).")
    return p.gamma_b*(math.sqrt(arg)-math.sqrt(phi2))
  return -gamma_star(p, temp)*v_bs

def body_slope(p, v_bs, temp):
  """Return -dV_T/dV_BS, the local body factor of MOSFET 'p' at body bias 'v_bs'."""
  if p.body_model == "bulk_sqrt":
    arg = 2.*phi_fp(p, temp)-v_bs
    if arg <= 0.: raise ModelDomainError(f"Error, body bias {v_bs} V out of the domain of the bulk body model.")
    return p.gamma_b/(2.*math.sqrt(arg))
  return gamma_star(p, temp)

def threshold(p, v_bs, temp):
  """Return the threshold voltage V_T(T, V_BS) of MOSFET 'p'."""
  return vt0(p, temp)+delta_vt_body(p, v_bs, temp)

def specific_current(p, temp):
  """Return I_SQ(T)*S*mult for MOSFET 'p'."""
  return isq(p, temp)*p.size()

def vds_factor(p, v_ds, temp):
  """Return the drain factor (1-exp(-V_DS/U_T))*(1+lambda*V_DS) of MOSFET 'p'."""
  return -math.expm1(-v_ds/thermal_voltage(temp))*(1.+p.lambda_*v_ds)

def mosfet_ids(p, b, vds_factors = True):
  """Return the subthreshold drain current (A) of MOSFET 'p' at bias point 'b'.
     If vds_factors is False, the drain factors are ignored (ideal saturated device)."""
  ut = thermal_voltage(b.temp)
  ids = specific_current(p, b.temp)*math.exp((b.v_gs-threshold(p, b.v_bs, b.temp))/(p.n*ut))
  if vds_factors: ids *= vds_factor(p, b.v_ds, b.temp)
  return ids

def mosfet_vgs(p, i_ds, v_bs, temp):
  """Return the gate-source voltage (V) of saturated MOSFET 'p' carrying current 'i_ds' (A).
     Exact inverse of mosfet_ids without drain factors."""
  if i_ds <= 0.: raise ModelDomainError(f"Error, the drain current must be > 0 (got {i_ds} A).")
  return threshold(p, v_bs, temp)+p.n*thermal_voltage(temp)*math.log(i_ds/specific_current(p, temp))

#########################
# MOSFET: small signal. #
#########################

def small_signal(p, b, vds_factors = True, strict = True):
  """Return the small-signal conductances of MOSFET 'p' at bias point 'b'.
     These are the exact partial derivatives of mosfet_ids.
     If strict is True, raise ModelDomainError if the device is not saturated (V_DS <= 4U_T)."""
  ut = thermal_voltage(b.temp)
  if strict and b.v_ds <= SATURATION*ut: raise ModelDomainError(f"Error, device {p.name} is not saturated (V_DS = {b.v_ds} V).")
  ids = mosfet_ids(p, b, vds_factors = vds_factors)
  g_m = ids/(p.n*ut)
  g_mb = body_slope(p, b.v_bs, b.temp)*g_m
  if vds_factors:
    x = math.exp(-b.v_ds/ut)
    g_d = ids*(p.lambda_/(1.+p.lambda_*b.v_ds)+x/(ut*(1.-x)))
  else:
    g_d = 0.
  return SmallSignal(g_m = g_m, g_d = g_d, g_mb = g_mb)

#############
# Resistor. #
#############

def resistor_value(r, temp):
  """Return the resistance (ohms) of resistor 'r' at temperature 'temp'."""
  dT = temp-r.t_ref
  return r.r_ref*(1.+r.alpha1*dT+r.alpha2*dT*dT)

def resistor_tcr(r, temp):
  """Return the temperature coefficient (1/R)dR/dT (1/°C) of resistor 'r' at temperature 'temp'."""
  dT = temp-r.t_ref
  return (r.alpha1+2.*r.alpha2*dT)/(1.+r.alpha1*dT+r.alpha2*dT*dT)

#####################
# Junction leakage. #
#####################

def junction_current(d, v_d, temp):
  """Return the current (A) of junction 'd' under signed reverse voltage 'v_d' at temperature 'temp'.
     Negative v_d (forward bias) yields a negative current; used by the circuit solvers."""
  ut = thermal_voltage(temp)
  return d.j_ref*d.area*math.exp((temp-d.t_ref)/d.theta)*(-math.expm1(-v_d/ut))*(1.+d.kappa*(v_d-d.v_ref))

def junction_conductance(d, v_d, temp):
  """Return d(junction_current)/d(v_d) (S)."""
  ut = thermal_voltage(temp)
  scale = d.j_ref*d.area*math.exp((temp-d.t_ref)/d.theta)
  return scale*(math.exp(-v_d/ut)/ut*(1.+d.kappa*(v_d-d.v_ref))-math.expm1(-v_d/ut)*d.kappa)

def diode_leakage(d, v_d, temp):
  """Return the leakage current (A) of reverse-biased junction 'd' at reverse voltage 'v_d' >= 0 and temperature 'temp'."""
  if v_d < 0.: raise ModelDomainError(f"Error, negative reverse voltage {v_d} V (forward bias is out of the model scope).")
  return junction_current(d, v_d, temp)
