import math
import dataclasses
import pytest
from pcrsim.defs import ModelDomainError
from pcrsim.techcard import MosfetParams, ResistorParams, DiodeParams
from pcrsim.devmodel import BiasPoint, thermal_voltage, saturated, vt0, isq, threshold, delta_vt_body, body_slope, specific_current
from pcrsim.devmodel import mosfet_ids, mosfet_vgs, small_signal, resistor_value, resistor_tcr, junction_current, junction_conductance, diode_leakage

NMOS = MosfetParams(name = "M", polarity = "n", flavor = "LVT", n = 1.2, vt0_ref = 0.4, k_vt = -0.0006, isq_ref = 1.e-7, m_mu = 1.5,
                    W = 2., L = 1., gamma_star_ref = 0.1, lambda_ = 0.02)

BULK = dataclasses.replace(NMOS, body_model = "bulk_sqrt", gamma_b = 0.3, phi_fp_ref = 0.4, k_phi = -0.0005)

def test_thermal_voltage():
  assert thermal_voltage(25.) == pytest.approx(0.0256926, rel = 1.e-5)
  assert thermal_voltage(-273.15+300.) == pytest.approx(0.0258520, rel = 1.e-5)
  with pytest.raises(ModelDomainError):
    thermal_voltage(-300.)

def test_saturated():
  assert saturated(0.2, 25.)
  assert not saturated(0.1, 25.)

def test_temperature_laws():
  assert vt0(NMOS, 25.) == NMOS.vt0_ref
  assert vt0(NMOS, 125.) == pytest.approx(0.34)
  assert isq(NMOS, 25.) == NMOS.isq_ref
  # (2-m_mu) = 0.5: isq scales as sqrt(T).
  assert isq(NMOS, 125.) == pytest.approx(1.e-7*math.sqrt(398.15/298.15))

def test_body_effect_linearized():
  assert delta_vt_body(NMOS, 0.3, 25.) == pytest.approx(-0.03)
  assert threshold(NMOS, 0.3, 25.) == pytest.approx(0.37)
  assert body_slope(NMOS, 0.3, 25.) == 0.1

def test_body_effect_bulk():
  assert delta_vt_body(BULK, 0., 25.) == 0.
  assert delta_vt_body(BULK, 0.2, 25.) == pytest.approx(0.3*(math.sqrt(0.6)-math.sqrt(0.8)))
  # Finite-difference check of the local body factor.
  h = 1.e-6
  fd = -(delta_vt_body(BULK, 0.2+h, 25.)-delta_vt_body(BULK, 0.2-h, 25.))/(2.*h)
  assert body_slope(BULK, 0.2, 25.) == pytest.approx(fd, rel = 1.e-6)
  with pytest.raises(ModelDomainError):
    delta_vt_body(BULK, 0.9, 25.)

def test_ids_vgs_inverse():
  for i in (1.e-12, 1.e-9, 1.e-7):
    v = mosfet_vgs(NMOS, i, 0.1, 60.)
    assert mosfet_ids(NMOS, BiasPoint(v_gs = v, v_bs = 0.1, v_ds = 1., temp = 60.), vds_factors = False) == pytest.approx(i, rel = 1.e-12)
  with pytest.raises(ModelDomainError):
    mosfet_vgs(NMOS, 0., 0., 25.)

def test_ids_drain_factor():
  b = BiasPoint(v_gs = 0.2, v_bs = 0., v_ds = 0.5, temp = 25.)
  ideal = mosfet_ids(NMOS, b, vds_factors = False)
  assert ideal == pytest.approx(specific_current(NMOS, 25.)*math.exp(-0.2/(1.2*thermal_voltage(25.))))
  assert mosfet_ids(NMOS, b) == pytest.approx(ideal*(1.-math.exp(-0.5/thermal_voltage(25.)))*1.01)
  assert mosfet_ids(NMOS, dataclasses.replace(b, v_ds = 0.)) == 0.

@pytest.mark.parametrize("p", [NMOS, BULK])
@pytest.mark.parametrize("v_ds", [0.12, 0.6])
def test_small_signal_finite_differences(p, v_ds):
  b = BiasPoint(v_gs = 0.25, v_bs = 0.15, v_ds = v_ds, temp = 40.)
  ss = small_signal(p, b)
  h = 1.e-6
  ids = lambda **changes: mosfet_ids(p, dataclasses.replace(b, **changes))
  assert ss.g_m == pytest.approx((ids(v_gs = b.v_gs+h)-ids(v_gs = b.v_gs-h))/(2.*h), rel = 1.e-5)
  assert ss.g_mb == pytest.approx((ids(v_bs = b.v_bs+h)-ids(v_bs = b.v_bs-h))/(2.*h), rel = 1.e-5)
  assert ss.g_d == pytest.approx((ids(v_ds = b.v_ds+h)-ids(v_ds = b.v_ds-h))/(2.*h), rel = 1.e-5)

def test_small_signal_strict():
  b = BiasPoint(v_gs = 0.25, v_bs = 0., v_ds = 0.05, temp = 25.)
  with pytest.raises(ModelDomainError):
    small_signal(NMOS, b)
  assert small_signal(NMOS, b, strict = False).g_d > 0.
  assert small_signal(NMOS, dataclasses.replace(b, v_ds = 0.5), vds_factors = False).g_d == 0.

def test_resistor():
  r = ResistorParams(r_ref = 1.e6, alpha1 = -1.e-3, alpha2 = 1.e-6)
  assert resistor_value(r, 25.) == 1.e6
  assert resistor_value(r, 125.) == pytest.approx(1.e6*(1.-0.1+0.01))
  h = 1.e-4
  fd = (resistor_value(r, 60.+h)-resistor_value(r, 60.-h))/(2.*h)/resistor_value(r, 60.)
  assert resistor_tcr(r, 60.) == pytest.approx(fd, rel = 1.e-7)

def test_junction():
  d = DiodeParams(j_ref = 1.e-18, theta = 10., v_ref = 1., kappa = 0.2, area = 100.)
  assert junction_current(d, 0., 25.) == 0.
  # Leakage doubles every theta*ln(2) °C.
  ratio = diode_leakage(d, 1., 25.+10.*math.log(2.))/diode_leakage(d, 1., 25.)
  assert ratio == pytest.approx(2., rel = 1.e-9)
  assert diode_leakage(d, 1., 25.) == pytest.approx(1.e-16*(1.-math.exp(-1./thermal_voltage(25.))))
  assert junction_current(d, -0.01, 25.) < 0.
  h = 1.e-7
  fd = (junction_current(d, 0.05+h, 85.)-junction_current(d, 0.05-h, 85.))/(2.*h)
  assert junction_conductance(d, 0.05, 85.) == pytest.approx(fd, rel = 1.e-6)
  with pytest.raises(ModelDomainError):
    diode_leakage(d, -0.1, 25.)
