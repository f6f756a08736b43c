import math
import dataclasses
import pytest
from pcrsim.defs import TNORM, CardError, ModelDomainError, ConvergenceError, HeadroomError
from pcrsim.devmodel import threshold, resistor_value, thermal_voltage
from pcrsim.circuits import SolverOptions, CircuitOptions, solve_scalar, solve_2t, solve_pcr, loop_residuals, closed_form_iref
from pcrsim.circuits import v_b2_closed_form, v_b2_closed_form_slope, vdd_min, vdd_min_formula, supply_current
from pcrsim.trimming import TrimState
from conftest import no_lambda, conventional_card

IDEAL = CircuitOptions(include_diode = False, vds_factors = False)

def test_solve_scalar_newton():
  x, iterations = solve_scalar(lambda x: (x*x-2., 2.*x), 1., 0., 10., 1.e-12, 1.e-12, SolverOptions())
  assert x == pytest.approx(math.sqrt(2.), rel = 1.e-12)
  assert iterations < 10

def test_solve_scalar_bisection():
  solver = SolverOptions(method = "bisection")
  x, iterations = solve_scalar(lambda x: (x**3-8., 3.*x*x), 1., 0., 10., 1.e-12, 1.e-12, solver)
  assert x == pytest.approx(2., abs = 1.e-11)

def test_solve_scalar_fallback():
  # Zero derivative: Newton gives up, bisection takes over.
  x, iterations = solve_scalar(lambda x: (x-3., 0.), 1., 0., 10., 1.e-10, 1.e-10, SolverOptions())
  assert x == pytest.approx(3., abs = 1.e-9)
  with pytest.raises(ConvergenceError):
    solve_scalar(lambda x: (x-3., 0.), 1., 0., 10., 1.e-10, 1.e-10, SolverOptions(fallback_bisection = False))

def test_solve_scalar_no_root():
  with pytest.raises(ConvergenceError, match = "sign change"):
    solve_scalar(lambda x: (x*x+1., 2.*x), 1., 0., 10., 1.e-12, 1.e-12, SolverOptions(method = "bisection"))

def test_solver_options():
  with pytest.raises(ValueError):
    SolverOptions(max_iter = 2)
  with pytest.raises(ValueError):
    SolverOptions(method = "secant")
  with pytest.raises(ValueError):
    CircuitOptions(topology = "bandgap")

@pytest.mark.parametrize("temp", [-40., 25., 85.])
def test_2t_closed_form(card, temp):
  gen = solve_2t(card, card.v_dd_nominal, temp, IDEAL)
  assert gen.v_b2 == pytest.approx(v_b2_closed_form(card, temp), abs = 1.e-6)
  assert gen.i_dio == 0.

def test_2t_closed_form_slope(card):
  h = 0.5
  fd = (v_b2_closed_form(card, 25.+h)-v_b2_closed_form(card, 25.-h))/(2.*h)
  assert v_b2_closed_form_slope(card, 25.) == pytest.approx(fd, rel = 1.e-6)
  # CTAT 2T generators.
  assert v_b2_closed_form_slope(card, 25.) < 0.

def test_2t_operating_point(card):
  gen = solve_2t(card, card.v_dd_nominal, TNORM)
  assert 0. < gen.v_b2 < card.v_dd_nominal
  assert gen.i_5 == pytest.approx(gen.i_6+gen.i_dio, rel = 1.e-6)
  assert all(gen.saturated.values())
  assert gen.v_dnw == pytest.approx(gen.v_b2, abs = 2.e-3)
  assert solve_2t(card, card.v_dd_nominal, TNORM, CircuitOptions(include_replica = False)).v_dnw is None

def test_2t_trimmed_replica_tracks(bulk):
  opts = CircuitOptions(trim = TrimState(tc_code = 20, iref_code = 10))
  gen = solve_2t(bulk, 1.2, TNORM, opts)
  assert gen.v_b2 < solve_2t(bulk, 1.2, TNORM).v_b2
  assert gen.v_dnw == pytest.approx(gen.v_b2, abs = 2.e-3)

def test_2t_out_of_range(card):
  with pytest.raises(ModelDomainError):
    solve_2t(card, 1.2, 150.)

def test_pcr_operating_point(card):
  op = solve_pcr(card, card.v_dd_nominal, TNORM)
  assert op.converged
  assert op.all_saturated()
  assert 0.5e-9 < op.i_ref < 20.e-9
  assert op.i_b1 == pytest.approx(op.i_ref)
  residuals = loop_residuals(card, op)
  assert abs(residuals["loop"]) < 1.e-6
  assert abs(residuals["m1"]) < 1.e-6*op.i_ref
  assert abs(residuals["m2"]) < 1.e-6*op.i_ref
  assert abs(residuals["2t"]) < 1.e-6*op.i_2t

def test_pcr_closed_form(card):
  for temp in (-40., 25., 85.):
    op = solve_pcr(card, card.v_dd_nominal, temp, IDEAL)
    m1, m2 = card.device("M1"), card.device("M2")
    expected = (threshold(m1, 0., temp)-threshold(m2, op.v_b2, temp))/resistor_value(card.resistor, temp)
    assert op.i_ref == pytest.approx(expected, rel = 1.e-4)
    assert closed_form_iref(card, temp, v_b2 = op.v_b2) == pytest.approx(expected, rel = 1.e-9)

def test_pcr_conventional(fdsoi):
  card = conventional_card(fdsoi, K = 8.)
  op = solve_pcr(card, 1.8, TNORM, CircuitOptions(topology = "conventional", vds_factors = False))
  expected = 1.2*thermal_voltage(TNORM)*math.log(8.)/resistor_value(card.resistor, TNORM)
  assert op.i_ref == pytest.approx(expected, rel = 1.e-6)
  assert op.v_b2 is None
  with pytest.raises(CardError):
    solve_pcr(fdsoi, 1.8, TNORM, CircuitOptions(topology = "conventional"))

def test_pcr_no_headroom(fdsoi):
  with pytest.raises((HeadroomError, ModelDomainError)):
    solve_pcr(fdsoi, 0.2, TNORM)

def test_headroom_is_convergence_error():
  assert issubclass(HeadroomError, ConvergenceError)

def test_pcr_solver_methods(fdsoi):
  newton = solve_pcr(fdsoi, 1.8, TNORM)
  bisection = solve_pcr(fdsoi, 1.8, TNORM, CircuitOptions(solver = SolverOptions(method = "bisection")))
  assert bisection.i_ref == pytest.approx(newton.i_ref, rel = 1.e-5)

def test_pcr_mirror_delta(fdsoi):
  op = solve_pcr(fdsoi, 1.8, TNORM, IDEAL)
  shifted = solve_pcr(dataclasses.replace(fdsoi, mirror_delta = 0.01), 1.8, TNORM, IDEAL)
  n = fdsoi.device("M1").n
  expected = op.i_ref+n*thermal_voltage(TNORM)*math.log(1.01)/op.r
  assert shifted.i_ref == pytest.approx(expected, rel = 1.e-6)

def test_output_mirror_trim(bulk):
  op = solve_pcr(bulk, 1.2, TNORM)
  assert op.i_out == op.i_ref
  trimmed = solve_pcr(bulk, 1.2, TNORM, CircuitOptions(trim = TrimState(tc_code = 12, iref_code = 20)))
  assert trimmed.i_ref == pytest.approx(op.i_ref, rel = 1.e-12)
  assert trimmed.i_out == pytest.approx(1.5*op.i_ref, rel = 1.e-12)

def test_series_resistor_trim(fdsoi):
  op = solve_pcr(fdsoi, 1.8, TNORM)
  trimmed = solve_pcr(fdsoi, 1.8, TNORM, CircuitOptions(trim = TrimState(tc_code = 8, iref_code = 167)))
  assert trimmed.i_ref == pytest.approx(op.i_ref, rel = 1.e-9)
  lower = solve_pcr(fdsoi, 1.8, TNORM, CircuitOptions(trim = TrimState(tc_code = 8, iref_code = 100)))
  assert lower.i_ref < op.i_ref

def test_vdd_min(card):
  op = solve_pcr(card, card.v_dd_nominal, TNORM)
  v = vdd_min(card, TNORM)
  assert v == vdd_min_formula(op.v_gs1, op.v_sg4, op.v_b2, TNORM)
  assert max(op.v_gs1, op.v_sg4) < v < card.v_dd_nominal
  assert vdd_min_formula(0.5, 0.6, None, 25.) == pytest.approx(0.6+4.*thermal_voltage(25.))

def test_supply_current(card):
  op = solve_pcr(card, card.v_dd_nominal, TNORM)
  i_vdd = supply_current(card, op)
  assert i_vdd > op.i_b1+op.i_m2+op.i_2t
  assert i_vdd < 50.*op.i_ref

@pytest.mark.parametrize("v_dd", [0.05, 0.1])
def test_2t_no_headroom(fdsoi, v_dd):
  with pytest.raises(HeadroomError, match = f"v_dd = {v_dd:g} V"):
    solve_2t(fdsoi, v_dd, TNORM)
  with pytest.raises(HeadroomError):
    solve_2t(fdsoi, v_dd, TNORM, CircuitOptions(include_replica = False, include_m7 = False))

def test_2t_leakage_raises_v_b2(fdsoi):
  free = solve_2t(fdsoi, 1.8, 85., CircuitOptions(include_diode = False)).v_b2
  leaky = solve_2t(fdsoi, 1.8, 85., CircuitOptions(include_replica = False)).v_b2
  replica = solve_2t(fdsoi, 1.8, 85.).v_b2
  assert leaky > free
  assert abs(replica-free) < 0.01*(leaky-free)

@pytest.mark.parametrize("topology", ["proposed", "conventional"])
def test_resistor_decreases_iref(card, topology):
  if topology == "conventional": card = conventional_card(card, K = 8.)
  opts = CircuitOptions(topology = topology)
  currents = []
  for scale in (0.5, 0.75, 1., 1.5, 2.):
    scaled = dataclasses.replace(card, resistor = dataclasses.replace(card.resistor, r_ref = scale*card.resistor.r_ref))
    currents.append(solve_pcr(scaled, card.v_dd_nominal, TNORM, opts).i_ref)
  assert all(a > b for a, b in zip(currents, currents[1:]))

def test_supply_invariance(card):
  card = no_lambda(card)
  opts = CircuitOptions(include_diode = False, include_m7 = False)
  currents = [solve_pcr(card, v_dd, TNORM, opts).i_ref for v_dd in (1.2, 1.4, 1.6, 1.8)]
  assert max(currents)-min(currents) < 1.e-6*currents[0]
