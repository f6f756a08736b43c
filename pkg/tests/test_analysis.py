import math
import numpy as np
import pytest
from pcrsim.defs import TNORM, ConvergenceError, ModelDomainError
from pcrsim.utils import kelvin
from pcrsim.circuits import CircuitOptions, solve_pcr, v_b2_closed_form_slope
from pcrsim.trimming import TrimState
from pcrsim.analysis import sweep_temperature, sweep_supply, box_coefficient, box_tc, box_ls, v_b2_slope, average_ls
from pcrsim.analysis import analytic_tc_conventional, analytic_tc_proposed, analytic_tc_proposed_terms, ls_formula, analytic_ls, dc_psrr
from pcrsim.analysis import FomInputs, fom1, fom2, simulated_fom, resize_2t, size_sweep_2t, corner_scan

IDEAL = CircuitOptions(include_diode = False, vds_factors = False)

def test_box_coefficient():
  assert box_coefficient([0., 10.], [1., 2.]) == pytest.approx(1./15.)
  assert box_coefficient([-40., 25., 85.], [1., 1.52, 2.], reference = "t25") == pytest.approx(1./(1.52*125.))
  assert box_coefficient([0., 1., 2.], [1., 1., 1.]) == 0.
  with pytest.raises(ValueError):
    box_coefficient([0.], [1.])
  with pytest.raises(ValueError):
    box_coefficient([0., 10.], [1., 2.], reference = "median")
  with pytest.raises(ValueError):
    box_coefficient([30., 40.], [1., 2.], reference = "t25")

def test_box_coefficient_scale_invariance():
  rng = np.random.default_rng(7)
  x = np.linspace(-40., 85., 26)
  y = 1.+0.01*rng.standard_normal(26)
  assert box_coefficient(x, 3.e-9*y) == pytest.approx(box_coefficient(x, y), rel = 1.e-12)

def test_sweep_temperature(fdsoi):
  s = sweep_temperature(fdsoi, 1.8, -40., 85., 5.)
  assert s.variable == "temperature"
  assert len(s.x) == 26 and s.x[0] == -40. and s.x[-1] == 85.
  assert len(s.points) == 26
  assert np.all(np.isfinite(s.i_ref))
  assert s.v_b2 == pytest.approx(s.column("v_b2"))
  assert box_tc(s) < 200.
  assert box_tc(s, reference = "t25") == pytest.approx(box_tc(s), rel = 0.01)
  with pytest.raises(ValueError):
    box_ls(s)

def test_sweep_threads(fdsoi):
  one = sweep_temperature(fdsoi, 1.8, -40., 85., 5., threads = 1)
  four = sweep_temperature(fdsoi, 1.8, -40., 85., 5., threads = 4)
  assert np.array_equal(one.i_ref, four.i_ref)

def test_sweep_grid_errors(fdsoi):
  with pytest.raises(ValueError):
    sweep_temperature(fdsoi, 1.8, -40., 85., 7.)
  with pytest.raises(ValueError):
    sweep_temperature(fdsoi, 1.8, 85., -40., 5.)

def test_sweep_supply(fdsoi):
  s = sweep_supply(fdsoi, TNORM, 1.0, 1.8, 0.1)
  assert len(s.x) == 9
  assert np.all(np.diff(s.i_ref) > 0.)
  assert 0. < box_ls(s) < 10.
  with pytest.raises(ValueError):
    box_tc(s)

def test_sweep_supply_aborts(fdsoi):
  with pytest.raises(ConvergenceError, match = "v_dd = 0.2"):
    sweep_supply(fdsoi, TNORM, 0.2, 1.8, 0.4)

def test_sweep_out_of_range(fdsoi):
  with pytest.raises(ModelDomainError, match = "sweep aborted at T = 160"):
    sweep_temperature(fdsoi, 1.8, -40., 200., 40.)

def test_v_b2_slope(card):
  s = sweep_temperature(card, card.v_dd_nominal, -40., 85., 5., IDEAL)
  assert v_b2_slope(s) == pytest.approx(v_b2_closed_form_slope(card, TNORM), rel = 1.e-3)

def test_average_ls(fdsoi):
  average, values = average_ls(fdsoi, [-40., 25., 85.], 1.2, 1.8, 0.3)
  assert len(values) == 3
  assert average == pytest.approx(np.mean(values))

@pytest.mark.parametrize("temp", [-40., 25., 85.])
def test_analytic_tc_proposed(card, temp):
  h = 0.5
  lo = solve_pcr(card, card.v_dd_nominal, temp-h, IDEAL).i_ref
  hi = solve_pcr(card, card.v_dd_nominal, temp+h, IDEAL).i_ref
  mid = solve_pcr(card, card.v_dd_nominal, temp, IDEAL).i_ref
  fd = 1.e6*(hi-lo)/(2.*h*mid)
  assert analytic_tc_proposed(card, temp) == pytest.approx(fd, abs = 0.05)

def test_analytic_tc_terms(fdsoi):
  terms = analytic_tc_proposed_terms(fdsoi, TNORM)
  assert terms["resistor"] == pytest.approx(100.)
  assert terms["gamma"] == 0.
  assert terms["v_b2"] < 0.
  assert analytic_tc_proposed(fdsoi, TNORM) == pytest.approx(sum(terms.values()))

def test_analytic_tc_trim(fdsoi):
  # A wider M5 makes V_B2 more CTAT.
  low = analytic_tc_proposed(fdsoi, TNORM, TrimState(tc_code = 0, iref_code = 167))
  high = analytic_tc_proposed(fdsoi, TNORM, TrimState(tc_code = 15, iref_code = 167))
  assert high < analytic_tc_proposed(fdsoi, TNORM) < low

def test_analytic_tc_conventional(fdsoi):
  expected = 1.e6*(-fdsoi.resistor.alpha1/(1.+fdsoi.resistor.alpha1*15.)+1./kelvin(40.))
  assert analytic_tc_conventional(fdsoi, 40.) == pytest.approx(expected)

def test_ls_formula():
  full, simplified = ls_formula("conventional", 1.e-7, 1.e-11, 2.e-12, r = 2.e7, J = 2.)
  assert full == pytest.approx((2.e-12/1.e-7)*(5.e-8-1.e-7)/2.+1.e-11)
  assert simplified == 1.e-11
  full, simplified = ls_formula("proposed", 1.e-7, 1.e-11, 2.e-12, g_mb2 = 1.e-8, g_d6 = 1.e-12, g_m5 = 1.e-7, r = 1.e7)
  assert full == pytest.approx(1.e-11+1.e-13)
  assert simplified == pytest.approx(1.e-11+1.e-13)

def test_analytic_ls(card):
  op = solve_pcr(card, card.v_dd_nominal, TNORM)
  ls = analytic_ls(card, op)
  assert ls.percent == pytest.approx(100.*ls.fractional)
  assert ls.g_full > 0. and ls.g_simplified > 0.
  ideal = analytic_ls(card, solve_pcr(card, card.v_dd_nominal, TNORM, IDEAL), IDEAL)
  assert ideal.g_full == 0.

def test_dc_psrr():
  assert dc_psrr(1.e-9, 1.e-9, 1.) == pytest.approx(0.)
  assert dc_psrr(1.e-11, 1.e-9, 1.) == pytest.approx(-40.)
  with pytest.raises(ValueError):
    dc_psrr(0., 1.e-9, 1.)

def test_fom():
  f = FomInputs(tc = 89., t_min = -40., t_max = 85., area = 0.00214, i_vdd = 2.87e-9/0.75, i_ref = 1.5e-9)
  assert fom1(f) == pytest.approx(0.00152368, rel = 1.e-5)
  assert fom2(f) == pytest.approx(1.816391, rel = 1.e-5)
  partial = FomInputs(tc = 89., t_min = -40., t_max = 85.)
  with pytest.raises(ValueError):
    fom1(partial)
  with pytest.raises(ValueError):
    fom2(partial)

@pytest.mark.parametrize("changes", [{"t_max": -40.}, {"tc": -1.}, {"area": 0.}, {"i_ref": -1.e-9}])
def test_fom_invalid(changes):
  kwargs = {"tc": 89., "t_min": -40., "t_max": 85., **changes}
  with pytest.raises(ValueError):
    FomInputs(**kwargs)

def test_simulated_fom(fdsoi):
  f1, f2, f = simulated_fom(fdsoi, 1.8, (-40., 85.), 0.00214, step = 25.)
  assert f1 == pytest.approx(f.tc/125.*0.00214)
  assert f.i_vdd > f.i_ref
  assert f2 > f1

def test_resize_2t(fdsoi, bulk):
  card = resize_2t(fdsoi, 20., 62.24)
  assert card.device("M5").W == pytest.approx(20.)
  assert card.device("M5B").W == pytest.approx(20.)
  assert card.device("M6").W == pytest.approx(7.78)
  assert card.device("M7").W == pytest.approx(7.78)
  assert card.device("M6B").W == pytest.approx(7.78)
  card = resize_2t(bulk, 32., 10.24)
  assert card.device("M5B").W == pytest.approx(8.)
  assert card.device("M6").W == pytest.approx(1.28)

def test_size_sweep_identity(fdsoi):
  cells = size_sweep_2t(fdsoi, [10.], [31.12], 1.8, (-40., 85.), step = 25.)
  assert len(cells) == 1
  s = sweep_temperature(fdsoi, 1.8, -40., 85., 25.)
  assert cells[0].converged
  assert cells[0].tc == pytest.approx(box_tc(s), rel = 1.e-9)
  assert cells[0].v_b2_slope == pytest.approx(1.e6*v_b2_slope(s), rel = 1.e-9)

def test_size_sweep_slopes(bulk, fdsoi):
  cells = size_sweep_2t(bulk, [48., 64., 80.], [10.24], 1.2, (-40., 85.), step = 25.)
  assert [cell.w5 for cell in cells] == [48., 64., 80.]
  assert all(cell.v_b2_slope < 0. for cell in cells)
  assert cells[0].v_b2_slope > cells[1].v_b2_slope > cells[2].v_b2_slope
  cells = size_sweep_2t(fdsoi, [8.75, 10., 11.25], [31.12], 1.8, (-40., 85.), step = 25.)
  best = min(cells, key = lambda cell: cell.tc)
  assert abs(best.v_b2_slope) < 100.

def test_size_sweep_flags_failures(fdsoi):
  cells = size_sweep_2t(fdsoi, [10.], [31.12], 0.3, (-40., 85.), step = 25.)
  assert not cells[0].converged
  assert math.isnan(cells[0].tc)
  assert cells[0].error
  with pytest.raises(ValueError):
    size_sweep_2t(fdsoi, [], [31.12], 1.8, (-40., 85.))

def test_corner_scan(fdsoi):
  cells = corner_scan(fdsoi, 1.8, (-40., 85.), step = 25.)
  assert [cell.corner for cell in cells] == ["TT", "FF", "SS", "FS", "SF"]
  assert all(cell.converged for cell in cells)
  tt = cells[0]
  assert tt.i_ref_25 == pytest.approx(solve_pcr(fdsoi, 1.8, TNORM).i_ref, rel = 1.e-12)
  assert tt.tc == pytest.approx(box_tc(sweep_temperature(fdsoi, 1.8, -40., 85., 25.)), rel = 1.e-12)
  ff, ss = cells[1], cells[2]
  assert ff.i_ref_25 > tt.i_ref_25 > ss.i_ref_25
