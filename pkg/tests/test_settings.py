import pytest
from pcrsim.defs import NEWTON_TOL_I, MAX_ITER, CardError
from pcrsim.settings import get_default_settings, settings_from_dict, load_settings
from pcrsim.circuits import SolverOptions
from pcrsim.utils import grid, nearest_rank, linear_slope, parallel_map, set_chunksize

def test_defaults():
  settings = get_default_settings()
  assert settings["newton_tol_i"] == NEWTON_TOL_I
  assert settings["max_iter"] == MAX_ITER
  assert settings["threads"] == 1
  solver = SolverOptions.from_settings(settings)
  assert solver == SolverOptions()

def test_merge():
  settings = settings_from_dict({"max_iter": 200, "newton_tol_v": 1})
  assert settings["max_iter"] == 200
  assert settings["newton_tol_v"] == 1.
  assert settings["threads"] == 1

@pytest.mark.parametrize("settings", [{"maxiter": 10}, {"max_iter": 2}, {"max_iter": 20.5}, {"threads": 0}, {"verbose": 1}, {"newton_tol_i": -1.e-15}])
def test_invalid(settings):
  with pytest.raises(CardError):
    settings_from_dict(settings)

def test_load(tmp_path):
  path = tmp_path/"settings.txt"
  path.write_text("{\"threads\": 4, # Four threads.\n \"fallback_bisection\": False}\n")
  settings = load_settings(str(path))
  assert settings["threads"] == 4
  assert settings["fallback_bisection"] is False
  path.write_text("[1, 2]")
  with pytest.raises(CardError):
    load_settings(str(path))
  path.write_text("{\"threads\": os.cpu_count()}")
  with pytest.raises(CardError):
    load_settings(str(path))
  with pytest.raises(CardError):
    load_settings(str(tmp_path/"missing.txt"))

def test_grid():
  assert list(grid(-40., 85., 5.))[:3] == [-40., -35., -30.]
  assert len(grid(-40., 85., 5.)) == 26
  assert len(grid(0.9, 1.2, 0.05)) == 7
  with pytest.raises(ValueError):
    grid(0., 1., 0.3)
  with pytest.raises(ValueError):
    grid(0., 1., 0.)

def test_nearest_rank():
  data = [5., 1., 4., 2., 3.]
  assert nearest_rank(data, 50.) == 3.
  assert nearest_rank(data, 99.) == 5.
  assert nearest_rank(data, 20.) == 1.
  with pytest.raises(ValueError):
    nearest_rank([], 50.)

def test_linear_slope():
  assert linear_slope([0., 1., 2.], [1., 3., 5.]) == pytest.approx(2.)

@pytest.mark.parametrize("threads", [1, 2, 5])
def test_parallel_map_order(threads):
  set_chunksize(3)
  try:
    assert parallel_map(lambda x: x*x, range(20), threads = threads) == [x*x for x in range(20)]
  finally:
    set_chunksize(64)
  with pytest.raises(ValueError):
    set_chunksize(0)
