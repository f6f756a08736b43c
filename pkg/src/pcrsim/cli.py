# This program is free software: you can redistribute it and/or modify it under the terms of the GNU General Public License as published by the Free Software Foundation, either version 3 of the License, or (at your option) any later version.
# This program is distributed in the hope that it will be useful, but WITHOUT ANY WARRANTY; without even the implied warranty of MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE. See the GNU General Public License for more details.
# You should have received a copy of the GNU General Public License along with this program. If not, see <https://www.gnu.org/licenses/>.
# Version: 1.0.0 / 2026.10.19

"""Command-line front end.

   pcrsim <command> --card CARD [options]; commands: sweep, mc, trim, fom, size-sweep, card, corners.
   CSV outputs (standard output or --out) start with a run manifest ("#" comment lines).
   Exit codes: 0 success, 2 input/validation error, 3 numerical failure."""

import os
import sys
import re
import math
import argparse
import datetime
import numpy as np
import pandas as pd
from . import __version__
from .defs import TSTEP, TNORM, FLOATFMT, EXIT_OK, EXIT_INPUT, EXIT_NUMERICAL
from .defs import CardError, TrimError, ModelDomainError, ConvergenceError
from .utils import message, warning, set_verbose, set_chunksize, grid
from .settings import get_default_settings, load_settings
from .techcard import CARDSPATH, load_card, save_card, card_hash, select_resistor
from .circuits import SolverOptions, CircuitOptions, solve_pcr, vdd_min, supply_current
from .trimming import TrimState, trim_state, tc_scan, best_tc_code, search_iref_trim
from .analysis import sweep_temperature, sweep_supply, box_tc, box_ls, v_b2_slope, analytic_tc_conventional, analytic_tc_proposed
from .analysis import analytic_ls, FomInputs, fom1, fom2, size_sweep_2t, corner_scan
from .variability import MismatchSpec, mc_run, analytic_sigma_iref, skewed_corner_scan

# Shipped comparison table.

REFERENCE_TABLE = os.path.join(CARDSPATH, "references.csv")

# Options left out of the run manifest (they do not change the results).

UNRECORDED = ("command", "func", "out", "threads", "quiet", "deterministic", "emit_trials")

###############
# CSV output. #
###############

def fmt(value):
  """Format 'value' for the "#" comment lines."""
  if value is None: return ""
  if isinstance(value, (bool, np.bool_)): return "1" if value else "0"
  if isinstance(value, (int, np.integer)): return str(int(value))
  if isinstance(value, (float, np.floating)):
    if math.isnan(value): return "nan"
    return FLOATFMT % value
  return str(value)

def frame(columns, rows):
  """Return the DataFrame of table 'rows' (lists of values) with columns 'columns'.
     Integer and boolean columns are stored as nullable integers, None as missing values."""
  data = {}
  for index, column in enumerate(columns):
    values = [row[index] for row in rows]
    present = [value for value in values if value is not None]
    if present and all(isinstance(value, (bool, np.bool_, int, np.integer)) for value in present):
      data[column] = pd.array([None if value is None else int(value) for value in values], dtype = "Int64")
    else:
      data[column] = pd.Series(values, dtype = object if any(isinstance(value, str) for value in present) else np.float64)
  return pd.DataFrame(data, columns = list(columns))

class Output:
  """CSV output with run manifest."""

  def __init__(self, args, seed = None):
    self.args = args
    self.seed = seed
    self.stream = None

  def __enter__(self):
    self.stream = open(self.args.out, "w", newline = "", encoding = "utf-8") if self.args.out else sys.stdout
    self.manifest()
    return self

  def __exit__(self, *exc):
    if self.args.out:
      self.stream.close()
    else:
      self.stream.flush()
    return False

  def comment(self, string):
    """Write comment line 'string'."""
    self.stream.write(f"# {string}\n")

  def manifest(self):
    """Write the run manifest."""
    args = self.args
    self.comment(f"pcrsim {__version__}")
    self.comment(f"command: {args.command}")
    card = getattr(args, "card", None)
    if card is not None: self.comment(f"card: {card} sha256={card_hash(card)}")
    table = getattr(args, "table", None)
    if table is not None: self.comment(f"table: {table}")
    options = " ".join(f"{key}={fmt(value)}" for key, value in sorted(vars(args).items()) if key not in UNRECORDED and key not in ("card", "table"))
    self.comment(f"options: {options}")
    self.comment(f"seed: {'none' if self.seed is None else self.seed}")
    if not args.deterministic: self.comment(f"timestamp: {datetime.datetime.now().isoformat(timespec = 'seconds')}")

  def table(self, columns, rows):
    """Write table 'rows' with columns 'columns'. Missing and NaN values are left blank."""
    frame(columns, rows).to_csv(self.stream, index = False, float_format = FLOATFMT, na_rep = "", lineterminator = "\n")

#######################
# Common run options. #
#######################

def setup(args):
  """Load the run settings and return them."""
  settings = load_settings(args.settings) if args.settings else get_default_settings()
  set_verbose(settings["verbose"] and not args.quiet)
  set_chunksize(settings["chunk_size"])
  if args.threads is None: args.threads = settings["threads"]
  if args.threads < 1: raise ValueError("Error, --threads must be >= 1.")
  return settings

def circuit_options(args, card, settings):
  """Return the circuit options of the command line."""
  trim = None
  if args.tc_code is not None or args.iref_code is not None: trim = trim_state(card, args.tc_code, args.iref_code)
  return CircuitOptions(topology = args.circuit, include_diode = not args.no_diode, include_replica = not args.no_replica,
                        include_m7 = False if args.no_m7 else None, trim = trim, vds_factors = not args.ideal,
                        solver = SolverOptions.from_settings(settings))

def supply(args, card):
  """Return the supply voltage of the command line (default: card nominal supply)."""
  return card.v_dd_nominal if args.vdd is None else args.vdd

def parse_grid(string):
  """Parse width grid 'string', either "start:stop:step" or a comma-separated list."""
  try:
    if ":" in string:
      start, stop, step = (float(x) for x in string.split(":"))
      return list(grid(start, stop, step)) if stop > start else [start]
    return [float(x) for x in string.split(",")]
  except ValueError:
    raise ValueError(f"Error, invalid grid '{string}'.") from None

##########
# Sweep. #
##########

def cmd_sweep(args):
  """Temperature or supply sweep."""
  settings = setup(args)
  card = load_card(args.card)
  opts = circuit_options(args, card, settings)
  if args.axis == "temp":
    vdd = supply(args, card)
    tmin = card.t_range[0] if args.min is None else args.min
    tmax = card.t_range[1] if args.max is None else args.max
    step = TSTEP if args.step is None else args.step
    s = sweep_temperature(card, vdd, tmin, tmax, step, opts, threads = args.threads)
  else:
    if args.min is None or args.max is None or args.step is None: raise ValueError("Error, a supply sweep requires --min, --max and --step.")
    s = sweep_supply(card, args.temp, args.min, args.max, args.step, opts, threads = args.threads)
  if args.axis == "temp":
    temp = TNORM if s.x[0] <= TNORM <= s.x[-1] else float(s.x[len(s.x)//2])
    if opts.topology == "proposed":
      analytic = analytic_tc_proposed(card, temp, opts.trim)
    else:
      analytic = analytic_tc_conventional(card, temp)
    summary = [f"box_tc_ppmC = {fmt(box_tc(s))}", f"analytic_tc_ppmC = {fmt(analytic)} (T = {temp:g} °C)"]
    if opts.topology == "proposed": summary.append(f"v_b2_slope_uVC = {fmt(1.e6*v_b2_slope(s))}")
  else:
    x, op = s.samples[len(s.x)//2]
    ls = analytic_ls(card, op, opts)
    summary = [f"ls_pctV = {fmt(box_ls(s))}", f"analytic_ls_pctV = {fmt(ls.percent)} (v_dd = {x:g} V)",
               f"analytic_ls_simplified_pctV = {fmt(ls.percent_simplified)}"]
  with Output(args) as out:
    out.table(["x", "i_ref_A", "v_b2_V", "v_dnw_V", "i_dio_A", "v_gs1_V", "v_sg4_V", "converged"],
              [[float(x), op.i_ref, op.v_b2, op.v_dnw, op.i_dio, op.v_gs1, op.v_sg4, op.converged] for x, op in s.samples])
    for line in summary: out.comment(line)
  return EXIT_OK

################
# Monte-Carlo. #
################

def cmd_mc(args):
  """Monte-Carlo run."""
  settings = setup(args)
  card = load_card(args.card)
  opts = circuit_options(args, card, settings)
  vdd = supply(args, card)
  spec = MismatchSpec.from_card(card, seed = args.seed, scale = args.avt_scale)
  t_range = (args.tmin, args.tmax)
  result = mc_run(card, vdd, t_range, spec, args.n, mode = args.mode, metric = args.metric, opts = opts, trim = args.trim,
                  iref_target = args.iref_target, step = args.step, threads = args.threads, retain = args.emit_trials is not None)
  analytic = None
  if args.mode == "mismatch" and args.trim == "none": analytic = analytic_sigma_iref(card, spec, TNORM, vdd, opts)
  with Output(args, seed = args.seed) as out:
    out.table(["n", "failed", "mean_A", "sigma_A", "sigma_over_mu", "median_tc_ppmC", "p99_tc_ppmC", "analytic_sigma_over_mu", "analytic_sigma_over_mu_lognormal"],
              [[result.n, result.failed, result.mean, result.sigma, result.sigma_over_mu, result.median_tc, result.p99_tc,
                None if analytic is None else analytic.sigma_over_mu_delta, None if analytic is None else analytic.sigma_over_mu_lognormal]])
  if args.emit_trials is not None:
    message(f"Saving trials {args.emit_trials}...")
    trials = argparse.Namespace(**{**vars(args), "out": args.emit_trials})
    with Output(trials, seed = args.seed) as out:
      tcs = [None]*result.n if result.tc is None else list(result.tc)
      codes = [None]*result.n if result.tc_codes is None else list(result.tc_codes)
      out.table(["trial", "i_ref_A", "tc_ppmC", "tc_code"], [[index, result.i_ref[index], tcs[index], codes[index]] for index in range(result.n)])
  return EXIT_OK

#############
# Trimming. #
#############

def cmd_trim(args):
  """TC then I_REF trimming."""
  settings = setup(args)
  card = load_card(args.card)
  opts = circuit_options(args, card, settings)
  vdd = supply(args, card)
  t_range = (args.tmin, args.tmax)
  base = opts.trim if opts.trim is not None else trim_state(card)
  opts = opts.replace(trim = base)
  methods = ("full_profile", "two_point") if args.method == "both" else (args.method,)
  rows = tc_scan(card, vdd, t_range, opts, step = args.step, threads = args.threads)
  chosen = {method: best_tc_code(rows, method) for method in methods}
  tc_code, tc = chosen[methods[0]]
  state = TrimState(tc_code = tc_code, iref_code = base.iref_code)
  target = args.target if args.target is not None else solve_pcr(card, vdd, TNORM, opts).i_out
  iref_code, achieved = search_iref_trim(card, vdd, TNORM, target, opts.replace(trim = state), threads = args.threads)
  final = TrimState(tc_code = tc_code, iref_code = iref_code)
  final_tc = box_tc(sweep_temperature(card, vdd, t_range[0], t_range[1], args.step, opts.replace(trim = final), threads = args.threads))
  results = [f"{method}: tc_code = {code}, box_tc_ppmC = {fmt(value)}" for method, (code, value) in chosen.items()]
  results.append(f"final: tc_code = {tc_code}, iref_code = {iref_code}, box_tc_ppmC = {fmt(final_tc)}, i_ref_A = {fmt(achieved)}, target_A = {fmt(target)}")
  with Output(args) as out:
    out.table(["code", "w5_um", "box_tc_ppmC", "two_point_error", "i_ref_25_A"], [[row.code, row.w5, row.box_tc, row.two_point_error, row.i_ref_25] for row in rows])
    for result in results: out.comment(result)
  if args.out:
    for result in results: print(result)
  return EXIT_OK

#####################
# Figures of merit. #
#####################

FOMCOLUMNS = ("name", "tc", "t_min", "t_max", "area", "power", "v_dd", "i_ref")

def read_fom_table(filename):
  """Read the comparison table 'filename' (CSV, "#" comment lines; columns name, tc (ppm/°C), t_min, t_max (°C),
     area (mm²), power (nW), v_dd (V), i_ref (nA), and optionally fom1_ref, fom2_ref).
     Return the list of (row number, dictionnary) pairs with blank cells as None, and the list of columns. Raise ValueError on malformed rows.
     Short rows are padded with blank cells."""
  with open(filename, "r", encoding = "utf-8") as f:
    numbers = [number for number, line in enumerate(f, start = 1) if line.strip() and not line.lstrip().startswith("#")]
  if not numbers: return [], list(FOMCOLUMNS)
  try:
    table = pd.read_csv(filename, comment = "#", dtype = str, skipinitialspace = True, encoding = "utf-8")
  except pd.errors.ParserError as err:
    match = re.search(r"Expected (\d+) fields in line (\d+), saw (\d+)", str(err))
    if match is None: raise ValueError(f"Error, {filename}: {err}") from None
    expected, number, got = match.groups()
    raise ValueError(f"Error, {filename}, row {number}: expected {expected} fields, got {got}.") from None
  columns = [str(column).strip() for column in table.columns]
  missing = [column for column in FOMCOLUMNS if column not in columns]
  if missing: raise ValueError(f"Error, {filename}: missing column(s) {', '.join(missing)}.")
  rows = []
  for number, cells in zip(numbers[1:], table.itertuples(index = False, name = None)):
    row = {}
    for column, cell in zip(columns, cells):
      cell = None if pd.isna(cell) else cell.strip()
      if column == "name":
        row[column] = "" if cell is None else cell
      elif cell is None or cell == "":
        row[column] = None
      else:
        try:
          row[column] = float(cell)
        except ValueError:
          raise ValueError(f"Error, {filename}, row {number}: invalid {column} '{cell}'.") from None
    for column in ("tc", "t_min", "t_max"):
      if row[column] is None: raise ValueError(f"Error, {filename}, row {number}: missing {column}.")
    rows.append((number, row))
  return rows, columns

def fom_row(number, row):
  """Return (fom1, fom2) of comparison table row 'row' (None when the inputs are incomplete)."""
  i_vdd = None
  if row["power"] is not None and row["v_dd"] is not None: i_vdd = 1.e-9*row["power"]/row["v_dd"]
  i_ref = None if row["i_ref"] is None else 1.e-9*row["i_ref"]
  try:
    f = FomInputs(tc = row["tc"], t_min = row["t_min"], t_max = row["t_max"], area = row["area"], i_vdd = i_vdd, i_ref = i_ref)
  except ValueError as err:
    raise ValueError(f"{err} [row {number}]") from None
  f1 = fom1(f) if f.area is not None else None
  f2 = fom2(f) if f.i_vdd is not None and f.i_ref is not None else None
  return f1, f2

def cmd_fom(args):
  """Figures of merit of a comparison table."""
  setup(args)
  if args.table is None: args.table = REFERENCE_TABLE
  message(f"Loading table {args.table}...")
  rows, columns = read_fom_table(args.table)
  with Output(args) as out:
    out.table(columns+["fom1", "fom2"], [[row[column] for column in columns]+list(fom_row(number, row)) for number, row in rows])
  return EXIT_OK

################
# Sizing maps. #
################

def cmd_size_sweep(args):
  """2T sizing map."""
  settings = setup(args)
  card = load_card(args.card)
  opts = circuit_options(args, card, settings)
  cells = size_sweep_2t(card, parse_grid(args.w5), parse_grid(args.w6), supply(args, card), (args.tmin, args.tmax), opts, step = args.step, threads = args.threads)
  with Output(args) as out:
    out.table(["w5_um", "w6_um", "v_b2_slope_uVC", "tc_ppmC", "converged"], [[cell.w5, cell.w6, cell.v_b2_slope, cell.tc, cell.converged] for cell in cells])
  failed = [cell for cell in cells if not cell.converged]
  for cell in failed: warning(f"W5 = {cell.w5:g} µm, W6 = {cell.w6:g} µm: {cell.error}")
  if len(failed) == len(cells): raise ConvergenceError("Error, no cell of the sizing map converged.")
  return EXIT_OK

##########
# Cards. #
##########

def cmd_card(args):
  """Validate and summarize a card."""
  settings = setup(args)
  card = load_card(args.card)
  lines = [f"Card {card.name}: {card.description}",
           f"t_ref = {card.t_ref:g} °C, v_dd_nominal = {card.v_dd_nominal:g} V, validity range [{card.t_range[0]:g}, {card.t_range[1]:g}] °C",
           f"Mirror J = {card.mirror_J:g}, K = {card.mirror_K:g}"]
  for role, p in card.devices.items():
    lines.append(f"{role}: {p.name}, {p.polarity}MOS {p.flavor}, W = {p.W:g} µm x {p.mult:g}, L = {p.L:g} µm, n = {p.n:g}, V_T0 = {p.vt0_ref:g} V, body model {p.body_model}")
  r = card.resistor
  lines.append(f"Resistor {r.type}: R = {r.r_ref:.6g} ohms, alpha1 = {r.alpha1:g} /°C, alpha2 = {r.alpha2:g} /°C²")
  if card.resistor_table: lines.append(f"Densest resistor type: {select_resistor(card.resistor_table).type}")
  if card.trim is not None:
    t = card.trim
    lines.append(f"Trim: TC {t.tc_bits} bits (code {t.tc_code}), I_REF {t.iref_bits} bits {t.iref_style} (code {t.iref_code})")
  lines.append(f"Corners: {', '.join(card.corners)}")
  try:
    opts = CircuitOptions(solver = SolverOptions.from_settings(settings))
    op = solve_pcr(card, card.v_dd_nominal, TNORM, opts)
    lines.append(f"I_REF(25 °C) = {op.i_ref:.6e} A, V_B2 = {op.v_b2:.6f} V, I_VDD = {supply_current(card, op, opts):.6e} A, V_DD,min = {vdd_min(card, TNORM, opts):.4f} V")
  except (ConvergenceError, ModelDomainError) as err:
    lines.append(f"No operating point at the nominal supply: {err}")
  with Output(args) as out:
    for line in lines: out.comment(line)
  if args.save: save_card(card, args.save)
  return EXIT_OK

############
# Corners. #
############

def cmd_corners(args):
  """Corner scans."""
  settings = setup(args)
  card = load_card(args.card)
  opts = circuit_options(args, card, settings)
  vdd = supply(args, card)
  t_range = (args.tmin, args.tmax)
  with Output(args) as out:
    if args.skewed:
      flavors = tuple(flavor.strip() for flavor in args.skewed.split(","))
      cells = skewed_corner_scan(card, flavors, vdd, t_range, opts, trimmed = args.trimmed, step = args.step, threads = args.threads)
      out.table(["corner_a", "corner_b", "i_ref_25_A", "tc_ppmC", "v_b2_slope_delta_uVC", "tc_code", "converged"],
                [[cell.corner_a, cell.corner_b, cell.i_ref_25, cell.tc, 1.e6*cell.v_b2_slope_delta, cell.tc_code, cell.converged] for cell in cells])
    else:
      cells = corner_scan(card, vdd, t_range, opts, trimmed = args.trimmed, step = args.step, threads = args.threads)
      out.table(["corner", "i_ref_25_A", "tc_ppmC", "v_b2_slope_uVC", "tc_code", "converged"],
                [[cell.corner, cell.i_ref_25, cell.tc, 1.e6*cell.v_b2_slope, cell.tc_code, cell.converged] for cell in cells])
  for cell in cells:
    if not cell.converged: warning(cell.error)
  return EXIT_OK

###########
# Parser. #
###########

def build_parser():
  """Return the command-line parser."""
  common = argparse.ArgumentParser(add_help = False)
  common.add_argument("--out", default = None, help = "output file (default: standard output)")
  common.add_argument("--deterministic", action = "store_true", help = "suppress the timestamp for byte-identical outputs")
  common.add_argument("--threads", type = int, default = None, help = "number of dask threads")
  common.add_argument("--settings", default = None, help = "settings file (python dictionary)")
  common.add_argument("--quiet", action = "store_true", help = "no progress messages")
  withcard = argparse.ArgumentParser(add_help = False)
  withcard.add_argument("--card", required = True, help = "technology card file or shipped card name (bulk110, fdsoi22)")
  circuit = argparse.ArgumentParser(add_help = False)
  circuit.add_argument("--circuit", choices = ("proposed", "conventional"), default = "proposed")
  circuit.add_argument("--vdd", type = float, default = None, help = "supply voltage (V, default: card nominal supply)")
  circuit.add_argument("--no-diode", action = "store_true", help = "ignore the p-well/deep n-well junction")
  circuit.add_argument("--no-replica", action = "store_true", help = "bias the deep n-well at V_DD")
  circuit.add_argument("--no-m7", action = "store_true", help = "ignore the stacked device M7")
  circuit.add_argument("--ideal", action = "store_true", help = "ignore the drain factors (ideal saturated devices)")
  circuit.add_argument("--tc-code", type = int, default = None, help = "TC trimming code (default: card nominal code)")
  circuit.add_argument("--iref-code", type = int, default = None, help = "I_REF trimming code (default: card nominal code)")
  trange = argparse.ArgumentParser(add_help = False)
  trange.add_argument("--tmin", type = float, default = -40., help = "minimum temperature (°C)")
  trange.add_argument("--tmax", type = float, default = 85., help = "maximum temperature (°C)")
  trange.add_argument("--step", type = float, default = TSTEP, help = "temperature step (°C)")
  parser = argparse.ArgumentParser(prog = "pcrsim", description = "Analytic simulator for nA-range subthreshold peaking current references.")
  parser.add_argument("--version", action = "version", version = f"pcrsim {__version__}")
  commands = parser.add_subparsers(dest = "command", required = True)
  p = commands.add_parser("sweep", parents = [common, withcard, circuit], help = "temperature or supply sweep")
  p.add_argument("--axis", choices = ("temp", "vdd"), default = "temp")
  p.add_argument("--min", type = float, default = None, help = "sweep start (°C or V)")
  p.add_argument("--max", type = float, default = None, help = "sweep stop (°C or V)")
  p.add_argument("--step", type = float, default = None, help = "sweep step (°C or V)")
  p.add_argument("--temp", type = float, default = TNORM, help = "temperature of supply sweeps (°C)")
  p.set_defaults(func = cmd_sweep)
  p = commands.add_parser("mc", parents = [common, withcard, circuit, trange], help = "Monte-Carlo run")
  p.add_argument("--n", type = int, default = 1000, help = "number of trials")
  p.add_argument("--seed", type = int, default = 0, help = "random seed")
  p.add_argument("--mode", choices = ("mismatch", "process", "both"), default = "mismatch")
  p.add_argument("--metric", choices = ("iref_at_25C", "box_tc"), default = "iref_at_25C")
  p.add_argument("--trim", choices = ("none", "tc", "tc_iref"), default = "none")
  p.add_argument("--iref-target", type = float, default = None, help = "I_REF trimming target (A)")
  p.add_argument("--avt-scale", type = float, default = 1., help = "scale factor of the Pelgrom coefficients")
  p.add_argument("--emit-trials", default = None, help = "write the per-trial values in this CSV file")
  p.set_defaults(func = cmd_mc)
  p = commands.add_parser("trim", parents = [common, withcard, circuit, trange], help = "TC then I_REF trimming")
  p.add_argument("--method", choices = ("full_profile", "two_point", "both"), default = "both")
  p.add_argument("--target", type = float, default = None, help = "I_REF target (A, default: nominal output current at 25 °C)")
  p.set_defaults(func = cmd_trim)
  p = commands.add_parser("fom", parents = [common], help = "figures of merit of a comparison table")
  p.add_argument("--table", default = None, help = "comparison table (default: shipped references.csv)")
  p.set_defaults(func = cmd_fom)
  p = commands.add_parser("size-sweep", parents = [common, withcard, circuit, trange], help = "2T sizing map")
  p.add_argument("--w5", required = True, help = "total widths of M5 (µm): start:stop:step or comma-separated list")
  p.add_argument("--w6", required = True, help = "total widths of M6 (µm): start:stop:step or comma-separated list")
  p.set_defaults(func = cmd_size_sweep)
  p = commands.add_parser("card", parents = [common, withcard], help = "validate and summarize a card")
  p.add_argument("--save", default = None, help = "save the card in this file")
  p.set_defaults(func = cmd_card)
  p = commands.add_parser("corners", parents = [common, withcard, circuit, trange], help = "corner scans")
  p.add_argument("--skewed", default = None, help = "skewed corners of the two flavors FLAVOR_A,FLAVOR_B")
  p.add_argument("--trimmed", action = "store_true", help = "trim the TC in each corner")
  p.set_defaults(func = cmd_corners)
  return parser

def run(argv = None):
  """Run pcrsim with command-line arguments 'argv' (default: sys.argv). Return the exit code."""
  parser = build_parser()
  try:
    args = parser.parse_args(argv)
  except SystemExit as err:
    return EXIT_OK if err.code == 0 else EXIT_INPUT
  try:
    return args.func(args)
  except (ConvergenceError, ModelDomainError) as err:
    print(str(err), file = sys.stderr)
    return EXIT_NUMERICAL
  except (CardError, TrimError, ValueError, OSError) as err:
    print(str(err), file = sys.stderr)
    return EXIT_INPUT
