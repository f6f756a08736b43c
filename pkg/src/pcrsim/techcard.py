# This program is free software: you can redistribute it and/or modify it under the terms of the GNU General Public License as published by the Free Software Foundation, either version 3 of the License, or (at your option) any later version.
# This program is distributed in the hope that it will be useful, but WITHOUT ANY WARRANTY; without even the implied warranty of MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE. See the GNU General Public License for more details.
# You should have received a copy of the GNU General Public License along with this program. If not, see <https://www.gnu.org/licenses/>.
# Version: 1.0.0 / 2026.10.19

"""Technology cards.

   A technology card holds all the parameters of a design in one technology: the behavioral models of the
   transistors (one MosfetParams per circuit role), of the resistor and of the parasitic diodes, the mirror
   ratios, the resistor properties table, the process corners, the trimming configuration and the default
   variability parameters. Cards are stored as JSON files (one card per file) and are immutable once loaded."""

import os
import json
import math
import hashlib
import dataclasses
from dataclasses import dataclass, field
from .defs import TVALID, CardError
from .utils import message

# Device roles.

REQUIRED_ROLES = ("M1", "M2", "M3", "M4", "M5", "M6", "M5B", "M6B")
OPTIONAL_ROLES = ("M7", "M7B")
ROLES = REQUIRED_ROLES+OPTIONAL_ROLES

# Body effect models.

BODY_MODELS = ("linearized", "bulk_sqrt")

# I_REF trimming styles.

IREF_STYLES = ("series_resistor", "output_mirror")

# Shipped cards.

CARDSPATH = os.path.join(os.path.dirname(os.path.abspath(__file__)), "cards")
SHIPPED = ("bulk110", "fdsoi22")

#################
# Domain types. #
#################

@dataclass(frozen = True)
class MosfetParams:
  """Behavioral subthreshold model of a MOSFET.
     pMOS parameters (vt0_ref, ...) are given as magnitudes, and pMOS biases as V_SG, V_SD, V_SB."""
  name: str
  polarity: str
  flavor: str
  n: float
  vt0_ref: float
  k_vt: float
  isq_ref: float
  m_mu: float
  W: float
  L: float
  mult: int = 1
  gamma_star_ref: float = 0.
  k_gamma: float = 0.
  body_model: str = "linearized"
  gamma_b: float = None
  phi_fp_ref: float = None
  k_phi: float = None
  lambda_: float = 0.
  t_ref: float = 25.

  def size(self):
    """Return the aspect ratio S = W/L times the multiplicity."""
    return self.W*self.mult/self.L

  def area(self):
    """Return the gate area W*L*mult (µm²)."""
    return self.W*self.L*self.mult

@dataclass(frozen = True)
class ResistorParams:
  """Resistor with quadratic temperature law R(T) = r_ref*(1+alpha1*dT+alpha2*dT**2), dT = T-t_ref."""
  r_ref: float
  alpha1: float = 0.
  alpha2: float = 0.
  t_ref: float = 25.
  n_segments: int = 1
  type: str = ""

@dataclass(frozen = True)
class DiodeParams:
  """Reverse-biased junction leakage model."""
  j_ref: float
  theta: float
  t_ref: float = 25.
  v_ref: float = 1.
  kappa: float = 0.
  area: float = 0.

@dataclass(frozen = True)
class FlavorShift:
  """Process shift of a device flavor: additive V_T0 shift dvt0 (V), multiplicative factor mu_mult on isq_ref."""
  dvt0: float = 0.
  mu_mult: float = 1.

@dataclass(frozen = True)
class CornerSpec:
  """Process corner: shifts per flavor (missing flavors are not shifted) and a resistor multiplier."""
  flavors: dict = field(default_factory = dict)
  resistor_mult: float = 1.

@dataclass(frozen = True)
class ResistorRow:
  """Resistor properties table row (normalized density and |TCR|, TCR sign)."""
  type: str
  density: float
  tcr: float
  tcr_sign: int = 1

@dataclass(frozen = True)
class TrimConfig:
  """Trimming configuration (TC trim by the effective width of M5, I_REF trim by a series resistor or an output mirror).
     tc_code and iref_code are the nominal (untrimmed) codes."""
  tc_bits: int
  tc_unit_w: float
  tc_fixed_w: float
  iref_style: str
  iref_bits: int
  r_unit: float = None
  r_fixed: float = None
  mirror_fixed: int = None
  mirror_ref: int = None
  tc_code: int = 0
  iref_code: int = 0

@dataclass(frozen = True)
class MismatchParams:
  """Default mismatch parameters: Pelgrom coefficients a_vt per flavor (V.µm), relative sigma of the mirror ratio."""
  a_vt: dict = field(default_factory = dict)
  sigma_mirror: float = 0.

@dataclass(frozen = True)
class ProcessParams:
  """Global process variations: sigma of V_T0 (V), of ln(isq) and of ln(R)."""
  sigma_dvt0: float = 0.015
  sigma_ln_isq: float = 0.1
  sigma_ln_r: float = 0.08

@dataclass(frozen = True)
class TechnologyCard:
  """Technology card."""
  name: str
  t_ref: float
  devices: dict
  resistor: ResistorParams
  diode_pw_dnw: DiodeParams
  mirror_J: float = 1.
  mirror_K: float = 1.
  mirror_delta: float = 0.
  diode_nw: DiodeParams = None
  resistor_table: tuple = ()
  corners: dict = field(default_factory = dict)
  trim: TrimConfig = None
  description: str = ""
  v_dd_nominal: float = 1.
  t_range: tuple = TVALID
  mismatch: MismatchParams = field(default_factory = MismatchParams)
  process: ProcessParams = field(default_factory = ProcessParams)

  def device(self, role):
    """Return the parameters of the device with role 'role'."""
    try:
      return self.devices[role]
    except KeyError:
      raise CardError(f"Error, missing device role {role}.") from None

  def has(self, role):
    """Return True if the card declares device role 'role'."""
    return role in self.devices

  def flavors(self):
    """Return the sorted list of device flavors."""
    return sorted({p.flavor for p in self.devices.values()})

####################
# Card validation. #
####################

def _check(condition, error):
  """Raise CardError(error) if condition is False."""
  if not condition: raise CardError(f"Error, {error}.")

def validate_mosfet(p, where):
  """Check the invariants of MosfetParams 'p' (described as 'where' in error messages)."""
  _check(p.polarity in ("n", "p"), f"{where}: polarity must be 'n' or 'p'")
  _check(p.n > 1., f"{where}: n must be > 1")
  _check(p.W > 0. and p.L > 0., f"{where}: W and L must be > 0")
  _check(isinstance(p.mult, int) and p.mult >= 1, f"{where}: mult must be an integer >= 1")
  _check(p.isq_ref > 0., f"{where}: isq_ref must be > 0")
  _check(p.lambda_ >= 0., f"{where}: lambda must be >= 0")
  _check(p.body_model in BODY_MODELS, f"{where}: body_model must be one of {BODY_MODELS}")
  if p.body_model == "bulk_sqrt":
    _check(p.gamma_b is not None and p.gamma_b > 0., f"{where}: bulk_sqrt body model requires gamma_b > 0")
    _check(p.phi_fp_ref is not None and p.phi_fp_ref > 0., f"{where}: bulk_sqrt body model requires phi_fp_ref > 0")
    _check(p.k_phi is not None, f"{where}: bulk_sqrt body model requires k_phi")

def validate_card(card):
  """Check all invariants of the technology card 'card'. Raise CardError on failure."""
  for role in REQUIRED_ROLES:
    _check(role in card.devices, f"missing device role {role}")
  for role, p in card.devices.items():
    _check(role in ROLES, f"unknown device role {role}")
    validate_mosfet(p, f"device {role}")
  _check(card.device("M3").polarity == "p" and card.device("M4").polarity == "p", "M3 and M4 must be pMOS")
  _check(card.has("M7") or not card.has("M7B"), "M7B requires M7")
  _check(card.mirror_J >= 1., "mirror_J must be >= 1")
  _check(card.mirror_K >= 1., "mirror_K must be >= 1")
  _check(card.mirror_delta > -1., "mirror_delta must be > -1")
  r = card.resistor
  _check(r.r_ref > 0., "resistor: r_ref must be > 0")
  _check(isinstance(r.n_segments, int) and r.n_segments >= 1, "resistor: n_segments must be an integer >= 1")
  for key in ("diode_pw_dnw", "diode_nw"):
    d = getattr(card, key)
    if d is None: continue
    _check(d.j_ref >= 0., f"{key}: j_ref must be >= 0")
    _check(d.theta > 0., f"{key}: theta must be > 0")
    _check(d.area >= 0., f"{key}: area must be >= 0")
    _check(d.kappa >= 0. and d.kappa*d.v_ref < 1., f"{key}: kappa must be >= 0 and kappa*v_ref < 1")
  for row in card.resistor_table:
    _check(row.density > 0. and row.tcr >= 0. and row.tcr_sign in (-1, 1), f"resistor_table: invalid row '{row.type}'")
  _check("TT" in card.corners, "missing corner TT")
  tt = card.corners["TT"]
  _check(tt.resistor_mult == 1. and all(s.dvt0 == 0. and s.mu_mult == 1. for s in tt.flavors.values()), "corner TT must be the identity")
  for name, corner in card.corners.items():
    _check(corner.resistor_mult > 0., f"corner {name}: resistor_mult must be > 0")
    for flavor, shift in corner.flavors.items():
      _check(shift.mu_mult > 0., f"corner {name}, flavor {flavor}: mu_mult must be > 0")
  tmin, tmax = card.t_range
  _check(tmin < tmax, "t_range: t_min must be < t_max")
  _check(card.v_dd_nominal > 0., "v_dd_nominal must be > 0")
  if card.trim is not None: validate_trim(card.trim)
  for flavor, avt in card.mismatch.a_vt.items():
    _check(avt >= 0., f"mismatch: a_vt of flavor {flavor} must be >= 0")
  _check(card.mismatch.sigma_mirror >= 0., "mismatch: sigma_mirror must be >= 0")
  proc = card.process
  _check(proc.sigma_dvt0 >= 0. and proc.sigma_ln_isq >= 0. and proc.sigma_ln_r >= 0., "process: sigmas must be >= 0")

def validate_trim(cfg):
  """Check the invariants of the trimming configuration 'cfg'."""
  _check(cfg.tc_bits >= 1 and cfg.iref_bits >= 1, "trim: bits must be >= 1")
  _check(cfg.tc_unit_w > 0. and cfg.tc_fixed_w > 0., "trim: tc_unit_w and tc_fixed_w must be > 0")
  _check(cfg.iref_style in IREF_STYLES, f"trim: iref_style must be one of {IREF_STYLES}")
  if cfg.iref_style == "series_resistor":
    _check(cfg.r_unit is not None and cfg.r_unit > 0., "trim: r_unit must be > 0")
    _check(cfg.r_fixed is not None and cfg.r_fixed > 0., "trim: r_fixed must be > 0")
  else:
    _check(isinstance(cfg.mirror_fixed, int) and cfg.mirror_fixed >= 0, "trim: mirror_fixed must be an integer >= 0")
    _check(isinstance(cfg.mirror_ref, int) and cfg.mirror_ref >= 1, "trim: mirror_ref must be an integer >= 1")
  _check(0 <= cfg.tc_code < 2**cfg.tc_bits, "trim: tc_code out of range")
  _check(0 <= cfg.iref_code < 2**cfg.iref_bits, "trim: iref_code out of range")

####################
# JSON (de)coding. #
####################

# JSON names of the dataclass fields that are Python keywords.

JSONNAMES = {"lambda_": "lambda"}

def _is_number(value):
  """Return True if 'value' is a JSON number."""
  return isinstance(value, (int, float)) and not isinstance(value, bool)

def _convert(value, kind, where):
  """Convert JSON value 'value' to a field of type 'kind'."""
  if value is None: return None
  if kind is float:
    _check(_is_number(value) and math.isfinite(value), f"{where} must be a finite number")
    return float(value)
  if kind is int:
    _check(isinstance(value, int) and not isinstance(value, bool), f"{where} must be an integer")
    return value
  if kind is str:
    _check(isinstance(value, str), f"{where} must be a string")
    return value
  return value

def _decode(cls, data, where, **extra):
  """Decode JSON object 'data' into dataclass 'cls'. Unknown fields are rejected, missing mandatory fields reported.
     The keyword arguments 'extra' override fields absent from 'data'."""
  _check(isinstance(data, dict), f"{where} must be an object")
  names = {JSONNAMES.get(f.name, f.name): f for f in dataclasses.fields(cls)}
  for key in data:
    _check(key in names, f"unknown field '{key}' in {where}")
  kwargs = {}
  for key, f in names.items():
    if key in data:
      kwargs[f.name] = _convert(data[key], f.type, f"{where}.{key}")
    elif f.name in extra:
      kwargs[f.name] = extra[f.name]
    else:
      _check(f.default is not dataclasses.MISSING or f.default_factory is not dataclasses.MISSING, f"missing field '{key}' in {where}")
  return cls(**kwargs)

def _encode(obj):
  """Encode dataclass 'obj' as a JSON object."""
  return {JSONNAMES.get(f.name, f.name): getattr(obj, f.name) for f in dataclasses.fields(obj)}

def card_from_dict(data):
  """Return the technology card described by the dictionary 'data' (parsed JSON).
     Raise CardError if the card is invalid."""
  _check(isinstance(data, dict), "card must be an object")
  known = ("name", "description", "t_ref", "t_range", "v_dd_nominal", "devices", "resistor", "diode_pw_dnw", "diode_nw", "mirror_J", "mirror_K", "mirror_delta",
           "resistor_table", "corners", "trim", "mismatch", "process")
  for key in data:
    _check(key in known, f"unknown field '{key}' in card")
  for key in ("name", "t_ref", "devices", "resistor", "diode_pw_dnw"):
    _check(key in data, f"missing field '{key}' in card")
  tref = _convert(data["t_ref"], float, "t_ref")
  devices = data["devices"]
  _check(isinstance(devices, dict), "devices must be an object")
  for role in REQUIRED_ROLES:
    _check(role in devices, f"missing device role {role}")
  devs = {role: _decode(MosfetParams, spec, f"devices.{role}", name = role, t_ref = tref) for role, spec in devices.items()}
  corners = {}
  for name, spec in data.get("corners", {"TT": {}}).items():
    _check(isinstance(spec, dict), f"corners.{name} must be an object")
    for key in spec:
      _check(key in ("flavors", "resistor_mult"), f"unknown field '{key}' in corners.{name}")
    flavors = {flavor: _decode(FlavorShift, shift, f"corners.{name}.flavors.{flavor}") for flavor, shift in spec.get("flavors", {}).items()}
    corners[name] = CornerSpec(flavors = flavors, resistor_mult = _convert(spec.get("resistor_mult", 1.), float, f"corners.{name}.resistor_mult"))
  table = tuple(_decode(ResistorRow, row, f"resistor_table[{irow}]") for irow, row in enumerate(data.get("resistor_table", [])))
  mismatch = data.get("mismatch", {})
  _check(isinstance(mismatch, dict), "mismatch must be an object")
  for key in mismatch:
    _check(key in ("a_vt", "sigma_mirror"), f"unknown field '{key}' in mismatch")
  avt = {flavor: _convert(value, float, f"mismatch.a_vt.{flavor}") for flavor, value in mismatch.get("a_vt", {}).items()}
  trange = data.get("t_range", list(TVALID))
  _check(isinstance(trange, list) and len(trange) == 2, "t_range must be a [t_min, t_max] list")
  card = TechnologyCard(
    name = _convert(data["name"], str, "name"),
    description = _convert(data.get("description", ""), str, "description"),
    t_ref = tref,
    t_range = tuple(_convert(t, float, "t_range") for t in trange),
    v_dd_nominal = _convert(data.get("v_dd_nominal", 1.), float, "v_dd_nominal"),
    devices = devs,
    resistor = _decode(ResistorParams, data["resistor"], "resistor", t_ref = tref),
    diode_pw_dnw = _decode(DiodeParams, data["diode_pw_dnw"], "diode_pw_dnw", t_ref = tref),
    diode_nw = _decode(DiodeParams, data["diode_nw"], "diode_nw", t_ref = tref) if data.get("diode_nw") is not None else None,
    mirror_J = _convert(data.get("mirror_J", 1.), float, "mirror_J"),
    mirror_K = _convert(data.get("mirror_K", 1.), float, "mirror_K"),
    mirror_delta = _convert(data.get("mirror_delta", 0.), float, "mirror_delta"),
    resistor_table = table,
    corners = corners,
    trim = _decode(TrimConfig, data["trim"], "trim") if data.get("trim") is not None else None,
    mismatch = MismatchParams(a_vt = avt, sigma_mirror = _convert(mismatch.get("sigma_mirror", 0.), float, "mismatch.sigma_mirror")),
    process = _decode(ProcessParams, data.get("process", {}), "process"))
  validate_card(card)
  return card

def card_to_dict(card):
  """Return the technology card 'card' as a dictionary (JSON-serializable)."""
  return {
    "name": card.name,
    "description": card.description,
    "t_ref": card.t_ref,
    "t_range": list(card.t_range),
    "v_dd_nominal": card.v_dd_nominal,
    "devices": {role: _encode(p) for role, p in card.devices.items()},
    "resistor": _encode(card.resistor),
    "diode_pw_dnw": _encode(card.diode_pw_dnw),
    "diode_nw": _encode(card.diode_nw) if card.diode_nw is not None else None,
    "mirror_J": card.mirror_J,
    "mirror_K": card.mirror_K,
    "mirror_delta": card.mirror_delta,
    "resistor_table": [_encode(row) for row in card.resistor_table],
    "corners": {name: {"flavors": {flavor: _encode(shift) for flavor, shift in corner.flavors.items()}, "resistor_mult": corner.resistor_mult}
                for name, corner in card.corners.items()},
    "trim": _encode(card.trim) if card.trim is not None else None,
    "mismatch": {"a_vt": dict(card.mismatch.a_vt), "sigma_mirror": card.mismatch.sigma_mirror},
    "process": _encode(card.process)}

###############
# Card files. #
###############

def card_path(path):
  """Return the path of card 'path', which can also be the name of a shipped card (e.g. "fdsoi22")."""
  if path in SHIPPED: return os.path.join(CARDSPATH, path+".json")
  return path

def load_card(path):
  """Load and validate the technology card in file 'path' (or shipped card 'path').
     Raise CardError if the file can not be parsed or if the card is invalid."""
  filename = card_path(path)
  message(f"Loading card {filename}...")
  try:
    with open(filename, "r", encoding = "utf-8") as f:
      text = f.read()
  except OSError as err:
    raise CardError(f"Error, can not read card file {filename} ({err.strerror}).") from None
  try:
    data = json.loads(text)
  except json.JSONDecodeError as err:
    raise CardError(f"Error, {filename}, line {err.lineno}, column {err.colno}: {err.msg}.") from None
  try:
    return card_from_dict(data)
  except CardError as err:
    raise CardError(f"{err} [{filename}]") from None

def save_card(card, path):
  """Save technology card 'card' in file 'path'."""
  message(f"Saving card {path}...")
  with open(path, "w", encoding = "utf-8") as f:
    json.dump(card_to_dict(card), f, indent = 2, ensure_ascii = False)
    f.write("\n")

def card_hash(path):
  """Return the SHA-256 hash of the card file 'path' (or shipped card 'path')."""
  with open(card_path(path), "rb") as f:
    return hashlib.sha256(f.read()).hexdigest()

####################
# Card transforms. #
####################

def with_device(card, role, **changes):
  """Return a copy of card 'card' with the fields 'changes' of device 'role' replaced."""
  devices = dict(card.devices)
  devices[role] = dataclasses.replace(card.device(role), **changes)
  return dataclasses.replace(card, devices = devices)

def _shift_device(p, corner):
  """Return device 'p' shifted by corner 'corner' (if its flavor is listed)."""
  shift = corner.flavors.get(p.flavor)
  if shift is None: return p
  return dataclasses.replace(p, vt0_ref = p.vt0_ref+shift.dvt0, isq_ref = p.isq_ref*shift.mu_mult)

def _corner(card, name):
  """Return corner 'name' of card 'card'."""
  try:
    return card.corners[name]
  except KeyError:
    raise CardError(f"Error, unknown corner '{name}'.") from None

def apply_corner(card, corner, flavors = None):
  """Return card 'card' in process corner 'corner'.
     'corner' is either the name of a corner (e.g. "FF"), applied to all flavors and to the resistor, or a skewed
     pair (cornerA, cornerB) applied to the device flavors flavors = (flavorA, flavorB); the other flavors and
     the resistor are left in their typical state. The input card is not modified."""
  if isinstance(corner, str):
    spec = _corner(card, corner)
    devices = {role: _shift_device(p, spec) for role, p in card.devices.items()}
    rmult = spec.resistor_mult
  else:
    if flavors is None or len(flavors) != 2 or len(corner) != 2: raise CardError("Error, a skewed corner needs a pair of corners and a pair of flavors.")
    specs = {flavor: _corner(card, name) for flavor, name in zip(flavors, corner)}
    devices = {}
    for role, p in card.devices.items():
      spec = specs.get(p.flavor)
      devices[role] = _shift_device(p, spec) if spec is not None else p
    rmult = 1.
  resistor = dataclasses.replace(card.resistor, r_ref = card.resistor.r_ref*rmult)
  trim = card.trim
  if trim is not None and trim.iref_style == "series_resistor":
    trim = dataclasses.replace(trim, r_unit = trim.r_unit*rmult, r_fixed = trim.r_fixed*rmult)
  return dataclasses.replace(card, devices = devices, resistor = resistor, trim = trim)

#######################
# Resistor selection. #
#######################

def select_resistor(table, objective = "max_density"):
  """Return the row of the resistor properties table 'table' with the highest density (objective = "max_density")
     or the lowest |TCR| (objective = "min_tcr"). Ties are broken by the first listed row."""
  if len(table) == 0: raise CardError("Error, empty resistor table.")
  if objective == "max_density":
    score = lambda row: -row.density
  elif objective == "min_tcr":
    score = lambda row: row.tcr
  else:
    raise ValueError(f"Error, unknown objective '{objective}'.")
  best = table[0]
  for row in table[1:]:
    if score(row) < score(best): best = row
  return best

def resistor_relative_area(table, r):
  """Return {type: area} with the relative silicon area (r/density, arbitrary units) of a resistor 'r' (ohms) of each type of the table."""
  return {row.type: r/row.density for row in table}
