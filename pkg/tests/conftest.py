"""Shared fixtures: the shipped cards and textbook cards built in code."""

import math
import dataclasses
import pytest
from pcrsim.utils import set_verbose, kelvin
from pcrsim.techcard import load_card, with_device
from pcrsim.devmodel import thermal_voltage

set_verbose(False)

@pytest.fixture(scope = "session")
def bulk():
  return load_card("bulk110")

@pytest.fixture(scope = "session")
def fdsoi():
  return load_card("fdsoi22")

@pytest.fixture(params = ["bulk110", "fdsoi22"], scope = "session")
def card(request):
  return load_card(request.param)

def no_lambda(card):
  """Return card 'card' with zero channel-length modulation on all devices."""
  devices = {role: dataclasses.replace(p, lambda_ = 0.) for role, p in card.devices.items()}
  return dataclasses.replace(card, devices = devices)

def conventional_card(card, K = 8.):
  """Return a textbook conventional card: zero-TCR resistor, no channel-length modulation, mirror K."""
  card = no_lambda(card)
  resistor = dataclasses.replace(card.resistor, alpha1 = 0., alpha2 = 0.)
  return dataclasses.replace(card, resistor = resistor, mirror_J = 1., mirror_K = K)

def zero_tc_card(card):
  """Return linearized-body card 'card' with the width of M6 (and M7) set so that (1/V_B2)dV_B2/dT equals the
     resistor TCR at 25 °C (closed-form 2T generator, equal mobility exponents, no channel-length modulation)."""
  card = no_lambda(card)
  m5, m6 = card.device("M5"), card.device("M6")
  assert m5.m_mu == m6.m_mu and m5.n == m6.n
  alpha = card.resistor.alpha1
  nut = m5.n*thermal_voltage(25.)
  c = m5.vt0_ref-m6.vt0_ref
  x = (alpha*c-(m5.k_vt-m6.k_vt))/(nut*(1./kelvin(25.)-alpha))
  w6 = m5.size()*math.exp(x)*m6.L/m6.mult
  card = with_device(card, "M6", W = w6)
  if card.has("M7"): card = with_device(card, "M7", W = w6)
  return dataclasses.replace(card, resistor = dataclasses.replace(card.resistor, alpha2 = 0.))
