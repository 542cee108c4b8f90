import numpy as np
import pytest

from vnwfet.cards import default_card
from vnwfet.compact_model import DeviceGeometry, ModelCard


@pytest.fixture(scope="session")
def card():
    """The shipped calibrated p-type card (NF=16)."""
    return default_card()


@pytest.fixture(scope="session")
def card1(card):
    return card.with_nf(1)


def make_card(radius=8e-9, length=14e-9, tox=5e-9, l_access=20e-9, nf=1,
              polarity="p_type", doping=2e25, vfb=2.2, eta=1.2,
              mu0=2.3e-4, rs=0.0, rd=0.0, **kw):
    """Hand-built card with zero series resistance and no GIDL by default."""
    geometry = DeviceGeometry(radius_R=radius, gate_length_L=length,
                              oxide_thickness_tox=tox,
                              access_length_LAccess=l_access,
                              nanowire_count_NF=nf)
    base = dict(polarity=polarity, doping_ND=doping, flatband_VFB=vfb,
                interface_trap_eta=eta, low_field_mobility_mu0=mu0,
                saturation_velocity_vsat=5e6, series_RS=rs, series_RD=rd,
                resistance_bias_eta1=0.5, dibl_coefficient=0.0,
                vds_range=(0.0, 1.0), gidl_A=0.0, gidl_B=2.13e9,
                gidl_C=0.5, temperature=300.0)
    base.update(kw)
    return ModelCard(geometry=geometry, **base)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
