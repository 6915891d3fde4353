import pytest
from hypothesis import given
from hypothesis import strategies as st

from eitsim.errors import InvalidInputError
from eitsim.params import TWO_PI
from eitsim.transit import (
    TransportSpec,
    ballistic_transit_time,
    collision_count,
    diffusive_transit_time,
    gamma_raman_estimate,
    mean_thermal_speed,
    random_walk_transit_time,
    residual_for_target,
)

DEFAULT = TransportSpec()


def test_collision_count_examples():
    assert collision_count(0.01, DEFAULT) == pytest.approx(1e4, rel=1e-12)
    assert collision_count(1e-4, DEFAULT) == pytest.approx(1.0)
    assert collision_count(0.02, DEFAULT) == pytest.approx(4e4, rel=1e-12)


def test_diffusive_transit_examples():
    assert diffusive_transit_time(0.01, DEFAULT) == pytest.approx(1.0e-3, rel=1e-12)
    assert diffusive_transit_time(0.02, DEFAULT) == pytest.approx(4.0e-3, rel=1e-12)


def test_thermal_speed_and_cross_checks():
    assert mean_thermal_speed(300.0) == pytest.approx(1260.0, rel=5e-3)
    rw = random_walk_transit_time(0.01, DEFAULT)
    assert rw == pytest.approx(0.8e-3, rel=0.01)
    assert 1 / 3 < rw / diffusive_transit_time(0.01, DEFAULT) < 3
    tb = ballistic_transit_time(0.01, DEFAULT)
    assert tb == pytest.approx(8e-6, rel=0.01)
    assert 100 < diffusive_transit_time(0.01, DEFAULT) / tb < 1000


def test_gamma_raman_examples():
    assert gamma_raman_estimate(0.01, DEFAULT) == pytest.approx(1e3, rel=1e-12)
    target = TWO_PI * 3.2e3
    residual = residual_for_target(0.015, DEFAULT, target)
    assert gamma_raman_estimate(0.015, DEFAULT, residual) / TWO_PI == pytest.approx(3.2e3, rel=1e-12)
    with pytest.raises(InvalidInputError):
        residual_for_target(0.01, DEFAULT, 10.0)


def test_invalid_inputs():
    with pytest.raises(InvalidInputError):
        collision_count(0.0, DEFAULT)
    with pytest.raises(InvalidInputError):
        TransportSpec(diffusion_constant=-1.0)
    with pytest.raises(InvalidInputError):
        gamma_raman_estimate(0.01, DEFAULT, residual_rate=-1.0)


@given(st.floats(1e-3, 0.1), st.floats(1.01, 5.0), st.floats(1e-3, 1.0))
def test_diffusive_scaling(d, factor, diffusion):
    tp = TransportSpec(diffusion_constant=diffusion)
    base = diffusive_transit_time(d, tp)
    assert diffusive_transit_time(d * factor, tp) == pytest.approx(base * factor**2, rel=1e-12)
    scaled = TransportSpec(diffusion_constant=diffusion * factor)
    assert diffusive_transit_time(d, scaled) == pytest.approx(base / factor, rel=1e-12)


@given(st.floats(1e-3, 0.1), st.floats(1.01, 5.0), st.floats(0.0, 1e5))
def test_gamma_raman_decreases_with_diameter(d, factor, residual):
    assert gamma_raman_estimate(d * factor, DEFAULT, residual) < gamma_raman_estimate(d, DEFAULT, residual)
