import pytest
from hypothesis import given, strategies as st

from toa.scattering import LinearRamp, SampledSmooth, SquareBarrier
from toa.scenario import (ScenarioError, bundled_scenarios, bundled_text, load_scenario, parse_scenario,
                          render_scenario)

MINIMAL = """
[packet]
q0 = -30
p0 = 2
delta = 10

[potential]
kind = barrier
p_V = 2.0
a = 15

[detector]
x = 50, 60
"""


def test_minimal_parse():
    cfg = parse_scenario(MINIMAL)
    assert cfg.packet.q0 == -30 and cfg.packet.mass == 1
    assert cfg.detectors == (50.0, 60.0)
    assert cfg.spec == SquareBarrier(2.0, 15.0)
    assert cfg.tol == 1e-8 and cfg.grid is None and cfg.sweep is None


@pytest.mark.parametrize("name", bundled_scenarios())
def test_bundled_round_trip(name):
    cfg = parse_scenario(bundled_text(name))
    assert parse_scenario(render_scenario(cfg)) == cfg


def test_bundled_set():
    expected = {"free", "height_sweep", "width_sweep", "ramp",
                "reflection_pv22_a4", "reflection_pv19_a4", "reflection_pv19_a6"}
    assert expected <= set(bundled_scenarios())
    assert isinstance(load_scenario("ramp").spec, LinearRamp)


def test_all_errors_reported_with_lines():
    text = """[packet]
q0 = abc
p0 = 2
delta = 10
bogus = 1

[potential]
kind = wall

[detector]
x = 50
"""
    with pytest.raises(ScenarioError) as err:
        parse_scenario(text)
    lines = {i.line for i in err.value.issues}
    assert 2 in lines and 5 in lines and 8 in lines
    assert len(err.value.issues) >= 3


def test_missing_section():
    with pytest.raises(ScenarioError, match="detector"):
        parse_scenario(MINIMAL.split("[detector]")[0])


def test_quality_needs_override():
    text = MINIMAL.replace("q0 = -30", "q0 = -2")
    with pytest.raises(ScenarioError, match="quality"):
        parse_scenario(text)
    cfg = parse_scenario(text + "\n[options]\noverride_quality = true\n")
    assert cfg.override_quality


def test_sweep_rules():
    sweep = "\n[sweep]\nparameter = p_V\nstart = 0.1\nstop = 3\ncount = 5\n"
    assert parse_scenario(MINIMAL + sweep).sweep.count == 5
    with pytest.raises(ScenarioError, match="beyond the barrier"):
        parse_scenario(MINIMAL.replace("x = 50, 60", "x = 10") + sweep)
    with pytest.raises(ScenarioError, match="barrier potential"):
        parse_scenario(MINIMAL.replace("kind = barrier", "kind = step").replace("a = 15\n", "") + sweep)


def test_sampled_potential():
    text = MINIMAL.replace("kind = barrier\np_V = 2.0\na = 15",
                           "kind = sampled\nq = 0, 1, 2\nvalues = 0, 1, 0").replace("x = 50, 60", "x = 1.5")
    cfg = parse_scenario(text)
    assert isinstance(cfg.spec, SampledSmooth)


@given(st.floats(-1e3, -1), st.floats(0.5, 20), st.floats(1, 30), st.integers(16, 5000))
def test_render_parse_identity(q0, p0, delta, n):
    text = MINIMAL.replace("q0 = -30", f"q0 = {q0!r}").replace("p0 = 2", f"p0 = {p0!r}")
    text = text.replace("delta = 10", f"delta = {delta!r}")
    text += f"\n[grid]\nt_min = 0\nt_max = 100\nn_points = {n}\n"
    try:
        cfg = parse_scenario(text)
    except ScenarioError:
        return
    assert parse_scenario(render_scenario(cfg)) == cfg
