import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from builders import toy_scenario
from relayplan.scenario import (
    ScenarioError,
    TimeGrid,
    Zone,
    distance,
    generate_scenario,
    load_scenario,
    save_scenario,
    scenario_to_dict,
)

coord = st.floats(-1e4, 1e4, allow_nan=False)
point = st.tuples(coord, coord, coord)


class TestDistance:
    def test_coincident(self):
        assert distance((0, 0, 0), (0, 0, 0)) == 0

    def test_345(self):
        assert distance((0, 0, 0), (3, 4, 0)) == 5

    def test_translated(self):
        assert distance((1, 2, 3), (4, 6, 3)) == 5

    @given(point, point, point)
    def test_metric_axioms(self, a, b, c):
        assert distance(a, b) == distance(b, a)
        assert distance(a, b) >= 0
        assert distance(a, c) <= distance(a, b) + distance(b, c) + 1e-9 * (1 + distance(a, c))
        if a == b:
            assert distance(a, b) == 0


class TestTimeGrid:
    def test_toy_grid(self):
        assert TimeGrid(30, 0.1).count == 300

    def test_non_integral_rejected(self):
        with pytest.raises(ScenarioError):
            TimeGrid(1.0, 0.3)

    def test_zero_period_rejected(self):
        with pytest.raises(ScenarioError):
            TimeGrid(1.0, 0.0)


def test_zone_rejects_flat_horizontal():
    with pytest.raises(ScenarioError):
        Zone((0, 10, 0))


class TestGenerate:
    def test_deterministic(self):
        a, b = toy_scenario(5, split="random"), toy_scenario(5, split="random")
        assert a == b
        assert json.dumps(scenario_to_dict(a)) == json.dumps(scenario_to_dict(b))

    def test_seed_changes_scenario(self):
        assert toy_scenario(1) != toy_scenario(2)

    def test_equal_split(self):
        s = toy_scenario(0, e=3, total=450e6, split="equal")
        assert [f.min_rate for f in s.fens] == [150e6, 150e6, 150e6]
        assert all(f.weight == pytest.approx(1 / 3) for f in s.fens)

    def test_static_when_speed_zero(self):
        s = toy_scenario(3, speed=0.0)
        for f in s.fens:
            assert np.all(f.trajectory == f.trajectory[0])

    def test_default_backhaul(self, zone):
        s = generate_scenario(0, 2, 2e8, zone, TimeGrid(1, 0.1))
        assert tuple(s.backhaul_pos) == (0.0, 250.0, 0.0)

    def test_bad_args(self, zone):
        with pytest.raises(ScenarioError):
            generate_scenario(0, 0, 2e8, zone, TimeGrid(1, 0.1))
        with pytest.raises(ScenarioError):
            generate_scenario(0, 2, -1, zone, TimeGrid(1, 0.1))
        with pytest.raises(ScenarioError):
            generate_scenario(0, 2, 2e8, zone, TimeGrid(1, 0.1), speed=-1)

    @settings(max_examples=40, deadline=None)
    @given(
        seed=st.integers(0, 2**32 - 1),
        e=st.integers(1, 8),
        total=st.sampled_from([2e8, 3e8, 4.5e8, 7e8]),
        speed=st.floats(0, 60),
        height=st.sampled_from([0.0, 100.0]),
    )
    def test_invariants(self, seed, e, total, speed, height):
        s = generate_scenario(seed, e, total, Zone((200, 300, height)), TimeGrid(3, 0.1), speed=speed)
        assert s.positions.shape == (e, 30, 3)
        assert np.all(s.positions >= 0)
        assert np.all(s.positions <= np.array([200, 300, height]))
        assert abs(math.fsum(f.weight for f in s.fens) - 1) <= 1e-9
        assert math.fsum(f.min_rate for f in s.fens) == total
        assert all(f.min_rate > 0 for f in s.fens)
        raw = [f.weight * min(g.weight for g in s.fens) ** -1 for f in s.fens]
        assert all(1 - 1e-9 <= r <= 5 + 1e-9 for r in raw)

    def test_speed_bounds_step(self):
        s = toy_scenario(2, speed=7.0, split="random")
        steps = np.linalg.norm(np.diff(s.positions, axis=1), axis=-1)
        assert steps.max() <= 7.0 * 0.1 + 1e-9


class TestFiles:
    def test_round_trip(self, tmp_path):
        s = toy_scenario(11, split="random")
        p = tmp_path / "s.json"
        save_scenario(s, p)
        assert load_scenario(p) == s

    def test_generator_block(self, tmp_path):
        p = tmp_path / "g.json"
        p.write_text(
            json.dumps(
                {
                    "zone": [500, 500, 0],
                    "time": {"horizon": 30, "period": 0.1},
                    "backhaul": [0, 250, 0],
                    "seed": 4,
                    "generator": {"count": 3, "total_min_rate": 450e6, "speed": 10, "split": "equal"},
                }
            )
        )
        assert load_scenario(p) == toy_scenario(4)

    def _dump(self, tmp_path, mutate):
        d = scenario_to_dict(toy_scenario(0, horizon=1.0))
        mutate(d)
        p = tmp_path / "bad.json"
        p.write_text(json.dumps(d))
        return p

    def test_short_trajectory_names_fen(self, tmp_path):
        p = self._dump(tmp_path, lambda d: d["fens"][1]["positions"].pop())
        with pytest.raises(ScenarioError, match=r"fens\[1\]"):
            load_scenario(p)

    def test_weights_not_normalized(self, tmp_path):
        def bump(d):
            d["fens"][0]["weight"] += 0.1

        with pytest.raises(ScenarioError, match="weights not normalized"):
            load_scenario(self._dump(tmp_path, bump))

    def test_point_outside_zone(self, tmp_path):
        def move(d):
            d["fens"][2]["positions"][3] = [600.0, 10.0, 0.0]

        with pytest.raises(ScenarioError, match=r"fens\[2\]\.positions\[3\]"):
            load_scenario(self._dump(tmp_path, move))

    def test_malformed(self, tmp_path):
        p = tmp_path / "m.json"
        p.write_text("{not json")
        with pytest.raises(ScenarioError):
            load_scenario(p)


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), e=st.integers(1, 8), extra=st.floats(0, 1e9))
def test_random_split_tight_totals(seed, e, extra):
    total = e * 1e6 + extra
    s = generate_scenario(seed, e, total, Zone((100, 100, 0)), TimeGrid(0.2, 0.1), split="random")
    assert math.fsum(f.min_rate for f in s.fens) == pytest.approx(total, rel=1e-15)
    assert all(f.min_rate >= 1e6 - 1e-6 for f in s.fens)
