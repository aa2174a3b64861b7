import numpy as np

from relayplan.scenario import FenSpec, Scenario, TimeGrid, Zone, generate_scenario


def toy_scenario(seed=0, e=3, total=450e6, horizon=30.0, speed=10.0, split="equal", zone_size=(500, 500, 0)):
    return generate_scenario(
        seed, e, total, Zone(zone_size), TimeGrid(horizon, 0.1), speed=speed, split=split
    )


def static_scenario(points, weights=None, min_rates=None, n=3, zone=(500, 500, 0), backhaul=(0, 250, 0), d_min=1.0):
    e = len(points)
    weights = weights or [1 / e] * e
    min_rates = min_rates or [100e6] * e
    fens = tuple(
        FenSpec(np.tile(np.asarray(p, float), (n, 1)), w, r) for p, w, r in zip(points, weights, min_rates)
    )
    return Scenario(Zone(zone), TimeGrid(n * 0.1, 0.1), fens, backhaul, d_min)
