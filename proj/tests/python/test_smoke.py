"""Smoke tests for the pybind11 module; run with PYTHONPATH pointing at the
built extension (ctest does this automatically)."""

import math
import os
import tempfile

import _regencool as rc


def test_property_table():
    table = rc.make_pseudo_fluid()
    assert len(table.pressures) == 40
    assert len(table.temperatures) == 60

    state = table.query(60e5, 190.84)
    assert state.rho > 0 and state.cp > 2200

    # inverse lookup round trip
    t0 = 233.7
    h = table.query(90e5, t0).h
    assert abs(table.temperature_from_enthalpy(90e5, h) - t0) < 1e-3

    # ideal-gas extension
    t_hot = table.t_max_table + 50.0
    s = table.query(100e5, t_hot)
    assert abs(s.rho - 100e5 / (table.gas_constant_specific * t_hot)) < 1e-9


def test_friction_factor():
    assert abs(rc.friction_factor(500.0, 0.0) - 64.0 / 500.0) < 0.02 * 64.0 / 500.0
    assert rc.friction_factor(1e5, 1e-2) > rc.friction_factor(1e5, 0.0)


def test_march_and_predict():
    table = rc.make_pseudo_fluid()
    geom = rc.ChannelGeometry(1.4142, 2.8284, 1.0, 1.0, 250.0, 3.0)
    cfg = rc.MarchConfig(mdot=0.06, T_in=130.0, p_in=120e5, q=8e6, dz_mm=2.0)
    stations = rc.march(table, geom, cfg)
    assert len(stations) == 126
    assert stations[-1].p < stations[0].p
    assert stations[-1].h_tot > stations[0].h_tot

    out = rc.generate(table, _generator(8, seed=3))
    assert len(out.dataset) > 500
    train, val = rc.split(out.dataset, 0.9, 1)

    hp = rc.HyperParams()
    hp.n_hidden_layers = 1
    hp.neurons_per_layer = 16
    hp.epochs = 5
    hp.minibatch_size = 256
    hp.rng_seed = 7
    result = rc.fit_model(train, val, rc.FeatureSpec.canonical(), hp, [])
    assert not result.report.diverged
    assert len(result.report.val_mae) == 5

    predictions = rc.predict_channel(table, geom, cfg, result.model, result.scaler)
    assert len(predictions) == 126
    assert all(math.isfinite(t_w) for _, t_w in predictions)

    metrics = rc.evaluate(result.model, result.scaler, val)
    assert metrics.mae >= 0.0 and math.isfinite(metrics.mae)


def test_model_round_trip():
    table = rc.make_pseudo_fluid()
    out = rc.generate(table, _generator(4, seed=9))
    train, val = rc.split(out.dataset, 0.9, 2)
    hp = rc.HyperParams()
    hp.n_hidden_layers = 1
    hp.neurons_per_layer = 8
    hp.epochs = 2
    hp.rng_seed = 11
    result = rc.fit_model(train, val, rc.FeatureSpec.canonical(), hp, [])

    with tempfile.TemporaryDirectory() as tmp:
        path = os.path.join(tmp, "model.json")
        rc.save_model(result.model, result.scaler, path)
        model, scaler = rc.load_model(path)
        assert model.checksum() == result.model.checksum()
        assert scaler.feature_names == result.scaler.feature_names


def test_dataset_round_trip_and_stats():
    table = rc.make_pseudo_fluid()
    out = rc.generate(table, _generator(4, seed=13))
    with tempfile.TemporaryDirectory() as tmp:
        path = os.path.join(tmp, "data.csv")
        rc.save_dataset(out.dataset, path)
        back = rc.load_dataset(path)
        assert back.checksum() == out.dataset.checksum()

    corr = rc.correlation_matrix(out.dataset, ["q", "T_w"])
    assert abs(corr[0][0] - 1.0) < 1e-12

    stats = {s.name: s for s in rc.stats_summary(out.dataset)}
    assert 200.0 < stats["T_w"].mean < 1500.0


def test_errors_map_to_python():
    table = rc.make_pseudo_fluid()
    try:
        table.query(1.0, 200.0)  # pressure below the axis
    except ValueError:
        pass
    else:
        raise AssertionError("expected ValueError for an out-of-range query")


def _generator(n_channels, seed):
    cfg = rc.GeneratorConfig()
    cfg.n_channels = n_channels
    cfg.rng_seed = seed
    return cfg


def main():
    tests = [v for k, v in sorted(globals().items()) if k.startswith("test_")]
    for test in tests:
        test()
        print(f"ok {test.__name__}")
    print(f"{len(tests)} smoke tests passed")


if __name__ == "__main__":
    main()
