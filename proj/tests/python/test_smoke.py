"""Smoke tests for the python bindings."""

import os

import pytest

import qadse


def test_version():
    assert qadse.__version__


def test_output_dim():
    assert qadse.output_dim(qadse.LayerShape(a=224, c=3, f=64, k=3, s=2, p=1)) == 112
    assert qadse.output_dim(qadse.LayerShape(a=8, c=1, f=1, k=3)) == 6


def test_shift_add_mac_matches_decode():
    pw = qadse.encode_weight_pow2(0.7, 2)
    assert pw.m == [1, 2]
    assert qadse.decode_weight(pw) == 0.75
    assert qadse.shift_add_mac(3, qadse.Pow2Weight(sign=1, m=[1, 3], k=2)) == 240
    with pytest.raises(OverflowError):
        qadse.shift_add_mac(127, qadse.Pow2Weight(sign=1, m=[0, 0], k=2), 2**31 - 1)


def test_pack_unpack_roundtrip():
    pw = qadse.Pow2Weight(sign=-1, m=[2, 5], k=2)
    code = qadse.pack_code(pw, qadse.PeType.LightPE2)
    assert qadse.unpack_code(code, qadse.PeType.LightPE2) == pw
    with pytest.raises(ValueError):
        qadse.unpack_code(code | 1, qadse.PeType.LightPE2)  # pad bit set


def test_basis_size():
    assert qadse.basis_size(4, 5) == 126
    assert qadse.basis_size(14, 5) == 11628


def test_fit_and_predict_quadratic():
    xs = [[i / 10.0, j / 10.0] for i in range(10) for j in range(10)]
    ys = [2.0 + 3.0 * x1 - x2 * x2 for x1, x2 in xs]
    model = qadse.fit_polynomial(xs, ys, 2)
    assert model.predict([0.35, 0.85]) == pytest.approx(2.0 + 3.0 * 0.35 - 0.85**2)


def test_pareto_front():
    front = qadse.pareto_front([[5, 2], [3, 1], [4, 3]], [True, False])
    assert sorted(front) == [0, 1]


def test_oracle_ordering():
    params = qadse.OracleParams.defaults()
    assert params.clock_hz(qadse.PeType.LightPE1) == 455e6
    net = qadse.NetworkConfig(
        "tiny", [qadse.LayerShape(a=16, c=3, f=8, k=3, s=1, p=1)]
    )
    results = {}
    for pe in (qadse.PeType.FP32, qadse.PeType.INT16, qadse.PeType.LightPE1):
        cfg = qadse.AcceleratorConfig(pe, 4, 4, 256, 512, 128, 65536, 32)
        results[pe] = qadse.evaluate_oracle(cfg, net, params)
    assert results[qadse.PeType.FP32]["power_mw"] > results[qadse.PeType.INT16]["power_mw"]
    assert (
        results[qadse.PeType.LightPE1]["latency_s"]
        < results[qadse.PeType.INT16]["latency_s"]
    )
    p = results[qadse.PeType.INT16]
    assert p["energy_mj"] == pytest.approx(p["power_mw"] * p["latency_s"])


def test_arch_space():
    assert qadse.arch_space_size() == 110592
    archs = qadse.sample_archs(10, seed=42)
    assert len(archs) == 10
    assert qadse.sample_archs(10, seed=42)[0].index == archs[0].index
    maximal = qadse.arch_from_index(110591)
    net = qadse.expand_arch(maximal, input_a=32)
    assert len(net.layers) == 13


def test_network_loading_from_data_dir():
    data_dir = os.environ.get("QADSE_DATA_DIR")
    if not data_dir:
        pytest.skip("QADSE_DATA_DIR not set")
    with open(os.path.join(data_dir, "nets", "vgg16.json")) as f:
        net = qadse.load_network(f.read())
    assert len(net.layers) == 13
