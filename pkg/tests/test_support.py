import numpy as np
import pytest
from hypothesis import given, strategies as st

from rotgate import io as rio
from rotgate.angles import format_angle, parse_angle, pi_fraction
from rotgate.config import RunConfig, from_mapping, load_config, merge
from rotgate.errors import ValidationError
from rotgate.rotor import NACS

PI = np.pi


@pytest.mark.parametrize("text,value", [("pi/2", PI / 2), ("-9pi/8", -9 * PI / 8), ("3*pi/4", 0.75 * PI),
                                        ("-π", -PI), ("0.25", 0.25), (1, 1.0)])
def test_parse_angle(text, value):
    assert parse_angle(text) == pytest.approx(value, abs=1e-15)


def test_parse_angle_rejects():
    with pytest.raises(ValidationError):
        parse_angle("half a turn")


@pytest.mark.parametrize("value,text", [(PI / 2, "π/2"), (-9 * PI / 8, "-9π/8"), (0.0, "0"), (PI, "π"),
                                        (-3 * PI, "-3π"), (0.3, "0.3")])
def test_format_angle(value, text):
    assert format_angle(value) == text


@given(st.integers(-64, 64), st.integers(1, 64))
def test_angle_round_trip(num, den):
    x = num * PI / den
    assert parse_angle(format_angle(x).replace("π", "pi")) == pytest.approx(x, abs=1e-12)
    assert pi_fraction(x) * den == num


def test_config_defaults_and_errors():
    cfg = RunConfig(gate="H")
    assert cfg.rotor() == NACS
    t = cfg.timing(NACS)
    assert t["tau"] == pytest.approx(11.2 * NACS.tau0) and t["bandwidth"] == pytest.approx(0.1 * NACS.omega01)
    e = RunConfig(errors={"detuning_ratio": 0.01, "delay_ratio": 0.1, "common_phase_error": "pi/2"}).error_model(NACS)
    assert e.detuning == pytest.approx(0.01 * NACS.omega01)
    assert e.delay_error == pytest.approx(0.1 * 11.2 * NACS.tau0)
    assert e.common_phase_error == pytest.approx(PI / 2)
    for bad in ({"bandwidth_ratio": 0}, {"dt": -1}, {"errors": {"jitter": 1}}, {"matrix": [1, 0]},
                {"params": [1, 2]}, {"molecule": "/nonexistent.yaml"}):
        with pytest.raises(ValidationError):
            RunConfig(**bad)
    with pytest.raises(ValidationError):
        RunConfig().target()
    with pytest.raises(ValidationError):
        from_mapping({"scan": {"axes": [{"parameter": "amplitude"}]}})


def test_config_target_priority():
    s = 1 / np.sqrt(2)
    cfg = RunConfig(gate="T", matrix=[s, 0, s, 0, s, 0, -s, 0])
    assert np.allclose(cfg.target().matrix, np.array([[s, s], [s, -s]]))
    cust = RunConfig(params=["pi/2", "0", "0", "0"]).target()
    assert cust.name == "custom"


def test_load_and_merge(tmp_path):
    mol = tmp_path / "mol.yaml"
    mol.write_text("name: KRb\nB_cm1: 0.0371\nmu0_debye: 0.57\nj_max: 6\n")
    p = tmp_path / "run.yaml"
    p.write_text("molecule: mol.yaml\ngates: H, T\nerrors:\n  delay_ratio: 0.05\n")
    cfg = load_config(p)
    assert cfg.rotor().molecule_name == "KRb" and cfg.gates == ["H", "T"]
    m = merge(cfg, {"j_max": 8, "errors": {"detuning_ratio": 0.01, "delay_ratio": None}})
    assert m.rotor().j_max == 8 and m.errors == {"delay_ratio": 0.05, "detuning_ratio": 0.01}
    with pytest.raises(ValidationError):
        load_config(tmp_path / "missing.yaml")


def test_json_and_csv(tmp_path):
    obj = {"b": np.float64(1.5), "a": np.arange(3), "c": 1 + 2j}
    text = rio.dumps(obj)
    assert text.index('"a"') < text.index('"b"')
    path = rio.write_json(tmp_path / "x.json", obj)
    assert rio.read_json(path)["a"] == [0, 1, 2]
    x = 0.1 + 0.2
    rio.write_csv(tmp_path / "x.csv", ["v"], [[x]])
    header, rows = rio.read_csv(tmp_path / "x.csv")
    assert header == ["v"] and float(rows[0][0]) == x
    assert len(rio.sha256(path)) == 64


def test_matrix_dict_and_tree(tmp_path):
    d = rio.matrix_dict(np.array([[1j, 0], [0, 1]]))
    assert d["im"][0][0] == 1.0
    tree = rio.OutputTree(tmp_path, {"gate": "H", "out": str(tmp_path)}, ["solve"])
    tree.add(rio.write_json(tree.path("a.json"), {"x": 1}))
    man = rio.read_json(tree.finish(runtime_s=0.1))
    assert man["files"] == {"a.json": rio.sha256(tmp_path / "a.json")}
    other = rio.OutputTree(tmp_path / "o", {"gate": "H", "out": "elsewhere"})
    assert rio.read_json(other.finish())["config_hash"] == man["config_hash"]
