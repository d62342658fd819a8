import pytest
import yaml

from mcsync.config import ConfigError, ExperimentConfig, expand_values, load_preset


def test_preset_defaults():
    cfg = ExperimentConfig.from_dict({})
    assert cfg.spec.t_min == pytest.approx(0.8e-3) and cfg.spec.t_max == pytest.approx(1.2e-3)
    assert cfg.spec.K == 50 and cfg.dt == pytest.approx(1e-5)
    assert cfg.model_a.noise == pytest.approx(cfg.model_a.peak / 10)
    assert cfg.blocks == 1000 and cfg.ml_blocks == 100
    assert cfg.ml.t_ow == pytest.approx(0.8e-3)


def test_expand_values():
    assert expand_values(3) == [3.0]
    assert expand_values([1, 2.5]) == [1.0, 2.5]
    assert expand_values({"start": 1, "stop": 2, "step": 0.25}) == [1.0, 1.25, 1.5, 1.75, 2.0]


def test_ml_with_wide_range_rejected():
    with pytest.raises(ConfigError, match="2 t_min"):
        ExperimentConfig.from_dict({"interval": {"t_min_ms": 0.5, "t_max_ms": 1.2}, "ml": {"t_ow_ms": 0.5},
                                    "tt": {"t_dw_ms": 0.5}})


def test_wide_range_allowed_without_ml():
    cfg = ExperimentConfig.from_dict({"interval": {"t_min_ms": 0.5, "t_max_ms": 1.2},
                                      "scheme": ["perfect", "po", "tt"], "tt": {"t_dw_ms": 0.5}})
    assert not cfg.spec.ml_compatible


@pytest.mark.parametrize("doc", [
    {"ml": {"t_ow_ms": 0.9}},
    {"tt": {"t_dw_ms": 0.9}},
    {"scheme": ["magic"]},
    {"detector": {"kind": "median"}},
    {"detector": {"xi_a": -1}},
    {"channel": {"kind": "other"}},
    {"interval": {"t_min_ms": 1.2, "t_max_ms": 0.8}},
    {"run": {"blocks": 0}},
])
def test_invalid_configs(doc):
    with pytest.raises(ConfigError):
        ExperimentConfig.from_dict(doc)


def test_gamma_channel():
    cfg = ExperimentConfig.from_dict({"channel": {"kind": "gamma", "peak": 100, "tpeak_ms": 0.1, "snr_b_db": 5}})
    assert cfg.model_b.noise == pytest.approx(31.6227766)


def test_table_channel(tmp_path):
    p = tmp_path / "pulse.csv"
    p.write_text("t,P\n0,0\n1e-4,5\n3e-4,1\n1e-3,0\n")
    cfg = ExperimentConfig.from_dict({"channel": {"kind": "table", "file": str(p)}})
    assert cfg.model_a.peak_value == pytest.approx(5.0)


def test_load_and_scalar_xi_a(tmp_path):
    p = tmp_path / "c.yaml"
    p.write_text(yaml.safe_dump({"detector": {"kind": "peak", "xi_a": [7.1, 7.9]}, "run": {"seed": 4}}))
    cfg = ExperimentConfig.load(p)
    assert cfg.detectors == ("peak",) and cfg.xi_a == {"peak": [7.1, 7.9]} and cfg.seed == 4


def test_preset_is_complete_document():
    doc = load_preset()
    cfg = ExperimentConfig.from_dict(doc, base=None)
    assert cfg.raw == doc


def test_overrides_keep_rest():
    cfg = ExperimentConfig.from_dict({}).with_overrides(channel={"snr_b_db": 5})
    assert cfg.model_b.noise == pytest.approx(cfg.model_b.peak / 10 ** 0.5)
    assert cfg.model_a.noise == pytest.approx(cfg.model_a.peak / 10)
