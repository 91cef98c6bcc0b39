# Copyright 2024 qkdratelab contributors

"""run configuration sources and validation"""

# pylint: disable=missing-function-docstring

import pytest

from qkdratelab import QrlValidationError
from qkdratelab.config import CONFIG_KEYS, RunConfig, load_config_file, parse_assignments, parse_config_text
from qkdratelab.cv_model import CvDeviceParams
from qkdratelab.dv_model import DvDeviceParams
from qkdratelab.optimizer import OptimizerConfig

CONFIG_TEXT = """
# device parameters
dv_eta_d = 0.9
cv_phi=40   # modulation
scenario = asym

points = 11
"""


def test_defaults_are_the_table_values():
    cfg = RunConfig.from_sources()
    assert cfg.dv_params() == DvDeviceParams()
    assert cfg.cv_params() == CvDeviceParams()
    assert cfg.optimizer_config() == OptimizerConfig()
    assert cfg == RunConfig()


def test_every_key_is_a_field():
    assert {key.name for key in CONFIG_KEYS} == set(RunConfig().as_dict())


def test_parse_config_text():
    assert parse_config_text(CONFIG_TEXT) == {"dv_eta_d": "0.9", "cv_phi": "40", "scenario": "asym", "points": "11"}


def test_parse_config_text_rejects_garbage():
    with pytest.raises(QrlValidationError) as info:
        parse_config_text("points = 3\njust some words\n")
    assert info.value.key == "line 2"


def test_load_config_file(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text(CONFIG_TEXT, encoding="utf-8")
    cfg = RunConfig.from_sources(load_config_file(path))
    assert cfg.dv_eta_d == 0.9
    assert cfg.cv_phi == 40.0
    assert cfg.scenario == "asymmetric"
    assert cfg.points == 11


def test_later_sources_win():
    cfg = RunConfig.from_sources({"points": "11", "model": "cv"}, {"points": "21", "model": None}, {"seed": "3"})
    assert (cfg.points, cfg.model, cfg.seed) == (21, "cv", 3)


def test_parse_assignments():
    assert parse_assignments(["cv_xi=0.9", " seed = 2 "]) == {"cv_xi": "0.9", "seed": "2"}
    with pytest.raises(QrlValidationError):
        parse_assignments(["seed"])


@pytest.mark.parametrize(
    "values, key",
    [
        ({"colour": "red"}, "colour"),
        ({"points": "many"}, "points"),
        ({"points": "1"}, "points"),
        ({"dv_eta_d": "1.5"}, "dv_eta_d"),
        ({"dv_e_d": "-0.1"}, "dv_e_d"),
        ({"cv_phi": "0"}, "cv_phi"),
        ({"model": "bb84"}, "model"),
        ({"scenario": "diagonal"}, "scenario"),
        ({"optimize": "maybe"}, "optimize"),
        ({"alpha": "nan"}, "alpha"),
        ({"mu_min": "0.5", "mu_max": "0.1"}, "mu_min"),
        ({"mu_a": "2.0"}, "mu_a"),
        ({"bracket_low": "5", "bracket_high": "1"}, "bracket_low"),
        ({"l_a": "5"}, "l_b"),
    ],
)
def test_validation_names_the_key(values, key):
    with pytest.raises(QrlValidationError) as info:
        RunConfig.from_sources(values)
    assert info.value.key == key
    assert str(info.value).startswith(key)


def test_boolean_flag():
    assert RunConfig.from_sources({"optimize": "yes"}).optimize is True
    assert RunConfig.from_sources({"optimize": "off"}).optimize is False


def test_point_channel():
    assert RunConfig.from_sources({"l_a": "0", "l_b": "20"}).channel().eta_b == pytest.approx(0.398107, abs=1e-6)
    assert RunConfig.from_sources({"loss_db": "4", "scenario": "symmetric"}).channel().eta_a == pytest.approx(
        0.630957, abs=1e-6
    )
    with pytest.raises(QrlValidationError) as info:
        RunConfig.from_sources().channel()
    assert info.value.key == "loss_db"


def test_sweep_spec():
    values = {"model": "cv", "start": "1", "stop": "2", "points": "3", "axis": "distance"}
    spec = RunConfig.from_sources(values).sweep_spec()
    assert spec.points == 3
    assert spec.axis.value == "distance"
    with pytest.raises(QrlValidationError) as info:
        RunConfig.from_sources({"start": "1", "stop": "1", "points": "2"}).sweep_spec()
    assert info.value.key == "start"
