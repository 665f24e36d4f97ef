import math

import pytest

from ftir_interrogation import ConfigError, SingularityError
from ftir_interrogation.config import DEFAULT_CONFIG_TEXT, loads, parse_config
from ftir_interrogation.source import Distribution

MINIMAL = """
n_i = 1.5
n_r = 1.0
n_t = 1.5
theta_i = 1.2
lambda_i = 500
d = 1000
n0_rate = 672.43
T = 0.15
"""


def test_minimal_flat_config():
    cfg = loads(MINIMAL)
    trial = cfg.trial
    assert trial.stack.theta_incidence == 1.2
    assert trial.stack.wavelength_incident == 500.0
    assert trial.duration == 0.15
    assert trial.source.fano_factor == 1.0
    assert trial.source.distribution is Distribution.POISSONIAN
    assert trial.background.is_ideal
    assert cfg.stats.threshold == 2.58
    assert cfg.stats.confidence == 0.99
    assert cfg.seed == 42


def test_sectioned_equals_flat():
    assert loads(MINIMAL).digest == loads(DEFAULT_CONFIG_TEXT).digest


def test_file(tmp_path):
    path = tmp_path / "run.toml"
    path.write_text(MINIMAL, encoding="utf-8")
    assert parse_config(path).values == loads(MINIMAL).values


def test_below_critical_angle():
    with pytest.raises(ConfigError, match="TIR precondition"):
        loads(MINIMAL.replace("theta_i = 1.2", "theta_i = 0.5"))


def test_typo_is_hard_error():
    with pytest.raises(ConfigError, match="lamda_i.*lambda_i"):
        loads(MINIMAL + "lamda_i = 500\n")


def test_unknown_section():
    with pytest.raises(ConfigError, match="unknown key 'optic'"):
        loads(MINIMAL + "[optic]\nfoo = 1\n")


def test_key_in_wrong_section():
    text = DEFAULT_CONFIG_TEXT.replace("n0_rate = 672.43", "n0_rate = 672.43\nn_i = 1.6")
    with pytest.raises(ConfigError, match="belongs in \\[optics\\]"):
        loads(text)


def test_duplicate_via_alias():
    with pytest.raises(ConfigError, match="more than once"):
        loads(MINIMAL + "T_s = 0.2\n")


def test_missing_required():
    with pytest.raises(ConfigError, match="n0_rate"):
        loads(MINIMAL.replace("n0_rate = 672.43", ""))


def test_parse_error_has_line():
    with pytest.raises(ConfigError, match="line 3"):
        loads("n_i = 1.5\nn_r = 1.0\nn_t = = 2\n")


@pytest.mark.parametrize(
    "extra, pattern",
    [
        ("fano = 1.5", "fano"),
        ("efficiency_s = 2.0", "efficiency_s"),
        ("object_kind = 'cat'", "run"),
        ("tunneling_index = 'both'", "tunneling_index"),
        ("runs = 0", "runs"),
        ("one_sided = 'yes'", "one_sided"),
        ("power_sample_size = 20", "power_sample_size"),
        ("d_min_nm = 0.0", "distance sweep"),
    ],
)
def test_validation_errors(extra, pattern):
    with pytest.raises(ConfigError, match=pattern):
        loads(MINIMAL + extra + "\n")


def test_type_errors():
    with pytest.raises(ConfigError, match="must be a number"):
        loads(MINIMAL.replace("n_i = 1.5", "n_i = true"))


def test_object_index_singularity():
    # n_t = n_i leaves no evanescent decay when the object index sets the tunneling length
    with pytest.raises(SingularityError):
        loads(MINIMAL + "tunneling_index = 'object'\n")


def test_object_index_valid():
    cfg = loads(MINIMAL.replace("n_t = 1.5", "n_t = 1.2") + "tunneling_index = 'object'\n")
    assert cfg.trial.tunneling_index.value == "object"


def test_one_sided_threshold():
    assert loads(MINIMAL + "one_sided = true\n").stats.threshold == 2.33


def test_sub_poissonian():
    cfg = loads(MINIMAL + "eta = 0.9\n")
    assert cfg.trial.source.distribution is Distribution.SUB_POISSONIAN_BINOMIAL


def test_sweep_defaults():
    sweep = loads(MINIMAL).sweep
    assert sweep.theta_min == pytest.approx(math.asin(1 / 1.5) + 1e-3)
    assert sweep.theta_max == math.pi / 2


def test_missing_file(tmp_path):
    with pytest.raises(ConfigError, match="cannot read"):
        parse_config(tmp_path / "nope.toml")
