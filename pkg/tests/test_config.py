import pytest

from fodesim.config import ConfigError, RunConfig, dump_config, parse_config

MINIMAL = """
# overrides on top of the built-in reference parameters
sim.h = 0.01
sim.t_end = 2.0
"""


def test_defaults_are_reference_parameters():
    cfg = RunConfig()
    assert (cfg.a0, cfg.a1, cfg.a2) == (1.0, 0.5, 0.8)
    assert (cfg.alpha, cfg.beta) == (2.2, 0.9)
    assert (cfg.K, cfg.Td, cfg.delta) == (20.5, 3.7343, 1.15)
    assert cfg.variant == "derived"
    assert cfg.input_kind == "unit_step"


def test_parse_overrides_and_comments():
    cfg = parse_config(MINIMAL)
    assert cfg.h == 0.01
    assert cfg.t_end == 2.0
    assert cfg.K == 20.5  # untouched default


def test_trailing_comments_ignored():
    cfg = parse_config("controller.K = 2.5  # gain\n")
    assert cfg.K == 2.5


def test_all_sections_parse():
    text = "\n".join(
        [
            "plant.a0 = 1", "plant.a1 = 0.5", "plant.a2 = 0.8",
            "plant.alpha = 2.2", "plant.beta = 0.9",
            "controller.K = 20.5", "controller.Td = 3.7343",
            "controller.delta = 1.15",
            "sim.h = 0.001", "sim.t_end = 15", "sim.variant = verbatim",
            "sim.memory = 500", "sim.divergence_bound = 100",
            "input.kind = scaled_step", "input.amplitude = 2.0",
            "analysis.omega_min = 0.1", "analysis.omega_max = 10",
            "analysis.points = 50",
        ]
    )
    cfg = parse_config(text)
    assert cfg.variant == "verbatim"
    assert cfg.memory == 500
    assert cfg.amplitude == 2.0
    assert cfg.realization_variant() == "verbatim"


def test_unknown_key_rejected():
    with pytest.raises(ConfigError, match="unknown key"):
        parse_config("plant.a3 = 1.0\n")


def test_duplicate_key_rejected():
    with pytest.raises(ConfigError, match="duplicate"):
        parse_config("plant.a0 = 1\nplant.a0 = 2\n")


def test_malformed_line_rejected():
    with pytest.raises(ConfigError):
        parse_config("plant.a0 1.0\n")


def test_bad_number_rejected():
    with pytest.raises(ConfigError):
        parse_config("plant.a0 = fast\n")
    with pytest.raises(ConfigError):
        parse_config("plant.a0 = inf\n")


def test_bad_enum_rejected():
    with pytest.raises(ConfigError):
        parse_config("sim.variant = canonical\n")
    with pytest.raises(ConfigError):
        parse_config("input.kind = ramp\n")


def test_semantic_validation():
    with pytest.raises(ConfigError):
        parse_config("sim.h = -0.1\n")
    with pytest.raises(ConfigError):
        parse_config("sim.h = 1.0\nsim.t_end = 0.5\n")
    with pytest.raises(ConfigError):
        parse_config("input.amplitude = 2.0\n")  # unit_step fixes amplitude
    with pytest.raises(ConfigError):
        parse_config("plant.a2 = 0\n")
    with pytest.raises(ConfigError):
        parse_config("analysis.points = 1\n")


def test_dump_round_trip():
    cfg = parse_config(MINIMAL)
    dumped = dump_config(cfg)
    assert parse_config(dumped) == cfg
    # canonical: dumping again is byte-identical
    assert dump_config(parse_config(dumped)) == dumped


def test_model_construction():
    cfg = parse_config("input.kind = scaled_step\ninput.amplitude = 3.0\n")
    model = cfg.model()
    assert model.input.amplitude == 3.0
    assert model.plant.alpha == 2.2
