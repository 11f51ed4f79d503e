from pathlib import Path

import pytest

from neutron_ghz.config import (
    RunConfig,
    build_run_config,
    load_run_config,
    parse_config_text,
)
from neutron_ghz.exceptions import ConfigError
from neutron_ghz.experiment import NoiseModel
from neutron_ghz.settings import Settings, configure_logging, get_settings


def write(tmp_path: Path, text: str) -> Path:
    path = tmp_path / "run.conf"
    path.write_text(text, encoding="utf-8")
    return path


def test_defaults() -> None:
    config = RunConfig()
    assert config.visibility == 0.6395
    assert config.counts_per_point == 250
    assert config.points_per_scan == 32
    assert config.repeats == 4
    assert config.seed == 1
    assert config.rf_phase == 0.0
    assert config.significance_k == 3.0
    assert config.noise_model is NoiseModel.DEPHASE
    assert not config.noiseless


def test_file_with_comments(tmp_path: Path) -> None:
    path = write(
        tmp_path,
        "# reference run\n"
        "visibility = 0.7   # contrast\n"
        "\n"
        "repeats=2\n"
        "noise_model = depolarize\n"
        "noiseless = true\n",
    )
    config = load_run_config(path)
    assert config.visibility == 0.7
    assert config.repeats == 2
    assert config.noise_model is NoiseModel.DEPOLARIZE
    assert config.noiseless


def test_unknown_key_reports_line(tmp_path: Path) -> None:
    path = write(tmp_path, "seed = 3\n\ncolour = blue\n")
    with pytest.raises(ConfigError, match="line 3: unknown key 'colour'") as info:
        load_run_config(path)
    assert info.value.line == 3


def test_duplicate_and_malformed_lines() -> None:
    with pytest.raises(ConfigError, match="line 2: duplicate key 'seed'"):
        parse_config_text("seed = 1\nseed = 2\n")
    with pytest.raises(ConfigError, match="line 1: expected 'key = value'"):
        parse_config_text("visibility 0.5\n")
    with pytest.raises(ConfigError, match="line 1: missing value"):
        parse_config_text("visibility =\n")


@pytest.mark.parametrize(
    ("line", "field"),
    [
        ("visibility = 1.5", "visibility"),
        ("counts_per_point = 0", "counts_per_point"),
        ("points_per_scan = 4", "points_per_scan"),
        ("repeats = 0", "repeats"),
        ("seed = -1", "seed"),
        ("seed = 18446744073709551616", "seed"),
        ("rf_phase = inf", "rf_phase"),
        ("significance_k = -1", "significance_k"),
        ("noise_model = thermal", "noise_model"),
        ("repeats = many", "repeats"),
    ],
)
def test_out_of_range_values_report_line(tmp_path: Path, line: str, field: str) -> None:
    path = write(tmp_path, f"# header\n{line}\n")
    with pytest.raises(ConfigError, match=f"line 2: invalid {field}"):
        load_run_config(path)


def test_flags_override_file_and_file_overrides_environment(
    tmp_path: Path, monkeypatch: pytest.MonkeyPatch
) -> None:
    monkeypatch.setenv("NEUTRON_GHZ_RUN_SEED", "7")
    monkeypatch.setenv("NEUTRON_GHZ_RUN_REPEATS", "3")
    assert load_run_config().seed == 7

    path = write(tmp_path, "seed = 9\n")
    from_file = load_run_config(path)
    assert from_file.seed == 9
    assert from_file.repeats == 3

    flagged = load_run_config(path, {"seed": 11, "visibility": None})
    assert flagged.seed == 11
    assert flagged.visibility == 0.6395


def test_invalid_flag_has_no_line(tmp_path: Path) -> None:
    path = write(tmp_path, "visibility = 0.5\n")
    with pytest.raises(ConfigError, match="^invalid visibility") as info:
        load_run_config(path, {"visibility": 2.0})
    assert info.value.line is None


def test_text_round_trip() -> None:
    config = RunConfig(
        visibility=0.123456789,
        seed=2**63,
        rf_phase=-0.1,
        noise_model=NoiseModel.DEPOLARIZE,
        noiseless=True,
    )
    parsed = build_run_config(parse_config_text(config.to_text()))
    assert parsed == config
    assert parsed.to_text() == config.to_text()


def test_config_is_frozen() -> None:
    config = RunConfig()
    with pytest.raises(ValueError, match="frozen"):
        config.seed = 4  # type: ignore[misc]


def test_process_settings_from_environment(monkeypatch: pytest.MonkeyPatch) -> None:
    monkeypatch.setenv("NEUTRON_GHZ_LOG_LEVEL", "DEBUG")
    monkeypatch.setenv("NEUTRON_GHZ_LOG_JSON", "true")
    settings = Settings()
    assert settings.log_level == "DEBUG"
    assert settings.log_json


def test_configure_logging_rejects_unknown_level() -> None:
    with pytest.raises(ConfigError, match="Unknown log level"):
        configure_logging("LOUD")
    configure_logging("info", json=True)


def test_malformed_process_settings_raise_config_error(
    monkeypatch: pytest.MonkeyPatch,
) -> None:
    monkeypatch.setenv("NEUTRON_GHZ_LOG_JSON", "sometimes")
    with pytest.raises(ConfigError, match="NEUTRON_GHZ_LOG_JSON"):
        get_settings()


def test_undecodable_config_file(tmp_path: Path) -> None:
    path = tmp_path / "run.conf"
    path.write_bytes(b"seed = 1\nvisibility = \xff\xfe\n")
    with pytest.raises(ConfigError, match="not valid UTF-8 at byte 22"):
        load_run_config(path)
