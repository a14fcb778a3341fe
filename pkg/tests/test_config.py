import pytest

from fusecraft import AnfisSettings
from fusecraft.config import (
    config_digest,
    default_anfis_settings,
    default_fuzzy_fis,
    engine_to_doc,
    fuzzy_fis_from_doc,
    parse_config,
    parse_config_text,
)
from fusecraft.errors import ConfigError
from fusecraft.fuzzy import MamdaniFis, default_fis


def test_packaged_fuzzy_default_matches_builtin():
    assert default_fuzzy_fis() == default_fis()
    assert len(default_fuzzy_fis().rules) == 5


def test_packaged_anfis_default():
    settings = default_anfis_settings()
    assert settings == AnfisSettings(n_mfs=3, shape="gbell", epochs=50,
                                     step_size=0.01, target="identity")


def test_unknown_top_level_key_named():
    with pytest.raises(ConfigError, match="defuzzz"):
        parse_config_text("kind: fuzzy\ndefuzzz: 10\n")


def test_unknown_nested_key_named():
    text = """
kind: anfis
mfs: 3
momentum: 0.9
"""
    with pytest.raises(ConfigError, match="momentum"):
        parse_config_text(text)


def test_unknown_term_key_named():
    doc = engine_to_doc(default_fis())
    doc["inputs"][0]["terms"][0]["slope"] = 3
    with pytest.raises(ConfigError, match="slope"):
        fuzzy_fis_from_doc(doc)


def test_yaml_syntax_error_reported():
    with pytest.raises(ConfigError, match="cannot parse"):
        parse_config_text("kind: [unterminated\n")


def test_kind_required():
    with pytest.raises(ConfigError, match="kind"):
        parse_config_text("mfs: 3\n")
    with pytest.raises(ConfigError):
        parse_config_text("- just\n- a list\n")


def test_missing_config_file(tmp_path):
    with pytest.raises(FileNotFoundError):
        parse_config(tmp_path / "nope.yaml")


def test_parse_config_from_file(tmp_path):
    path = tmp_path / "engine.yaml"
    path.write_text("kind: anfis\nmfs: 4\nepochs: 7\n", encoding="utf-8")
    settings = parse_config(path)
    assert settings == AnfisSettings(n_mfs=4, epochs=7)


def test_fuzzy_doc_round_trip():
    fis = default_fis()
    doc = engine_to_doc(fis)
    rebuilt = fuzzy_fis_from_doc(doc)
    assert isinstance(rebuilt, MamdaniFis)
    assert rebuilt == fis


def test_config_digest_stable_and_distinct():
    fis = default_fis()
    assert config_digest(fis) == config_digest(default_fuzzy_fis())
    assert config_digest(AnfisSettings()) == config_digest(AnfisSettings())
    assert config_digest(fis) != config_digest(AnfisSettings())
    assert config_digest(AnfisSettings()) != config_digest(AnfisSettings(epochs=5))


def test_bad_engine_values_rejected():
    with pytest.raises(ConfigError):
        parse_config_text("kind: anfis\nmfs: 1\n")
    with pytest.raises(ConfigError):
        parse_config_text("kind: fuzzy\ninputs: []\noutput: {}\nrules: []\n")
    doc = engine_to_doc(default_fis())
    doc["rules"] = []
    with pytest.raises(ConfigError):
        fuzzy_fis_from_doc(doc)


def test_rule_with_unknown_label_rejected():
    doc = engine_to_doc(default_fis())
    doc["rules"][0]["consequent"] = "mf9"
    with pytest.raises(ConfigError, match="mf9"):
        fuzzy_fis_from_doc(doc)
