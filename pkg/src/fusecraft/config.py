"""Engine configuration documents: YAML parsing, validation, digests.

A config file describes exactly one engine. `kind: fuzzy` documents carry
the full rule-base description (inputs, output, rules, defuzz_resolution);
`kind: anfis` documents carry training hyperparameters. Unknown keys are
rejected by name so typos never silently fall back to defaults.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
from importlib.resources import files
from pathlib import Path

import yaml

from .anfis import AnfisSettings
from .errors import ConfigError, FusecraftError
from .fuzzy import MF_SHAPES, FuzzyRule, LinguisticVariable, MamdaniFis, build_fis

_FUZZY_KEYS = {"kind", "defuzz_resolution", "domain", "inputs", "output", "rules"}
_ANFIS_KEYS = {"kind", "mfs", "shape", "epochs", "step_size", "target"}
_VARIABLE_KEYS = {"name", "terms"}
_TERM_KEYS = {"label", "shape", "params"}
_RULE_KEYS = {"antecedent", "connective", "consequent", "weight"}


def _reject_unknown(doc: dict, allowed: set, where: str) -> None:
    unknown = sorted(set(doc) - allowed)
    if unknown:
        raise ConfigError(f"unknown key {unknown[0]!r} in {where}")


def _need(doc: dict, key: str, where: str):
    if key not in doc:
        raise ConfigError(f"missing key {key!r} in {where}")
    return doc[key]


def _mf_from_doc(doc: dict, where: str):
    if not isinstance(doc, dict):
        raise ConfigError(f"{where} must be a mapping")
    _reject_unknown(doc, _TERM_KEYS, where)
    shape = _need(doc, "shape", where)
    params = _need(doc, "params", where)
    cls = MF_SHAPES.get(shape)
    if cls is None:
        raise ConfigError(f"unknown membership shape {shape!r} in {where}")
    try:
        return cls(*[float(p) for p in params])
    except (TypeError, ValueError, FusecraftError) as exc:
        raise ConfigError(f"bad parameters for {shape!r} in {where}: {exc}") from exc


def _variable_from_doc(doc: dict, domain, where: str) -> LinguisticVariable:
    if not isinstance(doc, dict):
        raise ConfigError(f"{where} must be a mapping")
    _reject_unknown(doc, _VARIABLE_KEYS, where)
    name = str(_need(doc, "name", where))
    terms_doc = _need(doc, "terms", where)
    if not isinstance(terms_doc, list) or not terms_doc:
        raise ConfigError(f"{where} needs a non-empty terms list")
    terms = []
    for i, term_doc in enumerate(terms_doc):
        term_where = f"{where}.terms[{i}]"
        if not isinstance(term_doc, dict):
            raise ConfigError(f"{term_where} must be a mapping")
        label = str(_need(term_doc, "label", term_where))
        terms.append((label, _mf_from_doc(term_doc, term_where)))
    try:
        return LinguisticVariable(name, tuple(terms), tuple(domain))
    except FusecraftError as exc:
        raise ConfigError(f"invalid variable {name!r}: {exc}") from exc


def _rule_from_doc(doc: dict, where: str) -> FuzzyRule:
    if not isinstance(doc, dict):
        raise ConfigError(f"{where} must be a mapping")
    _reject_unknown(doc, _RULE_KEYS, where)
    antecedent = _need(doc, "antecedent", where)
    try:
        antecedent = tuple((int(i), str(l)) for i, l in antecedent)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{where}: antecedent must be [[input, term], ...]") from exc
    try:
        return FuzzyRule(
            antecedent,
            str(doc.get("connective", "and")),
            str(_need(doc, "consequent", where)),
            float(doc.get("weight", 1.0)),
        )
    except FusecraftError as exc:
        raise ConfigError(f"invalid rule in {where}: {exc}") from exc


def fuzzy_fis_from_doc(doc: dict) -> MamdaniFis:
    _reject_unknown(doc, _FUZZY_KEYS, "fuzzy config")
    domain = doc.get("domain", [0.0, 255.0])
    if not (isinstance(domain, (list, tuple)) and len(domain) == 2):
        raise ConfigError("domain must be a [low, high] pair")
    inputs_doc = _need(doc, "inputs", "fuzzy config")
    if not isinstance(inputs_doc, list) or len(inputs_doc) != 2:
        raise ConfigError("fuzzy config needs exactly two entries under 'inputs'")
    inputs = tuple(
        _variable_from_doc(v, domain, f"inputs[{i}]") for i, v in enumerate(inputs_doc)
    )
    output = _variable_from_doc(_need(doc, "output", "fuzzy config"), domain, "output")
    rules_doc = _need(doc, "rules", "fuzzy config")
    if not isinstance(rules_doc, list) or not rules_doc:
        raise ConfigError("fuzzy config needs a non-empty rules list")
    rules = tuple(_rule_from_doc(r, f"rules[{i}]") for i, r in enumerate(rules_doc))
    resolution = doc.get("defuzz_resolution", 256)
    if not isinstance(resolution, int) or resolution < 2:
        raise ConfigError("defuzz_resolution must be an integer >= 2")
    try:
        return build_fis(inputs, output, rules, resolution)
    except FusecraftError as exc:
        raise ConfigError(str(exc)) from exc


def anfis_settings_from_doc(doc: dict) -> AnfisSettings:
    _reject_unknown(doc, _ANFIS_KEYS, "anfis config")
    try:
        return AnfisSettings(
            n_mfs=int(doc.get("mfs", 3)),
            shape=str(doc.get("shape", "gbell")),
            epochs=int(doc.get("epochs", 50)),
            step_size=float(doc.get("step_size", 0.01)),
            target=str(doc.get("target", "identity")),
        )
    except (TypeError, ValueError, FusecraftError) as exc:
        raise ConfigError(f"invalid anfis config: {exc}") from exc


def parse_config_text(text: str, source: str = "<config>"):
    """Parse one engine config document; returns MamdaniFis or AnfisSettings."""
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"cannot parse {source}: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError(f"{source} must contain a mapping at the top level")
    kind = doc.get("kind")
    if kind == "fuzzy":
        return fuzzy_fis_from_doc(doc)
    if kind == "anfis":
        return anfis_settings_from_doc(doc)
    raise ConfigError(f"{source} needs kind: fuzzy or kind: anfis, got {kind!r}")


def parse_config(path):
    """Load and validate an engine config file."""
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"no such config file: {path}")
    return parse_config_text(path.read_text(encoding="utf-8"), source=str(path))


def default_fuzzy_fis() -> MamdaniFis:
    """Engine built from the packaged fuzzy default document."""
    text = files("fusecraft").joinpath("data/fuzzy_default.yaml").read_text("utf-8")
    return parse_config_text(text, source="fuzzy_default.yaml")


def default_anfis_settings() -> AnfisSettings:
    text = files("fusecraft").joinpath("data/anfis_default.yaml").read_text("utf-8")
    return parse_config_text(text, source="anfis_default.yaml")


# ---------------------------------------------------------------------------
# Canonical engine descriptions (for provenance and hashing)


_SHAPE_NAMES = {cls: name for name, cls in MF_SHAPES.items()}


def engine_to_doc(engine) -> dict:
    """Canonical plain-data description of an engine or its settings."""
    if isinstance(engine, MamdaniFis):
        def var_doc(var):
            return {
                "name": var.name,
                "terms": [
                    {
                        "label": label,
                        "shape": _SHAPE_NAMES[type(mf)],
                        "params": list(dataclasses.astuple(mf)),
                    }
                    for label, mf in var.terms
                ],
            }

        return {
            "kind": "fuzzy",
            "domain": list(engine.inputs[0].domain),
            "defuzz_resolution": engine.defuzz_resolution,
            "inputs": [var_doc(v) for v in engine.inputs],
            "output": var_doc(engine.output),
            "rules": [
                {
                    "antecedent": [[i, l] for i, l in rule.antecedent],
                    "connective": rule.connective,
                    "consequent": rule.consequent,
                    "weight": rule.weight,
                }
                for rule in engine.rules
            ],
        }
    if isinstance(engine, AnfisSettings):
        return {"kind": "anfis", **engine.to_dict()}
    raise ConfigError(f"not an engine description: {type(engine).__name__}")


def config_digest(engine) -> str:
    """sha256 over the canonical JSON form of the engine description."""
    doc = engine_to_doc(engine)
    blob = json.dumps(doc, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()
