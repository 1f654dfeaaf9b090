import json

import pytest

from degmaps.catalog import (
    CATALOG_ENV,
    CatalogParseError,
    NotInCatalog,
    ValidationError,
    default_catalog_path,
    load_catalog,
    word_type,
)
from degmaps.poly import Poly


@pytest.fixture
def raw():
    return json.loads(default_catalog_path().read_text(encoding="utf-8"))


def write(tmp_path, data, name="cat.json"):
    p = tmp_path / name
    p.write_text(json.dumps(data), encoding="utf-8")
    return p


def test_bundled_catalog_is_clean(signed_catalog):
    assert signed_catalog.violations == []
    assert signed_catalog.sign in (1, -1)


def test_group_lookups(catalog):
    g = catalog.lookup_group("S4", 7)
    assert g.labels == ("nu_4", "a_4") and g.orders == (0, 12)
    assert catalog.lookup_group("S3", 7).orders == (2,)
    assert catalog.lookup_group("SU3", 7).is_trivial()
    assert catalog.group("S3", 6).citation


def test_not_in_catalog(catalog):
    with pytest.raises(NotInCatalog):
        catalog.lookup_group("S3", 11)
    with pytest.raises(NotInCatalog):
        catalog.lookup_group("S9", 8)
    with pytest.raises(NotInCatalog):
        catalog.generator("sigma_8@S8")


def test_sign_parameter_enters_whitehead_square():
    plus, minus = load_catalog(sign=1), load_catalog(sign=-1)
    key = ("iota_4@S4", "iota_4@S4")
    assert plus.whitehead[key][0]["a_4"] == 1
    assert minus.whitehead[key][0]["a_4"] == Poly.const(-1)


def test_facts_carry_citations(catalog):
    assert catalog.facts
    assert all(f.citation for f in catalog.facts)


def test_suspension_injectivity_flags(catalog):
    assert catalog.group_suspensions[("S3", 7)].injective
    assert not catalog.group_suspensions[("S3", 6)].injective


def test_word_types(catalog):
    assert word_type(catalog, ("iota_3@S3vS5", "a_3@S3", "eta_6@S6")) == (7, "S3vS5")


def test_missing_generator_is_rejected(tmp_path, raw):
    raw["generators"] = [g for g in raw["generators"] if g["label"] != "nu_4"]
    with pytest.raises(ValidationError) as err:
        load_catalog(write(tmp_path, raw))
    assert err.value.rule in ("basis-word", "referential-integrity")
    cat = load_catalog(write(tmp_path, raw), validate=False)
    assert cat.violations


def test_missing_citation_is_rejected(tmp_path, raw):
    raw["hopf_invariants"][0]["citation"] = ""
    with pytest.raises(ValidationError) as err:
        load_catalog(write(tmp_path, raw))
    assert err.value.rule == "citation-present"


def test_whitehead_mutation_is_rejected(tmp_path, raw):
    for w in raw["whitehead_values"]:
        if w["a"] == "iota_3@M01":
            w["value"] = {}
    with pytest.raises(ValidationError) as err:
        load_catalog(write(tmp_path, raw))
    assert err.value.rule == "attaching-maps"


def test_bad_sign_rejected():
    with pytest.raises(ValidationError):
        load_catalog(sign=3)


def test_unreadable_catalog(tmp_path):
    p = tmp_path / "broken.json"
    p.write_text("{", encoding="utf-8")
    with pytest.raises(CatalogParseError):
        load_catalog(p)


def test_env_override(tmp_path, raw, monkeypatch):
    raw["sign"]["default"] = -1
    monkeypatch.setenv(CATALOG_ENV, str(write(tmp_path, raw)))
    cat = load_catalog()
    assert cat.sign == -1
    assert cat.source_path.endswith("cat.json")
