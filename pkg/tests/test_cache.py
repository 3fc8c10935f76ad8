import json

import pytest

from kloverify.cache import ENV_VAR, CacheStore, checksum, resolve_cache_dir
from kloverify.kloosterman import freq_table
from kloverify.finite_field import make_field
from kloverify.padics import closed_points


def test_checksum_ignores_its_own_field():
    doc = {"a": 1, "b": [1, 2]}
    assert checksum(doc) == checksum({**doc, "checksum": "x"})
    assert checksum(doc) != checksum({"a": 2, "b": [1, 2]})


def test_freq_roundtrip_and_hits(tmp_path):
    store = CacheStore(tmp_path)
    tab = store.freq(3, 4)
    assert store.misses == {"freq": 1}
    doc = json.loads((tmp_path / "freq" / "p3_m4.json").read_text())
    assert set(doc) == {"p", "m", "modulus", "source", "freq", "checksum"}
    again = CacheStore(tmp_path)
    assert again.freq(3, 4).counts == tab.counts == freq_table(make_field(3, 4)).counts
    assert again.hits == {"freq": 1}


@pytest.mark.parametrize("damage", ["truncate", "edit", "garbage"])
def test_corruption_triggers_recompute(tmp_path, damage):
    CacheStore(tmp_path).freq(2, 6)
    path = tmp_path / "freq" / "p2_m6.json"
    text = path.read_text()
    if damage == "truncate":
        path.write_text(text[: len(text) // 2])
    elif damage == "edit":
        doc = json.loads(text)
        first = next(iter(doc["freq"]))
        doc["freq"][first] += 1
        path.write_text(json.dumps(doc))
    else:
        path.write_bytes(b"\xff\xfe")
    store = CacheStore(tmp_path)
    tab = store.freq(2, 6)
    assert store.corrupt == ["freq/p2_m6"]
    assert tab.counts == freq_table(make_field(2, 6)).counts
    assert CacheStore(tmp_path).load("freq", "p2_m6") is not None


def test_class_numbers_cached(tmp_path):
    store = CacheStore(tmp_path)
    cn = store.class_numbers([-3, -16, -23])
    assert cn.H(-16) == pytest.approx(1.5)
    doc = json.loads((tmp_path / "classno" / "H.json").read_text())
    assert doc["-16"] == [3, 2]
    store2 = CacheStore(tmp_path)
    store2.class_numbers([-3, -16, -20])
    assert store2.hits == {"classno": 2} and store2.misses == {"classno": 1}


def test_orbits_cached(tmp_path):
    store = CacheStore(tmp_path)
    pts = store.orbits(3, 3)
    assert pts == closed_points(3, 3)
    assert CacheStore(tmp_path).orbits(3, 3) == pts


def test_env_overrides_directory(tmp_path, monkeypatch):
    monkeypatch.setenv(ENV_VAR, str(tmp_path / "env"))
    assert resolve_cache_dir(tmp_path / "flag") == tmp_path / "env"
    monkeypatch.delenv(ENV_VAR)
    assert resolve_cache_dir(tmp_path / "flag") == tmp_path / "flag"
    assert resolve_cache_dir(None) is None


def test_disabled_cache_still_computes():
    store = CacheStore(None)
    assert store.freq(2, 3).counts == {-3: 3, 1: 3, 5: 1}
    assert store.misses == {"freq": 1}
