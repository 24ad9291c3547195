"""Tests for the JSON config manager."""

from sumdiff.config.manager import ConfigManager


def test_defaults_without_file(tmp_path):
    path = tmp_path / "missing" / "config.json"
    manager = ConfigManager(path)
    assert manager.get_option("optimizer", "starts") == 64
    assert manager.get_option("blowup", "exact_threshold") == 5000
    assert not path.exists()


def test_partial_section_keeps_defaults(tmp_path):
    path = tmp_path / "config.json"
    path.write_text('{"optimizer": {"seed": 11}, "search": {"budget": 10}}')
    manager = ConfigManager(path)
    assert manager.get_option("optimizer", "seed") == 11
    assert manager.get_option("optimizer", "starts") == 64
    assert manager.get_option("search", "budget") == 10
    assert manager.get_option("search", "workers") == 1


def test_invalid_file_falls_back(tmp_path):
    path = tmp_path / "config.json"
    path.write_text("{not json")
    assert ConfigManager(path).get_option("paper", "tol") == 5e-5


def test_get_returns_a_copy(tmp_path):
    manager = ConfigManager(tmp_path / "config.json")
    manager.get("optimizer")["starts"] = 1
    assert manager.get_option("optimizer", "starts") == 64
