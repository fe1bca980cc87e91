import pytest
from pydantic import ValidationError

from dblcat_fibrations.config import Settings, get_settings, load_settings, resolve_cap, use_settings


class TestSettings:
    def test_defaults(self):
        settings = Settings()
        assert settings.max_cells == 10 ** 6
        assert settings.mode == "iso"
        assert settings.window == (3, 3)
        assert settings.paranoid is False
        assert settings.log_level == "WARNING"

    @pytest.mark.parametrize("raw,window", [("2,1", (2, 1)), ("4x0", (4, 0)), ((1, 2), (1, 2))])
    def test_window(self, raw, window):
        assert Settings(window=raw).window == window

    @pytest.mark.parametrize("raw", ["3", "-1,2", "a,b"])
    def test_bad_window(self, raw):
        with pytest.raises(ValidationError):
            Settings(window=raw)

    def test_mode_and_level(self):
        settings = Settings(mode="EQUIV", log_level="debug")
        assert settings.mode == "equiv"
        assert settings.log_level == "DEBUG"
        with pytest.raises(ValidationError):
            Settings(mode="weak")
        with pytest.raises(ValidationError):
            Settings(log_level="LOUD")

    def test_positive_cap(self):
        with pytest.raises(ValidationError):
            Settings(max_cells=0)


class TestLoading:
    def test_environment(self, monkeypatch):
        monkeypatch.setenv("DBLCAT_MODE", "equiv")
        monkeypatch.setenv("DBLCAT_WINDOW", "2x2")
        monkeypatch.setenv("DBLCAT_PARANOID", "yes")
        monkeypatch.setenv("DBLCAT_MAX_CELLS", "500")
        settings = load_settings()
        assert settings.mode == "equiv"
        assert settings.window == (2, 2)
        assert settings.paranoid is True
        assert settings.max_cells == 500

    def test_overrides_skip_none(self, monkeypatch):
        monkeypatch.setenv("DBLCAT_MODE", "equiv")
        settings = load_settings({'mode': None, 'max_cells': 10})
        assert settings.mode == "equiv"
        assert settings.max_cells == 10

    def test_resolve_cap(self):
        use_settings(Settings(max_cells=42))
        assert get_settings().max_cells == 42
        assert resolve_cap(None) == 42
        assert resolve_cap(7) == 7
