import pytest

from freebound.config import WORKERS_ENV, ConfigError, parse_config, resolve_workers


def test_parse_types_and_comments():
    cfg = parse_config("p = 2.5\nmax-iters = 100  # trailing\n# whole line\n\nname = circle\nflag = yes\n")
    assert cfg == {"p": 2.5, "max_iters": 100, "name": "circle", "flag": True}


@pytest.mark.parametrize("text", ["just words", " = 3"])
def test_parse_errors_carry_line_numbers(text):
    with pytest.raises(ConfigError, match=":1:"):
        parse_config(text)


def test_workers_env_overrides_config(monkeypatch):
    monkeypatch.delenv(WORKERS_ENV, raising=False)
    assert resolve_workers() == 1
    assert resolve_workers(3) == 3
    monkeypatch.setenv(WORKERS_ENV, "5")
    assert resolve_workers(3) == 5
    monkeypatch.setenv(WORKERS_ENV, "0")
    with pytest.raises(ConfigError):
        resolve_workers()
    monkeypatch.setenv(WORKERS_ENV, "many")
    with pytest.raises(ConfigError):
        resolve_workers()
