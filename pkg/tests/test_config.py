import pytest

from asymgeo.config import CONFIG_ENV_VAR, DEFAULT_SEED, SolverConfig, load_config, parse_config_text


def test_defaults():
    cfg = SolverConfig()
    assert cfg.abs_tol == 1e-10
    assert cfg.max_iter == 200
    assert cfg.bracket_growth == 2.0
    assert cfg.quad_tol == 1e-9
    assert cfg.inf_conv_tol == 1e-3
    assert cfg.rng_seed == DEFAULT_SEED


@pytest.mark.parametrize("bad", [{"abs_tol": 0.0}, {"max_iter": 0}, {"bracket_growth": 1.0}])
def test_invalid_values_rejected(bad):
    with pytest.raises(ValueError):
        SolverConfig(**bad)


def test_parse_config_text_types_and_comments():
    out = parse_config_text("# solver\nabs_tol = 1e-8\nmax-iter=50  # short\n\ndebug=yes\n")
    assert out == {"abs_tol": 1e-8, "max_iter": 50, "debug": True}
    with pytest.raises(ValueError):
        parse_config_text("nonsense = 1")
    with pytest.raises(ValueError):
        parse_config_text("abs_tol 1e-8")


def test_env_file_then_overrides_win(tmp_path, monkeypatch):
    path = tmp_path / "cfg.txt"
    path.write_text("abs_tol=1e-6\nmax_iter=77\n")
    monkeypatch.setenv(CONFIG_ENV_VAR, str(path))
    cfg = load_config(abs_tol=1e-9, max_iter=None)
    assert cfg.abs_tol == 1e-9
    assert cfg.max_iter == 77
