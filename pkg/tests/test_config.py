import json
import logging

import pytest

from qgamma.config import build_run_config, load_run_config, settings, validate_config
from qgamma.utils.exceptions import ConfigurationError, FileSystemError


def base(**extra):
    data = {"command": "solve", "params": {"n": 1, "gamma": 0.25}, "K": "two-bump"}
    data.update(extra)
    return data


def test_minimal_config():
    cfg = build_run_config(base())
    assert cfg.command == "solve"
    assert (cfg.n, cfg.gamma) == (1, 0.25)
    assert cfg.K.builtin == "two-bump"
    assert cfg.output_dir == settings.OUTPUT_DIR
    assert cfg.numeric("L", 64) == 64


@pytest.mark.parametrize(
    "data, path",
    [
        (base(colour="red"), "colour"),
        (base(params={"n": 1, "gamma": 0.25, "s": 1}), "params.s"),
        (base(numerics={"LL": 3}), "numerics.LL"),
        (base(K={"builtin": "gaussian", "width": 2}), "K.width"),
        (base(numerics={"seed_bubble": {"mu": 1.0, "zeta": 0}}), "numerics.seed_bubble.zeta"),
    ],
)
def test_unknown_keys_name_their_path(data, path):
    with pytest.raises(ConfigurationError) as info:
        build_run_config(data)
    assert info.value.config_key == path
    assert path in str(info.value)


def test_missing_params():
    with pytest.raises(ConfigurationError, match="params.gamma"):
        build_run_config({"command": "solve", "params": {"n": 2}})


def test_report_needs_no_params():
    assert build_run_config({"command": "report"}).command == "report"


def test_bad_types_and_values():
    with pytest.raises(ConfigurationError, match="numerics.L"):
        build_run_config(base(numerics={"L": 2.5}))
    with pytest.raises(ConfigurationError, match="numerics.box"):
        build_run_config(base(numerics={"box": [[1.0, 0.0]]}))
    with pytest.raises(ConfigurationError, match="sorted"):
        build_run_config(base(epsilons=[0.02, 0.01]))
    with pytest.raises(ConfigurationError, match="exactly one"):
        build_run_config(base(K={"builtin": "gaussian", "expression": "1"}))
    with pytest.raises(ConfigurationError, match="threads"):
        build_run_config(base(threads=0))


def test_overrides_win_and_none_is_ignored():
    cfg = build_run_config(
        base(numerics={"L": 32}),
        {"n": 2, "gamma": None, "L": 16, "epsilons": [0.01, 0.02], "K": {"builtin": "gaussian"}},
    )
    assert cfg.n == 2
    assert cfg.gamma == 0.25
    assert cfg.numerics["L"] == 16
    assert cfg.epsilons == [0.01, 0.02]
    assert cfg.K.builtin == "gaussian"


def test_load_from_file(tmp_path):
    path = tmp_path / "run.json"
    path.write_text(json.dumps(base(seed=7)))
    assert load_run_config(path).seed == 7

    (tmp_path / "broken.json").write_text("{")
    with pytest.raises(ConfigurationError):
        load_run_config(tmp_path / "broken.json")
    with pytest.raises(FileSystemError):
        load_run_config(tmp_path / "missing.json")


def test_validate_config_rejects_bad_environment(monkeypatch):
    validate_config()
    monkeypatch.setattr(settings, "THREADS", 0)
    with pytest.raises(ConfigurationError) as info:
        validate_config()
    assert info.value.config_key == "QGAMMA_THREADS"


class TestLogger:
    def test_named_logger_writes_to_stream(self):
        import io

        from qgamma.utils import setup_logger

        stream = io.StringIO()
        log = setup_logger("qgamma.test-stream", "debug", stream=stream)
        log.debug("✅ Stage completed")
        assert stream.getvalue() == "DEBUG - ✅ Stage completed\n"
        assert setup_logger("qgamma.test-stream") is log

    def test_set_level(self):
        from qgamma.utils import logger, set_level

        before = logger.level
        try:
            set_level("warning")
            assert logger.level == logging.WARNING
            with pytest.raises(ValueError, match="Invalid logging level"):
                set_level("chatty")
        finally:
            logger.setLevel(before)
