import pytest

from chflow import runner
from chflow.config import parse_config
from chflow.diagnostics import RunHistory

from helpers import shipped_config_text


@pytest.fixture(scope="session")
def shipped_run(tmp_path_factory):
    """Loader that executes each shipped config at most once per session.

    Returns a callable: name -> (config, out_dir, history, exit_code).
    """
    cache = {}

    def load(name):
        if name not in cache:
            text = shipped_config_text(name)
            cfg = parse_config(text)
            out = tmp_path_factory.mktemp("run") / name
            code = runner.run_config(cfg, str(out), text)
            hist = RunHistory.from_run_dir(str(out))
            cache[name] = (cfg, str(out), hist, code)
        return cache[name]

    return load
