import pytest

from entdiss.config import RunConfig
from entdiss.util import UserError


def test_yaml():
    c = RunConfig(command="thresholds", n=3, classes=["ea", "dge"], seed=0, resolution=1e-3)
    text = c.dumps()
    # the root tag is implied by the path resolver, so files stay plain mappings
    assert "!RunConfig" not in text
    assert text.startswith("command: thresholds\n")
    assert "seed: 0" in text
    assert "state" not in text
    assert RunConfig.loads(text) == c


def test_plain_mapping_loads():
    c = RunConfig.loads(
        """
        n: 4
        state: w
        noise: global
        classes: [ea]
        """.replace(
            "        ", ""
        )
    )
    assert c == RunConfig(n=4, state="w", noise="global", classes=["ea"])
    assert RunConfig.loads("") == RunConfig()


def test_unknown_field():
    with pytest.raises(UserError):
        RunConfig.loads("n: 3\ncolour: blue\n")
    with pytest.raises(UserError):
        RunConfig.loads("- 1\n- 2\n")


def test_merge():
    base = RunConfig(state="ghz", noise="local", seed=0)
    top = RunConfig(noise="global", n=4)
    merged = base.merged(top)
    assert merged == RunConfig(state="ghz", noise="global", seed=0, n=4)
    assert base.noise == "local"
