import pytest

from coldgate import cli, switching, traps


@pytest.fixture(scope="session")
def ref_cfg():
    return traps.SwitchingConfig.rb87_microtrap()


@pytest.fixture(scope="session")
def bb_series(ref_cfg):
    """Production-resolution collision-channel propagation (slow, shared)."""
    return switching.propagate(ref_cfg, ("b", "b"))


@pytest.fixture(scope="session")
def b_series(ref_cfg):
    return switching.propagate_single_b(ref_cfg)


@pytest.fixture(scope="session")
def accept_ctx(ref_cfg, bb_series, b_series):
    ctx = cli.AcceptContext(seed=0)
    ctx._cache.update({"cfg": ref_cfg, "bb": bb_series, "b": b_series})
    return ctx
