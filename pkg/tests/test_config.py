import logging

from main.config import Limits, activate_limits, get_limits, override_limits, warn_memory


def test_override_limits_restores():
    before = get_limits()
    with override_limits(max_maps=10, max_valuations=None) as limits:
        assert get_limits().max_maps == 10
        assert limits.max_valuations == before.max_valuations
    assert get_limits() == before


def test_activate_limits_installs_a_snapshot():
    snapshot = Limits(workers=3)
    with activate_limits(snapshot):
        assert get_limits() is snapshot
    assert get_limits() is not snapshot


def test_warn_memory_is_soft(caplog):
    with caplog.at_level(logging.WARNING):
        with override_limits(max_mem_mb=1):
            warn_memory('universe', 2 * 1024 * 1024)
            warn_memory('universe', 1024)
        warn_memory('universe', 1 << 40)
    assert [record.getMessage() for record in caplog.records] == [
        'universe: estimated 2 MB exceeds GTW_MAX_MEM=1 MB']
