"""Hypothesis settings tiers shared by the property tests.

    from tests.settings import QUICK

    @QUICK
    @given(...)
    def test_something(...): ...

Grids are rebuilt on every example, so even the standard tier stays small.
"""

from hypothesis import HealthCheck, settings

# parameter validation and other cheap rejections
QUICK = settings(max_examples=20, deadline=None)

# invariance properties that rebuild a grid and its geometry per example
STANDARD = settings(max_examples=10, deadline=None, suppress_health_check=[HealthCheck.too_slow])
