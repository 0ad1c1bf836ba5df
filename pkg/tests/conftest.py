"""
Shared fixtures for the test suite.
"""

import pytest

from ipverify.schemas.distribution import GB2Spec
from ipverify.schemas.transform import ModelQuad


@pytest.fixture
def model() -> ModelQuad:
    """Default acceptance parameters (lam, a, b, alpha, beta) = (0.3, 1.5, 2.0, 2.0, 0.5)"""
    return ModelQuad(lam=0.3, a=1.5, b=2.0, alpha=2.0, beta=0.5)


@pytest.fixture
def gb2() -> GB2Spec:
    return GB2Spec(nu=0.3, p=1.5, q=2.0, gamma=2.0)
