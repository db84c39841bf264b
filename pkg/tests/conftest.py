import pytest

from elopt import Hyperplane, QuadraticCurve


@pytest.fixture
def qc():
    """Worked strictly convex arc: alpha = 1 - 1.5 x + 0.5 x^2 on [0, 1]."""
    return QuadraticCurve(a=1.0, b=1.0, c2=0.5)


@pytest.fixture
def qcc():
    """Worked strictly concave arc: alpha = 1 - 0.5 x - 0.5 x^2 on [0, 1]."""
    return QuadraticCurve(a=1.0, b=1.0, c2=-0.5)


@pytest.fixture
def h12():
    return Hyperplane(c=(1.0, 2.0), M=1.0)
