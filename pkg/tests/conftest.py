from __future__ import annotations

from fractions import Fraction

import pytest

from toda.exact import Poly


@pytest.fixture
def t():
    return Poly([Fraction(0), Fraction(1)], "t")
