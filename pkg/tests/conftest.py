import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from grushin3d.profile import Profile, builtin_profiles


@pytest.fixture(scope="session")
def linear():
    return Profile("monomial", 1.0)


@pytest.fixture(scope="session")
def quadratic():
    return Profile("monomial", 2.0)


@pytest.fixture(scope="session")
def cubic():
    return Profile("monomial", 3.0)


@pytest.fixture(scope="session")
def monolog():
    return Profile("monolog", 1.0, 2.0)


@pytest.fixture(scope="session")
def builtins():
    return builtin_profiles()
