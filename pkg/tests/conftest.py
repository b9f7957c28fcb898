import numpy as np
import pytest

from gradhooke.constitutive import MaterialParams
from gradhooke.tensor_core import unpack_symtri


def random_symtri(rng, scale=1.0):
    return unpack_symtri(scale * rng.standard_normal(18))


def random_sym(rng, scale=1.0):
    A = scale * rng.standard_normal((3, 3))
    return 0.5 * (A + A.T)


def random_material(rng, c8=0.0):
    lam, mu = rng.uniform(-0.5, 2.0), rng.uniform(0.1, 2.0)
    c = rng.uniform(-1.0, 1.0, 5)
    return MaterialParams(lam, mu, *c, c8=c8)


# a material that is strictly definite in both blocks
DEFINITE = MaterialParams(1.0, 1.0, 0.1, 0.2, 0.1, 1.0, 0.1)
# unit couple-stress material: mu = 1, ell = 1, eta = 0
COUPLE_STRESS = MaterialParams(0.0, 1.0, 0.0, 0.0, 0.0, 1.0, -0.5)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


# one line per acceptance criterion, printed at the end of the run
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[key])
