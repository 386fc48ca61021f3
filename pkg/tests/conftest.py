import json
import pathlib

import numpy as np
import pytest

from ferm2q.fermion import FermionOperator, normal_order
from ferm2q.integrals import read_fcidump, spatial_to_spin

DATA = pathlib.Path(__file__).parent / "data"

# acceptance criterion -> (passed, detail); filled in by test_acceptance.py
ACCEPTANCE: dict = {}


@pytest.fixture(scope="session")
def data_dir():
    return DATA


@pytest.fixture(scope="session")
def reference():
    return json.loads((DATA / "reference.json").read_text())


@pytest.fixture(scope="session")
def h2_spatial():
    return read_fcidump(DATA / "H2.FCIDUMP")


@pytest.fixture(scope="session")
def h2_spin(h2_spatial):
    return spatial_to_spin(h2_spatial)


def random_number_conserving(m, rng, n_terms=12, hermitian=True):
    """Random normal-ordered operator built from a+a and a+a+aa strings."""
    terms = {}
    for _ in range(n_terms):
        if m >= 4 and rng.random() < 0.5:
            p, q = rng.choice(m, 2, replace=False)
            r, s = rng.choice(m, 2, replace=False)
            key = ((int(p), 1), (int(q), 1), (int(r), 0), (int(s), 0))
        else:
            p, q = rng.integers(0, m, 2)
            key = ((int(p), 1), (int(q), 0))
        terms[key] = terms.get(key, 0) + complex(rng.normal(), rng.normal())
    f = FermionOperator(m, terms)
    if hermitian:
        f = f + f.adjoint()
    return normal_order(f)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[key]
        terminalreporter.write_line(f"criterion {key:>2}: {'PASS' if ok else 'FAIL'}  {detail}")
