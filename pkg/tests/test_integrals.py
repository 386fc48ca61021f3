import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ferm2q import oracle
from ferm2q.errors import ConflictError, ParseError, ValidationError
from ferm2q.integrals import (
    SpatialIntegralSet,
    canonical_quad,
    chemist_permutations,
    dump_fcidump,
    freeze_core,
    parse_fcidump,
    read_fcidump,
    spatial_to_spin,
)

H2_TEXT = """&FCI NORB=2,NELEC=2,MS2=0,
 ORBSYM=1,1,
 ISYM=1,
&END
0.6757101548035165 1 1 1 1
0.6645817869640500 2 2 1 1
0.1809270275241086 2 1 2 1
0.6985609557079441 2 2 2 2
-1.2524635735648986 1 1 0 0
-0.4759487152209645 2 2 0 0
0.7199689944489797 0 0 0 0
"""


def test_parse_minimal_h2():
    s = parse_fcidump(H2_TEXT)
    assert (s.n_spatial, s.n_electrons, s.spin_z2) == (2, 2, 0)
    assert s.e_const == pytest.approx(0.7199689944489797)
    assert s.h1[0, 0] == pytest.approx(-1.2524635735648986)
    assert s.h1[0, 1] == 0.0
    # all eight chemist permutations are filled
    for idx in chemist_permutations(1, 0, 1, 0):
        assert s.h2[idx] == pytest.approx(0.1809270275241086)
    assert s.orbsym == (1, 1)


def test_header_slash_terminator():
    text = H2_TEXT.replace("&END", "/")
    assert parse_fcidump(text).n_spatial == 2


def test_missing_norb_names_key():
    with pytest.raises(ParseError, match="NORB"):
        parse_fcidump(H2_TEXT.replace("NORB=2,", ""))


def test_index_out_of_range_reports_line():
    text = H2_TEXT.replace("0.6985609557079441 2 2 2 2", "0.6985609557079441 3 2 2 2")
    with pytest.raises(ParseError, match="line 8"):
        parse_fcidump(text)


def test_conflicting_duplicate():
    text = H2_TEXT + "0.2 1 2 1 2\n"
    with pytest.raises(ConflictError):
        parse_fcidump(text)


def test_consistent_duplicate_accepted():
    text = H2_TEXT + "0.1809270275241086 1 2 2 1\n"
    assert parse_fcidump(text).h2[0, 1, 0, 1] == pytest.approx(0.1809270275241086)


def test_bad_spin_split():
    with pytest.raises(ValidationError):
        spatial_to_spin(parse_fcidump(H2_TEXT.replace("MS2=0", "MS2=1")))


def test_malformed_line():
    with pytest.raises(ParseError, match="line"):
        parse_fcidump(H2_TEXT + "1.0 1 1\n")


def test_round_trip(data_dir):
    s = read_fcidump(data_dir / "LiH.FCIDUMP")
    t = parse_fcidump(dump_fcidump(s))
    assert np.array_equal(s.h1, t.h1)
    assert np.array_equal(s.h2, t.h2)
    assert s.e_const == t.e_const


@given(st.tuples(*[st.integers(0, 5)] * 4))
def test_canonical_quad_is_orbit_invariant(idx):
    key = canonical_quad(*idx)
    for perm in chemist_permutations(*idx):
        assert canonical_quad(*perm) == key


def test_spin_tensor_layout(h2_spatial, h2_spin):
    n = h2_spatial.n_spatial
    g = h2_spatial.h2
    h = h2_spin.h2
    # same-spin and opposite-spin blocks carry (ps|qr); spin-flipping blocks vanish
    assert h[0, 1, 1, 0] == pytest.approx(g[0, 0, 1, 1])
    assert h[0, n + 1, n + 1, 0] == pytest.approx(g[0, 0, 1, 1])
    assert h[0, n, 0, n] == 0.0
    assert h2_spin.h1[n, n] == h2_spatial.h1[0, 0]
    assert h2_spin.h1[0, n] == 0.0


@pytest.mark.parametrize("name", ["H2", "LiH", "H2O", "CH4"])
def test_hf_energy_matches_scf(name, data_dir, reference):
    s = read_fcidump(data_dir / f"{name}.FCIDUMP")
    e = reference[name]["e_hf"]
    assert oracle.hf_energy_spatial(s) == pytest.approx(e, abs=1e-8)
    assert oracle.hf_energy_spin(spatial_to_spin(s)) == pytest.approx(e, abs=1e-8)


@pytest.mark.parametrize("name,n_frozen", [("LiH", 1), ("H2O", 1), ("N2", 2)])
def test_freeze_core_preserves_hf_energy(name, n_frozen, data_dir):
    s = read_fcidump(data_dir / f"{name}.FCIDUMP")
    f = freeze_core(s, n_frozen)
    assert f.n_spatial == s.n_spatial - n_frozen
    assert f.n_electrons == s.n_electrons - 2 * n_frozen
    assert oracle.hf_energy_spatial(f) == pytest.approx(oracle.hf_energy_spatial(s), abs=1e-8)
    assert np.allclose(f.h1, f.h1.T)


def test_freeze_zero_is_identity(h2_spatial):
    assert freeze_core(h2_spatial, 0) is h2_spatial


def test_freeze_too_many(h2_spatial):
    with pytest.raises(ValidationError):
        freeze_core(h2_spatial, 2)


def test_shape_validation():
    with pytest.raises(ValidationError):
        SpatialIntegralSet(2, 2, 0, 0.0, np.zeros((2, 2)), np.zeros((3, 3, 3, 3)))


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_freeze_invariant_random_integrals(seed):
    rng = np.random.default_rng(seed)
    n = 4
    h1 = rng.normal(size=(n, n))
    h1 = h1 + h1.T
    g = rng.normal(size=(n,) * 4)
    # impose 8-fold symmetry
    g = g + g.transpose(1, 0, 2, 3)
    g = g + g.transpose(0, 1, 3, 2)
    g = g + g.transpose(2, 3, 0, 1)
    s = SpatialIntegralSet(n, 4, 0, float(rng.normal()), h1, g)
    assert oracle.hf_energy_spatial(freeze_core(s, 1)) == pytest.approx(
        oracle.hf_energy_spatial(s), abs=1e-9
    )
