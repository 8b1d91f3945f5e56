import cmath
import itertools
import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mubtomo.mub import (
    CertificationError,
    MubBasis,
    MubFamily,
    Provenance,
    audit_tables,
    dim8_mub_family,
    family_for,
    family_from_dict,
    family_to_dict,
    modulation_csv,
    prime_mub_family,
    prime_mub_phases,
    prime_mub_vector,
    vector_to_modulation,
    verify_family,
)
from mubtomo._d8tables import table_unitary
from mubtomo.qudit import QuditVector


def brute_vector(dim, alpha, m):
    """Direct evaluation of exp(-i 2 pi (alpha l^2 + m l) / D) / sqrt(D) with cmath."""
    half = (dim - 1) // 2
    return [cmath.exp(-2j * math.pi * (alpha * l * l + m * l) / dim) / math.sqrt(dim) for l in range(-half, half + 1)]


def brute_overlap2(u, v):
    s = sum(a.conjugate() * b for a, b in zip(u, v))
    return abs(s) ** 2


def test_zero_exponent_coefficient():
    v = prime_mub_vector(7, 1, 0)
    assert v.amplitude(0) == pytest.approx(1 / math.sqrt(7), abs=1e-15)


def test_phase_example_alpha7_m1_l1():
    phases = prime_mub_phases(7, 7, 1)
    expected = (2 * math.pi * 8 / 7) % (2 * math.pi)
    assert expected == pytest.approx(0.8975979010256552)
    assert phases[3 + 1] == pytest.approx(expected, abs=1e-14)


def test_vectors_match_brute_force_formula():
    for alpha in range(1, 8):
        for m in range(-3, 4):
            np.testing.assert_allclose(prime_mub_vector(7, alpha, m).amplitudes, brute_vector(7, alpha, m), atol=1e-14)


@pytest.mark.parametrize("dim", [3, 5, 7])
def test_brute_force_cross_overlaps(dim):
    # every vector pair from different bases, computational basis included
    half = (dim - 1) // 2
    bases = {0: [[1.0 if i == k else 0.0 for i in range(dim)] for k in range(dim)]}
    for alpha in range(1, dim + 1):
        bases[alpha] = [brute_vector(dim, alpha, m) for m in range(-half, half + 1)]
    worst = 0.0
    for a, b in itertools.combinations(bases, 2):
        for u in bases[a]:
            for v in bases[b]:
                worst = max(worst, abs(brute_overlap2(u, v) - 1 / dim))
    assert worst < 1e-12
    # and the library family agrees with the brute-force vectors
    fam = prime_mub_family(dim)
    for basis in fam.bases:
        np.testing.assert_allclose(basis.unitary.T, np.array(bases[basis.index]), atol=1e-14)


def test_prime_family_shape():
    fam = prime_mub_family(7)
    assert len(fam) == 8 and fam.num_projectors == 56
    assert fam.indices == tuple(range(8))
    assert fam.provenance is Provenance.PRIME_FORMULA
    fam3 = prime_mub_family(3)
    assert len(fam3) == 4
    assert verify_family(fam3).max_unbiasedness_deviation < 1e-12


@pytest.mark.parametrize("dim", [2, 4, 9, 15, 1])
def test_non_odd_prime_rejected(dim):
    with pytest.raises(ValueError, match="odd prime"):
        prime_mub_family(dim)
    with pytest.raises(ValueError):
        prime_mub_vector(dim, 1, 0)


def test_bad_alpha_or_m_rejected():
    with pytest.raises(ValueError):
        prime_mub_vector(7, 0, 0)
    with pytest.raises(ValueError):
        prime_mub_vector(7, 1, 4)


def test_d8tables_entries():
    u1 = table_unitary(1)
    assert u1[0, 0] == pytest.approx(1 / math.sqrt(8), abs=1e-15)
    u3 = table_unitary(3)
    mags = np.unique(np.round(np.abs(u3), 12))
    np.testing.assert_allclose(mags, [0.0, 1 / math.sqrt(2)], atol=1e-12)
    for k in (1, 2, 5, 8):
        np.testing.assert_allclose(np.abs(table_unitary(k)), 1 / math.sqrt(8), atol=1e-15)
    for k in (4, 6, 7, 9):
        mags = np.unique(np.round(np.abs(table_unitary(k)), 12))
        np.testing.assert_allclose(mags, [0.0, 0.5], atol=1e-12)
    with pytest.raises(ValueError):
        table_unitary(10)


def test_d8tables_phases_are_quarter_turns():
    for k in range(1, 10):
        u = table_unitary(k)
        nz = np.abs(u) > 0
        quarter = np.mod(np.angle(u[nz]), 2 * np.pi) / (np.pi / 2)
        np.testing.assert_allclose(quarter, np.round(quarter), atol=1e-12)


def test_d8tables_unitaries_exact():
    for k in range(1, 10):
        u = table_unitary(k)
        assert np.max(np.abs(u.conj().T @ u - np.eye(8))) < 1e-12


def test_d8tables_audit_selects_nine_tables():
    audit = audit_tables()
    assert audit.reading == "columns"
    assert audit.selected == tuple(range(1, 10))
    assert len(audit.subsets_passing) == 1
    # identity is biased against the tables with zero entries
    assert {b for a, b in audit.offending_pairs if a == 0} == {3, 4, 6, 7, 9}


def test_dim8_family_certifies():
    fam = dim8_mub_family()
    assert len(fam) == 9 and fam.num_projectors == 72 == 2**3 * (2**3 + 1)
    report = verify_family(fam, tol=1e-12)
    assert report.passed
    assert "columns" in report.summary()


def test_verify_flags_duplicated_basis():
    fam = prime_mub_family(5)
    dup = MubFamily(5, fam.bases[:-1] + (MubBasis(5, 99, fam.bases[1].unitary),), fam.provenance)
    report = verify_family(dup)
    assert not report.passed
    bad = report.failed_pairs
    assert [(p.alpha, p.beta) for p in bad] == [(1, 99)]
    # same-basis overlap^2 is 1 for matching vectors, 0 otherwise
    assert bad[0].max_deviation == pytest.approx(1 - 1 / 5, abs=1e-12)


def test_verify_flags_incomplete_family():
    fam = prime_mub_family(5)
    short = MubFamily(5, fam.bases[:3], fam.provenance)
    assert not verify_family(short).passed


def test_completeness_of_each_basis():
    for fam in (prime_mub_family(7), dim8_mub_family()):
        for b in fam.bases:
            np.testing.assert_allclose(b.projectors().sum(axis=0), np.eye(fam.dim), atol=1e-10)


@pytest.mark.parametrize("dim", [2, 3])
def test_tomographic_completeness_gram_rank(dim):
    if dim == 2:
        fam = qubit_family()
    else:
        fam = prime_mub_family(dim)
    projs = np.concatenate([b.projectors() for b in fam.bases])
    flat = projs.reshape(len(projs), -1)
    gram = flat.conj() @ flat.T
    assert np.linalg.matrix_rank(gram, tol=1e-10) == dim * dim


def qubit_family():
    s = 1 / math.sqrt(2)
    z = np.eye(2)
    x = np.array([[s, s], [s, -s]])
    y = np.array([[s, s], [1j * s, -1j * s]])
    return MubFamily(2, [MubBasis(2, 0, z), MubBasis(2, 1, x), MubBasis(2, 2, y)], Provenance.PRIME_FORMULA)


def test_modulation_examples():
    uni = vector_to_modulation(QuditVector(np.ones(7) / math.sqrt(7)))
    np.testing.assert_allclose(uni.epsilons, 1 / math.sqrt(7))
    np.testing.assert_allclose(uni.phases, 0.0)

    setting = vector_to_modulation(prime_mub_vector(7, 7, 1))
    expected = [(2 * math.pi * (7 * l * l + l) / 7) % (2 * math.pi) for l in range(-3, 4)]
    np.testing.assert_allclose(setting.phases, expected, atol=1e-12)

    v = QuditVector([1 / math.sqrt(2), 1j / math.sqrt(2)])
    assert vector_to_modulation(v).phases[1] == pytest.approx(3 * math.pi / 2)


def test_modulation_rejects_unnormalized():
    with pytest.raises(ValueError, match="unit vector"):
        vector_to_modulation(QuditVector([1, 1]))


unit_vectors = st.integers(2, 9).flatmap(
    lambda d: st.lists(st.tuples(st.floats(-1, 1), st.floats(-1, 1)), min_size=d, max_size=d)
).map(lambda pairs: np.array([complex(a, b) for a, b in pairs])).filter(lambda v: np.linalg.norm(v) > 1e-3)


@settings(max_examples=200)
@given(unit_vectors)
def test_modulation_round_trip(v):
    vec = QuditVector(v / np.linalg.norm(v))
    rebuilt = vector_to_modulation(vec).to_vector()
    assert abs(vec.overlap(rebuilt)) ** 2 > 1 - 1e-12


def test_family_json_round_trip():
    for fam in (prime_mub_family(5), dim8_mub_family()):
        data = json.loads(json.dumps(family_to_dict(fam)))
        assert data["dim"] == fam.dim
        assert len(data["bases"][0]["vectors"][0]) == fam.dim
        back = family_from_dict(data)
        assert back.indices == fam.indices
        np.testing.assert_array_equal(back.stacked(), fam.stacked())


def test_family_json_vectors_are_basis_vectors():
    fam = prime_mub_family(3)
    data = family_to_dict(fam)
    re, im = data["bases"][2]["vectors"][0][1]
    np.testing.assert_allclose(complex(re, im), fam.bases[2].vector(0).amplitudes[1])


def test_modulation_csv_layout():
    text = modulation_csv(prime_mub_family(3))
    lines = text.strip().splitlines()
    assert lines[0] == "alpha,m,l,epsilon,phi_rad"
    assert len(lines) == 1 + 4 * 3 * 3
    assert lines[1].startswith("0,-1,-1,1,")
    text8 = modulation_csv(dim8_mub_family())
    assert "\n1,-3.5,-3.5," in text8


def test_family_for():
    assert len(family_for(7)) == 8
    assert len(family_for(8)) == 9
    with pytest.raises(ValueError, match="no construction available"):
        family_for(6)
    with pytest.raises(ValueError, match="no construction available"):
        family_for(7, "tables")


def test_certification_error_is_runtime_error():
    assert issubclass(CertificationError, RuntimeError)
