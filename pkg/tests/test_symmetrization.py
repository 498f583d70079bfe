import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from symphase.core import conj_reverse, dft
from symphase.errors import MetadataError, NonRealLeadingEntry
from symphase.symmetrization import (
    SymmetrizedVector,
    data_mask,
    extract,
    in_c0,
    is_conjugate_symmetric,
    symmetrize,
    symmetrize_padded,
    symmetrize_padded_A,
    symmetrize_padded_B,
    symmetrized_length,
    zero_block,
)

from conftest import complex_vectors, crandn


def real_lead(x):
    x = np.array(x, dtype=complex)
    x[0] = x[0].real
    return x


def test_symmetrize_examples():
    out = symmetrize([1, 2 + 1j, 3 - 2j])
    np.testing.assert_array_equal(out.entries, [1, 2 + 1j, 3 - 2j, 3 + 2j, 2 - 1j])
    assert out.variant == "plain" and out.origin_n == 3
    np.testing.assert_array_equal(symmetrize([1, 1]).entries, [1, 1, 1])
    assert not is_conjugate_symmetric(symmetrize([1j, 1]).entries)


def test_padded_a_examples():
    np.testing.assert_array_equal(symmetrize_padded_A([1, 1]).entries, [1, 1, 0, 0, 1])
    for n in (1, 3, 6):
        e0 = np.eye(n)[0]
        np.testing.assert_array_equal(symmetrize_padded_A(e0).entries, np.eye(4 * n - 3)[0])
    s = symmetrize_padded_A([1, 1j]).entries
    np.testing.assert_array_equal(s, [1, 1j, 0, 0, -1j])
    assert np.linalg.norm(s) ** 2 == pytest.approx(3.0, abs=1e-15)


def test_padded_a_rejects_complex_lead():
    with pytest.raises(NonRealLeadingEntry):
        symmetrize_padded_A([1j, 1])
    # tolerance is relative to the norm
    symmetrize_padded_A([1 + 1e-14j, 1])


def test_padded_b_examples():
    np.testing.assert_array_equal(symmetrize_padded_B([1j, 1]).entries, [0, 0, 1j, 1, 1, -1j, 0])
    np.testing.assert_array_equal(symmetrize_padded_B(np.zeros(3)).entries, np.zeros(11))
    assert is_conjugate_symmetric(symmetrize_padded_B([2 + 3j, -1]).entries)


def test_extract_examples():
    s = SymmetrizedVector(np.array([1, 1, 0, 0, 1], dtype=complex), "A", 2)
    np.testing.assert_array_equal(extract(s), [1, 1])
    s = SymmetrizedVector(np.array([0, 0, 1j, 1, 1, -1j, 0]), "B", 2)
    np.testing.assert_array_equal(extract(s), [1j, 1])


def test_extract_needs_metadata():
    with pytest.raises(MetadataError):
        extract(np.array([1, 1, 0, 0, 1]))
    with pytest.raises(MetadataError):
        SymmetrizedVector(np.zeros(6), "A", 2)
    with pytest.raises(MetadataError):
        symmetrized_length(2, "C")


def test_extract_averages_mirror_copies():
    s = symmetrize_padded_B([1 + 1j, 2]).entries.copy()
    s[2] += 0.2  # x0 copy
    s[5] += 0.2  # its mirror carries conj(x0)
    got = extract(SymmetrizedVector(s, "B", 2))
    np.testing.assert_allclose(got, [1.2 + 1j, 2], atol=1e-15)


def test_is_conjugate_symmetric_examples():
    assert is_conjugate_symmetric([1, 1, 1])
    assert not is_conjugate_symmetric([1, 1j, 1j])
    assert is_conjugate_symmetric([1, 2 + 1j, 2 - 1j])


def test_round_trip_random(rng):
    for _ in range(100):
        n = int(rng.integers(1, 33))
        x = real_lead(crandn(rng, n))
        np.testing.assert_array_equal(extract(symmetrize_padded_A(x)), x)
        y = crandn(rng, n)
        np.testing.assert_array_equal(extract(symmetrize_padded_B(y)), y)


@given(complex_vectors(max_size=40), st.sampled_from(["A", "B"]))
def test_symmetric_real_spectrum_and_sandwich(x, variant):
    if variant == "A":
        x = real_lead(x)
    s = symmetrize_padded(x, variant)
    v = s.entries
    assert v.size == symmetrized_length(x.size, variant)
    nx = np.linalg.norm(x)
    assert np.linalg.norm(v - conj_reverse(v)) == 0.0
    assert np.max(np.abs(dft(v).imag)) <= 1e-10 * nx + 1e-300
    ns2 = np.linalg.norm(v) ** 2
    assert nx**2 * (1 - 1e-12) <= ns2 <= 2 * nx**2 * (1 + 1e-12)
    np.testing.assert_array_equal(extract(s), x)


@pytest.mark.parametrize("n", [1, 2, 3, 7])
@pytest.mark.parametrize("variant", ["A", "B"])
def test_zero_block_layout(n, variant):
    x = np.arange(1, n + 1, dtype=complex)
    v = symmetrize_padded(x, variant).entries
    zb = zero_block(n, variant)
    assert len(zb) == (2 * n - 2 if variant == "A" else 2 * n - 1)
    # one cyclic run of consecutive indices
    m = v.size
    assert all((b - a) % m == 1 for a, b in zip(zb, zb[1:]))
    assert np.all(v[zb] == 0)
    mask = data_mask(n, variant)
    assert not np.any(mask[zb]) and np.count_nonzero(mask) + len(zb) == m


def test_in_c0():
    assert in_c0([1, 1j])
    assert not in_c0([1j, 1])
