import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from src.glass_multistability.core import (
    all_subsets,
    code,
    code_vector,
    complement,
    mask_chunks,
    projection_matrix,
    signature,
    signature_matrix,
    signature_vector,
    subsets_of,
)
from src.glass_multistability.models import (
    DimensionMismatchError,
    EnumerationTooLargeError,
    IndexSet,
    InvalidSetError,
)


@st.composite
def index_sets(draw, max_n=10):
    n = draw(st.integers(min_value=1, max_value=max_n))
    mask = draw(st.integers(min_value=0, max_value=(1 << n) - 1))
    return IndexSet(n, mask)


@given(index_sets())
def test_complement_is_an_involution(a):
    assert complement(complement(a)) == a
    assert complement(a).isdisjoint(a)
    assert a.union(complement(a)) == IndexSet.full(a.n)


@given(index_sets())
def test_signature_is_code_minus_complement_code(a):
    assert np.array_equal(signature_vector(a), code_vector(a) - code_vector(complement(a)))
    assert np.array_equal(signature_vector(a), 2 * code_vector(a) - 1)


@given(index_sets())
def test_signature_matrix_is_an_involution(a):
    s = signature_matrix(a)
    assert np.array_equal(s @ s, np.eye(a.n))
    assert np.array_equal(projection_matrix(a) @ np.ones(a.n), code_vector(a))


def test_code_and_signature_of_a_set():
    a = IndexSet.from_members(3, [1, 3])
    assert code(a).bits == (1, 0, 1)
    assert signature(a).signs == (1, -1, 1)
    assert complement(a).members == (2,)


def test_parse_and_format():
    a = IndexSet.parse(4, "1,3")
    assert a.members == (1, 3)
    assert a.mask == 0b101
    assert str(a) == "{1,3}"
    assert IndexSet.parse(4, "").is_empty()
    assert IndexSet.parse(4, "{}").is_empty()
    assert IndexSet.parse(4, "{2, 4}").members == (2, 4)


@pytest.mark.parametrize("text", ["1,1", "0", "5", "a,b"])
def test_parse_rejects_bad_literals(text):
    with pytest.raises(InvalidSetError):
        IndexSet.parse(4, text)


def test_from_mask_keeps_bits_inside_the_dimension():
    assert IndexSet.from_mask(3, 0b110).members == (2, 3)
    with pytest.raises(InvalidSetError):
        IndexSet.from_mask(3, 0b1000)


def test_set_algebra():
    a = IndexSet.from_members(4, [1, 2])
    b = IndexSet.from_members(4, [2, 3])
    assert a.union(b).members == (1, 2, 3)
    assert a.intersection(b).members == (2,)
    assert a.difference(b).members == (1,)
    assert IndexSet.from_members(4, [2]).issubset(a)
    assert not a.isdisjoint(b)
    with pytest.raises(DimensionMismatchError):
        a.union(IndexSet(3, 1))


def test_all_subsets_enumerates_each_subset_once_in_mask_order():
    subsets = list(all_subsets(4))
    assert len(subsets) == 16
    assert [a.mask for a in subsets] == list(range(16))


def test_all_subsets_respects_the_cap():
    with pytest.raises(EnumerationTooLargeError):
        list(all_subsets(25))
    with pytest.raises(EnumerationTooLargeError):
        list(all_subsets(5, cap=4))


def test_subsets_of_a_set():
    a = IndexSet.from_members(4, [1, 3])
    assert [s.mask for s in subsets_of(a)] == [0, 1, 4, 5]
    assert [s.members for s in subsets_of(a, proper=True, nonempty=True)] == [(1,), (3,)]


def test_mask_chunks_with_required_bits():
    masks = np.concatenate(list(mask_chunks(3, chunk=3, required=0b100)))
    assert masks.tolist() == [4, 5, 6, 7]
