import pytest

from frobtest import (
    Status, is_filter_regular, is_system_of_parameters, make_filter_regular,
    sample_parameter_ideals, standardness_probe)
from frobtest.errors import FailedAfterTries, NotParameterSystemError
from frobtest.parameters import default_sop
from frobtest.rings import PresentedRing


@pytest.fixture(scope="module")
def plane_and_line():
    # a plane and a transversal line through the origin: not equidimensional
    return PresentedRing.build(2, ["x", "y", "z"], ["x*z", "y*z"])


@pytest.fixture(scope="module")
def line2():
    return PresentedRing.build(2, ["x"])


def test_is_sop_examples(poly2, sr2):
    assert is_system_of_parameters(poly2, "x, y").value is True
    assert is_system_of_parameters(sr2, "a+c, b+d").value is True
    short = is_system_of_parameters(poly2, "x")
    assert short.value is False and short.evidence["reason"] == "wrong length"
    assert is_system_of_parameters(poly2, "x+1, y").value is False
    assert is_system_of_parameters(sr2, "a, b+d").evidence["dim_quotient"] == 1


def test_filter_regular_examples(poly2, sr2):
    assert is_filter_regular(poly2, "x, y").value is True
    assert is_filter_regular(sr2, "a+c, b+d").value is True
    bad = is_filter_regular(sr2, "a, b+d")
    assert bad.value is False and bad.evidence["failing_index"] == 1


def test_filter_regularity_depends_on_order(plane_and_line):
    R = plane_and_line
    assert is_system_of_parameters(R, "x, y+z").value
    bad = is_filter_regular(R, "x, y+z")
    assert bad.value is False
    assert bad.evidence == {"failing_index": 1, "colon_element": "z"}
    assert is_filter_regular(R, "y+z, x").value is True


def test_make_filter_regular_returns_good_input_unchanged(sr2):
    seq = make_filter_regular(sr2, "a+c, b+d")
    assert [str(f) for f in seq.elements] == ["a + c", "b + d"]


def test_make_filter_regular_repairs_sequence(plane_and_line):
    R = plane_and_line
    seq = make_filter_regular(R, "x, y+z", seed=3)
    assert seq.is_filter_regular.value and seq.is_sop.value
    assert is_filter_regular(R, list(seq.elements)).value
    assert seq.ideal().same_ideal(R.ideal("x, y+z"))
    again = make_filter_regular(R, "x, y+z", seed=3)
    assert again.elements == seq.elements


def test_make_filter_regular_single_element(line2):
    seq = make_filter_regular(line2, "x")
    assert [str(f) for f in seq.elements] == ["x"]


def test_make_filter_regular_rejects_non_parameters(sr2):
    with pytest.raises(NotParameterSystemError):
        make_filter_regular(sr2, "a, b+d")


def test_make_filter_regular_reports_tried_set(plane_and_line):
    with pytest.raises(FailedAfterTries) as info:
        make_filter_regular(plane_and_line, "x, y+z", tries=0)
    assert info.value.tried == ["(x, y + z)"]


def test_standardness_probe(fermat2, sr2, line2, plane_and_line):
    assert standardness_probe(fermat2, "x, y").value is True
    v = standardness_probe(sr2, "a+c, b+d")
    assert v.value is True and v.status is Status.CERTIFIED_WINDOW
    assert v.evidence["power"] == 1
    assert standardness_probe(line2, "x").value is True
    # H^1 of the plane-and-line ring has infinite length
    v = standardness_probe(plane_and_line, "x+y+z, y+z")
    assert v.value is False and v.status is Status.TRUNCATED


def test_sampling_examples(poly2, fermat2):
    out = sample_parameter_ideals(poly2, 2, 1)
    assert len(out) == 2
    assert len({tuple(s.elements) for s in out}) == 2
    with pytest.raises(ValueError):
        sample_parameter_ideals(poly2, 0)
    quad = sample_parameter_ideals(fermat2, 4, 2, seed=5)
    assert all(s.is_sop.value for s in quad)
    assert any(f.total_degree() == 2 for s in quad for f in s.elements)


@pytest.mark.parametrize("name", ["poly2", "fermat2", "sr2", "nonreduced2"])
def test_samples_revalidate_and_are_reproducible(name, request):
    R = request.getfixturevalue(name)
    degree = 3 if name == "nonreduced2" else 2
    count = 3
    first = sample_parameter_ideals(R, count, degree, seed=11)
    second = sample_parameter_ideals(R, count, degree, seed=11)
    assert [s.elements for s in first] == [s.elements for s in second]
    for s in first:
        x = list(s.elements)
        assert is_system_of_parameters(R, x).value
        assert is_filter_regular(R, x).value
        assert all(f.is_homogeneous() for f in x)
        # filter-regularity survives Frobenius powers
        assert is_filter_regular(R, [f.frobenius(1) for f in x]).value


def test_default_sop(sr2, nonreduced2):
    assert is_filter_regular(sr2, list(default_sop(sr2).elements)).value
    assert [str(f) for f in default_sop(nonreduced2).elements] == ["y"]
