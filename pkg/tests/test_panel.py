import io

import numpy as np
import pytest

from immunoscan.errors import (
    DuplicateCellError,
    EntityNotFoundError,
    IncompletePanelError,
    NoCandidatesError,
    PanelFormatError,
    PanelInvariantError,
)
from immunoscan.panel import (
    FeaturePanel,
    panel_from_cells,
    parse_panel_csv,
    serialize_panel_csv,
    split_self_nonself,
)


def small_csv():
    return (
        "entity,year,feature,value\n"
        "A,2001,f1,1.0\n"
        "A,2001,f2,2.0\n"
        "A,2002,f1,3.0\n"
        "A,2002,f2,4.0\n"
        "B,2001,f1,5.0\n"
        "B,2001,f2,6.0\n"
        "B,2002,f1,7.0\n"
        "B,2002,f2,8.0\n"
    )


def test_parse_shapes_and_order():
    p = parse_panel_csv(small_csv())
    assert p.shape == (2, 2, 2)
    assert p.entities == ("A", "B")
    assert p.years == (2001, 2002)
    assert p.features == ("f1", "f2")
    assert p.values[1, 1, 0] == 7.0


def test_parse_accepts_file_object():
    p = parse_panel_csv(io.StringIO(small_csv()))
    assert p.shape == (2, 2, 2)


def test_rows_in_any_order_build_the_same_panel():
    lines = small_csv().strip().split("\n")
    shuffled = lines[:1] + lines[1:][::-1]
    p = parse_panel_csv("\n".join(shuffled) + "\n")
    # axis order comes from first appearance of entities/features and
    # sorted years, so the value grid must match the original layout
    q = parse_panel_csv(small_csv())
    assert p.years == q.years
    assert np.array_equal(np.sort(p.values, axis=None), np.sort(q.values, axis=None))


def test_header_must_match_exactly():
    with pytest.raises(PanelFormatError) as err:
        parse_panel_csv("entity,year,value,feature\nA,2001,f,1.0\n")
    assert err.value.line == 1


def test_duplicate_cell_reports_line():
    text = small_csv() + "B,2002,f2,9.0\n"
    with pytest.raises(DuplicateCellError) as err:
        parse_panel_csv(text)
    assert err.value.line == 10


def test_missing_cell_is_rejected():
    text = "\n".join(small_csv().strip().split("\n")[:-1]) + "\n"
    with pytest.raises(IncompletePanelError):
        parse_panel_csv(text)


def test_empty_input_is_rejected():
    with pytest.raises(IncompletePanelError):
        parse_panel_csv("entity,year,feature,value\n")
    with pytest.raises(PanelFormatError):
        parse_panel_csv("")


def test_non_numeric_and_non_finite_values_are_rejected():
    with pytest.raises(PanelFormatError):
        parse_panel_csv("entity,year,feature,value\nA,2001,f,abc\n")
    with pytest.raises(PanelFormatError):
        parse_panel_csv("entity,year,feature,value\nA,2001,f,inf\n")


def test_serialize_round_trip():
    p = parse_panel_csv(small_csv())
    q = parse_panel_csv(serialize_panel_csv(p))
    assert q.entities == p.entities
    assert q.years == p.years
    assert q.features == p.features
    assert np.array_equal(q.values, p.values)


def test_round_trip_preserves_awkward_floats():
    cells = [
        ("A", 2001, "f", 0.1),
        ("A", 2002, "f", 1e-17),
        ("A", 2003, "f", -3.141592653589793),
        ("B", 2001, "f", 2.0**-40),
        ("B", 2002, "f", 12345678.901234567),
        ("B", 2003, "f", 0.0),
    ]
    p = panel_from_cells(cells)
    q = parse_panel_csv(serialize_panel_csv(p))
    assert np.array_equal(q.values, p.values)


def test_content_digest_tracks_content_not_formatting():
    p = parse_panel_csv(small_csv())
    spaced = small_csv().replace("1.0", "1.00")
    q = parse_panel_csv(spaced)
    assert p.content_digest() == q.content_digest()
    r = parse_panel_csv(small_csv().replace("8.0", "8.5"))
    assert p.content_digest() != r.content_digest()


def test_values_are_read_only():
    p = parse_panel_csv(small_csv())
    with pytest.raises(ValueError):
        p.values[0, 0, 0] = 99.0


def test_entity_lookup_and_slice():
    p = parse_panel_csv(small_csv())
    assert p.entity_index("B") == 1
    s = p.entity_slice("A")
    assert s.entities == ("A",)
    assert np.array_equal(s.values[0], p.values[0])
    with pytest.raises(EntityNotFoundError):
        p.entity_index("Z")


def test_split_self_nonself():
    p = parse_panel_csv(small_csv())
    split = split_self_nonself(p, "A")
    assert split.self_id == "A"
    assert split.nonself_panel.entities == ("B",)
    with pytest.raises(EntityNotFoundError):
        split_self_nonself(p, "Z")


def test_split_needs_candidates():
    p = panel_from_cells([("A", 2001, "f", 1.0), ("A", 2002, "f", 2.0)])
    with pytest.raises(NoCandidatesError):
        split_self_nonself(p, "A")


def test_panel_invariants_enforced():
    with pytest.raises(PanelInvariantError):
        FeaturePanel(
            entities=("A", "A"),
            years=(2001,),
            features=("f",),
            values=np.zeros((2, 1, 1)),
        )
    with pytest.raises(PanelInvariantError):
        FeaturePanel(
            entities=("A",),
            years=(2002, 2001),
            features=("f",),
            values=np.zeros((1, 2, 1)),
        )
    with pytest.raises(PanelInvariantError):
        FeaturePanel(
            entities=("A",),
            years=(2001,),
            features=("f",),
            values=np.array([[[np.nan]]]),
        )
