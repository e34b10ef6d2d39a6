import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from immunoscan.errors import InvalidParameterError
from immunoscan.normalize import GLOBAL, PER_ENTITY, normalize_minmax
from immunoscan.panel import FeaturePanel, panel_from_cells


def make_panel(values, entities=None):
    values = np.asarray(values, dtype=float)
    e, y, f = values.shape
    return FeaturePanel(
        entities=tuple(entities or (f"E{i}" for i in range(e))),
        years=tuple(range(2000, 2000 + y)),
        features=tuple(f"f{j}" for j in range(f)),
        values=values,
    )


def test_per_entity_scales_each_series_to_unit_interval():
    p = make_panel([[[0.0], [5.0], [10.0]], [[100.0], [150.0], [200.0]]])
    norm = normalize_minmax(p, PER_ENTITY)
    assert np.allclose(norm.values[0, :, 0], [0.0, 0.5, 1.0])
    assert np.allclose(norm.values[1, :, 0], [0.0, 0.5, 1.0])


def test_global_scope_shares_one_range_per_feature():
    p = make_panel([[[0.0], [5.0], [10.0]], [[10.0], [15.0], [20.0]]])
    norm = normalize_minmax(p, GLOBAL)
    assert np.allclose(norm.values[0, :, 0], [0.0, 0.25, 0.5])
    assert np.allclose(norm.values[1, :, 0], [0.5, 0.75, 1.0])


def test_constant_series_becomes_zero_with_warning():
    p = make_panel([[[7.0, 1.0], [7.0, 2.0]]])
    norm = normalize_minmax(p, PER_ENTITY)
    assert np.all(norm.values[0, :, 0] == 0.0)
    assert np.allclose(norm.values[0, :, 1], [0.0, 1.0])
    assert len(norm.warnings) == 1
    assert "f0" in norm.warnings[0]


def test_unknown_scope_rejected():
    p = make_panel([[[1.0], [2.0]]])
    with pytest.raises(InvalidParameterError):
        normalize_minmax(p, "banana")


def test_provenance_digest_matches_source():
    p = make_panel([[[1.0], [2.0]]])
    norm = normalize_minmax(p)
    assert norm.source_digest == p.content_digest()
    assert norm.scope == PER_ENTITY


def test_normalization_bounds_and_extremes_random():
    rng = np.random.default_rng(99)
    for _ in range(200):
        e, y, f = rng.integers(1, 5), rng.integers(2, 6), rng.integers(1, 4)
        p = make_panel(rng.uniform(-1e3, 1e3, (e, y, f)))
        norm = normalize_minmax(p, PER_ENTITY)
        assert np.all(norm.values >= 0.0)
        assert np.all(norm.values <= 1.0)
        for ei in range(e):
            for fi in range(f):
                col = norm.values[ei, :, fi]
                src = p.values[ei, :, fi]
                if np.ptp(src) > 0:
                    assert col.min() == 0.0
                    assert col.max() == 1.0


@settings(max_examples=60, deadline=None)
@given(
    st.lists(
        st.floats(
            min_value=-1e6, max_value=1e6, allow_nan=False, allow_infinity=False
        ),
        min_size=2,
        max_size=8,
    )
)
def test_idempotence_on_already_scaled_series(series):
    p = make_panel(np.array(series, dtype=float).reshape(1, -1, 1))
    once = normalize_minmax(p, PER_ENTITY)
    twice = normalize_minmax(once.panel, PER_ENTITY)
    assert np.allclose(twice.values, once.values, atol=1e-12)


def test_single_cell_panel_is_constant_case():
    p = panel_from_cells([("A", 2001, "f", 42.0), ("B", 2001, "f", 7.0)])
    norm = normalize_minmax(p, PER_ENTITY)
    assert np.all(norm.values == 0.0)
    assert len(norm.warnings) == 2
