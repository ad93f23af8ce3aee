"""Parameter domains, grids, and boundary segment bookkeeping."""

import numpy as np
import pytest

from surfcalc.domain import Grid, annulus_sector, disk_polar, unit_square


def test_unit_square_segments_chain():
    dom = unit_square()
    assert dom.kind == "unit-square"
    assert len(dom.segments) == 4
    assert not dom.periodic_axis2
    assert dom.area == pytest.approx(1.0)


def test_disk_polar_properties():
    dom = disk_polar(0.2, 1.0)
    assert dom.periodic_axis2
    assert len(dom.segments) == 2
    comps = {seg.component for seg in dom.segments}
    assert comps == {0, 1}  # two boundary loops
    with pytest.raises(ValueError):
        disk_polar(0.0, 1.0)  # singular at the pole
    with pytest.raises(ValueError):
        disk_polar(0.5, 0.4)


def test_annulus_sector_validation():
    dom = annulus_sector(0.3, 1.0, 0.0, np.pi / 2)
    assert len(dom.segments) == 4
    with pytest.raises(ValueError):
        annulus_sector(0.3, 1.0, 0.0, 2.5 * np.pi)


def test_grid_shapes_and_spacing():
    g = Grid(unit_square(), 8)
    assert g.shape == (9, 9)
    assert g.h1 == pytest.approx(1.0 / 8)
    gp = Grid(disk_polar(0.2, 1.0), 8)
    assert gp.shape == (9, 8)  # periodic angle stores the seam once
    assert gp.h2 == pytest.approx(2 * np.pi / 8)
    assert gp.x2[0] == 0.0 and gp.x2[-1] < 2 * np.pi


def test_segment_nodes_indexing():
    g = Grid(unit_square(), 6)
    for seg in g.boundary_segments():
        idx = g.segment_nodes(seg)
        vals = g.X1[idx]
        assert vals.shape == (7,)
    gp = Grid(disk_polar(0.2, 1.0), 6)
    outer = [s for s in gp.boundary_segments() if s.name == "r-max"][0]
    assert np.all(gp.X1[gp.segment_nodes(outer)] == 1.0)


def test_resolution_floor():
    with pytest.raises(ValueError):
        Grid(unit_square(), 2)
