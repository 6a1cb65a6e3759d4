import csv
import io
import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

from opf.darboux import DarbouxProblem, invariant_lines, solve_cofactor_relation
from opf.errors import PreconditionViolated
from opf.portrait import PortraitSpec, darboux_drift, disk_map, render_portrait
from opf.vfield import build_parametric_a, build_parametric_b

QUICK = dict(grid=3, horizon=3.0)
coords = st.floats(-1e6, 1e6, allow_nan=False)


@given(coords, coords)
def test_disk_map_lands_in_the_open_disk(v, x):
    q = disk_map([v, x])
    assert np.hypot(*q) < 1.0
    # direction is preserved
    assert np.sign(q[0]) == np.sign(v) and np.sign(q[1]) == np.sign(x)


@given(st.floats(0, 1e3), st.floats(0, 1e3))
def test_disk_map_is_radially_monotone(r1, r2):
    a, b = sorted((r1, r2))
    assert np.hypot(*disk_map([a, 0.0])) <= np.hypot(*disk_map([b, 0.0]))


def test_disk_map_vectorizes():
    pts = np.array([[0.0, 0.0], [3.0, 4.0]])
    out = disk_map(pts)
    assert out.shape == (2, 2)
    assert np.allclose(out[1], np.array([3.0, 4.0]) / (1 + np.sqrt(26.0)))


@pytest.mark.parametrize("kwargs", [
    dict(tol=1.0), dict(tol=1e-14), dict(mode="sphere"), dict(seeds=("grid", "random")),
    dict(horizon=0.0), dict(max_trajectories=-1),
])
def test_spec_validation(kwargs):
    with pytest.raises(PreconditionViolated):
        PortraitSpec(**kwargs)


@pytest.fixture(scope="module")
def jacobi_portrait():
    return render_portrait(build_parametric_a(2, 1, 1), PortraitSpec(**QUICK))


def test_glyphs_match_classifiers(jacobi_portrait):
    p = jacobi_portrait
    assert p.glyph_count == p.expected_glyphs() == len(p.finite) + 2 * len(p.infinity)
    kinds = [r.kind.value for r in p.finite]
    for k in kinds:
        assert f'data-kind="{k}"' in p.svg


def test_rendering_is_deterministic(jacobi_portrait):
    again = render_portrait(build_parametric_a(2, 1, 1), PortraitSpec(**QUICK))
    assert again.svg == jacobi_portrait.svg


def test_csv_and_manifest(tmp_path, jacobi_portrait):
    man = jacobi_portrait.write(tmp_path / "p.svg", tmp_path / "p.csv", tmp_path / "m.json")
    rows = list(csv.reader(io.StringIO((tmp_path / "p.csv").read_text())))
    assert rows[0] == ["trajectory_id", "t", "v", "x"]
    ids = {int(r[0]) for r in rows[1:]}
    assert ids == {rt.id for rt in jacobi_portrait.trajectories}
    on_disk = json.loads((tmp_path / "m.json").read_text())
    assert on_disk["glyphs"] == man["glyphs"] == jacobi_portrait.glyph_count
    assert set(on_disk["files"]) == {"svg", "csv", "manifest"}
    assert (tmp_path / "p.svg").read_text().startswith("<svg")


def test_trajectories_respect_invariant_lines(jacobi_portrait):
    for rt in jacobi_portrait.trajectories:
        x = rt.trajectory.points[:, 1]
        # nothing starting strictly between the lines x = -1 and x = 1 crosses them
        if abs(x[0]) < 1:
            assert np.all(np.abs(x) < 1 + 1e-12)


def test_darboux_drift_on_rendered_trajectories():
    sys = build_parametric_a(2, 1, 0)
    cert = solve_cofactor_relation(DarbouxProblem(sys, invariant_lines(sys)))
    portrait = render_portrait(sys, PortraitSpec(**QUICK))
    worst, checked = darboux_drift(portrait, cert)
    assert checked > 0 and worst < 1e-5


def test_plane_mode_draws_only_visible_points():
    spec = PortraitSpec(mode="plane", window=(-0.5, 0.5, -2.0, 2.0), grid=3, horizon=2.0)
    p = render_portrait(build_parametric_a(2, 1, 1), spec)
    assert p.infinity == []
    assert p.glyph_count == p.expected_glyphs() == 2


def test_user_seeds_only():
    spec = PortraitSpec(seeds=("user",), user_seeds=((0.1, 0.2), (1.0, 3.0)), horizon=1.0)
    p = render_portrait(build_parametric_b(2, 1, 1, 0), spec)
    assert len(p.trajectories) == 4
    assert {tuple(rt.seed.start) for rt in p.trajectories} == {(0.1, 0.2), (1.0, 3.0)}
