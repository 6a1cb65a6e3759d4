"""
Phase portraits on the Poincare disk
====================================

Renders the three reference fields to SVG (plus trajectory CSV and a JSON
manifest) in ./portraits.  Points at infinity sit on the boundary circle, in
antipodal pairs.
"""
from pathlib import Path

from opf.acceptance import portrait_fixtures
from opf.portrait import PortraitSpec, render_portrait

out = Path("portraits")
out.mkdir(exist_ok=True)
spec = PortraitSpec(grid=7, horizon=6.0)

for i, (name, sys) in enumerate(portrait_fixtures().items()):
    p = render_portrait(sys, spec)
    stem = out / f"portrait_{i}"
    p.write(stem.with_suffix(".svg"), stem.with_suffix(".csv"), stem.with_suffix(".json"))
    kinds = [r.kind.value for r in p.finite] + [q.kind.value for q in p.infinity]
    print(f"{name}: {len(p.trajectories)} trajectories, {p.glyph_count} glyphs -> {stem}.svg")
    print("   ", ", ".join(kinds))
