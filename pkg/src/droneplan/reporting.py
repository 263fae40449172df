"""Run artifacts: SINR CDF, bounded Voronoi tessellation, tables, and the map image."""

from __future__ import annotations

import json
import os

import numpy as np

from . import channel


def sinr_cdf(placement, scenario, chan, radio):
    """Empirical CDF of per-user best-server SINR.

    Returns an (n, 2) array of (sinr_db, cumulative fraction) sorted by SINR,
    with fractions i/n for i = 1..n.
    """
    if scenario.n_users() == 0:
        raise ValueError("scenario has no users")
    _, sinr = channel.best_server_all(scenario.users, placement, chan, radio)
    order = np.sort(sinr)
    frac = np.arange(1, order.size + 1) / order.size
    return np.column_stack([order, frac])


def _distinct_sites(placement):
    """Active-drone ground projections with exact duplicates merged (first wins)."""
    pts = placement.coords[placement.active][:, :2]
    seen = {}
    for p in pts:
        key = (float(p[0]), float(p[1]))
        if key not in seen:
            seen[key] = p
    return np.array(list(seen.values()))


def _clip_half_plane(poly, point, normal):
    """Keep the part of a convex polygon on the side (p - point) . normal >= 0."""
    if len(poly) == 0:
        return poly
    d = (poly - point) @ normal
    out = []
    n = len(poly)
    for i in range(n):
        j = (i + 1) % n
        if d[i] >= 0.0:
            out.append(poly[i])
        if (d[i] >= 0.0) != (d[j] >= 0.0):
            t = d[i] / (d[i] - d[j])
            out.append(poly[i] + t * (poly[j] - poly[i]))
    return np.array(out) if out else np.empty((0, 2))


def voronoi_cells(placement, region):
    """Voronoi cells of active-drone ground points, clipped to the region.

    Each cell is the region rectangle intersected with the half-planes closer
    to its site than to any other site, so the cells tile the region exactly.
    Returns one polygon per distinct site, in site order.
    """
    sites = _distinct_sites(placement)
    if sites.shape[0] == 0:
        raise ValueError("placement has no active drone")
    box = np.array(
        [
            [0.0, 0.0],
            [region.width, 0.0],
            [region.width, region.height],
            [0.0, region.height],
        ]
    )
    cells = []
    for i, si in enumerate(sites):
        poly = box
        for j, sj in enumerate(sites):
            if i == j:
                continue
            poly = _clip_half_plane(poly, 0.5 * (si + sj), si - sj)
            if len(poly) == 0:
                break
        cells.append(poly)
    return cells


def polygon_area(poly):
    """Shoelace area of a simple polygon."""
    if len(poly) < 3:
        return 0.0
    x, y = poly[:, 0], poly[:, 1]
    return 0.5 * abs(float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1))))


def altitude_by_subarea(placement, scenario):
    """Mean active-drone altitude per subarea id (ground projection membership)."""
    out = {}
    coords = placement.coords[placement.active]
    for sub in scenario.subareas:
        inside = sub.rect.contains(coords[:, :2])
        out[sub.id] = float(coords[inside, 2].mean()) if inside.any() else None
    return out


def _write_csv(path, header, rows):
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(str(v) for v in row) + "\n")


def _map_svg(scenario, placement, cells, width_px=800):
    region = scenario.region
    scale = width_px / region.width
    height_px = region.height * scale

    def sx(x):
        return f"{x * scale:.2f}"

    def sy(y):
        # flip so the region's y axis points up in the image
        return f"{height_px - y * scale:.2f}"

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width_px:.0f}" '
        f'height="{height_px:.0f}" viewBox="0 0 {width_px:.0f} {height_px:.0f}">',
        f'<rect x="0" y="0" width="{width_px:.0f}" height="{height_px:.0f}" '
        'fill="white" stroke="black"/>',
    ]
    for sub in scenario.subareas:
        r = sub.rect
        parts.append(
            f'<rect x="{sx(r.x)}" y="{sy(r.y + r.h)}" width="{r.w * scale:.2f}" '
            f'height="{r.h * scale:.2f}" fill="none" stroke="#bbbbbb" stroke-dasharray="4 3"/>'
        )
    for poly in cells:
        if len(poly) < 3:
            continue
        points = " ".join(f"{sx(p[0])},{sy(p[1])}" for p in poly)
        parts.append(f'<polygon points="{points}" fill="none" stroke="#4477aa"/>')
    for u in scenario.users:
        parts.append(f'<circle class="user" cx="{sx(u[0])}" cy="{sy(u[1])}" r="1.5" fill="#2255cc"/>')
    for j in placement.active_indices():
        x, y, h = placement.coords[j]
        parts.append(
            f'<rect class="drone" x="{float(sx(x)) - 4:.2f}" y="{float(sy(y)) - 4:.2f}" '
            'width="8" height="8" fill="#cc3333"/>'
        )
        parts.append(
            f'<text x="{float(sx(x)) + 5:.2f}" y="{float(sy(y)) - 5:.2f}" '
            f'font-size="10" fill="#333333">{h:.0f} m</text>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def export_run(out_dir, scenario, placement, trace, report, cdf, cells):
    """Write all run artifacts into ``out_dir``; returns the file paths.

    Files: placements.csv, users.csv, sinr_cdf.csv, convergence.csv,
    constraints.json, map.svg.
    """
    os.makedirs(out_dir, exist_ok=True)
    paths = {name: os.path.join(out_dir, name) for name in (
        "placements.csv", "users.csv", "sinr_cdf.csv", "convergence.csv",
        "constraints.json", "map.svg",
    )}

    _write_csv(
        paths["placements.csv"],
        ["id", "x", "y", "h", "active"],
        [
            (j, repr(float(x)), repr(float(y)), repr(float(h)), int(placement.active[j]))
            for j, (x, y, h) in enumerate(placement.coords)
        ],
    )
    _write_csv(
        paths["users.csv"],
        ["x", "y"],
        [(repr(float(x)), repr(float(y))) for x, y in scenario.users],
    )
    _write_csv(
        paths["sinr_cdf.csv"],
        ["sinr_db", "cdf"],
        [(repr(float(s)), repr(float(f))) for s, f in cdf],
    )
    _write_csv(
        paths["convergence.csv"],
        ["iteration", "stage", "utility"],
        [(it, stage, repr(float(u))) for it, stage, u in trace.rows],
    )

    summary = {
        "n_users": report.n_users,
        "active_drones": placement.n_active(),
        "capacity_ok": bool(report.capacity_ok),
        "capacity_slack": [float(s) for s in report.capacity_slack],
        "covered_count": report.covered_count,
        "coverage_ok": bool(report.coverage_ok),
        "coverage_fraction": report.covered_count / report.n_users,
        "harmonic_se": report.harmonic_se,
        "se_ok": bool(report.se_ok),
        "all_ok": bool(report.all_ok()),
        "mean_altitude_by_subarea": altitude_by_subarea(placement, scenario),
    }
    with open(paths["constraints.json"], "w") as fh:
        json.dump(summary, fh, indent=1)
        fh.write("\n")

    with open(paths["map.svg"], "w") as fh:
        fh.write(_map_svg(scenario, placement, cells))
    return paths
