"""Reading and writing meshes, regions and cycles.

Two mesh formats are understood:

* OFF text files (vertices and polygonal faces; only triangles accepted),
  with edge lengths taken from the coordinates;
* a JSON schema ``{"vertices"?, "faces", "edge_lengths"?, "fields"?,
  "provenance"?}`` where ``edge_lengths`` is a list of ``[i, j, L]`` triples.
  It allows abstract metrics with no embedding.

Regions and cycles are plain JSON index lists.  Output is deterministic: keys
are sorted and floats are written with ``repr`` precision.
"""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .errors import InputError
from .geometry import Cycle, Region, TriangulatedSurface


def read_off(path) -> TriangulatedSurface:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    tokens = []
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            tokens.extend(line.split())
    if not tokens or tokens[0] != "OFF":
        raise InputError(f"{path}: missing OFF header")
    try:
        nv, nf = int(tokens[1]), int(tokens[2])
        pos = 4
        verts = np.array(tokens[pos:pos + 3 * nv], dtype=float).reshape(nv, 3)
        pos += 3 * nv
        faces = []
        for _ in range(nf):
            k = int(tokens[pos])
            if k != 3:
                raise InputError(f"{path}: only triangular faces are supported (got {k}-gon)")
            faces.append([int(t) for t in tokens[pos + 1:pos + 4]])
            pos += 1 + k
    except (IndexError, ValueError) as exc:
        raise InputError(f"{path}: malformed OFF body") from exc
    return TriangulatedSurface.from_coordinates(verts, faces)


def write_off(surface: TriangulatedSurface, path) -> None:
    if surface.coordinates is None:
        raise InputError("OFF needs vertex coordinates; use the JSON format for abstract metrics")
    lines = ["OFF", f"{surface.n_vertices} {surface.n_faces} {surface.n_edges}"]
    lines += [" ".join(repr(float(c)) for c in v) for v in surface.coordinates]
    lines += ["3 " + " ".join(str(int(i)) for i in f) for f in surface.faces]
    Path(path).write_text("\n".join(lines) + "\n")


def mesh_to_dict(surface: TriangulatedSurface, provenance: dict | None = None) -> dict:
    d = {
        "faces": surface.faces.tolist(),
        "edge_lengths": [[int(i), int(j), float(L)]
                         for (i, j), L in zip(surface.edges.tolist(), surface.lengths)],
    }
    if surface.coordinates is not None:
        d["vertices"] = surface.coordinates.tolist()
    if surface.fields:
        d["fields"] = {k: np.asarray(v, float).tolist() for k, v in sorted(surface.fields.items())}
    if provenance:
        d["provenance"] = provenance
    return d


def mesh_from_dict(d: dict) -> TriangulatedSurface:
    if "faces" not in d:
        raise InputError("mesh JSON needs a 'faces' list")
    faces = d["faces"]
    if "edge_lengths" in d:
        try:
            lengths = {(int(i), int(j)): float(L) for i, j, L in d["edge_lengths"]}
        except (TypeError, ValueError) as exc:
            raise InputError("edge_lengths must be [i, j, L] triples") from exc
        surf = TriangulatedSurface.from_lengths(faces, lengths, d.get("vertices"))
    elif "vertices" in d:
        surf = TriangulatedSurface.from_coordinates(d["vertices"], faces)
    else:
        raise InputError("mesh JSON needs 'edge_lengths' or 'vertices'")
    fields = d.get("fields") or {}
    return surf.with_fields(**fields) if fields else surf


def dumps(obj) -> str:
    """Canonical JSON text (sorted keys, two-space indent, trailing newline)."""
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def write_json(obj, path) -> None:
    path = Path(path)
    try:
        path.write_text(dumps(obj))
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc


def read_json(path):
    path = Path(path)
    try:
        return json.loads(path.read_text())
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON ({exc})") from exc


def read_mesh(path) -> TriangulatedSurface:
    """Dispatch on the suffix: ``.off`` or ``.json``."""
    path = Path(path)
    suffix = path.suffix.lower()
    if suffix == ".off":
        return read_off(path)
    if suffix == ".json":
        return mesh_from_dict(read_json(path))
    raise InputError(f"{path}: unknown mesh format {suffix!r}")


def write_mesh(surface: TriangulatedSurface, path, provenance: dict | None = None) -> None:
    path = Path(path)
    if path.suffix.lower() == ".off":
        write_off(surface, path)
    else:
        write_json(mesh_to_dict(surface, provenance), path)


def region_to_list(region: Region) -> list[int]:
    return [int(f) for f in region.faces]


def region_from_list(items) -> Region:
    return Region.of(int(f) for f in items)


def cycle_to_list(cycle: Cycle) -> list[list[int]]:
    return [[int(i), int(j)] for i, j in cycle.edges]


def cycle_from_list(items) -> Cycle:
    return Cycle.of((int(i), int(j)) for i, j in items)
