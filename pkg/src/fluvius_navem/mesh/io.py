from pathlib import Path

from ..exceptions import MeshFormatError
from ..status import BoundaryMarker
from .model import PolygonalMesh

MESH_HEADER = "poly-mesh 1"


def save_mesh(mesh: PolygonalMesh, path):
    lines = [MESH_HEADER, f"{mesh.n_vertices} {mesh.n_cells} {len(mesh.boundary_markers)}"]
    lines.extend(f"{x:.17g} {y:.17g}" for x, y in mesh.vertices)
    lines.extend(" ".join(str(i) for i in (len(cell),) + cell) for cell in mesh.cells)
    lines.extend(f"{a} {b} {marker.value}" for (a, b), marker in sorted(mesh.boundary_markers.items()))
    Path(path).write_text("\n".join(lines) + "\n")


def _numbers(tokens, kind, lineno):
    try:
        return [kind(t) for t in tokens]
    except ValueError:
        raise MeshFormatError('M01301', f'Line {lineno}: invalid number in {" ".join(tokens)!r}')


def load_mesh(path) -> PolygonalMesh:
    rows = [(n + 1, line.split()) for n, line in enumerate(Path(path).read_text().splitlines())]
    rows = [(n, tokens) for n, tokens in rows if tokens]
    if not rows or " ".join(rows[0][1]) != MESH_HEADER:
        raise MeshFormatError('M01302', f'Line 1: expected header {MESH_HEADER!r}')

    if len(rows) < 2 or len(rows[1][1]) != 3:
        raise MeshFormatError('M01303', 'Line 2: expected "<n_vertices> <n_cells> <n_marked_edges>"')
    n_vertices, n_cells, n_marked = _numbers(rows[1][1], int, rows[1][0])

    body = rows[2:]
    if len(body) != n_vertices + n_cells + n_marked:
        raise MeshFormatError(
            'M01304', f'Expected {n_vertices + n_cells + n_marked} records after the counts, found {len(body)}')

    vertices = []
    for lineno, tokens in body[:n_vertices]:
        if len(tokens) != 2:
            raise MeshFormatError('M01305', f'Line {lineno}: a vertex needs exactly 2 coordinates')
        vertices.append(_numbers(tokens, float, lineno))

    cells = []
    for lineno, tokens in body[n_vertices:n_vertices + n_cells]:
        values = _numbers(tokens, int, lineno)
        if len(values) != values[0] + 1:
            raise MeshFormatError(
                'M01306', f'Line {lineno}: cell declares {values[0]} vertices, lists {len(values) - 1}')
        cells.append(values[1:])

    markers = {}
    for lineno, tokens in body[n_vertices + n_cells:]:
        if len(tokens) != 3:
            raise MeshFormatError('M01307', f'Line {lineno}: a marked edge is "i j D|N"')
        a, b = _numbers(tokens[:2], int, lineno)
        try:
            markers[(a, b)] = BoundaryMarker(tokens[2])
        except ValueError:
            raise MeshFormatError('M01308', f'Line {lineno}: unknown boundary marker {tokens[2]!r}')

    return PolygonalMesh(vertices, cells, markers)
