# verification/exports.py
"""
Plot data and drawings derived from verification artifacts: diameter series
from a nesting report, ribbon diagrams of train tracks and grid/path scenes
of the Noebeling construction.
"""
import json
import logging
from fractions import Fraction
from pathlib import Path

import matplotlib

matplotlib.use('Agg')

import matplotlib.pyplot as plt  # noqa: E402
import networkx as nx  # noqa: E402
import pandas as pd  # noqa: E402
from matplotlib.patches import FancyArrowPatch  # noqa: E402

from laminations.tracks import SLOT_NAMES, classify_branches  # noqa: E402

logger = logging.getLogger(__name__)

DIAGRAM_VERSION = 1


class ExportError(ValueError):
    pass


# ========================
#  DIAMETER SERIES
# ========================
def diameter_frame(document, measure=None):
    """One row per step of every nesting check in a suite report document."""
    rows = []
    for check in document.get('checks', []):
        data = check.get('data') or {}
        if 'diameters' not in data or (measure and check['name'] != measure):
            continue
        for step, value in enumerate(data['diameters']):
            rows.append({
                'measure': check['name'],
                'track': data.get('track', ''),
                'step': step,
                'diameter': value,
                'value': float(Fraction(value)),
                'degenerate_at': data.get('degenerate_at'),
            })
    if not rows:
        raise ExportError('no diameter series in the report' + (f" for {measure}" if measure else ''))
    return pd.DataFrame(rows, columns=['measure', 'track', 'step', 'diameter', 'value', 'degenerate_at'])


# ========================
#  TRACK DIAGRAMS
# ========================
def track_diagram(track):
    """Switches as nodes, branches as edges with the slots they occupy."""
    kinds = classify_branches(track)
    nodes = [{'id': s} for s in range(track.num_switches)]
    edges = []
    for index, branch in enumerate(track.branches):
        edge = {'branch': index, 'kind': kinds[index].value}
        if branch:
            (u, a), (v, b) = branch
            edge.update(source=u, target=v, source_slot=SLOT_NAMES[a], target_slot=SLOT_NAMES[b])
        edges.append(edge)
    faces = [{'cusps': f.cusps, 'punctures': f.punctures} for f in track.faces]
    return {'version': DIAGRAM_VERSION, 'name': track.name, 'nodes': nodes, 'edges': edges, 'faces': faces}


def diagram_graph(diagram):
    graph = nx.MultiGraph()
    graph.add_nodes_from(node['id'] for node in diagram['nodes'])
    for edge in diagram['edges']:
        if 'source' in edge:
            graph.add_edge(edge['source'], edge['target'], key=edge['branch'], kind=edge['kind'])
    return graph


def draw_diagram(diagram, path):
    """Render a diagram to SVG; the layout is seeded so repeated exports match."""
    graph = diagram_graph(diagram)
    fig, ax = plt.subplots(figsize=(6, 6))
    ax.set_aspect('equal')
    ax.axis('off')
    if graph.number_of_nodes():
        layout = nx.spring_layout(graph, seed=0)
        parallel = {}
        for u, v, key, attrs in sorted(graph.edges(keys=True, data=True), key=lambda e: e[2]):
            pair = tuple(sorted((u, v)))
            rank = parallel.get(pair, 0)
            parallel[pair] = rank + 1
            colour = 'tab:red' if attrs['kind'] == 'LARGE' else 'tab:blue'
            if u == v:
                x, y = layout[u]
                ax.add_patch(plt.Circle((x + 0.08 * (rank + 1), y), 0.08 * (rank + 1), fill=False, color=colour))
                continue
            rad = 0.25 * ((rank + 1) // 2) * (1 if rank % 2 else -1)
            ax.add_patch(FancyArrowPatch(layout[u], layout[v], connectionstyle=f"arc3,rad={rad}",
                                         arrowstyle='-', color=colour, linewidth=1.5))
        xs, ys = zip(*(layout[n] for n in sorted(graph.nodes)))
        ax.scatter(xs, ys, s=60, color='black', zorder=3)
        for node in graph.nodes:
            ax.annotate(str(node), layout[node], textcoords='offset points', xytext=(6, 6), fontsize=9)
        ax.set_xlim(min(xs) - 0.5, max(xs) + 0.5)
        ax.set_ylim(min(ys) - 0.5, max(ys) + 0.5)
    else:
        ax.add_patch(plt.Circle((0, 0), 1, fill=False, color='tab:blue'))
        ax.set_xlim(-1.5, 1.5)
        ax.set_ylim(-1.5, 1.5)
    ax.set_title(diagram.get('name') or 'train track')
    with matplotlib.rc_context({'svg.hashsalt': 'tracklab'}):
        fig.savefig(path, format='svg', metadata={'Date': None})
    plt.close(fig)
    return path


def write_diagram(track, out):
    """``<out>/<name>.json`` and ``<out>/<name>.svg`` for one track."""
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    stem = (track.name or 'track').replace('/', '_')
    diagram = track_diagram(track)
    json_path = out / f"{stem}.json"
    json_path.write_text(json.dumps(diagram, indent=2, sort_keys=True) + '\n')
    svg_path = draw_diagram(diagram, out / f"{stem}.svg")
    logger.info('wrote diagram of %s to %s', track, json_path)
    return json_path, svg_path


# ========================
#  GRID SCENES
# ========================
SCENE_COLUMNS = ['kind', 'name', 'x0', 'y0', 'z0', 'x1', 'y1', 'z1']


def lattice_segment_count(level, box):
    """Edges of the level-``level`` lattice inside ``box``, counted by formula."""
    k = [int((hi - lo) * 2 ** level) for lo, hi in zip(box.lo, box.hi)]
    return sum(k[a] * (k[(a + 1) % 3] + 1) * (k[(a + 2) % 3] + 1) for a in range(3))


def grid_scene_frame(grid, named_paths=()):
    """Grid edges, then the segments of each path, as float coordinates."""
    rows = []
    for lo, hi in grid.segments():
        rows.append(['grid', ''] + [float(v) for v in lo] + [float(v) for v in hi])
    for name, path in named_paths:
        for _, _, start, end in path.segments():
            rows.append(['path', name] + list(start.as_floats()) + list(end.as_floats()))
    return pd.DataFrame(rows, columns=SCENE_COLUMNS)
