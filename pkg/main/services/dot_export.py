from typing import List, Tuple

from main.constants.signatures import Kind
from main.services.frames import Frame, minimal_members
from main.services.posets import iter_bits


def _set_label(mask: int) -> str:
    return '{' + ','.join(str(x) for x in iter_bits(mask)) + '}'


def _modal_edges(frame: Frame) -> Tuple[List[str], List[str]]:
    """Extra subset nodes and the dashed labelled edges of the modal structure"""
    if frame.kind in (Kind.BOX, Kind.SI):
        name = 'R' if frame.kind == Kind.BOX else 'R_s'
        edges = ['"s%d" -> "s%d" [style=dashed, label="%s", constraint=false] ;' % (x, y, name)
                 for x, y in frame.relation_pairs()]
        return [], edges

    if frame.kind == Kind.IM:
        labelled = [(x, 'N', a) for x, family in enumerate(frame.structure) for a in minimal_members(family)]
    else:
        labelled = [(x, name, a) for x, value in enumerate(frame.structure)
                    for name, family in zip(('N_box', 'N_dia'), value) for a in sorted(family)]
    masks = sorted({a for _, _, a in labelled})
    nodes = ['"m%d" [label="%s", shape=box, fillcolor=lightgrey] ;' % (a, _set_label(a)) for a in masks]
    edges = ['"s%d" -> "m%d" [style=dashed, label="%s", constraint=false] ;' % (x, a, name)
             for x, name, a in labelled]
    return nodes, edges


def frame_to_dot(frame: Frame) -> str:
    """Graphviz source: poset covers solid (upwards), modal structure dashed and labelled"""

    # Template, including setup and formatting:
    template = """digraph %s {
  rankdir = "BT" ;
  nodesep = 0.25 ;
  node [fontname="Helvetica", fontsize=10, shape=circle, style=filled, fillcolor=white] ;

  // The states
  %s

  // The order
  %s

  // The modal structure
  %s
}
"""
    states = ['"s%d" [label="%d"] ;' % (x, x) for x in range(frame.size)]
    covers = ['"s%d" -> "s%d" ;' % (x, y) for x, y in frame.base.covers()]
    extra_nodes, modal = _modal_edges(frame)
    return template % (frame.kind.value,
                       '\n  '.join(states + extra_nodes),
                       '\n  '.join(covers),
                       '\n  '.join(modal))
