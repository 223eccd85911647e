"""Graph exchange formats: GraphML, GEXF 1.2, and a plain edge CSV.

Writers are hand-rolled so the output is byte-deterministic: nodes and edges
are sorted, no timestamps or tool banners are emitted, and every float is
encoded with format(x, ".16e") (17 significant digits), which round-trips
float64 exactly and comfortably exceeds the 9-digit floor the exports promise.

The CSV form carries edges only; isolated nodes and node attributes do not
survive it, which the reader reports via edges_only.
"""

from __future__ import annotations

import csv
import io
import xml.etree.ElementTree as ET
from dataclasses import dataclass
from xml.sax.saxutils import escape, quoteattr

from .simgraph import GroupGraph, SimilarityGraph, edge_key

GRAPHML_NS = "http://graphml.graphdrawing.org/xmlns"
GEXF_NS = "http://www.gexf.net/1.2draft"

FORMATS = ("graphml", "gexf", "edge-csv")


def encode_float(x: float) -> str:
    """Fixed-width scientific notation; float(encode_float(x)) == x exactly."""
    return format(float(x), ".16e")


@dataclass(frozen=True)
class LoadedGraph:
    """Reader output: node id -> attribute dict, canonical edge pair -> weight.
    edges_only marks formats that cannot carry nodes without edges."""

    nodes: dict[str, dict[str, object]]
    edges: dict[tuple[str, str], float]
    edges_only: bool = False


def _node_rows(graph: SimilarityGraph | GroupGraph) -> list[tuple[str, dict[str, object]]]:
    if isinstance(graph, SimilarityGraph):
        degrees = graph.weighted_degrees()
        return [
            (node, {"sku": node, "group": graph.nodes[node], "weighted_degree": degrees[node]})
            for node in sorted(graph.nodes)
        ]
    return [
        (
            s.group,
            {
                "group": s.group,
                "product_count": s.product_count,
                "degree_sum": s.degree_sum,
                "self_weight": graph.self_weights.get(s.group, 0.0),
            },
        )
        for s in graph.stats
    ]


def _edge_rows(graph: SimilarityGraph | GroupGraph) -> list[tuple[str, str, float]]:
    return [(a, b, w) for (a, b), w in sorted(graph.edges.items())]


_ATTR_ORDER = ("sku", "group", "weighted_degree", "product_count", "degree_sum", "self_weight")
_GRAPHML_TYPES = {
    "sku": "string",
    "group": "string",
    "weighted_degree": "double",
    "product_count": "int",
    "degree_sum": "double",
    "self_weight": "double",
}
_GEXF_TYPES = {
    "sku": "string",
    "group": "string",
    "weighted_degree": "double",
    "product_count": "integer",
    "degree_sum": "double",
    "self_weight": "double",
}


def _attr_text(value: object) -> str:
    if isinstance(value, float):
        return encode_float(value)
    return str(value)


def _used_attrs(nodes: list[tuple[str, dict[str, object]]]) -> list[str]:
    used = set()
    for _, attrs in nodes:
        used.update(attrs)
    return [name for name in _ATTR_ORDER if name in used]


def write_graphml_string(graph: SimilarityGraph | GroupGraph) -> str:
    nodes = _node_rows(graph)
    edges = _edge_rows(graph)
    attrs = _used_attrs(nodes)
    key_ids = {name: f"d{i}" for i, name in enumerate(attrs)}

    out = io.StringIO()
    out.write('<?xml version="1.0" encoding="utf-8"?>\n')
    out.write(f'<graphml xmlns="{GRAPHML_NS}">\n')
    for name in attrs:
        out.write(
            f'  <key id="{key_ids[name]}" for="node" attr.name={quoteattr(name)}'
            f' attr.type="{_GRAPHML_TYPES[name]}"/>\n'
        )
    out.write('  <key id="w" for="edge" attr.name="weight" attr.type="double"/>\n')
    out.write('  <graph edgedefault="undirected">\n')
    for node_id, node_attrs in nodes:
        out.write(f"    <node id={quoteattr(node_id)}>\n")
        for name in attrs:
            if name in node_attrs:
                out.write(
                    f'      <data key="{key_ids[name]}">{escape(_attr_text(node_attrs[name]))}</data>\n'
                )
        out.write("    </node>\n")
    for a, b, w in edges:
        out.write(f"    <edge source={quoteattr(a)} target={quoteattr(b)}>\n")
        out.write(f'      <data key="w">{encode_float(w)}</data>\n')
        out.write("    </edge>\n")
    out.write("  </graph>\n")
    out.write("</graphml>\n")
    return out.getvalue()


def write_gexf_string(graph: SimilarityGraph | GroupGraph) -> str:
    nodes = _node_rows(graph)
    edges = _edge_rows(graph)
    attrs = _used_attrs(nodes)
    attr_ids = {name: str(i) for i, name in enumerate(attrs)}

    out = io.StringIO()
    out.write('<?xml version="1.0" encoding="utf-8"?>\n')
    out.write(f'<gexf xmlns="{GEXF_NS}" version="1.2">\n')
    out.write('  <graph defaultedgetype="undirected">\n')
    out.write('    <attributes class="node">\n')
    for name in attrs:
        out.write(
            f'      <attribute id="{attr_ids[name]}" title={quoteattr(name)}'
            f' type="{_GEXF_TYPES[name]}"/>\n'
        )
    out.write("    </attributes>\n")
    out.write("    <nodes>\n")
    for node_id, node_attrs in nodes:
        out.write(f"      <node id={quoteattr(node_id)} label={quoteattr(node_id)}>\n")
        out.write("        <attvalues>\n")
        for name in attrs:
            if name in node_attrs:
                out.write(
                    f'          <attvalue for="{attr_ids[name]}"'
                    f" value={quoteattr(_attr_text(node_attrs[name]))}/>\n"
                )
        out.write("        </attvalues>\n")
        out.write("      </node>\n")
    out.write("    </nodes>\n")
    out.write("    <edges>\n")
    for i, (a, b, w) in enumerate(edges):
        out.write(
            f'      <edge id="{i}" source={quoteattr(a)} target={quoteattr(b)}'
            f' weight="{encode_float(w)}"/>\n'
        )
    out.write("    </edges>\n")
    out.write("  </graph>\n")
    out.write("</gexf>\n")
    return out.getvalue()


def write_edge_csv_string(graph: SimilarityGraph | GroupGraph) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["source", "target", "weight"])
    for a, b, w in _edge_rows(graph):
        writer.writerow([a, b, encode_float(w)])
    return out.getvalue()


_WRITERS = {
    "graphml": write_graphml_string,
    "gexf": write_gexf_string,
    "edge-csv": write_edge_csv_string,
}


def export_graph_string(graph: SimilarityGraph | GroupGraph, fmt: str) -> str:
    try:
        writer = _WRITERS[fmt]
    except KeyError:
        raise ValueError(f"unknown format {fmt!r} (expected one of: {', '.join(FORMATS)})") from None
    return writer(graph)


def export_graph(graph: SimilarityGraph | GroupGraph, fmt: str, path: str) -> None:
    """Write the graph to path; format is graphml, gexf, or edge-csv."""
    text = export_graph_string(graph, fmt)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def _local(tag: str) -> str:
    return tag.rsplit("}", 1)[-1]


def _parse_typed(value: str, attr_type: str) -> object:
    if attr_type in ("double", "float"):
        return float(value)
    if attr_type in ("int", "long", "integer"):
        return int(value)
    return value


def _add_edge(edges: dict[tuple[str, str], float], a: str, b: str, w: float, where: str) -> None:
    key = edge_key(a, b)
    if key in edges:
        raise ValueError(f"{where}: duplicate edge {key}")
    edges[key] = w


def read_graphml(path: str) -> LoadedGraph:
    root = ET.parse(path).getroot()
    if _local(root.tag) != "graphml":
        raise ValueError(f"{path}: not a GraphML document")
    keys: dict[str, tuple[str, str]] = {}
    for el in root:
        if _local(el.tag) == "key":
            keys[el.get("id", "")] = (el.get("attr.name", ""), el.get("attr.type", "string"))
    graph_el = next((el for el in root if _local(el.tag) == "graph"), None)
    if graph_el is None:
        raise ValueError(f"{path}: no <graph> element")

    nodes: dict[str, dict[str, object]] = {}
    edges: dict[tuple[str, str], float] = {}
    for el in graph_el:
        tag = _local(el.tag)
        if tag == "node":
            node_id = el.get("id")
            if node_id is None:
                raise ValueError(f"{path}: node without id")
            attrs: dict[str, object] = {}
            for data in el:
                if _local(data.tag) != "data":
                    continue
                name, attr_type = keys.get(data.get("key", ""), (data.get("key", ""), "string"))
                attrs[name] = _parse_typed(data.text or "", attr_type)
            nodes[node_id] = attrs
        elif tag == "edge":
            a, b = el.get("source"), el.get("target")
            if a is None or b is None:
                raise ValueError(f"{path}: edge missing endpoints")
            weight = None
            for data in el:
                if _local(data.tag) != "data":
                    continue
                name, attr_type = keys.get(data.get("key", ""), (data.get("key", ""), "string"))
                if name == "weight":
                    weight = float(data.text or "nan")
            if weight is None:
                raise ValueError(f"{path}: edge ({a}, {b}) has no weight")
            _add_edge(edges, a, b, weight, path)
    for a, b in edges:
        if a not in nodes or b not in nodes:
            raise ValueError(f"{path}: edge ({a}, {b}) references an undeclared node")
    return LoadedGraph(nodes=nodes, edges=edges)


def read_gexf(path: str) -> LoadedGraph:
    root = ET.parse(path).getroot()
    if _local(root.tag) != "gexf":
        raise ValueError(f"{path}: not a GEXF document")
    graph_el = next((el for el in root if _local(el.tag) == "graph"), None)
    if graph_el is None:
        raise ValueError(f"{path}: no <graph> element")

    attr_defs: dict[str, tuple[str, str]] = {}
    nodes: dict[str, dict[str, object]] = {}
    edges: dict[tuple[str, str], float] = {}
    for section in graph_el:
        tag = _local(section.tag)
        if tag == "attributes" and section.get("class") == "node":
            for attr in section:
                attr_defs[attr.get("id", "")] = (
                    attr.get("title", ""),
                    attr.get("type", "string"),
                )
        elif tag == "nodes":
            for node in section:
                node_id = node.get("id")
                if node_id is None:
                    raise ValueError(f"{path}: node without id")
                attrs: dict[str, object] = {}
                for child in node:
                    if _local(child.tag) != "attvalues":
                        continue
                    for av in child:
                        name, attr_type = attr_defs.get(
                            av.get("for", ""), (av.get("for", ""), "string")
                        )
                        attrs[name] = _parse_typed(av.get("value", ""), attr_type)
                nodes[node_id] = attrs
        elif tag == "edges":
            for edge in section:
                a, b = edge.get("source"), edge.get("target")
                if a is None or b is None:
                    raise ValueError(f"{path}: edge missing endpoints")
                weight = edge.get("weight")
                if weight is None:
                    raise ValueError(f"{path}: edge ({a}, {b}) has no weight")
                _add_edge(edges, a, b, float(weight), path)
    for a, b in edges:
        if a not in nodes or b not in nodes:
            raise ValueError(f"{path}: edge ({a}, {b}) references an undeclared node")
    return LoadedGraph(nodes=nodes, edges=edges)


def read_edge_csv(path: str) -> LoadedGraph:
    nodes: dict[str, dict[str, object]] = {}
    edges: dict[tuple[str, str], float] = {}
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ["source", "target", "weight"]:
            raise ValueError(f"{path}: expected header source,target,weight, got {header!r}")
        for row in reader:
            if not row:
                continue
            if len(row) != 3:
                raise ValueError(f"{path}: malformed row {row!r}")
            a, b, w = row
            _add_edge(edges, a, b, float(w), path)
            nodes.setdefault(a, {})
            nodes.setdefault(b, {})
    return LoadedGraph(nodes=nodes, edges=edges, edges_only=True)


_READERS = {
    "graphml": read_graphml,
    "gexf": read_gexf,
    "edge-csv": read_edge_csv,
}


def read_graph(path: str, fmt: str) -> LoadedGraph:
    try:
        reader = _READERS[fmt]
    except KeyError:
        raise ValueError(f"unknown format {fmt!r} (expected one of: {', '.join(FORMATS)})") from None
    return reader(path)


def guess_format(path: str) -> str:
    lowered = path.lower()
    if lowered.endswith(".graphml"):
        return "graphml"
    if lowered.endswith(".gexf"):
        return "gexf"
    if lowered.endswith(".csv"):
        return "edge-csv"
    raise ValueError(f"cannot infer graph format from {path!r}; pass an explicit format")


def similarity_from_loaded(loaded: LoadedGraph, scope: str = "products") -> SimilarityGraph:
    """Rebuild a SimilarityGraph from a loaded file. Requires node group
    attributes, so CSV (edges only) is rejected."""
    if loaded.edges_only:
        raise ValueError("edge-csv carries no node groups; load graphml or gexf instead")
    nodes: dict[str, str] = {}
    for node_id, attrs in loaded.nodes.items():
        group = attrs.get("group")
        if not isinstance(group, str) or not group:
            raise ValueError(f"node {node_id!r} has no group attribute")
        nodes[node_id] = group
    return SimilarityGraph(scope=scope, nodes=nodes, edges=dict(loaded.edges))
