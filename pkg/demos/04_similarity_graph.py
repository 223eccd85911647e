#!/usr/bin/env python3
"""Build, filter, and summarize the product similarity graph.

Shows each pipeline stage shrinking the complete graph: staged-together edge
removal, the edge-weight window, and small-group pruning; then aggregates to
group level and writes GraphML/GEXF/CSV exports.

Usage: python3 demos/04_similarity_graph.py [out_dir]
"""

import os
import sys

import stylesim as ss


def main() -> None:
    out_dir = sys.argv[1] if len(sys.argv) > 1 else "demo-output"
    os.makedirs(out_dir, exist_ok=True)

    dataset = ss.generate_dataset(ss.SynthConfig(n_products=100, n_images=300, seed=3))
    split = ss.split_dataset(dataset.images.ids, seed=3)
    config = ss.TrainConfig(learning_rate=0.05, epochs=30, comparisons_per_epoch=256, seed=3)
    model, _ = ss.train(ss.init_model(16, hidden=16, seed=3), dataset.images, dataset.votes, split, config)
    store = ss.embed_all(model, dataset.images, dataset.catalog)

    graph = ss.build_graph(store, dataset.catalog)
    print(f"complete graph:        {graph.node_count} nodes, {graph.edge_count} edges "
          f"({len(graph.duplicate_pairs)} duplicate pairs skipped)")

    graph = ss.remove_overlap_edges(graph, dataset.images)
    print(f"overlap edges removed: {graph.edge_count} edges "
          f"(-{graph.provenance['overlap_edges_removed']} staged-together pairs)")

    graph = ss.filter_edges(graph, w_min=1.0, w_max=10.0)
    print(f"weight window [1,10]:  {graph.edge_count} edges")

    graph = ss.filter_small_groups(graph, min_group_size=5)
    print(f"groups >= 5 products:  {graph.node_count} nodes, {graph.edge_count} edges")

    gg = ss.group_graph(graph)
    print()
    print("group           products  degree_sum  self_weight  most_connected")
    for stat in gg.stats:
        top = ss.most_connected(graph, stat.group)
        marker = " (isolated)" if top.zero_degree else ""
        print(
            f"{stat.group:15s} {stat.product_count:8d}  {stat.degree_sum:10.2f}  "
            f"{gg.self_weights[stat.group]:11.2f}  {top.sku}{marker}"
        )

    print()
    print("cross-group cumulative weights:")
    for (a, b), w in sorted(gg.edges.items(), key=lambda item: -item[1])[:8]:
        print(f"  {a} -- {b}: {w:.2f}")

    gaps = ss.find_gaps(graph)
    print()
    if gaps.zero_weight_pairs:
        print("group pairs with no connections at all:")
        for a, b in gaps.zero_weight_pairs:
            print(f"  {a} -- {b}")
    else:
        print("every group pair has at least one in-window connection")
    isolated = [(s.group, s.isolated_count) for s in gaps.groups if s.isolated_count]
    if isolated:
        print("isolated products per group: " + ", ".join(f"{g}={c}" for g, c in isolated))

    print()
    for fmt, name in (("graphml", "graph.graphml"), ("gexf", "graph.gexf"), ("edge-csv", "graph.csv")):
        path = os.path.join(out_dir, name)
        ss.export_graph(graph, fmt, path)
        print(f"wrote {path} ({os.path.getsize(path)} bytes)")
    groups_path = os.path.join(out_dir, "groups.graphml")
    ss.export_graph(gg, "graphml", groups_path)
    print(f"wrote {groups_path} (group-level aggregation)")


if __name__ == "__main__":
    main()
