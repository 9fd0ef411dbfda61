#!/usr/bin/env python3
"""Candidate-bag counts for the bundled SQL workload queries.

Extracts the join hypergraph from each bundled query and reports how many
cover-generated candidate bags exist at the given width, with and without
the connected-cover filter.
"""

import argparse

from softdecomp import SQL_QUERIES, edge_cover_bags, sql_to_cq


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("-k", type=int, default=2, help="width for most queries")
    args = parser.parse_args()

    print(f"{'query':8} {'|V|':>4} {'|E|':>4} {'k':>2} {'bags':>5} {'connected':>9}")
    for name in sorted(SQL_QUERIES):
        _cq, h = sql_to_cq(SQL_QUERIES[name])
        k = 3 if name == "q_lb" else args.k
        total = len(edge_cover_bags(h, k))
        connected = len(edge_cover_bags(h, k, connected=True))
        print(f"{name:8} {h.n_vertices:>4} {h.n_edges:>4} {k:>2} {total:>5} {connected:>9}")


if __name__ == "__main__":
    main()
