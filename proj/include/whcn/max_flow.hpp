#pragma once

#include <vector>

namespace whcn {

// Edmonds-Karp max flow (BFS augmenting paths) with real capacities.
// Small graphs only; the cut-pursuit split subproblem is its one client.
class MaxFlowGraph {
public:
    explicit MaxFlowGraph(int n_nodes);

    // Adds a directed edge u->v plus its residual twin v->u.
    void add_edge(int u, int v, double cap_uv, double cap_vu = 0.0);

    double max_flow(int source, int sink);

    // Valid after max_flow: true if v is reachable from the source in the
    // residual graph (the source side of a minimum cut).
    bool source_side(int v) const { return side_[v] != 0; }

private:
    struct Edge {
        int to;
        double cap;
        int rev;  // index of the reverse edge in adj_[to]
    };
    std::vector<std::vector<Edge>> adj_;
    std::vector<char> side_;
};

}  // namespace whcn
