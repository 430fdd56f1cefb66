#include "whcn/max_flow.hpp"

#include <algorithm>
#include <limits>
#include <queue>

namespace whcn {

namespace {
constexpr double kCapEps = 1e-12;  // capacities below this count as saturated
}

MaxFlowGraph::MaxFlowGraph(int n_nodes) : adj_(n_nodes), side_(n_nodes, 0) {}

void MaxFlowGraph::add_edge(int u, int v, double cap_uv, double cap_vu) {
    adj_[u].push_back({v, cap_uv, static_cast<int>(adj_[v].size())});
    adj_[v].push_back({u, cap_vu, static_cast<int>(adj_[u].size()) - 1});
}

double MaxFlowGraph::max_flow(int source, int sink) {
    const int n = static_cast<int>(adj_.size());
    double total = 0.0;
    std::vector<int> prev_node(n), prev_edge(n);

    while (true) {
        std::fill(prev_node.begin(), prev_node.end(), -1);
        prev_node[source] = source;
        std::queue<int> q;
        q.push(source);
        while (!q.empty() && prev_node[sink] < 0) {
            int u = q.front();
            q.pop();
            for (int k = 0; k < static_cast<int>(adj_[u].size()); ++k) {
                const Edge& e = adj_[u][k];
                if (e.cap > kCapEps && prev_node[e.to] < 0) {
                    prev_node[e.to] = u;
                    prev_edge[e.to] = k;
                    q.push(e.to);
                }
            }
        }
        if (prev_node[sink] < 0) break;

        double bottleneck = std::numeric_limits<double>::infinity();
        for (int v = sink; v != source; v = prev_node[v])
            bottleneck = std::min(bottleneck, adj_[prev_node[v]][prev_edge[v]].cap);
        for (int v = sink; v != source; v = prev_node[v]) {
            Edge& e = adj_[prev_node[v]][prev_edge[v]];
            e.cap -= bottleneck;
            adj_[e.to][e.rev].cap += bottleneck;
        }
        total += bottleneck;
    }

    std::fill(side_.begin(), side_.end(), 0);
    side_[source] = 1;
    std::queue<int> q;
    q.push(source);
    while (!q.empty()) {
        int u = q.front();
        q.pop();
        for (const Edge& e : adj_[u]) {
            if (e.cap > kCapEps && !side_[e.to]) {
                side_[e.to] = 1;
                q.push(e.to);
            }
        }
    }
    return total;
}

}  // namespace whcn
