#include "whcn/cut_pursuit.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <map>
#include <queue>

#include "whcn/errors.hpp"
#include "whcn/max_flow.hpp"

namespace whcn {

namespace {

double sq_dist(const double* a, const double* b, std::size_t d) {
    double s = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
        const double diff = a[k] - b[k];
        s += diff * diff;
    }
    return s;
}

// Sum of squared deviations from the mean over the given points.
double fidelity_of(const Matrix& features, const std::vector<int>& pts) {
    const std::size_t d = features.cols();
    std::vector<double> mean(d, 0.0);
    for (int p : pts)
        for (std::size_t k = 0; k < d; ++k) mean[k] += features(p, k);
    for (std::size_t k = 0; k < d; ++k) mean[k] /= static_cast<double>(pts.size());
    double s = 0.0;
    for (int p : pts) s += sq_dist(features.row(p), mean.data(), d);
    return s;
}

double energy_of_assignment(const Matrix& features, const PointGraph& graph,
                            const std::vector<int>& assignment, double rho) {
    const std::size_t d = features.cols();
    int n_regions = 0;
    for (int a : assignment) n_regions = std::max(n_regions, a + 1);

    std::vector<std::vector<double>> means(n_regions, std::vector<double>(d, 0.0));
    std::vector<int> counts(n_regions, 0);
    for (std::size_t i = 0; i < assignment.size(); ++i) {
        counts[assignment[i]] += 1;
        for (std::size_t k = 0; k < d; ++k) means[assignment[i]][k] += features(i, k);
    }
    for (int r = 0; r < n_regions; ++r)
        if (counts[r] > 0)
            for (std::size_t k = 0; k < d; ++k) means[r][k] /= counts[r];

    double fid = 0.0;
    for (std::size_t i = 0; i < assignment.size(); ++i)
        fid += sq_dist(features.row(i), means[assignment[i]].data(), d);

    int cut = 0;
    for (auto [u, v] : graph.edges)
        if (assignment[u] != assignment[v]) ++cut;
    return fid + rho * static_cast<double>(cut);
}

struct SplitOutcome {
    std::vector<std::vector<int>> pieces;  // >= 2 connected sub-regions
    double delta_energy = 0.0;
};

// One flow-based 2-split from a given centroid seed pair: 5 alternations of
// binary assignment (max-flow) and centroid re-estimation, then connected
// component refinement. Returns pieces and the energy delta (may be >= 0).
std::optional<SplitOutcome> split_from_seeds(
    const Matrix& features, const std::vector<int>& pts,
    const std::vector<std::pair<int, int>>& local_edges, double rho, double old_fid,
    int seed_a, int seed_b) {
    const int m = static_cast<int>(pts.size());
    const std::size_t d = features.cols();

    std::vector<double> c0(features.row(pts[seed_a]), features.row(pts[seed_a]) + d);
    std::vector<double> c1(features.row(pts[seed_b]), features.row(pts[seed_b]) + d);
    std::vector<char> labels(m, 0), prev_labels(m, 0);

    for (int round = 0; round < 5; ++round) {
        MaxFlowGraph flow(m + 2);
        const int s = m, t = m + 1;
        for (int k = 0; k < m; ++k) {
            const double d0 = sq_dist(features.row(pts[k]), c0.data(), d);
            const double d1 = sq_dist(features.row(pts[k]), c1.data(), d);
            if (d1 > d0)
                flow.add_edge(s, k, d1 - d0);  // crossing pays the label-1 surcharge
            else if (d0 > d1)
                flow.add_edge(k, t, d0 - d1);
        }
        for (auto [a, b] : local_edges) flow.add_edge(a, b, rho, rho);
        flow.max_flow(s, t);
        for (int k = 0; k < m; ++k) labels[k] = flow.source_side(k) ? 0 : 1;

        int n1 = 0;
        for (char l : labels) n1 += l;
        if (n1 == 0 || n1 == m) break;  // one-sided; nothing to re-estimate

        std::fill(c0.begin(), c0.end(), 0.0);
        std::fill(c1.begin(), c1.end(), 0.0);
        for (int k = 0; k < m; ++k) {
            auto& c = labels[k] ? c1 : c0;
            for (std::size_t x = 0; x < d; ++x) c[x] += features(pts[k], x);
        }
        for (std::size_t x = 0; x < d; ++x) {
            c0[x] /= static_cast<double>(m - n1);
            c1[x] /= static_cast<double>(n1);
        }
        if (round > 0 && labels == prev_labels) break;
        prev_labels = labels;
    }

    int n1 = 0;
    for (char l : labels) n1 += l;
    if (n1 == 0 || n1 == m) return std::nullopt;

    // each side decomposes into connected components, every one a new region
    std::vector<std::vector<int>> local_adj(m);
    for (auto [a, b] : local_edges)
        if (labels[a] == labels[b]) {
            local_adj[a].push_back(b);
            local_adj[b].push_back(a);
        }
    std::vector<int> comp(m, -1);
    std::vector<std::vector<int>> pieces;
    for (int k = 0; k < m; ++k) {
        if (comp[k] >= 0) continue;
        const int id = static_cast<int>(pieces.size());
        pieces.emplace_back();
        comp[k] = id;
        std::queue<int> q;
        q.push(k);
        while (!q.empty()) {
            int u = q.front();
            q.pop();
            pieces[id].push_back(pts[u]);
            for (int v : local_adj[u])
                if (comp[v] < 0) {
                    comp[v] = id;
                    q.push(v);
                }
        }
    }

    int cut_edges = 0;
    for (auto [a, b] : local_edges)
        if (labels[a] != labels[b]) ++cut_edges;

    double new_fid = 0.0;
    for (auto& piece : pieces) {
        std::sort(piece.begin(), piece.end());
        new_fid += fidelity_of(features, piece);
    }
    return SplitOutcome{std::move(pieces), new_fid + rho * cut_edges - old_fid};
}

// Attempts to split one region, trying several centroid initializations (the
// farthest feature pair alone can miss profitable splits): all pairs for
// small regions, plus per-dimension extreme pairs for medium ones. Returns
// the best strictly energy-decreasing split.
std::optional<SplitOutcome> try_split(const Matrix& features,
                                      const std::vector<std::vector<int>>& adj,
                                      const std::vector<int>& pts, double rho,
                                      std::vector<int>& local_of) {
    const int m = static_cast<int>(pts.size());
    if (m < 2) return std::nullopt;
    const std::size_t d = features.cols();

    for (int k = 0; k < m; ++k) local_of[pts[k]] = k;
    std::vector<std::pair<int, int>> local_edges;
    for (int k = 0; k < m; ++k)
        for (int nb : adj[pts[k]]) {
            const int lk = local_of[nb];
            if (lk > k) local_edges.emplace_back(k, lk);
        }
    for (int p : pts) local_of[p] = -1;

    std::vector<std::pair<int, int>> candidates;
    if (m <= 12) {
        for (int i = 0; i < m; ++i)
            for (int j = i + 1; j < m; ++j) candidates.emplace_back(i, j);
    } else {
        double best_d2 = 0.0;
        int seed_a = -1, seed_b = -1;
        for (int i = 0; i < m; ++i)
            for (int j = i + 1; j < m; ++j) {
                const double d2 = sq_dist(features.row(pts[i]), features.row(pts[j]), d);
                if (d2 > best_d2) {
                    best_d2 = d2;
                    seed_a = i;
                    seed_b = j;
                }
            }
        if (seed_a >= 0) candidates.emplace_back(seed_a, seed_b);
        if (m <= 64) {
            for (std::size_t k = 0; k < d; ++k) {
                int lo = 0, hi = 0;
                for (int i = 1; i < m; ++i) {
                    if (features(pts[i], k) < features(pts[lo], k)) lo = i;
                    if (features(pts[i], k) > features(pts[hi], k)) hi = i;
                }
                if (lo != hi)
                    candidates.emplace_back(std::min(lo, hi), std::max(lo, hi));
            }
        }
    }

    const double old_fid = fidelity_of(features, pts);
    std::optional<SplitOutcome> best;
    for (auto [a, b] : candidates) {
        if (sq_dist(features.row(pts[a]), features.row(pts[b]), d) == 0.0) continue;
        auto outcome =
            split_from_seeds(features, pts, local_edges, rho, old_fid, a, b);
        if (outcome && (!best || outcome->delta_energy < best->delta_energy))
            best = std::move(outcome);
    }

    // exact ties are rejected so the greedy loop terminates
    if (!best || !(best->delta_energy < -1e-12 * std::max(1.0, old_fid)))
        return std::nullopt;
    return best;
}

}  // namespace

SuperpointPartition make_partition(const std::vector<int>& raw_assignment,
                                   const Matrix& features) {
    if (raw_assignment.size() != features.rows())
        throw ShapeMismatch("make_partition: assignment vs features");
    SuperpointPartition part;
    part.assignment.resize(raw_assignment.size());
    std::map<int, int> remap;
    for (std::size_t i = 0; i < raw_assignment.size(); ++i) {
        auto [it, fresh] = remap.try_emplace(raw_assignment[i],
                                             static_cast<int>(remap.size()));
        (void)fresh;
        part.assignment[i] = it->second;
    }
    part.n_superpoints = static_cast<int>(remap.size());

    const std::size_t d = features.cols();
    part.region_means = Matrix(part.n_superpoints, d);
    std::vector<int> counts(part.n_superpoints, 0);
    for (std::size_t i = 0; i < part.assignment.size(); ++i) {
        const int r = part.assignment[i];
        counts[r] += 1;
        for (std::size_t k = 0; k < d; ++k) part.region_means(r, k) += features(i, k);
    }
    for (int r = 0; r < part.n_superpoints; ++r)
        for (std::size_t k = 0; k < d; ++k) part.region_means(r, k) /= counts[r];
    return part;
}

double partition_energy(const Matrix& features, const PointGraph& graph,
                        const SuperpointPartition& partition,
                        const PartitionEnergyParams& params) {
    if (partition.assignment.size() != features.rows() || graph.n != features.rows())
        throw ShapeMismatch("partition_energy: inconsistent sizes");
    return energy_of_assignment(features, graph, partition.assignment, params.rho);
}

CutPursuitResult l0_cut_pursuit(const Matrix& features, const PointGraph& graph,
                                const PartitionEnergyParams& params,
                                std::optional<int> max_superpoints) {
    if (graph.n != features.rows())
        throw ShapeMismatch("l0_cut_pursuit: graph vs features");
    const auto adj = graph.adjacency();

    int n_regions = 0;
    std::vector<int> assignment = connected_components(graph, &n_regions);
    std::map<int, std::vector<int>> regions;
    for (std::size_t i = 0; i < assignment.size(); ++i)
        regions[assignment[i]].push_back(static_cast<int>(i));

    double energy = energy_of_assignment(features, graph, assignment, params.rho);
    CutPursuitResult result;
    result.energy_trace.push_back(energy);

    std::deque<int> active;
    for (auto& [id, pts] : regions) active.push_back(id);
    int next_id = n_regions;
    std::vector<int> local_of(graph.n, -1);

    while (!active.empty()) {
        if (max_superpoints && n_regions >= *max_superpoints) break;
        const int r = active.front();
        active.pop_front();

        auto outcome = try_split(features, adj, regions[r], params.rho, local_of);
        if (!outcome) continue;

        // first piece keeps the id, the rest get fresh ids
        regions[r] = outcome->pieces[0];
        active.push_back(r);
        for (std::size_t p = 1; p < outcome->pieces.size(); ++p) {
            const int id = next_id++;
            for (int pt : outcome->pieces[p]) assignment[pt] = id;
            regions[id] = std::move(outcome->pieces[p]);
            active.push_back(id);
            ++n_regions;
        }
        energy += outcome->delta_energy;
        result.energy_trace.push_back(energy);
    }

    result.partition = make_partition(assignment, features);
    return result;
}

std::uint64_t for_each_set_partition(
    int n, const std::function<void(const std::vector<int>&)>& visit) {
    std::vector<int> blocks(n, 0);
    std::uint64_t count = 0;
    // restricted growth strings: blocks[i] <= 1 + max(blocks[0..i-1])
    auto rec = [&](auto&& self, int i, int max_id) -> void {
        if (i == n) {
            ++count;
            visit(blocks);
            return;
        }
        for (int v = 0; v <= max_id + 1; ++v) {
            blocks[i] = v;
            self(self, i + 1, std::max(max_id, v));
        }
    };
    if (n > 0) rec(rec, 1, 0);  // blocks[0] pinned to 0
    return count;
}

BruteForceResult brute_force_partition(const Matrix& features, const PointGraph& graph,
                                       const PartitionEnergyParams& params) {
    const int n = static_cast<int>(graph.n);
    if (n > 9)
        throw TooLarge("brute_force_partition: n=" + std::to_string(n) + " exceeds 9");
    if (graph.n != features.rows())
        throw ShapeMismatch("brute_force_partition: graph vs features");
    const auto adj = graph.adjacency();

    double best_energy = std::numeric_limits<double>::infinity();
    std::vector<int> best_assignment;
    std::vector<int> refined(n);

    const std::uint64_t raw = for_each_set_partition(n, [&](const std::vector<int>& blocks) {
        // split every block into graph-connected parts
        std::fill(refined.begin(), refined.end(), -1);
        int next = 0;
        for (int s = 0; s < n; ++s) {
            if (refined[s] >= 0) continue;
            const int id = next++;
            refined[s] = id;
            std::queue<int> q;
            q.push(s);
            while (!q.empty()) {
                int u = q.front();
                q.pop();
                for (int v : adj[u])
                    if (refined[v] < 0 && blocks[v] == blocks[u]) {
                        refined[v] = id;
                        q.push(v);
                    }
            }
        }
        const double e = energy_of_assignment(features, graph, refined, params.rho);
        if (e < best_energy) {
            best_energy = e;
            best_assignment = refined;
        }
    });

    BruteForceResult out;
    out.partition = make_partition(best_assignment, features);
    out.energy = best_energy;
    out.raw_partitions = raw;
    return out;
}

}  // namespace whcn
