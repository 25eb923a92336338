#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <istream>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "adadif/errors.hpp"

namespace adadif {

using NodeId = std::int32_t;

/// One line of an edge list, in original (unmapped) ids.
struct EdgeRecord {
    std::int64_t u = 0;
    std::int64_t v = 0;
    double w = 1.0;
};

/// Undirected weighted graph in CSR form. Both directions of every edge are
/// stored and each row's targets are sorted; parallel edges are merged by
/// summing weights. Node ids are remapped to a contiguous 0-based range in
/// first-appearance order; `node_ids` keeps the originals.
struct Graph {
    std::vector<std::int64_t> offsets;  ///< size order()+1
    std::vector<NodeId> targets;
    std::vector<double> weights;
    Eigen::VectorXd degrees;            ///< weighted degrees, all > 0
    std::vector<std::int64_t> node_ids; ///< internal index -> original id
    std::unordered_map<std::int64_t, NodeId> id_index; ///< original id -> internal
    std::int64_t undirected_edges = 0;  ///< merged edges counted once (self-loops included)
    double degree_sum = 0.0;

    NodeId order() const { return static_cast<NodeId>(node_ids.size()); }

    NodeId index_of(std::int64_t original) const {
        auto it = id_index.find(original);
        if (it == id_index.end())
            throw data_error("unknown node id " + std::to_string(original));
        return it->second;
    }
};

/// Builds a Graph from edge records, applying the merge and remap rules.
inline Graph build_graph(const std::vector<EdgeRecord>& edges) {
    if (edges.empty()) throw structure_error("graph has no edges");

    Graph g;
    std::vector<std::pair<NodeId, NodeId>> mapped;
    mapped.reserve(edges.size());
    for (const EdgeRecord& e : edges) {
        if (!(e.w > 0.0))
            throw format_error("edge weight must be positive, got " + std::to_string(e.w));
        for (std::int64_t id : {e.u, e.v}) {
            if (g.id_index.emplace(id, g.order()).second) g.node_ids.push_back(id);
        }
        mapped.emplace_back(g.id_index.at(e.u), g.id_index.at(e.v));
    }

    const NodeId n = g.order();
    std::vector<std::int64_t> counts(static_cast<std::size_t>(n) + 1, 0);
    for (const auto& [a, b] : mapped) {
        ++counts[a + 1];
        if (a != b) ++counts[b + 1];
    }
    for (NodeId i = 0; i < n; ++i) counts[i + 1] += counts[i];

    std::vector<NodeId> tgt(counts[n]);
    std::vector<double> wgt(counts[n]);
    std::vector<std::int64_t> cursor(counts.begin(), counts.end() - 1);
    for (std::size_t k = 0; k < mapped.size(); ++k) {
        const auto [a, b] = mapped[k];
        const double w = edges[k].w;
        tgt[cursor[a]] = b;
        wgt[cursor[a]++] = w;
        if (a != b) {
            tgt[cursor[b]] = a;
            wgt[cursor[b]++] = w;
        }
    }

    // Sort each row and merge duplicate targets by summing weights.
    g.offsets.assign(static_cast<std::size_t>(n) + 1, 0);
    g.targets.reserve(tgt.size());
    g.weights.reserve(tgt.size());
    std::vector<std::size_t> perm;
    for (NodeId i = 0; i < n; ++i) {
        const std::int64_t lo = counts[i], hi = counts[i + 1];
        perm.resize(hi - lo);
        for (std::int64_t k = lo; k < hi; ++k) perm[k - lo] = k;
        std::sort(perm.begin(), perm.end(),
                  [&](std::size_t x, std::size_t y) { return tgt[x] < tgt[y]; });
        const std::size_t row_start = g.targets.size();
        for (std::size_t k : perm) {
            if (g.targets.size() > row_start && g.targets.back() == tgt[k]) {
                g.weights.back() += wgt[k];
            } else {
                g.targets.push_back(tgt[k]);
                g.weights.push_back(wgt[k]);
            }
        }
        g.offsets[i + 1] = static_cast<std::int64_t>(g.targets.size());
    }

    g.degrees.resize(n);
    std::int64_t loops = 0;
    for (NodeId i = 0; i < n; ++i) {
        double d = 0.0;
        for (std::int64_t k = g.offsets[i]; k < g.offsets[i + 1]; ++k) {
            d += g.weights[k];
            if (g.targets[k] == i) ++loops;
        }
        if (!(d > 0.0))
            throw structure_error("node " + std::to_string(g.node_ids[i]) + " has zero degree");
        g.degrees[i] = d;
    }
    const std::int64_t nnz = static_cast<std::int64_t>(g.targets.size());
    g.undirected_edges = (nnz - loops) / 2 + loops;
    g.degree_sum = g.degrees.sum();
    return g;
}

/// Parses an edge list: one "u v" or "u v w" per line, '#' starts a comment,
/// blank lines are skipped.
inline Graph load_graph(std::istream& in) {
    std::vector<EdgeRecord> edges;
    std::string line;
    std::int64_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream fields(line);
        EdgeRecord e;
        if (!(fields >> e.u)) continue; // blank or comment-only line
        if (!(fields >> e.v))
            throw format_error("edge list line " + std::to_string(lineno) +
                               ": expected \"u v\" or \"u v w\"");
        if (fields >> e.w) {
            if (!(e.w > 0.0))
                throw format_error("edge list line " + std::to_string(lineno) +
                                   ": weight must be positive");
        }
        std::string rest;
        if (fields >> rest)
            throw format_error("edge list line " + std::to_string(lineno) +
                               ": trailing field \"" + rest + "\"");
        edges.push_back(e);
    }
    return build_graph(edges);
}

inline Graph load_graph(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw data_error("cannot open graph file: " + path);
    return load_graph(in);
}

/// y = W D^{-1} x, the column-stochastic transition applied to x.
/// scratch must have room for order() doubles.
inline void apply_transition(const Graph& g, const double* x, double* y, double* scratch) {
    const NodeId n = g.order();
    for (NodeId j = 0; j < n; ++j) scratch[j] = x[j] / g.degrees[j];
    for (NodeId i = 0; i < n; ++i) {
        double acc = 0.0;
        for (std::int64_t k = g.offsets[i]; k < g.offsets[i + 1]; ++k)
            acc += g.weights[k] * scratch[g.targets[k]];
        y[i] = acc;
    }
}

inline Eigen::VectorXd apply_transition(const Graph& g, const Eigen::VectorXd& x) {
    Eigen::VectorXd y(g.order()), scratch(g.order());
    apply_transition(g, x.data(), y.data(), scratch.data());
    return y;
}

/// Stationary distribution of the walk: pi_i = d_i / sum(d).
inline Eigen::VectorXd stationary_distribution(const Graph& g) {
    return g.degrees / g.degree_sum;
}

/// (D^{-1}x)^T L (D^{-1}y) evaluated as an edge sum in O(|E|):
///   1/2 sum_ij W_ij (x_i/d_i - x_j/d_j)(y_i/d_i - y_j/d_j).
inline double laplacian_quadratic(const Graph& g, const Eigen::VectorXd& x,
                                  const Eigen::VectorXd& y) {
    const NodeId n = g.order();
    Eigen::VectorXd u = x.cwiseQuotient(g.degrees);
    Eigen::VectorXd v = y.cwiseQuotient(g.degrees);
    double acc = 0.0;
    for (NodeId i = 0; i < n; ++i)
        for (std::int64_t k = g.offsets[i]; k < g.offsets[i + 1]; ++k) {
            const NodeId j = g.targets[k];
            acc += g.weights[k] * (u[i] - u[j]) * (v[i] - v[j]);
        }
    return 0.5 * acc;
}

inline bool is_connected(const Graph& g) {
    const NodeId n = g.order();
    std::vector<char> seen(n, 0);
    std::vector<NodeId> stack{0};
    seen[0] = 1;
    NodeId reached = 1;
    while (!stack.empty()) {
        const NodeId i = stack.back();
        stack.pop_back();
        for (std::int64_t k = g.offsets[i]; k < g.offsets[i + 1]; ++k) {
            const NodeId j = g.targets[k];
            if (!seen[j]) {
                seen[j] = 1;
                ++reached;
                stack.push_back(j);
            }
        }
    }
    return reached == n;
}

/// Two-colorability check. A self-loop is an odd cycle, so it breaks it.
inline bool is_bipartite(const Graph& g) {
    const NodeId n = g.order();
    std::vector<std::int8_t> color(n, -1);
    std::vector<NodeId> stack;
    for (NodeId s = 0; s < n; ++s) {
        if (color[s] != -1) continue;
        color[s] = 0;
        stack.push_back(s);
        while (!stack.empty()) {
            const NodeId i = stack.back();
            stack.pop_back();
            for (std::int64_t k = g.offsets[i]; k < g.offsets[i + 1]; ++k) {
                const NodeId j = g.targets[k];
                if (color[j] == -1) {
                    color[j] = static_cast<std::int8_t>(1 - color[i]);
                    stack.push_back(j);
                } else if (color[j] == color[i]) {
                    return false;
                }
            }
        }
    }
    return true;
}

} // namespace adadif
