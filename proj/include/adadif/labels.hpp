#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "adadif/errors.hpp"
#include "adadif/graph.hpp"

namespace adadif {

using ClassId = std::int32_t;

/// A labeled node sample: parallel arrays of sorted node indices and their
/// label sets, plus the class universe the labels live in. Multiclass sets
/// carry exactly one label per node; multilabel sets may carry several.
struct LabeledSet {
    std::vector<NodeId> nodes;                   ///< sorted, unique
    std::vector<std::vector<ClassId>> labels;    ///< parallel to nodes, each sorted
    std::vector<ClassId> classes;                ///< universe, sorted

    std::size_t size() const { return nodes.size(); }

    bool multilabel() const {
        return std::any_of(labels.begin(), labels.end(),
                           [](const auto& l) { return l.size() > 1; });
    }

    std::size_t class_index(ClassId c) const {
        const auto it = std::lower_bound(classes.begin(), classes.end(), c);
        if (it == classes.end() || *it != c)
            throw data_error("class " + std::to_string(c) + " is not in the universe");
        return static_cast<std::size_t>(it - classes.begin());
    }

    bool has_label(std::size_t node_pos, ClassId c) const {
        const auto& l = labels[node_pos];
        return std::binary_search(l.begin(), l.end(), c);
    }

    /// Nodes labeled with class c, ascending.
    std::vector<NodeId> members(ClassId c) const {
        std::vector<NodeId> out;
        for (std::size_t p = 0; p < nodes.size(); ++p)
            if (has_label(p, c)) out.push_back(nodes[p]);
        return out;
    }

    /// Classes with at least one labeled node, ascending.
    std::vector<ClassId> active_classes() const {
        std::vector<ClassId> out;
        for (ClassId c : classes)
            if (!members(c).empty()) out.push_back(c);
        return out;
    }
};

/// Validates and normalizes a labeled sample. Every label must belong to the
/// universe; nodes are sorted and must be distinct.
inline LabeledSet make_labeled_set(std::vector<NodeId> nodes,
                                   std::vector<std::vector<ClassId>> labels,
                                   std::vector<ClassId> classes) {
    if (nodes.size() != labels.size())
        throw data_error("labeled set: node and label arrays differ in length");
    if (nodes.empty()) throw data_error("labeled set is empty");
    std::sort(classes.begin(), classes.end());
    classes.erase(std::unique(classes.begin(), classes.end()), classes.end());

    std::vector<std::size_t> order(nodes.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return nodes[a] < nodes[b]; });

    LabeledSet ls;
    ls.classes = std::move(classes);
    ls.nodes.reserve(nodes.size());
    ls.labels.reserve(nodes.size());
    for (std::size_t i : order) {
        if (!ls.nodes.empty() && ls.nodes.back() == nodes[i])
            throw data_error("labeled set: duplicate node " + std::to_string(nodes[i]));
        auto& l = labels[i];
        std::sort(l.begin(), l.end());
        l.erase(std::unique(l.begin(), l.end()), l.end());
        if (l.empty())
            throw data_error("labeled set: node " + std::to_string(nodes[i]) + " has no label");
        for (ClassId c : l)
            if (!std::binary_search(ls.classes.begin(), ls.classes.end(), c))
                throw data_error("labeled set: label " + std::to_string(c) +
                                 " is outside the class universe");
        ls.nodes.push_back(nodes[i]);
        ls.labels.push_back(std::move(l));
    }
    return ls;
}

/// Per-class diffusion scores over all nodes, with the coefficients that
/// produced them.
struct ClassDiffusion {
    ClassId class_id = 0;
    Eigen::VectorXd scores; ///< order() entries
    Eigen::VectorXd theta;  ///< empty for methods without explicit coefficients
};

/// Argmax prediction across class diffusions; ties go to the smallest
/// class id. Diffusions must be sorted by class_id.
inline std::vector<ClassId> predict(const std::vector<ClassDiffusion>& diffusions,
                                    const std::vector<NodeId>& nodes) {
    if (diffusions.empty()) throw data_error("no class diffusions to predict from");
    std::vector<ClassId> out;
    out.reserve(nodes.size());
    for (NodeId i : nodes) {
        ClassId best = diffusions.front().class_id;
        double best_score = diffusions.front().scores[i];
        for (std::size_t c = 1; c < diffusions.size(); ++c) {
            const double s = diffusions[c].scores[i];
            if (s > best_score) {
                best_score = s;
                best = diffusions[c].class_id;
            }
        }
        out.push_back(best);
    }
    return out;
}

/// Top-m prediction for multilabel evaluation: node nodes[i] receives the
/// m_per_node[i] classes with the highest scores (ties: higher score first,
/// then smaller class id). Each result is sorted by class id.
inline std::vector<std::vector<ClassId>> predict_top(
    const std::vector<ClassDiffusion>& diffusions, const std::vector<NodeId>& nodes,
    const std::vector<int>& m_per_node) {
    if (diffusions.empty()) throw data_error("no class diffusions to predict from");
    if (nodes.size() != m_per_node.size())
        throw data_error("predict_top: node and count arrays differ in length");
    std::vector<std::vector<ClassId>> out(nodes.size());
    std::vector<std::pair<double, ClassId>> ranked(diffusions.size());
    for (std::size_t p = 0; p < nodes.size(); ++p) {
        const NodeId i = nodes[p];
        for (std::size_t c = 0; c < diffusions.size(); ++c)
            ranked[c] = {diffusions[c].scores[i], diffusions[c].class_id};
        const auto m = static_cast<std::size_t>(
            std::clamp<int>(m_per_node[p], 0, static_cast<int>(ranked.size())));
        std::partial_sort(ranked.begin(), ranked.begin() + m, ranked.end(),
                          [](const auto& a, const auto& b) {
                              if (a.first != b.first) return a.first > b.first;
                              return a.second < b.second;
                          });
        auto& dst = out[p];
        dst.reserve(m);
        for (std::size_t c = 0; c < m; ++c) dst.push_back(ranked[c].second);
        std::sort(dst.begin(), dst.end());
    }
    return out;
}

} // namespace adadif
