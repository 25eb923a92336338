#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "adadif/dataset.hpp"
#include "adadif/errors.hpp"
#include "adadif/labels.hpp"
#include "adadif/random.hpp"

namespace adadif {

/// Draws the same number of labeled nodes from every class, uniformly
/// without replacement. Multiclass datasets only.
inline LabeledSet class_balanced_sample(const Dataset& ds, int per_class,
                                        std::uint64_t seed) {
    if (ds.multilabel)
        throw data_error("class-balanced sampling needs a multiclass dataset");
    if (per_class < 1) throw data_error("per-class count must be at least 1");

    std::mt19937_64 gen(seed);
    std::vector<NodeId> nodes;
    std::vector<std::vector<ClassId>> labels;
    for (ClassId c : ds.classes) {
        std::vector<NodeId> pool;
        for (NodeId i = 0; i < ds.graph.order(); ++i)
            if (!ds.labels[i].empty() && ds.labels[i].front() == c) pool.push_back(i);
        if (static_cast<std::size_t>(per_class) > pool.size())
            throw data_error("class " + std::to_string(c) + " has only " +
                             std::to_string(pool.size()) + " labeled nodes, cannot sample " +
                             std::to_string(per_class));
        for (std::int64_t idx : sample_without_replacement(
                 gen, static_cast<std::int64_t>(pool.size()), per_class)) {
            nodes.push_back(pool[static_cast<std::size_t>(idx)]);
            labels.push_back({c});
        }
    }
    return make_labeled_set(std::move(nodes), std::move(labels), ds.classes);
}

/// Draws floor(fraction * labeled nodes) nodes uniformly without
/// replacement. If a class ends up with no labeled representative the draw
/// is retried with the next seed, up to 100 times.
inline LabeledSet uniform_sample(const Dataset& ds, double fraction, std::uint64_t seed) {
    if (!(fraction > 0.0 && fraction <= 1.0))
        throw data_error("sampling fraction must lie in (0, 1]");
    const std::vector<NodeId> pool = ds.labeled_nodes();
    const auto count = static_cast<std::int64_t>(fraction * static_cast<double>(pool.size()));
    if (count < 1)
        throw data_error("sampling fraction selects no nodes");

    for (int attempt = 0; attempt < 100; ++attempt) {
        std::mt19937_64 gen(seed + static_cast<std::uint64_t>(attempt));
        std::vector<NodeId> nodes;
        std::vector<std::vector<ClassId>> labels;
        std::vector<char> covered(ds.classes.size(), 0);
        for (std::int64_t idx : sample_without_replacement(
                 gen, static_cast<std::int64_t>(pool.size()), count)) {
            const NodeId i = pool[static_cast<std::size_t>(idx)];
            nodes.push_back(i);
            labels.push_back(ds.labels[i]);
            for (ClassId c : ds.labels[i]) {
                const auto pos = std::lower_bound(ds.classes.begin(), ds.classes.end(), c) -
                                 ds.classes.begin();
                covered[static_cast<std::size_t>(pos)] = 1;
            }
        }
        if (std::all_of(covered.begin(), covered.end(), [](char x) { return x != 0; }))
            return make_labeled_set(std::move(nodes), std::move(labels), ds.classes);
    }
    throw data_error("uniform sampling left a class without labeled nodes in 100 attempts");
}

/// A labeled sample with some labels flipped, and the ground truth of which.
struct CorruptedSample {
    LabeledSet sample;
    std::vector<NodeId> flipped; ///< ascending
};

/// Flips each label with probability p_cor to a different class drawn
/// uniformly from the universe. Multiclass samples only.
inline CorruptedSample corrupt_labels(const Dataset& ds, const LabeledSet& ls, double p_cor,
                                      std::uint64_t seed) {
    if (ds.multilabel || ls.multilabel())
        throw data_error("label corruption needs a multiclass sample");
    if (!(p_cor >= 0.0 && p_cor <= 1.0)) throw data_error("p_cor must lie in [0, 1]");
    const auto C = ds.classes.size();
    if (C < 2) throw data_error("label corruption needs at least two classes");

    std::mt19937_64 gen(seed);
    CorruptedSample out;
    out.sample = ls;
    for (std::size_t p = 0; p < ls.size(); ++p) {
        if (uniform_unit(gen) >= p_cor) continue;
        const ClassId cur = ls.labels[p].front();
        const auto cur_pos = static_cast<std::size_t>(
            std::lower_bound(ds.classes.begin(), ds.classes.end(), cur) - ds.classes.begin());
        auto draw = static_cast<std::size_t>(uniform_below(gen, C - 1));
        if (draw >= cur_pos) ++draw;
        out.sample.labels[p] = {ds.classes[draw]};
        out.flipped.push_back(ls.nodes[p]);
    }
    return out;
}

} // namespace adadif
