#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

#include "adadif/errors.hpp"
#include "adadif/labels.hpp"

namespace adadif {

struct F1Scores {
    double micro = 0.0;
    double macro = 0.0;
};

/// Micro- and macro-averaged F1 of predicted label sets against true label
/// sets over a class universe. Micro pools true/false positives and
/// negatives across classes (for single-label sets it equals accuracy);
/// macro averages per-class F1 over the whole universe, counting classes
/// absent from both sides as zero.
inline F1Scores micro_macro_f1(const std::vector<std::vector<ClassId>>& predicted,
                               const std::vector<std::vector<ClassId>>& truth,
                               const std::vector<ClassId>& universe) {
    if (predicted.size() != truth.size())
        throw data_error("prediction and truth lengths disagree");
    if (predicted.empty()) throw data_error("nothing to score");
    if (universe.empty()) throw data_error("class universe is empty");

    const auto index_of = [&](ClassId c) {
        const auto it = std::lower_bound(universe.begin(), universe.end(), c);
        if (it == universe.end() || *it != c)
            throw data_error("label " + std::to_string(c) + " is outside the universe");
        return static_cast<std::size_t>(it - universe.begin());
    };

    std::vector<std::int64_t> tp(universe.size(), 0), fp(universe.size(), 0),
        fn(universe.size(), 0);
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        const auto& p = predicted[i];
        const auto& t = truth[i];
        for (ClassId c : p) {
            if (std::binary_search(t.begin(), t.end(), c)) ++tp[index_of(c)];
            else ++fp[index_of(c)];
        }
        for (ClassId c : t)
            if (!std::binary_search(p.begin(), p.end(), c)) ++fn[index_of(c)];
    }

    std::int64_t tp_all = 0, fp_all = 0, fn_all = 0;
    double macro_sum = 0.0;
    for (std::size_t c = 0; c < universe.size(); ++c) {
        tp_all += tp[c];
        fp_all += fp[c];
        fn_all += fn[c];
        const std::int64_t denom = 2 * tp[c] + fp[c] + fn[c];
        macro_sum += denom > 0 ? 2.0 * static_cast<double>(tp[c]) / static_cast<double>(denom)
                               : 0.0;
    }
    F1Scores f;
    const std::int64_t micro_denom = 2 * tp_all + fp_all + fn_all;
    f.micro = micro_denom > 0
                  ? 2.0 * static_cast<double>(tp_all) / static_cast<double>(micro_denom)
                  : 0.0;
    f.macro = macro_sum / static_cast<double>(universe.size());
    return f;
}

/// Single-label convenience wrapper.
inline F1Scores micro_macro_f1(const std::vector<ClassId>& predicted,
                               const std::vector<ClassId>& truth,
                               const std::vector<ClassId>& universe) {
    std::vector<std::vector<ClassId>> p(predicted.size()), t(truth.size());
    for (std::size_t i = 0; i < predicted.size(); ++i) p[i] = {predicted[i]};
    for (std::size_t i = 0; i < truth.size(); ++i) t[i] = {truth[i]};
    return micro_macro_f1(p, t, universe);
}

} // namespace adadif
