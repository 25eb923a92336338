#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "adadif/errors.hpp"
#include "adadif/graph.hpp"
#include "adadif/labels.hpp"

namespace adadif {

/// A graph with ground-truth labels. `labels[i]` holds the sorted classes of
/// internal node i; an empty entry means no ground truth for that node.
struct Dataset {
    Graph graph;
    std::vector<std::vector<ClassId>> labels;
    std::vector<ClassId> classes; ///< universe, sorted
    bool multilabel = false;
    std::string name;

    std::vector<NodeId> labeled_nodes() const {
        std::vector<NodeId> out;
        for (NodeId i = 0; i < graph.order(); ++i)
            if (!labels[i].empty()) out.push_back(i);
        return out;
    }
};

struct DatasetStats {
    std::int64_t nodes = 0;
    std::int64_t edges = 0; ///< adjacency entries, i.e. twice the undirected count
    std::int64_t classes = 0;
    bool multilabel = false;
};

/// Published statistics of the benchmark corpora this toolkit targets. Edge
/// counts follow the doubled (directed-entry) convention.
inline const std::map<std::string, DatasetStats>& known_datasets() {
    static const std::map<std::string, DatasetStats> table = {
        {"citeseer", {3233, 9464, 6, false}},
        {"cora", {2708, 10858, 7, false}},
        {"pubmed", {19717, 88676, 3, false}},
        {"ppi", {3890, 76584, 50, true}},
        {"wikipedia", {4733, 184182, 40, true}},
        {"blogcatalog", {10312, 333983, 39, true}},
    };
    return table;
}

inline DatasetStats dataset_stats(const Dataset& ds) {
    DatasetStats s;
    s.nodes = ds.graph.order();
    s.edges = 2 * ds.graph.undirected_edges;
    s.classes = static_cast<std::int64_t>(ds.classes.size());
    s.multilabel = ds.multilabel;
    return s;
}

/// Parses a label file: one "node_id label_id" per line, '#' comments.
/// Repeating a node id assigns it several labels. Node ids refer to the
/// original (file) ids of the graph.
inline void load_labels(std::istream& in, Dataset& ds) {
    ds.labels.assign(ds.graph.order(), {});
    std::string line;
    std::int64_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream fields(line);
        std::int64_t node;
        ClassId label;
        if (!(fields >> node)) continue;
        if (!(fields >> label))
            throw format_error("label file line " + std::to_string(lineno) +
                               ": expected \"node_id label_id\"");
        std::string rest;
        if (fields >> rest)
            throw format_error("label file line " + std::to_string(lineno) +
                               ": trailing field \"" + rest + "\"");
        const auto it = ds.graph.id_index.find(node);
        if (it == ds.graph.id_index.end())
            throw data_error("label file line " + std::to_string(lineno) + ": node " +
                             std::to_string(node) + " is not in the graph");
        ds.labels[it->second].push_back(label);
    }

    std::vector<ClassId> universe;
    bool multi = false;
    for (auto& l : ds.labels) {
        std::sort(l.begin(), l.end());
        l.erase(std::unique(l.begin(), l.end()), l.end());
        multi = multi || l.size() > 1;
        universe.insert(universe.end(), l.begin(), l.end());
    }
    std::sort(universe.begin(), universe.end());
    universe.erase(std::unique(universe.begin(), universe.end()), universe.end());
    if (universe.empty()) throw data_error("label file assigns no labels");
    ds.classes = std::move(universe);
    ds.multilabel = multi;
}

/// Validates a dataset declared under a known name against the published
/// statistics; throws a data error with a field-by-field diff on mismatch.
inline void validate_known(const Dataset& ds) {
    const auto it = known_datasets().find(ds.name);
    if (it == known_datasets().end())
        throw data_error("unknown dataset name: " + ds.name);
    const DatasetStats want = it->second;
    const DatasetStats got = dataset_stats(ds);
    std::string diff;
    const auto mismatch = [&](const char* field, std::int64_t g, std::int64_t w) {
        if (g != w)
            diff += std::string(diff.empty() ? "" : ", ") + field + " " + std::to_string(g) +
                    " != " + std::to_string(w);
    };
    mismatch("nodes", got.nodes, want.nodes);
    mismatch("edges", got.edges, want.edges);
    mismatch("classes", got.classes, want.classes);
    if (got.multilabel != want.multilabel)
        diff += std::string(diff.empty() ? "" : ", ") + "multilabel " +
                (got.multilabel ? "true" : "false") + " != " + (want.multilabel ? "true" : "false");
    if (!diff.empty())
        throw data_error("dataset \"" + ds.name + "\" does not match its published statistics: " +
                         diff);
}

inline Dataset load_dataset(const std::string& graph_path, const std::string& labels_path,
                            const std::string& name = "", bool validate = true) {
    Dataset ds;
    ds.graph = load_graph(graph_path);
    std::ifstream in(labels_path);
    if (!in) throw data_error("cannot open label file: " + labels_path);
    load_labels(in, ds);
    ds.name = name;
    if (!name.empty() && validate) validate_known(ds);
    return ds;
}

} // namespace adadif
