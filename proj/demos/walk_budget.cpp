// Compares the analytic walk-length budget with the step at which the
// class-discriminating signal actually drops below each tolerance.

#include <cstdio>
#include <vector>

#include "adadif/adadif.hpp"

int main(int argc, char** argv) {
    using namespace adadif;
    const char* graph_path = argc > 1 ? argv[1] : "data/demo/graph.txt";
    const char* labels_path = argc > 2 ? argv[2] : "data/demo/labels.txt";

    const Dataset ds = load_dataset(graph_path, labels_path);
    const SpectralSummary spectrum = spectral_summary(ds.graph);
    std::printf("spectrum: mu2 %.4f, muN %.4f, decay rate %.4f\n", spectrum.mu2, spectrum.muN,
                spectrum.mu_prime);

    std::vector<NodeId> pos, neg;
    for (NodeId i : ds.labeled_nodes())
        (ds.labels[i].front() == ds.classes.front() ? pos : neg).push_back(i);
    const SeedVector seed_pos = make_seed(pos);
    const SeedVector seed_neg = make_seed(neg);
    std::printf("class %d vs rest: %zu against %zu seeds\n", ds.classes.front(), pos.size(),
                neg.size());

    std::printf("%8s %8s %14s %10s\n", "gamma", "bound", "restart bound", "empirical");
    for (const double gamma : {0.5, 0.1, 0.05, 0.01}) {
        const BoundInputs in = make_bound_inputs(ds.graph, seed_pos, seed_neg, gamma, spectrum);
        const EmpiricalThreshold emp =
            empirical_kgamma(ds.graph, seed_pos, seed_neg, gamma, 400);
        char reached[16];
        std::snprintf(reached, sizeof reached, emp.found ? "%d" : ">%d", emp.found ? emp.K : 400);
        std::printf("%8.2f %8d %14d %10s\n", gamma, kgamma_bound(in),
                    kgamma_bound_ppr(in, 0.98), reached);
    }
    return 0;
}
