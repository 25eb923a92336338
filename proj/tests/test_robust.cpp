#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <random>

#include "adadif/robust.hpp"
#include "adadif/sampling.hpp"
#include "adadif/random.hpp"
#include "oracles.hpp"
#include "testutil.hpp"

using namespace adadif;
using Catch::Approx;

namespace {

/// Planted-block dataset with every node labeled, plus a corrupted copy of a
/// labeled subsample.
struct RobustScene {
    Dataset ds;
    LabeledSet clean;
    CorruptedSample corrupted;
};

RobustScene make_scene(std::uint64_t seed, double p_cor) {
    std::mt19937_64 gen(seed);
    RobustScene sc{testutil::planted_blocks(gen, 2, 12, 0.35, 0.04), {}, {}};
    sc.clean = testutil::full_labeled_set(sc.ds);
    sc.corrupted = corrupt_labels(sc.ds, sc.clean, p_cor, derive_seed(seed, 9));
    return sc;
}

} // namespace

TEST_CASE("leave-one-out matrix rows", "[robust][oracle]") {
    std::mt19937_64 gen(61);
    const Dataset ds = testutil::planted_blocks(gen, 2, 8, 0.4, 0.05);
    const LabeledSet ls = testutil::full_labeled_set(ds);
    const int K = 4;
    const Eigen::MatrixXd R = build_loo_matrix(ds.graph, ls, 0, K);
    REQUIRE(R.rows() == static_cast<Eigen::Index>(ls.size()));
    REQUIRE(R.cols() == K);

    const std::vector<NodeId> members = ls.members(0);
    const Eigen::MatrixXd full = oracles::dense_landing(
        ds.graph, make_seed(members).dense(ds.graph.order()), K);
    for (std::size_t p = 0; p < ls.size(); ++p) {
        const NodeId i = ls.nodes[p];
        const bool is_member = std::binary_search(members.begin(), members.end(), i);
        Eigen::RowVectorXd want;
        if (is_member) {
            std::vector<NodeId> held = members;
            held.erase(std::find(held.begin(), held.end(), i));
            want = oracles::dense_landing(ds.graph, make_seed(held).dense(ds.graph.order()), K)
                       .row(i);
        } else {
            want = full.row(i);
        }
        REQUIRE((R.row(static_cast<Eigen::Index>(p)) - want).cwiseAbs().maxCoeff() < 1e-12);
    }

    REQUIRE_THROWS_AS(build_loo_matrix(ds.graph, testutil::labeled_subset(ds, {0, 8}), 0, K),
                      data_error);
}

TEST_CASE("robust loss evaluates the degree-weighted residual", "[robust]") {
    std::mt19937_64 gen(62);
    const Dataset ds = testutil::planted_blocks(gen, 2, 6, 0.5, 0.1);
    const LabeledSet ls = testutil::full_labeled_set(ds);
    const int K = 3;
    const Eigen::MatrixXd R = build_loo_matrix(ds.graph, ls, 1, K);
    Eigen::VectorXd o(ls.size()), theta(K);
    for (Eigen::Index p = 0; p < o.size(); ++p) o[p] = 0.1 * uniform_unit(gen);
    theta << 0.5, 0.3, 0.2;

    double want = 0.0;
    const double inv_l = 1.0 / static_cast<double>(ls.size());
    const Eigen::VectorXd fit = R * theta;
    for (std::size_t p = 0; p < ls.size(); ++p) {
        const double ybar = ls.has_label(p, 1) ? inv_l : 0.0;
        const double r = o[static_cast<Eigen::Index>(p)] + ybar - fit[static_cast<Eigen::Index>(p)];
        want += r * r / ds.graph.degrees[ls.nodes[p]];
    }
    REQUIRE(robust_loss(ds.graph, ls, R, 1, o, theta) == Approx(want).margin(1e-14));

    REQUIRE_THROWS_AS(robust_loss(ds.graph, ls, R, 1, o.head(3), theta), data_error);
}

TEST_CASE("alternation keeps coefficients on the simplex", "[robust]") {
    const RobustScene sc = make_scene(63, 0.15);
    RobustParams rp;
    rp.K = 8;
    const RobustWork w = prepare_robust(sc.ds.graph, sc.corrupted.sample, rp.K);
    const AlternationResult alt = run_alternation(w, rp);

    REQUIRE(alt.sweeps >= 2);
    REQUIRE(alt.theta.size() == 2);
    for (const auto& th : alt.theta) {
        REQUIRE(th.sum() == Approx(1.0).margin(1e-9));
        REQUIRE(th.minCoeff() >= -1e-12);
    }
    REQUIRE(alt.outliers.rows() == static_cast<Eigen::Index>(sc.corrupted.sample.size()));
    REQUIRE(static_cast<int>(alt.objective_trace.size()) == alt.sweeps);
}

TEST_CASE("outlier step rules", "[robust]") {
    const RobustScene sc = make_scene(64, 0.2);
    RobustParams rp;
    rp.K = 6;
    rp.max_sweeps = 3;
    const RobustWork w = prepare_robust(sc.ds.graph, sc.corrupted.sample, rp.K);

    SECTION("residual rule thresholds the residual matrix directly") {
        rp.step = OutlierStep::residual;
        const AlternationResult alt = run_alternation(w, rp);
        const Eigen::MatrixXd want = row_group_soft_threshold(alt.residuals, rp.lambda_o);
        REQUIRE((alt.outliers - want).cwiseAbs().maxCoeff() < 1e-14);
    }
    SECTION("corrective rule cancels the shrunk residual with opposite sign") {
        rp.step = OutlierStep::corrective;
        const AlternationResult alt = run_alternation(w, rp);
        for (Eigen::Index p = 0; p < alt.outliers.rows(); ++p) {
            const double norm = alt.residuals.row(p).norm();
            const double thr = 0.5 * rp.lambda_o / std::sqrt(w.inv_deg[p]);
            if (norm > thr) {
                const Eigen::RowVectorXd want = -(1.0 - thr / norm) * alt.residuals.row(p);
                REQUIRE((alt.outliers.row(p) - want).cwiseAbs().maxCoeff() < 1e-14);
            } else {
                REQUIRE(alt.outliers.row(p).norm() == 0.0);
            }
        }
    }
}

TEST_CASE("corrective alternation cannot increase the objective", "[robust]") {
    for (std::uint64_t seed : {65ULL, 66ULL, 67ULL, 68ULL}) {
        const RobustScene sc = make_scene(seed, 0.25);
        RobustParams rp;
        rp.K = 8;
        rp.step = OutlierStep::corrective;
        const RobustWork w = prepare_robust(sc.ds.graph, sc.corrupted.sample, rp.K);
        const AlternationResult alt = run_alternation(w, rp);
        REQUIRE(alt.monotone);
        for (std::size_t i = 1; i < alt.objective_trace.size(); ++i)
            REQUIRE(alt.objective_trace[i] <= alt.objective_trace[i - 1] + 1e-9);
    }
}

TEST_CASE("monotone flag mirrors the recorded trace", "[robust]") {
    const RobustScene sc = make_scene(69, 0.2);
    RobustParams rp;
    rp.K = 8;
    rp.step = OutlierStep::residual;
    const RobustWork w = prepare_robust(sc.ds.graph, sc.corrupted.sample, rp.K);
    const AlternationResult alt = run_alternation(w, rp);
    bool inc = false;
    for (std::size_t i = 1; i < alt.objective_trace.size(); ++i)
        inc = inc || alt.objective_trace[i] > alt.objective_trace[i - 1] + 1e-9;
    REQUIRE(alt.monotone == !inc);
}

TEST_CASE("robust fit flags planted corruption ahead of clean seeds", "[robust]") {
    const RobustScene sc = make_scene(70, 0.2);
    REQUIRE_FALSE(sc.corrupted.flipped.empty());
    RobustParams rp;
    rp.K = 10;
    const RobustFit fit = fit_radadif(sc.ds.graph, sc.corrupted.sample, rp);

    const DetectionCounts dc =
        detection_counts(fit.flagged, sc.corrupted.flipped, sc.corrupted.sample.nodes);
    REQUIRE(dc.p_detect > dc.p_false);

    // Flagged nodes and cleaned members partition each class's seeds.
    for (std::size_t c = 0; c < fit.class_ids.size(); ++c) {
        const auto members = sc.corrupted.sample.members(fit.class_ids[c]);
        for (NodeId i : members) {
            const bool flagged =
                std::binary_search(fit.flagged.begin(), fit.flagged.end(), i);
            const bool kept = std::binary_search(fit.cleaned_members[c].begin(),
                                                 fit.cleaned_members[c].end(), i);
            if (fit.retained_seed_classes.empty()) REQUIRE(flagged != kept);
        }
        REQUIRE_FALSE(fit.cleaned_members[c].empty());
    }

    // Rediffusion uses the learned coefficients from the cleaned seeds.
    for (std::size_t c = 0; c < fit.class_ids.size(); ++c) {
        const Eigen::MatrixXd P = oracles::dense_landing(
            sc.ds.graph, make_seed(fit.cleaned_members[c]).dense(sc.ds.graph.order()), rp.K);
        REQUIRE((fit.diffusions[c].scores - P * fit.theta[c]).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("a class never loses all of its seeds", "[robust]") {
    const RobustScene sc = make_scene(71, 0.2);
    RobustParams rp;
    rp.K = 6;
    rp.lambda_o = 1e-9; // threshold so low that every row gets flagged
    const RobustFit fit = fit_radadif(sc.ds.graph, sc.corrupted.sample, rp);
    REQUIRE(fit.flagged.size() == sc.corrupted.sample.size());
    REQUIRE(fit.retained_seed_classes == fit.class_ids);
    for (const auto& kept : fit.cleaned_members) REQUIRE(kept.size() == 1);
}

TEST_CASE("huge threshold flags nothing", "[robust]") {
    const RobustScene sc = make_scene(72, 0.15);
    RobustParams rp;
    rp.K = 6;
    rp.lambda_o = 1e6;
    const RobustFit fit = fit_radadif(sc.ds.graph, sc.corrupted.sample, rp);
    REQUIRE(fit.flagged.empty());
    for (std::size_t c = 0; c < fit.class_ids.size(); ++c)
        REQUIRE(fit.cleaned_members[c] == sc.corrupted.sample.members(fit.class_ids[c]));
}

TEST_CASE("detection counts", "[robust]") {
    const DetectionCounts dc = detection_counts({1, 2, 5}, {2, 3}, {1, 2, 3, 4, 5});
    REQUIRE(dc.hits == 1);
    REQUIRE(dc.false_alarms == 2);
    REQUIRE(dc.true_outliers == 2);
    REQUIRE(dc.clean_nodes == 3);
    REQUIRE(dc.p_detect == Approx(0.5));
    REQUIRE(dc.p_false == Approx(2.0 / 3.0));

    const DetectionCounts none = detection_counts({}, {}, {});
    REQUIRE(none.p_detect == 0.0);
    REQUIRE(none.p_false == 0.0);
}

TEST_CASE("label corruption", "[sampling]") {
    std::mt19937_64 gen(73);
    const Dataset ds = testutil::planted_blocks(gen, 3, 8, 0.4, 0.05);
    const LabeledSet ls = testutil::full_labeled_set(ds);

    SECTION("p_cor = 0 flips nothing") {
        const CorruptedSample cs = corrupt_labels(ds, ls, 0.0, 1);
        REQUIRE(cs.flipped.empty());
        REQUIRE(cs.sample.labels == ls.labels);
    }
    SECTION("p_cor = 1 flips everything to a different class") {
        const CorruptedSample cs = corrupt_labels(ds, ls, 1.0, 2);
        REQUIRE(cs.flipped == ls.nodes);
        for (std::size_t p = 0; p < ls.size(); ++p)
            REQUIRE(cs.sample.labels[p].front() != ls.labels[p].front());
    }
    SECTION("flips are deterministic, ascending, and leave the rest intact") {
        const CorruptedSample a = corrupt_labels(ds, ls, 0.3, 3);
        const CorruptedSample b = corrupt_labels(ds, ls, 0.3, 3);
        REQUIRE(a.flipped == b.flipped);
        REQUIRE(a.sample.labels == b.sample.labels);
        REQUIRE(std::is_sorted(a.flipped.begin(), a.flipped.end()));
        for (std::size_t p = 0; p < ls.size(); ++p) {
            const bool flipped =
                std::binary_search(a.flipped.begin(), a.flipped.end(), ls.nodes[p]);
            REQUIRE((a.sample.labels[p] != ls.labels[p]) == flipped);
        }
    }
    SECTION("validation") {
        REQUIRE_THROWS_AS(corrupt_labels(ds, ls, 1.5, 1), data_error);
        REQUIRE_THROWS_AS(corrupt_labels(ds, ls, -0.1, 1), data_error);
    }
}

TEST_CASE("class-balanced sampling", "[sampling]") {
    std::mt19937_64 gen(74);
    const Dataset ds = testutil::planted_blocks(gen, 3, 10, 0.4, 0.05);

    const LabeledSet ls = class_balanced_sample(ds, 4, 99);
    REQUIRE(ls.size() == 12);
    for (ClassId c = 0; c < 3; ++c) {
        const auto members = ls.members(c);
        REQUIRE(members.size() == 4);
        for (NodeId i : members) REQUIRE(ds.labels[i].front() == c);
    }
    const LabeledSet again = class_balanced_sample(ds, 4, 99);
    REQUIRE(again.nodes == ls.nodes);

    REQUIRE_THROWS_AS(class_balanced_sample(ds, 11, 1), data_error);
    REQUIRE_THROWS_AS(class_balanced_sample(ds, 0, 1), data_error);
}

TEST_CASE("uniform sampling", "[sampling]") {
    std::mt19937_64 gen(75);
    const Dataset ds = testutil::planted_blocks(gen, 3, 10, 0.4, 0.05);

    const LabeledSet ls = uniform_sample(ds, 0.5, 7);
    REQUIRE(ls.size() == 15);
    for (ClassId c = 0; c < 3; ++c) REQUIRE_FALSE(ls.members(c).empty());
    for (std::size_t p = 0; p < ls.size(); ++p)
        REQUIRE(ls.labels[p] == ds.labels[ls.nodes[p]]);

    const LabeledSet again = uniform_sample(ds, 0.5, 7);
    REQUIRE(again.nodes == ls.nodes);

    REQUIRE_THROWS_AS(uniform_sample(ds, 0.0, 1), data_error);
    REQUIRE_THROWS_AS(uniform_sample(ds, 1.5, 1), data_error);
    REQUIRE_THROWS_AS(uniform_sample(ds, 0.01, 1), data_error);
}
