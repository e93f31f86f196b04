#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <map>
#include <sstream>
#include <vector>

#include "sigf/errors.hpp"
#include "sigf/graph.hpp"
#include "sigf/model.hpp"
#include "sigf/path_types.hpp"
#include "sigf/sampler.hpp"
#include "sigf/spectral.hpp"
#include "sigf/train.hpp"
#include "support/cli_runner.hpp"
#include "support/oracles.hpp"
#include "support/synthetic.hpp"

using namespace sigf;
namespace tst = sigf::testing;

namespace {

struct Scenario {
    SignedBipartiteGraph graph;
    PathTypeTable table;
    SampleSet set;
    SpectralBasis basis;
    std::vector<double> scores;
    ModelParams params;
    std::int32_t n = 0;
    std::int32_t m = 0;
};

Scenario make_scenario(std::int32_t n, std::int32_t m, std::int64_t edges, int d,
                       int layers, int path_length, std::uint64_t seed) {
    Scenario s{tst::random_graph(n, m, edges, 0.6, seed), PathTypeTable(path_length),
               {},        {},
               {},        ModelParams{},
               n,         m};
    s.set = sample_neighborhoods(s.graph, s.table, 0, seed + 5);
    s.basis = eigendecompose(s.graph, 0.25, std::min(4, n + m));
    s.scores = pair_score_cache(s.basis, s.set);
    s.params = ModelParams::init(s.graph.order(), d, layers, s.table.type_count(), seed);
    Rng rng(seed * 7 + 3);
    for (auto& t : s.params.theta_raw) t = 0.3 * rng.normal();
    for (auto& phi_l : s.params.phi) {
        for (Eigen::Index i = 0; i < phi_l.size(); ++i) phi_l[i] = 0.2 * rng.normal();
    }
    return s;
}

double loss_at(const Scenario& s, const ModelParams& params, const BatchRows& batch,
               double beta) {
    const EmbeddingStack stack = forward(params, s.set, s.scores);
    return batch_loss(stack.final, s.n, batch, beta);
}

DatasetSplit small_dataset(std::uint64_t seed) {
    const std::int32_t n = 30;
    const std::int32_t m = 20;
    const auto rows = tst::random_interactions(n, m, 320, 0.75, seed);
    return split_interactions(rows, n, m, {0.7, 0.1, 0.2}, seed + 1);
}

TrainConfig small_config(std::uint64_t seed) {
    TrainConfig cfg;
    cfg.d = 8;
    cfg.d_h = 4;
    cfg.layers = 2;
    cfg.path_length = 2;
    cfg.batch_size = 64;
    cfg.k = 5;
    cfg.lr = 0.02;
    cfg.seed = seed;
    return cfg;
}

}  // namespace

TEST_CASE("stable sigmoid helpers") {
    CHECK(sigmoid(0.0) == 0.5);
    CHECK(sigmoid(40.0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(sigmoid(-40.0) > 0.0);
    CHECK(sigmoid(-800.0) == 0.0);
    CHECK(log_sigmoid(0.0) == doctest::Approx(-std::log(2.0)).epsilon(1e-15));
    CHECK(log_sigmoid(-800.0) == doctest::Approx(-800.0).epsilon(1e-12));
    CHECK(std::isfinite(log_sigmoid(800.0)));
    CHECK(sigmoid(0.5) == doctest::Approx(std::exp(log_sigmoid(0.5))).epsilon(1e-14));
}

TEST_CASE("ranking loss hits pinned values") {
    // Two users, two items; identical user/item rows make the score gap 0
    // or an easily controlled constant.
    RowMat fin(4, 2);
    fin << 1.0, 0.0,   // user 0
           0.0, 1.0,   // user 1
           1.0, 0.0,   // item 0 (node 2)
           1.0, 0.0;   // item 1 (node 3)

    SUBCASE("positive row with zero gap costs ln 2") {
        BatchRows b;
        b.rows = {{0, 0, 1}};
        b.negatives = {1};
        CHECK(batch_loss(fin, 2, b, 0.2) ==
              doctest::Approx(0.69314718055994529).epsilon(1e-15));
    }
    SUBCASE("positive row with unit gap") {
        fin(3, 0) = 0.0;  // item 1 scores 0 for user 0, item 0 scores 1
        BatchRows b;
        b.rows = {{0, 0, 1}};
        b.negatives = {1};
        CHECK(batch_loss(fin, 2, b, 0.2) ==
              doctest::Approx(0.31326168751822286).epsilon(1e-14));
    }
    SUBCASE("observed negative with beta 0 is a constant") {
        fin(3, 0) = 0.0;
        BatchRows b;
        b.rows = {{0, 0, 0}};
        b.negatives = {1};
        CHECK(batch_loss(fin, 2, b, 0.0) ==
              doctest::Approx(-0.69314718055994529).epsilon(1e-15));
    }
    SUBCASE("observed negative scales the gap by beta") {
        fin(3, 0) = 0.0;  // delta = 1
        BatchRows b;
        b.rows = {{0, 0, 0}};
        b.negatives = {1};
        CHECK(batch_loss(fin, 2, b, 0.5) ==
              doctest::Approx(-0.47407698418010669).epsilon(1e-14));
    }
    SUBCASE("rows sum") {
        fin(3, 0) = 0.0;
        BatchRows b;
        b.rows = {{0, 0, 1}, {0, 0, 0}};
        b.negatives = {1, 1};
        CHECK(batch_loss(fin, 2, b, 0.5) ==
              doctest::Approx(0.31326168751822286 - 0.47407698418010669).epsilon(1e-13));
    }
    SUBCASE("mismatched lengths are rejected") {
        BatchRows b;
        b.rows = {{0, 0, 1}};
        CHECK_THROWS_AS(batch_loss(fin, 2, b, 0.2), usage_error);
    }
}

TEST_CASE("unobserved sampling avoids interacted items") {
    Rng rng(9);
    const std::vector<std::int32_t> interacted = {0, 1, 3, 4};
    for (int t = 0; t < 200; ++t) {
        CHECK(sample_unobserved(rng, interacted, 5) == 2);
    }
    // Saturated user cannot be sampled for.
    const std::vector<std::int32_t> all = {0, 1, 2, 3, 4};
    CHECK_THROWS_AS(sample_unobserved(rng, all, 5), data_error);

    // A single hole is found even when rejection keeps missing.
    std::vector<std::int32_t> dense;
    for (std::int32_t i = 0; i < 1000; ++i) {
        if (i != 137) dense.push_back(i);
    }
    for (int t = 0; t < 50; ++t) {
        CHECK(sample_unobserved(rng, dense, 1000) == 137);
    }
}

TEST_CASE("unobserved sampling is uniform over the complement") {
    Rng rng(123);
    const std::int32_t m = 1000;
    std::vector<std::int32_t> interacted = {3, 77, 201, 202, 203, 500, 640, 888, 997, 998};
    std::vector<std::int64_t> counts(static_cast<std::size_t>(m), 0);
    const std::int64_t draws = 100000;
    for (std::int64_t t = 0; t < draws; ++t) {
        counts[static_cast<std::size_t>(sample_unobserved(rng, interacted, m))]++;
    }
    for (std::int32_t x : interacted) CHECK(counts[static_cast<std::size_t>(x)] == 0);

    const double complement = static_cast<double>(m - interacted.size());
    const double expect = static_cast<double>(draws) / complement;
    double chi2 = 0.0;
    for (std::int32_t i = 0; i < m; ++i) {
        if (std::binary_search(interacted.begin(), interacted.end(), i)) continue;
        const double diff = static_cast<double>(counts[static_cast<std::size_t>(i)]) - expect;
        chi2 += diff * diff / expect;
    }
    CHECK(chi2 <= tst::chi2_quantile_99(complement - 1.0));
}

TEST_CASE("analytic gradients match central differences") {
    Scenario s = make_scenario(5, 3, 11, 4, 2, 3, 2);
    BatchRows batch;
    batch.rows = {{0, 0, 1}, {1, 1, 0}, {2, 2, 1}, {3, 0, 0}};
    batch.negatives = {2, 0, 1, 1};
    const double beta = 0.5;

    const LossGrads lg = loss_and_gradients(s.params, s.set, s.scores, s.n, batch, beta);
    CHECK(lg.loss_sum ==
          doctest::Approx(loss_at(s, s.params, batch, beta)).epsilon(1e-12));

    auto rel_err = [](double a, double b) {
        return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 0.01});
    };
    auto fd = [&](double* slot) {
        const double x = *slot;
        const double h = 1e-5 * std::max(1.0, std::abs(x));
        *slot = x + h;
        const double up = loss_at(s, s.params, batch, beta);
        *slot = x - h;
        const double dn = loss_at(s, s.params, batch, beta);
        *slot = x;
        return (up - dn) / (2.0 * h);
    };

    for (Eigen::Index r = 0; r < s.params.embeddings.rows(); ++r) {
        for (Eigen::Index c = 0; c < s.params.embeddings.cols(); ++c) {
            CHECK(rel_err(lg.grads.embeddings(r, c), fd(&s.params.embeddings(r, c))) < 1e-4);
        }
    }
    for (std::size_t l = 0; l < s.params.theta_raw.size(); ++l) {
        CHECK(rel_err(lg.grads.theta_raw[l], fd(&s.params.theta_raw[l])) < 1e-4);
    }
    for (std::size_t l = 0; l < s.params.phi.size(); ++l) {
        for (Eigen::Index i = 0; i < s.params.phi[l].size(); ++i) {
            CHECK(rel_err(lg.grads.phi[l][i], fd(&s.params.phi[l][i])) < 1e-4);
        }
    }
}

TEST_CASE("gradients also pass the check with negative rows silenced") {
    Scenario s = make_scenario(6, 4, 14, 3, 2, 2, 11);
    BatchRows batch;
    batch.rows = {{0, 0, 1}, {1, 1, 1}, {2, 2, 0}};
    batch.negatives = {3, 2, 0};
    const double beta = -0.5;  // negative beta still defines a smooth loss

    const LossGrads lg = loss_and_gradients(s.params, s.set, s.scores, s.n, batch, beta);
    auto rel_err = [](double a, double b) {
        return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 0.01});
    };
    auto fd = [&](double* slot) {
        const double x = *slot;
        const double h = 1e-5 * std::max(1.0, std::abs(x));
        *slot = x + h;
        const double up = loss_at(s, s.params, batch, beta);
        *slot = x - h;
        const double dn = loss_at(s, s.params, batch, beta);
        *slot = x;
        return (up - dn) / (2.0 * h);
    };
    for (Eigen::Index r = 0; r < s.params.embeddings.rows(); ++r) {
        for (Eigen::Index c = 0; c < s.params.embeddings.cols(); ++c) {
            CHECK(rel_err(lg.grads.embeddings(r, c), fd(&s.params.embeddings(r, c))) < 1e-4);
        }
    }
    for (std::size_t l = 0; l < s.params.theta_raw.size(); ++l) {
        CHECK(rel_err(lg.grads.theta_raw[l], fd(&s.params.theta_raw[l])) < 1e-4);
    }
}

TEST_CASE("beta zero makes observed negatives inert") {
    Scenario s = make_scenario(5, 4, 12, 3, 2, 2, 21);
    BatchRows batch;
    batch.rows = {{0, 1, 0}, {2, 0, 0}};
    batch.negatives = {2, 3};
    const LossGrads lg = loss_and_gradients(s.params, s.set, s.scores, s.n, batch, 0.0);
    CHECK(lg.loss_sum == doctest::Approx(2.0 * std::log(0.5)).epsilon(1e-14));
    CHECK(lg.grads.embeddings.cwiseAbs().maxCoeff() == 0.0);
    for (double t : lg.grads.theta_raw) CHECK(t == 0.0);
    for (const auto& phi_l : lg.grads.phi) CHECK(phi_l.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("optimizer leaves parameters alone at zero learning rate") {
    Scenario s = make_scenario(5, 3, 11, 4, 2, 2, 31);
    const ModelParams before = s.params;
    AdamW opt(0.0, 0.1);
    Gradients g;
    g.embeddings = RowMat::Constant(s.params.embeddings.rows(), s.params.d, 0.7);
    g.theta_raw.assign(s.params.theta_raw.size(), 0.3);
    for (const auto& phi_l : s.params.phi) g.phi.push_back(Eigen::VectorXd::Constant(phi_l.size(), 0.2));
    opt.step(s.params, g);
    CHECK((s.params.embeddings - before.embeddings).cwiseAbs().maxCoeff() == 0.0);
    CHECK(s.params.theta_raw == before.theta_raw);
    CHECK(opt.steps() == 1);
}

TEST_CASE("first optimizer step without decay moves by about the learning rate") {
    Scenario s = make_scenario(4, 3, 9, 3, 1, 2, 41);
    const ModelParams before = s.params;
    AdamW opt(0.01, 0.0);
    Gradients g;
    g.embeddings = RowMat::Constant(s.params.embeddings.rows(), s.params.d, 0.5);
    g.theta_raw.assign(1, -0.25);
    g.phi.push_back(Eigen::VectorXd::Constant(s.params.phi[0].size(), 1.0));
    opt.step(s.params, g);
    // m_hat = g, v_hat = g*g, so the step is lr * g/(|g| + eps) ~ lr * sign(g).
    CHECK(s.params.embeddings(0, 0) ==
          doctest::Approx(before.embeddings(0, 0) - 0.01).epsilon(1e-6));
    CHECK(s.params.theta_raw[0] == doctest::Approx(before.theta_raw[0] + 0.01).epsilon(1e-6));
    CHECK(s.params.phi[0][0] == doctest::Approx(before.phi[0][0] - 0.01).epsilon(1e-6));
}

TEST_CASE("weight decay is decoupled from the gradient path") {
    Scenario s = make_scenario(4, 3, 9, 3, 1, 2, 51);
    const ModelParams before = s.params;
    const double lr = 0.1;
    const double wd = 0.5;
    AdamW opt(lr, wd);
    Gradients g;
    g.embeddings = RowMat::Zero(s.params.embeddings.rows(), s.params.d);
    g.theta_raw.assign(1, 0.0);
    g.phi.push_back(Eigen::VectorXd::Zero(s.params.phi[0].size()));
    opt.step(s.params, g);
    // Zero gradient leaves the moments at zero; only the decay term acts.
    for (Eigen::Index r = 0; r < before.embeddings.rows(); ++r) {
        for (Eigen::Index c = 0; c < before.embeddings.cols(); ++c) {
            CHECK(s.params.embeddings(r, c) ==
                  doctest::Approx(before.embeddings(r, c) * (1.0 - lr * wd)).epsilon(1e-12));
        }
    }
    CHECK(s.params.theta_raw[0] ==
          doctest::Approx(before.theta_raw[0] * (1.0 - lr * wd)).epsilon(1e-12));
}

TEST_CASE("optimizer rejects mismatched shapes and bad rates") {
    Scenario s = make_scenario(4, 3, 9, 3, 1, 2, 61);
    AdamW opt(0.01, 0.0);
    Gradients g;
    g.embeddings = RowMat::Zero(2, 3);
    g.theta_raw.assign(1, 0.0);
    g.phi.push_back(Eigen::VectorXd::Zero(s.params.phi[0].size()));
    CHECK_THROWS_AS(opt.step(s.params, g), usage_error);
    CHECK_THROWS_AS(AdamW(-0.1, 0.0), usage_error);
    CHECK_THROWS_AS(AdamW(0.1, -0.2), usage_error);
}

TEST_CASE("early stopper enforces strict improvement and patience") {
    SUBCASE("patience zero stops at the first non-improvement") {
        EarlyStopper st(0);
        CHECK(st.observe(0.5));
        CHECK_FALSE(st.should_stop());
        CHECK_FALSE(st.observe(0.5));  // equal is not an improvement
        CHECK(st.should_stop());
        CHECK(st.best() == 0.5);
    }
    SUBCASE("patience two tolerates two flat epochs") {
        EarlyStopper st(2);
        st.observe(1.0);
        st.observe(0.9);
        st.observe(0.8);
        CHECK_FALSE(st.should_stop());
        st.observe(0.7);
        CHECK(st.should_stop());
    }
    SUBCASE("improvement resets the counter") {
        EarlyStopper st(1);
        st.observe(1.0);
        st.observe(0.9);
        CHECK_FALSE(st.should_stop());
        st.observe(1.1);
        st.observe(1.0);
        CHECK_FALSE(st.should_stop());
        st.observe(0.9);
        CHECK(st.should_stop());
        CHECK(st.best() == 1.1);
    }
    SUBCASE("negative patience is rejected") {
        CHECK_THROWS_AS(EarlyStopper(-1), usage_error);
    }
}

TEST_CASE("one epoch of training is bitwise deterministic") {
    const DatasetSplit split = small_dataset(5);
    const TrainConfig cfg = small_config(5);
    const auto graph = SignedBipartiteGraph::build(split.train, split.n, split.m);
    const PathTypeTable table(cfg.path_length);
    const SpectralBasis basis = eigendecompose(graph, cfg.alpha, cfg.d_h);

    std::vector<std::vector<std::int32_t>> user_items(static_cast<std::size_t>(split.n));
    for (const auto& r : split.train) {
        user_items[static_cast<std::size_t>(r.user)].push_back(r.item);
    }
    for (auto& items : user_items) std::sort(items.begin(), items.end());

    auto run_once = [&]() {
        ModelParams p = ModelParams::init(graph.order(), cfg.d, cfg.layers,
                                          table.type_count(), cfg.seed);
        AdamW opt(cfg.lr, cfg.weight_decay);
        const EpochStats st =
            train_epoch(p, opt, graph, table, basis, split.train, user_items, cfg, 1);
        return std::pair{p, st};
    };
    const auto [p1, st1] = run_once();
    const auto [p2, st2] = run_once();
    CHECK(st1.mean_loss == st2.mean_loss);
    CHECK(st1.rows == static_cast<std::int64_t>(split.train.size()));
    CHECK(st1.batches == (st1.rows + cfg.batch_size - 1) / cfg.batch_size);
    CHECK((p1.embeddings - p2.embeddings).cwiseAbs().maxCoeff() == 0.0);
    CHECK(p1.theta_raw == p2.theta_raw);
    for (std::size_t l = 0; l < p1.phi.size(); ++l) {
        CHECK((p1.phi[l] - p2.phi[l]).cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("fit runs, logs, and tracks the best validation epoch") {
    const DatasetSplit split = small_dataset(7);
    TrainConfig cfg = small_config(7);
    cfg.epochs = 4;
    cfg.patience = 50;
    const auto graph = SignedBipartiteGraph::build(split.train, split.n, split.m);
    const SpectralBasis basis = eigendecompose(graph, cfg.alpha, cfg.d_h);

    std::ostringstream log;
    const FitResult res = fit(split, basis, cfg, &log);
    CHECK(res.epochs_run == 4);
    REQUIRE(res.log.size() == 4);
    double best = -1.0;
    int best_epoch = 0;
    for (const auto& row : res.log) {
        if (row.val_recall > best) {
            best = row.val_recall;
            best_epoch = row.epoch;
        }
        CHECK(row.seconds >= 0.0);
        CHECK(std::isfinite(row.mean_loss));
    }
    CHECK(res.best_epoch == best_epoch);
    CHECK(res.val_best.recall == best);
    CHECK(res.val_best.users > 0);
    CHECK(res.test.users > 0);

    // Four log lines, five tab-separated fields each.
    std::istringstream lines(log.str());
    std::string line;
    int rows = 0;
    while (std::getline(lines, line)) {
        ++rows;
        CHECK(std::count(line.begin(), line.end(), '\t') == 4);
    }
    CHECK(rows == 4);

    // Identical reruns are bitwise identical.
    const FitResult res2 = fit(split, basis, cfg, nullptr);
    CHECK(res2.val_best.recall == res.val_best.recall);
    CHECK(res2.test.ndcg == res.test.ndcg);
    CHECK((res2.params.embeddings - res.params.embeddings).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("fit with zero epochs still reports initial-parameter metrics") {
    const DatasetSplit split = small_dataset(9);
    TrainConfig cfg = small_config(9);
    cfg.epochs = 0;
    const auto graph = SignedBipartiteGraph::build(split.train, split.n, split.m);
    const SpectralBasis basis = eigendecompose(graph, cfg.alpha, cfg.d_h);
    const FitResult res = fit(split, basis, cfg, nullptr);
    CHECK(res.epochs_run == 0);
    CHECK(res.best_epoch == 0);
    CHECK(res.log.empty());
    CHECK(res.val_best.users > 0);
    CHECK(res.test.users > 0);

    const ModelParams init = ModelParams::init(graph.order(), cfg.d, cfg.layers,
                                               PathTypeTable(cfg.path_length).type_count(),
                                               cfg.seed);
    CHECK((res.params.embeddings - init.embeddings).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("fit early stopping matches a replay of its own log") {
    const DatasetSplit split = small_dataset(11);
    TrainConfig cfg = small_config(11);
    cfg.epochs = 60;
    cfg.patience = 2;
    const auto graph = SignedBipartiteGraph::build(split.train, split.n, split.m);
    const SpectralBasis basis = eigendecompose(graph, cfg.alpha, cfg.d_h);
    const FitResult res = fit(split, basis, cfg, nullptr);

    EarlyStopper replay(cfg.patience);
    int stop_epoch = 0;
    for (const auto& row : res.log) {
        replay.observe(row.val_recall);
        if (replay.should_stop()) {
            stop_epoch = row.epoch;
            break;
        }
    }
    if (stop_epoch == 0) {
        CHECK(res.epochs_run == cfg.epochs);
    } else {
        CHECK(res.epochs_run == stop_epoch);
    }
    CHECK(res.best_epoch >= 1);
}

TEST_CASE("training loss falls over twenty epochs") {
    for (std::uint64_t seed : {1ULL, 2ULL}) {
        const auto rows = tst::two_group_interactions(100, 50, 8, 3, seed);
        const DatasetSplit split = split_interactions(rows, 100, 50, {0.7, 0.1, 0.2}, seed);
        TrainConfig cfg = small_config(seed);
        cfg.d = 16;
        cfg.epochs = 20;
        cfg.patience = 1000;
        cfg.alpha = 0.4;
        cfg.beta = 0.5;
        const auto graph = SignedBipartiteGraph::build(split.train, split.n, split.m);
        const SpectralBasis basis = eigendecompose(graph, cfg.alpha, cfg.d_h);
        const FitResult res = fit(split, basis, cfg, nullptr);
        REQUIRE(res.log.size() == 20);
        CHECK(res.log.back().mean_loss < res.log.front().mean_loss);
    }
}

TEST_CASE("checkpoint files round trip bitwise") {
    Scenario s = make_scenario(7, 5, 18, 4, 2, 3, 71);
    Checkpoint ckpt;
    ckpt.meta = {7, 5, 4, 2, 4, 3, 0.25, 0.5, s.table.type_count()};
    ckpt.params = s.params;

    const std::string dir = tst::fresh_dir("ckpt");
    const std::string path = dir + "/model.ckpt";
    write_checkpoint(path, ckpt);
    const Checkpoint back = read_checkpoint(path);
    CHECK(back.meta.n == 7);
    CHECK(back.meta.m == 5);
    CHECK(back.meta.d == 4);
    CHECK(back.meta.layers == 2);
    CHECK(back.meta.d_h == 4);
    CHECK(back.meta.path_length == 3);
    CHECK(back.meta.alpha == 0.25);
    CHECK(back.meta.beta == 0.5);
    CHECK(back.meta.type_count == s.table.type_count());
    CHECK((back.params.embeddings - s.params.embeddings).cwiseAbs().maxCoeff() == 0.0);
    CHECK(back.params.theta_raw == s.params.theta_raw);
    for (std::size_t l = 0; l < s.params.phi.size(); ++l) {
        CHECK((back.params.phi[l] - s.params.phi[l]).cwiseAbs().maxCoeff() == 0.0);
    }

    // Corruption and truncation are data errors.
    std::string bytes = tst::read_text_file(path);
    tst::write_text_file(path, "XIGF 1\n" + bytes.substr(7));
    CHECK_THROWS_AS(read_checkpoint(path), data_error);
    tst::write_text_file(path, bytes.substr(0, bytes.size() - 16));
    CHECK_THROWS_AS(read_checkpoint(path), data_error);
    CHECK_THROWS_AS(read_checkpoint(dir + "/none.ckpt"), data_error);

    // Metadata that contradicts the parameters is refused at write time.
    ckpt.meta.n = 9;
    CHECK_THROWS_AS(write_checkpoint(path, ckpt), usage_error);
    std::filesystem::remove_all(dir);
}
