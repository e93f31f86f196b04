#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sigf/dataset_io.hpp"
#include "sigf/errors.hpp"
#include "sigf/eval.hpp"
#include "sigf/graph.hpp"
#include "sigf/interactions.hpp"
#include "sigf/model.hpp"
#include "sigf/path_types.hpp"
#include "sigf/sampler.hpp"
#include "sigf/spectral.hpp"
#include "sigf/train.hpp"

namespace {

using namespace sigf;

std::string format_metrics(const char* tag, const MetricReport& rep, int k) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%s\trecall@%d\t%.10g\tndcg@%d\t%.10g", tag, k,
                  rep.recall, k, rep.ndcg);
    return buf;
}

std::array<int, 3> parse_cols(const std::string& text) {
    std::array<int, 3> cols{};
    std::istringstream in(text);
    char c1 = 0;
    char c2 = 0;
    if (!(in >> cols[0] >> c1 >> cols[1] >> c2 >> cols[2]) || c1 != ',' || c2 != ',' ||
        in.rdbuf()->in_avail() != 0 || cols[0] < 0 || cols[1] < 0 || cols[2] < 0) {
        throw usage_error("--cols expects three non-negative indices like 0,1,2");
    }
    return cols;
}

std::array<double, 3> parse_ratios(const std::string& text) {
    std::array<double, 3> r{};
    std::istringstream in(text);
    char c1 = 0;
    char c2 = 0;
    if (!(in >> r[0] >> c1 >> r[1] >> c2 >> r[2]) || c1 != ',' || c2 != ',') {
        throw usage_error("--ratios expects three numbers like 0.7,0.1,0.2");
    }
    return r;
}

char parse_delimiter(const std::string& text) {
    if (text == "tab" || text == "\\t" || text == "\t") return '\t';
    if (text.size() != 1) throw usage_error("--delim expects one character or 'tab'");
    return text[0];
}

// Header-only peek used for the idempotence check.
bool spectrum_matches(const std::string& path, std::int64_t order, int d_h, double alpha) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return false;
    std::string line;
    if (!std::getline(in, line)) return false;
    std::istringstream header(line);
    std::string magic;
    int version = 0;
    std::int64_t f_order = 0;
    int f_dh = 0;
    double f_alpha = 0.0;
    if (!(header >> magic >> version >> f_order >> f_dh >> f_alpha)) return false;
    return magic == "SIGSPEC" && version == 1 && f_order == order && f_dh == d_h &&
           f_alpha == alpha;
}

// Loads the cache when present, otherwise computes the basis; optionally
// persists a fresh computation. The caller supplies the exact alpha and
// requested d_h; mismatches with an existing cache are configuration
// errors rather than silent recomputes.
SpectralBasis obtain_basis(const SignedBipartiteGraph& graph, double alpha, int d_h,
                           const std::string& cache_path, bool write_if_missing) {
    const int effective = std::min<std::int64_t>(d_h, graph.order());
    if (effective < d_h) {
        std::cerr << "warning: spectral dimension clamped to graph order " << effective
                  << "\n";
    }
    if (!cache_path.empty() && std::filesystem::exists(cache_path)) {
        SpectrumFile file = read_spectrum(cache_path);
        if (file.basis.node_coords.rows() != graph.order()) {
            throw data_error("spectrum cache was built for a different graph");
        }
        if (file.alpha != alpha) {
            std::ostringstream os;
            os << "spectrum cache has alpha " << file.alpha << " but the run requests "
               << alpha;
            throw usage_error(os.str());
        }
        if (file.basis.d_h != effective) {
            std::ostringstream os;
            os << "spectrum cache has " << file.basis.d_h << " eigenpairs but the run requests "
               << effective;
            throw usage_error(os.str());
        }
        return std::move(file.basis);
    }
    SpectralBasis basis = eigendecompose(graph, alpha, effective);
    if (!cache_path.empty() && write_if_missing) {
        write_spectrum(cache_path, basis, alpha);
    }
    return basis;
}

int cmd_prepare(const std::string& input, const std::string& out_dir,
                const std::string& cols, const std::string& delim, bool header,
                const std::string& positive, const std::string& negative, int kcore,
                const std::string& ratios, std::uint64_t seed) {
    RawTableSpec spec;
    spec.path = input;
    spec.delimiter = parse_delimiter(delim);
    const auto c = parse_cols(cols);
    spec.user_col = c[0];
    spec.item_col = c[1];
    spec.signal_col = c[2];
    spec.skip_header = header;

    ThresholdRule rule{SignalPredicate::parse(positive), SignalPredicate::parse(negative)};
    const IngestResult ing = ingest_raw(read_raw_table(spec), rule);
    if (ing.conflict_warnings > 0) {
        std::cerr << "warning: " << ing.conflict_warnings
                  << " duplicate pairs with conflicting signs, kept the last\n";
    }

    const KcoreResult kc = kcore_filter(ing.interactions,
                                        static_cast<std::int32_t>(ing.user_keys.size()),
                                        static_cast<std::int32_t>(ing.item_keys.size()),
                                        kcore);

    std::vector<std::string> user_keys(static_cast<std::size_t>(kc.n));
    for (std::size_t old = 0; old < kc.user_remap.size(); ++old) {
        const std::int32_t idx = kc.user_remap[old];
        if (idx >= 0) user_keys[static_cast<std::size_t>(idx)] = ing.user_keys[old];
    }
    std::vector<std::string> item_keys(static_cast<std::size_t>(kc.m));
    for (std::size_t old = 0; old < kc.item_remap.size(); ++old) {
        const std::int32_t idx = kc.item_remap[old];
        if (idx >= 0) item_keys[static_cast<std::size_t>(idx)] = ing.item_keys[old];
    }

    const DatasetSplit split =
        split_interactions(kc.interactions, kc.n, kc.m, parse_ratios(ratios), seed);

    std::filesystem::create_directories(out_dir);
    const auto out = std::filesystem::path(out_dir);
    write_dataset((out / "dataset.tsv").string(), split);
    write_mapping((out / "users.tsv").string(), user_keys);
    write_mapping((out / "items.tsv").string(), item_keys);

    std::int64_t pos = 0;
    std::int64_t neg = 0;
    for (const auto& r : kc.interactions) (r.sign > 0 ? pos : neg) += 1;
    std::cout << "users\t" << kc.n << "\n"
              << "items\t" << kc.m << "\n"
              << "interactions\t" << kc.interactions.size() << "\n"
              << "positive\t" << pos << "\n"
              << "negative\t" << neg << "\n"
              << "train\t" << split.train.size() << "\n"
              << "val\t" << split.validation.size() << "\n"
              << "test\t" << split.test.size() << "\n";
    return 0;
}

int cmd_spectrum(const std::string& data, const std::string& out, double alpha, int d_h,
                 bool force) {
    const DatasetSplit split = read_dataset(data);
    const SignedBipartiteGraph graph =
        SignedBipartiteGraph::build(split.train, split.n, split.m);
    const int effective = std::min<std::int64_t>(d_h, graph.order());
    if (effective < d_h) {
        std::cerr << "warning: spectral dimension clamped to graph order " << effective
                  << "\n";
    }
    if (!force && spectrum_matches(out, graph.order(), effective, alpha)) {
        std::cout << "cache hit\t" << out << "\n";
        return 0;
    }
    const SpectralBasis basis = eigendecompose(graph, alpha, effective);
    write_spectrum(out, basis, alpha);
    std::cout << "wrote\t" << out << "\neigenvalues\t" << basis.d_h << "\n";
    return 0;
}

int cmd_train(const std::string& data, const std::string& spectrum,
              const std::string& ckpt_path, const std::string& log_path,
              const TrainConfig& cfg) {
    const DatasetSplit split = read_dataset(data);
    const SignedBipartiteGraph graph =
        SignedBipartiteGraph::build(split.train, split.n, split.m);
    const SpectralBasis basis =
        obtain_basis(graph, cfg.alpha, cfg.d_h, spectrum, /*write_if_missing=*/true);

    std::ofstream log(log_path, std::ios::app);
    if (!log) throw data_error("cannot open log file for appending: " + log_path);

    const FitResult result = fit(split, basis, cfg, &log);

    Checkpoint ckpt;
    ckpt.meta.n = split.n;
    ckpt.meta.m = split.m;
    ckpt.meta.d = cfg.d;
    ckpt.meta.layers = cfg.layers;
    ckpt.meta.d_h = basis.d_h;
    ckpt.meta.path_length = cfg.path_length;
    ckpt.meta.alpha = cfg.alpha;
    ckpt.meta.beta = cfg.beta;
    ckpt.meta.type_count = PathTypeTable(cfg.path_length).type_count();
    ckpt.params = result.params;
    write_checkpoint(ckpt_path, ckpt);

    std::cout << "epochs_run\t" << result.epochs_run << "\n"
              << "best_epoch\t" << result.best_epoch << "\n"
              << format_metrics("validation", result.val_best, cfg.k) << "\n"
              << format_metrics("test", result.test, cfg.k) << "\n"
              << "checkpoint\t" << ckpt_path << "\n";
    return 0;
}

// Rebuilds the fixed evaluation sample set used by training, so metrics
// here reproduce the training run's numbers for the same seed.
EmbeddingStack stack_for_checkpoint(const Checkpoint& ckpt, const DatasetSplit& split,
                                    const std::string& spectrum, int max_walks,
                                    std::uint64_t seed) {
    if (ckpt.meta.n != split.n || ckpt.meta.m != split.m) {
        throw data_error("checkpoint and dataset disagree on graph size");
    }
    const SignedBipartiteGraph graph =
        SignedBipartiteGraph::build(split.train, split.n, split.m);
    const SpectralBasis basis = obtain_basis(graph, ckpt.meta.alpha, ckpt.meta.d_h, spectrum,
                                             /*write_if_missing=*/false);
    const PathTypeTable table(ckpt.meta.path_length);
    if (table.type_count() != ckpt.meta.type_count) {
        throw data_error("checkpoint path-type count does not match its path length");
    }
    const SampleSet eval_set =
        sample_neighborhoods(graph, table, max_walks, Rng::mix(seed, kEvalSampleSalt));
    return forward(ckpt.params, eval_set, pair_score_cache(basis, eval_set));
}

int cmd_evaluate(const std::string& data, const std::string& ckpt_path,
                 const std::string& spectrum, const std::string& out_path, int k,
                 int max_walks, std::uint64_t seed) {
    const Checkpoint ckpt = read_checkpoint(ckpt_path);
    const DatasetSplit split = read_dataset(data);
    const EmbeddingStack stack =
        stack_for_checkpoint(ckpt, split, spectrum, max_walks, seed);

    const MetricReport val = evaluate(stack.final, split, k, EvalTarget::Validation);
    const MetricReport test = evaluate(stack.final, split, k, EvalTarget::Test);
    const std::string val_line = format_metrics("validation", val, k);
    const std::string test_line = format_metrics("test", test, k);
    std::cout << val_line << "\n" << test_line << "\n";
    if (!out_path.empty()) {
        std::ofstream out(out_path, std::ios::app);
        if (!out) throw data_error("cannot open metrics file for appending: " + out_path);
        out << val_line << "\n" << test_line << "\n";
    }
    return 0;
}

int cmd_inspect(const std::string& ckpt_path, bool show_phi, bool show_theta, int layer,
                int top, int bottom) {
    const Checkpoint ckpt = read_checkpoint(ckpt_path);
    if (show_theta == show_phi) {
        throw usage_error("inspect requires exactly one of --phi or --theta");
    }
    if (show_theta) {
        for (int l = 0; l < ckpt.params.layers; ++l) {
            char buf[64];
            std::snprintf(buf, sizeof(buf), "%d\t%.10g", l, ckpt.params.theta(l));
            std::cout << buf << "\n";
        }
        return 0;
    }
    if (layer < 0 || layer >= ckpt.params.layers) {
        throw usage_error("--layer out of range");
    }
    if (top < 0 || bottom < 0) throw usage_error("--top/--bottom must be >= 0");

    const PathTypeTable table(ckpt.meta.path_length);
    const Eigen::VectorXd& phi = ckpt.params.phi[static_cast<std::size_t>(layer)];
    std::vector<std::int32_t> ids(static_cast<std::size_t>(table.type_count()));
    std::iota(ids.begin(), ids.end(), 0);
    std::stable_sort(ids.begin(), ids.end(), [&](std::int32_t a, std::int32_t b) {
        if (phi[a] != phi[b]) return phi[a] > phi[b];
        return a < b;
    });

    auto print_row = [&](std::int32_t id) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%s\t%.10g", table.signs_of(id).c_str(), phi[id]);
        std::cout << buf << "\n";
    };
    if (top == 0 && bottom == 0) {
        for (std::int32_t id : ids) print_row(id);
        return 0;
    }
    const auto count = static_cast<int>(ids.size());
    for (int i = 0; i < std::min(top, count); ++i) print_row(ids[static_cast<std::size_t>(i)]);
    // Bottom rows ascend, smallest first.
    for (int i = 0; i < std::min(bottom, count); ++i) {
        print_row(ids[static_cast<std::size_t>(count - 1 - i)]);
    }
    return 0;
}

int cmd_recommend(const std::string& data, const std::string& ckpt_path,
                  const std::string& spectrum, std::int64_t user, int k, int max_walks,
                  std::uint64_t seed) {
    const Checkpoint ckpt = read_checkpoint(ckpt_path);
    const DatasetSplit split = read_dataset(data);
    if (user < 0 || user >= split.n) {
        throw usage_error("unknown user id " + std::to_string(user));
    }
    const EmbeddingStack stack =
        stack_for_checkpoint(ckpt, split, spectrum, max_walks, seed);

    // Everything the user already touched, in any split, is off the table.
    std::vector<char> excluded(static_cast<std::size_t>(split.m), 0);
    auto mask = [&](const std::vector<Interaction>& rows) {
        for (const auto& r : rows) {
            if (r.user == user) excluded[static_cast<std::size_t>(r.item)] = 1;
        }
    };
    mask(split.train);
    mask(split.validation);
    mask(split.test);

    const auto ranked = rank_items(stack.final, split.n, split.m,
                                   static_cast<std::int32_t>(user), k, excluded);
    std::cout << "rank\titem\tscore\n";
    for (std::size_t r = 0; r < ranked.size(); ++r) {
        char buf[80];
        std::snprintf(buf, sizeof(buf), "%zu\t%d\t%.10g", r + 1, ranked[r],
                      predict(stack.final, static_cast<std::int32_t>(user),
                              split.n + ranked[r]));
        std::cout << buf << "\n";
    }
    return 0;
}

int run(int argc, char** argv) {
    CLI::App app{"sign-aware graph transformer recommender"};
    app.require_subcommand(1);

    std::uint64_t seed = 42;
    app.add_option("--seed", seed, "global RNG seed")->capture_default_str();

    auto* prepare = app.add_subcommand("prepare", "ingest a raw table into a dataset");
    prepare->fallthrough();
    prepare->set_config("--config");
    std::string p_input;
    std::string p_out = ".";
    std::string p_cols;
    std::string p_delim = ",";
    std::string p_pos = ">3.5";
    std::string p_neg = "<=3.5";
    std::string p_ratios = "0.7,0.1,0.2";
    bool p_header = false;
    int p_kcore = 5;
    prepare->add_option("input", p_input, "raw interaction table")->required();
    prepare->add_option("--out", p_out, "output directory")->capture_default_str();
    prepare->add_option("--cols", p_cols, "user,item,signal column indices")->required();
    prepare->add_option("--delim", p_delim, "field delimiter, or 'tab'")
        ->capture_default_str();
    prepare->add_flag("--header", p_header, "skip the first input line");
    prepare->add_option("--positive", p_pos, "positive-signal predicate")
        ->capture_default_str();
    prepare->add_option("--negative", p_neg, "negative-signal predicate")
        ->capture_default_str();
    prepare->add_option("--kcore", p_kcore, "minimum interactions per kept entity")
        ->capture_default_str();
    prepare->add_option("--ratios", p_ratios, "train,val,test fractions")
        ->capture_default_str();

    auto* spectrum = app.add_subcommand("spectrum", "precompute the spectral basis");
    spectrum->fallthrough();
    spectrum->set_config("--config");
    std::string s_data;
    std::string s_out = "spectrum.bin";
    double s_alpha = 0.2;
    int s_dh = 64;
    bool s_force = false;
    spectrum->add_option("--data", s_data, "canonical dataset")->required();
    spectrum->add_option("--out", s_out, "cache file")->capture_default_str();
    spectrum->add_option("--alpha", s_alpha, "negative-edge weight")->capture_default_str();
    spectrum->add_option("--dh", s_dh, "number of eigenpairs")->capture_default_str();
    spectrum->add_flag("--force", s_force, "recompute even on a cache hit");

    auto* train = app.add_subcommand("train", "train a model");
    train->fallthrough();
    train->set_config("--config");
    std::string t_data;
    std::string t_spectrum;
    std::string t_ckpt = "model.ckpt";
    std::string t_log = "train_log.tsv";
    TrainConfig cfg;
    train->add_option("--data", t_data, "canonical dataset")->required();
    train->add_option("--spectrum", t_spectrum, "spectral cache (loaded or created)");
    train->add_option("--out", t_ckpt, "checkpoint path")->capture_default_str();
    train->add_option("--log", t_log, "per-epoch TSV log, appended")->capture_default_str();
    train->add_option("--alpha", cfg.alpha, "negative-edge weight")->capture_default_str();
    train->add_option("--beta", cfg.beta, "loss weight on observed negatives")
        ->capture_default_str();
    train->add_option("--lr", cfg.lr, "learning rate")->capture_default_str();
    train->add_option("--weight-decay", cfg.weight_decay, "decoupled weight decay")
        ->capture_default_str();
    train->add_option("--epochs", cfg.epochs, "maximum epochs")->capture_default_str();
    train->add_option("--patience", cfg.patience, "non-improving epochs tolerated")
        ->capture_default_str();
    train->add_option("--batch-size", cfg.batch_size, "rows per optimizer step")
        ->capture_default_str();
    train->add_option("--d", cfg.d, "embedding dimension")->capture_default_str();
    train->add_option("--dh", cfg.d_h, "spectral dimension")->capture_default_str();
    train->add_option("--layers", cfg.layers, "attention layers")->capture_default_str();
    train->add_option("--path-length", cfg.path_length, "walk length threshold")
        ->capture_default_str();
    train->add_option("--max-walks", cfg.max_walks, "walks per node, 0 = per neighbor")
        ->capture_default_str();
    train->add_option("--k", cfg.k, "metric cutoff")->capture_default_str();

    auto* evaluate = app.add_subcommand("evaluate", "score a checkpoint");
    evaluate->fallthrough();
    evaluate->set_config("--config");
    std::string e_data;
    std::string e_ckpt;
    std::string e_spectrum;
    std::string e_out;
    int e_k = 20;
    int e_max_walks = 0;
    evaluate->add_option("--data", e_data, "canonical dataset")->required();
    evaluate->add_option("--ckpt", e_ckpt, "checkpoint")->required();
    evaluate->add_option("--spectrum", e_spectrum, "spectral cache to reuse");
    evaluate->add_option("--out", e_out, "append metrics TSV here");
    evaluate->add_option("--k", e_k, "metric cutoff")->capture_default_str();
    evaluate->add_option("--max-walks", e_max_walks, "walk cap used at training time")
        ->capture_default_str();

    auto* inspect = app.add_subcommand("inspect", "print learned parameters");
    inspect->fallthrough();
    std::string i_ckpt;
    bool i_phi = false;
    bool i_theta = false;
    int i_layer = 0;
    int i_top = 0;
    int i_bottom = 0;
    inspect->add_option("--ckpt", i_ckpt, "checkpoint")->required();
    inspect->add_flag("--phi", i_phi, "path-type biases");
    inspect->add_flag("--theta", i_theta, "spectral blend weight per layer");
    inspect->add_option("--layer", i_layer, "layer for --phi")->capture_default_str();
    inspect->add_option("--top", i_top, "largest N biases");
    inspect->add_option("--bottom", i_bottom, "smallest N biases");

    auto* recommend = app.add_subcommand("recommend", "top items for one user");
    recommend->fallthrough();
    recommend->set_config("--config");
    std::string r_data;
    std::string r_ckpt;
    std::string r_spectrum;
    std::int64_t r_user = -1;
    int r_k = 20;
    int r_max_walks = 0;
    recommend->add_option("--data", r_data, "canonical dataset")->required();
    recommend->add_option("--ckpt", r_ckpt, "checkpoint")->required();
    recommend->add_option("--spectrum", r_spectrum, "spectral cache to reuse");
    recommend->add_option("--user", r_user, "user index")->required();
    recommend->add_option("--k", r_k, "list length")->capture_default_str();
    recommend->add_option("--max-walks", r_max_walks, "walk cap used at training time")
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    cfg.seed = seed;
    if (prepare->parsed()) {
        return cmd_prepare(p_input, p_out, p_cols, p_delim, p_header, p_pos, p_neg, p_kcore,
                           p_ratios, seed);
    }
    if (spectrum->parsed()) return cmd_spectrum(s_data, s_out, s_alpha, s_dh, s_force);
    if (train->parsed()) return cmd_train(t_data, t_spectrum, t_ckpt, t_log, cfg);
    if (evaluate->parsed()) {
        return cmd_evaluate(e_data, e_ckpt, e_spectrum, e_out, e_k, e_max_walks, seed);
    }
    if (inspect->parsed()) {
        return cmd_inspect(i_ckpt, i_phi, i_theta, i_layer, i_top, i_bottom);
    }
    if (recommend->parsed()) {
        return cmd_recommend(r_data, r_ckpt, r_spectrum, r_user, r_k, r_max_walks, seed);
    }
    return 2;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const usage_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const data_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const numeric_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "unexpected error: " << e.what() << "\n";
        return 3;
    }
}
