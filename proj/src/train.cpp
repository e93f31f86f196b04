#include "sigf/train.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>

#include "sigf/errors.hpp"

namespace sigf {

double sigmoid(double x) {
    if (x >= 0.0) {
        return 1.0 / (1.0 + std::exp(-x));
    }
    const double e = std::exp(x);
    return e / (1.0 + e);
}

double log_sigmoid(double x) {
    return x < 0.0 ? x - std::log1p(std::exp(x)) : -std::log1p(std::exp(-x));
}

std::int32_t sample_unobserved(Rng& rng, const std::vector<std::int32_t>& interacted_sorted,
                               std::int32_t m) {
    if (static_cast<std::int32_t>(interacted_sorted.size()) >= m) {
        throw data_error("a user has interacted with every item; cannot sample");
    }
    for (int attempt = 0; attempt < 100; ++attempt) {
        const auto j = static_cast<std::int32_t>(rng.below(static_cast<std::uint32_t>(m)));
        if (!std::binary_search(interacted_sorted.begin(), interacted_sorted.end(), j)) {
            return j;
        }
    }
    // Exact pick: the complement has m - |interacted| items; walk the gaps.
    auto r = static_cast<std::int32_t>(rng.below(
        static_cast<std::uint32_t>(m - static_cast<std::int32_t>(interacted_sorted.size()))));
    std::int32_t prev = 0;
    for (std::int32_t x : interacted_sorted) {
        const std::int32_t gap = x - prev;
        if (r < gap) return prev + r;
        r -= gap;
        prev = x + 1;
    }
    return prev + r;
}

double batch_loss(const RowMat& final_embeddings, std::int32_t n, const BatchRows& batch,
                  double beta) {
    if (batch.rows.size() != batch.negatives.size()) {
        throw usage_error("batch rows and negatives differ in length");
    }
    double loss = 0.0;
    for (std::size_t r = 0; r < batch.rows.size(); ++r) {
        const auto& row = batch.rows[r];
        const std::int32_t i_node = n + row.item;
        const std::int32_t j_node = n + batch.negatives[r];
        const double delta = final_embeddings.row(row.user).dot(
            final_embeddings.row(i_node) - final_embeddings.row(j_node));
        loss += row.sign > 0 ? -log_sigmoid(delta) : log_sigmoid(beta * delta);
    }
    return loss;
}

Gradients backward(const ModelParams& params, const SampleSet& set,
                   const std::vector<double>& pair_scores, const ForwardCache& cache,
                   const RowMat& grad_final) {
    const auto order = static_cast<std::int32_t>(set.offsets.size()) - 1;
    const int L = params.layers;
    const double inv_sqrt_d = 1.0 / std::sqrt(static_cast<double>(params.d));
    const double mean_w = 1.0 / static_cast<double>(L + 1);
    if (grad_final.rows() != order || grad_final.cols() != params.d) {
        throw usage_error("final-embedding gradient has wrong shape");
    }

    Gradients g;
    g.theta_raw.assign(static_cast<std::size_t>(L), 0.0);
    g.phi.reserve(static_cast<std::size_t>(L));
    for (const auto& phi_l : params.phi) g.phi.push_back(Eigen::VectorXd::Zero(phi_l.size()));

    RowMat G = mean_w * grad_final;  // gradient flowing into layer l's output
    std::vector<double> dc;
    for (int l = L; l >= 1; --l) {
        const RowMat& prev = cache.stack.layers[static_cast<std::size_t>(l - 1)];
        const auto& a1 = cache.a1[static_cast<std::size_t>(l - 1)];
        const auto& a2 = cache.a2[static_cast<std::size_t>(l - 1)];
        Eigen::VectorXd& dphi = g.phi[static_cast<std::size_t>(l - 1)];
        RowMat Gprev = RowMat::Zero(order, params.d);
        double dtheta = 0.0;

        // Scatter into shared rows; kept single-threaded so the result does
        // not depend on scheduling.
        for (std::int32_t v = 0; v < order; ++v) {
            const std::int64_t count = set.size(v);
            if (count == 0) {
                Gprev.row(v) += G.row(v);
                continue;
            }
            const std::int64_t base = set.offsets[static_cast<std::size_t>(v)];
            dc.resize(static_cast<std::size_t>(count));
            double dot1 = 0.0;
            double dot2 = 0.0;
            for (std::int64_t j = 0; j < count; ++j) {
                const std::size_t at = static_cast<std::size_t>(base + j);
                const double d_mix = 0.5 * G.row(v).dot(prev.row(set.targets[at]));
                dc[static_cast<std::size_t>(j)] = d_mix;  // dL/da1 == dL/da2 == d_mix
                dot1 += a1[at] * d_mix;
                dot2 += a2[at] * d_mix;
            }
            for (std::int64_t j = 0; j < count; ++j) {
                const std::size_t at = static_cast<std::size_t>(base + j);
                const std::int32_t w = set.targets[at];
                const double mix = 0.5 * (a1[at] + a2[at]);
                Gprev.row(w) += mix * G.row(v);
                const double dlogit1 = a1[at] * (dc[static_cast<std::size_t>(j)] - dot1);
                const double dlogit2 = a2[at] * (dc[static_cast<std::size_t>(j)] - dot2);
                Gprev.row(v) += dlogit1 * inv_sqrt_d * prev.row(w);
                Gprev.row(w) += dlogit1 * inv_sqrt_d * prev.row(v);
                dtheta += dlogit1 * pair_scores[at];
                dphi[set.types[at]] += dlogit2;
            }
        }

        // Chain through softplus to the raw parameter.
        g.theta_raw[static_cast<std::size_t>(l - 1)] =
            dtheta * sigmoid(params.theta_raw[static_cast<std::size_t>(l - 1)]);
        G = Gprev + mean_w * grad_final;
    }
    g.embeddings = std::move(G);
    return g;
}

LossGrads loss_and_gradients(const ModelParams& params, const SampleSet& set,
                             const std::vector<double>& pair_scores, std::int32_t n,
                             const BatchRows& batch, double beta) {
    if (batch.rows.size() != batch.negatives.size()) {
        throw usage_error("batch rows and negatives differ in length");
    }
    const ForwardCache cache = forward_cached(params, set, pair_scores);
    const RowMat& fin = cache.stack.final;
    const auto order = static_cast<std::int32_t>(set.offsets.size()) - 1;

    LossGrads out;
    RowMat grad_final = RowMat::Zero(order, params.d);
    for (std::size_t r = 0; r < batch.rows.size(); ++r) {
        const auto& row = batch.rows[r];
        const std::int32_t i_node = n + row.item;
        const std::int32_t j_node = n + batch.negatives[r];
        const double delta =
            fin.row(row.user).dot(fin.row(i_node) - fin.row(j_node));
        double coef;
        if (row.sign > 0) {
            out.loss_sum += -log_sigmoid(delta);
            coef = sigmoid(delta) - 1.0;
        } else {
            out.loss_sum += log_sigmoid(beta * delta);
            coef = beta * (1.0 - sigmoid(beta * delta));
        }
        grad_final.row(row.user) += coef * (fin.row(i_node) - fin.row(j_node));
        grad_final.row(i_node) += coef * fin.row(row.user);
        grad_final.row(j_node) -= coef * fin.row(row.user);
    }
    out.grads = backward(params, set, pair_scores, cache, grad_final);
    return out;
}

AdamW::AdamW(double lr, double weight_decay, double beta1, double beta2, double eps)
    : lr_(lr), wd_(weight_decay), beta1_(beta1), beta2_(beta2), eps_(eps) {
    if (lr < 0.0 || weight_decay < 0.0) throw usage_error("optimizer rates must be >= 0");
}

namespace {

inline void adam_update(double& p, double g, double& m, double& v, double lr, double wd,
                        double beta1, double beta2, double eps, double bc1, double bc2) {
    m = beta1 * m + (1.0 - beta1) * g;
    v = beta2 * v + (1.0 - beta2) * g * g;
    const double m_hat = m / bc1;
    const double v_hat = v / bc2;
    p -= lr * (m_hat / (std::sqrt(v_hat) + eps) + wd * p);
}

}  // namespace

void AdamW::step(ModelParams& params, const Gradients& grads) {
    if (!initialized_) {
        m_emb_ = RowMat::Zero(params.embeddings.rows(), params.embeddings.cols());
        v_emb_ = m_emb_;
        m_theta_.assign(params.theta_raw.size(), 0.0);
        v_theta_.assign(params.theta_raw.size(), 0.0);
        for (const auto& phi_l : params.phi) {
            m_phi_.push_back(Eigen::VectorXd::Zero(phi_l.size()));
            v_phi_.push_back(Eigen::VectorXd::Zero(phi_l.size()));
        }
        initialized_ = true;
    }
    if (grads.embeddings.rows() != params.embeddings.rows() ||
        grads.theta_raw.size() != params.theta_raw.size() ||
        grads.phi.size() != params.phi.size()) {
        throw usage_error("gradient shapes do not match the parameters");
    }

    ++t_;
    const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));

    for (Eigen::Index r = 0; r < params.embeddings.rows(); ++r) {
        for (Eigen::Index c = 0; c < params.embeddings.cols(); ++c) {
            adam_update(params.embeddings(r, c), grads.embeddings(r, c), m_emb_(r, c),
                        v_emb_(r, c), lr_, wd_, beta1_, beta2_, eps_, bc1, bc2);
        }
    }
    for (std::size_t i = 0; i < params.theta_raw.size(); ++i) {
        adam_update(params.theta_raw[i], grads.theta_raw[i], m_theta_[i], v_theta_[i], lr_,
                    wd_, beta1_, beta2_, eps_, bc1, bc2);
    }
    for (std::size_t l = 0; l < params.phi.size(); ++l) {
        for (Eigen::Index i = 0; i < params.phi[l].size(); ++i) {
            adam_update(params.phi[l][i], grads.phi[l][i], m_phi_[l][i], v_phi_[l][i], lr_,
                        wd_, beta1_, beta2_, eps_, bc1, bc2);
        }
    }
}

EarlyStopper::EarlyStopper(int patience)
    : patience_(patience), best_(-std::numeric_limits<double>::infinity()) {
    if (patience < 0) throw usage_error("patience must be >= 0");
}

bool EarlyStopper::observe(double value) {
    if (value > best_) {
        best_ = value;
        since_best_ = 0;
        return true;
    }
    ++since_best_;
    return false;
}

EpochStats train_epoch(ModelParams& params, AdamW& opt, const SignedBipartiteGraph& graph,
                       const PathTypeTable& table, const SpectralBasis& basis,
                       const std::vector<Interaction>& train_rows,
                       const std::vector<std::vector<std::int32_t>>& user_train_items,
                       const TrainConfig& cfg, int epoch) {
    if (cfg.batch_size < 1) throw usage_error("batch size must be positive");
    if (train_rows.empty()) throw data_error("no training rows");

    const SampleSet set = sample_neighborhoods(graph, table, cfg.max_walks,
                                               cfg.seed + static_cast<std::uint64_t>(epoch));
    const std::vector<double> scores = pair_score_cache(basis, set);

    std::vector<std::int64_t> perm(train_rows.size());
    std::iota(perm.begin(), perm.end(), std::int64_t{0});
    Rng shuffle_rng(Rng::mix(cfg.seed, Rng::mix(static_cast<std::uint64_t>(epoch), 0x0d3ULL)));
    shuffle(perm, shuffle_rng);
    Rng neg_rng(Rng::mix(cfg.seed, Rng::mix(static_cast<std::uint64_t>(epoch), 0x9e6ULL)));

    EpochStats stats;
    const auto n = graph.n();
    const auto m = graph.m();
    double loss_total = 0.0;

    for (std::size_t begin = 0; begin < perm.size();
         begin += static_cast<std::size_t>(cfg.batch_size)) {
        const std::size_t end =
            std::min(perm.size(), begin + static_cast<std::size_t>(cfg.batch_size));
        BatchRows batch;
        batch.rows.reserve(end - begin);
        batch.negatives.reserve(end - begin);
        for (std::size_t i = begin; i < end; ++i) {
            const auto& row = train_rows[static_cast<std::size_t>(perm[i])];
            batch.rows.push_back(row);
            batch.negatives.push_back(sample_unobserved(
                neg_rng, user_train_items[static_cast<std::size_t>(row.user)], m));
        }

        LossGrads lg = loss_and_gradients(params, set, scores, n, batch, cfg.beta);
        if (!std::isfinite(lg.loss_sum) || !lg.grads.embeddings.allFinite()) {
            std::ostringstream os;
            os << "non-finite loss or gradient in epoch " << epoch << ", batch "
               << stats.batches;
            throw numeric_error(os.str());
        }
        opt.step(params, lg.grads);

        loss_total += lg.loss_sum;
        stats.rows += static_cast<std::int64_t>(end - begin);
        ++stats.batches;
    }
    stats.mean_loss = loss_total / static_cast<double>(stats.rows);
    return stats;
}

FitResult fit(const DatasetSplit& split, const SpectralBasis& basis, const TrainConfig& cfg,
              std::ostream* log_stream) {
    const SignedBipartiteGraph graph =
        SignedBipartiteGraph::build(split.train, split.n, split.m);
    if (basis.node_coords.rows() != graph.order()) {
        throw usage_error("spectral basis does not match the dataset");
    }
    const PathTypeTable table(cfg.path_length);

    std::vector<std::vector<std::int32_t>> user_train_items(
        static_cast<std::size_t>(split.n));
    for (const auto& r : split.train) {
        user_train_items[static_cast<std::size_t>(r.user)].push_back(r.item);
    }
    for (auto& items : user_train_items) std::sort(items.begin(), items.end());

    ModelParams params = ModelParams::init(graph.order(), cfg.d, cfg.layers,
                                           table.type_count(), cfg.seed);
    AdamW opt(cfg.lr, cfg.weight_decay);
    EarlyStopper stopper(cfg.patience);

    // One fixed sample set scores every epoch, so validation numbers track
    // parameter movement rather than walk noise.
    const SampleSet eval_set = sample_neighborhoods(graph, table, cfg.max_walks,
                                                    Rng::mix(cfg.seed, kEvalSampleSalt));
    const std::vector<double> eval_scores = pair_score_cache(basis, eval_set);

    FitResult result;
    result.params = params;

    for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
        const auto t0 = std::chrono::steady_clock::now();
        const EpochStats stats = train_epoch(params, opt, graph, table, basis, split.train,
                                             user_train_items, cfg, epoch);
        const EmbeddingStack stack = forward(params, eval_set, eval_scores);
        const MetricReport val =
            evaluate(stack.final, split, cfg.k, EvalTarget::Validation);
        const double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

        EpochLog row{epoch, stats.mean_loss, val.recall, val.ndcg, seconds};
        result.log.push_back(row);
        result.epochs_run = epoch;
        if (log_stream) {
            char buf[160];
            std::snprintf(buf, sizeof(buf), "%d\t%.10g\t%.10g\t%.10g\t%.3f", epoch,
                          stats.mean_loss, val.recall, val.ndcg, seconds);
            (*log_stream) << buf << '\n' << std::flush;
        }

        if (stopper.observe(val.recall)) {
            result.params = params;
            result.val_best = val;
            result.best_epoch = epoch;
        }
        if (stopper.should_stop()) break;
    }

    const EmbeddingStack best_stack = forward(result.params, eval_set, eval_scores);
    if (result.best_epoch == 0) {
        result.val_best = evaluate(best_stack.final, split, cfg.k, EvalTarget::Validation);
    }
    result.test = evaluate(best_stack.final, split, cfg.k, EvalTarget::Test);
    return result;
}

void write_checkpoint(const std::string& path, const Checkpoint& ckpt) {
    const ModelParams& p = ckpt.params;
    const CheckpointMeta& meta = ckpt.meta;
    if (static_cast<std::int64_t>(meta.n) + meta.m != p.embeddings.rows() ||
        meta.d != p.d || meta.layers != p.layers ||
        static_cast<std::size_t>(meta.layers) != p.phi.size()) {
        throw usage_error("checkpoint metadata does not match the parameters");
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw data_error("cannot open checkpoint for writing: " + path);

    char buf[256];
    out << "SIGF 1\n";
    std::snprintf(buf, sizeof(buf), "%d %d %d %d %d %d %.17g %.17g %d\n", meta.n, meta.m,
                  meta.d, meta.layers, meta.d_h, meta.path_length, meta.alpha, meta.beta,
                  meta.type_count);
    out << buf;
    out.write(reinterpret_cast<const char*>(p.embeddings.data()),
              static_cast<std::streamsize>(sizeof(double)) * p.embeddings.size());
    out.write(reinterpret_cast<const char*>(p.theta_raw.data()),
              static_cast<std::streamsize>(sizeof(double)) *
                  static_cast<std::streamsize>(p.theta_raw.size()));
    for (const auto& phi_l : p.phi) {
        out.write(reinterpret_cast<const char*>(phi_l.data()),
                  static_cast<std::streamsize>(sizeof(double)) * phi_l.size());
    }
    if (!out) throw data_error("failed writing checkpoint: " + path);
}

Checkpoint read_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw data_error("cannot open checkpoint: " + path);

    std::string line;
    if (!std::getline(in, line) || line != "SIGF 1") {
        throw data_error("not a checkpoint file: " + path);
    }
    if (!std::getline(in, line)) throw data_error("checkpoint missing metadata: " + path);
    std::istringstream meta_line(line);
    Checkpoint ckpt;
    CheckpointMeta& meta = ckpt.meta;
    if (!(meta_line >> meta.n >> meta.m >> meta.d >> meta.layers >> meta.d_h >>
          meta.path_length >> meta.alpha >> meta.beta >> meta.type_count)) {
        throw data_error("malformed checkpoint metadata: " + path);
    }
    if (meta.n < 1 || meta.m < 1 || meta.d < 1 || meta.layers < 1 || meta.type_count < 1) {
        throw data_error("checkpoint metadata out of range: " + path);
    }

    ModelParams& p = ckpt.params;
    p.d = meta.d;
    p.layers = meta.layers;
    p.embeddings.resize(static_cast<std::int64_t>(meta.n) + meta.m, meta.d);
    p.theta_raw.assign(static_cast<std::size_t>(meta.layers), 0.0);
    p.phi.assign(static_cast<std::size_t>(meta.layers),
                 Eigen::VectorXd::Zero(meta.type_count));

    auto read_block = [&](char* dst, std::streamsize bytes, const char* what) {
        in.read(dst, bytes);
        if (in.gcount() != bytes) {
            throw data_error(std::string("checkpoint truncated in ") + what + ": " + path);
        }
    };
    read_block(reinterpret_cast<char*>(p.embeddings.data()),
               static_cast<std::streamsize>(sizeof(double)) * p.embeddings.size(),
               "embeddings");
    read_block(reinterpret_cast<char*>(p.theta_raw.data()),
               static_cast<std::streamsize>(sizeof(double)) *
                   static_cast<std::streamsize>(p.theta_raw.size()),
               "layer weights");
    for (auto& phi_l : p.phi) {
        read_block(reinterpret_cast<char*>(phi_l.data()),
                   static_cast<std::streamsize>(sizeof(double)) * phi_l.size(),
                   "path biases");
    }
    return ckpt;
}

}  // namespace sigf
