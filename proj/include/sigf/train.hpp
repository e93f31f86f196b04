#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "sigf/eval.hpp"
#include "sigf/graph.hpp"
#include "sigf/interactions.hpp"
#include "sigf/model.hpp"
#include "sigf/rng.hpp"

namespace sigf {

struct TrainConfig {
    double alpha = 0.2;         // negative-edge weight in the combined Laplacian
    double beta = 0.2;          // loss weight on observed-negative rows
    double lr = 1e-2;
    double weight_decay = 1e-4;
    int epochs = 1000;
    int patience = 50;          // consecutive non-improving epochs tolerated
    int batch_size = 2048;
    std::uint64_t seed = 42;
    int d = 64;                 // embedding dimension
    int d_h = 64;               // spectral dimension
    int layers = 3;
    int path_length = 3;
    int max_walks = 0;          // 0 = one walk per neighbor, uncapped
    int k = 20;                 // metric cutoff
};

double sigmoid(double x);
double log_sigmoid(double x);

// Uniform draw from the items absent from interacted_sorted (ascending).
// Rejection sampling first; after 100 misses, an exact indexed pick over
// the complement.
std::int32_t sample_unobserved(Rng& rng, const std::vector<std::int32_t>& interacted_sorted,
                               std::int32_t m);

struct Gradients {
    RowMat embeddings;
    std::vector<double> theta_raw;
    std::vector<Eigen::VectorXd> phi;
};

// Training rows paired with their sampled unobserved items.
struct BatchRows {
    std::vector<Interaction> rows;
    std::vector<std::int32_t> negatives;
};

struct LossGrads {
    double loss_sum = 0.0;
    Gradients grads;
};

// Pairwise ranking loss, summed over rows. A positively signed row (u, i)
// with sampled unobserved j contributes -log sigma(y_ui - y_uj); a
// negatively signed row contributes +log sigma(beta * (y_ui - y_uj)), so
// beta scales how hard observed negatives are pushed below unobserved
// items and beta = 0 silences them.
double batch_loss(const RowMat& final_embeddings, std::int32_t n, const BatchRows& batch,
                  double beta);

// Full forward with cached attention, loss on the batch, and exact
// gradients for every parameter by reverse traversal of the layers.
LossGrads loss_and_gradients(const ModelParams& params, const SampleSet& set,
                             const std::vector<double>& pair_scores, std::int32_t n,
                             const BatchRows& batch, double beta);

// Reverse pass only, from a gradient on the final (layer-mean) embeddings.
Gradients backward(const ModelParams& params, const SampleSet& set,
                   const std::vector<double>& pair_scores, const ForwardCache& cache,
                   const RowMat& grad_final);

// Adam with decoupled weight decay:
//   p -= lr * (m_hat / (sqrt(v_hat) + eps) + weight_decay * p_old).
class AdamW {
public:
    AdamW(double lr, double weight_decay, double beta1 = 0.9, double beta2 = 0.999,
          double eps = 1e-8);

    void step(ModelParams& params, const Gradients& grads);

    std::int64_t steps() const { return t_; }

private:
    double lr_;
    double wd_;
    double beta1_;
    double beta2_;
    double eps_;
    std::int64_t t_ = 0;
    bool initialized_ = false;
    RowMat m_emb_, v_emb_;
    std::vector<double> m_theta_, v_theta_;
    std::vector<Eigen::VectorXd> m_phi_, v_phi_;
};

// Stops once the count of consecutive non-improving observations exceeds
// patience, so patience 0 stops at the first value that fails to beat the
// best. Improvement is strict.
class EarlyStopper {
public:
    explicit EarlyStopper(int patience);

    bool observe(double value);  // true if value improved on the best
    bool should_stop() const { return since_best_ > patience_; }
    double best() const { return best_; }

private:
    int patience_;
    int since_best_ = 0;
    double best_;
};

struct EpochStats {
    double mean_loss = 0.0;
    std::int64_t rows = 0;
    std::int64_t batches = 0;
};

// One pass over the training rows: resamples walks with seed
// cfg.seed + epoch, shuffles rows, and per batch runs the full forward,
// the ranking loss on the batch, the reverse pass, and one optimizer step.
EpochStats train_epoch(ModelParams& params, AdamW& opt, const SignedBipartiteGraph& graph,
                       const PathTypeTable& table, const SpectralBasis& basis,
                       const std::vector<Interaction>& train_rows,
                       const std::vector<std::vector<std::int32_t>>& user_train_items,
                       const TrainConfig& cfg, int epoch);

struct EpochLog {
    int epoch = 0;
    double mean_loss = 0.0;
    double val_recall = 0.0;
    double val_ndcg = 0.0;
    double seconds = 0.0;
};

struct FitResult {
    ModelParams params;       // parameters of the best validation epoch
    MetricReport val_best;
    MetricReport test;
    int best_epoch = 0;       // 1-based; 0 when no epoch ran
    int epochs_run = 0;
    std::vector<EpochLog> log;
};

// Validation (and the final test pass) scores every epoch on one fixed
// sample set drawn from this salt, so epoch metrics are comparable and a
// later evaluation with the same seed reproduces them.
inline constexpr std::uint64_t kEvalSampleSalt = 0xe7a15e7ULL;

// Full training driver: per-epoch walk resampling and optimization,
// validation after every epoch, best-parameter tracking, early stopping,
// and a final test evaluation with the best parameters. When log_stream is
// set, one tab-separated line per epoch is written:
// epoch, mean loss, validation recall, validation ndcg, seconds.
FitResult fit(const DatasetSplit& split, const SpectralBasis& basis, const TrainConfig& cfg,
              std::ostream* log_stream = nullptr);

struct CheckpointMeta {
    std::int32_t n = 0;
    std::int32_t m = 0;
    int d = 0;
    int layers = 0;
    int d_h = 0;
    int path_length = 0;
    double alpha = 0.0;
    double beta = 0.0;
    std::int32_t type_count = 0;
};

struct Checkpoint {
    CheckpointMeta meta;
    ModelParams params;
};

// Two text lines (magic, then the meta fields), then raw little-endian
// doubles: the embedding table row-major, theta_raw, and each layer's phi.
void write_checkpoint(const std::string& path, const Checkpoint& ckpt);
Checkpoint read_checkpoint(const std::string& path);

}  // namespace sigf
