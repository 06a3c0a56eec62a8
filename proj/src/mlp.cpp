#include <algorithm>
#include <cmath>

#include "crimegrid/errors.hpp"
#include "crimegrid/learn.hpp"
#include "crimegrid/metrics.hpp"
#include "crimegrid/rng.hpp"

namespace crimegrid::learn {

namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

}  // namespace

MlpModel::MlpModel(std::vector<GroupSpec> groups, std::size_t n_cols, const MlpParams& params,
                   std::uint64_t seed)
    : params_(params), groups_(std::move(groups)), n_cols_(n_cols) {
    if (groups_.empty()) throw DataError("mlp: no feature groups");
    for (const auto& g : groups_)
        if (g.cols.empty())
            throw DataError(std::string("mlp: empty feature group '") + g.tag + "'");
    if (params_.encoder_width < 1 || params_.joint1 < 1 || params_.joint2 < 1)
        throw DataError("mlp: layer widths must be positive");

    mean_.assign(n_cols_, 0.0);
    sd_.assign(n_cols_, 1.0);

    const std::size_t he = static_cast<std::size_t>(params_.encoder_width);
    const std::size_t j1 = static_cast<std::size_t>(params_.joint1);
    const std::size_t j2 = static_cast<std::size_t>(params_.joint2);
    concat_size_ = groups_.size() * he;

    std::size_t offset = 0;
    for (const auto& g : groups_) {
        enc_w_off_.push_back(offset);
        offset += g.cols.size() * he;
        enc_b_off_.push_back(offset);
        offset += he;
    }
    w1_off_ = offset;
    offset += concat_size_ * j1;
    b1_off_ = offset;
    offset += j1;
    w2_off_ = offset;
    offset += j1 * j2;
    b2_off_ = offset;
    offset += j2;
    w3_off_ = offset;
    offset += j2;
    b3_off_ = offset;
    offset += 1;
    theta_.assign(offset, 0.0);
    scratch_size_ = concat_size_ + j1 + j2 + 1;

    // Glorot-style uniform init per layer
    Rng rng(derive_seed(seed, {0x313aull}));
    auto init_layer = [&](std::size_t w_off, std::size_t fan_in, std::size_t fan_out) {
        double r = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
        for (std::size_t i = 0; i < fan_in * fan_out; ++i)
            theta_[w_off + i] = rng.uniform(-r, r);
    };
    for (std::size_t g = 0; g < groups_.size(); ++g)
        init_layer(enc_w_off_[g], groups_[g].cols.size(), he);
    init_layer(w1_off_, concat_size_, j1);
    init_layer(w2_off_, j1, j2);
    init_layer(w3_off_, j2, 1);
}

void MlpModel::set_standardization(std::vector<double> mean, std::vector<double> sd) {
    if (mean.size() != n_cols_ || sd.size() != n_cols_)
        throw DataError("mlp: standardization size mismatch");
    mean_ = std::move(mean);
    sd_ = std::move(sd);
    for (double& s : sd_)
        if (s <= 0.0) s = 1.0;
}

// scratch layout: [0, C) encoder concat, [C, C+J1) h1, [C+J1, C+J1+J2) h2, last = p
void MlpModel::forward(const double* row, std::vector<double>& scratch) const {
    const std::size_t he = static_cast<std::size_t>(params_.encoder_width);
    const std::size_t j1 = static_cast<std::size_t>(params_.joint1);
    const std::size_t j2 = static_cast<std::size_t>(params_.joint2);
    scratch.assign(scratch_size_, 0.0);
    double* h0 = scratch.data();
    double* h1 = h0 + concat_size_;
    double* h2 = h1 + j1;
    double* out = h2 + j2;

    for (std::size_t g = 0; g < groups_.size(); ++g) {
        const auto& cols = groups_[g].cols;
        double* a = h0 + g * he;
        const double* w = theta_.data() + enc_w_off_[g];
        const double* b = theta_.data() + enc_b_off_[g];
        for (std::size_t j = 0; j < he; ++j) a[j] = b[j];
        for (std::size_t i = 0; i < cols.size(); ++i) {
            double x = (row[cols[i]] - mean_[cols[i]]) / sd_[cols[i]];
            const double* wi = w + i * he;
            for (std::size_t j = 0; j < he; ++j) a[j] += x * wi[j];
        }
        for (std::size_t j = 0; j < he; ++j) a[j] = sigmoid(a[j]);
    }

    const double* w1 = theta_.data() + w1_off_;
    for (std::size_t j = 0; j < j1; ++j) h1[j] = theta_[b1_off_ + j];
    for (std::size_t i = 0; i < concat_size_; ++i) {
        const double* wi = w1 + i * j1;
        for (std::size_t j = 0; j < j1; ++j) h1[j] += h0[i] * wi[j];
    }
    for (std::size_t j = 0; j < j1; ++j) h1[j] = sigmoid(h1[j]);

    const double* w2 = theta_.data() + w2_off_;
    for (std::size_t j = 0; j < j2; ++j) h2[j] = theta_[b2_off_ + j];
    for (std::size_t i = 0; i < j1; ++i) {
        const double* wi = w2 + i * j2;
        for (std::size_t j = 0; j < j2; ++j) h2[j] += h1[i] * wi[j];
    }
    for (std::size_t j = 0; j < j2; ++j) h2[j] = sigmoid(h2[j]);

    double z = theta_[b3_off_];
    const double* w3 = theta_.data() + w3_off_;
    for (std::size_t j = 0; j < j2; ++j) z += h2[j] * w3[j];
    *out = sigmoid(z);
}

double MlpModel::predict(const double* row) const {
    std::vector<double> scratch;
    forward(row, scratch);
    return scratch.back();
}

std::vector<double> MlpModel::predict_proba(DataView X) const {
    std::vector<double> out(X.n_rows);
    std::vector<double> scratch;
    for (std::size_t i = 0; i < X.n_rows; ++i) {
        forward(X.row(i), scratch);
        out[i] = scratch.back();
    }
    return out;
}

double MlpModel::loss_and_grad(DataView X, std::span<const std::uint8_t> y,
                               std::vector<double>* grad) const {
    const std::size_t he = static_cast<std::size_t>(params_.encoder_width);
    const std::size_t j1 = static_cast<std::size_t>(params_.joint1);
    const std::size_t j2 = static_cast<std::size_t>(params_.joint2);
    const double inv_n = 1.0 / static_cast<double>(X.n_rows);
    if (grad) grad->assign(theta_.size(), 0.0);

    std::vector<double> scratch;
    std::vector<double> d0(concat_size_), d1(j1), d2(j2);
    double loss = 0.0;
    for (std::size_t n = 0; n < X.n_rows; ++n) {
        const double* row = X.row(n);
        forward(row, scratch);
        const double* h0 = scratch.data();
        const double* h1 = h0 + concat_size_;
        const double* h2 = h1 + j1;
        double p = scratch.back();
        double target = static_cast<double>(y[n]);
        double pc = std::clamp(p, 1e-12, 1.0 - 1e-12);
        loss -= (target * std::log(pc) + (1.0 - target) * std::log(1.0 - pc)) * inv_n;
        if (!grad) continue;

        // dL/dz_out for sigmoid + BCE collapses to (p - y)
        double dz = (p - target) * inv_n;
        double* g = grad->data();
        g[b3_off_] += dz;
        const double* w3 = theta_.data() + w3_off_;
        for (std::size_t j = 0; j < j2; ++j) {
            g[w3_off_ + j] += dz * h2[j];
            d2[j] = dz * w3[j] * h2[j] * (1.0 - h2[j]);
        }

        const double* w2 = theta_.data() + w2_off_;
        for (std::size_t i = 0; i < j1; ++i) {
            double acc = 0.0;
            const double* wi = w2 + i * j2;
            double* gw = g + w2_off_ + i * j2;
            for (std::size_t j = 0; j < j2; ++j) {
                gw[j] += h1[i] * d2[j];
                acc += wi[j] * d2[j];
            }
            d1[i] = acc * h1[i] * (1.0 - h1[i]);
        }
        for (std::size_t j = 0; j < j2; ++j) g[b2_off_ + j] += d2[j];

        const double* w1 = theta_.data() + w1_off_;
        for (std::size_t i = 0; i < concat_size_; ++i) {
            double acc = 0.0;
            const double* wi = w1 + i * j1;
            double* gw = g + w1_off_ + i * j1;
            for (std::size_t j = 0; j < j1; ++j) {
                gw[j] += h0[i] * d1[j];
                acc += wi[j] * d1[j];
            }
            d0[i] = acc * h0[i] * (1.0 - h0[i]);
        }
        for (std::size_t j = 0; j < j1; ++j) g[b1_off_ + j] += d1[j];

        for (std::size_t gi = 0; gi < groups_.size(); ++gi) {
            const auto& cols = groups_[gi].cols;
            const double* dg = d0.data() + gi * he;
            double* gw = g + enc_w_off_[gi];
            double* gb = g + enc_b_off_[gi];
            for (std::size_t i = 0; i < cols.size(); ++i) {
                double x = (row[cols[i]] - mean_[cols[i]]) / sd_[cols[i]];
                double* gwi = gw + i * he;
                for (std::size_t j = 0; j < he; ++j) gwi[j] += x * dg[j];
            }
            for (std::size_t j = 0; j < he; ++j) gb[j] += dg[j];
        }
    }
    return loss;
}

void MlpModel::sgd_epoch(DataView X, std::span<const std::uint8_t> y, std::uint64_t epoch_seed,
                         std::vector<double>& velocity) {
    if (velocity.size() != theta_.size()) velocity.assign(theta_.size(), 0.0);
    std::vector<std::uint32_t> order(X.n_rows);
    for (std::size_t i = 0; i < X.n_rows; ++i) order[i] = static_cast<std::uint32_t>(i);
    Rng rng(epoch_seed);
    rng.shuffle(order);

    const std::size_t batch = std::max(1, params_.batch_size);
    std::vector<double> batch_values;
    std::vector<std::uint8_t> batch_labels;
    std::vector<double> grad;
    for (std::size_t start = 0; start < X.n_rows; start += batch) {
        std::size_t stop = std::min(X.n_rows, start + batch);
        std::size_t bn = stop - start;
        batch_values.resize(bn * X.n_cols);
        batch_labels.resize(bn);
        for (std::size_t i = 0; i < bn; ++i) {
            const double* src = X.row(order[start + i]);
            std::copy(src, src + X.n_cols, batch_values.data() + i * X.n_cols);
            batch_labels[i] = y[order[start + i]];
        }
        DataView bv{batch_values.data(), bn, X.n_cols};
        loss_and_grad(bv, batch_labels, &grad);
        for (std::size_t k = 0; k < theta_.size(); ++k) {
            velocity[k] = params_.momentum * velocity[k] - params_.learning_rate * grad[k];
            theta_[k] += velocity[k];
        }
    }
}

std::vector<MlpModel::LayerSpan> MlpModel::layer_spans() const {
    std::vector<LayerSpan> spans;
    const std::size_t he = static_cast<std::size_t>(params_.encoder_width);
    for (std::size_t g = 0; g < groups_.size(); ++g) {
        std::string tag(1, groups_[g].tag);
        spans.push_back({"encoder_w_" + tag, enc_w_off_[g], groups_[g].cols.size() * he});
        spans.push_back({"encoder_b_" + tag, enc_b_off_[g], he});
    }
    const std::size_t j1 = static_cast<std::size_t>(params_.joint1);
    const std::size_t j2 = static_cast<std::size_t>(params_.joint2);
    spans.push_back({"joint1_w", w1_off_, concat_size_ * j1});
    spans.push_back({"joint1_b", b1_off_, j1});
    spans.push_back({"joint2_w", w2_off_, j1 * j2});
    spans.push_back({"joint2_b", b2_off_, j2});
    spans.push_back({"output_w", w3_off_, j2});
    spans.push_back({"output_b", b3_off_, 1});
    return spans;
}

namespace {

std::vector<GroupSpec> groups_from_tags(const dataset::FeatureMatrix& m) {
    std::vector<GroupSpec> groups;
    for (char tag : {'R', 'D', 'S', 'F', 'P'}) {
        GroupSpec g;
        g.tag = tag;
        for (std::size_t c = 0; c < m.n_cols(); ++c)
            if (features::group_letter(m.tags[c]) == tag)
                g.cols.push_back(static_cast<std::uint32_t>(c));
        if (!g.cols.empty()) groups.push_back(std::move(g));
    }
    return groups;
}

EpochMetrics test_metrics(int epoch, std::span<const double> scores,
                          std::span<const std::uint8_t> labels) {
    EpochMetrics em;
    em.epoch = epoch;
    std::vector<std::uint8_t> preds(scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i) preds[i] = scores[i] >= 0.5 ? 1 : 0;
    auto cm = eval::confusion(labels, preds);
    auto m = eval::metrics(cm);
    em.accuracy = m.accuracy;
    em.precision = m.precision;
    em.recall = m.recall;
    em.f_score = m.f_score;
    bool has_pos = false, has_neg = false;
    for (std::uint8_t v : labels) (v ? has_pos : has_neg) = true;
    em.auc = (has_pos && has_neg) ? eval::auc(labels, scores) : 0.5;
    return em;
}

}  // namespace

MlpFitResult fit_mlp(const dataset::FeatureMatrix& train, const MlpParams& params,
                     std::uint64_t seed, const dataset::FeatureMatrix& test) {
    if (train.n_rows == 0) throw DataError("fit_mlp: no training rows");
    if (train.n_cols() != test.n_cols()) throw DataError("fit_mlp: train/test column mismatch");

    MlpFitResult result;
    result.model = MlpModel(groups_from_tags(train), train.n_cols(), params, seed);

    // column standardization from the training split
    std::vector<double> mean(train.n_cols(), 0.0), sd(train.n_cols(), 0.0);
    for (std::size_t r = 0; r < train.n_rows; ++r) {
        const double* row = train.row(r);
        for (std::size_t c = 0; c < train.n_cols(); ++c) mean[c] += row[c];
    }
    for (double& v : mean) v /= static_cast<double>(train.n_rows);
    for (std::size_t r = 0; r < train.n_rows; ++r) {
        const double* row = train.row(r);
        for (std::size_t c = 0; c < train.n_cols(); ++c) {
            double d = row[c] - mean[c];
            sd[c] += d * d;
        }
    }
    for (double& v : sd) v = std::sqrt(v / static_cast<double>(train.n_rows));
    result.model.set_standardization(mean, sd);

    DataView train_view = DataView::of(train);
    DataView test_view = DataView::of(test);
    std::vector<double> velocity;
    double best_accuracy = -1.0;
    std::vector<double> best_theta = result.model.parameters();
    for (int epoch = 0; epoch < params.epochs; ++epoch) {
        result.model.sgd_epoch(train_view, train.labels, derive_seed(seed, {0xe90cull, static_cast<std::uint64_t>(epoch)}),
                               velocity);
        auto scores = result.model.predict_proba(test_view);
        EpochMetrics em = test_metrics(epoch, scores, test.labels);
        result.trace.push_back(em);
        if (em.accuracy > best_accuracy) {
            best_accuracy = em.accuracy;
            best_theta = result.model.parameters();
            result.best_epoch = epoch;
        }
    }
    result.model.parameters() = best_theta;
    return result;
}

void mlp_from_json_parts(MlpModel& model, std::vector<GroupSpec> groups, std::size_t n_cols,
                         MlpParams params, std::vector<double> mean, std::vector<double> sd,
                         std::vector<double> theta) {
    model = MlpModel(std::move(groups), n_cols, params, 0);
    model.set_standardization(std::move(mean), std::move(sd));
    if (theta.size() != model.parameters().size())
        throw DataError("mlp: serialized parameter size mismatch");
    model.parameters() = std::move(theta);
}

}  // namespace crimegrid::learn
