#include <carc/model.hpp>

#include <algorithm>
#include <cassert>
#include <cmath>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

namespace carc {

namespace {

template <typename Scalar>
using MatrixT = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename Scalar>
using VectorT = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
Scalar gelu_value(Scalar x) {
    const Scalar inv_sqrt2 = Scalar(0.7071067811865475244);
    return Scalar(0.5) * x * (Scalar(1) + std::erf(x * inv_sqrt2));
}

template <typename Scalar>
Scalar gelu_slope(Scalar x) {
    const Scalar inv_sqrt2 = Scalar(0.7071067811865475244);
    const Scalar inv_sqrt_2pi = Scalar(0.3989422804014326779);
    Scalar cdf = Scalar(0.5) * (Scalar(1) + std::erf(x * inv_sqrt2));
    return cdf + x * inv_sqrt_2pi * std::exp(Scalar(-0.5) * x * x);
}

int role_slot(TokenRole role) {
    switch (role) {
        case TokenRole::study_in:
        case TokenRole::query_in:
            return 0;
        case TokenRole::study_out:
            return 1;
        case TokenRole::separator:
            return 2;
    }
    return 2;
}

template <typename Scalar>
void softmax_rows(MatrixT<Scalar>& m) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        Scalar peak = m.row(i).maxCoeff();
        m.row(i) = (m.row(i).array() - peak).exp().matrix();
        m.row(i) /= m.row(i).sum();
    }
}

template <typename Scalar, typename Row>
Scalar row_cross_entropy(const Row& row, int label) {
    Scalar peak = row.maxCoeff();
    Scalar log_sum = peak + std::log((row.array() - peak).exp().sum());
    return log_sum - row(label);
}

template <typename Scalar>
struct LnCache {
    MatrixT<Scalar> xhat;
    VectorT<Scalar> rstd;
    MatrixT<Scalar> out;
};

template <typename Scalar>
struct AttnCache {
    LnCache<Scalar> ln;
    MatrixT<Scalar> q, k, v, ctx;
    std::vector<MatrixT<Scalar>> probs;  // one per head
};

template <typename Scalar>
struct FfCache {
    LnCache<Scalar> ln;
    MatrixT<Scalar> pre, act;
};

template <typename Scalar>
struct Workspace {
    std::vector<AttnCache<Scalar>> enc_attn;
    std::vector<FfCache<Scalar>> enc_ff;
    LnCache<Scalar> enc_final;  // enc_final.out doubles as the decoder memory
    std::vector<AttnCache<Scalar>> dec_self, dec_cross;
    std::vector<FfCache<Scalar>> dec_ff;
    LnCache<Scalar> dec_final;
    MatrixT<Scalar> logits;
};

template <typename Scalar>
void ln_forward(const Transformer<Scalar>& model, const MatrixT<Scalar>& x,
                const std::string& g_name, const std::string& b_name, LnCache<Scalar>& cache) {
    const Scalar eps = Scalar(1e-5);
    const VectorT<Scalar>& p = model.parameters();
    VectorT<Scalar> mean = x.rowwise().mean();
    MatrixT<Scalar> centered = (x.array().colwise() - mean.array()).matrix();
    VectorT<Scalar> variance = centered.array().square().rowwise().mean().matrix();
    cache.rstd = (variance.array() + eps).rsqrt().matrix();
    cache.xhat = (centered.array().colwise() * cache.rstd.array()).matrix();
    cache.out = (cache.xhat.array().rowwise() * model.tensor(p, g_name).row(0).array()).matrix();
    cache.out.rowwise() += model.tensor(p, b_name).row(0);
}

template <typename Scalar>
MatrixT<Scalar> ln_backward(Transformer<Scalar>& model, const MatrixT<Scalar>& dout,
                            const std::string& g_name, const std::string& b_name,
                            const LnCache<Scalar>& cache) {
    const VectorT<Scalar>& p = model.parameters();
    VectorT<Scalar>& g = model.gradients();
    model.tensor(g, g_name).row(0) += (dout.array() * cache.xhat.array()).colwise().sum().matrix();
    model.tensor(g, b_name).row(0) += dout.colwise().sum();
    MatrixT<Scalar> dxhat =
        (dout.array().rowwise() * model.tensor(p, g_name).row(0).array()).matrix();
    VectorT<Scalar> mean_dxhat = dxhat.rowwise().mean();
    VectorT<Scalar> mean_dot = (dxhat.array() * cache.xhat.array()).rowwise().mean().matrix();
    MatrixT<Scalar> dx = (((dxhat.array().colwise() - mean_dxhat.array()) -
                           cache.xhat.array().colwise() * mean_dot.array())
                              .colwise() *
                          cache.rstd.array())
                             .matrix();
    return dx;
}

template <typename Scalar>
MatrixT<Scalar> attn_forward(const Transformer<Scalar>& model, const MatrixT<Scalar>& x,
                             std::type_identity_t<const MatrixT<Scalar>*> memory,
                             const std::string& prefix, bool causal, AttnCache<Scalar>& cache) {
    const ModelConfig& cfg = model.config();
    const VectorT<Scalar>& p = model.parameters();
    const int d = cfg.embed_dim;
    const int hd = d / cfg.heads;
    const Scalar scale = Scalar(1) / std::sqrt(Scalar(hd));

    ln_forward(model, x, prefix + ".ln_g", prefix + ".ln_b", cache.ln);
    const MatrixT<Scalar>& kv_in = memory ? *memory : cache.ln.out;
    cache.q.noalias() = cache.ln.out * model.tensor(p, prefix + ".wq");
    cache.q.rowwise() += model.tensor(p, prefix + ".bq").row(0);
    cache.k.noalias() = kv_in * model.tensor(p, prefix + ".wk");
    cache.k.rowwise() += model.tensor(p, prefix + ".bk").row(0);
    cache.v.noalias() = kv_in * model.tensor(p, prefix + ".wv");
    cache.v.rowwise() += model.tensor(p, prefix + ".bv").row(0);

    const Eigen::Index rows = cache.q.rows();
    cache.ctx.resize(rows, d);
    cache.probs.assign(size_t(cfg.heads), MatrixT<Scalar>());
    for (int h = 0; h < cfg.heads; ++h) {
        MatrixT<Scalar> scores =
            cache.q.middleCols(h * hd, hd) * cache.k.middleCols(h * hd, hd).transpose() * scale;
        if (causal)
            for (Eigen::Index i = 0; i < scores.rows(); ++i)
                for (Eigen::Index j = i + 1; j < scores.cols(); ++j) scores(i, j) = Scalar(-1e9);
        softmax_rows(scores);
        cache.probs[size_t(h)] = std::move(scores);
        cache.ctx.middleCols(h * hd, hd).noalias() =
            cache.probs[size_t(h)] * cache.v.middleCols(h * hd, hd);
    }
    MatrixT<Scalar> out = cache.ctx * model.tensor(p, prefix + ".wo");
    out.rowwise() += model.tensor(p, prefix + ".bo").row(0);
    return x + out;
}

template <typename Scalar>
MatrixT<Scalar> attn_backward(Transformer<Scalar>& model, const MatrixT<Scalar>& dnext,
                              std::type_identity_t<const MatrixT<Scalar>*> memory,
                              std::type_identity_t<MatrixT<Scalar>*> dmemory,
                              const std::string& prefix, const AttnCache<Scalar>& cache) {
    const ModelConfig& cfg = model.config();
    const VectorT<Scalar>& p = model.parameters();
    VectorT<Scalar>& g = model.gradients();
    const int d = cfg.embed_dim;
    const int hd = d / cfg.heads;
    const Scalar scale = Scalar(1) / std::sqrt(Scalar(hd));

    model.tensor(g, prefix + ".wo").noalias() += cache.ctx.transpose() * dnext;
    model.tensor(g, prefix + ".bo").row(0) += dnext.colwise().sum();
    MatrixT<Scalar> dctx = dnext * model.tensor(p, prefix + ".wo").transpose();

    MatrixT<Scalar> dq(cache.q.rows(), d), dk(cache.k.rows(), d), dv(cache.v.rows(), d);
    for (int h = 0; h < cfg.heads; ++h) {
        auto dctx_h = dctx.middleCols(h * hd, hd);
        const MatrixT<Scalar>& probs = cache.probs[size_t(h)];
        MatrixT<Scalar> dprobs = dctx_h * cache.v.middleCols(h * hd, hd).transpose();
        dv.middleCols(h * hd, hd).noalias() = probs.transpose() * dctx_h;
        VectorT<Scalar> row_dot = (dprobs.array() * probs.array()).rowwise().sum().matrix();
        MatrixT<Scalar> dscores =
            ((dprobs.array().colwise() - row_dot.array()) * probs.array()).matrix() * scale;
        dq.middleCols(h * hd, hd).noalias() = dscores * cache.k.middleCols(h * hd, hd);
        dk.middleCols(h * hd, hd).noalias() = dscores.transpose() * cache.q.middleCols(h * hd, hd);
    }
    const MatrixT<Scalar>& kv_in = memory ? *memory : cache.ln.out;
    model.tensor(g, prefix + ".wq").noalias() += cache.ln.out.transpose() * dq;
    model.tensor(g, prefix + ".bq").row(0) += dq.colwise().sum();
    model.tensor(g, prefix + ".wk").noalias() += kv_in.transpose() * dk;
    model.tensor(g, prefix + ".bk").row(0) += dk.colwise().sum();
    model.tensor(g, prefix + ".wv").noalias() += kv_in.transpose() * dv;
    model.tensor(g, prefix + ".bv").row(0) += dv.colwise().sum();

    MatrixT<Scalar> dnormed = dq * model.tensor(p, prefix + ".wq").transpose();
    MatrixT<Scalar> dkv = dk * model.tensor(p, prefix + ".wk").transpose() +
                          dv * model.tensor(p, prefix + ".wv").transpose();
    if (memory)
        *dmemory += dkv;
    else
        dnormed += dkv;
    MatrixT<Scalar> dres = ln_backward(model, dnormed, prefix + ".ln_g", prefix + ".ln_b", cache.ln);
    return dnext + dres;
}

template <typename Scalar>
MatrixT<Scalar> ff_forward(const Transformer<Scalar>& model, const MatrixT<Scalar>& x,
                           const std::string& prefix, FfCache<Scalar>& cache) {
    const VectorT<Scalar>& p = model.parameters();
    ln_forward(model, x, prefix + ".ln_g", prefix + ".ln_b", cache.ln);
    cache.pre.noalias() = cache.ln.out * model.tensor(p, prefix + ".w1");
    cache.pre.rowwise() += model.tensor(p, prefix + ".b1").row(0);
    cache.act = cache.pre.unaryExpr([](Scalar v) { return gelu_value(v); });
    MatrixT<Scalar> out = cache.act * model.tensor(p, prefix + ".w2");
    out.rowwise() += model.tensor(p, prefix + ".b2").row(0);
    return x + out;
}

template <typename Scalar>
MatrixT<Scalar> ff_backward(Transformer<Scalar>& model, const MatrixT<Scalar>& dnext,
                            const std::string& prefix, const FfCache<Scalar>& cache) {
    const VectorT<Scalar>& p = model.parameters();
    VectorT<Scalar>& g = model.gradients();
    model.tensor(g, prefix + ".w2").noalias() += cache.act.transpose() * dnext;
    model.tensor(g, prefix + ".b2").row(0) += dnext.colwise().sum();
    MatrixT<Scalar> dact = dnext * model.tensor(p, prefix + ".w2").transpose();
    MatrixT<Scalar> dpre =
        (dact.array() * cache.pre.unaryExpr([](Scalar v) { return gelu_slope(v); }).array())
            .matrix();
    model.tensor(g, prefix + ".w1").noalias() += cache.ln.out.transpose() * dpre;
    model.tensor(g, prefix + ".b1").row(0) += dpre.colwise().sum();
    MatrixT<Scalar> dnormed = dpre * model.tensor(p, prefix + ".w1").transpose();
    MatrixT<Scalar> dres = ln_backward(model, dnormed, prefix + ".ln_g", prefix + ".ln_b", cache.ln);
    return dnext + dres;
}

template <typename Scalar>
MatrixT<Scalar> embed_source(const Transformer<Scalar>& model,
                             const std::vector<SourceToken>& source) {
    const ModelConfig& cfg = model.config();
    const VectorT<Scalar>& p = model.parameters();
    auto token_embed = model.tensor(p, "enc_embed");
    auto pair_embed = model.tensor(p, "pair_embed");
    auto row_embed = model.tensor(p, "row_embed");
    auto col_embed = model.tensor(p, "col_embed");
    MatrixT<Scalar> x(Eigen::Index(source.size()), cfg.embed_dim);
    for (size_t i = 0; i < source.size(); ++i) {
        const SourceToken& t = source[i];
        assert(t.id >= 0 && t.id < cfg.vocab);
        assert(t.pair >= 0 && t.pair < cfg.max_pairs);
        x.row(Eigen::Index(i)) = token_embed.row(t.id) + pair_embed.row(t.pair);
        if (t.row >= 0) {
            assert(t.row < kPatchSide && t.col >= 0 && t.col < kPatchSide);
            x.row(Eigen::Index(i)) += row_embed.row(t.row) + col_embed.row(t.col);
        }
    }
    if (cfg.role_embeddings) {
        auto role_embed = model.tensor(p, "role_embed");
        for (size_t i = 0; i < source.size(); ++i)
            x.row(Eigen::Index(i)) += role_embed.row(role_slot(source[i].role));
    }
    return x;
}

template <typename Scalar>
MatrixT<Scalar> embed_target(const Transformer<Scalar>& model, const std::vector<int>& dec_in) {
    const ModelConfig& cfg = model.config();
    const VectorT<Scalar>& p = model.parameters();
    auto token_embed = model.tensor(p, cfg.tied_embeddings ? "enc_embed" : "dec_embed");
    auto pos_embed = model.tensor(p, "tpos_embed");
    assert(int(dec_in.size()) <= cfg.max_target - 1);
    MatrixT<Scalar> x(Eigen::Index(dec_in.size()), cfg.embed_dim);
    for (size_t i = 0; i < dec_in.size(); ++i) {
        assert(dec_in[i] >= 0 && dec_in[i] < cfg.vocab);
        x.row(Eigen::Index(i)) = token_embed.row(dec_in[i]) + pos_embed.row(Eigen::Index(i));
    }
    return x;
}

template <typename Scalar>
void run_encoder(const Transformer<Scalar>& model, const std::vector<SourceToken>& source,
                 Workspace<Scalar>& ws) {
    const ModelConfig& cfg = model.config();
    MatrixT<Scalar> x = embed_source(model, source);
    ws.enc_attn.resize(size_t(cfg.enc_layers));
    ws.enc_ff.resize(size_t(cfg.enc_layers));
    for (int layer = 0; layer < cfg.enc_layers; ++layer) {
        std::string prefix = "enc" + std::to_string(layer);
        x = attn_forward(model, x, nullptr, prefix + ".attn", false, ws.enc_attn[size_t(layer)]);
        x = ff_forward(model, x, prefix + ".ff", ws.enc_ff[size_t(layer)]);
    }
    ln_forward(model, x, "enc.final_g", "enc.final_b", ws.enc_final);
}

template <typename Scalar>
void run_decoder(const Transformer<Scalar>& model, const std::vector<int>& dec_in,
                 Workspace<Scalar>& ws) {
    const ModelConfig& cfg = model.config();
    MatrixT<Scalar> x = embed_target(model, dec_in);
    ws.dec_self.resize(size_t(cfg.dec_layers));
    ws.dec_cross.resize(size_t(cfg.dec_layers));
    ws.dec_ff.resize(size_t(cfg.dec_layers));
    for (int layer = 0; layer < cfg.dec_layers; ++layer) {
        std::string prefix = "dec" + std::to_string(layer);
        x = attn_forward(model, x, nullptr, prefix + ".self", true, ws.dec_self[size_t(layer)]);
        x = attn_forward(model, x, &ws.enc_final.out, prefix + ".cross", false,
                         ws.dec_cross[size_t(layer)]);
        x = ff_forward(model, x, prefix + ".ff", ws.dec_ff[size_t(layer)]);
    }
    ln_forward(model, x, "dec.final_g", "dec.final_b", ws.dec_final);
}

template <typename Scalar>
void compute_logits(const Transformer<Scalar>& model, Workspace<Scalar>& ws) {
    const VectorT<Scalar>& p = model.parameters();
    if (model.config().tied_embeddings)
        ws.logits.noalias() = ws.dec_final.out * model.tensor(p, "enc_embed").transpose();
    else
        ws.logits.noalias() = ws.dec_final.out * model.tensor(p, "out_w");
    ws.logits.rowwise() += model.tensor(p, "out_b").row(0);
}

template <typename Scalar>
void backward_pass(Transformer<Scalar>& model, const TokenSeq& item,
                   const std::vector<Scalar>& weights, Workspace<Scalar>& ws) {
    const ModelConfig& cfg = model.config();
    const VectorT<Scalar>& p = model.parameters();
    VectorT<Scalar>& g = model.gradients();

    MatrixT<Scalar> dlogits = ws.logits;
    softmax_rows(dlogits);
    assert(size_t(dlogits.rows()) == weights.size());
    for (Eigen::Index t = 0; t < dlogits.rows(); ++t) {
        dlogits.row(t) *= weights[size_t(t)];
        dlogits(t, item.target[size_t(t) + 1]) -= weights[size_t(t)];
    }
    model.tensor(g, "out_b").row(0) += dlogits.colwise().sum();
    MatrixT<Scalar> dx;
    if (cfg.tied_embeddings) {
        model.tensor(g, "enc_embed").noalias() += dlogits.transpose() * ws.dec_final.out;
        dx.noalias() = dlogits * model.tensor(p, "enc_embed");
    } else {
        model.tensor(g, "out_w").noalias() += ws.dec_final.out.transpose() * dlogits;
        dx.noalias() = dlogits * model.tensor(p, "out_w").transpose();
    }
    dx = ln_backward(model, dx, "dec.final_g", "dec.final_b", ws.dec_final);

    MatrixT<Scalar> dmemory = MatrixT<Scalar>::Zero(ws.enc_final.out.rows(), cfg.embed_dim);
    for (int layer = cfg.dec_layers - 1; layer >= 0; --layer) {
        std::string prefix = "dec" + std::to_string(layer);
        dx = ff_backward(model, dx, prefix + ".ff", ws.dec_ff[size_t(layer)]);
        dx = attn_backward(model, dx, &ws.enc_final.out, &dmemory, prefix + ".cross",
                           ws.dec_cross[size_t(layer)]);
        dx = attn_backward(model, dx, nullptr, nullptr, prefix + ".self",
                           ws.dec_self[size_t(layer)]);
    }
    auto dec_table = model.tensor(g, cfg.tied_embeddings ? "enc_embed" : "dec_embed");
    auto dec_pos = model.tensor(g, "tpos_embed");
    for (Eigen::Index i = 0; i < dx.rows(); ++i) {
        dec_table.row(item.target[size_t(i)]) += dx.row(i);
        dec_pos.row(i) += dx.row(i);
    }

    MatrixT<Scalar> de = ln_backward(model, dmemory, "enc.final_g", "enc.final_b", ws.enc_final);
    for (int layer = cfg.enc_layers - 1; layer >= 0; --layer) {
        std::string prefix = "enc" + std::to_string(layer);
        de = ff_backward(model, de, prefix + ".ff", ws.enc_ff[size_t(layer)]);
        de = attn_backward(model, de, nullptr, nullptr, prefix + ".attn",
                           ws.enc_attn[size_t(layer)]);
    }
    auto d_token = model.tensor(g, "enc_embed");
    auto d_pair = model.tensor(g, "pair_embed");
    auto d_row = model.tensor(g, "row_embed");
    auto d_col = model.tensor(g, "col_embed");
    for (size_t i = 0; i < item.source.size(); ++i) {
        const SourceToken& t = item.source[i];
        d_token.row(t.id) += de.row(Eigen::Index(i));
        d_pair.row(t.pair) += de.row(Eigen::Index(i));
        if (t.row >= 0) {
            d_row.row(t.row) += de.row(Eigen::Index(i));
            d_col.row(t.col) += de.row(Eigen::Index(i));
        }
    }
    if (cfg.role_embeddings) {
        auto d_role = model.tensor(g, "role_embed");
        for (size_t i = 0; i < item.source.size(); ++i)
            d_role.row(role_slot(item.source[i].role)) += de.row(Eigen::Index(i));
    }
}

}  // namespace

template <typename Scalar>
Scalar sequence_loss(
    const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>& logits,
    const std::vector<int>& labels, const std::vector<Scalar>& weights) {
    assert(size_t(logits.rows()) == labels.size() && labels.size() == weights.size());
    Scalar weighted = 0, weight = 0;
    for (size_t t = 0; t < labels.size(); ++t) {
        weighted += weights[t] * row_cross_entropy<Scalar>(logits.row(Eigen::Index(t)), labels[t]);
        weight += weights[t];
    }
    return weight > Scalar(0) ? weighted / weight : Scalar(0);
}

template <typename Scalar>
std::vector<Scalar> target_weights(const std::vector<int>& target, Scalar background_weight) {
    assert(!target.empty());
    std::vector<Scalar> weights;
    weights.reserve(target.size() - 1);
    for (size_t t = 1; t < target.size(); ++t)
        weights.push_back(target[t] == 0 ? background_weight : Scalar(1));
    return weights;
}

template <typename Scalar>
Transformer<Scalar>::Transformer(const ModelConfig& config) : config_(config) {
    assert(config_.embed_dim % config_.heads == 0);
    assert(config_.vocab > 0 && config_.enc_layers > 0 && config_.dec_layers > 0);
    register_tensors();
    int64_t total = 0;
    for (const TensorInfo& info : tensors_) total += int64_t(info.rows) * info.cols;
    params_ = Vector::Zero(total);
    grads_ = Vector::Zero(total);
    index_.reserve(tensors_.size());
    for (size_t i = 0; i < tensors_.size(); ++i) index_.emplace_back(tensors_[i].name, i);
    std::sort(index_.begin(), index_.end());
}

template <typename Scalar>
void Transformer<Scalar>::register_tensors() {
    const int d = config_.embed_dim;
    const int ff = config_.feedforward_dim;
    int64_t offset = 0;
    auto add = [&](const std::string& name, int rows, int cols) {
        tensors_.push_back({name, rows, cols, offset});
        offset += int64_t(rows) * cols;
    };
    add("enc_embed", config_.vocab, d);
    add("pair_embed", config_.max_pairs, d);
    add("row_embed", kPatchSide, d);
    add("col_embed", kPatchSide, d);
    if (config_.role_embeddings) add("role_embed", 3, d);
    if (!config_.tied_embeddings) add("dec_embed", config_.vocab, d);
    add("tpos_embed", config_.max_target - 1, d);
    auto add_attn = [&](const std::string& prefix) {
        add(prefix + ".ln_g", 1, d);
        add(prefix + ".ln_b", 1, d);
        for (const char* n : {"wq", "wk", "wv", "wo"}) add(prefix + "." + n, d, d);
        for (const char* n : {"bq", "bk", "bv", "bo"}) add(prefix + "." + n, 1, d);
    };
    auto add_ff = [&](const std::string& prefix) {
        add(prefix + ".ln_g", 1, d);
        add(prefix + ".ln_b", 1, d);
        add(prefix + ".w1", d, ff);
        add(prefix + ".b1", 1, ff);
        add(prefix + ".w2", ff, d);
        add(prefix + ".b2", 1, d);
    };
    for (int i = 0; i < config_.enc_layers; ++i) {
        std::string prefix = "enc" + std::to_string(i);
        add_attn(prefix + ".attn");
        add_ff(prefix + ".ff");
    }
    add("enc.final_g", 1, d);
    add("enc.final_b", 1, d);
    for (int i = 0; i < config_.dec_layers; ++i) {
        std::string prefix = "dec" + std::to_string(i);
        add_attn(prefix + ".self");
        add_attn(prefix + ".cross");
        add_ff(prefix + ".ff");
    }
    add("dec.final_g", 1, d);
    add("dec.final_b", 1, d);
    if (!config_.tied_embeddings) add("out_w", d, config_.vocab);
    add("out_b", 1, config_.vocab);
}

template <typename Scalar>
size_t Transformer<Scalar>::tensor_index(const std::string& name) const {
    auto it = std::lower_bound(
        index_.begin(), index_.end(), name,
        [](const std::pair<std::string, size_t>& entry, const std::string& n) {
            return entry.first < n;
        });
    if (it == index_.end() || it->first != name) throw std::logic_error("unknown tensor: " + name);
    return it->second;
}

template <typename Scalar>
Eigen::Map<typename Transformer<Scalar>::Matrix> Transformer<Scalar>::tensor(
    Vector& flat, const std::string& name) const {
    assert(flat.size() == params_.size());
    const TensorInfo& info = tensors_[tensor_index(name)];
    return {flat.data() + info.offset, info.rows, info.cols};
}

template <typename Scalar>
Eigen::Map<const typename Transformer<Scalar>::Matrix> Transformer<Scalar>::tensor(
    const Vector& flat, const std::string& name) const {
    assert(flat.size() == params_.size());
    const TensorInfo& info = tensors_[tensor_index(name)];
    return {flat.data() + info.offset, info.rows, info.cols};
}

template <typename Scalar>
void Transformer<Scalar>::init_weights(Rng& rng) {
    for (const TensorInfo& info : tensors_) {
        auto block = params_.segment(info.offset, int64_t(info.rows) * info.cols);
        std::string leaf = info.name.substr(info.name.find_last_of('.') + 1);
        bool gain = leaf == "ln_g" || leaf == "final_g";
        bool bias = leaf == "ln_b" || leaf == "final_b" || leaf == "out_b" ||
                    (leaf.size() == 2 && leaf[0] == 'b');
        if (gain)
            block.setOnes();
        else if (bias)
            block.setZero();
        else
            for (Eigen::Index i = 0; i < block.size(); ++i)
                block[i] = Scalar(rng.normal(0.0, 0.02));
    }
    grads_.setZero();
}

template <typename Scalar>
typename Transformer<Scalar>::Matrix Transformer<Scalar>::forward(const TokenSeq& item) const {
    assert(item.target.size() >= 2);
    Workspace<Scalar> ws;
    run_encoder(*this, item.source, ws);
    std::vector<int> dec_in(item.target.begin(), item.target.end() - 1);
    run_decoder(*this, dec_in, ws);
    compute_logits(*this, ws);
    softmax_rows(ws.logits);
    return std::move(ws.logits);
}

template <typename Scalar>
ItemLoss<Scalar> Transformer<Scalar>::evaluate(const TokenSeq& item,
                                               Scalar background_weight) const {
    assert(item.target.size() >= 2);
    Workspace<Scalar> ws;
    run_encoder(*this, item.source, ws);
    std::vector<int> dec_in(item.target.begin(), item.target.end() - 1);
    run_decoder(*this, dec_in, ws);
    compute_logits(*this, ws);
    std::vector<Scalar> weights = target_weights(item.target, background_weight);
    ItemLoss<Scalar> loss;
    for (size_t t = 0; t + 1 < item.target.size(); ++t) {
        loss.weighted += weights[t] * row_cross_entropy<Scalar>(ws.logits.row(Eigen::Index(t)),
                                                                item.target[t + 1]);
        loss.weight += weights[t];
    }
    return loss;
}

template <typename Scalar>
ItemLoss<Scalar> Transformer<Scalar>::accumulate(const TokenSeq& item, Scalar background_weight) {
    assert(item.target.size() >= 2);
    Workspace<Scalar> ws;
    run_encoder(*this, item.source, ws);
    std::vector<int> dec_in(item.target.begin(), item.target.end() - 1);
    run_decoder(*this, dec_in, ws);
    compute_logits(*this, ws);
    std::vector<Scalar> weights = target_weights(item.target, background_weight);
    ItemLoss<Scalar> loss;
    for (size_t t = 0; t + 1 < item.target.size(); ++t) {
        loss.weighted += weights[t] * row_cross_entropy<Scalar>(ws.logits.row(Eigen::Index(t)),
                                                                item.target[t + 1]);
        loss.weight += weights[t];
    }
    backward_pass(*this, item, weights, ws);
    return loss;
}

template <typename Scalar>
std::optional<Grid> Transformer<Scalar>::greedy_decode(
    const std::vector<SourceToken>& source) const {
    // Decoding interprets special ids, so it needs the full vocabulary.
    assert(config_.vocab == kVocabSize);
    Workspace<Scalar> ws;
    run_encoder(*this, source, ws);
    std::vector<int> dec = {kSos};
    std::vector<int> patches;
    while (true) {
        run_decoder(*this, dec, ws);
        compute_logits(*this, ws);
        Vector last = ws.logits.row(ws.logits.rows() - 1).transpose();
        Eigen::Index best = 0;
        last.maxCoeff(&best);
        if (best == kEos) break;
        if (best >= kPatchTokens) return std::nullopt;
        patches.push_back(int(best));
        if (int(patches.size()) == kPatchesPerGrid) break;
        dec.push_back(int(best));
    }
    if (int(patches.size()) != kPatchesPerGrid) return std::nullopt;
    return grid_from_tokens(patches);
}

template class Transformer<float>;
template class Transformer<double>;
template float sequence_loss<float>(
    const Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>&,
    const std::vector<int>&, const std::vector<float>&);
template double sequence_loss<double>(
    const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>&,
    const std::vector<int>&, const std::vector<double>&);
template std::vector<float> target_weights<float>(const std::vector<int>&, float);
template std::vector<double> target_weights<double>(const std::vector<int>&, double);

}  // namespace carc
