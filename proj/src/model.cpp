#include "itct/model.hpp"

#include <zlib.h>

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

#include "json.hpp"

static_assert(std::endian::native == std::endian::little, "model format is little-endian");

namespace itct {

void ModelConfig::validate() const {
    if (embedding_dim < 2) throw std::invalid_argument("model: embedding_dim must be >= 2");
    if (n_heads < 1 || embedding_dim % n_heads != 0)
        throw std::invalid_argument("model: embedding_dim " + std::to_string(embedding_dim) +
                                    " not divisible by n_heads " + std::to_string(n_heads));
    if (n_blocks < 0) throw std::invalid_argument("model: n_blocks must be >= 0");
    if (m < 1) throw std::invalid_argument("model: at least one categorical column is required (m >= 1)");
    if (c < 0) throw std::invalid_argument("model: c must be >= 0");
    if (static_cast<int>(vocab_sizes.size()) != m)
        throw std::invalid_argument("model: vocab_sizes has " + std::to_string(vocab_sizes.size()) +
                                    " entries, expected m=" + std::to_string(m));
    for (int32_t v : vocab_sizes)
        if (v < 1) throw std::invalid_argument("model: vocabulary sizes must be >= 1");
    if (mlp_hidden_factors.empty()) throw std::invalid_argument("model: mlp_hidden_factors must be non-empty");
    for (double f : mlp_hidden_factors)
        if (f <= 0.0) throw std::invalid_argument("model: mlp_hidden_factors must be positive");
    if (dropout < 0.0 || dropout >= 1.0) throw std::invalid_argument("model: dropout must be in [0, 1)");
    for (int w : head_widths())
        if (w < 1) throw std::invalid_argument("model: an MLP hidden width rounded down to zero");
}

std::vector<int> ModelConfig::head_widths() const {
    std::vector<int> widths;
    for (double f : mlp_hidden_factors)
        widths.push_back(static_cast<int>(std::floor(f * static_cast<double>(fused_width()))));
    return widths;
}

namespace {

template <class T>
void glorot_init(Mat<T>& w, Rng& rng) {
    const double limit = std::sqrt(6.0 / static_cast<double>(w.rows() + w.cols()));
    for (size_t i = 0; i < w.size(); ++i) w.data()[i] = static_cast<T>(rng.uniform_range(-limit, limit));
}

}  // namespace

template <class T>
ItctModelT<T>::ItctModelT(const ModelConfig& config, uint64_t seed) : cfg_(config) {
    cfg_.validate();
    const int d = cfg_.embedding_dim;
    Rng rng(seed);

    for (int i = 0; i < cfg_.m; ++i) {
        embed_tables_.emplace_back("embed.table" + std::to_string(i), cfg_.vocab_sizes[i], d - 1);
        glorot_init(embed_tables_.back().value, rng);
    }
    column_ids_ = ParamTensor<T>("embed.ids", cfg_.m, 1);
    for (int i = 0; i < cfg_.m; ++i) column_ids_.value(i, 0) = static_cast<T>(rng.uniform_range(-1.0, 1.0));

    for (int b = 0; b < cfg_.n_blocks; ++b) {
        const std::string prefix = "block" + std::to_string(b);
        TransformerBlockT<T> block{nn::AttentionWeights<T>(prefix + ".attn", d, cfg_.n_heads),
                                   ParamTensor<T>(prefix + ".norm1.gamma", 1, d),
                                   ParamTensor<T>(prefix + ".norm1.beta", 1, d),
                                   ParamTensor<T>(prefix + ".ffn.w", d, d),
                                   ParamTensor<T>(prefix + ".ffn.b", 1, d),
                                   ParamTensor<T>(prefix + ".norm2.gamma", 1, d),
                                   ParamTensor<T>(prefix + ".norm2.beta", 1, d)};
        glorot_init(block.attn.wq.value, rng);
        glorot_init(block.attn.wk.value, rng);
        glorot_init(block.attn.wv.value, rng);
        glorot_init(block.attn.wo.value, rng);
        block.norm1_gamma.value.fill(T(1));
        glorot_init(block.ffn_w.value, rng);
        block.norm2_gamma.value.fill(T(1));
        blocks_.push_back(std::move(block));
    }

    if (cfg_.c > 0) {
        cont_gamma_ = ParamTensor<T>("cont_norm.gamma", 1, cfg_.c);
        cont_beta_ = ParamTensor<T>("cont_norm.beta", 1, cfg_.c);
        cont_gamma_.value.fill(T(1));
    }

    int in_width = cfg_.fused_width();
    const auto widths = cfg_.head_widths();
    for (size_t l = 0; l <= widths.size(); ++l) {
        const int out_width = l < widths.size() ? widths[l] : 1;
        HeadLayerT<T> layer{ParamTensor<T>("head.l" + std::to_string(l) + ".w", in_width, out_width),
                            ParamTensor<T>("head.l" + std::to_string(l) + ".b", 1, out_width)};
        glorot_init(layer.w.value, rng);
        head_.push_back(std::move(layer));
        in_width = out_width;
    }
}

template <class T>
ItctModelT<T>::ItctModelT(const ModelConfig& config, const Vocabulary& vocab, uint64_t seed)
    : ItctModelT([&] {
          ModelConfig cfg = config;
          cfg.vocab_sizes.clear();
          for (size_t i = 0; i < vocab.n_columns(); ++i) cfg.vocab_sizes.push_back(vocab.size(i));
          cfg.m = static_cast<int>(vocab.n_columns());
          return cfg;
      }(), seed) {}

template <class T>
std::vector<ParamTensor<T>*> ItctModelT<T>::params() {
    std::vector<ParamTensor<T>*> out;
    for (auto& t : embed_tables_) out.push_back(&t);
    out.push_back(&column_ids_);
    for (auto& b : blocks_) {
        out.push_back(&b.attn.wq);
        out.push_back(&b.attn.wk);
        out.push_back(&b.attn.wv);
        out.push_back(&b.attn.wo);
        out.push_back(&b.norm1_gamma);
        out.push_back(&b.norm1_beta);
        out.push_back(&b.ffn_w);
        out.push_back(&b.ffn_b);
        out.push_back(&b.norm2_gamma);
        out.push_back(&b.norm2_beta);
    }
    if (cfg_.c > 0) {
        out.push_back(&cont_gamma_);
        out.push_back(&cont_beta_);
    }
    for (auto& l : head_) {
        out.push_back(&l.w);
        out.push_back(&l.b);
    }
    return out;
}

template <class T>
std::vector<const ParamTensor<T>*> ItctModelT<T>::params() const {
    auto mutable_params = const_cast<ItctModelT<T>*>(this)->params();
    return {mutable_params.begin(), mutable_params.end()};
}

template <class T>
void ItctModelT<T>::zero_grads() {
    for (auto* p : params()) p->zero_grad();
}

template <class T>
int64_t ItctModelT<T>::count_params() const {
    int64_t total = 0;
    for (const auto* p : params()) total += p->count();
    return total;
}

template <class T>
std::vector<std::pair<std::string, int64_t>> ItctModelT<T>::param_breakdown() const {
    std::vector<std::pair<std::string, int64_t>> out;
    for (const auto* p : params()) out.emplace_back(p->name, p->count());
    return out;
}

template <class T>
Mat<T> ItctModelT<T>::run_forward(const Batch& batch, bool train_mode, uint64_t dropout_seed, Cache* cache,
                                  ForwardTrace<T>* trace) const {
    if (batch.m != cfg_.m || batch.c != cfg_.c)
        throw DataError("forward: batch width (m=" + std::to_string(batch.m) + ", c=" + std::to_string(batch.c) +
                        ") does not match model (m=" + std::to_string(cfg_.m) + ", c=" + std::to_string(cfg_.c) + ")");
    const int d = cfg_.embedding_dim;
    const int m = cfg_.m;
    const size_t n = batch.n;
    const double rate = cfg_.dropout;

    // column embeddings: token j in column i embeds to [c_i, w_i[j]]
    Mat<T> x(static_cast<int>(n * m), d);
    for (size_t b = 0; b < n; ++b)
        for (int i = 0; i < m; ++i) {
            const int32_t tok = batch.cat[b * m + i];
            if (tok < 0 || tok >= cfg_.vocab_sizes[i])
                throw DataError("forward: token id " + std::to_string(tok) + " out of range for column " +
                                std::to_string(i) + " (vocab size " + std::to_string(cfg_.vocab_sizes[i]) + ")");
            T* row = x.row_ptr(static_cast<int>(b * m + i));
            row[0] = column_ids_.value(i, 0);
            const T* emb = embed_tables_[i].value.row_ptr(tok);
            for (int j = 0; j + 1 < d; ++j) row[j + 1] = emb[j];
        }
    if (trace) trace->embeddings = x;
    if (cache) {
        cache->cat = batch.cat;
        cache->batch_n = n;
        cache->embeddings = x;
        cache->blocks.clear();
        cache->blocks.resize(blocks_.size());
    }

    Mat<T> h = std::move(x);
    for (size_t blk = 0; blk < blocks_.size(); ++blk) {
        const auto& block = blocks_[blk];
        BlockCache* bc = cache ? &cache->blocks[blk] : nullptr;
        Mat<T> attn_out = nn::multi_head_attention(h, block.attn, m, rate, mix_seed(dropout_seed, 100 + blk),
                                                   train_mode, bc ? &bc->attn : nullptr);
        accumulate(attn_out, h);  // residual
        if (bc) bc->norm1_in = attn_out;
        Mat<T> n1 = nn::layer_norm(attn_out, block.norm1_gamma.value, block.norm1_beta.value,
                                   static_cast<T>(cfg_.layer_norm_eps), bc ? &bc->norm1 : nullptr);
        if (bc) bc->norm1_out = n1;
        Mat<T> pre = nn::add_bias(nn::matmul(n1, block.ffn_w.value), block.ffn_b.value);
        if (bc) bc->ffn_pre = pre;
        Mat<T> act = nn::activation(pre, nn::Activation::gelu);
        auto dropped = nn::dropout_with_mask(act, rate, mix_seed(dropout_seed, 200 + blk), train_mode);
        if (bc) bc->ffn_mask = dropped.mask;
        accumulate(dropped.y, n1);  // residual
        if (bc) bc->norm2_in = dropped.y;
        h = nn::layer_norm(dropped.y, block.norm2_gamma.value, block.norm2_beta.value,
                           static_cast<T>(cfg_.layer_norm_eps), bc ? &bc->norm2 : nullptr);
    }
    if (trace) trace->contextual = h;

    // flatten contextual embeddings: (n*m) x d rows are contiguous per sample
    Mat<T> flat(static_cast<int>(n), m * d, h.vec());

    Mat<T> fused;
    if (cfg_.c > 0) {
        Mat<T> cont(static_cast<int>(n), cfg_.c);
        for (size_t i = 0; i < batch.cont.size(); ++i) cont.data()[i] = static_cast<T>(batch.cont[i]);
        if (cache) cache->cont_in = cont;
        Mat<T> cn = nn::layer_norm(cont, cont_gamma_.value, cont_beta_.value, static_cast<T>(cfg_.layer_norm_eps),
                                   cache ? &cache->cont_norm : nullptr);
        fused = nn::concat_rows_features(flat, cn);
    } else {
        fused = std::move(flat);
    }
    if (trace) trace->fused = fused;
    if (cache) cache->fused = fused;

    Mat<T> a = std::move(fused);
    if (cache) {
        cache->head_in.clear();
        cache->head_pre.clear();
        cache->head_mask.clear();
    }
    for (size_t l = 0; l + 1 < head_.size(); ++l) {
        if (cache) cache->head_in.push_back(a);
        Mat<T> pre = nn::add_bias(nn::matmul(a, head_[l].w.value), head_[l].b.value);
        if (cache) cache->head_pre.push_back(pre);
        Mat<T> act = nn::activation(pre, nn::Activation::gelu);
        auto dropped = nn::dropout_with_mask(act, rate, mix_seed(dropout_seed, 300 + l), train_mode);
        if (cache) cache->head_mask.push_back(dropped.mask);
        a = std::move(dropped.y);
    }
    if (cache) cache->head_in.push_back(a);
    Mat<T> logits = nn::add_bias(nn::matmul(a, head_.back().w.value), head_.back().b.value);
    Mat<T> probs = nn::activation(logits, nn::Activation::sigmoid);
    nn::check_finite(probs, "model probabilities");
    if (cache) {
        cache->logits = std::move(logits);
        cache->probs = probs;
    }
    if (trace) trace->probs = probs;
    return probs;
}

template <class T>
Mat<T> ItctModelT<T>::forward(const Batch& batch, bool train_mode, uint64_t dropout_seed, ForwardTrace<T>* trace) {
    if (train_mode) {
        cache_.valid = false;
        Mat<T> probs = run_forward(batch, true, dropout_seed, &cache_, trace);
        cache_.valid = true;
        return probs;
    }
    cache_.valid = false;
    return run_forward(batch, false, dropout_seed, nullptr, trace);
}

template <class T>
Mat<T> ItctModelT<T>::forward_eval(const Batch& batch) const {
    return run_forward(batch, false, 0, nullptr, nullptr);
}

template <class T>
void ItctModelT<T>::backward(const Mat<T>& dprob) {
    if (!cache_.valid) throw std::logic_error("backward called before a training-mode forward");
    if (dprob.rows() != static_cast<int>(cache_.batch_n) || dprob.cols() != 1)
        nn::shape_error("model backward", dprob.shape_str(),
                        "(" + std::to_string(cache_.batch_n) + "x1)");
    const int d = cfg_.embedding_dim;
    const int m = cfg_.m;
    const size_t n = cache_.batch_n;

    // through the sigmoid: dlogit = dprob * p * (1 - p)
    Mat<T> dlogits(dprob.rows(), 1);
    for (int i = 0; i < dprob.rows(); ++i) {
        const T p = cache_.probs(i, 0);
        dlogits(i, 0) = dprob(i, 0) * p * (T(1) - p);
    }

    // head, last linear first
    auto& last = head_.back();
    accumulate(last.w.grad, nn::matmul_tn(cache_.head_in.back(), dlogits));
    accumulate(last.b.grad, nn::bias_grad(dlogits));
    Mat<T> da = nn::matmul_nt(dlogits, last.w.value);
    for (int l = static_cast<int>(head_.size()) - 2; l >= 0; --l) {
        Mat<T> dact = nn::dropout_backward(da, cache_.head_mask[l]);
        Mat<T> dpre = nn::activation_backward(cache_.head_pre[l], dact, nn::Activation::gelu);
        accumulate(head_[l].w.grad, nn::matmul_tn(cache_.head_in[l], dpre));
        accumulate(head_[l].b.grad, nn::bias_grad(dpre));
        da = nn::matmul_nt(dpre, head_[l].w.value);
    }

    // split fused gradient into contextual and continuous parts
    Mat<T> dflat;
    if (cfg_.c > 0) {
        auto [df, dcn] = nn::concat_rows_features_backward(da, m * d);
        dflat = std::move(df);
        nn::layer_norm_backward(dcn, cont_gamma_.value, cache_.cont_norm, cont_gamma_.grad, cont_beta_.grad);
    } else {
        dflat = std::move(da);
    }
    Mat<T> dh(static_cast<int>(n * m), d, dflat.vec());

    for (int blk = static_cast<int>(blocks_.size()) - 1; blk >= 0; --blk) {
        auto& block = blocks_[blk];
        auto& bc = cache_.blocks[blk];
        Mat<T> dn2in =
            nn::layer_norm_backward(dh, block.norm2_gamma.value, bc.norm2, block.norm2_gamma.grad,
                                    block.norm2_beta.grad);
        // norm2_in = norm1_out + dropout(gelu(ffn))
        Mat<T> dact = nn::dropout_backward(dn2in, bc.ffn_mask);
        Mat<T> dpre = nn::activation_backward(bc.ffn_pre, dact, nn::Activation::gelu);
        accumulate(block.ffn_w.grad, nn::matmul_tn(bc.norm1_out, dpre));
        accumulate(block.ffn_b.grad, nn::bias_grad(dpre));
        Mat<T> dn1out = nn::matmul_nt(dpre, block.ffn_w.value);
        accumulate(dn1out, dn2in);  // residual branch
        Mat<T> dn1in = nn::layer_norm_backward(dn1out, block.norm1_gamma.value, bc.norm1, block.norm1_gamma.grad,
                                               block.norm1_beta.grad);
        // norm1_in = attention(x) + x
        Mat<T> dx = nn::multi_head_attention_backward(dn1in, block.attn, bc.attn);
        accumulate(dx, dn1in);  // residual branch
        dh = std::move(dx);
    }

    // scatter into embedding tables and column identifiers
    for (size_t b = 0; b < n; ++b)
        for (int i = 0; i < m; ++i) {
            const T* row = dh.row_ptr(static_cast<int>(b * m + i));
            column_ids_.grad(i, 0) += row[0];
            const int32_t tok = cache_.cat[b * m + i];
            T* emb = embed_tables_[i].grad.row_ptr(tok);
            for (int j = 0; j + 1 < d; ++j) emb[j] += row[j + 1];
        }
    cache_.valid = false;
}

// ---------------------------------------------------------------------------
// loss

template <class T>
double bce_loss(const Mat<T>& probs, const std::vector<uint8_t>& labels) {
    if (probs.cols() != 1 || probs.rows() != static_cast<int>(labels.size()))
        throw std::invalid_argument("bce_loss: probabilities " + probs.shape_str() + " vs " +
                                    std::to_string(labels.size()) + " labels");
    constexpr double lo = 1e-7, hi = 1.0 - 1e-7;
    double sum = 0.0;
    for (int i = 0; i < probs.rows(); ++i) {
        const double p = std::min(hi, std::max(lo, static_cast<double>(probs(i, 0))));
        sum += labels[i] ? -std::log(p) : -std::log(1.0 - p);
    }
    return sum / static_cast<double>(probs.rows());
}

template <class T>
Mat<T> bce_loss_backward(const Mat<T>& probs, const std::vector<uint8_t>& labels) {
    if (probs.cols() != 1 || probs.rows() != static_cast<int>(labels.size()))
        throw std::invalid_argument("bce_loss_backward: probabilities " + probs.shape_str() + " vs " +
                                    std::to_string(labels.size()) + " labels");
    constexpr double lo = 1e-7, hi = 1.0 - 1e-7;
    const double inv_n = 1.0 / static_cast<double>(probs.rows());
    Mat<T> dp(probs.rows(), 1);
    for (int i = 0; i < probs.rows(); ++i) {
        const double p = static_cast<double>(probs(i, 0));
        if (p < lo || p > hi) {
            dp(i, 0) = T(0);  // clamped region
            continue;
        }
        dp(i, 0) = static_cast<T>((labels[i] ? -1.0 / p : 1.0 / (1.0 - p)) * inv_n);
    }
    return dp;
}

template class ItctModelT<float>;
template class ItctModelT<double>;
template double bce_loss<float>(const Mat<float>&, const std::vector<uint8_t>&);
template double bce_loss<double>(const Mat<double>&, const std::vector<uint8_t>&);
template Mat<float> bce_loss_backward<float>(const Mat<float>&, const std::vector<uint8_t>&);
template Mat<double> bce_loss_backward<double>(const Mat<double>&, const std::vector<uint8_t>&);

// ---------------------------------------------------------------------------
// serialization

namespace {

constexpr char kModelMagic[] = "ITCTM1";
constexpr int kModelVersion = 1;

}  // namespace

void save_model(const ModelBundle& bundle, const std::string& path) {
    const auto params = bundle.model.params();
    nlohmann::ordered_json manifest;
    manifest["format_version"] = kModelVersion;
    const auto& cfg = bundle.model.config();
    manifest["config"] = {{"embedding_dim", cfg.embedding_dim},
                          {"n_blocks", cfg.n_blocks},
                          {"n_heads", cfg.n_heads},
                          {"mlp_hidden_factors", cfg.mlp_hidden_factors},
                          {"dropout", cfg.dropout},
                          {"m", cfg.m},
                          {"c", cfg.c},
                          {"vocab_sizes", cfg.vocab_sizes},
                          {"layer_norm_eps", cfg.layer_norm_eps}};
    auto features = nlohmann::ordered_json::array();
    for (const auto& f : bundle.features) features.push_back({{"name", f.name}, {"kind", to_string(f.kind)}});
    manifest["features"] = features;
    auto vocab = nlohmann::ordered_json::array();
    for (size_t i = 0; i < bundle.vocab.n_columns(); ++i)
        vocab.push_back({{"name", bundle.vocab.column_name(i)}, {"tokens", bundle.vocab.tokens(i)}});
    manifest["vocabulary"] = vocab;
    auto norm = nlohmann::ordered_json::array();
    for (size_t i = 0; i < bundle.stats.names.size(); ++i)
        norm.push_back(
            {{"name", bundle.stats.names[i]}, {"mean", bundle.stats.means[i]}, {"std", bundle.stats.stds[i]}});
    manifest["normalization"] = norm;
    manifest["training"] = {{"epochs_ran", bundle.epochs_ran}, {"stop_reason", bundle.stop_reason},
                            {"seed", bundle.seed}};

    std::vector<char> blob;
    auto tensors = nlohmann::ordered_json::array();
    for (const auto* p : params) {
        tensors.push_back({{"name", p->name}, {"rows", p->value.rows()}, {"cols", p->value.cols()}});
        const size_t bytes = p->value.size() * sizeof(float);
        const size_t off = blob.size();
        blob.resize(off + bytes);
        std::memcpy(blob.data() + off, p->value.data(), bytes);
    }
    manifest["tensors"] = tensors;
    manifest["blob_bytes"] = blob.size();
    const uint32_t crc =
        static_cast<uint32_t>(crc32(0L, reinterpret_cast<const Bytef*>(blob.data()), static_cast<uInt>(blob.size())));
    manifest["crc32"] = crc;

    const std::string manifest_text = manifest.dump();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write model file: " + path);
    out.write(kModelMagic, 6);
    const uint32_t mlen = static_cast<uint32_t>(manifest_text.size());
    out.write(reinterpret_cast<const char*>(&mlen), 4);
    out.write(manifest_text.data(), static_cast<std::streamsize>(manifest_text.size()));
    out.write(blob.data(), static_cast<std::streamsize>(blob.size()));
    if (!out) throw DataError("write failed: " + path);
}

ModelBundle load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("model file not found: " + path);
    char magic[6];
    if (!in.read(magic, 6) || std::memcmp(magic, kModelMagic, 6) != 0)
        throw DataError("not a model file (bad magic): " + path);
    uint32_t mlen = 0;
    if (!in.read(reinterpret_cast<char*>(&mlen), 4)) throw DataError("truncated model file: " + path);
    std::string manifest_text(mlen, '\0');
    if (!in.read(manifest_text.data(), mlen)) throw DataError("truncated model file: " + path);
    nlohmann::ordered_json manifest;
    try {
        manifest = nlohmann::ordered_json::parse(manifest_text);
    } catch (const std::exception& e) {
        throw DataError("invalid model manifest in " + path + ": " + e.what());
    }
    const int version = manifest.value("format_version", 0);
    if (version != kModelVersion)
        throw DataError("model file " + path + " has format version " + std::to_string(version) +
                        "; this build reads version " + std::to_string(kModelVersion));

    ModelConfig cfg;
    const auto& jc = manifest.at("config");
    cfg.embedding_dim = jc.at("embedding_dim").get<int>();
    cfg.n_blocks = jc.at("n_blocks").get<int>();
    cfg.n_heads = jc.at("n_heads").get<int>();
    cfg.mlp_hidden_factors = jc.at("mlp_hidden_factors").get<std::vector<double>>();
    cfg.dropout = jc.at("dropout").get<double>();
    cfg.m = jc.at("m").get<int>();
    cfg.c = jc.at("c").get<int>();
    cfg.vocab_sizes = jc.at("vocab_sizes").get<std::vector<int32_t>>();
    cfg.layer_norm_eps = jc.at("layer_norm_eps").get<double>();

    const size_t blob_bytes = manifest.at("blob_bytes").get<size_t>();
    std::vector<char> blob(blob_bytes);
    if (!in.read(blob.data(), static_cast<std::streamsize>(blob_bytes)))
        throw DataError("truncated model file: " + path);
    const uint32_t crc =
        static_cast<uint32_t>(crc32(0L, reinterpret_cast<const Bytef*>(blob.data()), static_cast<uInt>(blob.size())));
    if (crc != manifest.at("crc32").get<uint32_t>())
        throw DataError("model file checksum mismatch (corrupted): " + path);

    ModelBundle bundle;
    bundle.model = ItctModel(cfg, 0);
    auto params = bundle.model.params();
    const auto& tensors = manifest.at("tensors");
    if (tensors.size() != params.size())
        throw DataError("model file tensor count does not match architecture: " + path);
    size_t off = 0;
    for (size_t i = 0; i < params.size(); ++i) {
        const auto& t = tensors[i];
        if (t.at("name").get<std::string>() != params[i]->name ||
            t.at("rows").get<int>() != params[i]->value.rows() || t.at("cols").get<int>() != params[i]->value.cols())
            throw DataError("model file tensor '" + t.at("name").get<std::string>() +
                            "' does not match architecture: " + path);
        const size_t bytes = params[i]->value.size() * sizeof(float);
        if (off + bytes > blob.size()) throw DataError("model blob too short: " + path);
        std::memcpy(params[i]->value.data(), blob.data() + off, bytes);
        off += bytes;
    }
    if (off != blob.size()) throw DataError("model blob has trailing bytes: " + path);

    for (const auto& f : manifest.at("features"))
        bundle.features.push_back(
            {f.at("name").get<std::string>(), column_kind_from_string(f.at("kind").get<std::string>())});
    for (const auto& v : manifest.at("vocabulary")) {
        const std::string name = v.at("name").get<std::string>();
        bundle.vocab.add_column(name);
        const int col = bundle.vocab.column_index(name);
        const auto tokens = v.at("tokens").get<std::vector<std::string>>();
        for (size_t t = 1; t < tokens.size(); ++t) bundle.vocab.add_token(col, tokens[t]);
    }
    for (const auto& s : manifest.at("normalization")) {
        bundle.stats.names.push_back(s.at("name").get<std::string>());
        bundle.stats.means.push_back(s.at("mean").get<double>());
        bundle.stats.stds.push_back(s.at("std").get<double>());
    }
    const auto& tr = manifest.at("training");
    bundle.epochs_ran = tr.at("epochs_ran").get<int>();
    bundle.stop_reason = tr.at("stop_reason").get<std::string>();
    bundle.seed = tr.at("seed").get<uint64_t>();
    return bundle;
}

}  // namespace itct
