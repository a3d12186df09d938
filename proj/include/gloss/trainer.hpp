#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <iostream>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "gloss/corpus.hpp"
#include "gloss/decoder.hpp"
#include "gloss/latent.hpp"
#include "gloss/optim.hpp"

namespace gloss {

enum class ModelKind : std::uint8_t { bow = 0, pos = 1 };

struct TrainConfig {
    ModelKind kind = ModelKind::bow;
    std::size_t dim = 100;
    double radius = 2.0;
    double lr = 0.0003;
    double clip = 25.0;
    std::size_t epochs = 210;
    std::size_t batch_size = 128;
    std::uint64_t seed = 0;
    std::size_t l_max = 64;
    std::size_t threads = 1;
    bool verbose = false;

    void validate() const {
        if (dim < 1) throw std::invalid_argument("dim must be positive");
        if (radius <= 0.0) throw std::invalid_argument("radius must be positive");
        if (lr <= 0.0) throw std::invalid_argument("lr must be positive");
        if (clip <= 0.0) throw std::invalid_argument("clip must be positive");
        if (epochs < 1) throw std::invalid_argument("epochs must be positive");
        if (batch_size < 1) throw std::invalid_argument("batch size must be positive");
        if (l_max < 1) throw std::invalid_argument("max-len must be positive");
        if (threads < 1) throw std::invalid_argument("threads must be positive");
    }
};

struct Model {
    Vocab vocab;
    std::variant<BowDecoder, PosDecoder> decoder;
    LatentStore latents;
    TrainConfig config;

    ModelKind kind() const {
        return std::holds_alternative<BowDecoder>(decoder) ? ModelKind::bow : ModelKind::pos;
    }
    const BowDecoder& bow() const { return std::get<BowDecoder>(decoder); }
    const PosDecoder& pos() const { return std::get<PosDecoder>(decoder); }
};

/// Reconstruction loss of one encoded sentence at a given latent, under
/// whichever decoder the model carries.
inline double reconstruction_loss(const Model& m, const EncodedSentence& s,
                                  std::span<const double> z) {
    if (m.kind() == ModelKind::bow) {
        return bow_loss(bow_forward(m.bow(), z), s.word_set);
    }
    double loss = 0.0;
    for (std::size_t l = 0; l < s.ids.size(); ++l) {
        Vector q = pos_forward(m.pos(), z, l);
        loss -= std::log(std::max(q[s.ids[l]], kProbFloor));
    }
    return loss;
}

namespace detail {

inline std::pair<double, Gradients> example_grads(const Model& m, const EncodedSentence& s,
                                                  std::span<const double> z) {
    if (m.kind() == ModelKind::bow) return bow_grads(m.bow(), z, s.word_set);
    return pos_grads(m.pos(), z, s.ids);
}

struct DecoderOptimState {
    AdamState w_state;
    AdamState b_state;
    AdamState p_state;  // unused for BoW
};

inline void apply_decoder_step(Model& m, Gradients& g, DecoderOptimState& opt,
                               double lr, double clip) {
    clip_decoder_grads(g, clip);
    if (m.kind() == ModelKind::bow) {
        auto& dec = std::get<BowDecoder>(m.decoder);
        adam_step(opt.w_state, dec.W.data, g.dW.data, lr);
        adam_step(opt.b_state, dec.b, g.db, lr);
    } else {
        auto& dec = std::get<PosDecoder>(m.decoder);
        adam_step(opt.w_state, dec.W.data, g.dW.data, lr);
        adam_step(opt.b_state, dec.b, g.db, lr);
        adam_step(opt.p_state, dec.P.data, g.dP.data, lr);
    }
}

}  // namespace detail

using BatchCallback = std::function<void(std::size_t epoch, std::size_t batch, const Model&)>;

/// Joint minimization of the reconstruction loss over decoder parameters
/// and per-sentence latents. Decoder gradients are averaged over the
/// batch; each latent row gets its own per-example gradient, clip, Adam
/// step, and ball projection. Returns the model plus the mean
/// per-sentence loss of each epoch. `on_step`, when set, runs after
/// every optimizer step.
inline std::pair<Model, std::vector<double>> train(const EncodedCorpus& corpus,
                                                   const Vocab& vocab,
                                                   const TrainConfig& cfg,
                                                   const BatchCallback& on_step = {}) {
    cfg.validate();
    if (corpus.size() < 1) throw std::runtime_error("empty corpus");
    const std::size_t n = corpus.size();
    const std::size_t v = vocab.size();
    const std::size_t d = cfg.dim;

    Model m;
    m.vocab = vocab;
    m.config = cfg;
    if (cfg.kind == ModelKind::bow) {
        m.decoder = BowDecoder{Matrix(v, d), Vector(v, 0.0)};
    } else {
        m.decoder = PosDecoder{Matrix(v, d), Vector(v, 0.0), Matrix(cfg.l_max, d)};
    }
    m.latents = init_latents(n, d, cfg.radius, cfg.seed);

    detail::DecoderOptimState dec_opt;
    dec_opt.w_state = AdamState(v * d);
    dec_opt.b_state = AdamState(v);
    if (cfg.kind == ModelKind::pos) dec_opt.p_state = AdamState(cfg.l_max * d);
    std::vector<AdamState> row_states(n, AdamState(d));

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 shuffle_rng(cfg.seed ^ 0x9e3779b97f4a7c15ull);

    const std::size_t l_max = cfg.kind == ModelKind::pos ? cfg.l_max : 0;
    std::vector<double> trace;
    trace.reserve(cfg.epochs);

    std::vector<Vector> batch_dz(cfg.batch_size);
    std::vector<double> batch_loss(cfg.batch_size);

    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), shuffle_rng);
        double epoch_loss = 0.0;
        std::size_t batch_index = 0;

        for (std::size_t start = 0; start < n; start += cfg.batch_size, ++batch_index) {
            const std::size_t bsz = std::min(cfg.batch_size, n - start);
            const std::size_t workers = std::min(cfg.threads, bsz);

            std::vector<Gradients> partials(workers);
            auto worker = [&](std::size_t w) {
                Gradients acc = make_gradients(v, d, l_max);
                for (std::size_t k = w; k < bsz; k += workers) {
                    const std::size_t row = order[start + k];
                    auto [loss, g] =
                        detail::example_grads(m, corpus.sentences[row], m.latents.z.row(row));
                    acc.add(g);
                    batch_dz[k] = std::move(g.dz);
                    batch_loss[k] = loss;
                }
                partials[w] = std::move(acc);
            };
            if (workers == 1) {
                worker(0);
            } else {
                std::vector<std::thread> pool;
                for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker, w);
                for (auto& t : pool) t.join();
            }

            Gradients dec_grads = std::move(partials[0]);
            for (std::size_t w = 1; w < workers; ++w) dec_grads.add(partials[w]);
            dec_grads.scale_decoder_blocks(1.0 / static_cast<double>(bsz));
            detail::apply_decoder_step(m, dec_grads, dec_opt, cfg.lr, cfg.clip);

            for (std::size_t k = 0; k < bsz; ++k) {
                const std::size_t row = order[start + k];
                clip_vector_norm(batch_dz[k], cfg.clip);
                auto zrow = m.latents.z.row(row);
                adam_step(row_states[row], zrow, batch_dz[k], cfg.lr);
                project_ball_inplace(zrow, cfg.radius);
                epoch_loss += batch_loss[k];
            }

            if (on_step) on_step(epoch, batch_index, m);
        }

        const double mean_loss = epoch_loss / static_cast<double>(n);
        if (!std::isfinite(mean_loss)) throw std::runtime_error("training diverged: non-finite loss");
        trace.push_back(mean_loss);
        if (cfg.verbose) std::cerr << "epoch " << epoch << " loss " << mean_loss << "\n";
    }
    return {std::move(m), std::move(trace)};
}

struct InferOptions {
    std::size_t steps = 250;
    double lr = 1.0;
    bool plain_sgd = false;  // vanilla gradient descent instead of Adam
};

/// Embeds an unseen sentence by optimizing a fresh latent against the
/// frozen decoder. Initialization is seeded from a hash of the sentence
/// so repeated calls give the same embedding.
inline Vector infer_latent(const Model& m, const std::string& sentence,
                           const InferOptions& opts = {}) {
    const EncodedSentence enc = encode(sentence, m.vocab, m.config.l_max);
    const double r = m.latents.radius;
    std::mt19937_64 rng(fnv1a64(sentence));
    Vector z = sample_latent(m.latents.dim(), r, rng);

    AdamState state(z.size());
    for (std::size_t step = 0; step < opts.steps; ++step) {
        Vector dz = m.kind() == ModelKind::bow
                        ? bow_latent_grad(m.bow(), z, enc.word_set).second
                        : pos_latent_grad(m.pos(), z, enc.ids).second;
        clip_vector_norm(dz, m.config.clip);
        if (opts.plain_sgd) {
            axpy(-opts.lr, dz, z);
        } else {
            adam_step(state, z, dz, opts.lr);
        }
        project_ball_inplace(z, r);
    }
    return z;
}

}  // namespace gloss
