// Command-line front end: train / embed / eval-sts / probe / interpolate / nn.

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "gloss/gloss.hpp"

namespace {

std::uint64_t default_seed() {
    if (const char* env = std::getenv("GLOSS_SEED")) {
        try {
            return std::stoull(env);
        } catch (const std::exception&) {
            throw std::runtime_error("GLOSS_SEED is not a valid integer");
        }
    }
    return 0;
}

std::string join_tokens(const std::vector<std::string>& toks) {
    std::string out;
    for (std::size_t i = 0; i < toks.size(); ++i) {
        if (i) out += ' ';
        out += toks[i];
    }
    return out;
}

int run(int argc, char** argv) {
    CLI::App app{"GLOSS: sentence embeddings via generative latent optimization"};
    app.require_subcommand(1);

    // ---- train ----
    auto* train_cmd = app.add_subcommand("train", "Train a model on a sentence-per-line corpus");
    std::string model_kind, corpus_path, out_path, loss_csv;
    gloss::TrainConfig cfg;
    std::uint64_t min_count = 1;
    train_cmd->add_option("--model", model_kind, "Decoder variant: bow or pos")
        ->required()
        ->check(CLI::IsMember({"bow", "pos"}));
    train_cmd->add_option("--corpus", corpus_path, "Training corpus file")
        ->required()
        ->check(CLI::ExistingFile);
    train_cmd->add_option("--out", out_path, "Output model path")->required();
    train_cmd->add_option("--dim", cfg.dim, "Latent dimensionality")
        ->default_val(100)
        ->check(CLI::PositiveNumber);
    train_cmd->add_option("--radius", cfg.radius, "Latent ball radius")
        ->default_val(2.0)
        ->check(CLI::PositiveNumber);
    train_cmd->add_option("--lr", cfg.lr, "Adam learning rate")
        ->default_val(0.0003)
        ->check(CLI::PositiveNumber);
    train_cmd->add_option("--clip", cfg.clip, "Gradient-norm clipping threshold")
        ->default_val(25.0)
        ->check(CLI::PositiveNumber);
    train_cmd->add_option("--epochs", cfg.epochs, "Training epochs")
        ->default_val(210)
        ->check(CLI::PositiveNumber);
    train_cmd->add_option("--batch", cfg.batch_size, "Minibatch size")
        ->default_val(128)
        ->check(CLI::PositiveNumber);
    train_cmd->add_option("--min-count", min_count, "Vocabulary frequency cutoff")
        ->default_val(1)
        ->check(CLI::PositiveNumber);
    train_cmd->add_option("--max-len", cfg.l_max, "Maximum sentence length")
        ->default_val(64)
        ->check(CLI::PositiveNumber);
    train_cmd->add_option("--seed", cfg.seed, "RNG seed (env GLOSS_SEED as fallback)");
    train_cmd->add_option("--threads", cfg.threads, "Worker threads (1 = bit-deterministic)")
        ->default_val(1)
        ->check(CLI::PositiveNumber);
    train_cmd->add_option("--loss-csv", loss_csv, "Write per-epoch loss trace as CSV");

    // ---- embed ----
    auto* embed_cmd = app.add_subcommand("embed", "Embed sentences with a trained model");
    std::string embed_model, embed_input, embed_out;
    gloss::InferOptions infer_opts;
    bool binary_out = false;
    embed_cmd->add_option("--model", embed_model, "Model file")->required()->check(CLI::ExistingFile);
    embed_cmd->add_option("--input", embed_input, "Sentence-per-line input file")
        ->required()
        ->check(CLI::ExistingFile);
    embed_cmd->add_option("--steps", infer_opts.steps, "Inference gradient steps")
        ->default_val(250)
        ->check(CLI::PositiveNumber);
    embed_cmd->add_option("--lr", infer_opts.lr, "Inference learning rate")
        ->default_val(1.0)
        ->check(CLI::PositiveNumber);
    embed_cmd->add_flag("--infer-plain-sgd", infer_opts.plain_sgd,
                        "Use vanilla gradient descent instead of Adam");
    embed_cmd->add_flag("--binary", binary_out, "Emit raw little-endian float32 matrix");
    embed_cmd->add_option("--out", embed_out, "Output path (default: stdout)");

    // ---- eval-sts ----
    auto* sts_cmd = app.add_subcommand("eval-sts", "Pearson x100 on a sentence-pair TSV");
    std::string sts_model, sts_pairs;
    gloss::InferOptions sts_infer;
    sts_cmd->add_option("--model", sts_model, "Model file")->required()->check(CLI::ExistingFile);
    sts_cmd->add_option("--pairs", sts_pairs, "TSV: sent_a<TAB>sent_b<TAB>score")
        ->required()
        ->check(CLI::ExistingFile);
    sts_cmd->add_option("--steps", sts_infer.steps, "Inference gradient steps")->default_val(250);
    sts_cmd->add_option("--lr", sts_infer.lr, "Inference learning rate")->default_val(1.0);
    sts_cmd->add_flag("--infer-plain-sgd", sts_infer.plain_sgd, "Plain SGD inference");

    // ---- probe ----
    auto* probe_cmd = app.add_subcommand("probe", "Logistic-regression probe on frozen embeddings");
    std::string probe_model, probe_train_path, probe_test_path;
    double probe_l2 = 1e-3, probe_lr = 0.1;
    std::size_t probe_steps = 1000;
    gloss::InferOptions probe_infer;
    probe_cmd->add_option("--model", probe_model, "Model file")->required()->check(CLI::ExistingFile);
    probe_cmd->add_option("--train", probe_train_path, "TSV: label<TAB>sentence")
        ->required()
        ->check(CLI::ExistingFile);
    probe_cmd->add_option("--test", probe_test_path, "TSV: label<TAB>sentence")
        ->required()
        ->check(CLI::ExistingFile);
    probe_cmd->add_option("--l2", probe_l2, "L2 regularization")->default_val(1e-3);
    probe_cmd->add_option("--probe-steps", probe_steps, "Gradient-descent steps")->default_val(1000);
    probe_cmd->add_option("--probe-lr", probe_lr, "Gradient-descent learning rate")->default_val(0.1);
    probe_cmd->add_option("--steps", probe_infer.steps, "Inference gradient steps")->default_val(250);

    // ---- interpolate ----
    auto* interp_cmd = app.add_subcommand("interpolate", "Decode latent interpolations between two sentences");
    std::string interp_model, interp_src, interp_tgt;
    std::size_t interp_points = 4;
    interp_cmd->add_option("--model", interp_model, "Model file (positional kind)")
        ->required()
        ->check(CLI::ExistingFile);
    interp_cmd->add_option("--src", interp_src, "Source sentence")->required();
    interp_cmd->add_option("--tgt", interp_tgt, "Target sentence")->required();
    interp_cmd->add_option("--points", interp_points, "Interior interpolation points")
        ->default_val(4)
        ->check(CLI::PositiveNumber);

    // ---- nn ----
    auto* nn_cmd = app.add_subcommand("nn", "Nearest training sentences to a query");
    std::string nn_model, nn_query, nn_corpus;
    std::size_t nn_k = 5;
    nn_cmd->add_option("--model", nn_model, "Model file (with stored latents)")
        ->required()
        ->check(CLI::ExistingFile);
    nn_cmd->add_option("--query", nn_query, "Query sentence")->required();
    nn_cmd->add_option("-k,--k", nn_k, "Number of neighbors")->default_val(5);
    nn_cmd->add_option("--corpus", nn_corpus, "Training corpus, to print neighbor text")
        ->check(CLI::ExistingFile);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n\n" << app.help() << "\n";
        return 2;
    }

    if (*train_cmd) {
        cfg.kind = model_kind == "bow" ? gloss::ModelKind::bow : gloss::ModelKind::pos;
        cfg.verbose = true;
        if (!train_cmd->count("--seed")) cfg.seed = default_seed();
        auto lines = gloss::read_corpus_file(corpus_path);
        auto vocab = gloss::build_vocab(lines, min_count);
        auto corpus = gloss::encode_corpus(lines, vocab, cfg.l_max);
        auto [model, trace] = gloss::train(corpus, vocab, cfg);
        if (!loss_csv.empty()) {
            std::ofstream csv(loss_csv);
            if (!csv) throw std::runtime_error("cannot write loss CSV: " + loss_csv);
            csv << "epoch,loss\n";
            for (std::size_t i = 0; i < trace.size(); ++i)
                csv << i << "," << std::setprecision(17) << trace[i] << "\n";
        }
        gloss::save(model, out_path);
        return 0;
    }

    if (*embed_cmd) {
        auto model = gloss::load(embed_model);
        std::ifstream in(embed_input);
        if (!in) throw std::runtime_error("cannot open input: " + embed_input);

        std::ostream* out = &std::cout;
        std::ofstream out_file;
        if (!embed_out.empty()) {
            out_file.open(embed_out, binary_out ? std::ios::binary : std::ios::out);
            if (!out_file) throw std::runtime_error("cannot open output: " + embed_out);
            out = &out_file;
        }

        std::string line;
        std::size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.find_first_not_of(" \t") == std::string::npos)
                throw std::runtime_error("blank input line " + std::to_string(lineno));
            gloss::Vector z = gloss::infer_latent(model, line, infer_opts);
            if (binary_out) {
                std::vector<float> buf(z.begin(), z.end());
                out->write(reinterpret_cast<const char*>(buf.data()),
                           static_cast<std::streamsize>(buf.size() * sizeof(float)));
            } else {
                *out << std::setprecision(17);
                for (std::size_t i = 0; i < z.size(); ++i) {
                    if (i) *out << ' ';
                    *out << z[i];
                }
                *out << '\n';
            }
        }
        return 0;
    }

    if (*sts_cmd) {
        auto model = gloss::load(sts_model);
        auto pairs = gloss::parse_sts_file(sts_pairs);
        const double score = gloss::eval_sts(model, pairs, sts_infer);
        std::cout << "pearson_x100 " << std::fixed << std::setprecision(1) << score << "\n";
        return 0;
    }

    if (*probe_cmd) {
        auto model = gloss::load(probe_model);
        auto embed_set = [&](const std::string& path) {
            auto [labels, sentences] = gloss::parse_probe_file(path);
            if (labels.empty()) throw std::runtime_error(path + ": empty probe file");
            gloss::ProbeDataset data;
            data.embeddings = gloss::Matrix(sentences.size(), model.config.dim);
            for (std::size_t i = 0; i < sentences.size(); ++i) {
                gloss::Vector z = gloss::infer_latent(model, sentences[i], probe_infer);
                std::copy(z.begin(), z.end(), data.embeddings.row(i).begin());
            }
            data.labels = std::move(labels);
            data.classes = *std::max_element(data.labels.begin(), data.labels.end()) + 1;
            return data;
        };
        auto train_data = embed_set(probe_train_path);
        auto test_data = embed_set(probe_test_path);
        test_data.classes = train_data.classes =
            std::max(train_data.classes, test_data.classes);
        auto weights = gloss::probe_train(train_data, probe_l2, probe_steps, probe_lr);
        std::cout << "accuracy " << std::fixed << std::setprecision(4)
                  << gloss::probe_eval(weights, test_data) << "\n";
        return 0;
    }

    if (*interp_cmd) {
        auto model = gloss::load(interp_model);
        if (model.kind() != gloss::ModelKind::pos)
            throw std::runtime_error("generation requires positional model");
        gloss::Vector z_src = gloss::infer_latent(model, interp_src);
        gloss::Vector z_tgt = gloss::infer_latent(model, interp_tgt);
        const std::size_t length =
            std::min(gloss::tokenize(interp_src).size(), model.config.l_max);
        const double r = model.latents.radius;

        std::cout << "src\t" << join_tokens(gloss::greedy_decode(model, z_src, length)) << "\n";
        for (std::size_t i = 1; i <= interp_points; ++i) {
            const double t = static_cast<double>(i) / static_cast<double>(interp_points + 1);
            gloss::Vector z = gloss::interpolate(z_src, z_tgt, t, r);
            std::string label = i <= 26 ? std::string(1, static_cast<char>('a' + i - 1))
                                        : std::to_string(i);
            std::cout << "(" << label << ")\t"
                      << join_tokens(gloss::greedy_decode(model, z, length)) << "\n";
        }
        std::cout << "tgt\t" << join_tokens(gloss::greedy_decode(model, z_tgt, length)) << "\n";
        return 0;
    }

    if (*nn_cmd) {
        auto model = gloss::load(nn_model);
        if (model.latents.count() == 0)
            throw std::runtime_error("model file has no stored latents");
        std::vector<std::string> corpus_lines;
        if (!nn_corpus.empty()) corpus_lines = gloss::read_corpus_file(nn_corpus);
        gloss::Vector z = gloss::infer_latent(model, nn_query);
        auto neighbors = gloss::nearest_neighbors(model, z, nn_k);
        for (const auto& nb : neighbors) {
            std::cout << nb.index << "\t" << std::fixed << std::setprecision(6) << nb.cosine;
            if (nb.index < corpus_lines.size()) std::cout << "\t" << corpus_lines[nb.index];
            std::cout << "\n";
        }
        return 0;
    }

    return 2;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
