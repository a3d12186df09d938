#pragma once

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <map>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace gloss {

inline constexpr std::uint32_t kUnkId = 0;
inline constexpr const char* kUnkToken = "<unk>";

/// Lowercases, splits off punctuation as separate tokens, splits on
/// whitespace. Non-ASCII bytes are kept inside word tokens.
inline std::vector<std::string> tokenize(const std::string& text) {
    std::vector<std::string> out;
    std::string cur;
    auto flush = [&] {
        if (!cur.empty()) {
            out.push_back(cur);
            cur.clear();
        }
    };
    for (unsigned char c : text) {
        if (c < 0x80 && std::isspace(c)) {
            flush();
        } else if (c < 0x80 && !std::isalnum(c)) {
            // ASCII punctuation becomes its own token
            flush();
            out.emplace_back(1, static_cast<char>(c));
        } else {
            cur.push_back(c < 0x80 ? static_cast<char>(std::tolower(c))
                                   : static_cast<char>(c));
        }
    }
    flush();
    return out;
}

struct Vocab {
    std::vector<std::string> tokens;                      // id -> token
    std::unordered_map<std::string, std::uint32_t> index; // token -> id
    std::vector<std::uint64_t> counts;                    // id -> count (UNK: 0)

    std::size_t size() const { return tokens.size(); }

    std::uint32_t id_of(const std::string& tok) const {
        auto it = index.find(tok);
        return it == index.end() ? kUnkId : it->second;
    }
};

/// Builds a vocabulary over tokenized sentences. Ids are assigned by
/// descending count with lexicographic tie-break, UNK pinned at id 0.
inline Vocab build_vocab(const std::vector<std::string>& corpus, std::uint64_t min_count = 1) {
    if (min_count < 1) throw std::invalid_argument("min_count must be >= 1");
    std::map<std::string, std::uint64_t> freq;
    bool any_token = false;
    for (const auto& line : corpus) {
        for (auto& tok : tokenize(line)) {
            ++freq[tok];
            any_token = true;
        }
    }
    if (!any_token) throw std::runtime_error("empty corpus");

    std::vector<std::pair<std::string, std::uint64_t>> kept;
    for (auto& [tok, n] : freq)
        if (n >= min_count) kept.emplace_back(tok, n);
    std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });

    Vocab v;
    v.tokens.push_back(kUnkToken);
    v.counts.push_back(0);
    for (auto& [tok, n] : kept) {
        v.index[tok] = static_cast<std::uint32_t>(v.tokens.size());
        v.tokens.push_back(tok);
        v.counts.push_back(n);
    }
    return v;
}

struct EncodedSentence {
    std::vector<std::uint32_t> ids;      // length L <= L_max
    std::vector<std::uint32_t> word_set; // sorted, deduplicated
};

inline EncodedSentence encode(const std::string& sentence, const Vocab& vocab,
                              std::size_t l_max) {
    if (l_max < 1) throw std::invalid_argument("l_max must be >= 1");
    auto toks = tokenize(sentence);
    if (toks.empty()) throw std::runtime_error("empty sentence after tokenization");
    EncodedSentence es;
    for (const auto& tok : toks) {
        if (es.ids.size() >= l_max) break;
        es.ids.push_back(vocab.id_of(tok));
    }
    es.word_set = es.ids;
    std::sort(es.word_set.begin(), es.word_set.end());
    es.word_set.erase(std::unique(es.word_set.begin(), es.word_set.end()),
                      es.word_set.end());
    return es;
}

struct EncodedCorpus {
    std::vector<EncodedSentence> sentences;
    std::vector<std::string> raw;

    std::size_t size() const { return sentences.size(); }
};

inline EncodedCorpus encode_corpus(const std::vector<std::string>& lines,
                                   const Vocab& vocab, std::size_t l_max) {
    EncodedCorpus c;
    for (const auto& line : lines) {
        auto toks = tokenize(line);
        if (toks.empty()) continue;
        c.sentences.push_back(encode(line, vocab, l_max));
        c.raw.push_back(line);
    }
    if (c.sentences.empty()) throw std::runtime_error("empty corpus");
    return c;
}

/// One sentence per line, UTF-8, blank lines skipped.
inline std::vector<std::string> read_corpus_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open corpus file: " + path);
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        lines.push_back(line);
    }
    return lines;
}

}  // namespace gloss
