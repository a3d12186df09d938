#pragma once

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "gloss/trainer.hpp"

namespace gloss {

// On-disk model format, all little-endian:
//   magic "GLOS" | version u32=1 | kind u8 (0=bow, 1=pos)
//   d u32 | V u32 | L_max u32 | N u32 | r f32
//   vocab: count u32, then per token: byte-length u32 + UTF-8 bytes
//   W row-major f32 (V*d) | b f32 (V) | P f32 (L_max*d, pos only)
//   latents flag u8 | latents f32 (N*d, if flag=1)

inline constexpr char kModelMagic[4] = {'G', 'L', 'O', 'S'};
inline constexpr std::uint32_t kModelVersion = 1;

static_assert(std::endian::native == std::endian::little,
              "model serialization assumes a little-endian host");

namespace detail {

struct Reader {
    std::ifstream in;
    std::string path;

    void read(void* dst, std::size_t n) {
        in.read(static_cast<char*>(dst), static_cast<std::streamsize>(n));
        if (static_cast<std::size_t>(in.gcount()) != n)
            throw std::runtime_error(path + ": unexpected end of file");
    }
    std::uint8_t u8() {
        std::uint8_t v;
        read(&v, 1);
        return v;
    }
    std::uint32_t u32() {
        std::uint32_t v;
        read(&v, 4);
        return v;
    }
    float f32() {
        float v;
        read(&v, 4);
        return v;
    }
    void f32_block(Vector& out, std::size_t n) {
        std::vector<float> buf(n);
        read(buf.data(), n * sizeof(float));
        out.resize(n);
        for (std::size_t i = 0; i < n; ++i) out[i] = static_cast<double>(buf[i]);
    }
};

struct Writer {
    std::ofstream out;

    void write(const void* src, std::size_t n) {
        out.write(static_cast<const char*>(src), static_cast<std::streamsize>(n));
    }
    void u8(std::uint8_t v) { write(&v, 1); }
    void u32(std::uint32_t v) { write(&v, 4); }
    void f32(float v) { write(&v, 4); }
    void f32_block(const Vector& src) {
        std::vector<float> buf(src.size());
        for (std::size_t i = 0; i < src.size(); ++i) buf[i] = static_cast<float>(src[i]);
        write(buf.data(), buf.size() * sizeof(float));
    }
};

inline bool valid_utf8(const std::string& s) {
    std::size_t i = 0;
    while (i < s.size()) {
        const unsigned char c = static_cast<unsigned char>(s[i]);
        std::size_t extra;
        if (c < 0x80) extra = 0;
        else if ((c & 0xE0) == 0xC0) extra = 1;
        else if ((c & 0xF0) == 0xE0) extra = 2;
        else if ((c & 0xF8) == 0xF0) extra = 3;
        else return false;
        if (i + extra >= s.size()) return false;
        for (std::size_t k = 1; k <= extra; ++k)
            if ((static_cast<unsigned char>(s[i + k]) & 0xC0) != 0x80) return false;
        i += extra + 1;
    }
    return true;
}

}  // namespace detail

inline void save(const Model& m, const std::string& path, bool include_latents = true) {
    detail::Writer w;
    w.out.open(path, std::ios::binary | std::ios::trunc);
    if (!w.out) throw std::runtime_error("cannot open for writing: " + path);

    const std::uint32_t v = static_cast<std::uint32_t>(m.vocab.size());
    const std::uint32_t d = static_cast<std::uint32_t>(m.config.dim);
    const std::uint32_t l_max = static_cast<std::uint32_t>(m.config.l_max);
    const std::uint32_t n = static_cast<std::uint32_t>(m.latents.count());

    w.write(kModelMagic, 4);
    w.u32(kModelVersion);
    w.u8(static_cast<std::uint8_t>(m.kind()));
    w.u32(d);
    w.u32(v);
    w.u32(l_max);
    w.u32(n);
    w.f32(static_cast<float>(m.latents.radius));

    w.u32(v);
    for (const auto& tok : m.vocab.tokens) {
        w.u32(static_cast<std::uint32_t>(tok.size()));
        w.write(tok.data(), tok.size());
    }

    if (m.kind() == ModelKind::bow) {
        w.f32_block(m.bow().W.data);
        w.f32_block(m.bow().b);
    } else {
        w.f32_block(m.pos().W.data);
        w.f32_block(m.pos().b);
        w.f32_block(m.pos().P.data);
    }

    w.u8(include_latents ? 1 : 0);
    if (include_latents) w.f32_block(m.latents.z.data);

    w.out.flush();
    if (!w.out) {
        w.out.close();
        std::remove(path.c_str());
        throw std::runtime_error("write failed: " + path);
    }
}

inline Model load(const std::string& path) {
    detail::Reader r;
    r.path = path;
    r.in.open(path, std::ios::binary);
    if (!r.in) throw std::runtime_error("cannot open model file: " + path);

    char magic[4];
    r.read(magic, 4);
    if (std::memcmp(magic, kModelMagic, 4) != 0)
        throw std::runtime_error(path + ": bad magic/version");
    if (r.u32() != kModelVersion) throw std::runtime_error(path + ": bad magic/version");
    const std::uint8_t kind = r.u8();
    if (kind > 1) throw std::runtime_error(path + ": invalid model kind");
    const std::uint32_t d = r.u32();
    const std::uint32_t v = r.u32();
    const std::uint32_t l_max = r.u32();
    const std::uint32_t n = r.u32();
    const double radius = static_cast<double>(r.f32());
    if (d < 1 || v < 1 || l_max < 1 || radius <= 0.0)
        throw std::runtime_error(path + ": invalid header fields");

    const std::uint32_t vocab_count = r.u32();
    if (vocab_count != v) throw std::runtime_error(path + ": vocab count disagrees with header");
    Vocab vocab;
    vocab.tokens.reserve(v);
    vocab.counts.assign(v, 0);
    for (std::uint32_t i = 0; i < v; ++i) {
        const std::uint32_t len = r.u32();
        std::string tok(len, '\0');
        r.read(tok.data(), len);
        if (!detail::valid_utf8(tok))
            throw std::runtime_error(path + ": invalid UTF-8 token at id " + std::to_string(i));
        if (i > 0) vocab.index[tok] = i;
        vocab.tokens.push_back(std::move(tok));
    }

    Model m;
    m.vocab = std::move(vocab);
    m.config.kind = static_cast<ModelKind>(kind);
    m.config.dim = d;
    m.config.l_max = l_max;
    m.config.radius = radius;

    if (kind == 0) {
        BowDecoder dec;
        dec.W = Matrix(v, d);
        r.f32_block(dec.W.data, static_cast<std::size_t>(v) * d);
        r.f32_block(dec.b, v);
        m.decoder = std::move(dec);
    } else {
        PosDecoder dec;
        dec.W = Matrix(v, d);
        r.f32_block(dec.W.data, static_cast<std::size_t>(v) * d);
        r.f32_block(dec.b, v);
        dec.P = Matrix(l_max, d);
        r.f32_block(dec.P.data, static_cast<std::size_t>(l_max) * d);
        m.decoder = std::move(dec);
    }

    m.latents.radius = radius;
    const std::uint8_t has_latents = r.u8();
    if (has_latents > 1) throw std::runtime_error(path + ": invalid latent flag");
    if (has_latents) {
        m.latents.z = Matrix(n, d);
        r.f32_block(m.latents.z.data, static_cast<std::size_t>(n) * d);
        for (std::uint32_t i = 0; i < n; ++i) {
            if (l2_norm(m.latents.z.row(i)) > radius + 1e-6)
                throw std::runtime_error(path + ": latent row " + std::to_string(i) +
                                         " violates ball constraint");
        }
    } else {
        m.latents.z = Matrix(0, d);
    }

    // trailing bytes mean a malformed file
    char extra;
    r.in.read(&extra, 1);
    if (r.in.gcount() != 0) throw std::runtime_error(path + ": trailing bytes after model");
    return m;
}

}  // namespace gloss
