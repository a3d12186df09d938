#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <fstream>
#include <random>

#include "gloss/gloss.hpp"
#include "helpers.hpp"

using namespace gloss;

namespace {

struct TempPath {
    std::string path;
    explicit TempPath(const std::string& name) : path("gloss_model_" + name) {}
    ~TempPath() { std::remove(path.c_str()); }
};

Model random_model(ModelKind kind, std::mt19937_64& rng) {
    const std::size_t v = 2 + rng() % 20;
    const std::size_t d = 1 + rng() % 12;
    const std::size_t l_max = 1 + rng() % 10;
    const std::size_t n = 1 + rng() % 15;

    Model m;
    m.vocab.tokens.push_back(kUnkToken);
    m.vocab.counts.push_back(0);
    for (std::size_t i = 1; i < v; ++i) {
        std::string tok = "tok" + std::to_string(i);
        m.vocab.index[tok] = static_cast<std::uint32_t>(i);
        m.vocab.tokens.push_back(std::move(tok));
        m.vocab.counts.push_back(0);
    }
    m.config.kind = kind;
    m.config.dim = d;
    m.config.l_max = l_max;
    m.config.radius = 2.0;
    if (kind == ModelKind::bow) {
        m.decoder = BowDecoder{testutil::random_matrix(v, d, rng), testutil::random_vector(v, rng)};
    } else {
        m.decoder = PosDecoder{testutil::random_matrix(v, d, rng), testutil::random_vector(v, rng),
                               testutil::random_matrix(l_max, d, rng)};
    }
    m.latents = init_latents(n, d, 2.0, rng());
    return m;
}

// Quantize a double block the same way save() does.
Vector quantized(const Vector& src) {
    Vector out(src.size());
    for (std::size_t i = 0; i < src.size(); ++i)
        out[i] = static_cast<double>(static_cast<float>(src[i]));
    return out;
}

std::vector<char> slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void dump(const std::string& path, const std::vector<char>& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

}  // namespace

TEST_CASE("round-trip reproduces every value at 32-bit precision") {
    std::mt19937_64 rng(61);
    for (int trial = 0; trial < 50; ++trial) {
        const ModelKind kind = trial % 2 ? ModelKind::pos : ModelKind::bow;
        Model m = random_model(kind, rng);
        TempPath f("roundtrip.glos");
        save(m, f.path);
        Model r = load(f.path);

        REQUIRE(r.kind() == m.kind());
        REQUIRE(r.vocab.tokens == m.vocab.tokens);
        REQUIRE(r.config.dim == m.config.dim);
        REQUIRE(r.config.l_max == m.config.l_max);
        REQUIRE(r.latents.radius ==
                static_cast<double>(static_cast<float>(m.latents.radius)));
        if (kind == ModelKind::bow) {
            REQUIRE(r.bow().W.data == quantized(m.bow().W.data));
            REQUIRE(r.bow().b == quantized(m.bow().b));
        } else {
            REQUIRE(r.pos().W.data == quantized(m.pos().W.data));
            REQUIRE(r.pos().b == quantized(m.pos().b));
            REQUIRE(r.pos().P.data == quantized(m.pos().P.data));
        }
        REQUIRE(r.latents.z.data == quantized(m.latents.z.data));

        // save(load(save(m))) is byte-identical to save(m)
        TempPath f2("roundtrip2.glos");
        save(r, f2.path);
        REQUIRE(slurp(f.path) == slurp(f2.path));
    }
}

TEST_CASE("magic bytes sit at offset 0") {
    std::mt19937_64 rng(62);
    Model m = random_model(ModelKind::bow, rng);
    TempPath f("magic.glos");
    save(m, f.path);
    auto bytes = slurp(f.path);
    REQUIRE(bytes.size() > 4);
    REQUIRE(bytes[0] == 'G');
    REQUIRE(bytes[1] == 'L');
    REQUIRE(bytes[2] == 'O');
    REQUIRE(bytes[3] == 'S');
}

TEST_CASE("corrupted magic or version is rejected") {
    std::mt19937_64 rng(63);
    Model m = random_model(ModelKind::pos, rng);
    TempPath f("corrupt.glos");
    save(m, f.path);
    auto bytes = slurp(f.path);

    auto corrupted = bytes;
    corrupted[2] = 'X';
    dump(f.path, corrupted);
    REQUIRE_THROWS_WITH(load(f.path), Catch::Matchers::ContainsSubstring("bad magic/version"));

    corrupted = bytes;
    corrupted[4] = 9;  // version field
    dump(f.path, corrupted);
    REQUIRE_THROWS_WITH(load(f.path), Catch::Matchers::ContainsSubstring("bad magic/version"));
}

TEST_CASE("truncated files are rejected with an end-of-file error") {
    std::mt19937_64 rng(64);
    Model m = random_model(ModelKind::bow, rng);
    TempPath f("trunc.glos");
    save(m, f.path);
    auto bytes = slurp(f.path);

    for (std::size_t keep : {bytes.size() / 4, bytes.size() / 2, bytes.size() - 3}) {
        dump(f.path, std::vector<char>(bytes.begin(), bytes.begin() + keep));
        REQUIRE_THROWS_WITH(load(f.path),
                            Catch::Matchers::ContainsSubstring("unexpected end of file"));
    }
}

TEST_CASE("latent rows violating the ball constraint are rejected") {
    std::mt19937_64 rng(65);
    Model m = random_model(ModelKind::bow, rng);
    for (double& x : m.latents.z.row(0)) x = 10.0;  // norm way past r=2
    TempPath f("ball.glos");
    save(m, f.path);
    REQUIRE_THROWS_WITH(load(f.path),
                        Catch::Matchers::ContainsSubstring("violates ball constraint"));
}

TEST_CASE("trailing bytes are rejected") {
    std::mt19937_64 rng(66);
    Model m = random_model(ModelKind::bow, rng);
    TempPath f("trail.glos");
    save(m, f.path);
    auto bytes = slurp(f.path);
    bytes.push_back(0);
    dump(f.path, bytes);
    REQUIRE_THROWS_WITH(load(f.path), Catch::Matchers::ContainsSubstring("trailing bytes"));
}

TEST_CASE("models saved without latents load with an empty store") {
    std::mt19937_64 rng(67);
    Model m = random_model(ModelKind::pos, rng);
    TempPath f("nolat.glos");
    save(m, f.path, /*include_latents=*/false);
    Model r = load(f.path);
    REQUIRE(r.latents.count() == 0);
    REQUIRE(r.pos().W.data == quantized(m.pos().W.data));
}

TEST_CASE("loading a missing file fails cleanly") {
    REQUIRE_THROWS_WITH(load("no_such_file.glos"),
                        Catch::Matchers::ContainsSubstring("cannot open"));
}
