#include "doctest.h"

#include <filesystem>
#include <fstream>

#include "qmoney/cache.hpp"
#include "qmoney/errors.hpp"
#include "qmoney/serialize.hpp"

using namespace qm;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        Rng rng(std::random_device{}());
        path = fs::temp_directory_path() / ("qmoney-test-" + std::to_string(rng.bits()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& f) {
    std::ifstream in(f, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

void spit(const fs::path& f, const std::string& s) { std::ofstream(f, std::ios::binary) << s; }

}  // namespace

TEST_CASE("rationals and triples") {
    for (auto q : {make_rational(0), make_rational(-3, 6), make_rational(7, 1), make_rational(22, 7)})
        CHECK(rational_from_json(to_json(q)) == q);
    CHECK(to_json(make_rational(-3, 6)) == "-1/2");
    CHECK_THROWS(rational_from_json(Json("1/0")));
    CHECK_THROWS(rational_from_json(Json("x")));
    const CanonicalTriple t{2, 1, 3};
    CHECK(triple_from_json(to_json(t)) == t);
}

TEST_CASE("class set round trip") {
    for (std::int64_t N : {11, 23, 37, 101}) {
        auto O = build_maximal_order(N);
        auto cs = enumerate_class_set(N);
        const std::string text = dump(to_json(cs));
        const ClassSet back = class_set_from_json(Json::parse(text), O);
        REQUIRE(back.size() == cs.size());
        for (std::size_t k = 0; k < cs.size(); ++k) {
            CHECK(back.classes[k].triple == cs.classes[k].triple);
            CHECK(back.classes[k].weight.value == cs.classes[k].weight.value);
            CHECK(back.classes[k].ideal == cs.classes[k].ideal);
        }
        CHECK(dump(to_json(back)) == text);
    }
}

TEST_CASE("class set reader rejects inconsistent data") {
    auto O = build_maximal_order(23);
    Json j = to_json(enumerate_class_set(23));
    SUBCASE("weight") {
        j["classes"][0]["w"] = 5;
        CHECK_THROWS(class_set_from_json(j, O));
    }
    SUBCASE("order of triples") {
        std::swap(j["classes"][0], j["classes"][1]);
        CHECK_THROWS(class_set_from_json(j, O));
    }
    SUBCASE("missing class") {
        j["classes"].erase(2);
        CHECK_THROWS(class_set_from_json(j, O));
    }
    SUBCASE("ideal not stable") {
        j["classes"][1]["ideal"][0][0] = 1;
        j["classes"][1]["ideal"][0][1] = 0;
        j["classes"][1]["ideal"][0][2] = 0;
        j["classes"][1]["ideal"][0][3] = 0;
        CHECK_THROWS(class_set_from_json(j, O));
    }
}

TEST_CASE("Brandt and spectrum round trips") {
    Workspace ws(61, std::nullopt);
    for (std::int64_t p : {2, 3}) {
        const auto& B = ws.brandt(p);
        const BrandtMatrix back = brandt_from_json(Json::parse(dump(to_json(B))));
        CHECK(back.N == B.N);
        CHECK(back.p == B.p);
        CHECK(back.h == B.h);
        CHECK(back.triplets == B.triplets);
        CHECK(back.weights == B.weights);
    }
    auto jb = ws.spectrum({2, 3});
    const JointEigenbasis back = spectrum_from_json(Json::parse(dump(to_json(*jb))));
    CHECK(back.primes == jb->primes);
    CHECK(back.lambda == jb->lambda);
    CHECK(back.z == jb->z);
    CHECK(back.vectors == jb->vectors);
    CHECK(back.eisenstein == jb->eisenstein);
    CHECK(separation(back).epsilon == separation(*jb).epsilon);
}

TEST_CASE("order report") {
    auto O = build_maximal_order(23);
    const Json j = to_json(*O);
    CHECK(j.at("N") == 23);
    CHECK(rational_from_json(j.at("reduced_discriminant")) == 23);
    CHECK(j.contains("basis"));
    CHECK(j.contains("extremality_witness"));
}

TEST_CASE("cache reuse, stale versions and corruption") {
    TempDir tmp;
    std::vector<std::string> warnings;
    auto warn = [&](const std::string& s) { warnings.push_back(s); };
    const fs::path dir = tmp.path / "37";

    std::string cs_text, b_text, s_text;
    {
        Workspace ws(37, tmp.path, 1, warn);
        ws.spectrum({2, 3});
        cs_text = slurp(dir / "classset.json");
        b_text = slurp(dir / "brandt-2.json");
        s_text = slurp(dir / "spectrum.json");
    }
    CHECK(warnings.empty());
    CHECK(!cs_text.empty());
    CHECK(fs::exists(dir / "brandt-3.json"));
    for (const auto& e : fs::directory_iterator(dir)) CHECK(e.path().extension() != ".tmp");

    {
        // A warm cache is read back without warnings and produces the same results.
        Workspace ws(37, tmp.path, 1, warn);
        auto jb = ws.spectrum({2, 3});
        CHECK(warnings.empty());
        CHECK(ws.class_set().size() == 3);
        CHECK(slurp(dir / "spectrum.json") == s_text);
    }

    Json stale = Json::parse(cs_text);
    stale["format_version"] = kFormatVersion + 1;
    spit(dir / "classset.json", dump(stale));
    spit(dir / "brandt-2.json", b_text.substr(0, b_text.size() / 2));
    Json bad_spectrum = Json::parse(s_text);
    bad_spectrum["lambda"][0][0] = 100.0;
    spit(dir / "spectrum.json", dump(bad_spectrum));
    {
        Workspace ws(37, tmp.path, 1, warn);
        ws.spectrum({2, 3});
    }
    CHECK(warnings.size() == 3);
    // Rebuilt files are byte-identical to the originals.
    CHECK(slurp(dir / "classset.json") == cs_text);
    CHECK(slurp(dir / "brandt-2.json") == b_text);
    CHECK(slurp(dir / "spectrum.json") == s_text);

    warnings.clear();
    Json tampered = Json::parse(b_text);
    tampered["triplets"][0][2] = 99;
    spit(dir / "brandt-2.json", dump(tampered));
    {
        Workspace ws(37, tmp.path, 1, warn);
        CHECK(ws.brandt(2).column_sums() == std::vector<std::int64_t>{3, 3, 3});
    }
    CHECK(warnings.size() == 1);
}

TEST_CASE("default cache directory honours the environment") {
    ::setenv("QMONEY_CACHE_DIR", "/tmp/somewhere", 1);
    CHECK(default_cache_dir() == fs::path("/tmp/somewhere"));
    ::unsetenv("QMONEY_CACHE_DIR");
    CHECK(default_cache_dir() == fs::path(".qmoney-cache"));
}
