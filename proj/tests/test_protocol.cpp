#include "doctest.h"

#include <cmath>
#include <numbers>
#include <set>

#include "qmoney/cache.hpp"
#include "qmoney/errors.hpp"
#include "qmoney/protocol.hpp"
#include "qmoney/serialize.hpp"

using namespace qm;

namespace {

Workspace& ws547() {
    static Workspace ws(547, std::nullopt);
    return ws;
}

const PublicParams& pp547() {
    static const PublicParams pp = make_public_params(ws547().spectrum(default_primes(547)));
    return pp;
}

const HmacStubScheme& key() {
    static const HmacStubScheme k = HmacStubScheme::generate(7);
    return k;
}

// Upper 1% point of chi-square with df degrees of freedom (Wilson-Hilferty).
double chi2_crit_99(double df) {
    const double z = 2.3263478740408408;
    const double a = 2.0 / (9.0 * df);
    return df * std::pow(1.0 - a + z * std::sqrt(a), 3);
}

double chi2(const std::vector<std::size_t>& counts, double expected) {
    double s = 0;
    for (auto c : counts) s += (c - expected) * (c - expected) / expected;
    return s;
}

StateVector random_product_state(std::size_t h, Rng& rng) {
    Eigen::VectorXcd phi(static_cast<Eigen::Index>(h));
    for (auto& x : phi) x = Complex(rng.normal(), rng.normal());
    phi.normalize();
    StateVector s(phi.size() * phi.size());
    for (Eigen::Index a = 0; a < phi.size(); ++a)
        for (Eigen::Index b = 0; b < phi.size(); ++b) s(a * phi.size() + b) = phi(a) * phi(b);
    return s;
}

}  // namespace

TEST_CASE("signature stub") {
    const auto& k = key();
    const Bytes m = serial_bytes({Complex(0.6, 0.8)});
    const Bytes s = k.sign(m);
    CHECK(k.verify(m, s));
    CHECK(s == HmacStubScheme::generate(7).sign(m));
    CHECK_FALSE(HmacStubScheme::generate(8).verify(m, s));
    Bytes m2 = m;
    m2.back() ^= 1;
    CHECK_FALSE(k.verify(m2, s));
    CHECK(base64_decode(base64_encode(s)) == s);
    CHECK(base64_encode(Bytes{'f', 'o', 'o', 'b'}) == "Zm9vYg==");
}

TEST_CASE("public parameters") {
    const auto& pp = pp547();
    CHECK(pp.h() == ws547().class_set().size());
    CHECK(pp.t() == 4);
    CHECK(pp.epsilon > 0);
    const Eigen::MatrixXd G = pp.basis.transpose() * pp.basis;
    CHECK((G - Eigen::MatrixXd::Identity(pp.h(), pp.h())).cwiseAbs().maxCoeff() < 1e-9);
    for (std::size_t a = 0; a < pp.h(); ++a)
        for (std::size_t b = a + 1; b < pp.h(); ++b) CHECK(tuple_distance(pp.tuples[a], pp.tuples[b]) >= pp.epsilon);
    CHECK_THROWS_AS(make_public_params(pp.spectrum, pp.epsilon * 1.01), UsageError);
}

TEST_CASE("mint outputs bottom exactly for the distinguished outcome") {
    const auto& pp = pp547();
    const std::size_t h = pp.h();
    CHECK(1.0 / h <= 12.0 / 547);
    Rng rng(11);
    const std::size_t n = 50 * h;
    std::vector<std::size_t> counts(h, 0);
    std::size_t bottoms = 0;
    for (std::size_t s = 0; s < n; ++s) {
        auto r = mint(pp, key(), rng);
        ++counts[r.sampled_index];
        CHECK(r.bill.has_value() == (r.sampled_index != 0));
        bottoms += !r.bill;
    }
    CHECK(bottoms == counts[0]);
    // 50h draws: the bottom count is Binomial(50h, 1/h), mean 50.
    CHECK(std::abs(double(bottoms) - 50.0) < 4 * std::sqrt(50.0));
    CHECK(chi2(counts, 50.0) < chi2_crit_99(double(h - 1)));
}

TEST_CASE("mint then verify: 100 seeded bills") {
    const auto& pp = pp547();
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        Rng rng(seed);
        MintResult r;
        do r = mint(pp, key(), rng);
        while (!r.bill);
        const Bill& b = *r.bill;
        for (std::size_t j = 0; j < pp.t(); ++j) CHECK(std::abs(std::abs(b.serial[j]) - 1.0) < 1e-9);
        CHECK(tuple_distance(b.serial, pp.tuples[*b.index]) < pp.epsilon / 3);
        auto v1 = verify(pp, key(), b, rng);
        auto v2 = verify(pp, key(), v1.post, rng);
        CHECK(v1.accepted);
        CHECK(v2.accepted);
        CHECK(v1.post.serial == b.serial);
        CHECK(v2.post.serial == b.serial);
        CHECK(v1.k == *b.index);
        // Readout noise of eps/6 still fits the eps/3 to eps/2 slack.
        CHECK(verify(pp, key(), b, rng, -1.0).accepted);
    }
}

TEST_CASE("state-vector notes are unchanged by verification") {
    const auto& pp = pp547();
    Rng rng(5);
    for (int n = 0; n < 10; ++n) {
        MintResult r;
        do r = mint(pp, key(), rng, true);
        while (!r.bill);
        const StateVector& s = *r.bill->state;
        CHECK(std::abs(s.norm() - 1.0) < 1e-10);
        auto v = verify(pp, key(), *r.bill, rng);
        REQUIRE(v.accepted);
        CHECK(v.k == r.sampled_index);
        CHECK(v.l == r.sampled_index);
        CHECK(std::abs(std::abs(s.dot(*v.post.state)) - 1.0) < 1e-12);
        CHECK(std::abs(v.post.state->norm() - 1.0) < 1e-10);
    }
}

TEST_CASE("the prepared entangled state") {
    const std::size_t h = pp547().h();
    const StateVector s = entangled_class_state(h);
    CHECK(std::abs(s.norm() - 1.0) < 1e-12);
    for (std::size_t a = 0; a < h; ++a)
        for (std::size_t b = 0; b < h; ++b)
            CHECK(std::abs(s(a * h + b)) == doctest::Approx(a == b ? 1.0 / std::sqrt(double(h)) : 0.0));
}

TEST_CASE("tampering is rejected") {
    const auto& pp = pp547();
    Rng rng(17);
    MintResult r;
    do r = mint(pp, key(), rng);
    while (!r.bill);
    const Bill good = *r.bill;

    for (std::size_t byte = 0; byte < good.signature.size(); byte += 5) {
        Bill b = good;
        b.signature[byte] ^= 0x10;
        CHECK_FALSE(verify(pp, key(), b, rng).accepted);
    }
    for (std::size_t j = 0; j < pp.t(); ++j) {
        Bill b = good;
        // Put one entry at chord distance 0.6 eps from the note's true eigenvalue.
        b.serial[j] = pp.tuples[*good.index][j] * std::polar(1.0, 2.0 * std::asin(std::min(1.0, 0.3 * pp.epsilon)));
        CHECK_FALSE(verify(pp, key(), b, rng).accepted);  // stale signature
        b.signature = key().sign(serial_bytes(b.serial));
        auto v = verify(pp, key(), b, rng);
        CHECK_FALSE(v.accepted);
        CHECK(v.reason.find("window") != std::string::npos);
    }
    Bill wrong_dim = good;
    wrong_dim.index.reset();
    wrong_dim.state = StateVector::Zero(5);
    CHECK_THROWS_AS(verify(pp, key(), wrong_dim, rng), UsageError);
}

TEST_CASE("random product notes are rarely accepted") {
    const auto& pp = pp547();
    const std::size_t h = pp.h();
    Rng rng(23);
    const int trials = 1000;
    int accepted = 0;
    for (int t = 0; t < trials; ++t) {
        Bill b;
        b.state = random_product_state(h, rng);
        b.serial = pp.tuples[1 + rng.below(h - 1)];
        b.signature = key().sign(serial_bytes(b.serial));
        auto v = verify(pp, key(), b, rng);
        CHECK(std::abs(v.post.state->norm() - 1.0) < 1e-10);
        accepted += v.accepted;
        // An accepted note has collapsed onto the eigenstate named by its serial.
        if (v.accepted) CHECK(pp.tuples[v.k] == b.serial);
    }
    const double p = 2.0 / h;
    CHECK(double(accepted) / trials <= p + 3 * std::sqrt(p * (1 - p) / trials));
}

TEST_CASE("quantum lightning") {
    const auto& pp = pp547();
    Rng rng(31);
    const auto lp = make_lightning_params(pp, rng);
    CHECK(lp.delta < lp.epsilon / (10.0 * pp.t()));
    CHECK(lp.delta > 0);
    CHECK(lp.z.real() >= 0);
    CHECK(lp.z.real() < 1);
    CHECK(lp.z.imag() >= 0);
    CHECK(lp.z.imag() < 1);

    std::size_t attempts = 0;
    std::map<LightningSerial, std::size_t> owner;
    for (int s = 0; s < 100; ++s) {
        auto st = lightning_storm(pp, lp, rng);
        attempts += st.attempts;
        for (const auto& lam : st.rejected) CHECK(near_grid(lam, lp));
        CHECK(st.bolt.index_x == st.bolt.index_y);
        auto s1 = lightning_verify(pp, st.bolt, rng);
        auto s2 = lightning_verify(pp, st.bolt, rng);
        REQUIRE(s1);
        REQUIRE(s2);
        CHECK(*s1 == *s2);
        auto [it, fresh] = owner.emplace(*s1, st.bolt.index_x);
        if (!fresh) CHECK(it->second == st.bolt.index_x);
    }
    CHECK(100.0 / attempts >= 0.2);

    // Different eigenstates in the two registers are at distance >= 10 eps and fail.
    for (int n = 0; n < 20; ++n) {
        Bolt b{lp, 1 + rng.below(pp.h() - 1), 1 + rng.below(pp.h() - 1)};
        if (b.index_x == b.index_y) continue;
        CHECK(tuple_distance(pp.tuples[b.index_x], pp.tuples[b.index_y]) >= 10 * lp.epsilon);
        CHECK_FALSE(lightning_verify(pp, b, rng));
    }
}

TEST_CASE("lightning rejection band matches its geometric measure") {
    // For z uniform, each of the 2t real coordinates lands in the band with probability 4 delta / eps.
    const auto& pp = pp547();
    Rng rng(37);
    double mean = 0;
    const int draws = 400;
    double predicted = 0;
    for (int d = 0; d < draws; ++d) {
        const auto lp = make_lightning_params(pp, rng);
        predicted = std::pow(1.0 - 4.0 * lp.delta / lp.epsilon, 2.0 * pp.t());
        std::size_t ok = 0;
        for (std::size_t k = 1; k < pp.h(); ++k) ok += !near_grid(pp.tuples[k], lp);
        mean += double(ok) / double(pp.h() - 1);
    }
    mean /= draws;
    CHECK(predicted >= 0.2);
    CHECK(std::abs(mean - predicted) < 0.03);
}

TEST_CASE("birthday attack") {
    const auto& pp = pp547();
    const std::size_t h = pp.h();
    Rng rng(41);
    const auto budget = static_cast<std::size_t>(std::ceil(10 * std::sqrt(double(h))));
    auto a = birthday_attack(pp, budget, 200, rng);
    CHECK(a.runs == 200);
    CHECK(a.collided >= 198);

    auto one = birthday_attack(pp, 1, 200, rng);
    CHECK(one.collided == 0);
    for (auto f : one.first_collision) CHECK(f == 0);

    auto full = birthday_attack(pp, h + 1, 500, rng);
    CHECK(full.collided == 500);
    const double expect = std::sqrt(std::numbers::pi * h / 2.0);
    CHECK(full.mean_first_collision() >= 0.8 * expect);
    CHECK(full.mean_first_collision() <= 1.6 * expect);
}

TEST_CASE("entangled identity holds in every real orthonormal basis") {
    Rng rng(43);
    for (int t = 0; t < 20; ++t) {
        const auto n = static_cast<Eigen::Index>(2 + rng.below(59));
        const Eigen::MatrixXd R = random_orthogonal(n, rng);
        CHECK((R.transpose() * R - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff() < 1e-12);
        CHECK(entangled_identity_residual(R) <= 1e-10);
    }
    // A non-orthogonal basis breaks it.
    Eigen::MatrixXd S = Eigen::MatrixXd::Identity(3, 3);
    S(0, 1) = 0.5;
    CHECK(entangled_identity_residual(S) > 0.1);
}

TEST_CASE("double eigenstates are easy to produce") {
    const auto& pp = pp547();
    const std::size_t h = pp.h();
    Rng rng(47);
    const std::size_t n = 20 * h;
    std::vector<std::size_t> counts(h, 0);
    std::size_t repeats = 0;
    std::size_t prev = h;
    for (std::size_t s = 0; s < n; ++s) {
        auto d = double_eigenstate_demo(pp, rng);
        ++counts[d.index];
        CHECK(d.post_state_error < 1e-10);
        repeats += d.index == prev;
        prev = d.index;
    }
    CHECK(chi2(counts, 20.0) < chi2_crit_99(double(h - 1)));
    const double p = 1.0 / h;
    CHECK(std::abs(double(repeats) / (n - 1) - p) < 4 * std::sqrt(p * (1 - p) / (n - 1)));
}

TEST_CASE("triple overlap bound") {
    Rng rng(53);
    double c_max = 0;
    for (Eigen::Index m : {2, 4, 8, 16}) {
        const auto mc = triple_overlap_mc(m, m <= 4 ? 10000 : 2000, rng);
        MESSAGE("m=" << m << " estimate " << mc.mean << " +- " << mc.stderr_);
        CHECK(mc.mean <= 3.0 / m + 3 * mc.stderr_);
        c_max = std::max(c_max, mc.mean * m);
    }
    CHECK(c_max <= 3.0);

    // Aligned case: phi = b (x) b (x) b for a column b of the basis used.
    const Eigen::MatrixXd B = random_orthogonal(4, rng);
    double s = 0;
    for (Eigen::Index i = 0; i < 4; ++i) s += std::pow(B.col(i).dot(B.col(0)), 6);
    CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("entangled preparation succeeds often enough") {
    Rng rng(59);
    const auto st = prepare_entangled(ws547().class_set(), 10000, rng);
    const double bound = (1.0 - 1.0 / 547) / (32 * std::numbers::pi * std::numbers::pi);
    CHECK(st.bound == doctest::Approx(bound));
    CHECK(st.exact_probability >= bound);
    CHECK(st.empirical() >= bound);
    const double p = st.exact_probability;
    CHECK(std::abs(st.empirical() - p) < 4 * std::sqrt(p * (1 - p) / 10000));
    CHECK(st.fidelity_with_uniform > 0);
    CHECK(st.fidelity_with_uniform <= 1 + 1e-12);
}

TEST_CASE("bills round-trip through JSON") {
    const auto& pp = pp547();
    Rng rng(61);
    for (bool sv : {false, true}) {
        MintResult r;
        do r = mint(pp, key(), rng, sv);
        while (!r.bill);
        const Bill b = bill_from_json(Json::parse(dump(to_json(*r.bill, 547))));
        CHECK(b.serial == r.bill->serial);
        CHECK(b.signature == r.bill->signature);
        CHECK(b.index == r.bill->index);
        if (sv) CHECK((*b.state - *r.bill->state).norm() == 0.0);
        CHECK(verify(pp, key(), b, rng).accepted);
    }
}
