#include "doctest.h"

#include <cmath>
#include <numeric>

#include "qmoney/cache.hpp"
#include "qmoney/errors.hpp"
#include "qmoney/spectral.hpp"

using namespace qm;

namespace {

Workspace& workspace(std::int64_t N) {
    static std::map<std::int64_t, std::unique_ptr<Workspace>> pool;
    auto& slot = pool[N];
    if (!slot) slot = std::make_unique<Workspace>(N, std::nullopt);
    return *slot;
}

}  // namespace

TEST_CASE("default prime lists") {
    CHECK(default_primes(547) == std::vector<std::int64_t>{2, 3, 5, 7});
    CHECK(default_primes(23) == std::vector<std::int64_t>{2, 3});
    CHECK(default_primes(5) == std::vector<std::int64_t>{2});
    CHECK(default_primes(12613) == std::vector<std::int64_t>{2, 3, 5, 7, 11, 13});
    CHECK(default_primes(12613, PrimeRule::below_floor_log2) == std::vector<std::int64_t>{2, 3, 5, 7, 11});
    CHECK(default_primes(547, PrimeRule::below_floor_log2) == default_primes(547));
    CHECK(default_primes(7) == std::vector<std::int64_t>{2});
    // log2(3) < 2, so no prime qualifies.
    CHECK_THROWS_AS(default_primes(3), UsageError);
}

TEST_CASE("Plancherel density is a probability measure on [-2, 2]") {
    for (std::int64_t p : {2, 3, 5, 7, 11, 13}) {
        CHECK(mu_cdf(p, -2.0) == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(mu_cdf(p, 2.0) == doctest::Approx(1.0).epsilon(1e-6));
        // Independent midpoint rule on the density.
        const int n = 200000;
        double s = 0;
        for (int k = 0; k < n; ++k) s += mu_density(p, -2.0 + 4.0 * (k + 0.5) / n);
        CHECK(s * 4.0 / n == doctest::Approx(1.0).epsilon(1e-6));
        CHECK(mu_density(p, 2.5) == 0.0);
        double prev = 0;
        for (double x = -2; x <= 2; x += 0.25) {
            const double F = mu_cdf(p, x);
            CHECK(F >= prev - 1e-12);
            prev = F;
        }
        CHECK(mu_cdf(p, 0.0) == doctest::Approx(0.5).epsilon(1e-9));
    }
}

TEST_CASE("joint eigenbasis at N = 547") {
    auto& ws = workspace(547);
    const auto primes = default_primes(547);
    auto jb = ws.spectrum(primes);
    const auto h = static_cast<Eigen::Index>(ws.class_set().size());
    REQUIRE(jb->vectors.rows() == h);
    CHECK(jb->vectors.cols() == h - 1);
    CHECK(jb->dim() == static_cast<std::size_t>(h - 1));
    const auto tol = default_tolerances();
    const Eigen::MatrixXd G = jb->vectors.transpose() * jb->vectors;
    CHECK((G - Eigen::MatrixXd::Identity(h - 1, h - 1)).cwiseAbs().maxCoeff() < tol.orthonormality);
    CHECK(jb->vectors.transpose().operator*(jb->eisenstein).cwiseAbs().maxCoeff() < 1e-9);
    for (std::size_t j = 0; j < primes.size(); ++j) {
        const auto& T = ws.normalized(primes[j]).T;
        for (Eigen::Index i = 0; i < h - 1; ++i) {
            const double lam = jb->lambda[i][j];
            CHECK((T * jb->vectors.col(i) - lam * jb->vectors.col(i)).norm() < tol.residual);
            CHECK(std::abs(lam - (primes[j] + 1)) > 1e-3);
            CHECK(std::abs(lam) <= 2 * std::sqrt(double(primes[j])) + tol.ramanujan);
            const Complex z = jb->z[i][j];
            CHECK(std::abs(z - std::polar(1.0, lam / std::sqrt(double(primes[j])))) < 1e-14);
        }
    }
    // Tuples are sorted.
    for (std::size_t i = 1; i < jb->dim(); ++i) CHECK(jb->lambda[i - 1] <= jb->lambda[i]);
}

TEST_CASE("eigenvalues are stable under a different combination seed") {
    auto& ws = workspace(547);
    const auto primes = default_primes(547);
    auto a = ws.spectrum(primes, 1), b = ws.spectrum(primes, 99);
    REQUIRE(a->dim() == b->dim());
    for (std::size_t j = 0; j < primes.size(); ++j) {
        std::vector<double> x, y;
        for (std::size_t i = 0; i < a->dim(); ++i) {
            x.push_back(a->lambda[i][j]);
            y.push_back(b->lambda[i][j]);
        }
        std::sort(x.begin(), x.end());
        std::sort(y.begin(), y.end());
        for (std::size_t i = 0; i < x.size(); ++i) CHECK(std::abs(x[i] - y[i]) < 1e-7);
    }
    CHECK(separation(*a).epsilon == doctest::Approx(separation(*b).epsilon).epsilon(1e-9));
}

TEST_CASE("separation depends only on the tuples") {
    auto& ws = workspace(547);
    JointEigenbasis jb = *ws.spectrum(default_primes(547));
    const double eps = separation(jb).epsilon;
    Rng rng(3);
    for (Eigen::Index c = 0; c < jb.vectors.cols(); ++c)
        if (rng.below(2)) jb.vectors.col(c) *= -1.0;
    std::vector<std::size_t> perm(jb.dim());
    std::iota(perm.begin(), perm.end(), 0);
    for (std::size_t k = perm.size(); k > 1; --k) std::swap(perm[k - 1], perm[rng.below(k)]);
    auto lam = jb.lambda;
    auto z = jb.z;
    for (std::size_t k = 0; k < perm.size(); ++k) {
        jb.lambda[k] = lam[perm[k]];
        jb.z[k] = z[perm[k]];
    }
    CHECK(separation(jb).epsilon == eps);
    const auto s = separation(jb);
    CHECK(tuple_distance(jb.z[s.i], jb.z[s.k]) == eps);
    CHECK_FALSE(s.duplicate);

    // A duplicated tuple is flagged with epsilon 0.
    jb.z[1] = jb.z[0];
    jb.lambda[1] = jb.lambda[0];
    const auto d = separation(jb);
    CHECK(d.duplicate);
    CHECK(d.epsilon == 0.0);
}

TEST_CASE("the distinguished tuple does not change the table values") {
    for (std::int64_t N : {547, 659}) {
        auto jb = workspace(N).spectrum(default_primes(N));
        CHECK(separation(*jb, true).epsilon == separation(*jb, false).epsilon);
    }
}

TEST_CASE("Serre diagnostic") {
    auto jb = workspace(547).spectrum(default_primes(547));
    for (std::size_t j = 0; j < jb->primes.size(); ++j) {
        const auto d = serre_diagnostic(*jb, j);
        CHECK(d.bins.size() == 20);
        CHECK(std::accumulate(d.bins.begin(), d.bins.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(std::accumulate(d.predicted.begin(), d.predicted.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-6));
        CHECK(d.ks >= 0.0);
        CHECK(d.ks <= 1.0);
        MESSAGE("N=547 p=" << d.p << " sup-distance " << d.ks);
    }
}

TEST_CASE("N = 12613: the published value uses primes below floor(log2 N)") {
    auto& ws = workspace(12613);
    CHECK(ws.class_set().size() == 1051);
    auto floor_rule = ws.spectrum(default_primes(12613, PrimeRule::below_floor_log2));
    CHECK(std::abs(separation(*floor_rule).epsilon - 0.09017383560136713) < 1e-6);
    // Primes strictly below log2 N also include 13, which separates the spectrum further.
    auto strict = ws.spectrum(default_primes(12613));
    CHECK(std::abs(separation(*strict).epsilon - 0.324086475928027) < 1e-6);
    MESSAGE("N=12613 p=2 sup-distance " << serre_diagnostic(*strict, 0).ks);
}
