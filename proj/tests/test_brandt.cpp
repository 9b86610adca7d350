#include "doctest.h"

#include <Eigen/Eigenvalues>
#include <cmath>

#include "oracles.hpp"
#include "qmoney/brandt.hpp"
#include "qmoney/cache.hpp"
#include "qmoney/errors.hpp"

using namespace qm;

namespace {

// Counts p-neighbors of each class directly: the neighbors of I_j in the class of
// I_i are I_i y with y in I_i^-1 I_j of norm p m_j / m_i, modulo units of O_R(I_i).
Eigen::MatrixXd brandt_by_counting(const ClassSet& cs, std::int64_t p) {
    const auto h = static_cast<Eigen::Index>(cs.size());
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(h, h);
    for (Eigen::Index i = 0; i < h; ++i) {
        const LeftIdeal& Ii = cs.classes[i].ideal;
        const LeftIdeal inv = ideal_inverse(Ii);
        for (Eigen::Index j = 0; j < h; ++j) {
            const LeftIdeal& Ij = cs.classes[j].ideal;
            const Rational target = Rational(p * Ij.norm()) / Ii.norm();
            long pairs = 0;
            for (const auto& y : elements_up_to(ideal_product(inv, Ij), target)) pairs += nrd(y) == target;
            M(i, j) = 2.0 * pairs / unit_count(*right_order(Ii));
        }
    }
    return M;
}

std::vector<double> sorted_eigenvalues(const Eigen::MatrixXd& T) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
    std::vector<double> v(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
    std::sort(v.begin(), v.end());
    return v;
}

}  // namespace

TEST_CASE("N = 11, p = 2") {
    Workspace ws(11, std::nullopt);
    const auto& B = ws.brandt(2);
    CHECK(B.h == 2);
    CHECK(B.triplets == std::vector<std::array<std::int64_t, 3>>{{0, 1, 2}, {1, 0, 3}, {1, 1, 1}});
    CHECK(B.column_sums() == std::vector<std::int64_t>{3, 3});
    const auto ev = sorted_eigenvalues(ws.normalized(2).T);
    CHECK(ev[0] == doctest::Approx(-2).epsilon(1e-12));
    CHECK(ev[1] == doctest::Approx(3).epsilon(1e-12));
}

TEST_CASE("the eigenvalue on V_11 matches the weight 2 newform of level 11") {
    const auto a = oracle::eta_11_coefficients(20);
    CHECK(a[2] == -2);
    CHECK(a[3] == -1);
    CHECK(a[5] == 1);
    CHECK(a[7] == -2);
    Workspace ws(11, std::nullopt);
    for (std::int64_t p : {2, 3, 5, 7, 13, 17, 19}) {
        const auto& T = ws.normalized(p);
        const Eigen::VectorXd v = project_VN(T.distinguished, Eigen::VectorXd::Unit(2, 0)).normalized();
        CHECK((T.T * v).dot(v) == doctest::Approx(static_cast<double>(a[p])).epsilon(1e-10));
    }
}

TEST_CASE("Brandt matrices agree with direct neighbor counting") {
    for (std::int64_t N : {11, 13, 23, 37, 41, 59, 61, 67, 101}) {
        Workspace ws(N, std::nullopt);
        const auto& cs = ws.class_set();
        for (std::int64_t p : {2, 3, 5, 7}) {
            if (p == N) continue;
            CAPTURE(N);
            CAPTURE(p);
            const Eigen::MatrixXd direct = brandt_by_counting(cs, p);
            const Eigen::MatrixXd B = ws.brandt(p).dense();
            CHECK((B - direct).cwiseAbs().maxCoeff() == 0.0);
        }
    }
}

TEST_CASE("structural invariants of T'(p) and T(p)") {
    const auto tol = default_tolerances();
    for (std::int64_t N : {11, 13, 17, 23, 37, 47, 61, 71, 73, 97, 103, 109}) {
        Workspace ws(N, std::nullopt);
        const auto& cs = ws.class_set();
        const auto h = static_cast<Eigen::Index>(cs.size());
        Eigen::VectorXd w(h);
        for (Eigen::Index k = 0; k < h; ++k) w[k] = cs.classes[k].weight.value;
        std::vector<const NormalizedBrandt*> Ts;
        for (std::int64_t p : {2, 3, 5, 7}) {
            if (p == N) continue;
            CAPTURE(N);
            CAPTURE(p);
            const auto& B = ws.brandt(p);
            for (auto s : B.column_sums()) CHECK(s == p + 1);
            std::vector<int> per_col(h, 0);
            for (const auto& t : B.triplets) {
                CHECK(t[2] > 0);
                ++per_col[t[1]];
            }
            for (int c : per_col) CHECK(c <= p + 1);

            // The all-(1/w) vector is fixed by T'(p) with eigenvalue p + 1.
            const Eigen::VectorXd inv_w = w.cwiseInverse();
            CHECK((B.dense() * inv_w - (p + 1.0) * inv_w).norm() < 1e-12);

            const auto& T = ws.normalized(p);
            Ts.push_back(&T);
            CHECK((T.T - T.T.transpose()).cwiseAbs().maxCoeff() < tol.symmetry);
            CHECK(T.matches_inv_sqrt_w);
            CHECK(T.forward_orientation);
            // T = W T' W^-1 with W = diag(sqrt(w)).
            const Eigen::VectorXd sw = w.cwiseSqrt();
            const Eigen::MatrixXd expect = sw.asDiagonal() * B.dense() * sw.cwiseInverse().asDiagonal();
            CHECK((T.T - expect).cwiseAbs().maxCoeff() < 1e-12);
            CHECK((T.T * T.distinguished - (p + 1.0) * T.distinguished).norm() < tol.eisenstein);

            // Ramanujan bound on V_N.
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T.T);
            int top = 0;
            for (Eigen::Index k = 0; k < h; ++k) {
                const double lam = es.eigenvalues()[k];
                if (std::abs(lam - (p + 1)) < 1e-8) {
                    ++top;
                    continue;
                }
                CHECK(std::abs(lam) <= 2 * std::sqrt(double(p)) + tol.ramanujan);
            }
            CHECK(top == 1);
            if (N % 12 == 1) CHECK((T.T - B.dense()).cwiseAbs().maxCoeff() == 0.0);
        }
        for (std::size_t a = 0; a < Ts.size(); ++a)
            for (std::size_t b = a + 1; b < Ts.size(); ++b) {
                const Eigen::MatrixXd C = Ts[a]->T * Ts[b]->T - Ts[b]->T * Ts[a]->T;
                CHECK(C.cwiseAbs().maxCoeff() < tol.commutation * h);
            }
        // All distinguished vectors span the same line.
        for (const auto* T : Ts) CHECK(std::abs(T->distinguished.dot(Ts[0]->distinguished)) == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("project_VN") {
    Rng rng(5);
    Workspace ws(61, std::nullopt);
    const auto& T = ws.normalized(3);
    const auto h = T.T.rows();
    for (int t = 0; t < 20; ++t) {
        Eigen::VectorXd v(h);
        for (auto& x : v) x = rng.normal();
        const Eigen::VectorXd pv = project_VN(T.distinguished, v);
        CHECK(std::abs(pv.dot(T.distinguished)) < 1e-12);
        CHECK((project_VN(T.distinguished, pv) - pv).norm() < 1e-12);
        CHECK(((v - pv) - v.dot(T.distinguished) * T.distinguished).norm() < 1e-12);
        // V_N is T-stable.
        CHECK(std::abs((T.T * pv).dot(T.distinguished)) < 1e-10);
    }
}

TEST_CASE("neighbors and coprime representatives") {
    auto O = build_maximal_order(23);
    EncodingContext ctx(O);
    auto cs = enumerate_class_set(ctx);
    for (const auto& c : cs.classes) {
        for (std::int64_t p : {2, 3, 5}) {
            const LeftIdeal J = coprime_representative(c.ideal, p);
            CHECK(J.integral());
            CHECK(Rational(J.norm()).get_den() == 1);
            CHECK(J.norm().get_num() % p != 0);
            CHECK(canonical_encode(J, ctx) == c.triple);
            const auto nb = p_neighbors(J, p, ctx);
            CHECK(nb.size() == static_cast<std::size_t>(p + 1));
            for (const auto& t : nb) CHECK(cs.index_of(t) >= 0);
        }
    }
}

TEST_CASE("parallel construction is deterministic") {
    auto O = build_maximal_order(97);
    EncodingContext ctx(O);
    auto cs = enumerate_class_set(ctx);
    for (std::int64_t p : {2, 5}) CHECK(brandt_matrix(cs, p, ctx, 1).triplets == brandt_matrix(cs, p, ctx, 3).triplets);
}

TEST_CASE("p = N is rejected") {
    auto O = build_maximal_order(11);
    EncodingContext ctx(O);
    auto cs = enumerate_class_set(ctx);
    CHECK_THROWS_AS(brandt_matrix(cs, 11, ctx), UsageError);
    CHECK_THROWS(brandt_matrix(cs, 4, ctx));
}
