#include "doctest.h"

#include <cmath>
#include <set>

#include "qmoney/errors.hpp"
#include "qmoney/lattice.hpp"
#include "qmoney/rng.hpp"

using namespace qm;

namespace {

IntMat4 random_positive_gram(Rng& rng) {
    // B B^T for a random integer B with nonzero determinant.
    for (;;) {
        IntMat4 B;
        for (auto& r : B)
            for (auto& x : r) x = static_cast<long>(rng.below(9)) - 4;
        if (det(B) == 0) continue;
        IntMat4 g;
        for (int r = 0; r < 4; ++r)
            for (int s = 0; s < 4; ++s) {
                g[r][s] = 0;
                for (int k = 0; k < 4; ++k) g[r][s] += B[r][k] * B[s][k];
            }
        return g;
    }
}

Integer value(const IntMat4& g, const IntVec4& x) {
    Integer v = 0;
    for (int r = 0; r < 4; ++r)
        for (int s = 0; s < 4; ++s) v += x[r] * g[r][s] * x[s];
    return v;
}

double box_volume(const IntMat4& g, const Integer& bound) {
    RatMat4 gr;
    for (int r = 0; r < 4; ++r)
        for (int s = 0; s < 4; ++s) gr[r][s] = Rational(g[r][s]);
    const RatMat4 gi = inverse(gr);
    double v = 1;
    for (int k = 0; k < 4; ++k) v *= 2 * std::sqrt(bound.get_d() * gi[k][k].get_d()) + 3;
    return v;
}

// Box enumeration: |x_k| <= sqrt(bound * (g^-1)_kk) covers every vector of value <= bound.
std::vector<gramalg::ShortVector> brute_short(const IntMat4& g, const Integer& bound) {
    RatMat4 gr;
    for (int r = 0; r < 4; ++r)
        for (int s = 0; s < 4; ++s) gr[r][s] = Rational(g[r][s]);
    const RatMat4 gi = inverse(gr);
    long lim[4];
    for (int k = 0; k < 4; ++k) lim[k] = static_cast<long>(std::sqrt(bound.get_d() * gi[k][k].get_d())) + 1;
    std::vector<gramalg::ShortVector> out;
    IntVec4 x;
    for (long a = -lim[0]; a <= lim[0]; ++a)
        for (long b = -lim[1]; b <= lim[1]; ++b)
            for (long c = -lim[2]; c <= lim[2]; ++c)
                for (long d = -lim[3]; d <= lim[3]; ++d) {
                    x = {a, b, c, d};
                    int first = 0;
                    while (first < 4 && x[first] == 0) ++first;
                    if (first == 4 || x[first] < 0) continue;
                    Integer v = value(g, x);
                    if (v <= bound) out.push_back({x, v});
                }
    std::sort(out.begin(), out.end(), [](const auto& p, const auto& q) {
        return p.value != q.value ? p.value < q.value : p.x < q.x;
    });
    return out;
}

}  // namespace

TEST_CASE("short vector enumeration matches a box search") {
    Rng rng(21);
    for (int t = 0; t < 25;) {
        IntMat4 g = random_positive_gram(rng);
        const Integer bound = g[0][0] + g[1][1];
        if (box_volume(g, bound) > 2e6) continue;
        ++t;
        auto fast = gramalg::short_vectors(g, bound);
        auto slow = brute_short(g, bound);
        REQUIRE(fast.size() == slow.size());
        for (std::size_t k = 0; k < fast.size(); ++k) {
            CHECK(fast[k].x == slow[k].x);
            CHECK(fast[k].value == slow[k].value);
        }
        auto mins = gramalg::minimal_vectors(g);
        REQUIRE(!mins.empty());
        CHECK(mins.front().value == slow.front().value);
    }
}

TEST_CASE("LLL is unimodular and preserves the form") {
    Rng rng(22);
    for (int t = 0; t < 25; ++t) {
        IntMat4 g = random_positive_gram(rng), h = g;
        IntMat4 U = gramalg::lll(h);
        CHECK((det(U) == 1 || det(U) == -1));
        // h = U g U^T
        for (int r = 0; r < 4; ++r)
            for (int s = 0; s < 4; ++s) {
                Integer v = 0;
                for (int a = 0; a < 4; ++a)
                    for (int b = 0; b < 4; ++b) v += U[r][a] * g[a][b] * U[s][b];
                CHECK(v == h[r][s]);
            }
        CHECK(det(h) == det(g));
    }
}

TEST_CASE("Minkowski reduction attains the successive minima") {
    Rng rng(23);
    for (int t = 0; t < 10; ++t) {
        IntMat4 g = random_positive_gram(rng);
        IntMat4 U = gramalg::minkowski(g);
        CHECK((det(U) == 1 || det(U) == -1));
        auto mins = gramalg::minimal_vectors(g);
        CHECK(value(g, U[0]) == mins.front().value);
        for (int k = 0; k + 1 < 4; ++k) CHECK(value(g, U[k]) <= value(g, U[k + 1]));
    }
}

TEST_CASE("Hermite normal form") {
    std::vector<IntVec4> rows = {{2, 4, 6, 8}, {0, 3, 0, 3}, {1, 1, 1, 1}, {0, 0, 5, 0}, {4, 4, 4, 4}};
    IntMat4 H = hnf(rows);
    for (int r = 0; r < 4; ++r) {
        CHECK(H[r][r] > 0);
        for (int c = 0; c < r; ++c) CHECK(H[r][c] == 0);
        for (int s = 0; s < r; ++s) CHECK((H[s][r] >= 0 && H[s][r] < H[r][r]));
    }
    // Every input row is an integral combination of the Hermite rows.
    RatMat4 Hr;
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) Hr[r][c] = Rational(H[r][c]);
    const RatMat4 Hi = inverse(Hr);
    for (const auto& row : rows)
        for (int c = 0; c < 4; ++c) {
            Rational x = 0;
            for (int k = 0; k < 4; ++k) x += Rational(row[k]) * Hi[k][c];
            CHECK(x.get_den() == 1);
        }
}

TEST_CASE("kernel mod p matches brute force") {
    Rng rng(24);
    for (int t = 0; t < 20; ++t) {
        const long p = (t % 2) ? 3 : 5;
        std::vector<IntVec4> cols(1 + t % 2);
        for (auto& c : cols)
            for (auto& x : c) x = static_cast<long>(rng.below(p));
        IntMat4 K = kernel_mod_p(cols, p);
        // Count residues x in (Z/p)^4 with x.A = 0; index of K in Z^4 equals p^4 / count.
        long count = 0;
        for (long a = 0; a < p; ++a)
            for (long b = 0; b < p; ++b)
                for (long c = 0; c < p; ++c)
                    for (long d = 0; d < p; ++d) {
                        bool ok = true;
                        for (const auto& col : cols) {
                            Integer s = a * col[0] + b * col[1] + c * col[2] + d * col[3];
                            if (s % p != 0) ok = false;
                        }
                        count += ok;
                    }
        CHECK(abs(det(K)) == Integer(p * p * p * p / count));
        for (const auto& row : K)
            for (const auto& col : cols) {
                Integer s = 0;
                for (int k = 0; k < 4; ++k) s += row[k] * col[k];
                CHECK(s % p == 0);
            }
    }
}

TEST_CASE("ideal lattice basics") {
    AlgebraParams P(-1, -3);
    std::array<Quaternion, 4> basis = {Quaternion(P, 1, 0, 0, 0), Quaternion(P, 0, 1, 0, 0),
                                       Quaternion(P, make_rational(1, 2), 0, make_rational(1, 2), 0),
                                       Quaternion(P, 0, make_rational(1, 2), 0, make_rational(1, 2))};
    IdealLattice L(basis);
    CHECK(L.denominator() == 2);
    CHECK(L.contains(Quaternion(P, 0, 0, 1, 0)));
    CHECK_FALSE(L.contains(Quaternion(P, make_rational(1, 2), 0, 0, 0)));
    CHECK(lattice_minimum(L) == 1);
    // Units of nrd 1: +-1, +-i, +-(1 +- j)/2, +-(i +- ij)/2 -> 6 pairs.
    CHECK(shortest_vectors(L).size() == 6);
    auto M = minkowski_reduce(L);
    CHECK(M.same_set(L));
    auto L2 = L.right_scaled(Quaternion(P, 1, 1, 0, 0));
    CHECK(index_in(L2, L) == 4);
    CHECK(exact_sqrt(make_rational(9, 4)) == make_rational(3, 2));
    CHECK_THROWS(exact_sqrt(Rational(2)));
    CHECK_THROWS(IdealLattice({basis[0], basis[0], basis[2], basis[3]}));
    CHECK(elements_up_to(L, 1).size() == 6);
}
