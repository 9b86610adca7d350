#include "qmoney/modmat.hpp"

#include <algorithm>
#include <set>

#include "qmoney/errors.hpp"

namespace qm {

std::int64_t mod(std::int64_t x, std::int64_t m) {
    std::int64_t r = x % m;
    return r < 0 ? r + m : r;
}

std::int64_t mulmod(std::int64_t x, std::int64_t y, std::int64_t m) {
    return mod(static_cast<std::int64_t>(static_cast<__int128>(x) * y % m), m);
}

std::int64_t gcd(std::int64_t x, std::int64_t y) {
    x = x < 0 ? -x : x;
    y = y < 0 ? -y : y;
    while (y != 0) {
        std::int64_t t = x % y;
        x = y;
        y = t;
    }
    return x;
}

namespace {

// Extended Euclid: returns g = gcd(a, b) >= 0 with a u + b v = g.
std::int64_t xgcd(std::int64_t a, std::int64_t b, std::int64_t& u, std::int64_t& v) {
    std::int64_t u0 = 1, v0 = 0, u1 = 0, v1 = 1;
    while (b != 0) {
        std::int64_t q = a / b;
        std::int64_t t = a - q * b;
        a = b;
        b = t;
        t = u0 - q * u1;
        u0 = u1;
        u1 = t;
        t = v0 - q * v1;
        v0 = v1;
        v1 = t;
    }
    if (a < 0) {
        a = -a;
        u0 = -u0;
        v0 = -v0;
    }
    u = u0;
    v = v0;
    return a;
}

}  // namespace

std::int64_t invmod(std::int64_t x, std::int64_t m) {
    if (m == 1) return 0;
    std::int64_t u, v;
    if (xgcd(mod(x, m), m, u, v) != 1) throw UsageError("not a unit modulo " + std::to_string(m));
    return mod(u, m);
}

std::int64_t crt(std::int64_t r1, std::int64_t m1, std::int64_t r2, std::int64_t m2) {
    std::int64_t u, v;
    std::int64_t g = xgcd(m1, m2, u, v);
    if (mod(r2 - r1, g) != 0) throw UsageError("inconsistent congruences");
    std::int64_t l = m1 / g * m2;
    // x = r1 + m1 * ((r2 - r1) / g * u mod m2/g)
    std::int64_t t = mulmod((r2 - r1) / g, u, m2 / g);
    return mod(r1 + static_cast<std::int64_t>(static_cast<__int128>(m1) * t % l), l);
}

ResidueMatrix ResidueMatrix::make(std::int64_t m, std::int64_t a, std::int64_t b, std::int64_t c,
                                  std::int64_t d) {
    if (m < 1) throw UsageError("modulus must be positive");
    ResidueMatrix r;
    r.m = m;
    r.e = {mod(a, m), mod(b, m), mod(c, m), mod(d, m)};
    return r;
}

ResidueMatrix ResidueMatrix::identity(std::int64_t m) { return make(m, 1, 0, 0, 1); }

ResidueMatrix ResidueMatrix::operator*(const ResidueMatrix& o) const {
    if (m != o.m) throw UsageError("residue matrices with different moduli");
    auto mm = [&](std::int64_t x, std::int64_t y) { return mulmod(x, y, m); };
    return make(m, mm(e[0], o.e[0]) + mm(e[1], o.e[2]), mm(e[0], o.e[1]) + mm(e[1], o.e[3]),
                mm(e[2], o.e[0]) + mm(e[3], o.e[2]), mm(e[2], o.e[1]) + mm(e[3], o.e[3]));
}

ResidueMatrix ResidueMatrix::operator+(const ResidueMatrix& o) const {
    if (m != o.m) throw UsageError("residue matrices with different moduli");
    return make(m, e[0] + o.e[0], e[1] + o.e[1], e[2] + o.e[2], e[3] + o.e[3]);
}

ResidueMatrix ResidueMatrix::scaled(std::int64_t s) const {
    s = mod(s, m);
    return make(m, mulmod(e[0], s, m), mulmod(e[1], s, m), mulmod(e[2], s, m), mulmod(e[3], s, m));
}

std::int64_t ResidueMatrix::det() const { return mod(mulmod(e[0], e[3], m) - mulmod(e[1], e[2], m), m); }
std::int64_t ResidueMatrix::trace() const { return mod(e[0] + e[3], m); }

ResidueMatrix SplitIso::apply(const IntVec4& x) const {
    ResidueMatrix r = ResidueMatrix::make(m, 0, 0, 0, 0);
    for (int k = 0; k < 4; ++k) {
        std::int64_t c = mpz_fdiv_ui(x[k].get_mpz_t(), static_cast<unsigned long>(m));
        if (c != 0) r = r + images[k].scaled(c);
    }
    return r;
}

std::array<std::int64_t, 4> SplitIso::preimage(const ResidueMatrix& target) const {
    if (target.m != m) throw UsageError("target matrix has the wrong modulus");
    IntMat4 A;
    for (int k = 0; k < 4; ++k)
        for (int s = 0; s < 4; ++s) A[k][s] = images[s].e[k];
    // Cramer's rule mod m.
    Integer D = det(A);
    std::int64_t dinv = invmod(mpz_fdiv_ui(D.get_mpz_t(), static_cast<unsigned long>(m)), m);
    std::array<std::int64_t, 4> x{};
    for (int s = 0; s < 4; ++s) {
        IntMat4 B = A;
        for (int k = 0; k < 4; ++k) B[k][s] = target.e[k];
        Integer Ds = det(B);
        x[s] = mulmod(static_cast<std::int64_t>(mpz_fdiv_ui(Ds.get_mpz_t(), static_cast<unsigned long>(m))),
                      dinv, m);
    }
    return x;
}

std::int64_t lift_coprime(std::int64_t m, std::int64_t e, std::int64_t r) {
    if (m < 1 || e < 1 || m % e != 0 || gcd(r, e) != 1)
        throw UsageError("lift_coprime requires e | m and gcd(r, e) = 1");
    // d_i = gcd(e^i, m) satisfies d_{i+1} = gcd(e d_i, m).
    std::int64_t d = gcd(e, m);
    while (true) {
        std::int64_t next = gcd(mulmod(d, e, m), m);
        if (next == d) break;
        d = next;
    }
    std::int64_t k = crt(mod(r, d), d, 1 % (m / d), m / d);
    return k == 0 ? m : k;
}

std::int64_t lift_crt(std::int64_t d, std::int64_t a, std::int64_t b) {
    if (d < 1 || b < 1 || a < 0) throw UsageError("lift_crt requires d, b >= 1 and a >= 0");
    if (gcd(gcd(d, a), b) != 1) throw UsageError("lift_crt requires gcd(d, a, b) = 1");
    std::int64_t e = gcd(d, b);
    std::int64_t cp = lift_coprime(d, e, a);
    return crt(mod(cp, d), d, mod(a, b), b);
}

SubgroupHnf subgroup_hnf(std::int64_t m, const std::vector<Pair>& gens) {
    std::vector<std::array<std::int64_t, 2>> rows;
    rows.push_back({m, 0});
    rows.push_back({0, m});
    for (const auto& g : gens) rows.push_back({mod(g.first, m), mod(g.second, m)});
    for (int col = 0; col < 2; ++col) {
        while (true) {
            size_t best = rows.size();
            for (size_t r = col; r < rows.size(); ++r) {
                if (rows[r][col] == 0) continue;
                if (best == rows.size() || std::llabs(rows[r][col]) < std::llabs(rows[best][col])) best = r;
            }
            std::swap(rows[col], rows[best]);
            bool done = true;
            for (size_t r = col + 1; r < rows.size(); ++r) {
                if (rows[r][col] == 0) continue;
                std::int64_t q = rows[r][col] / rows[col][col];
                rows[r][0] -= q * rows[col][0];
                rows[r][1] -= q * rows[col][1];
                if (rows[r][col] != 0) done = false;
            }
            if (done) break;
        }
        if (rows[col][col] < 0) {
            rows[col][0] = -rows[col][0];
            rows[col][1] = -rows[col][1];
        }
    }
    return SubgroupHnf{rows[0][0], mod(rows[0][1], rows[1][1]), rows[1][1]};
}

CyclicGen cyclic_generator(std::int64_t m, const std::vector<Pair>& gens) {
    SubgroupHnf h = subgroup_hnf(m, gens);
    if (h.g1 * h.g2 != m || gcd(gcd(h.g1, h.x), h.g2) != 1)
        throw InvariantError("subgroup is not cyclic of order " + std::to_string(m));
    return CyclicGen{m, h.g1, lift_crt(h.g1, h.x, h.g2)};
}

namespace {

using Vec = std::array<std::int64_t, 4>;
using Mat2 = std::array<std::int64_t, 4>;

// Arithmetic in O / qO through the integer structure constants.
struct OrderMod {
    std::int64_t q;
    std::int64_t C[4][4][4];
    Vec one;
    std::int64_t tr[4];
    std::int64_t T[4][4];  // exact trace form trd(w_r conj(w_s))

    OrderMod(const MaximalOrder& O, std::int64_t q_) : q(q_) {
        const auto& sc = O.structure_constants();
        for (int r = 0; r < 4; ++r)
            for (int s = 0; s < 4; ++s)
                for (int k = 0; k < 4; ++k)
                    C[r][s][k] = mpz_fdiv_ui(sc[r][s][k].get_mpz_t(), static_cast<unsigned long>(q));
        IntVec4 o = O.int_coords(Quaternion::scalar(O.params(), 1));
        for (int k = 0; k < 4; ++k) one[k] = mpz_fdiv_ui(o[k].get_mpz_t(), static_cast<unsigned long>(q));
        for (int k = 0; k < 4; ++k) tr[k] = mod(Rational(trd(O.basis()[k])).get_num().get_si(), q);
        const auto& g = O.lattice().gram();
        for (int r = 0; r < 4; ++r)
            for (int s = 0; s < 4; ++s) T[r][s] = Rational(2 * g[r][s]).get_num().get_si();
    }

    Vec mul(const Vec& x, const Vec& y) const {
        Vec z{0, 0, 0, 0};
        for (int r = 0; r < 4; ++r) {
            if (x[r] == 0) continue;
            for (int s = 0; s < 4; ++s) {
                if (y[s] == 0) continue;
                std::int64_t f = mulmod(x[r], y[s], q);
                for (int k = 0; k < 4; ++k) z[k] = mod(z[k] + mulmod(f, C[r][s][k], q), q);
            }
        }
        return z;
    }
    Vec lin(std::int64_t a, const Vec& x, std::int64_t b, const Vec& y) const {
        Vec z;
        for (int k = 0; k < 4; ++k) z[k] = mod(mulmod(a, x[k], q) + mulmod(b, y[k], q), q);
        return z;
    }
    std::int64_t trace(const Vec& x, std::int64_t p) const {
        std::int64_t t = 0;
        for (int k = 0; k < 4; ++k) t += x[k] * tr[k];
        return mod(t, p);
    }
    // nrd mod p for small non-negative coordinates.
    std::int64_t norm(const Vec& x, std::int64_t p) const {
        __int128 s = 0;
        for (int r = 0; r < 4; ++r)
            for (int c = 0; c < 4; ++c) s += static_cast<__int128>(x[r]) * x[c] * T[r][c];
        return mod(static_cast<std::int64_t>((s / 2) % p), p);
    }
};

Mat2 m2mul(const Mat2& a, const Mat2& b, std::int64_t q) {
    return {mod(mulmod(a[0], b[0], q) + mulmod(a[1], b[2], q), q),
            mod(mulmod(a[0], b[1], q) + mulmod(a[1], b[3], q), q),
            mod(mulmod(a[2], b[0], q) + mulmod(a[3], b[2], q), q),
            mod(mulmod(a[2], b[1], q) + mulmod(a[3], b[3], q), q)};
}

std::int64_t m2det(const Mat2& a, std::int64_t q) {
    return mod(mulmod(a[0], a[3], q) - mulmod(a[1], a[2], q), q);
}

Mat2 m2inv(const Mat2& a, std::int64_t q) {
    std::int64_t di = invmod(m2det(a, q), q);
    return {mulmod(a[3], di, q), mulmod(mod(-a[1], q), di, q), mulmod(mod(-a[2], q), di, q),
            mulmod(a[0], di, q)};
}

bool is_scalar_mod(const Mat2& a, std::int64_t p) {
    return a[1] % p == 0 && a[2] % p == 0 && (a[0] - a[3]) % p == 0;
}

// Element of O/pO (lex-first coordinates) whose characteristic polynomial has two
// distinct roots mod p, turned into an idempotent mod p.
Vec idempotent_mod_p(const OrderMod& R, std::int64_t p) {
    Vec c{0, 0, 0, 0};
    const std::int64_t q = R.q;
    for (std::int64_t n = 0; n < p * p * p * p; ++n) {
        std::int64_t t = n;
        for (int k = 3; k >= 0; --k) {
            c[k] = t % p;
            t /= p;
        }
        std::int64_t tr = R.trace(c, p), nr = R.norm(c, p);
        if (p == 2) {
            if (tr == 1 && nr == 0) return c;  // roots 0 and 1
            continue;
        }
        std::int64_t disc = mod(tr * tr - 4 * nr, p);
        if (disc == 0) continue;
        std::int64_t s = -1;
        for (std::int64_t y = 1; y < p; ++y)
            if (y * y % p == disc) { s = y; break; }
        if (s < 0) continue;
        // e = (x - r2) / (r1 - r2) with r1 - r2 = s and r2 = (tr - s) / 2.
        std::int64_t r2 = mulmod(mod(tr - s, p), invmod(2, p), p);
        std::int64_t sinv = invmod(s, p);
        Vec e = R.lin(1, c, mod(-r2, q), R.one);
        for (auto& x : e) x = mulmod(mod(x, p), sinv, p);
        return e;
    }
    throw InternalError("no split element found modulo " + std::to_string(p));
}

// Isomorphism O / p^r O -> M2(Z / p^r) in normalized form.
std::array<Mat2, 4> split_prime_power(const MaximalOrder& O, std::int64_t p, std::int64_t q) {
    OrderMod R(O, q);
    Vec e = idempotent_mod_p(R, p);
    // Hensel: e <- 3e^2 - 2e^3 converges to an idempotent mod q.
    for (int it = 0; it < 64; ++it) {
        Vec e2 = R.mul(e, e);
        if (e2 == e) break;
        Vec e3 = R.mul(e2, e);
        e = R.lin(3, e2, q - 2, e3);
    }
    if (R.mul(e, e) != e) throw InternalError("idempotent lift did not converge");

    // Basis v1 = e, v2 = w_k e of the left ideal (O/qO) e.
    Vec v1 = e, v2{};
    int k1 = -1, k2 = -1;
    for (int k = 0; k < 4 && k1 < 0; ++k) {
        Vec basis_k{0, 0, 0, 0};
        basis_k[k] = 1;
        Vec cand = R.mul(basis_k, e);
        for (int a = 0; a < 4 && k1 < 0; ++a)
            for (int b = a + 1; b < 4; ++b)
                if (mod(v1[a] * cand[b] - v1[b] * cand[a], p) != 0) {
                    v2 = cand;
                    k1 = a;
                    k2 = b;
                    break;
                }
    }
    if (k1 < 0) throw InternalError("left ideal basis not found");
    Mat2 minor{v1[k1], v2[k1], v1[k2], v2[k2]};
    Mat2 minv = m2inv(minor, q);
    auto solve = [&](const Vec& y) {
        std::int64_t a = mod(mulmod(minv[0], y[k1], q) + mulmod(minv[1], y[k2], q), q);
        std::int64_t b = mod(mulmod(minv[2], y[k1], q) + mulmod(minv[3], y[k2], q), q);
        if (R.lin(a, v1, b, v2) != y) throw InternalError("element outside the left ideal");
        return std::pair<std::int64_t, std::int64_t>(a, b);
    };
    std::array<Mat2, 4> img;
    for (int s = 0; s < 4; ++s) {
        Vec ws{0, 0, 0, 0};
        ws[s] = 1;
        auto c1 = solve(R.mul(ws, v1));
        auto c2 = solve(R.mul(ws, v2));
        img[s] = {c1.first, c2.first, c1.second, c2.second};
    }

    // Companion form for the first basis element that is not scalar mod p.
    int s0 = -1;
    for (int s = 0; s < 4; ++s)
        if (!is_scalar_mod(img[s], p)) { s0 = s; break; }
    if (s0 < 0) throw InternalError("all basis images are scalar");
    const Mat2& X = img[s0];
    Mat2 P{};
    bool found = false;
    for (const auto& w : std::array<std::array<std::int64_t, 2>, 3>{{{1, 0}, {0, 1}, {1, 1}}}) {
        std::int64_t x0 = mod(w[0] * X[0] + w[1] * X[2], q);
        std::int64_t x1 = mod(w[0] * X[1] + w[1] * X[3], q);
        P = {w[0], w[1], x0, x1};
        if (m2det(P, q) % p != 0) { found = true; break; }
    }
    if (!found) throw InternalError("no cyclic vector for the companion form");
    Mat2 Pinv = m2inv(P, q);
    for (auto& M : img) M = m2mul(m2mul(P, M, q), Pinv, q);

    // Lex-least remaining images under conjugation by units of Z[C].
    const std::int64_t t = mod(img[s0][0] + img[s0][3], q);
    const std::int64_t n = m2det(img[s0], q);
    std::array<Mat2, 4> best = img;
    bool have = false;
    std::vector<std::int64_t> best_key;
    for (std::int64_t alpha = 0; alpha < q; ++alpha)
        for (std::int64_t beta = 0; beta < q; ++beta) {
            std::int64_t d = mod(mulmod(alpha, alpha, q) + mulmod(mulmod(alpha, beta, q), t, q) +
                                     mulmod(mulmod(beta, beta, q), n, q),
                                 q);
            if (d % p == 0) continue;
            Mat2 U{alpha, beta, mod(-mulmod(beta, n, q), q), mod(alpha + mulmod(beta, t, q), q)};
            Mat2 Uinv = m2inv(U, q);
            std::array<Mat2, 4> cand;
            std::vector<std::int64_t> key;
            for (int s = 0; s < 4; ++s) {
                cand[s] = m2mul(m2mul(U, img[s], q), Uinv, q);
                if (s != s0) key.insert(key.end(), cand[s].begin(), cand[s].end());
            }
            if (!have || key < best_key) {
                have = true;
                best_key = key;
                best = cand;
            }
        }
    return best;
}

}  // namespace

SplitIso split_order(const MaximalOrder& O, std::int64_t m) {
    if (m < 1) throw UsageError("modulus must be positive");
    if (m % O.level() == 0) throw UsageError("the level divides the modulus");
    SplitIso iso;
    iso.m = m;
    for (auto& M : iso.images) M = ResidueMatrix::make(m, 0, 0, 0, 0);
    std::int64_t done = 1;
    auto primes = factor(m);
    if (m == 1) primes.clear();
    for (size_t i = 0; i < primes.size();) {
        std::int64_t p = primes[i], q = 1;
        while (i < primes.size() && primes[i] == p) {
            q *= p;
            ++i;
        }
        auto part = split_prime_power(O, p, q);
        for (int s = 0; s < 4; ++s)
            for (int k = 0; k < 4; ++k)
                iso.images[s].e[k] = crt(iso.images[s].e[k] % done, done, part[s][k], q);
        done *= q;
    }
    // Ring homomorphism on the basis and bijectivity.
    const auto& sc = O.structure_constants();
    for (int r = 0; r < 4; ++r)
        for (int s = 0; s < 4; ++s)
            if (iso.images[r] * iso.images[s] != iso.apply(sc[r][s]))
                throw InternalError("split isomorphism is not multiplicative");
    IntVec4 one = O.int_coords(Quaternion::scalar(O.params(), 1));
    if (iso.apply(one) != ResidueMatrix::identity(m)) throw InternalError("split map does not send 1 to 1");
    IntMat4 A;
    for (int k = 0; k < 4; ++k)
        for (int s = 0; s < 4; ++s) A[k][s] = iso.images[s].e[k];
    Integer D = det(A);
    if (gcd(mpz_fdiv_ui(D.get_mpz_t(), static_cast<unsigned long>(m)), m) != 1)
        throw InternalError("split map is not bijective");
    return iso;
}

std::vector<Pair> subgroup_generated(std::int64_t m, const std::vector<Pair>& gens) {
    std::set<Pair> seen{{0, 0}};
    std::vector<Pair> frontier{{0, 0}};
    while (!frontier.empty()) {
        std::vector<Pair> next;
        for (const auto& x : frontier)
            for (const auto& g : gens) {
                Pair y{mod(x.first + g.first, m), mod(x.second + g.second, m)};
                if (seen.insert(y).second) next.push_back(y);
            }
        frontier.swap(next);
    }
    return {seen.begin(), seen.end()};
}

std::vector<ResidueMatrix> subgroup_to_matrix_ideal(std::int64_t m, const std::vector<Pair>& H) {
    std::vector<ResidueMatrix> out;
    for (const auto& r1 : H)
        for (const auto& r2 : H) out.push_back(ResidueMatrix::make(m, r1.first, r1.second, r2.first, r2.second));
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<Pair> matrix_ideal_to_subgroup(std::int64_t m, const std::vector<ResidueMatrix>& ideal) {
    std::vector<Pair> rows;
    for (const auto& A : ideal) {
        rows.push_back({A.e[0], A.e[1]});
        rows.push_back({A.e[2], A.e[3]});
    }
    return subgroup_generated(m, rows);
}

}  // namespace qm
