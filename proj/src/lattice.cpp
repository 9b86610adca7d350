#include "qmoney/lattice.hpp"

#include <algorithm>
#include <cmath>

#include "qmoney/errors.hpp"

namespace qm {

IntMat4 int_identity() {
    IntMat4 u;
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) u[r][c] = (r == c) ? 1 : 0;
    return u;
}

Integer det(const IntMat4& m) {
    // Bareiss fraction-free elimination.
    IntMat4 a = m;
    Integer prev = 1;
    int sign = 1;
    for (int k = 0; k < 3; ++k) {
        if (a[k][k] == 0) {
            int swap = -1;
            for (int r = k + 1; r < 4; ++r)
                if (a[r][k] != 0) { swap = r; break; }
            if (swap < 0) return 0;
            std::swap(a[k], a[swap]);
            sign = -sign;
        }
        for (int r = k + 1; r < 4; ++r) {
            for (int c = k + 1; c < 4; ++c) {
                Integer t = a[r][c] * a[k][k] - a[r][k] * a[k][c];
                mpz_divexact(t.get_mpz_t(), t.get_mpz_t(), prev.get_mpz_t());
                a[r][c] = t;
            }
        }
        prev = a[k][k];
    }
    return sign * a[3][3];
}

Rational det(const RatMat4& m) {
    RatMat4 a = m;
    Rational d = 1;
    for (int k = 0; k < 4; ++k) {
        int p = -1;
        for (int r = k; r < 4; ++r)
            if (a[r][k] != 0) { p = r; break; }
        if (p < 0) return 0;
        if (p != k) { std::swap(a[p], a[k]); d = -d; }
        d *= a[k][k];
        for (int r = k + 1; r < 4; ++r) {
            if (a[r][k] == 0) continue;
            Rational f = a[r][k] / a[k][k];
            for (int c = k; c < 4; ++c) a[r][c] -= f * a[k][c];
        }
    }
    return d;
}

RatMat4 inverse(const RatMat4& m) {
    RatMat4 a = m;
    RatMat4 inv;
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) inv[r][c] = (r == c) ? 1 : 0;
    for (int k = 0; k < 4; ++k) {
        int p = -1;
        for (int r = k; r < 4; ++r)
            if (a[r][k] != 0) { p = r; break; }
        if (p < 0) throw UsageError("singular 4x4 matrix");
        std::swap(a[p], a[k]);
        std::swap(inv[p], inv[k]);
        Rational piv = a[k][k];
        for (int c = 0; c < 4; ++c) { a[k][c] /= piv; inv[k][c] /= piv; }
        for (int r = 0; r < 4; ++r) {
            if (r == k || a[r][k] == 0) continue;
            Rational f = a[r][k];
            for (int c = 0; c < 4; ++c) {
                a[r][c] -= f * a[k][c];
                inv[r][c] -= f * inv[k][c];
            }
        }
    }
    return inv;
}

IntMat4 mul(const IntMat4& x, const IntMat4& y) {
    IntMat4 z;
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) {
            z[r][c] = 0;
            for (int k = 0; k < 4; ++k) z[r][c] += x[r][k] * y[k][c];
        }
    return z;
}

IntVec4 row_times(const IntVec4& x, const IntMat4& m) {
    IntVec4 out;
    for (int c = 0; c < 4; ++c) {
        out[c] = 0;
        for (int k = 0; k < 4; ++k)
            if (x[k] != 0) out[c] += x[k] * m[k][c];
    }
    return out;
}

static void row_axpy(IntVec4& dst, const Integer& f, const IntVec4& src) {
    for (int c = 0; c < 4; ++c) dst[c] -= f * src[c];
}

IntMat4 hnf(std::vector<IntVec4> rows) {
    const size_t n = rows.size();
    if (n < 4) throw UsageError("fewer than four generators for a rank-4 lattice");
    for (size_t col = 0; col < 4; ++col) {
        // Euclid on column `col` among rows col..n-1.
        while (true) {
            size_t best = n;
            for (size_t r = col; r < n; ++r) {
                if (rows[r][col] == 0) continue;
                if (best == n || abs(rows[r][col]) < abs(rows[best][col])) best = r;
            }
            if (best == n) throw UsageError("generators span a lattice of rank < 4");
            std::swap(rows[col], rows[best]);
            bool done = true;
            for (size_t r = col + 1; r < n; ++r) {
                if (rows[r][col] == 0) continue;
                Integer q;
                mpz_fdiv_q(q.get_mpz_t(), rows[r][col].get_mpz_t(), rows[col][col].get_mpz_t());
                row_axpy(rows[r], q, rows[col]);
                if (rows[r][col] != 0) done = false;
            }
            if (done) break;
        }
        if (rows[col][col] < 0)
            for (auto& e : rows[col]) e = -e;
        for (size_t r = 0; r < col; ++r) {
            Integer q;
            mpz_fdiv_q(q.get_mpz_t(), rows[r][col].get_mpz_t(), rows[col][col].get_mpz_t());
            if (q != 0) row_axpy(rows[r], q, rows[col]);
        }
    }
    return IntMat4{rows[0], rows[1], rows[2], rows[3]};
}

IntMat4 kernel_mod_p(const std::vector<IntVec4>& columns, const Integer& p) {
    // Row-reduce [A | I] mod p; identity parts of zero rows span the kernel mod p.
    const size_t k = columns.size();
    std::vector<std::vector<Integer>> rows(4, std::vector<Integer>(k + 4));
    for (int r = 0; r < 4; ++r) {
        for (size_t c = 0; c < k; ++c) {
            Integer v = columns[c][r] % p;
            if (v < 0) v += p;
            rows[r][c] = v;
        }
        for (int c = 0; c < 4; ++c) rows[r][k + c] = (r == c) ? 1 : 0;
    }
    size_t lead = 0;
    for (size_t c = 0; c < k && lead < 4; ++c) {
        size_t piv = lead;
        while (piv < 4 && rows[piv][c] == 0) ++piv;
        if (piv == 4) continue;
        std::swap(rows[piv], rows[lead]);
        Integer inv;
        mpz_invert(inv.get_mpz_t(), rows[lead][c].get_mpz_t(), p.get_mpz_t());
        for (auto& e : rows[lead]) e = (e * inv) % p;
        for (size_t r = 0; r < 4; ++r) {
            if (r == lead || rows[r][c] == 0) continue;
            Integer f = rows[r][c];
            for (size_t j = 0; j < k + 4; ++j) {
                rows[r][j] = (rows[r][j] - f * rows[lead][j]) % p;
                if (rows[r][j] < 0) rows[r][j] += p;
            }
        }
        ++lead;
    }
    std::vector<IntVec4> gens;
    for (size_t r = lead; r < 4; ++r) {
        IntVec4 v;
        for (int c = 0; c < 4; ++c) v[c] = rows[r][k + c];
        gens.push_back(v);
    }
    for (int c = 0; c < 4; ++c) {
        IntVec4 v;
        for (int j = 0; j < 4; ++j) v[j] = (j == c) ? p : Integer(0);
        gens.push_back(v);
    }
    return hnf(std::move(gens));
}

namespace gramalg {

namespace {

struct Gso {
    std::array<Rational, 4> B;  // squared lengths of the orthogonalized vectors
    RatMat4 mu;                 // mu[i][j] for j < i
};

Gso gso(const IntMat4& g) {
    Gso s;
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < i; ++j) {
            Rational t = g[i][j];
            for (int k = 0; k < j; ++k) t -= s.mu[j][k] * s.mu[i][k] * s.B[k];
            s.mu[i][j] = t / s.B[j];
        }
        Rational t = g[i][i];
        for (int k = 0; k < i; ++k) t -= s.mu[i][k] * s.mu[i][k] * s.B[k];
        if (sgn(t) <= 0) throw UsageError("quadratic form is not positive definite");
        s.B[i] = t;
        s.mu[i][i] = 1;
    }
    return s;
}

Integer round_rational(const Rational& q) {
    Rational h = q + Rational(1, 2);
    Integer r;
    mpz_fdiv_q(r.get_mpz_t(), h.get_num_mpz_t(), h.get_den_mpz_t());
    return r;
}

// b_k -= r b_j on the form and on the transform.
void reduce_row(IntMat4& g, IntMat4& u, int k, int j, const Integer& r) {
    Integer gkk = g[k][k] - 2 * r * g[k][j] + r * r * g[j][j];
    for (int i = 0; i < 4; ++i) {
        if (i == k) continue;
        g[k][i] -= r * g[j][i];
        g[i][k] = g[k][i];
    }
    g[k][k] = gkk;
    row_axpy(u[k], r, u[j]);
}

void swap_rows(IntMat4& g, IntMat4& u, int k, int j) {
    std::swap(g[k], g[j]);
    for (int i = 0; i < 4; ++i) std::swap(g[i][k], g[i][j]);
    std::swap(u[k], u[j]);
}

Integer form_value(const IntMat4& g, const IntVec4& x) {
    Integer v = 0;
    for (int r = 0; r < 4; ++r) {
        if (x[r] == 0) continue;
        Integer t = 0;
        for (int c = 0; c < 4; ++c)
            if (x[c] != 0) t += g[r][c] * x[c];
        v += x[r] * t;
    }
    return v;
}

void normalize_sign(IntVec4& x) {
    for (int k = 0; k < 4; ++k) {
        if (x[k] == 0) continue;
        if (x[k] < 0)
            for (auto& e : x) e = -e;
        return;
    }
}

bool lex_less(const IntVec4& x, const IntVec4& y) {
    for (int k = 0; k < 4; ++k)
        if (x[k] != y[k]) return x[k] < y[k];
    return false;
}

// Integer range of t with B (t - c)^2 <= R.
void integer_window(const Rational& c, const Rational& R, const Rational& B, Integer& lo,
                    Integer& hi) {
    Rational s = R / B;
    double cd = c.get_d();
    double rd = std::sqrt(std::max(0.0, s.get_d()));
    lo = Integer(std::ceil(cd - rd) - 1);
    hi = Integer(std::floor(cd + rd) + 1);
    auto inside = [&](const Integer& t) {
        Rational d = Rational(t) - c;
        return d * d <= s;
    };
    while (inside(lo - 1)) --lo;
    while (lo <= hi && !inside(lo)) ++lo;
    while (inside(hi + 1)) ++hi;
    while (hi >= lo && !inside(hi)) --hi;
}

bool primitive_extension(const std::vector<IntVec4>& chosen, const IntVec4& v) {
    // gcd of the k x k minors of the stacked rows equals 1.
    std::vector<IntVec4> rows = chosen;
    rows.push_back(v);
    const int k = static_cast<int>(rows.size());
    Integer g = 0;
    std::array<int, 4> cols{};
    std::function<void(int, int)> pick = [&](int start, int depth) {
        if (depth == k) {
            IntMat4 m = int_identity();
            // Embed the k x k minor into a 4 x 4 block-diagonal matrix.
            for (int r = 0; r < 4; ++r)
                for (int c = 0; c < 4; ++c) m[r][c] = (r == c && r >= k) ? 1 : 0;
            for (int r = 0; r < k; ++r)
                for (int c = 0; c < k; ++c) m[r][c] = rows[r][cols[c]];
            Integer d = abs(det(m));
            mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), d.get_mpz_t());
            return;
        }
        for (int c = start; c < 4; ++c) {
            cols[depth] = c;
            pick(c + 1, depth + 1);
        }
    };
    pick(0, 0);
    return g == 1;
}

}  // namespace

IntMat4 lll(IntMat4& g) {
    IntMat4 u = int_identity();
    const Rational delta(3, 4);
    int k = 1;
    Gso s = gso(g);
    while (k < 4) {
        for (int j = k - 1; j >= 0; --j) {
            Integer r = round_rational(s.mu[k][j]);
            if (r == 0) continue;
            reduce_row(g, u, k, j, r);
            for (int i = 0; i < j; ++i) s.mu[k][i] -= r * s.mu[j][i];
            s.mu[k][j] -= r;
        }
        if (s.B[k] >= (delta - s.mu[k][k - 1] * s.mu[k][k - 1]) * s.B[k - 1]) {
            ++k;
        } else {
            swap_rows(g, u, k, k - 1);
            s = gso(g);
            k = std::max(1, k - 1);
        }
    }
    return u;
}

void enumerate(const IntMat4& g, const Integer& bound,
               const std::function<void(const IntVec4&, const Integer&)>& cb) {
    if (sgn(bound) <= 0) return;
    Gso s = gso(g);
    IntVec4 x;
    for (auto& e : x) e = 0;
    std::array<Rational, 4> remaining;
    // level j picks x[j] given x[j+1..3]; all_zero says whether those are all zero.
    std::function<void(int, const Rational&, bool)> descend = [&](int j, const Rational& R,
                                                                  bool all_zero) {
        if (j < 0) {
            if (all_zero) return;
            cb(x, form_value(g, x));
            return;
        }
        Rational c = 0;
        for (int i = j + 1; i < 4; ++i)
            if (x[i] != 0) c -= s.mu[i][j] * x[i];
        Integer lo, hi;
        integer_window(c, R, s.B[j], lo, hi);
        if (all_zero && lo < 0) lo = 0;
        for (Integer t = lo; t <= hi; ++t) {
            Rational d = Rational(t) - c;
            Rational next = R - s.B[j] * d * d;
            x[j] = t;
            descend(j - 1, next, all_zero && t == 0);
        }
        x[j] = 0;
    };
    descend(3, Rational(bound), true);
}

std::vector<ShortVector> short_vectors(const IntMat4& g, const Integer& bound) {
    IntMat4 h = g;
    IntMat4 u = lll(h);
    std::vector<ShortVector> out;
    enumerate(h, bound, [&](const IntVec4& y, const Integer& v) {
        ShortVector sv{row_times(y, u), v};
        normalize_sign(sv.x);
        out.push_back(std::move(sv));
    });
    std::sort(out.begin(), out.end(), [](const ShortVector& p, const ShortVector& q) {
        if (p.value != q.value) return p.value < q.value;
        return lex_less(p.x, q.x);
    });
    return out;
}

std::vector<ShortVector> minimal_vectors(const IntMat4& g) {
    IntMat4 h = g;
    IntMat4 u = lll(h);
    Integer bound = h[0][0];
    for (int k = 1; k < 4; ++k) bound = std::min(bound, h[k][k]);
    std::vector<ShortVector> out;
    enumerate(h, bound, [&](const IntVec4& y, const Integer& v) {
        if (v < bound) {
            bound = v;
            out.clear();
        }
        if (v == bound) {
            ShortVector sv{row_times(y, u), v};
            normalize_sign(sv.x);
            out.push_back(std::move(sv));
        }
    });
    std::sort(out.begin(), out.end(),
              [](const ShortVector& p, const ShortVector& q) { return lex_less(p.x, q.x); });
    return out;
}

IntMat4 minkowski(const IntMat4& g) {
    IntMat4 h = g;
    IntMat4 u = lll(h);
    std::vector<IntVec4> chosen;       // coordinates w.r.t. the input basis
    std::vector<IntVec4> chosen_lll;   // the same vectors w.r.t. the LLL basis
    for (int k = 0; k < 4; ++k) {
        Integer bound = -1;
        for (int i = 0; i < 4; ++i) {
            IntVec4 e;
            for (int c = 0; c < 4; ++c) e[c] = (c == i) ? 1 : 0;
            if (primitive_extension(chosen_lll, e) && (bound < 0 || h[i][i] < bound))
                bound = h[i][i];
        }
        if (bound < 0) {
            bound = h[0][0];
            for (int i = 1; i < 4; ++i) bound = std::max(bound, h[i][i]);
            bound *= 4;
        }
        while (true) {
            bool found = false;
            IntVec4 best, best_lll;
            Integer best_value;
            enumerate(h, bound, [&](const IntVec4& y, const Integer& v) {
                if (!primitive_extension(chosen_lll, y)) return;
                IntVec4 x = row_times(y, u);
                IntVec4 yy = y;
                // Normalize both views with the same sign.
                for (int c = 0; c < 4; ++c) {
                    if (x[c] == 0) continue;
                    if (x[c] < 0) {
                        for (auto& e : x) e = -e;
                        for (auto& e : yy) e = -e;
                    }
                    break;
                }
                if (!found || v < best_value || (v == best_value && lex_less(x, best))) {
                    found = true;
                    best = x;
                    best_lll = yy;
                    best_value = v;
                }
            });
            if (found) {
                chosen.push_back(best);
                chosen_lll.push_back(best_lll);
                break;
            }
            bound *= 2;
        }
    }
    IntMat4 out{chosen[0], chosen[1], chosen[2], chosen[3]};
    if (abs(det(out)) != 1) throw InternalError("Minkowski selection is not unimodular");
    return out;
}

}  // namespace gramalg

namespace {

Integer lcm_of_denominators(const std::vector<const Rational*>& values) {
    Integer l = 1;
    for (const Rational* q : values) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), q->get_den_mpz_t());
    return l;
}

}  // namespace

IdealLattice::IdealLattice(const std::array<Quaternion, 4>& basis)
    : params_(basis[0].params()), basis_(basis) {
    std::vector<const Rational*> all;
    for (const auto& q : basis_) {
        if (q.params() != params_) throw UsageError("lattice basis from different algebras");
        for (const auto& c : q.coords()) all.push_back(&c);
    }
    den_ = lcm_of_denominators(all);
    RatMat4 rat;
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) {
            rat[r][c] = basis_[r][c];
            Rational t = basis_[r][c] * den_;
            coords_[r][c] = t.get_num();
        }
    if (det(coords_) == 0) throw UsageError("lattice basis is rank-deficient");
    coords_inv_ = inverse(rat);

    RatMat4 nf = norm_form(params_);
    std::vector<const Rational*> gents;
    for (int r = 0; r < 4; ++r)
        for (int s = 0; s < 4; ++s) {
            Rational t = 0;
            for (int k = 0; k < 4; ++k) t += nf[k][k] * basis_[r][k] * basis_[s][k];
            gram_[r][s] = t;
        }
    for (auto& row : gram_)
        for (auto& e : row) gents.push_back(&e);
    gram_scale_ = lcm_of_denominators(gents);
    for (int r = 0; r < 4; ++r)
        for (int s = 0; s < 4; ++s) int_gram_[r][s] = Rational(gram_[r][s] * gram_scale_).get_num();
    det_ = det(gram_);
}

IdealLattice IdealLattice::from_generators(const AlgebraParams& params,
                                           const std::vector<Quaternion>& gens) {
    std::vector<const Rational*> all;
    for (const auto& q : gens) {
        if (q.params() != params) throw UsageError("generators from different algebras");
        for (const auto& c : q.coords()) all.push_back(&c);
    }
    Integer d = lcm_of_denominators(all);
    std::vector<IntVec4> rows;
    rows.reserve(gens.size());
    for (const auto& q : gens) {
        IntVec4 v;
        for (int k = 0; k < 4; ++k) v[k] = Rational(q[k] * d).get_num();
        rows.push_back(std::move(v));
    }
    IntMat4 h = hnf(std::move(rows));
    std::array<Quaternion, 4> basis;
    for (int r = 0; r < 4; ++r)
        basis[r] = Quaternion(params, make_rational(h[r][0], d), make_rational(h[r][1], d),
                              make_rational(h[r][2], d), make_rational(h[r][3], d));
    return IdealLattice(basis);
}

Quaternion IdealLattice::element(const IntVec4& x) const {
    std::array<Rational, 4> c;
    for (int k = 0; k < 4; ++k) {
        c[k] = 0;
        for (int r = 0; r < 4; ++r)
            if (x[r] != 0) c[k] += basis_[r][k] * x[r];
    }
    return Quaternion(params_, c);
}

std::array<Rational, 4> IdealLattice::coordinates_of(const Quaternion& q) const {
    if (q.params() != params_) throw UsageError("element from a different algebra");
    std::array<Rational, 4> x;
    for (int c = 0; c < 4; ++c) {
        x[c] = 0;
        for (int k = 0; k < 4; ++k) x[c] += q[k] * coords_inv_[k][c];
    }
    return x;
}

bool IdealLattice::contains(const Quaternion& q) const {
    for (const auto& c : coordinates_of(q))
        if (c.get_den() != 1) return false;
    return true;
}

bool IdealLattice::contains(const IdealLattice& other) const {
    for (const auto& b : other.basis_)
        if (!contains(b)) return false;
    return true;
}

bool IdealLattice::same_set(const IdealLattice& other) const {
    return contains(other) && other.contains(*this);
}

IdealLattice IdealLattice::right_scaled(const Quaternion& z) const {
    if (z.is_zero()) throw UsageError("scaling a lattice by zero");
    std::array<Quaternion, 4> b;
    for (int k = 0; k < 4; ++k) b[k] = basis_[k] * z;
    return IdealLattice(b);
}

IdealLattice IdealLattice::left_scaled(const Quaternion& z) const {
    if (z.is_zero()) throw UsageError("scaling a lattice by zero");
    std::array<Quaternion, 4> b;
    for (int k = 0; k < 4; ++k) b[k] = z * basis_[k];
    return IdealLattice(b);
}

IdealLattice IdealLattice::conjugated() const {
    std::array<Quaternion, 4> b;
    for (int k = 0; k < 4; ++k) b[k] = conj(basis_[k]);
    return IdealLattice(b);
}

RatMat4 gram(const IdealLattice& L) { return L.gram(); }

IdealLattice minkowski_reduce(const IdealLattice& L) {
    IntMat4 u = gramalg::minkowski(L.int_gram());
    std::array<Quaternion, 4> b;
    for (int k = 0; k < 4; ++k) b[k] = L.element(u[k]);
    return IdealLattice(b);
}

std::vector<Quaternion> shortest_vectors(const IdealLattice& L) {
    std::vector<Quaternion> out;
    for (const auto& sv : gramalg::minimal_vectors(L.int_gram())) out.push_back(L.element(sv.x));
    return out;
}

Rational lattice_minimum(const IdealLattice& L) {
    auto mv = gramalg::minimal_vectors(L.int_gram());
    return make_rational(mv.front().value, L.gram_scale());
}

std::vector<Quaternion> elements_up_to(const IdealLattice& L, const Rational& bound) {
    Rational scaled = bound * L.gram_scale();
    Integer b;
    mpz_fdiv_q(b.get_mpz_t(), scaled.get_num_mpz_t(), scaled.get_den_mpz_t());
    std::vector<Quaternion> out;
    for (const auto& sv : gramalg::short_vectors(L.int_gram(), b)) out.push_back(L.element(sv.x));
    return out;
}

Rational exact_sqrt(const Rational& q) {
    if (sgn(q) < 0) throw InvariantError("square root of a negative rational");
    if (!mpz_perfect_square_p(q.get_num_mpz_t()) || !mpz_perfect_square_p(q.get_den_mpz_t()))
        throw InvariantError("rational " + to_string(q) + " is not a perfect square");
    Integer n, d;
    mpz_sqrt(n.get_mpz_t(), q.get_num_mpz_t());
    mpz_sqrt(d.get_mpz_t(), q.get_den_mpz_t());
    return make_rational(n, d);
}

Rational index_in(const IdealLattice& L1, const IdealLattice& L2) {
    if (L1.params() != L2.params()) throw UsageError("lattices from different algebras");
    return exact_sqrt(L1.gram_det() / L2.gram_det());
}

IdealLattice lattice_product(const IdealLattice& L1, const IdealLattice& L2) {
    std::vector<Quaternion> gens;
    gens.reserve(16);
    for (const auto& x : L1.basis())
        for (const auto& y : L2.basis()) gens.push_back(x * y);
    return IdealLattice::from_generators(L1.params(), gens);
}

}  // namespace qm
