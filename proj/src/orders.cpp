#include "qmoney/orders.hpp"

#include <algorithm>

#include "qmoney/errors.hpp"

namespace qm {

bool is_prime(std::int64_t n) {
    if (n < 2) return false;
    for (std::int64_t d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

std::vector<std::int64_t> factor(std::int64_t n) {
    if (n < 1) throw UsageError("factor expects a positive integer");
    std::vector<std::int64_t> out;
    for (std::int64_t d = 2; d * d <= n; ++d)
        while (n % d == 0) {
            out.push_back(d);
            n /= d;
        }
    if (n > 1) out.push_back(n);
    return out;
}

namespace {

int valuation(Integer& x, const Integer& p) {
    int v = 0;
    while (x != 0 && mpz_divisible_p(x.get_mpz_t(), p.get_mpz_t())) {
        mpz_divexact(x.get_mpz_t(), x.get_mpz_t(), p.get_mpz_t());
        ++v;
    }
    return v;
}

int legendre(const Integer& u, const Integer& p) {
    return mpz_legendre(u.get_mpz_t(), p.get_mpz_t());
}

int mod_small(const Integer& u, unsigned long m) {
    return static_cast<int>(mpz_fdiv_ui(u.get_mpz_t(), m));
}

// Integer representative of q modulo squares.
Integer square_class(const Rational& q) { return q.get_num() * q.get_den(); }

std::vector<std::int64_t> prime_divisors(Integer n) {
    std::vector<std::int64_t> out;
    n = abs(n);
    for (std::int64_t d = 2; Integer(d) * d <= n; ++d) {
        if (mpz_divisible_ui_p(n.get_mpz_t(), d)) {
            out.push_back(d);
            while (mpz_divisible_ui_p(n.get_mpz_t(), d)) mpz_divexact_ui(n.get_mpz_t(), n.get_mpz_t(), d);
        }
    }
    if (n > 1) out.push_back(n.get_si());
    return out;
}

}  // namespace

int hilbert_symbol(const Rational& a_in, const Rational& b_in, std::int64_t p_small) {
    if (a_in == 0 || b_in == 0) throw UsageError("Hilbert symbol of zero");
    if (p_small == 0) return (sgn(a_in) < 0 && sgn(b_in) < 0) ? -1 : 1;
    if (!is_prime(p_small)) throw UsageError("Hilbert symbol at a non-prime");
    Integer p = p_small;
    Integer u = square_class(a_in), v = square_class(b_in);
    int alpha = valuation(u, p), beta = valuation(v, p);
    if (p_small != 2) {
        int s = 1;
        if ((alpha & 1) && (beta & 1) && mod_small(p, 4) == 3) s = -s;
        if (beta & 1) s *= legendre(u, p);
        if (alpha & 1) s *= legendre(v, p);
        return s;
    }
    auto eps = [](const Integer& x) { return mod_small(x, 4) == 3 ? 1 : 0; };
    auto omega = [](const Integer& x) {
        int r = mod_small(x, 8);
        return (r == 3 || r == 5) ? 1 : 0;
    };
    int e = eps(u) * eps(v) + alpha * omega(v) + beta * omega(u);
    return (e & 1) ? -1 : 1;
}

bool is_ramified_correctly(const AlgebraParams& params, std::int64_t N) {
    if (hilbert_symbol(params.a, params.b, 0) != -1) return false;
    Integer all = 2 * square_class(params.a) * square_class(params.b) * N;
    for (std::int64_t p : prime_divisors(all)) {
        bool ramified = hilbert_symbol(params.a, params.b, p) == -1;
        if (ramified != (p == N)) return false;
    }
    return true;
}

namespace {

// Least prime q = 3 mod 4 with (N/q) = -1.
std::int64_t auxiliary_prime(std::int64_t N) {
    for (std::int64_t q = 3;; q += 4)
        if (is_prime(q) && legendre(Integer(N % q), Integer(q)) == -1) return q;
}

}  // namespace

AlgebraParams build_algebra(std::int64_t N) {
    if (N < 5 || !is_prime(N)) throw UsageError("level must be a prime >= 5");
    if (N % 6 == 5) return AlgebraParams(-3, -N);
    if (N % 12 == 7) return AlgebraParams(-1, -N);
    if (N % 8 == 5) return AlgebraParams(-2, -N);
    return AlgebraParams(-N, -auxiliary_prime(N));
}

MaximalOrder::MaximalOrder(const IdealLattice& lattice, std::int64_t N)
    : lattice_(lattice), level_(N) {
    const auto& w = lattice_.basis();
    if (!lattice_.contains(Quaternion::scalar(params(), 1)))
        throw InvariantError("order lattice does not contain 1");
    for (int r = 0; r < 4; ++r)
        for (int s = 0; s < 4; ++s) {
            auto c = lattice_.coordinates_of(w[r] * w[s]);
            for (int k = 0; k < 4; ++k) {
                if (c[k].get_den() != 1) throw InvariantError("order lattice is not closed");
                mult_[r][s][k] = c[k].get_num();
            }
        }
    if (reduced_discriminant() != N)
        throw InvariantError("order does not have reduced discriminant " + std::to_string(N));
}

IntVec4 MaximalOrder::int_coords(const Quaternion& q) const {
    auto c = coords(q);
    IntVec4 x;
    for (int k = 0; k < 4; ++k) {
        if (c[k].get_den() != 1) throw UsageError("element is not in the order");
        x[k] = c[k].get_num();
    }
    return x;
}

Rational MaximalOrder::reduced_discriminant() const {
    // det of the nrd Gram is disc^2 / 16.
    return exact_sqrt(16 * abs(lattice_.gram_det()));
}

namespace {

Quaternion q4(const AlgebraParams& P, Rational a, Rational b, Rational c, Rational d) {
    return Quaternion(P, std::move(a), std::move(b), std::move(c), std::move(d));
}

// A basis starting with 1 for the Z-span of gens: Hermite form with the
// coordinate order reversed, so the last row is the scalar 1.
std::array<Quaternion, 4> basis_with_one(const AlgebraParams& P, const std::vector<Quaternion>& gens) {
    Integer d = 1;
    for (const auto& g : gens)
        for (const auto& c : g.coords()) mpz_lcm(d.get_mpz_t(), d.get_mpz_t(), c.get_den_mpz_t());
    std::vector<IntVec4> rows;
    for (const auto& g : gens) {
        IntVec4 v;
        for (int k = 0; k < 4; ++k) v[k] = Rational(g[3 - k] * d).get_num();
        rows.push_back(v);
    }
    IntMat4 h = hnf(rows);
    std::array<Quaternion, 4> out;
    for (int r = 0; r < 4; ++r) {
        const IntVec4& v = h[3 - r];
        out[r] = q4(P, make_rational(v[3], d), make_rational(v[2], d), make_rational(v[1], d),
                    make_rational(v[0], d));
    }
    return out;
}

Quaternion construction_witness(const AlgebraParams& P, std::int64_t N) {
    if (P.a == -N) return q4(P, 0, 1, 0, 0);
    return q4(P, 0, 0, 1, 0);
}

}  // namespace

OrderPtr build_maximal_order(std::int64_t N) {
    AlgebraParams P = build_algebra(N);
    std::array<Quaternion, 4> basis;
    const Rational h(1, 2);
    if (N % 6 == 5) {
        basis = {q4(P, 1, 0, 0, 0), q4(P, h, h, 0, 0), q4(P, 0, 0, h, h),
                 q4(P, 0, Rational(1, 3), 0, Rational(-1, 3))};
    } else if (N % 12 == 7) {
        basis = {q4(P, 1, 0, 0, 0), q4(P, 0, 1, 0, 0), q4(P, h, 0, h, 0), q4(P, 0, h, 0, h)};
    } else if (N % 8 == 5) {
        basis = {q4(P, 1, 0, 0, 0), q4(P, h, 0, h, h),
                 q4(P, 0, Rational(1, 4), h, Rational(1, 4)), q4(P, 0, 0, 0, 1)};
    } else {
        std::int64_t q = -P.b.get_num().get_si();
        std::int64_t c = 0;
        while ((c * c % q * (N % q) + 1) % q != 0) ++c;
        basis = basis_with_one(P, {q4(P, h, 0, h, 0), q4(P, 0, h, 0, h),
                                   q4(P, 0, 0, make_rational(1, q), make_rational(c, q)), q4(P, 0, 0, 0, 1)});
    }
    std::shared_ptr<MaximalOrder> O;
    try {
        O = std::make_shared<MaximalOrder>(IdealLattice(basis), N);
    } catch (const InvariantError& e) {
        throw InternalError(std::string("maximal order construction failed: ") + e.what());
    }
    if (!is_ramified_correctly(P, N)) throw InternalError("algebra has the wrong ramification");
    Quaternion w = construction_witness(P, N);
    if (!O->contains(w) || nrd(w) != N) throw InternalError("order is not N-extremal");
    return O;
}

Quaternion extremality_witness(const MaximalOrder& O) {
    // Elements of nrd divisible by N form the two-sided ideal above N, which is the
    // radical of the trace pairing mod N; its minimal vectors have nrd N exactly
    // when that ideal is principal.
    const Integer N = O.level();
    std::vector<IntVec4> cols(4);
    for (int c = 0; c < 4; ++c)
        for (int r = 0; r < 4; ++r) cols[c][r] = Rational(2 * O.lattice().gram()[r][c]).get_num();
    IntMat4 P = kernel_mod_p(cols, N);
    std::array<Quaternion, 4> basis;
    for (int r = 0; r < 4; ++r) basis[r] = O.element(P[r]);
    IdealLattice L(basis);
    std::vector<Quaternion> mins = shortest_vectors(L);
    if (nrd(mins.front()) != N) throw InvariantError("order is not N-extremal");
    return mins.front();
}

int unit_count(const MaximalOrder& O) {
    return 2 * static_cast<int>(elements_up_to(O.lattice(), 1).size());
}

LeftIdeal::LeftIdeal(OrderPtr parent, const IdealLattice& lattice) : parent_(std::move(parent)) {
    if (lattice.params() != parent_->params()) throw UsageError("ideal from a different algebra");
    canonicalize(lattice);
    for (const auto& w : parent_->basis())
        for (const auto& b : lattice_.basis())
            if (!lattice_.contains(w * b))
                throw InvariantError("lattice is not stable under left multiplication by the order");
}

LeftIdeal LeftIdeal::trusted(OrderPtr parent, const IdealLattice& lattice) {
    LeftIdeal I;
    I.parent_ = std::move(parent);
    I.canonicalize(lattice);
    return I;
}

LeftIdeal LeftIdeal::unit(OrderPtr parent) {
    IdealLattice L = parent->lattice();
    return trusted(std::move(parent), L);
}

LeftIdeal LeftIdeal::generated_by(OrderPtr parent, const std::vector<Quaternion>& gens) {
    std::vector<Quaternion> all;
    for (const auto& g : gens)
        for (const auto& w : parent->basis()) all.push_back(w * g);
    IdealLattice L = IdealLattice::from_generators(parent->params(), all);
    return trusted(std::move(parent), L);
}

void LeftIdeal::canonicalize(const IdealLattice& lattice) {
    std::array<std::array<Rational, 4>, 4> c;
    Integer d = 1;
    for (int r = 0; r < 4; ++r) {
        c[r] = parent_->coords(lattice.basis()[r]);
        for (const auto& e : c[r]) mpz_lcm(d.get_mpz_t(), d.get_mpz_t(), e.get_den_mpz_t());
    }
    std::vector<IntVec4> rows(4);
    for (int r = 0; r < 4; ++r)
        for (int k = 0; k < 4; ++k) rows[r][k] = Rational(c[r][k] * d).get_num();
    rows_ = hnf(std::move(rows));
    den_ = d;
    std::array<Quaternion, 4> basis;
    for (int r = 0; r < 4; ++r) basis[r] = parent_->element(rows_[r]) / Rational(d);
    lattice_ = IdealLattice(basis);
    // [O : I] = det(rows) / den^4 and nrd(I)^2 = [O : I].
    Integer dd = d * d;
    norm_ = exact_sqrt(make_rational(abs(det(rows_)), dd * dd));
}

Rational nrd_ideal(const LeftIdeal& I) { return I.norm(); }

LeftIdeal ideal_scale(const LeftIdeal& I, const Quaternion& z) {
    if (z.is_zero()) throw UsageError("scaling an ideal by zero");
    return LeftIdeal::trusted(I.parent(), I.lattice().right_scaled(z));
}

OrderPtr right_order(const LeftIdeal& I) {
    // O_R(I) = conj(I) I / nrd(I), then confirmed as the stabilizer.
    IdealLattice prod = lattice_product(I.lattice().conjugated(), I.lattice());
    IdealLattice R = prod.right_scaled(Quaternion::scalar(I.params(), 1 / I.norm()));
    for (const auto& b : I.basis())
        for (const auto& r : R.basis())
            if (!I.lattice().contains(b * r)) throw InternalError("right order does not stabilize I");
    std::vector<Quaternion> gens(R.basis().begin(), R.basis().end());
    gens.push_back(Quaternion::scalar(I.params(), 1));
    return std::make_shared<MaximalOrder>(IdealLattice(basis_with_one(I.params(), gens)),
                                          I.order().level());
}

LeftIdeal ideal_conj(const LeftIdeal& I) {
    return LeftIdeal(right_order(I), I.lattice().conjugated());
}

LeftIdeal ideal_inverse(const LeftIdeal& I) {
    IdealLattice L = I.lattice().conjugated().right_scaled(Quaternion::scalar(I.params(), 1 / I.norm()));
    return LeftIdeal(right_order(I), L);
}

IdealLattice ideal_product(const LeftIdeal& I, const LeftIdeal& J) {
    return lattice_product(I.lattice(), J.lattice());
}

Weight weight(const LeftIdeal& I) {
    int units = unit_count(*right_order(I));
    Weight w{units / 2};
    if (w.value < 1 || w.value > 3 || units % 2 != 0)
        throw InvariantError("unexpected unit group of order " + std::to_string(units));
    return w;
}

}  // namespace qm
