#include "qmoney/brandt.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <thread>

#include "qmoney/errors.hpp"

namespace qm {

Eigen::MatrixXd BrandtMatrix::dense() const {
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(h, h);
    for (const auto& t : triplets) M(t[0], t[1]) = static_cast<double>(t[2]);
    return M;
}

std::vector<std::int64_t> BrandtMatrix::column_sums() const {
    std::vector<std::int64_t> s(h, 0);
    for (const auto& t : triplets) s[t[1]] += t[2];
    return s;
}

std::vector<CanonicalTriple> p_neighbors(const LeftIdeal& J, std::int64_t p, EncodingContext& ctx) {
    if (!is_prime(p)) throw UsageError("neighbor degree must be prime");
    if (p == ctx.level()) throw UsageError("neighbor prime equals the level");
    if (!J.integral()) throw UsageError("neighbors need an integral representative");
    if (mpz_divisible_ui_p(J.norm().get_num_mpz_t(), static_cast<unsigned long>(p)))
        throw UsageError("p divides nrd(J); choose another representative");
    const SplitIso& iso = ctx.split(p);
    std::vector<ResidueMatrix> images;
    for (const auto& r : J.omega_rows()) images.push_back(iso.apply(r));

    std::vector<std::array<std::int64_t, 2>> lines;
    for (std::int64_t y = 0; y < p; ++y) lines.push_back({1, y});
    lines.push_back({0, 1});

    std::vector<CanonicalTriple> out;
    for (const auto& v : lines) {
        // Kernel of x -> pi(x) v on the basis of J.
        std::vector<IntVec4> cols(2);
        for (int k = 0; k < 4; ++k) {
            const auto& A = images[k].e;
            cols[0][k] = mod(A[0] * v[0] + A[1] * v[1], p);
            cols[1][k] = mod(A[2] * v[0] + A[3] * v[1], p);
        }
        IntMat4 K = kernel_mod_p(cols, p);
        if (det(K) != Integer(p * p)) throw InternalError("neighbor sublattice has the wrong index");
        std::array<Quaternion, 4> basis;
        for (int r = 0; r < 4; ++r) basis[r] = J.lattice().element(K[r]);
        LeftIdeal Jp = LeftIdeal::trusted(J.parent(), IdealLattice(basis));
        out.push_back(canonical_encode(Jp, ctx));
    }
    return out;
}

LeftIdeal coprime_representative(const LeftIdeal& J, std::int64_t p) {
    if (!J.integral()) throw UsageError("representative search needs an integral ideal");
    const Integer m = J.norm().get_num();
    if (!mpz_divisible_ui_p(m.get_mpz_t(), static_cast<unsigned long>(p))) return J;
    // J conj(z) / m is integral of norm nrd(z) / m for z in J.
    const auto& L = J.lattice();
    Integer bound = gramalg::minimal_vectors(L.int_gram()).front().value;
    for (int round = 0; round < 64; ++round, bound *= 2) {
        for (const auto& sv : gramalg::short_vectors(L.int_gram(), bound)) {
            Quaternion z = L.element(sv.x);
            Rational q = nrd(z) / Rational(m);
            if (q.get_den() != 1) throw InternalError("element norm not divisible by nrd(J)");
            if (mpz_divisible_ui_p(q.get_num_mpz_t(), static_cast<unsigned long>(p))) continue;
            Quaternion zb = conj(z) / Rational(m);
            std::array<Quaternion, 4> b;
            for (int k = 0; k < 4; ++k) b[k] = J.basis()[k] * zb;
            return LeftIdeal::trusted(J.parent(), IdealLattice(b));
        }
    }
    throw InternalError("no representative with norm coprime to p found");
}

BrandtMatrix brandt_matrix(const ClassSet& cs, std::int64_t p, EncodingContext& ctx, int jobs) {
    if (!is_prime(p) || p == cs.N) throw UsageError("Brandt prime must be a prime different from N");
    const std::int64_t h = static_cast<std::int64_t>(cs.size());
    ctx.split(p);
    std::vector<std::vector<std::int64_t>> cols(h);
    auto column = [&](std::int64_t j) {
        LeftIdeal J = coprime_representative(cs.classes[j].ideal, p);
        std::vector<std::int64_t> idx;
        for (const auto& t : p_neighbors(J, p, ctx)) {
            long i = cs.index_of(t);
            if (i < 0) throw InvariantError("neighbor triple " + to_string(t) + " is not in the class set");
            idx.push_back(i);
        }
        cols[j] = std::move(idx);
    };
    jobs = std::max(1, jobs);
    if (jobs == 1) {
        for (std::int64_t j = 0; j < h; ++j) column(j);
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < jobs; ++w)
            pool.emplace_back([&, w] {
                for (std::int64_t j = w; j < h; j += jobs) column(j);
            });
        for (auto& t : pool) t.join();
    }
    std::map<std::pair<std::int64_t, std::int64_t>, std::int64_t> counts;
    for (std::int64_t j = 0; j < h; ++j)
        for (std::int64_t i : cols[j]) ++counts[{i, j}];
    BrandtMatrix B;
    B.N = cs.N;
    B.p = p;
    B.h = h;
    for (const auto& [rc, v] : counts) B.triplets.push_back({rc.first, rc.second, v});
    for (const auto& e : cs.classes) B.weights.push_back(e.weight.value);
    return B;
}

namespace {

bool parallel(const Eigen::VectorXd& x, const Eigen::VectorXd& y, double tol) {
    return std::abs(std::abs(x.normalized().dot(y.normalized())) - 1.0) < tol;
}

}  // namespace

NormalizedBrandt normalized_brandt(const BrandtMatrix& B, const Tolerances& tol) {
    NormalizedBrandt nb;
    nb.N = B.N;
    nb.p = B.p;
    const Eigen::Index h = B.h;
    Eigen::VectorXd sw(h), isw(h);
    for (Eigen::Index i = 0; i < h; ++i) {
        sw(i) = std::sqrt(static_cast<double>(B.weights[i]));
        isw(i) = 1.0 / sw(i);
    }
    Eigen::MatrixXd Tp = B.dense();
    Eigen::MatrixXd T = sw.asDiagonal() * Tp * isw.asDiagonal();
    if ((T - T.transpose()).cwiseAbs().maxCoeff() >= tol.symmetry) {
        T = isw.asDiagonal() * Tp * sw.asDiagonal();
        nb.forward_orientation = false;
        if ((T - T.transpose()).cwiseAbs().maxCoeff() >= tol.symmetry)
            throw InvariantError("normalized Brandt matrix is not symmetric in either orientation");
    }
    nb.T = 0.5 * (T + T.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(nb.T);
    // The largest eigenvalue is p + 1 (all others are bounded by 2 sqrt(p)).
    const Eigen::Index top = h - 1;
    if (std::abs(es.eigenvalues()(top) - static_cast<double>(B.p + 1)) > tol.eisenstein)
        throw InvariantError("normalized Brandt matrix lacks the eigenvalue p + 1");
    Eigen::VectorXd u = es.eigenvectors().col(top);
    if (u.sum() < 0) u = -u;
    nb.distinguished = u.normalized();
    nb.matches_sqrt_w = parallel(u, sw, 1e-9);
    nb.matches_inv_sqrt_w = parallel(u, isw, 1e-9);
    return nb;
}

Eigen::VectorXd project_VN(const Eigen::VectorXd& u0, const Eigen::VectorXd& v) {
    if (u0.size() != v.size()) throw UsageError("dimension mismatch in projection");
    Eigen::VectorXd u = u0.normalized();
    return v - u.dot(v) * u;
}

}  // namespace qm
