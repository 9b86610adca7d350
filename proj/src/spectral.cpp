#include "qmoney/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "qmoney/errors.hpp"
#include "qmoney/orders.hpp"
#include "qmoney/rng.hpp"

namespace qm {

std::vector<Complex> JointEigenbasis::eisenstein_tuple() const {
    std::vector<Complex> t;
    for (auto p : primes) t.push_back(std::polar(1.0, (p + 1) / std::sqrt(static_cast<double>(p))));
    return t;
}

namespace {

struct Attempt {
    Eigen::MatrixXd vectors;
    bool degenerate = false;
};

// Eigenvectors of a random combination, with the distinguished direction removed.
Attempt diagonalize(const std::vector<NormalizedBrandt>& Ts, const Eigen::VectorXd& u0, Rng& rng,
                    double degeneracy) {
    const Eigen::Index h = Ts.front().T.rows();
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(h, h);
    for (const auto& t : Ts) A += rng.uniform(1.0, 2.0) * t.T;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
    if (es.info() != Eigen::Success) throw SpectralError("eigensolver did not converge");

    Eigen::Index drop = 0;
    (es.eigenvectors().transpose() * u0).cwiseAbs().maxCoeff(&drop);
    Attempt out;
    out.vectors.resize(h, h - 1);
    for (Eigen::Index c = 0, o = 0; c < h; ++c)
        if (c != drop) out.vectors.col(o++) = es.eigenvectors().col(c);

    const auto& ev = es.eigenvalues();
    const double scale = std::max(1.0, ev.cwiseAbs().maxCoeff());
    for (Eigen::Index c = 0; c + 1 < h; ++c)
        if (ev(c + 1) - ev(c) < degeneracy * scale) out.degenerate = true;

    // Eigenvectors of a nearly repeated eigenvalue of A are only determined up to
    // rotation within their cluster; re-diagonalize each cluster with fresh weights.
    std::vector<double> lam;
    for (Eigen::Index c = 0; c < h; ++c)
        if (c != drop) lam.push_back(ev(c));
    const double cluster_gap = 1e-5 * scale;
    for (std::size_t s0 = 0; s0 < lam.size();) {
        std::size_t s1 = s0 + 1;
        while (s1 < lam.size() && lam[s1] - lam[s1 - 1] < cluster_gap) ++s1;
        const auto n = static_cast<Eigen::Index>(s1 - s0);
        if (n > 1) {
            Eigen::MatrixXd Q = out.vectors.middleCols(static_cast<Eigen::Index>(s0), n);
            Eigen::MatrixXd B = Eigen::MatrixXd::Zero(n, n);
            for (const auto& t : Ts) B += rng.uniform(1.0, 2.0) * (Q.transpose() * t.T * Q);
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> sub(0.5 * (B + B.transpose()));
            out.vectors.middleCols(static_cast<Eigen::Index>(s0), n) = Q * sub.eigenvectors();
        }
        s0 = s1;
    }
    return out;
}

}  // namespace

JointEigenbasis joint_eigenbasis(const std::vector<NormalizedBrandt>& Ts, std::uint64_t seed,
                                 const Tolerances& tol, int max_attempts) {
    if (Ts.empty()) throw UsageError("at least one Brandt operator is required");
    const Eigen::Index h = Ts.front().T.rows();
    JointEigenbasis jb;
    jb.N = Ts.front().N;
    for (const auto& t : Ts) {
        if (t.N != jb.N || t.T.rows() != h) throw UsageError("Brandt operators of different levels");
        jb.primes.push_back(t.p);
    }
    // The distinguished direction is shared; confirm before removing it.
    jb.eisenstein = Ts.front().distinguished;
    for (const auto& t : Ts)
        if (std::abs(std::abs(t.distinguished.dot(jb.eisenstein)) - 1.0) > tol.eisenstein)
            throw SpectralError("operators disagree on the distinguished eigenvector");
    for (std::size_t a = 0; a < Ts.size(); ++a)
        for (std::size_t b = a + 1; b < Ts.size(); ++b)
            if ((Ts[a].T * Ts[b].T - Ts[b].T * Ts[a].T).cwiseAbs().maxCoeff() > tol.commutation * h * Ts[a].p * Ts[b].p)
                throw SpectralError("Brandt operators do not commute");

    Attempt at;
    Rng rng(seed);
    for (jb.attempts = 1;; ++jb.attempts) {
        jb.seed_used = seed + static_cast<std::uint64_t>(jb.attempts - 1);
        rng = Rng(jb.seed_used);
        at = diagonalize(Ts, jb.eisenstein, rng, tol.degeneracy);
        if (!at.degenerate || jb.attempts >= max_attempts) break;
    }

    const Eigen::Index n = h - 1;
    std::vector<std::vector<double>> lam(n);
    double worst = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        Eigen::VectorXd v = at.vectors.col(i);
        // Fix the sign: the first entry of largest magnitude is positive.
        Eigen::Index arg = 0;
        v.cwiseAbs().maxCoeff(&arg);
        if (v(arg) < 0) v = -v;
        at.vectors.col(i) = v;
        for (const auto& t : Ts) {
            Eigen::VectorXd Tv = t.T * v;
            const double l = v.dot(Tv);
            worst = std::max(worst, (Tv - l * v).norm());
            lam[i].push_back(l);
        }
    }
    jb.max_residual = worst;
    if (worst >= tol.residual)
        throw SpectralError("joint eigenvector residual " + std::to_string(worst) + " exceeds tolerance");

    std::vector<Eigen::Index> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](auto x, auto y) { return lam[x] < lam[y]; });
    jb.vectors.resize(h, n);
    for (Eigen::Index r = 0; r < n; ++r) {
        jb.vectors.col(r) = at.vectors.col(order[r]);
        jb.lambda.push_back(lam[order[r]]);
        std::vector<Complex> zt;
        for (std::size_t j = 0; j < jb.primes.size(); ++j)
            zt.push_back(std::polar(1.0, jb.lambda.back()[j] / std::sqrt(static_cast<double>(jb.primes[j]))));
        jb.z.push_back(std::move(zt));
    }
    return jb;
}

double tuple_distance(const std::vector<Complex>& x, const std::vector<Complex>& y) {
    if (x.size() != y.size()) throw UsageError("tuples of different lengths");
    double s = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) s += std::norm(x[j] - y[j]);
    return std::sqrt(s);
}

Separation separation(const JointEigenbasis& jb, bool include_eisenstein) {
    std::vector<const std::vector<Complex>*> tuples;
    std::vector<long> ids;
    const auto e = jb.eisenstein_tuple();
    if (include_eisenstein) {
        tuples.push_back(&e);
        ids.push_back(-1);
    }
    for (std::size_t i = 0; i < jb.z.size(); ++i) {
        tuples.push_back(&jb.z[i]);
        ids.push_back(static_cast<long>(i));
    }
    if (tuples.size() < 2) throw UsageError("separation needs at least two eigenvectors");
    Separation s;
    s.epsilon = INFINITY;
    for (std::size_t a = 0; a < tuples.size(); ++a)
        for (std::size_t b = a + 1; b < tuples.size(); ++b) {
            const double d = tuple_distance(*tuples[a], *tuples[b]);
            if (d < s.epsilon) {
                s.epsilon = d;
                s.i = ids[a];
                s.k = ids[b];
            }
        }
    s.duplicate = s.epsilon == 0.0;
    return s;
}

std::vector<std::int64_t> default_primes(std::int64_t N, PrimeRule rule) {
    if (N < 2) throw UsageError("level must be at least 2");
    double lg = std::log2(static_cast<double>(N));
    if (rule == PrimeRule::below_floor_log2) lg = std::floor(lg);
    std::vector<std::int64_t> out;
    for (std::int64_t p = 2; p < lg; ++p)
        if (p != N && is_prime(p)) out.push_back(p);
    if (out.empty()) throw UsageError("no primes below log2(N)");
    return out;
}

double mu_density(std::int64_t p, double x) {
    if (x <= -2.0 || x >= 2.0) return 0.0;
    const double sp = std::sqrt(static_cast<double>(p));
    const double c = sp + 1.0 / sp;
    return (p + 1) / std::numbers::pi * std::sqrt(1.0 - x * x / 4.0) / (c * c - x * x);
}

double mu_cdf(std::int64_t p, double x) {
    if (x <= -2.0) return 0.0;
    if (x >= 2.0) return 1.0;
    // x = 2 cos(theta) turns the square-root endpoint behaviour into a smooth integrand.
    const double lo = std::acos(x / 2.0), hi = std::numbers::pi;
    const int n = 2048;
    const double hstep = (hi - lo) / n;
    auto f = [p](double t) { return mu_density(p, 2.0 * std::cos(t)) * 2.0 * std::sin(t); };
    double s = f(lo) + f(hi);
    for (int k = 1; k < n; ++k) s += (k % 2 ? 4.0 : 2.0) * f(lo + k * hstep);
    return s * hstep / 3.0;
}

SerreDiagnostic serre_diagnostic(const JointEigenbasis& jb, std::size_t prime_index, std::size_t nbins) {
    if (prime_index >= jb.primes.size()) throw UsageError("prime index out of range");
    if (nbins == 0) throw UsageError("need at least one bin");
    SerreDiagnostic d;
    d.p = jb.primes[prime_index];
    const double sp = std::sqrt(static_cast<double>(d.p));
    std::vector<double> xs;
    for (const auto& l : jb.lambda) xs.push_back(l[prime_index] / sp);
    std::sort(xs.begin(), xs.end());
    const double n = static_cast<double>(xs.size());

    d.bins.assign(nbins, 0.0);
    for (double x : xs) {
        auto b = static_cast<long>(std::floor((x + 2.0) / 4.0 * nbins));
        b = std::clamp(b, 0L, static_cast<long>(nbins) - 1);
        d.bins[b] += 1.0 / n;
    }
    for (std::size_t b = 0; b < nbins; ++b) {
        const double l = -2.0 + 4.0 * b / nbins, r = -2.0 + 4.0 * (b + 1) / nbins;
        d.predicted.push_back(mu_cdf(d.p, r) - mu_cdf(d.p, l));
    }
    for (std::size_t k = 0; k < xs.size(); ++k) {
        const double F = mu_cdf(d.p, xs[k]);
        d.ks = std::max({d.ks, std::abs(F - k / n), std::abs(F - (k + 1) / n)});
    }
    return d;
}

}  // namespace qm
