#include "qmoney/protocol.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "qmoney/errors.hpp"

namespace qm {

namespace {

std::size_t sample(const std::vector<double>& weights, Rng& rng) {
    double total = 0.0;
    for (double w : weights) total += w;
    double u = rng.uniform() * total;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (u < weights[i]) return i;
        u -= weights[i];
    }
    // Rounding can leave u just above the last weight.
    for (std::size_t i = weights.size(); i-- > 0;)
        if (weights[i] > 0) return i;
    throw InternalError("sampling from a zero distribution");
}

std::vector<Complex> with_phase_noise(const std::vector<Complex>& z, double width, Rng& rng) {
    std::vector<Complex> out = z;
    if (width <= 0) return out;
    for (auto& x : out) x *= std::polar(1.0, rng.uniform(-width, width));
    return out;
}

Eigen::VectorXcd kron(const Eigen::VectorXcd& x, const Eigen::VectorXcd& y) {
    Eigen::VectorXcd out(x.size() * y.size());
    for (Eigen::Index a = 0; a < x.size(); ++a) out.segment(a * y.size(), y.size()) = x(a) * y;
    return out;
}

Eigen::MatrixXcd as_matrix(const StateVector& s, Eigen::Index h) {
    Eigen::MatrixXcd M(h, h);
    for (Eigen::Index a = 0; a < h; ++a)
        for (Eigen::Index b = 0; b < h; ++b) M(a, b) = s(a * h + b);
    return M;
}

// Projective measurement of the first register in the eigenbasis; returns k and the collapsed state.
std::pair<std::size_t, StateVector> measure_first(const Eigen::MatrixXd& E, const StateVector& s, Rng& rng) {
    const Eigen::Index h = E.cols();
    const Eigen::MatrixXcd C = E.transpose().cast<Complex>() * as_matrix(s, h) * E.cast<Complex>();
    std::vector<double> p(h);
    for (Eigen::Index k = 0; k < h; ++k) p[k] = C.row(k).squaredNorm();
    const std::size_t k = sample(p, rng);
    Eigen::VectorXcd second = E.cast<Complex>() * C.row(k).transpose();
    StateVector post = kron(E.col(k).cast<Complex>(), second) / std::sqrt(p[k]);
    return {k, post};
}

}  // namespace

PublicParams make_public_params(std::shared_ptr<const JointEigenbasis> spectrum, std::optional<double> epsilon) {
    if (!spectrum) throw UsageError("public parameters need a computed spectrum");
    PublicParams pp;
    pp.N = spectrum->N;
    pp.primes = spectrum->primes;
    const Eigen::Index h = spectrum->vectors.rows();
    pp.basis.resize(h, h);
    pp.basis.col(0) = spectrum->eisenstein;
    pp.basis.rightCols(h - 1) = spectrum->vectors;
    pp.tuples.push_back(spectrum->eisenstein_tuple());
    for (const auto& z : spectrum->z) pp.tuples.push_back(z);
    const double measured = separation(*spectrum, true).epsilon;
    pp.epsilon = epsilon.value_or(measured);
    if (!(pp.epsilon > 0.0)) throw UsageError("epsilon must be positive");
    if (pp.epsilon > measured) throw UsageError("epsilon exceeds the measured separation");
    pp.spectrum = std::move(spectrum);
    return pp;
}

Bytes serial_bytes(const std::vector<Complex>& serial) {
    std::string s = "qmoney-serial-v1";
    char buf[96];
    for (const auto& z : serial) {
        std::snprintf(buf, sizeof buf, ";%a,%a", z.real(), z.imag());
        s += buf;
    }
    return Bytes(s.begin(), s.end());
}

MintResult mint(const PublicParams& pp, const SignatureScheme& sk, Rng& rng, bool state_vector) {
    const std::size_t h = pp.h();
    if (h == 0) throw UsageError("missing spectrum");
    MintResult r;
    std::optional<StateVector> note;
    if (state_vector) {
        auto [k, post] = measure_first(pp.basis, entangled_class_state(h), rng);
        r.sampled_index = k;
        note = std::move(post);
    } else {
        r.sampled_index = rng.below(h);
    }
    if (r.sampled_index == 0) return r;

    // Chord error per entry below 0.99 eps / (3 sqrt t) keeps the tuple error under eps / 3.
    const double chord = 0.99 * pp.epsilon / (3.0 * std::sqrt(static_cast<double>(pp.t())));
    const double width = 2.0 * std::asin(std::min(1.0, chord / 2.0));
    Bill b;
    b.serial = with_phase_noise(pp.tuples[r.sampled_index], width, rng);
    b.signature = sk.sign(serial_bytes(b.serial));
    if (state_vector)
        b.state = std::move(note);
    else
        b.index = r.sampled_index;
    r.bill = std::move(b);
    return r;
}

VerifyResult verify(const PublicParams& pp, const SignatureScheme& vk, const Bill& bill, Rng& rng,
                    double readout_noise) {
    VerifyResult out;
    out.post = bill;
    const std::size_t h = pp.h();
    if (bill.state && static_cast<std::size_t>(bill.state->size()) != h * h)
        throw UsageError("note has the wrong dimension");
    if (!bill.state && !bill.index) throw UsageError("bill carries no note");
    if (bill.index && *bill.index >= h) throw UsageError("note index out of range");
    if (!vk.verify(serial_bytes(bill.serial), bill.signature)) {
        out.reason = "signature check failed";
        return out;
    }
    if (bill.serial.size() != pp.t()) {
        out.reason = "serial has the wrong length";
        return out;
    }
    if (bill.state) {
        if (std::abs(bill.state->norm() - 1.0) > default_tolerances().state_norm)
            throw UsageError("note is not a unit vector");
        auto [k, half] = measure_first(pp.basis, *bill.state, rng);
        auto [l, post] = [&] {
            // Second register: swap the tensor factors, measure, swap back.
            const Eigen::Index n = static_cast<Eigen::Index>(h);
            StateVector swapped(n * n);
            for (Eigen::Index a = 0; a < n; ++a)
                for (Eigen::Index b = 0; b < n; ++b) swapped(b * n + a) = half(a * n + b);
            auto [l2, post2] = measure_first(pp.basis, swapped, rng);
            StateVector back(n * n);
            for (Eigen::Index a = 0; a < n; ++a)
                for (Eigen::Index b = 0; b < n; ++b) back(a * n + b) = post2(b * n + a);
            return std::pair{l2, back};
        }();
        out.k = k;
        out.l = l;
        out.post.state = std::move(post);
    } else {
        out.k = out.l = *bill.index;
    }
    const double noise = readout_noise < 0 ? pp.epsilon / 6.0 : readout_noise;
    const auto mk = with_phase_noise(pp.tuples[out.k], noise, rng);
    const auto ml = with_phase_noise(pp.tuples[out.l], noise, rng);
    for (std::size_t j = 0; j < pp.t(); ++j)
        if (std::abs(mk[j] - bill.serial[j]) >= pp.epsilon / 2 || std::abs(ml[j] - bill.serial[j]) >= pp.epsilon / 2) {
            out.reason = "eigenvalue outside the window of serial entry " + std::to_string(j);
            return out;
        }
    out.accepted = true;
    return out;
}

StateVector entangled_class_state(std::size_t h) {
    const Eigen::Index n = static_cast<Eigen::Index>(h);
    StateVector s = StateVector::Zero(n * n);
    for (Eigen::Index t = 0; t < n; ++t) s(t * n + t) = 1.0 / std::sqrt(static_cast<double>(h));
    return s;
}

PrepStats prepare_entangled(const ClassSet& cs, std::size_t trials, Rng& rng) {
    PrepStats st;
    st.trials = trials;
    const std::int64_t D = isqrt(2 * cs.N);
    std::vector<double> wd(D + 1, 0.0);
    double Z = 0.0;
    for (std::int64_t d = 1; d <= D; ++d) Z += (wd[d] = 1.0 / static_cast<double>(d));
    // floor(sqrt(2N) / d) == floor(D / d) for integer D = floor(sqrt(2N)).
    auto C = [D](std::int64_t d) { return D / d; };
    double amp_sum = 0.0, amp_sq = 0.0;
    for (const auto& e : cs.classes) {
        const auto& t = e.triple;
        const double p = wd[t.d] / Z / static_cast<double>(C(t.d) * C(t.d));
        st.exact_probability += p;
        amp_sum += std::sqrt(p);
        amp_sq += p;
    }
    st.fidelity_with_uniform = amp_sum * amp_sum / (static_cast<double>(cs.size()) * amp_sq);
    st.bound = (1.0 - 1.0 / static_cast<double>(cs.N)) / (32.0 * std::numbers::pi * std::numbers::pi);
    for (std::size_t i = 0; i < trials; ++i) {
        const auto d = static_cast<std::int64_t>(sample(wd, rng));
        const auto c = static_cast<std::uint64_t>(C(d));
        // Register values i in [1, C_d] map to a = i - 1 and b = i.
        CanonicalTriple t{d, static_cast<std::int64_t>(rng.below(c)), static_cast<std::int64_t>(rng.below(c)) + 1};
        if (cs.index_of(t) >= 0) ++st.successes;
    }
    return st;
}

LightningParams make_lightning_params(const PublicParams& pp, Rng& rng, std::optional<double> delta) {
    LightningParams lp;
    const double t = static_cast<double>(pp.t());
    lp.epsilon = pp.epsilon / (10.0 * std::sqrt(t));
    lp.delta = delta.value_or(lp.epsilon / (20.0 * t));
    if (!(lp.delta > 0.0) || !(lp.delta < lp.epsilon / (10.0 * t)))
        throw UsageError("delta must lie strictly between 0 and epsilon / (10 t)");
    const double re = rng.uniform();
    lp.z = Complex(re, rng.uniform());
    return lp;
}

bool near_grid(const std::vector<Complex>& lambda, const LightningParams& lp) {
    const double step = lp.epsilon / 2.0;
    auto close = [&](double x) { return std::abs(x - std::round(x / step) * step) <= lp.delta; };
    for (const auto& l : lambda) {
        const Complex x = l + lp.z;
        if (close(x.real()) || close(x.imag())) return true;
    }
    return false;
}

StormResult lightning_storm(const PublicParams& pp, const LightningParams& lp, Rng& rng) {
    StormResult r;
    r.bolt.lp = lp;
    for (r.attempts = 1; r.attempts <= 1'000'000; ++r.attempts) {
        const std::size_t k = rng.below(pp.h());
        if (k == 0) continue;
        if (near_grid(pp.tuples[k], lp)) {
            r.rejected.push_back(pp.tuples[k]);
            continue;
        }
        r.bolt.index_x = r.bolt.index_y = k;
        return r;
    }
    throw InternalError("storm failed to produce a bolt");
}

std::optional<LightningSerial> lightning_verify(const PublicParams& pp, const Bolt& bolt, Rng& rng) {
    const auto& lp = bolt.lp;
    auto readout = [&](std::size_t idx) {
        std::vector<Complex> v = pp.tuples.at(idx);
        for (auto& x : v) x += std::polar(0.999 * lp.delta * rng.uniform(), 2.0 * std::numbers::pi * rng.uniform());
        return v;
    };
    const auto lam = readout(bolt.index_x);
    const auto mu = readout(bolt.index_y);
    LightningSerial s;
    for (std::size_t j = 0; j < lam.size(); ++j) {
        if (std::abs(lam[j] - mu[j]) > 2.0 * lp.delta) return std::nullopt;
        const Complex x = lam[j] + lp.z;
        s.emplace_back(static_cast<std::int64_t>(std::llround(x.real() / lp.epsilon)),
                       static_cast<std::int64_t>(std::llround(x.imag() / lp.epsilon)));
    }
    return s;
}

double AttackStats::mean_first_collision() const {
    double s = 0.0;
    std::size_t n = 0;
    for (auto f : first_collision)
        if (f) {
            s += static_cast<double>(f);
            ++n;
        }
    return n ? s / n : 0.0;
}

AttackStats birthday_attack(const PublicParams& pp, std::size_t budget, std::size_t runs, Rng& rng) {
    AttackStats st;
    st.runs = runs;
    st.budget = budget;
    for (std::size_t r = 0; r < runs; ++r) {
        std::vector<std::size_t> seen;
        std::size_t hit = 0;
        for (std::size_t n = 1; n <= budget && !hit; ++n) {
            const std::size_t k = rng.below(pp.h());
            if (k == 0) continue;  // bottom: no note
            // The attacker reads its own notes exactly; a collision is a pair within eps / 2.
            for (auto s : seen)
                if (tuple_distance(pp.tuples[s], pp.tuples[k]) < pp.epsilon / 2) hit = n;
            seen.push_back(k);
        }
        st.first_collision.push_back(hit);
        if (hit) ++st.collided;
    }
    return st;
}

Eigen::MatrixXd random_orthogonal(Eigen::Index n, Rng& rng) {
    Eigen::MatrixXd G(n, n);
    for (Eigen::Index c = 0; c < n; ++c)
        for (Eigen::Index r = 0; r < n; ++r) G(r, c) = rng.normal();
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(G);
    Eigen::MatrixXd Q = qr.householderQ();
    const Eigen::MatrixXd R = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Eigen::Index c = 0; c < n; ++c)
        if (R(c, c) < 0) Q.col(c) = -Q.col(c);
    return Q;
}

double entangled_identity_residual(const Eigen::MatrixXd& R) {
    const Eigen::Index n = R.cols();
    Eigen::VectorXd s = Eigen::VectorXd::Zero(n * n), e = Eigen::VectorXd::Zero(n * n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index a = 0; a < n; ++a) s.segment(a * n, n) += R(a, i) * R.col(i);
        e(i * n + i) = 1.0;
    }
    return (s - e).cwiseAbs().maxCoeff();
}

DoubleEigenstate double_eigenstate_demo(const PublicParams& pp, Rng& rng) {
    const Eigen::Index h = static_cast<Eigen::Index>(pp.h());
    const Eigen::MatrixXd R = random_orthogonal(h, rng);
    StateVector s = StateVector::Zero(h * h);
    for (Eigen::Index i = 0; i < h; ++i) s += kron(R.col(i).cast<Complex>(), R.col(i).cast<Complex>());
    s /= std::sqrt(static_cast<double>(h));
    auto [k, post] = measure_first(pp.basis, s, rng);
    DoubleEigenstate out;
    out.index = k;
    const StateVector target = kron(pp.basis.col(k).cast<Complex>(), pp.basis.col(k).cast<Complex>());
    const Complex phase = target.dot(post);
    out.post_state_error = (post - (phase / std::abs(phase)) * target).norm();
    return out;
}

MonteCarlo triple_overlap_mc(Eigen::Index m, std::size_t trials, Rng& rng) {
    if (m < 2) throw UsageError("dimension must be at least 2");
    if (trials < 2) throw UsageError("need at least two trials");
    Eigen::VectorXcd phi(m * m * m);
    for (Eigen::Index i = 0; i < phi.size(); ++i) {
        const double re = rng.normal();
        phi(i) = Complex(re, rng.normal());
    }
    phi.normalize();
    double sum = 0.0, sq = 0.0;
    for (std::size_t t = 0; t < trials; ++t) {
        const Eigen::MatrixXd B = random_orthogonal(m, rng);
        double x = 0.0;
        for (Eigen::Index i = 0; i < m; ++i) {
            const Eigen::VectorXd b = B.col(i);
            Complex acc = 0.0;
            for (Eigen::Index a = 0; a < m; ++a)
                for (Eigen::Index c = 0; c < m; ++c)
                    acc += b(a) * b(c) * b.dot(phi.segment((a * m + c) * m, m).real()) +
                           Complex(0, 1) * b(a) * b(c) * b.dot(phi.segment((a * m + c) * m, m).imag());
            x += std::norm(acc);
        }
        sum += x;
        sq += x * x;
    }
    MonteCarlo mc;
    const double n = static_cast<double>(trials);
    mc.mean = sum / n;
    mc.stderr_ = std::sqrt(std::max(0.0, (sq / n - mc.mean * mc.mean) / (n - 1)));
    return mc;
}

}  // namespace qm
