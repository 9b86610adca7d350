#include "qmoney/encoding.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "qmoney/errors.hpp"

namespace qm {

std::string to_string(const CanonicalTriple& t) {
    return "(" + std::to_string(t.d) + "," + std::to_string(t.a) + "," + std::to_string(t.b) + ")";
}

std::int64_t isqrt(std::int64_t n) {
    if (n < 0) throw UsageError("isqrt of a negative number");
    std::int64_t r = static_cast<std::int64_t>(std::sqrt(static_cast<double>(n)));
    while (r * r > n) --r;
    while ((r + 1) * (r + 1) <= n) ++r;
    return r;
}

EncodingContext::EncodingContext(OrderPtr order) : order_(std::move(order)) {}

const SplitIso& EncodingContext::split(std::int64_t m) {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = isos_.find(m);
    if (it == isos_.end()) it = isos_.emplace(m, split_order(*order_, m)).first;
    return it->second;
}

CanonicalTriple triple_of_integral(const LeftIdeal& J, std::int64_t m, EncodingContext& ctx) {
    if (!J.integral()) throw UsageError("ideal is not integral");
    if (m == 1) return CanonicalTriple{1, 0, 1};
    const SplitIso& iso = ctx.split(m);
    std::vector<Pair> rows;
    for (const auto& r : J.omega_rows()) {
        ResidueMatrix A = iso.apply(r);
        rows.push_back({A.e[0], A.e[1]});
        rows.push_back({A.e[2], A.e[3]});
    }
    SubgroupHnf h = subgroup_hnf(m, rows);
    if (h.g1 * h.g2 != m || gcd(gcd(h.g1, h.x), h.g2) != 1)
        throw InvariantError("rowspace of a minimal ideal is not cyclic of order m");
    return CanonicalTriple{h.g1, h.x, h.g2};
}

Encoding canonical_encoding(const LeftIdeal& I, EncodingContext& ctx) {
    if (I.order().level() != ctx.level()) throw UsageError("ideal of a different order");
    const Rational& n = I.norm();
    auto mins = gramalg::minimal_vectors(I.lattice().int_gram());
    std::optional<Encoding> best;
    for (const auto& sv : mins) {
        Quaternion z = I.lattice().element(sv.x);
        Quaternion zb = conj(z) / n;
        std::array<Quaternion, 4> b;
        for (int k = 0; k < 4; ++k) b[k] = I.basis()[k] * zb;
        LeftIdeal J = LeftIdeal::trusted(I.parent(), IdealLattice(b));
        if (!J.integral() || J.norm().get_den() != 1)
            throw InvariantError("minimal-norm representative is not integral");
        std::int64_t m = J.norm().get_num().get_si();
        CanonicalTriple t = triple_of_integral(J, m, ctx);
        if (!best || t < best->triple) best = Encoding{t, std::move(J)};
    }
    if (!best) throw InternalError("no minimal vectors found");
    return *best;
}

CanonicalTriple canonical_encode(const LeftIdeal& I, EncodingContext& ctx) {
    return canonical_encoding(I, ctx).triple;
}

CanonicalTriple canonical_encode(const LeftIdeal& I) {
    EncodingContext ctx(I.parent());
    return canonical_encode(I, ctx);
}

CheckResult check_encoding(EncodingContext& ctx, const CanonicalTriple& t) {
    CheckResult res;
    if (t.a >= t.b || t.a < 0 || t.d < 1 || t.b < 1 || gcd(gcd(t.d, t.a), t.b) > 1) return res;
    const std::int64_t m = t.m();
    // Canonical triples never have the level dividing m.
    if (m % ctx.level() == 0) return res;
    const OrderPtr& O = ctx.order();
    std::int64_t c = lift_crt(t.d, t.a, t.b);
    const SplitIso& iso = ctx.split(m);
    auto x = iso.preimage(ResidueMatrix::make(m, t.d, c, 0, 0));
    IntVec4 xi{x[0], x[1], x[2], x[3]};
    Quaternion alpha = O->element(xi);
    LeftIdeal J = LeftIdeal::generated_by(O, {Quaternion::scalar(O->params(), m), alpha});
    // J has norm m by construction; a shorter vector than m * nrd(J) means a smaller
    // integral ideal in the class, so the triple cannot be canonical.
    if (canonical_encode(J, ctx) != t) return res;
    res.valid = true;
    res.ideal = std::move(J);
    return res;
}

CheckResult check_encoding(std::int64_t N, const CanonicalTriple& t) {
    EncodingContext ctx(build_maximal_order(N));
    return check_encoding(ctx, t);
}

long ClassSet::index_of(const CanonicalTriple& t) const {
    auto it = std::lower_bound(classes.begin(), classes.end(), t,
                               [](const ClassEntry& e, const CanonicalTriple& x) { return e.triple < x; });
    if (it == classes.end() || it->triple != t) return -1;
    return static_cast<long>(it - classes.begin());
}

Rational ClassSet::mass() const {
    Rational s = 0;
    for (const auto& e : classes) s += make_rational(1, e.weight.value);
    return s;
}

ClassSet enumerate_class_set(EncodingContext& ctx, int jobs) {
    const std::int64_t N = ctx.level();
    const std::int64_t M = isqrt(2 * N);
    std::vector<CanonicalTriple> candidates;
    for (std::int64_t d = 1; d <= M; ++d)
        for (std::int64_t b = 1; d * b <= M; ++b) {
            if ((d * b) % N == 0) continue;
            for (std::int64_t a = 0; a < b; ++a)
                if (gcd(gcd(d, a), b) == 1) candidates.push_back({d, a, b});
        }
    // Warm the split cache serially so the parallel phase only reads it.
    for (std::int64_t m = 1; m <= M; ++m)
        if (m % N != 0) ctx.split(m);

    jobs = std::max(1, jobs);
    std::vector<std::vector<ClassEntry>> found(jobs);
    auto worker = [&](int w) {
        for (size_t i = w; i < candidates.size(); i += jobs) {
            CheckResult r = check_encoding(ctx, candidates[i]);
            if (!r.valid) continue;
            found[w].push_back(ClassEntry{candidates[i], weight(*r.ideal), std::move(*r.ideal)});
        }
    };
    if (jobs == 1) {
        worker(0);
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < jobs; ++w) pool.emplace_back(worker, w);
        for (auto& t : pool) t.join();
    }
    ClassSet cs;
    cs.N = N;
    for (auto& part : found)
        for (auto& e : part) cs.classes.push_back(std::move(e));
    std::sort(cs.classes.begin(), cs.classes.end(),
              [](const ClassEntry& x, const ClassEntry& y) { return x.triple < y.triple; });
    if (cs.mass() != make_rational(N - 1, 12))
        throw InternalError("class set of level " + std::to_string(N) + " fails the mass identity");
    return cs;
}

ClassSet enumerate_class_set(std::int64_t N, int jobs) {
    EncodingContext ctx(build_maximal_order(N));
    return enumerate_class_set(ctx, jobs);
}

}  // namespace qm
