#include "qmoney/serialize.hpp"

#include <cmath>

#include "qmoney/errors.hpp"

namespace qm {

namespace {

void require_version(const Json& j, const char* what) {
    if (!j.contains("format_version") || j.at("format_version") != kFormatVersion)
        throw UsageError(std::string(what) + ": unsupported format_version");
}

Json int_json(const Integer& x) {
    if (x.fits_slong_p()) return x.get_si();
    return x.get_str();
}

Integer int_from_json(const Json& j) {
    if (j.is_string()) return Integer(j.get<std::string>());
    return Integer(j.get<long>());
}

Json complex_json(const Complex& z) { return Json::array({z.real(), z.imag()}); }

Complex complex_from_json(const Json& j) { return {j.at(0).get<double>(), j.at(1).get<double>()}; }

}  // namespace

Json to_json(const Rational& q) { return to_string(q); }

Rational rational_from_json(const Json& j) {
    if (j.is_number_integer()) return Rational(j.get<long>());
    return parse_rational(j.get<std::string>());
}

Json to_json(const Quaternion& q) {
    Json c = Json::array();
    for (const auto& x : q.coords()) c.push_back(to_json(x));
    return c;
}

Json to_json(const IdealLattice& L) {
    Json b = Json::array();
    for (const auto& q : L.basis()) b.push_back(to_json(q));
    return Json{{"a", to_json(L.params().a)}, {"b", to_json(L.params().b)}, {"basis", b}};
}

Json to_json(const MaximalOrder& O) {
    Json j = to_json(O.lattice());
    j["N"] = O.level();
    j["reduced_discriminant"] = to_json(O.reduced_discriminant());
    j["extremality_witness"] = to_json(extremality_witness(O));
    j["units"] = unit_count(O);
    return j;
}

Json to_json(const CanonicalTriple& t) { return Json::array({t.d, t.a, t.b}); }

CanonicalTriple triple_from_json(const Json& j) {
    if (!j.is_array() || j.size() != 3) throw UsageError("a triple is an array of three integers");
    return {j.at(0).get<std::int64_t>(), j.at(1).get<std::int64_t>(), j.at(2).get<std::int64_t>()};
}

Json to_json(const SplitIso& s) {
    Json im = Json::array();
    for (const auto& M : s.images) im.push_back(Json::array({{M.e[0], M.e[1]}, {M.e[2], M.e[3]}}));
    return Json{{"m", s.m}, {"images", im}};
}

Json to_json(const ClassSet& cs) {
    Json classes = Json::array();
    for (const auto& e : cs.classes) {
        Json rows = Json::array();
        for (const auto& r : e.ideal.omega_rows()) {
            Json row = Json::array();
            for (const auto& x : r) row.push_back(int_json(x));
            rows.push_back(row);
        }
        Json c{{"d", e.triple.d}, {"a", e.triple.a}, {"b", e.triple.b}, {"w", e.weight.value},
               {"norm", to_json(e.ideal.norm())}, {"ideal", rows}};
        // Rows are order coordinates times ideal_den; omitted when the ideal is integral.
        if (e.ideal.omega_den() != 1) c["ideal_den"] = int_json(e.ideal.omega_den());
        classes.push_back(std::move(c));
    }
    return Json{{"format_version", kFormatVersion},
                {"N", cs.N},
                {"h", cs.size()},
                {"mass", to_json(cs.mass())},
                {"classes", classes}};
}

ClassSet class_set_from_json(const Json& j, const OrderPtr& order) {
    require_version(j, "class set");
    ClassSet cs;
    cs.N = j.at("N").get<std::int64_t>();
    if (cs.N != order->level()) throw UsageError("class set level does not match the order");
    for (const auto& c : j.at("classes")) {
        ClassEntry e;
        e.triple = {c.at("d").get<std::int64_t>(), c.at("a").get<std::int64_t>(), c.at("b").get<std::int64_t>()};
        e.weight.value = c.at("w").get<int>();
        const Integer den = c.contains("ideal_den") ? int_from_json(c.at("ideal_den")) : Integer(1);
        std::array<Quaternion, 4> basis;
        for (int r = 0; r < 4; ++r) {
            IntVec4 x;
            for (int k = 0; k < 4; ++k) x[k] = int_from_json(c.at("ideal").at(r).at(k));
            basis[r] = order->element(x) / Rational(den);
        }
        e.ideal = LeftIdeal(order, IdealLattice(basis));
        if (e.ideal.norm() != rational_from_json(c.at("norm"))) throw UsageError("stored ideal norm mismatch");
        cs.classes.push_back(std::move(e));
    }
    if (cs.classes.size() != j.at("h").get<std::size_t>()) throw UsageError("class count mismatch");
    for (std::size_t k = 1; k < cs.classes.size(); ++k)
        if (!(cs.classes[k - 1].triple < cs.classes[k].triple)) throw UsageError("class triples not strictly sorted");
    if (cs.mass() != make_rational(cs.N - 1, 12)) throw UsageError("stored class set fails the mass identity");
    return cs;
}

Json to_json(const BrandtMatrix& B) {
    Json t = Json::array();
    for (const auto& x : B.triplets) t.push_back(Json::array({x[0], x[1], x[2]}));
    return Json{{"format_version", kFormatVersion}, {"N", B.N},         {"p", B.p},
                {"h", B.h},                         {"weights", B.weights}, {"triplets", t}};
}

BrandtMatrix brandt_from_json(const Json& j) {
    require_version(j, "Brandt matrix");
    BrandtMatrix B;
    B.N = j.at("N").get<std::int64_t>();
    B.p = j.at("p").get<std::int64_t>();
    B.h = j.at("h").get<std::int64_t>();
    B.weights = j.at("weights").get<std::vector<int>>();
    for (const auto& t : j.at("triplets")) {
        std::array<std::int64_t, 3> x{t.at(0).get<std::int64_t>(), t.at(1).get<std::int64_t>(),
                                      t.at(2).get<std::int64_t>()};
        if (x[0] < 0 || x[0] >= B.h || x[1] < 0 || x[1] >= B.h || x[2] <= 0)
            throw UsageError("Brandt triplet out of range");
        B.triplets.push_back(x);
    }
    if (static_cast<std::int64_t>(B.weights.size()) != B.h) throw UsageError("weight count mismatch");
    return B;
}

Json to_json(const JointEigenbasis& jb) {
    auto vec = [](const Eigen::VectorXd& v) {
        return std::vector<double>(v.data(), v.data() + v.size());
    };
    Json vs = Json::array();
    for (Eigen::Index c = 0; c < jb.vectors.cols(); ++c) vs.push_back(vec(jb.vectors.col(c)));
    return Json{{"format_version", kFormatVersion},
                {"N", jb.N},
                {"primes", jb.primes},
                {"seed", jb.seed_used},
                {"attempts", jb.attempts},
                {"max_residual", jb.max_residual},
                {"eisenstein", vec(jb.eisenstein)},
                {"lambda", jb.lambda},
                {"vectors", vs}};
}

JointEigenbasis spectrum_from_json(const Json& j) {
    require_version(j, "spectrum");
    JointEigenbasis jb;
    jb.N = j.at("N").get<std::int64_t>();
    jb.primes = j.at("primes").get<std::vector<std::int64_t>>();
    jb.seed_used = j.at("seed").get<std::uint64_t>();
    jb.attempts = j.at("attempts").get<int>();
    jb.max_residual = j.at("max_residual").get<double>();
    const auto e = j.at("eisenstein").get<std::vector<double>>();
    jb.eisenstein = Eigen::Map<const Eigen::VectorXd>(e.data(), static_cast<Eigen::Index>(e.size()));
    jb.lambda = j.at("lambda").get<std::vector<std::vector<double>>>();
    const auto& vs = j.at("vectors");
    jb.vectors.resize(jb.eisenstein.size(), static_cast<Eigen::Index>(vs.size()));
    for (std::size_t c = 0; c < vs.size(); ++c) {
        const auto v = vs.at(c).get<std::vector<double>>();
        if (static_cast<Eigen::Index>(v.size()) != jb.eisenstein.size()) throw UsageError("eigenvector length mismatch");
        jb.vectors.col(static_cast<Eigen::Index>(c)) = Eigen::Map<const Eigen::VectorXd>(v.data(), v.size());
    }
    if (jb.lambda.size() != vs.size()) throw UsageError("eigenvalue count mismatch");
    for (const auto& l : jb.lambda) {
        if (l.size() != jb.primes.size()) throw UsageError("eigenvalue tuple length mismatch");
        std::vector<Complex> z;
        for (std::size_t k = 0; k < l.size(); ++k)
            z.push_back(std::polar(1.0, l[k] / std::sqrt(static_cast<double>(jb.primes[k]))));
        jb.z.push_back(std::move(z));
    }
    return jb;
}

Json to_json(const Bill& b, std::int64_t N) {
    Json serial = Json::array();
    for (const auto& z : b.serial) serial.push_back(complex_json(z));
    Json note;
    if (b.index) note["index"] = *b.index;
    if (b.state) {
        Json amp = Json::array();
        for (Eigen::Index i = 0; i < b.state->size(); ++i) amp.push_back(complex_json((*b.state)(i)));
        note["amplitudes"] = amp;
    }
    return Json{{"format_version", kFormatVersion},
                {"N", N},
                {"serial", serial},
                {"signature", base64_encode(b.signature)},
                {"note", note}};
}

Bill bill_from_json(const Json& j) {
    require_version(j, "bill");
    Bill b;
    for (const auto& z : j.at("serial")) b.serial.push_back(complex_from_json(z));
    b.signature = base64_decode(j.at("signature").get<std::string>());
    const auto& note = j.at("note");
    if (note.contains("index")) b.index = note.at("index").get<std::size_t>();
    if (note.contains("amplitudes")) {
        const auto& a = note.at("amplitudes");
        StateVector s(static_cast<Eigen::Index>(a.size()));
        for (std::size_t i = 0; i < a.size(); ++i) s(static_cast<Eigen::Index>(i)) = complex_from_json(a.at(i));
        b.state = std::move(s);
    }
    if (!b.index && !b.state) throw UsageError("bill note carries neither index nor amplitudes");
    return b;
}

std::string dump(const Json& j) { return j.dump(1) + "\n"; }

}  // namespace qm
