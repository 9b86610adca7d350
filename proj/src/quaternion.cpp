#include "qmoney/quaternion.hpp"

#include "qmoney/errors.hpp"

namespace qm {

Rational make_rational(const Integer& num, const Integer& den) {
    if (den == 0) throw UsageError("rational with zero denominator");
    Rational q(num, den);
    q.canonicalize();
    return q;
}

std::string to_string(const Rational& q) {
    return q.get_num().get_str() + "/" + q.get_den().get_str();
}

Rational parse_rational(const std::string& text) {
    auto slash = text.find('/');
    try {
        if (slash == std::string::npos) return make_rational(Integer(text));
        return make_rational(Integer(text.substr(0, slash)), Integer(text.substr(slash + 1)));
    } catch (const std::invalid_argument&) {
        throw UsageError("malformed rational: '" + text + "'");
    }
}

AlgebraParams::AlgebraParams(Rational a_, Rational b_) : a(std::move(a_)), b(std::move(b_)) {
    if (a == 0 || b == 0) throw UsageError("algebra parameters must be nonzero");
}

Quaternion::Quaternion(const AlgebraParams& params) : params_(params) {}

Quaternion::Quaternion(const AlgebraParams& params, Rational alpha, Rational beta,
                       Rational gamma, Rational delta)
    : params_(params), c_{std::move(alpha), std::move(beta), std::move(gamma), std::move(delta)} {}

Quaternion::Quaternion(const AlgebraParams& params, const std::array<Rational, 4>& coords)
    : params_(params), c_(coords) {}

Quaternion Quaternion::scalar(const AlgebraParams& params, const Rational& s) {
    return Quaternion(params, s, 0, 0, 0);
}

bool Quaternion::is_zero() const {
    return c_[0] == 0 && c_[1] == 0 && c_[2] == 0 && c_[3] == 0;
}

bool Quaternion::operator==(const Quaternion& o) const {
    return params_ == o.params_ && c_ == o.c_;
}

static void require_same(const Quaternion& x, const Quaternion& y) {
    if (x.params() != y.params())
        throw UsageError("quaternions from different algebras");
}

Quaternion Quaternion::operator+(const Quaternion& o) const {
    require_same(*this, o);
    Quaternion r(params_);
    for (int k = 0; k < 4; ++k) r.c_[k] = c_[k] + o.c_[k];
    return r;
}

Quaternion Quaternion::operator-(const Quaternion& o) const {
    require_same(*this, o);
    Quaternion r(params_);
    for (int k = 0; k < 4; ++k) r.c_[k] = c_[k] - o.c_[k];
    return r;
}

Quaternion Quaternion::operator-() const {
    Quaternion r(params_);
    for (int k = 0; k < 4; ++k) r.c_[k] = -c_[k];
    return r;
}

Quaternion Quaternion::operator*(const Quaternion& o) const { return quat_mul(*this, o); }

Quaternion Quaternion::operator*(const Rational& s) const {
    Quaternion r(params_);
    for (int k = 0; k < 4; ++k) r.c_[k] = c_[k] * s;
    return r;
}

Quaternion Quaternion::operator/(const Rational& s) const {
    if (s == 0) throw UsageError("division of a quaternion by zero");
    Quaternion r(params_);
    for (int k = 0; k < 4; ++k) r.c_[k] = c_[k] / s;
    return r;
}

Quaternion quat_mul(const Quaternion& x, const Quaternion& y) {
    require_same(x, y);
    const Rational& a = x.params().a;
    const Rational& b = x.params().b;
    const auto& p = x.coords();
    const auto& q = y.coords();
    // (ij)^2 = -ab, ji = -ij, i(ij) = a j, (ij)i = -a j, j(ij) = -b i, (ij)j = b i.
    Rational ab = a * b;
    Rational z0 = p[0] * q[0] + a * p[1] * q[1] + b * p[2] * q[2] - ab * p[3] * q[3];
    Rational z1 = p[0] * q[1] + p[1] * q[0] - b * p[2] * q[3] + b * p[3] * q[2];
    Rational z2 = p[0] * q[2] + p[2] * q[0] + a * p[1] * q[3] - a * p[3] * q[1];
    Rational z3 = p[0] * q[3] + p[3] * q[0] + p[1] * q[2] - p[2] * q[1];
    return Quaternion(x.params(), std::move(z0), std::move(z1), std::move(z2), std::move(z3));
}

Quaternion conj(const Quaternion& x) {
    const auto& c = x.coords();
    return Quaternion(x.params(), c[0], -c[1], -c[2], -c[3]);
}

Rational nrd(const Quaternion& x) {
    const Rational& a = x.params().a;
    const Rational& b = x.params().b;
    const auto& c = x.coords();
    return c[0] * c[0] - a * c[1] * c[1] - b * c[2] * c[2] + a * b * c[3] * c[3];
}

Rational trd(const Quaternion& x) { return 2 * x.coords()[0]; }

Quaternion inverse(const Quaternion& x) {
    Rational n = nrd(x);
    if (n == 0) throw UsageError("quaternion is not invertible");
    return conj(x) / n;
}

RatMat4 norm_form(const AlgebraParams& params) {
    if (!params.definite())
        throw UnsupportedError("only definite quaternion algebras are supported");
    RatMat4 g{};
    for (auto& row : g)
        for (auto& e : row) e = 0;
    g[0][0] = 1;
    g[1][1] = -params.a;
    g[2][2] = -params.b;
    g[3][3] = params.a * params.b;
    return g;
}

std::string to_string(const Quaternion& x) {
    static const char* units[4] = {"", "i", "j", "ij"};
    std::string out;
    for (int k = 0; k < 4; ++k) {
        const Rational& c = x[k];
        if (c == 0) continue;
        if (!out.empty()) out += (sgn(c) > 0) ? " + " : " - ";
        else if (sgn(c) < 0) out += "-";
        Rational mag = abs(c);
        if (k == 0 || mag != 1) out += mag.get_str();
        out += units[k];
    }
    return out.empty() ? "0" : out;
}

}  // namespace qm
