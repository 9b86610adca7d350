#pragma once

#include <array>
#include <string>

#include <gmpxx.h>

namespace qm {

using Integer = mpz_class;
using Rational = mpq_class;

// Builds num/den in lowest terms; den must be nonzero.
Rational make_rational(const Integer& num, const Integer& den = 1);
std::string to_string(const Rational& q);
Rational parse_rational(const std::string& text);

struct AlgebraParams {
    Rational a;
    Rational b;

    AlgebraParams() = default;
    AlgebraParams(Rational a_, Rational b_);

    bool definite() const { return sgn(a) < 0 && sgn(b) < 0; }
    bool operator==(const AlgebraParams& o) const { return a == o.a && b == o.b; }
    bool operator!=(const AlgebraParams& o) const { return !(*this == o); }
};

// alpha + beta i + gamma j + delta ij in H(a,b).
class Quaternion {
public:
    Quaternion() = default;
    explicit Quaternion(const AlgebraParams& params);
    Quaternion(const AlgebraParams& params, Rational alpha, Rational beta, Rational gamma,
               Rational delta);
    Quaternion(const AlgebraParams& params, const std::array<Rational, 4>& coords);

    static Quaternion scalar(const AlgebraParams& params, const Rational& s);

    const AlgebraParams& params() const { return params_; }
    const std::array<Rational, 4>& coords() const { return c_; }
    const Rational& operator[](int k) const { return c_[k]; }

    bool is_zero() const;
    bool operator==(const Quaternion& o) const;
    bool operator!=(const Quaternion& o) const { return !(*this == o); }

    Quaternion operator+(const Quaternion& o) const;
    Quaternion operator-(const Quaternion& o) const;
    Quaternion operator-() const;
    Quaternion operator*(const Quaternion& o) const;
    Quaternion operator*(const Rational& s) const;
    Quaternion operator/(const Rational& s) const;

private:
    AlgebraParams params_;
    std::array<Rational, 4> c_;
};

Quaternion quat_mul(const Quaternion& x, const Quaternion& y);
Quaternion conj(const Quaternion& x);
Rational nrd(const Quaternion& x);
Rational trd(const Quaternion& x);
// Two-sided inverse; throws UsageError on zero.
Quaternion inverse(const Quaternion& x);

using RatMat4 = std::array<std::array<Rational, 4>, 4>;

// Gram matrix of nrd in the basis 1, i, j, ij.
RatMat4 norm_form(const AlgebraParams& params);

std::string to_string(const Quaternion& x);

}  // namespace qm
