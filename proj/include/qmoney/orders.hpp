#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "qmoney/lattice.hpp"

namespace qm {

bool is_prime(std::int64_t n);
// Prime factors (with repetition) by trial division.
std::vector<std::int64_t> factor(std::int64_t n);

// Local Hilbert symbol (a,b)_p for rationals; p = 0 denotes the real place.
int hilbert_symbol(const Rational& a, const Rational& b, std::int64_t p);

AlgebraParams build_algebra(std::int64_t N);
bool is_ramified_correctly(const AlgebraParams& params, std::int64_t N);

class MaximalOrder {
public:
    // Validates: contains 1, closed under multiplication, reduced discriminant N.
    // Throws InvariantError otherwise.
    MaximalOrder(const IdealLattice& lattice, std::int64_t N);

    std::int64_t level() const { return level_; }
    const IdealLattice& lattice() const { return lattice_; }
    const AlgebraParams& params() const { return lattice_.params(); }
    const std::array<Quaternion, 4>& basis() const { return lattice_.basis(); }

    std::array<Rational, 4> coords(const Quaternion& q) const { return lattice_.coordinates_of(q); }
    // Integral coordinates; throws UsageError if q is not in the order.
    IntVec4 int_coords(const Quaternion& q) const;
    bool contains(const Quaternion& q) const { return lattice_.contains(q); }
    Quaternion element(const IntVec4& x) const { return lattice_.element(x); }

    // c[r][s] = coordinates of basis[r] * basis[s].
    const std::array<std::array<IntVec4, 4>, 4>& structure_constants() const { return mult_; }
    // Reduced discriminant: sqrt(|det(trd(w_r * conj(w_s)))|).
    Rational reduced_discriminant() const;

    bool same_set(const MaximalOrder& o) const { return lattice_.same_set(o.lattice_); }

private:
    IdealLattice lattice_;
    std::int64_t level_;
    std::array<std::array<IntVec4, 4>, 4> mult_;
};

using OrderPtr = std::shared_ptr<const MaximalOrder>;

// The N-extremal maximal order of build_algebra(N); throws InternalError if a check fails.
OrderPtr build_maximal_order(std::int64_t N);
// Least element of nrd N (the generator of the two-sided ideal above N).
Quaternion extremality_witness(const MaximalOrder& O);
int unit_count(const MaximalOrder& O);

class LeftIdeal {
public:
    LeftIdeal() = default;
    // Checks O * L inside L; the stored basis is the Hermite form in order coordinates.
    LeftIdeal(OrderPtr parent, const IdealLattice& lattice);

    static LeftIdeal unit(OrderPtr parent);
    // The left ideal O*g_1 + ... + O*g_k.
    static LeftIdeal generated_by(OrderPtr parent, const std::vector<Quaternion>& gens);
    // Skip the stability check; for lattices stable by construction.
    static LeftIdeal trusted(OrderPtr parent, const IdealLattice& lattice);

    const IdealLattice& lattice() const { return lattice_; }
    const OrderPtr& parent() const { return parent_; }
    const MaximalOrder& order() const { return *parent_; }
    const AlgebraParams& params() const { return lattice_.params(); }
    const std::array<Quaternion, 4>& basis() const { return lattice_.basis(); }

    // Basis = rows / den in coordinates of the parent order basis.
    const IntMat4& omega_rows() const { return rows_; }
    const Integer& omega_den() const { return den_; }
    bool integral() const { return den_ == 1; }
    const Rational& norm() const { return norm_; }

    bool operator==(const LeftIdeal& o) const { return den_ == o.den_ && rows_ == o.rows_; }
    bool operator!=(const LeftIdeal& o) const { return !(*this == o); }

private:
    void canonicalize(const IdealLattice& lattice);

    OrderPtr parent_;
    IdealLattice lattice_;
    IntMat4 rows_;
    Integer den_;
    Rational norm_;
};

Rational nrd_ideal(const LeftIdeal& I);
LeftIdeal ideal_scale(const LeftIdeal& I, const Quaternion& z);
// The conjugate and the inverse are left ideals of the right order of I.
LeftIdeal ideal_conj(const LeftIdeal& I);
LeftIdeal ideal_inverse(const LeftIdeal& I);
// Lattice of products; a left ideal of I's parent when J's parent is I's right order.
IdealLattice ideal_product(const LeftIdeal& I, const LeftIdeal& J);
OrderPtr right_order(const LeftIdeal& I);

struct Weight {
    int value = 1;
};
Weight weight(const LeftIdeal& I);

}  // namespace qm
