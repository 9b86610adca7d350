#pragma once

#include <array>
#include <functional>
#include <vector>

#include "qmoney/quaternion.hpp"

namespace qm {

using IntVec4 = std::array<Integer, 4>;
using IntMat4 = std::array<IntVec4, 4>;

IntMat4 int_identity();
Integer det(const IntMat4& m);
Rational det(const RatMat4& m);
// Throws UsageError when singular.
RatMat4 inverse(const RatMat4& m);
IntMat4 mul(const IntMat4& x, const IntMat4& y);
IntVec4 row_times(const IntVec4& x, const IntMat4& m);

// Row-style Hermite normal form of the Z-span of the given rows: upper triangular,
// positive pivots, entries above each pivot reduced into [0, pivot).
// Throws UsageError when the rows span less than rank 4.
IntMat4 hnf(std::vector<IntVec4> rows);

// The lattice {x in Z^4 : x * A = 0 mod p} for a 4 x k integer matrix A (given as
// its k columns) and a prime p; contains p Z^4.
IntMat4 kernel_mod_p(const std::vector<IntVec4>& columns, const Integer& p);

// Exact enumeration over an integral positive definite quadratic form g,
// value x^T g x. These work purely on the Gram matrix.
namespace gramalg {

struct ShortVector {
    IntVec4 x;
    Integer value;
};

// LLL-reduce in place (delta = 3/4, exact); returns U with g_new = U g_old U^T.
IntMat4 lll(IntMat4& g);

// Calls back for every nonzero x with value <= bound, once per pair +-x
// (the representative has its last nonzero coordinate positive).
void enumerate(const IntMat4& g, const Integer& bound,
               const std::function<void(const IntVec4&, const Integer&)>& cb);

// All nonzero vectors with value <= bound, one per sign pair, first nonzero
// coordinate positive, sorted by (value, coordinates).
std::vector<ShortVector> short_vectors(const IntMat4& g, const Integer& bound);

// Vectors of minimal nonzero value with the same conventions.
std::vector<ShortVector> minimal_vectors(const IntMat4& g);

// Unimodular U whose rows form a Minkowski-reduced basis of g.
IntMat4 minkowski(const IntMat4& g);

}  // namespace gramalg

// Full-rank lattice of quaternions, kept with exact derived data.
class IdealLattice {
public:
    IdealLattice() = default;
    // Throws UsageError if the four elements are Q-dependent or live in different algebras.
    explicit IdealLattice(const std::array<Quaternion, 4>& basis);

    // Z-span of arbitrary generators; basis in Hermite normal form.
    static IdealLattice from_generators(const AlgebraParams& params,
                                        const std::vector<Quaternion>& gens);

    const AlgebraParams& params() const { return params_; }
    const std::array<Quaternion, 4>& basis() const { return basis_; }
    // Least positive D with D * L inside Z^4 for the coordinates 1, i, j, ij.
    const Integer& denominator() const { return den_; }
    // Rows are D times the basis coordinates.
    const IntMat4& int_coords() const { return coords_; }
    const RatMat4& gram() const { return gram_; }
    // Integer form on basis coordinates: x^T G x = scale * nrd.
    const IntMat4& int_gram() const { return int_gram_; }
    const Integer& gram_scale() const { return gram_scale_; }
    const Rational& gram_det() const { return det_; }

    Quaternion element(const IntVec4& x) const;
    // Coordinates of q in this basis (rational; integral iff q lies in the lattice).
    std::array<Rational, 4> coordinates_of(const Quaternion& q) const;
    bool contains(const Quaternion& q) const;
    bool contains(const IdealLattice& other) const;
    bool same_set(const IdealLattice& other) const;

    IdealLattice right_scaled(const Quaternion& z) const;
    IdealLattice left_scaled(const Quaternion& z) const;
    IdealLattice conjugated() const;

private:
    AlgebraParams params_;
    std::array<Quaternion, 4> basis_;
    Integer den_;
    IntMat4 coords_;
    RatMat4 coords_inv_;  // inverse of the rational basis matrix
    RatMat4 gram_;
    IntMat4 int_gram_;
    Integer gram_scale_;
    Rational det_;
};

RatMat4 gram(const IdealLattice& L);
IdealLattice minkowski_reduce(const IdealLattice& L);
std::vector<Quaternion> shortest_vectors(const IdealLattice& L);
// Minimal nonzero nrd.
Rational lattice_minimum(const IdealLattice& L);
// All nonzero elements with nrd <= bound, one per sign pair, sorted by (nrd, coordinates).
std::vector<Quaternion> elements_up_to(const IdealLattice& L, const Rational& bound);
// Generalized index [L2 : L1].
Rational index_in(const IdealLattice& L1, const IdealLattice& L2);
// Z-span of all products x*y.
IdealLattice lattice_product(const IdealLattice& L1, const IdealLattice& L2);

// Exact square root of a rational square; throws InvariantError otherwise.
Rational exact_sqrt(const Rational& q);

}  // namespace qm
