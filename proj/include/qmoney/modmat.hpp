#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "qmoney/orders.hpp"

namespace qm {

std::int64_t mod(std::int64_t x, std::int64_t m);
std::int64_t mulmod(std::int64_t x, std::int64_t y, std::int64_t m);
// Inverse of x mod m; throws UsageError when not a unit.
std::int64_t invmod(std::int64_t x, std::int64_t m);
std::int64_t gcd(std::int64_t x, std::int64_t y);
// Least non-negative x with x = r1 mod m1 and x = r2 mod m2; throws UsageError if inconsistent.
std::int64_t crt(std::int64_t r1, std::int64_t m1, std::int64_t r2, std::int64_t m2);

// 2x2 matrix over Z/m, row-major [[e0, e1], [e2, e3]].
struct ResidueMatrix {
    std::int64_t m = 1;
    std::array<std::int64_t, 4> e{0, 0, 0, 0};

    static ResidueMatrix make(std::int64_t m, std::int64_t a, std::int64_t b, std::int64_t c,
                              std::int64_t d);
    static ResidueMatrix identity(std::int64_t m);

    ResidueMatrix operator*(const ResidueMatrix& o) const;
    ResidueMatrix operator+(const ResidueMatrix& o) const;
    ResidueMatrix scaled(std::int64_t s) const;
    std::int64_t det() const;
    std::int64_t trace() const;
    bool operator==(const ResidueMatrix& o) const { return m == o.m && e == o.e; }
    bool operator!=(const ResidueMatrix& o) const { return !(*this == o); }
    bool operator<(const ResidueMatrix& o) const { return e < o.e; }
};

// Ring isomorphism O/mO -> M2(Z/m) given by images of the order basis.
struct SplitIso {
    std::int64_t m = 1;
    std::array<ResidueMatrix, 4> images;

    ResidueMatrix apply(const IntVec4& x) const;
    // Integer coordinates in [0, m) of the unique preimage mod m.
    std::array<std::int64_t, 4> preimage(const ResidueMatrix& target) const;
};

struct CyclicGen {
    std::int64_t m = 1;
    std::int64_t d = 1;
    std::int64_t c = 0;
};

using Pair = std::pair<std::int64_t, std::int64_t>;

std::int64_t lift_coprime(std::int64_t m, std::int64_t e, std::int64_t r);
std::int64_t lift_crt(std::int64_t d, std::int64_t a, std::int64_t b);

// Hermite form [[g1, x], [0, g2]] (0 <= x < g2) of the lattice spanned by gens and m Z^2.
struct SubgroupHnf {
    std::int64_t g1, x, g2;
};
SubgroupHnf subgroup_hnf(std::int64_t m, const std::vector<Pair>& gens);

// Throws InvariantError unless the generated subgroup is cyclic of order m.
CyclicGen cyclic_generator(std::int64_t m, const std::vector<Pair>& gens);

SplitIso split_order(const MaximalOrder& O, std::int64_t m);

// Subgroups are sorted element lists; matrix ideals are sorted matrix lists.
std::vector<Pair> subgroup_generated(std::int64_t m, const std::vector<Pair>& gens);
std::vector<ResidueMatrix> subgroup_to_matrix_ideal(std::int64_t m, const std::vector<Pair>& H);
std::vector<Pair> matrix_ideal_to_subgroup(std::int64_t m, const std::vector<ResidueMatrix>& ideal);

}  // namespace qm
