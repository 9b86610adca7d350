#pragma once

#include <array>
#include <vector>

#include <Eigen/Dense>

#include "qmoney/config.hpp"
#include "qmoney/encoding.hpp"

namespace qm {

// Column J of T'(p) is the histogram of the classes of the p + 1 neighbors of J.
struct BrandtMatrix {
    std::int64_t N = 0;
    std::int64_t p = 0;
    std::int64_t h = 0;
    // (row, col, value), sorted by (row, col), values > 0.
    std::vector<std::array<std::int64_t, 3>> triplets;
    std::vector<int> weights;

    Eigen::MatrixXd dense() const;
    std::vector<std::int64_t> column_sums() const;
};

struct NormalizedBrandt {
    std::int64_t N = 0;
    std::int64_t p = 0;
    Eigen::MatrixXd T;
    // Unit vector spanning the complement of V_N: the computed (p+1)-eigenvector.
    Eigen::VectorXd distinguished;
    // Whether the distinguished direction matches sqrt(w) or 1/sqrt(w) (up to scale).
    bool matches_sqrt_w = false;
    bool matches_inv_sqrt_w = false;
    // True when W T' W^-1 was symmetric; false when W^-1 T' W was used instead.
    bool forward_orientation = true;
};

// Canonical triples of the p + 1 index-p^2 sublattices of an integral J with p not dividing nrd(J).
std::vector<CanonicalTriple> p_neighbors(const LeftIdeal& J, std::int64_t p, EncodingContext& ctx);

// A representative of [J] that is integral with norm coprime to p.
LeftIdeal coprime_representative(const LeftIdeal& J, std::int64_t p);

BrandtMatrix brandt_matrix(const ClassSet& cs, std::int64_t p, EncodingContext& ctx, int jobs = 1);

NormalizedBrandt normalized_brandt(const BrandtMatrix& B, const Tolerances& tol = default_tolerances());

// Orthogonal projection onto the complement of the unit vector u0.
Eigen::VectorXd project_VN(const Eigen::VectorXd& u0, const Eigen::VectorXd& v);

}  // namespace qm
