#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "qmoney/brandt.hpp"

namespace qm {

using Complex = std::complex<double>;

struct JointEigenbasis {
    std::int64_t N = 0;
    std::vector<std::int64_t> primes;
    // Unit vector spanning the complement of V_N.
    Eigen::VectorXd eisenstein;
    // Columns: orthonormal joint eigenvectors spanning V_N, ordered by lambda tuples.
    Eigen::MatrixXd vectors;
    // lambda[i][j]: eigenvalue of vector i under T(primes[j]).
    std::vector<std::vector<double>> lambda;
    // z[i][j] = exp(i lambda[i][j] / sqrt(primes[j])).
    std::vector<std::vector<Complex>> z;
    std::uint64_t seed_used = 0;
    int attempts = 0;
    double max_residual = 0.0;

    std::size_t dim() const { return lambda.size(); }
    // The tuple of the distinguished vector, z_j = exp(i (p_j + 1) / sqrt(p_j)).
    std::vector<Complex> eisenstein_tuple() const;
};

// Diagonalizes a random positive combination of the T(p_j); retries with fresh
// coefficients on numerical degeneracy, then verifies every residual.
JointEigenbasis joint_eigenbasis(const std::vector<NormalizedBrandt>& Ts, std::uint64_t seed = 1,
                                 const Tolerances& tol = default_tolerances(), int max_attempts = 8);

struct Separation {
    double epsilon = 0.0;
    // Indices into the tuple list; -1 marks the distinguished tuple when it is included.
    long i = 0, k = 0;
    bool duplicate = false;
};

double tuple_distance(const std::vector<Complex>& x, const std::vector<Complex>& y);
Separation separation(const JointEigenbasis& jb, bool include_eisenstein = false);

enum class PrimeRule {
    below_log2,        // p < log2(N)
    below_floor_log2,  // p < floor(log2(N)); differs only when floor(log2 N) is prime
};

// Primes below the chosen bound with p != N; UsageError if there are none.
std::vector<std::int64_t> default_primes(std::int64_t N, PrimeRule rule = PrimeRule::below_log2);

// Density of the p-adic Plancherel measure on [-2, 2] and its distribution function.
double mu_density(std::int64_t p, double x);
double mu_cdf(std::int64_t p, double x);

struct SerreDiagnostic {
    std::int64_t p = 0;
    std::vector<double> bins;       // empirical mass per bin on [-2, 2]
    std::vector<double> predicted;  // mu_p mass per bin
    double ks = 0.0;                // sup |F_emp - F_mu|
};

SerreDiagnostic serre_diagnostic(const JointEigenbasis& jb, std::size_t prime_index, std::size_t nbins = 20);

}  // namespace qm
