#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "qmoney/encoding.hpp"
#include "qmoney/rng.hpp"
#include "qmoney/signature.hpp"
#include "qmoney/spectral.hpp"

namespace qm {

// Amplitudes on C^h (x) C^h in the class-triple basis, entry a * h + b.
using StateVector = Eigen::VectorXcd;

struct PublicParams {
    std::int64_t N = 0;
    std::vector<std::int64_t> primes;
    double epsilon = 0.0;
    std::shared_ptr<const JointEigenbasis> spectrum;
    // Columns: full real eigenbasis of C^h; column 0 is the distinguished vector.
    Eigen::MatrixXd basis;
    // Unitary eigenvalue tuple of each column of basis.
    std::vector<std::vector<Complex>> tuples;

    std::size_t h() const { return static_cast<std::size_t>(basis.cols()); }
    std::size_t t() const { return primes.size(); }
};

// epsilon defaults to the measured separation over all h tuples and may not exceed it.
PublicParams make_public_params(std::shared_ptr<const JointEigenbasis> spectrum,
                                std::optional<double> epsilon = std::nullopt);

struct Bill {
    // Lossless mode: the eigenstate index; state-vector mode: the amplitudes.
    std::optional<std::size_t> index;
    std::optional<StateVector> state;
    std::vector<Complex> serial;
    Bytes signature;
};

// Canonical byte string that is signed for a serial.
Bytes serial_bytes(const std::vector<Complex>& serial);

struct MintResult {
    std::optional<Bill> bill;  // empty means bottom
    std::size_t sampled_index = 0;
};

MintResult mint(const PublicParams& pp, const SignatureScheme& sk, Rng& rng, bool state_vector = false);

struct VerifyResult {
    bool accepted = false;
    std::string reason;
    Bill post;
    std::size_t k = 0, l = 0;  // measured eigenstate indices of the two registers
};

// readout_noise < 0 selects the default epsilon / 6; 0 disables noise.
VerifyResult verify(const PublicParams& pp, const SignatureScheme& vk, const Bill& bill, Rng& rng,
                    double readout_noise = 0.0);

// Equal superposition over the class triples, extended to sum |t>|t> / sqrt(h).
StateVector entangled_class_state(std::size_t h);

struct PrepStats {
    std::size_t trials = 0;
    std::size_t successes = 0;
    double exact_probability = 0.0;
    double bound = 0.0;
    // Overlap of the unnormalized-weight post-success state with the uniform one.
    double fidelity_with_uniform = 0.0;
    double empirical() const { return trials ? static_cast<double>(successes) / trials : 0.0; }
};

// Samples the register contents after the first two preparation steps; a trial
// succeeds when the sampled triple is a canonical encoding.
PrepStats prepare_entangled(const ClassSet& cs, std::size_t trials, Rng& rng);

struct LightningParams {
    double epsilon = 0.0;  // spacing of the rounding grid
    double delta = 0.0;    // measurement error, below epsilon / (10 t)
    Complex z;             // offset in the unit square
};

// epsilon defaults to the separation divided by 10 sqrt(t); delta to epsilon / (20 t).
LightningParams make_lightning_params(const PublicParams& pp, Rng& rng, std::optional<double> delta = std::nullopt);

struct Bolt {
    LightningParams lp;
    std::size_t index_x = 0, index_y = 0;  // hidden from the verifier
};

struct StormResult {
    Bolt bolt;
    std::size_t attempts = 0;
    // Eigenvalue tuples of rejected draws.
    std::vector<std::vector<Complex>> rejected;
};

bool near_grid(const std::vector<Complex>& lambda, const LightningParams& lp);
StormResult lightning_storm(const PublicParams& pp, const LightningParams& lp, Rng& rng);

using LightningSerial = std::vector<std::pair<std::int64_t, std::int64_t>>;
std::optional<LightningSerial> lightning_verify(const PublicParams& pp, const Bolt& bolt, Rng& rng);

struct AttackStats {
    std::size_t runs = 0;
    std::size_t budget = 0;
    std::size_t collided = 0;
    // Number of notes minted when the first collision appeared, or 0 for none.
    std::vector<std::size_t> first_collision;
    double mean_first_collision() const;
};

AttackStats birthday_attack(const PublicParams& pp, std::size_t budget, std::size_t runs, Rng& rng);

// Haar-random real orthogonal matrix.
Eigen::MatrixXd random_orthogonal(Eigen::Index n, Rng& rng);

// Max entry of sum rho_i (x) rho_i - sum e_i (x) e_i for the columns rho_i of R.
double entangled_identity_residual(const Eigen::MatrixXd& R);

struct DoubleEigenstate {
    std::size_t index = 0;
    double post_state_error = 0.0;  // distance of the collapsed state to e_k (x) e_k
};

DoubleEigenstate double_eigenstate_demo(const PublicParams& pp, Rng& rng);

struct MonteCarlo {
    double mean = 0.0;
    double stderr_ = 0.0;
};

MonteCarlo triple_overlap_mc(Eigen::Index m, std::size_t trials, Rng& rng);

}  // namespace qm
