#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>

#include "qmoney/serialize.hpp"

namespace qm {

// Default cache root: $QMONEY_CACHE_DIR, else ".qmoney-cache".
std::filesystem::path default_cache_dir();

// Lazily builds (or loads from an on-disk cache) every artifact for one level.
// Cache layout: <root>/<N>/{classset.json, brandt-<p>.json, spectrum.json}.
// Files with a different format_version or that fail validation are rebuilt
// after a warning.
class Workspace {
public:
    using Warn = std::function<void(const std::string&)>;

    Workspace(std::int64_t N, std::optional<std::filesystem::path> cache_root, int jobs = 1, Warn warn = {});

    void set_tolerances(const Tolerances& t) { tol_ = t; }
    const Tolerances& tolerances() const { return tol_; }
    std::int64_t level() const { return N_; }
    const OrderPtr& order() const { return order_; }
    EncodingContext& context() { return *ctx_; }
    const ClassSet& class_set();
    const BrandtMatrix& brandt(std::int64_t p);
    const NormalizedBrandt& normalized(std::int64_t p);
    std::shared_ptr<const JointEigenbasis> spectrum(const std::vector<std::int64_t>& primes, std::uint64_t seed = 1);

private:
    std::optional<Json> read(const std::string& name);
    void write(const std::string& name, const Json& j);

    std::int64_t N_;
    std::optional<std::filesystem::path> dir_;
    int jobs_;
    Warn warn_;
    Tolerances tol_;
    OrderPtr order_;
    std::unique_ptr<EncodingContext> ctx_;
    std::optional<ClassSet> cs_;
    std::map<std::int64_t, BrandtMatrix> brandt_;
    std::map<std::int64_t, NormalizedBrandt> normalized_;
    std::map<std::pair<std::vector<std::int64_t>, std::uint64_t>, std::shared_ptr<const JointEigenbasis>> spectra_;
};

}  // namespace qm
