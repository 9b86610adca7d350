#include "qmoney/cache.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "qmoney/errors.hpp"

namespace qm {

namespace fs = std::filesystem;

fs::path default_cache_dir() {
    if (const char* env = std::getenv("QMONEY_CACHE_DIR"); env && *env) return env;
    return ".qmoney-cache";
}

Workspace::Workspace(std::int64_t N, std::optional<fs::path> cache_root, int jobs, Warn warn)
    : N_(N), jobs_(jobs), warn_(std::move(warn)) {
    if (N < 5 || !is_prime(N)) throw UsageError("N must be a prime >= 5");
    if (!warn_) warn_ = [](const std::string& s) { std::cerr << "warning: " << s << "\n"; };
    if (cache_root) dir_ = *cache_root / std::to_string(N);
    order_ = build_maximal_order(N);
    ctx_ = std::make_unique<EncodingContext>(order_);
}

std::optional<Json> Workspace::read(const std::string& name) {
    if (!dir_) return std::nullopt;
    const fs::path f = *dir_ / name;
    if (!fs::exists(f)) return std::nullopt;
    std::ifstream in(f);
    try {
        Json j = Json::parse(in);
        if (!j.contains("format_version") || j.at("format_version") != kFormatVersion) {
            warn_(f.string() + " has a stale format_version; rebuilding");
            return std::nullopt;
        }
        return j;
    } catch (const std::exception& e) {
        warn_(f.string() + " is unreadable (" + e.what() + "); rebuilding");
        return std::nullopt;
    }
}

void Workspace::write(const std::string& name, const Json& j) {
    if (!dir_) return;
    fs::create_directories(*dir_);
    // Write then rename so readers never observe a partial file.
    const fs::path f = *dir_ / name, tmp = *dir_ / (name + ".tmp");
    {
        std::ofstream out(tmp, std::ios::binary);
        out << dump(j);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
    }
    fs::rename(tmp, f);
}

const ClassSet& Workspace::class_set() {
    if (cs_) return *cs_;
    if (auto j = read("classset.json")) {
        try {
            cs_ = class_set_from_json(*j, order_);
            return *cs_;
        } catch (const std::exception& e) {
            warn_(std::string("cached class set rejected (") + e.what() + "); rebuilding");
        }
    }
    cs_ = enumerate_class_set(*ctx_, jobs_);
    write("classset.json", to_json(*cs_));
    return *cs_;
}

const BrandtMatrix& Workspace::brandt(std::int64_t p) {
    if (auto it = brandt_.find(p); it != brandt_.end()) return it->second;
    const ClassSet& cs = class_set();
    const std::string name = "brandt-" + std::to_string(p) + ".json";
    if (auto j = read(name)) {
        try {
            BrandtMatrix B = brandt_from_json(*j);
            if (B.N != N_ || B.p != p || B.h != static_cast<std::int64_t>(cs.size()))
                throw UsageError("header does not match");
            for (auto s : B.column_sums())
                if (s != p + 1) throw UsageError("column sum differs from p + 1");
            return brandt_.emplace(p, std::move(B)).first->second;
        } catch (const std::exception& e) {
            warn_("cached " + name + " rejected (" + e.what() + "); rebuilding");
        }
    }
    BrandtMatrix B = brandt_matrix(cs, p, *ctx_, jobs_);
    write(name, to_json(B));
    return brandt_.emplace(p, std::move(B)).first->second;
}

const NormalizedBrandt& Workspace::normalized(std::int64_t p) {
    if (auto it = normalized_.find(p); it != normalized_.end()) return it->second;
    return normalized_.emplace(p, normalized_brandt(brandt(p), tol_)).first->second;
}

std::shared_ptr<const JointEigenbasis> Workspace::spectrum(const std::vector<std::int64_t>& primes, std::uint64_t seed) {
    auto key = std::pair{primes, seed};
    if (auto it = spectra_.find(key); it != spectra_.end()) return it->second;
    std::vector<NormalizedBrandt> Ts;
    for (auto p : primes) Ts.push_back(normalized(p));
    std::shared_ptr<const JointEigenbasis> out;
    if (auto j = read("spectrum.json")) {
        try {
            auto jb = std::make_shared<JointEigenbasis>(spectrum_from_json(*j));
            if (jb->N == N_ && jb->primes == primes && j->at("requested_seed").get<std::uint64_t>() == seed &&
                static_cast<std::size_t>(jb->vectors.rows()) == class_set().size()) {
                for (std::size_t j2 = 0; j2 < Ts.size(); ++j2)
                    for (Eigen::Index i = 0; i < jb->vectors.cols(); ++i) {
                        const auto v = jb->vectors.col(i);
                        if ((Ts[j2].T * v - jb->lambda[i][j2] * v).norm() >= tol_.residual)
                            throw InvariantError("stored eigenpair fails the residual check");
                    }
                out = jb;
            }
        } catch (const std::exception& e) {
            warn_(std::string("cached spectrum rejected (") + e.what() + "); rebuilding");
        }
    }
    if (!out) {
        auto jb = std::make_shared<JointEigenbasis>(joint_eigenbasis(Ts, seed, tol_));
        Json j = to_json(*jb);
        j["requested_seed"] = seed;
        write("spectrum.json", j);
        out = jb;
    }
    spectra_.emplace(key, out);
    return out;
}

}  // namespace qm
