#pragma once

#include <compare>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "qmoney/modmat.hpp"
#include "qmoney/orders.hpp"

namespace qm {

struct CanonicalTriple {
    std::int64_t d = 1;
    std::int64_t a = 0;
    std::int64_t b = 1;

    std::int64_t m() const { return d * b; }
    auto operator<=>(const CanonicalTriple&) const = default;
};

std::string to_string(const CanonicalTriple& t);

// Shared per-order state: the order and a cache of split isomorphisms by modulus.
class EncodingContext {
public:
    explicit EncodingContext(OrderPtr order);
    const OrderPtr& order() const { return order_; }
    std::int64_t level() const { return order_->level(); }
    const SplitIso& split(std::int64_t m);

private:
    OrderPtr order_;
    std::mutex mu_;
    std::map<std::int64_t, SplitIso> isos_;
};

// The minimal-norm integral ideal J selected by the encoding and its triple.
struct Encoding {
    CanonicalTriple triple;
    LeftIdeal ideal;
};

Encoding canonical_encoding(const LeftIdeal& I, EncodingContext& ctx);
CanonicalTriple canonical_encode(const LeftIdeal& I, EncodingContext& ctx);
CanonicalTriple canonical_encode(const LeftIdeal& I);

// Triple of the subgroup generated by the rows of an integral ideal's image mod m.
CanonicalTriple triple_of_integral(const LeftIdeal& J, std::int64_t m, EncodingContext& ctx);

struct CheckResult {
    bool valid = false;
    std::optional<LeftIdeal> ideal;
};

CheckResult check_encoding(EncodingContext& ctx, const CanonicalTriple& t);
CheckResult check_encoding(std::int64_t N, const CanonicalTriple& t);

struct ClassEntry {
    CanonicalTriple triple;
    Weight weight;
    LeftIdeal ideal;
};

struct ClassSet {
    std::int64_t N = 0;
    std::vector<ClassEntry> classes;

    std::size_t size() const { return classes.size(); }
    // Position of t in the ordering, or -1.
    long index_of(const CanonicalTriple& t) const;
    Rational mass() const;
};

// Scans all triples with m <= floor(sqrt(2N)); jobs > 1 splits the scan across threads.
ClassSet enumerate_class_set(std::int64_t N, int jobs = 1);
ClassSet enumerate_class_set(EncodingContext& ctx, int jobs = 1);

std::int64_t isqrt(std::int64_t n);

}  // namespace qm
