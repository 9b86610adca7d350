#pragma once

#include <json.hpp>

#include "qmoney/brandt.hpp"
#include "qmoney/encoding.hpp"
#include "qmoney/protocol.hpp"
#include "qmoney/spectral.hpp"

namespace qm {

using Json = nlohmann::ordered_json;

inline constexpr int kFormatVersion = 1;

Json to_json(const Rational& q);
Json to_json(const Quaternion& q);
Json to_json(const IdealLattice& L);
Json to_json(const MaximalOrder& O);
Json to_json(const CanonicalTriple& t);
Json to_json(const SplitIso& s);
Json to_json(const ClassSet& cs);
Json to_json(const BrandtMatrix& B);
Json to_json(const JointEigenbasis& jb);
Json to_json(const Bill& b, std::int64_t N);

Rational rational_from_json(const Json& j);
CanonicalTriple triple_from_json(const Json& j);
// Rebuilds ideals from their stored order coordinates (stability is re-checked).
ClassSet class_set_from_json(const Json& j, const OrderPtr& order);
BrandtMatrix brandt_from_json(const Json& j);
JointEigenbasis spectrum_from_json(const Json& j);
Bill bill_from_json(const Json& j);

// JSON text with a trailing newline; identical input gives identical bytes.
std::string dump(const Json& j);

}  // namespace qm
