#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace qm {

using Bytes = std::vector<std::uint8_t>;

class SignatureScheme {
public:
    virtual ~SignatureScheme() = default;
    virtual Bytes sign(const Bytes& message) const = 0;
    virtual bool verify(const Bytes& message, const Bytes& signature) const = 0;
    virtual std::string name() const = 0;
};

// Keyed-hash stand-in (HMAC-SHA256). NOT a public-key signature: the
// verification key equals the signing key. Use only for simulation.
class HmacStubScheme final : public SignatureScheme {
public:
    explicit HmacStubScheme(Bytes key);
    static HmacStubScheme generate(std::uint64_t seed);

    Bytes sign(const Bytes& message) const override;
    bool verify(const Bytes& message, const Bytes& signature) const override;
    std::string name() const override { return "hmac-sha256-stub"; }
    const Bytes& key() const { return key_; }

private:
    Bytes key_;
};

std::string base64_encode(const Bytes& data);
Bytes base64_decode(const std::string& text);

}  // namespace qm
