#include "qmoney/signature.hpp"

#include <openssl/crypto.h>
#include <openssl/evp.h>
#include <openssl/hmac.h>

#include "qmoney/errors.hpp"
#include "qmoney/rng.hpp"

namespace qm {

HmacStubScheme::HmacStubScheme(Bytes key) : key_(std::move(key)) {
    if (key_.empty()) throw UsageError("empty signing key");
}

HmacStubScheme HmacStubScheme::generate(std::uint64_t seed) {
    Rng rng(seed ^ 0x5eedc0ffee123457ULL);
    Bytes key(32);
    for (std::size_t i = 0; i < key.size(); i += 8) {
        std::uint64_t x = rng.bits();
        for (int b = 0; b < 8; ++b) key[i + b] = static_cast<std::uint8_t>(x >> (8 * b));
    }
    return HmacStubScheme(std::move(key));
}

Bytes HmacStubScheme::sign(const Bytes& message) const {
    Bytes out(EVP_MAX_MD_SIZE);
    unsigned int len = 0;
    if (!HMAC(EVP_sha256(), key_.data(), static_cast<int>(key_.size()), message.data(), message.size(),
              out.data(), &len))
        throw InternalError("HMAC computation failed");
    out.resize(len);
    return out;
}

bool HmacStubScheme::verify(const Bytes& message, const Bytes& signature) const {
    const Bytes expect = sign(message);
    return signature.size() == expect.size() &&
           CRYPTO_memcmp(signature.data(), expect.data(), expect.size()) == 0;
}

std::string base64_encode(const Bytes& data) {
    std::string out(4 * ((data.size() + 2) / 3), '\0');
    const int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()), data.data(),
                                  static_cast<int>(data.size()));
    out.resize(static_cast<std::size_t>(n));
    return out;
}

Bytes base64_decode(const std::string& text) {
    if (text.size() % 4 != 0) throw UsageError("base64 length must be a multiple of 4");
    Bytes out(3 * text.size() / 4);
    const int n = EVP_DecodeBlock(out.data(), reinterpret_cast<const unsigned char*>(text.data()),
                                  static_cast<int>(text.size()));
    if (n < 0) throw UsageError("invalid base64");
    std::size_t pad = 0;
    if (!text.empty() && text.back() == '=') ++pad;
    if (text.size() > 1 && text[text.size() - 2] == '=') ++pad;
    out.resize(static_cast<std::size_t>(n) - pad);
    return out;
}

}  // namespace qm
