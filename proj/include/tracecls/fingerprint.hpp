#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace tracecls {

// Incremental FNV-1a (64-bit) used to fingerprint artifacts along the
// corpus -> vocabulary -> dataset -> model chain. Content identity only,
// not a cryptographic hash.
class Fingerprint {
 public:
  Fingerprint& update(std::string_view bytes) {
    for (unsigned char c : bytes) {
      hash_ ^= c;
      hash_ *= 0x00000100000001b3ULL;
    }
    return *this;
  }

  // Field separator so that update("ab").update("c") != update("a").update("bc").
  Fingerprint& sep() {
    hash_ ^= 0xff;
    hash_ *= 0x00000100000001b3ULL;
    return *this;
  }

  std::string hex() const {
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    std::uint64_t h = hash_;
    for (int i = 15; i >= 0; --i) {
      out[static_cast<std::size_t>(i)] = digits[h & 0xf];
      h >>= 4;
    }
    return out;
  }

 private:
  std::uint64_t hash_ = 0xcbf29ce484222325ULL;
};

inline std::string fingerprint_of(std::string_view bytes) {
  return Fingerprint{}.update(bytes).hex();
}

}  // namespace tracecls
