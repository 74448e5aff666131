#pragma once

#include <openssl/evp.h>

#include <string>
#include <string_view>

#include "evalgate/errors.hpp"

namespace evalgate {

// SHA-256 digest rendered as lowercase hex. Used for manifest freezing; no
// signing, just a stable content address.
inline std::string sha256_hex(std::string_view data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int length = 0;
    const char* bytes = data.empty() ? "" : data.data();
    if (EVP_Digest(bytes, data.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
        throw EvalError(ErrorKind::io_error, "sha256 digest failed");
    }
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    out.reserve(static_cast<std::size_t>(length) * 2);
    for (unsigned int i = 0; i < length; ++i) {
        out.push_back(hex[digest[i] >> 4]);
        out.push_back(hex[digest[i] & 0x0f]);
    }
    return out;
}

}  // namespace evalgate
