#include "winnow/sha256.hpp"

#include <fstream>
#include <stdexcept>

#include <openssl/evp.h>

namespace winnow {

namespace {

std::string to_hex(const Sha256Digest& digest) {
    static const char* hex = "0123456789abcdef";
    std::string out;
    out.reserve(64);
    for (unsigned char b : digest) {
        out.push_back(hex[b >> 4]);
        out.push_back(hex[b & 0x0F]);
    }
    return out;
}

} // namespace

Sha256Digest sha256(std::string_view data) {
    Sha256Digest digest{};
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), digest.data(), &len, EVP_sha256(), nullptr) != 1 ||
        len != digest.size()) {
        throw std::runtime_error("sha256: digest computation failed");
    }
    return digest;
}

std::string sha256_hex(std::string_view data) { return to_hex(sha256(data)); }

std::string sha256_file_hex(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("sha256: cannot open " + path);

    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    if (!ctx) throw std::runtime_error("sha256: ctx allocation failed");
    EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);

    char buf[1 << 16];
    while (in) {
        in.read(buf, sizeof(buf));
        std::streamsize got = in.gcount();
        if (got > 0) EVP_DigestUpdate(ctx, buf, static_cast<std::size_t>(got));
    }

    Sha256Digest digest{};
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx, digest.data(), &len);
    EVP_MD_CTX_free(ctx);
    if (len != digest.size()) throw std::runtime_error("sha256: bad digest length");
    return to_hex(digest);
}

} // namespace winnow
