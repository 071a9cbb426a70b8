#ifndef RAMCUBE_DIGEST_HPP
#define RAMCUBE_DIGEST_HPP

#include <cstddef>
#include <cstdint>
#include <string>

namespace ramcube {

// Streaming SHA-256 (OpenSSL EVP).
class Sha256 {
public:
    Sha256();
    ~Sha256();
    Sha256(const Sha256&) = delete;
    Sha256& operator=(const Sha256&) = delete;

    void update(const void* data, size_t n);
    void update(const std::string& s) { update(s.data(), s.size()); }
    std::string hex();  // finalises

private:
    void* ctx_;
};

std::string sha256_hex(const std::string& s);

}  // namespace ramcube

#endif
