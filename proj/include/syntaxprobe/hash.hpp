#ifndef SYNTAXPROBE_HASH_HPP
#define SYNTAXPROBE_HASH_HPP

#include <string>
#include <string_view>

namespace syntaxprobe {

// Lowercase hex SHA-256.
std::string sha256_hex(std::string_view data);
std::string sha256_file(const std::string& path);

}  // namespace syntaxprobe

#endif
