#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace gelmine {

/// Invalid inputs, configuration or file contents. The CLI maps this to exit code 1.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Unreadable or undecodable files and other runtime failures. Exit code 2.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A feature vector or model file does not match the expected schema.
class SchemaError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::string read_text_file(const std::filesystem::path& path);

/// Writes through a temp file in the same directory followed by a rename,
/// so readers never observe a half-written file.
void atomic_write_file(const std::filesystem::path& path, const std::string& content);

/// Decodes UTF-8; malformed bytes come back as U+FFFD, one per bad byte.
std::vector<char32_t> utf8_decode(const std::string& s);
void utf8_append(std::string& out, char32_t cp);

/// Number of Unicode code points in a UTF-8 string.
std::size_t utf8_length(const std::string& s);

/// Shortest decimal representation that round-trips to the same double.
std::string format_double(double v);

} // namespace gelmine
