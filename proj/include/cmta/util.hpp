#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace cmta {

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// --- UTF-8 ---

// Decodes one codepoint starting at byte offset `i`; advances `i` past it.
// Invalid sequences yield U+FFFD and advance one byte.
char32_t utf8_decode_next(std::string_view s, size_t& i);

void utf8_append(std::string& out, char32_t cp);

std::vector<char32_t> utf8_decode(std::string_view s);

bool utf8_valid(std::string_view s);

// --- strings ---

std::vector<std::string> split_whitespace(std::string_view s);

std::string join(const std::vector<std::string>& parts, std::string_view sep);

// ASCII-only lowercase; non-ASCII bytes pass through.
std::string ascii_lower(std::string_view s);

std::string trim(std::string_view s);

// --- files ---

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view content);
std::vector<std::string> read_lines(const std::string& path);

// --- hashing ---

// Hex-encoded SHA-256 of a byte string.
std::string sha256_hex(std::string_view data);
// Raw 32-byte digest.
std::array<uint8_t, 32> sha256_raw(std::string_view data);

uint32_t crc32_of(std::string_view data);

// --- CSV (RFC 4180) ---

std::string csv_escape(std::string_view field);
// Parses one logical CSV record (already joined across quoted newlines).
std::vector<std::string> csv_split_record(std::string_view line);
// Reads a CSV file into records, honoring quoted fields that span newlines.
std::vector<std::vector<std::string>> csv_read(const std::string& path);

}  // namespace cmta
