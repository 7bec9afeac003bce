// Internal text scanning/formatting helpers shared by the plain-text
// readers (intrinsics, poses, manifests, configs, PLY). Not installed.
#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace voxrec::detail {

inline bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r'; }

struct TextLine {
  int number = 0;         // 1-based
  std::string_view text;  // comment-stripped, trimmed, non-empty
};

// Splits into lines, drops '#' comments, trims, and skips blank lines.
std::vector<TextLine> content_lines(std::string_view text);

// Raw lines, no trimming; for formats where '#' is not a comment.
std::vector<std::string_view> raw_lines(std::string_view text);

std::vector<std::string_view> split_tokens(std::string_view line);

// Both throw FormatError::at_line on garbage; parse_double also rejects
// non-finite values.
double parse_double(std::string_view tok, int line, const std::string& what);
std::int64_t parse_int(std::string_view tok, int line, const std::string& what);

// Shortest representation that parses back to the same double.
std::string format_double(double v);

// Fixed-point with 6 decimals, locale-independent.
std::string format_fixed6(double v);

}  // namespace voxrec::detail
