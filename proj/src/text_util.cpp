#include "text_util.hpp"

#include <charconv>
#include <cmath>

#include "voxrec/error.hpp"

namespace voxrec::detail {

std::vector<TextLine> content_lines(std::string_view text) {
  std::vector<TextLine> out;
  int number = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    std::string_view line =
        text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    ++number;
    const std::size_t hash = line.find('#');
    if (hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    while (!line.empty() && is_space(line.front())) line.remove_prefix(1);
    while (!line.empty() && is_space(line.back())) line.remove_suffix(1);
    if (!line.empty()) {
      out.push_back(TextLine{number, line});
    }
    if (nl == std::string_view::npos) {
      break;
    }
    pos = nl + 1;
  }
  return out;
}

std::vector<std::string_view> raw_lines(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) {
      out.push_back(text.substr(pos));
      break;
    }
    out.push_back(text.substr(pos, nl - pos));
    pos = nl + 1;
  }
  return out;
}

std::vector<std::string_view> split_tokens(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && is_space(line[i])) ++i;
    const std::size_t start = i;
    while (i < line.size() && !is_space(line[i])) ++i;
    if (i > start) {
      out.push_back(line.substr(start, i - start));
    }
  }
  return out;
}

double parse_double(std::string_view tok, int line, const std::string& what) {
  double v = 0.0;
  const auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || p != tok.data() + tok.size()) {
    throw FormatError::at_line(what + ": not a number: '" + std::string(tok) + "'", line);
  }
  if (!std::isfinite(v)) {
    throw FormatError::at_line(what + ": non-finite value", line);
  }
  return v;
}

std::int64_t parse_int(std::string_view tok, int line, const std::string& what) {
  std::int64_t v = 0;
  const auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || p != tok.data() + tok.size()) {
    throw FormatError::at_line(what + ": not an integer: '" + std::string(tok) + "'", line);
  }
  return v;
}

std::string format_double(double v) {
  char buf[32];
  const auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, p);
}

std::string format_fixed6(double v) {
  char buf[512];
  const auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::fixed, 6);
  if (ec != std::errc()) {
    throw DomainError("value too large to format");
  }
  return std::string(buf, p);
}

}  // namespace voxrec::detail
