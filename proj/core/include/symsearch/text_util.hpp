#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace symsearch::text {

std::string_view trim(std::string_view s);

/// Splits on a single character; empty fields are preserved.
std::vector<std::string_view> split(std::string_view s, char sep);

/// Splits on runs of ASCII whitespace; no empty fields.
std::vector<std::string_view> split_ws(std::string_view s);

/// Backslash escaping for one-record-per-line TSV files:
/// `\\`, `\t`, `\n` and `\r`.
std::string escape_field(std::string_view s);
std::string unescape_field(std::string_view s);

std::string to_lower_ascii(std::string_view s);
bool iequals(std::string_view a, std::string_view b);

/// True if `s` has no ASCII whitespace and is nonempty.
bool is_token(std::string_view s);

/// Reads a whole file into memory; throws DataError when unreadable.
std::string read_file(const std::string& path);

/// Writes `contents` to `path`. Refuses to clobber an existing file unless
/// `overwrite` is set.
void write_file(const std::string& path, std::string_view contents, bool overwrite);

/// Iterates lines of a buffer, stripping a trailing '\r'. The callback gets
/// the 1-based line number.
template <typename Fn>
void for_each_line(std::string_view buf, Fn&& fn) {
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < buf.size()) {
    std::size_t end = buf.find('\n', pos);
    if (end == std::string_view::npos) end = buf.size();
    std::string_view line = buf.substr(pos, end - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    fn(++line_no, line);
    pos = end + 1;
  }
}

}  // namespace symsearch::text
