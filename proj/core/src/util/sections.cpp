#include <cctype>
#include <string>

#include "vessel/error.hpp"
#include "vessel/grid/io.hpp"

namespace vessel {

ParseError::ParseError(const std::string& message, std::size_t line, std::size_t column)
    : InputError("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " +
                 message),
      line_(line),
      column_(column) {}

}  // namespace vessel

namespace vessel::grid {
namespace {

bool is_id_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '#';
}

bool is_key_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

// A '#' starts a comment at line start or after whitespace; ids such as DG#01 keep theirs.
std::string_view strip_comment(std::string_view line) {
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '#' && (i == 0 || std::isspace(static_cast<unsigned char>(line[i - 1])))) {
      return line.substr(0, i);
    }
  }
  return line;
}

}  // namespace

const Entry* Section::find(std::string_view key) const {
  for (const auto& e : entries) {
    if (e.key == key) return &e;
  }
  return nullptr;
}

std::vector<Section> read_sections(std::string_view text) {
  std::vector<Section> sections;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  if (text.size() >= 3 && text.substr(0, 3) == "\xEF\xBB\xBF") pos = 3;

  while (pos <= text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view raw = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!raw.empty() && raw.back() == '\r') raw.remove_suffix(1);

    std::string_view body = strip_comment(raw);
    std::size_t lead = 0;
    while (lead < body.size() && std::isspace(static_cast<unsigned char>(body[lead]))) ++lead;
    std::string_view line = trim(body);
    if (line.empty()) {
      if (end == text.size()) break;
      continue;
    }

    if (line.front() == '[') {
      if (line.back() != ']') throw ParseError("section header missing ']'", line_no, lead + line.size());
      std::string_view inner = trim(line.substr(1, line.size() - 2));
      auto space = inner.find_first_of(" \t");
      if (inner.empty()) throw ParseError("empty section header", line_no, lead + 2);
      // `[kind]` alone is allowed (study blocks); grid elements need an id.
      std::string_view kind = inner.substr(0, space);
      std::string_view id = space == std::string_view::npos ? std::string_view{} : trim(inner.substr(space));
      for (std::size_t i = 0; i < kind.size(); ++i) {
        if (!is_key_char(kind[i])) throw ParseError("invalid character in section kind", line_no, lead + 2 + i);
      }
      for (std::size_t i = 0; i < id.size(); ++i) {
        if (!is_id_char(id[i])) {
          throw ParseError("invalid character in id '" + std::string(id) + "'", line_no,
                           lead + 2 + space + i);
        }
      }
      sections.push_back(Section{std::string(kind), std::string(id), line_no, {}});
    } else {
      auto eq = line.find('=');
      if (eq == std::string_view::npos) throw ParseError("expected 'key = value'", line_no, lead + 1);
      if (sections.empty()) throw ParseError("entry outside of any section", line_no, lead + 1);
      std::string_view key = trim(line.substr(0, eq));
      std::string_view value = trim(line.substr(eq + 1));
      if (key.empty()) throw ParseError("empty key", line_no, lead + 1);
      for (std::size_t i = 0; i < key.size(); ++i) {
        if (!is_key_char(key[i])) throw ParseError("invalid character in key", line_no, lead + 1 + i);
      }
      if (value.empty()) throw ParseError("empty value for '" + std::string(key) + "'", line_no, lead + eq + 2);
      if (sections.back().find(key)) {
        throw ParseError("duplicate key '" + std::string(key) + "'", line_no, lead + 1);
      }
      sections.back().entries.push_back(
          Entry{std::string(key), std::string(value), line_no, lead + 1});
    }
    if (end == text.size()) break;
  }
  return sections;
}

}  // namespace vessel::grid
