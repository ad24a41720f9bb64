#include "vessel/study/report.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <system_error>

#include "util/format.hpp"
#include "vessel/error.hpp"

namespace vessel::study {

namespace fs = std::filesystem;

Table& Report::table(std::string name, std::vector<std::string> header) {
  tables.push_back({std::move(name), std::move(header), {}});
  return tables.back();
}

void Report::add(std::string key, std::string value) { summary.emplace_back(std::move(key), std::move(value)); }
void Report::add(std::string key, double value) { add(std::move(key), num(value)); }

std::string num(double v) { return util::shortest(v); }

std::string render_csv(const Table& t) {
  std::string out;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += cells[i];
    }
    out += '\n';
  };
  line(t.header);
  for (const auto& r : t.rows) line(r);
  return out;
}

std::string render_text(const Table& t) {
  std::vector<std::size_t> width(t.header.size(), 0);
  auto measure = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size() && i < width.size(); ++i) width[i] = std::max(width[i], cells[i].size());
  };
  measure(t.header);
  for (const auto& r : t.rows) measure(r);
  std::string out = "== " + t.name + " ==\n";
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      out += cells[i];
      if (i + 1 < cells.size()) out += std::string(width[i] - cells[i].size() + 2, ' ');
    }
    out += '\n';
  };
  line(t.header);
  for (const auto& r : t.rows) line(r);
  return out;
}

std::string render_summary(const Report& r) {
  std::string out;
  for (const auto& [k, v] : r.summary) out += k + " = " + v + "\n";
  return out;
}

void emit_report(const Report& report, const std::string& out_dir, Format format) {
  std::vector<std::pair<std::string, std::string>> files;
  if (format == Format::Csv) {
    for (const auto& t : report.tables) files.emplace_back(t.name + ".csv", render_csv(t));
  } else {
    std::string text;
    for (const auto& t : report.tables) text += render_text(t) + "\n";
    files.emplace_back("report.txt", text);
  }
  files.emplace_back("summary.txt", render_summary(report));

  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec || !fs::is_directory(out_dir)) throw InputError("output directory '" + out_dir + "' is not usable");

  std::vector<fs::path> staged;
  auto discard = [&] {
    for (const auto& p : staged) fs::remove(p, ec);
  };
  for (const auto& [name, body] : files) {
    fs::path tmp = fs::path(out_dir) / ("." + name + ".tmp");
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (f) staged.push_back(tmp);
    f << body;
    f.close();
    if (!f) {
      discard();
      throw InputError("cannot write '" + (fs::path(out_dir) / name).string() + "'");
    }
  }
  for (std::size_t i = 0; i < files.size(); ++i) {
    fs::rename(staged[i], fs::path(out_dir) / files[i].first, ec);
    if (ec) {
      discard();
      throw InputError("cannot rename into '" + out_dir + "': " + ec.message());
    }
  }
}

}  // namespace vessel::study
