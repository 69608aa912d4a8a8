#include "vbma/io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>
#include <system_error>

#include "vbma/common.hpp"

namespace vbma {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

bool parse_double(std::string_view s, double& out) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  const auto* end = s.data() + s.size();
  const auto res = std::from_chars(s.data(), end, out);
  return res.ec == std::errc() && res.ptr == end;
}

}  // namespace

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw data_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<double> read_series_csv(const std::filesystem::path& path) {
  const auto text = read_text(path);
  std::vector<double> out;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  std::string bad;
  while (std::getline(in, line)) {
    ++lineno;
    auto field = trim(line);
    if (lineno == 1 && field.size() >= 3 && static_cast<unsigned char>(field[0]) == 0xEF) field.remove_prefix(3);
    if (field.empty()) continue;
    if (field.find(',') != std::string_view::npos || field.find(';') != std::string_view::npos)
      throw data_error(path.string() + ":" + std::to_string(lineno) + ": expected a single column");
    double v = 0.0;
    if (!parse_double(field, v) || !std::isfinite(v)) {
      if (lineno == 1) continue;  // header
      if (!bad.empty()) bad += ", ";
      bad += std::to_string(lineno);
      continue;
    }
    out.push_back(v);
  }
  if (!bad.empty()) throw data_error(path.string() + ": non-numeric rows at line(s) " + bad);
  if (out.empty()) throw data_error(path.string() + ": no observations");
  return out;
}

std::vector<double> read_csv_column(const std::filesystem::path& path, const std::string& column) {
  const auto text = read_text(path);
  std::istringstream in(text);
  std::string line;
  auto split = [](std::string_view row) {
    std::vector<std::string_view> f;
    std::size_t b = 0;
    for (std::size_t e; (e = row.find(',', b)) != std::string_view::npos; b = e + 1) f.push_back(trim(row.substr(b, e - b)));
    f.push_back(trim(row.substr(b)));
    return f;
  };
  if (!std::getline(in, line)) throw data_error(path.string() + ": empty file");
  std::string_view head = trim(line);
  if (head.size() >= 3 && static_cast<unsigned char>(head[0]) == 0xEF) head.remove_prefix(3);
  const auto names = split(head);
  const auto it = std::find(names.begin(), names.end(), column);
  if (it == names.end()) throw data_error(path.string() + ": no column named '" + column + "'");
  const auto col = static_cast<std::size_t>(it - names.begin());
  std::vector<double> out;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    const auto row = trim(line);
    if (row.empty()) continue;
    const auto f = split(row);
    double v = 0.0;
    if (f.size() != names.size() || !parse_double(f[col], v) || !std::isfinite(v))
      throw data_error(path.string() + ":" + std::to_string(lineno) + ": bad row");
    out.push_back(v);
  }
  if (out.empty()) throw data_error(path.string() + ": no observations");
  return out;
}

void write_atomic(const std::filesystem::path& path, const std::string& contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw data_error("cannot write " + tmp.string());
    out << contents;
    if (!out) throw data_error("failed writing " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return {buf, res.ptr};
}

}  // namespace vbma
