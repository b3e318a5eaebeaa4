#include "ghost/io.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <system_error>

#include <openssl/evp.h>

#include "ghost/errors.hpp"

namespace ghost {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

double parse_double(std::string_view s) {
  s = trim(s);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    throw ConfigError("not a number: '" + std::string(s) + "'");
  }
  return v;
}

std::size_t parse_count(std::string_view s) {
  s = trim(s);
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    throw ConfigError("not a point count: '" + std::string(s) + "'");
  }
  return v;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    parts.push_back(s.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

}  // namespace

std::vector<double> linear_grid(double a, double b, std::size_t n) {
  if (n == 0) throw ConfigError("grid needs at least one point");
  if (n == 1) return {a};
  std::vector<double> g(n);
  const double m = static_cast<double>(n - 1);
  // Weighted endpoints keep symmetric grids exactly symmetric (0 stays 0).
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i);
    g[i] = (a * (m - t) + b * t) / m;
  }
  return g;
}

std::vector<double> log_grid(double a, double b, std::size_t n) {
  if (!(a > 0.0) || !(b > 0.0)) throw ConfigError("log grid needs positive endpoints");
  if (n == 0) throw ConfigError("grid needs at least one point");
  if (n == 1) return {a};
  std::vector<double> g(n);
  const double la = std::log10(a), lb = std::log10(b);
  for (std::size_t i = 0; i < n; ++i) {
    g[i] = std::pow(10.0, la + (lb - la) * static_cast<double>(i) / static_cast<double>(n - 1));
  }
  g.front() = a;
  g.back() = b;
  return g;
}

std::vector<double> parse_grid(std::string_view spec) {
  spec = trim(spec);
  if (spec.empty()) throw ConfigError("empty grid specification");
  if (spec.find(':') != std::string_view::npos) {
    const auto parts = split(spec, ':');
    if (parts.size() != 3) throw ConfigError("grid must look like a:b:N or a:b:Nlog");
    const double a = parse_double(parts[0]);
    const double b = parse_double(parts[1]);
    std::string_view count = trim(parts[2]);
    const bool is_log = count.size() > 3 && count.substr(count.size() - 3) == "log";
    if (is_log) count.remove_suffix(3);
    const std::size_t n = parse_count(count);
    return is_log ? log_grid(a, b, n) : linear_grid(a, b, n);
  }
  std::vector<double> out;
  for (auto part : split(spec, ',')) out.push_back(parse_double(part));
  return out;
}

std::string format_number(double v) {
  std::array<char, 64> buf{};
  const bool tiny = v != 0.0 && std::abs(v) < 1e-3;
  const auto result = tiny ? std::to_chars(buf.data(), buf.data() + buf.size(), v,
                                           std::chars_format::scientific)
                           : std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), result.ptr);
}

namespace {

std::string quote(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::vector<std::string> parse_csv_line(const std::string& line) {
  std::vector<std::string> fields(1);
  bool in_quotes = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (in_quotes) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        fields.back() += '"';
        ++i;
      } else if (c == '"') {
        in_quotes = false;
      } else {
        fields.back() += c;
      }
    } else if (c == '"') {
      in_quotes = true;
    } else if (c == ',') {
      fields.emplace_back();
    } else if (c != '\r') {
      fields.back() += c;
    }
  }
  return fields;
}

}  // namespace

std::string CsvTable::to_string() const {
  std::string out;
  auto emit = [&](const std::vector<std::string>& row) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += quote(row[i]);
    }
    out += "\r\n";
  };
  emit(header);
  for (const auto& row : rows) emit(row);
  return out;
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path.string());
  CsvTable table;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (first) {
      table.header = parse_csv_line(line);
      first = false;
    } else {
      table.rows.push_back(parse_csv_line(line));
    }
  }
  if (first) throw ConfigError(path.string() + " has no header row");
  return table;
}

void write_text(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write " + path.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw ConfigError("failed writing " + path.string());
}

std::string sha256_hex(std::string_view bytes) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest.data(), &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("sha256 failed");
  }
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xF];
  }
  return out;
}

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return sha256_hex(buf.str());
}

CsvTable curve_table(const ScalingCurve& curve) {
  CsvTable t{{"phi", "value", "spread", "n", "provenance", "model"}, {}};
  for (const auto& p : curve.points) {
    t.rows.push_back({format_number(p.phi), format_number(p.value), format_number(p.spread),
                      std::to_string(p.n), std::string(to_string(curve.provenance)),
                      curve.model});
  }
  return t;
}

CsvTable ssa_sweep_table(const ScalingCurve& curve) {
  CsvTable t{{"phi_s", "mean_TE", "sem", "n", "n_censored"}, {}};
  for (const auto& p : curve.points) {
    t.rows.push_back({format_number(p.phi), format_number(p.value), format_number(p.spread),
                      std::to_string(p.n), std::to_string(p.n_censored)});
  }
  return t;
}

CsvTable orbit_table(const TrajectoryRecord& record) {
  CsvTable t{{"t", "x", "p", "S"}, {}};
  for (const auto& s : record.samples) {
    t.rows.push_back(
        {format_number(s.t), format_number(s.x), format_number(s.p), format_number(s.S)});
  }
  return t;
}

CsvTable phase_curves_table(const PhaseCurves& curves) {
  CsvTable t{{"x", "p_H", "p_1", "p_2"}, {}};
  for (std::size_t i = 0; i < curves.x.size(); ++i) {
    t.rows.push_back({format_number(curves.x[i]), format_number(curves.p_H[i]),
                      format_number(curves.p_1[i]), format_number(curves.p_2[i])});
  }
  return t;
}

CsvTable weights_table(const std::vector<PathWeightSample>& samples) {
  CsvTable t{{"p0", "action", "log_weight", "weight"}, {}};
  for (const auto& s : samples) {
    if (s.failed) {
      t.rows.push_back({format_number(s.p0), "", "", ""});
      continue;
    }
    t.rows.push_back({format_number(s.p0), format_number(s.action), format_number(s.log_weight),
                      s.weight ? format_number(*s.weight) : std::string()});
  }
  return t;
}

ScalingCurve read_curve(const std::filesystem::path& path) {
  const auto table = read_csv(path);
  auto column = [&](std::string_view name) -> std::ptrdiff_t {
    for (std::size_t i = 0; i < table.header.size(); ++i) {
      if (table.header[i] == name) return static_cast<std::ptrdiff_t>(i);
    }
    return -1;
  };
  const bool ssa = column("phi_s") >= 0;
  const auto c_phi = column(ssa ? "phi_s" : "phi");
  const auto c_value = column(ssa ? "mean_TE" : "value");
  const auto c_spread = column(ssa ? "sem" : "spread");
  const auto c_n = column("n");
  if (c_phi < 0 || c_value < 0) {
    throw ConfigError(path.string() + ": expected columns phi,value or phi_s,mean_TE");
  }
  ScalingCurve curve;
  curve.provenance = Provenance::SSA;
  const auto c_prov = column("provenance");
  const auto c_model = column("model");
  const auto c_cens = column("n_censored");
  for (const auto& row : table.rows) {
    if (row.size() != table.header.size()) throw ConfigError(path.string() + ": ragged row");
    ScalingPoint p{};
    p.phi = parse_double(row[c_phi]);
    p.value = parse_double(row[c_value]);
    p.spread = c_spread >= 0 ? parse_double(row[c_spread]) : 0.0;
    p.n = c_n >= 0 ? parse_count(row[c_n]) : 0;
    p.n_censored = c_cens >= 0 ? parse_count(row[c_cens]) : 0;
    if (c_prov >= 0) curve.provenance = provenance_from_string(row[c_prov]);
    if (c_model >= 0) curve.model = row[c_model];
    curve.points.push_back(p);
  }
  curve.validate();
  return curve;
}

}  // namespace ghost
