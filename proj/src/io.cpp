#include "nitiflex/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "nitiflex/error.hpp"

namespace nitiflex::io {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_double(std::string_view s, std::string_view what) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw Error(ErrorKind::Parse, fmt::format("{}: cannot parse number '{}'", what, s));
  }
  return v;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

const std::string& need(const std::map<std::string, std::string>& kv, const std::string& key,
                        std::string_view source) {
  const auto it = kv.find(key);
  if (it == kv.end()) {
    throw Error(ErrorKind::Parse, fmt::format("{}: missing key '{}'", source, key));
  }
  return it->second;
}

double need_double(const std::map<std::string, std::string>& kv, const std::string& key,
                   std::string_view source) {
  return parse_double(need(kv, key, source), fmt::format("{}: {}", source, key));
}

}  // namespace

bool CsvTable::has_column(std::string_view name) const {
  return std::find(header.begin(), header.end(), name) != header.end();
}

std::size_t CsvTable::column(std::string_view name) const {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) {
    throw Error(ErrorKind::Parse, fmt::format("csv: missing column '{}'", name));
  }
  return static_cast<std::size_t>(it - header.begin());
}

CsvTable read_csv(std::istream& is, std::string_view source) {
  CsvTable t;
  std::string line;
  std::size_t lineno = 0;
  bool have_header = false;
  while (std::getline(is, line)) {
    ++lineno;
    const auto view = trim(line);
    if (view.empty() || view.front() == '#') continue;
    // Tolerate a UTF-8 byte-order mark on the header.
    auto body = view;
    if (!have_header && body.starts_with("\xEF\xBB\xBF")) body.remove_prefix(3);
    const auto fields = split(body, ',');
    if (!have_header) {
      for (auto f : fields) t.header.emplace_back(f);
      have_header = true;
      continue;
    }
    if (fields.size() != t.header.size()) {
      throw Error(ErrorKind::Parse, fmt::format("{}:{}: expected {} fields, got {}", source, lineno,
                                                t.header.size(), fields.size()));
    }
    std::vector<double> row;
    row.reserve(fields.size());
    for (auto f : fields) row.push_back(parse_double(f, fmt::format("{}:{}", source, lineno)));
    t.rows.push_back(std::move(row));
  }
  if (!have_header) throw Error(ErrorKind::Parse, fmt::format("{}: empty CSV", source));
  return t;
}

CsvTable read_csv_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, fmt::format("cannot open '{}'", path.string()));
  return read_csv(in, path.string());
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, fmt::format("cannot open '{}'", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::Io, fmt::format("cannot write '{}'", path.string()));
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw Error(ErrorKind::Io, fmt::format("write failed for '{}'", path.string()));
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error(ErrorKind::Io, fmt::format("cannot move output into '{}'", path.string()));
  }
}

std::map<std::string, std::string> parse_key_values(std::string_view text, std::string_view source) {
  std::map<std::string, std::string> kv;
  std::size_t lineno = 0;
  for (auto raw : split(text, '\n')) {
    ++lineno;
    auto line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorKind::Parse, fmt::format("{}:{}: expected 'key = value'", source, lineno));
    }
    std::string key(trim(line.substr(0, eq)));
    std::string value(trim(line.substr(eq + 1)));
    if (key.empty()) throw Error(ErrorKind::Parse, fmt::format("{}:{}: empty key", source, lineno));
    if (!kv.emplace(key, value).second) {
      throw Error(ErrorKind::Parse, fmt::format("{}:{}: duplicate key '{}'", source, lineno, key));
    }
  }
  return kv;
}

std::vector<StressStrainSample> read_stress_strain_csv(std::istream& is) {
  const CsvTable t = read_csv(is, "stress-strain csv");
  const auto cs = t.column("strain");
  const auto cp = t.column("stress_pa");
  std::vector<StressStrainSample> out;
  out.reserve(t.rows.size());
  for (const auto& r : t.rows) out.push_back({r[cs], r[cp]});
  return out;
}

std::string format_material(const BilinearMaterial& mat, double rms_pa) {
  std::string s = fmt::format("E_pa = {}\nEn_pa = {}\neps_l = {}\neps_max = {}\n", mat.E, mat.En,
                              mat.eps_l, mat.eps_max);
  if (rms_pa >= 0.0) s += fmt::format("rms_pa = {}\n", rms_pa);
  return s;
}

BilinearMaterial parse_material(const std::map<std::string, std::string>& kv,
                                std::string_view source) {
  BilinearMaterial m;
  if (kv.contains("E_pa")) {
    m.E = need_double(kv, "E_pa", source);
    m.En = need_double(kv, "En_pa", source);
  } else {
    m.E = need_double(kv, "E_gpa", source) * 1e9;
    m.En = need_double(kv, "En_gpa", source) * 1e9;
  }
  m.eps_l = need_double(kv, "eps_l", source);
  if (kv.contains("eps_max")) m.eps_max = need_double(kv, "eps_max", source);
  m.validate();
  return m;
}

HingeSpec parse_hinge_spec(std::string_view text, const std::filesystem::path& base_dir,
                           const std::optional<BilinearMaterial>& fallback_material) {
  constexpr std::string_view src = "hinge spec";
  const auto kv = parse_key_values(text, src);
  constexpr double um = 1e-6;

  HingeSpec h;
  h.width = need_double(kv, "width_um", src) * um;
  if (kv.contains("sheet_um")) h.sheet_t = need_double(kv, "sheet_um", src) * um;

  const std::string& kind = need(kv, "profile", src);
  if (kind == "rectangular") {
    h.profile = ThicknessProfile::rectangular(need_double(kv, "length_um", src) * um,
                                              need_double(kv, "t_um", src) * um);
  } else if (kind == "arc") {
    const std::string& sides = need(kv, "sides", src);
    if (sides != "one" && sides != "both") {
      throw Error(ErrorKind::Parse, "hinge spec: sides must be 'one' or 'both'");
    }
    h.profile = ThicknessProfile::arc(need_double(kv, "length_um", src) * um,
                                      need_double(kv, "t_min_um", src) * um,
                                      need_double(kv, "radius_um", src) * um,
                                      sides == "both" ? CutSides::Both : CutSides::One);
  } else if (kind == "sampled") {
    std::vector<std::pair<double, double>> pts;
    std::istringstream ss(need(kv, "samples_um", src));
    std::string tok;
    while (ss >> tok) {
      const auto colon = tok.find(':');
      if (colon == std::string::npos) {
        throw Error(ErrorKind::Parse, fmt::format("hinge spec: bad sample '{}'", tok));
      }
      pts.emplace_back(parse_double(tok.substr(0, colon), src) * um,
                       parse_double(tok.substr(colon + 1), src) * um);
    }
    h.profile = ThicknessProfile::sampled(std::move(pts));
    if (kv.contains("length_um")) {
      const double L = need_double(kv, "length_um", src) * um;
      if (std::abs(L - h.profile.length()) > 1e-9 * L) {
        throw Error(ErrorKind::Parse, "hinge spec: length_um disagrees with the last sample");
      }
    }
  } else {
    throw Error(ErrorKind::Parse, fmt::format("hinge spec: unknown profile '{}'", kind));
  }

  if (kv.contains("material_file")) {
    const std::filesystem::path ref = need(kv, "material_file", src);
    const auto path = ref.is_absolute() ? ref : base_dir / ref;
    const auto mkv = parse_key_values(read_text_file(path), path.string());
    h.material = parse_material(mkv, path.string());
  } else if (fallback_material && !kv.contains("E_pa") && !kv.contains("E_gpa")) {
    h.material = *fallback_material;
  } else {
    h.material = parse_material(kv, src);
  }
  h.validate();
  return h;
}

HingeSpec read_hinge_spec(const std::filesystem::path& path,
                          const std::optional<BilinearMaterial>& fallback_material) {
  return parse_hinge_spec(read_text_file(path), path.parent_path(), fallback_material);
}

std::vector<lasercal::EtchSample> read_etch_csv(std::istream& is) {
  const CsvTable t = read_csv(is, "etch csv");
  const auto cr = t.column("rep_rate_khz");
  const auto cp = t.column("passes");
  const auto cd = t.column("depth_um");
  std::vector<lasercal::EtchSample> out;
  for (const auto& r : t.rows) {
    if (r[cp] != std::floor(r[cp])) {
      throw Error(ErrorKind::Parse, "etch csv: passes must be an integer");
    }
    out.push_back({r[cr], static_cast<int>(r[cp]), r[cd]});
  }
  return out;
}

void write_fit_csv(std::ostream& os, const std::vector<lasercal::EtchFit>& fits) {
  os << "rep_rate_khz,rate_um_per_pass,intercept_um,rate_ci95_um,r2,n\n";
  for (const auto& f : fits) {
    fmt::print(os, "{},{:.6f},{:.6f},{:.6f},{:.6f},{}\n", f.rep_rate_khz, f.rate_um_per_pass,
               f.intercept_um, f.rate_ci95, f.r2, f.n);
  }
}

void write_torque_curve_csv(std::ostream& os, const TorqueCurve& curve) {
  os << "theta_rad,torque_nm,energy_j,eps_peak,over_limit\n";
  for (const auto& s : curve.samples) {
    fmt::print(os, "{},{},{},{},{}\n", s.theta, s.torque, s.energy, s.eps_peak,
               s.over_limit ? 1 : 0);
  }
}

TorqueCurve read_torque_curve_csv(std::istream& is) {
  const CsvTable t = read_csv(is, "torque curve csv");
  const auto ct = t.column("theta_rad");
  const auto cm = t.column("torque_nm");
  TorqueCurve c;
  for (const auto& r : t.rows) {
    TorqueSample s;
    s.theta = r[ct];
    s.torque = r[cm];
    if (t.has_column("energy_j")) s.energy = r[t.column("energy_j")];
    if (t.has_column("eps_peak")) s.eps_peak = r[t.column("eps_peak")];
    if (t.has_column("over_limit")) s.over_limit = r[t.column("over_limit")] != 0.0;
    c.samples.push_back(s);
  }
  return c;
}

}  // namespace nitiflex::io
