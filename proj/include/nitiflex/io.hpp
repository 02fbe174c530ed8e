#pragma once

// File formats shared by the CLI and tests.

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nitiflex/lasercal.hpp"
#include "nitiflex/material.hpp"
#include "nitiflex/mechanics.hpp"

namespace nitiflex::io {

/// Numeric CSV with a header row. Blank lines and '#' comments are skipped.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  bool has_column(std::string_view name) const;
  std::size_t column(std::string_view name) const;  // throws Error(Parse)
};

CsvTable read_csv(std::istream& is, std::string_view source = "<stream>");
CsvTable read_csv_file(const std::filesystem::path& path);

std::string read_text_file(const std::filesystem::path& path);

/// Writes to a sibling temp file and renames it into place.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

/// `key = value` lines; '#' starts a comment. Keys are unique.
std::map<std::string, std::string> parse_key_values(std::string_view text,
                                                    std::string_view source = "<text>");

// stress-strain CSV: strain,stress_pa
std::vector<StressStrainSample> read_stress_strain_csv(std::istream& is);

// Fitted material file (key-value): E_pa, En_pa, eps_l, eps_max[, rms_pa].
std::string format_material(const BilinearMaterial& mat, double rms_pa = -1.0);
BilinearMaterial parse_material(const std::map<std::string, std::string>& kv,
                                std::string_view source);

/// Hinge specification file. Lengths are micrometres:
///
///   profile     = rectangular | arc | sampled
///   length_um   = 400
///   width_um    = 2000
///   sheet_um    = 100            (optional, default 100)
///   t_um        = 20             (rectangular)
///   t_min_um    = 20             (arc)
///   radius_um   = 1000           (arc)
///   sides       = one | both     (arc)
///   samples_um  = 0:60 200:20 400:60   (sampled, s:t pairs)
///
/// Material inline as E_gpa, En_gpa, eps_l[, eps_max], or by reference as
/// `material_file = fitted.mat` (relative to the spec file's directory).
/// A spec with neither takes `fallback_material` when one is given.
HingeSpec parse_hinge_spec(std::string_view text, const std::filesystem::path& base_dir = {},
                           const std::optional<BilinearMaterial>& fallback_material = {});
HingeSpec read_hinge_spec(const std::filesystem::path& path,
                          const std::optional<BilinearMaterial>& fallback_material = {});

// etch CSV: rep_rate_khz,passes,depth_um
std::vector<lasercal::EtchSample> read_etch_csv(std::istream& is);
void write_fit_csv(std::ostream& os, const std::vector<lasercal::EtchFit>& fits);

// torque curve CSV: theta_rad,torque_nm,energy_j,eps_peak,over_limit
void write_torque_curve_csv(std::ostream& os, const TorqueCurve& curve);
TorqueCurve read_torque_curve_csv(std::istream& is);

}  // namespace nitiflex::io
