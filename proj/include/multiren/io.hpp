#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "multiren/complex_poly.hpp"
#include "multiren/convergence.hpp"
#include "multiren/mcd.hpp"
#include "multiren/real_dynamics.hpp"
#include "multiren/realization.hpp"
#include "multiren/renorm.hpp"

namespace multiren::io {

using nlohmann::json;

/// %.17g: enough digits to read back the same binary64.
std::string fmt(double x);

json mcd_to_json(const Mcd& s);
/// Field-by-field read followed by Mcd::validate. Throws InputError for
/// missing or mistyped fields and malformed shapes, and the invariant
/// errors of Mcd::validate.
Mcd mcd_from_json(const json& j);

/// {"n": n, "params": [a_1, ..., a_n]}.
json map_to_json(const MultimodalMap& f);
MultimodalMap map_from_json(const json& j);

/// std::invalid_argument when the file cannot be opened, InputError when it
/// is not JSON.
json read_json_file(const std::filesystem::path& p);
Mcd read_mcd_file(const std::filesystem::path& p);
MultimodalMap read_map_file(const std::filesystem::path& p);

/// Writes to a temporary file next to p and renames it over p.
void write_atomic(const std::filesystem::path& p, std::string_view content);
/// Pretty-printed JSON followed by a newline.
void write_json(const std::filesystem::path& p, const json& j);

/// MULTIREN_OUTPUT_DIR if set, else the current directory; an explicit
/// choice wins over both.
std::filesystem::path output_dir(const std::string& explicit_dir = "");

class Csv {
 public:
  explicit Csv(std::vector<std::string> header);
  Csv& row(const std::vector<std::string>& cells);
  std::string str() const { return text_; }

 private:
  std::size_t columns_;
  std::string text_;
};

json report_to_json(const SolverReport& r, bool with_trace);
json renorm_to_json(const RenormResult& r);
json tower_to_json(const Tower& t);
json geometry_to_json(const GeometryReport& g);
json fit_to_json(const RateFit& fit);
json bn_to_json(const BnVerdict& v);
json verdict_to_json(const ConnectivityVerdict& v);

std::string distance_csv(const DistanceSeries& s);
std::string cascade_csv(const Cascade& c);
/// Rows (k, ratio) for k = 1..depth-1.
std::string decay_csv(const std::vector<double>& ratios);
/// Rows (step, copy, x, letter) for the first len points of the extended
/// orbit.
std::string orbit_csv(const MultimodalMap& f, ExtPoint start, int len);

/// Parses "x", "x+yi", "x-yi", "yi" or "i".
cplx parse_complex(std::string_view text);
/// Whitespace, ';' or ',' separated complex numbers.
std::vector<cplx> parse_complex_list(std::string_view text);
std::string fmt(cplx z);

/// 8-bit binary graymap: bounded pixels 0, escaping ones 1..255 scaled
/// linearly by escape step between the fastest and slowest in the raster.
std::string pgm_bytes(const Raster& r);
json raster_metadata(const Raster& r, const TypeNPoly& p);

}  // namespace multiren::io
