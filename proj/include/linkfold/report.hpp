#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "linkfold/morse.hpp"

namespace linkfold {

struct Tolerances {
  double newton = 1e-12;
  double singular = 1e-8;
  double hessian_step = 1e-4;
  double dead_band = 1e-5;
};

struct RunConfig {
  std::string f_text;
  std::string g_text;
  int n = 2;
  double epsilon = 1.0;
  std::uint64_t rng_seed = 42;
  Tolerances tolerances;
  /// Continuation step bounds, relative to epsilon.
  double initial_step = 0.02;
  double min_step = 1e-4;
  double max_step = 0.1;
  int samples = 200;
  std::string out_dir = ".";
  double theta = 0.0;
  double eta_angle = 0.0;

  /// f = z1^2 + ... + z_{n+1}^2, g = z1 + (i/2) z2.
  static RunConfig a1(int n);
};

/// Applies `key = value` lines to `base`. Blank lines and lines starting
/// with '#' are skipped. Throws Error(Config) naming the offending line.
RunConfig parse_config_text(const std::string& text, RunConfig base = {});
RunConfig load_config_file(const std::string& path, RunConfig base = {});
/// Throws Error(Config) unless the polynomials parse against n and the
/// numeric fields are in range.
void validate_config(const RunConfig& config);

/// Exit codes of the command surface.
enum ExitCode : int { kExitOk = 0, kExitConfig = 2, kExitNumeric = 3, kExitDegenerate = 4 };
int exit_code_for(ErrorKind kind);

struct Check {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct Timings {
  std::map<std::string, double> seconds;
};

/// Everything computed for one configuration with n >= 2.
struct SingularSetRun {
  std::vector<CurveTrace> traces;
  std::vector<FoldRecord> records;
  RoundVerdict verdict;
  std::size_t seeds = 0;
  Timings timings;
};

SingularSetRun compute_singular_set(const RunConfig& config, const LinkSpec& link, const PolyFunction& g,
                                    bool classify);

/// One row per trace point: component_id, arc_param, re/im of each z_j,
/// re_h, im_h, defect. Full 17-digit floats, LF line endings.
std::string singular_set_csv(const std::vector<CurveTrace>& traces, const LinkSpec& link,
                             const PolyFunction& g);
/// Same layout for the n = 1 link image, where every link point is singular.
std::string link_image_csv(const LinkImage& image, const LinkSpec& link, const PolyFunction& g);

struct SvgCurve {
  std::vector<Point2> points;
  Point2 center = Point2::Zero();
  double radius = 0.0;
};

/// Axes, an origin marker, one closed path per curve and a radius label
/// per curve. The viewBox covers every curve and the origin with a 10%
/// margin; y points up.
std::string image_svg(const std::vector<SvgCurve>& curves);
std::vector<SvgCurve> svg_curves(const std::vector<CurveTrace>& traces);
std::vector<SvgCurve> svg_curves(const LinkImage& image);

struct VerifyResult {
  int exit_code = kExitOk;
  std::vector<Check> checks;
  /// Serialized report.json.
  std::string report_json;
};

/// The A1 round fold pipeline for a given n. Writes report.json,
/// singular_set.csv and image.svg into out_dir when it is non-empty.
VerifyResult run_verify_a1(int n, const std::string& out_dir, std::uint64_t rng_seed = 42);

int cmd_verify_a1(int n, const std::string& out_dir, std::uint64_t rng_seed, std::ostream& log);
int cmd_singular_set(const RunConfig& config, std::ostream& log);
int cmd_image_svg(const RunConfig& config, std::ostream& log);
int cmd_morse(const RunConfig& config, std::ostream& log);

/// Morse summary as JSON text: slice records for config.theta and
/// composed records for eta = (cos eta_angle, sin eta_angle).
std::string morse_json(const RunConfig& config, const LinkSpec& link, const PolyFunction& g,
                       const std::vector<CurveTrace>& traces);

/// Agreement of criterion_rank_defect and direct_singularity_test at
/// `threshold` on random link points plus the given traced points.
/// Values within a factor `band` of the threshold are not counted.
struct OracleAgreement {
  int samples = 0;
  int agreements = 0;
  int disagreements = 0;
  int in_band = 0;
  int singular = 0;
  double threshold = 1e-8;
};

OracleAgreement oracle_agreement(const LinkSpec& link, const PolyFunction& g, int n_random,
                                 const std::vector<PointC>& extra, std::uint64_t rng_seed,
                                 double threshold = 1e-8, double band = 100.0);

}  // namespace linkfold
