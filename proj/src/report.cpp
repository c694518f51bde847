#include "linkfold/report.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <ostream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace linkfold {

namespace {

using json = nlohmann::json;
using Clock = std::chrono::steady_clock;

const double kInner = std::numbers::sqrt2 / 4.0;
const double kOuter = 3.0 * std::numbers::sqrt2 / 4.0;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_short(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorKind::Config, "config key '" + key + "' expects a number, got '" + value + "'");
  }
}

long long parse_integer(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorKind::Config, "config key '" + key + "' expects an integer, got '" + value + "'");
  }
}

void write_file(const std::string& dir, const std::string& name, const std::string& content) {
  std::filesystem::create_directories(dir);
  std::ofstream out(std::filesystem::path(dir) / name, std::ios::binary);
  if (!out) throw Error(ErrorKind::Config, "cannot write " + name + " into " + dir);
  out << content;
}

FoldOptions fold_options(const RunConfig& config) {
  FoldOptions options;
  options.hessian_step = config.tolerances.hessian_step;
  options.dead_band = config.tolerances.dead_band;
  return options;
}

TraceOptions trace_options(const RunConfig& config) {
  TraceOptions options;
  options.continuation.initial_step = config.initial_step;
  options.continuation.min_step = config.min_step;
  options.continuation.max_step = config.max_step;
  options.continuation.corrector_tol = config.tolerances.newton;
  return options;
}

json config_json(const RunConfig& config) {
  return json{{"f", config.f_text},
              {"g", config.g_text},
              {"n", config.n},
              {"epsilon", config.epsilon},
              {"seed", config.rng_seed},
              {"samples", config.samples},
              {"initial_step", config.initial_step},
              {"min_step", config.min_step},
              {"max_step", config.max_step},
              {"theta", config.theta},
              {"eta_angle", config.eta_angle}};
}

json tolerances_json(const RunConfig& config) {
  const FoldOptions fold = fold_options(config);
  const SeedOptions seed;
  const ContinuationOptions cont;
  return json{{"newton", config.tolerances.newton},
              {"singular", config.tolerances.singular},
              {"hessian_step", config.tolerances.hessian_step},
              {"dead_band", config.tolerances.dead_band},
              {"jacobian_step", fold.jacobian_step},
              {"rank_ratio", fold.rank_ratio},
              {"rank_zero", fold.rank_zero},
              {"seed_accept_residual", seed.accept_residual},
              {"seed_dedup_distance", seed.dedup_distance},
              {"bifurcation", cont.bifurcation_tol},
              {"max_turn", cont.max_turn},
              {"locus", 1e-8},
              {"radius", 1e-6},
              {"morse_value", 1e-6},
              {"equivariance", 1e-12},
              {"hessian_ratio", 1e-3}};
}

json point_json(const PointC& z) {
  json out = json::array();
  for (Eigen::Index j = 0; j < z.size(); ++j) out.push_back({z[j].real(), z[j].imag()});
  return out;
}

json critical_json(const CriticalPointRecord& r) {
  json eig = json::array();
  for (double e : r.hessian_eigenvalues) eig.push_back(e);
  return json{{"point", point_json(r.point)},
              {"value", r.value},
              {"morse_index", r.morse_index},
              {"hessian_eigenvalues", eig},
              {"gradient_norm", r.gradient_norm}};
}

json component_json(const CurveTrace& trace, const FoldRecord& record, const LinkSpec& link,
                    const PolyFunction& g) {
  double max_defect = 0.0;
  double max_link = 0.0;
  for (const auto& p : trace.points) {
    max_defect = std::max(max_defect, criterion_rank_defect(p.z, link.f(), g));
    max_link = std::max(max_link, link_residual(p.z, link).norm());
  }
  json out{{"component_id", record.component_id},
           {"points", trace.size()},
           {"closed", trace.closed},
           {"arc_length", trace.arc_length},
           {"kind", to_string(record.kind)},
           {"negative_eigenvalues", record.negative_eigenvalues},
           {"image_center", {record.image_center.x(), record.image_center.y()}},
           {"image_radius_mean", record.image_radius_mean},
           {"image_radius_deviation", record.image_radius_deviation},
           {"embedding_ok", record.embedding_ok},
           {"consistent", record.consistent},
           {"classified_points", record.classified_points},
           {"max_defect", max_defect},
           {"max_link_residual", max_link}};
  out["absolute_index"] = record.absolute_index ? json(*record.absolute_index) : json(nullptr);
  return out;
}

json verdict_json(const RoundVerdict& v) {
  json radii = json::array();
  for (double r : v.radii) radii.push_back(r);
  return json{{"round", v.round},
              {"failed_check", v.failed_check},
              {"center", {v.center.x(), v.center.y()}},
              {"radii", radii},
              {"order", v.order},
              {"winding_numbers", v.winding_numbers},
              {"min_separation", std::isfinite(v.min_separation) ? json(v.min_separation) : json(nullptr)}};
}

json agreement_json(const OracleAgreement& a) {
  return json{{"samples", a.samples},         {"agreements", a.agreements}, {"disagreements", a.disagreements},
              {"in_band", a.in_band},         {"singular", a.singular},     {"threshold", a.threshold}};
}

json checks_json(const std::vector<Check>& checks) {
  json out = json::array();
  for (const auto& c : checks) out.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
  return out;
}

json timings_json(const Timings& t) {
  json out = json::object();
  for (const auto& [k, v] : t.seconds) out[k] = v;
  return out;
}

std::string describe(const char* label, double value) { return std::string(label) + " = " + fmt_short(value); }

Check make_check(std::string name, bool passed, std::string detail) {
  return Check{std::move(name), passed, std::move(detail)};
}

void print_checks(const std::vector<Check>& checks, std::ostream& log) {
  for (const auto& c : checks) {
    log << (c.passed ? "[ok]   " : "[fail] ") << c.name << ": " << c.detail << "\n";
  }
}

}  // namespace

RunConfig RunConfig::a1(int n) {
  RunConfig config;
  config.n = n;
  std::string f;
  for (int j = 1; j <= n + 1; ++j) {
    if (j > 1) f += " + ";
    f += "z" + std::to_string(j) + "^2";
  }
  config.f_text = f;
  config.g_text = "z1 + 0.5i*z2";
  return config;
}

RunConfig parse_config_text(const std::string& text, RunConfig config) {
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorKind::Config, "config line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    if (key == "f") {
      config.f_text = value;
    } else if (key == "g") {
      config.g_text = value;
    } else if (key == "n") {
      config.n = static_cast<int>(parse_integer(key, value));
    } else if (key == "epsilon") {
      config.epsilon = parse_double(key, value);
    } else if (key == "seed") {
      const long long s = parse_integer(key, value);
      if (s < 0) throw Error(ErrorKind::Config, "config key 'seed' must be non-negative");
      config.rng_seed = static_cast<std::uint64_t>(s);
    } else if (key == "newton_tol") {
      config.tolerances.newton = parse_double(key, value);
    } else if (key == "singular_tol") {
      config.tolerances.singular = parse_double(key, value);
    } else if (key == "hessian_step") {
      config.tolerances.hessian_step = parse_double(key, value);
    } else if (key == "dead_band") {
      config.tolerances.dead_band = parse_double(key, value);
    } else if (key == "initial_step") {
      config.initial_step = parse_double(key, value);
    } else if (key == "min_step") {
      config.min_step = parse_double(key, value);
    } else if (key == "max_step") {
      config.max_step = parse_double(key, value);
    } else if (key == "samples") {
      config.samples = static_cast<int>(parse_integer(key, value));
    } else if (key == "out") {
      config.out_dir = value;
    } else if (key == "theta") {
      config.theta = parse_double(key, value);
    } else if (key == "eta_angle") {
      config.eta_angle = parse_double(key, value);
    } else {
      throw Error(ErrorKind::Config, "config line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
  }
  return config;
}

RunConfig load_config_file(const std::string& path, RunConfig base) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Config, "cannot read config file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), std::move(base));
}

void validate_config(const RunConfig& config) {
  if (config.n < 1) throw Error(ErrorKind::Config, "n must be at least 1");
  if (config.f_text.empty()) throw Error(ErrorKind::Config, "f is required");
  if (config.g_text.empty()) throw Error(ErrorKind::Config, "g is required");
  if (!(config.epsilon > 0) || !std::isfinite(config.epsilon)) {
    throw Error(ErrorKind::Config, "epsilon must be positive");
  }
  const auto positive = [](const char* name, double v) {
    if (!(v > 0) || !std::isfinite(v)) throw Error(ErrorKind::Config, std::string(name) + " must be positive");
  };
  positive("newton_tol", config.tolerances.newton);
  positive("singular_tol", config.tolerances.singular);
  positive("hessian_step", config.tolerances.hessian_step);
  positive("dead_band", config.tolerances.dead_band);
  positive("initial_step", config.initial_step);
  positive("min_step", config.min_step);
  positive("max_step", config.max_step);
  if (config.min_step > config.initial_step || config.initial_step > config.max_step) {
    throw Error(ErrorKind::Config, "step bounds must satisfy min_step <= initial_step <= max_step");
  }
  if (config.samples < 1) throw Error(ErrorKind::Config, "samples must be at least 1");
  try {
    LinkSpec(parse_poly(config.f_text, config.n + 1), config.n, config.epsilon);
    parse_poly(config.g_text, config.n + 1);
  } catch (const ParseError& e) {
    throw Error(ErrorKind::Config, std::string("polynomial parse error: ") + e.what());
  } catch (const Error& e) {
    throw Error(ErrorKind::Config, e.what());
  }
}

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Parse:
    case ErrorKind::DimensionMismatch:
    case ErrorKind::IndexOutOfRange:
    case ErrorKind::InvalidLink:
    case ErrorKind::Config:
      return kExitConfig;
    case ErrorKind::Degenerate:
    case ErrorKind::RankZero:
    case ErrorKind::RankTwo:
    case ErrorKind::BifurcationSuspected:
      return kExitDegenerate;
    default:
      return kExitNumeric;
  }
}

SingularSetRun compute_singular_set(const RunConfig& config, const LinkSpec& link, const PolyFunction& g,
                                    bool classify) {
  SingularSetRun run;
  SeedOptions seed_options;
  seed_options.accept_defect = config.tolerances.singular;
  auto start = Clock::now();
  const auto seeds = seed_singular_points(link, g, config.samples, config.rng_seed, seed_options);
  run.seeds = seeds.size();
  run.timings.seconds["seed"] = seconds_since(start);

  start = Clock::now();
  run.traces = collect_components(seeds, link, g, trace_options(config));
  run.timings.seconds["trace"] = seconds_since(start);

  if (classify) {
    start = Clock::now();
    const FoldOptions options = fold_options(config);
    for (std::size_t i = 0; i < run.traces.size(); ++i) {
      run.records.push_back(classify_component(run.traces[i], static_cast<int>(i), link, g, options));
    }
    run.verdict = verify_round(run.traces, run.records);
    run.timings.seconds["classify"] = seconds_since(start);
  }
  return run;
}

namespace {

std::string csv_header(int dim) {
  std::string header = "component_id,arc_param";
  for (int j = 1; j <= dim; ++j) header += ",re_z" + std::to_string(j) + ",im_z" + std::to_string(j);
  return header + ",re_h,im_h,defect\n";
}

void csv_row(std::string& out, int id, double arc, const PointC& z, const PolyFunction& g, double defect) {
  out += std::to_string(id);
  out += ',' + fmt17(arc);
  for (Eigen::Index j = 0; j < z.size(); ++j) out += ',' + fmt17(z[j].real()) + ',' + fmt17(z[j].imag());
  const Complex h = g.value(z);
  out += ',' + fmt17(h.real()) + ',' + fmt17(h.imag()) + ',' + fmt17(defect) + '\n';
}

}  // namespace

std::string singular_set_csv(const std::vector<CurveTrace>& traces, const LinkSpec& link,
                             const PolyFunction& g) {
  std::string out = csv_header(link.ambient_dim());
  for (std::size_t c = 0; c < traces.size(); ++c) {
    const CurveTrace& t = traces[c];
    for (std::size_t k = 0; k < t.size(); ++k) {
      const PointC& z = t.points[k].z;
      csv_row(out, static_cast<int>(c), t.arc_params[k], z, g, criterion_rank_defect(z, link.f(), g));
    }
  }
  return out;
}

std::string link_image_csv(const LinkImage& image, const LinkSpec& link, const PolyFunction& g) {
  std::string out = csv_header(link.ambient_dim());
  for (std::size_t c = 0; c < image.components.size(); ++c) {
    const LinkComponent& comp = image.components[c];
    double arc = 0.0;
    for (std::size_t k = 0; k < comp.points.size(); ++k) {
      if (k > 0) arc += (comp.points[k] - comp.points[k - 1]).norm();
      csv_row(out, static_cast<int>(c), arc, comp.points[k], g, criterion_rank_defect(comp.points[k], link.f(), g));
    }
  }
  return out;
}

std::vector<SvgCurve> svg_curves(const std::vector<CurveTrace>& traces) {
  std::vector<SvgCurve> curves;
  for (const auto& t : traces) {
    SvgCurve c;
    c.points = t.image;
    c.center = fit_circle_center(t.image);
    double sum = 0.0;
    for (const auto& w : t.image) sum += (w - c.center).norm();
    c.radius = t.image.empty() ? 0.0 : sum / static_cast<double>(t.image.size());
    curves.push_back(std::move(c));
  }
  return curves;
}

std::vector<SvgCurve> svg_curves(const LinkImage& image) {
  std::vector<SvgCurve> curves;
  for (const auto& comp : image.components) {
    curves.push_back(SvgCurve{comp.image, comp.image_center, comp.image_radius_mean});
  }
  return curves;
}

std::string image_svg(const std::vector<SvgCurve>& curves) {
  // Bounding box in target coordinates, always containing the origin.
  double xmin = 0, xmax = 0, ymin = 0, ymax = 0;
  bool any = false;
  for (const auto& c : curves) {
    for (const auto& p : c.points) {
      xmin = std::min(xmin, p.x());
      xmax = std::max(xmax, p.x());
      ymin = std::min(ymin, p.y());
      ymax = std::max(ymax, p.y());
      any = true;
    }
  }
  if (!any) {
    xmin = ymin = -1.0;
    xmax = ymax = 1.0;
  }
  const double mx = 0.1 * std::max(xmax - xmin, 1e-12);
  const double my = 0.1 * std::max(ymax - ymin, 1e-12);
  xmin -= mx;
  xmax += mx;
  ymin -= my;
  ymax += my;
  const double width = xmax - xmin;
  const double height = ymax - ymin;
  const double stroke = 0.004 * std::max(width, height);

  // SVG y grows downwards, so target y is drawn as -y.
  std::ostringstream s;
  s << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"600\" height=\""
    << fmt_short(600.0 * height / width) << "\" viewBox=\"" << fmt_short(xmin) << ' ' << fmt_short(-ymax) << ' '
    << fmt_short(width) << ' ' << fmt_short(height) << "\">\n";
  s << "<g id=\"axes\" stroke=\"#888888\" stroke-width=\"" << fmt_short(stroke) << "\">\n";
  s << "<line x1=\"" << fmt_short(xmin) << "\" y1=\"0\" x2=\"" << fmt_short(xmax) << "\" y2=\"0\"/>\n";
  s << "<line x1=\"0\" y1=\"" << fmt_short(-ymax) << "\" x2=\"0\" y2=\"" << fmt_short(-ymin) << "\"/>\n";
  s << "</g>\n";
  s << "<circle id=\"origin\" cx=\"0\" cy=\"0\" r=\"" << fmt_short(2.5 * stroke) << "\" fill=\"#000000\"/>\n";

  const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};
  for (std::size_t i = 0; i < curves.size(); ++i) {
    const SvgCurve& c = curves[i];
    if (c.points.empty()) continue;
    s << "<path id=\"component-" << i << "\" fill=\"none\" stroke=\"" << colors[i % 5] << "\" stroke-width=\""
      << fmt_short(stroke) << "\" d=\"";
    for (std::size_t k = 0; k < c.points.size(); ++k) {
      s << (k == 0 ? "M" : " L") << fmt_short(c.points[k].x()) << ',' << fmt_short(-c.points[k].y());
    }
    s << " Z\"/>\n";
    char label[32];
    std::snprintf(label, sizeof label, "%.4f", c.radius);
    const double lx = c.center.x() + c.radius * std::numbers::sqrt2 / 2;
    const double ly = c.center.y() + c.radius * std::numbers::sqrt2 / 2;
    s << "<text x=\"" << fmt_short(lx) << "\" y=\"" << fmt_short(-ly) << "\" font-size=\""
      << fmt_short(0.035 * std::max(width, height)) << "\" fill=\"" << colors[i % 5] << "\">" << label
      << "</text>\n";
  }
  s << "</svg>\n";
  return s.str();
}

OracleAgreement oracle_agreement(const LinkSpec& link, const PolyFunction& g, int n_random,
                                 const std::vector<PointC>& extra, std::uint64_t rng_seed, double threshold,
                                 double band) {
  OracleAgreement a;
  a.threshold = threshold;
  auto test = [&](const PointC& z) {
    const double c = criterion_rank_defect(z, link.f(), g);
    const double d = direct_singularity_test(z, link, g);
    ++a.samples;
    const auto near = [&](double v) { return v > threshold / band && v < threshold * band; };
    if (near(c) || near(d)) {
      ++a.in_band;
      return;
    }
    const bool cs = c <= threshold;
    const bool ds = d <= threshold;
    if (cs == ds) {
      ++a.agreements;
      if (cs) ++a.singular;
    } else {
      ++a.disagreements;
    }
  };
  std::mt19937_64 rng(rng_seed);
  for (int i = 0; i < n_random; ++i) test(random_link_point(link, rng));
  for (const auto& z : extra) test(z);
  return a;
}

std::string morse_json(const RunConfig& config, const LinkSpec& link, const PolyFunction& g,
                       const std::vector<CurveTrace>& traces) {
  const FoldOptions options = fold_options(config);
  const SliceSpec slice{config.theta};
  json slice_records = json::array();
  for (const PointC& p : slice_critical_points(slice, traces, link, g)) {
    slice_records.push_back(critical_json(slice_morse_index(p, slice, link, g, options)));
  }
  const Point2 eta(std::cos(config.eta_angle), std::sin(config.eta_angle));
  json composed = json::array();
  for (const auto& r : composed_morse(eta, traces, link, g, options)) composed.push_back(critical_json(r));
  json out{{"theta", config.theta},
           {"eta", {eta.x(), eta.y()}},
           {"slice", slice_records},
           {"composed", composed}};
  return out.dump(2) + "\n";
}

namespace {

std::vector<Check> a1_checks_n1(int n_samples, std::uint64_t seed, json& report, Timings& timings) {
  const RunConfig config = RunConfig::a1(1);
  const LinkSpec link(parse_poly(config.f_text, 2), 1, 1.0);
  const PolyFunction g(parse_poly(config.g_text, 2));
  auto start = Clock::now();
  const LinkImage image = trace_image_n1(link, g, n_samples, seed);
  timings.seconds["trace"] = seconds_since(start);

  std::vector<Check> checks;
  const bool two = image.components.size() == 2 &&
                   std::all_of(image.components.begin(), image.components.end(),
                               [](const LinkComponent& c) { return c.closed; });
  checks.push_back(make_check("two_components", two,
                              std::to_string(image.components.size()) + " image components"));
  if (two) {
    const double e0 = std::abs(image.components[0].image_radius_mean - kInner);
    const double e1 = std::abs(image.components[1].image_radius_mean - kOuter);
    double center = 0.0;
    double dev = 0.0;
    for (const auto& c : image.components) {
      center = std::max(center, c.image_center.norm());
      dev = std::max(dev, c.image_radius_deviation);
    }
    checks.push_back(make_check("radii", std::max(e0, e1) <= 1e-6 && center <= 1e-6 && dev <= 1e-6,
                                describe("max radius error", std::max(e0, e1)) + ", " +
                                    describe("center offset", center) + ", " + describe("radius deviation", dev)));
  }
  json comps = json::array();
  for (std::size_t i = 0; i < image.components.size(); ++i) {
    const auto& c = image.components[i];
    double max_link = 0.0;
    for (const auto& z : c.points) max_link = std::max(max_link, link_residual(z, link).norm());
    comps.push_back({{"component_id", i},
                     {"points", c.points.size()},
                     {"closed", c.closed},
                     {"arc_length", c.arc_length},
                     {"kind", "LINK_IMAGE"},
                     {"absolute_index", nullptr},
                     {"negative_eigenvalues", 0},
                     {"image_center", {c.image_center.x(), c.image_center.y()}},
                     {"image_radius_mean", c.image_radius_mean},
                     {"image_radius_deviation", c.image_radius_deviation},
                     {"embedding_ok", true},
                     {"consistent", true},
                     {"classified_points", 0},
                     {"max_defect", 0.0},
                     {"max_link_residual", max_link}});
  }
  report["components"] = comps;
  report["round"] = json{{"round", two},
                         {"failed_check", two ? "" : "two_components"},
                         {"center", {0.0, 0.0}},
                         {"radii", json::array()},
                         {"order", json::array()},
                         {"winding_numbers", json::array()},
                         {"min_separation", image.min_component_distance}};
  for (const auto& c : image.components) report["round"]["radii"].push_back(c.image_radius_mean);
  report["artifacts"] = {{"csv", link_image_csv(image, link, g)}, {"svg", image_svg(svg_curves(image))}};
  return checks;
}

}  // namespace

VerifyResult run_verify_a1(int n, const std::string& out_dir, std::uint64_t rng_seed) {
  VerifyResult result;
  RunConfig config = RunConfig::a1(n);
  config.rng_seed = rng_seed;
  config.out_dir = out_dir;
  json report;
  report["config"] = config_json(config);
  report["tolerances"] = tolerances_json(config);
  Timings timings;
  const auto total_start = Clock::now();
  std::vector<Check>& checks = result.checks;

  try {
    if (n < 1) throw Error(ErrorKind::Config, "n must be at least 1");
    if (n == 1) {
      checks = a1_checks_n1(config.samples, rng_seed, report, timings);
      report["morse"] = nullptr;
      report["oracle_agreement"] = nullptr;
    } else {
      const LinkSpec link(parse_poly(config.f_text, n + 1), n, config.epsilon);
      const PolyFunction g(parse_poly(config.g_text, n + 1));
      SingularSetRun run = compute_singular_set(config, link, g, true);
      timings = run.timings;
      const auto& traces = run.traces;
      const auto& records = run.records;

      // Components, radii, fold types.
      const bool two = traces.size() == 2 &&
                       std::all_of(traces.begin(), traces.end(), [](const CurveTrace& t) { return t.closed; });
      checks.push_back(make_check("two_components", two,
                                  std::to_string(traces.size()) + " components, seeds " + std::to_string(run.seeds)));
      checks.push_back(make_check("round", run.verdict.round,
                                  run.verdict.round ? "round fold map" : run.verdict.failed_check));
      if (two && run.verdict.round) {
        const double e0 = std::abs(run.verdict.radii[0] - kInner);
        const double e1 = std::abs(run.verdict.radii[1] - kOuter);
        double dev = 0.0;
        double center = 0.0;
        for (const auto& r : records) {
          dev = std::max(dev, r.image_radius_deviation);
          center = std::max(center, r.image_center.norm());
        }
        checks.push_back(make_check("radii", std::max(e0, e1) <= 1e-6 && center <= 1e-6 && dev <= 1e-6,
                                    describe("max radius error", std::max(e0, e1)) + ", " +
                                        describe("center offset", center) + ", " +
                                        describe("radius deviation", dev)));
        const FoldRecord& inner = records[run.verdict.order[0]];
        const FoldRecord& outer = records[run.verdict.order[1]];
        const bool inner_ok = inner.kind == FoldKind::Indefinite && inner.absolute_index == n - 1 && inner.consistent;
        const bool outer_ok = outer.kind == FoldKind::Definite && outer.consistent;
        checks.push_back(make_check(
            "fold_types", inner_ok && outer_ok,
            std::string("inner ") + to_string(inner.kind) + " index " +
                (inner.absolute_index ? std::to_string(*inner.absolute_index) : "-") + ", outer " +
                to_string(outer.kind) + ", classified " +
                std::to_string(inner.classified_points + outer.classified_points) + " points"));
      }

      // Exact locus and defect of every traced point.
      double locus = 0.0;
      double defect = 0.0;
      std::vector<PointC> traced;
      for (const auto& t : traces) {
        for (const auto& p : t.points) {
          const PointC& z = p.z;
          double err = 0.0;
          for (Eigen::Index j = 2; j < z.size(); ++j) err = std::max(err, std::abs(z[j]));
          err = std::max(err, std::min(std::abs(z[0] - Complex(0, 1) * z[1]), std::abs(z[0] + Complex(0, 1) * z[1])));
          err = std::max(err, std::abs(std::abs(z[0]) - std::numbers::sqrt2 / 2));
          err = std::max(err, std::abs(std::abs(z[1]) - std::numbers::sqrt2 / 2));
          locus = std::max(locus, err);
          defect = std::max(defect, criterion_rank_defect(z, link.f(), g));
          traced.push_back(z);
        }
      }
      checks.push_back(make_check("exact_locus", !traced.empty() && locus <= 1e-8, describe("max locus error", locus)));
      checks.push_back(make_check("defect", !traced.empty() && defect <= config.tolerances.singular,
                                  describe("max defect", defect)));

      // Morse data.
      auto start = Clock::now();
      const FoldOptions options = fold_options(config);
      const SliceSpec slice{0.0};
      std::vector<CriticalPointRecord> slice_records;
      for (const PointC& p : slice_critical_points(slice, traces, link, g)) {
        slice_records.push_back(slice_morse_index(p, slice, link, g, options));
      }
      std::multiset<int> slice_idx;
      for (const auto& r : slice_records) slice_idx.insert(r.morse_index);
      const bool slice_ok = slice_idx == std::multiset<int>{n - 1, 2 * n - 2};
      checks.push_back(make_check("slice_morse", slice_ok,
                                  std::to_string(slice_records.size()) + " critical points on the ray"));
      if (slice_ok) {
        const auto& q = slice_records.back();
        const RealVector& e = q.hessian_eigenvalues;
        const double ratio = e.minCoeff() / e.maxCoeff();
        const bool ok = e.maxCoeff() < 0 && std::abs(ratio - 2.0) <= 1e-3 &&
                        std::abs(q.value - kOuter) <= 1e-6;
        checks.push_back(make_check("slice_hessian_ratio", ok, describe("eigenvalue ratio at q", ratio)));
      }

      const std::vector<CriticalPointRecord> composed = composed_morse(Point2(1.0, 0.0), traces, link, g, options);
      std::multiset<int> comp_idx;
      for (const auto& r : composed) comp_idx.insert(r.morse_index);
      bool comp_ok = composed.size() == 4 && comp_idx == std::multiset<int>{0, n - 1, n, 2 * n - 1};
      double value_err = 0.0;
      if (composed.size() == 4) {
        const double expected[] = {-kOuter, -kInner, kInner, kOuter};
        for (int i = 0; i < 4; ++i) value_err = std::max(value_err, std::abs(composed[i].value - expected[i]));
        comp_ok = comp_ok && value_err <= 1e-6;
      }
      checks.push_back(make_check("composed_morse", comp_ok,
                                  std::to_string(composed.size()) + " critical points, " +
                                      describe("max value error", value_err)));
      double grad = 0.0;
      for (const auto& r : slice_records) grad = std::max(grad, r.gradient_norm);
      for (const auto& r : composed) grad = std::max(grad, r.gradient_norm);
      checks.push_back(make_check("critical_gradients", grad <= 1e-10, describe("max gradient norm", grad)));
      timings.seconds["morse"] = seconds_since(start);

      json slice_json = json::array();
      for (const auto& r : slice_records) slice_json.push_back(critical_json(r));
      json composed_json = json::array();
      for (const auto& r : composed) composed_json.push_back(critical_json(r));
      report["morse"] = {{"theta", 0.0}, {"eta", {1.0, 0.0}}, {"slice", slice_json}, {"composed", composed_json}};

      // Equivariance of h and S^1-invariance of the traced set.
      start = Clock::now();
      const double equiv = equivariance_error(link, g, 1000, rng_seed);
      std::mt19937_64 rng(rng_seed ^ 0x5eedULL);
      std::uniform_real_distribution<double> angle(0.0, 2 * std::numbers::pi);
      double rotated = 0.0;
      for (const auto& z : traced) {
        rotated = std::max(rotated, criterion_rank_defect(std::polar(1.0, angle(rng)) * z, link.f(), g));
      }
      checks.push_back(make_check("equivariance", equiv <= 1e-12 && rotated <= 1e-8,
                                  describe("max |h(az) - a h(z)|", equiv) + ", " +
                                      describe("max rotated defect", rotated)));
      timings.seconds["equivariance"] = seconds_since(start);

      start = Clock::now();
      const OracleAgreement agreement = oracle_agreement(link, g, 2000, traced, rng_seed);
      checks.push_back(make_check("oracle_agreement", agreement.disagreements == 0,
                                  std::to_string(agreement.disagreements) + " disagreements in " +
                                      std::to_string(agreement.samples) + " samples"));
      timings.seconds["oracles"] = seconds_since(start);
      report["oracle_agreement"] = agreement_json(agreement);

      // Condition (1) locus: the two conjugate gradients dependent on K.
      start = Clock::now();
      const DependencyScan scan = gradient_dependency_scan(link, g, 50, rng_seed);
      checks.push_back(make_check("gradient_dependency_locus", scan.solutions.empty(),
                                  std::to_string(scan.solutions.size()) + " solutions, " +
                                      describe("min dependency", scan.min_dependency)));
      timings.seconds["dependency_scan"] = seconds_since(start);

      json comps = json::array();
      for (std::size_t i = 0; i < traces.size(); ++i) comps.push_back(component_json(traces[i], records[i], link, g));
      report["components"] = comps;
      report["round"] = verdict_json(run.verdict);
      report["artifacts"] = {{"csv", singular_set_csv(traces, link, g)}, {"svg", image_svg(svg_curves(traces))}};
    }
    result.exit_code = kExitOk;
    for (const auto& c : checks) {
      if (!c.passed) {
        const bool degenerate =
            c.name == "gradient_dependency_locus" || c.detail.find("degenerate") != std::string::npos;
        result.exit_code = degenerate ? kExitDegenerate : kExitNumeric;
        report["failed_check"] = c.name;
        break;
      }
    }
  } catch (const Error& e) {
    result.exit_code = exit_code_for(e.kind());
    checks.push_back(make_check("pipeline", false, e.what()));
    report["failed_check"] = "pipeline";
  }

  timings.seconds["total"] = seconds_since(total_start);
  report["timings"] = timings_json(timings);
  report["checks"] = checks_json(checks);
  report["status"] = result.exit_code == kExitOk ? "ok" : "failed";
  if (!report.contains("failed_check")) report["failed_check"] = nullptr;
  for (const char* key : {"components", "round", "morse", "oracle_agreement"}) {
    if (!report.contains(key)) report[key] = nullptr;
  }

  json artifacts = report.contains("artifacts") ? report["artifacts"] : json();
  report.erase("artifacts");
  result.report_json = report.dump(2) + "\n";
  if (!out_dir.empty()) {
    write_file(out_dir, "report.json", result.report_json);
    if (!artifacts.is_null()) {
      write_file(out_dir, "singular_set.csv", artifacts["csv"].get<std::string>());
      write_file(out_dir, "image.svg", artifacts["svg"].get<std::string>());
    }
  }
  return result;
}

int cmd_verify_a1(int n, const std::string& out_dir, std::uint64_t rng_seed, std::ostream& log) {
  const VerifyResult result = run_verify_a1(n, out_dir, rng_seed);
  print_checks(result.checks, log);
  for (const auto& c : result.checks) {
    if (!c.passed) {
      log << "verify-a1 failed: " << c.name << "\n";
      break;
    }
  }
  return result.exit_code;
}

namespace {

struct Prepared {
  LinkSpec link;
  PolyFunction g;
};

Prepared prepare(const RunConfig& config, std::ostream& log) {
  validate_config(config);
  Prepared p{LinkSpec(parse_poly(config.f_text, config.n + 1), config.n, config.epsilon),
             PolyFunction(parse_poly(config.g_text, config.n + 1))};
  if (!homogeneous_degree(p.link.f().poly()) && config.epsilon >= 0.5) {
    log << "warning: f is not homogeneous and epsilon = " << config.epsilon
        << " may be too large for the link to be well defined\n";
  }
  return p;
}

template <typename Fn>
int guarded(std::ostream& log, Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    log << "error: " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const std::filesystem::filesystem_error& e) {
    log << "error: " << e.what() << "\n";
    return kExitConfig;
  }
}

}  // namespace

int cmd_singular_set(const RunConfig& config, std::ostream& log) {
  return guarded(log, [&] {
    const Prepared p = prepare(config, log);
    if (config.n == 1) {
      const LinkImage image = trace_image_n1(p.link, p.g, config.samples, config.rng_seed);
      write_file(config.out_dir, "singular_set.csv", link_image_csv(image, p.link, p.g));
      log << image.components.size() << " components\n";
      return static_cast<int>(kExitOk);
    }
    const SingularSetRun run = compute_singular_set(config, p.link, p.g, false);
    write_file(config.out_dir, "singular_set.csv", singular_set_csv(run.traces, p.link, p.g));
    log << run.traces.size() << " components\n";
    return static_cast<int>(kExitOk);
  });
}

int cmd_image_svg(const RunConfig& config, std::ostream& log) {
  return guarded(log, [&] {
    const Prepared p = prepare(config, log);
    std::vector<SvgCurve> curves;
    if (config.n == 1) {
      curves = svg_curves(trace_image_n1(p.link, p.g, config.samples, config.rng_seed));
    } else {
      curves = svg_curves(compute_singular_set(config, p.link, p.g, false).traces);
    }
    write_file(config.out_dir, "image.svg", image_svg(curves));
    log << curves.size() << " curves\n";
    return static_cast<int>(kExitOk);
  });
}

int cmd_morse(const RunConfig& config, std::ostream& log) {
  return guarded(log, [&] {
    const Prepared p = prepare(config, log);
    if (config.n < 2) throw Error(ErrorKind::Config, "morse needs n >= 2");
    const SingularSetRun run = compute_singular_set(config, p.link, p.g, false);
    write_file(config.out_dir, "morse.json", morse_json(config, p.link, p.g, run.traces));
    return static_cast<int>(kExitOk);
  });
}

}  // namespace linkfold
