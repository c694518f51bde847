// Acceptance runner: one PASS/FAIL line per criterion, nonzero exit on any
// failure.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <map>
#include <random>

#include "linkfold/linalg.hpp"
#include "linkfold/report.hpp"

using namespace linkfold;

namespace {

const Complex kI(0.0, 1.0);

struct A1Data {
  explicit A1Data(int n)
      : link(parse_poly(RunConfig::a1(n).f_text, n + 1), n, 1.0), g(parse_poly(RunConfig::a1(n).g_text, n + 1)) {}
  LinkSpec link;
  PolyFunction g;
};

struct Verified {
  VerifyResult result;
  double seconds = 0.0;
};

PointC random_point(int dim, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1, 1);
  PointC z(dim);
  for (int j = 0; j < dim; ++j) z[j] = Complex(u(rng), u(rng));
  return z;
}

const Check* find_check(const VerifyResult& r, const std::string& name) {
  for (const auto& c : r.checks)
    if (c.name == name) return &c;
  return nullptr;
}

class Runner {
 public:
  void report(int id, bool passed, const std::string& title, const std::string& detail) {
    std::printf("[%s] criterion %d: %s (%s)\n", passed ? "PASS" : "FAIL", id, title.c_str(), detail.c_str());
    std::fflush(stdout);
    if (!passed) ++failures_;
  }
  int failures() const { return failures_; }

 private:
  int failures_ = 0;
};

// All named checks of a verify run passed; appends their details.
bool checks_pass(const Verified& v, std::initializer_list<const char*> names, std::string& detail) {
  bool ok = true;
  for (const char* name : names) {
    const Check* c = find_check(v.result, name);
    if (c == nullptr) {
      ok = false;
      detail += std::string(name) + ": missing; ";
      continue;
    }
    ok = ok && c->passed;
    if (!c->passed) detail += std::string(name) + ": " + c->detail + "; ";
  }
  return ok;
}

}  // namespace

int main() {
  Runner runner;
  const auto root = std::filesystem::temp_directory_path() / "linkfold_acceptance";
  std::filesystem::remove_all(root);

  std::map<int, Verified> runs;
  for (int n = 1; n <= 4; ++n) {
    const auto dir = root / ("n" + std::to_string(n));
    std::filesystem::create_directories(dir);
    const auto start = std::chrono::steady_clock::now();
    runs[n].result = run_verify_a1(n, dir.string());
    runs[n].seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }

  {
    bool ok = true;
    std::string detail;
    for (int n = 2; n <= 4; ++n) {
      ok = checks_pass(runs[n], {"two_components", "round", "radii", "fold_types"}, detail) && ok;
      ok = ok && runs[n].seconds <= 60.0;
      char buf[64];
      std::snprintf(buf, sizeof buf, "n=%d %.2fs; ", n, runs[n].seconds);
      detail += buf;
    }
    runner.report(1, ok, "two round fold circles with the expected fold types for n = 2, 3, 4", detail);
  }

  {
    bool ok = true;
    std::string detail;
    for (int n = 2; n <= 4; ++n) ok = checks_pass(runs[n], {"exact_locus", "defect"}, detail) && ok;
    runner.report(2, ok, "traced points lie on the exact singular locus", detail.empty() ? "n = 2, 3, 4" : detail);
  }

  {
    std::string detail;
    const bool ok = checks_pass(runs[2], {"slice_morse", "slice_hessian_ratio"}, detail);
    runner.report(3, ok, "slice Morse indices {2, 1} and Hessian ratio 2:1 at q", detail.empty() ? "n = 2" : detail);
  }

  {
    bool ok = true;
    std::string detail;
    for (int n = 2; n <= 3; ++n) ok = checks_pass(runs[n], {"composed_morse", "critical_gradients"}, detail) && ok;
    runner.report(4, ok, "composed Morse function has indices {0, n-1, n, 2n-1}", detail.empty() ? "n = 2, 3" : detail);
  }

  {
    const A1Data a1(2);
    // Random points are almost surely regular; the traced points cover the
    // singular side.
    const SingularSetRun run = compute_singular_set(RunConfig::a1(2), a1.link, a1.g, false);
    std::vector<PointC> traced;
    for (const auto& t : run.traces)
      for (const auto& p : t.points) traced.push_back(p.z);
    const OracleAgreement a = oracle_agreement(a1.link, a1.g, 10000, traced, 2024);
    const std::string detail = std::to_string(a.samples) + " points, " + std::to_string(a.singular) +
                               " singular, " + std::to_string(a.in_band) + " in band, " +
                               std::to_string(a.disagreements) + " disagreements";
    const bool ok = a.samples == 10000 + static_cast<int>(traced.size()) && a.singular >= static_cast<int>(traced.size()) &&
                    a.disagreements == 0;
    runner.report(5, ok, "criterion and direct singularity oracles agree",
                  detail);
  }

  {
    std::mt19937_64 rng(606);
    double inner = 0.0;
    for (int t = 0; t < 10000; ++t) {
      const PointC u = random_point(3, rng);
      const PointC v = random_point(3, rng);
      inner = std::max(inner, std::abs(real_inner(u, v) - hermitian_inner(u, v).real()));
      inner = std::max(inner, std::abs(real_inner(u, v) - realify(u).dot(realify(v))));
    }
    const A1Data a1(4);
    double minors = 0.0;
    const auto det3 = [](const Eigen::MatrixXcd& m, int a, int b, int c) -> Complex {
      Eigen::Matrix3cd s;
      s.row(0) = m.row(a);
      s.row(1) = m.row(b);
      s.row(2) = m.row(c);
      return s.determinant();
    };
    for (int t = 0; t < 1000; ++t) {
      const PointC z = random_point(5, rng);
      const Eigen::MatrixXcd m = criterion_matrix(z, a1.link.f(), a1.g).columns;
      const double scale = std::max(1.0, z.squaredNorm());
      for (int j = 2; j < 5; ++j) {
        const Complex expected = 4.0 * kI * (z[1] * std::conj(z[j])).imag() - 2.0 * (z[0] * std::conj(z[j])).imag();
        minors = std::max(minors, std::abs(det3(m, 0, 1, j) - expected) / scale);
      }
      for (int j = 3; j < 5; ++j) {
        const Complex expected = 4.0 * kI * (z[2] * std::conj(z[j])).imag();
        minors = std::max(minors, std::abs(det3(m, 0, 2, j) - expected) / scale);
      }
    }
    char buf[128];
    std::snprintf(buf, sizeof buf, "inner product error %.2e, minor error %.2e", inner, minors);
    runner.report(6, inner <= 1e-12 && minors <= 1e-10, "algebraic identities", buf);
  }

  {
    bool ok = true;
    std::string detail;
    for (int n = 2; n <= 4; ++n) ok = checks_pass(runs[n], {"equivariance"}, detail) && ok;
    const A1Data a1(3);
    const double err = equivariance_error(a1.link, a1.g, 1000, 77);
    ok = ok && err <= 1e-12;
    char buf[64];
    std::snprintf(buf, sizeof buf, "independent run %.2e", err);
    runner.report(7, ok, "h is S^1-equivariant and S(h) is S^1-invariant", detail + buf);
  }

  {
    std::string detail;
    const bool ok = runs[1].result.exit_code == kExitOk && checks_pass(runs[1], {"two_components", "radii"}, detail);
    runner.report(8, ok, "n = 1 link image is two circles of radii sqrt2/4 and 3 sqrt2/4",
                  detail.empty() ? "n = 1" : detail);
  }

  {
    std::mt19937_64 rng(909);
    std::normal_distribution<double> normal;
    const A1Data a1(3);

    // Second-order contact of the retraction chart.
    double contact = 0.0;
    for (int t = 0; t < 50; ++t) {
      const PointC p = random_link_point(a1.link, rng);
      const TangentFrame frame = tangent_frame(p, a1.link);
      RealVector u(frame.dim());
      for (int k = 0; k < frame.dim(); ++k) u[k] = normal(rng);
      u /= u.norm();
      const double s = 1e-3;
      const double err = (realify(chart(frame, s * u, a1.link)) - realify(p) - s * frame.basis * u).norm();
      contact = std::max(contact, err / (s * s));
    }

    // Projection idempotence.
    double idempotence = 0.0;
    for (int t = 0; t < 500; ++t) {
      const PointC z = project_to_link(random_point(4, rng), a1.link);
      idempotence = std::max(idempotence, (project_to_link(z, a1.link) - z).norm());
    }

    // Determinism under a fixed seed.
    const auto dir_a = root / "det_a";
    const auto dir_b = root / "det_b";
    std::filesystem::create_directories(dir_a);
    std::filesystem::create_directories(dir_b);
    const VerifyResult ra = run_verify_a1(2, dir_a.string(), 11);
    const VerifyResult rb = run_verify_a1(2, dir_b.string(), 11);
    const auto read = [](const std::filesystem::path& p) {
      std::FILE* f = std::fopen(p.string().c_str(), "rb");
      std::string out;
      if (f == nullptr) return out;
      char buf[4096];
      for (std::size_t k; (k = std::fread(buf, 1, sizeof buf, f)) > 0;) out.append(buf, k);
      std::fclose(f);
      return out;
    };
    const bool deterministic = read(dir_a / "singular_set.csv") == read(dir_b / "singular_set.csv") &&
                               read(dir_a / "image.svg") == read(dir_b / "image.svg") &&
                               ra.checks.size() == rb.checks.size() && !read(dir_a / "singular_set.csv").empty();

    // Absolute-index formula on every classified point.
    int classified = 0;
    int formula_failures = 0;
    for (int n = 2; n <= 4; ++n) {
      const RunConfig config = RunConfig::a1(n);
      const A1Data d(n);
      const SingularSetRun run = compute_singular_set(config, d.link, d.g, true);
      for (const auto& r : run.records) {
        for (const auto& fp : r.samples) {
          ++classified;
          const int lambda = fp.negative_eigenvalues;
          if (!fp.absolute_index || *fp.absolute_index != std::min(lambda, 2 * n - 2 - lambda)) ++formula_failures;
        }
      }
    }

    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "contact ratio %.3f, idempotence %.2e, deterministic %s, %d classified points with %d index "
                  "failures",
                  contact, idempotence, deterministic ? "yes" : "no", classified, formula_failures);
    const bool ok = contact < 10.0 && idempotence <= 1e-11 && deterministic && classified > 0 && formula_failures == 0;
    runner.report(9, ok, "property suite", buf);
  }

  std::printf("%d of 9 criteria failed\n", runner.failures());
  return runner.failures() == 0 ? 0 : 1;
}
