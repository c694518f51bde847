#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "linkfold/report.hpp"

namespace py = pybind11;
using namespace linkfold;

namespace {

// Link plus target polynomial, parsed once and kept together so the
// pointers held by the numeric layers stay valid.
class Problem {
 public:
  Problem(const std::string& f, const std::string& g, int n, double epsilon)
      : link_(parse_poly(f, n + 1), n, epsilon), g_(parse_poly(g, n + 1)) {
    config_.f_text = f;
    config_.g_text = g;
    config_.n = n;
    config_.epsilon = epsilon;
  }

  const LinkSpec& link() const { return link_; }
  const PolyFunction& g() const { return g_; }
  RunConfig config(int samples, std::uint64_t seed) const {
    RunConfig c = config_;
    c.samples = samples;
    c.rng_seed = seed;
    return c;
  }

 private:
  RunConfig config_;
  LinkSpec link_;
  PolyFunction g_;
};

Eigen::MatrixXcd stack_points(const std::vector<PointC>& pts, int dim) {
  Eigen::MatrixXcd out(static_cast<Eigen::Index>(pts.size()), dim);
  for (std::size_t k = 0; k < pts.size(); ++k) out.row(static_cast<Eigen::Index>(k)) = pts[k].transpose();
  return out;
}

Eigen::MatrixX2d stack_image(const std::vector<Point2>& image) {
  Eigen::MatrixX2d out(static_cast<Eigen::Index>(image.size()), 2);
  for (std::size_t k = 0; k < image.size(); ++k) out.row(static_cast<Eigen::Index>(k)) = image[k].transpose();
  return out;
}

py::dict fold_point_dict(const FoldPoint& fp) {
  py::dict d;
  d["kind"] = to_string(fp.kind);
  d["absolute_index"] = fp.absolute_index ? py::cast(*fp.absolute_index) : py::none();
  d["negative_eigenvalues"] = fp.negative_eigenvalues;
  d["eigenvalues"] = fp.eigenvalues;
  return d;
}

py::dict critical_dict(const CriticalPointRecord& r) {
  py::dict d;
  d["point"] = r.point;
  d["value"] = r.value;
  d["morse_index"] = r.morse_index;
  d["hessian_eigenvalues"] = r.hessian_eigenvalues;
  d["gradient_norm"] = r.gradient_norm;
  return d;
}

std::vector<CurveTrace> traces_for(const Problem& p, int samples, std::uint64_t seed) {
  return compute_singular_set(p.config(samples, seed), p.link(), p.g(), false).traces;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Singular sets and fold types of h = g restricted to the link of f";

  py::register_exception<Error>(m, "LinkfoldError", PyExc_RuntimeError);

  m.def(
      "parse_poly", [](const std::string& text, int n_vars) { return parse_poly(text, n_vars).to_string(); },
      py::arg("text"), py::arg("n_vars"), "Parse a polynomial and return its canonical text.");
  m.def(
      "eval_poly", [](const std::string& text, const PointC& z) {
        return eval(parse_poly(text, static_cast<int>(z.size())), z);
      },
      py::arg("text"), py::arg("z"));
  m.def(
      "conj_gradient", [](const std::string& text, const PointC& z) {
        return conj_gradient(parse_poly(text, static_cast<int>(z.size())), z);
      },
      py::arg("text"), py::arg("z"));
  m.def(
      "homogeneous_degree", [](const std::string& text, int n_vars) { return homogeneous_degree(parse_poly(text, n_vars)); },
      py::arg("text"), py::arg("n_vars"));

  py::class_<Problem>(m, "Problem")
      .def(py::init<const std::string&, const std::string&, int, double>(), py::arg("f"), py::arg("g"), py::arg("n"),
           py::arg("epsilon") = 1.0)
      .def_property_readonly("n", [](const Problem& p) { return p.link().n(); })
      .def("h", [](const Problem& p, const PointC& z) { return p.g().value(z); }, py::arg("z"))
      .def(
          "link_residual", [](const Problem& p, const PointC& z) { return link_residual(z, p.link()); },
          py::arg("z"))
      .def(
          "project", [](const Problem& p, const PointC& z) { return project_to_link(z, p.link()); }, py::arg("z"))
      .def(
          "random_link_points",
          [](const Problem& p, int count, std::uint64_t seed) {
            std::mt19937_64 rng(seed);
            std::vector<PointC> pts;
            for (int k = 0; k < count; ++k) pts.push_back(random_link_point(p.link(), rng));
            return stack_points(pts, p.link().ambient_dim());
          },
          py::arg("count"), py::arg("seed") = 42)
      .def(
          "criterion_rank_defect",
          [](const Problem& p, const PointC& z) { return criterion_rank_defect(z, p.link().f(), p.g()); },
          py::arg("z"))
      .def(
          "direct_singularity_test",
          [](const Problem& p, const PointC& z) { return direct_singularity_test(z, p.link(), p.g()); },
          py::arg("z"))
      .def(
          "seeds",
          [](const Problem& p, int samples, std::uint64_t seed) {
            std::vector<PointC> pts;
            for (const auto& s : seed_singular_points(p.link(), p.g(), samples, seed)) pts.push_back(s.z);
            return stack_points(pts, p.link().ambient_dim());
          },
          py::arg("samples") = 200, py::arg("seed") = 42, "Points of S(h) as rows of a complex array.")
      .def(
          "traces",
          [](const Problem& p, int samples, std::uint64_t seed) {
            py::list out;
            for (const auto& t : traces_for(p, samples, seed)) {
              std::vector<PointC> pts;
              for (const auto& a : t.points) pts.push_back(a.z);
              py::dict d;
              d["points"] = stack_points(pts, p.link().ambient_dim());
              d["image"] = stack_image(t.image);
              d["arc_params"] = t.arc_params;
              d["closed"] = t.closed;
              d["arc_length"] = t.arc_length;
              out.append(d);
            }
            return out;
          },
          py::arg("samples") = 200, py::arg("seed") = 42)
      .def(
          "classify",
          [](const Problem& p, const PointC& z) { return fold_point_dict(classify_fold(z, p.link(), p.g())); },
          py::arg("z"))
      .def(
          "singular_set",
          [](const Problem& p, int samples, std::uint64_t seed) {
            const SingularSetRun run = compute_singular_set(p.config(samples, seed), p.link(), p.g(), true);
            py::list components;
            for (const auto& r : run.records) {
              py::dict d;
              d["component_id"] = r.component_id;
              d["kind"] = to_string(r.kind);
              d["absolute_index"] = r.absolute_index ? py::cast(*r.absolute_index) : py::none();
              d["negative_eigenvalues"] = r.negative_eigenvalues;
              d["image_center"] = r.image_center;
              d["image_radius"] = r.image_radius_mean;
              d["consistent"] = r.consistent;
              components.append(d);
            }
            py::dict out;
            out["components"] = components;
            out["round"] = run.verdict.round;
            out["failed_check"] = run.verdict.failed_check;
            out["radii"] = run.verdict.radii;
            out["csv"] = singular_set_csv(run.traces, p.link(), p.g());
            out["svg"] = image_svg(svg_curves(run.traces));
            return out;
          },
          py::arg("samples") = 200, py::arg("seed") = 42)
      .def(
          "slice_morse",
          [](const Problem& p, double theta, int samples, std::uint64_t seed) {
            const SliceSpec slice{theta};
            py::list out;
            for (const PointC& z : slice_critical_points(slice, traces_for(p, samples, seed), p.link(), p.g()))
              out.append(critical_dict(slice_morse_index(z, slice, p.link(), p.g())));
            return out;
          },
          py::arg("theta") = 0.0, py::arg("samples") = 200, py::arg("seed") = 42)
      .def(
          "composed_morse",
          [](const Problem& p, double eta_angle, int samples, std::uint64_t seed) {
            py::list out;
            const Point2 eta(std::cos(eta_angle), std::sin(eta_angle));
            for (const auto& r : composed_morse(eta, traces_for(p, samples, seed), p.link(), p.g()))
              out.append(critical_dict(r));
            return out;
          },
          py::arg("eta_angle") = 0.0, py::arg("samples") = 200, py::arg("seed") = 42)
      .def(
          "equivariance_error",
          [](const Problem& p, int samples, std::uint64_t seed) {
            return equivariance_error(p.link(), p.g(), samples, seed);
          },
          py::arg("samples") = 1000, py::arg("seed") = 42)
      .def(
          "trace_image_n1",
          [](const Problem& p, int samples, std::uint64_t seed) {
            const LinkImage image = trace_image_n1(p.link(), p.g(), samples, seed);
            py::list comps;
            for (const auto& c : image.components) {
              py::dict d;
              d["points"] = stack_points(c.points, p.link().ambient_dim());
              d["image"] = stack_image(c.image);
              d["closed"] = c.closed;
              d["image_center"] = c.image_center;
              d["image_radius"] = c.image_radius_mean;
              comps.append(d);
            }
            return comps;
          },
          py::arg("samples") = 50, py::arg("seed") = 42);

  m.def(
      "verify_a1",
      [](int n, const std::string& out_dir, std::uint64_t seed) {
        VerifyResult r;
        {
          py::gil_scoped_release release;
          r = run_verify_a1(n, out_dir, seed);
        }
        return py::make_tuple(r.exit_code, r.report_json);
      },
      py::arg("n"), py::arg("out_dir") = "", py::arg("seed") = 42,
      "Run the A1 pipeline; returns (exit_code, report_json_text).");
}
