#include "linkfold/fold_classify.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

namespace linkfold {

namespace {

Point2 h_at(const PolyFunction& g, const PointC& z) {
  const Complex v = g.value(z);
  return {v.real(), v.imag()};
}

double cross(const Point2& a, const Point2& b) { return a.x() * b.y() - a.y() * b.x(); }

bool segments_cross(const Point2& a, const Point2& b, const Point2& c, const Point2& d) {
  const double d1 = cross(b - a, c - a);
  const double d2 = cross(b - a, d - a);
  const double d3 = cross(d - c, a - c);
  const double d4 = cross(d - c, b - c);
  return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0)) && d1 != 0 && d2 != 0 && d3 != 0 &&
         d4 != 0;
}

bool is_simple(const std::vector<Point2>& poly) {
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 2; j < n; ++j) {
      if (i == 0 && j == n - 1) continue;
      if (segments_cross(poly[i], poly[(i + 1) % n], poly[j], poly[(j + 1) % n])) return false;
    }
  }
  return true;
}

int winding_number(const std::vector<Point2>& poly, const Point2& center) {
  double total = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Point2 a = poly[i] - center;
    const Point2 b = poly[(i + 1) % poly.size()] - center;
    total += std::atan2(cross(a, b), a.dot(b));
  }
  return static_cast<int>(std::lround(total / (2 * std::numbers::pi)));
}

}  // namespace

const char* to_string(FoldKind kind) {
  switch (kind) {
    case FoldKind::Definite: return "DEFINITE";
    case FoldKind::Indefinite: return "INDEFINITE";
    case FoldKind::Degenerate: return "DEGENERATE";
  }
  return "?";
}

LocalFoldData local_fold_data(const PointC& p, const LinkSpec& link, const PolyFunction& g,
                              const FoldOptions& options, const Point2& center) {
  LocalFoldData data;
  data.frame = tangent_frame(p, link);
  const int dim = data.frame.dim();
  const ManifoldConstraints constraints(link);
  const double step = options.jacobian_step * link.epsilon();

  auto central = [&](int k, double h) -> Point2 {
    RealVector u = RealVector::Zero(dim);
    u[k] = h;
    return (h_at(g, chart(data.frame, u, constraints)) - h_at(g, chart(data.frame, -u, constraints))) /
           (2 * h);
  };
  RealMatrix jac(2, dim);
  for (int k = 0; k < dim; ++k) {
    jac.col(k) = (4.0 * central(k, 0.5 * step) - central(k, step)) / 3.0;
  }

  Eigen::JacobiSVD<RealMatrix> svd(jac, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const RealVector& s = svd.singularValues();
  data.sigma1 = s[0];
  data.sigma2 = s[1];
  if (s[0] <= options.rank_zero) {
    data.rank = 0;
    throw Error(ErrorKind::RankZero, "dh vanishes (sigma_1 = " + std::to_string(s[0]) + ")");
  }
  if (s[1] / s[0] > options.rank_ratio) {
    data.rank = 2;
    throw Error(ErrorKind::RankTwo, "dh has rank 2 (sigma_2/sigma_1 = " + std::to_string(s[1] / s[0]) + ")");
  }
  data.rank = 1;
  data.kernel = svd.matrixV().rightCols(dim - 1);

  const Point2 dir = svd.matrixU().col(0);
  Point2 normal(dir.y(), -dir.x());
  const Point2 outward = h_at(g, p) - center;
  if (outward.norm() > 1e-12) {
    if (normal.dot(outward) < 0) normal = -normal;
  } else if (normal.x() < 0 || (normal.x() == 0 && normal.y() < 0)) {
    normal = -normal;
  }
  data.normal = normal;
  data.image_dir = Point2(-normal.y(), normal.x());
  return data;
}

RealMatrix finite_difference_hessian(const std::function<double(const RealVector&)>& fn, int dim,
                                     double step) {
  const double center = fn(RealVector::Zero(dim));
  const double h = step;
  RealMatrix hess(dim, dim);
  for (int i = 0; i < dim; ++i) {
    const RealVector ei = RealVector::Unit(dim, i) * h;
    hess(i, i) = (fn(ei) - 2 * center + fn(-ei)) / (h * h);
    for (int j = i + 1; j < dim; ++j) {
      const RealVector ej = RealVector::Unit(dim, j) * h;
      hess(i, j) = (fn(ei + ej) - fn(ei - ej) - fn(-ei + ej) + fn(-ei - ej)) / (4 * h * h);
      hess(j, i) = hess(i, j);
    }
  }
  return 0.5 * (hess + hess.transpose());
}

RealMatrix intrinsic_hessian(const LocalFoldData& data, const LinkSpec& link, const PolyFunction& g,
                             const FoldOptions& options) {
  const ManifoldConstraints constraints(link);
  auto phi = [&](const RealVector& s) {
    return data.normal.dot(h_at(g, chart(data.frame, data.kernel * s, constraints)));
  };
  return finite_difference_hessian(phi, static_cast<int>(data.kernel.cols()),
                                   options.hessian_step * link.epsilon());
}

FoldPoint classify_eigenvalues(const RealVector& eigenvalues, double dead_band) {
  FoldPoint out;
  out.eigenvalues = eigenvalues;
  const double scale = eigenvalues.size() > 0 ? eigenvalues.cwiseAbs().maxCoeff() : 0.0;
  const double band = dead_band * scale;
  int negative = 0;
  for (double e : eigenvalues) {
    if (std::abs(e) <= band) {
      out.kind = FoldKind::Degenerate;
      out.negative_eigenvalues = negative;
      return out;
    }
    if (e < 0) ++negative;
  }
  if (scale == 0.0) return out;
  const int vars = static_cast<int>(eigenvalues.size());
  out.negative_eigenvalues = negative;
  out.absolute_index = std::min(negative, vars - negative);
  out.kind = *out.absolute_index == 0 ? FoldKind::Definite : FoldKind::Indefinite;
  return out;
}

FoldPoint classify_fold(const PointC& p, const LinkSpec& link, const PolyFunction& g,
                        const FoldOptions& options, const Point2& center) {
  const LocalFoldData data = local_fold_data(p, link, g, options, center);
  const RealMatrix hess = intrinsic_hessian(data, link, g, options);
  Eigen::SelfAdjointEigenSolver<RealMatrix> eig(hess);
  return classify_eigenvalues(eig.eigenvalues(), options.dead_band);
}

Point2 fit_circle_center(const std::vector<Point2>& points) {
  if (points.size() < 3) {
    Point2 mean = Point2::Zero();
    for (const auto& p : points) mean += p;
    return points.empty() ? mean : Point2(mean / static_cast<double>(points.size()));
  }
  // x^2 + y^2 + D x + E y + F = 0 in least squares, on centered data.
  Point2 mean = Point2::Zero();
  for (const auto& p : points) mean += p;
  mean /= static_cast<double>(points.size());
  RealMatrix a(points.size(), 3);
  RealVector b(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    const Point2 q = points[i] - mean;
    a(i, 0) = q.x();
    a(i, 1) = q.y();
    a(i, 2) = 1.0;
    b[i] = -q.squaredNorm();
  }
  const Eigen::Vector3d sol = a.colPivHouseholderQr().solve(b);
  return mean + Point2(-0.5 * sol[0], -0.5 * sol[1]);
}

double min_nonadjacent_distance(const std::vector<Point2>& image, bool closed) {
  const std::size_t n = image.size();
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 2; j < n; ++j) {
      if (closed && i == 0 && j == n - 1) continue;
      best = std::min(best, (image[i] - image[j]).norm());
    }
  }
  return best;
}

FoldRecord classify_component(const CurveTrace& trace, int component_id, const LinkSpec& link,
                              const PolyFunction& g, const FoldOptions& options, int max_points) {
  FoldRecord record;
  record.component_id = component_id;
  record.image_center = fit_circle_center(trace.image);
  double sum = 0.0;
  for (const auto& w : trace.image) sum += (w - record.image_center).norm();
  record.image_radius_mean = trace.image.empty() ? 0.0 : sum / static_cast<double>(trace.image.size());
  for (const auto& w : trace.image) {
    record.image_radius_deviation =
        std::max(record.image_radius_deviation, std::abs((w - record.image_center).norm() - record.image_radius_mean));
  }
  record.embedding_ok = trace.size() >= 3 && min_nonadjacent_distance(trace.image, trace.closed) > 1e-6;

  for (const auto& p : trace.points) {
    if (gradient_dependency(p.z, link.f(), g) <= 1e-8) {
      record.kind = FoldKind::Degenerate;
      record.consistent = false;
      return record;
    }
  }

  const std::size_t n = trace.size();
  const std::size_t count = max_points <= 0 ? n : std::min<std::size_t>(n, max_points);
  for (std::size_t s = 0; s < count; ++s) {
    const std::size_t k = s * n / count;
    FoldPoint fp;
    try {
      fp = classify_fold(trace.points[k].z, link, g, options);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::RankZero && e.kind() != ErrorKind::RankTwo) throw;
      fp.kind = FoldKind::Degenerate;
    }
    record.samples.push_back(fp);
  }
  record.classified_points = static_cast<int>(record.samples.size());
  if (record.samples.empty()) return record;

  const FoldPoint& first = record.samples.front();
  record.kind = first.kind;
  record.absolute_index = first.absolute_index;
  record.negative_eigenvalues = first.negative_eigenvalues;
  for (const auto& fp : record.samples) {
    if (fp.kind != first.kind || fp.absolute_index != first.absolute_index) record.consistent = false;
    if (fp.kind == FoldKind::Degenerate) record.kind = FoldKind::Degenerate;
  }
  if (record.kind == FoldKind::Degenerate) record.absolute_index.reset();
  return record;
}

RoundVerdict verify_round(const std::vector<CurveTrace>& traces, const std::vector<FoldRecord>& records) {
  RoundVerdict verdict;
  if (traces.size() != records.size()) {
    verdict.failed_check = "precondition: one fold record per component";
    return verdict;
  }
  for (std::size_t i = 0; i < traces.size(); ++i) {
    if (!traces[i].closed) {
      verdict.failed_check = "precondition: component " + std::to_string(i) + " is not closed";
      return verdict;
    }
    if (records[i].kind == FoldKind::Degenerate) {
      verdict.failed_check = "precondition: component " + std::to_string(i) + " is degenerate";
      return verdict;
    }
  }

  // (a) injectivity of h on each component.
  verdict.min_separation = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < traces.size(); ++i) {
    const double d = min_nonadjacent_distance(traces[i].image, true);
    verdict.min_separation = std::min(verdict.min_separation, d);
    if (!(d > 1e-6)) {
      verdict.failed_check = "(a) h is not injective on component " + std::to_string(i);
      return verdict;
    }
  }

  // (b) simple closed image curves winding once about a common center.
  Point2 center = Point2::Zero();
  for (const auto& t : traces) center += fit_circle_center(t.image);
  if (!traces.empty()) center /= static_cast<double>(traces.size());
  verdict.center = center;
  for (std::size_t i = 0; i < traces.size(); ++i) {
    if (!is_simple(traces[i].image)) {
      verdict.failed_check = "(b) image of component " + std::to_string(i) + " is not simple";
      return verdict;
    }
    const int w = winding_number(traces[i].image, center);
    verdict.winding_numbers.push_back(w);
    if (std::abs(w) != 1) {
      verdict.failed_check = "(b) image of component " + std::to_string(i) + " has winding number " +
                             std::to_string(w);
      return verdict;
    }
  }

  // (c) radially disjoint (nested) annuli.
  struct Band {
    int index;
    double lo, hi, mean;
  };
  std::vector<Band> bands;
  for (std::size_t i = 0; i < traces.size(); ++i) {
    Band b{static_cast<int>(i), std::numeric_limits<double>::infinity(), 0.0, 0.0};
    for (const auto& w : traces[i].image) {
      const double r = (w - center).norm();
      b.lo = std::min(b.lo, r);
      b.hi = std::max(b.hi, r);
      b.mean += r;
    }
    b.mean /= static_cast<double>(traces[i].image.size());
    bands.push_back(b);
  }
  std::sort(bands.begin(), bands.end(), [](const Band& a, const Band& b) { return a.mean < b.mean; });
  for (std::size_t i = 1; i < bands.size(); ++i) {
    if (!(bands[i].lo > bands[i - 1].hi)) {
      verdict.failed_check = "(c) radial ranges of components " + std::to_string(bands[i - 1].index) +
                             " and " + std::to_string(bands[i].index) + " overlap";
      return verdict;
    }
  }
  for (const auto& b : bands) {
    verdict.radii.push_back(b.mean);
    verdict.order.push_back(b.index);
  }
  verdict.round = true;
  return verdict;
}

double equivariance_error(const LinkSpec& link, const PolyFunction& g, int n_samples,
                          std::uint64_t rng_seed) {
  if (!homogeneous_degree(link.f().poly())) {
    throw Error(ErrorKind::NotApplicable, "f is not homogeneous");
  }
  if (homogeneous_degree(g.poly()) != 1) {
    throw Error(ErrorKind::NotApplicable, "g is not a linear form");
  }
  std::mt19937_64 rng(rng_seed);
  std::uniform_real_distribution<double> angle(0.0, 2 * std::numbers::pi);
  double worst = 0.0;
  for (int s = 0; s < n_samples; ++s) {
    const PointC z = random_link_point(link, rng);
    const Complex alpha = std::polar(1.0, angle(rng));
    const PointC rotated = alpha * z;
    worst = std::max(worst, std::abs(g.value(rotated) - alpha * g.value(z)));
  }
  return worst;
}

}  // namespace linkfold
