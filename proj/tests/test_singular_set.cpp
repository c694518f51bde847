#include "doctest.h"
#include "linkfold/linalg.hpp"
#include "support.hpp"

using namespace linkfold;
using namespace testing_support;

namespace {

Complex det3(const Eigen::Matrix3cd& m) {
  // Rule of Sarrus, a second path next to the cofactor expansion.
  return m(0, 0) * m(1, 1) * m(2, 2) + m(0, 1) * m(1, 2) * m(2, 0) + m(0, 2) * m(1, 0) * m(2, 1) -
         m(0, 2) * m(1, 1) * m(2, 0) - m(0, 0) * m(1, 2) * m(2, 1) - m(0, 1) * m(1, 0) * m(2, 2);
}

Eigen::Matrix3cd rows(const Eigen::MatrixXcd& m, int r0, int r1, int r2) {
  Eigen::Matrix3cd out;
  out.row(0) = m.row(r0);
  out.row(1) = m.row(r1);
  out.row(2) = m.row(r2);
  return out;
}

AugmentedPoint seed_at(const PointC& z, const A1& a1) {
  return AugmentedSystem(a1.link, a1.g).fit_coefficients(z);
}

bool in_band(double v) { return v > 1e-10 && v < 1e-6; }

}  // namespace

TEST_SUITE("singular_set") {
  TEST_CASE("criterion matrix at q and at e3") {
    A1 a1(2);
    const Eigen::MatrixXcd m = criterion_matrix(a1.q(), a1.link.f(), a1.g).columns;
    REQUIRE(m.rows() == 3);
    REQUIRE(m.cols() == 3);
    const double s2 = std::sqrt(2.0);
    CHECK(std::abs(m(0, 0) - s2) < 1e-15);
    CHECK(std::abs(m(1, 0) - kI * s2) < 1e-15);
    CHECK(m(2, 0) == 0.0);
    CHECK(m(0, 1) == 1.0);
    CHECK(m(1, 1) == -0.5 * kI);
    CHECK(m(2, 1) == 0.0);
    CHECK((m.col(2) - a1.q()).norm() == 0.0);

    PointC e3 = PointC::Zero(3);
    e3[2] = 1.0;
    const Eigen::MatrixXcd me = criterion_matrix(e3, a1.link.f(), a1.g).columns;
    CHECK(me(2, 0) == 2.0);
    CHECK(me.col(0).head(2).norm() == 0.0);
    CHECK((me.col(1) - m.col(1)).norm() == 0.0);
    CHECK((me.col(2) - e3).norm() == 0.0);
  }

  TEST_CASE("criterion determinant") {
    A1 a1(2);
    CHECK(std::abs(criterion_det(a1.q(), a1.link.f(), a1.g)) < 1e-15);
    PointC z(3);
    z << 1.0, 0.0, kI;
    CHECK(std::abs(criterion_det(z, a1.link.f(), a1.g) - 2.0) < 1e-15);
    z << 0.0, kR, kI * kR;
    CHECK(std::abs(criterion_det(z, a1.link.f(), a1.g)) > 0.1);

    std::mt19937_64 rng(21);
    for (int t = 0; t < 100; ++t) {
      const PointC w = random_point(3, rng);
      const Eigen::Matrix3cd m = criterion_matrix(w, a1.link.f(), a1.g).columns;
      CHECK(std::abs(criterion_det(w, a1.link.f(), a1.g) - det3(m)) <= 1e-12 * std::max(1.0, std::abs(det3(m))));
    }

    A1 a3(3);
    try {
      criterion_det(a3.q(), a3.link.f(), a3.g);
      FAIL("expected WrongDimension");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::WrongDimension);
    }
  }

  TEST_CASE("rank defect and the direct test on known points") {
    A1 a1(2);
    CHECK(criterion_rank_defect(a1.q(), a1.link.f(), a1.g) <= 1e-12);
    CHECK(criterion_rank_defect(a1.q_prime(), a1.link.f(), a1.g) <= 1e-12);
    CHECK(direct_singularity_test(a1.q(), a1.link, a1.g) <= 1e-10);
    CHECK(direct_singularity_test(a1.q_prime(), a1.link, a1.g) <= 1e-10);
    PointC z(3);
    z << 0.0, kR, kI * kR;
    CHECK(criterion_rank_defect(z, a1.link.f(), a1.g) >= 1e-2);
    CHECK(direct_singularity_test(z, a1.link, a1.g) >= 1e-2);
  }

  TEST_CASE("rank defect is invariant under the circle action") {
    A1 a1(3);
    std::mt19937_64 rng(22);
    std::uniform_real_distribution<double> angle(0, 2 * std::numbers::pi);
    for (int t = 0; t < 200; ++t) {
      const PointC z = random_link_point(a1.link, rng);
      const double d = criterion_rank_defect(z, a1.link.f(), a1.g);
      const double da = criterion_rank_defect(std::polar(1.0, angle(rng)) * z, a1.link.f(), a1.g);
      CHECK(std::abs(d - da) <= 1e-10);
    }
  }

  TEST_CASE("minor identities of the criterion matrix") {
    A1 a1(4);
    std::mt19937_64 rng(23);
    double worst = 0.0;
    for (int t = 0; t < 1000; ++t) {
      const PointC z = random_point(5, rng);
      const Eigen::MatrixXcd m = criterion_matrix(z, a1.link.f(), a1.g).columns;
      const double scale = std::max(1.0, z.squaredNorm());
      for (int j = 2; j < 5; ++j) {
        const Complex expected =
            4.0 * kI * (z[1] * std::conj(z[j])).imag() - 2.0 * (z[0] * std::conj(z[j])).imag();
        worst = std::max(worst, std::abs(det3(rows(m, 0, 1, j)) - expected) / scale);
      }
      for (int j = 3; j < 5; ++j) {
        const Complex expected = 4.0 * kI * (z[2] * std::conj(z[j])).imag();
        worst = std::max(worst, std::abs(det3(rows(m, 0, 2, j)) - expected) / scale);
      }
    }
    CHECK(worst <= 1e-10);
  }

  TEST_CASE("the determinant and the rank defect agree for n = 2") {
    A1 a1(2);
    std::mt19937_64 rng(24);
    int compared = 0;
    std::vector<PointC> pts;
    for (int t = 0; t < 2000; ++t) pts.push_back(random_link_point(a1.link, rng));
    pts.push_back(a1.q());
    pts.push_back(a1.q_prime());
    for (const auto& z : pts) {
      const double d = criterion_rank_defect(z, a1.link.f(), a1.g);
      const double det = std::abs(criterion_det(z, a1.link.f(), a1.g));
      if (in_band(d) || in_band(det)) continue;
      ++compared;
      CHECK((det <= 1e-10) == (d <= 1e-8));
    }
    CHECK(compared > 1900);
  }

  TEST_CASE("oracle agreement on random link points, A1 and a perturbed g") {
    A1 a1(2);
    const OracleAgreement a = oracle_agreement(a1.link, a1.g, 10000, {a1.q(), a1.q_prime()}, 25);
    CHECK(a.disagreements == 0);
    CHECK(a.singular >= 2);
    CHECK(a.samples == 10002);

    const PolyFunction g2(parse_poly("z1 + 0.5i*z2 + 0.1*z3", 3));
    const OracleAgreement b = oracle_agreement(a1.link, g2, 10000, {}, 26);
    CHECK(b.disagreements == 0);
  }

  TEST_CASE("augmented system at q") {
    A1 a1(2);
    const AugmentedSystem sys(a1.link, a1.g);
    const AugmentedPoint p = sys.fit_coefficients(a1.q());
    CHECK(std::abs(p.a - (-1.0 / 6.0)) <= 1e-14);
    CHECK(std::abs(p.b - 2.0 * std::sqrt(2.0) / 3.0) <= 1e-14);
    const RealVector x = sys.state(p);
    CHECK(x.size() == sys.unknowns());
    CHECK(sys.residual(x).size() == sys.equations());
    CHECK(sys.residual(x).norm() <= 1e-14);
    const AugmentedPoint back = sys.point(x);
    CHECK((back.z - p.z).norm() == 0.0);
    CHECK(back.a == p.a);
    CHECK(back.b == p.b);
  }

  TEST_CASE("augmented Jacobian matches central differences") {
    const PolyFunction g(parse_poly("z1 + 0.5i*z2 + 0.1*z3 + 0.2*z1*z3", 3));
    A1 a1(2);
    const AugmentedSystem sys(a1.link, g);
    std::mt19937_64 rng(27);
    RealVector x(sys.unknowns());
    std::uniform_real_distribution<double> u(-1, 1);
    for (int k = 0; k < x.size(); ++k) x[k] = u(rng);
    const RealMatrix jac = sys.jacobian(x);
    const double h = 1e-6;
    for (int k = 0; k < x.size(); ++k) {
      const RealVector e = RealVector::Unit(x.size(), k) * h;
      const RealVector fd = (sys.residual(x + e) - sys.residual(x - e)) / (2 * h);
      CHECK((fd - jac.col(k)).norm() <= 1e-8);
    }
  }

  TEST_CASE("seeding the A1 example") {
    A1 a1(2);
    const auto seeds = seed_singular_points(a1.link, a1.g, 200, 42);
    REQUIRE_FALSE(seeds.empty());
    bool plus = false, minus = false;
    for (const auto& s : seeds) {
      CHECK(std::abs(s.z[2]) <= 1e-8);
      const double dp = std::abs(s.z[0] - kI * s.z[1]);
      const double dm = std::abs(s.z[0] + kI * s.z[1]);
      CHECK(std::min(dp, dm) <= 1e-8);
      plus = plus || dp <= 1e-8;
      minus = minus || dm <= 1e-8;
    }
    CHECK(plus);
    CHECK(minus);

    const auto again = seed_singular_points(a1.link, a1.g, 200, 42);
    REQUIRE(again.size() == seeds.size());
    for (std::size_t i = 0; i < seeds.size(); ++i) {
      CHECK((again[i].z - seeds[i].z).norm() == 0.0);
      CHECK(again[i].a == seeds[i].a);
    }
  }

  TEST_CASE("seeding needs n >= 2") {
    A1 a1(1);
    try {
      seed_singular_points(a1.link, a1.g, 10, 1);
      FAIL("expected WrongDimension");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::WrongDimension);
    }
  }

  TEST_CASE("trace from q closes on the exact circle") {
    A1 a1(2);
    const CurveTrace t = trace_singular_curve(seed_at(a1.q(), a1), a1.link, a1.g);
    CHECK(t.closed);
    CHECK(std::abs(t.arc_length - 2 * std::numbers::pi) <= 1e-3);
    const double r = 3.0 * std::sqrt(2.0) / 4.0;
    for (std::size_t k = 0; k < t.size(); ++k) {
      CHECK(std::abs(t.points[k].z[0] - kI * t.points[k].z[1]) <= 1e-8);
      CHECK(std::abs(t.image[k].norm() - r) <= 1e-8);
      CHECK(direct_singularity_test(t.points[k].z, a1.link, a1.g) <= 1e-8);
    }
    // Consecutive points stay within the step bound.
    for (std::size_t k = 1; k < t.size(); ++k) {
      CHECK((t.points[k].z - t.points[k - 1].z).norm() <= 0.1 + 1e-12);
    }
    CHECK(t.arc_params.size() == t.size());
    CHECK(t.tangents.size() == t.size());
  }

  TEST_CASE("trace from q' has image radius sqrt(2)/4") {
    A1 a1(3);
    const CurveTrace t = trace_singular_curve(seed_at(a1.q_prime(), a1), a1.link, a1.g);
    CHECK(t.closed);
    for (const auto& w : t.image) CHECK(std::abs(w.norm() - std::sqrt(2.0) / 4.0) <= 1e-8);
  }

  TEST_CASE("tracing scales with epsilon") {
    const LinkSpec link(parse_poly("z1^2 + z2^2 + z3^2", 3), 2, 0.25);
    const PolyFunction g(parse_poly("z1 + 0.5i*z2", 3));
    const auto traces = collect_components(seed_singular_points(link, g, 100, 3), link, g);
    REQUIRE(traces.size() == 2);
    for (const auto& t : traces) {
      CHECK(t.closed);
      CHECK(std::abs(t.arc_length - 2 * std::numbers::pi * 0.25) <= 1e-3 * 0.25);
    }
  }

  TEST_CASE("collect_components finds two closed loops for n = 2, 3, 4") {
    for (int n = 2; n <= 4; ++n) {
      A1 a1(n);
      const auto seeds = seed_singular_points(a1.link, a1.g, 200, 42);
      const auto traces = collect_components(seeds, a1.link, a1.g);
      REQUIRE(traces.size() == 2);
      for (const auto& t : traces) CHECK(t.closed);

      auto doubled = seeds;
      doubled.insert(doubled.end(), seeds.begin(), seeds.end());
      const auto again = collect_components(doubled, a1.link, a1.g);
      REQUIRE(again.size() == traces.size());
      for (std::size_t i = 0; i < traces.size(); ++i) {
        CHECK(hausdorff_distance(traces[i], again[i], a1.link, a1.g) <= 1e-8);
      }
    }
    A1 a1(2);
    CHECK(collect_components({}, a1.link, a1.g).empty());
  }

  TEST_CASE("distance_to_trace is small on the curve and large off it") {
    A1 a1(2);
    const CurveTrace t = trace_singular_curve(seed_at(a1.q(), a1), a1.link, a1.g);
    const PointC on = std::polar(1.0, 0.123) * a1.q();
    CHECK(distance_to_trace(on, t, a1.link, a1.g) <= 1e-10);
    CHECK(distance_to_trace(a1.q_prime(), t, a1.link, a1.g) >= 0.5);
  }

  TEST_CASE("gradient dependency locus") {
    A1 a1(2);
    const DependencyScan none = gradient_dependency_scan(a1.link, a1.g, 50, 28);
    CHECK(none.solutions.empty());
    CHECK(none.min_dependency > 1e-3);
    CHECK(none.samples == 50);

    // g = z1^2 + z2^2 has conj-grad (z1, z2, 0)-bar, dependent on grad f
    // exactly on {z3 = 0} ∩ K.
    const PolyFunction bad(parse_poly("z1^2 + z2^2", 3));
    const DependencyScan some = gradient_dependency_scan(a1.link, bad, 50, 28);
    REQUIRE_FALSE(some.solutions.empty());
    for (const auto& z : some.solutions) {
      CHECK(std::abs(z[2]) <= 1e-8);
      CHECK(gradient_dependency(z, a1.link.f(), bad) <= 1e-8);
    }
  }

  TEST_CASE("random link points lie on the link and are reproducible") {
    A1 a1(3);
    std::mt19937_64 r1(29), r2(29);
    for (int t = 0; t < 50; ++t) {
      const PointC a = random_link_point(a1.link, r1);
      const PointC b = random_link_point(a1.link, r2);
      CHECK(link_residual(a, a1.link).norm() <= 1e-12);
      CHECK((a - b).norm() == 0.0);
    }
  }
}
