#include "msdg/harness.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "doctest.h"

using namespace msdg;

namespace {

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    path = std::filesystem::temp_directory_path() /
           ("msdg_harness_" + std::to_string(std::random_device{}()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
};

ExperimentRecord synthetic(int n, double err) {
  ExperimentRecord r;
  r.space = SpaceKind::parse("E1");
  r.eps = 0.005;
  r.n = n;
  r.h = 1.0 / n;
  r.l2_error_u = err;
  r.l2_error_q = err;
  r.condition = {1.0, CondMethod::onenorm_estimate, 4 * n, false};
  return r;
}

}  // namespace

TEST_CASE("run_case on the constant case reaches round-off accuracy") {
  CasePoint point;
  point.space = SpaceKind::parse("E1");
  point.eps = 0.005;
  point.n = 10;
  point.f = CoefficientField::const10();
  point.cond = CondPolicy::onenorm;
  const ExperimentRecord rec = run_case(point, nullptr);
  CHECK(rec.l2_error_u <= 1e-8);  // reported value is ~4e-12
  CHECK(rec.l2_error_q >= 0.0);
  CHECK(!rec.singular);
  CHECK(rec.h == doctest::Approx(0.1));
  CHECK(rec.condition.value >= 1.0);
}

TEST_CASE("E1 and T1 produce identical records") {
  CasePoint point;
  point.eps = 0.005;
  point.n = 20;
  point.alpha = 0.5;
  point.beta = 0.5;
  point.f = CoefficientField::const10();
  point.cond = CondPolicy::onenorm;
  point.space = SpaceKind::parse("E1");
  const ExperimentRecord e1 = run_case(point, nullptr);
  point.space = SpaceKind::parse("T1");
  const ExperimentRecord t1 = run_case(point, nullptr);
  CHECK(std::abs(e1.l2_error_u - t1.l2_error_u) <= 1e-14);
  CHECK(std::abs(e1.l2_error_q - t1.l2_error_q) <= 1e-12);
  CHECK(e1.condition.value == doctest::Approx(t1.condition.value));
}

TEST_CASE("variable-coefficient cases require a reference") {
  CasePoint point;
  point.space = SpaceKind::parse("E1");
  point.f = CoefficientField::sin_plus_2();
  CHECK_THROWS_AS(run_case(point, nullptr), std::invalid_argument);
}

TEST_CASE("convergence rate arithmetic") {
  SUBCASE("second order pair") {
    const auto rates =
        convergence_rates({synthetic(10, 1e-2), synthetic(20, 2.5e-3)});
    REQUIRE(rates.size() == 1);
    CHECK(rates[0].rate == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(rates[0].reliable);
    CHECK(rates[0].n_coarse == 10);
    CHECK(rates[0].n_fine == 20);
  }
  SUBCASE("sixth order pair") {
    const auto rates =
        convergence_rates({synthetic(100, 1e-3), synthetic(200, 1.5625e-5)});
    REQUIRE(rates.size() == 1);
    CHECK(rates[0].rate == doctest::Approx(6.0).epsilon(1e-12));
  }
  SUBCASE("round-off floor flags the pair unreliable") {
    const auto rates = convergence_rates(
        {synthetic(10, 4.00e-12), synthetic(20, 3.95e-12),
         synthetic(40, 4.53e-12)});
    REQUIRE(rates.size() == 2);
    for (const RatePoint& rp : rates) CHECK(!rp.reliable);
  }
  SUBCASE("fewer than two records yields no rates") {
    CHECK(convergence_rates({synthetic(10, 1e-2)}).empty());
    CHECK(convergence_rates({}).empty());
  }
}

TEST_CASE("resonance detection on synthetic scans") {
  SUBCASE("single spike") {
    std::vector<ExperimentRecord> records;
    for (int n = 5; n <= 60; ++n)
      records.push_back(synthetic(n, n == 30 ? 1e-1 : 1e-3));
    const auto peaks = resonance_report(records);
    REQUIRE(peaks.size() == 1);
    CHECK(peaks[0] == 30);
  }
  SUBCASE("adjacent spikes merge and report the peak") {
    std::vector<ExperimentRecord> records;
    for (int n = 5; n <= 60; ++n) {
      double e = 1e-3;
      if (n == 29) e = 5e-2;
      if (n == 30) e = 2e-1;
      if (n == 31) e = 8e-2;
      records.push_back(synthetic(n, e));
    }
    const auto peaks = resonance_report(records);
    REQUIRE(peaks.size() == 1);
    CHECK(peaks[0] == 30);
  }
  SUBCASE("well separated spikes stay separate") {
    std::vector<ExperimentRecord> records;
    for (int n = 5; n <= 100; ++n) {
      double e = 1e-3;
      if (n == 40 || n == 70) e = 1e-1;
      records.push_back(synthetic(n, e));
    }
    const auto peaks = resonance_report(records);
    REQUIRE(peaks.size() == 2);
    CHECK(peaks[0] == 40);
    CHECK(peaks[1] == 70);
  }
  SUBCASE("monotone second-order decay has no spikes") {
    std::vector<ExperimentRecord> records;
    for (int n = 5; n <= 100; ++n) records.push_back(synthetic(n, 1.0 / (n * n)));
    CHECK(resonance_report(records).empty());
  }
  SUBCASE("non-finite errors count as spikes") {
    std::vector<ExperimentRecord> records;
    for (int n = 5; n <= 40; ++n)
      records.push_back(
          synthetic(n, n == 22 ? std::numeric_limits<double>::quiet_NaN()
                               : 1e-3));
    const auto peaks = resonance_report(records);
    REQUIRE(peaks.size() == 1);
    CHECK(peaks[0] == 22);
  }
  SUBCASE("too few records yields nothing") {
    CHECK(resonance_report({synthetic(5, 1), synthetic(6, 1),
                            synthetic(7, 1), synthetic(8, 100)})
              .empty());
  }
}

TEST_CASE("csv writing and parsing") {
  std::vector<ExperimentRecord> records{synthetic(10, 1e-3),
                                        synthetic(20, 2.5e-4)};
  records[1].singular = true;
  records[1].condition.value = std::numeric_limits<double>::infinity();
  records[1].condition.singular = true;
  records[0].wall_time = 1.5;

  SUBCASE("one record gives header plus one row") {
    std::ostringstream out;
    write_csv({records[0]}, out);
    std::istringstream in(out.str());
    std::string line;
    int lines = 0;
    while (std::getline(in, line)) ++lines;
    CHECK(lines == 2);
    CHECK(out.str().rfind("space,eps,alpha,beta,gamma,N,h,l2_error_u,"
                          "l2_error_q,cond,cond_method,singular,wall_time",
                          0) == 0);
  }

  SUBCASE("round trip through parse reproduces the canonical form") {
    std::ostringstream out;
    write_csv(records, out);
    std::istringstream in(out.str());
    const auto back = read_csv(in);
    REQUIRE(back.size() == records.size());
    CHECK(back[0].n == 10);
    CHECK(back[0].l2_error_u == doctest::Approx(1e-3));
    CHECK(back[1].singular);
    CHECK(std::isinf(back[1].condition.value));
    std::ostringstream again;
    write_csv(back, again);
    CHECK(again.str() == out.str());
  }

  SUBCASE("wall time is zeroed unless requested") {
    std::ostringstream quiet, timed;
    write_csv(records, quiet, false);
    write_csv(records, timed, true);
    CHECK(quiet.str().find("1.500000e+00") == std::string::npos);
    CHECK(timed.str().find("1.500000e+00") != std::string::npos);
  }

  SUBCASE("foreign headers are rejected") {
    std::istringstream in("space,eps\nE1,0.005\n");
    CHECK_THROWS(read_csv(in));
  }
}

TEST_CASE("n list parsing") {
  CHECK(parse_n_list("5") == std::vector<int>{5});
  CHECK(parse_n_list("5:8") == std::vector<int>{5, 6, 7, 8});
  CHECK(parse_n_list("10:30:10,45") == std::vector<int>{10, 20, 30, 45});
  CHECK(parse_n_list("") == std::vector<int>{});
  CHECK_THROWS(parse_n_list("8:5"));
  CHECK_THROWS(parse_n_list("5:10:0"));
}

TEST_CASE("sweeps run the full cartesian grid deterministically") {
  TempDir tmp;
  SweepSpec spec;
  spec.f_case = "const10";
  spec.spaces = {SpaceKind::parse("E1"), SpaceKind::parse("E2")};
  spec.eps_list = {0.05};
  spec.penalties = {{0.0, 0.0}, {1.0, 1.0}};
  spec.n_list = {4, 8, 12};
  spec.cond = CondPolicy::onenorm;
  spec.ref_cache_dir = tmp.path;

  const auto records = run_sweep(spec);
  REQUIRE(records.size() == 2 * 1 * 2 * 3);
  // spec order: spaces, then penalties, then N
  CHECK(records[0].space.label() == "E1");
  CHECK(records[0].alpha == 0.0);
  CHECK(records[0].n == 4);
  CHECK(records[5].space.label() == "E1");
  CHECK(records[5].alpha == 1.0);
  CHECK(records[5].n == 12);
  CHECK(records[6].space.label() == "E2");

  std::ostringstream csv1, csv2;
  write_csv(records, csv1);
  write_csv(run_sweep(spec), csv2);
  CHECK(csv1.str() == csv2.str());

  SUBCASE("empty n list gives no records") {
    spec.n_list.clear();
    CHECK(run_sweep(spec).empty());
  }
}

TEST_CASE("plot data emission writes one pair of files per curve") {
  TempDir tmp;
  std::vector<ExperimentRecord> records;
  for (int n : {10, 20, 40}) records.push_back(synthetic(n, 1.0 / (n * n)));
  ExperimentRecord other = synthetic(10, 1e-2);
  other.alpha = 1.0;
  other.beta = 1.0;
  records.push_back(other);

  const std::string prefix = (tmp.path / "curves_").string();
  emit_plot_data(records, prefix);
  CHECK(std::filesystem::exists(prefix + "E1_eps0.005_a0_b0_err.txt"));
  CHECK(std::filesystem::exists(prefix + "E1_eps0.005_a0_b0_cond.txt"));
  CHECK(std::filesystem::exists(prefix + "E1_eps0.005_a1_b1_err.txt"));

  std::ifstream in(prefix + "E1_eps0.005_a0_b0_err.txt");
  double log_n, log_e;
  REQUIRE((in >> log_n >> log_e));
  CHECK(log_n == doctest::Approx(1.0));       // log10(10)
  CHECK(log_e == doctest::Approx(-2.0));      // log10(1e-2)
}

TEST_CASE("reference store caches to disk and reuses the file") {
  TempDir tmp;
  const CoefficientField f = CoefficientField::sin_plus_2();
  ReferenceStore store(tmp.path);
  // desk-scale eps keeps the fine mesh small: 250/eps = 1250 elements
  const auto ref1 = store.get(f, 0.2, 0.0, 1.0);
  CHECK(ref1->meta.n_ref == 1250);
  const std::filesystem::path file = store.cache_path("sinp2", 0.2, 1250);
  CHECK(std::filesystem::exists(file));
  const auto tstamp = std::filesystem::last_write_time(file);

  ReferenceStore fresh(tmp.path);
  const auto ref2 = fresh.get(f, 0.2, 0.0, 1.0);
  CHECK(std::filesystem::last_write_time(file) == tstamp);  // no regeneration
  CHECK(ref2->fine.coeffs() == ref1->fine.coeffs());
}

TEST_CASE("reference regeneration with extra nodes moves errors below 1%") {
  // desk-scale analog of the fine-mesh regeneration check
  const CoefficientField f = CoefficientField::sin_plus_2();
  const double eps = 0.05;
  const auto n_ref = default_reference_elements(f, eps, 0.0, 1.0);
  const ReferenceSolution ref_a = generate_reference(f, eps, n_ref, 0, 1);
  const ReferenceSolution ref_b = generate_reference(f, eps, n_ref, 0, 1, 0.5, 4);

  for (int n : {5, 9, 16, 32}) {
    CasePoint point;
    point.space = SpaceKind::parse("E2");
    point.eps = eps;
    point.alpha = 1.0;
    point.beta = 1.0;
    point.n = n;
    point.f = f;
    point.cond = CondPolicy::onenorm;
    const double e_a = run_case(point, &ref_a).l2_error_u;
    const double e_b = run_case(point, &ref_b).l2_error_u;
    CHECK(std::abs(e_a - e_b) <= 0.01 * e_a);
  }
}
