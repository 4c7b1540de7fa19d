#include "doctest.h"
#include "omsim/sweep.hpp"

#include <fstream>
#include <sstream>

#include "omsim/emit.hpp"

using namespace omsim;

TEST_CASE("config parsing") {
  SUBCASE("defaults are the paper parameters") {
    const Config cfg;
    CHECK(cfg.system.omega_m == doctest::Approx(2e6 * constants::pi));
    CHECK(cfg.system.kappa == 1.34e6);
    CHECK(cfg.modulation.omega1 == doctest::Approx(4e6 * constants::pi));
  }
  SUBCASE("hz fields convert, rad_s fields do not") {
    const Config cfg = parse_config_text(R"({
      "system": {"omega_m_hz": 2e6, "kappa_rad_s": 5e5},
      "modulation": {"epsilon": 0.1, "omega1_over_omega_m": 2.0}
    })");
    CHECK(cfg.system.omega_m == doctest::Approx(4e6 * constants::pi));
    CHECK(cfg.system.kappa == 5e5);
    CHECK(cfg.modulation.epsilon == 0.1);
    CHECK(cfg.modulation.omega1 == doctest::Approx(8e6 * constants::pi));
    // Detuning follows omega_m when not given.
    CHECK(cfg.system.detuning == doctest::Approx(cfg.system.omega_m));
  }
  SUBCASE("unknown keys rejected") {
    CHECK_THROWS_AS(parse_config_text(R"({"sistem": {}})"), InvalidParameterError);
    CHECK_THROWS_AS(parse_config_text(R"({"system": {"mass": 1.0}})"),
                    InvalidParameterError);
    CHECK_THROWS_AS(parse_config_text(R"({"run": {"nsamples": 8}})"),
                    InvalidParameterError);
  }
  SUBCASE("conflicting unit spellings rejected") {
    CHECK_THROWS_AS(
        parse_config_text(R"({"system": {"kappa_hz": 1.0, "kappa_rad_s": 6.0}})"),
        InvalidParameterError);
  }
  SUBCASE("bad values rejected") {
    CHECK_THROWS_AS(parse_config_text(R"({"modulation": {"epsilon": 1.5}})"),
                    InvalidParameterError);
    CHECK_THROWS_AS(parse_config_text(R"({"run": {"format": "png"}})"),
                    InvalidParameterError);
    CHECK_THROWS_AS(parse_config_text("not json"), InvalidParameterError);
  }
  SUBCASE("metadata echo mentions the kappa reading") {
    const Config cfg;
    const std::string meta = config_metadata(cfg);
    CHECK(meta.find("1.34e6 rad/s") != std::string::npos);
    CHECK(meta.find("vacuum_variance") != std::string::npos);
  }
}

TEST_CASE("axis application") {
  Config cfg;
  apply_axis(cfg, "omega_over_omega_m", 2.5);
  CHECK(cfg.modulation.omega1 == doctest::Approx(2.5 * cfg.system.omega_m));
  CHECK(cfg.modulation.omega2 == doctest::Approx(2.5 * cfg.system.omega_m));
  apply_axis(cfg, "epsilon", 0.25);
  CHECK(cfg.modulation.epsilon == 0.25);
  apply_axis(cfg, "phi_over_pi", 1.5);
  CHECK(cfg.modulation.phi == doctest::Approx(1.5 * constants::pi));
  CHECK_THROWS_AS(apply_axis(cfg, "bogus", 1.0), InvalidParameterError);
}

TEST_CASE("grid construction and validation") {
  RunSettings run;
  run.omega_points = 5;
  run.eps_points = 3;
  const SweepGrid g = SweepGrid::two_d(run);
  CHECK(g.cell_count() == 15);
  CHECK(g.axis1.values.front() == 1.0);
  CHECK(g.axis1.values.back() == 3.0);

  SweepGrid bad;
  bad.axis1 = {"epsilon", {0.2, 0.1}};
  CHECK_THROWS_AS(bad.validate(), InvalidParameterError);
}

TEST_CASE("run_cell: unmodulated baseline") {
  Config cfg;
  cfg.run.n_samples = 32;
  const SweepCell cell = run_cell(cfg);
  REQUIRE(cell.status == CellStatus::ok);
  REQUIRE(cell.metrics.has_value());
  CHECK(cell.metrics->n_max == doctest::Approx(0.0420566).epsilon(1e-4));
  CHECK(cell.metrics->qvar_min == doctest::Approx(0.5264349).epsilon(1e-4));
  CHECK(cell.metrics->en_max == doctest::Approx(0.1321102).epsilon(1e-4));
  CHECK(cell.rh_margin > 0.0);
}

TEST_CASE("run_cell: squeezing at eps = 0.2, Omega = 2 omega_m") {
  Config cfg;
  cfg.run.n_samples = 128;
  cfg.modulation.epsilon = 0.2;
  const SweepCell cell = run_cell(cfg);
  REQUIRE(cell.status == CellStatus::ok);
  CHECK(cell.metrics->qvar_min < 0.5);
  CHECK(cell.settle_time > 0.0);
}

TEST_CASE("run_cell: strong modulation near 2 omega_m is blanked") {
  Config cfg;
  cfg.run.n_samples = 32;
  cfg.modulation.epsilon = 0.5;
  const SweepCell cell = run_cell(cfg);
  CHECK(cell.status != CellStatus::ok);
  CHECK(!cell.metrics.has_value());
  CHECK(!cell.sub_reason.empty());
}

TEST_CASE("sweep determinism across worker counts") {
  Config cfg;
  cfg.run.n_samples = 24;
  SweepGrid grid;
  grid.axis1 = {"omega_over_omega_m", {1.7, 2.0, 2.3}};
  grid.axis2 = AxisSpec{"epsilon", {0.0, 0.15}};

  auto csv_for = [&](int workers) {
    const auto cells = run_sweep(cfg, grid, workers);
    std::ostringstream os;
    emit_csv(cells, grid, os);
    return os.str();
  };
  const std::string w1 = csv_for(1);
  const std::string w2 = csv_for(2);
  const std::string w4 = csv_for(4);
  CHECK(w1 == w2);
  CHECK(w1 == w4);

  // Row-major order with axis1 outermost.
  std::istringstream is(w1);
  std::string header, row;
  std::getline(is, header);
  CHECK(header.rfind("omega_over_omega_m,epsilon,status", 0) == 0);
  std::getline(is, row);
  CHECK(row.rfind("1.7,0,ok", 0) == 0);
  std::getline(is, row);
  CHECK(row.rfind("1.7,0.15,ok", 0) == 0);
}

TEST_CASE("1x1 grid equals run_cell") {
  Config cfg;
  cfg.run.n_samples = 24;
  SweepGrid grid;
  grid.axis1 = {"epsilon", {0.1}};
  const auto cells = run_sweep(cfg, grid, 2);
  REQUIRE(cells.size() == 1);
  Config direct = cfg;
  apply_axis(direct, "epsilon", 0.1);
  const SweepCell ref = run_cell(direct);
  REQUIRE(cells[0].status == ref.status);
  CHECK(cells[0].metrics->n_max == ref.metrics->n_max);
  CHECK(cells[0].metrics->qvar_min == ref.metrics->qvar_min);
}

TEST_CASE("csv and svg emission") {
  SweepGrid grid;
  grid.axis1 = {"omega_over_omega_m", {1.0, 2.0}};
  grid.axis2 = AxisSpec{"epsilon", {0.0, 0.1}};
  std::vector<SweepCell> cells(4);
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      SweepCell& c = cells[i * 2 + j];
      c.i = i;
      c.j = j;
      c.x = grid.axis1.values[i];
      c.y = grid.axis2->values[j];
      if (i == 1 && j == 1) {
        c.status = CellStatus::unstable;
        c.sub_reason = "routh-hurwitz";
      } else {
        c.status = CellStatus::ok;
        MetricsSummary m;
        m.n_max = 0.1 * (i + 1) + j;
        m.en_max = 0.05 * (i + j + 1);
        m.d_max = 0.01;
        m.qvar_min = 0.4;
        m.xvar_min = 0.45;
        c.metrics = m;
      }
    }
  }
  std::ostringstream os;
  emit_csv(cells, grid, os);
  const std::string csv = os.str();
  CHECK(csv.find("unstable,routh-hurwitz,,,,,") != std::string::npos);
  CHECK(csv.find("0.1,ok") == std::string::npos);  // status column is third

  const auto files = emit_svg_heatmaps(cells, grid, "/tmp/omsim_test_svg", "t");
  CHECK(files.size() == 5);
  std::ifstream svg(files[0]);
  std::stringstream buf;
  buf << svg.rdbuf();
  const std::string s = buf.str();
  CHECK(s.find("<svg") != std::string::npos);
  CHECK(s.find("scale_min=") != std::string::npos);
  // 3 ok cells drawn, 1 blank.
  size_t count = 0;
  for (size_t pos = s.find("<rect"); pos != std::string::npos;
       pos = s.find("<rect", pos + 1)) {
    ++count;
  }
  CHECK(count == 1 + 3);  // background + ok cells

  std::ostringstream gp;
  emit_gnuplot(grid, "test.csv", gp);
  CHECK(gp.str().find("splot") != std::string::npos);
}

TEST_CASE("format_double is stable and locale-free") {
  CHECK(format_double(0.15) == "0.15");
  CHECK(format_double(1.0) == "1");
  CHECK(format_double(-3.25e-7) == "-3.25e-07");
}
