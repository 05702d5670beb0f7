#include <filesystem>
#include <sstream>
#include <string>

#include <gtest/gtest.h>
#include <json.hpp>

#include "pngopt/config.hpp"
#include "pngopt/io.hpp"
#include "pngopt/svg.hpp"

namespace pngopt {
namespace {

namespace fs = std::filesystem;

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "pngopt_tests";
  fs::create_directories(dir);
  const fs::path p = dir / name;
  fs::remove(p);
  return p;
}

std::string first_line(const std::string& s) { return s.substr(0, s.find('\n')); }

TEST(Config, EmptyDocumentGivesDefaults) {
  const ModelConfig c = parse_config(nlohmann::json::object());
  EXPECT_EQ(c.vehicle.mass, 1605.0);
  EXPECT_EQ(c.vehicle.air_density, 1.2);
  EXPECT_EQ(c.bsfc.p0, 30000.0);
}

TEST(Config, OverridesAndRoundTrip) {
  const auto doc = nlohmann::json::parse(R"({"vehicle": {"mass_kg": 1200}, "bsfc": {"p0_W": 45000}})");
  const ModelConfig c = parse_config(doc);
  EXPECT_EQ(c.vehicle.mass, 1200.0);
  EXPECT_EQ(c.bsfc.p0, 45000.0);
  EXPECT_EQ(c.vehicle.gravity, 9.81);
  const ModelConfig back = parse_config(to_json(c));
  EXPECT_EQ(back.vehicle.mass, 1200.0);
  EXPECT_EQ(back.bsfc.gamma, c.bsfc.gamma);
}

TEST(Config, UnknownKeyIsNamed) {
  try {
    (void)parse_config(nlohmann::json::parse(R"({"vehicle": {"mass": 1200}})"));
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("vehicle.mass"), std::string::npos) << e.what();
  }
  try {
    (void)parse_config(nlohmann::json::parse(R"({"engine": {}})"));
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("engine"), std::string::npos);
  }
}

TEST(Config, RejectsBadValues) {
  EXPECT_THROW((void)parse_config(nlohmann::json::parse(R"({"vehicle": {"mass_kg": -1}})")), ConfigError);
  EXPECT_THROW((void)parse_config(nlohmann::json::parse(R"({"vehicle": {"mass_kg": "heavy"}})")), ConfigError);
  EXPECT_THROW((void)parse_config(nlohmann::json::parse("[1, 2]")), ConfigError);
}

TEST(Config, LoadFromFile) {
  const fs::path p = scratch("cfg.json");
  write_text(p.string(), R"({"bsfc": {"beta0_g_per_J": 7e-5}})");
  EXPECT_EQ(load_config(p.string()).bsfc.beta0, 7e-5);
  write_text(p.string(), "{not json");
  EXPECT_THROW((void)load_config(p.string()), ConfigError);
  EXPECT_THROW((void)load_config((p.parent_path() / "missing.json").string()), ConfigError);
}

TEST(Csv, LocusRowsSortedAndLabelled) {
  const auto locus = root_locus(25.0, log_grid(1e-6, 1e2, 5));
  const std::string csv = locus_csv(locus);
  EXPECT_EQ(first_line(csv), kLocusCsvHeader);
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    std::istringstream fields(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(fields, cell, ',')) cells.push_back(cell);
    ASSERT_EQ(cells.size(), 10u);
    // imaginary parts descending
    EXPECT_GE(std::stod(cells[2]), std::stod(cells[4]));
    EXPECT_GE(std::stod(cells[4]), std::stod(cells[6]));
    EXPECT_GE(std::stod(cells[6]), std::stod(cells[8]));
    EXPECT_TRUE(cells[9] == "Oscillatory" || cells[9] == "Unstable" || cells[9] == "Degenerate");
  }
  EXPECT_EQ(rows, 5u);
}

TEST(Csv, SweepGaps) {
  const std::string csv = sweep_csv(rcrit_sweep({15.0, 36.0}));
  EXPECT_EQ(first_line(csv), kSweepCsvHeader);
  EXPECT_NE(csv.find("\n36,nan,nan,nan\n"), std::string::npos);
}

TEST(Csv, TrajectoryColumns) {
  const Equilibrium eq = equilibrium_for_speed(15.0);
  const DecisionVector d{15.0, eq.force, FourierInput{0.1, {0.0}, {0.0}}};
  const std::string csv = trajectory_csv(evaluate(d, Weights{}, {}, {}, 16));
  EXPECT_EQ(first_line(csv), kTrajectoryCsvHeader);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 18);
}

TEST(Json, DecisionRoundTrip) {
  const DecisionVector d{14.2, 231.5, FourierInput{0.0412, {0.5, -0.25}, {8.0, 1.0 / 3.0}}};
  const DecisionVector back = decision_from_json(nlohmann::json{{"decision", to_json(d)}});
  EXPECT_EQ(back.x1_0, d.x1_0);
  EXPECT_EQ(back.x2_0, d.x2_0);
  EXPECT_EQ(back.input.omega, d.input.omega);
  EXPECT_EQ(back.input.a, d.input.a);
  EXPECT_EQ(back.input.b, d.input.b);
  EXPECT_EQ(decision_from_json(to_json(d)).input.b, d.input.b);
}

TEST(Json, MalformedDecision) {
  EXPECT_THROW((void)decision_from_json(nlohmann::json{{"x1_0", 1.0}}), IoError);
  auto doc = to_json(DecisionVector{15.0, 230.0, FourierInput{0.1, {0.0}, {1.0}}});
  doc["b"] = nlohmann::json::array();
  EXPECT_THROW((void)decision_from_json(doc), std::invalid_argument);
}

TEST(Json, EquilibriumKeys) {
  const auto j = to_json(equilibrium_for_speed(15.0));
  EXPECT_NEAR(j.at("x2_0_N").get<double>(), 230.81, 0.01);
  EXPECT_TRUE(j.contains("weight_c_g_per_m"));
  EXPECT_TRUE(j.contains("lambda1_0"));
}

TEST(Svg, DeterministicLocusPlot) {
  const auto locus = root_locus(25.0, log_grid(1e-6, 1e2, 40));
  const fs::path a = scratch("a.svg");
  const fs::path b = scratch("b.svg");
  svg::emit_svg(svg::PlotKind::Locus, locus, a.string(), 25.0);
  svg::emit_svg(svg::PlotKind::Locus, locus, b.string(), 25.0);
  const std::string text = read_text(a.string());
  EXPECT_EQ(text, read_text(b.string()));
  EXPECT_NE(text.find("<svg"), std::string::npos);
  EXPECT_NE(text.find("<circle"), std::string::npos);
}

TEST(Svg, TrajectoryHasThreePanels) {
  const Equilibrium eq = equilibrium_for_speed(15.0);
  const DecisionVector d{15.0, eq.force, FourierInput{0.04, {0.0}, {9.0}}};
  const std::string text = svg::render(svg::trajectory_panels(evaluate(d, Weights{}, {}, {}, 64)));
  std::size_t n = 0;
  for (std::size_t pos = 0; (pos = text.find("<polyline", pos)) != std::string::npos; ++pos) ++n;
  EXPECT_EQ(n, 3u);
}

TEST(Svg, EmptyDataCreatesNoFile) {
  const fs::path p = scratch("empty.svg");
  EXPECT_THROW(svg::emit_svg(svg::PlotKind::Locus, std::vector<LocusPoint>{}, p.string()), std::invalid_argument);
  EXPECT_THROW(svg::emit_svg(svg::PlotKind::Sweep, rcrit_sweep({36.0}), p.string()), std::invalid_argument);
  EXPECT_FALSE(fs::exists(p));
}

TEST(Svg, UnwritablePath) {
  const auto locus = root_locus(25.0, log_grid(1e-6, 1e2, 4));
  EXPECT_THROW(svg::emit_svg(svg::PlotKind::Locus, locus, "/nonexistent-dir/x.svg", 25.0), IoError);
}

} // namespace
} // namespace pngopt
