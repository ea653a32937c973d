#include <gtest/gtest.h>

#include <sstream>

#include "crslip/analysis.hpp"

#include "crslip/errors.hpp"
#include "crslip/study.hpp"

using namespace crslip;

namespace {

RunConfig small_disk(int levels) {
  RunConfig c = RunConfig::defaults(DomainKind::disk2d);
  c.levels = levels;
  c.base_refinements = 1;
  return c;
}

std::string table(const StudyResult& r) {
  std::ostringstream os;
  write_table(os, r);
  return os.str();
}

}  // namespace

TEST(RunConfig, Defaults) {
  const RunConfig d = RunConfig::defaults(DomainKind::disk2d);
  EXPECT_EQ(d.levels, 4);
  EXPECT_DOUBLE_EQ(d.gamma, 2.0);
  EXPECT_DOUBLE_EQ(d.epsilon(0.5), 0.1 * 0.25);
  const RunConfig b = RunConfig::defaults(DomainKind::ball3d);
  EXPECT_EQ(b.levels, 3);
  EXPECT_DOUBLE_EQ(b.gamma, 5.0);
  EXPECT_DOUBLE_EQ(b.epsilon(0.5), 0.05);
}

TEST(RunConfig, ParseAndApply) {
  const auto kv = parse_config_text("# comment\n\nlevels = 2\n eps_coef=0.5 # trailing\ngamma = 3\n");
  RunConfig c = RunConfig::defaults(DomainKind::disk2d);
  c.apply(kv);
  EXPECT_EQ(c.levels, 2);
  EXPECT_DOUBLE_EQ(c.eps_coef, 0.5);
  EXPECT_DOUBLE_EQ(c.gamma, 3.0);
  c.apply({{"solver", "augmented"}, {"format", "markdown"}, {"diagnostics", "yes"}, {"pressure", "symmetric"}});
  EXPECT_EQ(c.solver, SolverKind::augmented_lagrangian);
  EXPECT_EQ(c.format, TableFormat::markdown);
  EXPECT_TRUE(c.diagnostics);
  EXPECT_EQ(c.pressure, PressureVariant::symmetric);
}

TEST(RunConfig, Rejections) {
  EXPECT_THROW(parse_config_text("levels 3\n"), ConfigError);
  EXPECT_THROW(parse_config_text(" = 3\n"), ConfigError);
  RunConfig c = RunConfig::defaults(DomainKind::disk2d);
  EXPECT_THROW(c.apply({{"levels", "zero"}}), ConfigError);
  EXPECT_THROW(c.apply({{"gamma", "1.0x"}}), ConfigError);
  EXPECT_THROW(c.apply({{"colour", "red"}}), ConfigError);
  EXPECT_THROW(c.apply({{"format", "json"}}), ConfigError);
  for (auto [key, value] : std::vector<std::pair<std::string, std::string>>{
           {"levels", "0"}, {"gamma", "-1"}, {"eps-coef", "0"}, {"eps-exp", "-1"}, {"nu", "0"},
           {"base-refinements", "-1"}, {"data-degree", "0"}, {"error-degree", "30"}}) {
    RunConfig bad = RunConfig::defaults(DomainKind::disk2d);
    bad.apply({{key, value}});
    EXPECT_THROW(bad.validate(), ConfigError) << key;
  }
  try {
    c.apply({{"levels", "0"}});
    c.validate();
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_STREQ(e.what(), "levels must be >= 1");
  }
}

TEST(Study, SingleLevelHasEmptyOrders) {
  const StudyResult r = run_study(small_disk(1));
  ASSERT_EQ(r.report.records.size(), 1u);
  const std::string t = table(r);
  EXPECT_NE(t.find("h,l2_u,eoc_l2_u,h1_u,eoc_h1_u,l2_p,eoc_l2_p\n"), std::string::npos);
  const std::string last = t.substr(t.rfind('\n', t.size() - 2) + 1);
  std::vector<std::string> cells;
  std::stringstream ss(last.substr(0, last.size() - 1));
  for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(cell);
  cells.resize(7);
  EXPECT_TRUE(cells[2].empty());
  EXPECT_TRUE(cells[4].empty());
  EXPECT_TRUE(cells[6].empty());
}

TEST(Study, HeaderEchoAndDeterminism) {
  RunConfig c = small_disk(2);
  c.diagnostics = true;
  const StudyResult a = run_study(c, true), b = run_study(c, true);
  const std::string ta = table(a);
  EXPECT_EQ(ta, table(b));
  for (const char* line : {"# case = disk2d", "# levels = 2", "# base_refinements = 1", "# gamma = 2",
                           "# eps_coef = 0.1", "# eps_exp = 2", "# nu = 1", "# pressure = printed",
                           "# data_degree = 4", "# error_degree = 8", "# solver = auto", "# format = csv",
                           "# diagnostics = true"})
    EXPECT_NE(ta.find(line), std::string::npos) << line;
  ASSERT_EQ(a.meshes.size(), 2u);
  EXPECT_EQ(a.meshes, b.meshes);
  ASSERT_EQ(a.diagnostics.size(), 2u);
  std::ostringstream da, db;
  write_diagnostics(da, a);
  write_diagnostics(db, b);
  EXPECT_EQ(da.str(), db.str());
  EXPECT_NE(da.str().find("korn,flux_weighted"), std::string::npos);
  EXPECT_GT(a.diagnostics[0].korn, 0.0);
}

TEST(Study, StageFailureNamesStageAndLevel) {
  RunConfig c = small_disk(1);
  c.eps_exp = 5000.0;  // eps underflows to zero
  try {
    run_study(c);
    FAIL();
  } catch (const StageFailure& e) {
    EXPECT_EQ(e.stage(), "assemble");
    EXPECT_EQ(e.level(), 0);
  }
}

TEST(Study, MarkdownLayout) {
  RunConfig c = small_disk(2);
  c.format = TableFormat::markdown;
  const std::string t = table(run_study(c));
  EXPECT_NE(t.find("| h | L2(u) error | order | H1(u) error | order | L2(p) error | order |"), std::string::npos);
}

TEST(Study, ErrorsDecreaseAndStayAboveInterpolation) {
  const StudyResult r = run_study(small_disk(4));
  const auto& rec = r.report.records;
  for (std::size_t l = 1; l < rec.size(); ++l) {
    EXPECT_LT(rec[l].l2_u, rec[l - 1].l2_u);
    EXPECT_LT(rec[l].h1_u, rec[l - 1].h1_u);
    EXPECT_LT(rec[l].l2_p, rec[l - 1].l2_p);
  }
  // Interpolation error on the same meshes is a floor up to a constant.
  const ManufacturedCase c = case_disk2d();
  SimplexMesh m = coarse_mesh(*c.domain);
  m = refine(m, *c.domain);
  for (std::size_t l = 0; l < rec.size(); ++l) {
    if (l > 0) m = refine(m, *c.domain);
    const FacetComplex f = build_facets(m);
    const CRFunction pu = cr_interpolate(c.solution.u, f);
    EXPECT_GT(rec[l].l2_u, 0.1 * error_l2(c.solution.u, pu));
    EXPECT_GT(rec[l].triple_u, 0.1 * error_triple_norm(c.solution.u, c.solution.grad_u, pu));
  }
}
