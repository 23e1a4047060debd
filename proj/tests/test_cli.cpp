#include "nlsadm/cli/commands.hpp"

#include <gtest/gtest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>

namespace {

struct Run {
  int code = -1;
  std::string out;
};

Run run_tool(const std::string& args) {
  const std::string cmd = std::string(NLSADM_BINARY) + " " + args + " 2>/dev/null";
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  std::array<char, 4096> buf{};
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), n);
  const int st = pclose(p);
  r.code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return r;
}

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::size_t count(const std::string& s, const std::string& needle) {
  std::size_t n = 0;
  for (auto p = s.find(needle); p != std::string::npos; p = s.find(needle, p + 1)) ++n;
  return n;
}

std::string tmp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("nlsadm_test_" + name)).string();
}

}  // namespace

TEST(Cli, ClassifyFamilyD) {
  const auto r = run_tool("classify --alpha 1 --omega 1 --c 1.41421356237,0");
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("\"verdict\": \"FamilyD\""), std::string::npos);
}

TEST(Cli, ClassifyFourthOrderZero) {
  const auto r = run_tool("classify --alpha 1 --omega 0 --c 0.5,0");
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("\"verdict\": \"Inadmissible\""), std::string::npos);
  EXPECT_NE(r.out.find("\"id\": \"fourth_order_zero\""), std::string::npos);
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(run_tool("classify --alpha 1 --omega 0 --c 1").code, 2);
  EXPECT_EQ(run_tool("classify --alpha 1 --omega 0").code, 2);
  EXPECT_EQ(run_tool("classify --alpha 1 --omega 0 --c 1,0 --resolution 10,10").code, 2);
  EXPECT_EQ(run_tool("classify --alpha 1 --omega 0 --c 1,0 --bogus 3").code, 2);
  EXPECT_EQ(run_tool("classify --config /nonexistent/file.cfg").code, 4);
  EXPECT_EQ(run_tool("scan --family A --alpha 0 --samples 3 --out " + tmp_path("scan0.csv")).code, 0);
}

TEST(Cli, ConfigFileAndOverride) {
  const std::string cfg = tmp_path("run.cfg");
  {
    std::ofstream f(cfg);
    f << "[triple]\nalpha = 1\nomega = 1  # family D\nc = 1.41421356237,0\n[tolerances]\nmembership = 1e-9\n";
  }
  auto r = run_tool("classify --config " + cfg);
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("FamilyD"), std::string::npos);
  r = run_tool("classify --config " + cfg + " --c 0.5,0");
  EXPECT_NE(r.out.find("Inadmissible"), std::string::npos);
}

TEST(Cli, DeterministicReports) {
  const std::string args = "classify --alpha 2 --omega -12 --c 0,4";
  EXPECT_EQ(run_tool(args).out, run_tool(args).out);
  const std::string a = tmp_path("det_a.svg"), b = tmp_path("det_b.svg");
  ASSERT_EQ(run_tool("figure --family E --K 1 --omega -3.5 --c2 -0.1 --resolution 128,128 --out " + a).code, 0);
  ASSERT_EQ(run_tool("figure --family E --K 1 --omega -3.5 --c2 -0.1 --resolution 128,128 --out " + b).code, 0);
  for (const char* ext : {".svg", ".csv", ".grid.bin"})
    EXPECT_EQ(slurp(tmp_path(std::string("det_a") + ext)), slurp(tmp_path(std::string("det_b") + ext))) << ext;
}

TEST(Cli, FigureMarkers) {
  const std::string a = tmp_path("figA.svg");
  ASSERT_EQ(run_tool("figure --family A --alpha 1 --omega -1 --resolution 128,128 --out " + a).code, 0);
  const std::string svg = slurp(a);
  EXPECT_EQ(count(svg, "class=\"root\""), 2u);
  EXPECT_EQ(count(svg, "data-multiplicity=\"3\""), 1u);
  EXPECT_EQ(count(svg, "data-multiplicity=\"1\""), 1u);
  EXPECT_EQ(svg.find("nan"), std::string::npos);
  EXPECT_EQ(slurp(tmp_path("figA.csv")).rfind("k1,k2,tag\n", 0), 0u);

  const std::string d = tmp_path("figD.svg");
  ASSERT_EQ(run_tool("figure --family D --alpha 1 --omega 0 --resolution 128,128 --out " + d).code, 0);
  const std::string svgd = slurp(d);
  EXPECT_EQ(count(svgd, "class=\"branch-point\""), 3u);
  for (const char* y : {"cy=\"-0\"", "cy=\"-0.5\"", "cy=\"0.5\""}) EXPECT_NE(svgd.find(y), std::string::npos) << y;
}

TEST(Cli, EmptyWindowHasAxesOnly) {
  const std::string e = tmp_path("empty.svg");
  ASSERT_EQ(run_tool("figure --alpha 1 --omega 0 --c 1,1 --window 3,4,8,9 --resolution 64,64 --out " + e).code, 0);
  const std::string svg = slurp(e);
  EXPECT_EQ(count(svg, "<polyline"), 0u);
  EXPECT_NE(svg.find("class=\"frame\""), std::string::npos);
  EXPECT_NE(svg.find("</svg>"), std::string::npos);
}

TEST(Cli, SignGridSidecar) {
  const std::string base = tmp_path("grid.svg");
  ASSERT_EQ(run_tool("figure --alpha 1 --omega 0 --c 0,0 --resolution 64,80 --out " + base).code, 0);
  const std::string bytes = slurp(tmp_path("grid.grid.bin"));
  ASSERT_EQ(bytes.size(), 2u * 64 * 80);
  for (char ch : bytes) EXPECT_TRUE(ch == 0 || ch == 1 || ch == 2);
  const auto header = nlsadm::cli::json::parse(slurp(tmp_path("grid.grid.json")));
  EXPECT_EQ(header["schema"], 1);
  EXPECT_EQ(header["resolution"][0], 64);
  EXPECT_EQ(header["resolution"][1], 80);
}

TEST(Cli, VerifyAndFault) {
  auto r = run_tool("verify --samples 10");
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("\"passed\": true"), std::string::npos);
  r = run_tool("verify --samples 10 --inject-fault flip-coefficient");
  EXPECT_EQ(r.code, 1);
  const auto j = nlsadm::cli::json::parse(r.out);
  bool identity_failed = false;
  for (const auto& id : j["failed"]) identity_failed |= id == "spectral.identity_2OmegaHH";
  EXPECT_TRUE(identity_failed);
}

TEST(Cli, ScanExamples) {
  const std::string e = tmp_path("scanE.csv");
  auto r = run_tool("scan --family E --range 'K=0.5:2:4' --samples 8 --out " + e);
  EXPECT_EQ(r.code, 0);
  const std::string csv = slurp(e);
  EXPECT_EQ(count(csv, ",FamilyE,"), 4u * 8 * 8);

  const std::string b = tmp_path("scanB.csv");
  EXPECT_EQ(run_tool("scan --family B --samples 6 --out " + b).code, 0);
  // The last c2 of each omega row sits on c2 = -(4K^2 + omega)/2.
  EXPECT_EQ(count(slurp(b), "B_c1_zero_edge"), 6u);

  const std::string d = tmp_path("scanD.csv");
  EXPECT_EQ(run_tool("scan --family D --alpha 1 --range 'omega=-1:4:11' --out " + d).code, 0);
  std::istringstream in(slurp(d));
  std::string line;
  std::getline(in, line);
  int rows = 0;
  while (std::getline(in, line)) {
    std::vector<std::string> f;
    std::stringstream ls(line);
    for (std::string x; std::getline(ls, x, ',');) f.push_back(x);
    ASSERT_GE(f.size(), 9u);
    EXPECT_EQ(f[7], "0");
    EXPECT_EQ(f[8], "FamilyD");
    ++rows;
  }
  EXPECT_EQ(rows, 11);
}

TEST(Cli, JumpReport) {
  const auto r = run_tool("jump --alpha 1 --omega 0 --c 0,0 --cut-strategy gamma --samples 10 --resolution 100,100");
  EXPECT_EQ(r.code, 0);
  const auto j = nlsadm::cli::json::parse(r.out);
  EXPECT_TRUE(j["global_relation"]["lemma_applies"].get<bool>());
  EXPECT_TRUE(j["global_relation"]["jump_obstruction"].get<bool>());
  EXPECT_TRUE(j["global_relation"]["consistent_with_classify"].get<bool>());
}

TEST(CliConfig, ParsersAndHash) {
  using namespace nlsadm::cli;
  EXPECT_EQ(parse_complex("1.5,-2", "c"), nlsadm::cplx(1.5, -2.0));
  EXPECT_THROW(parse_complex("1", "c"), nlsadm::Error);
  EXPECT_THROW(parse_double("1.0x", "alpha"), nlsadm::Error);
  const auto a = config_from_map("classify", {{"alpha", "1"}, {"omega", "0"}, {"c", "0,0"}, {"out", "x.json"}});
  const auto b = config_from_map("classify", {{"alpha", "1"}, {"omega", "0"}, {"c", "0,0"}});
  const auto c = config_from_map("classify", {{"alpha", "1"}, {"omega", "0"}, {"c", "0,1"}});
  EXPECT_EQ(config_hash(a), config_hash(b));
  EXPECT_NE(config_hash(a), config_hash(c));
  EXPECT_EQ(config_hash(a).size(), 16u);
  EXPECT_EQ(format_double(0.1), "0.10000000000000001");
}
