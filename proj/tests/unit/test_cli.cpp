#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "cli.hpp"
#include "mecrl/error.hpp"

namespace fs = std::filesystem;
using namespace mecrl;

namespace {

struct CliResult {
  int code;
  std::string out, err;
};

CliResult invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "mecrl");
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    root_ = fs::temp_directory_path() / ("mecrl_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(root_);
    fs::create_directories(root_);
  }
  void TearDown() override { fs::remove_all(root_); }

  fs::path write_config(const std::string& name, const std::string& body) {
    const auto p = root_ / name;
    std::ofstream(p) << body;
    return p;
  }

  static std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
  }

  static std::set<std::string> listing(const fs::path& dir) {
    std::set<std::string> names;
    for (const auto& e : fs::directory_iterator(dir)) names.insert(e.path().filename().string());
    return names;
  }

  fs::path root_;
};

constexpr const char* kTiny =
    R"({"episodes": 2, "env": {"n_users": 2, "episode_len": 20},
        "trainer": {"batch_size": 8, "warmup_steps": 10}})";

}  // namespace

TEST(CliHelpers, GridCellNames) {
  EXPECT_EQ(cli::grid_cell_name(0.95, 200), "g0.95_n200");
  EXPECT_EQ(cli::grid_cell_name(0.99, 0.5), "g0.99_n0.5");
  EXPECT_EQ(cli::parse_number_list("0.95,0.99"), (std::vector<double>{0.95, 0.99}));
  EXPECT_THROW(cli::parse_number_list("0.9,,1"), ValidationError);
  EXPECT_THROW(cli::parse_number_list("abc"), ValidationError);
}

TEST_F(CliTest, TrainLeavesDocumentedFiles) {
  const auto cfg = write_config("c.json", kTiny);
  const auto out = root_ / "out";
  const auto r = invoke({"train", "--config", cfg.string(), "--runs", "2", "--out", out.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(listing(out), (std::set<std::string>{"aggregate.csv", "checkpoints", "curves.svg",
                                                 "resolved_config.json", "run_0.csv", "run_1.csv"}));
  EXPECT_EQ(listing(out / "checkpoints").size(), 10u);
  const auto agg = slurp(out / "aggregate.csv");
  EXPECT_EQ(agg.substr(0, agg.find('\n')), "episode,mean_return,std_return,run0,run1");
}

TEST_F(CliTest, TrainIsByteDeterministic) {
  const auto cfg = write_config("c.json", kTiny);
  ASSERT_EQ(invoke({"train", "--config", cfg.string(), "--runs", "2", "--out", (root_ / "a").string()}).code, 0);
  ASSERT_EQ(invoke({"train", "--config", cfg.string(), "--runs", "2", "--out", (root_ / "b").string(), "--jobs",
                    "2"})
                .code,
            0);
  EXPECT_EQ(slurp(root_ / "a" / "aggregate.csv"), slurp(root_ / "b" / "aggregate.csv"));
  EXPECT_EQ(slurp(root_ / "a" / "run_1.csv"), slurp(root_ / "b" / "run_1.csv"));
  EXPECT_EQ(slurp(root_ / "a" / "checkpoints" / "rmaddpg_0_actor.json"),
            slurp(root_ / "b" / "checkpoints" / "rmaddpg_0_actor.json"));
}

TEST_F(CliTest, EvalAfterTrain) {
  const auto cfg = write_config("c.json", kTiny);
  const auto out = root_ / "out";
  ASSERT_EQ(invoke({"train", "--config", cfg.string(), "--runs", "1", "--out", out.string()}).code, 0);
  const auto a = invoke({"eval", "--config", cfg.string(), "--checkpoints", (out / "checkpoints").string(),
                         "--episodes", "2"});
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_NE(a.out.find("mean_return"), std::string::npos);
  const auto b = invoke({"eval", "--config", cfg.string(), "--checkpoints", (out / "checkpoints").string(),
                         "--episodes", "2"});
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(invoke({"eval", "--config", cfg.string(), "--checkpoints", (root_ / "none").string()}).code, 2);
}

TEST_F(CliTest, PlotOverlaysAlgorithms) {
  const auto base = std::string(kTiny);
  const auto c1 = write_config("ddpg.json", R"({"algo": "ddpg", )" + base.substr(1));
  const auto c2 = write_config("rm.json", R"({"algo": "rmaddpg", )" + base.substr(1));
  ASSERT_EQ(invoke({"train", "--config", c1.string(), "--runs", "1", "--out", (root_ / "ddpg").string()}).code, 0);
  ASSERT_EQ(invoke({"train", "--config", c2.string(), "--runs", "1", "--out", (root_ / "rmaddpg").string()}).code,
            0);
  const auto svg = root_ / "both.svg";
  const auto r = invoke({"plot", "--in", (root_ / "ddpg" / "aggregate.csv").string(),
                         (root_ / "rmaddpg" / "aggregate.csv").string(), "--out", svg.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto text = slurp(svg);
  EXPECT_NE(text.find(">ddpg</text>"), std::string::npos);
  EXPECT_NE(text.find(">rmaddpg</text>"), std::string::npos);
  std::size_t lines = 0;
  for (auto p = text.find("<polyline"); p != std::string::npos; p = text.find("<polyline", p + 1)) ++lines;
  EXPECT_EQ(lines, 2u);
}

TEST_F(CliTest, GridCreatesCells) {
  const auto cfg = write_config("c.json", R"({"episodes": 1, "n_runs": 1, "env": {"episode_len": 5},
                                               "trainer": {"batch_size": 2, "warmup_steps": 3}})");
  const auto out = root_ / "grid";
  const auto r = invoke({"grid", "--config", cfg.string(), "--gamma", "0.95,0.99", "--noise", "200,300", "--out",
                         out.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(listing(out), (std::set<std::string>{"g0.95_n200", "g0.95_n300", "g0.99_n200", "g0.99_n300"}));
  EXPECT_EQ(listing(out / "g0.99_n300"), (std::set<std::string>{"curves.svg", "ddpg", "rmaddpg"}));
  const auto resolved = slurp(out / "g0.99_n300" / "rmaddpg" / "resolved_config.json");
  EXPECT_NE(resolved.find("\"gamma\": 0.99"), std::string::npos);
  EXPECT_NE(resolved.find("\"noise_level\": 300"), std::string::npos);
}

TEST_F(CliTest, ExitCodes) {
  const auto cfg = write_config("c.json", kTiny);
  auto r = invoke({"train", "--config", cfg.string(), "--bogus"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("train"), std::string::npos);
  EXPECT_TRUE(r.out.empty());

  EXPECT_EQ(invoke({}).code, 1);
  EXPECT_EQ(invoke({"fly"}).code, 1);
  EXPECT_EQ(invoke({"train", "--config", (root_ / "missing.json").string()}).code, 2);
  EXPECT_EQ(invoke({"train", "--config", cfg.string(), "--runs", "0", "--out", (root_ / "o").string()}).code, 1);

  const auto bad = write_config("bad.json", R"({"episodes": -1})");
  r = invoke({"train", "--config", bad.string()});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("episodes"), std::string::npos);

  const auto broken = write_config("broken.json", "{\"episodes\": ");
  EXPECT_EQ(invoke({"train", "--config", broken.string()}).code, 1);
  EXPECT_EQ(invoke({"--help"}).code, 0);
}
