#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "dispcert/cli.hpp"
#include "dispcert/errors.hpp"
#include "dispcert/io.hpp"

using namespace dispcert;
namespace fs = std::filesystem;

namespace {

const fs::path kExamples = DISPCERT_EXAMPLES_DIR;

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun cli(std::vector<std::string> args) {
  args.insert(args.begin(), "dispcert");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string ex(const char* name) { return (kExamples / name).string(); }

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "dispcert_tests";
  fs::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST(Ingest, Csv) {
  EXPECT_EQ(parse_losses_csv("loss\n0.1\n0.2").size(), 2u);
  const LossSamples g = parse_losses_csv("loss,group\n0.1,a\n0.2,b\n");
  EXPECT_TRUE(g.has_groups());
  EXPECT_EQ(g.group_labels(), (std::vector<std::string>{"a", "b"}));
  EXPECT_EQ(parse_losses_csv("\xEF\xBB\xBFloss\r\n0.5\r\n").size(), 1u);
  EXPECT_EQ(parse_losses_csv("loss,group\n0.5,\"x,y\"\n").groups()[0], "x,y");
}

TEST(Ingest, BadRowsAreNamed) {
  try {
    parse_losses_csv("loss\n0.1\nNaN\n0.3\ninf\n");
    FAIL();
  } catch (const ValidationError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("data rows 2, 4"), std::string::npos) << msg;
  }
  EXPECT_THROW(parse_losses_csv("value\n0.1\n"), ValidationError);
  EXPECT_THROW(parse_losses_csv("loss\n"), ValidationError);
  EXPECT_THROW(parse_losses_csv("loss,group\n0.1\n"), ValidationError);
}

TEST(Ingest, Jsonl) {
  const LossSamples s = parse_losses_jsonl("{\"loss\": 0.1, \"group\": \"a\"}\n\n{\"loss\": 0.4, \"group\": \"b\"}\n");
  EXPECT_EQ(s.size(), 2u);
  EXPECT_TRUE(s.has_groups());
  EXPECT_THROW(parse_losses_jsonl("{\"loss\": \"x\"}\n"), ValidationError);
  EXPECT_EQ(format_from_path("a.jsonl"), InputFormat::jsonl);
  EXPECT_EQ(format_from_path("a.csv"), InputFormat::csv);
  EXPECT_THROW(format_from_path("a.txt"), ValidationError);
}

TEST(Ingest, HypothesisTable) {
  const HypothesisLossTable t = parse_hypothesis_csv("example_id,group,h_a,h_b\n0,x,0.1,0.2\n1,y,0.3,0.4\n");
  EXPECT_EQ(t.labels(), (std::vector<std::string>{"a", "b"}));
  EXPECT_EQ(t.column(1).values(), (std::vector<double>{0.2, 0.4}));
  EXPECT_THROW(parse_hypothesis_csv("example_id,loss\n0,0.1\n"), ValidationError);
}

TEST(Losses, Metrics) {
  EXPECT_NEAR(brier_loss(0.7, 1.0), 0.09, 1e-15);
  EXPECT_THROW(brier_loss(0.7, 0.5), ValidationError);
  EXPECT_THROW(brier_loss(1.2, 1.0), ValidationError);
  EXPECT_NEAR(balanced_accuracy_loss({3, 5}, 3, 10), 1.0 / 18.0, 1e-15);
  EXPECT_EQ(balanced_accuracy_loss({3}, 3, 10), 0.0);
  EXPECT_THROW(balanced_accuracy_loss({3}, 10, 10), ValidationError);
  EXPECT_NEAR(prec_recall_loss({1, 2, 3, 4, 5, 6, 7, 8, 9, 10}, {1, 2, 11, 12, 13}, 0.5), 0.5, 1e-15);
  const LossSamples b = compute_losses("confidence,outcome\n0.7,1\n0.2,0\n", parse_loss_metric("brier", 2, 0.5));
  EXPECT_NEAR(b.values()[0], 0.09, 1e-15);
  EXPECT_NEAR(b.values()[1], 0.04, 1e-15);
  EXPECT_TRUE(b.nonneg());
}

TEST(RoundTrip, BandJson) {
  const LossSamples s({0.05, 0.2, 0.21, 0.5, 0.77, 0.9}, {}, 1.0, true);
  for (BandMethod m : {BandMethod::dkw, BandMethod::berk_jones}) {
    const CdfBand band = build_band(s, m, 0.1);
    const std::string text = band_to_string(band);
    const CdfBand back = band_from_json(Json::parse(text));
    EXPECT_EQ(band_to_string(back), text);
    EXPECT_TRUE(back == band);
    EXPECT_EQ(back.delta(), band.delta());
    EXPECT_EQ(back.support_max(), band.support_max());
  }
  const CdfBand open = build_band(LossSamples({-1.0, 2.0, 3.5}), BandMethod::dkw, 0.2);
  EXPECT_EQ(band_to_string(band_from_json(Json::parse(band_to_string(open)))), band_to_string(open));
}

TEST(RoundTrip, LossCsv) {
  const std::string text = read_text(kExamples / "losses.csv");
  const LossSamples s = parse_losses_csv(text);
  const std::string once = losses_to_csv(s);
  EXPECT_EQ(losses_to_csv(parse_losses_csv(once)), once);
  EXPECT_EQ(parse_losses_csv(once).values(), s.values());
  const LossSamples odd({0.1 + 0.2, 1.0 / 3.0, 1e-300, -2.5});
  EXPECT_EQ(parse_losses_csv(losses_to_csv(odd)).values(), odd.values());
}

TEST(Cli, Lorenz) {
  const CliRun r = cli({"lorenz", "-m", "exact_plugin", "-c", ex("lorenz_uniform.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  const CsvTable t = parse_csv(r.out);
  EXPECT_EQ(t.header, (std::vector<std::string>{"t", "lower", "upper", "empirical"}));
  ASSERT_EQ(t.rows.size(), 11u);
  for (const auto& row : t.rows) {
    const double x = std::stod(row[0]);
    EXPECT_NEAR(std::stod(row[1]), x * x, 1e-3);
    EXPECT_NEAR(std::stod(row[2]), x * x, 1e-3);
  }
}

TEST(Cli, MeasureSharesOneBand) {
  const CliRun r = cli({"measure", "-i", ex("losses.csv"), "-c", ex("measures.json"), "-d", "0.1"});
  ASSERT_EQ(r.code, 0) << r.err;
  const Json j = Json::parse(r.out);
  EXPECT_EQ(j["delta_effective"], 0.1);
  ASSERT_EQ(j["measures"].size(), 3u);
  for (const auto& m : j["measures"]) EXPECT_EQ(m["delta_effective"], 0.1);
}

TEST(Cli, SelectDominance) {
  const CliRun r = cli({"select", "-i", ex("dominance.csv"), "-c", ex("select_mean.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(Json::parse(r.out)["selected"], "better");
}

TEST(Cli, BandFileRoundTrip) {
  const fs::path out = scratch("band.json");
  const CliRun r = cli({"band", "-i", ex("losses.csv"), "-c", ex("measures.json"), "-o", out.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const std::string text = read_text(out);
  EXPECT_EQ(band_to_string(read_band(out)), text);
  const CliRun m = cli({"measure", "-b", out.string(), "-c", ex("measures.json")});
  EXPECT_EQ(m.code, 0) << m.err;
  EXPECT_EQ(Json::parse(m.out)["delta_effective"], 0.05);
}

TEST(Cli, LossesCommand) {
  const CliRun r = cli({"losses", "-p", ex("balanced_accuracy_predictions.csv"), "-c", ex("balanced_accuracy.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NEAR(parse_losses_csv(r.out).values()[0], 1.0 / 18.0, 1e-15);
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(cli({}).code, 2);
  EXPECT_EQ(cli({"band", "--nope"}).code, 2);
  const fs::path bad = scratch("bad.csv");
  std::ofstream(bad) << "loss\nnan\n";
  EXPECT_EQ(cli({"band", "-i", bad.string()}).code, 2);
  // Gini needs a finite support bound.
  const fs::path cfg = scratch("gini.json");
  std::ofstream(cfg) << R"({"nonneg": true, "measures": [{"name": "gini"}]})";
  const CliRun d = cli({"measure", "-i", ex("losses.csv"), "-c", cfg.string()});
  EXPECT_EQ(d.code, 3) << d.err;
  EXPECT_FALSE(d.err.empty());
}
