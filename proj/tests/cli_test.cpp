#include <cstdio>
#include <filesystem>
#include <fstream>
#include <locale>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "doctest.h"
#include "mrrope/plan.hpp"
#include "mrrope/plan_doc.hpp"

namespace {

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

CliResult run_cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = mrrope::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::size_t count_lines(const std::string& text) {
  std::size_t n = 0;
  for (char c : text) n += c == '\n';
  return n;
}

std::filesystem::path temp_file(const char* name) {
  return std::filesystem::temp_directory_path() / name;
}

const std::vector<std::string> kGeometry{"--base", "10000", "--head-dim", "128",
                                         "--trained-len", "4096"};

std::vector<std::string> with_geometry(std::vector<std::string> args) {
  args.insert(args.end(), kGeometry.begin(), kGeometry.end());
  return args;
}

}  // namespace

TEST_CASE("freqs") {
  SUBCASE("emits one row per pair with a leading unit frequency") {
    const CliResult r = run_cli(with_geometry({"freqs"}));
    REQUIRE(r.code == 0);
    CHECK(count_lines(r.out) == 65);  // header + 64 rows
    CHECK(r.out.substr(0, r.out.find('\n')) == "j,theta,wavelength,progress");
    CHECK(r.out.find("\n1,1,") != std::string::npos);
  }
  SUBCASE("resolves head_dim from a model config") {
    const auto path = temp_file("mrrope_cli_config.json");
    {
      std::ofstream out(path);
      out << R"({"rope_theta": 10000.0, "hidden_size": 4096, "num_attention_heads": 32,
                 "max_position_embeddings": 4096})";
    }
    const CliResult r = run_cli({"freqs", "--config", path.string()});
    std::filesystem::remove(path);
    REQUIRE(r.code == 0);
    CHECK(count_lines(r.out) == 65);
  }
  SUBCASE("odd resolved head_dim fails with a message naming the field") {
    const auto path = temp_file("mrrope_cli_bad_config.json");
    {
      std::ofstream out(path);
      out << R"({"rope_theta": 10000.0, "head_dim": 127, "max_position_embeddings": 4096})";
    }
    const CliResult r = run_cli({"freqs", "--config", path.string()});
    std::filesystem::remove(path);
    CHECK(r.code != 0);
    CHECK(r.err.find("head_dim") != std::string::npos);
  }
  SUBCASE("missing geometry fails naming the flag") {
    const CliResult r = run_cli({"freqs", "--base", "10000"});
    CHECK(r.code != 0);
    CHECK(r.err.find("--head-dim") != std::string::npos);
  }
  SUBCASE("unreadable config fails") {
    const CliResult r = run_cli({"freqs", "--config", "/nonexistent/config.json"});
    CHECK(r.code != 0);
  }
}

TEST_CASE("plan") {
  SUBCASE("compiles, reports the partition on stderr and round-trips") {
    const auto path = temp_file("mrrope_cli_plan.json");
    const CliResult r = run_cli(with_geometry(
        {"plan", "--method", "mrrope-pro", "--scale", "16", "--out", path.string()}));
    REQUIRE(r.code == 0);
    CHECK(r.err.find("d_low=21") != std::string::npos);
    CHECK(r.err.find("d_high=47") != std::string::npos);
    CHECK(r.err.find("band_product=16") != std::string::npos);
    CHECK(r.err.find("temperature=0.61297") != std::string::npos);

    const auto doc = mrrope::load_plan_doc(path);
    std::filesystem::remove(path);
    CHECK(doc.method == "mrrope-pro");
    CHECK(doc.d_low == 21);
    CHECK(doc.d_high == 47);
  }
  SUBCASE("scale 1 keeps all multipliers at 1") {
    const CliResult r = run_cli(with_geometry({"plan", "--method", "yarn", "--scale", "1"}));
    REQUIRE(r.code == 0);
    const auto doc = mrrope::plan_doc_from_json(r.out);
    for (double m : doc.inv_freq_multipliers) CHECK(m == 1.0);
  }
  SUBCASE("degenerate partition exits nonzero and suggests hyperparameters") {
    const CliResult r = run_cli(with_geometry(
        {"plan", "--method", "yarn", "--scale", "16", "--alpha", "1e7", "--beta", "2e7"}));
    CHECK(r.code == 1);
    CHECK(r.err.find("degenerate") != std::string::npos);
    CHECK(r.err.find("alpha=1") != std::string::npos);
  }
  SUBCASE("unknown method is a parse error") {
    const CliResult r = run_cli(with_geometry({"plan", "--method", "bogus"}));
    CHECK(r.code != 0);
  }
}

TEST_CASE("bound") {
  SUBCASE("summary lists one root per method") {
    const CliResult r = run_cli(with_geometry(
        {"bound", "--methods", "none,mrrope-pro", "--scale", "16", "--grid-step", "256"}));
    REQUIRE(r.code == 0);
    CHECK(r.out.find("# roots\nmethod,root\n") != std::string::npos);
    CHECK(r.out.find("\nnone,") != std::string::npos);
    CHECK(r.out.find("\nmrrope-pro,") != std::string::npos);
  }
  SUBCASE("series files are written per method") {
    const auto prefix = temp_file("mrrope_cli_bound").string();
    const CliResult r = run_cli(with_geometry({"bound", "--methods", "none,yarn", "--scale",
                                               "16", "--grid-step", "512", "--out", prefix}));
    REQUIRE(r.code == 0);
    for (const char* name : {".none.csv", ".yarn.csv"}) {
      const std::string path = prefix + name;
      CHECK(std::filesystem::exists(path));
      std::filesystem::remove(path);
    }
  }
  SUBCASE("a missing root prints none") {
    // scan too short to reach the first crossing
    const CliResult r = run_cli(with_geometry(
        {"bound", "--methods", "none", "--m-max", "1000", "--grid-step", "10"}));
    REQUIRE(r.code == 0);
    CHECK(r.out.find("none,none") != std::string::npos);
  }
  SUBCASE("band-only restricts the sum to the middle dimensions") {
    const CliResult r = run_cli(with_geometry(
        {"bound", "--methods", "mrrope-pro", "--scale", "16", "--band-only"}));
    REQUIRE(r.code == 0);
    // first sample of the band-only series is the 26-dimension band width
    CHECK(r.out.find("0,26,") != std::string::npos);
  }
  SUBCASE("grid step above m_max/100 is a usage error") {
    const CliResult r = run_cli(with_geometry(
        {"bound", "--methods", "none", "--m-max", "1000", "--grid-step", "11"}));
    CHECK(r.code == 2);
    CHECK(r.err.find("grid step") != std::string::npos);
  }
  SUBCASE("a saved plan document can replace method flags") {
    const auto path = temp_file("mrrope_cli_plan_for_bound.json");
    REQUIRE(run_cli(with_geometry({"plan", "--method", "mrrope-pro", "--scale", "16", "--out",
                                   path.string()}))
                .code == 0);
    const CliResult r = run_cli(with_geometry(
        {"bound", "--plan", path.string(), "--scale", "16", "--grid-step", "256"}));
    std::filesystem::remove(path);
    REQUIRE(r.code == 0);
    CHECK(r.out.find("\nmrrope-pro,") != std::string::npos);
  }
}

TEST_CASE("estimate") {
  SUBCASE("r-squared grows with the base") {
    const CliResult r = run_cli({"estimate", "--base", "100,10000,1000000", "--head-dim", "128",
                                 "--trained-len", "512"});
    REQUIRE(r.code == 0);
    const auto summary_start = r.out.find("# r_squared");
    REQUIRE(summary_start != std::string::npos);
    const auto at = [&](const std::string& key) {
      const auto pos = r.out.find("\n" + key + ",", summary_start);
      REQUIRE(pos != std::string::npos);
      return std::stod(r.out.substr(pos + key.size() + 2));
    };
    const double r2_small = at("100");
    const double r2_mid = at("10000");
    const double r2_large = at("1000000");
    CHECK(r2_small < r2_mid);
    CHECK(r2_mid < r2_large);
  }
  SUBCASE("L = 16 emits 17 samples starting at zero") {
    const CliResult r = run_cli({"estimate", "--base", "10000", "--trained-len", "16"});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("# series base=10000\n") != std::string::npos);
    CHECK(r.out.find("\n0,0,\n") != std::string::npos);  // m = 0 estimates 0
    CHECK(r.out.find("\n16,") != std::string::npos);
  }
  SUBCASE("a negative base is a usage error") {
    const CliResult r = run_cli({"estimate", "--base", "-5", "--trained-len", "64"});
    CHECK(r.code == 2);
  }
}

TEST_CASE("attn-sim") {
  const std::vector<std::string> common = with_geometry(
      {"attn-sim", "--method", "mrrope-pro", "--scale", "16", "--pairs", "10", "--seed", "7"});

  SUBCASE("same seed twice is byte-identical") {
    auto args = common;
    args.insert(args.end(), {"--positions", "0:8192:1024"});
    const CliResult a = run_cli(args);
    const CliResult b = run_cli(args);
    REQUIRE(a.code == 0);
    CHECK(a.out == b.out);
    CHECK(count_lines(a.out) == 10);  // header + 9 samples
  }
  SUBCASE("range syntax expands inclusively") {
    auto args = common;
    args.insert(args.end(), {"--positions", "0:65536:1024"});
    const CliResult r = run_cli(args);
    REQUIRE(r.code == 0);
    CHECK(count_lines(r.out) == 66);  // header + 65 samples
  }
  SUBCASE("pairs = 0 is a usage error") {
    const CliResult r = run_cli(with_geometry(
        {"attn-sim", "--method", "mrrope-pro", "--scale", "16", "--pairs", "0"}));
    CHECK(r.code == 2);
  }
  SUBCASE("methods without a band fail") {
    const CliResult r = run_cli(with_geometry({"attn-sim", "--method", "none"}));
    CHECK(r.code == 1);
    CHECK(r.err.find("band") != std::string::npos);
  }
}

TEST_CASE("sweep") {
  SUBCASE("a 1x1 grid matches the single bound run") {
    const CliResult sweep = run_cli(with_geometry({"sweep", "--method", "mrrope-pro", "--scale",
                                                  "16", "--dl-range", "21", "--dh-range", "47",
                                                  "--grid-step", "256"}));
    REQUIRE(sweep.code == 0);
    const CliResult bound = run_cli(with_geometry(
        {"bound", "--methods", "mrrope-pro", "--scale", "16", "--grid-step", "256"}));
    REQUIRE(bound.code == 0);
    const auto root_pos = bound.out.find("\nmrrope-pro,");
    const std::string root = bound.out.substr(root_pos + 12, 6);
    CHECK(sweep.out.find("21,47," + root) != std::string::npos);
  }
  SUBCASE("degenerate cells emit empty roots, not errors") {
    const CliResult r = run_cli(with_geometry({"sweep", "--method", "mrrope-uni", "--scale", "4",
                                               "--dl-range", "30:31", "--dh-range", "30:31",
                                               "--grid-step", "256"}));
    REQUIRE(r.code == 0);
    CHECK(r.out.find("30,30,\n") != std::string::npos);
    CHECK(r.out.find("31,30,\n") != std::string::npos);
    CHECK(r.out.find("31,31,\n") != std::string::npos);
    CHECK(r.out.find("30,31,") != std::string::npos);
  }
  SUBCASE("a 5x5 grid has no empty roots on valid cells") {
    const CliResult r = run_cli({"sweep", "--method", "mrrope-pro", "--scale", "16",
                                 "--dl-range", "17:21", "--dh-range", "33:37", "--grid-step",
                                 "512", "--base", "500000", "--head-dim", "128",
                                 "--trained-len", "8192"});
    REQUIRE(r.code == 0);
    std::istringstream lines(r.out);
    std::string line;
    std::getline(lines, line);  // header
    int rows = 0;
    while (std::getline(lines, line)) {
      ++rows;
      CHECK(line.back() != ',');               // root present
      CHECK(line.find("nan") == std::string::npos);
    }
    CHECK(rows == 25);
  }
  SUBCASE("swept boundaries recover the closed-form partition") {
    // the (21, 47) cell corresponds to (alpha, beta) = (1, 32)
    const mrrope::RopeParams params{10000.0, 128, 4096};
    const mrrope::Boundaries band = mrrope::compute_boundaries(params, 1.0, 32.0);
    CHECK(band.d_low == 21);
    CHECK(band.d_high == 47);
    const auto plan = mrrope::plan_yarn_with_band(params, 16.0, band);
    const mrrope::Boundaries again =
        mrrope::compute_boundaries(params, plan.alpha, plan.beta_hp);
    CHECK(again.d_low == band.d_low);
    CHECK(again.d_high == band.d_high);
  }
}

TEST_CASE("usage surface") {
  SUBCASE("no subcommand is an error") {
    CHECK(run_cli({}).code != 0);
  }
  SUBCASE("help exits cleanly") {
    CHECK(run_cli({"--help"}).code == 0);
  }
}

namespace {

// decimal comma and dotted thousands grouping, the worst case for CSV
struct HostileNumpunct : std::numpunct<char> {
  char do_decimal_point() const override { return ','; }
  char do_thousands_sep() const override { return '.'; }
  std::string do_grouping() const override { return "\3"; }
};

}  // namespace

TEST_CASE("CSV output ignores the stream locale") {
  std::ostringstream out, err;
  out.imbue(std::locale(std::locale::classic(), new HostileNumpunct));
  const int code = mrrope::cli::run(with_geometry({"freqs"}), out, err);
  REQUIRE(code == 0);
  const std::string text = out.str();
  CHECK(text.find("651.898647") != std::string::npos);  // progress of pair 1
  CHECK(text.find("651,8") == std::string::npos);
  CHECK(text.find("4.096") == std::string::npos);  // no digit grouping
}
