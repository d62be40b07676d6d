#include <cstdio>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "mrrope/model_config.hpp"
#include "mrrope/plan_doc.hpp"
#include "mrrope/series_io.hpp"

using namespace mrrope;

namespace {

const RopeParams kLlama2{10000.0, 128, 4096};

std::filesystem::path temp_file(const char* name) {
  return std::filesystem::temp_directory_path() / name;
}

}  // namespace

TEST_CASE("model config parsing") {
  SUBCASE("direct head_dim") {
    const auto doc = parse_model_config(
        R"({"rope_theta": 500000.0, "head_dim": 128, "max_position_embeddings": 8192})");
    const RopeParams params = doc.to_rope_params();
    CHECK(params.base == 500000.0);
    CHECK(params.head_dim == 128);
    CHECK(params.trained_len == 8192);
  }
  SUBCASE("head_dim resolved from hidden_size / num_attention_heads") {
    const auto doc = parse_model_config(
        R"({"rope_theta": 10000.0, "hidden_size": 4096, "num_attention_heads": 32,
            "max_position_embeddings": 4096})");
    CHECK(doc.resolved_head_dim() == 128);
  }
  SUBCASE("unknown fields are ignored") {
    const auto doc = parse_model_config(
        R"({"rope_theta": 10000.0, "head_dim": 64, "max_position_embeddings": 2048,
            "model_type": "llama", "vocab_size": 32000})");
    CHECK(doc.resolved_head_dim() == 64);
  }
  SUBCASE("odd resolved head_dim names the field") {
    const auto doc = parse_model_config(
        R"({"rope_theta": 10000.0, "hidden_size": 99, "num_attention_heads": 9,
            "max_position_embeddings": 2048})");
    CHECK_THROWS_WITH_AS(doc.resolved_head_dim(), doctest::Contains("head_dim"),
                         std::invalid_argument);
  }
  SUBCASE("missing geometry names the fields") {
    const auto doc = parse_model_config(R"({"rope_theta": 1.5, "max_position_embeddings": 64})");
    CHECK_THROWS_WITH_AS(doc.resolved_head_dim(), doctest::Contains("head_dim"),
                         std::invalid_argument);
  }
  SUBCASE("missing max_position_embeddings is an error") {
    CHECK_THROWS_WITH_AS(parse_model_config(R"({"rope_theta": 1.5, "head_dim": 8})"),
                         doctest::Contains("max_position_embeddings"), std::invalid_argument);
  }
  SUBCASE("invalid JSON is an error") {
    CHECK_THROWS_AS(parse_model_config("not json"), std::invalid_argument);
  }
  SUBCASE("load from file") {
    const auto path = temp_file("mrrope_config_test.json");
    {
      std::ofstream out(path);
      out << R"({"rope_theta": 10000.0, "head_dim": 128, "max_position_embeddings": 4096})";
    }
    const auto doc = load_model_config(path);
    CHECK(doc.to_rope_params().head_dim == 128);
    std::filesystem::remove(path);
    CHECK_THROWS_AS(load_model_config(path), std::invalid_argument);
  }
}

TEST_CASE("plan document round trip") {
  const ScalePlan plan = plan_mrrope_pro(kLlama2, 16.0);
  const ScalePlanDoc doc = make_plan_doc(plan, kLlama2);

  SUBCASE("documented band and multipliers") {
    CHECK(doc.method == "mrrope-pro");
    CHECK(doc.d_low == 21);
    CHECK(doc.d_high == 47);
    CHECK(doc.original_max_position_embeddings == 4096);
    CHECK(doc.inv_freq_multipliers.front() == 1.0);
    CHECK(doc.inv_freq_multipliers.size() == 64);
  }
  SUBCASE("JSON serialization is lossless") {
    const ScalePlanDoc back = plan_doc_from_json(to_json(doc));
    CHECK(back == doc);
  }
  SUBCASE("file round trip recompiles to identical frequencies") {
    const auto path = temp_file("mrrope_plan_test.json");
    save_plan_doc(doc, path);
    const ScalePlanDoc loaded = load_plan_doc(path);
    std::filesystem::remove(path);
    REQUIRE(loaded == doc);

    const ScalePlan rebuilt = plan_from_doc(loaded);
    const FrequencySchedule original = scaled_frequencies(kLlama2, plan);
    const FrequencySchedule recompiled = scaled_frequencies(kLlama2, rebuilt);
    for (int j = 1; j <= 64; ++j) {
      CHECK(recompiled.theta(j) == doctest::Approx(original.theta(j)).epsilon(1e-12));
    }
  }
  SUBCASE("malformed documents are rejected") {
    CHECK_THROWS_AS(plan_doc_from_json("{}"), std::invalid_argument);
    CHECK_THROWS_AS(plan_doc_from_json("["), std::invalid_argument);
    ScalePlanDoc bad = doc;
    bad.method = "bogus";
    CHECK_THROWS_AS(plan_from_doc(bad), std::invalid_argument);
    bad = doc;
    bad.inv_freq_multipliers.front() = 2.0;
    CHECK_THROWS_AS(plan_from_doc(bad), std::invalid_argument);
  }
}

TEST_CASE("series CSV") {
  DiagnosticSeries series;
  series.label = "demo";
  series.xs = {0.0, 1.0, 2.0};
  series.ys = {64.0, 0.123456789123, -1.0};

  SUBCASE("without spread the third column stays empty") {
    CHECK(series_to_csv(series) == "x,y,spread\n0,64,\n1,0.123456789,\n2,-1,\n");
  }
  SUBCASE("with spread all three columns are filled") {
    series.spread = std::vector<double>{0.5, 0.25, 0.125};
    CHECK(series_to_csv(series) == "x,y,spread\n0,64,0.5\n1,0.123456789,0.25\n2,-1,0.125\n");
  }
  SUBCASE("nine significant digits, point decimal separator") {
    series.ys = {1234567890.0, 3.14159265358979, 0.000012345678912};
    const std::string csv = series_to_csv(series);
    CHECK(csv.find("1.23456789e+09") != std::string::npos);
    CHECK(csv.find("3.14159265") != std::string::npos);
    CHECK(csv.find("1.23456789e-05") != std::string::npos);
  }
  SUBCASE("invalid series refuse to serialize") {
    series.xs = {2.0, 1.0, 0.0};
    CHECK_THROWS_AS(series_to_csv(series), std::invalid_argument);
  }
}

TEST_CASE("series JSON") {
  DiagnosticSeries series;
  series.label = "demo";
  series.xs = {0.0, 1.0};
  series.ys = {1.0, 2.0};
  SUBCASE("spread omitted when absent") {
    const std::string json = series_to_json(series);
    CHECK(json.find("\"label\": \"demo\"") != std::string::npos);
    CHECK(json.find("spread") == std::string::npos);
  }
  SUBCASE("spread present when set") {
    series.spread = std::vector<double>{0.1, 0.2};
    CHECK(series_to_json(series).find("spread") != std::string::npos);
  }
}
