#include <filesystem>
#include <string>

#include <gtest/gtest.h>

#include "kboot/config.hpp"

using namespace kboot;
using nlohmann::json;

namespace {

json minimal() {
  return json::parse(R"({"rounds": 10, "policy": {"type": "kboot"}, "environment": {"type": "synthetic"}})");
}

std::string error_of(const json& j) {
  try {
    parse_config(j);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "accepted";
}

}  // namespace

TEST(Config, Defaults) {
  const auto c = parse_config(minimal());
  EXPECT_EQ(c.rounds, 10u);
  EXPECT_EQ(c.runs, 1u);
  EXPECT_EQ(c.policy.kind, PolicyKind::kboot);
  EXPECT_EQ(c.policy.K, 100u);
  EXPECT_EQ(c.policy.epsilon, 0.01);
  EXPECT_EQ(c.env.arms, 10u);
  EXPECT_EQ(c.env.dim, 20u);
  EXPECT_FALSE(c.policy.ec);
  EXPECT_TRUE(c.output.csv);
}

TEST(Config, ErrorsNameTheKey) {
  auto j = minimal();
  j["policy"]["Kk"] = 3;
  EXPECT_NE(error_of(j).find("policy.Kk"), std::string::npos);

  j = minimal();
  j["rounds"] = "ten";
  EXPECT_NE(error_of(j).find("'rounds'"), std::string::npos);

  j = minimal();
  j.erase("rounds");
  EXPECT_NE(error_of(j).find("'rounds'"), std::string::npos);

  j = minimal();
  j["policy"]["type"] = "neuralucb";
  EXPECT_NE(error_of(j).find("policy.type"), std::string::npos);

  j = minimal();
  j["policy"]["ec"] = {{"alpha", 0.5}};
  EXPECT_NE(error_of(j).find("environment.eligibility"), std::string::npos);

  j = minimal();
  j["environment"]["eligibility"] = {{"target_rho", 0.3}};
  j["policy"]["ec"] = {{"alpha", 1.5}};
  EXPECT_NE(error_of(j).find("policy.ec.alpha"), std::string::npos);

  j = minimal();
  j["environment"]["family"] = "cubic";
  EXPECT_NE(error_of(j).find("environment.family"), std::string::npos);

  j = minimal();
  j["sweep"] = {{"alpha", {0.1, 0.5}}};
  EXPECT_NE(error_of(j).find("sweep.alpha"), std::string::npos);

  j = minimal();
  j["environment"]["eligibility"] = {{"target_rho", 0.3}};
  j["policy"]["ec"] = {{"pinned_k", 11}};
  EXPECT_NE(error_of(j).find("policy.ec.pinned_k"), std::string::npos);
}

TEST(Config, EchoReparses) {
  auto j = minimal();
  j["environment"]["eligibility"] = {{"target_rho", 0.45}};
  j["policy"]["ec"] = {{"alpha", 0.3}, {"update_period", 25}};
  const auto c = parse_config(j);
  const auto again = parse_config(config_to_json(c));
  EXPECT_EQ(config_to_json(again), config_to_json(c));
  EXPECT_EQ(again.policy.ec->update_period, 25u);
}

TEST(Config, ShippedConfigsValidate) {
  std::size_t count = 0;
  for (const auto& entry : std::filesystem::directory_iterator(KBOOT_CONFIG_DIR)) {
    if (entry.path().extension() != ".json") continue;
    EXPECT_NO_THROW(load_config(entry.path().string())) << entry.path();
    ++count;
  }
  EXPECT_GE(count, 3u);
}

TEST(Config, BrokenFixturesRejected) {
  std::size_t count = 0;
  for (const auto& entry : std::filesystem::directory_iterator(std::string(KBOOT_TEST_DATA) + "/bad_configs")) {
    EXPECT_THROW(load_config(entry.path().string()), ConfigError) << entry.path();
    ++count;
  }
  EXPECT_GE(count, 5u);
}
