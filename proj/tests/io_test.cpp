#include "feedresp/io.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>

using namespace feedresp;
namespace fs = std::filesystem;

namespace {

class TempDir {
 public:
  TempDir() {
    path_ = fs::temp_directory_path() /
            ("feedresp_io_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
             "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  fs::path operator/(const std::string& name) const { return path_ / name; }

 private:
  fs::path path_;
};

std::string expect_input_error(const std::string& text) {
  try {
    parse_users_csv(text, "users.csv");
  } catch (const InputError& e) {
    return e.what();
  }
  ADD_FAILURE() << "no InputError for:\n" << text;
  return {};
}

const std::string kHeader = std::string(kUsersHeader) + "\n";

}  // namespace

TEST(FormatDouble, RoundTrips) {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, 123456789.125, -2.5}) {
    EXPECT_EQ(std::stod(format_double(v)), v);
  }
  EXPECT_EQ(format_double(0.5), "0.5");
}

TEST(UsersCsv, RoundTrip) {
  TempDir dir;
  std::vector<UserRecord> users{{"a", 0.25, 10, Stance::supporter, 1, 3, 2},
                                {"b", 1.0 / 3.0, 0, Stance::opponent, 0, 0, 0},
                                {"c", 12.5, 4, Stance::neutral, 5, 5, 40}};
  write_users_csv(dir / "u.csv", users, {{"seed", "3"}});
  const auto back = read_users_csv(dir / "u.csv");
  ASSERT_EQ(back.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(back[i].user_id, users[i].user_id);
    EXPECT_EQ(back[i].posting_rate, users[i].posting_rate);
    EXPECT_EQ(back[i].stance, users[i].stance);
    EXPECT_EQ(back[i].responses, users[i].responses);
  }
  const auto text = read_text_file(dir / "u.csv");
  EXPECT_EQ(text.rfind("# seed: 3\n", 0), 0u);
}

TEST(UsersCsv, MalformedStanceNamesRow) {
  const auto msg = expect_input_error(kHeader + "a,1,2,supporter,1,2,0\nb,1,2,fan,1,2,0\n");
  EXPECT_NE(msg.find("line 3"), std::string::npos) << msg;
  EXPECT_NE(msg.find("fan"), std::string::npos) << msg;
}

TEST(UsersCsv, RejectsBadRows) {
  EXPECT_NE(expect_input_error(kHeader + "a,x,2,supporter,1,2,0\n").find("posting_rate"),
            std::string::npos);
  EXPECT_NE(expect_input_error(kHeader + "a,1,2,supporter,3,2,0\n").find("topic_posts"),
            std::string::npos);
  EXPECT_NE(expect_input_error(kHeader + "a,1,2,supporter,1,2\n").find("7 fields"),
            std::string::npos);
  EXPECT_NE(expect_input_error(kHeader + "a,1,2,supporter,1,2,0\na,1,2,supporter,1,2,0\n")
                .find("duplicate"),
            std::string::npos);
  EXPECT_NE(expect_input_error(kHeader + "a,1,2.5,supporter,1,2,0\n").find("friend_count"),
            std::string::npos);
  EXPECT_NE(expect_input_error("id,rate\n").find("header"), std::string::npos);
  EXPECT_NE(expect_input_error(kHeader).find("no user rows"), std::string::npos);
}

TEST(UsersCsv, EmptyFileNamesFile) {
  TempDir dir;
  write_text_file(dir / "empty.csv", "");
  try {
    read_users_csv(dir / "empty.csv");
    FAIL();
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("empty.csv"), std::string::npos);
  }
  EXPECT_THROW(read_users_csv(dir / "missing.csv"), InputError);
}

TEST(PredictionsCsv, RoundTripIsExact) {
  TempDir dir;
  std::vector<PredictionRecord> rows{{"a", 1.0 / 7.0, 0.3, 2, 1.857142857142857, 391},
                                     {"b", 0.0, 0.0, 0, 0.0, 391}};
  write_predictions_csv(dir / "p.csv", rows, {});
  const auto back = read_predictions_csv(dir / "p.csv");
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0].predicted_mean, rows[0].predicted_mean);
  EXPECT_EQ(back[0].abs_error, rows[0].abs_error);
  EXPECT_EQ(back[1].advocate_posts, 391);
}

TEST(ParamsFile, StochasticRoundTrip) {
  TempDir dir;
  ParamsFile file;
  file.params = {12.0, 13.0, 37.25, 0.125};
  FitResult fit;
  fit.params = file.params;
  fit.log_likelihood = -123.5;
  fit.converged = true;
  fit.confidence_intervals["p_act"] = {0.1, 0.15, "profile", false};
  fit.confidence_intervals["views_per_post"] = {30, HUGE_VAL, "curvature", true};
  fit.excluded_users.push_back({"z", "zero posting rate"});
  file.fit = fit;
  write_params_file(dir / "params.json", file, {{"seed", "1"}});
  const auto back = read_params_file(dir / "params.json");
  EXPECT_EQ(back.kind, ModelKind::stochastic);
  EXPECT_EQ(back.params.views_per_post, 37.25);
  EXPECT_EQ(back.params.lambda, 13.0);
  ASSERT_TRUE(back.fit);
  EXPECT_EQ(back.fit->confidence_intervals.at("p_act").high, 0.15);
  EXPECT_TRUE(std::isinf(back.fit->confidence_intervals.at("views_per_post").high));
  EXPECT_EQ(back.fit->excluded_users.at(0).reason, "zero posting rate");
}

TEST(ParamsFile, LogisticRoundTrip) {
  TempDir dir;
  ParamsFile file;
  file.kind = ModelKind::logistic;
  file.logistic = LogisticFit{-5.01, 0.11, 0.02, 0.01, 6, {"q"}};
  write_params_file(dir / "params.json", file, {});
  const auto back = read_params_file(dir / "params.json");
  EXPECT_EQ(back.kind, ModelKind::logistic);
  EXPECT_EQ(back.logistic->beta0, -5.01);
  EXPECT_EQ(back.logistic->skipped_users, std::vector<std::string>{"q"});
}

TEST(ParamsFile, Errors) {
  TempDir dir;
  EXPECT_THROW(read_params_file(dir / "none.json"), InputError);
  write_text_file(dir / "bad.json", R"({"model": "stochastic", "params": {"mu": -1}})");
  EXPECT_THROW(read_params_file(dir / "bad.json"), InputError);
  write_text_file(dir / "extra.json", R"({"params": {}, "oops": 1})");
  EXPECT_THROW(read_params_file(dir / "extra.json"), InputError);
}

TEST(RunConfig, DefaultsAndOverrides) {
  const auto c = parse_run_config(R"({
    "population": {"advocate_post_count": 391, "typical_friend_rate": 2.0},
    "model": {"views_per_post": 40},
    "fit": {"free": ["mu", "views_per_post", "p_act"], "starts": 2,
            "views_grid": {"low": 5, "high": 100, "points": 4}},
    "seed": 99,
    "simulation": {"user_count": 50, "stance_mix": {"supporter": 0.5, "opponent": 0.5}}
  })", "cfg.json");
  EXPECT_EQ(c.population.advocate_post_count, 391);
  ASSERT_TRUE(c.model);
  EXPECT_EQ(c.model->views_per_post, 40.0);
  EXPECT_EQ(c.model->p_act, 0.12);
  EXPECT_EQ(c.fit.initial.views_per_post, 40.0);
  EXPECT_EQ(c.fit.free, FreeParameters::surfing_views_and_p_act);
  EXPECT_EQ(c.fit.views_grid.points, 4);
  EXPECT_EQ(c.simulation.population.user_count, 50);
  EXPECT_EQ(c.simulation.population.advocate_post_count, 391);
  EXPECT_EQ(c.simulation.population.seed, 99u);
  EXPECT_EQ(c.fraction, 0.25);
  EXPECT_FALSE(parse_run_config("{}", "x").model);
  EXPECT_FALSE(parse_run_config(R"({"model": "fit"})", "x").model);
}

TEST(RunConfig, UnknownKeysRejectedAtAnyDepth) {
  for (const char* text : {R"({"sed": 1})", R"({"fit": {"start": 2}})",
                           R"({"simulation": {"posting_rate_law": {"mean": 1}}})",
                           R"({"population": {"N": 400}})"}) {
    try {
      parse_run_config(text, "cfg.json");
      ADD_FAILURE() << text;
    } catch (const InputError& e) {
      EXPECT_NE(std::string(e.what()).find("unknown key"), std::string::npos) << e.what();
    }
  }
}

TEST(RunConfig, RejectsBadValues) {
  EXPECT_THROW(parse_run_config(R"({"fraction": 1.5})", "x"), InputError);
  EXPECT_THROW(parse_run_config(R"({"seed": -1})", "x"), InputError);
  EXPECT_THROW(parse_run_config(R"({"model": "guess"})", "x"), InputError);
  EXPECT_THROW(parse_run_config(R"({"fit": {"free": ["p_act"]}})", "x"), InputError);
  EXPECT_THROW(parse_run_config(R"({"simulation": {"user_count": 0}})", "x"), InputError);
  EXPECT_THROW(parse_run_config("{not json", "x"), InputError);
}

TEST(RunConfig, HashIsCanonical) {
  const auto a = parse_run_config(R"({"seed": 4, "fraction": 0.25})", "a");
  const auto b = parse_run_config(R"({"fraction": 0.25, "seed": 4})", "b");
  const auto c = parse_run_config(R"({"seed": 5})", "c");
  EXPECT_EQ(config_hash(a), config_hash(b));
  EXPECT_NE(config_hash(a), config_hash(c));
  EXPECT_EQ(config_hash(a).size(), 16u);
  auto moved = a;
  moved.output_dir = "elsewhere";
  EXPECT_EQ(config_hash(moved), config_hash(a));
  // The canonical dump parses back to the same configuration.
  const auto again = parse_run_config(dump_run_config(c), "dump");
  EXPECT_EQ(config_hash(again), config_hash(c));
}
