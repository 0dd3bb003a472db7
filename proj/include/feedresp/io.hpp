#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "feedresp/estimation.hpp"
#include "feedresp/inference.hpp"
#include "feedresp/simulator.hpp"
#include "feedresp/types.hpp"

namespace feedresp {

inline constexpr const char* kToolVersion = "0.1.0";

/// Ordered key/value pairs written ahead of every output file.
using Metadata = std::vector<std::pair<std::string, std::string>>;

/// Shortest text that parses back to the same double.
std::string format_double(double value);

// --- users -----------------------------------------------------------------

inline constexpr const char* kUsersHeader =
    "user_id,posting_rate,friend_count,stance,topic_posts,total_posts,responses";

/// Reads a users table. Lines starting with '#' are metadata and skipped.
/// Throws InputError naming the file and row on any problem.
std::vector<UserRecord> read_users_csv(const std::filesystem::path& path);
std::vector<UserRecord> parse_users_csv(const std::string& text, const std::string& source);
void write_users_csv(const std::filesystem::path& path, const std::vector<UserRecord>& users,
                     const Metadata& meta);
void write_truths_csv(const std::filesystem::path& path, const std::vector<UserTruth>& truths,
                      const Metadata& meta);

// --- predictions -----------------------------------------------------------

inline constexpr const char* kPredictionsHeader =
    "user_id,predicted_mean,predicted_std,observed,abs_error,advocate_posts";

std::vector<PredictionRecord> read_predictions_csv(const std::filesystem::path& path);
void write_predictions_csv(const std::filesystem::path& path,
                           const std::vector<PredictionRecord>& rows, const Metadata& meta);

// --- parameters ------------------------------------------------------------

enum class ModelKind { stochastic, logistic };

std::string_view to_string(ModelKind kind);
ModelKind parse_model_kind(std::string_view text);

/// Contents of a params file: one fitted (or hand-set) model.
struct ParamsFile {
  ModelKind kind = ModelKind::stochastic;
  ModelParams params;
  std::optional<FitResult> fit;    // stochastic fit details when produced by `fit`
  std::optional<LogisticFit> logistic;
};

ParamsFile read_params_file(const std::filesystem::path& path);
void write_params_file(const std::filesystem::path& path, const ParamsFile& file,
                       const Metadata& meta);

// --- run configuration -----------------------------------------------------

struct SimulationConfig {
  PopulationConfig population;
  ModelParams params;  // drives the generated responses
};

struct RunConfig {
  PopulationParams population{"advocate", 400, 1.61};
  std::optional<ModelParams> model;  // nullopt: "fit"
  ModelKind model_kind = ModelKind::stochastic;
  FitConfig fit;
  std::uint64_t seed = 1;
  int posterior_grid = 1001;
  double fraction = 0.25;
  std::int64_t bootstrap_resamples = 10000;
  bool response_distributions = false;
  std::string output_dir = ".";
  SimulationConfig simulation;
};

/// Parses a JSON run configuration. Every key is optional; unknown keys
/// anywhere in the document raise InputError.
RunConfig parse_run_config(const std::string& text, const std::string& source);
RunConfig read_run_config(const std::filesystem::path& path);
/// Canonical JSON with all defaults filled in.
std::string dump_run_config(const RunConfig& config);
/// FNV-1a of the canonical dump without the output directory, as 16 hex
/// digits.
std::string config_hash(const RunConfig& config);

/// Whole-file text helpers; parent directories are created on write.
void write_text_file(const std::filesystem::path& path, const std::string& text);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace feedresp
