#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace feedresp {

/// Raised when an argument lies outside the domain of a probability law.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Raised for malformed input data (files, configs, records).
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when a model computation cannot produce a meaningful result.
class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Stance { supporter, opponent, neutral };

std::string_view to_string(Stance s);
Stance parse_stance(std::string_view text);

/// Observables for one follower of an advocate.
struct UserRecord {
  std::string user_id;
  double posting_rate = 0.0;     // posts per day
  std::int64_t friend_count = 0;
  Stance stance = Stance::supporter;
  std::int64_t topic_posts = 0;  // m
  std::int64_t total_posts = 0;  // n
  std::int64_t responses = 0;    // M

  /// Checks the record-local invariants; throws InputError.
  void validate() const;
};

/// Constants shared by all followers of one advocate.
struct PopulationParams {
  std::string advocate_id;
  std::int64_t advocate_post_count = 1;  // N
  double typical_friend_rate = 1.0;      // median friend posting rate, posts/day

  void validate() const;
  /// Throws InputError if the user's response count exceeds N.
  void check_user(const UserRecord& user) const;
};

/// Global model parameters.
struct ModelParams {
  double mu = 14.0;
  double lambda = 14.0;
  double views_per_post = 38.0;
  double p_act = 0.12;

  void validate() const;
};

struct DerivedUserRates {
  double receive_rate = 0.0;
  double visit_rate = 0.0;
  double rho = 0.0;
  double p_visible = 0.0;
  /// Set when the record carried no visit information (zero posting rate).
  bool degenerate = false;
};

struct ResponseDistribution {
  std::vector<double> pmf;
  double mean = 0.0;
  double std_dev = 0.0;
};

}  // namespace feedresp
