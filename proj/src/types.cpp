#include "feedresp/types.hpp"

#include <cmath>

namespace feedresp {

std::string_view to_string(Stance s) {
  switch (s) {
    case Stance::supporter:
      return "supporter";
    case Stance::opponent:
      return "opponent";
    case Stance::neutral:
      return "neutral";
  }
  return "unknown";
}

Stance parse_stance(std::string_view text) {
  if (text == "supporter") return Stance::supporter;
  if (text == "opponent") return Stance::opponent;
  if (text == "neutral") return Stance::neutral;
  throw InputError("invalid stance '" + std::string(text) +
                   "' (expected supporter, opponent or neutral)");
}

void UserRecord::validate() const {
  if (!std::isfinite(posting_rate) || posting_rate < 0.0)
    throw InputError("user " + user_id + ": posting_rate must be finite and >= 0");
  if (friend_count < 0) throw InputError("user " + user_id + ": friend_count must be >= 0");
  if (topic_posts < 0 || total_posts < 0 || responses < 0)
    throw InputError("user " + user_id + ": post counts must be >= 0");
  if (topic_posts > total_posts)
    throw InputError("user " + user_id + ": topic_posts exceeds total_posts");
}

void PopulationParams::validate() const {
  if (advocate_post_count < 1) throw InputError("advocate_post_count must be >= 1");
  if (!std::isfinite(typical_friend_rate) || typical_friend_rate <= 0.0)
    throw InputError("typical_friend_rate must be > 0");
}

void PopulationParams::check_user(const UserRecord& user) const {
  user.validate();
  if (user.responses > advocate_post_count)
    throw InputError("user " + user.user_id + ": responses exceed advocate_post_count");
}

void ModelParams::validate() const {
  if (!(mu > 0.0) || !(lambda > 0.0) || !(views_per_post > 0.0))
    throw DomainError("mu, lambda and views_per_post must be > 0");
  if (!(p_act >= 0.0 && p_act <= 1.0)) throw DomainError("p_act must lie in [0, 1]");
}

}  // namespace feedresp
