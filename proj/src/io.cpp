#include "feedresp/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <json.hpp>
#include <set>
#include <sstream>

#include "feedresp/rng.hpp"

namespace feedresp {
namespace {

using nlohmann::json;

std::vector<std::string> split_fields(std::string_view line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    fields.emplace_back(line.substr(start, comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

double parse_double(const std::string& text, const char* field) {
  double value = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end || text.empty())
    throw InputError(std::string(field) + ": '" + text + "' is not a number");
  return value;
}

std::int64_t parse_int(const std::string& text, const char* field) {
  std::int64_t value = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end || text.empty())
    throw InputError(std::string(field) + ": '" + text + "' is not an integer");
  return value;
}

// Splits a table file into data lines, checking the header. Returns pairs of
// (1-based line number, line).
std::vector<std::pair<std::size_t, std::string>> table_lines(const std::string& text,
                                                            const std::string& source,
                                                            const char* header) {
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  bool seen_header = false;
  std::vector<std::pair<std::size_t, std::string>> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    if (!seen_header) {
      if (line != header)
        throw InputError(source + ": line " + std::to_string(line_no) + ": expected header '" +
                         header + "'");
      seen_header = true;
      continue;
    }
    rows.emplace_back(line_no, line);
  }
  if (!seen_header) throw InputError(source + ": file is empty (no header)");
  return rows;
}

std::string metadata_block(const Metadata& meta) {
  std::string out;
  for (const auto& [key, value] : meta) out += "# " + key + ": " + value + "\n";
  return out;
}

json metadata_json(const Metadata& meta) {
  json out = json::object();
  for (const auto& [key, value] : meta) out[key] = value;
  return out;
}

// Non-finite values have no JSON spelling; they are written as null.
json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double read_number(const json& v, const std::string& where, double if_null = HUGE_VAL) {
  if (v.is_null()) return if_null;
  if (!v.is_number()) throw InputError(where + ": expected a number");
  return v.get<double>();
}

// Walks a JSON object, handing out keys and rejecting any left unread.
class ObjectReader {
 public:
  ObjectReader(const json& object, std::string where) : obj_(object), where_(std::move(where)) {
    if (!obj_.is_object()) throw InputError(where_ + ": expected an object");
  }

  const json* find(const std::string& key) {
    seen_.insert(key);
    const auto it = obj_.find(key);
    return it == obj_.end() ? nullptr : &*it;
  }
  std::string path(const std::string& key) const { return where_ + "." + key; }

  void number(const std::string& key, double& out) {
    if (const auto* v = find(key)) {
      if (!v->is_number()) throw InputError(path(key) + ": expected a number");
      out = v->get<double>();
    }
  }
  void integer(const std::string& key, std::int64_t& out) {
    if (const auto* v = find(key)) {
      if (!v->is_number_integer()) throw InputError(path(key) + ": expected an integer");
      out = v->get<std::int64_t>();
    }
  }
  void integer(const std::string& key, int& out) {
    std::int64_t wide = out;
    integer(key, wide);
    out = static_cast<int>(wide);
  }
  void unsigned_integer(const std::string& key, std::uint64_t& out) {
    if (const auto* v = find(key)) {
      if (!v->is_number_unsigned()) throw InputError(path(key) + ": expected a nonnegative integer");
      out = v->get<std::uint64_t>();
    }
  }
  void boolean(const std::string& key, bool& out) {
    if (const auto* v = find(key)) {
      if (!v->is_boolean()) throw InputError(path(key) + ": expected true or false");
      out = v->get<bool>();
    }
  }
  void string(const std::string& key, std::string& out) {
    if (const auto* v = find(key)) {
      if (!v->is_string()) throw InputError(path(key) + ": expected a string");
      out = v->get<std::string>();
    }
  }
  void finish() const {
    for (const auto& [key, _] : obj_.items())
      if (!seen_.count(key)) throw InputError(where_ + ": unknown key '" + key + "'");
  }

 private:
  const json& obj_;
  std::string where_;
  std::set<std::string> seen_;
};

ModelParams parse_model_params(const json& v, const std::string& where, ModelParams p = {}) {
  ObjectReader r(v, where);
  r.number("mu", p.mu);
  r.number("lambda", p.lambda);
  r.number("views_per_post", p.views_per_post);
  r.number("p_act", p.p_act);
  r.finish();
  try {
    p.validate();
  } catch (const DomainError& e) {
    throw InputError(where + ": " + e.what());
  }
  return p;
}

json model_params_json(const ModelParams& p) {
  return {{"mu", p.mu}, {"lambda", p.lambda}, {"views_per_post", p.views_per_post},
          {"p_act", p.p_act}};
}

void parse_grid(ObjectReader& parent, const std::string& key, GridAxis& axis) {
  if (const auto* v = parent.find(key)) {
    ObjectReader r(*v, parent.path(key));
    r.number("low", axis.low);
    r.number("high", axis.high);
    r.integer("points", axis.points);
    r.finish();
  }
}

void parse_bounds(ObjectReader& parent, const std::string& key, double& low, double& high) {
  if (const auto* v = parent.find(key)) {
    if (!v->is_array() || v->size() != 2 || !(*v)[0].is_number() || !(*v)[1].is_number())
      throw InputError(parent.path(key) + ": expected [low, high]");
    low = (*v)[0].get<double>();
    high = (*v)[1].get<double>();
  }
}

json grid_json(const GridAxis& g) { return {{"low", g.low}, {"high", g.high}, {"points", g.points}}; }

std::vector<std::string> free_names(FreeParameters f) {
  if (f == FreeParameters::surfing_views_and_p_act) return {"mu", "p_act", "views_per_post"};
  return {"p_act", "views_per_post"};
}

}  // namespace

std::string format_double(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return ec == std::errc() ? std::string(buf, ptr) : std::string("nan");
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(path.string() + ": cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError(path.string() + ": cannot write file");
  out << text;
  if (!out) throw InputError(path.string() + ": write failed");
}

// --- users -----------------------------------------------------------------

std::vector<UserRecord> parse_users_csv(const std::string& text, const std::string& source) {
  std::vector<UserRecord> users;
  std::set<std::string> ids;
  for (const auto& [line_no, line] : table_lines(text, source, kUsersHeader)) {
    const std::string where = source + ": line " + std::to_string(line_no);
    try {
      const auto f = split_fields(line);
      if (f.size() != 7)
        throw InputError("expected 7 fields, found " + std::to_string(f.size()));
      UserRecord u;
      u.user_id = f[0];
      if (u.user_id.empty()) throw InputError("user_id is empty");
      u.posting_rate = parse_double(f[1], "posting_rate");
      u.friend_count = parse_int(f[2], "friend_count");
      u.stance = parse_stance(f[3]);
      u.topic_posts = parse_int(f[4], "topic_posts");
      u.total_posts = parse_int(f[5], "total_posts");
      u.responses = parse_int(f[6], "responses");
      u.validate();
      if (!ids.insert(u.user_id).second) throw InputError("duplicate user_id '" + u.user_id + "'");
      users.push_back(std::move(u));
    } catch (const InputError& e) {
      throw InputError(where + ": " + e.what());
    }
  }
  if (users.empty()) throw InputError(source + ": file has no user rows");
  return users;
}

std::vector<UserRecord> read_users_csv(const std::filesystem::path& path) {
  const auto text = read_text_file(path);
  if (text.find_first_not_of(" \t\r\n") == std::string::npos)
    throw InputError(path.string() + ": file is empty");
  return parse_users_csv(text, path.string());
}

void write_users_csv(const std::filesystem::path& path, const std::vector<UserRecord>& users,
                     const Metadata& meta) {
  std::string out = metadata_block(meta);
  out += kUsersHeader;
  out += '\n';
  for (const auto& u : users) {
    out += u.user_id + ',' + format_double(u.posting_rate) + ',' + std::to_string(u.friend_count) +
           ',' + std::string(to_string(u.stance)) + ',' + std::to_string(u.topic_posts) + ',' +
           std::to_string(u.total_posts) + ',' + std::to_string(u.responses) + '\n';
  }
  write_text_file(path, out);
}

void write_truths_csv(const std::filesystem::path& path, const std::vector<UserTruth>& truths,
                      const Metadata& meta) {
  std::string out = metadata_block(meta);
  out += "user_id,p_topic,p_visible\n";
  for (const auto& t : truths)
    out += t.user_id + ',' + format_double(t.p_topic) + ',' + format_double(t.p_visible) + '\n';
  write_text_file(path, out);
}

// --- predictions -----------------------------------------------------------

std::vector<PredictionRecord> read_predictions_csv(const std::filesystem::path& path) {
  const auto text = read_text_file(path);
  std::vector<PredictionRecord> rows;
  std::set<std::string> ids;
  for (const auto& [line_no, line] : table_lines(text, path.string(), kPredictionsHeader)) {
    try {
      const auto f = split_fields(line);
      if (f.size() != 6)
        throw InputError("expected 6 fields, found " + std::to_string(f.size()));
      PredictionRecord r;
      r.user_id = f[0];
      r.predicted_mean = parse_double(f[1], "predicted_mean");
      r.predicted_std = parse_double(f[2], "predicted_std");
      r.observed = parse_int(f[3], "observed");
      r.abs_error = parse_double(f[4], "abs_error");
      r.advocate_posts = parse_int(f[5], "advocate_posts");
      if (r.advocate_posts < 1) throw InputError("advocate_posts must be >= 1");
      if (!ids.insert(r.user_id).second) throw InputError("duplicate user_id '" + r.user_id + "'");
      rows.push_back(std::move(r));
    } catch (const InputError& e) {
      throw InputError(path.string() + ": line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (rows.empty()) throw InputError(path.string() + ": file has no prediction rows");
  return rows;
}

void write_predictions_csv(const std::filesystem::path& path,
                           const std::vector<PredictionRecord>& rows, const Metadata& meta) {
  std::string out = metadata_block(meta);
  out += kPredictionsHeader;
  out += '\n';
  for (const auto& r : rows) {
    out += r.user_id + ',' + format_double(r.predicted_mean) + ',' +
           format_double(r.predicted_std) + ',' + std::to_string(r.observed) + ',' +
           format_double(r.abs_error) + ',' + std::to_string(r.advocate_posts) + '\n';
  }
  write_text_file(path, out);
}

// --- parameters ------------------------------------------------------------

std::string_view to_string(ModelKind kind) {
  return kind == ModelKind::logistic ? "logistic" : "stochastic";
}

ModelKind parse_model_kind(std::string_view text) {
  if (text == "stochastic") return ModelKind::stochastic;
  if (text == "logistic") return ModelKind::logistic;
  throw InputError("unknown model kind '" + std::string(text) +
                   "' (expected stochastic or logistic)");
}

void write_params_file(const std::filesystem::path& path, const ParamsFile& file,
                       const Metadata& meta) {
  json doc;
  doc["metadata"] = metadata_json(meta);
  doc["model"] = std::string(to_string(file.kind));
  if (file.kind == ModelKind::stochastic) {
    doc["params"] = model_params_json(file.params);
    if (file.fit) {
      const auto& f = *file.fit;
      json fit;
      fit["log_likelihood"] = number(f.log_likelihood);
      fit["converged"] = f.converged;
      fit["gradient_norm"] = number(f.gradient_norm);
      fit["p_act_at_boundary"] = f.p_act_at_boundary;
      fit["free_parameters"] = f.free_parameters;
      fit["evaluations"] = f.evaluations;
      fit["included_users"] = f.included_users;
      fit["method"] = "maximum likelihood; grid start, Nelder-Mead, Newton polish";
      json intervals = json::object();
      for (const auto& [name, iv] : f.confidence_intervals) {
        intervals[name] = {{"low", number(iv.low)},
                           {"high", number(iv.high)},
                           {"method", iv.method},
                           {"unbounded", iv.unbounded}};
      }
      fit["confidence_intervals_95"] = intervals;
      json excluded = json::array();
      for (const auto& e : f.excluded_users)
        excluded.push_back({{"user_id", e.user_id}, {"reason", e.reason}});
      fit["excluded_users"] = excluded;
      doc["fit"] = fit;
    }
  } else {
    if (!file.logistic) throw InputError("logistic params file without coefficients");
    const auto& l = *file.logistic;
    doc["logistic"] = {{"beta0", l.beta0},         {"beta1", l.beta1},
                       {"se_beta0", number(l.se_beta0)}, {"se_beta1", number(l.se_beta1)},
                       {"iterations", l.iterations}, {"skipped_users", l.skipped_users}};
  }
  write_text_file(path, doc.dump(2) + "\n");
}

ParamsFile read_params_file(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw InputError(path.string() + ": params file not found");
  json doc;
  try {
    doc = json::parse(read_text_file(path));
  } catch (const json::parse_error& e) {
    throw InputError(path.string() + ": " + e.what());
  }
  const std::string where = path.string();
  ObjectReader r(doc, where);
  ParamsFile file;
  std::string kind = "stochastic";
  r.string("model", kind);
  file.kind = parse_model_kind(kind);
  r.find("metadata");
  if (file.kind == ModelKind::stochastic) {
    const auto* p = r.find("params");
    if (!p) throw InputError(where + ": missing 'params'");
    file.params = parse_model_params(*p, where + ".params");
    if (const auto* f = r.find("fit")) {
      FitResult fit;
      fit.params = file.params;
      ObjectReader fr(*f, where + ".fit");
      if (const auto* v = fr.find("log_likelihood")) fit.log_likelihood = read_number(*v, fr.path("log_likelihood"));
      fr.boolean("converged", fit.converged);
      if (const auto* v = fr.find("gradient_norm")) fit.gradient_norm = read_number(*v, fr.path("gradient_norm"));
      fr.boolean("p_act_at_boundary", fit.p_act_at_boundary);
      if (const auto* v = fr.find("free_parameters")) fit.free_parameters = v->get<std::vector<std::string>>();
      fr.integer("evaluations", fit.evaluations);
      fr.integer("included_users", fit.included_users);
      fr.find("method");
      if (const auto* v = fr.find("confidence_intervals_95")) {
        for (const auto& [name, iv] : v->items()) {
          ObjectReader ir(iv, fr.path(name));
          Interval interval;
          if (const auto* x = ir.find("low")) interval.low = read_number(*x, ir.path("low"), -HUGE_VAL);
          if (const auto* x = ir.find("high")) interval.high = read_number(*x, ir.path("high"));
          ir.string("method", interval.method);
          ir.boolean("unbounded", interval.unbounded);
          ir.finish();
          fit.confidence_intervals[name] = interval;
        }
      }
      if (const auto* v = fr.find("excluded_users")) {
        for (const auto& e : *v)
          fit.excluded_users.push_back({e.at("user_id").get<std::string>(), e.at("reason").get<std::string>()});
      }
      fr.finish();
      file.fit = fit;
    }
  } else {
    const auto* l = r.find("logistic");
    if (!l) throw InputError(where + ": missing 'logistic'");
    ObjectReader lr(*l, where + ".logistic");
    LogisticFit fit;
    lr.number("beta0", fit.beta0);
    lr.number("beta1", fit.beta1);
    if (const auto* v = lr.find("se_beta0")) fit.se_beta0 = read_number(*v, lr.path("se_beta0"));
    if (const auto* v = lr.find("se_beta1")) fit.se_beta1 = read_number(*v, lr.path("se_beta1"));
    lr.integer("iterations", fit.iterations);
    if (const auto* v = lr.find("skipped_users")) fit.skipped_users = v->get<std::vector<std::string>>();
    lr.finish();
    file.logistic = fit;
  }
  r.finish();
  return file;
}

// --- run configuration -----------------------------------------------------

RunConfig parse_run_config(const std::string& text, const std::string& source) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError(source + ": " + e.what());
  }
  RunConfig c;
  ObjectReader r(doc, source);
  if (const auto* v = r.find("population")) {
    ObjectReader pr(*v, r.path("population"));
    pr.string("advocate_id", c.population.advocate_id);
    pr.integer("advocate_post_count", c.population.advocate_post_count);
    pr.number("typical_friend_rate", c.population.typical_friend_rate);
    pr.finish();
  }
  c.population.validate();
  if (const auto* v = r.find("model")) {
    if (v->is_string()) {
      if (v->get<std::string>() != "fit")
        throw InputError(r.path("model") + ": expected \"fit\" or a parameter object");
    } else {
      c.model = parse_model_params(*v, r.path("model"));
    }
  }
  std::string kind(to_string(c.model_kind));
  r.string("model_kind", kind);
  c.model_kind = parse_model_kind(kind);
  if (c.model) c.fit.initial = *c.model;
  if (const auto* v = r.find("fit")) {
    ObjectReader fr(*v, r.path("fit"));
    if (const auto* f = fr.find("free")) {
      if (!f->is_array()) throw InputError(fr.path("free") + ": expected a list of names");
      std::set<std::string> names;
      for (const auto& n : *f) {
        if (!n.is_string()) throw InputError(fr.path("free") + ": expected a list of names");
        names.insert(n.get<std::string>());
      }
      if (names == std::set<std::string>{"views_per_post", "p_act"})
        c.fit.free = FreeParameters::views_and_p_act;
      else if (names == std::set<std::string>{"views_per_post", "p_act", "mu"})
        c.fit.free = FreeParameters::surfing_views_and_p_act;
      else
        throw InputError(fr.path("free") +
                         ": supported sets are [views_per_post, p_act] and "
                         "[views_per_post, p_act, mu] (lambda follows mu)");
    }
    parse_grid(fr, "views_grid", c.fit.views_grid);
    parse_grid(fr, "p_act_grid", c.fit.p_act_grid);
    parse_grid(fr, "mu_grid", c.fit.mu_grid);
    parse_bounds(fr, "views_bounds", c.fit.views_min, c.fit.views_max);
    parse_bounds(fr, "p_act_bounds", c.fit.p_act_min, c.fit.p_act_max);
    parse_bounds(fr, "mu_bounds", c.fit.mu_min, c.fit.mu_max);
    fr.integer("starts", c.fit.starts);
    fr.number("objective_tolerance", c.fit.objective_tolerance);
    fr.number("parameter_tolerance", c.fit.parameter_tolerance);
    fr.number("gradient_tolerance", c.fit.gradient_tolerance);
    fr.integer("max_evaluations", c.fit.max_evaluations);
    fr.boolean("intervals", c.fit.intervals);
    fr.number("profile_drop", c.fit.profile_drop);
    fr.finish();
  }
  try {
    c.fit.validate();
  } catch (const std::exception& e) {
    throw InputError(r.path("fit") + ": " + e.what());
  }
  r.unsigned_integer("seed", c.seed);
  r.integer("posterior_grid", c.posterior_grid);
  if (c.posterior_grid < 101) throw InputError(r.path("posterior_grid") + ": must be >= 101");
  r.number("fraction", c.fraction);
  if (!(c.fraction > 0.0 && c.fraction < 1.0))
    throw InputError(r.path("fraction") + ": must lie in (0, 1)");
  r.integer("bootstrap_resamples", c.bootstrap_resamples);
  if (c.bootstrap_resamples < 1) throw InputError(r.path("bootstrap_resamples") + ": must be >= 1");
  r.boolean("response_distributions", c.response_distributions);
  r.string("output_dir", c.output_dir);

  auto& sim = c.simulation;
  if (const auto* v = r.find("simulation")) {
    ObjectReader sr(*v, r.path("simulation"));
    sr.integer("user_count", sim.population.user_count);
    auto lognormal = [&](const std::string& key, LogNormalLaw& law) {
      if (const auto* l = sr.find(key)) {
        ObjectReader lr(*l, sr.path(key));
        lr.number("location", law.location);
        lr.number("scale", law.scale);
        lr.finish();
      }
    };
    lognormal("posting_rate_law", sim.population.posting_rate_law);
    lognormal("friend_count_law", sim.population.friend_count_law);
    if (const auto* l = sr.find("topic_fraction_law")) {
      ObjectReader lr(*l, sr.path("topic_fraction_law"));
      lr.number("alpha", sim.population.topic_fraction_law.alpha);
      lr.number("beta", sim.population.topic_fraction_law.beta);
      lr.finish();
    }
    if (const auto* l = sr.find("stance_mix")) {
      ObjectReader lr(*l, sr.path("stance_mix"));
      lr.number("supporter", sim.population.stance_mix.supporter);
      lr.number("opponent", sim.population.stance_mix.opponent);
      lr.number("neutral", sim.population.stance_mix.neutral);
      lr.finish();
    }
    sr.number("observation_days", sim.population.observation_days);
    if (const auto* p = sr.find("params")) sim.params = parse_model_params(*p, sr.path("params"));
    sr.finish();
  }
  r.finish();
  sim.population.advocate_post_count = c.population.advocate_post_count;
  sim.population.typical_friend_rate = c.population.typical_friend_rate;
  sim.population.seed = c.seed;
  try {
    sim.population.validate();
  } catch (const std::exception& e) {
    throw InputError(r.path("simulation") + ": " + e.what());
  }
  return c;
}

RunConfig read_run_config(const std::filesystem::path& path) {
  return parse_run_config(read_text_file(path), path.string());
}

std::string dump_run_config(const RunConfig& c) {
  json doc;
  doc["population"] = {{"advocate_id", c.population.advocate_id},
                       {"advocate_post_count", c.population.advocate_post_count},
                       {"typical_friend_rate", c.population.typical_friend_rate}};
  doc["model"] = c.model ? model_params_json(*c.model) : json("fit");
  doc["model_kind"] = std::string(to_string(c.model_kind));
  const auto& f = c.fit;
  doc["fit"] = {{"free", free_names(f.free)},
                {"views_grid", grid_json(f.views_grid)},
                {"p_act_grid", grid_json(f.p_act_grid)},
                {"mu_grid", grid_json(f.mu_grid)},
                {"views_bounds", {f.views_min, f.views_max}},
                {"p_act_bounds", {f.p_act_min, f.p_act_max}},
                {"mu_bounds", {f.mu_min, f.mu_max}},
                {"starts", f.starts},
                {"objective_tolerance", f.objective_tolerance},
                {"parameter_tolerance", f.parameter_tolerance},
                {"gradient_tolerance", f.gradient_tolerance},
                {"max_evaluations", f.max_evaluations},
                {"intervals", f.intervals},
                {"profile_drop", f.profile_drop}};
  doc["seed"] = c.seed;
  doc["posterior_grid"] = c.posterior_grid;
  doc["fraction"] = c.fraction;
  doc["bootstrap_resamples"] = c.bootstrap_resamples;
  doc["response_distributions"] = c.response_distributions;
  doc["output_dir"] = c.output_dir;
  const auto& s = c.simulation.population;
  doc["simulation"] = {
      {"user_count", s.user_count},
      {"posting_rate_law", {{"location", s.posting_rate_law.location}, {"scale", s.posting_rate_law.scale}}},
      {"friend_count_law", {{"location", s.friend_count_law.location}, {"scale", s.friend_count_law.scale}}},
      {"topic_fraction_law", {{"alpha", s.topic_fraction_law.alpha}, {"beta", s.topic_fraction_law.beta}}},
      {"stance_mix",
       {{"supporter", s.stance_mix.supporter}, {"opponent", s.stance_mix.opponent}, {"neutral", s.stance_mix.neutral}}},
      {"observation_days", s.observation_days},
      {"params", model_params_json(c.simulation.params)}};
  return doc.dump(2);
}

std::string config_hash(const RunConfig& config) {
  RunConfig canonical = config;
  canonical.output_dir.clear();
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a64(dump_run_config(canonical))));
  return buf;
}

}  // namespace feedresp
