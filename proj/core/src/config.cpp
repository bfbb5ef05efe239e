#include "mecrl/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "mecrl/error.hpp"

namespace mecrl::harness {

using nlohmann::json;

namespace {

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) throw ValidationError(where + " must be a JSON object");
  for (const auto& [key, _] : obj.items())
    if (!allowed.count(key)) throw ValidationError("unknown key '" + where + "." + key + "'");
}

std::string path_of(const std::string& where, const std::string& key) {
  return where.empty() ? key : where + "." + key;
}

double get_real(const json& obj, const std::string& key, double fallback, const std::string& where) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_number()) throw ValidationError(path_of(where, key) + " must be a number");
  return v.get<double>();
}

std::int64_t get_int(const json& obj, const std::string& key, std::int64_t fallback, const std::string& where) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (v.is_number_float()) {
    const double d = v.get<double>();
    if (d != static_cast<double>(static_cast<std::int64_t>(d)))
      throw ValidationError(path_of(where, key) + " must be an integer");
    return static_cast<std::int64_t>(d);
  }
  if (!v.is_number_integer()) throw ValidationError(path_of(where, key) + " must be an integer");
  if (v.is_number_unsigned()) return static_cast<std::int64_t>(v.get<std::uint64_t>());
  return v.get<std::int64_t>();
}

std::size_t get_count(const json& obj, const std::string& key, std::size_t fallback, std::int64_t min,
                      const std::string& where) {
  const std::int64_t v = get_int(obj, key, static_cast<std::int64_t>(fallback), where);
  if (v < min) throw ValidationError(path_of(where, key) + " must be >= " + std::to_string(min));
  return static_cast<std::size_t>(v);
}

bool get_bool(const json& obj, const std::string& key, bool fallback, const std::string& where) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_boolean()) throw ValidationError(path_of(where, key) + " must be true or false");
  return v.get<bool>();
}

// A per-user field: a scalar broadcast to every user, or a list of n values.
std::vector<double> get_per_user(const json& obj, const std::string& key, const std::vector<double>& fallback,
                                 std::size_t n, const std::string& where) {
  if (!obj.contains(key)) {
    if (fallback.size() == n) return fallback;
    return std::vector<double>(n, fallback.empty() ? 0.0 : fallback.front());
  }
  const auto& v = obj.at(key);
  if (v.is_number()) return std::vector<double>(n, v.get<double>());
  if (!v.is_array()) throw ValidationError(path_of(where, key) + " must be a number or a list");
  if (v.size() != n)
    throw ValidationError(path_of(where, key) + " must list one value per user (" + std::to_string(n) + ")");
  std::vector<double> out;
  for (const auto& e : v) {
    if (!e.is_number()) throw ValidationError(path_of(where, key) + " entries must be numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

env::EnvConfig env_from_json(const json& j) {
  static const std::set<std::string> keys = {
      "n_users",           "n_antennas",    "noise_power",       "bandwidth_hz",       "slot_s",
      "kappa",             "cycles_per_bit", "path_loss",        "distances",          "rho",
      "arrival_rate",      "p_max_offload", "p_max_local",       "w_energy",           "w_queue",
      "task_size_min_bits", "task_size_max_bits", "buffer_cap_bits", "noise_level",    "episode_len",
      "obs_sinr_max",      "obs_chan_power_max"};
  const std::string w = "env";
  reject_unknown(j, keys, w);
  const std::size_t users = get_count(j, "n_users", 2, 1, w);
  env::EnvConfig d = env::EnvConfig::with_defaults(users);
  env::EnvConfig c = d;
  c.constants.n_antennas = get_count(j, "n_antennas", d.constants.n_antennas, 1, w);
  c.constants.noise_power = get_real(j, "noise_power", d.constants.noise_power, w);
  c.constants.bandwidth_hz = get_real(j, "bandwidth_hz", d.constants.bandwidth_hz, w);
  c.constants.slot_s = get_real(j, "slot_s", d.constants.slot_s, w);
  c.constants.kappa = get_real(j, "kappa", d.constants.kappa, w);
  c.constants.cycles_per_bit = get_real(j, "cycles_per_bit", d.constants.cycles_per_bit, w);
  if (j.contains("path_loss")) {
    const json& pl = j.at("path_loss");
    reject_unknown(pl, {"g0_db", "alpha", "d0"}, "env.path_loss");
    c.path_loss.g0_db = get_real(pl, "g0_db", d.path_loss.g0_db, "env.path_loss");
    c.path_loss.alpha = get_real(pl, "alpha", d.path_loss.alpha, "env.path_loss");
    c.path_loss.d0 = get_real(pl, "d0", d.path_loss.d0, "env.path_loss");
  }
  c.distances = get_per_user(j, "distances", d.distances, users, w);
  c.rho = get_per_user(j, "rho", d.rho, users, w);
  c.arrival_rate = get_per_user(j, "arrival_rate", d.arrival_rate, users, w);
  c.p_max_offload = get_per_user(j, "p_max_offload", d.p_max_offload, users, w);
  c.p_max_local = get_per_user(j, "p_max_local", d.p_max_local, users, w);
  c.w_energy = get_per_user(j, "w_energy", d.w_energy, users, w);
  c.w_queue = get_per_user(j, "w_queue", d.w_queue, users, w);
  c.task_size_min_bits = get_int(j, "task_size_min_bits", d.task_size_min_bits, w);
  c.task_size_max_bits = get_int(j, "task_size_max_bits", d.task_size_max_bits, w);
  c.buffer_cap_bits = get_int(j, "buffer_cap_bits", d.buffer_cap_bits, w);
  c.noise_level = get_real(j, "noise_level", d.noise_level, w);
  c.episode_len = get_count(j, "episode_len", d.episode_len, 1, w);
  c.obs_sinr_max = get_real(j, "obs_sinr_max", d.obs_sinr_max, w);
  c.obs_chan_power_max = get_real(j, "obs_chan_power_max", d.obs_chan_power_max, w);
  return c;
}

agents::TrainerConfig trainer_from_json(const json& j) {
  static const std::set<std::string> keys = {
      "gamma",         "batch_size",          "buffer_capacity", "warmup_steps",     "explore_sigma0",
      "explore_decay", "explore_sigma_floor", "tau_soft",        "updates_per_step", "lr_actor",
      "lr_critic",     "lr_nature",           "train_on_perceived"};
  const std::string w = "trainer";
  reject_unknown(j, keys, w);
  const agents::TrainerConfig d;
  agents::TrainerConfig c;
  c.gamma = get_real(j, "gamma", d.gamma, w);
  c.batch_size = get_count(j, "batch_size", d.batch_size, 1, w);
  c.buffer_capacity = get_count(j, "buffer_capacity", d.buffer_capacity, 1, w);
  c.warmup_steps = get_count(j, "warmup_steps", d.warmup_steps, 0, w);
  c.explore_sigma0 = get_real(j, "explore_sigma0", d.explore_sigma0, w);
  c.explore_decay = get_real(j, "explore_decay", d.explore_decay, w);
  c.explore_sigma_floor = get_real(j, "explore_sigma_floor", d.explore_sigma_floor, w);
  c.tau_soft = get_real(j, "tau_soft", d.tau_soft, w);
  c.updates_per_step = get_count(j, "updates_per_step", d.updates_per_step, 0, w);
  c.lr.actor = get_real(j, "lr_actor", d.lr.actor, w);
  c.lr.critic = get_real(j, "lr_critic", d.lr.critic, w);
  c.lr.nature = get_real(j, "lr_nature", d.lr.nature, w);
  c.train_on_perceived = get_bool(j, "train_on_perceived", d.train_on_perceived, w);
  return c;
}

std::pair<std::size_t, std::size_t> line_and_column(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < text.size() && i + 1 < byte; ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

}  // namespace

void ExperimentConfig::validate() const {
  env.validate();
  trainer.validate();
  if (episodes < 1) throw ValidationError("episodes must be >= 1");
  if (n_runs < 1) throw ValidationError("n_runs must be >= 1");
}

ExperimentConfig config_from_json(const json& doc) {
  reject_unknown(doc, {"algo", "episodes", "n_runs", "base_seed", "out_dir", "env", "trainer"}, "config");
  ExperimentConfig c;
  try {
    if (doc.contains("algo")) {
      if (!doc.at("algo").is_string()) throw ValidationError("algo must be a string");
      c.algo = agents::parse_algo(doc.at("algo").get<std::string>());
    }
    c.episodes = get_count(doc, "episodes", c.episodes, 1, "");
    c.n_runs = get_count(doc, "n_runs", c.n_runs, 1, "");
    c.base_seed = static_cast<std::uint64_t>(get_int(doc, "base_seed", static_cast<std::int64_t>(c.base_seed), ""));
    if (doc.contains("out_dir")) {
      if (!doc.at("out_dir").is_string()) throw ValidationError("out_dir must be a string");
      c.out_dir = doc.at("out_dir").get<std::string>();
    }
    c.env = env_from_json(doc.value("env", json::object()));
    c.trainer = trainer_from_json(doc.value("trainer", json::object()));
  } catch (const json::exception& e) {
    throw ValidationError(std::string("config: ") + e.what());
  }
  c.validate();
  return c;
}

json config_to_json(const ExperimentConfig& c) {
  const env::EnvConfig& e = c.env;
  const agents::TrainerConfig& t = c.trainer;
  json env = {
      {"n_users", e.n_users},
      {"n_antennas", e.constants.n_antennas},
      {"noise_power", e.constants.noise_power},
      {"bandwidth_hz", e.constants.bandwidth_hz},
      {"slot_s", e.constants.slot_s},
      {"kappa", e.constants.kappa},
      {"cycles_per_bit", e.constants.cycles_per_bit},
      {"path_loss", {{"g0_db", e.path_loss.g0_db}, {"alpha", e.path_loss.alpha}, {"d0", e.path_loss.d0}}},
      {"distances", e.distances},
      {"rho", e.rho},
      {"arrival_rate", e.arrival_rate},
      {"p_max_offload", e.p_max_offload},
      {"p_max_local", e.p_max_local},
      {"w_energy", e.w_energy},
      {"w_queue", e.w_queue},
      {"task_size_min_bits", e.task_size_min_bits},
      {"task_size_max_bits", e.task_size_max_bits},
      {"buffer_cap_bits", e.buffer_cap_bits},
      {"noise_level", e.noise_level},
      {"episode_len", e.episode_len},
      {"obs_sinr_max", e.obs_sinr_max},
      {"obs_chan_power_max", e.obs_chan_power_max},
  };
  json trainer = {
      {"gamma", t.gamma},
      {"batch_size", t.batch_size},
      {"buffer_capacity", t.buffer_capacity},
      {"warmup_steps", t.warmup_steps},
      {"explore_sigma0", t.explore_sigma0},
      {"explore_decay", t.explore_decay},
      {"explore_sigma_floor", t.explore_sigma_floor},
      {"tau_soft", t.tau_soft},
      {"updates_per_step", t.updates_per_step},
      {"lr_actor", t.lr.actor},
      {"lr_critic", t.lr.critic},
      {"lr_nature", t.lr.nature},
      {"train_on_perceived", t.train_on_perceived},
  };
  return json{{"algo", std::string(agents::algo_name(c.algo))},
              {"episodes", c.episodes},
              {"n_runs", c.n_runs},
              {"base_seed", c.base_seed},
              {"out_dir", c.out_dir.string()},
              {"env", std::move(env)},
              {"trainer", std::move(trainer)}};
}

ExperimentConfig parse_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    const auto [line, col] = line_and_column(text, e.byte);
    throw ParseError("config parse error at line " + std::to_string(line) + ", column " + std::to_string(col) +
                     ": " + e.what());
  }
  return config_from_json(doc);
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot read config " + path.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  return parse_config(ss.str());
}

void write_resolved_config(const ExperimentConfig& cfg) {
  std::error_code ec;
  std::filesystem::create_directories(cfg.out_dir, ec);
  if (ec) throw IoError("cannot create " + cfg.out_dir.string() + ": " + ec.message());
  const auto path = cfg.out_dir / "resolved_config.json";
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot write " + path.string());
  os << config_to_json(cfg).dump(2) << '\n';
  if (!os) throw IoError("failed writing " + path.string());
}

bool same_config(const ExperimentConfig& a, const ExperimentConfig& b) { return config_to_json(a) == config_to_json(b); }

}  // namespace mecrl::harness
