#include "vortexed/config.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <sstream>

#include <fmt/format.h>

#ifdef VORTEXED_HAVE_OPENMP
#include <omp.h>
#endif

#include "vortexed/error.hpp"

namespace vortexed {

namespace {

constexpr std::array<std::string_view, 16> kKeys = {
    "n",        "g",           "a",   "n_ll", "l_min",   "l_max",   "omega",     "omega_lo",
    "omega_hi", "omega_steps", "tol", "seed", "threads", "out_dir", "dense_cap", "basis_cap"};

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool known_key(std::string_view key) {
  return std::find(kKeys.begin(), kKeys.end(), key) != kKeys.end();
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value, std::string_view why) {
  throw Error(ErrorCategory::config, fmt::format("config key '{}': {} (got '{}')", key, why, value));
}

template <typename T>
T parse_number(std::string_view key, std::string_view value) {
  T out{};
  const char* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end) bad_value(key, value, "not a valid number");
  if constexpr (std::is_floating_point_v<T>) {
    if (!std::isfinite(out)) bad_value(key, value, "must be finite");
  }
  return out;
}

class Reader {
 public:
  explicit Reader(const KeyValues& values) : values_(values) {}

  const std::string* find(std::string_view key) const {
    const auto it = values_.find(key);
    return it == values_.end() ? nullptr : &it->second;
  }

  template <typename T>
  std::optional<T> optional(std::string_view key) const {
    const std::string* v = find(key);
    if (!v) return std::nullopt;
    return parse_number<T>(key, *v);
  }

  template <typename T>
  T required(std::string_view key) const {
    const std::string* v = find(key);
    if (!v) throw Error(ErrorCategory::config, fmt::format("config key '{}' is required", key));
    return parse_number<T>(key, *v);
  }

 private:
  const KeyValues& values_;
};

void require(bool ok, std::string_view key, const std::string& value, std::string_view why) {
  if (!ok) bad_value(key, value, why);
}

std::string show(double v) { return fmt::format("{}", v); }

}  // namespace

ModelParams RunConfig::model() const noexcept {
  ModelParams p;
  p.particles = n;
  p.g = g;
  p.anisotropy = a;
  p.landau_levels = n_ll;
  p.l_min = effective_l_min();
  p.l_max = effective_l_max();
  p.basis_cap = basis_cap;
  return p;
}

SolverSettings RunConfig::solver() const noexcept {
  SolverSettings s;
  s.tol = tol;
  s.seed = seed;
  s.dense_fallback = dense_cap;
  return s;
}

std::span<const std::string_view> config_keys() noexcept { return kKeys; }

KeyValues parse_key_values(std::string_view text) {
  KeyValues out;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorCategory::config, fmt::format("config line {}: expected 'key = value'", line_no));
    }
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    if (!known_key(key)) throw Error(ErrorCategory::config, fmt::format("config line {}: unknown key '{}'", line_no, key));
    if (value.empty()) throw Error(ErrorCategory::config, fmt::format("config key '{}': empty value", key));
    if (!out.emplace(key, value).second) {
      throw Error(ErrorCategory::config, fmt::format("config line {}: key '{}' repeated", line_no, key));
    }
  }
  return out;
}

RunConfig make_config(const KeyValues& values) {
  for (const auto& [key, value] : values) {
    if (!known_key(key)) throw Error(ErrorCategory::config, fmt::format("unknown config key '{}'", key));
  }
  const Reader r(values);
  RunConfig c;
  c.n = r.required<int>("n");
  c.g = r.required<double>("g");
  c.a = r.required<double>("a");
  c.n_ll = r.required<int>("n_ll");
  c.l_min = r.optional<int>("l_min");
  c.l_max = r.optional<int>("l_max");
  c.omega = r.optional<double>("omega");
  c.omega_lo = r.optional<double>("omega_lo");
  c.omega_hi = r.optional<double>("omega_hi");
  c.omega_steps = r.optional<int>("omega_steps").value_or(c.omega_steps);
  c.tol = r.optional<double>("tol").value_or(c.tol);
  c.seed = r.optional<std::uint64_t>("seed").value_or(c.seed);
  c.threads = r.optional<int>("threads").value_or(c.threads);
  if (const std::string* dir = r.find("out_dir")) c.out_dir = *dir;
  c.dense_cap = r.optional<std::size_t>("dense_cap").value_or(c.dense_cap);
  c.basis_cap = r.optional<std::size_t>("basis_cap").value_or(c.basis_cap);

  require(c.n >= 2 && c.n <= 255, "n", std::to_string(c.n), "must lie in [2, 255]");
  require(c.g >= 0.0, "g", show(c.g), "must be >= 0");
  require(c.a >= 0.0, "a", show(c.a), "must be >= 0");
  require(c.n_ll >= 1, "n_ll", std::to_string(c.n_ll), "must be >= 1");
  if (c.l_min || c.l_max) {
    require(c.effective_l_min() <= c.effective_l_max(), c.l_min ? "l_min" : "l_max",
            std::to_string(c.l_min ? *c.l_min : *c.l_max), "l_min must not exceed l_max");
  }
  if (c.omega) {
    require(*c.omega > 0.0 && *c.omega < 1.0, "omega", show(*c.omega), "must lie in (0, 1)");
    if (c.omega_lo || c.omega_hi) {
      bad_value("omega", show(*c.omega), "conflicts with omega_lo/omega_hi; give a single rate or a range");
    }
  }
  if (c.omega_lo) require(*c.omega_lo >= 0.0 && *c.omega_lo < 1.0, "omega_lo", show(*c.omega_lo), "must lie in [0, 1)");
  if (c.omega_hi) require(*c.omega_hi > 0.0 && *c.omega_hi < 1.0, "omega_hi", show(*c.omega_hi), "must lie in (0, 1)");
  if (c.omega_lo && c.omega_hi) {
    require(*c.omega_lo < *c.omega_hi, "omega_hi", show(*c.omega_hi), "must exceed omega_lo");
  }
  require(c.omega_steps >= 2, "omega_steps", std::to_string(c.omega_steps), "must be >= 2");
  require(c.tol > 0.0, "tol", show(c.tol), "must be > 0");
  require(c.threads >= 0, "threads", std::to_string(c.threads), "must be >= 0");
  require(!c.out_dir.empty(), "out_dir", c.out_dir, "must not be empty");
  require(c.dense_cap >= 1, "dense_cap", std::to_string(c.dense_cap), "must be >= 1");
  require(c.basis_cap >= 1, "basis_cap", std::to_string(c.basis_cap), "must be >= 1");
  return c;
}

RunConfig parse_config(std::string_view file_text, const KeyValues& overrides) {
  KeyValues merged = parse_key_values(file_text);
  for (const auto& [key, value] : overrides) merged.insert_or_assign(key, value);
  return make_config(merged);
}

RunConfig load_config(const std::filesystem::path& path, const KeyValues& overrides) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCategory::io, fmt::format("cannot read config file '{}'", path.string()));
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str(), overrides);
}

KeyValues to_key_values(const RunConfig& c) {
  KeyValues out;
  out["n"] = std::to_string(c.n);
  out["g"] = show(c.g);
  out["a"] = show(c.a);
  out["n_ll"] = std::to_string(c.n_ll);
  if (c.l_min) out["l_min"] = std::to_string(*c.l_min);
  if (c.l_max) out["l_max"] = std::to_string(*c.l_max);
  if (c.omega) out["omega"] = show(*c.omega);
  if (c.omega_lo) out["omega_lo"] = show(*c.omega_lo);
  if (c.omega_hi) out["omega_hi"] = show(*c.omega_hi);
  out["omega_steps"] = std::to_string(c.omega_steps);
  out["tol"] = show(c.tol);
  out["seed"] = std::to_string(c.seed);
  out["threads"] = std::to_string(c.threads);
  out["out_dir"] = c.out_dir;
  out["dense_cap"] = std::to_string(c.dense_cap);
  out["basis_cap"] = std::to_string(c.basis_cap);
  return out;
}

std::string to_text(const RunConfig& config) {
  const KeyValues kv = to_key_values(config);
  std::string out;
  for (std::string_view key : kKeys) {
    if (const auto it = kv.find(key); it != kv.end()) out += fmt::format("{} = {}\n", key, it->second);
  }
  return out;
}

double convert_g(double scattering_length, double lambda_z) {
  if (!(scattering_length > 0.0) || !(lambda_z > 0.0)) {
    throw Error(ErrorCategory::invalid_argument,
                fmt::format("convert_g: lengths must be positive, got a = {}, lambda_z = {}", scattering_length,
                            lambda_z));
  }
  return std::sqrt(8.0 * std::numbers::pi) * scattering_length / lambda_z;
}

int resolve_threads(const RunConfig& config) {
  if (const char* env = std::getenv("VORTEXED_THREADS")) {
    const std::string_view v = trim(env);
    int n = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), n);
    if (ec == std::errc() && ptr == v.data() + v.size() && n > 0) return n;
  }
  return config.threads;
}

void apply_threads(int threads) {
#ifdef VORTEXED_HAVE_OPENMP
  if (threads > 0) omp_set_num_threads(threads);
#else
  (void)threads;
#endif
}

}  // namespace vortexed
