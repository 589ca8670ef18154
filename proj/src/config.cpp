#include "circgossip/config.hpp"

#include <array>
#include <cmath>
#include <set>
#include <sstream>
#include <utility>

#include <fmt/format.h>
#include <json.hpp>

#include "circgossip/csv.hpp"
#include "circgossip/errors.hpp"

namespace circgossip {

using nlohmann::json;

namespace {

constexpr std::array<std::pair<Scenario, std::string_view>, 6> kScenarioNames{{
    {Scenario::PathConsensus, "PathConsensus"},
    {Scenario::RingConsensus, "RingConsensus"},
    {Scenario::CrossingProbMC, "CrossingProbMC"},
    {Scenario::WindingFreeze, "WindingFreeze"},
    {Scenario::SweepEscape, "SweepEscape"},
    {Scenario::CompensatorBound, "CompensatorBound"},
}};

constexpr std::array<std::pair<InitKind, std::string_view>, 4> kInitNames{{
    {InitKind::IidUniform, "iid_uniform"},
    {InitKind::Twist, "twist"},
    {InitKind::Consensus, "consensus"},
    {InitKind::File, "file"},
}};

std::string_view init_name(InitKind k) {
  for (const auto& [kind, name] : kInitNames) {
    if (kind == k) return name;
  }
  throw std::logic_error("unknown init kind");
}

InitKind parse_init_kind(std::string_view name) {
  for (const auto& [kind, n] : kInitNames) {
    if (n == name) return kind;
  }
  throw ConfigError(fmt::format("unknown init kind '{}'", name));
}

void reject_unknown(const json& obj, std::initializer_list<std::string_view> known,
                    std::string_view where) {
  if (!obj.is_object()) {
    throw ConfigError(fmt::format("{} must be an object", where));
  }
  for (const auto& [key, value] : obj.items()) {
    bool found = false;
    for (auto k : known) found = found || k == key;
    if (!found) {
      throw ConfigError(fmt::format("unknown key '{}' in {}", key, where));
    }
  }
}

template <class T>
void read(const json& obj, const char* key, T& out) {
  if (auto it = obj.find(key); it != obj.end()) {
    out = it->template get<T>();
  }
}

}  // namespace

std::string_view scenario_name(Scenario s) {
  for (const auto& [sc, name] : kScenarioNames) {
    if (sc == s) return name;
  }
  throw std::logic_error("unknown scenario");
}

Scenario parse_scenario(std::string_view name) {
  for (const auto& [sc, n] : kScenarioNames) {
    if (n == name) return sc;
  }
  throw ConfigError(fmt::format("unknown scenario '{}'", name));
}

Topology ExperimentConfig::topology() const {
  return uses_ring() ? Topology::ring(n) : Topology::open_path(n);
}

ExperimentConfig parse_config(std::string_view json_text) {
  ExperimentConfig c;
  try {
    const json doc = json::parse(json_text);
    reject_unknown(doc,
                   {"schema_version", "scenario", "n", "horizon", "replicas", "seed",
                    "output_dir", "sample_stride", "threads", "winding_check_stride",
                    "event_log", "init", "tolerances", "crossing", "sweep", "frame"},
                   "config");
    if (!doc.contains("scenario")) {
      throw ConfigError("config is missing 'scenario'");
    }
    c.scenario = parse_scenario(doc.at("scenario").get<std::string>());
    if (c.scenario == Scenario::CrossingProbMC) {
      c.n = 4000;
      c.replicas = 1000;
    }
    read(doc, "schema_version", c.schema_version);
    read(doc, "n", c.n);
    read(doc, "horizon", c.horizon);
    read(doc, "replicas", c.replicas);
    read(doc, "seed", c.seed);
    read(doc, "output_dir", c.output_dir);
    read(doc, "threads", c.threads);
    read(doc, "winding_check_stride", c.winding_check_stride);
    read(doc, "event_log", c.event_log);
    if (auto it = doc.find("sample_stride"); it != doc.end()) {
      if (it->is_string()) {
        if (it->get<std::string>() != "geometric") {
          throw ConfigError("sample_stride must be \"geometric\" or a positive integer");
        }
        c.sample_stride.reset();
      } else {
        c.sample_stride = it->get<std::uint64_t>();
      }
    }
    if (auto it = doc.find("init"); it != doc.end()) {
      reject_unknown(*it, {"kind", "w0", "noise", "alpha", "path"}, "init");
      if (auto k = it->find("kind"); k != it->end()) {
        c.init.kind = parse_init_kind(k->get<std::string>());
      }
      read(*it, "w0", c.init.w0);
      read(*it, "noise", c.init.noise);
      read(*it, "alpha", c.init.alpha);
      read(*it, "path", c.init.path);
    }
    if (auto it = doc.find("tolerances"); it != doc.end()) {
      reject_unknown(*it, {"eps_ant", "lyapunov", "consensus", "lift"}, "tolerances");
      read(*it, "eps_ant", c.tolerances.eps_ant);
      read(*it, "lyapunov", c.tolerances.lyapunov);
      read(*it, "consensus", c.tolerances.consensus);
      read(*it, "lift", c.tolerances.lift);
    }
    if (auto it = doc.find("crossing"); it != doc.end()) {
      reject_unknown(*it, {"edges_per_replica"}, "crossing");
      read(*it, "edges_per_replica", c.edges_per_replica);
    }
    if (auto it = doc.find("sweep"); it != doc.end()) {
      reject_unknown(*it, {"sweeps"}, "sweep");
      read(*it, "sweeps", c.sweeps);
    }
    if (auto it = doc.find("frame"); it != doc.end()) {
      reject_unknown(*it, {"resync_stride"}, "frame");
      read(*it, "resync_stride", c.resync_stride);
    }
  } catch (const json::exception& e) {
    throw ConfigError(fmt::format("invalid config: {}", e.what()));
  }
  validate(c);
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::string text;
  try {
    text = read_text_file(path);
  } catch (const std::runtime_error& e) {
    throw ConfigError(e.what());
  }
  ExperimentConfig c = parse_config(text);
  if (c.init.kind == InitKind::File && std::filesystem::path(c.init.path).is_relative()) {
    c.init.path = (path.parent_path() / c.init.path).lexically_normal().string();
  }
  return c;
}

std::string config_to_json(const ExperimentConfig& c) {
  json doc;
  doc["schema_version"] = c.schema_version;
  doc["scenario"] = std::string(scenario_name(c.scenario));
  doc["n"] = c.n;
  doc["horizon"] = c.horizon;
  doc["replicas"] = c.replicas;
  doc["seed"] = c.seed;
  doc["output_dir"] = c.output_dir;
  if (c.sample_stride) {
    doc["sample_stride"] = *c.sample_stride;
  } else {
    doc["sample_stride"] = "geometric";
  }
  doc["threads"] = c.threads;
  doc["winding_check_stride"] = c.winding_check_stride;
  doc["event_log"] = c.event_log;
  doc["init"] = {{"kind", std::string(init_name(c.init.kind))},
                 {"w0", c.init.w0},
                 {"noise", c.init.noise},
                 {"alpha", c.init.alpha},
                 {"path", c.init.path}};
  doc["tolerances"] = {{"eps_ant", c.tolerances.eps_ant},
                       {"lyapunov", c.tolerances.lyapunov},
                       {"consensus", c.tolerances.consensus},
                       {"lift", c.tolerances.lift}};
  doc["crossing"] = {{"edges_per_replica", c.edges_per_replica}};
  doc["sweep"] = {{"sweeps", c.sweeps}};
  doc["frame"] = {{"resync_stride", c.resync_stride}};
  return doc.dump(2) + "\n";
}

void validate(const ExperimentConfig& c) {
  if (c.schema_version != kConfigSchemaVersion) {
    throw ConfigError(fmt::format("unsupported schema_version {} (expected {})",
                                  c.schema_version, kConfigSchemaVersion));
  }
  if (c.replicas < 1) {
    throw ConfigError("replicas must be at least 1");
  }
  if (c.n < 2) {
    throw ConfigError("n must be at least 2");
  }
  if (c.uses_ring() && c.n < 3) {
    throw ConfigError(fmt::format("{} needs n >= 3", scenario_name(c.scenario)));
  }
  if (c.sample_stride && *c.sample_stride == 0) {
    throw ConfigError("sample_stride must be positive");
  }
  if (!(c.tolerances.eps_ant >= 0.0) || !(c.tolerances.lyapunov >= 0.0) ||
      !(c.tolerances.consensus > 0.0) || !(c.tolerances.lift > 0.0)) {
    throw ConfigError("tolerances must be non-negative (consensus and lift positive)");
  }
  if (!(c.init.noise >= 0.0) || !std::isfinite(c.init.noise) || !std::isfinite(c.init.alpha)) {
    throw ConfigError("init.noise must be finite and non-negative, init.alpha finite");
  }
  if (c.init.kind == InitKind::File && c.init.path.empty()) {
    throw ConfigError("init.kind 'file' needs init.path");
  }
  switch (c.scenario) {
    case Scenario::CrossingProbMC:
      if (c.edges_per_replica < 1 || c.edges_per_replica > c.n) {
        throw ConfigError(
            fmt::format("crossing.edges_per_replica must lie in [1, n = {}]", c.n));
      }
      break;
    case Scenario::SweepEscape:
      if (c.init.kind != InitKind::Twist) {
        throw ConfigError("SweepEscape starts from init.kind 'twist'");
      }
      break;
    case Scenario::CompensatorBound:
      if (c.init.kind != InitKind::Twist) {
        throw ConfigError("CompensatorBound starts from init.kind 'twist'");
      }
      if (c.resync_stride == 0) {
        throw ConfigError("frame.resync_stride must be positive");
      }
      break;
    default:
      break;
  }
}

Configuration make_initial(const ExperimentConfig& c, RandomStream& rng) {
  const Topology topo = c.topology();
  switch (c.init.kind) {
    case InitKind::IidUniform: {
      std::vector<double> angles(c.n);
      for (double& a : angles) {
        a = wrap_pi(-kPi + kTwoPi * rng.uniform_unit());
      }
      return {topo, std::move(angles)};
    }
    case InitKind::Twist: {
      const Configuration twist = Configuration::twisted(topo, c.init.w0);
      if (c.init.noise == 0.0) {
        return twist;
      }
      std::vector<double> angles(twist.angles().begin(), twist.angles().end());
      for (double& a : angles) {
        a += c.init.noise * (2.0 * rng.uniform_unit() - 1.0);
      }
      return Configuration::wrapped(topo, angles);
    }
    case InitKind::Consensus:
      return Configuration::consensus(topo, c.init.alpha);
    case InitKind::File: {
      std::string text = read_text_file(c.init.path);
      for (char& ch : text) {
        if (ch == ',') ch = ' ';
      }
      std::istringstream in(text);
      std::vector<double> raw;
      for (double v; in >> v;) raw.push_back(v);
      if (!in.eof()) {
        throw ConfigError(fmt::format("{}: not a list of numbers", c.init.path));
      }
      if (raw.size() != c.n) {
        throw ConfigError(
            fmt::format("{} holds {} angles but n = {}", c.init.path, raw.size(), c.n));
      }
      return Configuration::wrapped(topo, raw);
    }
  }
  throw std::logic_error("unknown init kind");
}

}  // namespace circgossip
