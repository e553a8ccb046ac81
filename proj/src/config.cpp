#include "cohesion/config.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

namespace cohesion {

using nlohmann::json;

ValidationError::ValidationError(std::vector<Violation> violations)
    : ConfigError([&violations] {
        std::string msg = std::to_string(violations.size()) + " configuration error(s):";
        for (const auto& v : violations) msg += "\n  " + v.field + ": " + v.message;
        return msg;
      }()),
      violations_(std::move(violations)) {}

bool ValidationError::mentions(const std::string& field) const {
  for (const auto& v : violations_)
    if (v.field == field) return true;
  return false;
}

namespace {

class Reader {
 public:
  std::vector<Violation> violations;

  void fail(const std::string& field, const std::string& message) { violations.push_back({field, message}); }

  void reject_unknown(const json& obj, const std::string& where, const std::set<std::string>& allowed) {
    for (const auto& [key, _] : obj.items()) {
      if (!allowed.contains(key)) fail(where.empty() ? key : where + "." + key, "unknown field");
    }
  }

  std::optional<double> number(const json& obj, const std::string& key, const std::string& field) {
    if (!obj.contains(key)) return std::nullopt;
    const json& v = obj.at(key);
    if (!v.is_number()) {
      fail(field, "expected a number");
      return std::nullopt;
    }
    const double d = v.get<double>();
    if (!std::isfinite(d)) {
      fail(field, "must be finite");
      return std::nullopt;
    }
    return d;
  }

  std::optional<std::uint64_t> count(const json& obj, const std::string& key, const std::string& field) {
    if (!obj.contains(key)) return std::nullopt;
    const json& v = obj.at(key);
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number_integer()) {
      fail(field, "must be >= 0");
      return std::nullopt;
    }
    fail(field, "expected a non-negative integer");
    return std::nullopt;
  }

  std::optional<std::string> text(const json& obj, const std::string& key, const std::string& field) {
    if (!obj.contains(key)) return std::nullopt;
    if (!obj.at(key).is_string()) {
      fail(field, "expected a string");
      return std::nullopt;
    }
    return obj.at(key).get<std::string>();
  }

  std::optional<std::vector<double>> numbers(const json& obj, const std::string& key, const std::string& field) {
    if (!obj.contains(key)) return std::nullopt;
    const json& v = obj.at(key);
    if (!v.is_array()) {
      fail(field, "expected an array of numbers");
      return std::nullopt;
    }
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number() || !std::isfinite(v[i].get<double>())) {
        fail(field + "[" + std::to_string(i) + "]", "expected a finite number");
        return std::nullopt;
      }
      out.push_back(v[i].get<double>());
    }
    return out;
  }

  const json* object(const json& obj, const std::string& key, const std::string& field) {
    if (!obj.contains(key)) return nullptr;
    if (!obj.at(key).is_object()) {
      fail(field, "expected an object");
      return nullptr;
    }
    return &obj.at(key);
  }
};

std::pair<std::size_t, std::size_t> line_and_column(const std::string& text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t column = 1;
  for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return {line, column};
}

std::optional<std::uint64_t> env_seed() {
  const char* raw = std::getenv(kSeedEnvVar);
  if (raw == nullptr || *raw == '\0') return std::nullopt;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(raw, &end, 10);
  if (end == raw || *end != '\0') return std::nullopt;
  return static_cast<std::uint64_t>(v);
}

ExperimentConfig validate(const json& doc) {
  Reader r;
  ExperimentConfig cfg;
  if (!doc.is_object()) throw ValidationError(std::vector<Violation>{{"<root>", "configuration must be a JSON object"}});

  r.reject_unknown(doc, "",
                   {"name", "graph", "omega", "noise", "variant", "kappa", "tau", "gamma", "gamma_margin", "horizon",
                    "trials", "mc_samples", "seed", "initial", "pair_set", "drift", "threads", "output"});

  if (auto v = r.text(doc, "name", "name")) cfg.name = *v;

  // graph
  if (const json* g = r.object(doc, "graph", "graph")) {
    r.reject_unknown(*g, "graph", {"nodes", "edges"});
    if (auto n = r.count(*g, "nodes", "graph.nodes")) cfg.nodes = *n;
    else if (!g->contains("nodes")) r.fail("graph.nodes", "required");
    if (!g->contains("edges")) {
      r.fail("graph.edges", "required");
    } else if (!g->at("edges").is_array()) {
      r.fail("graph.edges", "expected an array of [tail, head] pairs");
    } else {
      const json& edges = g->at("edges");
      for (std::size_t e = 0; e < edges.size(); ++e) {
        const json& pair = edges[e];
        if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number_unsigned() || !pair[1].is_number_unsigned()) {
          r.fail("graph.edges[" + std::to_string(e) + "]", "expected [tail, head] with non-negative integers");
          continue;
        }
        cfg.edges.push_back({pair[0].get<std::size_t>(), pair[1].get<std::size_t>()});
      }
    }
  } else if (!doc.contains("graph")) {
    r.fail("graph", "required");
  }
  bool graph_ok = false;
  if (r.violations.empty()) {
    try {
      build_tree(cfg.nodes, cfg.edges);
      graph_ok = true;
    } catch (const GraphError& e) {
      r.fail("graph", std::string("not a tree (") + to_string(e.kind()) + "): " + e.what());
    }
  }
  const std::size_t n = cfg.nodes;

  if (auto w = r.numbers(doc, "omega", "omega")) {
    cfg.omega = *w;
    if (cfg.omega.size() != n) {
      r.fail("omega", "expected " + std::to_string(n) + " entries, got " + std::to_string(cfg.omega.size()));
    }
  } else if (!doc.contains("omega")) {
    r.fail("omega", "required");
  }

  if (!doc.contains("noise")) {
    cfg.noise.assign(n, NodeNoise{});
  } else if (!doc.at("noise").is_array()) {
    r.fail("noise", "expected an array with one object per node");
  } else {
    const json& arr = doc.at("noise");
    if (arr.size() != n) {
      r.fail("noise", "expected " + std::to_string(n) + " entries, got " + std::to_string(arr.size()));
    }
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string field = "noise[" + std::to_string(i) + "]";
      if (!arr[i].is_object()) {
        r.fail(field, "expected an object {family, mean, variance}");
        continue;
      }
      r.reject_unknown(arr[i], field, {"family", "mean", "variance"});
      NodeNoise node;
      if (auto fam = r.text(arr[i], "family", field + ".family")) {
        if (auto parsed = parse_noise_family(*fam)) node.family = *parsed;
        else r.fail(field + ".family", "expected one of none, gaussian, uniform");
      } else if (!arr[i].contains("family")) {
        r.fail(field + ".family", "required");
      }
      if (auto m = r.number(arr[i], "mean", field + ".mean")) node.mean = *m;
      if (auto v = r.number(arr[i], "variance", field + ".variance")) node.variance = *v;
      for (const auto& msg : NoiseSpec::violations({node})) r.fail(field, msg.substr(msg.find(": ") + 2));
      cfg.noise.push_back(node);
    }
  }

  if (auto v = r.text(doc, "variant", "variant")) {
    if (auto parsed = parse_variant(*v)) cfg.variant = *parsed;
    else r.fail("variant", "expected frequency_dependent or undirected");
  }

  if (auto k = r.number(doc, "kappa", "kappa")) {
    cfg.kappa = *k;
    if (!(cfg.kappa > 0.0)) r.fail("kappa", "must be > 0");
  } else if (!doc.contains("kappa")) {
    r.fail("kappa", "required");
  }
  if (auto t = r.number(doc, "tau", "tau")) {
    cfg.tau = *t;
    if (!(cfg.tau > 0.0)) r.fail("tau", "must be > 0");
  } else if (!doc.contains("tau")) {
    r.fail("tau", "required");
  }

  if (doc.contains("gamma") && doc.contains("gamma_margin")) {
    r.fail("gamma", "give either gamma or gamma_margin, not both");
  } else if (auto g = r.number(doc, "gamma", "gamma")) {
    cfg.gamma = *g;
    if (!(cfg.gamma > 0.0 && cfg.gamma < kHalfPi)) r.fail("gamma", "must satisfy 0 < gamma < pi/2");
  } else if (auto eps = r.number(doc, "gamma_margin", "gamma_margin")) {
    cfg.gamma = kHalfPi - *eps;
    if (!(*eps > 0.0 && *eps < kHalfPi)) r.fail("gamma_margin", "must satisfy 0 < gamma_margin < pi/2");
  }

  if (auto h = r.count(doc, "horizon", "horizon")) {
    cfg.horizon = *h;
    if (cfg.horizon < 1) r.fail("horizon", "must be >= 1");
  }
  if (auto t = r.count(doc, "trials", "trials")) {
    cfg.trials = *t;
    if (cfg.trials < 1) r.fail("trials", "must be >= 1");
  }
  if (auto s = r.count(doc, "mc_samples", "mc_samples")) {
    cfg.mc_samples = *s;
    if (cfg.mc_samples < 2) r.fail("mc_samples", "must be >= 2");
  }
  if (auto s = r.count(doc, "seed", "seed")) {
    cfg.seed = *s;
  } else if (auto e = env_seed()) {
    cfg.seed = *e;
  }

  if (const json* init = r.object(doc, "initial", "initial")) {
    r.reject_unknown(*init, "initial", {"phases", "sampler"});
    if (init->contains("phases") && init->contains("sampler")) {
      r.fail("initial", "give either phases or sampler, not both");
    } else if (auto phases = r.numbers(*init, "phases", "initial.phases")) {
      if (phases->size() != n) {
        r.fail("initial.phases", "expected " + std::to_string(n) + " entries, got " + std::to_string(phases->size()));
      } else if (graph_ok) {
        const VectorXd theta = Eigen::Map<const VectorXd>(phases->data(), Eigen::Index(phases->size()));
        if (max_relative_geodesic(build_tree(cfg.nodes, cfg.edges), theta) > kHalfPi) {
          r.fail("initial.phases", "every edge distance must be <= pi/2");
        }
      }
      cfg.initial_phases = *phases;
    } else if (auto s = r.text(*init, "sampler", "initial.sampler")) {
      if (*s == "uniform_omega") cfg.sampler = InitialStateSampler::Kind::UniformOmega;
      else if (*s == "outside_cohesion") cfg.sampler = InitialStateSampler::Kind::OutsideCohesion;
      else r.fail("initial.sampler", "expected uniform_omega or outside_cohesion");
    }
  }

  if (auto p = r.text(doc, "pair_set", "pair_set")) {
    if (*p == "all_pairs") cfg.pair_set = PairSet::AllPairs;
    else if (*p == "edges") cfg.pair_set = PairSet::Edges;
    else r.fail("pair_set", "expected all_pairs or edges");
  }

  if (const json* d = r.object(doc, "drift", "drift")) {
    r.reject_unknown(*d, "drift", {"states", "noise_samples"});
    if (auto s = r.count(*d, "states", "drift.states")) cfg.drift_states = *s;
    if (auto s = r.count(*d, "noise_samples", "drift.noise_samples")) {
      cfg.drift_noise_samples = *s;
      if (cfg.drift_noise_samples < 2) r.fail("drift.noise_samples", "must be >= 2");
    }
  }

  if (auto t = r.count(doc, "threads", "threads")) cfg.threads = static_cast<unsigned>(*t);

  if (const json* o = r.object(doc, "output", "output")) {
    r.reject_unknown(*o, "output", {"directory", "prefix", "decimation"});
    if (auto dir = r.text(*o, "directory", "output.directory")) cfg.output_directory = *dir;
    if (auto p = r.text(*o, "prefix", "output.prefix")) {
      cfg.output_prefix = *p;
      if (p->empty() || p->find('/') != std::string::npos) {
        r.fail("output.prefix", "must be a non-empty file name stem");
      }
    }
    if (auto dec = r.count(*o, "decimation", "output.decimation")) {
      cfg.decimation = *dec;
      if (cfg.decimation < 1) r.fail("output.decimation", "must be >= 1");
    }
  }
  if (cfg.output_prefix.empty()) cfg.output_prefix = cfg.name;

  if (!r.violations.empty()) throw ValidationError(std::move(r.violations));
  return cfg;
}

}  // namespace

void apply_override(json& doc, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ValidationError(std::vector<Violation>{{assignment, "override must look like key=value"}});
  }
  const std::string key = assignment.substr(0, eq);
  const std::string raw = assignment.substr(eq + 1);
  json value = json::parse(raw, nullptr, false);
  if (value.is_discarded()) value = raw;

  json* node = &doc;
  std::stringstream path(key);
  std::string part;
  std::vector<std::string> parts;
  while (std::getline(path, part, '.')) parts.push_back(part);
  for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
    if (!node->is_object()) throw ValidationError(std::vector<Violation>{{key, "cannot descend into a non-object"}});
    node = &(*node)[parts[i]];
  }
  if (!node->is_object() && !node->is_null()) throw ValidationError(std::vector<Violation>{{key, "cannot descend into a non-object"}});
  if (parts.back() == "gamma") node->erase("gamma_margin");
  if (parts.back() == "gamma_margin") node->erase("gamma");
  (*node)[parts.back()] = value;
}

ExperimentConfig parse_config(const std::string& text, const std::vector<std::string>& overrides) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    const auto [line, column] = line_and_column(text, e.byte);
    throw ParseError("parse error at line " + std::to_string(line) + ", column " + std::to_string(column) + ": " +
                         e.what(),
                     line, column);
  }
  for (const auto& o : overrides) apply_override(doc, o);
  return validate(doc);
}

ExperimentConfig load_config(const std::filesystem::path& path, const std::vector<std::string>& overrides) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read configuration file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str(), overrides);
}

TreeGraph ExperimentConfig::graph() const { return build_tree(nodes, edges); }

VectorXd ExperimentConfig::omega_vector() const {
  return Eigen::Map<const VectorXd>(omega.data(), Eigen::Index(omega.size()));
}

NoiseSpec ExperimentConfig::noise_spec() const { return NoiseSpec(noise); }

NetworkModel ExperimentConfig::model() const {
  return NetworkModel(graph(), omega_vector(), noise_spec(), kappa, tau, variant);
}

CohesionParams ExperimentConfig::cohesion() const { return CohesionParams(gamma); }

InitialStateSampler ExperimentConfig::initial_sampler() const {
  if (initial_phases) {
    return InitialStateSampler::fixed(Eigen::Map<const VectorXd>(initial_phases->data(), Eigen::Index(nodes)));
  }
  if (sampler == InitialStateSampler::Kind::OutsideCohesion) return InitialStateSampler::outside_cohesion(gamma);
  return InitialStateSampler::uniform_omega();
}

unsigned ExperimentConfig::worker_threads() const {
  if (threads > 0) return threads;
  return std::max(1u, std::thread::hardware_concurrency());
}

nlohmann::ordered_json ExperimentConfig::to_json() const {
  nlohmann::ordered_json doc;
  doc["name"] = name;
  nlohmann::ordered_json edge_list = nlohmann::ordered_json::array();
  for (const Edge& e : edges) edge_list.push_back({e.tail, e.head});
  doc["graph"] = {{"nodes", nodes}, {"edges", edge_list}};
  doc["omega"] = omega;
  nlohmann::ordered_json noise_list = nlohmann::ordered_json::array();
  for (const NodeNoise& node : noise) {
    noise_list.push_back({{"family", to_string(node.family)}, {"mean", node.mean}, {"variance", node.variance}});
  }
  doc["noise"] = noise_list;
  doc["variant"] = to_string(variant);
  doc["kappa"] = kappa;
  doc["tau"] = tau;
  doc["gamma"] = gamma;
  doc["horizon"] = horizon;
  doc["trials"] = trials;
  doc["mc_samples"] = mc_samples;
  doc["seed"] = seed;
  if (initial_phases) doc["initial"] = {{"phases", *initial_phases}};
  else doc["initial"] = {{"sampler", to_string(sampler)}};
  doc["pair_set"] = to_string(pair_set);
  doc["drift"] = {{"states", drift_states}, {"noise_samples", drift_noise_samples}};
  doc["threads"] = threads;
  doc["output"] = {{"directory", output_directory.string()}, {"prefix", output_prefix}, {"decimation", decimation}};
  return doc;
}

}  // namespace cohesion
