// Copyright 2026 The wfdiff Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include "wfdiff/cli/config.hpp"

#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <boost/algorithm/string/trim.hpp>
#include <boost/lexical_cast.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

namespace wfdiff::cli {

namespace pt = boost::property_tree;

namespace {

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw ConfigIoError(fmt::format("cannot read {}", p.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

pt::ptree parse_ini(const std::string& text, const std::string& name) {
  std::istringstream in(text);
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigIoError(fmt::format("{}: line {}: {}", name, e.line(),
                                    e.message()));
  }
  return tree;
}

std::uint64_t fnv1a(std::uint64_t h, const std::string& bytes) {
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Typed access to one section with unknown-key detection.
class Section {
 public:
  Section(const pt::ptree* tree, std::string name)
      : tree_(tree), name_(std::move(name)) {}

  template <class T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    if (!tree_) return;
    if (auto v = tree_->get_optional<std::string>(key)) out = convert<T>(key, *v);
  }

  template <class T>
  void get(const char* key, std::optional<T>& out) {
    seen_.insert(key);
    if (!tree_) return;
    if (auto v = tree_->get_optional<std::string>(key)) {
      const std::string s = boost::algorithm::trim_copy(*v);
      if (s.empty() || s == "none" || s == "auto") {
        out.reset();
      } else {
        out = convert<T>(key, s);
      }
    }
  }

  void get(const char* key, std::vector<double>& out) {
    seen_.insert(key);
    if (!tree_) return;
    if (auto v = tree_->get_optional<std::string>(key)) {
      try {
        out = parse_list(*v);
      } catch (const InvalidParams& e) {
        throw InvalidParams(fmt::format("[{}] {}: {}", name_, key, e.what()));
      }
    }
  }

  void get(const char* key, std::vector<std::string>& out) {
    seen_.insert(key);
    if (!tree_) return;
    if (auto v = tree_->get_optional<std::string>(key)) {
      out.clear();
      std::istringstream in(*v);
      std::string item;
      while (std::getline(in, item, ',')) {
        boost::algorithm::trim(item);
        if (!item.empty()) out.push_back(item);
      }
    }
  }

  void reject_unknown() const {
    if (!tree_) return;
    for (const auto& [key, child] : *tree_) {
      if (!child.empty()) continue;  // nested sections are checked separately
      if (!seen_.count(key)) {
        throw InvalidParams(fmt::format("unknown key '{}' in [{}]", key, name_));
      }
    }
  }

 private:
  template <class T>
  T convert(const char* key, const std::string& raw) const {
    const std::string s = boost::algorithm::trim_copy(raw);
    if constexpr (std::is_same_v<T, std::string>) {
      return s;
    } else if constexpr (std::is_same_v<T, bool>) {
      if (s == "true" || s == "1" || s == "yes") return true;
      if (s == "false" || s == "0" || s == "no") return false;
      throw InvalidParams(fmt::format("[{}] {}: expected a boolean, got '{}'",
                                      name_, key, s));
    } else {
      if constexpr (std::is_unsigned_v<T>) {
        if (!s.empty() && s.front() == '-') {
          throw InvalidParams(fmt::format(
              "[{}] {}: expected a nonnegative integer, got '{}'", name_, key, s));
        }
      }
      try {
        return boost::lexical_cast<T>(s);
      } catch (const boost::bad_lexical_cast&) {
        throw InvalidParams(
            fmt::format("[{}] {}: cannot parse '{}'", name_, key, s));
      }
    }
  }

  const pt::ptree* tree_;
  std::string name_;
  std::set<std::string> seen_;
};

// Sections only; a top-level key of the same name is not a section.
const pt::ptree* child(const pt::ptree& tree, const char* name) {
  auto it = tree.find(name);
  if (it == tree.not_found() || it->second.empty()) return nullptr;
  return &it->second;
}

void read_model(Section s, ModelBlock& m) {
  s.get("family", m.family);
  s.get("theta1", m.theta1);
  s.get("theta2", m.theta2);
  s.get("epsilon", m.epsilon);
  s.get("beta0", m.beta0);
  s.get("beta1", m.beta1);
  s.get("drift_expr", m.drift_expr);
  s.get("sigma_expr", m.sigma_expr);
  s.get("mu_bound", m.mu_bound);
  s.get("b0", m.b0);
  s.get("b1", m.b1);
  s.reject_unknown();
  if (m.family != "wf_mutation" && m.family != "custom") {
    throw InvalidParams(fmt::format(
        "model family '{}' is not one of wf_mutation, custom", m.family));
  }
  if (m.family == "custom") {
    if (m.drift_expr.empty() || m.sigma_expr.empty()) {
      throw InvalidParams("custom model needs drift_expr and sigma_expr");
    }
    if (!m.beta0 || !m.beta1) {
      throw InvalidParams("custom model needs beta0 and beta1");
    }
  }
}

}  // namespace

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    boost::algorithm::trim(item);
    if (item.empty()) continue;
    try {
      out.push_back(boost::lexical_cast<double>(item));
    } catch (const boost::bad_lexical_cast&) {
      throw InvalidParams(fmt::format("cannot parse '{}' as a number", item));
    }
  }
  return out;
}

ModelSpec ModelBlock::build() const {
  if (family == "custom") {
    return custom_model(drift_expr, sigma_expr, epsilon, mu_bound, *beta0, b0,
                        *beta1, b1);
  }
  if (beta0 || beta1) {
    if (!beta0 || !beta1) {
      throw InvalidParams("wf_mutation needs both beta0 and beta1 or neither");
    }
    return wf_mutation_with_envelope(theta1, theta2, epsilon, *beta0, *beta1);
  }
  return wf_mutation_max_window(theta1, theta2, epsilon);
}

ExperimentConfig load_config(const std::string& path) {
  ExperimentConfig cfg;
  cfg.path = path;
  const std::string text = read_file(path);
  const pt::ptree tree = parse_ini(text, path);
  std::uint64_t hash = fnv1a(0xcbf29ce484222325ULL, text);

  static const std::set<std::string> kSections = {
      "model", "sim", "validate", "hitting", "invariant", "converge"};
  for (const auto& [key, node] : tree) {
    if (!node.empty() && !kSections.count(key)) {
      throw InvalidParams(fmt::format("unknown section [{}]", key));
    }
  }

  Section top(&tree, "top level");
  std::string model_path;
  top.get("seed", cfg.seed);
  top.get("out", cfg.out_dir);
  top.get("model", model_path);
  top.reject_unknown();

  if (!model_path.empty()) {
    if (child(tree, "model")) {
      throw InvalidParams("give either a model file or a [model] section");
    }
    std::filesystem::path mp(model_path);
    if (mp.is_relative()) mp = std::filesystem::path(path).parent_path() / mp;
    const std::string mtext = read_file(mp);
    hash = fnv1a(hash, mtext);
    const pt::ptree mtree = parse_ini(mtext, mp.string());
    for (const auto& [key, node] : mtree) {
      if (!node.empty()) {
        throw InvalidParams(
            fmt::format("model file {} must not contain sections", mp.string()));
      }
    }
    read_model(Section(&mtree, "model"), cfg.model);
  } else {
    read_model(Section(child(tree, "model"), "model"), cfg.model);
  }
  cfg.hash = hash;

  {
    Section s(child(tree, "sim"), "sim");
    cfg.sim.t_max = 50.0;
    s.get("dt", cfg.sim.dt);
    s.get("t_max", cfg.sim.t_max);
    s.get("max_halvings", cfg.sim.max_halvings);
    s.get("guard", cfg.sim.guard);
    s.get("meet_tol", cfg.sim.meet_tol);
    s.reject_unknown();
    cfg.sim.validate();
  }
  {
    Section s(child(tree, "validate"), "validate");
    s.get("grid_points", cfg.validation.grid_points);
    s.get("thresholds", cfg.validation.nondegeneracy_thresholds);
    s.reject_unknown();
    if (cfg.validation.grid_points < 16) {
      throw InvalidParams("[validate] grid_points must be >= 16");
    }
  }
  {
    HittingBlock& h = cfg.hitting;
    Section s(child(tree, "hitting"), "hitting");
    s.get("m", h.m);
    s.get("c", h.c);
    s.get("alpha", h.alpha);
    s.get("dt", h.dt);
    s.get("checks", h.checks);
    s.get("n", h.n);
    s.get("dump_samples", h.dump_samples);
    s.get("dump_path", h.dump_path);
    s.get("path_x0", h.path_x0);
    s.get("path_t_max", h.path_t_max);
    s.get("path_stride", h.path_stride);
    s.get("lemma1_n", h.lemma1_n);
    s.get("lemma1_x0", h.lemma1_x0);
    s.get("lemma1_upper", h.lemma1_upper);
    s.get("lemma1_lowers", h.lemma1_lowers);
    s.reject_unknown();
    static const std::set<std::string> kChecks = {"prop1", "prop2", "thm1",
                                                  "occupation"};
    for (const auto& c : h.checks) {
      if (!kChecks.count(c)) {
        throw InvalidParams(fmt::format(
            "[hitting] checks: '{}' is not one of prop1, prop2, thm1, occupation",
            c));
      }
    }
    if (h.c.empty()) throw InvalidParams("[hitting] c must list at least one rate");
    if (h.n == 0) throw InvalidParams("[hitting] n must be positive");
    if (h.path_stride == 0) throw InvalidParams("[hitting] path_stride must be positive");
    if (h.dt) {
      SimConfig hs = cfg.sim;
      hs.dt = *h.dt;
      hs.validate();
    }
  }
  {
    InvariantBlock& v = cfg.invariant;
    Section s(child(tree, "invariant"), "invariant");
    double a1 = v.cycles.alpha1;
    double a2 = v.cycles.alpha2;
    std::size_t bins = v.cycles.bins;
    std::vector<double> exps = v.cycles.moment_exponents;
    s.get("alpha1", a1);
    s.get("alpha2", a2);
    s.get("bins", bins);
    s.get("moment_exponents", exps);
    s.get("chains", v.chains);
    s.get("cycles_per_chain", v.cycles_per_chain);
    s.reject_unknown();
    v.cycles = CycleConfig(a1, a2, bins, exps);
    if (v.chains == 0 || v.cycles_per_chain == 0) {
      throw InvalidParams("[invariant] chains and cycles_per_chain must be positive");
    }
  }
  {
    ConvergeBlock& c = cfg.converge;
    Section s(child(tree, "converge"), "converge");
    std::string x0 = "0.05";
    s.get("x0", x0);
    s.get("times", c.times);
    s.get("replicas", c.replicas);
    s.get("bins", c.bins);
    s.get("m", c.m);
    s.get("c", c.c);
    s.get("alpha", c.alpha);
    s.get("pairs", c.pairs);
    s.get("resamples", c.resamples);
    s.reject_unknown();
    if (x0 == "stationary") {
      c.x0.reset();
    } else {
      try {
        c.x0 = boost::lexical_cast<double>(x0);
      } catch (const boost::bad_lexical_cast&) {
        throw InvalidParams(fmt::format(
            "[converge] x0: expected a number or 'stationary', got '{}'", x0));
      }
    }
    if (c.times.empty()) throw InvalidParams("[converge] times must not be empty");
    for (std::size_t i = 0; i < c.times.size(); ++i) {
      if (!(c.times[i] > 0.0) || (i > 0 && !(c.times[i] > c.times[i - 1]))) {
        throw InvalidParams("[converge] times must be positive and increasing");
      }
    }
    if (c.replicas < 2) throw InvalidParams("[converge] replicas must be >= 2");
    if (c.bins < 2) throw InvalidParams("[converge] bins must be >= 2");
  }
  return cfg;
}

}  // namespace wfdiff::cli
