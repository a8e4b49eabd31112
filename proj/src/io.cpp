#include "eatune/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace eatune::io {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

// Cursor into a document that knows where it is, for error messages.
class Node {
 public:
  Node(const json& j, std::string source, std::string path)
      : j_(j), source_(std::move(source)), path_(std::move(path)) {}

  [[noreturn]] void fail(const std::string& msg) const {
    throw Error(ErrorKind::Parse, source_ + ": " + (path_.empty() ? "<root>" : path_) + ": " + msg);
  }

  Node at(const std::string& key) const {
    if (!j_.is_object()) fail("expected an object");
    auto it = j_.find(key);
    if (it == j_.end()) Node(j_, source_, join(key)).fail("missing field");
    return Node(*it, source_, join(key));
  }

  bool has(const std::string& key) const { return j_.is_object() && j_.contains(key); }

  std::vector<std::string> keys() const {
    if (!j_.is_object()) fail("expected an object");
    std::vector<std::string> out;
    for (auto it = j_.begin(); it != j_.end(); ++it) out.push_back(it.key());
    return out;
  }

  Node at(std::size_t i) const {
    return Node(j_.at(i), source_, path_ + "[" + std::to_string(i) + "]");
  }

  std::size_t size() const {
    if (!j_.is_array()) fail("expected an array");
    return j_.size();
  }

  double number() const {
    if (!j_.is_number()) fail("expected a number");
    const double v = j_.get<double>();
    if (!std::isfinite(v)) fail("expected a finite number");
    return v;
  }

  long long integer() const {
    if (!j_.is_number_integer()) fail("expected an integer");
    return j_.get<long long>();
  }

  std::uint64_t unsigned_integer() const {
    if (!j_.is_number_unsigned() && !(j_.is_number_integer() && j_.get<long long>() >= 0)) {
      fail("expected a non-negative integer");
    }
    return j_.get<std::uint64_t>();
  }

  std::string string() const {
    if (!j_.is_string()) fail("expected a string");
    return j_.get<std::string>();
  }

  Frequency frequency() const {
    auto f = Frequency::try_from_ghz(number());
    if (!f) fail("frequency is not on the 0.1 GHz lattice");
    return *f;
  }

  Eigen::VectorXd vector(std::size_t expected) const {
    if (size() != expected) {
      fail("expected " + std::to_string(expected) + " values, got " + std::to_string(size()));
    }
    Eigen::VectorXd v(static_cast<Eigen::Index>(expected));
    for (std::size_t i = 0; i < expected; ++i) v(static_cast<Eigen::Index>(i)) = at(i).number();
    return v;
  }

  double number_or(const std::string& key, double fallback) const {
    return has(key) ? at(key).number() : fallback;
  }

 private:
  std::string join(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  const json& j_;
  std::string source_;
  std::string path_;
};

Node root(const json& j, const std::string& source, const std::string& kind) {
  Node r(j, source, "");
  const long long version = r.at("schema_version").integer();
  if (version != kSchemaVersion) {
    r.at("schema_version").fail("unsupported schema_version " + std::to_string(version));
  }
  const std::string actual = r.at("kind").string();
  if (actual != kind) r.at("kind").fail("expected \"" + kind + "\", got \"" + actual + "\"");
  return r;
}

ordered_json header(const char* kind) {
  ordered_json j;
  j["schema_version"] = kSchemaVersion;
  j["kind"] = kind;
  return j;
}

SystemConfig config_from(const Node& n) {
  const long long threads = n.at("omp_threads").integer();
  if (threads < 1) n.at("omp_threads").fail("thread count must be at least 1");
  return SystemConfig{static_cast<int>(threads), n.at("core_freq").frequency(),
                      n.at("uncore_freq").frequency()};
}

FrequencyGrid grid_from(const Node& n) {
  try {
    return FrequencyGrid(n.at("cf_min").number(), n.at("cf_max").number(),
                         n.at("cf_step").number(), n.at("ucf_min").number(),
                         n.at("ucf_max").number(), n.at("ucf_step").number());
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Parse) throw;
    n.fail(e.what());
  }
}

template <typename Vec>
ordered_json array_of(const Vec& v) {
  ordered_json a = ordered_json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v.data()[i]);
  return a;
}

}  // namespace

ordered_json to_json(const SystemConfig& c) {
  return ordered_json{{"omp_threads", c.omp_threads},
                      {"core_freq", c.core.ghz()},
                      {"uncore_freq", c.uncore.ghz()}};
}

ordered_json to_json(const FrequencyGrid& g) {
  return ordered_json{{"cf_min", g.cf_min().ghz()},
                      {"cf_max", g.cf_max().ghz()},
                      {"cf_step", g.cf_step() / 10.0},
                      {"ucf_min", g.ucf_min().ghz()},
                      {"ucf_max", g.ucf_max().ghz()},
                      {"ucf_step", g.ucf_step() / 10.0}};
}

ordered_json to_json(const ProfileDocument& doc) {
  ordered_json j = header("profile");
  j["benchmark"] = doc.benchmark;
  j["node_id"] = doc.node_id;
  j["counter_order"] = ordered_json::array();
  for (auto name : kCounterNames) j["counter_order"].push_back(std::string(name));
  ordered_json records = ordered_json::array();
  for (const auto& s : doc.records) {
    ordered_json r;
    r["threads"] = s.config.omp_threads;
    r["cf"] = s.config.core.ghz();
    r["ucf"] = s.config.uncore.ghz();
    r["duration"] = s.duration;
    r["energy"] = s.node_energy;
    if (s.counters) r["counters"] = array_of(s.counters->values);
    if (!s.region_energy.empty()) {
      ordered_json regions = ordered_json::object();
      for (const auto& [name, e] : s.region_energy) regions[name] = e;
      r["regions"] = std::move(regions);
    }
    records.push_back(std::move(r));
  }
  j["records"] = std::move(records);
  return j;
}

ProfileDocument profile_from_json(const json& j, const std::string& source) {
  const Node r = root(j, source, "profile");
  ProfileDocument doc;
  doc.benchmark = r.at("benchmark").string();
  doc.node_id = r.at("node_id").string();
  const Node records = r.at("records");
  for (std::size_t i = 0; i < records.size(); ++i) {
    const Node rec = records.at(i);
    PhaseSample s;
    const long long threads = rec.at("threads").integer();
    if (threads < 1) rec.at("threads").fail("thread count must be at least 1");
    s.config = SystemConfig{static_cast<int>(threads), rec.at("cf").frequency(),
                            rec.at("ucf").frequency()};
    s.duration = rec.at("duration").number();
    s.node_energy = rec.at("energy").number();
    if (!(s.duration > 0.0)) rec.at("duration").fail("must be positive");
    if (!(s.node_energy > 0.0)) rec.at("energy").fail("must be positive");
    if (rec.has("counters")) {
      const Node c = rec.at("counters");
      const Eigen::VectorXd v = c.vector(kCounterCount);
      if ((v.array() < 0.0).any()) c.fail("counters must be non-negative");
      s.counters = PmcVector(CounterValues(v), false);
    }
    if (rec.has("regions")) {
      const Node regions = rec.at("regions");
      for (const auto& name : regions.keys()) {
        const double e = regions.at(name).number();
        if (e < 0.0) regions.at(name).fail("region energy must be non-negative");
        s.region_energy[name] = e;
      }
    }
    s.node_id = doc.node_id;
    doc.records.push_back(std::move(s));
  }
  return doc;
}

ordered_json to_json(const EnergyModel& model) {
  ordered_json j = header("energy_model");
  j["architecture"] = {kInputs, kHidden, kHidden, 1};
  j["feature_order"] = ordered_json::array();
  for (auto name : kCounterNames) j["feature_order"].push_back(std::string(name));
  j["feature_order"].push_back("CF");
  j["feature_order"].push_back("UCF");
  j["standardizer"] = {{"means", array_of(model.standardizer.means())},
                       {"scales", array_of(model.standardizer.scales())}};
  const auto& p = model.params;
  ordered_json layers = ordered_json::array();
  layers.push_back({{"weights", array_of(p.w1)}, {"biases", array_of(p.b1)}});
  layers.push_back({{"weights", array_of(p.w2)}, {"biases", array_of(p.b2)}});
  layers.push_back({{"weights", array_of(p.w3)}, {"biases", ordered_json::array({p.b3})}});
  j["layers"] = std::move(layers);
  const auto& c = model.config;
  j["training"] = {{"learning_rate", c.learning_rate}, {"epochs", c.epochs},
                   {"adam_beta1", c.adam_beta1},       {"adam_beta2", c.adam_beta2},
                   {"adam_eps", c.adam_eps},           {"seed", c.seed}};
  return j;
}

EnergyModel energy_model_from_json(const json& j, const std::string& source) {
  const Node r = root(j, source, "energy_model");
  const Node arch = r.at("architecture");
  const Eigen::VectorXd shape = arch.vector(4);
  if (shape(0) != kInputs || shape(1) != kHidden || shape(2) != kHidden || shape(3) != 1) {
    arch.fail("only the 9-5-5-1 architecture is supported");
  }

  EnergyModel model;
  const Node st = r.at("standardizer");
  try {
    model.standardizer =
        Standardizer(st.at("means").vector(kInputs), st.at("scales").vector(kInputs));
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Parse) throw;
    st.fail(e.what());
  }

  const Node layers = r.at("layers");
  if (layers.size() != 3) layers.fail("expected 3 layers");
  auto load = [&](std::size_t idx, auto& w, auto& b) {
    const Node layer = layers.at(idx);
    const Eigen::VectorXd wv = layer.at("weights").vector(static_cast<std::size_t>(w.size()));
    std::copy(wv.data(), wv.data() + wv.size(), w.data());
    const Eigen::VectorXd bv = layer.at("biases").vector(static_cast<std::size_t>(b.size()));
    std::copy(bv.data(), bv.data() + bv.size(), b.data());
  };
  Eigen::Matrix<double, 1, 1> b3;
  load(0, model.params.w1, model.params.b1);
  load(1, model.params.w2, model.params.b2);
  load(2, model.params.w3, b3);
  model.params.b3 = b3(0);

  const Node t = r.at("training");
  model.config.learning_rate = t.at("learning_rate").number();
  model.config.epochs = static_cast<int>(t.at("epochs").integer());
  model.config.adam_beta1 = t.at("adam_beta1").number();
  model.config.adam_beta2 = t.at("adam_beta2").number();
  model.config.adam_eps = t.at("adam_eps").number();
  model.config.seed = t.at("seed").unsigned_integer();
  return model;
}

ordered_json to_json(const TuningModelDocument& doc) {
  ordered_json j = header("tuning_model");
  j["default_config"] = to_json(doc.model.default_config);
  ordered_json scenarios = ordered_json::array();
  for (const auto& s : doc.model.scenarios) {
    ordered_json members = ordered_json::array();
    for (const auto& m : s.members) members.push_back(m);
    scenarios.push_back({{"config", to_json(s.config)}, {"members", std::move(members)}});
  }
  j["scenarios"] = std::move(scenarios);
  j["provenance"] = {{"model_hash", doc.provenance.model_hash},
                     {"seed", doc.provenance.seed},
                     {"grid", to_json(doc.provenance.grid)}};
  return j;
}

TuningModelDocument tuning_model_from_json(const json& j, const std::string& source) {
  const Node r = root(j, source, "tuning_model");
  TuningModelDocument doc;
  doc.model.default_config = config_from(r.at("default_config"));
  const Node scenarios = r.at("scenarios");
  std::set<std::string> seen_regions;
  std::set<SystemConfig> seen_configs;
  for (std::size_t i = 0; i < scenarios.size(); ++i) {
    const Node s = scenarios.at(i);
    Scenario sc;
    sc.config = config_from(s.at("config"));
    if (!seen_configs.insert(sc.config).second) s.at("config").fail("configuration repeated");
    const Node members = s.at("members");
    if (members.size() == 0) members.fail("scenario has no members");
    for (std::size_t m = 0; m < members.size(); ++m) {
      std::string name = members.at(m).string();
      if (!seen_regions.insert(name).second) {
        members.at(m).fail("region " + name + " appears in more than one scenario");
      }
      sc.members.insert(std::move(name));
    }
    doc.model.scenarios.push_back(std::move(sc));
  }
  const Node prov = r.at("provenance");
  doc.provenance.model_hash = prov.at("model_hash").string();
  doc.provenance.seed = prov.at("seed").unsigned_integer();
  doc.provenance.grid = grid_from(prov.at("grid"));
  return doc;
}

ordered_json to_json(const EvalReport& report, const TrainingConfig& cfg) {
  ordered_json j = header("loocv_report");
  j["epochs"] = cfg.epochs;
  j["learning_rate"] = cfg.learning_rate;
  j["seed"] = cfg.seed;
  ordered_json per = ordered_json::object();
  for (const auto& [name, value] : report.per_benchmark_mape) per[name] = value;
  j["per_benchmark_mape"] = std::move(per);
  j["mean_mape"] = report.mean_mape;
  return j;
}

ordered_json to_json(const RunReport& report) {
  ordered_json j;
  j["job_energy"] = report.job_energy;
  j["cpu_energy"] = report.cpu_energy;
  j["wall_time"] = report.wall_time;
  j["switch_count"] = report.switch_count;
  j["switch_overhead_time"] = report.switch_overhead_time;
  ordered_json regions = ordered_json::object();
  for (const auto& [name, e] : report.per_region) {
    regions[name] = {{"energy", e.energy}, {"time", e.time}};
  }
  j["per_region"] = std::move(regions);
  return j;
}

ordered_json to_json(const ExperimentSpec& spec) {
  ordered_json j = header("experiment");
  ordered_json nodes = ordered_json::array();
  for (const auto& n : spec.nodes) {
    nodes.push_back({{"node_id", n.node_id},
                     {"power_offset", n.power_offset},
                     {"noise_sigma", n.noise_sigma},
                     {"cf_transition", n.cf_transition},
                     {"ucf_transition", n.ucf_transition},
                     {"measurement_delay", n.measurement_delay},
                     {"cores", n.cores},
                     {"seed", n.seed},
                     {"power",
                      {{"p_static", n.power.p_static},
                       {"alpha", n.power.alpha},
                       {"beta", n.power.beta},
                       {"gamma", n.power.gamma},
                       {"platform_power", n.power.platform_power},
                       {"cf_ref", n.power.cf_ref},
                       {"ucf_ref", n.power.ucf_ref},
                       {"reference_threads", n.power.reference_threads}}}});
  }
  j["nodes"] = std::move(nodes);
  ordered_json apps = ordered_json::array();
  for (const auto& a : spec.applications) {
    ordered_json regions = ordered_json::array();
    for (const auto& r : a.regions) {
      regions.push_back({{"name", r.name},
                         {"boundedness", r.boundedness},
                         {"base_work", r.base_work},
                         {"thread_scaling", r.thread_scaling},
                         {"counters", array_of(r.counter_signature.values)}});
    }
    apps.push_back({{"name", a.name}, {"iterations", a.iterations}, {"regions", std::move(regions)}});
  }
  j["applications"] = std::move(apps);
  return j;
}

ExperimentSpec experiment_from_json(const json& j, const std::string& source) {
  const Node r = root(j, source, "experiment");
  ExperimentSpec spec;
  const Node nodes = r.at("nodes");
  if (nodes.size() == 0) nodes.fail("at least one node is required");
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const Node n = nodes.at(i);
    NodeModel node;
    node.node_id = n.has("node_id") ? n.at("node_id").string() : "node" + std::to_string(i);
    node.power_offset = n.number_or("power_offset", node.power_offset);
    node.noise_sigma = n.number_or("noise_sigma", node.noise_sigma);
    node.cf_transition = n.number_or("cf_transition", node.cf_transition);
    node.ucf_transition = n.number_or("ucf_transition", node.ucf_transition);
    node.measurement_delay = n.number_or("measurement_delay", node.measurement_delay);
    if (n.has("cores")) node.cores = static_cast<int>(n.at("cores").integer());
    if (n.has("seed")) node.seed = n.at("seed").unsigned_integer();
    if (node.noise_sigma < 0.0) n.at("noise_sigma").fail("must be non-negative");
    if (node.cores < 1) n.at("cores").fail("must be at least 1");
    if (n.has("power")) {
      const Node p = n.at("power");
      auto& k = node.power;
      k.p_static = p.number_or("p_static", k.p_static);
      k.alpha = p.number_or("alpha", k.alpha);
      k.beta = p.number_or("beta", k.beta);
      k.gamma = p.number_or("gamma", k.gamma);
      k.platform_power = p.number_or("platform_power", k.platform_power);
      k.cf_ref = p.number_or("cf_ref", k.cf_ref);
      k.ucf_ref = p.number_or("ucf_ref", k.ucf_ref);
      if (p.has("reference_threads")) {
        k.reference_threads = static_cast<int>(p.at("reference_threads").integer());
      }
    }
    spec.nodes.push_back(std::move(node));
  }

  const Node apps = r.at("applications");
  for (std::size_t i = 0; i < apps.size(); ++i) {
    const Node a = apps.at(i);
    Application app;
    app.name = a.at("name").string();
    app.iterations = static_cast<int>(a.at("iterations").integer());
    if (app.iterations < 0) a.at("iterations").fail("must be non-negative");
    const Node regions = a.at("regions");
    for (std::size_t k = 0; k < regions.size(); ++k) {
      const Node reg = regions.at(k);
      RegionArchetype arch;
      arch.name = reg.at("name").string();
      arch.boundedness = reg.at("boundedness").number();
      arch.base_work = reg.at("base_work").number();
      arch.thread_scaling = reg.number_or("thread_scaling", 1.0);
      try {
        if (reg.has("counters")) {
          const Node c = reg.at("counters");
          const Eigen::VectorXd v = c.vector(kCounterCount);
          if ((v.array() < 0.0).any()) c.fail("counters must be non-negative");
          arch.counter_signature = PmcVector(CounterValues(v), true);
        } else if (arch.boundedness >= 0.0 && arch.boundedness <= 1.0) {
          arch.counter_signature = counter_signature_for(arch.boundedness);
        }
        check_archetype(arch);
      } catch (const Error& e) {
        if (e.kind() == ErrorKind::Parse) throw;
        reg.fail(e.what());
      }
      app.regions.push_back(std::move(arch));
    }
    spec.applications.push_back(std::move(app));
  }
  return spec;
}

FrequencyGrid parse_grid(const std::string& text) {
  auto fail = [&] {
    throw Error(ErrorKind::InvalidInput,
                "grid \"" + text + "\" must look like cf_min:cf_max[:step],ucf_min:ucf_max[:step]");
  };
  const auto comma = text.find(',');
  if (comma == std::string::npos) fail();
  auto axis = [&](const std::string& part) {
    std::array<double, 3> v{0.0, 0.0, 0.1};
    std::stringstream ss(part);
    std::string item;
    int count = 0;
    while (std::getline(ss, item, ':')) {
      if (count >= 3) fail();
      try {
        std::size_t used = 0;
        v[static_cast<std::size_t>(count)] = std::stod(item, &used);
        if (used != item.size()) fail();
      } catch (const std::logic_error&) {
        fail();
      }
      ++count;
    }
    if (count < 2) fail();
    return v;
  };
  const auto cf = axis(text.substr(0, comma));
  const auto ucf = axis(text.substr(comma + 1));
  return FrequencyGrid(cf[0], cf[1], cf[2], ucf[0], ucf[1], ucf[2]);
}

json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Parse, path.string() + ": cannot open file");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::Parse, path.string() + ": " + e.what());
  }
}

void write_json(const std::filesystem::path& path, const ordered_json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::InvalidInput, path.string() + ": cannot write file");
  out << j.dump(2) << '\n';
  if (!out) throw Error(ErrorKind::InvalidInput, path.string() + ": write failed");
}

ProfileDocument read_profile(const std::filesystem::path& path) {
  return profile_from_json(read_json(path), path.string());
}

std::vector<ProfileDocument> read_profile_dir(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) {
    throw Error(ErrorKind::InvalidInput, dir.string() + ": not a directory");
  }
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<ProfileDocument> docs;
  for (const auto& f : files) docs.push_back(read_profile(f));
  return docs;
}

EnergyModel read_energy_model(const std::filesystem::path& path) {
  return energy_model_from_json(read_json(path), path.string());
}

TuningModelDocument read_tuning_model(const std::filesystem::path& path) {
  return tuning_model_from_json(read_json(path), path.string());
}

ExperimentSpec read_experiment(const std::filesystem::path& path) {
  return experiment_from_json(read_json(path), path.string());
}

std::string file_hash(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Parse, path.string() + ": cannot open file");
  std::uint64_t h = 0xcbf29ce484222325ULL;
  char c;
  while (in.get(c)) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace eatune::io
