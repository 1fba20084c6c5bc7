#include "eelm/cli/config.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

#include "eelm/dataset.hpp"
#include "eelm/test_functions.hpp"

namespace eelm::cli {

namespace pt = boost::property_tree;

namespace {

constexpr std::string_view kModelPrefix = "model.";

pt::ptree readIni(std::istream& in) {
  pt::ptree tree;
  try {
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ParseError(e.line(), e.message());
  }
  return tree;
}

pt::ptree readIniFile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open config file {}", path.string()));
  return readIni(in);
}

// Looks a key up without ptree's dotted-path splitting. A '#' or ';' preceded
// by whitespace starts a trailing comment.
std::optional<std::string> raw(const pt::ptree& section, const std::string& key) {
  const auto it = section.find(key);
  if (it == section.not_found()) return std::nullopt;
  std::string value = it->second.data();
  for (std::size_t i = 1; i < value.size(); ++i)
    if ((value[i] == '#' || value[i] == ';') && std::isspace(static_cast<unsigned char>(value[i - 1]))) {
      value.resize(i);
      break;
    }
  return boost::trim_copy(value);
}

const pt::ptree* child(const pt::ptree& root, const std::string& name) {
  const auto it = root.find(name);
  return it == root.not_found() ? nullptr : &it->second;
}

template <class T>
T parseNumber(const std::string& s, const std::string& where) {
  T value{};
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, value);
  if (ec != std::errc() || ptr != end) throw ConfigError(fmt::format("{}: '{}' is not a valid number", where, s));
  return value;
}

bool parseBool(const std::string& s, const std::string& where) {
  const auto v = boost::to_lower_copy(s);
  if (v == "true" || v == "yes" || v == "on" || v == "1") return true;
  if (v == "false" || v == "no" || v == "off" || v == "0") return false;
  throw ConfigError(fmt::format("{}: '{}' is not a boolean", where, s));
}

std::vector<std::string> parseList(const std::string& s) {
  std::vector<std::string> out;
  boost::split(out, s, boost::is_any_of(","));
  for (auto& v : out) boost::trim(v);
  out.erase(std::remove(out.begin(), out.end(), std::string()), out.end());
  return out;
}

// Typed accessors: `section.key` in error messages.
class Section {
 public:
  Section(const pt::ptree* tree, std::string name) : tree_(tree), name_(std::move(name)) {}

  bool present() const noexcept { return tree_ != nullptr; }

  std::optional<std::string> str(const std::string& key) const {
    return tree_ ? raw(*tree_, key) : std::nullopt;
  }
  template <class T>
  std::optional<T> number(const std::string& key) const {
    const auto s = str(key);
    if (!s) return std::nullopt;
    return parseNumber<T>(*s, where(key));
  }
  std::optional<bool> flag(const std::string& key) const {
    const auto s = str(key);
    if (!s) return std::nullopt;
    return parseBool(*s, where(key));
  }
  template <class T>
  std::optional<std::vector<T>> numbers(const std::string& key) const {
    const auto s = str(key);
    if (!s) return std::nullopt;
    std::vector<T> out;
    for (const auto& item : parseList(*s)) out.push_back(parseNumber<T>(item, where(key)));
    return out;
  }
  std::optional<std::vector<std::string>> list(const std::string& key) const {
    const auto s = str(key);
    if (!s) return std::nullopt;
    return parseList(*s);
  }

  /// Rejects keys outside `known` so typos do not silently fall back to defaults.
  void restrictTo(std::initializer_list<std::string_view> known) const {
    if (!tree_) return;
    for (const auto& [key, value] : *tree_) {
      if (std::find(known.begin(), known.end(), key) == known.end())
        throw ConfigError(fmt::format("unknown key '{}' in [{}]", key, name_));
    }
  }

  std::string where(const std::string& key) const { return fmt::format("[{}] {}", name_, key); }

 private:
  const pt::ptree* tree_;
  std::string name_;
};

template <class T>
void assign(T& target, const std::optional<T>& value) {
  if (value) target = *value;
}

DataSection parseData(const Section& s, const std::filesystem::path& baseDir) {
  s.restrictTo({"source", "synthetic", "samples", "noise", "seed", "path", "target_scale", "units"});
  DataSection d;
  if (const auto src = s.str("source")) {
    if (*src == "synthetic") d.source = DataSection::Source::synthetic;
    else if (*src == "csv") d.source = DataSection::Source::csv;
    else throw ConfigError(fmt::format("{}: expected synthetic or csv, got '{}'", s.where("source"), *src));
  }
  if (const auto k = s.str("synthetic")) d.synthetic = harness::parseSyntheticKind(*k);
  assign(d.samples, s.number<Index>("samples"));
  assign(d.noise, s.number<double>("noise"));
  assign(d.seed, s.number<std::uint64_t>("seed"));
  if (const auto p = s.str("path")) {
    d.path = *p;
    if (d.path.is_relative() && !baseDir.empty()) d.path = baseDir / d.path;
  }
  d.targetScale = s.number<double>("target_scale");
  assign(d.units, s.str("units"));
  if (d.source == DataSection::Source::csv && d.path.empty())
    throw ConfigError("[data] source = csv needs a path");
  if (d.targetScale && !(*d.targetScale > 0.0)) throw ConfigError("[data] target_scale must be > 0");
  return d;
}

harness::FoldPlan parsePlan(const Section& s) {
  s.restrictTo({"folds", "runs", "seed"});
  harness::FoldPlan plan;
  assign(plan.foldCount, s.number<int>("folds"));
  assign(plan.runCount, s.number<int>("runs"));
  assign(plan.masterSeed, s.number<std::uint64_t>("seed"));
  plan.validate();
  return plan;
}

harness::ModelEntry parseModel(const std::string& name, const Section& s) {
  s.restrictTo({"type", "hidden", "activation", "penalty", "penalty_grid", "fitness_fraction", "optimizer",
                "population", "iterations", "evaluations", "biases", "weight_lower", "weight_upper",
                "somersault_factor", "levy_beta", "levy_scale", "inertia", "cognitive", "social",
                "velocity_clamp", "crossover_rate", "mutation_rate", "mutation_scale", "tournament",
                "blend_alpha", "elites", "spiral"});
  const std::string type = s.str("type").value_or("eelm");
  if (name.empty()) throw ConfigError("model sections need a name: [model.NAME]");

  if (type == "elm") {
    harness::PlainElmConfig c;
    assign(c.hiddenNodes, s.number<Index>("hidden"));
    if (const auto a = s.str("activation")) c.activation = elm::parseActivation(*a);
    assign(c.penalty, s.number<double>("penalty"));
    assign(c.penaltyGrid, s.numbers<double>("penalty_grid"));
    assign(c.fitnessFraction, s.number<double>("fitness_fraction"));
    for (const char* key : {"optimizer", "population", "iterations", "evaluations"})
      if (s.str(key)) throw ConfigError(fmt::format("{} does not apply to type = elm", s.where(key)));
    if (c.hiddenNodes < 1) throw ConfigError(fmt::format("{} must be >= 1", s.where("hidden")));
    return {name, c};
  }
  if (type != "eelm") throw ConfigError(fmt::format("{}: expected elm or eelm, got '{}'", s.where("type"), type));

  train::TrainingRunConfig c;
  assign(c.hiddenNodes, s.number<Index>("hidden"));
  if (const auto a = s.str("activation")) c.activation = elm::parseActivation(*a);
  assign(c.penalty, s.number<double>("penalty"));
  assign(c.penaltyGrid, s.numbers<double>("penalty_grid"));
  assign(c.fitnessFraction, s.number<double>("fitness_fraction"));
  assign(c.includeBiases, s.flag("biases"));
  assign(c.weightLower, s.number<double>("weight_lower"));
  assign(c.weightUpper, s.number<double>("weight_upper"));
  auto& o = c.optimizer;
  if (const auto k = s.str("optimizer")) o.kind = opt::parseOptimizerKind(*k);
  assign(o.populationSize, s.number<int>("population"));
  assign(o.maxIterations, s.number<int>("iterations"));
  if (const auto budget = s.number<long long>("evaluations")) {
    if (s.str("iterations")) throw ConfigError(fmt::format("[{}] set iterations or evaluations, not both", "model." + name));
    o.maxIterations = opt::iterationsForBudget(o.kind, o.populationSize, *budget, o.ga.elites);
  }
  assign(o.mrfo.somersaultFactor, s.number<double>("somersault_factor"));
  assign(o.mrfo.levyExponentBeta, s.number<double>("levy_beta"));
  if (const auto v = s.number<double>("levy_scale")) o.mrfo.levyScale = *v;
  assign(o.pso.inertia, s.number<double>("inertia"));
  assign(o.pso.cognitive, s.number<double>("cognitive"));
  assign(o.pso.social, s.number<double>("social"));
  assign(o.pso.velocityClamp, s.number<double>("velocity_clamp"));
  assign(o.ga.crossoverRate, s.number<double>("crossover_rate"));
  assign(o.ga.mutationRate, s.number<double>("mutation_rate"));
  assign(o.ga.mutationScale, s.number<double>("mutation_scale"));
  assign(o.ga.tournamentSize, s.number<int>("tournament"));
  assign(o.ga.blendAlpha, s.number<double>("blend_alpha"));
  assign(o.ga.elites, s.number<int>("elites"));
  assign(o.woa.spiralConstant, s.number<double>("spiral"));
  c.validate();
  return {name, c};
}

void checkSections(const pt::ptree& root, std::initializer_list<std::string_view> known, bool models) {
  for (const auto& [key, value] : root) {
    if (!value.data().empty() && value.empty())
      throw ConfigError(fmt::format("key '{}' appears outside any section", key));
    if (models && key.rfind(kModelPrefix, 0) == 0) continue;
    if (std::find(known.begin(), known.end(), key) == known.end())
      throw ConfigError(fmt::format("unknown section [{}]", key));
  }
}

ExperimentConfig experimentFrom(const pt::ptree& root, const std::filesystem::path& baseDir) {
  checkSections(root, {"data", "plan", "output"}, true);
  ExperimentConfig cfg;
  cfg.data = parseData(Section(child(root, "data"), "data"), baseDir);
  cfg.plan = parsePlan(Section(child(root, "plan"), "plan"));
  const Section output(child(root, "output"), "output");
  output.restrictTo({"scale_features"});
  assign(cfg.scaleFeatures, output.flag("scale_features"));
  for (const auto& [key, value] : root) {
    if (key.rfind(kModelPrefix, 0) != 0) continue;
    const std::string name = key.substr(kModelPrefix.size());
    for (const auto& m : cfg.models)
      if (m.name == name) throw ConfigError(fmt::format("duplicate model section [{}]", key));
    cfg.models.push_back(parseModel(name, Section(&value, key)));
  }
  if (cfg.models.empty()) throw ConfigError("config defines no [model.NAME] sections");
  return cfg;
}

FeaturizeConfig featurizeFrom(const pt::ptree& root) {
  checkSections(root, {"rdf", "targets"}, false);
  FeaturizeConfig cfg;
  const Section r(child(root, "rdf"), "rdf");
  r.restrictTo({"cutoff", "width", "exponent", "grid_points", "grid_max", "species"});
  assign(cfg.rdf.cutoff, r.number<double>("cutoff"));
  assign(cfg.rdf.gaussianWidth, r.number<double>("width"));
  assign(cfg.rdf.renormExponent, r.number<double>("exponent"));
  assign(cfg.rdf.gridPoints, r.number<int>("grid_points"));
  assign(cfg.rdf.gridMax, r.number<double>("grid_max"));
  assign(cfg.species, r.list("species"));
  if (cfg.species.empty()) throw ConfigError("[rdf] species must list at least one element");
  cfg.rdf.speciesPairs = rdf::RdfConfig::pairsFor(cfg.species);
  cfg.rdf.validate();

  const Section t(child(root, "targets"), "targets");
  t.restrictTo({"enabled", "energy_a", "energy_b"});
  assign(cfg.targets, t.flag("enabled"));
  cfg.energyA = t.number<double>("energy_a");
  cfg.energyB = t.number<double>("energy_b");
  if (cfg.energyA.has_value() != cfg.energyB.has_value())
    throw ConfigError("[targets] set both energy_a and energy_b or neither");
  if (cfg.targets && cfg.species.size() != 2)
    throw ConfigError("formation-energy targets need exactly two species");
  return cfg;
}

BenchmarkConfig benchmarkFrom(const pt::ptree& root) {
  checkSections(root, {"benchmark"}, false);
  const Section s(child(root, "benchmark"), "benchmark");
  s.restrictTo({"functions", "dimensions", "optimizers", "seeds", "seed", "population", "iterations", "evaluations"});
  BenchmarkConfig cfg;
  assign(cfg.functions, s.list("functions"));
  assign(cfg.dimensions, s.numbers<Index>("dimensions"));
  if (const auto kinds = s.list("optimizers")) {
    cfg.optimizers.clear();
    for (const auto& k : *kinds) cfg.optimizers.push_back(opt::parseOptimizerKind(k));
  }
  assign(cfg.seeds, s.number<int>("seeds"));
  assign(cfg.seed, s.number<std::uint64_t>("seed"));
  assign(cfg.population, s.number<int>("population"));
  assign(cfg.iterations, s.number<int>("iterations"));
  cfg.evaluations = s.number<long long>("evaluations");
  if (cfg.evaluations && s.str("iterations"))
    throw ConfigError("[benchmark] set iterations or evaluations, not both");
  cfg.validate();
  return cfg;
}

}  // namespace

FeaturizeConfig::FeaturizeConfig() { rdf.speciesPairs = rdf::RdfConfig::pairsFor(species); }

double DataSection::resolvedTargetScale() const noexcept {
  if (targetScale) return *targetScale;
  return source == Source::csv ? 1000.0 : 1.0;
}

std::string DataSection::resolvedUnits() const {
  if (!units.empty()) return units;
  if (source == Source::csv && !targetScale) return "meV/atom";
  return "target";
}

elm::RegressionData DataSection::load() const {
  if (source == Source::csv) {
    if (!std::filesystem::exists(path)) throw ConfigError(fmt::format("dataset file not found: {}", path.string()));
    return harness::readFeatureCsv(path).data;
  }
  return harness::syntheticDataset(synthetic, samples, noise, seed);
}

void BenchmarkConfig::validate() const {
  if (seeds < 1) throw ConfigError(fmt::format("[benchmark] seeds must be >= 1, got {}", seeds));
  if (functions.empty()) throw ConfigError("[benchmark] functions is empty");
  if (dimensions.empty()) throw ConfigError("[benchmark] dimensions is empty");
  if (optimizers.empty()) throw ConfigError("[benchmark] optimizers is empty");
  for (const auto& f : functions) opt::benchmarkFunction(f);
  for (Index d : dimensions)
    if (d < 1) throw ConfigError(fmt::format("[benchmark] dimension must be >= 1, got {}", d));
  if (population < 1) throw ConfigError("[benchmark] population must be >= 1");
  if (iterations < 0) throw ConfigError("[benchmark] iterations must be >= 0");
  if (evaluations && *evaluations < 0) throw ConfigError("[benchmark] evaluations must be >= 0");
}

ExperimentConfig parseExperimentConfig(std::istream& in, const std::filesystem::path& baseDir) {
  return experimentFrom(readIni(in), baseDir);
}

ExperimentConfig loadExperimentConfig(const std::filesystem::path& path) {
  return experimentFrom(readIniFile(path), path.parent_path());
}

FeaturizeConfig parseFeaturizeConfig(std::istream& in) { return featurizeFrom(readIni(in)); }
FeaturizeConfig loadFeaturizeConfig(const std::filesystem::path& path) { return featurizeFrom(readIniFile(path)); }

BenchmarkConfig parseBenchmarkConfig(std::istream& in) { return benchmarkFrom(readIni(in)); }
BenchmarkConfig loadBenchmarkConfig(const std::filesystem::path& path) { return benchmarkFrom(readIniFile(path)); }

}  // namespace eelm::cli
