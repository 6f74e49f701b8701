#include "imbench/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <iterator>
#include <limits>
#include <mutex>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "imbench/random.hpp"
#include "json.hpp"

namespace imbench {

namespace {

using nlohmann::json;

constexpr std::uint64_t kSaltCandidates = 0x63616e64ULL;
constexpr std::uint64_t kSaltFolds = 0x666f6c64ULL;
constexpr std::uint64_t kSaltTune = 0x74756e65ULL;
constexpr std::uint64_t kSaltRefit = 0x72656669ULL;
constexpr std::uint64_t kSaltLevels = 0x6c65766cULL;

const std::vector<double> kEnsembleSizes{10, 20, 30, 40, 60};

bool is_strategy_param(const std::string& name) {
  return name.starts_with("smote.") || name.starts_with("underbagging.") ||
         name.starts_with("rusboost.");
}

std::vector<std::string> allowed_params(const SolutionSpec& s) {
  std::vector<std::string> out;
  switch (s.strategy.kind) {
    case StrategyKind::smote: out.push_back("smote.k"); break;
    case StrategyKind::underbagging: out.push_back("underbagging.n"); break;
    case StrategyKind::rusboost: out.push_back("rusboost.nboost"); return out;
    default: break;
  }
  switch (s.classifier.kind) {
    case ClassifierKind::cart: out.push_back("max_depth"); break;
    case ClassifierKind::random_forest:
      out.insert(out.end(), {"mtry", "ntree", "bootstrap"});
      break;
    case ClassifierKind::gradient_boosting:
      out.insert(out.end(), {"max_depth", "eta", "nrounds", "lambda", "min_child_weight"});
      break;
    case ClassifierKind::one_nn: break;
  }
  return out;
}

ParamScale parse_scale(const std::string& name) {
  if (name == "integer") return ParamScale::integer;
  if (name == "log_integer") return ParamScale::log_integer;
  if (name == "real") return ParamScale::real;
  if (name == "log_real") return ParamScale::log_real;
  if (name == "choice") return ParamScale::choice;
  throw std::invalid_argument("unknown parameter scale '" + name + "'");
}

ParamDomain parse_domain(const std::string& name, const json& j) {
  ParamDomain d;
  d.name = name;
  if (j.is_number()) {
    d.scale = ParamScale::choice;
    d.choices = {j.get<double>()};
  } else if (j.is_array()) {
    d.scale = ParamScale::choice;
    d.choices = j.get<std::vector<double>>();
  } else if (j.is_object()) {
    if (j.contains("choices")) {
      d.scale = ParamScale::choice;
      d.choices = j.at("choices").get<std::vector<double>>();
    } else {
      d.scale = parse_scale(j.at("scale").get<std::string>());
      d.lo = j.at("lo").get<double>();
      if (j.at("hi").is_string() && j.at("hi") == "dim") {
        d.hi_is_dim = true;
      } else {
        d.hi = j.at("hi").get<double>();
      }
    }
  } else {
    throw std::invalid_argument("space override for '" + name + "' must be a number, list or object");
  }
  if (d.scale == ParamScale::choice && d.choices.empty()) {
    throw std::invalid_argument("space override for '" + name + "' has no choices");
  }
  if (d.scale != ParamScale::choice && !d.hi_is_dim && !(d.lo <= d.hi)) {
    throw std::invalid_argument("space override for '" + name + "' has lo > hi");
  }
  if ((d.scale == ParamScale::log_integer || d.scale == ParamScale::log_real) && !(d.lo > 0)) {
    throw std::invalid_argument("log-scale range for '" + name + "' must be positive");
  }
  return d;
}

// Applies overrides; with `strict`, unknown names are errors, otherwise
// they are ignored (shared overrides in the cross-product form).
void apply_space_overrides(SolutionSpec& s, const json& overrides, bool strict) {
  const auto allowed = allowed_params(s);
  for (const auto& [name, value] : overrides.items()) {
    if (std::find(allowed.begin(), allowed.end(), name) == allowed.end()) {
      if (strict) throw std::invalid_argument("solution " + s.id + " has no parameter '" + name + "'");
      continue;
    }
    ParamDomain d = parse_domain(name, value);
    const auto it = std::find_if(s.space.begin(), s.space.end(),
                                 [&](const ParamDomain& p) { return p.name == name; });
    if (it != s.space.end()) {
      *it = std::move(d);
    } else {
      // A fixed strategy parameter (smote.k) is replaced by the search domain.
      s.strategy.params.erase(name);
      s.space.push_back(std::move(d));
    }
  }
}

std::size_t line_of_byte(const std::string& text, std::size_t byte) {
  byte = std::min(byte, text.size());
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(byte), '\n'));
}

BinaryDataset materialize(const DatasetSource& src) {
  if (src.synthetic) {
    SyntheticSpec spec = *src.synthetic;
    spec.name = src.name;
    return make_synthetic(spec);
  }
  Dataset raw = load_csv(*src.path, src.label_column, src.positive_label);
  raw.name = src.name;
  return binarize(raw);
}

}  // namespace

SearchSpace resolve(SearchSpace space, std::size_t dim) {
  for (auto& d : space) {
    if (d.hi_is_dim) {
      d.hi = static_cast<double>(dim);
      d.hi_is_dim = false;
    }
  }
  return space;
}

std::vector<ParamMap> sample_hyperparameters(const SearchSpace& space, int count, std::uint64_t seed) {
  if (count < 1) throw std::invalid_argument("sample_hyperparameters: count must be at least 1");
  if (space.empty()) return {ParamMap{}};
  Rng rng(seed);
  std::vector<ParamMap> out(static_cast<std::size_t>(count));
  for (auto& params : out) {
    for (const auto& d : space) {
      if (d.hi_is_dim) throw std::invalid_argument("sample_hyperparameters: unresolved bound for " + d.name);
      double v = 0.0;
      switch (d.scale) {
        case ParamScale::integer: {
          const auto lo = static_cast<long long>(std::ceil(d.lo));
          const auto hi = static_cast<long long>(std::floor(d.hi));
          v = static_cast<double>(lo + static_cast<long long>(rng.below(static_cast<std::size_t>(hi - lo + 1))));
          break;
        }
        case ParamScale::log_integer:
          v = std::clamp(std::round(std::exp(rng.uniform(std::log(d.lo), std::log(d.hi)))),
                         std::ceil(d.lo), std::floor(d.hi));
          break;
        case ParamScale::real:
          v = rng.uniform(d.lo, d.hi);
          break;
        case ParamScale::log_real:
          v = std::clamp(std::exp(rng.uniform(std::log(d.lo), std::log(d.hi))), d.lo, d.hi);
          break;
        case ParamScale::choice:
          v = d.choices[rng.below(d.choices.size())];
          break;
      }
      params[d.name] = v;
    }
  }
  return out;
}

SolutionSpec make_solution(StrategyKind strategy, ClassifierKind classifier) {
  SolutionSpec s;
  s.strategy.kind = strategy;
  s.classifier.kind = classifier;
  if (strategy == StrategyKind::rusboost) {
    s.id = "rusboost";
    s.space.push_back({"rusboost.nboost", ParamScale::choice, 0, 0, kEnsembleSizes, false});
    return s;
  }
  s.id = short_name(classifier) + "+" + short_name(strategy);
  switch (classifier) {
    case ClassifierKind::random_forest:
      s.space.push_back({"mtry", ParamScale::integer, 1, 0, {}, true});
      s.space.push_back({"ntree", ParamScale::log_integer, 16, 4096, {}, false});
      break;
    case ClassifierKind::gradient_boosting:
      s.space.push_back({"max_depth", ParamScale::integer, 1, 6, {}, false});
      s.space.push_back({"eta", ParamScale::log_real, 0.005, 0.05, {}, false});
      s.space.push_back({"nrounds", ParamScale::choice, 0, 0, {20, 40, 60, 80, 100, 120, 140}, false});
      break;
    case ClassifierKind::cart:
    case ClassifierKind::one_nn:
      break;
  }
  if (strategy == StrategyKind::underbagging) {
    s.space.push_back({"underbagging.n", ParamScale::choice, 0, 0, kEnsembleSizes, false});
  }
  if (strategy == StrategyKind::smote) s.strategy.params["smote.k"] = kDefaultSmoteK;
  return s;
}

ModelPtr fit_candidate(const SolutionSpec& solution, const ParamMap& params,
                       const BinaryDataset& train, std::uint64_t seed) {
  StrategySpec strategy = solution.strategy;
  ClassifierSpec classifier = solution.classifier;
  for (const auto& [name, value] : params) {
    (is_strategy_param(name) ? strategy.params : classifier.params)[name] = value;
  }
  return fit_solution(strategy, classifier, train, seed);
}

TuneResult tune_detailed(const SolutionSpec& solution, const BinaryDataset& train, MetricKind metric,
                         int folds, int candidates, std::uint64_t seed) {
  TuneResult result;
  result.candidates = sample_hyperparameters(resolve(solution.space, train.dim()), candidates,
                                             derive_seed(seed, kSaltCandidates));
  if (result.candidates.size() == 1) {
    result.best = result.candidates.front();
    result.mean_scores = {std::nan("")};
    return result;
  }
  const auto fold_sets = stratified_fold_indices(train, folds, derive_seed(seed, kSaltFolds));
  std::vector<std::pair<BinaryDataset, BinaryDataset>> parts;
  for (const auto& f : fold_sets) parts.emplace_back(train.subset(f.train), train.subset(f.validation));

  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < result.candidates.size(); ++c) {
    double sum = 0.0;
    for (std::size_t f = 0; f < parts.size(); ++f) {
      const auto& [fit_part, validation] = parts[f];
      const auto model = fit_candidate(solution, result.candidates[c], fit_part, derive_seed(seed, c, f));
      sum += evaluate(metric, {predict_scores(*model, validation.features), validation.labels});
    }
    const double mean = sum / static_cast<double>(parts.size());
    result.mean_scores.push_back(mean);
    if (mean > best) {
      best = mean;
      result.best_index = c;
    }
  }
  result.best = result.candidates[result.best_index];
  return result;
}

ParamMap tune(const SolutionSpec& solution, const BinaryDataset& train, MetricKind metric, int folds,
              int candidates, std::uint64_t seed) {
  return tune_detailed(solution, train, metric, folds, candidates, seed).best;
}

CellResult run_repetition(const BinaryDataset& ds, double rate, const SolutionSpec& solution,
                          MetricKind metric, const SplitPlan& plan, int repetition,
                          std::uint64_t seed, const ProtocolSettings& settings) {
  CellResult r;
  r.dataset = ds.name;
  r.rate = rate;
  r.solution = solution.id;
  r.strategy = short_name(solution.strategy.kind);
  r.classifier = solution.has_classifier() ? short_name(solution.classifier.kind) : "";
  r.metric = metric;
  r.repetition = repetition;
  r.seed = seed;
  try {
    const IndexSplit split = holdout_indices(ds, plan, repetition);
    std::vector<std::size_t> overlap;
    std::set_intersection(split.train.begin(), split.train.end(), split.test.begin(),
                          split.test.end(), std::back_inserter(overlap));
    if (!overlap.empty() || split.train.size() + split.test.size() != ds.size()) {
      throw std::logic_error("holdout split is not a partition");
    }
    const BinaryDataset train = ds.subset(split.train);
    const BinaryDataset test = ds.subset(split.test);
    const TuneResult tuned = tune_detailed(solution, train, metric, plan.inner_folds,
                                           settings.candidates, derive_seed(seed, kSaltTune));
    const auto model = fit_candidate(solution, tuned.best, train, derive_seed(seed, kSaltRefit));
    r.value = evaluate(metric, {predict_scores(*model, test.features), test.labels}, settings.threshold);
    r.params = tuned.best;
    r.ok = true;
  } catch (const std::exception& e) {
    r.ok = false;
    r.message = e.what();
  }
  return r;
}

std::vector<CellResult> run_cell(const BinaryDataset& ds, const SolutionSpec& solution,
                                 MetricKind metric, const SplitPlan& plan, std::uint64_t seed,
                                 const ProtocolSettings& settings) {
  std::vector<CellResult> out;
  for (int rep = 0; rep < plan.repetitions; ++rep) {
    out.push_back(run_repetition(ds, ds.imbalance_rate(), solution, metric, plan, rep,
                                 derive_seed(seed, static_cast<std::uint64_t>(rep)), settings));
  }
  return out;
}

ExperimentConfig parse_config(const std::string& text, const std::filesystem::path& base_dir) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument("config: parse error at line " + std::to_string(line_of_byte(text, e.byte)) +
                                ": " + e.what());
  }

  ExperimentConfig cfg;
  try {
    for (const auto& d : doc.at("datasets")) {
      DatasetSource src;
      if (d.contains("synthetic")) {
        const auto& s = d.at("synthetic");
        SyntheticSpec spec;
        spec.family = parse_synthetic_family(s.value("family", "gaussians"));
        spec.n = s.value("n", std::size_t{1000});
        spec.dim = s.value("dim", std::size_t{2});
        spec.overlap = s.value("overlap", 0.0);
        spec.rate = s.value("rate", 0.05);
        spec.seed = s.value("seed", std::uint64_t{0});
        src.synthetic = spec;
        if (d.contains("name")) {
          src.name = d.at("name").get<std::string>();
        } else {
          std::ostringstream name;
          name << to_string(spec.family) << "-n" << spec.n << "-d" << spec.dim << "-o" << spec.overlap
               << "-s" << spec.seed;
          src.name = name.str();
        }
      } else {
        std::filesystem::path p = d.at("path").get<std::string>();
        if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
        if (!std::filesystem::exists(p)) {
          throw std::invalid_argument("config: dataset file '" + p.string() + "' does not exist");
        }
        src.path = p;
        src.label_column = d.value("label", std::string("class"));
        if (d.contains("positive_label")) src.positive_label = d.at("positive_label").get<std::string>();
        src.name = d.value("name", p.stem().string());
      }
      cfg.datasets.push_back(std::move(src));
    }

    cfg.rates = doc.at("rates").get<std::vector<double>>();
    for (double r : cfg.rates) {
      if (!(r > 0.0 && r <= 0.5)) throw std::invalid_argument("config: rates must lie in (0, 0.5]");
    }
    for (const auto& m : doc.at("metrics")) cfg.metrics.push_back(parse_metric(m.get<std::string>()));

    if (doc.contains("solutions")) {
      for (const auto& s : doc.at("solutions")) {
        const auto strategy = parse_strategy(s.at("strategy").get<std::string>());
        if (strategy != StrategyKind::rusboost && !s.contains("classifier")) {
          throw std::invalid_argument("config: solution with strategy " + to_string(strategy) +
                                      " needs a classifier");
        }
        const auto classifier = strategy == StrategyKind::rusboost
                                    ? ClassifierKind::cart
                                    : parse_classifier(s.at("classifier").get<std::string>());
        SolutionSpec sol = make_solution(strategy, classifier);
        if (s.contains("space")) apply_space_overrides(sol, s.at("space"), true);
        cfg.solutions.push_back(std::move(sol));
      }
    } else {
      const json shared = doc.value("space", json::object());
      bool rusboost = false;
      for (const auto& st : doc.at("strategies")) {
        const auto strategy = parse_strategy(st.get<std::string>());
        if (strategy == StrategyKind::rusboost) {
          rusboost = true;
          continue;
        }
        for (const auto& c : doc.at("classifiers")) {
          SolutionSpec sol = make_solution(strategy, parse_classifier(c.get<std::string>()));
          apply_space_overrides(sol, shared, false);
          cfg.solutions.push_back(std::move(sol));
        }
      }
      if (rusboost) {
        SolutionSpec sol = make_solution(StrategyKind::rusboost);
        apply_space_overrides(sol, shared, false);
        cfg.solutions.push_back(std::move(sol));
      }
    }

    cfg.repetitions = doc.value("repetitions", 3);
    cfg.inner_folds = doc.value("inner_folds", 3);
    cfg.candidates = doc.value("candidates", 10);
    cfg.test_fraction = doc.value("test_fraction", 0.2);
    cfg.master_seed = doc.value("master_seed", std::uint64_t{0});
    cfg.threads = doc.value("threads", 0);
    std::filesystem::path out = doc.value("output_path", std::string("results.csv"));
    if (out.is_relative() && !base_dir.empty()) out = base_dir / out;
    cfg.output_path = out;
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }

  if (cfg.datasets.empty() || cfg.rates.empty() || cfg.solutions.empty() || cfg.metrics.empty()) {
    throw std::invalid_argument("config: datasets, rates, solutions and metrics must be non-empty");
  }
  if (cfg.repetitions < 1 || cfg.inner_folds < 2 || cfg.candidates < 1) {
    throw std::invalid_argument("config: need repetitions >= 1, inner_folds >= 2, candidates >= 1");
  }
  if (!(cfg.test_fraction > 0.0 && cfg.test_fraction < 1.0)) {
    throw std::invalid_argument("config: test_fraction must lie in (0, 1)");
  }
  std::set<std::string> names;
  for (const auto& d : cfg.datasets) {
    if (!names.insert(d.name).second) throw std::invalid_argument("config: duplicate dataset name '" + d.name + "'");
  }
  std::set<std::string> ids;
  for (const auto& s : cfg.solutions) {
    if (!ids.insert(s.id).second) throw std::invalid_argument("config: duplicate solution '" + s.id + "'");
  }
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot read config '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path.parent_path());
}

int default_thread_count() {
  if (const char* env = std::getenv("IMBENCH_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

GridReport run_grid(const ExperimentConfig& config, const GridOptions& options) {
  std::ostream& log = options.log ? *options.log : std::clog;
  GridReport report;

  struct Level {
    BinaryDataset data;
    double rate;
  };
  std::vector<Level> levels;
  for (const auto& src : config.datasets) {
    BinaryDataset base;
    try {
      base = materialize(src);
    } catch (const std::exception& e) {
      report.exclusions.push_back(src.name + ": " + e.what());
      continue;
    }
    const auto nested = nested_levels(
        base, config.rates, derive_seed(config.master_seed, kSaltLevels, hash_string(src.name)));
    for (const auto& level : nested) {
      if (level.dataset) {
        levels.push_back({*level.dataset, level.rate});
      } else {
        report.exclusions.push_back(src.name + " @ " + format_rate(level.rate) + ": " + level.skip_reason);
      }
    }
  }
  for (const auto& e : report.exclusions) log << "excluded " << e << '\n';

  struct Job {
    std::size_t level;
    std::size_t solution;
    MetricKind metric;
    int repetition;
  };
  std::vector<Job> jobs;
  for (std::size_t l = 0; l < levels.size(); ++l) {
    for (std::size_t s = 0; s < config.solutions.size(); ++s) {
      for (MetricKind m : config.metrics) {
        for (int rep = 0; rep < config.repetitions; ++rep) jobs.push_back({l, s, m, rep});
      }
    }
  }

  // Resume: drop jobs already present in the output file.
  std::set<CellKey> done;
  const auto& out_path = config.output_path;
  if (std::filesystem::exists(out_path) && std::filesystem::file_size(out_path) > 0) {
    {
      std::ifstream in(out_path, std::ios::binary);
      std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
      if (content.back() != '\n') {
        std::filesystem::resize_file(out_path, content.rfind('\n') + 1);
      }
    }
    for (const auto& r : read_results(out_path).rows) done.insert(key_of(r));
  }
  std::vector<Job> pending;
  for (const auto& j : jobs) {
    const auto& lv = levels[j.level];
    const CellKey key{lv.data.name, format_rate(lv.rate), config.solutions[j.solution].id,
                      to_string(j.metric), j.repetition};
    if (done.contains(key)) {
      ++report.skipped;
    } else {
      pending.push_back(j);
    }
  }

  const bool fresh = !std::filesystem::exists(out_path) || std::filesystem::file_size(out_path) == 0;
  if (!out_path.parent_path().empty()) std::filesystem::create_directories(out_path.parent_path());
  std::ofstream out(out_path, std::ios::binary | std::ios::app);
  if (!out) throw std::runtime_error("cannot write results file '" + out_path.string() + "'");
  if (fresh) write_results_header(out);
  out.flush();

  const int threads = std::max(1, options.threads > 0 ? options.threads
                                  : config.threads > 0 ? config.threads
                                                       : default_thread_count());
  std::vector<std::optional<CellResult>> slots(pending.size());
  std::size_t flushed = 0;
  std::mutex sink;
  std::atomic<std::size_t> next{0};

  auto run_job = [&](const Job& j) {
    const auto& lv = levels[j.level];
    const auto& sol = config.solutions[j.solution];
    const std::uint64_t name_hash = hash_string(lv.data.name);
    const std::uint64_t rate_hash = hash_string(format_rate(lv.rate));
    SplitPlan plan{config.test_fraction, config.repetitions, config.inner_folds,
                   derive_seed(config.master_seed, name_hash, rate_hash)};
    const std::uint64_t cell_seed =
        derive_seed(config.master_seed, name_hash, rate_hash, hash_string(sol.id),
                    hash_string(to_string(j.metric)), static_cast<std::uint64_t>(j.repetition));
    return run_repetition(lv.data, lv.rate, sol, j.metric, plan, j.repetition, cell_seed,
                          ProtocolSettings{config.candidates, 0.5});
  };

  auto worker = [&] {
    for (std::size_t i = next++; i < pending.size(); i = next++) {
      CellResult r = run_job(pending[i]);
      std::lock_guard lock(sink);
      slots[i] = std::move(r);
      while (flushed < slots.size() && slots[flushed]) {
        const CellResult& done_cell = *slots[flushed];
        write_result_row(out, done_cell);
        out.flush();
        ++report.executed;
        if (!done_cell.ok) ++report.failed;
        log << '[' << report.executed << '/' << pending.size() << "] " << done_cell.dataset << " @ "
            << format_rate(done_cell.rate) << ' ' << done_cell.solution << ' '
            << to_string(done_cell.metric) << " rep " << done_cell.repetition << ": "
            << (done_cell.ok ? std::to_string(done_cell.value) : "FAILED " + done_cell.message) << '\n';
        slots[flushed].reset();
        ++flushed;
      }
    }
  };

  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  out.close();

  log << report.executed << " cells executed, " << report.skipped << " already present, "
      << report.failed << " failed\n";
  report.table = read_results(out_path);
  return report;
}

}  // namespace imbench
