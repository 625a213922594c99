#include "commands.hpp"

#include <fstream>
#include <map>
#include <sstream>

#include "dataset.hpp"
#include "report.hpp"
#include "skewtorus/errors.hpp"
#include "skewtorus/modes.hpp"

namespace skewtorus::app {

namespace {

Dataset load(const RunConfig& cfg) {
  if (cfg.input.empty()) throw ConfigError("an input CSV file is required");
  return ingest_csv(cfg.input, parse_unit(cfg.unit), parse_columns(cfg.columns), cfg.group_by);
}

FitOptions fit_options(const RunConfig& cfg) {
  if (cfg.starts < 1) throw ConfigError("--starts must be at least 1");
  if (!(cfg.tol > 0.0)) throw ConfigError("--tol must be positive");
  FitOptions o;
  o.n_starts = cfg.starts;
  o.tol = cfg.tol;
  o.seed = cfg.seed;
  return o;
}

MixtureFitOptions mixture_options(const RunConfig& cfg) {
  MixtureFitOptions o;
  o.n_partitions = cfg.starts;
  o.tol = cfg.tol;
  o.seed = cfg.seed;
  o.single = fit_options(cfg);
  return o;
}

struct VariantFit {
  MixtureFitResult fit;
  std::optional<FitResult> single;
};

VariantFit fit_variant(Family family, bool skewed, const RunConfig& cfg, const std::vector<TorusPoint>& data,
                       const std::optional<MixtureModel>& start) {
  const int dim = static_cast<int>(data.front().dim());
  if (cfg.components == 1) {
    FitOptions o = fit_options(cfg);
    if (start) o.extra_starts.push_back(start->components().front());
    FitResult f = fit_mle(family, skewed, data, o);
    MixtureFitResult m{MixtureModel({f.model}, {1.0}),
                       ModelScore::from(f.log_lik, mixture_param_count(family, dim, skewed, 1), data.size()),
                       f.converged, 0, {f.log_lik}, f.start_index};
    return {std::move(m), std::move(f)};
  }
  MixtureFitOptions o = mixture_options(cfg);
  if (start) o.extra_starts.push_back(*start);
  return {fit_mixture(family, skewed, cfg.components, data, o), std::nullopt};
}

// Fits the symmetric and skewed variants of one family; the skewed fit also
// starts from the symmetric optimum so the pair is nested.
void fit_pair(Family family, const RunConfig& cfg, const std::vector<TorusPoint>& data, std::vector<json>& records,
              std::vector<std::pair<std::string, ModelScore>>& scores) {
  const int dim = static_cast<int>(data.front().dim());
  std::optional<VariantFit> sym;
  for (bool skewed : {false, true}) {
    const std::string name = variant_name(family, skewed);
    try {
      std::optional<MixtureModel> start;
      if (skewed && sym) start = sym->fit.model;
      VariantFit v = fit_variant(family, skewed, cfg, data, start);
      records.push_back(model_record(name, skewed, v.fit, v.single ? &*v.single : nullptr));
      scores.emplace_back(name, v.fit.score);
      if (!skewed) {
        sym = std::move(v);
      } else if (sym) {
        const SymmetryTestResult test =
            likelihood_ratio_symmetry(sym->fit.score.log_lik, v.fit.score.log_lik, cfg.components * dim);
        records.back()["symmetry_rejected_01"] = test.reject_at.at(0.01);
        records.push_back(symmetry_record(family, cfg.components, test));
      }
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      records.push_back(failed_record(name, family, skewed, cfg.components, data.size(), dim, e.what()));
    }
  }
}

void emit(const RunConfig& cfg, const std::vector<json>& records, std::ostream& out) {
  std::string lines;
  for (const auto& r : records) lines += r.dump() + "\n";
  if (!cfg.out.empty()) write_file_atomic(cfg.out, lines);
  if (cfg.jsonl) {
    out << lines;
  } else {
    out << render_table(records);
  }
}

std::vector<std::pair<std::string, std::vector<TorusPoint>>> groups_of(const Dataset& data) {
  std::vector<std::pair<std::string, std::vector<TorusPoint>>> groups;
  if (data.labels.empty()) {
    groups.emplace_back("", data.points);
    return groups;
  }
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < data.points.size(); ++i) {
    auto [it, inserted] = index.emplace(data.labels[i], groups.size());
    if (inserted) groups.emplace_back(data.labels[i], std::vector<TorusPoint>{});
    groups[it->second].second.push_back(data.points[i]);
  }
  return groups;
}

MixtureModel model_from_config(const RunConfig& cfg) {
  if (!cfg.params.empty()) {
    std::ifstream in(cfg.params);
    if (!in) throw ConfigError("cannot open parameter file '" + cfg.params + "'");
    std::string line;
    std::optional<json> chosen;
    std::ostringstream whole;
    bool lines_ok = true;
    while (std::getline(in, line)) {
      whole << line << "\n";
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      json r;
      try {
        r = json::parse(line);
      } catch (const json::exception&) {
        lines_ok = false;
        continue;
      }
      if (!r.contains("components") || (r.contains("error") && !r["error"].is_null())) continue;
      if (!cfg.name.empty() && r.value("name", "") != cfg.name) continue;
      if (!chosen) chosen = r;
    }
    if (!chosen && !lines_ok) {
      try {
        chosen = json::parse(whole.str());
      } catch (const json::exception& e) {
        throw ConfigError("cannot parse parameter file: " + std::string(e.what()));
      }
    }
    if (!chosen) throw ConfigError("no usable model record in '" + cfg.params + "'");
    return mixture_from_json(*chosen);
  }
  const Family family = parse_family(cfg.family);
  const auto mu = parse_reals(cfg.mu);
  if (mu.empty()) throw ConfigError("--mu is required to specify a model");
  const int dim = static_cast<int>(mu.size());
  std::vector<double> values;
  if (family != Family::Uniform) {
    values = parse_reals(cfg.kappa);
    const auto dep = parse_reals(cfg.dep);
    if (dep.empty() && dim > 1)
      values.insert(values.end(), dependence_count(dim), 0.0);
    else
      values.insert(values.end(), dep.begin(), dep.end());
  }
  auto lambda = parse_reals(cfg.lambda);
  if (lambda.empty()) lambda.assign(mu.size(), 0.0);
  if (lambda.size() != mu.size()) throw ConfigError("--lambda needs one value per coordinate");
  double total = 0;
  for (double l : lambda) total += std::abs(l);
  if (total > 1.0 + kLambdaSlack)
    throw ConfigError("skewness constraint violated: sum of |lambda| = " + format_number(total) + " exceeds 1");
  return MixtureModel({SkewModel(TorusPoint(mu), FamilyParams::from_values(family, dim, values), std::move(lambda))},
                      {1.0});
}

std::string header_for(int dim) {
  std::string h;
  for (int s = 1; s <= dim; ++s) h += (s > 1 ? ",x" : "x") + std::to_string(s);
  return h + "\n";
}

}  // namespace

int run_fit(const RunConfig& cfg, std::ostream& out) {
  if (cfg.components < 1) throw ConfigError("--mixture must be at least 1");
  const Dataset data = load(cfg);
  std::vector<json> records;
  bool any_ok = false;
  for (const auto& [label, points] : groups_of(data)) {
    std::vector<json> group_records;
    std::vector<std::pair<std::string, ModelScore>> scores;
    const int dim = static_cast<int>(points.front().dim());
    if (cfg.compare) {
      if (dim != 2) throw ConfigError("--compare needs bivariate data (two columns)");
      for (Family f : {Family::Sine, Family::Cosine, Family::WrappedCauchy}) fit_pair(f, cfg, points, group_records, scores);
    } else {
      const Family family = parse_family(cfg.family);
      const std::string name = variant_name(family, cfg.skewed);
      try {
        VariantFit v = fit_variant(family, cfg.skewed, cfg, points, std::nullopt);
        group_records.push_back(model_record(name, cfg.skewed, v.fit, v.single ? &*v.single : nullptr));
        scores.emplace_back(name, v.fit.score);
      } catch (const std::exception& e) {
        if (data.labels.empty()) throw;
        group_records.push_back(failed_record(name, family, cfg.skewed, cfg.components, points.size(), dim, e.what()));
      }
    }
    if (!scores.empty()) {
      any_ok = true;
      group_records.push_back(selection_record(select_model(scores)));
    }
    for (auto& r : group_records) {
      if (!data.labels.empty()) r["group"] = label;
      records.push_back(std::move(r));
    }
  }
  emit(cfg, records, out);
  return any_ok ? 0 : 4;
}

int run_test_symmetry(const RunConfig& cfg, std::ostream& out) {
  if (cfg.components < 1) throw ConfigError("--mixture must be at least 1");
  const Dataset data = load(cfg);
  const Family family = parse_family(cfg.family);
  std::vector<json> records;
  for (const auto& [label, points] : groups_of(data)) {
    const int dim = static_cast<int>(points.front().dim());
    VariantFit sym = fit_variant(family, false, cfg, points, std::nullopt);
    VariantFit skew = fit_variant(family, true, cfg, points, sym.fit.model);
    const SymmetryTestResult test =
        likelihood_ratio_symmetry(sym.fit.score.log_lik, skew.fit.score.log_lik, cfg.components * dim);
    std::vector<json> group_records;
    group_records.push_back(model_record(variant_name(family, false), false, sym.fit, sym.single ? &*sym.single : nullptr));
    group_records.push_back(model_record(variant_name(family, true), true, skew.fit, skew.single ? &*skew.single : nullptr));
    group_records.back()["symmetry_rejected_01"] = test.reject_at.at(0.01);
    group_records.push_back(symmetry_record(family, cfg.components, test));
    for (auto& r : group_records) {
      if (!data.labels.empty()) r["group"] = label;
      records.push_back(std::move(r));
    }
  }
  emit(cfg, records, out);
  return 0;
}

int run_sample(const RunConfig& cfg, std::ostream& out) {
  const MixtureModel mix = model_from_config(cfg);
  std::string text = header_for(mix.dim());
  if (cfg.n > 0) {
    Rng rng(cfg.seed);
    const auto draws = sample(mix, cfg.n, rng);
    for (const auto& x : draws) {
      for (std::size_t s = 0; s < x.dim(); ++s) text += (s ? "," : "") + format_number(x[s]);
      text += "\n";
    }
  }
  if (cfg.out.empty()) {
    out << text;
  } else {
    write_file_atomic(cfg.out, text);
  }
  return 0;
}

int run_grid(const RunConfig& cfg, std::ostream& out) {
  const MixtureModel mix = model_from_config(cfg);
  if (mix.dim() != 2) throw ConfigError("grid: only bivariate models are supported");
  if (cfg.resolution < 3) throw ConfigError("--resolution must be at least 3");
  if (cfg.out.empty()) throw ConfigError("grid: --out is required");
  const int r = cfg.resolution;
  std::string text = "x1,x2,density\n";
  double mass = 0;
  const double cell = (kTwoPi / r) * (kTwoPi / r);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j) {
      const double x[2] = {-kPi + kTwoPi * i / r, -kPi + kTwoPi * j / r};
      const double density = std::exp(mix.log_density(x));
      mass += density * cell;
      text += format_number(x[0]) + "," + format_number(x[1]) + "," + format_number(density) + "\n";
    }
  write_file_atomic(cfg.out, text);

  std::string modes_text = "x1,x2,density,ridge1,ridge2\n";
  std::size_t mode_count = 0;
  if (mix.size() == 1) {
    for (const auto& m : find_modes(mix.components().front())) {
      modes_text += format_number(m.point[0]) + "," + format_number(m.point[1]) + "," + format_number(m.density) +
                    "," + (m.ridge[0] ? "1" : "0") + "," + (m.ridge[1] ? "1" : "0") + "\n";
      ++mode_count;
    }
  }
  write_file_atomic(cfg.out + ".modes.csv", modes_text);
  out << "grid " << r << "x" << r << " written to " << cfg.out << " (mass " << format_number(mass) << ")\n";
  if (mix.size() == 1) {
    out << mode_count << (mode_count == 1 ? " mode" : " modes") << " written to " << cfg.out << ".modes.csv\n";
  } else {
    out << "mode search skipped for mixtures\n";
  }
  return 0;
}

int run_moments(const RunConfig& cfg, std::ostream& out) {
  const MixtureModel mix = model_from_config(cfg);
  if (mix.size() != 1) throw ConfigError("moments: single-component models only");
  const SkewModel& model = mix.components().front();
  const CosineMomentFn base = base_cosine_moments(model.theta());
  const ShapeSummary shape = shape_summary(model, base);
  json r;
  r["record"] = "moments";
  r["family"] = std::string(family_name(model.family()));
  r["mean_direction"] = shape.mean_direction.values();
  r["concentration"] = shape.concentration;
  r["variance"] = shape.variance;
  r["skewness"] = shape.skewness;
  r["kurtosis"] = shape.kurtosis;
  std::vector<double> alpha, beta;
  std::vector<int> p(static_cast<std::size_t>(model.dim()), 0);
  for (std::size_t s = 0; s < p.size(); ++s) {
    p[s] = 1;
    const TrigMoment m = trig_moments(model, p, base);
    alpha.push_back(m.alpha);
    beta.push_back(m.beta);
    p[s] = 0;
  }
  r["alpha"] = alpha;
  r["beta"] = beta;
  if (!cfg.out.empty()) write_file_atomic(cfg.out, r.dump() + "\n");
  if (cfg.jsonl) {
    out << r.dump() << "\n";
    return 0;
  }
  out << "coord  mean_dir     rho        variance   skewness   kurtosis\n";
  for (std::size_t s = 0; s < p.size(); ++s) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%-6zu %-12.6f %-10.6f %-10.6f %-10.6f %-10.6f\n", s + 1, shape.mean_direction[s],
                  shape.concentration[s], shape.variance[s], shape.skewness[s], shape.kurtosis[s]);
    out << buf;
  }
  return 0;
}

}  // namespace skewtorus::app
