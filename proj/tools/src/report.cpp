#include "report.hpp"

#include <cstdio>
#include <sstream>

#include "dataset.hpp"

namespace skewtorus::app {

namespace {

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string join(const json& arr, int digits) {
  std::string out = "(";
  for (std::size_t i = 0; i < arr.size(); ++i) {
    if (i) out += ", ";
    out += fixed(arr[i].get<double>(), digits);
  }
  return out + ")";
}

std::string pad(const std::string& s, std::size_t width) {
  return s.size() >= width ? s + " " : s + std::string(width - s.size(), ' ');
}

}  // namespace

std::string variant_name(Family family, bool skewed) {
  std::string base;
  switch (family) {
    case Family::Uniform: base = "U"; break;
    case Family::Sine: base = "S"; break;
    case Family::Cosine: base = "C"; break;
    case Family::WrappedCauchy: base = "WC"; break;
  }
  return skewed ? "S" + base : base;
}

json component_json(const SkewModel& model, double weight) {
  json c;
  c["weight"] = weight;
  c["mu"] = model.mu().values();
  c["kappa"] = std::vector<double>(model.theta().kappa().begin(), model.theta().kappa().end());
  c["dep"] = std::vector<double>(model.theta().dep().begin(), model.theta().dep().end());
  c["lambda"] = std::vector<double>(model.lambda().begin(), model.lambda().end());
  return c;
}

json model_record(const std::string& name, bool skewed, const MixtureFitResult& fit, const FitResult* single) {
  const auto& mix = fit.model;
  json r;
  r["record"] = "model";
  r["name"] = name;
  r["family"] = std::string(family_name(mix.family()));
  r["skewed"] = skewed;
  r["K"] = mix.size();
  r["n"] = fit.score.n;
  r["d"] = mix.dim();
  json comps = json::array();
  for (std::size_t k = 0; k < mix.size(); ++k) comps.push_back(component_json(mix.components()[k], mix.weights()[k]));
  r["components"] = comps;
  r["log_lik"] = fit.score.log_lik;
  r["k_params"] = fit.score.k_params;
  r["aic"] = fit.score.aic;
  r["bic"] = fit.score.bic;
  r["converged"] = fit.converged;
  if (single) {
    r["boundary"] = single->boundary;
    json se = json::object();
    const auto errors = single->std_errors();
    for (std::size_t i = 0; i < errors.size(); ++i) se[single->param_names[i]] = errors[i];
    r["std_errors"] = errors.empty() ? json(nullptr) : se;
  } else {
    r["em_iterations"] = fit.em_iterations;
  }
  r["symmetry_rejected_01"] = nullptr;
  r["error"] = nullptr;
  return r;
}

json failed_record(const std::string& name, Family family, bool skewed, int components, std::size_t n, int dim,
                   const std::string& error) {
  json r;
  r["record"] = "model";
  r["name"] = name;
  r["family"] = std::string(family_name(family));
  r["skewed"] = skewed;
  r["K"] = components;
  r["n"] = n;
  r["d"] = dim;
  r["error"] = error;
  return r;
}

json symmetry_record(Family family, int components, const SymmetryTestResult& test) {
  json r;
  r["record"] = "symmetry_test";
  r["family"] = std::string(family_name(family));
  r["K"] = components;
  r["statistic"] = test.statistic;
  r["df"] = test.df;
  r["p_value"] = test.p_value;
  json reject;
  for (const auto& [alpha, rejected] : test.reject_at) reject[fixed(alpha, 2)] = rejected;
  r["reject"] = reject;
  r["log_lik_symmetric"] = test.log_lik_symmetric;
  r["log_lik_skewed"] = test.log_lik_skewed;
  return r;
}

json selection_record(const ModelRanking& ranking) {
  json r;
  r["record"] = "selection";
  r["by_aic"] = ranking.by_aic;
  r["by_bic"] = ranking.by_bic;
  r["best_aic"] = ranking.by_aic.front();
  r["best_bic"] = ranking.by_bic.front();
  r["criteria_disagree"] = ranking.criteria_disagree;
  return r;
}

MixtureModel mixture_from_json(const json& record) {
  try {
    const Family family = parse_family(record.at("family").get<std::string>());
    std::vector<SkewModel> comps;
    std::vector<double> weights;
    double total = 0;
    for (const auto& c : record.at("components")) {
      const auto mu = c.at("mu").get<std::vector<double>>();
      const int dim = static_cast<int>(mu.size());
      auto values = c.value("kappa", std::vector<double>{});
      const auto dep = c.value("dep", std::vector<double>{});
      values.insert(values.end(), dep.begin(), dep.end());
      auto lambda = c.value("lambda", std::vector<double>(mu.size(), 0.0));
      comps.emplace_back(TorusPoint(mu), FamilyParams::from_values(family, dim, values), std::move(lambda));
      weights.push_back(c.value("weight", 1.0));
      total += weights.back();
    }
    // tolerate rounding in stored weights
    for (double& w : weights) w /= total;
    return MixtureModel(std::move(comps), std::move(weights));
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed model record: ") + e.what());
  }
}

std::string render_table(const std::vector<json>& records) {
  std::ostringstream out;
  std::string current_group;
  bool header = false;
  for (const auto& r : records) {
    const std::string group = r.contains("group") ? r["group"].get<std::string>() : "";
    if (!header || group != current_group) {
      if (header) out << "\n";
      if (!group.empty()) out << "group " << group << "\n";
      out << pad("model", 6) << pad("p", 7) << pad("mu", 20) << pad("kappa", 20) << pad("r", 10) << pad("lambda", 20)
          << pad("LL", 13) << pad("AIC", 11) << "BIC\n";
      header = true;
      current_group = group;
    }
    const std::string type = r["record"];
    if (type == "selection") {
      out << "best by AIC: " << r["best_aic"].get<std::string>() << ", by BIC: " << r["best_bic"].get<std::string>()
          << (r["criteria_disagree"].get<bool>() ? " (criteria disagree)" : "") << "\n";
      continue;
    }
    if (type == "symmetry_test") {
      out << "symmetry test (" << r["family"].get<std::string>() << "): LR = " << fixed(r["statistic"], 3)
          << ", df = " << r["df"].get<int>() << ", p = " << fixed(r["p_value"], 4) << "\n";
      continue;
    }
    if (type != "model") continue;
    if (!r["error"].is_null()) {
      out << pad(r["name"], 6) << "failed: " << r["error"].get<std::string>() << "\n";
      continue;
    }
    const auto& comps = r["components"];
    for (std::size_t k = 0; k < comps.size(); ++k) {
      const auto& c = comps[k];
      const bool first = k == 0;
      std::string ll;
      if (first) {
        ll = fixed(r["log_lik"], 2);
        if (r["symmetry_rejected_01"].is_boolean() && r["symmetry_rejected_01"].get<bool>()) ll += "*";
      }
      out << pad(first ? r["name"].get<std::string>() : "", 6) << pad(fixed(c["weight"], 3), 7)
          << pad(join(c["mu"], 2), 20) << pad(c["kappa"].empty() ? "-" : join(c["kappa"], 2), 20)
          << pad(c["dep"].empty() ? "-" : join(c["dep"], 2), 10) << pad(join(c["lambda"], 2), 20) << pad(ll, 13)
          << pad(first ? fixed(r["aic"], 1) : "", 11) << (first ? fixed(r["bic"], 1) : "") << "\n";
    }
  }
  return out.str();
}

}  // namespace skewtorus::app
