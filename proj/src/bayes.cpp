#include "canids/bayes.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>

#include "canids/error.hpp"

namespace canids {

namespace {

constexpr std::string_view kFormat = "canids-naive-bayes";
constexpr int kVersion = 1;

const std::array<std::string_view, 2> kClassSection = {"class.attackfree", "class.attacked"};

std::array<std::size_t, 2> class_counts(const FeatureMatrix& m) {
  std::array<std::size_t, 2> n{};
  for (auto l : m.labels()) ++n[l];
  return n;
}

void check_dims(const std::vector<std::string>& names, std::span<const double> x) {
  if (x.size() != names.size())
    throw InvalidArgument("input has " + std::to_string(x.size()) + " features, model expects " +
                          std::to_string(names.size()));
}

std::string fmt_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += ',';
    out += items[i];
  }
  return out;
}

}  // namespace

std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::Ggnb: return "ggnb";
    case ModelKind::Cnb: return "cnb";
    case ModelKind::Mnb: return "mnb";
  }
  return "?";
}

ModelKind parse_model_kind(std::string_view text) {
  if (text == "ggnb" || text == "gnb") return ModelKind::Ggnb;
  if (text == "cnb") return ModelKind::Cnb;
  if (text == "mnb") return ModelKind::Mnb;
  throw InvalidArgument("unknown model kind '" + std::string(text) + "' (ggnb, cnb, mnb)");
}

GaussianNbModel fit_gnb(const FeatureMatrix& m, double variance_smoothing) {
  if (!(variance_smoothing >= 0.0)) throw InvalidArgument("variance_smoothing must be >= 0");
  const auto counts = class_counts(m);
  if (counts[0] == 0 || counts[1] == 0) throw DataError("degenerate training labels");
  if (counts[0] < 2 || counts[1] < 2)
    throw DataError("each class needs at least 2 training rows");

  const std::size_t k = m.cols();
  GaussianNbModel model;
  model.feature_names = m.names();
  model.variance_smoothing = variance_smoothing;
  // Welford accumulators; every row is read exactly once.
  std::array<std::vector<double>, 2> mean{std::vector<double>(k, 0.0),
                                          std::vector<double>(k, 0.0)};
  std::array<std::vector<double>, 2> m2{std::vector<double>(k, 0.0),
                                        std::vector<double>(k, 0.0)};
  std::array<double, 2> seen{};
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const std::size_t c = m.label(r);
    const double n = ++seen[c];
    auto& mu = mean[c];
    auto& s2 = m2[c];
    const auto x = m.row(r);
    for (std::size_t j = 0; j < k; ++j) {
      const double delta = x[j] - mu[j];
      mu[j] += delta / n;
      s2[j] += delta * (x[j] - mu[j]);
    }
  }

  // Whole-matrix variance per feature, combined from the class moments.
  const double n0 = seen[0], n1 = seen[1], n = n0 + n1;
  double max_var = 0.0;
  for (std::size_t j = 0; j < k; ++j) {
    const double delta = mean[1][j] - mean[0][j];
    const double total_m2 = m2[0][j] + m2[1][j] + delta * delta * n0 * n1 / n;
    max_var = std::max(max_var, total_m2 / n);
  }
  // An all-constant matrix has no scale to borrow; fall back to absolute ε.
  model.epsilon = variance_smoothing * (max_var > 0.0 ? max_var : 1.0);

  for (std::size_t c = 0; c < 2; ++c) {
    model.priors[c] = seen[c] / n;
    model.mean[c] = mean[c];
    model.var[c].resize(k);
    for (std::size_t j = 0; j < k; ++j) model.var[c][j] = m2[c][j] / seen[c] + model.epsilon;
  }
  for (std::size_t c = 0; c < 2; ++c)
    for (double v : model.var[c])
      if (!(v > 0.0))
        throw DataError("zero variance after smoothing; set variance_smoothing > 0");
  return model;
}

double gnb_log_likelihood(const GaussianNbModel& model, std::span<const double> x,
                          std::size_t cls) {
  check_dims(model.feature_names, x);
  if (cls > 1) throw InvalidArgument("class index must be 0 or 1");
  const auto& mu = model.mean[cls];
  const auto& var = model.var[cls];
  constexpr double kLog2Pi = 1.8378770664093454836;  // log(2π)
  double score = std::log(model.priors[cls]);
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double d = x[j] - mu[j];
    score -= 0.5 * (kLog2Pi + std::log(var[j]) + d * d / var[j]);
  }
  return score;
}

Prediction decide(double log_score_att, double log_score_attfr) {
  Prediction p;
  p.log_score_att = log_score_att;
  p.log_score_attfr = log_score_attfr;
  p.label = log_score_att > log_score_attfr ? WindowLabel::Attacked : WindowLabel::AttackFree;
  const double top = std::max(log_score_att, log_score_attfr);
  const double ea = std::exp(log_score_att - top);
  const double ef = std::exp(log_score_attfr - top);
  p.posterior_att = ea / (ea + ef);
  return p;
}

Prediction predict(const GaussianNbModel& model, std::span<const double> x) {
  return decide(gnb_log_likelihood(model, x, kAttacked),
                gnb_log_likelihood(model, x, kAttackFree));
}

CountNbModel fit_count_nb(const FeatureMatrix& m, CountVariant variant, double alpha) {
  if (!(alpha > 0.0)) throw InvalidArgument("alpha must be > 0");
  const auto counts = class_counts(m);
  if (counts[0] == 0 || counts[1] == 0) throw DataError("degenerate training labels");
  const std::size_t k = m.cols();
  CountNbModel model;
  model.variant = variant;
  model.feature_names = m.names();
  model.alpha = alpha;
  model.feature_mass = {std::vector<double>(k, 0.0), std::vector<double>(k, 0.0)};
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const auto x = m.row(r);
    auto& mass = model.feature_mass[m.label(r)];
    for (std::size_t j = 0; j < k; ++j) {
      if (x[j] < 0.0)
        throw DataError("negative value for feature '" + m.names()[j] + "' in row " +
                        std::to_string(r));
      mass[j] += x[j];
    }
  }
  const double n = static_cast<double>(m.rows());
  for (std::size_t c = 0; c < 2; ++c) {
    model.priors[c] = static_cast<double>(counts[c]) / n;
    // Complement weights come from the other class's mass.
    const auto& mass = model.feature_mass[variant == CountVariant::Complement ? 1 - c : c];
    double total = 0.0;
    for (double v : mass) total += v;
    const double denom = total + alpha * static_cast<double>(k);
    model.log_weights[c].resize(k);
    for (std::size_t j = 0; j < k; ++j)
      model.log_weights[c][j] = std::log((mass[j] + alpha) / denom);
  }
  return model;
}

double count_log_score(const CountNbModel& model, std::span<const double> x, std::size_t cls) {
  check_dims(model.feature_names, x);
  if (cls > 1) throw InvalidArgument("class index must be 0 or 1");
  double dot = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    if (x[j] < 0.0)
      throw DataError("negative value for feature '" + model.feature_names[j] + "'");
    dot += x[j] * model.log_weights[cls][j];
  }
  const double sign = model.variant == CountVariant::Complement ? -1.0 : 1.0;
  return std::log(model.priors[cls]) + sign * dot;
}

Prediction predict_count(const CountNbModel& model, std::span<const double> x) {
  return decide(count_log_score(model, x, kAttacked), count_log_score(model, x, kAttackFree));
}

ModelKind kind_of(const Model& model) {
  if (std::holds_alternative<GaussianNbModel>(model)) return ModelKind::Ggnb;
  return std::get<CountNbModel>(model).variant == CountVariant::Complement ? ModelKind::Cnb
                                                                           : ModelKind::Mnb;
}

const std::vector<std::string>& feature_names(const Model& model) {
  return std::visit([](const auto& m) -> const std::vector<std::string>& {
    return m.feature_names;
  }, model);
}

Model fit_model(ModelKind kind, const FeatureMatrix& m) {
  switch (kind) {
    case ModelKind::Ggnb: return fit_gnb(m);
    case ModelKind::Cnb: return fit_count_nb(m, CountVariant::Complement);
    case ModelKind::Mnb: return fit_count_nb(m, CountVariant::Multinomial);
  }
  throw InvalidArgument("unknown model kind");
}

Prediction predict(const Model& model, std::span<const double> x) {
  if (const auto* g = std::get_if<GaussianNbModel>(&model)) return predict(*g, x);
  return predict_count(std::get<CountNbModel>(model), x);
}

Prediction predict(const Model& model, const FeatureVector& v) {
  const auto all = v.values();
  std::vector<double> x;
  for (const auto& name : feature_names(model)) {
    const auto i = feature_index(name);
    if (i == kFeatureCount) throw InvalidArgument("model uses unknown feature '" + name + "'");
    x.push_back(all[i]);
  }
  return predict(model, x);
}

std::vector<Prediction> predict_all(const Model& model, const FeatureMatrix& m) {
  auto run = [&](const FeatureMatrix& src) {
    std::vector<Prediction> out;
    out.reserve(src.rows());
    for (std::size_t r = 0; r < src.rows(); ++r) out.push_back(predict(model, src.row(r)));
    return out;
  };
  const auto& names = feature_names(model);
  if (m.names() == names) return run(m);
  return run(m.select_columns(names));
}

void save_model(const Model& model, std::ostream& out, std::span<const std::string> comments) {
  for (const auto& c : comments) out << "# " << c << '\n';
  const auto& names = feature_names(model);
  out << "[meta]\n";
  out << "format = " << kFormat << '\n';
  out << "version = " << kVersion << '\n';
  out << "kind = " << to_string(kind_of(model)) << '\n';
  out << "features = " << join(names) << '\n';
  const auto* g = std::get_if<GaussianNbModel>(&model);
  const auto* cm = std::get_if<CountNbModel>(&model);
  if (g) {
    out << "variance_smoothing = " << fmt_real(g->variance_smoothing) << '\n';
    out << "epsilon = " << fmt_real(g->epsilon) << '\n';
  } else {
    out << "alpha = " << fmt_real(cm->alpha) << '\n';
  }
  const auto& priors = g ? g->priors : cm->priors;
  out << "\n[priors]\n";
  out << "attacked = " << fmt_real(priors[kAttacked]) << '\n';
  out << "attackfree = " << fmt_real(priors[kAttackFree]) << '\n';
  for (std::size_t c : {kAttacked, kAttackFree}) {
    out << "\n[" << kClassSection[c] << "]\n";
    for (std::size_t j = 0; j < names.size(); ++j) {
      if (g) {
        out << "mean." << names[j] << " = " << fmt_real(g->mean[c][j]) << '\n';
        out << "var." << names[j] << " = " << fmt_real(g->var[c][j]) << '\n';
      } else {
        out << "mass." << names[j] << " = " << fmt_real(cm->feature_mass[c][j]) << '\n';
        out << "log_weight." << names[j] << " = " << fmt_real(cm->log_weights[c][j]) << '\n';
      }
    }
  }
  if (!out) throw DataError("write failed");
}

namespace {

struct Entry {
  std::string value;
  std::size_t line;
};

class Document {
 public:
  explicit Document(std::istream& in) {
    std::string raw;
    std::string section;
    while (std::getline(in, raw)) {
      ++last_line_;
      std::string_view line = raw;
      while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.remove_suffix(1);
      while (!line.empty() && line.front() == ' ') line.remove_prefix(1);
      if (line.empty() || line.front() == '#') continue;
      if (line.front() == '[') {
        if (line.back() != ']') throw ParseError(last_line_, "malformed section header");
        section = std::string(line.substr(1, line.size() - 2));
        sections_[section];
        continue;
      }
      const auto eq = line.find('=');
      if (eq == std::string_view::npos || section.empty())
        throw ParseError(last_line_, "expected 'key = value' inside a section");
      auto key = line.substr(0, eq);
      auto value = line.substr(eq + 1);
      while (!key.empty() && key.back() == ' ') key.remove_suffix(1);
      while (!value.empty() && value.front() == ' ') value.remove_prefix(1);
      sections_[section][std::string(key)] = {std::string(value), last_line_};
    }
  }

  const Entry& get(const std::string& section, const std::string& key) const {
    const auto s = sections_.find(section);
    if (s == sections_.end())
      throw ParseError(last_line_, "missing section [" + section + "]");
    const auto e = s->second.find(key);
    if (e == s->second.end())
      throw ParseError(last_line_, "missing field '" + key + "' in [" + section + "]");
    return e->second;
  }

  double real(const std::string& section, const std::string& key) const {
    const auto& e = get(section, key);
    double v = 0.0;
    const auto [p, ec] = std::from_chars(e.value.data(), e.value.data() + e.value.size(), v);
    if (ec != std::errc{} || p != e.value.data() + e.value.size() || e.value.empty() ||
        !std::isfinite(v))
      throw ParseError(e.line, "field '" + key + "' is not a finite real: '" + e.value + "'");
    return v;
  }

 private:
  std::map<std::string, std::map<std::string, Entry>> sections_;
  std::size_t last_line_ = 0;
};

}  // namespace

Model load_model(std::istream& in) {
  const Document doc(in);
  const auto& format = doc.get("meta", "format");
  if (format.value != kFormat)
    throw ParseError(format.line, "field 'format' is '" + format.value + "', expected " +
                                      std::string(kFormat));
  const auto& version = doc.get("meta", "version");
  if (version.value != std::to_string(kVersion))
    throw ParseError(version.line, "field 'version' is '" + version.value +
                                       "', this build reads version " + std::to_string(kVersion));
  const auto& kind_entry = doc.get("meta", "kind");
  ModelKind kind;
  try {
    kind = parse_model_kind(kind_entry.value);
  } catch (const InvalidArgument& e) {
    throw ParseError(kind_entry.line, std::string("field 'kind': ") + e.what());
  }
  std::vector<std::string> names;
  {
    const auto& f = doc.get("meta", "features");
    std::string_view rest = f.value;
    while (!rest.empty()) {
      const auto comma = rest.find(',');
      names.emplace_back(rest.substr(0, comma));
      if (names.back().empty()) throw ParseError(f.line, "field 'features' has an empty name");
      if (std::find(names.begin(), names.end() - 1, names.back()) != names.end() - 1)
        throw ParseError(f.line, "field 'features' repeats '" + names.back() + "'");
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (names.empty()) throw ParseError(f.line, "field 'features' is empty");
  }

  std::array<double, 2> priors{};
  priors[kAttacked] = doc.real("priors", "attacked");
  priors[kAttackFree] = doc.real("priors", "attackfree");

  if (kind == ModelKind::Ggnb) {
    GaussianNbModel g;
    g.feature_names = names;
    g.priors = priors;
    g.variance_smoothing = doc.real("meta", "variance_smoothing");
    g.epsilon = doc.real("meta", "epsilon");
    for (std::size_t c = 0; c < 2; ++c) {
      const std::string section(kClassSection[c]);
      for (const auto& n : names) {
        g.mean[c].push_back(doc.real(section, "mean." + n));
        const double v = doc.real(section, "var." + n);
        if (!(v > 0.0))
          throw ParseError(doc.get(section, "var." + n).line, "field 'var." + n + "' must be > 0");
        g.var[c].push_back(v);
      }
    }
    return g;
  }
  CountNbModel cm;
  cm.variant = kind == ModelKind::Cnb ? CountVariant::Complement : CountVariant::Multinomial;
  cm.feature_names = names;
  cm.priors = priors;
  cm.alpha = doc.real("meta", "alpha");
  for (std::size_t c = 0; c < 2; ++c) {
    const std::string section(kClassSection[c]);
    for (const auto& n : names) {
      cm.feature_mass[c].push_back(doc.real(section, "mass." + n));
      cm.log_weights[c].push_back(doc.real(section, "log_weight." + n));
    }
  }
  return cm;
}

std::string model_to_string(const Model& model) {
  std::ostringstream out;
  save_model(model, out);
  return out.str();
}

Model model_from_string(std::string_view text) {
  std::istringstream in{std::string(text)};
  return load_model(in);
}

}  // namespace canids
