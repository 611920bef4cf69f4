#include "qinc/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "qinc/errors.hpp"

namespace qinc {

namespace {

using ojson = nlohmann::ordered_json;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double parse_double(const std::string& s, const std::string& what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw DomainError("cannot parse " + what + " '" + s + "'");
  }
  if (used != s.size() || !std::isfinite(v)) throw DomainError("cannot parse " + what + " '" + s + "'");
  return v;
}

BoundsReport nan_report() {
  BoundsReport rep;
  rep.c_s = rep.c_r = rep.c_z = rep.c_h = rep.delta_c = rep.r = kNaN;
  return rep;
}

ojson matrix_json(const RMat& m) {
  ojson out = ojson::array();
  for (int i = 0; i < m.dim(); ++i) {
    ojson row = ojson::array();
    for (int j = 0; j < m.dim(); ++j) row.push_back(m(i, j));
    out.push_back(row);
  }
  return out;
}

ojson w_opt_json(const std::vector<double>& w) {
  if (w.empty()) return nullptr;
  if (w.size() == 1) return w[0];
  return ojson(w);
}

ojson row_json(const ReportRow& row, bool with_axis) {
  ojson j;
  if (with_axis) j["axis"] = row.axis;
  const BoundsReport& r = row.rep;
  j["R"] = r.r;
  j["C_S"] = r.c_s;
  j["C_R"] = std::isnan(r.c_r) ? ojson(nullptr) : ojson(r.c_r);
  j["C_Z"] = r.c_z;
  j["C_H"] = r.c_h;
  j["delta_C"] = r.delta_c;
  j["w_opt"] = w_opt_json(row.w_opt);
  j["branch"] = row.valid ? to_string(r.branch) : "invalid";
  j["class"] = row.valid ? to_string(row.cls) : "invalid";
  if (!row.valid) j["error"] = row.error;
  return j;
}

ojson meta_json(const SweepSpec& spec, std::optional<std::uint64_t> seed) {
  ojson meta;
  meta["model"] = model_info(spec.model).name;
  meta["axis"] = spec.axis;
  meta["from"] = spec.start;
  meta["to"] = spec.stop;
  meta["count"] = spec.count;
  meta["fixed"] = ojson::object();
  for (const auto& [k, v] : spec.fixed) meta["fixed"][k] = v;
  meta["weight"] = spec.weight.str();
  meta["seed"] = seed ? ojson(*seed) : ojson(nullptr);
  meta["version"] = kVersion;
  return meta;
}

std::string join_w(const std::vector<double>& w) {
  std::string out;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (i) out += ';';
    out += format_number(w[i]);
  }
  return out;
}

template <class Row, class Fn>
void parallel_rows(std::vector<Row>& rows, int threads, Fn fn) {
  const int n = static_cast<int>(rows.size());
  const int t = std::clamp(threads, 1, std::max(1, n));
  if (t == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  for (int k = 0; k < t; ++k) {
    pool.emplace_back([&, k] {
      for (int i = k; i < n; i += t) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

ResolvedPoint resolve_at(const SweepSpec& spec, double x) {
  NamedValues v = spec.fixed;
  v[spec.axis] = x;
  return resolve_point(spec.model, v);
}

}  // namespace

std::vector<std::string> accepted_names(ModelId id) {
  switch (id) {
    case ModelId::PureTomography:
      return {"theta", "phi"};
    case ModelId::MixedTomography:
      return {"r", "theta", "phi"};
    case ModelId::Dephasing:
    case ModelId::AmplitudeDamping:
    case ModelId::DepolarizingFrequency:
      return {"theta", "phi", "omega", "gamma", "t", "gamma_t"};
    case ModelId::AdPlusDephasing:
      return {"theta", "phi", "gamma_ad", "gamma_deph", "t"};
  }
  return {};
}

ResolvedPoint resolve_point(ModelId id, const NamedValues& values) {
  const ModelInfo& mi = model_info(id);
  const auto names = accepted_names(id);
  for (const auto& [k, v] : values) {
    if (std::find(names.begin(), names.end(), k) == names.end()) {
      throw DomainError("--" + k + " does not apply to " + mi.name);
    }
  }
  NamedValues v = values;
  if (auto it = v.find("gamma_t"); it != v.end()) {
    if (v.count("gamma") || v.count("t")) throw DomainError("--gamma_t cannot be combined with --gamma or --t");
    v["gamma"] = it->second;
    v["t"] = 1.0;
    v.erase("gamma_t");
  }
  auto get = [&](const std::string& k, std::optional<double> fallback = std::nullopt) {
    if (auto it = v.find(k); it != v.end()) return it->second;
    if (fallback) return *fallback;
    throw DomainError("--" + k + " is required for " + mi.name);
  };

  ResolvedPoint p{id, {}, {}};
  switch (id) {
    case ModelId::PureTomography:
      p.lambda = ParamPoint::make(id, {get("theta"), get("phi", 0.0)});
      return p;
    case ModelId::MixedTomography:
      p.lambda = ParamPoint::make(id, {get("r"), get("theta"), get("phi", 0.0)});
      return p;
    case ModelId::Dephasing:
    case ModelId::AmplitudeDamping:
    case ModelId::DepolarizingFrequency:
      p.lambda = ParamPoint::make(id, {get("gamma"), get("omega", 1.0)});
      break;
    case ModelId::AdPlusDephasing:
      p.lambda = ParamPoint::make(id, {get("gamma_ad"), get("gamma_deph")});
      break;
  }
  p.ctrl.theta0 = get("theta");
  p.ctrl.phi0 = get("phi", 0.0);
  p.ctrl.t = get("t", 1.0);
  return p;
}

WeightSpec WeightSpec::parse(const std::string& text) {
  WeightSpec w;
  if (text == "identity") return w;
  if (text == "bures") {
    w.kind = Kind::Bures;
    return w;
  }
  if (text == "opt") {
    w.kind = Kind::Opt;
    return w;
  }
  if (text.rfind("diag:", 0) == 0) {
    w.kind = Kind::Diag;
    std::stringstream ss(text.substr(5));
    std::string item;
    while (std::getline(ss, item, ',')) w.diag.push_back(parse_double(item, "weight entry"));
    if (w.diag.size() < 2 || w.diag.size() > 3) throw DomainError("diag weight needs 2 or 3 entries");
    for (double d : w.diag)
      if (!(d > 0.0)) throw DomainError("diag weight entries must be positive");
    return w;
  }
  throw DomainError("unknown weight '" + text + "' (expected diag:a,b[,c], bures, identity or opt)");
}

std::string WeightSpec::str() const {
  switch (kind) {
    case Kind::Identity:
      return "identity";
    case Kind::Bures:
      return "bures";
    case Kind::Opt:
      return "opt";
    case Kind::Diag: {
      std::string s = "diag:";
      for (std::size_t i = 0; i < diag.size(); ++i) s += (i ? "," : "") + format_number(diag[i]);
      return s;
    }
  }
  return "?";
}

ReportRow compute_row(const ResolvedPoint& point, const WeightSpec& weight) {
  ReportRow row;
  try {
    check_domain(point.id, point.lambda, point.ctrl);
    const ModelPoint mp = evaluate(point.id, point.lambda, point.ctrl);
    const InfoMatrices info = analyze(mp);
    row.cls = classify(info, model_info(point.id).d_invariant);
    WeightMatrix w = WeightMatrix::identity(info.n);
    switch (weight.kind) {
      case WeightSpec::Kind::Identity:
        break;
      case WeightSpec::Kind::Diag:
        if (static_cast<int>(weight.diag.size()) != info.n) {
          throw DomainError("diag weight needs " + std::to_string(info.n) + " entries for this model");
        }
        w = WeightMatrix::diag(weight.diag);
        break;
      case WeightSpec::Kind::Bures:
        w = WeightMatrix(info.q);
        break;
      case WeightSpec::Kind::Opt: {
        const DiagOptimum opt = optimize_delta_c_diag(info, row.cls);
        row.w_opt = opt.w;
        std::vector<double> d{1.0};
        d.insert(d.end(), opt.w.begin(), opt.w.end());
        w = WeightMatrix::diag(d);
        break;
      }
    }
    row.rep = bounds_report(w, info, row.cls);
    check_report(row.rep);
    row.info = info;
    row.valid = true;
  } catch (const std::exception& e) {
    row.valid = false;
    row.error = e.what();
    row.rep = nan_report();
    row.w_opt.clear();
    row.info.reset();
  }
  return row;
}

std::vector<double> linear_grid(double start, double stop, int count) {
  std::vector<double> out(count);
  for (int i = 0; i < count; ++i) {
    out[i] = count == 1 ? start : start + (stop - start) * i / (count - 1);
  }
  if (count > 1) out.back() = stop;
  return out;
}

void validate_sweep(const SweepSpec& spec) {
  if (spec.count < 2) throw DomainError("--count must be at least 2");
  const auto names = accepted_names(spec.model);
  if (std::find(names.begin(), names.end(), spec.axis) == names.end()) {
    throw DomainError("axis '" + spec.axis + "' does not apply to " + model_info(spec.model).name);
  }
  if (spec.fixed.count(spec.axis)) throw DomainError("axis '" + spec.axis + "' is also given as a fixed value");
  if (!std::isfinite(spec.start) || !std::isfinite(spec.stop)) throw DomainError("sweep range must be finite");
  resolve_at(spec, spec.start);
}

std::vector<ReportRow> run_sweep(const SweepSpec& spec) {
  validate_sweep(spec);
  const auto grid = linear_grid(spec.start, spec.stop, spec.count);
  std::vector<ReportRow> rows(grid.size());
  parallel_rows(rows, spec.threads, [&](int i) {
    rows[i] = compute_row(resolve_at(spec, grid[i]), spec.weight);
    rows[i].axis = grid[i];
  });
  return rows;
}

std::uint64_t point_seed(std::uint64_t master, std::size_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(master), static_cast<std::uint32_t>(master >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(std::uint64_t(index) >> 32)};
  std::array<std::uint32_t, 2> words{};
  seq.generate(words.begin(), words.end());
  return (std::uint64_t(words[0]) << 32) | words[1];
}

std::vector<RandomRow> run_random_weights(const SweepSpec& spec, int samples, std::uint64_t seed) {
  validate_sweep(spec);
  if (samples < 1) throw DomainError("--samples must be at least 1");
  const auto grid = linear_grid(spec.start, spec.stop, spec.count);
  std::vector<std::vector<RandomRow>> blocks(grid.size());
  parallel_rows(blocks, spec.threads, [&](int k) {
    auto& block = blocks[k];
    try {
      const ResolvedPoint p = resolve_at(spec, grid[k]);
      check_domain(p.id, p.lambda, p.ctrl);
      const InfoMatrices info = analyze(evaluate(p.id, p.lambda, p.ctrl));
      const ModelClass cls = classify(info, model_info(p.id).d_invariant);
      const double r = quantumness(info);
      const double best = optimize_delta_c_diag(info, cls).delta_c_max;
      const auto draws = random_weight_sweep(info, cls, samples, point_seed(seed, k));
      for (int s = 0; s < samples; ++s) {
        RandomRow row;
        row.axis = grid[k];
        row.sample = s;
        row.valid = true;
        row.w = draws[s].w.mat();
        row.delta_c = draws[s].delta_c;
        row.r = r;
        row.delta_c_opt = best;
        block.push_back(row);
      }
    } catch (const std::exception& e) {
      block.clear();
      RandomRow row;
      row.axis = grid[k];
      row.error = e.what();
      row.delta_c = row.r = row.delta_c_opt = kNaN;
      block.push_back(row);
    }
  });
  std::vector<RandomRow> out;
  for (auto& b : blocks) out.insert(out.end(), b.begin(), b.end());
  return out;
}

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (x == 0.0) x = 0.0;  // drop the sign of -0
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

void write_csv(std::ostream& os, const std::vector<ReportRow>& rows) {
  os << "axis,R,C_S,C_R,C_Z,C_H,delta_C,w_opt,branch,class\n";
  for (const auto& row : rows) {
    const BoundsReport& r = row.rep;
    os << format_number(row.axis) << ',' << format_number(r.r) << ',' << format_number(r.c_s) << ',';
    if (!(row.valid && std::isnan(r.c_r))) os << format_number(r.c_r);
    os << ',' << format_number(r.c_z) << ',' << format_number(r.c_h) << ',' << format_number(r.delta_c) << ','
       << join_w(row.w_opt) << ',';
    if (row.valid) {
      os << to_string(r.branch) << ',' << to_string(row.cls) << '\n';
    } else {
      os << "invalid,invalid\n";
    }
  }
}

void write_json(std::ostream& os, const std::vector<ReportRow>& rows, const SweepSpec& spec,
                std::optional<std::uint64_t> seed) {
  ojson doc;
  doc["meta"] = meta_json(spec, seed);
  doc["rows"] = ojson::array();
  for (const auto& row : rows) doc["rows"].push_back(row_json(row, true));
  os << doc.dump(2) << '\n';
}

void write_random_csv(std::ostream& os, const std::vector<RandomRow>& rows) {
  const int n = rows.empty() ? 2 : rows.front().w.dim();
  os << "axis,sample,W11,W12,W22";
  if (n == 3) os << ",W13,W23,W33";
  os << ",delta_C,R,delta_C_opt\n";
  for (const auto& row : rows) {
    os << format_number(row.axis) << ',' << row.sample << ',';
    if (row.valid) {
      os << format_number(row.w(0, 0)) << ',' << format_number(row.w(0, 1)) << ',' << format_number(row.w(1, 1));
      if (n == 3) {
        os << ',' << format_number(row.w(0, 2)) << ',' << format_number(row.w(1, 2)) << ','
           << format_number(row.w(2, 2));
      }
    } else {
      os << "nan,nan,nan";
      if (n == 3) os << ",nan,nan,nan";
    }
    os << ',' << format_number(row.delta_c) << ',' << format_number(row.r) << ','
       << format_number(row.delta_c_opt) << '\n';
  }
}

void write_random_json(std::ostream& os, const std::vector<RandomRow>& rows, const SweepSpec& spec,
                       int samples, std::uint64_t seed) {
  ojson doc;
  doc["meta"] = meta_json(spec, seed);
  doc["meta"]["samples"] = samples;
  doc["rows"] = ojson::array();
  for (const auto& row : rows) {
    ojson j;
    j["axis"] = row.axis;
    j["sample"] = row.sample;
    j["W"] = row.valid ? matrix_json(row.w) : ojson(nullptr);
    j["delta_C"] = row.delta_c;
    j["R"] = row.r;
    j["delta_C_opt"] = row.delta_c_opt;
    if (!row.valid) j["error"] = row.error;
    doc["rows"].push_back(j);
  }
  os << doc.dump(2) << '\n';
}

void write_point_json(std::ostream& os, const ResolvedPoint& point, const WeightSpec& weight,
                      const ReportRow& row) {
  const ModelInfo& mi = model_info(point.id);
  ojson doc;
  doc["meta"] = {{"model", mi.name}, {"version", kVersion}};
  doc["model"] = mi.name;
  doc["params"] = ojson::object();
  for (std::size_t i = 0; i < point.lambda.size(); ++i) doc["params"][mi.params[i]] = point.lambda[i];
  if (point.id != ModelId::PureTomography && point.id != ModelId::MixedTomography) {
    doc["controls"] = {{"theta", point.ctrl.theta0}, {"phi", point.ctrl.phi0}, {"t", point.ctrl.t}};
  }
  doc["weight"] = weight.str();
  const ojson fields = row_json(row, false);
  for (const auto& [k, v] : fields.items()) doc[k] = v;
  if (row.valid) {
    doc["W"] = matrix_json(row.rep.w_used.mat());
    doc["Q"] = matrix_json(row.info->q);
    doc["D"] = matrix_json(row.info->d);
    if (row.info->j) {
      doc["J"] = {{"re", matrix_json(real_part(*row.info->j))}, {"im", matrix_json(imag_part(*row.info->j))}};
    }
  }
  os << doc.dump(2) << '\n';
}

void write_models(std::ostream& os) {
  for (const auto& m : model_registry()) {
    std::string params;
    for (std::size_t i = 0; i < m.params.size(); ++i) params += (i ? ", " : "") + m.params[i];
    std::string cls = m.classical ? "classical" : m.d_invariant ? "d-invariant" : "generic (decided per point)";
    os << m.name << '\n'
       << "  parameters: " << params << " (" << m.params.size() << ")\n"
       << "  domain:     " << m.domain << '\n'
       << "  dynamics:   " << m.dynamics << '\n'
       << "  class:      " << cls << '\n'
       << "  evaluation: " << (m.closed_form ? "closed form" : "Lindblad integrator + finite differences")
       << '\n';
  }
}

}  // namespace qinc
