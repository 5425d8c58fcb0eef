#pragma once

#include <cmath>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "marked/basis_certify.hpp"
#include "marked/cogrowth.hpp"
#include "marked/criteria.hpp"
#include "marked/group_io.hpp"
#include "marked/hn_limit.hpp"
#include "marked/report.hpp"
#include "marked/spectral.hpp"

namespace marked {

using json = nlohmann::ordered_json;

/// Deterministic experiment runner: fixed config in, byte-identical report
/// files out. Floats are serialized through fmt_double, rationals exactly.
struct ExperimentConfig {
  std::string name;
  std::map<std::string, std::string> scalar;
  std::map<std::string, std::vector<std::string>> multi;
  std::string out_dir = ".";
  std::string format = "csv";  // summary format: csv | json
  int threads = 1;             // accepted for interface stability; kernels
                               // are deterministic independent of it
  std::uint64_t seed = 20240501;

  std::string get(const std::string& key, const std::string& fallback) const {
    auto it = scalar.find(key);
    return it == scalar.end() ? fallback : it->second;
  }
  int get_int(const std::string& key, int fallback) const {
    auto it = scalar.find(key);
    return it == scalar.end() ? fallback : std::stoi(it->second);
  }
  std::vector<std::string> get_multi(const std::string& key) const {
    auto it = multi.find(key);
    return it == multi.end() ? std::vector<std::string>{} : it->second;
  }
};

struct ExperimentResult {
  std::vector<std::string> files;
  std::string summary;
};

/// "2..5" or "3" -> {2,3,4,5} / {3}.
inline std::vector<int> parse_range(const std::string& s) {
  size_t dots = s.find("..");
  if (dots == std::string::npos) return {std::stoi(s)};
  int lo = std::stoi(s.substr(0, dots));
  int hi = std::stoi(s.substr(dots + 2));
  if (hi < lo) throw ConfigError("empty range \"" + s + "\"");
  std::vector<int> out;
  for (int i = lo; i <= hi; ++i) out.push_back(i);
  return out;
}

namespace detail {

inline std::filesystem::path out_file(const ExperimentConfig& cfg, const std::string& name,
                                      ExperimentResult& res) {
  std::filesystem::create_directories(cfg.out_dir);
  std::filesystem::path p = std::filesystem::path(cfg.out_dir) / name;
  res.files.push_back(p.string());
  return p;
}

inline void write_summary(const ExperimentConfig& cfg, ExperimentResult& res, const json& j) {
  if (cfg.format == "json") {
    write_text(out_file(cfg, cfg.name + "_summary.json", res), j.dump(2) + "\n");
  } else {
    // flatten one level into csv
    CsvWriter csv({"key", "value"});
    std::function<void(const std::string&, const json&)> emit = [&](const std::string& prefix,
                                                                    const json& v) {
      if (v.is_object()) {
        for (auto it = v.begin(); it != v.end(); ++it) {
          emit(prefix.empty() ? it.key() : prefix + "." + it.key(), it.value());
        }
      } else if (v.is_array()) {
        for (size_t i = 0; i < v.size(); ++i) emit(prefix + "." + std::to_string(i), v[i]);
      } else if (v.is_string()) {
        csv.append_row({prefix, v.get<std::string>()});
      } else {
        csv.append_row({prefix, v.dump()});
      }
    };
    emit("", j);
    csv.write(out_file(cfg, cfg.name + "_summary.csv", res));
  }
  res.summary = j.dump(2);
}

inline void spectral_csv(const SpectralEstimate& est, const std::filesystem::path& path) {
  CsvWriter csv({"n", "trace_numerator", "trace_denominator", "bound", "extrapolated"});
  for (size_t n = 1; n <= est.traces.size(); ++n) {
    csv.append_row({std::to_string(n), est.traces[n - 1].get_num().get_str(),
                    est.traces[n - 1].get_den().get_str(), fmt_double(est.bounds[n - 1]),
                    fmt_double(est.extrapolated)});
  }
  csv.write(path);
}

inline MarkedGroup required_group(const ExperimentConfig& cfg) {
  auto files = cfg.get_multi("group");
  if (files.empty()) throw ConfigError("experiment \"" + cfg.name + "\" needs --group <file>");
  if (files.size() > 1) throw ConfigError("experiment \"" + cfg.name + "\" takes one group");
  return load_group(files[0]);
}

// ---- free-norms ----------------------------------------------------------

inline ExperimentResult run_free_norms(const ExperimentConfig& cfg) {
  ExperimentResult res;
  std::vector<int> ranks = parse_range(cfg.get("ranks", "2..5"));
  int depth = cfg.get_int("depth", 60);
  json rows = json::array();
  for (int i : ranks) {
    if (i < 2) throw ConfigError("free-norms needs ranks >= 2");
    SpectralEstimate est =
        estimate_from_traces(free_averaging_trace_oracle(i, depth), "oracle");
    spectral_csv(est, out_file(cfg, "free_norms_rank_" + std::to_string(i) + ".csv", res));
    double reference = 2.0 * std::sqrt(static_cast<double>(i - 1)) / static_cast<double>(i);
    json row;
    row["rank"] = i;
    row["depth"] = depth;
    row["extrapolated"] = fmt_double(est.extrapolated);
    row["reference"] = fmt_double(reference);
    row["abs_error"] = fmt_double(std::fabs(est.extrapolated - reference));
    int half = std::min(depth, 30);
    row["raw_bound_depth_" + std::to_string(half)] =
        fmt_double(est.bounds[static_cast<size_t>(half - 1)]);
    rows.push_back(row);
  }
  json j;
  j["experiment"] = cfg.name;
  j["rows"] = rows;
  write_summary(cfg, res, j);
  return res;
}

// ---- grigorchuk -----------------------------------------------------------

inline ExperimentResult run_grigorchuk(const ExperimentConfig& cfg) {
  ExperimentResult res;
  MarkedGroup G = required_group(cfg);
  int depth = cfg.get_int("depth", 40);
  CogrowthTable t = cogrowth_table(G, depth);
  CsvWriter csv({"k", "gamma", "gamma_rate"});
  for (int k = 0; k <= depth; ++k) {
    double rate = k == 0 ? 1.0
                         : std::exp(log_int(t.gamma[static_cast<size_t>(k)]) /
                                    static_cast<double>(k));
    csv.append_row({std::to_string(k), t.gamma[static_cast<size_t>(k)].get_str(),
                    fmt_double(rate)});
  }
  csv.write(out_file(cfg, "cogrowth.csv", res));
  GrigorchukReport rep = grigorchuk_residual_from_table(G, t);
  json j;
  j["experiment"] = cfg.name;
  j["depth"] = depth;
  j["girth"] = rep.girth_value;
  j["rho"] = fmt_double(rep.rho_hat);
  j["rho_mode"] = rep.rho_mode;
  j["omega_hat"] = fmt_double(rep.omega_hat);
  if (rep.omega_exact) {
    j["omega_exact"] = fmt_double(*rep.omega_exact);
  }
  j["grigorchuk_rhs"] = fmt_double(rep.rhs);
  j["residual"] = fmt_double(rep.residual);
  j["residual_exact"] = rep.residual_exact;
  write_summary(cfg, res, j);
  return res;
}

// ---- cheeger ---------------------------------------------------------------

inline CheegerMode parse_cheeger_mode(const std::string& s) {
  if (s == "paper") return CheegerMode::PaperExactFinite;
  if (s == "balanced") return CheegerMode::BalancedFinite;
  if (s == "ball") return CheegerMode::BallUpperInfinite;
  throw ConfigError("unknown cheeger mode \"" + s + "\" (paper | balanced | ball)");
}

inline ExperimentResult run_cheeger(const ExperimentConfig& cfg) {
  ExperimentResult res;
  MarkedGroup G = required_group(cfg);
  CheegerMode mode = parse_cheeger_mode(cfg.get("mode", G.engine().finite() ? "balanced" : "ball"));
  int param = cfg.get_int("radius", cfg.get_int("size_cap", mode == CheegerMode::BallUpperInfinite ? 6 : 4));
  int depth = cfg.get_int("depth", 60);
  CheegerResult h = cheeger_constant(G, mode, param);
  assert_cheeger_cap(G, h);
  if (!h.ball_sequence.empty()) {
    CsvWriter csv({"radius", "bound_numerator", "bound_denominator", "bound"});
    for (const auto& [r, q] : h.ball_sequence) {
      csv.append_row({std::to_string(r), q.get_num().get_str(), q.get_den().get_str(),
                      fmt_double(q.get_d())});
    }
    csv.write(out_file(cfg, "cheeger_balls.csv", res));
  }
  CheegerBuserReport buser = cheeger_buser_check(G, depth, mode, param);
  json j;
  j["experiment"] = cfg.name;
  j["mode"] = cfg.get("mode", G.engine().finite() ? "balanced" : "ball");
  j["value"] = rat_str(h.value);
  j["value_real"] = fmt_double(h.value.get_d());
  j["witness"] = h.witness_description;
  json wit = json::array();
  for (const Word& w : h.witness) wit.push_back(G.format(w));
  if (!wit.empty()) j["witness_elements"] = wit;
  json b;
  b["rho"] = fmt_double(buser.rho);
  b["rho_lower_bound"] = fmt_double(buser.rho_lower);
  b["rho_mode"] = buser.rho_mode;
  b["left_2m_1_minus_rho_over_2m_minus_1"] = fmt_double(buser.left);
  b["mid_h_over_2m"] = fmt_double(buser.h_over_2m);
  b["right_sqrt_1_minus_rho_sq"] = fmt_double(buser.right);
  b["h_mode"] = buser.h_mode;
  b["exact_zero_case"] = buser.exact_zero_case;
  j["cheeger_buser"] = b;
  write_summary(cfg, res, j);
  return res;
}

// ---- hn-limit ---------------------------------------------------------------

inline ExperimentResult run_hn_limit(const ExperimentConfig& cfg) {
  ExperimentResult res;
  std::vector<int> ns = parse_range(cfg.get("n", "1..3"));
  int depth = cfg.get_int("depth", 6);
  json rows = json::array();
  bool all_ok = true;
  for (int n : ns) {
    HnLimitRow row = hn_limit_row(n, depth);
    CsvWriter csv({"k", "trace_hn_numerator", "trace_hn_denominator", "trace_lamp_numerator",
                   "trace_lamp_denominator", "dominated"});
    for (int k = 1; k <= depth; ++k) {
      const Rat& a = row.traces_hn[static_cast<size_t>(k - 1)];
      const Rat& b = row.traces_lamp[static_cast<size_t>(k - 1)];
      csv.append_row({std::to_string(k), a.get_num().get_str(), a.get_den().get_str(),
                      b.get_num().get_str(), b.get_den().get_str(), a <= b ? "1" : "0"});
    }
    csv.write(out_file(cfg, "hn_limit_n" + std::to_string(n) + ".csv", res));
    json r;
    r["n"] = n;
    r["relators_map_to_identity"] = row.relators_ok;
    r["displaced_conjugates_nontrivial"] = row.eq50_ok;
    r["trace_domination"] = row.domination_ok;
    r["rho_hn_estimate"] = fmt_double(row.rho_hn);
    r["rho_lamplighter_estimate"] = fmt_double(row.rho_lamp);
    rows.push_back(r);
    all_ok = all_ok && row.relators_ok && row.eq50_ok && row.domination_ok;
  }
  json j;
  j["experiment"] = cfg.name;
  j["depth"] = depth;
  j["rows"] = rows;
  write_summary(cfg, res, j);
  if (!all_ok) throw InvariantViolated("hn-limit: a per-n check failed (see report)");
  return res;
}

// ---- powers-average ----------------------------------------------------------

inline ExperimentResult run_powers_average(const ExperimentConfig& cfg) {
  ExperimentResult res;
  MarkedGroup G;
  auto files = cfg.get_multi("group");
  if (files.empty()) {
    G = make_free_group({"x1", "x2"});
  } else {
    G = load_group(files[0]);
  }
  Word g = G.parse(cfg.get("g", "x1"));
  std::vector<Word> Y;
  auto ys = cfg.get_multi("y");
  if (ys.empty()) ys = {"", "x2", "x2 x2"};
  for (const std::string& y : ys) Y.push_back(y.empty() ? Word{} : G.parse(y));
  std::optional<Word> u;
  if (!cfg.get("u", "").empty()) u = G.parse(cfg.get("u", ""));
  int depth = cfg.get_int("depth", 8);
  PowersAverageReport rep = powers_average_bounds(G, g, Y, depth, u);
  spectral_csv(rep.estimate, out_file(cfg, "powers_average.csv", res));
  json j;
  j["experiment"] = cfg.name;
  j["depth"] = depth;
  j["set_size"] = ys.size();
  j["conjugate_support"] = rep.conjugate_support;
  j["identities_verified"] = rep.identities_verified;
  j["last_bound"] = fmt_double(rep.estimate.last_bound());
  j["extrapolated"] = fmt_double(rep.estimate.extrapolated);
  write_summary(cfg, res, j);
  return res;
}

// ---- basis-certify ------------------------------------------------------------

inline ExperimentResult run_basis_certify(const ExperimentConfig& cfg) {
  ExperimentResult res;
  MarkedGroup base;
  auto files = cfg.get_multi("group");
  if (files.empty()) {
    FinitePresentation pres;
    pres.generators = {"a"};
    pres.relators = {Word{Letter{0, +1}, Letter{0, +1}, Letter{0, +1}}};
    base = coset_enumerate(pres);
  } else {
    base = load_group(files[0]);
  }
  std::vector<Word> A;
  auto as = cfg.get_multi("a");
  if (as.empty()) as = {"a"};
  for (const std::string& s : as) A.push_back(base.parse(s));
  int n = cfg.get_int("n", 2);
  int L = cfg.get_int("length_cap", 4);
  FreeBasisInstance inst = make_free_basis_instance(base, A, n);

  json j;
  j["experiment"] = cfg.name;
  j["basis_size"] = inst.basis_size();
  j["length_cap"] = L;
  bool adversarial = cfg.get("adversarial", "false") == "true";
  if (adversarial) {
    // plant the dependence {t_1, t_1^2} and require certification to fail
    std::vector<GroupElement> planted{
        inst.t_elements[0], inst.product.multiply(inst.t_elements[0], inst.t_elements[0])};
    try {
      certify_claimed_basis(inst.product, planted, L);
      throw InvariantViolated("planted-dependence instance unexpectedly certified");
    } catch (const CertificationFailed& e) {
      j["adversarial"] = true;
      j["failed_as_expected"] = true;
      j["witness"] = e.witness;
      j["witness_length"] = e.witness.size();
    }
    write_summary(cfg, res, j);
    return res;
  }
  BasisCertificate cert = free_basis_certify(inst, L);
  BasisCertificate mal = malnormality_spot_check(inst, cfg.get_int("samples", 40),
                                                 cfg.get_int("sample_length", 6), cfg.seed);
  j["words_checked"] = cert.words_checked;
  j["cores_verified"] = cert.cores_verified;
  j["malnormality_samples"] = mal.malnormality_samples;
  j["malnormality_violations"] = mal.malnormality_violations;
  write_summary(cfg, res, j);
  if (mal.malnormality_violations != 0) {
    throw InvariantViolated("malnormality spot-check found a violation");
  }
  return res;
}

// ---- burnside-desk --------------------------------------------------------------

inline ExperimentResult run_burnside_desk(const ExperimentConfig& cfg) {
  ExperimentResult res;
  int rank = cfg.get_int("rank", 2);
  int exponent = cfg.get_int("exponent", 3);
  int depth = cfg.get_int("depth", 8);
  MarkedGroup G = burnside_group(static_cast<size_t>(rank), static_cast<unsigned>(exponent));
  CogrowthTable t = cogrowth_table(G, depth);
  CsvWriter csv({"k", "gamma", "gamma_rate"});
  for (int k = 0; k <= depth; ++k) {
    double rate = k == 0 ? 1.0
                         : std::exp(log_int(t.gamma[static_cast<size_t>(k)]) /
                                    static_cast<double>(k));
    csv.append_row({std::to_string(k), t.gamma[static_cast<size_t>(k)].get_str(),
                    fmt_double(rate)});
  }
  csv.write(out_file(cfg, "burnside_cogrowth.csv", res));
  json j;
  j["experiment"] = cfg.name;
  j["rank"] = rank;
  j["exponent"] = exponent;
  j["order"] = G.engine().order();
  j["exponent_law_verified"] = true;  // construction re-enumerates until it holds
  j["girth"] = t.girth ? json(*t.girth) : json(nullptr);
  j["gamma_at_" + std::to_string(depth)] = t.gamma[static_cast<size_t>(depth)].get_str();
  write_summary(cfg, res, j);
  return res;
}

// ---- sequence-report --------------------------------------------------------------

inline ExperimentResult run_sequence_report(const ExperimentConfig& cfg) {
  ExperimentResult res;
  std::vector<MarkedGroup> groups;
  auto files = cfg.get_multi("group");
  if (!files.empty()) {
    for (const std::string& f : files) groups.push_back(load_group(f));
  } else {
    std::string family = cfg.get("family", "free");
    if (family != "free") throw ConfigError("sequence-report: family must be \"free\" or give --group files");
    for (int i : parse_range(cfg.get("ranks", "2..5"))) {
      groups.push_back(make_free_group(static_cast<size_t>(i)));
    }
  }
  int depth = cfg.get_int("depth", 40);
  SequenceReport rep = infinitesimal_report(groups, depth, cfg.get_int("cogrowth_depth", 0),
                                            cfg.get_int("cheeger_param", 4));
  json rows = json::array();
  for (const IndexReport& r : rep.rows) {
    json row;
    row["i"] = r.index;
    row["rank"] = r.rank;
    row["ax_bound"] = fmt_double(r.ax_bound);
    row["rho_bound"] = fmt_double(r.rho_bound);
    if (r.cheeger_ratio) {
      row["cheeger_ratio"] = fmt_double(*r.cheeger_ratio);
    } else {
      row["cheeger_ratio"] = nullptr;
    }
    row["omega_ratio"] = fmt_double(r.omega_ratio);
    row["girth"] = r.girth_text;
    json flags;
    flags["ax"] = r.ax_mode;
    flags["rho"] = r.rho_mode;
    flags["cheeger"] = r.cheeger_mode;
    row["mode_flags"] = flags;
    if (!r.error.empty()) row["error"] = r.error;
    rows.push_back(row);
  }
  json j;
  j["experiment"] = cfg.name;
  j["rows"] = rows;
  j["ax_monotone_decreasing"] = rep.ax_monotone_decreasing;
  j["flagged_not_infinitesimal"] = rep.flagged_not_infinitesimal;
  write_summary(cfg, res, j);
  return res;
}

}  // namespace detail

inline ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  if (cfg.name == "free-norms") return detail::run_free_norms(cfg);
  if (cfg.name == "grigorchuk") return detail::run_grigorchuk(cfg);
  if (cfg.name == "cheeger") return detail::run_cheeger(cfg);
  if (cfg.name == "hn-limit") return detail::run_hn_limit(cfg);
  if (cfg.name == "powers-average") return detail::run_powers_average(cfg);
  if (cfg.name == "basis-certify") return detail::run_basis_certify(cfg);
  if (cfg.name == "burnside-desk") return detail::run_burnside_desk(cfg);
  if (cfg.name == "sequence-report") return detail::run_sequence_report(cfg);
  throw ConfigError("unknown experiment \"" + cfg.name +
                    "\" (free-norms | grigorchuk | cheeger | hn-limit | powers-average | "
                    "basis-certify | burnside-desk | sequence-report)");
}

/// Line-oriented experiment config files: the same key = value syntax as
/// group files, with repeated keys collected.
inline ExperimentConfig read_experiment_config(const std::string& path) {
  GroupFile gf = read_group_file(path);
  ExperimentConfig cfg;
  for (const auto& [k, v] : gf.entries) {
    if (k == "experiment") {
      cfg.name = v;
    } else if (k == "out") {
      cfg.out_dir = v;
    } else if (k == "format") {
      cfg.format = v;
    } else if (k == "threads") {
      cfg.threads = std::stoi(v);
    } else if (k == "seed") {
      cfg.seed = std::stoull(v);
    } else if (k == "group" || k == "y" || k == "a") {
      cfg.multi[k].push_back(v);
    } else {
      cfg.scalar[k] = v;
    }
  }
  if (cfg.name.empty()) throw ConfigError(path + ": missing \"experiment =\" line");
  return cfg;
}

}  // namespace marked
