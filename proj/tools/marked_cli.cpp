#include <clocale>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "marked/marked.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitResource = 3;
constexpr int kExitInvariant = 4;

int run(const marked::ExperimentConfig& cfg) {
  marked::ExperimentResult res = marked::run_experiment(cfg);
  for (const std::string& f : res.files) std::cout << "wrote " << f << "\n";
  std::cout << res.summary << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  std::setlocale(LC_ALL, "C");
  CLI::App app{"marked: exact word-problem, group-algebra and spectral experiments "
               "over marked groups"};
  app.require_subcommand(1);

  auto* runcmd = app.add_subcommand("run", "run a named experiment deterministically");
  std::string name;
  std::string config_file;
  std::string out_dir = ".";
  std::string format = "csv";
  int threads = 1;
  std::uint64_t seed = 20240501;
  std::vector<std::string> groups, ys, as;
  runcmd->add_option("experiment", name,
                     "free-norms | grigorchuk | cheeger | hn-limit | powers-average | "
                     "basis-certify | burnside-desk | sequence-report");
  runcmd->add_option("--config", config_file, "experiment config file (key = value lines)");
  runcmd->add_option("--group", groups, "group definition file (repeatable)");
  runcmd->add_option("--out", out_dir, "output directory");
  runcmd->add_option("--format", format, "summary format: csv | json");
  runcmd->add_option("--threads", threads, "worker threads (outputs are identical regardless)");
  runcmd->add_option("--seed", seed, "seed for sampled checks");

  // free-form numeric/string parameters
  std::vector<std::pair<std::string, std::string>> kv;
  for (const char* key : {"depth", "ranks", "n", "mode", "radius", "size_cap", "length_cap",
                          "samples", "sample_length", "rank", "exponent", "g", "u", "family",
                          "cogrowth_depth", "cheeger_param", "adversarial", "max_cosets"}) {
    runcmd->add_option_function<std::string>(
        std::string("--") + key,
        [&kv, key](const std::string& v) { kv.emplace_back(key, v); },
        "experiment parameter");
  }
  runcmd->add_option("--y", ys, "conjugating element (powers-average; repeatable)");
  runcmd->add_option("--a", as, "base-group element of A (basis-certify; repeatable)");

  auto* normcmd = app.add_subcommand(
      "norm", "trace-power lower bounds for the operator norm of a group-algebra element");
  std::string norm_group, norm_element, norm_out;
  int norm_depth = 12;
  normcmd->add_option("--group", norm_group, "group definition file")->required();
  normcmd->add_option("--element", norm_element,
                      "element expression, e.g. \"1 + 2*(x y^-1) - (x)\"")
      ->required();
  normcmd->add_option("--depth", norm_depth, "trace depth");
  normcmd->add_option("--out", norm_out, "write the CSV here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (normcmd->parsed()) {
      marked::MarkedGroup G = marked::load_group(norm_group);
      marked::AlgebraElement a = marked::parse_element(G, norm_element);
      marked::SpectralEstimate est = marked::operator_norm_bounds(a, norm_depth);
      marked::CsvWriter csv({"n", "trace_numerator", "trace_denominator", "bound",
                             "extrapolated"});
      for (size_t n = 1; n <= est.traces.size(); ++n) {
        csv.append_row({std::to_string(n), est.traces[n - 1].get_num().get_str(),
                        est.traces[n - 1].get_den().get_str(),
                        marked::fmt_double(est.bounds[n - 1]),
                        marked::fmt_double(est.extrapolated)});
      }
      if (norm_out.empty()) {
        std::cout << csv.str();
      } else {
        csv.write(norm_out);
        std::cout << "wrote " << norm_out << "\n";
      }
      return 0;
    }
    marked::ExperimentConfig cfg;
    if (!config_file.empty()) cfg = marked::read_experiment_config(config_file);
    if (!name.empty()) cfg.name = name;
    if (cfg.name.empty()) throw marked::ConfigError("no experiment named (argument or config)");
    for (const auto& [k, v] : kv) cfg.scalar[k] = v;
    for (const std::string& g : groups) cfg.multi["group"].push_back(g);
    for (const std::string& y : ys) cfg.multi["y"].push_back(y);
    for (const std::string& a : as) cfg.multi["a"].push_back(a);
    if (runcmd->count("--out")) cfg.out_dir = out_dir;
    if (cfg.out_dir.empty()) cfg.out_dir = ".";
    if (runcmd->count("--format")) cfg.format = format;
    if (cfg.format != "csv" && cfg.format != "json") {
      throw marked::ConfigError("--format must be csv or json");
    }
    if (runcmd->count("--threads")) cfg.threads = threads;
    if (runcmd->count("--seed")) cfg.seed = seed;
    return run(cfg);
  } catch (const marked::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const marked::NotApplicable& e) {
    std::cerr << "not applicable: " << e.what() << "\n";
    return kExitConfig;
  } catch (const marked::ResourceExceeded& e) {
    std::cerr << "resource exceeded: " << e.what() << "\n";
    return kExitResource;
  } catch (const marked::CertificationFailed& e) {
    std::cerr << "certification failed: " << e.what() << "\n";
    return kExitInvariant;
  } catch (const marked::InvalidHomomorphism& e) {
    std::cerr << "invalid homomorphism: " << e.what() << "\n";
    return kExitInvariant;
  } catch (const marked::InvariantViolated& e) {
    std::cerr << "invariant violated: " << e.what() << "\n";
    return kExitInvariant;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvariant;
  }
}
