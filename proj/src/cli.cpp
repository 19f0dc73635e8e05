#include "finadv/cli.hpp"

#include <charconv>
#include <fstream>
#include <iterator>
#include <map>
#include <memory>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>
#include <openssl/evp.h>

#include "finadv/dataset.hpp"
#include "finadv/errors.hpp"
#include "finadv/harness.hpp"
#include "finadv/results_io.hpp"

namespace finadv {

using nlohmann::json;

namespace {

std::string fmt(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

template <typename T, typename F>
std::string join(const std::vector<T>& xs, F&& f) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? "," : "") + f(xs[i]);
  return out;
}

/// Reads either a key=value file or the "config" object of a run manifest.
class RunConfig : public CLI::ConfigBase {
 public:
  std::vector<CLI::ConfigItem> from_config(std::istream& in) const override {
    const std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first == std::string::npos || text[first] != '{') {
      std::istringstream kv(text);
      return CLI::ConfigBase::from_config(kv);
    }
    json j;
    try {
      j = json::parse(text);
    } catch (const json::exception& e) {
      throw CLI::ConversionError(std::string("manifest is not valid JSON: ") + e.what());
    }
    const json& cfg = j.contains("config") ? j.at("config") : j;
    std::vector<CLI::ConfigItem> items;
    for (const auto& [key, value] : cfg.items()) {
      CLI::ConfigItem item;
      item.name = key;
      if (value.is_array()) {
        for (const auto& v : value) item.inputs.push_back(v.is_string() ? v.get<std::string>() : v.dump());
      } else {
        item.inputs.push_back(value.is_string() ? value.get<std::string>() : value.dump());
      }
      items.push_back(std::move(item));
    }
    return items;
  }
};

std::filesystem::path sibling(const std::string& out, const std::string& suffix) {
  std::filesystem::path p(out);
  return p.parent_path() / (p.stem().string() + suffix);
}

void write_manifest(const std::filesystem::path& path, const std::string& command,
                    const std::map<std::string, std::string>& config, const json& seeds,
                    const std::vector<std::filesystem::path>& inputs,
                    const std::vector<std::filesystem::path>& artifacts) {
  json m;
  m["tool"] = kToolName;
  m["version"] = kToolVersion;
  m["command"] = command;
  m["config"] = config;
  m["seeds"] = seeds;
  m["inputs"] = json::array();
  for (const auto& p : inputs) m["inputs"].push_back({{"path", p.string()}, {"sha256", sha256_file(p)}});
  m["artifacts"] = json::array();
  for (const auto& p : artifacts) {
    m["artifacts"].push_back({{"path", p.string()}, {"sha256", sha256_file(p)}});
  }
  write_file_atomic(path, m.dump(2) + "\n");
}

struct AttackFlags {
  std::string data;
  int iterations = 500;
  double step_size = 0.01;
  double c = 1.0;
  std::uint64_t seed = 0;
  int jobs = 1;
  std::string out;
  std::string pairs;
  std::string manifest;
};

void add_attack_flags(CLI::App* cmd, AttackFlags& f, const std::string& default_out) {
  cmd->add_option("--data", f.data, "Panel CSV (required)");
  cmd->add_option("--iterations", f.iterations, "Attack iterations")->check(CLI::NonNegativeNumber);
  cmd->add_option("--step-size", f.step_size, "Normalized step length");
  cmd->add_option("--c", f.c, "Softmax exaggeration constant");
  cmd->add_option("--seed", f.seed, "Seed for randomized starts");
  cmd->add_option("--jobs", f.jobs, "Parallel company runs")->check(CLI::PositiveNumber);
  f.out = default_out;
  cmd->add_option("--out", f.out, "Results file (one JSON record per line)");
  cmd->add_option("--pairs", f.pairs, "RPD pair CSV (default: <out stem>.pairs.csv)");
  cmd->add_option("--manifest", f.manifest, "Run manifest (default: <out stem>.manifest.json)");
}

void resolve_paths(AttackFlags& f) {
  if (f.pairs.empty()) f.pairs = sibling(f.out, ".pairs.csv").string();
  if (f.manifest.empty()) f.manifest = sibling(f.out, ".manifest.json").string();
}

std::map<std::string, std::string> attack_config(const AttackFlags& f) {
  return {{"data", f.data},           {"iterations", std::to_string(f.iterations)},
          {"step-size", fmt(f.step_size)}, {"c", fmt(f.c)},
          {"seed", std::to_string(f.seed)}, {"jobs", std::to_string(f.jobs)},
          {"out", f.out},             {"pairs", f.pairs},
          {"manifest", f.manifest}};
}

SweepSpec sweep_spec(const AttackFlags& f) {
  SweepSpec spec;
  spec.attack.max_iterations = f.iterations;
  spec.attack.step_size = f.step_size;
  spec.attack.exaggeration_c = f.c;
  spec.attack.seed = f.seed;
  spec.jobs = f.jobs;
  return spec;
}

std::vector<Method> parse_methods(const std::vector<std::string>& names) {
  std::vector<Method> out;
  for (const auto& n : names) {
    auto m = parse_method(n);
    if (!m) throw CLI::ValidationError("--methods", "unknown method '" + n + "'");
    out.push_back(*m);
  }
  if (out.empty()) throw CLI::ValidationError("--methods", "at least one method is required");
  return out;
}

void check_epsilon(double e) {
  if (!(e > 0.0 && e <= 1.0)) {
    throw CLI::ValidationError("--epsilon", "budget must be in (0, 1], got " + fmt(e));
  }
}

int finish_sweep(const Dataset& data, const SweepSpec& spec, const AttackFlags& f,
                 const std::string& command, std::map<std::string, std::string> config,
                 std::ostream& out) {
  const auto result = run_sweep(data, spec);
  write_results(result.records, f.out, std::filesystem::path(f.pairs));
  print_summary(out, result.rows);
  config.erase("config");
  write_manifest(f.manifest, command, config, json{{"attack", f.seed}}, {f.data}, {f.out, f.pairs});
  return kExitOk;
}

void add_config_option(CLI::App* cmd) {
  cmd->add_option("--config", "key=value file or run manifest; flags win");
}

// CLI11 only reads config files for the top-level app, so subcommands merge
// theirs here: every key fills the matching option unless a flag set it.
void merge_config(CLI::App* cmd) {
  const auto* opt = cmd->get_option_no_throw("--config");
  if (opt == nullptr || opt->count() == 0) return;
  const auto path = opt->as<std::string>();
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config " + path);
  for (const auto& item : RunConfig{}.from_config(in)) {
    const std::string name = item.fullname();
    if (name == "config") continue;
    auto* target = cmd->get_option_no_throw("--" + name);
    if (target == nullptr) throw CLI::ValidationError("--config", "unknown key '" + name + "' in " + path);
    if (target->count() > 0) continue;
    for (const auto& v : item.inputs) target->add_result(v);
    target->run_callback();
  }
}

void require_flag(const std::string& value, const std::string& flag) {
  if (value.empty()) throw CLI::ValidationError(flag, flag + " is required");
}

}  // namespace

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string() + " for hashing");
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) {
    throw IoError("SHA-256 unavailable");
  }
  char buf[1 << 15];
  while (in) {
    in.read(buf, sizeof buf);
    if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buf, static_cast<std::size_t>(in.gcount()));
  }
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), md, &len);
  static const char* hex = "0123456789abcdef";
  std::string s;
  for (unsigned int i = 0; i < len; ++i) {
    s.push_back(hex[md[i] >> 4]);
    s.push_back(hex[md[i] & 15]);
  }
  return s;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Constrained multi-objective attacks on financial-statement scores", kToolName};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  // synth
  SynthParams synth;
  std::string synth_out, synth_manifest;
  auto* cmd_synth = app.add_subcommand("synth", "Generate a synthetic panel CSV");
  add_config_option(cmd_synth);
  cmd_synth->add_option("--companies", synth.n_companies, "Number of companies")->check(CLI::PositiveNumber);
  cmd_synth->add_option("--seed", synth.seed, "Generator seed");
  cmd_synth->add_option("--years-mean", synth.years_mean, "Mean years per company");
  cmd_synth->add_option("--distress-fraction", synth.distress_fraction, "Share of distressed firms");
  cmd_synth->add_option("--out", synth_out, "Output CSV (required)");
  cmd_synth->add_option("--manifest", synth_manifest, "Run manifest (default: <out stem>.manifest.json)");

  // attack
  AttackFlags attack;
  std::string method_name = "mvmo";
  double epsilon = 0.20;
  auto* cmd_attack = app.add_subcommand("attack", "Run one method at one budget over a dataset");
  add_config_option(cmd_attack);
  add_attack_flags(cmd_attack, attack, "results.jsonl");
  cmd_attack->add_option("--method", method_name, "mvmo, pgd_m, pgd_eps, pgd_avg or mvmo_ms");
  cmd_attack->add_option("--epsilon", epsilon, "Relative budget in (0, 1]");

  // sweep
  AttackFlags sweep;
  std::vector<std::string> methods;
  for (Method m : all_methods()) methods.emplace_back(method_key(m));
  std::vector<double> epsilons = default_epsilons();
  auto* cmd_sweep = app.add_subcommand("sweep", "Run every method at every budget");
  add_config_option(cmd_sweep);
  add_attack_flags(cmd_sweep, sweep, "sweep.jsonl");
  cmd_sweep->add_option("--methods", methods, "Comma-separated methods")->delimiter(',');
  cmd_sweep->add_option("--epsilons", epsilons, "Comma-separated budgets")->delimiter(',');

  // validate
  std::string validate_data;
  auto* cmd_validate = app.add_subcommand("validate", "Check hierarchy consistency of a panel CSV");
  cmd_validate->add_option("--data", validate_data, "Panel CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    for (auto* cmd : {cmd_synth, cmd_attack, cmd_sweep}) {
      if (*cmd) merge_config(cmd);
    }

    if (*cmd_synth) {
      require_flag(synth_out, "--out");
      if (synth_manifest.empty()) synth_manifest = sibling(synth_out, ".manifest.json").string();
      const Dataset data = generate_synthetic(synth);
      std::ostringstream csv;
      write_dataset_csv(data, csv);
      write_file_atomic(synth_out, csv.str());
      write_manifest(synth_manifest, "synth",
                     {{"companies", std::to_string(synth.n_companies)},
                      {"seed", std::to_string(synth.seed)},
                      {"years-mean", fmt(synth.years_mean)},
                      {"distress-fraction", fmt(synth.distress_fraction)},
                      {"out", synth_out},
                      {"manifest", synth_manifest}},
                     json{{"synth", synth.seed}}, {}, {synth_out});
      out << "wrote " << data.companies.size() << " companies to " << synth_out << "\n";
      return kExitOk;
    }

    if (*cmd_attack) {
      require_flag(attack.data, "--data");
      check_epsilon(epsilon);
      const Method m = parse_methods({method_name}).front();
      resolve_paths(attack);
      SweepSpec spec = sweep_spec(attack);
      spec.methods = {m};
      spec.epsilons = {epsilon};
      spec.validate();
      const Dataset data = ingest_csv(attack.data);
      auto cfg = attack_config(attack);
      cfg["method"] = std::string(method_key(m));
      cfg["epsilon"] = fmt(epsilon);
      return finish_sweep(data, spec, attack, "attack", cfg, out);
    }

    if (*cmd_sweep) {
      require_flag(sweep.data, "--data");
      for (double e : epsilons) check_epsilon(e);
      resolve_paths(sweep);
      SweepSpec spec = sweep_spec(sweep);
      spec.methods = parse_methods(methods);
      spec.epsilons = epsilons;
      spec.validate();
      const Dataset data = ingest_csv(sweep.data);
      auto cfg = attack_config(sweep);
      cfg["methods"] = join(spec.methods, [](Method x) { return std::string(method_key(x)); });
      cfg["epsilons"] = join(spec.epsilons, [](double x) { return fmt(x); });
      return finish_sweep(data, spec, sweep, "sweep", cfg, out);
    }

    if (*cmd_validate) {
      const Dataset data = ingest_csv(validate_data);
      std::size_t bad = 0;
      for (const auto& panel : data.companies) {
        const auto report = validate_panel(panel);
        for (const auto& v : report.violations) {
          out << panel.company_id() << ' ' << v.year << ' ' << code(v.parent) << " off by "
              << fmt(v.magnitude) << "\n";
        }
        bad += report.ok() ? 0 : 1;
      }
      for (const auto& d : data.drops) {
        out << "dropped " << d.company_id;
        if (d.year != 0) out << ' ' << d.year;
        out << ": " << d.reason << "\n";
      }
      out << data.companies.size() << " companies, " << bad << " with violations, "
          << data.drops.size() << " drops\n";
      return bad == 0 ? kExitOk : kExitViolations;
    }
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n";
    return kExitUsage;
  } catch (const InvalidParams& e) {
    err << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << e.what() << "\n";
    return kExitUsage;
  } catch (const DataError& e) {
    err << e.what() << "\n";
    return kExitIo;
  } catch (const std::filesystem::filesystem_error& e) {
    err << e.what() << "\n";
    return kExitIo;
  } catch (const Error& e) {
    err << e.what() << "\n";
    return kExitIo;
  }
  return kExitUsage;
}

}  // namespace finadv
