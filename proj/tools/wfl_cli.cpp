// Command-line front end. Everything numerical goes through the C API.
#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "wfl/wfl.h"

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitViolation = 1;
constexpr int kExitUsage = 2;
constexpr int kExitInternal = 3;

struct CliError {
  int code;
  std::string message;
};

void check(wfl_status s, const std::string& context) {
  if (s == WFL_OK) return;
  const int code = s == WFL_ERR_INTERNAL ? kExitInternal : kExitUsage;
  throw CliError{code, context + ": " + wfl_last_error()};
}

struct StrDeleter {
  void operator()(char* s) const { wfl_string_free(s); }
};
struct SysDeleter {
  void operator()(wfl_system* s) const { wfl_system_free(s); }
};
struct SigDeleter {
  void operator()(wfl_signal* s) const { wfl_signal_free(s); }
};
using CStr = std::unique_ptr<char, StrDeleter>;
using SystemPtr = std::unique_ptr<wfl_system, SysDeleter>;
using SignalPtr = std::unique_ptr<wfl_signal, SigDeleter>;

std::string take(char* s) { return CStr(s).get(); }

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CliError{kExitUsage, "cannot open '" + path + "'"};
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CliError{kExitInternal, "cannot write '" + path.string() + "'"};
  out << text;
}

struct Globals {
  std::optional<std::uint64_t> seed;
  std::string config;
  std::string out;
  std::optional<double> tol_rank;
  std::optional<double> tol_psd;
  std::string format = "json";
  bool format_explicit = false;
};

// Where a command's system and data come from: files, or seeded draws.
struct Source {
  std::string system_file;
  std::string input_file;
  std::vector<double> x0;
  int64_t n = 2, m = 1, p = 1;
  int64_t length = 100;
  int64_t relative_degree = 0;
};

void add_source_options(CLI::App* cmd, Source& s, bool with_input = true) {
  cmd->add_option("--system", s.system_file, "System JSON {n,m,p,A,B,C,D}");
  cmd->add_option("--n", s.n, "State dimension for a generated system")->check(CLI::NonNegativeNumber);
  cmd->add_option("--m", s.m, "Input dimension for a generated system")->check(CLI::PositiveNumber);
  cmd->add_option("--p", s.p, "Output dimension for a generated system")->check(CLI::PositiveNumber);
  cmd->add_option("--relative-degree", s.relative_degree,
                  "Relative degree of a generated system (0 keeps D dense)")
      ->check(CLI::NonNegativeNumber);
  if (with_input) {
    cmd->add_option("--input", s.input_file, "Input signal CSV (k,v0,v1,...)");
    cmd->add_option("--length", s.length, "Length of a generated input")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--x0", s.x0, "Initial state, comma separated")->delimiter(',');
  }
}

std::uint64_t seed_of(const Globals& g) { return g.seed.value_or(0); }

SystemPtr load_system(const Source& s, const Globals& g) {
  wfl_system* sys = nullptr;
  if (!s.system_file.empty()) {
    check(wfl_system_from_json(read_text(s.system_file).c_str(), &sys), s.system_file);
  } else {
    check(wfl_generate_system(s.n, s.m, s.p, 0.95, 1e-3, 1, s.relative_degree, seed_of(g), &sys),
          "generate system");
  }
  return SystemPtr(sys);
}

SignalPtr load_input(const Source& s, const Globals& g, int64_t m) {
  wfl_signal* u = nullptr;
  if (!s.input_file.empty()) {
    check(wfl_signal_from_csv(read_text(s.input_file).c_str(), &u), s.input_file);
    int64_t dim = 0;
    check(wfl_signal_dims(u, &dim, nullptr), "input");
    if (m > 0 && dim != m) {
      wfl_signal_free(u);
      throw CliError{kExitUsage, "input has dimension " + std::to_string(dim) +
                                     " but the system has " + std::to_string(m) + " inputs"};
    }
  } else {
    check(wfl_generate_pe_input(m, s.length, 1, nullptr, seed_of(g) + 1, &u, nullptr),
          "generate input");
  }
  return SignalPtr(u);
}

const double* initial_state(const Source& s, const wfl_system* sys) {
  if (s.x0.empty()) return nullptr;
  int64_t n = 0;
  check(wfl_system_dims(sys, &n, nullptr, nullptr), "system");
  if (static_cast<int64_t>(s.x0.size()) != n) {
    throw CliError{kExitUsage, "--x0 has " + std::to_string(s.x0.size()) + " entries, expected " +
                                   std::to_string(n)};
  }
  return s.x0.data();
}

double tol_rank(const Globals& g) { return g.tol_rank.value_or(1e-10); }
double tol_psd(const Globals& g) { return g.tol_psd.value_or(1e-9); }

// Writes to <out>/<name> when --out is set, else to stdout.
void emit(const Globals& g, const std::string& name, const std::string& text) {
  if (g.out.empty()) {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << '\n';
    return;
  }
  fs::create_directories(g.out);
  write_text(fs::path(g.out) / name, text);
}

std::vector<double> scaled_identity(int64_t size, double k) {
  std::vector<double> K(static_cast<std::size_t>(size * size), 0.0);
  for (int64_t i = 0; i < size; ++i) K[static_cast<std::size_t>(i * size + i)] = k;
  return K;
}

std::vector<double> matrix_from_json_file(const std::string& path, int64_t rows, int64_t cols) {
  const Json j = Json::parse(read_text(path));
  if (!j.is_array() || static_cast<int64_t>(j.size()) != rows) {
    throw CliError{kExitUsage, path + ": expected " + std::to_string(rows) + " rows"};
  }
  std::vector<double> out;
  for (const auto& row : j) {
    if (!row.is_array() || static_cast<int64_t>(row.size()) != cols) {
      throw CliError{kExitUsage, path + ": expected " + std::to_string(cols) + " columns"};
    }
    for (const auto& v : row) out.push_back(v.get<double>());
  }
  return out;
}

// ---- subcommands ----

int cmd_simulate(const Globals& g, const Source& s) {
  const SystemPtr sys = load_system(s, g);
  int64_t m = 0;
  check(wfl_system_dims(sys.get(), nullptr, &m, nullptr), "system");
  const SignalPtr u = load_input(s, g, m);
  wfl_signal* x = nullptr;
  wfl_signal* y = nullptr;
  check(wfl_simulate(sys.get(), initial_state(s, sys.get()), u.get(), &x, &y), "simulate");
  const SignalPtr xs(x), ys(y);
  char* text = nullptr;
  check(wfl_signal_to_csv(ys.get(), &text), "output");
  const std::string y_csv = take(text);
  if (g.out.empty()) {
    std::cout << y_csv;
    return kExitOk;
  }
  check(wfl_signal_to_csv(xs.get(), &text), "state");
  emit(g, "x.csv", take(text));
  emit(g, "y.csv", y_csv);
  check(wfl_signal_to_csv(u.get(), &text), "input");
  emit(g, "u.csv", take(text));
  check(wfl_system_to_json(sys.get(), &text), "system");
  emit(g, "system.json", take(text));
  return kExitOk;
}

int cmd_hankel(const Globals& g, const Source& s, int64_t depth, bool gram) {
  const SignalPtr u = load_input(s, g, s.input_file.empty() ? s.m : 0);
  char* text = nullptr;
  check(wfl_hankel_csv(u.get(), depth, gram ? 1 : 0, &text), "hankel");
  emit(g, gram ? "gram.csv" : "hankel.csv", take(text));
  return kExitOk;
}

int cmd_pe_check(const Globals& g, const Source& s, int64_t depth, std::optional<double> k) {
  const SignalPtr u = load_input(s, g, s.input_file.empty() ? s.m : 0);
  int64_t dim = 0;
  check(wfl_signal_dims(u.get(), &dim, nullptr), "input");
  char* text = nullptr;
  bool holds = false;
  Json j;
  if (k) {
    const std::vector<double> K = scaled_identity(dim * depth, *k);
    check(wfl_kpe_check(u.get(), depth, K.data(), tol_psd(g), &text), "kpe-check");
    j = Json::parse(take(text));
    holds = j["holds"].get<bool>();
  } else {
    check(wfl_pe_check(u.get(), depth, tol_rank(g), tol_psd(g), &text), "pe-check");
    j = Json::parse(take(text));
    holds = j["pe"].get<bool>();
  }
  if (g.format == "csv") {
    const Json& cert = k ? j : j["certificate"];
    std::ostringstream os;
    os << "depth,holds,margin,tol\n"
       << depth << "," << (holds ? "true" : "false") << "," << cert["margin"].dump() << ","
       << cert["tol"].dump() << "\n";
    emit(g, "pe_check.csv", os.str());
  } else {
    emit(g, "pe_check.json", j.dump(2));
  }
  return holds ? kExitOk : kExitViolation;
}

int cmd_bounds(const Globals& g, const Source& s, const std::string& which, int64_t depth,
               int64_t claimed_r, double eps, double ku, bool full) {
  const SystemPtr sys = load_system(s, g);
  int64_t n = 0, m = 0;
  check(wfl_system_dims(sys.get(), &n, &m, nullptr), "system");
  const SignalPtr u = load_input(s, g, m);

  wfl_bound_options opts;
  wfl_bound_options_default(&opts);
  opts.rank_rtol = tol_rank(g);
  opts.psd_tol = tol_psd(g);
  opts.depth = depth;
  opts.claimed_r = claimed_r;
  opts.eps = eps;
  opts.seed = seed_of(g) + 2;
  std::vector<double> K;
  if (ku > 0.0) {
    if (which == "all") {
      throw CliError{kExitUsage, "--ku needs a single --check (bound sizes differ per check)"};
    }
    const bool state_input = which == "state-input-excitation" || which == "thm3" ||
                             which == "robust-state-input-excitation" || which == "robust";
    const bool filtered = which == "filtered-input-excitation" || which == "thm1";
    int64_t p = 0;
    check(wfl_system_dims(sys.get(), nullptr, nullptr, &p), "system");
    K = scaled_identity(filtered ? p : m * ((state_input ? depth : 1) + n), ku);
    opts.K_u = K.data();
  }

  char* text = nullptr;
  const double* x0 = initial_state(s, sys.get());
  check(wfl_bound_report(sys.get(), x0, u.get(), which.c_str(), &opts, full ? 1 : 0, &text),
        "bounds");
  const Json j = Json::parse(take(text));
  bool failed = false;
  auto scan = [&](const Json& r) { failed = failed || r["verdict"] == "fails"; };
  if (j.is_array()) {
    for (const auto& r : j) scan(r);
  } else {
    scan(j);
  }
  if (g.format == "csv") {
    check(wfl_bound_report_csv(sys.get(), x0, u.get(), which.c_str(), &opts, &text), "bounds");
    emit(g, "bounds.csv", take(text));
  } else {
    emit(g, "bounds.json", j.dump(2));
  }
  return failed ? kExitViolation : kExitOk;
}

int cmd_fundamental(const Globals& g, const Source& s, int64_t depth, const std::string& target) {
  const SystemPtr sys = load_system(s, g);
  int64_t m = 0;
  check(wfl_system_dims(sys.get(), nullptr, &m, nullptr), "system");
  const SignalPtr u = load_input(s, g, m);
  const double* x0 = initial_state(s, sys.get());
  char* text = nullptr;
  check(wfl_fundamental_report(sys.get(), x0, u.get(), depth, tol_rank(g), &text), "fundamental");
  Json j = Json::parse(take(text));
  if (!target.empty()) {
    wfl_signal* y = nullptr;
    check(wfl_simulate(sys.get(), x0, u.get(), nullptr, &y), "simulate");
    const SignalPtr ys(y);
    wfl_signal* t = nullptr;
    check(wfl_signal_from_csv(read_text(target).c_str(), &t), target);
    const SignalPtr ts(t);
    check(wfl_parametrize(u.get(), ys.get(), ts.get(), &text), "parametrize");
    j["parametrization"] = Json::parse(take(text));
  }
  if (g.format == "csv") {
    std::ostringstream os;
    os << "depth,controllable,rank,required,rank_condition,image_equal,rank_implies_image\n"
       << depth << "," << j["controllable"].dump() << "," << j["rank_condition"]["rank"].dump()
       << "," << j["rank_condition"]["required"].dump() << ","
       << j["rank_condition"]["holds"].dump() << "," << j["image_equality"]["equal"].dump()
       << "," << j["rank_implies_image"].dump() << "\n";
    emit(g, "fundamental.csv", os.str());
  } else {
    emit(g, "fundamental.json", j.dump(2));
  }
  return j["rank_implies_image"].get<bool>() ? kExitOk : kExitViolation;
}

int cmd_counterexample(const Globals& g, int64_t length) {
  char* json = nullptr;
  char* summary = nullptr;
  check(wfl_counterexample(length, nullptr, 0, &json, &summary), "counterexample");
  const Json j = Json::parse(take(json));
  const std::string text = take(summary);
  if (!g.out.empty()) {
    emit(g, "counterexample.json", j.dump(2));
    emit(g, "counterexample.txt", text);
  }
  std::cout << (g.format_explicit && g.format == "json" ? j.dump(2) + "\n" : text);
  return j["verdict"] == "Claim 1 falsified" ? kExitOk : kExitViolation;
}

int cmd_sweep(const Globals& g, std::optional<unsigned> workers, std::vector<std::string> which,
              std::optional<int64_t> trials) {
  Json config = Json::object();
  if (!g.config.empty()) {
    try {
      config = Json::parse(read_text(g.config));
    } catch (const Json::exception& e) {
      throw CliError{kExitUsage, g.config + ": " + e.what()};
    }
  }
  if (!config.is_object()) throw CliError{kExitUsage, "config must be a JSON object"};
  if (g.seed) config["seed"] = *g.seed;
  if (g.tol_rank) config["tol"]["rank"] = *g.tol_rank;
  if (g.tol_psd) config["tol"]["psd"] = *g.tol_psd;
  if (workers) config["workers"] = *workers;
  if (trials) config["trials"] = *trials;
  if (!which.empty()) config["which"] = which;
  if (!config.contains("which")) {
    config["which"] = {"io-representation",  "m-factorizations",       "filtered-input-excitation",
                       "output-excitation",  "output-directional",     "input-directional",
                       "relaxed-excitation", "state-input-excitation", "rank-implies-image"};
  }

  char* text = nullptr;
  int exit_code = 0;
  check(wfl_sweep(config.dump().c_str(), g.format.c_str(), &text, &exit_code), "sweep");
  const Json result = Json::parse(take(text));

  const fs::path out = g.out.empty() ? fs::path("sweep_out") : fs::path(g.out);
  fs::create_directories(out);
  const auto& trials_out = result["trials"];
  for (std::size_t i = 0; i < trials_out.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "trial_%05zu", i);
    if (g.format == "csv") {
      write_text(out / (std::string(name) + ".csv"), trials_out[i].get<std::string>());
    } else {
      write_text(out / (std::string(name) + ".json"), trials_out[i].dump(2) + "\n");
    }
  }
  write_text(out / "summary.json", result["summary"].dump(2) + "\n");
  if (g.format == "csv") write_text(out / "summary.csv", result["summary_csv"].get<std::string>());

  const Json& total = result["summary"]["total"];
  std::cout << "trials " << trials_out.size() << ": holds " << total["holds"] << ", fails "
            << total["fails"] << ", inapplicable " << total["inapplicable"] << "\n";
  for (const auto& [name, c] : result["summary"]["per_check"].items()) {
    std::cout << "  " << name << ": " << c["holds"] << "/" << c["fails"] << "/"
              << c["inapplicable"] << "\n";
  }
  std::cout << "reports written to " << out.string() << "\n";
  return exit_code;
}

int cmd_design_input(const Globals& g, const Source& s, double ky, const std::string& ky_file) {
  const SystemPtr sys = load_system(s, g);
  int64_t p = 0;
  check(wfl_system_dims(sys.get(), nullptr, nullptr, &p), "system");
  const std::vector<double> K = ky_file.empty() ? scaled_identity(p, ky)
                                                : matrix_from_json_file(ky_file, p, p);
  double k_u = 0.0;
  check(wfl_design_input_gain(sys.get(), K.data(), tol_rank(g), &k_u), "design-input");
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", k_u);
  if (g.format == "csv") {
    emit(g, "design_input.csv", std::string("k_u\n") + buf + "\n");
  } else {
    Json j;
    j["k_u"] = k_u;
    j["K_y"] = K;
    emit(g, "design_input.json", j.dump(2));
  }
  return kExitOk;
}

int cmd_structured(const Globals& g, const Source& s, int64_t depth, int64_t relaxation) {
  const SystemPtr sys = load_system(s, g);
  char* text = nullptr;
  check(wfl_structured_export(sys.get(), depth, relaxation, &text), "structured");
  const Json j = Json::parse(take(text));
  if (g.out.empty()) {
    std::cout << j.dump(2) << "\n";
    return kExitOk;
  }
  for (const auto& [name, csv] : j["csv"].items()) emit(g, name + ".csv", csv.get<std::string>());
  emit(g, "metadata.json", j["metadata"].dump(2));
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Persistence-of-excitation toolkit: Hankel checks, excitation bounds, sweeps"};
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--seed", g.seed, "Master seed for generated systems and inputs");
  app.add_option("--config", g.config, "Sweep configuration (JSON)");
  app.add_option("--out", g.out, "Output directory");
  app.add_option("--tol-rank", g.tol_rank, "Relative singular value threshold")
      ->check(CLI::PositiveNumber);
  app.add_option("--tol-psd", g.tol_psd, "Relative PSD tolerance")->check(CLI::PositiveNumber);
  app.add_option("--format", g.format, "Report format")
      ->check(CLI::IsMember({"json", "csv", "text"}));

  Source src;
  int64_t depth = 1;
  bool gram = false;
  std::optional<double> k;

  auto* sim = app.add_subcommand("simulate", "Simulate a system from x0 under an input");
  add_source_options(sim, src);

  auto* hk = app.add_subcommand("hankel", "Depth-L Hankel matrix or its Gram as CSV");
  add_source_options(hk, src);
  hk->add_option("--depth,-L", depth, "Hankel depth")->check(CLI::PositiveNumber);
  hk->add_flag("--gram", gram, "Emit H H^T instead of H");

  auto* pe = app.add_subcommand("pe-check", "Rank or quantitative excitation check");
  add_source_options(pe, src);
  pe->add_option("--depth,-L", depth, "Order")->check(CLI::PositiveNumber);
  pe->add_option("--k", k, "Check the Gram against k I instead of the rank test");

  std::string which = "all";
  int64_t claimed_r = -1;
  double eps = 0.1;
  double ku = 0.0;
  bool full = false;
  auto* bd = app.add_subcommand("bounds", "Verify excitation bounds on one trajectory");
  add_source_options(bd, src);
  bd->add_option("--check", which, "Check name or 'all'");
  bd->add_option("--depth,-L", depth, "Depth for state-input checks")->check(CLI::PositiveNumber);
  bd->add_option("--claimed-r", claimed_r, "Claimed relative degree for the relaxed check");
  bd->add_option("--eps", eps, "Model-error radius for the robust check");
  bd->add_option("--ku", ku, "Use K_u = ku I instead of 0.9 x the achieved Gram");
  bd->add_flag("--full", full, "Include lhs/rhs matrices");

  std::string target;
  auto* fd = app.add_subcommand("fundamental", "Rank condition, image equality, parametrization");
  add_source_options(fd, src);
  fd->add_option("--depth,-L", depth, "Trajectory length L")->check(CLI::PositiveNumber);
  fd->add_option("--target", target, "CSV window [u; y] of length L to parametrize");

  int64_t ce_length = 6;
  auto* ce = app.add_subcommand("counterexample", "Necessity counterexample report");
  ce->add_option("--length,-N", ce_length, "Data length")->check(CLI::Range(3, 1000000));

  std::optional<unsigned> workers;
  std::vector<std::string> sweep_which;
  std::optional<int64_t> trials;
  auto* sw = app.add_subcommand("sweep", "Seeded randomized verification sweep");
  sw->add_option("--workers,-j", workers, "Worker threads");
  sw->add_option("--which", sweep_which, "Checks to run (overrides the config)")->delimiter(',');
  sw->add_option("--trials", trials, "Trial count (overrides the config)");

  double ky = 1.0;
  std::string ky_file;
  auto* di = app.add_subcommand("design-input", "Input excitation level for a target output Gram");
  add_source_options(di, src, false);
  di->add_option("--ky", ky, "Target K_y = ky I");
  di->add_option("--ky-file", ky_file, "Target K_y as a JSON nested array");

  int64_t relaxation = -1;
  auto* st = app.add_subcommand("structured", "Export structured matrices as CSV plus metadata");
  add_source_options(st, src, false);
  st->add_option("--depth,-L", depth, "Depth for Z and T (0 to omit)");
  st->add_option("--relaxation,-r", relaxation, "Relative degree for the relaxed M");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  g.format_explicit = app.count("--format") > 0;
  try {
    if (*sim) return cmd_simulate(g, src);
    if (*hk) return cmd_hankel(g, src, depth, gram);
    if (*pe) return cmd_pe_check(g, src, depth, k);
    if (*bd) return cmd_bounds(g, src, which, depth, claimed_r, eps, ku, full);
    if (*fd) return cmd_fundamental(g, src, depth, target);
    if (*ce) return cmd_counterexample(g, ce_length);
    if (*sw) return cmd_sweep(g, workers, sweep_which, trials);
    if (*di) return cmd_design_input(g, src, ky, ky_file);
    if (*st) return cmd_structured(g, src, depth, relaxation);
  } catch (const CliError& e) {
    std::cerr << "error: " << e.message << "\n";
    return e.code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitUsage;
}
