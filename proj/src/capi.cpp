#include "wfl/wfl.h"

#include <cstdlib>
#include <cstring>
#include <exception>
#include <string>

#include "wfl/bounds.hpp"
#include "wfl/fundamental.hpp"
#include "wfl/generate.hpp"
#include "wfl/io.hpp"
#include "wfl/linalg.hpp"
#include "wfl/pe.hpp"
#include "wfl/structmat.hpp"
#include "wfl/sweep.hpp"
#include "internal.hpp"

struct wfl_system {
  wfl::LtiSystem sys;
};

struct wfl_signal {
  wfl::Signal sig;
};

namespace {

using wfl::Matrix;
using wfl::Vector;
using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

thread_local std::string g_last_error;

wfl_status fail(wfl_status code, const std::string& message) {
  g_last_error = message;
  return code;
}

// Runs `body`, translating exceptions into status codes.
template <class F>
wfl_status guarded(F&& body) {
  try {
    body();
    g_last_error.clear();
    return WFL_OK;
  } catch (const wfl::GenerationError& e) {
    return fail(WFL_ERR_GENERATION, e.what());
  } catch (const wfl::InputError& e) {
    return fail(WFL_ERR_INVALID_ARGUMENT, e.what());
  } catch (const wfl::io::Json::exception& e) {
    return fail(WFL_ERR_INVALID_ARGUMENT, e.what());
  } catch (const std::invalid_argument& e) {
    return fail(WFL_ERR_INVALID_ARGUMENT, e.what());
  } catch (const std::exception& e) {
    return fail(WFL_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(WFL_ERR_INTERNAL, "unknown error");
  }
}

void require(bool ok, const char* what) {
  if (!ok) throw wfl::InputError(what);
}

Matrix from_row_major(const double* data, Eigen::Index rows, Eigen::Index cols) {
  if (rows * cols == 0) return Matrix(rows, cols);
  require(data != nullptr, "null matrix data");
  return Eigen::Map<const RowMajor>(data, rows, cols);
}

char* dup(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.data(), s.size() + 1);
  return out;
}

Vector initial_state(const wfl_system* sys, const double* x0) {
  const Eigen::Index n = sys->sys.n();
  return x0 ? Vector(Eigen::Map<const Vector>(x0, n)) : Vector(Vector::Zero(n));
}

wfl::Tolerances tolerances(const wfl_bound_options& o) { return {o.rank_rtol, o.psd_tol}; }

wfl::BoundReport identity_report(const std::string& name, double residual, double threshold) {
  wfl::BoundReport r;
  r.name = name;
  r.kind = wfl::ClaimKind::kIdentity;
  r.margin = residual;
  r.threshold = threshold;
  r.verdict = residual <= threshold ? wfl::Verdict::kHolds : wfl::Verdict::kFails;
  return r;
}

std::optional<Matrix> optional_square(const double* data, Eigen::Index size) {
  if (!data) return std::nullopt;
  return from_row_major(data, size, size);
}

wfl::BoundReport run_check(const wfl::LtiSystem& sys, const Vector& x0, const wfl::Signal& u,
                           wfl::Check check, const wfl_bound_options& o) {
  using wfl::Check;
  const Eigen::Index n = sys.n();
  const Eigen::Index m = sys.m();
  const Eigen::Index L = o.depth > 0 ? o.depth : 1;
  const wfl::Tolerances tol = tolerances(o);
  const wfl::detail::Stopwatch clock;
  wfl::BoundReport r;
  switch (check) {
    case Check::kIoRepresentation: {
      const wfl::IoResidual res = wfl::verify_io_representation(sys, x0, u);
      r = identity_report(wfl::check_name(check), res.max_residual, 1e-8 * res.scale);
      break;
    }
    case Check::kMFactorizations: {
      const wfl::MarkovParameters mk = wfl::markov_parameters(sys);
      const wfl::AnnihilatingPolynomial d = wfl::annihilating_polynomial(sys);
      const Matrix direct = wfl::build_M(mk, d);
      const double gap = std::max((direct - wfl::build_M_via_gammabar(mk, d)).norm(),
                                  (direct - wfl::build_M_via_dbar(mk, d)).norm()) /
                         std::max(1.0, direct.norm());
      r = identity_report(wfl::check_name(check), gap, 1e-10);
      break;
    }
    case Check::kFilteredInputExcitation:
      r = wfl::verify_filtered_input_bound(sys, x0, u, optional_square(o.K_u, sys.p()), tol);
      break;
    case Check::kOutputExcitation:
      r = wfl::verify_output_excitation_bound(sys, x0, u, optional_square(o.K_u, m * (n + 1)),
                                              tol);
      break;
    case Check::kOutputDirectional:
    case Check::kInputDirectional:
      r = wfl::verify_directional_chain(
          sys, x0, u,
          check == Check::kOutputDirectional ? wfl::DirectionalBound::kOutput
                                             : wfl::DirectionalBound::kInput,
          optional_square(o.K_u, m * (n + 1)), tol);
      break;
    case Check::kRelaxedExcitation:
      r = wfl::verify_relaxed_excitation(
          sys, x0, u,
          o.claimed_r >= 0 ? std::optional<Eigen::Index>(o.claimed_r) : std::nullopt, tol);
      break;
    case Check::kStateInputExcitation:
      r = wfl::verify_state_input_bound(sys, x0, u, L, optional_square(o.K_u, m * (L + n)), tol);
      break;
    case Check::kRobustExcitation: {
      const Matrix Z = wfl::build_Z(sys, L, tol.rank_rtol).Z;
      Matrix Zhat;
      if (o.Z_hat) {
        Zhat = from_row_major(o.Z_hat, Z.rows(), Z.cols());
      } else {
        const Vector dir = wfl::gaussian_vector(Z.size(), o.seed);
        Matrix E = Eigen::Map<const Matrix>(dir.data(), Z.rows(), Z.cols());
        E *= 0.5 * o.eps / wfl::sigma_max(E);
        Zhat = Z + E;
      }
      r = wfl::verify_robust_state_input_bound(sys, x0, u, L, optional_square(o.K_u, m * (L + n)),
                                               Zhat, o.eps, tol);
      break;
    }
    case Check::kRankImpliesImage:
    case Check::kCounterexample:
      throw wfl::InputError(std::string("'") + wfl::check_name(check) +
                            "' is not a bound check; use the fundamental or counterexample entry "
                            "points");
  }
  if (r.context.m == 0) {
    r.context = {n, m, sys.p(), u.length(), L, wfl::relative_degree(sys), std::nullopt};
  }
  if (r.elapsed_ms == 0.0) r.elapsed_ms = clock.elapsed_ms();
  return r;
}

std::vector<wfl::Check> checks_for(const char* name) {
  using wfl::Check;
  require(name != nullptr, "null check name");
  if (std::string(name) == "all") {
    return {Check::kIoRepresentation,   Check::kMFactorizations,   Check::kFilteredInputExcitation,
            Check::kOutputExcitation,   Check::kOutputDirectional, Check::kInputDirectional,
            Check::kRelaxedExcitation,  Check::kStateInputExcitation};
  }
  return {wfl::parse_check(name)};
}

std::vector<wfl::BoundReport> run_checks(const wfl_system* sys, const double* x0,
                                         const wfl_signal* u, const char* check,
                                         const wfl_bound_options* opts) {
  require(sys && u, "null handle");
  wfl_bound_options o;
  wfl_bound_options_default(&o);
  if (opts) o = *opts;
  const Vector x = initial_state(sys, x0);
  std::vector<wfl::BoundReport> out;
  for (const wfl::Check c : checks_for(check)) {
    try {
      out.push_back(run_check(sys->sys, x, u->sig, c, o));
    } catch (const wfl::InputError& e) {
      // In "all" mode a check whose preconditions cannot even be stated
      // (too-short data, n = 0, ...) is reported as inapplicable.
      if (std::string(check) != "all") throw;
      wfl::BoundReport r;
      r.name = wfl::check_name(c);
      r.note = e.what();
      out.push_back(std::move(r));
    }
  }
  return out;
}

}  // namespace

extern "C" {

const char* wfl_last_error(void) { return g_last_error.c_str(); }

const char* wfl_version(void) { return "1.0.0"; }

void wfl_string_free(char* s) { std::free(s); }

wfl_status wfl_system_create(int64_t n, int64_t m, int64_t p, const double* A, const double* B,
                             const double* C, const double* D, wfl_system** out) {
  return guarded([&] {
    require(out != nullptr, "null output pointer");
    require(n >= 0 && m >= 1 && p >= 1, "system needs n >= 0, m >= 1, p >= 1");
    *out = new wfl_system{wfl::LtiSystem(from_row_major(A, n, n), from_row_major(B, n, m),
                                         from_row_major(C, p, n), from_row_major(D, p, m))};
  });
}

wfl_status wfl_system_from_json(const char* json, wfl_system** out) {
  return guarded([&] {
    require(json && out, "null argument");
    *out = new wfl_system{wfl::io::system_from_json(wfl::io::Json::parse(json))};
  });
}

wfl_status wfl_system_to_json(const wfl_system* sys, char** json) {
  return guarded([&] {
    require(sys && json, "null argument");
    *json = dup(wfl::io::system_to_json(sys->sys).dump(2));
  });
}

wfl_status wfl_system_dims(const wfl_system* sys, int64_t* n, int64_t* m, int64_t* p) {
  return guarded([&] {
    require(sys != nullptr, "null handle");
    if (n) *n = sys->sys.n();
    if (m) *m = sys->sys.m();
    if (p) *p = sys->sys.p();
  });
}

void wfl_system_free(wfl_system* sys) { delete sys; }

wfl_status wfl_generate_system(int64_t n, int64_t m, int64_t p, double spectral_radius_cap,
                               double controllability_floor, int require_output_reachable,
                               int64_t relative_degree, uint64_t seed, wfl_system** out) {
  return guarded([&] {
    require(out != nullptr, "null output pointer");
    wfl::RandomModelSpec spec;
    spec.n = n;
    spec.m = m;
    spec.p = p;
    spec.spectral_radius_cap = spectral_radius_cap;
    spec.controllability_floor = controllability_floor;
    spec.require_output_reachable = require_output_reachable != 0;
    spec.relative_degree = relative_degree;
    *out = new wfl_system{wfl::generate_system(spec, seed)};
  });
}

wfl_status wfl_signal_create(int64_t dim, int64_t length, const double* data, wfl_signal** out) {
  return guarded([&] {
    require(out != nullptr, "null output pointer");
    require(dim >= 0 && length >= 1, "signal needs dim >= 0 and length >= 1");
    *out = new wfl_signal{wfl::Signal(from_row_major(data, dim, length))};
  });
}

wfl_status wfl_signal_from_csv(const char* csv, wfl_signal** out) {
  return guarded([&] {
    require(csv && out, "null argument");
    *out = new wfl_signal{wfl::io::signal_from_csv(csv)};
  });
}

wfl_status wfl_signal_to_csv(const wfl_signal* s, char** csv) {
  return guarded([&] {
    require(s && csv, "null argument");
    *csv = dup(wfl::io::signal_to_csv(s->sig));
  });
}

wfl_status wfl_signal_dims(const wfl_signal* s, int64_t* dim, int64_t* length) {
  return guarded([&] {
    require(s != nullptr, "null handle");
    if (dim) *dim = s->sig.dim();
    if (length) *length = s->sig.length();
  });
}

wfl_status wfl_signal_copy_data(const wfl_signal* s, double* data) {
  return guarded([&] {
    require(s && data, "null argument");
    Eigen::Map<RowMajor>(data, s->sig.dim(), s->sig.length()) = s->sig.samples();
  });
}

void wfl_signal_free(wfl_signal* s) { delete s; }

wfl_status wfl_generate_pe_input(int64_t m, int64_t length, int64_t order, const double* K_floor,
                                 uint64_t seed, wfl_signal** out, char** certificate_json) {
  return guarded([&] {
    require(out != nullptr, "null output pointer");
    require(m >= 1 && order >= 1, "generate_pe_input: m and order must be positive");
    const Eigen::Index size = m * order;
    const Matrix K = K_floor ? from_row_major(K_floor, size, size) : Matrix::Zero(size, size);
    wfl::PeInput in = wfl::generate_pe_input(m, length, order, K, seed);
    if (certificate_json) {
      wfl::io::Json j = wfl::io::certificate_to_json(in.certificate);
      j["scale"] = in.scale;
      *certificate_json = dup(j.dump(2));
    }
    *out = new wfl_signal{std::move(in.u)};
  });
}

wfl_status wfl_simulate(const wfl_system* sys, const double* x0, const wfl_signal* u,
                        wfl_signal** x_out, wfl_signal** y_out) {
  return guarded([&] {
    require(sys && u, "null handle");
    wfl::Trajectory t = wfl::simulate(sys->sys, initial_state(sys, x0), u->sig);
    if (x_out) *x_out = new wfl_signal{std::move(t.x)};
    if (y_out) *y_out = new wfl_signal{std::move(t.y)};
  });
}

wfl_status wfl_hankel_csv(const wfl_signal* u, int64_t depth, int gram, char** csv) {
  return guarded([&] {
    require(u && csv, "null argument");
    *csv = dup(wfl::io::matrix_to_csv(gram ? wfl::pe_gram(u->sig, depth)
                                           : wfl::hankel(u->sig, depth).data));
  });
}

wfl_status wfl_pe_check(const wfl_signal* u, int64_t depth, double rank_rtol, double psd_tol,
                        char** json) {
  return guarded([&] {
    require(u && json, "null argument");
    const wfl::PeCertificate cert = wfl::pe_certificate(u->sig, depth, {rank_rtol, psd_tol});
    wfl::io::Json j;
    j["depth"] = depth;
    j["rank"] = wfl::numerical_rank(wfl::hankel(u->sig, depth).data, rank_rtol);
    j["required_rank"] = u->sig.dim() * depth;
    j["pe"] = wfl::pe_order_check(u->sig, depth, rank_rtol);
    j["certificate"] = wfl::io::certificate_to_json(cert);
    *json = dup(j.dump(2));
  });
}

wfl_status wfl_kpe_check(const wfl_signal* u, int64_t depth, const double* K, double psd_tol,
                         char** json) {
  return guarded([&] {
    require(u && K && json, "null argument");
    const Eigen::Index size = u->sig.dim() * depth;
    const wfl::PeCertificate cert =
        wfl::kpe_check(u->sig, depth, from_row_major(K, size, size), psd_tol);
    *json = dup(wfl::io::certificate_to_json(cert).dump(2));
  });
}

void wfl_bound_options_default(wfl_bound_options* opts) {
  if (!opts) return;
  opts->rank_rtol = wfl::Tolerances{}.rank_rtol;
  opts->psd_tol = wfl::Tolerances{}.psd_tol;
  opts->depth = 1;
  opts->K_u = nullptr;
  opts->claimed_r = -1;
  opts->eps = 0.1;
  opts->Z_hat = nullptr;
  opts->seed = 0;
}

wfl_status wfl_bound_report(const wfl_system* sys, const double* x0, const wfl_signal* u,
                            const char* check, const wfl_bound_options* opts, int full,
                            char** json) {
  return guarded([&] {
    require(json != nullptr, "null output pointer");
    const auto reports = run_checks(sys, x0, u, check, opts);
    auto render = [&](const wfl::BoundReport& r) {
      return full ? wfl::io::report_to_json_full(r) : wfl::io::report_to_json(r);
    };
    if (std::string(check) == "all") {
      wfl::io::Json arr = wfl::io::Json::array();
      for (const auto& r : reports) arr.push_back(render(r));
      *json = dup(arr.dump(2));
    } else {
      *json = dup(render(reports.front()).dump(2));
    }
  });
}

wfl_status wfl_bound_report_csv(const wfl_system* sys, const double* x0, const wfl_signal* u,
                                const char* check, const wfl_bound_options* opts, char** csv) {
  return guarded([&] {
    require(csv != nullptr, "null output pointer");
    *csv = dup(wfl::io::reports_to_csv(run_checks(sys, x0, u, check, opts), "", ""));
  });
}

wfl_status wfl_design_input_gain(const wfl_system* sys, const double* K_y, double rank_rtol,
                                 double* k_u) {
  return guarded([&] {
    require(sys && K_y && k_u, "null argument");
    const Eigen::Index p = sys->sys.p();
    *k_u = wfl::design_input_gain(sys->sys, from_row_major(K_y, p, p), rank_rtol);
  });
}

wfl_status wfl_fundamental_report(const wfl_system* sys, const double* x0, const wfl_signal* u,
                                  int64_t depth, double rank_rtol, char** json) {
  return guarded([&] {
    require(sys && u && json, "null argument");
    const wfl::Trajectory t = wfl::simulate(sys->sys, initial_state(sys, x0), u->sig);
    const wfl::RankConditionResult rank = wfl::rank_condition_check(t.x, u->sig, depth, rank_rtol);
    const wfl::ImageEqualityResult image =
        wfl::image_equality_check(sys->sys, u->sig, t.y, depth, rank_rtol);
    wfl::io::Json j;
    j["depth"] = depth;
    j["controllable"] = wfl::is_controllable(sys->sys, rank_rtol);
    j["input_pe_order_L_plus_n"] =
        u->sig.length() >= (sys->sys.m() + 1) * (depth + sys->sys.n()) - 1 &&
        wfl::pe_order_check(u->sig, depth + sys->sys.n(), rank_rtol);
    j["rank_condition"] = {{"holds", rank.holds},
                           {"rank", rank.rank},
                           {"required", rank.required},
                           {"sigma_min", rank.sigma_min}};
    j["image_equality"] = {{"equal", image.equal},
                           {"rank_data", image.rank_data},
                           {"rank_model", image.rank_model},
                           {"rank_joint", image.rank_joint}};
    j["rank_implies_image"] = !rank.holds || image.equal;
    *json = dup(j.dump(2));
  });
}

wfl_status wfl_parametrize(const wfl_signal* u_data, const wfl_signal* y_data,
                           const wfl_signal* target, char** json) {
  return guarded([&] {
    require(u_data && y_data && target && json, "null argument");
    const Eigen::Index m = u_data->sig.dim();
    const Eigen::Index p = y_data->sig.dim();
    require(target->sig.dim() == m + p, "target must stack m inputs and p outputs per sample");
    const Eigen::Index L = target->sig.length();
    const Matrix& t = target->sig.samples();
    const Matrix ut = t.topRows(m);
    const Matrix yt = t.bottomRows(p);
    const Vector ubar = Eigen::Map<const Vector>(ut.data(), ut.size());
    const Vector ybar = Eigen::Map<const Vector>(yt.data(), yt.size());
    const wfl::Parametrization g = wfl::parametrize(u_data->sig, y_data->sig, L, ubar, ybar);
    wfl::io::Json j;
    j["depth"] = L;
    j["residual"] = g.residual;
    j["g"] = wfl::io::vector_to_json(g.g);
    *json = dup(j.dump(2));
  });
}

wfl_status wfl_counterexample(int64_t length, const double* probes, int64_t count, char** json,
                              char** summary) {
  return guarded([&] {
    std::vector<Vector> ps;
    if (probes) {
      require(count >= 1, "probe count must be positive");
      const Matrix P = from_row_major(probes, 2, count);
      for (Eigen::Index i = 0; i < count; ++i) ps.emplace_back(P.col(i));
    }
    const wfl::CounterexampleReport r = wfl::counterexample_run(length, ps);
    if (json) *json = dup(wfl::io::counterexample_to_json(r).dump(2));
    if (summary) *summary = dup(wfl::counterexample_summary(r));
  });
}

wfl_status wfl_structured_export(const wfl_system* sys, int64_t depth, int64_t relaxation,
                                 char** json) {
  return guarded([&] {
    require(sys && json, "null argument");
    const std::optional<Eigen::Index> L =
        depth > 0 ? std::optional<Eigen::Index>(depth) : std::nullopt;
    const std::optional<Eigen::Index> r =
        relaxation >= 0 ? std::optional<Eigen::Index>(relaxation) : std::nullopt;
    const wfl::io::StructuredExport ex =
        wfl::io::export_structured(wfl::build_structured_set(sys->sys, L, r), sys->sys, L);
    wfl::io::Json j;
    j["metadata"] = ex.metadata;
    j["csv"] = wfl::io::Json::object();
    for (const auto& [name, text] : ex.csv) j["csv"][name] = text;
    *json = dup(j.dump(2));
  });
}

wfl_status wfl_sweep(const char* config_json, const char* format, char** result_json,
                     int* exit_code) {
  return guarded([&] {
    require(config_json && result_json, "null argument");
    const std::string fmt = format ? format : "json";
    require(fmt == "json" || fmt == "csv", "format must be json or csv");
    wfl::io::Json doc;
    try {
      doc = wfl::io::Json::parse(config_json);
    } catch (const wfl::io::Json::exception& e) {
      throw wfl::InputError(std::string("config: ") + e.what());
    }
    const wfl::SweepConfig config = wfl::io::sweep_config_from_json(doc);
    const wfl::SweepResult result = wfl::run_sweep(config);
    wfl::io::Json out;
    out["summary"] = wfl::io::summary_to_json(config, result);
    std::string summary_csv = "check,holds,fails,inapplicable\n";
    for (const auto& [name, c] : result.per_check) {
      summary_csv += name + "," + std::to_string(c.holds) + "," + std::to_string(c.fails) + "," +
                     std::to_string(c.inapplicable) + "\n";
    }
    summary_csv += "total," + std::to_string(result.total.holds) + "," +
                   std::to_string(result.total.fails) + "," +
                   std::to_string(result.total.inapplicable) + "\n";
    out["summary_csv"] = summary_csv;
    wfl::io::Json trials = wfl::io::Json::array();
    for (const auto& t : result.trials) {
      if (fmt == "json") {
        trials.push_back(wfl::io::trial_to_json(t));
      } else {
        trials.push_back(wfl::io::reports_to_csv(t.reports, "trial,",
                                                 std::to_string(t.index) + ","));
      }
    }
    out["trials"] = std::move(trials);
    if (exit_code) *exit_code = result.exit_code();
    *result_json = dup(out.dump(2));
  });
}

}  // extern "C"
