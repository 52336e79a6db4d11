#include "wfl/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <random>
#include <string>
#include <thread>

#include "internal.hpp"
#include "wfl/fundamental.hpp"
#include "wfl/generate.hpp"
#include "wfl/linalg.hpp"
#include "wfl/pe.hpp"
#include "wfl/structmat.hpp"

namespace wfl {

namespace {

struct CheckInfo {
  Check check;
  const char* name;
  const char* alias;
};

constexpr CheckInfo kChecks[] = {
    {Check::kIoRepresentation, "io-representation", "lemma1"},
    {Check::kMFactorizations, "m-factorizations", "eq7"},
    {Check::kFilteredInputExcitation, "filtered-input-excitation", "thm1"},
    {Check::kOutputExcitation, "output-excitation", "cor1"},
    {Check::kOutputDirectional, "output-directional", "eq13"},
    {Check::kInputDirectional, "input-directional", "eq14"},
    {Check::kRelaxedExcitation, "relaxed-excitation", "cor2"},
    {Check::kStateInputExcitation, "state-input-excitation", "thm3"},
    {Check::kRankImpliesImage, "rank-implies-image", "prop1"},
    {Check::kRobustExcitation, "robust-state-input-excitation", "robust"},
    {Check::kCounterexample, "counterexample", "counterexample"},
};

}  // namespace

const char* check_name(Check c) {
  for (const auto& info : kChecks) {
    if (info.check == c) return info.name;
  }
  return "unknown";
}

Check parse_check(const std::string& name) {
  for (const auto& info : kChecks) {
    if (name == info.name || name == info.alias) return info.check;
  }
  throw InputError("unknown check '" + name + "'");
}

void validate(const SweepConfig& c) {
  auto range_ok = [](const IndexRange& r, Eigen::Index floor) {
    return r.lo >= floor && r.hi >= r.lo;
  };
  if (!range_ok(c.n, 0)) throw InputError("config: n range must satisfy 0 <= lo <= hi");
  if (!range_ok(c.m, 1)) throw InputError("config: m range must satisfy 1 <= lo <= hi");
  if (!range_ok(c.p, 1)) throw InputError("config: p range must satisfy 1 <= lo <= hi");
  if (c.trials < 1) throw InputError("config: trials must be at least 1");
  if (c.depth < 1) throw InputError("config: depth L must be at least 1");
  if (c.which.empty()) throw InputError("config: no checks selected");
  if (c.length != 0 && c.length < c.depth + c.n.hi) {
    throw InputError("config: N must be at least L + n_max");
  }
  if (c.workers < 1) throw InputError("config: workers must be at least 1");
  if (!(c.eps > 0.0)) throw InputError("config: eps must be positive");
  if (!(c.tol.rank_rtol > 0.0) || !(c.tol.psd_tol >= 0.0)) {
    throw InputError("config: tolerances must be positive");
  }
}

namespace {

Eigen::Index draw(const IndexRange& r, std::mt19937_64& rng) {
  std::uniform_int_distribution<Eigen::Index> dist(r.lo, r.hi);
  return dist(rng);
}

Signal trial_input(Eigen::Index m, Eigen::Index length, Eigen::Index order, std::uint64_t seed) {
  if (length >= (m + 1) * order - 1) {
    return generate_pe_input(m, length, order, Matrix::Zero(m * order, m * order), seed).u;
  }
  // Too short to be PE of the requested order; the checks report that.
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist(0.0, 1.0);
  Matrix u(m, length);
  for (Eigen::Index j = 0; j < length; ++j) {
    for (Eigen::Index i = 0; i < m; ++i) u(i, j) = dist(rng);
  }
  return Signal(u);
}

BoundReport identity_report(std::string name, double residual, double threshold,
                            const ReportContext& ctx) {
  BoundReport r;
  r.name = std::move(name);
  r.kind = ClaimKind::kIdentity;
  r.margin = residual;
  r.threshold = threshold;
  r.verdict = residual <= threshold ? Verdict::kHolds : Verdict::kFails;
  r.context = ctx;
  return r;
}

BoundReport rank_implies_image(const LtiSystem& sys, const Vector& x0, const Signal& u,
                               Eigen::Index depth, const Tolerances& tol) {
  const detail::Stopwatch clock;
  BoundReport r;
  r.name = "rank-implies-image";
  r.kind = ClaimKind::kRank;
  const Trajectory traj = simulate(sys, x0, u);
  const RankConditionResult rc = rank_condition_check(traj.x, u, depth, tol.rank_rtol);
  const ImageEqualityResult ie = image_equality_check(sys, u, traj.y, depth, tol.rank_rtol);
  const bool controllable = is_controllable(sys, tol.rank_rtol);
  const bool input_pe =
      u.length() >= depth + sys.n() && pe_order_check(u, depth + sys.n(), tol.rank_rtol);

  r.lhs = state_input_gram(traj.x, u, depth);
  r.margin = rc.sigma_min;
  r.chain.push_back({"rank condition", static_cast<double>(rc.rank), rc.holds});
  r.chain.push_back({"rank data", static_cast<double>(ie.rank_data), true});
  r.chain.push_back({"rank model", static_cast<double>(ie.rank_model), true});
  r.chain.push_back({"rank joint", static_cast<double>(ie.rank_joint), ie.equal});

  if (rc.holds && !ie.equal) {
    r.verdict = Verdict::kFails;
    r.note = "rank condition holds but image equality fails";
  } else if (controllable && input_pe && !rc.holds) {
    r.verdict = Verdict::kFails;
    r.note = "controllable system with PE input violates the rank condition";
  } else if (!rc.holds) {
    r.verdict = Verdict::kInapplicable;
    r.note = controllable ? "input is not PE of order L+n" : "(A, B) is not controllable";
  } else {
    r.verdict = Verdict::kHolds;
  }
  r.context.n = sys.n();
  r.context.m = sys.m();
  r.context.p = sys.p();
  r.context.length = u.length();
  r.context.depth = depth;
  r.elapsed_ms = clock.elapsed_ms();
  return r;
}

BoundReport counterexample_report() {
  const detail::Stopwatch clock;
  const CounterexampleReport ce = counterexample_run();
  BoundReport r;
  r.name = "counterexample";
  r.kind = ClaimKind::kRank;
  r.lhs = ce.filtered_gram;
  r.margin = lambda_min_sym(ce.filtered_gram);
  Eigen::Index min_rank = ce.probes.front().output_rank;
  for (const auto& p : ce.probes) min_rank = std::min(min_rank, p.output_rank);
  r.chain.push_back({"min output rank over probes", static_cast<double>(min_rank), ce.outputs_pe});
  r.chain.push_back({"filtered input rank", static_cast<double>(ce.filtered_rank), !ce.filtered_pe});
  r.chain.push_back({"rank [a^T C; a^T C A]", static_cast<double>(ce.projected_obs_rank),
                     ce.projected_obs_rank < 2});
  r.verdict = ce.claim_falsified ? Verdict::kHolds : Verdict::kFails;
  r.note = ce.claim_falsified ? "Claim 1 falsified" : "counterexample did not reproduce";
  r.context.n = 2;
  r.context.m = 1;
  r.context.p = 2;
  r.context.length = ce.length;
  r.context.depth = 1;
  r.elapsed_ms = clock.elapsed_ms();
  return r;
}

BoundReport failure_report(Check c, const std::string& what, Verdict v) {
  BoundReport r;
  r.name = check_name(c);
  r.verdict = v;
  r.note = what;
  return r;
}

}  // namespace

TrialRecord run_trial(const SweepConfig& config, Eigen::Index index) {
  TrialRecord rec;
  rec.index = index;
  rec.seed = mix_seed(config.seed, static_cast<std::uint64_t>(index));

  std::mt19937_64 rng(rec.seed);
  const Eigen::Index n = draw(config.n, rng);
  const Eigen::Index m = draw(config.m, rng);
  Eigen::Index p = draw(config.p, rng);
  // Output reachability needs p <= m(n+1).
  for (int tries = 0; tries < 100 && p > m * (n + 1); ++tries) p = draw(config.p, rng);
  p = std::min(p, m * (n + 1));

  const Eigen::Index L = config.depth;
  const Eigen::Index N = config.length > 0 ? config.length : 20 * (L + n);
  rec.dims.n = n;
  rec.dims.m = m;
  rec.dims.p = p;
  rec.dims.length = N;
  rec.dims.depth = L;
  rec.dims.seed = rec.seed;

  RandomModelSpec spec;
  spec.n = n;
  spec.m = m;
  spec.p = p;
  spec.spectral_radius_cap = config.spectral_radius_cap;
  spec.controllability_floor = config.controllability_floor;
  spec.require_output_reachable = true;

  std::optional<LtiSystem> sys;
  std::string generation_error;
  try {
    sys = generate_system(spec, mix_seed(rec.seed, 1));
  } catch (const GenerationError& e) {
    generation_error = e.what();
  }
  const Vector x0 = gaussian_vector(n, mix_seed(rec.seed, 2));
  const Signal u = trial_input(m, N, L + n, mix_seed(rec.seed, 3));

  for (const Check check : config.which) {
    if (check == Check::kCounterexample) {
      if (index == 0) rec.reports.push_back(counterexample_report());
      continue;
    }
    if (!sys && check != Check::kRelaxedExcitation) {
      rec.reports.push_back(failure_report(check, generation_error, Verdict::kInapplicable));
      continue;
    }
    try {
      switch (check) {
        case Check::kIoRepresentation: {
          const IoResidual r = verify_io_representation(*sys, x0, u);
          rec.reports.push_back(
              identity_report(check_name(check), r.max_residual, 1e-8 * r.scale, rec.dims));
          break;
        }
        case Check::kMFactorizations: {
          const MarkovParameters mk = markov_parameters(*sys);
          const AnnihilatingPolynomial d = annihilating_polynomial(*sys);
          const Matrix direct = build_M(mk, d);
          const double scale = std::max(1.0, direct.norm());
          const double gap = std::max((direct - build_M_via_gammabar(mk, d)).norm(),
                                      (direct - build_M_via_dbar(mk, d)).norm()) /
                             scale;
          rec.reports.push_back(identity_report(check_name(check), gap, 1e-10, rec.dims));
          break;
        }
        case Check::kFilteredInputExcitation:
          rec.reports.push_back(verify_filtered_input_bound(*sys, x0, u, std::nullopt, config.tol));
          break;
        case Check::kOutputExcitation:
          rec.reports.push_back(
              verify_output_excitation_bound(*sys, x0, u, std::nullopt, config.tol));
          break;
        case Check::kOutputDirectional:
          rec.reports.push_back(verify_directional_chain(*sys, x0, u, DirectionalBound::kOutput,
                                                         std::nullopt, config.tol));
          break;
        case Check::kInputDirectional:
          rec.reports.push_back(verify_directional_chain(*sys, x0, u, DirectionalBound::kInput,
                                                         std::nullopt, config.tol));
          break;
        case Check::kRelaxedExcitation: {
          RandomModelSpec relaxed = spec;
          relaxed.n = std::max<Eigen::Index>(1, n);
          relaxed.relative_degree = 1 + index % 2;
          // With D = 0 the Markov parameters have row rank at most n.
          relaxed.p = std::max<Eigen::Index>(1, std::min(p, relaxed.n));
          const LtiSystem rsys = generate_system(relaxed, mix_seed(rec.seed, 4));
          const Vector rx0 = gaussian_vector(rsys.n(), mix_seed(rec.seed, 5));
          const Eigen::Index rN = std::max(N, 20 * (rsys.n() + 1));
          const Signal ru = trial_input(m, rN, rsys.n() + 1, mix_seed(rec.seed, 6));
          BoundReport rep =
              verify_relaxed_excitation(rsys, rx0, ru, relaxed.relative_degree, config.tol);
          rep.context.seed = rec.seed;
          rec.reports.push_back(std::move(rep));
          break;
        }
        case Check::kStateInputExcitation:
          rec.reports.push_back(verify_state_input_bound(*sys, x0, u, L, std::nullopt, config.tol));
          break;
        case Check::kRankImpliesImage:
          rec.reports.push_back(rank_implies_image(*sys, x0, u, L, config.tol));
          break;
        case Check::kRobustExcitation: {
          const Matrix Z = build_Z(*sys, L, config.tol.rank_rtol).Z;
          const Vector dir = gaussian_vector(Z.size(), mix_seed(rec.seed, 7));
          Matrix E = Eigen::Map<const Matrix>(dir.data(), Z.rows(), Z.cols());
          E *= 0.5 * config.eps / sigma_max(E);
          rec.reports.push_back(verify_robust_state_input_bound(*sys, x0, u, L, std::nullopt,
                                                                Z + E, config.eps, config.tol));
          break;
        }
        case Check::kCounterexample:
          break;
      }
    } catch (const GenerationError& e) {
      rec.reports.push_back(failure_report(check, e.what(), Verdict::kInapplicable));
    } catch (const InputError& e) {
      rec.reports.push_back(failure_report(check, e.what(), Verdict::kInapplicable));
    }
    if (!rec.reports.empty()) {
      ReportContext& ctx = rec.reports.back().context;
      if (ctx.m == 0) ctx = rec.dims;
      ctx.seed = rec.seed;
    }
  }
  return rec;
}

SweepResult run_sweep(const SweepConfig& config) {
  validate(config);
  SweepResult result;
  result.trials.resize(static_cast<std::size_t>(config.trials));

  std::atomic<Eigen::Index> next{0};
  auto worker = [&] {
    for (Eigen::Index i = next++; i < config.trials; i = next++) {
      result.trials[static_cast<std::size_t>(i)] = run_trial(config, i);
    }
  };
  const unsigned count =
      std::min<unsigned>(config.workers, static_cast<unsigned>(config.trials));
  if (count <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < count; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  for (const auto& trial : result.trials) {
    for (const auto& rep : trial.reports) {
      VerdictCounts& bucket = result.per_check[rep.name];
      switch (rep.verdict) {
        case Verdict::kHolds:
          ++bucket.holds;
          ++result.total.holds;
          break;
        case Verdict::kFails:
          ++bucket.fails;
          ++result.total.fails;
          break;
        case Verdict::kInapplicable:
          ++bucket.inapplicable;
          ++result.total.inapplicable;
          break;
      }
    }
  }
  return result;
}

}  // namespace wfl
