#include "wfl/io.hpp"

#include <cmath>
#include <cstdio>
#include <algorithm>
#include <fstream>
#include <sstream>

#include "wfl/linalg.hpp"

namespace wfl::io {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, sep)) out.push_back(cell);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_number(const std::string& cell) {
  const std::string t = trim(cell);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(t, &used);
  } catch (const std::exception&) {
    throw InputError("not a number: '" + t + "'");
  }
  if (used != t.size()) throw InputError("not a number: '" + t + "'");
  return v;
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    if (!trim(line).empty()) out.push_back(trim(line));
  }
  return out;
}

Eigen::Index get_dim(const Json& doc, const char* key) {
  if (!doc.contains(key) || !doc[key].is_number_integer()) {
    throw InputError(std::string("system document needs integer field '") + key + "'");
  }
  return doc[key].get<Eigen::Index>();
}

Json context_to_json(const ReportContext& c) {
  Json j;
  j["n"] = c.n;
  j["m"] = c.m;
  j["p"] = c.p;
  j["N"] = c.length;
  j["L"] = c.depth;
  j["r"] = c.relative_degree;
  return j;
}

Json finite_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

}  // namespace

Json matrix_to_json(const Matrix& a) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < a.cols(); ++j) row.push_back(a(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const Json& j, Eigen::Index rows, Eigen::Index cols) {
  if (!j.is_array()) throw InputError("matrix must be a nested array");
  // An n x 0 matrix may be written as [] or as n empty rows.
  if (cols == 0 && j.empty()) return Matrix(rows, 0);
  if (static_cast<Eigen::Index>(j.size()) != rows) {
    throw InputError("matrix has " + std::to_string(j.size()) + " rows, expected " +
                     std::to_string(rows));
  }
  Matrix out(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const Json& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
      throw InputError("matrix row " + std::to_string(i) + " does not have " +
                       std::to_string(cols) + " entries");
    }
    for (Eigen::Index c = 0; c < cols; ++c) {
      const Json& v = row[static_cast<std::size_t>(c)];
      if (!v.is_number()) throw InputError("matrix entries must be numbers");
      out(i, c) = v.get<double>();
    }
  }
  return out;
}

Json vector_to_json(const Vector& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

Json system_to_json(const LtiSystem& sys) {
  Json j;
  j["n"] = sys.n();
  j["m"] = sys.m();
  j["p"] = sys.p();
  j["A"] = matrix_to_json(sys.A());
  j["B"] = matrix_to_json(sys.B());
  j["C"] = matrix_to_json(sys.C());
  j["D"] = matrix_to_json(sys.D());
  return j;
}

LtiSystem system_from_json(const Json& doc) {
  if (!doc.is_object()) throw InputError("system document must be an object");
  const Eigen::Index n = get_dim(doc, "n");
  const Eigen::Index m = get_dim(doc, "m");
  const Eigen::Index p = get_dim(doc, "p");
  if (n < 0 || m < 1 || p < 1) throw InputError("system needs n >= 0, m >= 1, p >= 1");
  for (const char* key : {"A", "B", "C", "D"}) {
    if (!doc.contains(key)) throw InputError(std::string("system document lacks '") + key + "'");
  }
  return LtiSystem(matrix_from_json(doc["A"], n, n), matrix_from_json(doc["B"], n, m),
                   matrix_from_json(doc["C"], p, n), matrix_from_json(doc["D"], p, m));
}

std::string signal_to_csv(const Signal& s) {
  std::string out = "k";
  for (Eigen::Index i = 0; i < s.dim(); ++i) out += ",v" + std::to_string(i);
  out += "\n";
  for (Eigen::Index k = 0; k < s.length(); ++k) {
    out += std::to_string(k);
    for (Eigen::Index i = 0; i < s.dim(); ++i) out += "," + num(s.samples()(i, k));
    out += "\n";
  }
  return out;
}

Signal signal_from_csv(const std::string& text) {
  const auto lines = lines_of(text);
  if (lines.empty()) throw InputError("signal CSV is empty");
  const auto header = split(lines.front(), ',');
  if (header.empty() || trim(header.front()) != "k") {
    throw InputError("signal CSV header must start with 'k'");
  }
  const Eigen::Index q = static_cast<Eigen::Index>(header.size()) - 1;
  const Eigen::Index N = static_cast<Eigen::Index>(lines.size()) - 1;
  if (N < 1) throw InputError("signal CSV has no samples");
  Matrix samples(q, N);
  for (Eigen::Index k = 0; k < N; ++k) {
    const auto cells = split(lines[static_cast<std::size_t>(k + 1)], ',');
    if (static_cast<Eigen::Index>(cells.size()) != q + 1) {
      throw InputError("signal CSV row " + std::to_string(k) + " has " +
                       std::to_string(cells.size()) + " cells, expected " +
                       std::to_string(q + 1));
    }
    if (parse_number(cells.front()) != static_cast<double>(k)) {
      throw InputError("signal CSV rows must be numbered 0, 1, 2, ...");
    }
    for (Eigen::Index i = 0; i < q; ++i) {
      samples(i, k) = parse_number(cells[static_cast<std::size_t>(i + 1)]);
    }
  }
  return Signal(samples);
}

std::string matrix_to_csv(const Matrix& a) {
  std::string out;
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      if (j) out += ",";
      out += num(a(i, j));
    }
    out += "\n";
  }
  return out;
}

Matrix matrix_from_csv(const std::string& text) {
  const auto lines = lines_of(text);
  if (lines.empty()) return {};
  const auto first = split(lines.front(), ',');
  Matrix out(static_cast<Eigen::Index>(lines.size()), static_cast<Eigen::Index>(first.size()));
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto cells = split(lines[i], ',');
    if (cells.size() != first.size()) throw InputError("ragged matrix CSV");
    for (std::size_t j = 0; j < cells.size(); ++j) {
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = parse_number(cells[j]);
    }
  }
  return out;
}

Json report_to_json(const BoundReport& r) {
  Json j;
  j["name"] = r.name;
  j["kind"] = to_string(r.kind);
  j["verdict"] = to_string(r.verdict);
  j["margin"] = finite_or_null(r.margin);
  j["tol"] = finite_or_null(r.threshold);
  j["note"] = r.note;
  j["dims"] = context_to_json(r.context);
  j["seed"] = r.context.seed ? Json(*r.context.seed) : Json(nullptr);
  j["timings"] = {{"elapsed_ms", r.elapsed_ms}};
  Json chain = Json::array();
  for (const auto& s : r.chain) {
    chain.push_back({{"step", s.name}, {"value", finite_or_null(s.value)}, {"ok", s.ok}});
  }
  j["chain"] = std::move(chain);
  return j;
}

Json report_to_json_full(const BoundReport& r) {
  Json j = report_to_json(r);
  j["lhs"] = matrix_to_json(r.lhs);
  j["rhs"] = matrix_to_json(r.rhs);
  return j;
}

Json certificate_to_json(const PeCertificate& c) {
  Json j;
  j["order"] = c.order;
  j["holds"] = c.holds;
  j["margin"] = c.margin;
  j["tol"] = c.threshold;
  j["gram_consistency"] = c.gram_consistency;
  j["gram"] = matrix_to_json(c.gram);
  j["bound"] = c.bound ? matrix_to_json(*c.bound) : Json(nullptr);
  return j;
}

Json counterexample_to_json(const CounterexampleReport& r) {
  Json j;
  j["verdict"] = r.claim_falsified ? "Claim 1 falsified" : "not falsified";
  j["N"] = r.length;
  j["system"] = {{"A", matrix_to_json(r.A)},
                 {"B", matrix_to_json(r.B)},
                 {"C", matrix_to_json(r.C)},
                 {"D", matrix_to_json(r.D)}};
  j["d"] = vector_to_json(r.d);
  j["M"] = matrix_to_json(r.M);
  Json probes = Json::array();
  for (const auto& p : r.probes) {
    probes.push_back({{"x0", vector_to_json(p.x0)},
                      {"H1_y", matrix_to_json(p.y.samples())},
                      {"rank", p.output_rank}});
  }
  j["probes"] = std::move(probes);
  j["M_u_0_2"] = vector_to_json(r.first_filtered);
  j["later_filtered_max"] = r.later_filtered_max;
  j["filtered_gram"] = matrix_to_json(r.filtered_gram);
  j["filtered_rank"] = r.filtered_rank;
  j["outputs_pe"] = r.outputs_pe;
  j["filtered_pe"] = r.filtered_pe;
  j["rank_genericity"] =
      "columns y_1 = [1; x0(1)] and y_2 = [0; 1] are independent for every x0, so rank H1(y) = 2 "
      "for all initial states";
  j["necessity_gap"] = {{"direction", vector_to_json(r.direction)},
                        {"projected_observability_rank", r.projected_obs_rank},
                        {"reduced_order", r.reduced_order},
                        {"zeroing_x0", vector_to_json(r.zeroing_state)},
                        {"a_y0", r.zeroed_output},
                        {"a_y1", r.next_output},
                        {"zeroing_residual", r.zeroing_residual}};
  j["open_questions"] = r.open_questions;
  return j;
}

Json trial_to_json(const TrialRecord& t) {
  Json j;
  j["trial"] = t.index;
  j["seed"] = t.seed;
  j["dims"] = context_to_json(t.dims);
  Json reports = Json::array();
  for (const auto& r : t.reports) reports.push_back(report_to_json(r));
  j["reports"] = std::move(reports);
  return j;
}

namespace {

Json counts_to_json(const VerdictCounts& c) {
  return {{"holds", c.holds}, {"fails", c.fails}, {"inapplicable", c.inapplicable}};
}

// Per-report record without timings, for byte-stable summaries.
Json stable_report(const BoundReport& r) {
  Json j = report_to_json(r);
  j.erase("timings");
  return j;
}

}  // namespace

Json summary_to_json(const SweepConfig& config, const SweepResult& result) {
  Json j;
  j["config"] = sweep_config_to_json(config);
  j["config"].erase("workers");
  j["total"] = counts_to_json(result.total);
  Json per = Json::object();
  for (const auto& [name, counts] : result.per_check) per[name] = counts_to_json(counts);
  j["per_check"] = std::move(per);
  // Worst margin per check, for dominance claims.
  Json worst = Json::object();
  for (const auto& t : result.trials) {
    for (const auto& r : t.reports) {
      if (r.kind != ClaimKind::kDominance || r.verdict == Verdict::kInapplicable) continue;
      if (!worst.contains(r.name) || worst[r.name]["margin"].get<double>() > r.margin) {
        worst[r.name] = stable_report(r);
        worst[r.name]["trial"] = t.index;
      }
    }
  }
  j["worst_margin"] = std::move(worst);
  j["exit_code"] = result.exit_code();
  return j;
}

SweepConfig sweep_config_from_json(const Json& doc) {
  if (!doc.is_object()) throw InputError("sweep config must be an object");
  SweepConfig c;
  auto get_range = [&](const char* key, IndexRange& r) {
    if (!doc.contains(key)) return;
    const Json& v = doc[key];
    if (v.is_number_integer()) {
      r.lo = r.hi = v.get<Eigen::Index>();
    } else if (v.is_array() && v.size() == 2 && v[0].is_number_integer() &&
               v[1].is_number_integer()) {
      r.lo = v[0].get<Eigen::Index>();
      r.hi = v[1].get<Eigen::Index>();
    } else {
      throw InputError(std::string("config: '") + key + "' must be an integer or [lo, hi]");
    }
  };
  try {
    static const char* known[] = {"seed", "trials", "n",   "m",          "p",      "N",
                                  "L",    "tol",    "which", "spectral_radius_cap",
                                  "controllability_floor", "eps", "workers"};
    for (const auto& [key, value] : doc.items()) {
      if (std::find_if(std::begin(known), std::end(known),
                       [&](const char* k) { return key == k; }) == std::end(known)) {
        throw InputError("config: unknown field '" + key + "'");
      }
    }
    if (doc.contains("seed")) c.seed = doc["seed"].get<std::uint64_t>();
    if (doc.contains("trials")) c.trials = doc["trials"].get<Eigen::Index>();
    get_range("n", c.n);
    get_range("m", c.m);
    get_range("p", c.p);
    if (doc.contains("N")) c.length = doc["N"].get<Eigen::Index>();
    if (doc.contains("L")) c.depth = doc["L"].get<Eigen::Index>();
    if (doc.contains("tol")) {
      const Json& t = doc["tol"];
      if (t.contains("rank")) c.tol.rank_rtol = t["rank"].get<double>();
      if (t.contains("psd")) c.tol.psd_tol = t["psd"].get<double>();
    }
    if (doc.contains("which")) {
      for (const auto& w : doc["which"]) c.which.push_back(parse_check(w.get<std::string>()));
    }
    if (doc.contains("spectral_radius_cap")) {
      c.spectral_radius_cap = doc["spectral_radius_cap"].get<double>();
    }
    if (doc.contains("controllability_floor")) {
      c.controllability_floor = doc["controllability_floor"].get<double>();
    }
    if (doc.contains("eps")) c.eps = doc["eps"].get<double>();
    if (doc.contains("workers")) c.workers = doc["workers"].get<unsigned>();
  } catch (const Json::exception& e) {
    throw InputError(std::string("config: ") + e.what());
  }
  validate(c);
  return c;
}

Json sweep_config_to_json(const SweepConfig& c) {
  Json j;
  j["seed"] = c.seed;
  j["trials"] = c.trials;
  j["n"] = {c.n.lo, c.n.hi};
  j["m"] = {c.m.lo, c.m.hi};
  j["p"] = {c.p.lo, c.p.hi};
  j["N"] = c.length;
  j["L"] = c.depth;
  j["tol"] = {{"rank", c.tol.rank_rtol}, {"psd", c.tol.psd_tol}};
  Json which = Json::array();
  for (const Check w : c.which) which.push_back(check_name(w));
  j["which"] = std::move(which);
  j["spectral_radius_cap"] = c.spectral_radius_cap;
  j["controllability_floor"] = c.controllability_floor;
  j["eps"] = c.eps;
  j["workers"] = c.workers;
  return j;
}

std::string reports_to_csv(const std::vector<BoundReport>& reports,
                           const std::string& prefix_header, const std::string& prefix_values) {
  std::string out = prefix_header + "name,kind,verdict,margin,tol,n,m,p,N,L,r,seed,elapsed_ms,note\n";
  for (const auto& r : reports) {
    std::string note = r.note;
    std::replace(note.begin(), note.end(), ',', ';');
    out += prefix_values + r.name + "," + to_string(r.kind) + "," + to_string(r.verdict) + "," +
           num(r.margin) + "," + num(r.threshold) + "," + std::to_string(r.context.n) + "," +
           std::to_string(r.context.m) + "," + std::to_string(r.context.p) + "," +
           std::to_string(r.context.length) + "," + std::to_string(r.context.depth) + "," +
           std::to_string(r.context.relative_degree) + "," +
           (r.context.seed ? std::to_string(*r.context.seed) : std::string()) + "," +
           num(r.elapsed_ms) + "," + note + "\n";
  }
  return out;
}

StructuredExport export_structured(const StructuredSet& set, const LtiSystem& sys,
                                   std::optional<Eigen::Index> depth) {
  StructuredExport out;
  out.csv["d"] = matrix_to_csv(set.d.coeffs);
  out.csv["Gamma"] = matrix_to_csv(set.markov.stacked());
  out.csv["M"] = matrix_to_csv(set.M);
  out.csv["Dbar"] = matrix_to_csv(set.Dbar);
  out.csv["Gammabar"] = matrix_to_csv(set.Gammabar);
  Json meta;
  meta["n"] = sys.n();
  meta["m"] = sys.m();
  meta["p"] = sys.p();
  meta["L"] = depth ? Json(*depth) : Json(nullptr);
  meta["r"] = set.relaxed ? Json(set.relaxed->r) : Json(nullptr);
  Json blocks;
  blocks["Gamma"] = {{"block_rows", sys.p()}, {"block_cols", sys.m()}, {"count", sys.n() + 1}};
  blocks["M"] = {{"block_rows", sys.p()}, {"block_cols", sys.m()}, {"count", sys.n() + 1}};
  blocks["Gammabar"] = {{"block_rows", sys.p()}, {"block_cols", sys.m()},
                        {"grid", sys.n() + 1}};
  blocks["Dbar"] = {{"rows", sys.n() + 1}, {"cols", sys.n() + 1}};
  if (set.z) {
    out.csv["Z"] = matrix_to_csv(set.z->Z);
    out.csv["T"] = matrix_to_csv(set.z->T);
    out.csv["M_ext"] = matrix_to_csv(set.z->M_ext);
    blocks["Z"] = {{"top_rows", sys.n() + sys.m()},
                   {"bottom_rows", sys.m() * (*depth - 1)},
                   {"left_cols", sys.m() * (sys.n() + 1)},
                   {"cols", set.z->Z.cols()}};
    blocks["T"] = {{"rows", set.z->T.rows()}, {"cols", set.z->T.cols()}};
    if (set.z->rank_warning) meta["warning"] = *set.z->rank_warning;
  }
  if (set.relaxed) {
    out.csv["Mbar_r"] = matrix_to_csv(set.relaxed->M);
    out.csv["dbar_r"] = matrix_to_csv(set.relaxed->d);
    blocks["Mbar_r"] = {{"block_rows", sys.p()},
                        {"block_cols", sys.m()},
                        {"count", sys.n() + 1 - set.relaxed->r}};
  }
  meta["blocks"] = std::move(blocks);
  out.metadata = std::move(meta);
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + path + "'");
  out << contents;
}

}  // namespace wfl::io
