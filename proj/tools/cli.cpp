#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <map>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "qtm/qtm.hpp"

namespace qtm::cli {
namespace {

using json = nlohmann::json;

struct RunConfig {
  std::string subject;  // verify: strategy; dump: object
  std::string target;   // dump pom/gamma: strategy
  std::optional<int> n;
  int n_max = 20;
  std::optional<int> m;
  double theta = 0.0;
  std::optional<double> phase;
  std::optional<double> tol;
  bool degrees = false;
  std::string format;
  std::string out_path;
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string fmt12(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x == 0.0 ? 0.0 : x);
  return buf;
}

double angle(const RunConfig& c, double value) {
  return c.degrees ? value * std::numbers::pi / 180.0 : value;
}

int require_n(const RunConfig& c) {
  if (!c.n) throw UsageError("--n is required for this strategy");
  return *c.n;
}

json matrix_json(const ComplexMatrix& a, BasisTag basis) {
  json entries = json::array();
  for (const auto& z : a.data()) {
    entries.push_back({z.real() + 0.0, z.imag() + 0.0});
  }
  return {{"dim", a.dim()}, {"basis", to_string(basis)}, {"entries", std::move(entries)}};
}

// A strategy resolved from its command-line description, with the matching
// optimality report (reduced covariant conditions for multi strategies).
struct Resolved {
  std::string name;
  std::map<std::string, double> params;
  Pom pom;
  ComplexMatrix element0;
  OptimalityReport report;
  double score;
  BasisTag basis;
  std::optional<std::string> note;
};

Resolved resolve(const std::string& subject, const RunConfig& c) {
  const double theta = angle(c, c.theta);
  if (subject == "binary-opt" || subject == "binary-mv") {
    const int n = require_n(c);
    Pom pom = subject == "binary-opt" ? optimal_binary_pom(n, theta).pom : majority_voting_pom(n);
    const auto scores = binary_score_operators(n, theta);
    auto report = verify_optimality(pom, scores);
    const double score = average_score(pom, scores);
    ComplexMatrix e0 = pom.elements[0];
    return {subject, {{"N", n}, {"theta", theta}}, std::move(pom), std::move(e0), std::move(report),
            score, BasisTag::UpDown, std::nullopt};
  }
  if (subject == "binary-est") {
    const int n = require_n(c);
    const int M = c.m.value_or(n + 1);
    const double phase = c.phase ? angle(c, *c.phase) : std::numbers::pi / M;
    auto est = srm_estimation_pom(n, M, phase);
    const auto scores = binary_score_operators(n, theta, BasisTag::VBasis);
    auto report = verify_optimality(est.condensed, scores);
    const double score = average_score(est.condensed, scores);
    ComplexMatrix e0 = est.condensed.elements[0];
    return {subject,
            {{"N", n}, {"M", M}, {"phase", phase}, {"theta", theta}},
            std::move(est.condensed),
            std::move(e0),
            std::move(report),
            score,
            BasisTag::VBasis,
            std::nullopt};
  }

  auto covariant = [&](CovariantPom cp, std::optional<std::string> note,
                       std::map<std::string, double> extra) {
    auto report = covariant_optimality_check(cp.seed, cp.n, cp.M);
    Pom pom = cp.to_pom();
    const double score = average_score(pom, multi_score_operators(cp.n, cp.M));
    extra["N"] = cp.n;
    extra["M"] = cp.M;
    return Resolved{subject, std::move(extra), std::move(pom), cp.seed, std::move(report),
                    score, BasisTag::UpDown, std::move(note)};
  };

  if (subject == "multi-srm") {
    const int n = require_n(c);
    return covariant(srm_template_pom(n, c.m.value_or(n + 1)), std::nullopt, {});
  }
  if (subject == "multi-known:m3n3" || subject == "multi-known:m3n4") {
    auto k = known_pom(subject == "multi-known:m3n3" ? KnownCase::M3N3 : KnownCase::M3N4);
    return covariant(std::move(k.pom), std::nullopt, {{"closed_form_score", k.score}});
  }
  if (subject == "multi-fixedpoint") {
    const int n = require_n(c);
    if (!c.m) throw UsageError("--m is required for multi-fixedpoint");
    auto r = covariant_pom_optimizer(n, *c.m);
    std::optional<std::string> note;
    if (!r.converged) note = "optimizer hit the iteration limit; best-so-far POM reported";
    return covariant(std::move(r.pom), note,
                     {{"iterations", r.iterations}, {"converged", r.converged ? 1.0 : 0.0}});
  }
  throw UsageError("unknown strategy '" + subject + "'");
}

void emit(const RunConfig& c, const std::string& text, std::ostream& out) {
  if (c.out_path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(c.out_path);
  if (!f) throw UsageError("cannot open output file " + c.out_path);
  f << text;
}

int cmd_fig1(const RunConfig& c, std::ostream& out) {
  if (c.n_max < 1 || c.n_max > 20) throw UsageError("--n-max must lie in [1, 20]");
  const double theta = angle(c, c.theta);
  struct Row {
    int n;
    double opt, mv, est;
  };
  std::vector<Row> rows;
  for (int n = 1; n <= c.n_max; ++n) {
    rows.push_back({n, optimal_binary_pom(n, theta).score.score,
                    majority_voting_score(n, theta).score, best_estimation_score(n, theta).score});
  }

  std::ostringstream s;
  const std::string format = c.format.empty() ? "csv" : c.format;
  if (format == "csv") {
    s << "N,S_opt,S_mv,S_est\n";
    for (const auto& r : rows) {
      s << r.n << ',' << fmt12(r.opt) << ',' << fmt12(r.mv) << ',' << fmt12(r.est) << '\n';
    }
  } else if (format == "json") {
    json j = {{"theta", theta}, {"rows", json::array()}};
    for (const auto& r : rows) {
      j["rows"].push_back({{"N", r.n}, {"S_opt", r.opt}, {"S_mv", r.mv}, {"S_est", r.est}});
    }
    s << j.dump(2) << '\n';
  } else {
    s << std::setw(4) << "N" << std::setw(18) << "S_opt" << std::setw(18) << "S_mv"
      << std::setw(18) << "S_est" << '\n';
    for (const auto& r : rows) {
      s << std::setw(4) << r.n << std::setw(18) << fmt12(r.opt) << std::setw(18) << fmt12(r.mv)
        << std::setw(18) << fmt12(r.est) << '\n';
    }
  }
  emit(c, s.str(), out);
  return kOk;
}

int cmd_verify(const RunConfig& c, std::ostream& out) {
  if (c.tol && !(*c.tol > 0.0)) throw UsageError("--tol must be positive");
  const double herm_tol = c.tol.value_or(1e-10);
  const double gap_tol = c.tol.value_or(1e-9);
  const auto r = resolve(c.subject, c);
  const bool herm = r.report.hermitian(herm_tol);
  const bool dom = r.report.dominant(gap_tol);

  std::ostringstream s;
  if (c.format == "json") {
    json j = {{"strategy", r.name},
              {"parameters", r.params},
              {"score", r.score},
              {"hermiticity_residual", r.report.hermiticity_residual},
              {"min_eig_gaps", r.report.min_eig_gaps},
              {"hermitian", herm},
              {"dominant", dom},
              {"optimal", herm && dom},
              {"gamma", matrix_json(r.report.gamma, r.basis)}};
    if (r.note) j["note"] = *r.note;
    s << j.dump(2) << '\n';
  } else {
    s << "strategy: " << r.name << '\n';
    for (const auto& [k, v] : r.params) s << "  " << k << " = " << fmt12(v) << '\n';
    s << "score: " << fmt12(r.score) << '\n';
    s << "gamma hermiticity residual: " << r.report.hermiticity_residual
      << (herm ? "  [pass]" : "  [FAIL]") << '\n';
    for (std::size_t j = 0; j < r.report.min_eig_gaps.size(); ++j) {
      s << "min eig(Gamma - W_" << j << "): " << r.report.min_eig_gaps[j] << '\n';
    }
    s << "dominance condition: " << (dom ? "pass" : "FAIL") << '\n';
    if (r.note) s << "note: " << *r.note << '\n';
    s << "verdict: " << (herm && dom ? "optimal" : "not optimal") << '\n';
  }
  emit(c, s.str(), out);
  return herm && dom ? kOk : kSuboptimal;
}

int cmd_dump(const RunConfig& c, std::ostream& out) {
  const std::string& obj = c.subject;
  const double theta = angle(c, c.theta);
  json j;
  if (obj == "w-diff") {
    j = matrix_json(binary_diff_operator(require_n(c), theta), BasisTag::UpDown);
  } else if (obj == "w0" || obj == "w1") {
    j = matrix_json(binary_score_operator(require_n(c), theta, obj == "w0" ? 0 : 1).matrix,
                    BasisTag::UpDown);
  } else if (obj.rfind("w-multi:", 0) == 0) {
    if (!c.m) throw UsageError("--m is required for w-multi");
    int idx = 0;
    try {
      idx = std::stoi(obj.substr(8));
    } catch (const std::exception&) {
      throw UsageError("bad template index in '" + obj + "'");
    }
    j = matrix_json(multi_score_operator(require_n(c), *c.m, idx).matrix, BasisTag::UpDown);
  } else if (obj == "shift") {
    if (!c.m) throw UsageError("--m is required for shift");
    j = matrix_json(shift_operator(require_n(c), *c.m).matrix, BasisTag::UpDown);
  } else if (obj == "p") {
    j = matrix_json(optimal_binary_pom(require_n(c), theta).diagonalizer, BasisTag::UpDown);
  } else if (obj == "pom" || obj == "gamma") {
    if (c.target.empty()) throw UsageError("dump " + obj + " needs a strategy");
    const auto r = resolve(c.target, c);
    j = matrix_json(obj == "pom" ? r.element0 : r.report.gamma, r.basis);
  } else {
    throw UsageError("unknown dump object '" + obj + "'");
  }
  emit(c, j.dump() + "\n", out);
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig c;
  CLI::App app{"Quantum template matching of qubit states from N copies", "qtm"};
  app.require_subcommand(1);

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--n", c.n, "number of input copies N")->check(CLI::Range(1, kMaxCopies));
    sub->add_option("--m", c.m, "number of templates / estimates M")->check(CLI::PositiveNumber);
    sub->add_option("--theta", c.theta, "template angle (radians unless --degrees)");
    sub->add_option("--phase", c.phase, "estimation phase offset (radians unless --degrees)");
    sub->add_option("--tol", c.tol, "optimality tolerance");
    sub->add_option("--format", c.format, "output format")
        ->check(CLI::IsMember({"csv", "json", "pretty"}));
    sub->add_option("--out", c.out_path, "write output to PATH instead of stdout");
    sub->add_flag("--degrees", c.degrees, "interpret angles in degrees");
  };

  auto* fig1 = app.add_subcommand("fig1", "score versus N for the three binary strategies");
  add_common(fig1);
  fig1->add_option("--n-max", c.n_max, "largest N in the table (1..20)");

  auto* verify = app.add_subcommand("verify", "check the optimality conditions of a strategy");
  add_common(verify);
  verify->add_option("strategy", c.subject,
                     "binary-opt | binary-mv | binary-est | multi-srm | multi-known:m3n3 | "
                     "multi-known:m3n4 | multi-fixedpoint")
      ->required();

  auto* dump = app.add_subcommand("dump", "print an operator as JSON");
  add_common(dump);
  dump->add_option("object", c.subject, "w-diff | w0 | w1 | w-multi:<m> | shift | p | pom | gamma")
      ->required();
  dump->add_option("strategy", c.target, "strategy for pom / gamma");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "qtm: " << e.what() << '\n';
    return kUsage;
  }

  try {
    if (fig1->parsed()) return cmd_fig1(c, out);
    if (verify->parsed()) return cmd_verify(c, out);
    return cmd_dump(c, out);
  } catch (const UsageError& e) {
    err << "qtm: " << e.what() << '\n';
  } catch (const qtm::Error& e) {
    err << "qtm: " << e.what() << '\n';
  }
  return kUsage;
}

}  // namespace qtm::cli
