// Copyright 2026 The spanlift Authors
// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end. One command per process:
//
//   spanlift check PROOF.json [--left P --right P] [--strict]
//   spanlift divergence --family renyi --param 2 A.json B.json
//   spanlift oracle LEFT.pw RIGHT.pw --inputs PAIRS.json --flavor zcdp ...
//   spanlift account PLAN.json
//   spanlift compare-foldg --k 100 --sigma 10 --delta1 1e-7 --delta2 1e-5
//
// Exit codes: 0 accepted / within budget, 1 rejected / budget exceeded,
// 2 I/O or parse trouble. Reports go to stdout (or --out) as JSON; stderr
// carries diagnostics only.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "spanlift/spanlift.hpp"

namespace {

using spanlift::Json;

// ---------------------------------------------------------------------------
// Config file: plain "key = value" lines, '#' comments, repeatable keys.
// Flags given on the command line win over file values.

std::map<std::string, std::vector<std::string>> load_config(
    const std::string& path) {
  std::map<std::string, std::vector<std::string>> kv;
  std::istringstream in(spanlift::read_text_file(path));
  std::string line;
  int lineno = 0;
  auto trim = [](std::string s) {
    const char* ws = " \t\r";
    s.erase(0, s.find_first_not_of(ws));
    auto last = s.find_last_not_of(ws);
    s.erase(last == std::string::npos ? 0 : last + 1);
    return s;
  };
  while (std::getline(in, line)) {
    ++lineno;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    auto eq = t.find('=');
    if (eq == std::string::npos)
      spanlift::fail(spanlift::Err::kSyntaxError,
                     path + ":" + std::to_string(lineno) +
                         ": expected 'key = value'");
    kv[trim(t.substr(0, eq))].push_back(trim(t.substr(eq + 1)));
  }
  return kv;
}

std::string config_last(
    const std::map<std::string, std::vector<std::string>>& kv,
    const std::string& key, const std::string& fallback) {
  auto it = kv.find(key);
  return it == kv.end() ? fallback : it->second.back();
}

// Rationals on the command line: "n", "n/d", or a decimal that gets snapped
// to the JSON quantum.
spanlift::Rat rat_from_cli(const std::string& s, const std::string& where) {
  try {
    return spanlift::rat_from_string(s, where);
  } catch (const spanlift::Error&) {
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != s.size())
      spanlift::fail(spanlift::Err::kSyntaxError,
                     where + ": bad rational '" + s + "'");
    return spanlift::round_to_quantum(v, spanlift::kJsonQuantum);
  }
}

// --grid site=center,halfwidth,bins
void add_grid_flag(const std::string& flag, spanlift::InterpConfig& cfg) {
  auto eq = flag.find('=');
  if (eq == std::string::npos)
    spanlift::fail(spanlift::Err::kSyntaxError,
                   "--grid expects site=center,halfwidth,bins");
  const std::string site = flag.substr(0, eq);
  std::vector<std::string> parts;
  std::string rest = flag.substr(eq + 1);
  std::istringstream ss(rest);
  std::string piece;
  while (std::getline(ss, piece, ',')) parts.push_back(piece);
  if (site.empty() || parts.size() != 3)
    spanlift::fail(spanlift::Err::kSyntaxError,
                   "--grid expects site=center,halfwidth,bins");
  spanlift::GridSpec g;
  g.center = rat_from_cli(parts[0], "--grid " + site);
  g.halfwidth = rat_from_cli(parts[1], "--grid " + site);
  try {
    g.bins = std::stoll(parts[2]);
  } catch (const std::exception&) {
    spanlift::fail(spanlift::Err::kSyntaxError,
                   "--grid " + site + ": bad bin count '" + parts[2] + "'");
  }
  g.validate();
  cfg.grids[site] = g;
}

void emit(const Json& report, const std::string& out_path) {
  const std::string text = report.dump(2) + "\n";
  if (out_path.empty()) {
    std::cout << text;
  } else {
    spanlift::write_text_file(out_path, text);
  }
}

// ---------------------------------------------------------------------------
// check

int cmd_check(const std::string& proof_path, std::string left_override,
              std::string right_override, bool strict,
              const std::string& out_path) {
  spanlift::ProofFile pf =
      spanlift::proof_from_json(spanlift::load_json_file(proof_path), proof_path);
  if (!left_override.empty()) pf.left.path = std::move(left_override);
  if (!right_override.empty()) pf.right.path = std::move(right_override);
  const std::string base = spanlift::dir_of(proof_path);
  spanlift::Program left = spanlift::load_program_ref(pf.left, base);
  spanlift::Program right = spanlift::load_program_ref(pf.right, base);

  spanlift::Certificate cert;
  const spanlift::Judgment& root = pf.derivation.conclusion;
  if (root.ctx.vars != left.ctx.vars || root.ctx.vars != right.ctx.vars ||
      !spanlift::cmd_equal(root.left, left.body) ||
      !spanlift::cmd_equal(root.right, right.body)) {
    cert.accepted = false;
    cert.reject_path = "root";
    cert.reject_code = spanlift::Err::kBadProof;
    cert.reject_detail = "derivation does not conclude about the referenced programs";
  } else {
    cert = spanlift::check_derivation(pf.derivation, {strict});
  }
  emit(spanlift::certificate_to_json(cert, strict), out_path);
  return cert.accepted ? 0 : 1;
}

// ---------------------------------------------------------------------------
// divergence

int cmd_divergence(const std::string& family, double param,
                   const std::string& a_path, const std::string& b_path,
                   const std::string& out_path) {
  spanlift::SubDist a = spanlift::load_dist_file(a_path);
  spanlift::SubDist b = spanlift::load_dist_file(b_path);
  spanlift::DivergenceSpec spec;
  std::optional<spanlift::SupCertificate> cert;
  spanlift::ExtReal value(0.0);
  if (family == "dp") {
    spec = spanlift::DivergenceSpec::dp(param);
    value = spanlift::dp_divergence(param, a, b);
  } else if (family == "renyi") {
    spec = spanlift::DivergenceSpec::renyi(param);
    value = spanlift::renyi_divergence(param, a, b);
  } else if (family == "zcdp") {
    spec = spanlift::DivergenceSpec::zcdp(param);
    auto c = spanlift::zcdp_divergence(param, a, b);
    value = c.value;
    cert = c;
  } else if (family == "tcdp") {
    spec = spanlift::DivergenceSpec::tcdp(param);
    auto c = spanlift::tcdp_divergence(param, a, b);
    value = c.value;
    cert = c;
  } else {
    spanlift::fail(spanlift::Err::kSyntaxError,
                   "--family must be dp, renyi, zcdp, or tcdp");
  }
  emit(spanlift::divergence_record(spec, value, cert), out_path);
  return 0;
}

// ---------------------------------------------------------------------------
// oracle

spanlift::Flavor flavor_from_flags(const std::string& kind, double eps,
                                   double delta, double alpha, double xi,
                                   double omega, double rho) {
  if (kind == "dp") return spanlift::Flavor::dp(eps, delta);
  if (kind == "rdp") return spanlift::Flavor::rdp(alpha, rho);
  if (kind == "zcdp") return spanlift::Flavor::zcdp(xi, rho);
  if (kind == "tcdp") return spanlift::Flavor::tcdp(omega, rho);
  spanlift::fail(spanlift::Err::kSyntaxError,
                 "--flavor must be dp, rdp, zcdp, or tcdp");
}

int cmd_oracle(const std::string& left_path, const std::string& right_path,
               const std::string& inputs_path, const spanlift::Flavor& flavor,
               std::string pre_text, std::string post_text,
               const spanlift::InterpConfig& cfg, const std::string& out_path) {
  spanlift::Program left = spanlift::parse_program(spanlift::read_text_file(left_path));
  spanlift::typecheck_program(left);
  spanlift::Program right = spanlift::parse_program(spanlift::read_text_file(right_path));
  spanlift::typecheck_program(right);
  if (left.ctx.vars != right.ctx.vars)
    spanlift::fail(spanlift::Err::kDomainMismatch,
                   "programs must declare identical variables");

  Json inputs_json = spanlift::load_json_file(inputs_path);
  // The inputs file may declare the relational pre/post it was built for;
  // explicit flags win.
  if (pre_text.empty() && inputs_json.contains("pre"))
    pre_text = inputs_json["pre"].get<std::string>();
  if (post_text.empty() && inputs_json.contains("post"))
    post_text = inputs_json["post"].get<std::string>();
  if (post_text.empty())
    spanlift::fail(spanlift::Err::kSyntaxError,
                   "no post-condition: pass --post or put \"post\" in the inputs file");

  spanlift::Judgment j;
  j.ctx = left.ctx;
  j.left = left.body;
  j.right = right.body;
  j.pre = pre_text.empty() ? spanlift::Assertion::truth()
                           : spanlift::parse_assertion(pre_text, j.ctx);
  j.post = spanlift::parse_assertion(post_text, j.ctx);
  j.flavor = flavor;

  auto pairs = spanlift::input_pairs_from_json(inputs_json, j.ctx, inputs_path);
  spanlift::ValidationReport rep = spanlift::empirical_validate(j, pairs, cfg);
  Json out = spanlift::validation_report_to_json(rep);
  out["flavor"] = spanlift::flavor_to_json(flavor);
  out["pairs"] = pairs.size();
  emit(out, out_path);
  return rep.pass ? 0 : 1;
}

// ---------------------------------------------------------------------------
// account / compare-foldg

int cmd_account(const std::string& plan_path, const std::string& out_path) {
  spanlift::CompositionPlan plan =
      spanlift::plan_from_json(spanlift::load_json_file(plan_path), plan_path);
  spanlift::AccountReport rep = spanlift::evaluate_plan(plan);
  emit(spanlift::account_report_to_json(rep), out_path);
  return 0;
}

int cmd_compare_foldg(std::int64_t k, double sigma, double delta1,
                      double delta2, const std::string& out_path) {
  spanlift::FoldGComparison cmp =
      spanlift::compare_foldg(k, sigma, delta1, delta2);
  emit(spanlift::foldg_to_json(cmp), out_path);
  return cmp.zcdp_wins ? 0 : 1;
}

int run(int argc, char** argv) {
  CLI::App app{"spanlift: divergence calculator, proof checker, and privacy accountant"};
  app.require_subcommand(1);
  app.fallthrough();  // let --out/--format/--config appear after the subcommand
  app.set_version_flag("--version", std::string(SPANLIFT_VERSION));

  std::string config_path;
  app.add_option("--config", config_path,
                 "key = value config file; flags override file values");

  // Config pre-pass so file values act as defaults for every flag below.
  std::map<std::string, std::vector<std::string>> conf;
  for (int i = 1; i + 1 < argc; ++i)
    if (std::string(argv[i]) == "--config") conf = load_config(argv[i + 1]);

  std::string out_path = config_last(conf, "out", "");
  std::string format = config_last(conf, "format", "json");
  app.add_option("--out", out_path, "write the report here instead of stdout");
  app.add_option("--format", format, "report format (only json)");

  bool strict = config_last(conf, "strict", "false") == "true";
  std::int64_t fuel = std::stoll(config_last(conf, "fuel", "64"));
  std::vector<std::string> grid_flags;
  if (auto it = conf.find("grid"); it != conf.end()) grid_flags = it->second;

  // check
  auto* check = app.add_subcommand("check", "check a proof file");
  std::string proof_path, left_override, right_override;
  check->add_option("proof", proof_path, "proof JSON file")->required();
  check->add_option("--left", left_override, "override the left program path");
  check->add_option("--right", right_override, "override the right program path");
  check->add_flag("--strict", strict, "reject rather than record assumptions");

  // divergence
  auto* divergence = app.add_subcommand("divergence", "divergence between two distributions");
  std::string family;
  double param = 0;
  std::string dist_a, dist_b;
  divergence->add_option("--family", family, "dp | renyi | zcdp | tcdp")->required();
  divergence->add_option("--param", param, "eps / alpha / xi / omega")->required();
  divergence->add_option("a", dist_a, "first distribution JSON")->required();
  divergence->add_option("b", dist_b, "second distribution JSON")->required();

  // oracle
  auto* oracle = app.add_subcommand("oracle", "run both programs and compare against a budget");
  std::string left_path, right_path, inputs_path, flavor_kind = "dp";
  std::string pre_text, post_text;
  double eps = 0, delta = 0, alpha = 2, xi = 0, omega = 2, rho = 0;
  oracle->add_option("left", left_path, "left program")->required();
  oracle->add_option("right", right_path, "right program")->required();
  oracle->add_option("--inputs", inputs_path, "input-pair JSON file")->required();
  oracle->add_option("--flavor", flavor_kind, "dp | rdp | zcdp | tcdp")->required();
  oracle->add_option("--eps", eps, "dp epsilon");
  oracle->add_option("--delta", delta, "dp delta");
  oracle->add_option("--alpha", alpha, "rdp order");
  oracle->add_option("--xi", xi, "zcdp offset");
  oracle->add_option("--omega", omega, "tcdp order cap");
  oracle->add_option("--rho", rho, "rdp/zcdp/tcdp rho");
  oracle->add_option("--pre", pre_text, "relational pre-condition");
  oracle->add_option("--post", post_text, "relational post-condition");
  oracle->add_option("--fuel", fuel, "loop budget per program run");
  oracle->add_option("--grid", grid_flags, "site=center,halfwidth,bins (repeatable)");

  // account
  auto* account = app.add_subcommand("account", "evaluate a composition plan");
  std::string plan_path;
  account->add_option("plan", plan_path, "plan JSON file")->required();

  // compare-foldg
  auto* foldg = app.add_subcommand("compare-foldg", "concentrated vs advanced composition");
  std::int64_t k = 100;
  double sigma = 10, delta1 = 1e-7, delta2 = 1e-5;
  foldg->add_option("--k", k, "number of iterations")->required();
  foldg->add_option("--sigma", sigma, "gaussian noise scale")->required();
  foldg->add_option("--delta1", delta1, "per-step delta for the baseline");
  foldg->add_option("--delta2", delta2, "advanced-composition slack delta");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);  // prints help text or the parse error
    return code == 0 ? 0 : 2;
  }

  if (format != "json")
    spanlift::fail(spanlift::Err::kInvalidParam, "--format supports only json");

  if (*check)
    return cmd_check(proof_path, left_override, right_override, strict, out_path);
  if (*divergence)
    return cmd_divergence(family, param, dist_a, dist_b, out_path);
  if (*oracle) {
    spanlift::InterpConfig cfg;
    cfg.fuel = fuel;
    for (const std::string& g : grid_flags) add_grid_flag(g, cfg);
    cfg.validate();
    spanlift::Flavor flavor =
        flavor_from_flags(flavor_kind, eps, delta, alpha, xi, omega, rho);
    return cmd_oracle(left_path, right_path, inputs_path, flavor, pre_text,
                      post_text, cfg, out_path);
  }
  if (*account) return cmd_account(plan_path, out_path);
  if (*foldg) return cmd_compare_foldg(k, sigma, delta1, delta2, out_path);
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const spanlift::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
