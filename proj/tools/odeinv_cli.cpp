#include <atomic>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "odeinv/corpus.hpp"
#include "odeinv/report.hpp"
#include "odeinv/special.hpp"

namespace {

using namespace odeinv;

constexpr int kExitOk = 0;
constexpr int kExitFailedCheck = 1;
constexpr int kExitUsage = 2;

struct CommonFlags {
  std::string format = "text";
  uint64_t seed = 0;
  double tolerance = 1e-9;
  bool timing = false;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw KernelError("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// ODE file: lines `P = <expr>` .. `S = <expr>`, '#' comments, each of the
/// four keys exactly once.
OdeCoefficients parse_ode_file(const std::string& text) {
  std::map<std::string, Expr> seen;
  std::istringstream in(text);
  std::string line;
  size_t offset = 0;
  while (std::getline(in, line)) {
    size_t line_offset = offset;
    offset += line.size() + 1;
    size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ParseError("expected 'P|Q|R|S = expression'", line_offset);
    std::string key = line.substr(0, eq);
    key.erase(0, key.find_first_not_of(" \t"));
    key.erase(key.find_last_not_of(" \t") + 1);
    if (key != "P" && key != "Q" && key != "R" && key != "S")
      throw ParseError("unknown coefficient '" + key + "'", line_offset);
    if (seen.count(key))
      throw ParseError("coefficient '" + key + "' given twice", line_offset);
    seen.emplace(key, parse(line.substr(eq + 1)));
  }
  for (const char* k : {"P", "Q", "R", "S"})
    if (!seen.count(k))
      throw ParseError(std::string("missing coefficient '") + k + "'", 0);
  return {seen.at("P"), seen.at("Q"), seen.at("R"), seen.at("S")};
}

std::optional<std::pair<Rational, Rational>> parse_point(
    const std::string& text) {
  if (text.empty()) return std::nullopt;
  size_t comma = text.find(',');
  if (comma == std::string::npos)
    throw KernelError("--point expects X,Y with rational components");
  auto num = [](const std::string& s) {
    Expr e = parse(s);
    Value v = eval(e, 0, 0);
    if (!v.exact) throw KernelError("--point components must be rational");
    return v.q;
  };
  return std::make_pair(num(text.substr(0, comma)), num(text.substr(comma + 1)));
}

int emit(const RunReport& report, const CommonFlags& flags, long elapsed_ms) {
  RunReport out = report;
  out.timing_ms = flags.timing ? elapsed_ms : 0;
  if (flags.format == "json")
    std::cout << report_to_json(out);
  else
    std::cout << report_to_text(out);
  return out.all_passed() ? kExitOk : kExitFailedCheck;
}

/// Exact string for grade-0 scalars, numeric value otherwise.
ScalarEntry scalar_at_point(const std::string& name, const FExt& value,
                            const std::pair<Rational, Rational>& pt) {
  auto sg = value.single_grade();
  if (value.is_zero() || (sg && sg->first == 0)) {
    RatFunc rf = value.coeff(0);
    auto bind = [&](const AtomPtr& a) -> Rational {
      if (a == atom_x()) return pt.first;
      if (a == atom_y()) return pt.second;
      throw EvalError("unbound symbol in scalar");
    };
    return {name, rf_eval(rf, bind).get_str(), "exact"};
  }
  auto bind = [&](const AtomPtr& a) -> double {
    if (a == atom_x()) return pt.first.get_d();
    if (a == atom_y()) return pt.second.get_d();
    throw EvalError("unbound symbol in scalar");
  };
  std::ostringstream os;
  os.precision(17);
  os << value.eval_d(bind);
  return {name, os.str(), "numeric"};
}

ScalarEntry scalar_exact(const std::string& name, const FExt& value) {
  return {name, value.to_string(), "exact"};
}

void append_sd_scalars(RunReport& rep, const SdCore& core, const SdScalars& s,
                       const std::optional<std::pair<Rational, Rational>>& pt) {
  auto add = [&](const std::string& n, const FExt& v) {
    rep.scalars_sd.push_back(pt ? scalar_at_point(n, v, *pt)
                                : scalar_exact(n, v));
  };
  rep.scalars_sd.push_back(
      {"F5", pt ? rf_eval(core.F5,
                          [&](const AtomPtr& a) -> Rational {
                            if (a == atom_x()) return pt->first;
                            if (a == atom_y()) return pt->second;
                            throw EvalError("unbound symbol");
                          })
                      .get_str()
                : core.F5.to_string(),
       "exact"});
  add("I1", s.I1);
  add("I2", s.I2);
  add("I3", s.I3);
  add("I4", s.I4);
  add("I5", s.I5);
  add("I6", s.I6);
  add("I7", s.I7);
  add("I8", s.I8);
  add("L", s.L);
  add("K", s.K);
}

void append_bgd_scalars(RunReport& rep, const BgdScalars& s,
                        const std::optional<std::pair<Rational, Rational>>& pt) {
  auto add = [&](const std::string& n, const FExt& v) {
    rep.scalars_bgd.push_back(pt ? scalar_at_point(n, v, *pt)
                                 : scalar_exact(n, v));
  };
  add("I1_bgd", s.IB1);
  add("I2_bgd", s.IB2);
  add("I3_bgd", s.IB3);
  add("I4_bgd", s.IB4);
  add("Omega1", s.Omega1);
  add("Omega2", s.Omega2);
}

// --- subcommand bodies --------------------------------------------------------

int run_classify(const std::string& ode_path, const std::string& point_text,
                 const CommonFlags& flags) {
  auto t0 = std::chrono::steady_clock::now();
  OdeCoefficients ode = parse_ode_file(read_file(ode_path));
  Verdict v = classify(ode, parse_point(point_text), flags.seed);
  RunReport rep;
  rep.verdict = v.describe();
  long ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                std::chrono::steady_clock::now() - t0)
                .count();
  return emit(rep, flags, ms);
}

int run_invariants(const std::string& ode_path, const std::string& scheme,
                   const std::string& point_text, const CommonFlags& flags) {
  auto t0 = std::chrono::steady_clock::now();
  OdeCoefficients ode = parse_ode_file(read_file(ode_path));
  auto pt = parse_point(point_text);
  Verdict v = classify(ode, pt, flags.seed);
  RunReport rep;
  rep.verdict = v.describe();
  if (v.kind != VerdictKind::GeneralPosition) {
    std::cerr << "scalar invariants need general position (F^5 != 0); "
                 "verdict is "
              << rep.verdict << "\n";
    return kExitFailedCheck;
  }
  OdeRf o = ode_rf(ode);
  if (scheme == "sd" || scheme == "both") {
    SdCore core = frame_and_connection(o);
    SdScalars s = scalars_explicit(core, o);
    append_sd_scalars(rep, core, s, pt);
  }
  if (scheme == "bgd" || scheme == "both") {
    BgdChain chain = bgd_chain(o);
    BgdOperators ops = bgd_operators(chain, o);
    BgdScalars s = bgd_scalars(chain, ops);
    append_bgd_scalars(rep, s, pt);
  }
  long ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                std::chrono::steady_clock::now() - t0)
                .count();
  return emit(rep, flags, ms);
}

int run_compare(const std::string& ode_path, const CommonFlags& flags) {
  auto t0 = std::chrono::steady_clock::now();
  OdeCoefficients ode = parse_ode_file(read_file(ode_path));
  RunReport rep;
  rep.verdict = classify(ode, std::nullopt, flags.seed).describe();
  rep.identities = verify_identities(ode, flags.seed, flags.tolerance);
  long ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                std::chrono::steady_clock::now() - t0)
                .count();
  return emit(rep, flags, ms);
}

int run_transform(const std::string& ode_path, const std::string& map_path,
                  const CommonFlags& flags) {
  OdeCoefficients ode = parse_ode_file(read_file(ode_path));
  PointTransformation t = PointTransformation::parse_file(read_file(map_path));
  validate_transformation(t, flags.seed, 20, flags.tolerance);
  OdeCoefficients out = pullback(ode, t);
  if (flags.format == "json") {
    nlohmann::ordered_json j;
    j["P"] = normalize(out.P).to_string();
    j["Q"] = normalize(out.Q).to_string();
    j["R"] = normalize(out.R).to_string();
    j["S"] = normalize(out.S).to_string();
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << "P = " << normalize(out.P).to_string() << "\n"
              << "Q = " << normalize(out.Q).to_string() << "\n"
              << "R = " << normalize(out.R).to_string() << "\n"
              << "S = " << normalize(out.S).to_string() << "\n";
  }
  return kExitOk;
}

int run_check_weights(const std::string& ode_path, const std::string& map_path,
                      int points, const CommonFlags& flags) {
  auto t0 = std::chrono::steady_clock::now();
  OdeCoefficients ode = parse_ode_file(read_file(ode_path));
  PointTransformation t = PointTransformation::parse_file(read_file(map_path));
  RunReport rep;
  rep.verdict = classify(ode, std::nullopt, flags.seed).describe();
  rep.identities =
      check_transformation_laws(ode, t, points, flags.seed, flags.tolerance);
  long ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                std::chrono::steady_clock::now() - t0)
                .count();
  return emit(rep, flags, ms);
}

int run_special_verify(const CommonFlags& flags) {
  auto t0 = std::chrono::steady_clock::now();
  SpecialFrame frame = build_special();
  RunReport rep;
  rep.verdict = "SpecialCoordinates";
  rep.identities = frame.build_checks;
  auto reduced = verify_reduced_forms(frame);
  rep.identities.insert(rep.identities.end(), reduced.begin(), reduced.end());
  auto theorems = crosscheck_theorems(frame);
  rep.identities.insert(rep.identities.end(), theorems.begin(), theorems.end());
  long ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                std::chrono::steady_clock::now() - t0)
                .count();
  return emit(rep, flags, ms);
}

int run_fuzz(int trials, int degree, const CommonFlags& flags) {
  auto t0 = std::chrono::steady_clock::now();
  auto odes = random_polynomial_odes(flags.seed, trials, degree);
  std::vector<std::vector<IdentityReport>> results(odes.size());
  std::vector<std::string> verdicts(odes.size());

  // Trials are independent; fan them out and assemble in trial order.
  unsigned workers = std::max(1u, std::thread::hardware_concurrency());
  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (;;) {
      size_t i = next.fetch_add(1);
      if (i >= odes.size()) break;
      verdicts[i] = classify(odes[i], std::nullopt, flags.seed).describe();
      results[i] = verify_identities(odes[i], flags.seed, flags.tolerance);
    }
  };
  std::vector<std::thread> pool;
  for (unsigned i = 1; i < workers; ++i) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  RunReport rep;
  rep.verdict = "FuzzRun";
  for (size_t i = 0; i < odes.size(); ++i) {
    char tag[16];
    std::snprintf(tag, sizeof(tag), "t%03zu_", i);
    rep.scalars_sd.push_back({std::string(tag) + "verdict", verdicts[i], "exact"});
    for (auto& r : results[i]) {
      r.name = tag + r.name;
      rep.identities.push_back(std::move(r));
    }
  }
  long ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                std::chrono::steady_clock::now() - t0)
                .count();
  return emit(rep, flags, ms);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Point-transformation invariants of y'' = P + 3Q y' + 3R y'^2 + S y'^3: "
      "two complete invariant families, classification, and mechanical "
      "verification of every identity relating them"};
  app.require_subcommand(1);

  CommonFlags flags;
  app.add_option("--format", flags.format, "Output format: text or json")
      ->check(CLI::IsMember({"text", "json"}));
  app.add_option("--seed", flags.seed, "Seed for every randomized choice");
  app.add_option("--tolerance", flags.tolerance,
                 "Relative tolerance for numeric paths");
  app.add_flag("--timing", flags.timing,
               "Report real wall-clock timing in JSON (off by default so "
               "identical runs stay byte-identical)");

  std::string ode_path, map_path, point_text, scheme = "both";
  int points = 20, trials = 25, degree = 2;

  auto* classify_cmd = app.add_subcommand("classify", "Classification verdict");
  classify_cmd->add_option("ode", ode_path, "ODE file")->required();
  classify_cmd->add_option("--point", point_text, "Evaluation point X,Y");

  auto* inv_cmd = app.add_subcommand("invariants", "Scalar invariants");
  inv_cmd->add_option("ode", ode_path, "ODE file")->required();
  inv_cmd->add_option("--scheme", scheme, "sd, bgd or both")
      ->check(CLI::IsMember({"sd", "bgd", "both"}));
  inv_cmd->add_option("--point", point_text, "Evaluation point X,Y");

  auto* cmp_cmd = app.add_subcommand("compare", "Full identity suite");
  cmp_cmd->add_option("ode", ode_path, "ODE file")->required();

  auto* tr_cmd = app.add_subcommand("transform", "Pull the equation back");
  tr_cmd->add_option("ode", ode_path, "ODE file")->required();
  tr_cmd->add_option("map", map_path, "Transformation file")->required();

  auto* cw_cmd = app.add_subcommand("check-weights",
                                    "Numeric transformation-law checks");
  cw_cmd->add_option("ode", ode_path, "ODE file")->required();
  cw_cmd->add_option("map", map_path, "Transformation file")->required();
  cw_cmd->add_option("--points", points, "Sample points");

  auto* sv_cmd = app.add_subcommand("special-verify",
                                    "Special-coordinates identity suites");

  auto* fz_cmd = app.add_subcommand("fuzz", "Random equations, full suite");
  fz_cmd->add_option("--trials", trials, "Number of random equations");
  fz_cmd->add_option("--degree", degree, "Coefficient degree bound");

  CLI11_PARSE(app, argc, argv);

  try {
    if (classify_cmd->parsed()) return run_classify(ode_path, point_text, flags);
    if (inv_cmd->parsed())
      return run_invariants(ode_path, scheme, point_text, flags);
    if (cmp_cmd->parsed()) return run_compare(ode_path, flags);
    if (tr_cmd->parsed()) return run_transform(ode_path, map_path, flags);
    if (cw_cmd->parsed())
      return run_check_weights(ode_path, map_path, points, flags);
    if (sv_cmd->parsed()) return run_special_verify(flags);
    if (fz_cmd->parsed()) return run_fuzz(trials, degree, flags);
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const KernelError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
