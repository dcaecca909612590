// turing1: classify single-diffuser reaction-diffusion systems, export root
// loci and (gamma, k) capability sweeps, and run 1-D pattern simulations.
//
// Exit codes: analyze reports the verdict (0 Stable, 10 TypeI, 11 TypeII,
// 12 NotTuring); every command uses 2 for invalid input and simulate uses 3
// when the solution diverges. With --json, stdout carries exactly one JSON
// document; diagnostics go to stderr.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "turing1/classify.hpp"
#include "turing1/grayscott.hpp"
#include "turing1/model.hpp"
#include "turing1/pdesim.hpp"
#include "turing1/support.hpp"

using nlohmann::ordered_json;
using namespace turing1;

namespace {

constexpr const char* kVersion = "0.1.0";

// ---------------------------------------------------------------- manifest

struct Manifest {
  bool enabled = false;
  std::string path;
  std::string command;
  std::string subcommand;
  std::string input_digest;
  ordered_json parameters = ordered_json::object();
  std::vector<std::pair<std::string, std::string>> outputs;
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

  void add_output(const std::string& file) {
    outputs.emplace_back(file, to_hex(fnv1a64_file(file)));
  }
  void write() const {
    if (!enabled) return;
    ordered_json doc;
    doc["command"] = command;
    doc["subcommand"] = subcommand;
    doc["input_digest"] = input_digest;
    doc["parameters"] = parameters;
    doc["version"] = kVersion;
    doc["wall_ms"] = std::chrono::duration_cast<std::chrono::milliseconds>(
                         std::chrono::steady_clock::now() - start)
                         .count();
    ordered_json outs = ordered_json::array();
    for (const auto& [file, hash] : outputs)
      outs.push_back({{"path", file}, {"fnv1a64", hash}});
    doc["outputs"] = outs;
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write manifest: " + path);
    os << doc.dump(2) << "\n";
  }
};

// ------------------------------------------------------------ model source

struct ModelSource {
  bool is_preset = false;
  std::string preset;  // "A" or "B"
  grayscott::GSParams params;
  grayscott::Branch branch = grayscott::Branch::Plus;
  model::ModelInput input;  // used when !is_preset
  std::string digest;
};

grayscott::Branch parse_branch(const std::string& name) {
  if (name == "plus") return grayscott::Branch::Plus;
  if (name == "minus") return grayscott::Branch::Minus;
  if (name == "zero") return grayscott::Branch::Zero;
  throw std::invalid_argument("unknown equilibrium branch: " + name +
                              " (expected plus|minus|zero)");
}

ModelSource resolve_model(const std::string& arg, const std::string& branch) {
  ModelSource src;
  if (arg.rfind("grayscott:", 0) == 0) {
    src.is_preset = true;
    src.preset = arg.substr(10);
    src.params.eta1 = 0.1;
    src.params.eta2 = 0.1;
    src.params.mu = 1e-3;
    src.params.gamma = 1e-2;
    if (src.preset == "A") {
      src.params.k_rate = 6.2e-2;
    } else if (src.preset == "B") {
      src.params.k_rate = 5.5e-2;
    } else {
      throw std::invalid_argument("unknown preset '" + arg +
                                  "' (expected grayscott:A or grayscott:B)");
    }
    src.branch = parse_branch(branch);
    const std::string canon = "grayscott:" + src.preset + ":" + branch;
    src.digest = to_hex(fnv1a64(canon.data(), canon.size()));
  } else {
    src.input = model::load_model(arg);
    src.digest = to_hex(fnv1a64_file(arg));
  }
  return src;
}

// Finds the requested equilibrium branch; throws when it does not exist.
grayscott::GSEquilibrium preset_equilibrium(const ModelSource& src) {
  for (const auto& eq : grayscott::equilibria(src.params))
    if (eq.branch == src.branch) return eq;
  throw std::invalid_argument(
      std::string("equilibrium branch '") + grayscott::branch_name(src.branch) +
      "' does not exist for these parameters (discriminant w < 0)");
}

model::ModelInput analysis_input(const ModelSource& src) {
  if (!src.is_preset) return src.input;
  model::ModelInput in;
  in.sys.A = grayscott::jacobian_at(src.params, preset_equilibrium(src));
  in.spec.mu = src.params.mu;
  in.spec.L = 1.0;
  return in;
}

// ------------------------------------------------------------- JSON pieces

ordered_json complex_pairs(const std::vector<std::complex<double>>& v) {
  ordered_json arr = ordered_json::array();
  for (const auto& z : v) arr.push_back({z.real(), z.imag()});
  return arr;
}

ordered_json verdict_json(const classify::Verdict& v) {
  ordered_json j;
  j["kind"] = classify::kind_name(v.kind);
  if (v.dominant) {
    ordered_json d;
    d["max_real"] = v.dominant->max_real;
    d["poles"] = complex_pairs(v.dominant->poles);
    d["attained_at"] = v.dominant->attained_at;
    d["at_limit"] = v.dominant->at_limit;
    d["tol_dom"] = v.dominant->tol_dom;
    j["dominant"] = d;
  } else {
    j["dominant"] = nullptr;
  }
  if (v.condition_flags) {
    j["condition_flags"] = {{"I", v.condition_flags->I},
                            {"II_A", v.condition_flags->II_A},
                            {"II_B", v.condition_flags->II_B}};
  } else {
    j["condition_flags"] = nullptr;
  }
  j["degenerate"] = v.degenerate;
  j["near_instability"] = v.near_instability;
  ordered_json ev = ordered_json::array();
  for (const auto& s : v.evidence) {
    ordered_json e;
    e["lambda"] = s.lambda;
    if (s.source_k >= 0) e["source_k"] = s.source_k;
    e["roots"] = complex_pairs(s.roots.roots);
    ev.push_back(e);
  }
  j["evidence"] = ev;
  return j;
}

int verdict_exit_code(classify::Kind k) {
  switch (k) {
    case classify::Kind::Stable: return 0;
    case classify::Kind::TypeI: return 10;
    case classify::Kind::TypeII: return 11;
    case classify::Kind::NotTuring: return 12;
  }
  return 2;
}

std::FILE* open_out(const std::string& path) {
  if (path == "-") return stdout;
  std::FILE* fp = std::fopen(path.c_str(), "w");
  if (!fp) throw std::runtime_error("cannot open output file: " + path);
  return fp;
}

// ------------------------------------------------------------- subcommands

struct CommonOpts {
  bool json = false;
  std::string manifest_path;
  std::string model_arg;
  std::string branch = "plus";
};

int cmd_analyze(const CommonOpts& common, int k_max, const std::string& policy,
                Manifest& mf) {
  ModelSource src = resolve_model(common.model_arg, common.branch);
  model::ModelInput in = analysis_input(src);
  if (k_max > 0) in.spec.k_max = k_max;
  if (policy == "continuous") in.spec.lambda_policy = model::LambdaPolicy::Continuous;
  else if (policy == "discrete") in.spec.lambda_policy = model::LambdaPolicy::Discrete;
  else if (!policy.empty()) throw std::invalid_argument("unknown lambda policy: " + policy);

  mf.input_digest = src.digest;
  mf.parameters["model"] = common.model_arg;
  mf.parameters["k_max"] = in.spec.k_max;
  mf.parameters["mu"] = in.spec.mu;
  mf.parameters["L"] = in.spec.L;

  const classify::Verdict v = classify::classify(in.sys, in.spec);
  ordered_json out = verdict_json(v);
  out["model"] = {{"n", in.sys.n()},
                  {"mu", in.spec.mu},
                  {"L", in.spec.L},
                  {"k_max", in.spec.k_max},
                  {"lambda_policy",
                   in.spec.lambda_policy == model::LambdaPolicy::Discrete ? "discrete"
                                                                          : "continuous"}};
  if (src.is_preset) {
    out["preset"] = "grayscott:" + src.preset;
    out["branch"] = grayscott::branch_name(src.branch);
  }
  if (common.json) {
    std::printf("%s\n", out.dump(2).c_str());
  } else {
    std::printf("verdict: %s\n", classify::kind_name(v.kind));
    if (v.dominant && !v.dominant->poles.empty()) {
      std::printf("dominant max Re: %s\n", g17(v.dominant->max_real).c_str());
      std::printf("attained at modes:");
      for (int k : v.dominant->attained_at) std::printf(" %d", k);
      if (v.dominant->at_limit) std::printf(" (and the k->infinity limit)");
      std::printf("\n");
      for (const auto& p : v.dominant->poles)
        std::printf("  pole %s + %si\n", g17(p.real()).c_str(), g17(p.imag()).c_str());
    }
    if (v.degenerate) std::printf("note: degenerate (pole-zero cancellation)\n");
    if (v.near_instability)
      std::printf("note: continuous-gain instability between discrete modes\n");
  }
  mf.write();
  return verdict_exit_code(v.kind);
}

int cmd_locus(const CommonOpts& common, double lmin, double lmax, int points,
              const std::string& out_path, Manifest& mf) {
  ModelSource src = resolve_model(common.model_arg, common.branch);
  model::ModelInput in = analysis_input(src);
  const model::RationalTransfer tf = model::transfer_function(in.sys);

  if (points < 1) throw std::invalid_argument("locus: --points must be >= 1");
  if (lmax < lmin) throw std::invalid_argument("locus: --lambda-max must be >= --lambda-min");
  if (lmax == 0.0 && lmin == 0.0 && points > 1)
    lmax = std::max(model::mode_gain(in.spec, in.spec.k_max), 1e3 * in.sys.A.norm());

  std::vector<std::pair<double, int>> lams;  // (lambda, source_k)
  if (lmin == lmax) {
    lams.emplace_back(lmin, -1);
  } else {
    const double lo = std::max(lmin, lmax * 1e-8);
    if (lmin < lo) lams.emplace_back(lmin, -1);
    for (int i = 0; i < points; ++i)
      lams.emplace_back(lo * std::pow(lmax / lo, double(i) / double(points - 1)), -1);
  }
  for (int k = 0; k <= in.spec.k_max; ++k) {
    const double lk = model::mode_gain(in.spec, k);
    if (lk >= lmin && lk <= lmax) lams.emplace_back(lk, k);
  }
  std::sort(lams.begin(), lams.end());

  mf.input_digest = src.digest;
  mf.parameters = {{"model", common.model_arg},
                   {"lambda_min", lmin},
                   {"lambda_max", lmax},
                   {"points", points}};

  if (common.json && out_path == "-")
    throw std::invalid_argument("locus: --json requires --out FILE (CSV cannot share stdout)");

  std::FILE* fp = open_out(out_path);
  std::fprintf(fp, "lambda,root_re,root_im,source_k\n");
  std::size_t rows = 0;
  for (const auto& [lam, k] : lams) {
    const auto roots = numerics::poly_roots(model::closed_loop_poly(tf, lam));
    for (const auto& r : roots.roots) {
      if (k >= 0)
        std::fprintf(fp, "%s,%s,%s,%d\n", g17(lam).c_str(), g17(r.real()).c_str(),
                     g17(r.imag()).c_str(), k);
      else
        std::fprintf(fp, "%s,%s,%s,\n", g17(lam).c_str(), g17(r.real()).c_str(),
                     g17(r.imag()).c_str());
      ++rows;
    }
  }
  if (fp != stdout) {
    std::fclose(fp);
    mf.add_output(out_path);
  }
  if (common.json) {
    ordered_json j = {{"out", out_path},
                      {"rows", rows},
                      {"lambda_min", lmin},
                      {"lambda_max", lmax}};
    std::printf("%s\n", j.dump(2).c_str());
  } else if (fp != stdout) {
    std::printf("wrote %zu locus rows to %s\n", rows, out_path.c_str());
  }
  mf.write();
  return 0;
}

int cmd_sweep(bool json_out, double gmin, double gmax, double kmin, double kmax,
              int grid_g, int grid_k, double eta1, double eta2, double mu, double L,
              double verify, const std::string& out_path, Manifest& mf) {
  const auto t0 = std::chrono::steady_clock::now();
  const grayscott::SweepResult sweep = grayscott::region_sweep(
      gmin, gmax, kmin, kmax, grid_g, grid_k, eta1, eta2, mu, L, verify);
  const auto topo = grayscott::region_topology(sweep);

  std::FILE* fp = open_out(out_path);
  std::fprintf(fp,
               "gamma,k,status,alpha2,alpha1,alpha0,alphat1,alphat0,"
               "cond_I,cond_IIA,cond_IIB,nonphysical\n");
  for (const auto& c : sweep.cells) {
    std::fprintf(fp, "%s,%s,%s,", g17(c.gamma).c_str(), g17(c.k_rate).c_str(),
                 grayscott::status_name(c.status));
    if (c.have_alphas)
      std::fprintf(fp, "%s,%s,%s,%s,%s,", g17(c.alpha2).c_str(), g17(c.alpha1).c_str(),
                   g17(c.alpha0).c_str(), g17(c.alphat1).c_str(), g17(c.alphat0).c_str());
    else
      std::fprintf(fp, ",,,,,");
    std::fprintf(fp, "%d,%d,%d,%d\n", c.flags.I ? 1 : 0, c.flags.II_A ? 1 : 0,
                 c.flags.II_B ? 1 : 0, c.nonphysical ? 1 : 0);
  }
  if (fp != stdout) {
    std::fclose(fp);
    mf.add_output(out_path);
  }

  // summary: counts, region bounding box, topology, preset marks
  int n_type1 = 0, n_not = 0, n_noeq = 0;
  double bg_lo = 0, bg_hi = 0, bk_lo = 0, bk_hi = 0;
  bool have_bbox = false;
  for (const auto& c : sweep.cells) {
    switch (c.status) {
      case grayscott::CellStatus::TypeI:
        ++n_type1;
        if (!have_bbox) {
          bg_lo = bg_hi = c.gamma;
          bk_lo = bk_hi = c.k_rate;
          have_bbox = true;
        } else {
          bg_lo = std::min(bg_lo, c.gamma);
          bg_hi = std::max(bg_hi, c.gamma);
          bk_lo = std::min(bk_lo, c.k_rate);
          bk_hi = std::max(bk_hi, c.k_rate);
        }
        break;
      case grayscott::CellStatus::notTypeI: ++n_not; break;
      case grayscott::CellStatus::noEquilibrium: ++n_noeq; break;
    }
  }
  auto nearest_status = [&](double g, double k) -> std::optional<std::string> {
    if (g < gmin || g > gmax || k < kmin || k > kmax) return std::nullopt;
    int bi = 0, bj = 0;
    double bd = std::numeric_limits<double>::infinity();
    for (int i = 0; i < sweep.n_gamma; ++i)
      for (int j = 0; j < sweep.n_k; ++j) {
        const double dg = (sweep.gammas[std::size_t(i)] - g) / std::max(gmax - gmin, 1e-300);
        const double dk = (sweep.ks[std::size_t(j)] - k) / std::max(kmax - kmin, 1e-300);
        const double d = dg * dg + dk * dk;
        if (d < bd) { bd = d; bi = i; bj = j; }
      }
    return std::string(grayscott::status_name(sweep.at(bi, bj).status));
  };
  const auto mark_a = nearest_status(1e-2, 6.2e-2);
  const auto mark_b = nearest_status(1e-2, 5.5e-2);

  ordered_json summary;
  summary["grid"] = {grid_g, grid_k};
  summary["window"] = {{"gamma", {gmin, gmax}}, {"k", {kmin, kmax}}};
  summary["counts"] = {{"TypeI", n_type1}, {"notTypeI", n_not}, {"noEquilibrium", n_noeq}};
  ordered_json region;
  region["cells"] = topo.cells;
  region["nonempty"] = topo.nonempty;
  region["connected"] = topo.connected;
  region["simply_connected"] = topo.simply_connected;
  if (have_bbox)
    region["bbox"] = {{"gamma", {bg_lo, bg_hi}}, {"k", {bk_lo, bk_hi}}};
  summary["region"] = region;
  summary["preset_A_status"] = mark_a ? ordered_json(*mark_a) : ordered_json(nullptr);
  summary["preset_B_status"] = mark_b ? ordered_json(*mark_b) : ordered_json(nullptr);
  summary["verify"] = {{"checked", sweep.verify_checked},
                       {"mismatch", sweep.verify_mismatch}};
  summary["wall_ms"] = std::chrono::duration_cast<std::chrono::milliseconds>(
                           std::chrono::steady_clock::now() - t0)
                           .count();

  const std::string canon = "sweep:" + std::to_string(gmin) + ":" + std::to_string(gmax) +
                            ":" + std::to_string(kmin) + ":" + std::to_string(kmax);
  mf.input_digest = to_hex(fnv1a64(canon.data(), canon.size()));
  mf.parameters = {{"gamma", {gmin, gmax}}, {"k", {kmin, kmax}},
                   {"grid", {grid_g, grid_k}}, {"eta1", eta1}, {"eta2", eta2},
                   {"mu", mu}, {"L", L}, {"verify", verify}};

  if (json_out) {
    std::printf("%s\n", summary.dump(2).c_str());
  } else {
    std::printf("TypeI cells: %d (of %d)\n", n_type1,
                sweep.n_gamma * sweep.n_k);
    std::printf("region: %s, %s\n", topo.connected ? "connected" : "disconnected",
                topo.simply_connected ? "simply connected" : "has holes");
    if (have_bbox)
      std::printf("bbox: gamma [%s, %s], k [%s, %s]\n", g17(bg_lo).c_str(),
                  g17(bg_hi).c_str(), g17(bk_lo).c_str(), g17(bk_hi).c_str());
    std::printf("preset A cell: %s\n", mark_a ? mark_a->c_str() : "outside window");
    std::printf("preset B cell: %s\n", mark_b ? mark_b->c_str() : "outside window");
  }
  mf.write();
  return 0;
}

pdesim::InitialCondition parse_ic(const std::string& text) {
  pdesim::InitialCondition ic;
  if (text == "default") {
    ic.kind = pdesim::InitialCondition::Kind::MultiMode;
  } else if (text == "equilibrium") {
    ic.kind = pdesim::InitialCondition::Kind::Equilibrium;
  } else if (text.rfind("mode:", 0) == 0) {
    ic.kind = pdesim::InitialCondition::Kind::SingleMode;
    const std::string rest = text.substr(5);
    const auto colon = rest.find(':');
    try {
      ic.mode = std::stoi(rest.substr(0, colon));
      if (colon != std::string::npos) ic.amplitude = std::stod(rest.substr(colon + 1));
    } catch (const std::exception&) {
      throw std::invalid_argument("bad --ic mode spec: " + text);
    }
    if (ic.mode < 0) throw std::invalid_argument("--ic mode index must be >= 0");
  } else {
    throw std::invalid_argument("unknown --ic '" + text +
                                "' (expected default|equilibrium|mode:K[:AMP])");
  }
  return ic;
}

int cmd_simulate(const CommonOpts& common, pdesim::SimConfig cfg, bool fixed_dt,
                 const std::string& ic_text, double mu_override,
                 const std::string& out_prefix, double window_frac, Manifest& mf) {
  ModelSource src = resolve_model(common.model_arg, common.branch);
  cfg.adaptive = !fixed_dt;
  cfg.ic = parse_ic(ic_text);

  pdesim::ReactionFn reaction;
  std::vector<double> base;
  int n_species = 0;
  if (src.is_preset) {
    const auto eq = preset_equilibrium(src);
    reaction = pdesim::grayscott_reaction(src.params);
    base = {eq.x, eq.y, eq.z};
    n_species = 3;
    cfg.mu = src.params.mu;
    cfg.L = 1.0;
  } else {
    reaction = pdesim::linear_reaction(src.input.sys.A);
    n_species = src.input.sys.n();
    base.assign(static_cast<std::size_t>(n_species), 0.0);  // deviation variables
    cfg.mu = src.input.spec.mu;
    cfg.L = src.input.spec.L;
  }
  if (mu_override >= 0.0) cfg.mu = mu_override;

  mf.input_digest = src.digest;
  mf.parameters = {{"model", common.model_arg}, {"N", cfg.N}, {"T", cfg.T},
                   {"mu", cfg.mu}, {"L", cfg.L}, {"ic", ic_text},
                   {"adaptive", cfg.adaptive}, {"dt", cfg.dt},
                   {"rtol", cfg.rtol}, {"atol", cfg.atol}};

  const auto t0 = std::chrono::steady_clock::now();
  const pdesim::Trajectory traj = pdesim::simulate(reaction, n_species, base, cfg);
  double wlo = cfg.T * (1.0 - window_frac);
  const double whi = cfg.T;
  // Widen the window when the trailing fraction holds fewer than the five
  // snapshots the mode detector needs (short runs, coarse --snap).
  std::size_t inside = 0;
  for (double t : traj.times)
    if (t >= wlo && t <= whi) ++inside;
  if (inside < 5 && traj.times.size() >= 5)
    wlo = traj.times[traj.times.size() - 5];
  const pdesim::DominantMode dm = pdesim::dominant_mode(traj, wlo, whi);

  const std::string traj_csv = out_prefix + "_traj.csv";
  const std::string traj_bin = out_prefix + "_traj.bin";
  const std::string spec_csv = out_prefix + "_spectra.csv";
  const std::string report_path = out_prefix + "_report.json";
  pdesim::write_trajectory_csv(traj, traj_csv);
  pdesim::write_trajectory_bin(traj, traj_bin);
  pdesim::write_spectra_csv(traj, spec_csv);

  ordered_json report;
  report["k_star"] = dm.no_pattern ? ordered_json(nullptr) : ordered_json(dm.k_star);
  report["growth_rate"] =
      dm.no_pattern ? ordered_json(nullptr) : ordered_json(dm.growth_rate);
  report["saturated"] = dm.saturated;
  report["no_pattern"] = dm.no_pattern;
  report["window"] = {dm.window_lo, dm.window_hi};
  report["snapshots"] = traj.times.size();
  report["wall_ms"] = std::chrono::duration_cast<std::chrono::milliseconds>(
                          std::chrono::steady_clock::now() - t0)
                          .count();
  report["files"] = {{"trajectory_csv", traj_csv},
                     {"trajectory_bin", traj_bin},
                     {"spectra_csv", spec_csv}};
  {
    std::ofstream os(report_path);
    if (!os) throw std::runtime_error("cannot write report: " + report_path);
    os << report.dump(2) << "\n";
  }
  for (const auto& f : {traj_csv, traj_bin, spec_csv, report_path}) mf.add_output(f);

  if (common.json) {
    std::printf("%s\n", report.dump(2).c_str());
  } else if (dm.no_pattern) {
    std::printf("no pattern (all modes below the noise floor)\n");
  } else {
    std::printf("k_star = %d, growth_rate = %s, %s\n", dm.k_star,
                g17(dm.growth_rate).c_str(),
                dm.saturated ? "saturated" : "not saturated");
  }
  mf.write();
  return 0;
}

int cmd_equilibria(bool json_out, double gamma, double k, double eta1, double eta2,
                   Manifest& mf) {
  grayscott::GSParams p;
  p.gamma = gamma;
  p.k_rate = k;
  p.eta1 = eta1;
  p.eta2 = eta2;

  const std::string canon = "equilibria:" + std::to_string(gamma) + ":" +
                            std::to_string(k) + ":" + std::to_string(eta1) + ":" +
                            std::to_string(eta2);
  mf.input_digest = to_hex(fnv1a64(canon.data(), canon.size()));
  mf.parameters = {{"gamma", gamma}, {"k", k}, {"eta1", eta1}, {"eta2", eta2}};

  ordered_json arr = ordered_json::array();
  for (const auto& eq : grayscott::equilibria(p)) {
    ordered_json e;
    e["branch"] = grayscott::branch_name(eq.branch);
    e["x"] = eq.x;
    e["y"] = eq.y;
    e["z"] = eq.z;
    e["residual"] = grayscott::rhs_residual(p, eq);
    e["physical"] = eq.physical;
    const auto eig = numerics::eigenvalues(grayscott::jacobian_at(p, eq));
    ordered_json re = ordered_json::array();
    for (const auto& v : eig.roots) re.push_back(v.real());
    e["eig_real_parts"] = re;
    e["hurwitz"] = eig.max_real() < 0.0;
    arr.push_back(e);
  }
  if (json_out) {
    std::printf("%s\n", arr.dump(2).c_str());
  } else {
    for (const auto& e : arr)
      std::printf("%-6s x=%s y=%s z=%s residual=%s %s\n",
                  e["branch"].get<std::string>().c_str(),
                  g17(e["x"].get<double>()).c_str(), g17(e["y"].get<double>()).c_str(),
                  g17(e["z"].get<double>()).c_str(),
                  g17(e["residual"].get<double>()).c_str(),
                  e["hurwitz"].get<bool>() ? "stable" : "unstable");
  }
  mf.write();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"single-diffuser reaction-diffusion instability toolkit"};
  app.require_subcommand(1);

  std::string full_command;
  for (int i = 0; i < argc; ++i) {
    if (i) full_command += ' ';
    full_command += argv[i];
  }

  CommonOpts common;
  Manifest mf;
  mf.command = full_command;

  auto add_common = [&](CLI::App* sub, bool with_model) {
    sub->add_flag("--json", common.json, "print exactly one JSON document on stdout");
    sub->add_option("--manifest", mf.path, "write a run manifest JSON to this path");
    if (with_model) {
      sub->add_option("model", common.model_arg,
                      "model JSON file or preset (grayscott:A | grayscott:B)")
          ->required();
      sub->add_option("--branch", common.branch,
                      "equilibrium branch for presets (plus|minus|zero)");
    }
  };

  // analyze
  auto* analyze = app.add_subcommand("analyze", "classify a model");
  int an_kmax = 0;
  std::string an_policy;
  add_common(analyze, true);
  analyze->add_option("--kmax", an_kmax, "override the largest discrete mode index");
  analyze->add_option("--policy", an_policy, "lambda policy: discrete|continuous");

  // locus
  auto* locus = app.add_subcommand("locus", "export root-locus samples as CSV");
  double lo_min = 0.0, lo_max = 0.0;
  int lo_points = 200;
  std::string lo_out = "-";
  add_common(locus, true);
  locus->add_option("--lambda-min", lo_min, "smallest gain sampled");
  locus->add_option("--lambda-max", lo_max, "largest gain sampled (0 = auto)");
  locus->add_option("--points", lo_points, "number of gain samples");
  locus->add_option("--out", lo_out, "CSV output path ('-' = stdout)");

  // sweep
  auto* sweep = app.add_subcommand("sweep", "(gamma, k) TypeI capability sweep");
  double sw_gmin = 1e-3, sw_gmax = 5e-2, sw_kmin = 2e-2, sw_kmax = 1e-1;
  int sw_grid = 100, sw_grid_g = 0, sw_grid_k = 0;
  double sw_eta1 = 0.1, sw_eta2 = 0.1, sw_mu = 1e-3, sw_L = 1.0, sw_verify = 0.0;
  std::string sw_out = "sweep.csv";
  sweep->add_flag("--json", common.json, "print exactly one JSON document on stdout");
  sweep->add_option("--manifest", mf.path, "write a run manifest JSON to this path");
  sweep->add_option("--gamma-min", sw_gmin, "");
  sweep->add_option("--gamma-max", sw_gmax, "");
  sweep->add_option("--k-min", sw_kmin, "");
  sweep->add_option("--k-max", sw_kmax, "");
  sweep->add_option("--grid", sw_grid, "square grid resolution");
  sweep->add_option("--grid-gamma", sw_grid_g, "gamma-axis resolution (overrides --grid)");
  sweep->add_option("--grid-k", sw_grid_k, "k-axis resolution (overrides --grid)");
  sweep->add_option("--eta1", sw_eta1, "");
  sweep->add_option("--eta2", sw_eta2, "");
  sweep->add_option("--mu", sw_mu, "");
  sweep->add_option("--L", sw_L, "");
  sweep->add_option("--verify-scan", sw_verify,
                    "re-check this fraction of TypeI cells against a dense gain scan");
  sweep->add_option("--out", sw_out, "CSV output path ('-' = stdout)");

  // simulate
  auto* simulate = app.add_subcommand("simulate", "run the 1-D pattern simulation");
  pdesim::SimConfig sim_cfg;
  bool sim_fixed = false;
  std::string sim_ic = "default", sim_out = "sim";
  double sim_mu_override = -1.0, sim_window = 0.25;
  add_common(simulate, true);
  simulate->add_option("--N", sim_cfg.N, "grid points");
  simulate->add_option("--T", sim_cfg.T, "final time");
  simulate->add_option("--snap", sim_cfg.snapshot_every, "snapshot interval");
  simulate->add_option("--kspec", sim_cfg.k_spec, "highest recorded mode");
  simulate->add_option("--dt", sim_cfg.dt, "fixed time step (switches off adaptivity)")
      ->each([&](const std::string&) { sim_fixed = true; });
  simulate->add_option("--rtol", sim_cfg.rtol, "adaptive relative tolerance");
  simulate->add_option("--atol", sim_cfg.atol, "adaptive absolute tolerance");
  simulate->add_option("--ic", sim_ic, "default | equilibrium | mode:K[:AMP]");
  simulate->add_option("--mu", sim_mu_override, "override diffusion coefficient");
  simulate->add_option("--out", sim_out, "output file prefix");
  simulate->add_option("--window-frac", sim_window,
                       "trailing fraction of the run used for mode dominance");

  // equilibria
  auto* equil = app.add_subcommand("equilibria", "list homogeneous equilibria");
  double eq_gamma = 0.0, eq_k = 0.0, eq_eta1 = 0.1, eq_eta2 = 0.1;
  equil->add_flag("--json", common.json, "print exactly one JSON document on stdout");
  equil->add_option("--manifest", mf.path, "write a run manifest JSON to this path");
  equil->add_option("--gamma", eq_gamma, "")->required();
  equil->add_option("--k", eq_k, "")->required();
  equil->add_option("--eta1", eq_eta1, "");
  equil->add_option("--eta2", eq_eta2, "");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  mf.enabled = !mf.path.empty();

  try {
    if (analyze->parsed()) {
      mf.subcommand = "analyze";
      return cmd_analyze(common, an_kmax, an_policy, mf);
    }
    if (locus->parsed()) {
      mf.subcommand = "locus";
      return cmd_locus(common, lo_min, lo_max, lo_points, lo_out, mf);
    }
    if (sweep->parsed()) {
      mf.subcommand = "sweep";
      const int gg = sw_grid_g > 0 ? sw_grid_g : sw_grid;
      const int gk = sw_grid_k > 0 ? sw_grid_k : sw_grid;
      return cmd_sweep(common.json, sw_gmin, sw_gmax, sw_kmin, sw_kmax, gg, gk, sw_eta1,
                       sw_eta2, sw_mu, sw_L, sw_verify, sw_out, mf);
    }
    if (simulate->parsed()) {
      mf.subcommand = "simulate";
      return cmd_simulate(common, sim_cfg, sim_fixed, sim_ic, sim_mu_override, sim_out,
                          sim_window, mf);
    }
    if (equil->parsed()) {
      mf.subcommand = "equilibria";
      return cmd_equilibria(common.json, eq_gamma, eq_k, eq_eta1, eq_eta2, mf);
    }
  } catch (const pdesim::Divergence& d) {
    std::fprintf(stderr, "turing1: %s\n", d.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "turing1: %s\n", e.what());
    return 2;
  }
  return 2;
}
