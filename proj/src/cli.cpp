#include "nibt/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>

#include "nibt/io.hpp"
#include "nibt/metrics.hpp"
#include "nibt/oracle.hpp"
#include "nibt/theory.hpp"

namespace nibt {

namespace {

using nlohmann::json;

double parse_number(const std::string& s) {
  if (s == "inf" || s == "Inf") return std::numeric_limits<double>::infinity();
  size_t pos = 0;
  double x;
  try {
    x = std::stod(s, &pos);
  } catch (const std::exception&) {
    throw ValidationError("not a number: '" + s + "'");
  }
  if (pos != s.size()) throw ValidationError("not a number: '" + s + "'");
  return x;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  return out;
}

// log:A:B:K (decades), lin:A:B:K, or a comma list.
std::vector<double> parse_freqs(const std::string& spec) {
  const auto parts = split(spec, ':');
  if (parts.size() == 4 && (parts[0] == "log" || parts[0] == "lin")) {
    const double a = parse_number(parts[1]), b = parse_number(parts[2]);
    const double k = parse_number(parts[3]);
    if (!(k >= 1) || k != std::floor(k)) throw ValidationError("point count must be a positive integer");
    if (parts[0] == "log") return logspace(a, b, static_cast<int>(k));
    std::vector<double> out(static_cast<size_t>(k));
    for (int i = 0; i < k; ++i) out[i] = k == 1 ? a : a + (b - a) * i / (k - 1);
    return out;
  }
  std::vector<double> out;
  for (const auto& p : split(spec, ',')) out.push_back(parse_number(p));
  if (out.empty()) throw ValidationError("empty frequency list");
  return out;
}

std::pair<double, double> parse_pair(const std::string& s, const char* what) {
  const auto parts = split(s, ',');
  if (parts.size() != 2) throw ValidationError(std::string(what) + " expects two comma-separated values");
  return {parse_number(parts[0]), parse_number(parts[1])};
}

std::vector<int> parse_orders(const std::string& s) {
  std::vector<int> out;
  const auto range = split(s, ':');
  if (range.size() == 2) {
    const int a = static_cast<int>(parse_number(range[0])), b = static_cast<int>(parse_number(range[1]));
    if (a < 1 || b < a) throw ValidationError("orders range must be 1 <= a <= b");
    for (int r = a; r <= b; ++r) out.push_back(r);
    return out;
  }
  for (const auto& p : split(s, ',')) {
    const double x = parse_number(p);
    if (!(x >= 1) || x != std::floor(x)) throw ValidationError("orders must be positive integers");
    out.push_back(static_cast<int>(x));
  }
  return out;
}

struct VariantOpts {
  std::string variant = "bt";
  double eps = 1e-4;
  std::string band;
  std::string window;
  double gamma = 0.5;

  void attach(CLI::App* app, bool variant_required) {
    auto* o = app->add_option("--variant", variant, "bt|flbt|tlbt|swbt|lqg|hinf|prbt|brbt|bst");
    if (variant_required) o->required();
    app->add_option("--eps", eps, "pole offset epsilon");
    app->add_option("--band", band, "FLBT band W1,W2 in rad/s");
    app->add_option("--window", window, "TLBT window T1,T2 in s (default 0,5)");
    app->add_option("--gamma", gamma, "Hinf-BT gamma");
  }

  VariantConfig config() const {
    VariantConfig cfg;
    cfg.tag = parse_variant(variant);
    cfg.eps = eps;
    cfg.gamma = gamma;
    if (cfg.tag == Variant::FLBT) {
      if (band.empty()) throw ValidationError("--variant flbt requires --band W1,W2");
      std::tie(cfg.omega1, cfg.omega2) = parse_pair(band, "--band");
    }
    if (cfg.tag == Variant::TLBT) {
      cfg.t1 = 0.0;
      cfg.t2 = 5.0;
      if (!window.empty()) std::tie(cfg.t1, cfg.t2) = parse_pair(window, "--window");
    }
    cfg.check();
    return cfg;
  }
};

SampleSet load_samples(const std::string& path, bool approx) {
  SampleSet s = samples_from_json(read_json_file(path));
  if (approx) s = with_approximate_derivatives(s);
  return s;
}

std::string fmt(double x) {
  std::ostringstream os;
  os << std::setprecision(10) << x;
  return os.str();
}

double gain(const CMat& H) {
  if (H.size() == 1) return std::abs(H(0, 0));
  Eigen::JacobiSVD<CMat> svd(H);
  return svd.singularValues()(0);
}

int run(const std::vector<std::string>& args, std::ostream& out) {
  CLI::App app{"non-intrusive balanced truncation toolkit", "nibt"};
  app.require_subcommand(1);

  // gen-model
  auto* gen = app.add_subcommand("gen-model", "generate a benchmark state-space model");
  std::string kind, gen_out;
  int order = 0;
  double dip = std::numeric_limits<double>::quiet_NaN();
  unsigned seed = 0;
  double damping = 0.02, flo = 0.1, fhi = 1000.0, feedthrough = 0.0;
  double normalize = std::numeric_limits<double>::quiet_NaN();
  RlcLadder rlc;
  gen->add_option("--kind", kind, "rlc|modal")->required();
  gen->add_option("--order", order, "state dimension (even)")->required();
  gen->add_option("--dip", dip, "planted anti-resonance frequency (modal)");
  gen->add_option("--seed", seed);
  gen->add_option("--damping", damping, "modal damping ratio");
  gen->add_option("--freq-lo", flo);
  gen->add_option("--freq-hi", fhi);
  gen->add_option("--R", rlc.R);
  gen->add_option("--L", rlc.Lind);
  gen->add_option("--C", rlc.Cap);
  gen->add_option("--Rload", rlc.Rload);
  gen->add_option("--feedthrough", feedthrough, "D = d*I");
  gen->add_option("--normalize", normalize, "scale C so that the peak gain of G equals this value");
  gen->add_option("--out", gen_out)->required();

  // sample
  auto* smp = app.add_subcommand("sample", "sample the transfer function on the imaginary axis");
  std::string smp_model, smp_freqs = "log:-1:3:50", smp_out, smp_csv;
  bool one_sided = false, derivs = false;
  smp->add_option("--model", smp_model)->required();
  smp->add_option("--freqs", smp_freqs, "log:A:B:K, lin:A:B:K or a comma list");
  smp->add_flag("--two-sided", "close under conjugation (default)");
  smp->add_flag("--one-sided", one_sided, "keep only the given frequencies");
  smp->add_flag("--derivatives", derivs, "store H'(jw) at every point");
  smp->add_option("--csv", smp_csv, "also write a CSV export");
  smp->add_option("--out", smp_out)->required();

  // reduce
  auto* red = app.add_subcommand("reduce", "non-intrusive balanced truncation");
  std::string red_samples, red_order = "25", red_out, red_csv, red_model;
  bool approx = false, flip = false;
  VariantOpts red_v;
  red->add_option("--samples", red_samples)->required();
  red_v.attach(red, true);
  red->add_option("--order", red_order, "ROM order or 'auto'");
  red->add_flag("--approx-derivatives", approx, "fill missing derivatives by finite differences");
  red->add_flag("--flip-unstable", flip, "reflect unstable ROM poles");
  red->add_option("--response-csv", red_csv, "write w, |H|, |H~|");
  red->add_option("--model", red_model, "reference model for --response-csv");
  red->add_option("--out", red_out)->required();

  // hsv
  auto* hsv = app.add_subcommand("hsv", "Hankel-like singular values");
  std::string hsv_samples, hsv_model;
  int hsv_count = 25;
  bool hsv_approx = false;
  VariantOpts hsv_v;
  hsv->add_option("--samples", hsv_samples)->required();
  hsv_v.attach(hsv, true);
  hsv->add_option("--model", hsv_model, "also print the intrusive values");
  hsv->add_option("--count", hsv_count, "number of values to print");
  hsv->add_flag("--approx-derivatives", hsv_approx);

  // compare
  auto* cmp = app.add_subcommand("compare", "compare non-intrusive and intrusive reduction");
  std::string cmp_model, cmp_samples, cmp_orders = "1:25", cmp_out;
  bool cmp_approx = false;
  int cmp_points = 2000;
  VariantOpts cmp_v;
  cmp->add_option("--model", cmp_model)->required();
  cmp->add_option("--samples", cmp_samples)->required();
  cmp_v.attach(cmp, true);
  cmp->add_option("--orders", cmp_orders, "a:b or a comma list");
  cmp->add_option("--grid-points", cmp_points, "coarse error-grid size");
  cmp->add_flag("--approx-derivatives", cmp_approx);
  cmp->add_option("--out", cmp_out)->required();

  // diagnose
  auto* dia = app.add_subcommand("diagnose", "grid margins, bounds and variant preconditions");
  std::string dia_samples, dia_variant;
  double dia_eps = 1e-4;
  dia->add_option("--samples", dia_samples)->required();
  dia->add_option("--eps", dia_eps);
  dia->add_option("--variant", dia_variant, "check a single variant (default: all)");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e, out, out);
    throw;
  }

  if (gen->parsed()) {
    if (order < 2 || order % 2 != 0) throw ValidationError("--order must be a positive even number");
    StateSpaceModel model;
    if (kind == "rlc") {
      rlc.sections = order / 2;
      rlc.feedthrough = feedthrough;
      model = generate_model(rlc);
    } else if (kind == "modal") {
      Modal md;
      md.num_modes = order / 2;
      md.freq_lo = flo;
      md.freq_hi = fhi;
      md.damping_ratio = damping;
      md.seed = seed;
      md.feedthrough = feedthrough;
      if (!std::isnan(dip)) md.zero_dip_at = dip;
      model = generate_model(md);
    } else {
      throw ValidationError("--kind must be rlc or modal");
    }
    if (!std::isnan(normalize)) model = normalize_model(model, normalize, feedthrough);
    write_json_file(gen_out, model_to_json(model));
    out << "model n=" << model.n() << " m=" << model.m() << " p=" << model.p() << " -> " << gen_out << '\n';
    return 0;
  }

  if (smp->parsed()) {
    const StateSpaceModel model = model_from_json(read_json_file(smp_model));
    auto freqs = parse_freqs(smp_freqs);
    SampleSet s = sample_transfer(model, freqs, derivs);
    if (!one_sided) s = conjugate_close(s);
    write_json_file(smp_out, samples_to_json(s));
    if (!smp_csv.empty()) {
      std::ofstream csv(smp_csv);
      if (!csv) throw ValidationError("cannot write '" + smp_csv + "'");
      write_samples_csv(csv, s);
    }
    out << "samples ns=" << s.ns() << " nu=" << s.nu() << " -> " << smp_out << '\n';
    return 0;
  }

  if (red->parsed()) {
    const VariantConfig cfg = red_v.config();
    const SampleSet s = load_samples(red_samples, approx);
    const LoewnerQuadruplet quad = build_loewner(s);
    const GramianFactors f = compute_factors(s, cfg);
    const int r = red_order == "auto" ? 0 : static_cast<int>(parse_number(red_order));
    if (red_order != "auto" && r < 1) throw ValidationError("--order must be >= 1 or 'auto'");
    ReducedModel rom = balance_reduce(quad, f, r);
    const int unstable = rom.unstable_count();
    if (flip) rom = flip_unstable(rom);
    write_json_file(red_out, rom_to_json(rom));
    out << variant_name(cfg.tag) << " rom r=" << rom.r() << " unstable_poles=" << unstable
        << (flip && unstable ? " (flipped)" : "") << (f.approximate ? " approximate" : "") << " -> "
        << red_out << '\n';
    if (!red_csv.empty()) {
      std::vector<double> freqs;
      std::vector<double> h, ht;
      if (!red_model.empty()) {
        const StateSpaceModel model = model_from_json(read_json_file(red_model));
        const FrequencyResponse fr(model);
        const GridSpec g = default_grid(s.right_freqs);
        freqs = logspace(std::log10(g.lo), std::log10(g.hi), g.points);
        for (double w : freqs) h.push_back(gain(fr.H(w)));
      } else {
        for (int i = 0; i < s.ns(); ++i) {
          freqs.push_back(s.right_freqs[i]);
          h.push_back(gain(s.right_samples[i]));
        }
      }
      for (double w : freqs) ht.push_back(gain(evaluate_rom(rom, w)));
      std::ofstream csv(red_csv);
      if (!csv) throw ValidationError("cannot write '" + red_csv + "'");
      write_response_csv(csv, freqs, {h, ht}, {"abs_H", "abs_H_rom"});
    }
    return 0;
  }

  if (hsv->parsed()) {
    const VariantConfig cfg = hsv_v.config();
    const SampleSet s = load_samples(hsv_samples, hsv_approx);
    const Vec sd = hankel_like_values(build_loewner(s), compute_factors(s, cfg));
    Vec st;
    if (!hsv_model.empty()) {
      const StateSpaceModel model = model_from_json(read_json_file(hsv_model));
      st = IntrusiveBalancer(model, variant_gramians(model, cfg)).hankel_values();
    }
    out << (st.size() ? "i,sigma_data,sigma_true\n" : "i,sigma_data\n");
    const int k = std::min<int>(hsv_count, static_cast<int>(sd.size()));
    for (int i = 0; i < k; ++i) {
      out << i + 1 << ',' << fmt(sd(i));
      if (st.size()) out << ',' << (i < st.size() ? fmt(st(i)) : "nan");
      out << '\n';
    }
    return 0;
  }

  if (cmp->parsed()) {
    const VariantConfig cfg = cmp_v.config();
    const StateSpaceModel model = model_from_json(read_json_file(cmp_model));
    const SampleSet s = load_samples(cmp_samples, cmp_approx);
    GridSpec g = default_grid(s.right_freqs);
    g.points = cmp_points;
    const auto rep = compare_variant(model, s, cfg, parse_orders(cmp_orders), g);
    std::ofstream csv(cmp_out);
    if (!csv) throw ValidationError("cannot write '" + cmp_out + "'");
    write_report_csv(csv, rep);
    out << variant_name(cfg.tag) << " compare: " << rep.orders.size() << " orders -> " << cmp_out << '\n';
    return 0;
  }

  if (dia->parsed()) {
    const SampleSet s = samples_from_json(read_json_file(dia_samples));
    InterpolationGrid grid{s.right_freqs, dia_eps};
    json j;
    j["eps"] = dia_eps;
    j["ns"] = grid.ns();
    j["delta_min"] = grid.ns() > 1 ? grid.delta_min() : 0.0;
    const auto b = prop2_bounds(grid);
    j["xp"] = {{"rel_error", b.rel_error},
               {"bound", b.bound},
               {"bound_holds", b.bound_holds()},
               {"dominance_margin", b.dominance_margin},
               {"dominance_threshold", b.dominance_threshold},
               {"condition", xp_closed_form(grid).condition}};
    if (s.p() == s.m() && std::abs(s.D.determinant()) > 1e-12 * std::max(1.0, s.D.norm())) {
      std::vector<CMat> G;
      for (int i = 0; i < s.ns(); ++i) G.push_back(s.right_G(i));
      const CMat R = s.D.inverse().cast<cplx>();
      const auto zb = zero_placement_bounds(grid, G, R);
      const auto dom = block_dominance(xz_solution(grid, G, R));
      j["xz"] = {{"eps_threshold", zb.eps_threshold},
                 {"min_margin", dom.min_margin},
                 {"dominant", dom.dominant()},
                 {"max_off_weight", *std::max_element(dom.off_weight.begin(), dom.off_weight.end())},
                 {"max_off_weight_bound",
                  *std::max_element(zb.off_weight_bound.begin(), zb.off_weight_bound.end())}};
    } else {
      j["xz"] = nullptr;
    }
    json variants = json::object();
    for (Variant v : kAllVariants) {
      if (!dia_variant.empty() && parse_variant(dia_variant) != v) continue;
      VariantConfig cfg;
      cfg.tag = v;
      cfg.eps = dia_eps;
      if (v == Variant::FLBT) {
        cfg.omega1 = 1.0;
        cfg.omega2 = 30.0;
      }
      if (v == Variant::TLBT) cfg.t2 = 5.0;
      const auto d = validate_for_variant(s, cfg);
      variants[variant_name(v)] = {{"ok", d.ok}, {"reasons", d.reasons}};
    }
    j["variants"] = variants;
    out << j.dump(2) << '\n';
    return 0;
  }
  return 2;
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  try {
    return run(args, out);
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const InfeasibleError& e) {
    err << "infeasible: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 3;
  }
}

}  // namespace nibt
