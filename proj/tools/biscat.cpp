// biscat command-line front end. Output is JSON on stdout unless --csv.

#include <CLI11.hpp>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "biscat/io.hpp"
#include "biscat/specfun.hpp"
#include "biscat/verify.hpp"

using namespace biscat;

namespace {

struct Settings {
  PlaneGrid field_grid = PlaneGrid::field_default();
  PlaneGrid operator_grid = operator_grid_default();
  int lambda_nodes = 96;
  int angular_nodes = 256;
  double inv_tol = 1e-10;
  double classify_tol = 1e-6;
};

void load_config(const std::string& path, Settings& s) {
  std::ifstream is(path);
  if (!is) throw Io("cannot read config " + path);
  const Json j = Json::parse(is);
  auto grid = [&](const char* key, PlaneGrid& g) {
    if (!j.contains(key)) return;
    const auto& o = j.at(key);
    g = PlaneGrid(o.value("n", g.n()), o.value("half_width", g.half_width()));
  };
  grid("grid", s.field_grid);
  grid("operator_grid", s.operator_grid);
  if (j.contains("quadrature")) {
    s.lambda_nodes = j["quadrature"].value("lambda_nodes", s.lambda_nodes);
    s.angular_nodes = j["quadrature"].value("angular_nodes", s.angular_nodes);
  }
  if (j.contains("tolerance")) {
    s.inv_tol = j["tolerance"].value("inv_tol", s.inv_tol);
    s.classify_tol = j["tolerance"].value("classify", s.classify_tol);
  }
  if (j.contains("threads")) set_thread_count(j["threads"].get<int>());
}

double parse_number(const std::string& text) {
  const auto slash = text.find('/');
  if (slash != std::string::npos) return std::stod(text.substr(0, slash)) / std::stod(text.substr(slash + 1));
  return std::stod(text);
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(parse_number(item));
  if (out.empty()) throw InvalidArgument("empty list '" + text + "'");
  return out;
}

cplx parse_complex(const std::string& text) {
  const auto v = parse_list(text);
  if (v.size() > 2) throw InvalidArgument("complex value takes re[,im]");
  return {v[0], v.size() == 2 ? v[1] : 0.0};
}

PlaneGrid parse_grid(const std::string& text) {
  const auto v = parse_list(text);
  if (v.size() != 2) throw InvalidArgument("grid takes N,R");
  return PlaneGrid(static_cast<int>(v[0]), v[1]);
}

void emit(const Json& j) { std::cout << j.dump(2) << '\n'; }

// Smallest annulus holding all spectral magnitudes above 1e-6 of the peak.
// Field files are float32, so lower thresholds pick up rounding noise.
TestFunction certify(const Field& u) {
  const auto spec = fourier_transform(u);
  double peak = 0.0;
  for (const cplx& v : spec) peak = std::max(peak, std::abs(v));
  if (peak == 0.0) throw InvalidArgument("input field is zero");
  const PlaneGrid& g = u.grid;
  double lo = g.nyquist(), hi = 0.0;
  for (int k1 = 0; k1 < g.n(); ++k1)
    for (int k2 = 0; k2 < g.n(); ++k2)
      if (std::abs(spec[static_cast<std::size_t>(k1) * g.n() + k2]) > 1e-6 * peak) {
        const double r = std::hypot(g.frequency(k1), g.frequency(k2));
        lo = std::min(lo, r);
        hi = std::max(hi, r);
      }
  return project_annulus(u, lo, hi);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"biharmonic scattering toolkit"};
  app.require_subcommand(1);
  app.fallthrough();
  Settings settings;
  std::string config;
  int threads = 0;
  bool csv = false;
  app.add_option("--config", config, "JSON config with grid, quadrature and tolerance sections");
  app.add_option("--threads", threads, "worker threads (overrides BISCAT_THREADS)");
  app.add_flag("--csv", csv, "tabular output for sweeps");

  // kernel eval / kernel l
  auto* kernel = app.add_subcommand("kernel", "kernel values");
  kernel->require_subcommand(1);
  auto* keval = kernel->add_subcommand("eval", "Gamma(z, r) and R(z, r)");
  std::string z_text, r_text, hpath = "auto";
  keval->add_option("--z", z_text, "spectral parameter re[,im]")->required();
  keval->add_option("--r", r_text, "radii r1,r2,...")->required();
  keval->add_option("--path", hpath, "Hankel path")->check(CLI::IsMember({"auto", "series", "integral"}));
  auto* kl = kernel->add_subcommand("l", "L(x, y) for |x|, |y|");
  double lx = 1.0, ly = 1.0, la = 1.0;
  std::string lpath = "naive";
  kl->add_option("--x", lx, "|x|")->required();
  kl->add_option("--y", ly, "|y|")->required();
  kl->add_option("--a", la, "cutoff scale");
  kl->add_option("--path", lpath, "quadrature path")->check(CLI::IsMember({"naive", "parts"}));

  auto* classify = app.add_subcommand("classify", "zero-energy classification");
  std::string potential, json_out, grid_text;
  double tol = -1.0;
  classify->add_option("--potential", potential, "builtin spec or CSV x1,x2,V")->required();
  classify->add_option("--tol", tol, "regularity tolerance");
  classify->add_option("--json", json_out, "also write the report here");
  classify->add_option("--grid", grid_text, "operator grid N,R");

  auto* expand = app.add_subcommand("expand", "threshold expansion orders");
  std::string sweep;
  expand->add_option("--potential", potential, "builtin spec or CSV x1,x2,V")->required();
  expand->add_option("--lambda-sweep", sweep, "L0,L1,...")->required();
  expand->add_option("--grid", grid_text, "operator grid N,R");

  auto* wave = app.add_subcommand("waveop", "apply the wave operator to a field file");
  std::string in_path, out_path, band_text;
  std::vector<std::string> mode{"full-inverse"};
  bool no_metrics = false;
  wave->add_option("--potential", potential, "builtin spec or CSV x1,x2,V")->required();
  wave->add_option("--in", in_path, "input BSF1 field")->required();
  wave->add_option("--out", out_path, "output BSF1 field")->required();
  wave->add_option("--mode", mode, "full-inverse | born N")->expected(1, 2);
  wave->add_option("--band", band_text, "spectral annulus lo,hi (default: detected)");
  wave->add_option("--grid", grid_text, "operator grid N,R");
  wave->add_flag("--no-metrics", no_metrics, "skip the isometry and intertwining metrics");

  auto* verify = app.add_subcommand("verify", "run a verification suite");
  std::string suite;
  verify->add_option("--suite", suite, "suite")
      ->required()
      ->check(CLI::IsMember({"specfun", "threshold", "kernelL", "appendix", "waveop", "peral", "all"}));

  auto* scan = app.add_subcommand("lp-scan", "empirical L^p stability scan");
  std::string op, p_text = "4/3,2,4", res_text, scan_potential;
  std::uint64_t seed = 1;
  int probes = 64;
  double b = 0.5, half_width = 0.0;
  scan->add_option("--op", op, "operator name, or peral")->required();
  scan->add_option("--p", p_text, "exponents, e.g. 4/3,2,4");
  scan->add_option("--res", res_text, "resolutions, e.g. 128,256,512");
  scan->add_option("--seed", seed, "probe seed");
  scan->add_option("--probes", probes, "probes per resolution");
  scan->add_option("--b", b, "decay exponent for --op peral");
  scan->add_option("--half-width", half_width, "box half width");
  scan->add_option("--potential", scan_potential, "potential for waveop, born1, omega");

  auto* field = app.add_subcommand("field", "write an annular Gaussian test field");
  double center = 2.0, width = 0.3;
  std::string shift_text = "0,0", field_out;
  field->add_option("--center", center, "annulus center |xi|");
  field->add_option("--width", width, "annulus width");
  field->add_option("--shift", shift_text, "spatial shift s1,s2");
  field->add_option("--out", field_out, "output BSF1 field")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (!config.empty()) load_config(config, settings);
    if (threads > 0) set_thread_count(threads);
    if (!grid_text.empty()) settings.operator_grid = parse_grid(grid_text);

    if (keval->parsed()) {
      const cplx z = parse_complex(z_text);
      const auto path = hpath == "series" ? specfun::HankelPath::Series
                        : hpath == "integral" ? specfun::HankelPath::Integral
                                              : specfun::HankelPath::Auto;
      std::vector<KernelSample> rows;
      Json out = Json::array();
      for (double r : parse_list(r_text)) {
        const cplx green = specfun::green_kernel(z, r, path);
        const cplx res = specfun::biharm_resolvent_kernel(z, r);
        rows.push_back({z, r, res});
        out.push_back({{"z", complex_json(z)}, {"r", r}, {"green", complex_json(green)}, {"resolvent", complex_json(res)}});
      }
      if (csv)
        std::cout << kernel_csv(rows);
      else
        emit(out);
    } else if (kl->parsed()) {
      const auto v = eval_kernel_l(lx, ly, la, lpath == "parts" ? LPath::Parts : LPath::Naive);
      emit({{"x", lx}, {"y", ly}, {"a", la}, {"path", lpath}, {"value", v.value}, {"error", v.error},
            {"normalized", normalized_l(lx, ly, v.value)}});
    } else if (classify->parsed()) {
      const auto p = load_potential(potential, settings.operator_grid);
      const auto rep = classify_zero_energy(p, tol > 0.0 ? tol : settings.classify_tol);
      Json j = to_json(rep);
      j["potential"] = p.source;
      j["support"] = p.size();
      if (!json_out.empty()) {
        std::ofstream os(json_out);
        if (!os) throw Io("cannot write " + json_out);
        os << j.dump(2) << '\n';
      }
      emit(j);
    } else if (expand->parsed()) {
      const auto p = load_potential(potential, settings.operator_grid);
      const auto lambdas = parse_list(sweep);
      const auto rep = asymptotic_orders(lambdas, p);
      if (csv) {
        std::cout << "lambda,n4_norm,b_remainder,truncation\n";
        for (std::size_t i = 0; i < lambdas.size(); ++i)
          std::cout << lambdas[i] << ',' << rep.n4_norms[i] << ',' << rep.b_remainder[i] << ',' << rep.truncation[i]
                    << '\n';
      } else {
        emit({{"potential", p.source},
              {"lambdas", lambdas},
              {"n4_norms", rep.n4_norms},
              {"b_remainder", rep.b_remainder},
              {"truncation", rep.truncation},
              {"n4_slope", number(rep.n4_slope)},
              {"b_slope", number(rep.b_slope)}});
      }
    } else if (wave->parsed()) {
      const Field in = read_field(in_path);
      const auto p = load_potential(potential, settings.operator_grid);
      auto band_of = [&]() {
        if (band_text.empty()) return certify(in);
        const auto band = parse_list(band_text);
        if (band.size() != 2) throw InvalidArgument("--band takes lo,hi");
        return project_annulus(in, band[0], band[1]);
      };
      const TestFunction u = band_of();
      WaveOperatorConfig cfg;
      cfg.lambda_nodes = settings.lambda_nodes;
      cfg.angular_nodes = settings.angular_nodes;
      cfg.inv_tol = settings.inv_tol;
      if (mode[0] == "born") {
        cfg.mode = WaveMode::Born;
        cfg.born_order = mode.size() > 1 ? std::stoi(mode[1]) : cfg.born_order;
      } else if (mode[0] != "full-inverse") {
        throw InvalidArgument("--mode is full-inverse or born N");
      }
      write_field(out_path, apply_wave_operator(u, p, cfg));
      Json j{{"in", in_path}, {"out", out_path}, {"band", {u.lambda_min, u.lambda_max}}, {"mode", mode[0]}};
      if (!no_metrics) {
        cfg.born_order = std::max(cfg.born_order, 2);
        j["metrics"] = to_json(wave_metrics(u, p, cfg));
      }
      emit(j);
    } else if (verify->parsed()) {
      const auto results = run_suite(suite);
      Json checks = Json::array();
      bool all = true;
      for (const auto& r : results) {
        all = all && r.passed;
        checks.push_back({{"name", r.name}, {"measured", number(r.measured)}, {"relation", r.relation},
                          {"threshold", r.threshold}, {"passed", r.passed}, {"detail", r.detail},
                          {"seconds", r.seconds}});
      }
      if (csv) {
        std::cout << "name,measured,relation,threshold,passed\n";
        for (const auto& r : results)
          std::cout << r.name << ',' << r.measured << ',' << r.relation << ',' << r.threshold << ','
                    << (r.passed ? "true" : "false") << '\n';
      } else {
        emit({{"suite", suite}, {"passed", all}, {"checks", checks}});
      }
      return all ? 0 : 1;
    } else if (field->parsed()) {
      const auto shift = parse_list(shift_text);
      if (shift.size() != 2) throw InvalidArgument("--shift takes s1,s2");
      const auto u = annular_gaussian(settings.field_grid, center, width, shift[0], shift[1]);
      write_field(field_out, u.u);
      emit({{"out", field_out},
            {"grid", {settings.field_grid.n(), settings.field_grid.half_width()}},
            {"band", {u.lambda_min, u.lambda_max}}});
    } else if (scan->parsed()) {
      LpScanConfig cfg = op == "peral" ? peral_defaults() : LpScanConfig{};
      cfg.p_grid = parse_list(p_text);
      if (!res_text.empty()) {
        cfg.resolutions.clear();
        for (double r : parse_list(res_text)) cfg.resolutions.push_back(static_cast<int>(r));
      }
      cfg.seed = seed;
      cfg.probes = probes;
      if (half_width > 0.0) cfg.half_width = half_width;
      if (!scan_potential.empty()) cfg.potential = scan_potential;
      const auto rep = op == "peral" ? peral_scan(b, cfg) : lp_scan(op, cfg);
      if (csv)
        std::cout << lp_scan_csv(rep);
      else
        emit(to_json(rep));
    }
  } catch (const Error& e) {
    std::cerr << Json{{"error", error_kind_name(e.kind())}, {"message", e.what()}}.dump() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << Json{{"error", "Internal"}, {"message", e.what()}}.dump() << '\n';
    return 2;
  }
  return 0;
}
