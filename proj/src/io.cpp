#include "biscat/io.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

namespace biscat {

static_assert(std::endian::native == std::endian::little, "binary formats assume a little-endian host");

namespace {

template <class T>
void put(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::istream& is, const std::string& path) {
  T v{};
  if (!is.read(reinterpret_cast<char*>(&v), sizeof(T))) throw Io("truncated file " + path);
  return v;
}

std::ofstream open_out(const std::string& path, bool binary) {
  std::ofstream os(path, binary ? std::ios::binary : std::ios::out);
  if (!os) throw Io("cannot write " + path);
  return os;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Io("cannot read " + path);
  return is;
}

void check_magic(std::istream& is, const char* magic, const std::string& path) {
  char got[4];
  if (!is.read(got, 4) || std::memcmp(got, magic, 4) != 0)
    throw Io(path + " is not a " + std::string(magic, 4) + " file");
}

}  // namespace

void write_field(const std::string& path, const Field& u) {
  auto os = open_out(path, true);
  os.write("BSF1", 4);
  put<std::uint32_t>(os, static_cast<std::uint32_t>(u.grid.n()));
  put<double>(os, u.grid.half_width());
  put<std::uint64_t>(os, u.data.size());
  for (const cplx& v : u.data) {
    put<float>(os, static_cast<float>(v.real()));
    put<float>(os, static_cast<float>(v.imag()));
  }
  if (!os) throw Io("write failed for " + path);
}

Field read_field(const std::string& path) {
  auto is = open_in(path);
  check_magic(is, "BSF1", path);
  const auto n = get<std::uint32_t>(is, path);
  const auto half = get<double>(is, path);
  const auto count = get<std::uint64_t>(is, path);
  if (n == 0 || n % 2 != 0 || !(half > 0.0)) throw Io(path + " has an invalid grid header");
  if (count != static_cast<std::uint64_t>(n) * n) throw Io(path + " header count does not match N*N");
  Field u(PlaneGrid(static_cast<int>(n), half));
  for (auto& v : u.data) {
    const float re = get<float>(is, path), im = get<float>(is, path);
    v = cplx(re, im);
  }
  return u;
}

void write_field_csv(const std::string& path, const Field& u) {
  auto os = open_out(path, false);
  os.precision(9);
  os << "x1,x2,re,im\n";
  for (int i = 0; i < u.grid.n(); ++i)
    for (int j = 0; j < u.grid.n(); ++j) {
      const cplx v = u.at(i, j);
      os << u.grid.node(i) << ',' << u.grid.node(j) << ',' << v.real() << ',' << v.imag() << '\n';
    }
}

void write_operator(const std::string& path, const DiscreteOperator& op) {
  if (op.matrix.rows() != op.matrix.cols()) throw InvalidArgument("operator dump needs a square matrix");
  auto os = open_out(path, true);
  os.write("BSO1", 4);
  put<std::uint32_t>(os, static_cast<std::uint32_t>(op.matrix.rows()));
  put<double>(os, op.lambda.value_or(std::numeric_limits<double>::quiet_NaN()));
  put<std::uint32_t>(os, static_cast<std::uint32_t>(op.label.size()));
  os.write(op.label.data(), static_cast<std::streamsize>(op.label.size()));
  for (Eigen::Index i = 0; i < op.matrix.rows(); ++i)
    for (Eigen::Index j = 0; j < op.matrix.cols(); ++j) {
      put<double>(os, op.matrix(i, j).real());
      put<double>(os, op.matrix(i, j).imag());
    }
  if (!os) throw Io("write failed for " + path);
}

DiscreteOperator read_operator(const std::string& path) {
  auto is = open_in(path);
  check_magic(is, "BSO1", path);
  const auto n = get<std::uint32_t>(is, path);
  const auto lambda = get<double>(is, path);
  const auto len = get<std::uint32_t>(is, path);
  DiscreteOperator op;
  op.label.resize(len);
  if (len > 0 && !is.read(op.label.data(), len)) throw Io("truncated label in " + path);
  if (!std::isnan(lambda)) op.lambda = lambda;
  op.matrix.resize(n, n);
  for (Eigen::Index i = 0; i < op.matrix.rows(); ++i)
    for (Eigen::Index j = 0; j < op.matrix.cols(); ++j) {
      const double re = get<double>(is, path), im = get<double>(is, path);
      op.matrix(i, j) = cplx(re, im);
    }
  return op;
}

std::string kernel_csv(const std::vector<KernelSample>& rows) {
  std::ostringstream os;
  os.precision(17);
  os << "z_re,z_im,r,re,im\n";
  for (const auto& row : rows)
    os << row.z.real() << ',' << row.z.imag() << ',' << row.r << ',' << row.value.real() << ','
       << row.value.imag() << '\n';
  return os.str();
}

Json number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json complex_json(cplx v) { return Json::array({number(v.real()), number(v.imag())}); }

Json to_json(const LpScanReport& r) {
  Json j;
  j["op"] = r.op;
  j["p_grid"] = r.p_grid;
  j["resolutions"] = r.resolutions;
  j["seed"] = r.seed;
  j["probes"] = r.probes;
  j["ratios"] = r.ratios;
  j["spread"] = r.spread;
  Json stable = Json::array();
  for (bool s : r.stable) stable.push_back(s ? "stable" : "unstable");
  j["verdict"] = stable;
  j["surrogate"] = "norm stability under refinement, not a boundedness proof";
  return j;
}

Json to_json(const LBoundReport& r, bool with_samples) {
  Json j;
  j["a"] = r.a;
  j["domain_radius"] = r.domain_radius;
  j["sample_radii"] = r.sample_radii;
  j["running_sup"] = r.running_sup;
  Json dom = Json::array();
  for (const auto& d : r.domain_sup) dom.push_back(Json::array({d[0], d[1], d[2], d[3]}));
  j["domain_sup"] = dom;
  j["growth"] = r.growth;
  j["d3_constant"] = r.d3_constant;
  j["saturated"] = r.saturated;
  j["sample_count"] = r.samples.size();
  if (with_samples) {
    Json s = Json::array();
    for (const auto& x : r.samples)
      s.push_back({{"x", x.x_norm}, {"y", x.y_norm}, {"domain", x.domain}, {"value", x.value},
                   {"normalized", x.normalized}});
    j["samples"] = s;
  }
  return j;
}

Json to_json(const HomogeneousBoundReport& r) {
  return {{"p", r.p},           {"constant", r.constant}, {"majorant_violation", r.majorant_violation},
          {"ratios", r.ratios}, {"max_ratio", r.max_ratio}, {"holds", r.holds}};
}

Json to_json(const FourierDecayReport& r) {
  return {{"a", r.a},
          {"epsilon", r.epsilon},
          {"exponent", number(r.exponent)},
          {"weighted_sup", r.weighted_sup},
          {"passed", r.passed},
          {"vanishes", r.vanishes},
          {"samples", r.x.size()}};
}

Json to_json(const WaveMetrics& m) {
  return {{"isometry_defect", m.isometry_defect},
          {"intertwining_defect", m.intertwining_defect},
          {"born_ratios", m.born_ratios}};
}

Json to_json(const ClassificationReport& r) {
  Json j{{"verdict", verdict_name(r.verdict)},
         {"sigma_min", r.sigma_min},
         {"sigma_max", r.sigma_max},
         {"ratio", r.ratio}};
  if (r.verdict == Verdict::Singular) {
    j["moments"] = Json::array({complex_json(r.moments[0]), complex_json(r.moments[1]), complex_json(r.moments[2])});
    j["moment_residual"] = r.moment_residual;
    j["growth"] = r.growth;
    j["bilaplacian_residual"] = r.bilaplacian_residual;
  }
  return j;
}

std::string lp_scan_csv(const LpScanReport& r) {
  std::ostringstream os;
  os.precision(10);
  os << "op,p,resolution,ratio,spread,verdict\n";
  for (std::size_t i = 0; i < r.p_grid.size(); ++i)
    for (std::size_t k = 0; k < r.resolutions.size(); ++k)
      os << r.op << ',' << r.p_grid[i] << ',' << r.resolutions[k] << ',' << r.ratios[i][k] << ',' << r.spread[i]
         << ',' << (r.stable[i] ? "stable" : "unstable") << '\n';
  return os.str();
}

std::string l_bound_csv(const LBoundReport& r) {
  std::ostringstream os;
  os.precision(12);
  os << "x,y,domain,value,normalized\n";
  for (const auto& s : r.samples)
    os << s.x_norm << ',' << s.y_norm << ',' << s.domain << ',' << s.value << ',' << s.normalized << '\n';
  return os.str();
}

}  // namespace biscat
