#include "nibt/io.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>

namespace nibt {

using nlohmann::json;

namespace {

json real_matrix(const Mat& M) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < M.cols(); ++j) row.push_back(M(i, j));
    rows.push_back(row);
  }
  return rows;
}

double finite_number(const json& v, const char* what) {
  if (!v.is_number()) throw ValidationError(std::string(what) + ": expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ValidationError(std::string(what) + ": non-finite value");
  return x;
}

Mat read_real_matrix(const json& j, const char* what, Eigen::Index rows, Eigen::Index cols) {
  if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != rows)
    throw ValidationError(std::string(what) + ": wrong number of rows");
  Mat M(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const json& row = j[i];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
      throw ValidationError(std::string(what) + ": wrong number of columns");
    for (Eigen::Index k = 0; k < cols; ++k) M(i, k) = finite_number(row[k], what);
  }
  return M;
}

// Infers the shape from the nested arrays.
Mat read_real_matrix(const json& j, const char* what) {
  if (!j.is_array()) throw ValidationError(std::string(what) + ": expected nested arrays");
  const Eigen::Index rows = j.size();
  const Eigen::Index cols = rows > 0 && j[0].is_array() ? j[0].size() : 0;
  return read_real_matrix(j, what, rows, cols);
}

cplx read_pair(const json& v, const char* what) {
  if (!v.is_array() || v.size() != 2) throw ValidationError(std::string(what) + ": expected [re, im]");
  return {finite_number(v[0], what), finite_number(v[1], what)};
}

// Row-major flat list of [re, im] entries.
json flat_complex(const CMat& M) {
  json out = json::array();
  for (Eigen::Index i = 0; i < M.rows(); ++i)
    for (Eigen::Index k = 0; k < M.cols(); ++k) out.push_back({M(i, k).real(), M(i, k).imag()});
  return out;
}

CMat read_flat_complex(const json& v, int p, int m, const char* what) {
  CMat M(p, m);
  if (!v.is_array()) throw ValidationError(std::string(what) + ": expected an array");
  // Either flat [[re,im],...] or nested [[[re,im],...],...] per row.
  if (static_cast<int>(v.size()) == p * m && (v.empty() || v[0].size() == 2) &&
      (v.empty() || v[0][0].is_number())) {
    for (int i = 0; i < p; ++i)
      for (int k = 0; k < m; ++k) M(i, k) = read_pair(v[i * m + k], what);
    return M;
  }
  if (static_cast<int>(v.size()) != p) throw ValidationError(std::string(what) + ": wrong entry count");
  for (int i = 0; i < p; ++i) {
    if (!v[i].is_array() || static_cast<int>(v[i].size()) != m)
      throw ValidationError(std::string(what) + ": wrong entry count");
    for (int k = 0; k < m; ++k) M(i, k) = read_pair(v[i][k], what);
  }
  return M;
}

std::vector<double> read_freqs(const json& v, const char* what) {
  if (!v.is_array()) throw ValidationError(std::string(what) + ": expected an array");
  std::vector<double> out;
  for (const auto& x : v) out.push_back(finite_number(x, what));
  return out;
}

std::vector<CMat> read_samples(const json& v, size_t count, int p, int m, const char* what) {
  if (!v.is_array() || v.size() != count)
    throw ValidationError(std::string(what) + ": one entry per frequency expected");
  std::vector<CMat> out;
  for (const auto& x : v) out.push_back(read_flat_complex(x, p, m, what));
  return out;
}

json write_samples(const std::vector<CMat>& v) {
  json out = json::array();
  for (const auto& M : v) out.push_back(flat_complex(M));
  return out;
}

json complex_parts(const CMat& M, bool imag) {
  return real_matrix(imag ? Mat(M.imag()) : Mat(M.real()));
}

const json& field(const json& j, const char* name) {
  if (!j.contains(name)) throw ValidationError(std::string("missing field '") + name + "'");
  return j.at(name);
}

int read_dim(const json& j, const char* name) {
  const json& v = field(j, name);
  if (!v.is_number_integer() || v.get<long long>() < 0)
    throw ValidationError(std::string(name) + " must be a nonnegative integer");
  return v.get<int>();
}

}  // namespace

json model_to_json(const StateSpaceModel& model) {
  return {{"n", model.n()},
          {"m", model.m()},
          {"p", model.p()},
          {"A", real_matrix(model.A)},
          {"B", real_matrix(model.B)},
          {"C", real_matrix(model.C)},
          {"D", real_matrix(model.D)}};
}

StateSpaceModel model_from_json(const json& j) {
  if (!j.is_object()) throw ValidationError("model file must hold a JSON object");
  const int n = read_dim(j, "n"), m = read_dim(j, "m"), p = read_dim(j, "p");
  StateSpaceModel s;
  s.A = read_real_matrix(field(j, "A"), "A", n, n);
  s.B = read_real_matrix(field(j, "B"), "B", n, m);
  s.C = read_real_matrix(field(j, "C"), "C", p, n);
  s.D = read_real_matrix(field(j, "D"), "D", p, m);
  s.check();
  return s;
}

json samples_to_json(const SampleSet& s) {
  json j;
  j["frequencies_rad_s"] = s.right_freqs;
  j["samples"] = write_samples(s.right_samples);
  if (!s.right_derivs.empty()) j["derivatives"] = write_samples(s.right_derivs);
  if (!s.matched()) {
    j["left_frequencies_rad_s"] = s.left_freqs;
    j["left_samples"] = write_samples(s.left_samples);
    if (!s.left_derivs.empty()) j["left_derivatives"] = write_samples(s.left_derivs);
  }
  j["static_gain"] = real_matrix(s.D);
  j["conjugate_closed"] = s.conjugate_closed;
  if (s.derivatives_approximate) j["derivatives_approximate"] = true;
  return j;
}

SampleSet samples_from_json(const json& j) {
  if (!j.is_object()) throw ValidationError("sample file must hold a JSON object");
  SampleSet s;
  s.D = read_real_matrix(field(j, "static_gain"), "static_gain");
  if (s.D.size() == 0) throw ValidationError("static_gain must be a nonempty matrix");
  const int p = s.p(), m = s.m();
  s.right_freqs = read_freqs(field(j, "frequencies_rad_s"), "frequencies_rad_s");
  s.right_samples = read_samples(field(j, "samples"), s.right_freqs.size(), p, m, "samples");
  if (j.contains("derivatives") && !j["derivatives"].is_null())
    s.right_derivs = read_samples(j["derivatives"], s.right_freqs.size(), p, m, "derivatives");
  if (j.contains("left_frequencies_rad_s")) {
    s.left_freqs = read_freqs(j["left_frequencies_rad_s"], "left_frequencies_rad_s");
    s.left_samples = read_samples(field(j, "left_samples"), s.left_freqs.size(), p, m, "left_samples");
    if (j.contains("left_derivatives") && !j["left_derivatives"].is_null())
      s.left_derivs = read_samples(j["left_derivatives"], s.left_freqs.size(), p, m, "left_derivatives");
  } else {
    s.left_freqs = s.right_freqs;
    s.left_samples = s.right_samples;
    s.left_derivs = s.right_derivs;
  }
  if (j.contains("conjugate_closed")) {
    if (!j["conjugate_closed"].is_boolean()) throw ValidationError("conjugate_closed must be a boolean");
    s.conjugate_closed = j["conjugate_closed"].get<bool>();
  }
  if (j.contains("derivatives_approximate") && j["derivatives_approximate"].is_boolean())
    s.derivatives_approximate = j["derivatives_approximate"].get<bool>();
  s.check();
  return s;
}

json rom_to_json(const ReducedModel& rom) {
  return {{"r", rom.r()},
          {"m", rom.D.cols()},
          {"p", rom.D.rows()},
          {"A_re", complex_parts(rom.A, false)},
          {"A_im", complex_parts(rom.A, true)},
          {"B_re", complex_parts(rom.B, false)},
          {"B_im", complex_parts(rom.B, true)},
          {"C_re", complex_parts(rom.C, false)},
          {"C_im", complex_parts(rom.C, true)},
          {"D", real_matrix(rom.D)},
          {"sigma", std::vector<double>(rom.sigma.data(), rom.sigma.data() + rom.sigma.size())},
          {"unstable_poles", rom.unstable_count()}};
}

ReducedModel rom_from_json(const json& j) {
  if (!j.is_object()) throw ValidationError("ROM file must hold a JSON object");
  const int r = read_dim(j, "r"), m = read_dim(j, "m"), p = read_dim(j, "p");
  auto cm = [&](const char* re, const char* im, int rows, int cols) {
    CMat M(rows, cols);
    M.real() = read_real_matrix(field(j, re), re, rows, cols);
    M.imag() = read_real_matrix(field(j, im), im, rows, cols);
    return M;
  };
  ReducedModel rom;
  rom.A = cm("A_re", "A_im", r, r);
  rom.B = cm("B_re", "B_im", r, m);
  rom.C = cm("C_re", "C_im", p, r);
  rom.D = read_real_matrix(field(j, "D"), "D", p, m);
  const auto sigma = read_freqs(field(j, "sigma"), "sigma");
  rom.sigma = Eigen::Map<const Vec>(sigma.data(), static_cast<Eigen::Index>(sigma.size()));
  return rom;
}

json factors_to_json(const GramianFactors& f) {
  auto blocks = [](const std::vector<CMat>& v) {
    json out = json::array();
    for (const auto& b : v) out.push_back({{"re", complex_parts(b, false)}, {"im", complex_parts(b, true)}});
    return out;
  };
  return {{"variant", variant_name(f.cfg.tag)},
          {"eps", f.cfg.eps},
          {"approximate", f.approximate},
          {"zp", blocks(f.zp)},
          {"zq", blocks(f.zq)}};
}

void write_samples_csv(std::ostream& out, const SampleSet& s) {
  out << "grid,omega";
  for (int i = 0; i < s.p(); ++i)
    for (int k = 0; k < s.m(); ++k) out << ",re_H" << i + 1 << k + 1 << ",im_H" << i + 1 << k + 1;
  out << '\n' << std::setprecision(17);
  auto rows = [&](const char* tag, const std::vector<double>& w, const std::vector<CMat>& H) {
    for (size_t n = 0; n < w.size(); ++n) {
      out << tag << ',' << w[n];
      for (int i = 0; i < s.p(); ++i)
        for (int k = 0; k < s.m(); ++k) out << ',' << H[n](i, k).real() << ',' << H[n](i, k).imag();
      out << '\n';
    }
  };
  rows("right", s.right_freqs, s.right_samples);
  if (!s.matched()) rows("left", s.left_freqs, s.left_samples);
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ValidationError("malformed JSON in '" + path + "': " + e.what());
  }
}

void write_json_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write '" + path + "'");
  out << std::setw(1) << j << '\n';
}

}  // namespace nibt
