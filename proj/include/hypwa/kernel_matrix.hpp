#pragma once

// Complex kernels over a section of core vertices, and their text format.

#include <complex>
#include <functional>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hypwa/corridor.hpp"
#include "hypwa/error.hpp"
#include "hypwa/factorization.hpp"

namespace hypwa {

using Matrix = Eigen::MatrixXcd;

struct KernelMatrix {
  std::string descriptor;  // z^d | chi_E(n) | chi_d=n | chi_Z(k,l) | f(d) | zeta | custom
  std::vector<VertexId> section;
  Matrix values;

  Eigen::Index dim() const { return values.rows(); }
};

/// The first `count` core vertices (the core is listed by vertex id, which
/// for the generators means by distance from the base point).
inline std::vector<VertexId> core_section(const RayTable& t, std::size_t count) {
  const auto core = t.core();
  count = std::min(count, core.size());
  return {core.begin(), core.begin() + static_cast<std::ptrdiff_t>(count)};
}

inline KernelMatrix distance_kernel(const RayTable& t, std::vector<VertexId> section, std::string descriptor,
                                    const std::function<Complex(int)>& f) {
  KernelMatrix k{std::move(descriptor), std::move(section), {}};
  const auto n = static_cast<Eigen::Index>(k.section.size());
  k.values.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& row = t.oracle().from(k.section[i]);
    for (Eigen::Index j = 0; j < n; ++j) k.values(i, j) = f(row[k.section[j]]);
  }
  return k;
}

inline KernelMatrix power_kernel(const RayTable& t, std::vector<VertexId> section, Complex z) {
  return distance_kernel(t, std::move(section), "z^d", [z](int d) { return std::pow(z, d); });
}

inline KernelMatrix ball_kernel(const RayTable& t, std::vector<VertexId> section, int n) {
  return distance_kernel(t, std::move(section), "chi_E(" + std::to_string(n) + ")",
                         [n](int d) { return Complex(d <= n ? 1.0 : 0.0); });
}

inline KernelMatrix sphere_kernel(const RayTable& t, std::vector<VertexId> section, int n) {
  return distance_kernel(t, std::move(section), "chi_d=" + std::to_string(n),
                         [n](int d) { return Complex(d == n ? 1.0 : 0.0); });
}

inline KernelMatrix radial_kernel(const RayTable& t, std::vector<VertexId> section, const RadialFunction& f) {
  return distance_kernel(t, std::move(section), "f(d)", [f](int d) { return Complex(f(d)); });
}

inline KernelMatrix z_relation_kernel(const CorridorModel& m, std::vector<VertexId> section, int k, int l) {
  KernelMatrix out{"chi_Z(" + std::to_string(k) + "," + std::to_string(l) + ")", std::move(section), {}};
  const auto n = static_cast<Eigen::Index>(out.section.size());
  out.values.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      const bool z = m.in_Z(m.table().index_of(out.section[i]), m.table().index_of(out.section[j]), k, l);
      out.values(i, j) = z ? 1.0 : 0.0;
    }
  return out;
}

/// Entries <zeta-_z(y), zeta+_z(x)> evaluated through the factorization.
inline KernelMatrix zeta_kernel_matrix(const CorridorModel& m, std::vector<VertexId> section, Complex z, double tol) {
  KernelMatrix out{"zeta", std::move(section), {}};
  ZetaKernel zk(m, z, tol);
  const auto n = static_cast<Eigen::Index>(out.section.size());
  out.values.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      out.values(i, j) = zk.at(m.table().index_of(out.section[i]), m.table().index_of(out.section[j])).value;
  return out;
}

inline KernelMatrix custom_kernel(Matrix values) {
  KernelMatrix k{"custom", {}, std::move(values)};
  for (Eigen::Index i = 0; i < k.values.rows(); ++i) k.section.push_back(static_cast<VertexId>(i));
  return k;
}

/// Rows of whitespace-separated "re,im" pairs, full double precision.
inline void write_matrix_text(std::ostream& os, const Matrix& a) {
  std::ostringstream buf;
  buf.precision(17);
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) buf << (j ? " " : "") << a(i, j).real() << ',' << a(i, j).imag();
    buf << '\n';
  }
  os << buf.str();
}

inline Matrix read_matrix_text(std::istream& is) {
  std::vector<std::vector<Complex>> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string tok;
    std::vector<Complex> row;
    while (ls >> tok) {
      const auto comma = tok.find(',');
      if (comma == std::string::npos) throw InputError("matrix line " + std::to_string(lineno) + ": expected re,im");
      try {
        row.emplace_back(std::stod(tok.substr(0, comma)), std::stod(tok.substr(comma + 1)));
      } catch (const std::exception&) {
        throw InputError("matrix line " + std::to_string(lineno) + ": bad number '" + tok + "'");
      }
    }
    if (row.empty()) continue;
    if (!rows.empty() && row.size() != rows.front().size())
      throw InputError("matrix line " + std::to_string(lineno) + ": ragged row");
    rows.push_back(std::move(row));
  }
  Matrix a(static_cast<Eigen::Index>(rows.size()), rows.empty() ? 0 : static_cast<Eigen::Index>(rows.front().size()));
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) a(i, j) = rows[i][j];
  return a;
}

}  // namespace hypwa
