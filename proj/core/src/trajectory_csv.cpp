#include "hlab/trajectory_csv.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <system_error>

namespace hlab {

namespace {

void cell(std::ostream& out, double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  out << ',' << buf;
}

void empty_cells(std::ostream& out, int n) {
  for (int i = 0; i < n; ++i) out << ',';
}

}  // namespace

void write_trajectory_csv(const Trajectory& t, std::ostream& out) {
  const int m = t.dim();
  out << 'k';
  for (const char* col : {"x", "z", "e"}) {
    for (int i = 1; i <= m; ++i) out << ',' << col << '_' << i;
  }
  out << ",ell,phi_term,alpha,beta,gamma,delta,epsilon,residual\n";

  const std::size_t n = t.steps();
  for (std::size_t k = 0; k < t.x.size(); ++k) {
    out << k;
    for (int i = 0; i < m; ++i) cell(out, t.x[k][i]);
    if (k < n) {
      for (int i = 0; i < m; ++i) cell(out, t.z[k][i]);
      const Point e = t.e(k);
      for (int i = 0; i < m; ++i) cell(out, e[i]);
    } else {
      empty_cells(out, 2 * m);
    }
    if (k < t.ell.size()) {
      cell(out, t.ell[k]);
    } else {
      out << ',';
    }
    if (k < n) {
      const StepCoefficients& c = t.coeffs[k];
      cell(out, t.phi[k]);
      for (double v : {c.alpha, c.beta, c.gamma, c.delta, c.epsilon}) cell(out, v);
      cell(out, t.residual[k]);
    } else {
      empty_cells(out, 7);
    }
    out << '\n';
  }
}

std::string trajectory_csv(const Trajectory& t) {
  std::ostringstream os;
  write_trajectory_csv(t, os);
  return os.str();
}

void write_text_atomic(const std::filesystem::path& path, const std::string& text) {
  namespace fs = std::filesystem;
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    f << text;
    f.flush();
    if (!f) throw std::runtime_error("failed writing " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw std::runtime_error("cannot move " + tmp.string() + " to " + path.string());
  }
}

void write_trajectory_csv_file(const Trajectory& t, const std::filesystem::path& path) {
  write_text_atomic(path, trajectory_csv(t));
}

}  // namespace hlab
