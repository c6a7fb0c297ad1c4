#include "bpb/grid_function.hpp"

#include <cmath>
#include <istream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "bpb/errors.hpp"

namespace bpb {

namespace {

std::int64_t morton2(std::int64_t x, std::int64_t y, int levels) {
  std::int64_t m = 0;
  for (int i = 0; i < levels; ++i) {
    m |= ((x >> i) & 1) << (2 * i + 1);
    m |= ((y >> i) & 1) << (2 * i);
  }
  return m;
}

void format_double(std::ostream& os, double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  os << buf;
}

}  // namespace

double axis_cell_midpoint(const AxisShape& shape, std::int64_t cell) {
  if (shape.dim != 1) throw std::invalid_argument("axis_cell_midpoint: dim-1 axes only");
  double h = shape.cell_volume();
  return (static_cast<double>(cell) + 0.5) * h;
}

std::int64_t cube_path(const AxisShape& shape, const DyadicCube& c) {
  if (c.dim != shape.dim) throw std::invalid_argument("cube_path: dimension mismatch");
  if (c.scale > shape.depth) throw std::invalid_argument("cube_path: cube finer than mesh");
  if (shape.dim == 1) return c.index[0];
  return morton2(c.index[0], c.index[1], c.scale);
}

void require_same_mesh(const GridFunction& f, const GridFunction& g, const char* where) {
  if (!f.same_mesh(g)) throw std::invalid_argument(std::string(where) + ": mesh mismatch");
}

Complex pair_bilinear(const GridFunction& f, const GridFunction& g) {
  require_same_mesh(f, g, "pair_bilinear");
  return f.v.cwiseProduct(g.v).sum() * f.cell_volume();
}

Complex pair_sesquilinear(const GridFunction& f, const GridFunction& g) {
  require_same_mesh(f, g, "pair_sesquilinear");
  return f.v.cwiseProduct(g.v.conjugate()).sum() * f.cell_volume();
}

Complex pair_bilinear(const AxisFunction& f, const AxisFunction& g) {
  if (!(f.shape == g.shape)) throw std::invalid_argument("pair_bilinear: mesh mismatch");
  return f.v.cwiseProduct(g.v).sum() * f.shape.cell_volume();
}

Complex pair_sesquilinear(const AxisFunction& f, const AxisFunction& g) {
  if (!(f.shape == g.shape)) throw std::invalid_argument("pair_sesquilinear: mesh mismatch");
  return f.v.cwiseProduct(g.v.conjugate()).sum() * f.shape.cell_volume();
}

Norms norms(const GridFunction& f) {
  Norms n;
  double vol = f.cell_volume();
  n.l1 = f.v.cwiseAbs().sum() * vol;
  n.l2 = std::sqrt(f.v.cwiseAbs2().sum() * vol);
  n.linf = f.v.size() ? f.v.cwiseAbs().maxCoeff() : 0.0;
  return n;
}

Norms norms(const AxisFunction& f) {
  Norms n;
  double vol = f.shape.cell_volume();
  n.l1 = f.v.cwiseAbs().sum() * vol;
  n.l2 = std::sqrt(f.v.cwiseAbs2().sum() * vol);
  n.linf = f.v.size() ? f.v.cwiseAbs().maxCoeff() : 0.0;
  return n;
}

GridFunction tensor(const AxisFunction& f1, const AxisFunction& f2) {
  return {f1.shape, f2.shape, f1.v * f2.v.transpose()};
}

Complex b_average(const GridFunction& f, const DyadicCube& c1, const DyadicCube& c2,
                  const AxisFunction& b1, const AxisFunction& b2) {
  if (!(f.shape1 == b1.shape) || !(f.shape2 == b2.shape))
    throw std::invalid_argument("b_average: mesh mismatch");
  std::int64_t r0 = cube_path(f.shape1, c1) * f.shape1.block(c1.scale);
  std::int64_t nr = f.shape1.block(c1.scale);
  std::int64_t s0 = cube_path(f.shape2, c2) * f.shape2.block(c2.scale);
  std::int64_t ns = f.shape2.block(c2.scale);
  Complex bmass = b1.v.segment(r0, nr).sum() * b2.v.segment(s0, ns).sum() *
                  f.shape1.cell_volume() * f.shape2.cell_volume();
  if (std::abs(bmass) < 1e-300)
    throw DegenerateWeightError("b_average: weight mass vanishes on the rectangle");
  Complex fint = (b1.v.segment(r0, nr).transpose() * f.v.block(r0, s0, nr, ns) *
                  b2.v.segment(s0, ns))(0) *
                 f.cell_volume();
  return fint / bmass;
}

AxisFunction b_average_axis(const GridFunction& f, const DyadicCube& c,
                            const AxisFunction& b, int axis) {
  if (axis != 1 && axis != 2) throw std::invalid_argument("b_average_axis: axis must be 1 or 2");
  const AxisShape& shape = axis == 1 ? f.shape1 : f.shape2;
  if (!(shape == b.shape)) throw std::invalid_argument("b_average_axis: mesh mismatch");
  std::int64_t r0 = cube_path(shape, c) * shape.block(c.scale);
  std::int64_t nr = shape.block(c.scale);
  Complex bmass = b.v.segment(r0, nr).sum() * shape.cell_volume();
  if (std::abs(bmass) < 1e-300)
    throw DegenerateWeightError("b_average_axis: weight mass vanishes on the cube");
  double h = shape.cell_volume();
  if (axis == 1) {
    AxisFunction out = AxisFunction::zero(f.shape2);
    out.v = (b.v.segment(r0, nr).transpose() * f.v.middleRows(r0, nr) * h).transpose() / bmass;
    return out;
  }
  AxisFunction out = AxisFunction::zero(f.shape1);
  out.v = f.v.middleCols(r0, nr) * b.v.segment(r0, nr) * h / bmass;
  return out;
}

std::string to_csv(const GridFunction& f) {
  std::ostringstream os;
  os << "# depths=" << f.shape1.depth << "," << f.shape2.depth
     << " dims=" << f.shape1.dim << "," << f.shape2.dim << "\n";
  os << "re,im\n";
  for (Eigen::Index r = 0; r < f.v.rows(); ++r)
    for (Eigen::Index c = 0; c < f.v.cols(); ++c) {
      format_double(os, f.v(r, c).real());
      os << ",";
      format_double(os, f.v(r, c).imag());
      os << "\n";
    }
  return os.str();
}

namespace {

void parse_csv_header(const std::string& line, int& d1, int& d2, int& m1, int& m2) {
  if (std::sscanf(line.c_str(), "# depths=%d,%d dims=%d,%d", &d1, &d2, &m1, &m2) != 4)
    throw std::invalid_argument("grid CSV: malformed header line");
}

}  // namespace

GridFunction grid_from_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("grid CSV: empty input");
  int d1, d2, m1, m2;
  parse_csv_header(line, d1, d2, m1, m2);
  if (!std::getline(in, line)) throw std::invalid_argument("grid CSV: missing column header");
  GridFunction f = GridFunction::zero({d1, m1}, {d2, m2});
  for (Eigen::Index r = 0; r < f.v.rows(); ++r)
    for (Eigen::Index c = 0; c < f.v.cols(); ++c) {
      if (!std::getline(in, line)) throw std::invalid_argument("grid CSV: truncated data");
      double re, im;
      if (std::sscanf(line.c_str(), "%lf,%lf", &re, &im) != 2)
        throw std::invalid_argument("grid CSV: malformed data row");
      f.v(r, c) = Complex(re, im);
    }
  return f;
}

std::string to_json(const GridFunction& f) {
  nlohmann::json j;
  j["depths"] = {f.shape1.depth, f.shape2.depth};
  j["dims"] = {f.shape1.dim, f.shape2.dim};
  std::vector<double> re, im;
  re.reserve(static_cast<std::size_t>(f.v.size()));
  im.reserve(static_cast<std::size_t>(f.v.size()));
  for (Eigen::Index r = 0; r < f.v.rows(); ++r)
    for (Eigen::Index c = 0; c < f.v.cols(); ++c) {
      re.push_back(f.v(r, c).real());
      im.push_back(f.v(r, c).imag());
    }
  j["re"] = re;
  j["im"] = im;
  return j.dump();
}

GridFunction grid_from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  GridFunction f = GridFunction::zero({j["depths"][0].get<int>(), j["dims"][0].get<int>()},
                                      {j["depths"][1].get<int>(), j["dims"][1].get<int>()});
  const auto& re = j["re"];
  const auto& im = j["im"];
  if (static_cast<Eigen::Index>(re.size()) != f.v.size() ||
      static_cast<Eigen::Index>(im.size()) != f.v.size())
    throw std::invalid_argument("grid JSON: re/im length mismatch");
  std::size_t k = 0;
  for (Eigen::Index r = 0; r < f.v.rows(); ++r)
    for (Eigen::Index c = 0; c < f.v.cols(); ++c, ++k)
      f.v(r, c) = Complex(re[k].get<double>(), im[k].get<double>());
  return f;
}

std::string to_csv(const AxisFunction& f) {
  std::ostringstream os;
  os << "# depths=" << f.shape.depth << ",0 dims=" << f.shape.dim << ",0\n";
  os << "re,im\n";
  for (Eigen::Index r = 0; r < f.v.size(); ++r) {
    format_double(os, f.v(r).real());
    os << ",";
    format_double(os, f.v(r).imag());
    os << "\n";
  }
  return os.str();
}

AxisFunction axis_from_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("axis CSV: empty input");
  int d1, d2, m1, m2;
  parse_csv_header(line, d1, d2, m1, m2);
  if (!std::getline(in, line)) throw std::invalid_argument("axis CSV: missing column header");
  AxisFunction f = AxisFunction::zero({d1, m1});
  for (Eigen::Index r = 0; r < f.v.size(); ++r) {
    if (!std::getline(in, line)) throw std::invalid_argument("axis CSV: truncated data");
    double re, im;
    if (std::sscanf(line.c_str(), "%lf,%lf", &re, &im) != 2)
      throw std::invalid_argument("axis CSV: malformed data row");
    f.v(r) = Complex(re, im);
  }
  return f;
}

std::string to_json(const AxisFunction& f) {
  nlohmann::json j;
  j["depths"] = {f.shape.depth};
  j["dims"] = {f.shape.dim};
  std::vector<double> re, im;
  for (Eigen::Index r = 0; r < f.v.size(); ++r) {
    re.push_back(f.v(r).real());
    im.push_back(f.v(r).imag());
  }
  j["re"] = re;
  j["im"] = im;
  return j.dump();
}

AxisFunction axis_from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  AxisFunction f = AxisFunction::zero({j["depths"][0].get<int>(), j["dims"][0].get<int>()});
  const auto& re = j["re"];
  const auto& im = j["im"];
  if (static_cast<Eigen::Index>(re.size()) != f.v.size())
    throw std::invalid_argument("axis JSON: re/im length mismatch");
  for (Eigen::Index r = 0; r < f.v.size(); ++r)
    f.v(r) = Complex(re[static_cast<std::size_t>(r)].get<double>(),
                     im[static_cast<std::size_t>(r)].get<double>());
  return f;
}

}  // namespace bpb
