#include "bpb/martingale.hpp"

#include <cmath>
#include <stdexcept>

#include <json.hpp>

#include "bpb/errors.hpp"

namespace bpb {

namespace {

void check_axis(int axis) {
  if (axis != 1 && axis != 2) throw std::invalid_argument("axis must be 1 or 2");
}

const AxisShape& axis_shape(const GridFunction& f, int axis) {
  return axis == 1 ? f.shape1 : f.shape2;
}

void check_weight_shape(const GridFunction& f, const AxisFunction& b, int axis,
                        const char* where) {
  if (!(axis_shape(f, axis) == b.shape))
    throw std::invalid_argument(std::string(where) + ": weight mesh mismatch");
}

constexpr double kMassFloor = 1e-300;

}  // namespace

GridFunction expect(const GridFunction& f, const AxisFunction& b, int axis, int p) {
  check_axis(axis);
  check_weight_shape(f, b, axis, "expect");
  const AxisShape& shape = axis_shape(f, axis);
  if (p < 0 || p > shape.depth) throw std::invalid_argument("expect: scale out of range");
  if (p == shape.depth) return f;
  std::int64_t nb = shape.block(p);
  std::int64_t nc = shape.cubes(p);
  GridFunction out = GridFunction::zero(f.shape1, f.shape2);
  for (std::int64_t k = 0; k < nc; ++k) {
    std::int64_t r0 = k * nb;
    Complex bsum = b.v.segment(r0, nb).sum();
    if (std::abs(bsum) < kMassFloor)
      throw DegenerateWeightError("expect: weight mass vanishes on a cube");
    // Averages are computed against the first row/column of the block as an
    // anchor, so the expectation of a constant is exactly that constant.
    if (axis == 1) {
      Eigen::RowVectorXcd anchor = f.v.row(r0);
      Eigen::MatrixXcd resid = f.v.middleRows(r0, nb).rowwise() - anchor;
      Eigen::RowVectorXcd avg = anchor + (b.v.segment(r0, nb).transpose() * resid) / bsum;
      out.v.middleRows(r0, nb) = avg.replicate(nb, 1);
    } else {
      Eigen::VectorXcd anchor = f.v.col(r0);
      Eigen::MatrixXcd resid = f.v.middleCols(r0, nb).colwise() - anchor;
      Eigen::VectorXcd avg = anchor + (resid * b.v.segment(r0, nb)) / bsum;
      out.v.middleCols(r0, nb) = avg.replicate(1, nb);
    }
  }
  return out;
}

AxisFunction expect(const AxisFunction& f, const AxisFunction& b, int p) {
  if (!(f.shape == b.shape)) throw std::invalid_argument("expect: weight mesh mismatch");
  if (p < 0 || p > f.shape.depth) throw std::invalid_argument("expect: scale out of range");
  if (p == f.shape.depth) return f;
  std::int64_t nb = f.shape.block(p);
  std::int64_t nc = f.shape.cubes(p);
  AxisFunction out = AxisFunction::zero(f.shape);
  for (std::int64_t k = 0; k < nc; ++k) {
    std::int64_t r0 = k * nb;
    Complex bsum = b.v.segment(r0, nb).sum();
    if (std::abs(bsum) < kMassFloor)
      throw DegenerateWeightError("expect: weight mass vanishes on a cube");
    Complex anchor = f.v(r0);
    Complex avg =
        anchor +
        b.v.segment(r0, nb)
                .cwiseProduct((f.v.segment(r0, nb).array() - anchor).matrix())
                .sum() /
            bsum;
    out.v.segment(r0, nb).setConstant(avg);
  }
  return out;
}

AxisFunction diff(const AxisFunction& f, const AxisFunction& b, int p) {
  if (p < 0 || p > f.shape.depth - 1) throw std::invalid_argument("diff: scale out of range");
  AxisFunction fine = expect(f, b, p + 1);
  AxisFunction coarse = expect(f, b, p);
  return {f.shape, fine.v - coarse.v};
}

GridFunction diff(const GridFunction& f, const AxisFunction& b, int axis, int p) {
  check_axis(axis);
  const AxisShape& shape = axis_shape(f, axis);
  if (p < 0 || p > shape.depth - 1) throw std::invalid_argument("diff: scale out of range");
  GridFunction fine = expect(f, b, axis, p + 1);
  GridFunction coarse = expect(f, b, axis, p);
  return {f.shape1, f.shape2, fine.v - coarse.v};
}

GridFunction double_diff(const GridFunction& f, const AccretivePair& pair, int p, int q) {
  GridFunction a = diff(diff(f, pair.b1, 1, p), pair.b2, 2, q);
  GridFunction b = diff(diff(f, pair.b2, 2, q), pair.b1, 1, p);
  double gap = (a.v - b.v).cwiseAbs().maxCoeff();
  if (!(gap <= 1e-9))
    throw NumericFailureError("double_diff: axis compositions disagree");
  return a;
}

GridFunction double_diff_local(const GridFunction& f, const AccretivePair& pair, int p, int q,
                               const DyadicCube& I, const DyadicCube& J) {
  if (I.scale != p || J.scale != q)
    throw std::invalid_argument("double_diff_local: cube scales must match (p, q)");
  GridFunction d = double_diff(f, pair, p, q);
  GridFunction out = GridFunction::zero(f.shape1, f.shape2);
  std::int64_t r0 = cube_path(f.shape1, I) * f.shape1.block(p);
  std::int64_t s0 = cube_path(f.shape2, J) * f.shape2.block(q);
  out.v.block(r0, s0, f.shape1.block(p), f.shape2.block(q)) =
      d.v.block(r0, s0, f.shape1.block(p), f.shape2.block(q));
  return out;
}

GridFunction adjoint_expect(const GridFunction& f, const AccretivePair& pair, int p, int q) {
  GridFunction g = adjoint_expect_axis(f, pair.b1, 1, p);
  return adjoint_expect_axis(g, pair.b2, 2, q);
}

GridFunction adjoint_expect_axis(const GridFunction& f, const AxisFunction& b, int axis, int p) {
  check_axis(axis);
  check_weight_shape(f, b, axis, "adjoint_expect_axis");
  const AxisShape& shape = axis_shape(f, axis);
  if (p < 0 || p > shape.depth) throw std::invalid_argument("adjoint_expect_axis: scale out of range");
  if (p == shape.depth) return f;
  std::int64_t nb = shape.block(p);
  std::int64_t nc = shape.cubes(p);
  GridFunction out = GridFunction::zero(f.shape1, f.shape2);
  for (std::int64_t k = 0; k < nc; ++k) {
    std::int64_t r0 = k * nb;
    Complex bsum = b.v.segment(r0, nb).sum();
    if (std::abs(bsum) < kMassFloor)
      throw DegenerateWeightError("adjoint_expect_axis: weight mass vanishes on a cube");
    if (axis == 1) {
      Eigen::RowVectorXcd avg = f.v.middleRows(r0, nb).colwise().sum() / bsum;
      out.v.middleRows(r0, nb) = b.v.segment(r0, nb) * avg;
    } else {
      Eigen::VectorXcd avg = f.v.middleCols(r0, nb).rowwise().sum() / bsum;
      out.v.middleCols(r0, nb) = avg * b.v.segment(r0, nb).transpose();
    }
  }
  return out;
}

GridFunction adjoint_diff_axis(const GridFunction& f, const AxisFunction& b, int axis, int p) {
  check_axis(axis);
  const AxisShape& shape = axis_shape(f, axis);
  if (p < 0 || p > shape.depth - 1)
    throw std::invalid_argument("adjoint_diff_axis: scale out of range");
  GridFunction fine = adjoint_expect_axis(f, b, axis, p + 1);
  GridFunction coarse = adjoint_expect_axis(f, b, axis, p);
  return {f.shape1, f.shape2, fine.v - coarse.v};
}

GridFunction adjoint_diff(const GridFunction& f, const AccretivePair& pair, int p, int q) {
  GridFunction g = adjoint_diff_axis(f, pair.b1, 1, p);
  return adjoint_diff_axis(g, pair.b2, 2, q);
}

GridFunction expect_herm_adjoint(const GridFunction& g, const AxisFunction& b, int axis, int p) {
  check_axis(axis);
  check_weight_shape(g, b, axis, "expect_herm_adjoint");
  const AxisShape& shape = axis_shape(g, axis);
  if (p < 0 || p > shape.depth) throw std::invalid_argument("expect_herm_adjoint: scale out of range");
  if (p == shape.depth) return g;
  std::int64_t nb = shape.block(p);
  std::int64_t nc = shape.cubes(p);
  GridFunction out = GridFunction::zero(g.shape1, g.shape2);
  for (std::int64_t k = 0; k < nc; ++k) {
    std::int64_t r0 = k * nb;
    Complex bsum = b.v.segment(r0, nb).sum();
    if (std::abs(bsum) < kMassFloor)
      throw DegenerateWeightError("expect_herm_adjoint: weight mass vanishes on a cube");
    if (axis == 1) {
      Eigen::RowVectorXcd avg = g.v.middleRows(r0, nb).colwise().sum() / std::conj(bsum);
      out.v.middleRows(r0, nb) = b.v.segment(r0, nb).conjugate() * avg;
    } else {
      Eigen::VectorXcd avg = g.v.middleCols(r0, nb).rowwise().sum() / std::conj(bsum);
      out.v.middleCols(r0, nb) = avg * b.v.segment(r0, nb).adjoint();
    }
  }
  return out;
}

GridFunction diff_herm_adjoint(const GridFunction& g, const AxisFunction& b, int axis, int p) {
  check_axis(axis);
  const AxisShape& shape = axis_shape(g, axis);
  if (p < 0 || p > shape.depth - 1)
    throw std::invalid_argument("diff_herm_adjoint: scale out of range");
  GridFunction fine = expect_herm_adjoint(g, b, axis, p + 1);
  GridFunction coarse = expect_herm_adjoint(g, b, axis, p);
  return {g.shape1, g.shape2, fine.v - coarse.v};
}

GridFunction adjoint_expect_axis_herm_adjoint(const GridFunction& g, const AxisFunction& b,
                                              int axis, int p) {
  check_axis(axis);
  check_weight_shape(g, b, axis, "adjoint_expect_axis_herm_adjoint");
  const AxisShape& shape = axis_shape(g, axis);
  if (p < 0 || p > shape.depth)
    throw std::invalid_argument("adjoint_expect_axis_herm_adjoint: scale out of range");
  if (p == shape.depth) return g;
  std::int64_t nb = shape.block(p);
  std::int64_t nc = shape.cubes(p);
  GridFunction out = GridFunction::zero(g.shape1, g.shape2);
  for (std::int64_t k = 0; k < nc; ++k) {
    std::int64_t r0 = k * nb;
    Complex bsum = b.v.segment(r0, nb).sum();
    if (std::abs(bsum) < kMassFloor)
      throw DegenerateWeightError("adjoint_expect_axis_herm_adjoint: weight mass vanishes on a cube");
    if (axis == 1) {
      Eigen::RowVectorXcd avg =
          (b.v.segment(r0, nb).conjugate().transpose() * g.v.middleRows(r0, nb)) / std::conj(bsum);
      out.v.middleRows(r0, nb) = avg.replicate(nb, 1);
    } else {
      Eigen::VectorXcd avg = (g.v.middleCols(r0, nb) * b.v.segment(r0, nb).conjugate()) / std::conj(bsum);
      out.v.middleCols(r0, nb) = avg.replicate(1, nb);
    }
  }
  return out;
}

MartingaleCoefficients decompose(const GridFunction& f, const AccretivePair& pair) {
  int n1 = f.shape1.depth, n2 = f.shape2.depth;
  MartingaleCoefficients c;
  c.shape1 = f.shape1;
  c.shape2 = f.shape2;
  GridFunction e0_axis2 = expect(f, pair.b2, 2, 0);
  c.corner = expect(e0_axis2, pair.b1, 1, 0);
  c.D.resize(static_cast<std::size_t>(n1));
  c.row.reserve(static_cast<std::size_t>(n1));
  for (int p = 0; p < n1; ++p) {
    GridFunction dp = diff(f, pair.b1, 1, p);
    c.row.push_back(expect(dp, pair.b2, 2, 0));
    c.D[static_cast<std::size_t>(p)].reserve(static_cast<std::size_t>(n2));
    for (int q = 0; q < n2; ++q)
      c.D[static_cast<std::size_t>(p)].push_back(diff(dp, pair.b2, 2, q));
  }
  c.col.reserve(static_cast<std::size_t>(n2));
  GridFunction e0_axis1 = expect(f, pair.b1, 1, 0);
  for (int q = 0; q < n2; ++q) c.col.push_back(diff(e0_axis1, pair.b2, 2, q));
  return c;
}

GridFunction reconstruct(const MartingaleCoefficients& coeffs) {
  GridFunction out = GridFunction::zero(coeffs.shape1, coeffs.shape2);
  out.v = coeffs.corner.v;
  for (const auto& r : coeffs.row) out.v += r.v;
  for (const auto& c : coeffs.col) out.v += c.v;
  for (const auto& rowD : coeffs.D)
    for (const auto& d : rowD) out.v += d.v;
  return out;
}

GridFunction square_function(const GridFunction& f, const AccretivePair& pair) {
  MartingaleCoefficients c = decompose(f, pair);
  GridFunction out = GridFunction::zero(f.shape1, f.shape2);
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(f.v.rows(), f.v.cols());
  for (const auto& rowD : c.D)
    for (const auto& d : rowD) acc += d.v.cwiseAbs2();
  out.v = acc.cwiseSqrt().cast<Complex>();
  return out;
}

GridFunction maximal_function(const GridFunction& f, const AccretivePair& pair) {
  int n1 = f.shape1.depth, n2 = f.shape2.depth;
  Eigen::MatrixXd best = Eigen::MatrixXd::Zero(f.v.rows(), f.v.cols());
  for (int p = 0; p <= n1; ++p) {
    GridFunction ep = expect(f, pair.b1, 1, p);
    for (int q = 0; q <= n2; ++q)
      best = best.cwiseMax(expect(ep, pair.b2, 2, q).v.cwiseAbs());
  }
  GridFunction out = GridFunction::zero(f.shape1, f.shape2);
  out.v = best.cast<Complex>();
  return out;
}

GridFunction project_mean_zero(const GridFunction& f, const AccretivePair& pair) {
  GridFunction g = {f.shape1, f.shape2, f.v - expect(f, pair.b1, 1, 0).v};
  return {f.shape1, f.shape2, g.v - expect(g, pair.b2, 2, 0).v};
}

std::string to_json(const MartingaleCoefficients& coeffs) {
  nlohmann::json j;
  j["depths"] = {coeffs.shape1.depth, coeffs.shape2.depth};
  nlohmann::json entries = nlohmann::json::array();
  for (std::size_t p = 0; p < coeffs.D.size(); ++p)
    for (std::size_t q = 0; q < coeffs.D[p].size(); ++q)
      entries.push_back({{"p", p},
                         {"q", q},
                         {"function", nlohmann::json::parse(to_json(coeffs.D[p][q]))}});
  j["entries"] = entries;
  nlohmann::json row = nlohmann::json::array();
  for (const auto& r : coeffs.row) row.push_back(nlohmann::json::parse(to_json(r)));
  j["row"] = row;
  nlohmann::json col = nlohmann::json::array();
  for (const auto& c : coeffs.col) col.push_back(nlohmann::json::parse(to_json(c)));
  j["column"] = col;
  j["corner"] = nlohmann::json::parse(to_json(coeffs.corner));
  return j.dump();
}

}  // namespace bpb
