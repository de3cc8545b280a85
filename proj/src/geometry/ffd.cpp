#include "cgm/geometry/ffd.hpp"

#include <cmath>

namespace cgm {

double bernstein_eval(int degree, int index, double t) {
  if (degree < 0 || index < 0 || index > degree)
    throw IndexError("bernstein_eval: index " + std::to_string(index) + " outside [0, " + std::to_string(degree) + "]");
  double binom = 1.0;
  for (int i = 1; i <= index; ++i) binom = binom * (degree - index + i) / i;
  return binom * std::pow(t, index) * std::pow(1.0 - t, degree - index);
}

FfdLattice::FfdLattice(std::array<int, 3> grid, const Mat3& affine, const Vec3& offset)
    : grid_(grid), affine_(affine), offset_(offset) {
  for (int g : grid_)
    if (g < 1) throw LatticeError("FfdLattice: grid sizes must be >= 1");
  if (!affine_.allFinite() || !offset_.allFinite()) throw LatticeError("FfdLattice: non-finite placement");
  const Eigen::VectorXd s = Eigen::JacobiSVD<Eigen::MatrixXd>(Eigen::MatrixXd(affine_)).singularValues();
  if (!(s[2] > 1e-14 * s[0])) throw LatticeError("FfdLattice: affine map is singular");
  affine_inverse_ = affine_.inverse();
}

FfdLattice FfdLattice::box(std::array<int, 3> grid, const Vec3& origin, const Vec3& lengths) {
  return FfdLattice(grid, lengths.asDiagonal(), origin);
}

std::array<int, 3> FfdLattice::ijk(int index) const {
  const int k = index % (grid_[2] + 1);
  const int rest = index / (grid_[2] + 1);
  return {rest / (grid_[1] + 1), rest % (grid_[1] + 1), k};
}

bool FfdLattice::contains(const Vec3& x) const {
  const Vec3 u = to_lattice(x);
  constexpr double slack = 1e-12;
  return (u.array() >= -slack).all() && (u.array() <= 1.0 + slack).all();
}

Points FfdLattice::control_points() const {
  Points out(control_count(), 3);
  for (int c = 0; c < control_count(); ++c) {
    const auto [i, j, k] = ijk(c);
    const Vec3 u(double(i) / grid_[0], double(j) / grid_[1], double(k) / grid_[2]);
    out.row(c) = from_lattice(u).transpose();
  }
  return out;
}

Matrix FfdLattice::influence_matrix(const Points& points) const {
  Matrix w = Matrix::Zero(points.rows(), control_count());
  std::array<std::vector<double>, 3> basis;
  for (Eigen::Index p = 0; p < points.rows(); ++p) {
    const Vec3 x = points.row(p).transpose();
    if (!contains(x)) continue;
    const Vec3 u = to_lattice(x).cwiseMax(0.0).cwiseMin(1.0);
    for (int d = 0; d < 3; ++d) {
      basis[d].resize(static_cast<std::size_t>(grid_[d] + 1));
      for (int s = 0; s <= grid_[d]; ++s) basis[d][static_cast<std::size_t>(s)] = bernstein_eval(grid_[d], s, u[d]);
    }
    for (int i = 0; i <= grid_[0]; ++i)
      for (int j = 0; j <= grid_[1]; ++j)
        for (int k = 0; k <= grid_[2]; ++k)
          w(p, index(i, j, k)) = basis[0][static_cast<std::size_t>(i)] * basis[1][static_cast<std::size_t>(j)] *
                                 basis[2][static_cast<std::size_t>(k)];
  }
  return w;
}

Points ffd_apply(const FfdLattice& lattice, const Matrix& influence, const DisplacementField& displacement,
                 const Points& points) {
  if (displacement.rows() != lattice.control_count())
    throw DimensionError("ffd: displacement field does not match the lattice");
  if (influence.rows() != points.rows() || influence.cols() != lattice.control_count())
    throw DimensionError("ffd: influence matrix has wrong shape");
  if (!displacement.allFinite()) throw DimensionError("ffd: non-finite displacement");
  // Each row: sum_c w_c (A dP_c)^T = (W dP A^T) row.
  const Matrix moved = influence * (displacement * lattice.affine().transpose());
  Points out = points;
  out += moved;
  return out;
}

FfdResult ffd_map(const FfdLattice& lattice, const DisplacementField& displacement, const Points& points) {
  FfdResult r;
  r.outside.resize(static_cast<std::size_t>(points.rows()));
  for (Eigen::Index p = 0; p < points.rows(); ++p)
    r.outside[static_cast<std::size_t>(p)] = !lattice.contains(points.row(p).transpose());
  r.points = ffd_apply(lattice, lattice.influence_matrix(points), displacement, points);
  return r;
}

} // namespace cgm
