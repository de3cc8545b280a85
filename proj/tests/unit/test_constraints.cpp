#include <doctest.h>

#include <cmath>
#include <limits>

#include "cgm/constraints/cffd.hpp"
#include "cgm/constraints/dataset.hpp"
#include "cgm/constraints/linear.hpp"
#include "cgm/constraints/volume.hpp"
#include "cgm/geometry/shapes.hpp"
#include "cgm/geometry/stl.hpp"
#include "cgm/numerics/rng.hpp"
#include "fixtures.hpp"

using namespace cgm;

namespace {

FfdLattice sphere_lattice(std::array<int, 3> grid = {2, 2, 2}) {
  return FfdLattice::box(grid, Vec3::Constant(-1.1), Vec3::Constant(2.2));
}

// Residual of x against the row space of m: ||x - m^T (m m^T)^+ m x||.
double row_space_residual(const Matrix& m, const Vector& x) {
  const Matrix mt = m.transpose();
  const Vector coef = mt.completeOrthogonalDecomposition().solve(x);
  return (mt * coef - x).norm();
}

} // namespace

TEST_CASE("barycenter constraint") {
  const LinearConstraint k = barycenter_constraint(2, Vec3(1, 2, 3));
  CHECK(k.rows() == 3);
  CHECK(k.a(0, 0) == 0.5);
  CHECK(k.a(0, 3) == 0.5);
  CHECK(k.a.row(0).sum() == 1.0);
  CHECK(k.c[0] == 1.0);
  Rng rng(1);
  const Points cloud = rng.normal_matrix(17, 3);
  CHECK((barycenter_constraint(17, Vec3::Zero()).a * flatten(cloud) - barycenter_of(cloud)).norm() < 1e-14);
  CHECK_THROWS_AS(barycenter_constraint(0, Vec3::Zero()), DimensionError);
}

TEST_CASE("enforce on cloud") {
  SUBCASE("hand-computed projection") {
    LinearConstraint k;
    k.a = Matrix::Zero(1, 6);
    k.a(0, 0) = 0.5;
    k.a(0, 3) = 0.5;
    k.c = Vector::Zero(1);
    Points cloud = Points::Zero(2, 3);
    cloud(0, 0) = 1.0;
    cloud(1, 0) = 3.0;
    const EnforcedCloud e = enforce_on_cloud(cloud, k);
    CHECK(e.cloud(0, 0) == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(e.cloud(1, 0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(e.cloud.col(1).norm() == 0.0);
  }
  Rng rng(2);
  const Points cloud = rng.normal_matrix(40, 3);
  const Vec3 target(0.3, -0.2, 1.0);
  const LinearConstraint k = barycenter_constraint(40, target);
  const EnforcedCloud e = enforce_on_cloud(cloud, k);
  SUBCASE("rigid translation to the target barycenter") {
    const Vec3 shift = target - barycenter_of(cloud);
    Points expected = cloud;
    expected.rowwise() += shift.transpose();
    CHECK((e.cloud - expected).cwiseAbs().maxCoeff() < 1e-13);
    CHECK(k.residual(flatten(e.cloud)).norm() < 1e-10 * (1.0 + target.norm()));
  }
  SUBCASE("feasible input is untouched and projection is idempotent") {
    const EnforcedCloud twice = enforce_on_cloud(e.cloud, k);
    CHECK(twice.correction.norm() < 1e-12);
    CHECK((twice.cloud - e.cloud).cwiseAbs().maxCoeff() < 1e-12);
  }
  SUBCASE("minimum norm among feasible corrections") {
    const MinNormSolver<double> solver(k.a);
    const Matrix null = solver.null_projector();
    for (int t = 0; t < 100; ++t) {
      const Vector other = e.correction + null * rng.normal_matrix(k.dim(), 1).col(0);
      CHECK(k.residual(flatten(cloud) + other).norm() < 1e-10);
      CHECK(other.norm() >= e.correction.norm() - 1e-9);
    }
  }
  SUBCASE("inconsistent rank-deficient system") {
    LinearConstraint bad = k;
    bad.a.row(1) = bad.a.row(0);
    bad.c[1] = bad.c[0] + 1.0;
    CHECK_THROWS_AS(enforce_on_cloud(cloud, bad), InfeasibleError);
  }
  SUBCASE("batched enforcer and its adjoint") {
    const LinearEnforcer enforcer(k);
    const Matrix batch = rng.normal_matrix(5, k.dim());
    const Matrix out = enforcer.apply(batch);
    for (int i = 0; i < 5; ++i) CHECK(k.residual(out.row(i).transpose()).norm() < 1e-12);
    // The projection's Jacobian is I - a^+ a, applied to a row gradient.
    const Matrix g = rng.normal_matrix(2, k.dim());
    const Matrix expected = g * MinNormSolver<double>(k.a).null_projector().transpose();
    CHECK((enforcer.backward(g) - expected).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("volume rows and enforcement") {
  const TriSurface sphere = synth_shape(ShapeKind::ellipsoid, 2, Vec3(1.0, 0.8, 1.2));
  const double v0 = volume_of(sphere);
  SUBCASE("row matches finite differences and reconstructs the volume") {
    const double h = 1e-6;
    for (int c = 0; c < 3; ++c) {
      const VolumeRow r = volume_constraint_row(sphere, c);
      CHECK(std::abs(r.row.sum()) < 1e-12);
      CHECK(std::abs(r.row.dot(sphere.vertices.col(c)) + r.offset - v0) < 1e-12 * v0);
      for (Eigen::Index i = 0; i < sphere.vertex_count(); i += 7) {
        TriSurface p = sphere, m = sphere;
        p.vertices(i, c) += h;
        m.vertices(i, c) -= h;
        const double fd = (volume_of(p) - volume_of(m)) / (2 * h);
        CHECK(std::abs(fd - r.row[i]) <= 1e-7 * std::max(std::abs(r.row[i]), r.row.cwiseAbs().maxCoeff()));
      }
    }
    Rng rng(4);
    for (int t = 0; t < 5; ++t) {
      TriSurface noisy = sphere;
      noisy.vertices += 0.05 * rng.normal_matrix(sphere.vertex_count(), 3);
      const VolumeRow r = volume_constraint_row(noisy, 1);
      CHECK(std::abs(r.row.dot(noisy.vertices.col(1)) + r.offset - volume_of(noisy)) < 1e-12 * v0);
    }
    TriSurface open = sphere;
    open.faces.conservativeResize(open.faces.rows() - 1, 3);
    CHECK_THROWS_AS(volume_constraint_row(open, 0), OrientationError);
  }
  SUBCASE("target equal to current volume leaves the surface alone") {
    CHECK((enforce_volume(sphere, v0).vertices - sphere.vertices).cwiseAbs().maxCoeff() < 1e-12);
  }
  SUBCASE("first-pass mode reaches the target") {
    const TriSurface out = enforce_volume(sphere, 1.1 * v0);
    CHECK(std::abs(volume_of(out) - 1.1 * v0) < 1e-9 * v0);
    CHECK((out.vertices.col(1) - sphere.vertices.col(1)).norm() == 0.0);
    CHECK((out.vertices.col(2) - sphere.vertices.col(2)).norm() == 0.0);
  }
  SUBCASE("equal thirds: each pass closes a third of the deficit") {
    Points v = sphere.vertices;
    const VolumeEnforcement how{{2, 0, 1}, VolumeSplit::equal_thirds};
    const std::vector<VolumePass> passes = enforce_volume_in_place(v, sphere.faces, 0.9 * v0, how);
    CHECK(passes.size() == 3);
    CHECK(passes[0].component == 2);
    CHECK(std::abs(signed_volume(v, sphere.faces) - 0.9 * v0) < 1e-9 * v0);
    // Replay pass by pass.
    Points replay = sphere.vertices;
    for (int p = 0; p < 3; ++p) {
      const int c = how.order[static_cast<std::size_t>(p)];
      const VolumeRow r = volume_row(replay, sphere.faces, c);
      const double goal = v0 + (0.9 * v0 - v0) * (p + 1) / 3.0;
      replay.col(c) += r.row * ((goal - r.row.dot(replay.col(c)) - r.offset) / r.row.squaredNorm());
      CHECK(std::abs(signed_volume(replay, sphere.faces) - goal) < 1e-9 * v0);
    }
    CHECK((replay - v).cwiseAbs().maxCoeff() < 1e-12);
  }
  SUBCASE("every order is exact") {
    const std::array<std::array<int, 3>, 6> orders{{{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};
    for (const auto& order : orders)
      for (VolumeSplit split : {VolumeSplit::first_pass, VolumeSplit::equal_thirds})
        CHECK(std::abs(volume_of(enforce_volume(sphere, 1.2 * v0, {order, split})) - 1.2 * v0) < 1e-9 * v0);
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(enforce_volume(sphere, v0, {{0, 0, 1}, VolumeSplit::first_pass}), ConfigError);
    TriSurface flat = sphere;
    flat.vertices.setZero();
    CHECK_THROWS_AS(enforce_volume(flat, 1.0), DegenerateError);
  }
  SUBCASE("satisfaction survives an STL round trip") {
    const TriSurface out = enforce_volume(sphere, 1.05 * v0);
    const TriSurface back = parse_stl(format_stl(out));
    CHECK(std::abs(volume_of(back) - 1.05 * v0) < 1e-9 * v0);
  }
}

TEST_CASE("cffd barycenter") {
  const TriSurface sphere = synth_shape(ShapeKind::icosphere, 2);
  const FfdLattice lattice = sphere_lattice();
  const Vec3 target = barycenter_of(sphere.vertices);
  const LinearConstraint k = barycenter_constraint(sphere.vertex_count(), target);
  Rng rng(7);
  const DisplacementField free = 0.05 * rng.normal_matrix(lattice.control_count(), 3);

  SUBCASE("corrected deformation satisfies the constraint") {
    const DisplacementField dd = cffd_correct(lattice, sphere.vertices, free, k);
    const Points out = ffd_map(lattice, free + dd, sphere.vertices).points;
    CHECK((barycenter_of(out) - target).cwiseAbs().maxCoeff() < 1e-9);
    // KKT: the correction lies in the row space of the composite system.
    const Matrix system = cffd_system(lattice, sphere.vertices, k);
    CHECK(row_space_residual(system, flatten(dd)) < 1e-9);
    const DisplacementField again = cffd_correct(lattice, sphere.vertices, free + dd, k);
    CHECK(again.cwiseAbs().maxCoeff() < 1e-12);
  }
  SUBCASE("unit lattice: uniform correction equal to the mapped deficit") {
    // Centred on the reflection-symmetric sphere, so every corner has the same mean weight.
    const Mat3 a = Vec3(2.5, 2.4, 2.6).asDiagonal();
    const FfdLattice unit({1, 1, 1}, a, -0.5 * a.diagonal());
    const DisplacementField f = 0.05 * rng.normal_matrix(unit.control_count(), 3);
    const Points deformed = ffd_map(unit, f, sphere.vertices).points;
    const Vec3 deficit = target - barycenter_of(deformed);
    const DisplacementField dd = cffd_correct(unit, sphere.vertices, f, k);
    const Vec3 expected = a.inverse() * deficit;
    for (int c = 0; c < unit.control_count(); ++c)
      CHECK((dd.row(c).transpose() - expected).cwiseAbs().maxCoeff() < 1e-12);
  }
  SUBCASE("large weight suppresses the correction at one control point") {
    Vector w = Vector::Ones(lattice.control_count());
    const int heavy = lattice.index(1, 1, 1);
    w[heavy] = 1e6;
    CffdOptions options;
    options.weights = w;
    const DisplacementField dd = cffd_correct(lattice, sphere.vertices, free, k, options);
    double others = 0.0;
    for (int c = 0; c < lattice.control_count(); ++c)
      if (c != heavy) others = std::max(others, dd.row(c).norm());
    CHECK(dd.row(heavy).norm() <= 1e-6 * others * 1e3);
    const Points out = ffd_map(lattice, free + dd, sphere.vertices).points;
    CHECK((barycenter_of(out) - target).cwiseAbs().maxCoeff() < 1e-9);
    // Weighted KKT: dd in the row space of diag(w)^-2 S^T.
    const Matrix system = cffd_system(lattice, sphere.vertices, k);
    Vector w3(3 * lattice.control_count());
    for (int c = 0; c < lattice.control_count(); ++c) w3.segment<3>(3 * c).setConstant(w[c]);
    const Vector scaled = w3.array().square() * flatten(dd).array();
    CHECK(row_space_residual(system, scaled) < 1e-9 * std::max(1.0, scaled.norm()));
  }
  SUBCASE("pinned control points get exactly zero correction") {
    Vector w = Vector::Ones(lattice.control_count());
    for (int j = 0; j <= 2; ++j)
      for (int kk = 0; kk <= 2; ++kk) {
        w[lattice.index(0, j, kk)] = 0.0;
        w[lattice.index(2, j, kk)] = std::numeric_limits<double>::infinity();
      }
    CffdOptions options;
    options.weights = w;
    const DisplacementField dd = cffd_correct(lattice, sphere.vertices, free, k, options);
    for (int j = 0; j <= 2; ++j)
      for (int kk = 0; kk <= 2; ++kk) {
        CHECK(dd.row(lattice.index(0, j, kk)).norm() == 0.0);
        CHECK(dd.row(lattice.index(2, j, kk)).norm() == 0.0);
      }
    const Points out = ffd_map(lattice, free + dd, sphere.vertices).points;
    CHECK((barycenter_of(out) - target).cwiseAbs().maxCoeff() < 1e-9);
  }
  SUBCASE("everything pinned is infeasible") {
    CffdOptions options;
    options.weights = Vector::Zero(lattice.control_count());
    CHECK_THROWS_AS(cffd_correct(lattice, sphere.vertices, free, k, options), InfeasibleError);
    options.weights = Vector::Constant(lattice.control_count(), -1.0);
    CHECK_THROWS_AS(cffd_correct(lattice, sphere.vertices, free, k, options), DimensionError);
  }
  SUBCASE("subset constraint") {
    CffdOptions options;
    for (int i = 0; i < sphere.vertex_count(); i += 3) options.subset.push_back(i);
    const Points sub = ffd_map(lattice, lattice.zero_displacement(), sphere.vertices).points;
    Points chosen(static_cast<Eigen::Index>(options.subset.size()), 3);
    for (std::size_t i = 0; i < options.subset.size(); ++i)
      chosen.row(static_cast<Eigen::Index>(i)) = sub.row(options.subset[i]);
    const LinearConstraint ks = barycenter_constraint(chosen.rows(), barycenter_of(chosen));
    const DisplacementField dd = cffd_correct(lattice, sphere.vertices, free, ks, options);
    const Points out = ffd_map(lattice, free + dd, sphere.vertices).points;
    Points out_chosen(chosen.rows(), 3);
    for (std::size_t i = 0; i < options.subset.size(); ++i)
      out_chosen.row(static_cast<Eigen::Index>(i)) = out.row(options.subset[i]);
    CHECK((barycenter_of(out_chosen) - barycenter_of(chosen)).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("cffd volume") {
  const TriSurface sphere = synth_shape(ShapeKind::icosphere, 2);
  const double v0 = volume_of(sphere);
  const FfdLattice lattice = sphere_lattice();
  Rng rng(8);
  const DisplacementField free = 0.08 * rng.normal_matrix(lattice.control_count(), 3);
  for (VolumeSplit split : {VolumeSplit::first_pass, VolumeSplit::equal_thirds}) {
    const VolumeEnforcement how{{1, 2, 0}, split};
    const DisplacementField dd = cffd_correct_volume(lattice, sphere, free, v0, {}, how);
    const Points out = ffd_map(lattice, free + dd, sphere.vertices).points;
    CHECK(std::abs(signed_volume(out, sphere.faces) - v0) < 1e-9 * v0);
    if (split == VolumeSplit::first_pass) {
      CHECK(dd.col(0).norm() == 0.0);
      CHECK(dd.col(2).norm() == 0.0);
    }
  }
  CffdOptions all_pinned;
  all_pinned.weights = Vector::Zero(lattice.control_count());
  CHECK_THROWS_AS(cffd_correct_volume(lattice, sphere, free, v0, all_pinned), InfeasibleError);
}

TEST_CASE("cffd datasets") {
  const TriSurface sphere = synth_shape(ShapeKind::icosphere, 2);
  SUBCASE("volume dataset, deterministic and thread independent") {
    CffdSpec spec{sphere_lattice(), ConstraintSpec::preserving(ConstraintKind::volume, sphere), {}, 0.05};
    const auto one = sample_cffd_dataset(sphere, spec, 4, 21, 1);
    const auto two = sample_cffd_dataset(sphere, spec, 4, 21, 3);
    REQUIRE(one.size() == 4);
    for (std::size_t i = 0; i < one.size(); ++i) {
      CHECK(one[i].surface.vertices == two[i].surface.vertices);
      CHECK(std::abs(volume_of(one[i].surface) - spec.constraint.volume) < 1e-9 * spec.constraint.volume);
      CHECK(spec.constraint.satisfied(one[i].surface.vertices, one[i].surface.faces));
    }
    CHECK((one[0].surface.vertices - one[1].surface.vertices).norm() > 0.0);

    const auto dir_a = test::scratch_dir("dataset_a");
    const auto dir_b = test::scratch_dir("dataset_b");
    write_cffd_dataset(dir_a, one, spec);
    write_cffd_dataset(dir_b, sample_cffd_dataset(sphere, spec, 4, 21, 2), spec);
    for (std::size_t i = 0; i < one.size(); ++i)
      CHECK(test::slurp(dir_a / sample_file_name(i)) == test::slurp(dir_b / sample_file_name(i)));
    CHECK(test::slurp(dir_a / "manifest.tsv") == test::slurp(dir_b / "manifest.tsv"));
    const auto back = read_surface_dataset(dir_a);
    REQUIRE(back.size() == 4);
    for (const auto& s : back) CHECK(spec.constraint.satisfied(s.vertices, s.faces));
  }
  SUBCASE("barycenter dataset") {
    CffdSpec spec{sphere_lattice(), ConstraintSpec::preserving(ConstraintKind::barycenter, sphere), {}, 0.1};
    for (const auto& s : sample_cffd_dataset(sphere, spec, 3, 5))
      CHECK((barycenter_of(s.surface.vertices) - spec.constraint.barycenter).cwiseAbs().maxCoeff() < 1e-9);
  }
  SUBCASE("zero sigma gives copies of the base") {
    CffdSpec spec{sphere_lattice(), ConstraintSpec::preserving(ConstraintKind::volume, sphere), {}, 0.0};
    for (const auto& s : sample_cffd_dataset(sphere, spec, 3, 5))
      CHECK((s.surface.vertices - sphere.vertices).cwiseAbs().maxCoeff() < 1e-12);
  }
}
