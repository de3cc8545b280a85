#include <doctest.h>

#include <cmath>
#include <numbers>

#include "cgm/numerics/rng.hpp"
#include "cgm/reduction/active_subspace.hpp"
#include "cgm/reduction/gpr.hpp"
#include "cgm/reduction/matrix_io.hpp"
#include "cgm/reduction/pca.hpp"
#include "cgm/reduction/podi.hpp"
#include "cgm/reduction/rbf.hpp"
#include "fixtures.hpp"

using namespace cgm;

namespace {

Matrix orthonormal_columns(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  return Eigen::HouseholderQR<Matrix>(rng.normal_matrix(rows, cols)).householderQ() * Matrix::Identity(rows, cols);
}

Vector linspace(double lo, double hi, int n) { return Vector::LinSpaced(n, lo, hi); }

} // namespace

TEST_CASE("pca") {
  Rng rng(1);
  SUBCASE("exact rank two") {
    const Matrix phi = orthonormal_columns(30, 2, rng);
    const Matrix w = rng.normal_matrix(12, 2);
    Matrix x = w * phi.transpose();
    x.rowwise() += rng.normal_matrix(1, 30).row(0);
    for (double eps : {1e-6, 1e-2, 1.0}) {
      PcaOptions o;
      o.tolerance = eps;
      const PcaBasis b = pca_fit(x, o);
      CHECK(b.rank() <= 2);
      if (eps < 1e-3) CHECK(b.rank() == 2);
    }
    PcaOptions o;
    o.tolerance = 1e-8;
    const PcaBasis b = pca_fit(x, o);
    CHECK(b.reconstruction_error < 1e-10);
    CHECK((b.reconstruct(b.project(x)) - x).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((b.modes.transpose() * b.modes - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-10);
  }
  SUBCASE("tolerance at the data norm still keeps one mode") {
    const Matrix x = rng.normal_matrix(10, 8);
    PcaOptions o;
    o.tolerance = (x.rowwise() - x.colwise().mean()).norm();
    CHECK(pca_fit(x, o).rank() == 1);
  }
  SUBCASE("error is monotone in r and matches the energy identity") {
    const Matrix x = rng.normal_matrix(15, 9);
    const Matrix centered = x.rowwise() - x.colwise().mean();
    double previous = INFINITY;
    for (int r = 1; r <= 9; ++r) {
      PcaOptions o;
      o.modes = r;
      const PcaBasis b = pca_fit(x, o);
      const double direct = (centered - centered * b.modes * b.modes.transpose()).norm();
      CHECK(std::abs(direct - b.reconstruction_error) < 1e-9);
      CHECK(b.reconstruction_error <= previous + 1e-12);
      previous = b.reconstruction_error;
      for (Eigen::Index i = 1; i < b.singular_values.size(); ++i)
        CHECK(b.singular_values[i] <= b.singular_values[i - 1]);
    }
  }
  SUBCASE("errors") {
    PcaOptions none;
    CHECK_THROWS_AS(pca_fit(rng.normal_matrix(5, 4), none), ConfigError);
    PcaOptions big;
    big.modes = 9;
    CHECK_THROWS_AS(pca_fit(rng.normal_matrix(5, 4), big), ConfigError);
    CHECK_THROWS_AS(pca_fit(rng.normal_matrix(1, 4), big), DimensionError);
  }
}

TEST_CASE("rbf interpolation") {
  Rng rng(2);
  const Matrix x = rng.uniform_matrix(25, 3, -1.0, 1.0);
  SUBCASE("affine data is carried by the polynomial tail") {
    Matrix a(3, 2);
    a << 1.0, -2.0, 0.5, 0.0, 3.0, 1.0;
    Matrix y = x * a;
    y.col(0).array() += 4.0;
    y.col(1).array() -= 1.0;
    for (RbfKernel k : {RbfKernel::polyharmonic_linear, RbfKernel::thin_plate}) {
      const RbfInterpolant s = rbf_fit(x, y, k);
      CHECK(s.weights.cwiseAbs().maxCoeff() < 1e-9);
      CHECK(std::abs(s.poly(0, 0) - 4.0) < 1e-9);
      CHECK((s.poly.bottomRows(3) - a).cwiseAbs().maxCoeff() < 1e-9);
      const Matrix probe = rng.uniform_matrix(10, 3, -2.0, 2.0);
      Matrix expected = probe * a;
      expected.col(0).array() += 4.0;
      expected.col(1).array() -= 1.0;
      CHECK((s.evaluate(probe) - expected).cwiseAbs().maxCoeff() < 1e-9);
    }
  }
  SUBCASE("interpolates training values and satisfies the side conditions") {
    const Matrix y = rng.normal_matrix(25, 4);
    for (RbfKernel k : {RbfKernel::polyharmonic_linear, RbfKernel::thin_plate, RbfKernel::gaussian}) {
      const RbfInterpolant s = rbf_fit(x, y, k, 0.8);
      CHECK((s.evaluate(x) - y).cwiseAbs().maxCoeff() < 1e-8 * y.norm());
      CHECK(s.weights.colwise().sum().cwiseAbs().maxCoeff() < 1e-9);
      CHECK((x.transpose() * s.weights).cwiseAbs().maxCoeff() < 1e-9);
    }
  }
  SUBCASE("minimal system") {
    Matrix simplex(4, 3);
    simplex << 0, 0, 0, 1, 0, 0, 0, 1, 0, 0, 0, 1;
    const Matrix y = rng.normal_matrix(4, 1);
    CHECK((rbf_fit(simplex, y).evaluate(simplex) - y).cwiseAbs().maxCoeff() < 1e-12);
    Matrix plane(5, 3);
    plane << 0, 0, 0, 1, 0, 0, 0, 1, 0, 1, 1, 0, 2, 3, 0;
    CHECK_THROWS_AS(rbf_fit(plane, rng.normal_matrix(5, 1)), DegenerateError);
    CHECK_THROWS_AS(rbf_fit(simplex.topRows(3), y.topRows(3)), DegenerateError);
  }
  CHECK(rbf_kernel(RbfKernel::polyharmonic_linear, 2.0, 1.0) == 2.0);
  CHECK(rbf_kernel(RbfKernel::thin_plate, 0.0, 1.0) == 0.0);
  CHECK(rbf_kernel(RbfKernel::thin_plate, std::exp(1.0), 1.0) == doctest::Approx(std::exp(2.0)));
  CHECK(rbf_kernel(RbfKernel::gaussian, 2.0, 2.0) == doctest::Approx(std::exp(-1.0)));
}

TEST_CASE("mesh morphing") {
  Rng rng(3);
  const Points sphere = rng.normal_matrix(30, 3).rowwise().normalized() * 0.5;
  const Points mesh = rng.uniform_matrix(200, 3, -1.0, 1.0);
  Points corners(8, 3);
  for (int v = 0; v < 8; ++v) corners.row(v) << (v & 1 ? 1 : -1), (v & 2 ? 1 : -1), (v & 4 ? 1 : -1);
  corners *= 2.0;
  SUBCASE("identity") {
    CHECK((morph_mesh(sphere, sphere, corners, mesh) - mesh).cwiseAbs().maxCoeff() < 1e-8);
  }
  SUBCASE("translation without fixed points") {
    Points moved = sphere;
    const Eigen::RowVector3d t(0.1, -0.2, 0.05);
    moved.rowwise() += t;
    Points expected = mesh;
    expected.rowwise() += t;
    CHECK((morph_mesh(sphere, moved, Points(0, 3), mesh) - expected).cwiseAbs().maxCoeff() < 1e-8);
  }
  SUBCASE("fixed corners stay put") {
    Points moved = sphere;
    moved.rowwise() += Eigen::RowVector3d(0.1, 0.0, 0.0);
    const Points out = morph_mesh(sphere, moved, corners, corners);
    CHECK((out - corners).cwiseAbs().maxCoeff() < 1e-8);
    const Points inner = morph_mesh(sphere, moved, corners, sphere);
    CHECK((inner - moved).cwiseAbs().maxCoeff() < 1e-8);
  }
}

TEST_CASE("gaussian process regression") {
  SUBCASE("interpolates training data") {
    Rng rng(4);
    const Matrix x = rng.uniform_matrix(15, 2, 0.0, 1.0);
    const Vector y = rng.normal_matrix(15, 1).col(0);
    const GprModel g = gpr_fit(x, y);
    CHECK((g.predict(x) - y).cwiseAbs().maxCoeff() < 1e-6);
  }
  SUBCASE("constant data") {
    Rng rng(5);
    const Matrix x = rng.uniform_matrix(10, 3, -1.0, 1.0);
    const GprModel g = gpr_fit(x, Vector::Constant(10, 2.5));
    const Vector p = g.predict(rng.uniform_matrix(50, 3, -3.0, 3.0));
    CHECK((p.array() - 2.5).abs().maxCoeff() < 1e-6);
  }
  SUBCASE("sine on twenty sites") {
    const Vector t = linspace(0.0, 2.0 * std::numbers::pi, 20);
    const GprModel g = gpr_fit(Matrix(t), t.array().sin().matrix());
    const Vector mid = (t.head(19) + t.tail(19)) / 2.0;
    const Vector p = g.predict(Matrix(mid));
    const double err = (p - mid.array().sin().matrix()).cwiseAbs().maxCoeff();
    MESSAGE("GPR sine midpoint error " << err << " at length scale " << g.length_scale);
    CHECK(err < 1e-2);
  }
  SUBCASE("fixed hyperparameters match a direct solve") {
    Rng rng(6);
    const Matrix x = rng.uniform_matrix(8, 2, 0.0, 1.0);
    const Vector y = rng.normal_matrix(8, 1).col(0);
    GprOptions o;
    o.length_scale = 0.4;
    o.signal_variance = 2.0;
    o.nugget = 1e-8;
    const GprModel g = gpr_fit(x, y, o);
    const Matrix xs = rng.uniform_matrix(5, 2, 0.0, 1.0);
    auto k = [](const Matrix& a, const Matrix& b) {
      Matrix out(a.rows(), b.rows());
      for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < b.rows(); ++j)
          out(i, j) = 2.0 * std::exp(-(a.row(i) - b.row(j)).squaredNorm() / (2 * 0.4 * 0.4));
      return out;
    };
    const double mean = y.mean();
    Matrix kk = k(x, x);
    kk.diagonal().array() += 1e-8 * 2.0;
    const Vector expected = (k(xs, x) * kk.ldlt().solve((y.array() - mean).matrix())).array() + mean;
    CHECK((g.predict(xs) - expected).cwiseAbs().maxCoeff() < 1e-9);
  }
  SUBCASE("duplicated sites escalate the nugget") {
    Matrix x(4, 1);
    x << 0.0, 0.0, 1.0, 2.0;
    Vector y(4);
    y << 1.0, 1.0, 0.0, 2.0;
    const GprModel g = gpr_fit(x, y);
    CHECK(g.predict(x).allFinite());
  }
  CHECK_THROWS_AS(gpr_fit(Matrix(0, 1), Vector(0)), DimensionError);
  Matrix pts(3, 1);
  pts << 0.0, 1.0, 3.0;
  CHECK(median_pairwise_distance(pts) == 2.0);
}

TEST_CASE("podi") {
  Rng rng(7);
  const Matrix phi = orthonormal_columns(40, 2, rng);
  const Matrix mu_train = rng.uniform_matrix(20, 2, -1.0, 1.0);
  const Matrix mu_test = rng.uniform_matrix(10, 2, -1.0, 1.0);
  const Matrix s_train = mu_train * phi.transpose(), s_test = mu_test * phi.transpose();

  SUBCASE("two-mode analytic family") {
    PodiOptions o;
    o.modes = 2;
    const PodiModel m = podi_fit(mu_train, s_train, o);
    CHECK(m.pod.reconstruction_error < 1e-10);
    CHECK(mean_relative_error(s_test, m.predict(mu_test)) < 1e-6);
    CHECK(mean_relative_error(s_train, m.predict(mu_train)) < 1e-10);
  }
  SUBCASE("all modes reproduce the training snapshots") {
    const Matrix s = rng.normal_matrix(20, 40);
    for (PodiRegressor r : {PodiRegressor::rbf, PodiRegressor::gpr}) {
      PodiOptions o;
      o.modes = 20;
      o.regressor = r;
      const PodiModel m = podi_fit(mu_train, s, o);
      CHECK((m.predict(mu_train) - s).cwiseAbs().maxCoeff() < 1e-5);
    }
  }
  SUBCASE("training inputs map to their POD projections") {
    const Matrix s = rng.normal_matrix(20, 40);
    PodiOptions o;
    o.modes = 3;
    const PodiModel m = podi_fit(mu_train, s, o);
    const Matrix projected = m.pod.reconstruct(m.pod.project(s));
    CHECK((m.predict(mu_train) - projected).cwiseAbs().maxCoeff() < 1e-8);
  }
  SUBCASE("gpr and nn regressors") {
    PodiOptions o;
    o.modes = 2;
    o.regressor = PodiRegressor::gpr;
    const PodiModel g = podi_fit(mu_train, s_train, o);
    CHECK(g.gpr.size() == 2);
    CHECK(mean_relative_error(s_test, g.predict(mu_test)) < 0.05);
    o.regressor = PodiRegressor::nn;
    o.nn.epochs = 1500;
    o.nn.lr = 3e-3;
    o.nn.width = 32;
    const PodiModel n = podi_fit(mu_train, s_train, o);
    const double err = mean_relative_error(s_test, n.predict(mu_test));
    MESSAGE("PODI-NN held-out error " << err);
    CHECK(err < 0.2);
    CHECK((n.predict(mu_test) == podi_fit(mu_train, s_train, o).predict(mu_test)));
  }
  SUBCASE("errors") {
    PodiOptions o;
    o.modes = 21;
    CHECK_THROWS_AS(podi_fit(mu_train, s_train, o), ConfigError);
    o.modes = 2;
    CHECK_THROWS_AS(podi_fit(mu_train.topRows(5), s_train, o), DimensionError);
    CHECK_THROWS_AS(podi_regressor_from_string("svm"), ConfigError);
    CHECK(podi_regressor_from_string(to_string(PodiRegressor::nn)) == PodiRegressor::nn);
  }
}

TEST_CASE("active subspaces") {
  Rng rng(8);
  SUBCASE("rank-one quadratic") {
    const Matrix mu = rng.uniform_matrix(2000, 5, -1.0, 1.0);
    Matrix grad = Matrix::Zero(2000, 5);
    grad.col(0) = 2.0 * mu.col(0);
    AsOptions o;
    o.bootstrap = 20;
    o.seed = 3;
    const AsSubspace s = as_fit(mu, grad, o);
    CHECK(std::abs(s.eigenvectors(0, 0)) > 0.999);
    CHECK((s.eigenvalues.array() >= 0.0).all());
    CHECK((s.eigenvectors.transpose() * s.eigenvectors - Matrix::Identity(5, 5)).cwiseAbs().maxCoeff() < 1e-10);
    for (Eigen::Index i = 0; i < 5; ++i) {
      CHECK(s.band_min[i] <= s.eigenvalues[i] + 1e-12);
      CHECK(s.band_max[i] >= s.eigenvalues[i] - 1e-12);
      CHECK(s.band_min[i] <= s.band_mean[i]);
      CHECK(s.band_mean[i] <= s.band_max[i]);
    }
    CHECK(s.active().cols() == 1);
    CHECK(s.inactive().cols() == 4);
  }
  SUBCASE("zero gradients") {
    const AsSubspace s = as_fit(rng.normal_matrix(10, 3), Matrix::Zero(10, 3), {1, 5, 0, {}, 1});
    CHECK(s.eigenvalues.cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("identity resample reproduces the point estimate") {
    const Matrix mu = rng.normal_matrix(30, 4);
    const Matrix g = rng.normal_matrix(30, 4);
    AsOptions o;
    std::vector<Eigen::Index> all(30);
    for (Eigen::Index i = 0; i < 30; ++i) all[static_cast<std::size_t>(i)] = i;
    o.resamples = {all};
    const AsSubspace s = as_fit(mu, g, o);
    CHECK((s.band_mean - s.eigenvalues).cwiseAbs().maxCoeff() < 1e-12);
    const Matrix cov = g.transpose() * g / 30.0;
    const Vector direct = Eigen::SelfAdjointEigenSolver<Matrix>(cov).eigenvalues().reverse();
    CHECK((s.eigenvalues - direct).cwiseAbs().maxCoeff() < 1e-12);
  }
  SUBCASE("bootstrap is deterministic and thread independent") {
    const Matrix mu = rng.normal_matrix(40, 3), g = rng.normal_matrix(40, 3);
    AsOptions a;
    a.bootstrap = 30;
    a.seed = 9;
    AsOptions b = a;
    b.threads = 3;
    const AsSubspace sa = as_fit(mu, g, a), sb = as_fit(mu, g, b);
    CHECK(sa.band_min == sb.band_min);
    CHECK(sa.band_max == sb.band_max);
    CHECK(sa.band_mean == sb.band_mean);
  }
  SUBCASE("response surface") {
    Vector w(5);
    w << 0.6, 0.8, 0.0, 0.0, 0.0;
    auto f = [&](const Vector& m) { return std::sin(w.dot(m)) + 0.5 * w.dot(m); };
    const Matrix mu = rng.uniform_matrix(200, 5, -1.0, 1.0);
    const Matrix grad = fd_gradients(f, mu);
    Vector fv(200);
    for (Eigen::Index i = 0; i < 200; ++i) fv[i] = f(mu.row(i).transpose());
    const AsSubspace s = as_fit(mu, grad, {1, 10, 1, {}, 1});
    CHECK(std::abs(s.active().col(0).dot(w)) > 0.999);
    const AsResponseSurface rs = as_response_surface(s, mu, fv);
    const Matrix test = rng.uniform_matrix(100, 5, -1.0, 1.0);
    Vector truth(100);
    for (Eigen::Index i = 0; i < 100; ++i) truth[i] = f(test.row(i).transpose());
    CHECK((rs.predict(test) - truth).norm() / truth.norm() < 1e-2);
    CHECK((rs.predict(mu) - fv).cwiseAbs().maxCoeff() < 1e-6);

    // Full-dimensional subspace equals a full-space GPR under fixed hyperparameters.
    GprOptions fixed;
    fixed.length_scale = 1.5;
    fixed.signal_variance = 1.0;
    const AsSubspace full = as_fit(mu, grad, {5, 0, 0, {}, 1});
    const Vector a = as_response_surface(full, mu, fv, fixed).predict(test);
    const Vector b = gpr_fit(mu, fv, fixed).predict(test);
    CHECK((a - b).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("finite-difference gradients") {
  Rng rng(9);
  const Matrix mu = rng.normal_matrix(6, 4);
  const Matrix g = fd_gradients([](const Vector& m) { return m.squaredNorm(); }, mu);
  CHECK((g - 2.0 * mu).cwiseAbs().maxCoeff() < 1e-8);
  CHECK(fd_gradients([](const Vector&) { return 3.0; }, mu).cwiseAbs().maxCoeff() == 0.0);
  Vector w(4);
  w << 1.0, -2.0, 0.5, 3.0;
  const Matrix lin = fd_gradients([&](const Vector& m) { return w.dot(m); }, mu);
  for (Eigen::Index i = 0; i < 6; ++i) CHECK((lin.row(i).transpose() - w).cwiseAbs().maxCoeff() < 1e-10);
  CHECK_THROWS_AS(fd_gradients([](const Vector&) { return 0.0; }, mu, 0.0), ConfigError);
}

TEST_CASE("matrix files and error tables") {
  Rng rng(10);
  const Matrix m = rng.normal_matrix(7, 3);
  const auto dir = test::scratch_dir("matrix_io");
  write_matrix(dir / "m.bin", m);
  CHECK(read_matrix(dir / "m.bin") == m);
  CHECK(test::slurp(dir / "m.bin").rfind("CGM-MATRIX 7 3\n", 0) == 0);
  {
    std::ofstream bad(dir / "bad.bin", std::ios::binary);
    bad << "CGM-MATRIX 2 2\n1234";
  }
  CHECK_THROWS_AS(read_matrix(dir / "bad.bin"), ParseError);
  CHECK_THROWS_AS(read_matrix(dir / "missing.bin"), IoError);
  write_error_table(dir / "e.tsv", {{"rbf", 0.25, 1e-3}});
  CHECK(test::slurp(dir / "e.tsv") == "method\ttrain_error\ttest_error\nrbf\t0.25\t0.001\n");
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 12345.678}) CHECK(std::stod(format_double(v)) == v);
}
