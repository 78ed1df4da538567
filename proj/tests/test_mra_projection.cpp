#include <gtest/gtest.h>

#include "support.hpp"

using namespace subexp;
using subexp::testing::reference_system;

namespace {

const ProjectionKernel& level0() {
  static const ProjectionKernel pk = make_projection_kernel(reference_system(), 0);
  return pk;
}

double sup_diff(const SampledFunction& a, std::span<const cplx> b) {
  double d = 0.0;
  for (std::size_t i = 0; i < b.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

std::vector<double> seminorm_probes() {
  std::vector<double> p;
  for (double x = -10.0; x <= 10.0; x += 0.125) p.push_back(x);
  return p;
}

const SeminormParams convergence_params{1.0, 2.0, 1.0, 0.5, 8};

}  // namespace

TEST(ProjectionKernel, DefaultTruncationMeetsTailTarget) {
  const auto& pk = level0();
  EXPECT_LT(pk.tail_bound, kernel_tail_target);
  EXPECT_EQ(pk.truncation_radius % 8, 0);
  EXPECT_GT(pk.phi_envelope.rate_c, 0.0);
  EXPECT_THROW(make_projection_kernel(reference_system(), 0, 3), PreconditionError);
  EXPECT_THROW(make_projection_kernel(reference_system(), 0, 1, 0L), PreconditionError);
}

TEST(ProjectionKernel, ExactlySymmetric) {
  for (auto [x, y] : {std::pair{0.3, 1.7}, {-4.25, 2.0}, {10.1, -3.9}})
    EXPECT_EQ(kernel_eval(level0(), x, y), kernel_eval(level0(), y, x));
}

TEST(ProjectionKernel, IntegerShiftInvariance) {
  for (auto [x, y] : {std::pair{0.3, 1.7}, {-4.25, 2.0}, {0.0, 8.0}})
    EXPECT_NEAR(kernel_eval(level0(), x + 1.0, y + 1.0), kernel_eval(level0(), x, y), 1e-12);
}

TEST(ProjectionKernel, MatchesPointwiseLatticeSumWithWiderRadius) {
  const auto& ws = reference_system();
  const long K = static_cast<long>(ws.options.atom_cutoff) - 16;
  std::vector<double> terms;
  for (long k = -K; k <= K; ++k)
    terms.push_back(evaluate_phi(ws, -static_cast<double>(k)).real() * evaluate_phi(ws, 8.0 - k).real());
  EXPECT_NEAR(kernel_eval(level0(), 0.0, 8.0), pairwise_sum<double>(terms), 1e-10);
}

TEST(ProjectionKernel, LevelScaling) {
  const auto pk1 = make_projection_kernel(reference_system(), 1);
  for (auto [x, y] : {std::pair{0.3, 1.7}, {-2.0, 0.125}})
    EXPECT_NEAR(kernel_eval(pk1, x, y), 2.0 * kernel_eval(level0(), 2 * x, 2 * y), 1e-12);
}

TEST(ProjectionKernel, TensorProductInTwoDimensions) {
  const auto pk2 = make_projection_kernel(reference_system(), 0, 2);
  const double x[2] = {0.3, -1.1}, y[2] = {1.7, 0.4};
  EXPECT_NEAR(kernel_eval(pk2, x, y), kernel_eval(level0(), 0.3, 1.7) * kernel_eval(level0(), -1.1, 0.4), 1e-15);
  EXPECT_THROW(kernel_eval(pk2, std::span<const double>(x, 1), std::span<const double>(y, 1)), PreconditionError);
}

TEST(ProjectionKernel, WindowError) {
  try {
    kernel_eval(level0(), -100.0, 100.0);
    FAIL();
  } catch (const PreconditionError& e) {
    EXPECT_NE(std::string(e.what()).find("kernel window"), std::string::npos);
  }
}

TEST(Project, ScalingTranslateIsFixed) {
  const auto& ws = reference_system();
  const auto grid = Grid1D::span(-200.0, 200.0, 1.0 / 16.0);
  const auto f = dyadic_atom(ws, Atom::scaling, 0, 3).sample(grid);
  const auto r = project(level0(), f);
  EXPECT_LT(sup_diff(f, r.projected.values()), 1e-7);
  EXPECT_LT(r.kernel_form_gap, 1e-10);
}

TEST(Project, WaveletIsAnnihilated) {
  const auto& ws = reference_system();
  const auto grid = Grid1D::span(-200.0, 200.0, 1.0 / 16.0);
  const auto r = project(level0(), dyadic_atom(ws, Atom::wavelet, 0, 0).sample(grid));
  EXPECT_LT(r.projected.sup_norm(), 1e-7);
  EXPECT_LT(r.kernel_form_gap, 1e-10);
}

TEST(Project, NestedSpacesAndIdempotence) {
  const auto& ws = reference_system();
  const auto grid = Grid1D::span(-200.0, 200.0, 1.0 / 16.0);
  const auto f = dyadic_atom(ws, Atom::scaling, 0, -2).sample(grid);
  const auto pk1 = make_projection_kernel(ws, 1);
  EXPECT_LT(sup_diff(f, project(pk1, f).projected.values()), 1e-6);

  const auto g = gaussian().sample(grid);
  const auto once = project(level0(), g).projected;
  const auto twice = project(level0(), once).projected;
  EXPECT_LT(sup_diff(once, twice.values()), 1e-6);
}

TEST(Project, GaussianErrorAtOriginDecreases) {
  const auto grid = Grid1D::span(-8.0, 8.0, 1.0 / 32.0);
  const auto f = gaussian().sample(grid);
  const std::size_t i0 = grid.count / 2;
  double prev = INFINITY;
  for (int m = 0; m <= 3; ++m) {
    const double e = std::abs(project(make_projection_kernel(reference_system(), m), f).projected[i0] - f[i0]);
    if (prev > 1e-12) EXPECT_LT(e, prev) << "m = " << m;
    prev = e;
  }
}

TEST(Project, BoundaryMassWarns) {
  const auto grid = Grid1D::span(-20.0, 20.0, 1.0 / 8.0);
  const auto f = SampledFunction::from_function(grid, [](double x) { return cplx(std::exp(-0.01 * x * x)); });
  const auto r = project(level0(), f, 0);
  EXPECT_TRUE(r.boundary_warning);
  EXPECT_NEAR(r.boundary_mass, std::exp(-0.01 * 19.75 * 19.75), 1e-12);
}

TEST(Project, WindowTooSmall) {
  const auto f = gaussian().sample(Grid1D(0.0, 0.125, 5));
  EXPECT_THROW(project(level0(), f), PreconditionError);
}

TEST(KernelDecay, FitAndDiagonal) {
  const auto rep = kernel_decay_certificate(level0());
  ASSERT_FALSE(rep.samples.empty());
  EXPECT_EQ(rep.samples.front().x, 0.0);
  EXPECT_DOUBLE_EQ(rep.samples.front().value, rep.diagonal_sup);
  EXPECT_GT(rep.diagonal_sup, 0.0);
  EXPECT_GT(rep.fit.rate_c, 0.0);
  EXPECT_GT(rep.fit.r_squared, 0.95);
  EXPECT_LT(rep.exponential_fit.r_squared, rep.fit.r_squared);
}

TEST(PolynomialReproduction, LowDegreesExact) {
  const auto rep = polynomial_reproduction(level0(), 4);
  ASSERT_EQ(rep.max_deviation.size(), 5u);
  EXPECT_EQ(rep.probes, 32u);
  EXPECT_LT(rep.max_deviation[0], 1e-8);
  EXPECT_LT(rep.max_deviation[1], 1e-8);
  for (double d : rep.max_deviation) EXPECT_LT(d, 1e-6);
  EXPECT_THROW(polynomial_reproduction(level0(), 7), PreconditionError);
}

TEST(Convergence, ZeroFunction) {
  const auto z = zero_function();
  const ConvergenceInput in{z.sample(Grid1D::span(-8.0, 8.0, 1.0 / 16.0)), z.spectrum, 10.0};
  const auto probes = seminorm_probes();
  const auto t = mra_convergence_experiment(reference_system(), in, 3, convergence_params, probes, false);
  for (const auto& r : t.rows) {
    EXPECT_EQ(r.sup_error, 0.0);
    EXPECT_EQ(r.seminorm, 0.0);
  }
}

TEST(Convergence, GaussianWitness) {
  const auto G = gaussian();
  const ConvergenceInput in{G.sample(Grid1D::span(-8.0, 8.0, 1.0 / 64.0)), G.spectrum, 60.0};
  const auto probes = seminorm_probes();
  const auto t = mra_convergence_experiment(reference_system(), in, 6, convergence_params, probes, false);
  ASSERT_EQ(t.rows.size(), 7u);
  EXPECT_TRUE(t.sup_error_monotone);
  EXPECT_LT(t.rows[5].sup_error, t.rows[1].sup_error);
  EXPECT_LT(t.rows[6].sup_error, 1e-6);
  EXPECT_NEAR(t.rows[0].sup_error, 6.66e-3, 1e-4);  // reference build
  for (const auto& r : t.rows) EXPECT_LE(r.seminorm, 3.0 * t.rows[0].seminorm);
}

TEST(Convergence, QuadratureRouteAgrees) {
  const auto G = gaussian();
  const ConvergenceInput in{G.sample(Grid1D::span(-8.0, 8.0, 1.0 / 32.0)), G.spectrum, 60.0};
  const auto probes = seminorm_probes();
  const auto t = mra_convergence_experiment(reference_system(), in, 2, convergence_params, probes, true);
  for (const auto& r : t.rows) EXPECT_NEAR(r.quadrature_error, r.sup_error, 1e-10) << "m = " << r.m;
}

TEST(Convergence, RejectsEdgeMass) {
  const ConvergenceInput in{SampledFunction(Grid1D::span(-2.0, 2.0, 0.25), std::vector<cplx>(17, 1.0)), {}, 10.0};
  const auto probes = seminorm_probes();
  EXPECT_THROW(mra_convergence_experiment(reference_system(), in, 1, convergence_params, probes), PreconditionError);
}

TEST(DualPanel, PointMassPairingsConverge) {
  PointMasses mu{{0.0, 1.5}, {1.0, -0.5}, 1};
  std::vector<PanelFunction> panel;
  for (int k : {0, 2}) {
    const auto g = gaussian_derivative(k);
    panel.push_back({g.name, g.spectrum, 60.0});
  }
  const auto rows = dual_convergence_panel(reference_system(), mu, panel, 6);
  ASSERT_EQ(rows.size(), 7u);
  for (std::size_t j = 0; j < panel.size(); ++j) {
    EXPECT_GT(rows[0].errors[j], 1e-6);
    EXPECT_LT(rows[6].errors[j], 1e-12);
  }
}

TEST(Primitive, GaussianThirdDerivative) {
  const auto grid = Grid1D::span(-10.0, 10.0, 1.0 / 64.0);
  const auto pd = primitive_decomposition_1d(gaussian_derivative(3).sample(grid), 2);
  double err = 0.0;
  for (std::size_t i = 0; i < grid.count; ++i) {
    const double y = grid.point(i);
    err = std::max(err, std::abs(pd.g_r[i] - cplx(-2.0 * y * std::exp(-y * y))));
  }
  EXPECT_LT(err, 1e-8);
  EXPECT_LT(std::abs(pd.integral), 1e-9);
  EXPECT_LT(pd.derivative_mismatch, 1e-5);
  EXPECT_GT(pd.c, 0.0);
}

TEST(Primitive, HigherGaussianDerivatives) {
  const auto grid = Grid1D::span(-10.0, 10.0, 1.0 / 64.0);
  for (int k = 3; k <= 6; ++k) {
    const int r = k - 1;
    const auto pd = primitive_decomposition_1d(gaussian_derivative(k).sample(grid), r);
    const auto expect = gaussian_derivative(k - r).sample(grid);
    EXPECT_LT(sup_diff(pd.g_r, expect.values()), 1e-7) << "k = " << k;
  }
}

TEST(Primitive, ZeroInput) {
  const auto pd = primitive_decomposition_1d(SampledFunction::zeros({Grid1D::span(-5.0, 5.0, 1.0 / 16.0)}), 2);
  EXPECT_EQ(pd.g_r.sup_norm(), 0.0);
}

TEST(Primitive, Preconditions) {
  const auto grid = Grid1D::span(-10.0, 10.0, 1.0 / 64.0);
  try {
    primitive_decomposition_1d(gaussian().sample(grid), 1);
    FAIL();
  } catch (const PreconditionError& e) {
    EXPECT_NE(std::string(e.what()).find("moment precondition"), std::string::npos);
  }
  const auto wide = SampledFunction::from_function(grid, [](double y) { return cplx(std::sin(y)); });
  EXPECT_THROW(primitive_decomposition_1d(wide, 1), PreconditionError);
  EXPECT_THROW(primitive_decomposition_1d(gaussian_derivative(3).sample(grid), 13), PreconditionError);
}
