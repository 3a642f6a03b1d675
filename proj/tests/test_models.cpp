#include <cmath>
#include <random>

#include "doctest.h"
#include "noflow/lescheme.hpp"
#include "noflow/models.hpp"

using namespace noflow;

namespace {

using G = Grid<double>;
using F = CellField<double>;

// Midpoint-rule integral of a pointwise solution over [a, b].
template <typename Fn>
double integrate(Fn&& fn, double a, double b, int n = 200000) {
  double s = 0;
  const double h = (b - a) / n;
  for (int i = 0; i < n; ++i) s += fn(a + (i + 0.5) * h);
  return s * h;
}

}  // namespace

TEST_CASE("u f = H for every model") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> d(-3.0, 3.0), pos(0.0, 1.0), x(-4.5, 4.5);
  Burgers<double> b;
  LinearAdvection<double> adv(0.3);
  KeyfitzKranzerRadius<double> kk;
  const G g(-5.0, 5.0, 400, Boundary::ConstantExtension);
  LwrNonlocal<double> lwr(0.25, 0.0, 1.0, g);
  ArrayX<double> rho(400);
  for (Index j = 0; j < 400; ++j) rho[j] = pos(rng);
  lwr.pre_step(F(g, rho), 0.0);
  for (int i = 0; i < 10000; ++i) {
    const double u = d(rng), r = pos(rng), xx = x(rng);
    for (const FluxModel<double>* m : {static_cast<FluxModel<double>*>(&b), static_cast<FluxModel<double>*>(&adv),
                                       static_cast<FluxModel<double>*>(&kk)}) {
      const double hh = m->flux(u, xx, 0.0);
      REQUIRE(std::abs(u * m->slope(u, xx, 0.0) - hh) <= 1e-12 * (1 + std::abs(hh)));
    }
    const double hh = lwr.flux(r, xx, 0.0);
    REQUIRE(std::abs(r * lwr.slope(r, xx, 0.0) - hh) <= 1e-12 * (1 + std::abs(hh)));
  }
  CHECK(b.slope(0.0, 0.0, 0.0) == 0.0);
  CHECK(kk.slope(0.0, 0.0, 0.0) == 5.5);
}

TEST_CASE("Burgers P1 exact solution") {
  Burgers<double> p1(BurgersProblem::P1);
  CHECK(*p1.exact(0.3, 0.15) == 2.0);
  CHECK(*p1.exact(0.7, 0.3) == 0.0);
  CHECK(*p1.exact(0.55, 0.15) == 1.0);
  CHECK(*p1.exact(0.6, 0.15) == 0.0);
  CHECK(*p1.exact(0.6, 0.3) == 2.0);
  SUBCASE("mass balance on [0, 1]: inflow H(2) = 2, outflow 0") {
    for (double t : {0.05, 0.15, 0.24, 0.25, 0.4}) {
      const double m = integrate([&](double x) { return *p1.exact(x, t); }, 0.0, 1.0);
      CHECK(m == doctest::Approx(0.75 + 2 * t).epsilon(1e-4));
    }
  }
  SUBCASE("Rankine-Hugoniot speeds") {
    auto rh = [](double ul, double ur) { return (0.5 * ul * ul - 0.5 * ur * ur) / (ul - ur); };
    const double dt = 1e-3;
    const auto a = p1.breakpoints(0.1), b = p1.breakpoints(0.1 + dt);
    CHECK((b[0] - a[0]) / dt == doctest::Approx(rh(2, 1)));
    CHECK((b[1] - a[1]) / dt == doctest::Approx(rh(1, 0)));
    const auto c = p1.breakpoints(0.3), e = p1.breakpoints(0.3 + dt);
    CHECK((e[0] - c[0]) / dt == doctest::Approx(rh(2, 0)));
    // The two shocks meet at t = 1/4.
    const auto m = p1.breakpoints(0.25 - 1e-12);
    CHECK(m[0] == doctest::Approx(m[1]));
    CHECK(p1.breakpoints(0.25)[0] == doctest::Approx(m[0]));
  }
}

TEST_CASE("Burgers P2 exact solution") {
  Burgers<double> p2(BurgersProblem::P2);
  CHECK(*p2.exact(0.0, 0.5) == 0.0);
  CHECK(*p2.exact(-0.7, 0.5) == -1.0);
  CHECK(*p2.exact(0.7, 0.5) == 1.0);
  CHECK(*p2.exact(0.25, 0.5) == 0.5);
  // u = x / t solves u_t + u u_x = 0: -x/t^2 + (x/t)(1/t) = 0.
  const double x = 0.1, t = 0.4, e = 1e-6;
  const double ut = (*p2.exact(x, t + e) - *p2.exact(x, t - e)) / (2 * e);
  const double ux = (*p2.exact(x + e, t) - *p2.exact(x - e, t)) / (2 * e);
  CHECK(std::abs(ut + *p2.exact(x, t) * ux) < 1e-8);
  CHECK(p2.breakpoints(0.0).size() == 1);
  CHECK(!Burgers<double>().exact(0.0, 0.1));
}

TEST_CASE("nonlocal kernel") {
  for (double h : {0.01, 0.003, 10.0 / 4096}) {
    for (auto [x1, x2] : {std::pair{0.25, 0.0}, std::pair{0.0, 0.25}, std::pair{0.1, 0.3}}) {
      const NonlocalKernel<double> k = NonlocalKernel<double>::build(x1, x2, h);
      CHECK(k.mass(h) == doctest::Approx(1.0).epsilon(1e-12));
      CHECK((k.weights >= 0).all());
      CHECK(k.eta(-x1 - 1e-9) == 0.0);
      CHECK(k.eta(x2 + 1e-9) == 0.0);
    }
  }
  SUBCASE("discrete normaliser converges to the continuous one") {
    const double exact = NonlocalKernel<double>::continuous_alpha(0.25, 0.0);
    // Direct numerical integral of the unnormalised shape.
    const double direct = 1.0 / integrate([](double y) { return NonlocalKernel<double>::shape(y, 0.25, 0.0); },
                                          -0.25, 0.0);
    CHECK(exact == doctest::Approx(direct).epsilon(1e-6));
    const double e1 = std::abs(NonlocalKernel<double>::build(0.25, 0.0, 0.25 / 16).alpha - exact);
    const double e2 = std::abs(NonlocalKernel<double>::build(0.25, 0.0, 0.25 / 128).alpha - exact);
    CHECK(e2 < e1);
    CHECK(e2 / exact < 1e-3);
  }
}

TEST_CASE("nonlocal LWR model") {
  const G g(-5.0, 5.0, 400, Boundary::ConstantExtension);
  LwrNonlocal<double> lwr(0.25, 0.0, 1.0, g);
  SUBCASE("empty road") {
    lwr.pre_step(F(g, ArrayX<double>::Zero(400)), 0.0);
    for (Index e = 0; e <= 400; e += 37) CHECK(lwr.slope(0.0, g.edge(e), 0.0) == 1.0);
  }
  SUBCASE("full jam") {
    lwr.pre_step(F(g, ArrayX<double>::Ones(400)), 0.0);
    for (Index e = 0; e <= 400; e += 37) {
      CHECK(lwr.slope(1.0, g.edge(e), 0.0) == 0.0);
      CHECK(lwr.convolution(g.edge(e)) == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
  SUBCASE("speed stays in range") {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> d(0.0, 1.0);
    ArrayX<double> rho(400);
    for (Index j = 0; j < 400; ++j) rho[j] = d(rng);
    lwr.pre_step(F(g, rho), 0.0);
    for (int i = 0; i < 2000; ++i) {
      const double x = g.x_left + 10.0 * d(rng);
      const double c = lwr.convolution(x);
      REQUIRE(c >= -1e-14);
      REQUIRE(c <= 1 + 1e-12);
      const double v = lwr.slope(d(rng), x, 0.0);
      REQUIRE(v >= 0.0);
      REQUIRE(v <= 1.0);
    }
  }
  SUBCASE("backward horizon only sees traffic behind") {
    ArrayX<double> rho = ArrayX<double>::Zero(400);
    for (Index j = 0; j < 400; ++j) rho[j] = g.center(j) < 0.0 ? 1.0 : 0.0;
    lwr.pre_step(F(g, rho), 0.0);
    CHECK(lwr.convolution(g.edge(200)) == doctest::Approx(1.0));  // x = 0
    CHECK(lwr.convolution(g.edge(230)) == 0.0);                   // x = 0.75
    LwrNonlocal<double> fwd(0.0, 0.25, 1.0, g);
    fwd.pre_step(F(g, rho), 0.0);
    CHECK(fwd.convolution(g.edge(200)) == 0.0);
    CHECK(fwd.convolution(g.edge(170)) == doctest::Approx(1.0));
  }
  SUBCASE("edge cache agrees with direct evaluation") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> d(0.0, 1.0);
    ArrayX<double> rho(400);
    for (Index j = 0; j < 400; ++j) rho[j] = d(rng);
    lwr.pre_step(F(g, rho), 0.0);
    for (Index e = 0; e <= 400; e += 13) {
      const double cached = lwr.convolution(g.edge(e));
      const double nearby = lwr.convolution(g.edge(e) + 1e-7);
      CHECK(cached == doctest::Approx(nearby).epsilon(1e-12));
    }
  }
  SUBCASE("horizon validation") {
    CHECK_THROWS_AS(LwrNonlocal<double>(0.0, 0.0, 1.0, g), SolverError);
    const G coarse(-5.0, 5.0, 64, Boundary::ConstantExtension);
    try {
      LwrNonlocal<double>(0.25, 0.0, 1.0, coarse);
      FAIL("expected KernelUnresolved");
    } catch (const SolverError& e) {
      CHECK(e.code() == ErrorCode::KernelUnresolved);
    }
    CHECK_NOTHROW(LwrNonlocal<double>(0.25, 0.0, 1.0, coarse, 1.0));
  }
}

namespace {

// Range of the LWR density over a run to t = 0.5 at 512 cells with automatic k.
std::pair<double, double> lwr_range(double x1, double x2) {
  const G g(-5.0, 5.0, 512, Boundary::ConstantExtension);
  LwrNonlocal<double> lwr(x1, x2, 1.0, g);
  F u(g, cell_averages<double>(g, lwr_initial_density<double>, lwr_initial_breakpoints<double>()));
  SchemeConfig<double> cfg;
  cfg.k_shift = KShift::automatic();
  cfg = resolve(cfg, lwr, 0.0, 1.0);
  double t = 0, lo = 0, hi = 0;
  while (t < 0.5) {
    lwr.pre_step(u, t);
    const EdgeData<double> ed = noflow_slopes(u, lwr, cfg.limiter, t);
    const double dt = std::min(select_dt<double>(ed.slopes, g.h(), cfg), 0.5 - t);
    u = nsle_step(u, lwr, cfg, dt, t).u;
    t += dt;
    lo = std::min(lo, u.min());
    hi = std::max(hi, u.max());
  }
  return {lo, hi};
}

}  // namespace

TEST_CASE("forward-horizon LWR density stays in [0, 1]") {
  const auto [lo, hi] = lwr_range(0.0, 0.25);
  CHECK(lo >= -1e-8);
  CHECK(hi <= 1 + 1e-8);
}

TEST_CASE("backward-horizon LWR density overshoots the jam") {
  // Cars behind the jam keep a positive edge speed while the jammed cell has
  // none, so mass piles into it above rho = 1.
  const auto [lo, hi] = lwr_range(0.25, 0.0);
  CHECK(lo >= -1e-8);
  CHECK(hi > 1.04);
  CHECK(hi < 1.06);
}

TEST_CASE("Keyfitz-Kranzer") {
  CHECK(kk_phi(2.0) == 1.5);
  CHECK(kk_phi(3.0) == doctest::Approx(2.5));
  const G g(-1.0, 1.0, 64, Boundary::Periodic);
  SUBCASE("constant state") {
    KKState<double> s{F(g, ArrayX<double>::Constant(64, 2.0)), F(g, ArrayX<double>::Constant(64, 1.2)),
                      F(g, ArrayX<double>::Constant(64, -1.6))};
    SchemeConfig<double> cfg;
    const KKStepOutcome<double> o = kk_step(s, cfg, 0.01);
    CHECK((o.edges.slopes == 1.5).all());
    CHECK((o.state.u1.values - 1.2).abs().maxCoeff() < 1e-14);
    CHECK((o.state.u2.values + 1.6).abs().maxCoeff() < 1e-14);
    CHECK(o.state.radius_drift() < 1e-13);
  }
  SUBCASE("a pulse on r = 2 translates at speed 3/2") {
    // With r = 2 everywhere the components advect at phi(2) and the step is upwind.
    ArrayX<double> bump = ArrayX<double>::Zero(64);
    bump[10] = 1.0;
    KKState<double> s{F(g, ArrayX<double>::Constant(64, 2.0)), F(g, bump), F(g, ArrayX<double>::Zero(64))};
    const double dt = 0.4 * g.h() / 1.5;
    const KKStepOutcome<double> o = kk_step(s, SchemeConfig<double>(), dt);
    CHECK(o.state.u1[10] == doctest::Approx(0.6));
    CHECK(o.state.u1[11] == doctest::Approx(0.4));
  }
  SUBCASE("component masses are conserved") {
    KKState<double> s = kk_initial(g);
    const double m[3] = {s.r.mass(), s.u1.mass(), s.u2.mass()};
    SchemeConfig<double> cfg;
    for (int step = 0; step < 200; ++step) {
      const EdgeData<double> ed = kk_edges(s, cfg.limiter);
      const double dt = select_dt<double>(ed.slopes, g.h(), cfg);
      s = kk_step(s, cfg, dt, &ed).state;
    }
    CHECK(s.r.mass() == doctest::Approx(m[0]).epsilon(1e-13));
    CHECK(std::abs(s.u1.mass() - m[1]) < 1e-13);
    CHECK(std::abs(s.u2.mass() - m[2]) < 1e-13);
  }
  SUBCASE("initial data") {
    const KKState<double> s = kk_initial(g);
    const double pi = std::acos(-1.0);
    const double x = g.center(20);
    CHECK(s.r[20] == doctest::Approx(std::sin(pi * x) + 1.5).epsilon(1e-3));
    CHECK(s.u1[20] == doctest::Approx((std::sin(pi * x) + 1.5) * std::sin(pi * x)).epsilon(1e-2));
    CHECK(s.r.mass() == doctest::Approx(3.0).epsilon(1e-14));
  }
  SUBCASE("negative radius is rejected") {
    KKState<double> s = kk_initial(g);
    s.r[5] = -4.0;
    CHECK_THROWS_AS(kk_edges(s, LimiterKind::mm2()), SolverError);
  }
  SUBCASE("radius drift decreases under refinement") {
    auto drift = [](Index n) {
      const G gg(-1.0, 1.0, n, Boundary::Periodic);
      KKState<double> s = kk_initial(gg);
      SchemeConfig<double> cfg;
      double t = 0;
      while (t < 0.5) {
        const EdgeData<double> ed = kk_edges(s, cfg.limiter);
        const double dt = std::min(select_dt<double>(ed.slopes, gg.h(), cfg), 0.5 - t);
        s = kk_step(s, cfg, dt, &ed).state;
        t += dt;
      }
      return s.radius_drift();
    };
    CHECK(drift(256) < drift(128));
  }
}
