#include "helpers.hpp"
#include "symid/errors.hpp"
#include "symid/optimizers.hpp"
#include "symid/quotient.hpp"

#include <doctest.h>

using namespace testing;

TEST_CASE("variant names round trip") {
    for (Variant v : {Variant::Cg1, Variant::Cg2, Variant::Cg3, Variant::Sd, Variant::Hybrid, Variant::Gn}) {
        CHECK(parse_variant(to_string(v)) == v);
    }
    CHECK(parse_variant("hybrid") == Variant::Hybrid);
    CHECK_THROWS_AS(parse_variant("CG4"), std::invalid_argument);
}

TEST_CASE("config validation") {
    OptConfig c;
    CHECK_NOTHROW(c.validate());
    c.armijo.c1 = 1.5;
    CHECK_THROWS(c.validate());
    c = OptConfig{};
    c.variant = Variant::Hybrid;
    c.hybrid_switch = 20;
    CHECK_THROWS(c.validate());
}

TEST_CASE("Riemannian gradient pairs with directional derivatives") {
    Rng rng(31);
    const SystemTriple truth = random_point(3, 1, 2, rng);
    const SystemTriple x = random_point(3, 1, 2, rng);
    const IODataset d = random_dataset(truth, 20, rng);
    double f = 0.0;
    const TangentTriple g = riemannian_gradient(x, d, &f);
    CHECK(rel_err(f, objective(x, d).f) < 1e-14);
    for (int t = 0; t < 5; ++t) {
        const TangentTriple xi = random_tangent(x, rng);
        const double h = 1e-5;
        const double fd = (objective(exp_map(x, h * xi), d).f - objective(exp_map(x, -h * xi), d).f) / (2 * h);
        CHECK(rel_err(metric(x, g, xi), fd) < 1e-6);
    }
}

TEST_CASE("Armijo step satisfies sufficient decrease") {
    Rng rng(32);
    const SystemTriple truth = random_point(3, 1, 1, rng);
    const SystemTriple x = random_point(3, 1, 1, rng);
    const IODataset d = random_dataset(truth, 30, rng);
    double f = 0.0;
    const TangentTriple g = riemannian_gradient(x, d, &f);
    const TangentTriple eta = -g;
    const double slope = metric(x, g, eta);
    ArmijoConfig cfg;
    const ArmijoResult r = armijo_step(x, eta, f, slope, d, cfg);
    REQUIRE_FALSE(r.exhausted);
    REQUIRE(r.next);
    CHECK(r.f_next <= f + cfg.c1 * r.t * slope);
    CHECK(r.t == doctest::Approx(std::pow(0.5, r.backtracks)));
}

TEST_CASE("Dai-Yuan parameter formula") {
    Rng rng(33);
    const SystemTriple x = random_point(3, 1, 1, rng);
    const SystemTriple y = exp_map(x, 0.1 * random_tangent(x, rng));
    const TangentTriple g = random_tangent(x, rng), eta = random_tangent(x, rng), gn = random_tangent(y, rng);
    const TangentTriple te = parallel_transport(x, y, eta);
    const double expect = metric(y, gn, gn) / (metric(y, gn, te) - metric(x, g, eta));
    CHECK(rel_err(dai_yuan_beta(y, gn, te, x, g, eta), expect) < 1e-13);
    // zero denominator
    const TangentTriple z = TangentTriple::zeros_like(x);
    CHECK(dai_yuan_beta(y, gn, TangentTriple::zeros_like(y), x, z, z) == 0.0);
}

TEST_CASE("every variant decreases the cost and stays on its manifold") {
    Rng rng(34);
    const SystemTriple truth = random_point(4, 1, 1, rng);
    const IODataset d = random_dataset(truth, 60, rng, 0.01);
    const SystemTriple x0 = random_point(4, 1, 1, rng);
    Matrix Ad = Matrix::Zero(4, 4);
    Ad.diagonal() = sym_eig(x0.A()).values;
    const SystemTriple xd(Ad, x0.B(), x0.C(), PointKind::DiagPos);
    for (Variant v : {Variant::Cg1, Variant::Cg2, Variant::Cg3, Variant::Sd, Variant::Hybrid}) {
        OptConfig c;
        c.variant = v;
        const OptTrace tr = run(v == Variant::Cg3 ? xd : x0, d, c);
        CAPTURE(to_string(v));
        CHECK(tr.all_iterates_valid);
        CHECK(tr.f_final() < tr.f_initial());
        for (std::size_t i = 1; i < tr.records.size(); ++i) {
            CHECK(tr.records[i].f <= tr.records[i - 1].f);
        }
        CHECK(is_valid_point(tr.final_point().A(), v == Variant::Cg3 ? PointKind::DiagPos : PointKind::Spd));
    }
}

TEST_CASE("CG3 requires a diagonal start, the others an SPD start") {
    Rng rng(35);
    const SystemTriple x = random_point(3, 1, 1, rng);
    const IODataset d = random_dataset(x, 20, rng);
    OptConfig c;
    c.variant = Variant::Cg3;
    CHECK_THROWS_AS(run(x, d, c), DomainError);
}

TEST_CASE("hybrid uses the projection only after the switch") {
    Rng rng(36);
    const SystemTriple truth = random_point(4, 1, 1, rng);
    const IODataset d = random_dataset(truth, 60, rng, 0.01);
    OptConfig c;
    c.variant = Variant::Hybrid;
    c.max_iters = 8;
    c.hybrid_switch = 5;
    c.grad_tol = 0.0;
    const OptTrace tr = run(random_point(4, 1, 1, rng), d, c);
    REQUIRE(tr.records.size() == 9);
    for (int k = 1; k <= 8; ++k) {
        CHECK(tr.records[k].projection_condition.has_value() == (k > 5));
    }
}

TEST_CASE("steepest descent on the quotient coincides with the plain problem") {
    Rng rng(37);
    const SystemTriple truth = random_point(3, 2, 1, rng);
    const IODataset d = random_dataset(truth, 40, rng);
    const SystemTriple x0 = random_point(3, 2, 1, rng);
    OptConfig a;
    a.variant = Variant::Sd;
    OptConfig b = a;
    b.quotient = true;
    const OptTrace ta = run(x0, d, a), tb = run(x0, d, b);
    REQUIRE(ta.records.size() == tb.records.size());
    for (std::size_t i = 0; i < ta.records.size(); ++i) {
        CHECK(ta.records[i].f == tb.records[i].f);
    }
    CHECK(ta.final.A == tb.final.A);
    // the gradient is horizontal, so it is its own lift
    const TangentTriple g = riemannian_gradient(x0, d);
    CHECK(horizontal_residual(x0, g) <= 1e-8 * std::max(1.0, norm(x0, g)));
}

TEST_CASE("CG1 drives the cost to zero on exact data from a nearby start") {
    Rng rng(38);
    const SystemTriple truth = random_point(2, 1, 1, rng);
    IODataset d;
    d.u = gaussian(1, 101, rng);
    d.y = simulate(truth, d.u).y;
    const SystemTriple x0(sym(truth.A() + 0.02 * sym(gaussian(2, 2, rng))), truth.B() + 0.05 * gaussian(2, 1, rng),
                          truth.C() + 0.05 * gaussian(1, 2, rng));
    OptConfig c;
    c.max_iters = 200;
    const OptTrace tr = run(x0, d, c);
    CHECK(tr.f_final() <= 1e-8 * tr.f_initial());
}

TEST_CASE("Gauss-Newton ignores the structure") {
    Rng rng(39);
    const SystemTriple truth = random_point(3, 1, 1, rng);
    const IODataset d = random_dataset(truth, 80, rng, 0.2);
    const SystemTriple x0 = random_point(3, 1, 1, rng);
    OptConfig c;
    c.variant = Variant::Gn;
    const OptTrace tr = run(x0, d, c);
    CHECK_FALSE(tr.final_kind.has_value());
    CHECK(tr.records.back().symmetry_defect.value() > 1e-6);
    CHECK(tr.records[1].step == 1.0);
    // similarity transforms leave f unchanged, so J^T J is always singular
    CHECK(tr.records[1].damped);
    CHECK_THROWS_AS(tr.final_point(), DomainError);

    c.gn_step_halving = true;
    const OptTrace th = run(x0, d, c);
    for (std::size_t i = 1; i < th.records.size(); ++i) {
        CHECK(th.records[i].f < th.records[i - 1].f);
    }
    CHECK(th.records.back().symmetry_defect.value() > 1e-6);
}
