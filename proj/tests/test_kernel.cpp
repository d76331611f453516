#include <cmath>
#include <random>

#include "doctest.h"
#include "nldisp/errors.hpp"
#include "nldisp/kernel.hpp"
#include "oracles.hpp"

using namespace nldisp;

TEST_CASE("uniform kernel sampling: interior support and edge closure") {
    KernelSpec ks{KernelShape::uniform, 1.0};
    SampledKernel k = sample_kernel(ks, 0.25);
    CHECK(k.radius == 4);
    int interior_nonzero = 0;
    for (int m = -3; m <= 3; ++m)
        if (k.weight(m) > 0) ++interior_nonzero;
    CHECK(interior_nonzero == 7);  // nodes strictly inside the support
    // support-aligned lattice carries reduced closure weights at +-r0
    CHECK(k.weight(4) > 0.0);
    CHECK(k.weight(4) < k.weight(3));
    CHECK(k.weight_sum == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("triangle kernel is symmetric; zero mass at the edge") {
    KernelSpec ks{KernelShape::triangle, 1.0};
    SampledKernel k = sample_kernel(ks, 0.5);
    for (int m = 0; m <= k.radius; ++m) CHECK(k.weight(m) == k.weight(-m));
    CHECK(k.weight(k.radius) == 0.0);
    CHECK(std::fabs(k.weight_sum - 1.0) < 1e-12);
}

TEST_CASE("too-coarse grid is rejected") {
    KernelSpec ks{KernelShape::uniform, 1.0};
    CHECK_THROWS_AS(sample_kernel(ks, 2.0), GridTooCoarse);
    CHECK_THROWS_AS(sample_kernel(ks, 1.0), GridTooCoarse);
}

TEST_CASE("twist: identity at mu = 0 and quadrature moment match") {
    KernelSpec ks{KernelShape::uniform, 1.0};
    SampledKernel base = sample_kernel(ks, 1.0 / 64);
    SampledKernel t0 = twist(base, +1, 0.0);
    for (int m = -base.radius; m <= base.radius; ++m) CHECK(t0.weight(m) == base.weight(m));
    CHECK(t0.weight_sum == doctest::Approx(1.0).epsilon(1e-13));

    SampledKernel t1 = twist(base, +1, 1.0);
    double expected = oracle::kernel_moment(ks, 1.0);  // sinh(1)/1
    CHECK(expected == doctest::Approx(std::sinh(1.0)).epsilon(1e-10));
    CHECK(std::fabs(t1.weight_sum - expected) < 0.01);

    // the discrete moments stay quadrature-accurate out to mu = 4
    for (double mu : {0.5, 2.0, 4.0}) {
        SampledKernel t = twist(base, +1, mu);
        CHECK(std::fabs(t.weight_sum - oracle::kernel_moment(ks, mu)) < 5e-4);
    }
}

TEST_CASE("twist symmetry is exact for even kernels") {
    for (KernelShape shape : {KernelShape::uniform, KernelShape::triangle,
                              KernelShape::cosine_bump}) {
        KernelSpec ks{shape, 1.0};
        SampledKernel base = sample_kernel(ks, 1.0 / 32);
        double mu = 1.7;
        double s_plus = twist(base, +1, mu).weight_sum;
        double s_minus = twist(base, -1, mu).weight_sum;
        double s_neg = twist(base, +1, -mu).weight_sum;
        CHECK(s_plus == s_minus);
        CHECK(s_plus == s_neg);
    }
}

TEST_CASE("twist overflow is reported") {
    KernelSpec ks{KernelShape::uniform, 1.0};
    SampledKernel base = sample_kernel(ks, 0.25);
    CHECK_THROWS_AS(twist(base, +1, 1000.0), NonFiniteWeight);
}

TEST_CASE("wrap_to_cell folds weights and reproduces the line convolution") {
    CellGrid g = make_cell_grid(32, 1.0);

    SUBCASE("support smaller than the period: relabeling only") {
        KernelSpec ks{KernelShape::triangle, 0.25};
        SampledKernel k = sample_kernel(ks, g.dx());
        SampledKernel w = wrap_to_cell(k, g);
        for (int m = -k.radius; m <= k.radius; ++m) {
            int j = ((m % g.nx) + g.nx) % g.nx;
            CHECK(w.w[static_cast<std::size_t>(j)] == k.weight(m));
        }
    }

    SUBCASE("constant field is reproduced exactly") {
        KernelSpec ks{KernelShape::uniform, 1.0};
        SampledKernel w = wrap_to_cell(sample_kernel(ks, g.dx()), g);
        Field f(32, 3.25), out(32);
        convolve_cell(w, f, out);
        for (double v : out) CHECK(v == doctest::Approx(3.25).epsilon(1e-14));
    }

    SUBCASE("support beyond the period: fold matches brute-force line convolution") {
        KernelSpec ks{KernelShape::uniform, 1.5};
        SampledKernel k = sample_kernel(ks, g.dx());
        SampledKernel w = wrap_to_cell(k, g);
        std::mt19937 rng(11);
        std::uniform_real_distribution<double> dist(0.0, 1.0);
        Field f(32);
        for (double& v : f) v = dist(rng);
        Field out(32);
        convolve_cell(w, f, out);
        for (int i = 0; i < g.nx; ++i) {
            double direct = 0.0;  // periodic extension, summed over the raw offsets
            for (int m = -k.radius; m <= k.radius; ++m) {
                int q = (((i + m) % g.nx) + g.nx) % g.nx;
                direct += k.weight(m) * f[static_cast<std::size_t>(q)];
            }
            CHECK(std::fabs(out[static_cast<std::size_t>(i)] - direct) < 1e-12);
        }
    }
}

TEST_CASE("convolve_cell matches a dense matrix oracle") {
    CellGrid g = make_cell_grid(24, 1.0);
    KernelSpec ks{KernelShape::cosine_bump, 0.4};
    SampledKernel k = sample_kernel(ks, g.dx());
    SampledKernel w = wrap_to_cell(k, g);

    // dense matrix A[i][q] = sum of weights sending node q into node i
    std::vector<std::vector<double>> A(24, std::vector<double>(24, 0.0));
    for (int i = 0; i < 24; ++i)
        for (int m = -k.radius; m <= k.radius; ++m) {
            int q = (((i + m) % 24) + 24) % 24;
            A[static_cast<std::size_t>(i)][static_cast<std::size_t>(q)] += k.weight(m);
        }

    std::mt19937 rng(5);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (int trial = 0; trial < 5; ++trial) {
        Field f(24), out(24);
        for (double& v : f) v = dist(rng);
        convolve_cell(w, f, out);
        for (int i = 0; i < 24; ++i) {
            double direct = 0.0;
            for (int q = 0; q < 24; ++q)
                direct += A[static_cast<std::size_t>(i)][static_cast<std::size_t>(q)] *
                          f[static_cast<std::size_t>(q)];
            CHECK(std::fabs(out[static_cast<std::size_t>(i)] - direct) < 1e-13);
        }
    }
}

TEST_CASE("convolve_line: pads, step profile, and mass leakage") {
    CellGrid cell = make_cell_grid(64, 1.0);
    LineGrid g = make_line_grid(cell, 4.0);
    KernelSpec ks{KernelShape::uniform, 1.0};
    SampledKernel k = sample_kernel(ks, cell.dx());
    const int n = g.n();
    const std::size_t R = static_cast<std::size_t>(k.radius);

    SUBCASE("constant field with matching pads stays constant") {
        Field f(static_cast<std::size_t>(n), 1.0), out(static_cast<std::size_t>(n));
        Field pad(R, 1.0);
        convolve_line(k, f, pad, pad, out);
        for (double v : out) CHECK(v == doctest::Approx(1.0).epsilon(1e-14));
    }

    SUBCASE("step profile: value 1/2 +- dx at the jump") {
        Field f(static_cast<std::size_t>(n), 0.0), out(static_cast<std::size_t>(n));
        int mid = n / 2;  // x = 0
        for (int i = 0; i < mid; ++i) f[static_cast<std::size_t>(i)] = 1.0;
        Field lpad(R, 1.0), rpad(R, 0.0);
        convolve_line(k, f, lpad, rpad, out);
        // analytic convolution of a left step with the uniform kernel at the jump is 1/2
        CHECK(std::fabs(out[static_cast<std::size_t>(mid)] - 0.5) <= cell.dx() + 1e-12);
    }

    SUBCASE("zero pads leak mass at the boundary only") {
        Field f(static_cast<std::size_t>(n), 1.0), out(static_cast<std::size_t>(n));
        Field zero(R, 0.0);
        convolve_line(k, f, zero, zero, out);
        CHECK(out[static_cast<std::size_t>(n / 2)] == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(out[0] < 1.0);
        CHECK(out[static_cast<std::size_t>(n - 1)] < 1.0);
    }
}

TEST_CASE("convolution is linear, positive, and monotone") {
    CellGrid g = make_cell_grid(32, 2.0);
    KernelSpec ks{KernelShape::triangle, 0.8};
    SampledKernel w = wrap_to_cell(sample_kernel(ks, g.dx()), g);
    std::mt19937 rng(99);
    std::uniform_real_distribution<double> dist(0.0, 2.0);
    Field f(32), gfield(32), fa(32), fab(32), outa(32), outb(32), outc(32);
    for (int i = 0; i < 32; ++i) {
        f[static_cast<std::size_t>(i)] = dist(rng);
        gfield[static_cast<std::size_t>(i)] = f[static_cast<std::size_t>(i)] + dist(rng);
    }
    double alpha = 0.7, beta = -1.3;
    for (int i = 0; i < 32; ++i)
        fab[static_cast<std::size_t>(i)] = alpha * f[static_cast<std::size_t>(i)] +
                                           beta * gfield[static_cast<std::size_t>(i)];
    convolve_cell(w, f, outa);
    convolve_cell(w, gfield, outb);
    convolve_cell(w, fab, outc);
    for (int i = 0; i < 32; ++i) {
        CHECK(std::fabs(outc[static_cast<std::size_t>(i)] -
                        (alpha * outa[static_cast<std::size_t>(i)] +
                         beta * outb[static_cast<std::size_t>(i)])) < 1e-12);
        CHECK(outa[static_cast<std::size_t>(i)] >= 0.0);                          // positivity
        CHECK(outa[static_cast<std::size_t>(i)] <= outb[static_cast<std::size_t>(i)]);  // f <= g
    }
    (void)fa;
}
