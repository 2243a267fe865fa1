#include "triwell/errors.hpp"
#include "triwell/hamiltonian.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

using namespace triwell;

namespace {

ModelParams make(int n, double g, double u) {
    ModelParams p;
    p.n = n;
    p.g = g;
    p.u = u;
    return p;
}

Eigen::VectorXd eigenvalues(const Eigen::MatrixXd& h) {
    return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(h, Eigen::EigenvaluesOnly).eigenvalues();
}

} // namespace

TEST_CASE("linear ramp") {
    const auto r0 = ramp(0.0);
    CHECK(r0.w12 == 0.0);
    CHECK(r0.w23 == 1.0);
    const auto r1 = ramp(1.0);
    CHECK(r1.w12 == 1.0);
    CHECK(r1.w23 == 0.0);
    const auto rh = ramp(0.5);
    CHECK(rh.w12 == 0.5);
    CHECK(rh.w23 == 0.5);
    for (double s = 0.0; s <= 1.0; s += 0.0625) CHECK(ramp(s).w12 + ramp(s).w23 == 1.0);
    CHECK_THROWS_AS(ramp(-1e-12), DomainError);
    CHECK_THROWS_AS(ramp(1.0 + 1e-12), DomainError);
}

TEST_CASE("parameter validation") {
    auto p = make(2, 1.0, 0.0);
    p.eps = {0.0, 2.0, 1.0};
    CHECK_THROWS_AS(p.validate(), DomainError);
    p.eps = {0.0, 0.0, 0.0};
    CHECK_THROWS_AS(p.validate(), DomainError);
    p = make(2, -1.0, 0.0);
    CHECK_THROWS_AS(p.validate(), DomainError);
    CHECK_THROWS_AS(h_int(FockBasis(3), make(2, 1.0, 0.0), 0.5), DomainError);
}

TEST_CASE("initial state is an eigenstate at s=0 with energy u, N=2") {
    const FockBasis b(2);
    const double u = 3.7;
    const auto h = h_int(b, make(2, 5.0, u), 0.0);
    Eigen::VectorXd v = Eigen::VectorXd::Zero(6);
    v(0) = 1.0;
    CHECK(((h * v) - u * v).norm() < 1e-14);
}

TEST_CASE("zero couplings give the zero matrix") {
    CHECK(h_int(FockBasis(3), make(3, 0.0, 0.0), 0.3).isZero(0.0));
}

TEST_CASE("spectrum at s=0 against the closed-form single-particle levels") {
    // N=1, s=0: g (b2+b3 + h.c.) has levels -g, 0, g
    const auto e1 = eigenvalues(h_int(FockBasis(1), make(1, 1.0, 0.0), 0.0));
    CHECK(e1(0) == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(std::abs(e1(1)) < 1e-14);
    CHECK(e1(2) == doctest::Approx(1.0).epsilon(1e-14));

    // N=2, u=0: pairwise sums of {-1, 0, 1} for two bosons
    const auto e2 = eigenvalues(h_int(FockBasis(2), make(2, 1.0, 0.0), 0.0));
    const std::vector<double> expected{-2.0, -1.0, 0.0, 0.0, 1.0, 2.0};
    for (int k = 0; k < 6; ++k) CHECK(e2(k) == doctest::Approx(expected[static_cast<std::size_t>(k)]).scale(1.0));

    // N=1 at general s: 0 and +-g sqrt(s^2 + (1-s)^2)
    for (double s : {0.1, 0.5, 0.77}) {
        const auto e = eigenvalues(h_int(FockBasis(1), make(1, 2.0, 9.0), s));
        const double w = 2.0 * std::sqrt(s * s + (1 - s) * (1 - s));
        CHECK(e(0) == doctest::Approx(-w).epsilon(1e-13));
        CHECK(std::abs(e(1)) < 1e-13);
        CHECK(e(2) == doctest::Approx(w).epsilon(1e-13));
    }
}

TEST_CASE("symmetry and conservation properties on random samples") {
    std::mt19937 rng(12345);
    std::uniform_real_distribution<double> s_dist(0.0, 1.0), g_dist(0.0, 1e4), u_dist(-100.0, 100.0);
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 1 + trial % 6;
        const FockBasis b(n);
        const auto h = h_int(b, make(n, g_dist(rng), u_dist(rng)), s_dist(rng));
        CHECK((h - h.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * std::max(1.0, h.norm()));
    }
    for (int n = 1; n <= 5; ++n) {
        const FockBasis b(n);
        const Eigen::MatrixXd n1 = number_diag(b, 1).asDiagonal();
        const Eigen::MatrixXd n3 = number_diag(b, 3).asDiagonal();
        const auto h0 = h_int(b, make(n, 7.0, -3.0), 0.0);
        const auto h1 = h_int(b, make(n, 7.0, -3.0), 1.0);
        CHECK((h0 * n1 - n1 * h0).isZero(1e-12));
        CHECK((h1 * n3 - n3 * h1).isZero(1e-12));
        // fixed-N block: the total number operator is n times the identity
        const Eigen::VectorXd total = number_diag(b, 1) + number_diag(b, 2) + number_diag(b, 3);
        CHECK((total.array() == n).all());
    }
}

TEST_CASE("self Hamiltonian") {
    auto p = make(3, 1.0, 0.0);
    const FockBasis b(3);
    const auto d = h_self(b, p);
    CHECK(d(static_cast<Eigen::Index>(b.index({0, 0, 3}))) == 6.0);
    CHECK(d.maxCoeff() == 6.0);
    CHECK(d(static_cast<Eigen::Index>(b.index({3, 0, 0}))) == 0.0);
    CHECK(d(static_cast<Eigen::Index>(b.index({1, 1, 1}))) == 3.0);
    p.eps = {0.5, 1.5, 4.0};
    CHECK(h_self(b, p)(static_cast<Eigen::Index>(b.index({0, 0, 3}))) == p.max_charge());
}

TEST_CASE("charge expectation") {
    const FockBasis b(2);
    const auto p = make(2, 1.0, 0.0);
    StateVector top = StateVector::Zero(6);
    top(5) = 1.0;
    CHECK(charge(top, b, p) == 4.0);
    StateVector bottom = StateVector::Zero(6);
    bottom(0) = 1.0;
    CHECK(charge(bottom, b, p) == 0.0);
    StateVector mix = StateVector::Zero(6);
    mix(0) = std::sqrt(0.5);
    mix(5) = std::complex<double>(0.0, std::sqrt(0.5));
    CHECK(charge(mix, b, p) == doctest::Approx(2.0).epsilon(1e-14));

    StateVector bad = StateVector::Zero(6);
    bad(0) = 1.1;
    CHECK_THROWS_WITH_AS(charge(bad, b, p), doctest::Contains("1.1"), DomainError);
}
