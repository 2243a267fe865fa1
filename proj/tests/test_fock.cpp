#include "triwell/errors.hpp"
#include "triwell/fock.hpp"

#include <doctest.h>

#include <cmath>

using namespace triwell;

namespace {

// <target| b_to^dagger b_from |source> straight from the occupation rule
double occupation_rule(const FockState& target, const FockState& source, int from, int to) {
    int src[3] = {source.n1, source.n2, source.n3};
    const int tgt[3] = {target.n1, target.n2, target.n3};
    if (src[from - 1] == 0) return 0.0;
    const double amp = std::sqrt(static_cast<double>((src[to - 1] + 1) * src[from - 1]));
    src[from - 1] -= 1;
    src[to - 1] += 1;
    for (int i = 0; i < 3; ++i) {
        if (src[i] != tgt[i]) return 0.0;
    }
    return amp;
}

} // namespace

TEST_CASE("basis sizes and ordering") {
    CHECK(build_basis(2).size() == 6);
    CHECK(build_basis(4).size() == 15);
    CHECK(build_basis(12).size() == 91);

    const FockBasis one(1);
    REQUIRE(one.size() == 3);
    CHECK(one[0] == FockState{1, 0, 0});
    CHECK(one[1] == FockState{0, 1, 0});
    CHECK(one[2] == FockState{0, 0, 1});

    for (int n = 1; n <= 8; ++n) {
        const FockBasis b(n);
        CHECK(b.size() == static_cast<std::size_t>((n + 1) * (n + 2) / 2));
        CHECK(b[0] == FockState{n, 0, 0});
        CHECK(b[b.size() - 1] == FockState{0, 0, n});
        for (std::size_t k = 0; k < b.size(); ++k) {
            CHECK(b[k].total() == n);
            CHECK(b.index(b[k]) == k);
            if (k > 0) {
                const auto& prev = b[k - 1];
                const auto& cur = b[k];
                CHECK((prev.n1 > cur.n1 || (prev.n1 == cur.n1 && prev.n2 > cur.n2)));
            }
        }
        // every triple summing to n appears
        for (int a = 0; a <= n; ++a) {
            for (int c = 0; a + c <= n; ++c) CHECK(b.contains({a, c, n - a - c}));
        }
    }
}

TEST_CASE("basis rejects out-of-range particle numbers") {
    CHECK_THROWS_AS(build_basis(0), DomainError);
    CHECK_THROWS_AS(build_basis(13), DomainError);
    CHECK_THROWS_WITH_AS(build_basis(-1), doctest::Contains("12"), DomainError);
    CHECK_THROWS_AS(FockBasis(2).index({1, 1, 1}), DomainError);
}

TEST_CASE("hopping matrix elements") {
    const FockBasis b(2);
    const auto h12 = hop_matrix(b, 2, 1);  // b1^dagger b2
    const auto row = static_cast<Eigen::Index>(b.index({1, 1, 0}));
    const auto col = static_cast<Eigen::Index>(b.index({0, 2, 0}));
    CHECK(h12(row, col) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
    CHECK(h12.col(static_cast<Eigen::Index>(b.index({2, 0, 0}))).isZero());

    const auto h23 = hop_matrix(b, 3, 2);  // b2^dagger b3
    CHECK(h23(static_cast<Eigen::Index>(b.index({1, 0, 1})),
              static_cast<Eigen::Index>(b.index({1, 1, 0}))) == 0.0);
    CHECK(h23(static_cast<Eigen::Index>(b.index({1, 1, 0})),
              static_cast<Eigen::Index>(b.index({1, 0, 1}))) == 1.0);
}

TEST_CASE("hopping matches the occupation rule for every element, N=2") {
    const FockBasis b(2);
    for (int from = 1; from <= 3; ++from) {
        for (int to = 1; to <= 3; ++to) {
            if (from == to) continue;
            const auto m = hop_matrix(b, from, to);
            for (std::size_t r = 0; r < b.size(); ++r) {
                for (std::size_t c = 0; c < b.size(); ++c) {
                    CHECK(m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) ==
                          occupation_rule(b[r], b[c], from, to));
                }
            }
        }
    }
}

TEST_CASE("hopping transpose and commutator identities") {
    for (int n = 1; n <= 6; ++n) {
        const FockBasis b(n);
        for (int i = 1; i <= 3; ++i) {
            const Eigen::MatrixXd ni = number_diag(b, i).asDiagonal();
            for (int j = 1; j <= 3; ++j) {
                if (i == j) continue;
                const auto ij = hop_matrix(b, j, i);  // b_i^dagger b_j
                CHECK((ij - hop_matrix(b, i, j).transpose()).isZero(0.0));
                const Eigen::MatrixXd comm = ij * ni - ni * ij;
                CHECK((comm + ij).cwiseAbs().maxCoeff() < 1e-12);
            }
        }
    }
}

TEST_CASE("number operator diagonals") {
    const FockBasis b2(2);
    CHECK(number_diag(b2, 1)(static_cast<Eigen::Index>(b2.index({2, 0, 0}))) == 2.0);
    const FockBasis b3(3);
    CHECK(number_diag(b3, 2)(static_cast<Eigen::Index>(b3.index({1, 1, 1}))) == 1.0);
    for (int n = 1; n <= 6; ++n) {
        const FockBasis b(n);
        const Eigen::VectorXd total = number_diag(b, 1) + number_diag(b, 2) + number_diag(b, 3);
        CHECK((total.array() == static_cast<double>(n)).all());
    }
}

TEST_CASE("invalid site indices") {
    const FockBasis b(2);
    CHECK_THROWS_AS(hop_matrix(b, 0, 1), DomainError);
    CHECK_THROWS_AS(hop_matrix(b, 1, 4), DomainError);
    CHECK_THROWS_AS(hop_matrix(b, 2, 2), DomainError);
    CHECK_THROWS_AS(number_diag(b, 4), DomainError);
}
