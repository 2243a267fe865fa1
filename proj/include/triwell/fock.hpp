// fock.hpp: bosonic Fock basis for N particles on three wells

#pragma once

#include <Eigen/Dense>

#include <array>
#include <compare>
#include <cstddef>
#include <map>
#include <vector>

namespace triwell {

inline constexpr int kMaxParticles = 12;

// Occupations of wells 1, 2, 3.
struct FockState {
    int n1{0};
    int n2{0};
    int n3{0};

    int total() const noexcept { return n1 + n2 + n3; }
    // site is 1-based, matching the well labels
    int occupation(int site) const;

    auto operator<=>(const FockState&) const = default;
};

class FockBasis {
public:
    // Enumerates every occupation triple with n1 + n2 + n3 = N, descending in (n1, n2),
    // so (N,0,0) is row 0 and (0,0,N) is the last row.
    explicit FockBasis(int particle_number);

    int particle_number() const noexcept { return n_; }
    std::size_t size() const noexcept { return states_.size(); }
    const std::vector<FockState>& states() const noexcept { return states_; }
    const FockState& operator[](std::size_t k) const { return states_.at(k); }

    // Throws DomainError for states outside the basis.
    std::size_t index(const FockState& s) const;
    bool contains(const FockState& s) const { return index_.count(s) != 0; }

private:
    int n_;
    std::vector<FockState> states_;
    std::map<FockState, std::size_t> index_;
};

FockBasis build_basis(int particle_number);

// Matrix of b_to^dagger b_from; rows index the target state, columns the source.
Eigen::MatrixXd hop_matrix(const FockBasis& basis, int from_site, int to_site);

// Occupation of `site` in every basis state.
Eigen::VectorXd number_diag(const FockBasis& basis, int site);

} // namespace triwell
