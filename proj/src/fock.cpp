#include "triwell/fock.hpp"

#include "triwell/errors.hpp"

#include <cmath>
#include <string>

namespace triwell {

namespace {

void check_site(int site) {
    if (site < 1 || site > 3) {
        throw DomainError("site index " + std::to_string(site) + " outside {1,2,3}");
    }
}

int& occupation_ref(FockState& s, int site) {
    switch (site) {
    case 1: return s.n1;
    case 2: return s.n2;
    default: return s.n3;
    }
}

} // namespace

int FockState::occupation(int site) const {
    check_site(site);
    switch (site) {
    case 1: return n1;
    case 2: return n2;
    default: return n3;
    }
}

FockBasis::FockBasis(int particle_number) : n_(particle_number) {
    if (particle_number < 1 || particle_number > kMaxParticles) {
        throw DomainError("particle number " + std::to_string(particle_number) +
                          " outside [1, " + std::to_string(kMaxParticles) + "]");
    }
    states_.reserve(static_cast<std::size_t>((n_ + 1) * (n_ + 2) / 2));
    for (int n1 = n_; n1 >= 0; --n1) {
        for (int n2 = n_ - n1; n2 >= 0; --n2) {
            states_.push_back({n1, n2, n_ - n1 - n2});
        }
    }
    for (std::size_t k = 0; k < states_.size(); ++k) {
        index_.emplace(states_[k], k);
    }
}

std::size_t FockBasis::index(const FockState& s) const {
    auto it = index_.find(s);
    if (it == index_.end()) {
        throw DomainError("state (" + std::to_string(s.n1) + "," + std::to_string(s.n2) + "," +
                          std::to_string(s.n3) + ") not in the N=" + std::to_string(n_) + " basis");
    }
    return it->second;
}

FockBasis build_basis(int particle_number) { return FockBasis(particle_number); }

Eigen::MatrixXd hop_matrix(const FockBasis& basis, int from_site, int to_site) {
    check_site(from_site);
    check_site(to_site);
    if (from_site == to_site) {
        throw DomainError("hop_matrix needs distinct sites, got " + std::to_string(from_site) +
                          " twice");
    }
    const auto dim = static_cast<Eigen::Index>(basis.size());
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(dim, dim);
    for (std::size_t col = 0; col < basis.size(); ++col) {
        const FockState& src = basis[col];
        const int n_from = src.occupation(from_site);
        if (n_from == 0) continue;
        const int n_to = src.occupation(to_site);
        FockState dst = src;
        occupation_ref(dst, from_site) -= 1;
        occupation_ref(dst, to_site) += 1;
        const auto row = basis.index(dst);
        m(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col)) =
            std::sqrt(static_cast<double>((n_to + 1) * n_from));
    }
    return m;
}

Eigen::VectorXd number_diag(const FockBasis& basis, int site) {
    check_site(site);
    Eigen::VectorXd d(static_cast<Eigen::Index>(basis.size()));
    for (std::size_t k = 0; k < basis.size(); ++k) {
        d(static_cast<Eigen::Index>(k)) = basis[k].occupation(site);
    }
    return d;
}

} // namespace triwell
