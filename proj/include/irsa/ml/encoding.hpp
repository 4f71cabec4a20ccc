#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "irsa/types.hpp"

namespace irsa::ml {

// Per-tile integer code: sum_k a_ik 2^k (users indexed from 0).
std::vector<std::uint32_t> encode_association(const AssociationMatrix& A);

AssociationMatrix decode_codes(const std::vector<std::uint32_t>& codes, std::size_t users);

// Nearest power of two in [1, 2^(users-1)] to `value`; ties go to the smaller exponent.
std::size_t nearest_user(double value, std::size_t users);

// Rounds each output, projects it onto a single user and, with `repair`,
// reassigns the least confident tiles until every user holds its quota.
AssociationMatrix decode_output(const Eigen::Ref<const Eigen::VectorXd>& y, const std::vector<std::size_t>& quotas,
                                bool repair);

// Same for outputs given as code exponents (log2 of the code): each entry is
// rounded to the nearest user index, halves going to the lower one.
std::size_t nearest_exponent(double e, std::size_t users);
AssociationMatrix decode_exponents(const Eigen::Ref<const Eigen::VectorXd>& e, const std::vector<std::size_t>& quotas,
                                   bool repair);

}  // namespace irsa::ml
