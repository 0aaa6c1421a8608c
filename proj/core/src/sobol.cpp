#include "uigp/experiment.hpp"

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace uigp {

namespace {

// Joe-Kuo direction-number parameters (s, a, m_1..m_s) for dimensions
// 2..16; dimension 1 is the plain van der Corput sequence in base 2.
struct DirectionSpec {
  int s;
  std::uint32_t a;
  std::array<std::uint32_t, 6> m;
};

constexpr int kMaxDim = 16;
constexpr int kBits = 32;

constexpr std::array<DirectionSpec, 15> kJoeKuo = {{
    {1, 0, {1}},
    {2, 1, {1, 3}},
    {3, 1, {1, 3, 1}},
    {3, 2, {1, 1, 1}},
    {4, 1, {1, 1, 3, 3}},
    {4, 4, {1, 3, 5, 13}},
    {5, 2, {1, 1, 5, 5, 17}},
    {5, 4, {1, 1, 5, 5, 5}},
    {5, 7, {1, 1, 7, 11, 19}},
    {5, 11, {1, 1, 5, 1, 1}},
    {5, 13, {1, 1, 1, 3, 11}},
    {5, 14, {1, 3, 5, 5, 31}},
    {6, 1, {1, 3, 3, 9, 7, 49}},
    {6, 13, {1, 1, 1, 15, 21, 21}},
    {6, 16, {1, 3, 1, 13, 27, 49}},
}};

std::array<std::uint32_t, kBits> direction_integers(int dim_index) {
  std::array<std::uint32_t, kBits> v{};
  if (dim_index == 0) {
    for (int k = 0; k < kBits; ++k) v[k] = 1u << (kBits - 1 - k);
    return v;
  }
  const DirectionSpec& params = kJoeKuo[dim_index - 1];
  for (int k = 0; k < params.s && k < kBits; ++k) v[k] = params.m[k] << (kBits - 1 - k);
  for (int k = params.s; k < kBits; ++k) {
    v[k] = v[k - params.s] ^ (v[k - params.s] >> params.s);
    for (int j = 1; j < params.s; ++j)
      if ((params.a >> (params.s - 1 - j)) & 1u) v[k] ^= v[k - j];
  }
  return v;
}

// Index of the rightmost zero bit (0-based), i.e. the direction number used
// by the Gray-code update from point i to i+1.
int rightmost_zero_bit(std::uint64_t i) {
  int c = 0;
  while (i & 1u) {
    i >>= 1;
    ++c;
  }
  return c;
}

}  // namespace

Eigen::MatrixXd sobol_sequence(Eigen::Index n, Eigen::Index d) {
  if (d < 1 || d > kMaxDim)
    throw std::invalid_argument("sobol_sequence: dimension must be in [1, " +
                                std::to_string(kMaxDim) + "], got " + std::to_string(d));
  if (n < 0) throw std::invalid_argument("sobol_sequence: negative count");

  std::vector<std::array<std::uint32_t, kBits>> dirs(d);
  for (Eigen::Index j = 0; j < d; ++j) dirs[j] = direction_integers(static_cast<int>(j));

  Eigen::MatrixXd points(n, d);
  std::vector<std::uint32_t> state(d, 0u);  // the skipped all-zeros point
  for (Eigen::Index i = 0; i < n; ++i) {
    const int c = rightmost_zero_bit(static_cast<std::uint64_t>(i));
    for (Eigen::Index j = 0; j < d; ++j) {
      state[j] ^= dirs[j][c];
      points(i, j) = static_cast<double>(state[j]) * 0x1p-32;
    }
  }
  return points;
}

}  // namespace uigp
