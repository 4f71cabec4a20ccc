#include "irsa/channel.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <numbers>

#include "irsa/error.hpp"
#include "irsa/rng.hpp"

namespace irsa {

bool ChannelSet::operator==(const ChannelSet& o) const {
  if (K != o.K || M != o.M || I != o.I || N != o.N || seed != o.seed) return false;
  for (std::size_t k = 0; k < K; ++k)
    if (h_d[k] != o.h_d[k]) return false;
  for (std::size_t i = 0; i < I; ++i) {
    if (G[i] != o.G[i]) return false;
    for (std::size_t k = 0; k < K; ++k)
      if (h_r[i][k] != o.h_r[i][k]) return false;
  }
  return true;
}

double path_loss(double wavelength, double d) {
  if (!(wavelength > 0.0)) throw InvalidParameter("wavelength", "must be positive");
  if (!(d > 0.0)) throw InvalidParameter("distance", "must be positive");
  const double a = wavelength / (4.0 * std::numbers::pi * d);
  return a * a;
}

ChannelSet draw_channels(const ValidatedScenario& scn, std::uint64_t seed) {
  ChannelSet ch;
  ch.K = scn.K;
  ch.M = scn.M;
  ch.I = scn.I;
  ch.N = scn.N;
  ch.seed = seed;

  const Substream direct(seed, Stream::Direct);
  const Substream bs_tile(seed, Stream::BsToTile);
  const Substream tile_user(seed, Stream::TileToUser);
  using u32 = std::uint32_t;

  ch.h_d.resize(scn.K);
  for (std::size_t k = 0; k < scn.K; ++k) {
    const double amp = std::sqrt(path_loss(scn.wavelength, scn.dist_direct[k]) * scn.direct_shadowing[k]);
    ch.h_d[k].resize(scn.M);
    for (std::size_t m = 0; m < scn.M; ++m) ch.h_d[k][m] = amp * direct.complex_normal(u32(k), u32(m), 0);
  }

  ch.G.resize(scn.I);
  ch.h_r.resize(scn.I);
  for (std::size_t i = 0; i < scn.I; ++i) {
    const double amp_t = std::sqrt(path_loss(scn.wavelength, scn.dist_bs_tile[i]));
    ch.G[i].resize(scn.N, scn.M);
    for (std::size_t n = 0; n < scn.N; ++n)
      for (std::size_t m = 0; m < scn.M; ++m) ch.G[i](n, m) = amp_t * bs_tile.complex_normal(u32(i), u32(n), u32(m));

    ch.h_r[i].resize(scn.K);
    for (std::size_t k = 0; k < scn.K; ++k) {
      const double amp_r = std::sqrt(path_loss(scn.wavelength, scn.dist_tile_user[i][k]));
      ch.h_r[i][k].resize(scn.N);
      for (std::size_t n = 0; n < scn.N; ++n) ch.h_r[i][k][n] = amp_r * tile_user.complex_normal(u32(i), u32(k), u32(n));
    }
  }
  return ch;
}

void check_dimensions(const ChannelSet& ch, const AssociationMatrix& A, const ReflectionSet& theta) {
  if (A.tiles() != ch.I || A.users() != ch.K)
    throw DimensionMismatch("association is " + std::to_string(A.tiles()) + "x" + std::to_string(A.users()) +
                            ", channels need " + std::to_string(ch.I) + "x" + std::to_string(ch.K));
  if (theta.theta.size() != ch.I) throw DimensionMismatch("reflection set has wrong tile count");
  for (const auto& t : theta.theta)
    if (static_cast<std::size_t>(t.size()) != ch.N) throw DimensionMismatch("reflection set has wrong unit count");
}

cd reflected_term(const ChannelSet& ch, const ReflectionSet& theta, std::size_t i, std::size_t k, const CVector& w) {
  const CVector gw = ch.G[i] * w;
  const auto& hr = ch.h_r[i][k];
  const auto& th = theta.theta[i];
  cd acc = 0.0;
  for (std::size_t n = 0; n < ch.N; ++n) acc += std::conj(hr[n]) * std::polar(1.0, th[n]) * gw[n];
  return acc;
}

CVector composite_channel(const ChannelSet& ch, const AssociationMatrix& A, const ReflectionSet& theta, std::size_t k) {
  if (k >= ch.K) throw DimensionMismatch("user index " + std::to_string(k) + " out of range");
  check_dimensions(ch, A, theta);
  CVector v = ch.h_d[k];
  for (std::size_t i = 0; i < ch.I; ++i) {
    if (!A(i, k)) continue;
    CVector x(ch.N);
    for (std::size_t n = 0; n < ch.N; ++n) x[n] = std::polar(1.0, -theta.theta[i][n]) * ch.h_r[i][k][n];
    v.noalias() += ch.G[i].adjoint() * x;
  }
  return v;
}

namespace {

constexpr char kMagic[8] = {'I', 'R', 'S', 'C', 'H', 'A', 'N', '1'};

void write_u64(std::ostream& out, std::uint64_t v) { out.write(reinterpret_cast<const char*>(&v), sizeof v); }
std::uint64_t read_u64(std::istream& in) {
  std::uint64_t v = 0;
  in.read(reinterpret_cast<char*>(&v), sizeof v);
  return v;
}
void write_block(std::ostream& out, const cd* data, std::size_t count) {
  out.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(count * sizeof(cd)));
}
void read_block(std::istream& in, cd* data, std::size_t count) {
  in.read(reinterpret_cast<char*>(data), static_cast<std::streamsize>(count * sizeof(cd)));
}

}  // namespace

void save_channels(const ChannelSet& ch, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidParameter("path", "cannot write " + path);
  out.write(kMagic, sizeof kMagic);
  for (auto v : {ch.K, ch.M, ch.I, ch.N}) write_u64(out, v);
  write_u64(out, ch.seed);
  for (const auto& h : ch.h_d) write_block(out, h.data(), ch.M);
  for (const auto& g : ch.G) write_block(out, g.data(), ch.N * ch.M);
  for (const auto& row : ch.h_r)
    for (const auto& h : row) write_block(out, h.data(), ch.N);
}

ChannelSet load_channels(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingArtifact(path);
  char magic[sizeof kMagic];
  in.read(magic, sizeof magic);
  if (!in || std::memcmp(magic, kMagic, sizeof kMagic) != 0)
    throw InvalidParameter("channels", path + " is not a channel dump");
  ChannelSet ch;
  ch.K = read_u64(in);
  ch.M = read_u64(in);
  ch.I = read_u64(in);
  ch.N = read_u64(in);
  ch.seed = read_u64(in);
  ch.h_d.assign(ch.K, CVector(ch.M));
  for (auto& h : ch.h_d) read_block(in, h.data(), ch.M);
  ch.G.assign(ch.I, CMatrix(ch.N, ch.M));
  for (auto& g : ch.G) read_block(in, g.data(), ch.N * ch.M);
  ch.h_r.assign(ch.I, std::vector<CVector>(ch.K, CVector(ch.N)));
  for (auto& row : ch.h_r)
    for (auto& h : row) read_block(in, h.data(), ch.N);
  if (!in) throw InvalidParameter("channels", path + " is truncated");
  return ch;
}

}  // namespace irsa
