#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mpct/offline.hpp"
#include "mpct/warmstart.hpp"

namespace mpct::cli {

inline constexpr char kArtifactMagic[] = "MPCT-EADMM";  // 11 bytes with the NUL
inline constexpr std::uint32_t kArtifactVersion = 1;

class ArtifactError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Artifact {
  OfflineData offline;
  WarmstartGain gain;
};

/// Layout (little endian): magic, u32 version, u32 n, m, N, then f64 arrays
/// (column-major) in this order:
///   H1_inv, H3_inv, M2, alphas, beta_hats, z_lb, z_ub, z_lb_s, z_ub_s,
///   u_only_lb, u_only_ub, A, B, rho0, rho_s, rho_hat, T, S, rho_upper_bound,
///   P_z2, P_z3_head, P_lambda_head, support_residual,
/// followed by the u64 FNV-1a hash of every preceding byte.
std::vector<std::uint8_t> encode_artifact(const OfflineData& offline,
                                          const WarmstartGain& gain);
Artifact decode_artifact(const std::vector<std::uint8_t>& bytes);

void write_artifact(const std::string& path, const OfflineData& offline,
                    const WarmstartGain& gain);
Artifact read_artifact(const std::string& path);

/// Number of f64 values in an encoded artifact.
std::size_t artifact_scalar_count(const OfflineData& offline, const WarmstartGain& gain);

std::uint64_t fnv1a64(const std::uint8_t* data, std::size_t size);

}  // namespace mpct::cli
