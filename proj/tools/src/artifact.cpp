#include "artifact.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

namespace mpct::cli {

static_assert(std::endian::native == std::endian::little,
              "artifact IO assumes a little-endian host");

namespace {

constexpr std::size_t kMagicSize = sizeof(kArtifactMagic);
constexpr std::size_t kHeaderSize = kMagicSize + 4 * sizeof(std::uint32_t);

class Writer {
 public:
  void raw(const void* p, std::size_t n) {
    const auto* b = static_cast<const std::uint8_t*>(p);
    out_.insert(out_.end(), b, b + n);
  }
  void u32(std::uint32_t v) { raw(&v, sizeof v); }
  void f64(double v) { raw(&v, sizeof v); }
  void array(const MatrixXd& M) {
    raw(M.data(), static_cast<std::size_t>(M.size()) * sizeof(double));
  }
  void array(std::span<const double> s) { raw(s.data(), s.size_bytes()); }
  std::vector<std::uint8_t> take() { return std::move(out_); }

 private:
  std::vector<std::uint8_t> out_;
};

class Reader {
 public:
  Reader(const std::uint8_t* p, std::size_t n) : p_(p), n_(n) {}
  void raw(void* dst, std::size_t n) {
    if (pos_ + n > n_) throw ArtifactError("artifact is truncated");
    std::memcpy(dst, p_ + pos_, n);
    pos_ += n;
  }
  std::uint32_t u32() {
    std::uint32_t v;
    raw(&v, sizeof v);
    return v;
  }
  double f64() {
    double v;
    raw(&v, sizeof v);
    return v;
  }
  MatrixXd matrix(Eigen::Index rows, Eigen::Index cols) {
    MatrixXd M(rows, cols);
    raw(M.data(), static_cast<std::size_t>(M.size()) * sizeof(double));
    return M;
  }
  VectorXd vector(Eigen::Index size) {
    VectorXd v(size);
    raw(v.data(), static_cast<std::size_t>(size) * sizeof(double));
    return v;
  }
  void array(std::span<double> s) { raw(s.data(), s.size_bytes()); }
  std::size_t remaining() const { return n_ - pos_; }

 private:
  const std::uint8_t* p_;
  std::size_t n_;
  std::size_t pos_ = 0;
};

}  // namespace

std::uint64_t fnv1a64(const std::uint8_t* data, std::size_t size) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::size_t i = 0; i < size; ++i) {
    h ^= data[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::size_t artifact_scalar_count(const OfflineData& offline, const WarmstartGain& gain) {
  return offline.stored_scalar_count() + gain.stored_scalar_count() + 1;
}

std::vector<std::uint8_t> encode_artifact(const OfflineData& d, const WarmstartGain& g) {
  Writer w;
  w.raw(kArtifactMagic, kMagicSize);
  w.u32(kArtifactVersion);
  w.u32(static_cast<std::uint32_t>(d.n));
  w.u32(static_cast<std::uint32_t>(d.m));
  w.u32(static_cast<std::uint32_t>(d.N));

  w.array(d.H1_inv);
  w.array(d.H3_inv);
  w.array(d.M2);
  w.array(d.factor.alpha_data());
  w.array(d.factor.beta_hat_data());
  w.array(d.z_lb);
  w.array(d.z_ub);
  w.array(d.z_lb_s);
  w.array(d.z_ub_s);
  w.array(d.u_only_lb);
  w.array(d.u_only_ub);
  w.array(d.A);
  w.array(d.B);
  w.array(d.rho0);
  w.array(d.rho_s);
  w.array(d.rho_hat);
  w.array(d.T);
  w.array(d.S);
  w.f64(d.rho_upper_bound);

  w.array(g.P_z2);
  w.array(g.P_z3_head);
  w.array(g.P_lambda_head);
  w.f64(g.support_residual);

  std::vector<std::uint8_t> bytes = w.take();
  const std::uint64_t sum = fnv1a64(bytes.data(), bytes.size());
  const auto* b = reinterpret_cast<const std::uint8_t*>(&sum);
  bytes.insert(bytes.end(), b, b + sizeof sum);
  return bytes;
}

Artifact decode_artifact(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < kHeaderSize + sizeof(std::uint64_t)) {
    throw ArtifactError("artifact is too short");
  }
  if (std::memcmp(bytes.data(), kArtifactMagic, kMagicSize) != 0) {
    throw ArtifactError("not an offline artifact (bad magic)");
  }
  const std::size_t body = bytes.size() - sizeof(std::uint64_t);
  std::uint64_t stored;
  std::memcpy(&stored, bytes.data() + body, sizeof stored);
  if (stored != fnv1a64(bytes.data(), body)) {
    throw ArtifactError("artifact checksum mismatch");
  }

  Reader r(bytes.data() + kMagicSize, body - kMagicSize);
  const std::uint32_t version = r.u32();
  if (version != kArtifactVersion) {
    throw ArtifactError("unsupported artifact version " + std::to_string(version));
  }
  const auto n = static_cast<int>(r.u32());
  const auto m = static_cast<int>(r.u32());
  const auto N = static_cast<int>(r.u32());
  if (n < 1 || m < 1 || N < 2 || n > 100000 || m > 100000 || N > 10000000) {
    throw ArtifactError("artifact has implausible dimensions");
  }
  const int nm = n + m;

  Artifact a;
  OfflineData& d = a.offline;
  d.n = n;
  d.m = m;
  d.N = N;
  d.H1_inv = r.matrix(nm, N + 1);
  d.H3_inv = r.matrix(nm, N + 1);
  d.M2 = r.matrix(nm, nm);
  d.factor = BandedFactor(n, N);
  r.array(d.factor.alpha_data());
  r.array(d.factor.beta_hat_data());
  d.z_lb = r.vector(nm);
  d.z_ub = r.vector(nm);
  d.z_lb_s = r.vector(nm);
  d.z_ub_s = r.vector(nm);
  d.u_only_lb = r.vector(nm);
  d.u_only_ub = r.vector(nm);
  d.A = r.matrix(n, n);
  d.B = r.matrix(n, m);
  d.rho0 = r.vector(n);
  d.rho_s = r.vector(nm);
  d.rho_hat = r.matrix(nm, N + 1);
  d.T = r.matrix(n, n);
  d.S = r.matrix(m, m);
  d.rho_upper_bound = r.f64();

  a.gain.P_z2 = r.matrix(nm, n);
  a.gain.P_z3_head = r.matrix(n, n);
  a.gain.P_lambda_head = r.matrix(2 * n, n);
  a.gain.support_residual = r.f64();
  if (r.remaining() != 0) throw ArtifactError("artifact has trailing bytes");
  return a;
}

void write_artifact(const std::string& path, const OfflineData& offline,
                    const WarmstartGain& gain) {
  const auto bytes = encode_artifact(offline, gain);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ArtifactError(path + ": cannot open for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw ArtifactError(path + ": write failed");
}

Artifact read_artifact(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ArtifactError(path + ": cannot open artifact");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  try {
    return decode_artifact(bytes);
  } catch (const ArtifactError& e) {
    throw ArtifactError(path + ": " + e.what());
  }
}

}  // namespace mpct::cli
