#include "pvs/sampler/denoiser.hpp"

#include "pvs/sampler/rng.hpp"
#include "pvs/sampler/sampler.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <sys/un.h>
#include <unistd.h>

#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace pvs {

void LatentVolume::validate() const {
  if (frames < 1) throw std::invalid_argument("LatentVolume: need >= 1 frame");
  if (data.size() != size_t(frames) * frame_values())
    throw std::invalid_argument("LatentVolume: data size mismatch");
  if (known_mask.size() != size_t(frames) * frame_pixels())
    throw std::invalid_argument("LatentVolume: mask size mismatch");
  if (anchor.size() != size_t(frames))
    throw std::invalid_argument("LatentVolume: anchor flag size mismatch");
  if (clean.size() != data.size())
    throw std::invalid_argument("LatentVolume: clean latent size mismatch");
  for (int f = 0; f < frames; ++f) {
    if (!anchor[f]) continue;
    bool defined = false;
    for (size_t i = 0; i < frame_values() && !defined; ++i)
      if (clean[size_t(f) * frame_values() + i] != 0.0) defined = true;
    // An all-zero clean latent is still a defined latent; nothing to check
    // beyond sizes. Kept as a loop so NaNs are rejected.
    for (size_t i = 0; i < frame_values(); ++i)
      if (!std::isfinite(clean[size_t(f) * frame_values() + i]))
        throw std::invalid_argument("LatentVolume: anchor clean latent not finite");
  }
}

namespace {

std::vector<double> shift_target(const std::vector<double>& target, int frames, int height,
                                 int width, int channels, int column_shift) {
  if (column_shift == 0) return target;
  std::vector<double> out(target.size());
  const size_t frame_values = size_t(height) * width * channels;
  for (int f = 0; f < frames; ++f) {
    for (int y = 0; y < height; ++y) {
      for (int x = 0; x < width; ++x) {
        const int nx = (x + column_shift) % width;
        const size_t src = f * frame_values + (size_t(y) * width + x) * channels;
        const size_t dst = f * frame_values + (size_t(y) * width + nx) * channels;
        for (int c = 0; c < channels; ++c) out[dst + c] = target[src + c];
      }
    }
  }
  return out;
}

}  // namespace

OracleCleanDenoiser::OracleCleanDenoiser(std::vector<double> target, int height, int width,
                                         int channels)
    : target_(std::move(target)), height_(height), width_(width), channels_(channels) {}

std::vector<double> OracleCleanDenoiser::predict(const LatentVolume& z_t, int,
                                                 const DenoiserConditioning& conditioning) {
  if (z_t.data.size() != target_.size())
    throw std::invalid_argument("OracleCleanDenoiser: latent shape does not match target");
  return shift_target(target_, z_t.frames, height_, width_, channels_, conditioning.column_shift);
}

OracleNoiseDenoiser::OracleNoiseDenoiser(std::vector<double> target, int height, int width,
                                         int channels, NoiseSchedule schedule)
    : target_(std::move(target)),
      height_(height),
      width_(width),
      channels_(channels),
      schedule_(std::move(schedule)) {}

std::vector<double> OracleNoiseDenoiser::predict(const LatentVolume& z_t, int t,
                                                 const DenoiserConditioning& conditioning) {
  if (z_t.data.size() != target_.size())
    throw std::invalid_argument("OracleNoiseDenoiser: latent shape does not match target");
  const std::vector<double> shifted =
      shift_target(target_, z_t.frames, height_, width_, channels_, conditioning.column_shift);
  const double abar = schedule_.alpha_bar_at(t);
  const double scale = 1.0 / std::sqrt(1.0 - abar);
  const double root_abar = std::sqrt(abar);
  std::vector<double> eps(z_t.data.size());
  for (size_t i = 0; i < eps.size(); ++i) eps[i] = (z_t.data[i] - root_abar * shifted[i]) * scale;
  return eps;
}

std::vector<double> StubDenoiser::predict(const LatentVolume& z_t, int t,
                                          const DenoiserConditioning& conditioning) {
  uint64_t h = salt_;
  for (double v : conditioning.keyframe_features_a)
    h = CounterRng::mix(h ^ uint64_t(std::llround(v * 4096.0)));
  for (double v : conditioning.keyframe_features_b)
    h = CounterRng::mix(h ^ uint64_t(std::llround(v * 4096.0)));
  const CounterRng rng{h};
  std::vector<double> out(z_t.data.size());
  for (size_t i = 0; i < out.size(); ++i)
    out[i] = 0.5 + 0.05 * rng.normal(1, uint64_t(t), i);
  return out;
}

// ---------------------------------------------------------------------------
// External denoiser protocol
// ---------------------------------------------------------------------------

namespace {

constexpr char kRequestMagic[4] = {'P', 'V', 'S', 'D'};
constexpr char kResponseMagic[4] = {'P', 'V', 'S', 'R'};

void write_all(int fd, const void* buf, size_t n) {
  const char* p = static_cast<const char*>(buf);
  while (n > 0) {
    const ssize_t k = ::write(fd, p, n);
    if (k <= 0) throw std::runtime_error("external denoiser: socket write failed");
    p += k;
    n -= size_t(k);
  }
}

void read_all(int fd, void* buf, size_t n) {
  char* p = static_cast<char*>(buf);
  while (n > 0) {
    const ssize_t k = ::read(fd, p, n);
    if (k <= 0) throw std::runtime_error("external denoiser: socket read failed");
    p += k;
    n -= size_t(k);
  }
}

int connect_endpoint(const std::string& endpoint) {
  const size_t colon = endpoint.rfind(':');
  int fd;
  if (colon != std::string::npos && endpoint.find('/') == std::string::npos) {
    const std::string host = endpoint.substr(0, colon);
    const int port = std::stoi(endpoint.substr(colon + 1));
    fd = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd < 0) throw std::runtime_error("external denoiser: socket() failed");
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(uint16_t(port));
    addr.sin_addr.s_addr =
        (host.empty() || host == "localhost") ? htonl(INADDR_LOOPBACK) : inet_addr(host.c_str());
    if (::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0) {
      ::close(fd);
      throw std::runtime_error("external denoiser: cannot connect to " + endpoint);
    }
  } else {
    fd = ::socket(AF_UNIX, SOCK_STREAM, 0);
    if (fd < 0) throw std::runtime_error("external denoiser: socket() failed");
    sockaddr_un addr{};
    addr.sun_family = AF_UNIX;
    std::strncpy(addr.sun_path, endpoint.c_str(), sizeof(addr.sun_path) - 1);
    if (::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0) {
      ::close(fd);
      throw std::runtime_error("external denoiser: cannot connect to " + endpoint);
    }
  }
  return fd;
}

}  // namespace

ExternalDenoiser::ExternalDenoiser(const std::string& endpoint) : fd_(connect_endpoint(endpoint)) {}

ExternalDenoiser::~ExternalDenoiser() {
  if (fd_ >= 0) ::close(fd_);
}

std::vector<double> ExternalDenoiser::predict(const LatentVolume& z_t, int t,
                                              const DenoiserConditioning&) {
  const uint32_t dims[4] = {uint32_t(z_t.frames), uint32_t(z_t.height), uint32_t(z_t.width),
                            uint32_t(z_t.channels)};
  const uint64_t payload =
      4 + sizeof(uint32_t) * 5 + z_t.data.size() * sizeof(double);
  write_all(fd_, &payload, sizeof(payload));
  write_all(fd_, kRequestMagic, 4);
  const uint32_t step = uint32_t(t);
  write_all(fd_, &step, sizeof(step));
  write_all(fd_, dims, sizeof(dims));
  write_all(fd_, z_t.data.data(), z_t.data.size() * sizeof(double));

  uint64_t resp_len = 0;
  read_all(fd_, &resp_len, sizeof(resp_len));
  char magic[4];
  read_all(fd_, magic, 4);
  if (std::memcmp(magic, kResponseMagic, 4) != 0)
    throw std::runtime_error("external denoiser: bad response magic");
  uint32_t rdims[4];
  read_all(fd_, rdims, sizeof(rdims));
  const size_t n = size_t(rdims[0]) * rdims[1] * rdims[2] * rdims[3];
  if (n != z_t.data.size())
    throw std::runtime_error("external denoiser: response shape mismatch");
  std::vector<double> out(n);
  read_all(fd_, out.data(), n * sizeof(double));
  return out;
}

ExternalDenoiserServer::ExternalDenoiserServer(const std::string& endpoint, Handler handler,
                                               void* user)
    : handler_(handler), user_(user) {
  const size_t colon = endpoint.rfind(':');
  if (colon != std::string::npos && endpoint.find('/') == std::string::npos) {
    listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
    if (listen_fd_ < 0) throw std::runtime_error("denoiser server: socket() failed");
    const int one = 1;
    ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(uint16_t(std::stoi(endpoint.substr(colon + 1))));
    addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0)
      throw std::runtime_error("denoiser server: bind failed");
    socklen_t len = sizeof(addr);
    ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&addr), &len);
    port_ = ntohs(addr.sin_port);
  } else {
    listen_fd_ = ::socket(AF_UNIX, SOCK_STREAM, 0);
    if (listen_fd_ < 0) throw std::runtime_error("denoiser server: socket() failed");
    sockaddr_un addr{};
    addr.sun_family = AF_UNIX;
    std::strncpy(addr.sun_path, endpoint.c_str(), sizeof(addr.sun_path) - 1);
    ::unlink(endpoint.c_str());
    if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0)
      throw std::runtime_error("denoiser server: bind failed");
  }
  if (::listen(listen_fd_, 1) != 0) throw std::runtime_error("denoiser server: listen failed");
}

ExternalDenoiserServer::~ExternalDenoiserServer() {
  if (listen_fd_ >= 0) ::close(listen_fd_);
}

void ExternalDenoiserServer::serve(int count) {
  const int conn = ::accept(listen_fd_, nullptr, nullptr);
  if (conn < 0) throw std::runtime_error("denoiser server: accept failed");
  try {
    for (int i = 0; i < count; ++i) {
      uint64_t payload = 0;
      read_all(conn, &payload, sizeof(payload));
      char magic[4];
      read_all(conn, magic, 4);
      if (std::memcmp(magic, kRequestMagic, 4) != 0)
        throw std::runtime_error("denoiser server: bad request magic");
      uint32_t step = 0, dims[4];
      read_all(conn, &step, sizeof(step));
      read_all(conn, dims, sizeof(dims));
      const size_t n = size_t(dims[0]) * dims[1] * dims[2] * dims[3];
      std::vector<double> z(n);
      read_all(conn, z.data(), n * sizeof(double));

      const std::vector<double> out =
          handler_(z, int(step), int(dims[0]), int(dims[1]), int(dims[2]), int(dims[3]), user_);
      const uint64_t resp_len = 4 + sizeof(dims) + out.size() * sizeof(double);
      write_all(conn, &resp_len, sizeof(resp_len));
      write_all(conn, kResponseMagic, 4);
      write_all(conn, dims, sizeof(dims));
      write_all(conn, out.data(), out.size() * sizeof(double));
    }
  } catch (...) {
    ::close(conn);
    throw;
  }
  ::close(conn);
}

// ---------------------------------------------------------------------------
// Features and latent files
// ---------------------------------------------------------------------------

std::vector<double> stub_keyframe_features(const std::vector<float>& raster, int width, int height,
                                           int channels) {
  // 8x8 grid of luma mean/variance -> 128 dims.
  const int grid = 8;
  std::vector<double> features(grid * grid * 2, 0.0);
  for (int gy = 0; gy < grid; ++gy) {
    for (int gx = 0; gx < grid; ++gx) {
      const int x0 = width * gx / grid, x1 = std::max(x0 + 1, width * (gx + 1) / grid);
      const int y0 = height * gy / grid, y1 = std::max(y0 + 1, height * (gy + 1) / grid);
      double sum = 0.0, sum2 = 0.0;
      int n = 0;
      for (int y = y0; y < y1 && y < height; ++y)
        for (int x = x0; x < x1 && x < width; ++x) {
          double luma = 0.0;
          for (int c = 0; c < channels; ++c)
            luma += raster[(size_t(y) * width + x) * channels + c];
          luma /= channels;
          sum += luma;
          sum2 += luma * luma;
          ++n;
        }
      const double mean = n > 0 ? sum / n : 0.0;
      features[(gy * grid + gx) * 2] = mean;
      features[(gy * grid + gx) * 2 + 1] = n > 0 ? std::max(0.0, sum2 / n - mean * mean) : 0.0;
    }
  }
  return features;
}

void write_feature_file(const std::string& path, const std::vector<std::vector<double>>& features) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  const uint32_t dim = features.empty() ? 0 : uint32_t(features.front().size());
  const uint32_t count = uint32_t(features.size());
  out.write("FEAT", 4);
  out.write(reinterpret_cast<const char*>(&dim), 4);
  out.write(reinterpret_cast<const char*>(&count), 4);
  for (const auto& f : features) {
    if (f.size() != dim) throw std::invalid_argument("write_feature_file: ragged features");
    std::vector<float> buf(f.begin(), f.end());
    out.write(reinterpret_cast<const char*>(buf.data()), std::streamsize(buf.size() * 4));
  }
}

std::vector<std::vector<double>> read_feature_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error(path + ": cannot open for reading");
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, "FEAT", 4) != 0) throw std::runtime_error(path + ": bad magic");
  uint32_t dim = 0, count = 0;
  in.read(reinterpret_cast<char*>(&dim), 4);
  in.read(reinterpret_cast<char*>(&count), 4);
  std::vector<std::vector<double>> features(count);
  std::vector<float> buf(dim);
  for (auto& f : features) {
    in.read(reinterpret_cast<char*>(buf.data()), std::streamsize(buf.size() * 4));
    if (!in) throw std::runtime_error(path + ": truncated feature data");
    f.assign(buf.begin(), buf.end());
  }
  return features;
}

void write_latent_volume(const std::string& path, const std::vector<double>& data, int frames,
                         int height, int width, int channels) {
  if (data.size() != size_t(frames) * height * width * channels)
    throw std::invalid_argument("write_latent_volume: size mismatch");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  const uint32_t dims[4] = {uint32_t(frames), uint32_t(height), uint32_t(width),
                            uint32_t(channels)};
  out.write("LVOL", 4);
  out.write(reinterpret_cast<const char*>(dims), sizeof(dims));
  out.write(reinterpret_cast<const char*>(data.data()), std::streamsize(data.size() * 8));
}

std::vector<double> read_latent_volume(const std::string& path, int* frames, int* height,
                                       int* width, int* channels) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error(path + ": cannot open for reading");
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, "LVOL", 4) != 0) throw std::runtime_error(path + ": bad magic");
  uint32_t dims[4];
  in.read(reinterpret_cast<char*>(dims), sizeof(dims));
  std::vector<double> data(size_t(dims[0]) * dims[1] * dims[2] * dims[3]);
  in.read(reinterpret_cast<char*>(data.data()), std::streamsize(data.size() * 8));
  if (!in) throw std::runtime_error(path + ": truncated latent data");
  *frames = int(dims[0]);
  *height = int(dims[1]);
  *width = int(dims[2]);
  *channels = int(dims[3]);
  return data;
}

}  // namespace pvs
