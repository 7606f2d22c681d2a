#include "instamatte/matting.hpp"

#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <atomic>
#include <cmath>

#include "instamatte/image_io.hpp"
#include "instamatte/trimap.hpp"

extern char** environ;

namespace instamatte {

void validate(const SolverParams& p) {
  if (p.window_radius < 1) throw Error(ErrorCode::InvalidArgument, "window_radius must be at least 1");
  if (!(p.epsilon > 0.0)) throw Error(ErrorCode::InvalidArgument, "epsilon must be positive");
  if (!(p.constraint_weight > 0.0)) throw Error(ErrorCode::InvalidArgument, "constraint_weight must be positive");
  if (!(p.cg_tolerance > 0.0)) throw Error(ErrorCode::InvalidArgument, "cg_tolerance must be positive");
  if (p.cg_max_iterations < 1) throw Error(ErrorCode::InvalidArgument, "cg_max_iterations must be at least 1");
}

void validate(const MattingRequest& req) {
  if (!req.image.same_shape(req.trimap)) {
    throw Error(ErrorCode::InvalidRequest, "matting request image and trimap dimensions differ");
  }
  bool has_fg = false, has_bg = false;
  for (Label l : req.trimap.data()) {
    has_fg = has_fg || l == Label::Foreground;
    has_bg = has_bg || l == Label::Background;
  }
  if (!has_fg || !has_bg) {
    throw Error(ErrorCode::InvalidRequest, "matting request trimap needs a Foreground and a Background pixel");
  }
}

AlphaMatte matte_patch(const MattingBackend& backend, const MattingRequest& req) {
  validate(req);
  AlphaMatte alpha;
  try {
    alpha = backend.matte(req);
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    throw Error(ErrorCode::BackendFailure, backend.name() + ": " + e.what());
  }
  if (!alpha.same_shape(req.trimap)) {
    throw Error(ErrorCode::BackendFailure, backend.name() + ": alpha dimensions differ from the request");
  }
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    switch (req.trimap[i]) {
      case Label::Foreground: alpha[i] = 1.0; break;
      case Label::Background: alpha[i] = 0.0; break;
      case Label::Unknown: alpha[i] = std::isfinite(alpha[i]) ? std::clamp(alpha[i], 0.0, 1.0) : 0.5; break;
    }
  }
  return alpha;
}

CsrMatrix build_matting_laplacian(const RgbImage& image, const SolverParams& p) {
  validate(p);
  const int r = p.window_radius;
  const int w = image.width();
  const int h = image.height();
  const int side = 2 * r + 1;
  if (w < side || h < side) {
    throw Error(ErrorCode::ImageTooSmall, "image is smaller than one " + std::to_string(side) + "x" +
                                              std::to_string(side) + " matting window");
  }

  const int reach = 2 * r;
  const int stencil_side = 2 * reach + 1;
  const int stencil = stencil_side * stencil_side;
  const std::size_t n = image.pixel_count();
  std::vector<double> band(n * stencil, 0.0);
  auto slot = [&](int dx, int dy) { return (dy + reach) * stencil_side + (dx + reach); };

  const int count = side * side;
  const double inv_count = 1.0 / count;
  std::vector<Eigen::Vector3d> centered(count);
  std::vector<Eigen::Vector3d> weighted(count);
  std::vector<int> px(count), py(count);

  for (int cy = r; cy < h - r; ++cy) {
    for (int cx = r; cx < w - r; ++cx) {
      Eigen::Vector3d mean = Eigen::Vector3d::Zero();
      int k = 0;
      for (int dy = -r; dy <= r; ++dy) {
        for (int dx = -r; dx <= r; ++dx, ++k) {
          const std::uint8_t* pix = image.pixel(cx + dx, cy + dy);
          centered[k] = Eigen::Vector3d(pix[0] / 255.0, pix[1] / 255.0, pix[2] / 255.0);
          px[k] = cx + dx;
          py[k] = cy + dy;
          mean += centered[k];
        }
      }
      mean *= inv_count;
      Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
      for (int a = 0; a < count; ++a) {
        centered[a] -= mean;
        cov += centered[a] * centered[a].transpose();
      }
      cov *= inv_count;

      // Whitening through the eigenbasis keeps near-gray windows (rank
      // deficient covariance) numerically PSD; a cofactor inverse does not.
      const Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(cov);
      const Eigen::Vector3d lambda = eig.eigenvalues().cwiseMax(0.0);
      Eigen::Vector3d scale;
      for (int c = 0; c < 3; ++c) scale[c] = 1.0 / std::sqrt(lambda[c] + p.epsilon * inv_count);
      const Eigen::Matrix3d whiten = scale.asDiagonal() * eig.eigenvectors().transpose();
      for (int a = 0; a < count; ++a) weighted[a] = whiten * centered[a];

      for (int a = 0; a < count; ++a) {
        const std::size_t row_a = static_cast<std::size_t>(py[a]) * w + px[a];
        for (int b = a; b < count; ++b) {
          const double affinity = (1.0 + weighted[a].dot(weighted[b])) * inv_count;
          const double value = (a == b ? 1.0 : 0.0) - affinity;
          const std::size_t row_b = static_cast<std::size_t>(py[b]) * w + px[b];
          band[row_a * stencil + slot(px[b] - px[a], py[b] - py[a])] += value;
          if (b != a) band[row_b * stencil + slot(px[a] - px[b], py[a] - py[b])] += value;
        }
      }
    }
  }

  CsrMatrix l;
  l.rows = static_cast<int>(n);
  l.row_ptr.reserve(n + 1);
  l.row_ptr.push_back(0);
  l.cols.reserve(n * stencil);
  l.values.reserve(n * stencil);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::size_t row = static_cast<std::size_t>(y) * w + x;
      for (int dy = -reach; dy <= reach; ++dy) {
        const int yy = y + dy;
        if (yy < 0 || yy >= h) continue;
        for (int dx = -reach; dx <= reach; ++dx) {
          const int xx = x + dx;
          if (xx < 0 || xx >= w) continue;
          const double v = band[row * stencil + slot(dx, dy)];
          if (v == 0.0) continue;
          l.cols.push_back(yy * w + xx);
          l.values.push_back(v);
        }
      }
      l.row_ptr.push_back(static_cast<int>(l.cols.size()));
    }
  }
  return l;
}

ConstrainedSystem build_constrained_system(const CsrMatrix& laplacian, const Trimap& t, double weight) {
  if (static_cast<std::size_t>(laplacian.rows) != t.size()) {
    throw Error(ErrorCode::DimensionMismatch, "Laplacian size differs from trimap pixel count");
  }
  ConstrainedSystem sys;
  sys.matrix = laplacian;
  sys.rhs.assign(t.size(), 0.0);
  CsrMatrix& m = sys.matrix;
  for (int i = 0; i < m.rows; ++i) {
    if (t[i] == Label::Unknown) continue;
    if (t[i] == Label::Foreground) sys.rhs[i] = weight;
    const auto begin = m.cols.begin() + m.row_ptr[i];
    const auto end = m.cols.begin() + m.row_ptr[i + 1];
    const auto it = std::lower_bound(begin, end, i);
    if (it != end && *it == i) {
      m.values[static_cast<std::size_t>(it - m.cols.begin())] += weight;
    } else {
      // Diagonal absent only when the pixel lies in no window; insert it.
      const std::size_t pos = static_cast<std::size_t>(it - m.cols.begin());
      m.cols.insert(m.cols.begin() + pos, i);
      m.values.insert(m.values.begin() + pos, weight);
      for (int j = i + 1; j <= m.rows; ++j) ++m.row_ptr[j];
    }
  }
  return sys;
}

AlphaMatte solve_alpha(const RgbImage& image, const Trimap& t, const SolverParams& p) {
  validate(MattingRequest{image, t});
  const CsrMatrix l = build_matting_laplacian(image, p);
  const ConstrainedSystem sys = build_constrained_system(l, t, p.constraint_weight);
  const AlphaMatte start = trimap_alpha(t);

  CgOptions options;
  options.tolerance = p.cg_tolerance;
  options.max_iterations = p.cg_max_iterations;
  CgResult cg = conjugate_gradient(sys.matrix, sys.rhs, start.data(), options);
  if (!cg.converged) {
    throw Error(ErrorCode::NonConvergence, "conjugate gradient stopped at relative residual " +
                                               std::to_string(cg.relative_residual) + " after " +
                                               std::to_string(cg.iterations) + " iterations");
  }

  AlphaMatte alpha(t.width(), t.height(), std::move(cg.x));
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    if (t[i] == Label::Foreground) {
      alpha[i] = 1.0;
    } else if (t[i] == Label::Background) {
      alpha[i] = 0.0;
    } else {
      alpha[i] = std::clamp(alpha[i], 0.0, 1.0);
    }
  }
  return alpha;
}

ReferenceBackend::ReferenceBackend(SolverParams params) : params_(params) { validate(params_); }

AlphaMatte ReferenceBackend::matte(const MattingRequest& req) const {
  return solve_alpha(req.image, req.trimap, params_);
}

ExternalProcessBackend::ExternalProcessBackend(std::filesystem::path program, std::filesystem::path work_dir)
    : program_(std::move(program)), work_dir_(std::move(work_dir)) {}

AlphaMatte ExternalProcessBackend::matte(const MattingRequest& req) const {
  static std::atomic<unsigned long> counter{0};
  const std::string stem = "instamatte_" + std::to_string(::getpid()) + "_" + std::to_string(counter++);
  const auto image_path = work_dir_ / (stem + "_image.png");
  const auto trimap_path = work_dir_ / (stem + "_trimap.png");
  const auto alpha_path = work_dir_ / (stem + "_alpha.png");

  struct Cleanup {
    std::vector<std::filesystem::path> paths;
    ~Cleanup() {
      std::error_code ec;
      for (const auto& p : paths) std::filesystem::remove(p, ec);
    }
  } cleanup{{image_path, trimap_path, alpha_path}};

  write_png(image_path, req.image);
  write_png(trimap_path, trimap_encode(req.trimap));

  const std::string prog = program_.string();
  const std::string a1 = image_path.string();
  const std::string a2 = trimap_path.string();
  const std::string a3 = alpha_path.string();
  std::vector<char*> argv = {const_cast<char*>(prog.c_str()), const_cast<char*>(a1.c_str()),
                             const_cast<char*>(a2.c_str()), const_cast<char*>(a3.c_str()), nullptr};
  pid_t pid = 0;
  if (posix_spawn(&pid, prog.c_str(), nullptr, nullptr, argv.data(), environ) != 0) {
    throw Error(ErrorCode::BackendFailure, "cannot launch matting backend '" + prog + "'");
  }
  int status = 0;
  if (waitpid(pid, &status, 0) < 0 || !WIFEXITED(status) || WEXITSTATUS(status) != 0) {
    throw Error(ErrorCode::BackendFailure, "matting backend '" + prog + "' exited unsuccessfully");
  }
  AlphaMatte alpha;
  try {
    alpha = read_alpha_png(alpha_path);
  } catch (const Error& e) {
    throw Error(ErrorCode::BackendFailure, std::string("matting backend produced no readable alpha: ") + e.what());
  }
  return alpha;
}

std::unique_ptr<MattingBackend> make_backend(const std::string& spec, const SolverParams& params) {
  if (spec == "reference") return std::make_unique<ReferenceBackend>(params);
  const std::string prefix = "exec:";
  if (spec.rfind(prefix, 0) == 0 && spec.size() > prefix.size()) {
    return std::make_unique<ExternalProcessBackend>(spec.substr(prefix.size()));
  }
  throw Error(ErrorCode::InvalidArgument, "unknown backend '" + spec + "' (expected reference or exec:<path>)");
}

}  // namespace instamatte
