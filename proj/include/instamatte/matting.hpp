#pragma once

#include <filesystem>
#include <memory>
#include <string>

#include "instamatte/raster.hpp"
#include "instamatte/sparse.hpp"

namespace instamatte {

struct SolverParams {
  int window_radius = 1;
  double epsilon = 1e-7;
  double constraint_weight = 100.0;
  double cg_tolerance = 1e-6;
  int cg_max_iterations = 2000;
};

void validate(const SolverParams& p);

struct MattingRequest {
  RgbImage image;
  Trimap trimap;
};

// Throws InvalidRequest unless dimensions match and the trimap holds at least
// one Foreground and one Background pixel.
void validate(const MattingRequest& req);

// A matting stage: image patch and trimap in, alpha out. Implementations must
// be deterministic for fixed inputs and parameters.
class MattingBackend {
 public:
  virtual ~MattingBackend() = default;

  virtual std::string name() const = 0;
  // Whether concurrent calls to matte() are safe.
  virtual bool reentrant() const = 0;
  // Raw estimate; constraint enforcement happens in matte_patch().
  virtual AlphaMatte matte(const MattingRequest& req) const = 0;
};

// Runs a backend under the contract: validates the request, clamps the result
// to [0, 1] and snaps Foreground/Background pixels to exactly 1/0. Backend
// errors surface as BackendFailure unless already typed.
AlphaMatte matte_patch(const MattingBackend& backend, const MattingRequest& req);

// Closed-form matting Laplacian over (2r+1)^2 windows lying fully inside the
// image, computed on intensities normalized to [0, 1].
CsrMatrix build_matting_laplacian(const RgbImage& image, const SolverParams& p);

// (L + c D) with D the diagonal indicator of constrained pixels, and the
// right-hand side c b with b the Foreground indicator.
struct ConstrainedSystem {
  CsrMatrix matrix;
  std::vector<double> rhs;
};

ConstrainedSystem build_constrained_system(const CsrMatrix& laplacian, const Trimap& t, double weight);

// Reference solve: conjugate gradient on the constrained system, clamped to
// [0, 1] with constrained pixels snapped. Throws NonConvergence.
AlphaMatte solve_alpha(const RgbImage& image, const Trimap& t, const SolverParams& p);

class ReferenceBackend final : public MattingBackend {
 public:
  explicit ReferenceBackend(SolverParams params = {});

  std::string name() const override { return "reference"; }
  bool reentrant() const override { return true; }
  AlphaMatte matte(const MattingRequest& req) const override;

  const SolverParams& params() const noexcept { return params_; }

 private:
  SolverParams params_;
};

// Delegates to an executable invoked as `<program> <image.png> <trimap.png> <alpha.png>`.
// Exit status 0 signals success. Temporary files live under `work_dir`.
class ExternalProcessBackend final : public MattingBackend {
 public:
  explicit ExternalProcessBackend(std::filesystem::path program,
                                  std::filesystem::path work_dir = std::filesystem::temp_directory_path());

  std::string name() const override { return "exec:" + program_.string(); }
  bool reentrant() const override { return false; }
  AlphaMatte matte(const MattingRequest& req) const override;

 private:
  std::filesystem::path program_;
  std::filesystem::path work_dir_;
};

// Parses `reference` or `exec:<path>`.
std::unique_ptr<MattingBackend> make_backend(const std::string& spec, const SolverParams& params);

}  // namespace instamatte
