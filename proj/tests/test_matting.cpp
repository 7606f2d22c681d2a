#include <Eigen/Eigenvalues>
#include <random>

#include "doctest.h"
#include "instamatte/matting.hpp"
#include "instamatte/trimap.hpp"
#include "oracles.hpp"

using namespace instamatte;

namespace {

// Left half white, right half black, with an Unknown band of `band` columns
// centered on the boundary whose pixels take `band_gray`.
struct TwoTone {
  RgbImage image;
  Trimap trimap;
};

TwoTone two_tone(int w, int h, int band, std::uint8_t band_gray) {
  TwoTone s{RgbImage(w, h), Trimap(w, h)};
  const int b0 = (w - band) / 2;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      std::uint8_t v = x < b0 ? 255 : (x < b0 + band ? band_gray : 0);
      for (int c = 0; c < 3; ++c) s.image.at(x, y, c) = v;
      s.trimap(x, y) = x < b0 ? Label::Foreground : (x < b0 + band ? Label::Unknown : Label::Background);
    }
  }
  return s;
}

class ConstantBackend final : public MattingBackend {
 public:
  explicit ConstantBackend(double v) : v_(v) {}
  std::string name() const override { return "constant"; }
  bool reentrant() const override { return true; }
  AlphaMatte matte(const MattingRequest& req) const override {
    return AlphaMatte(req.trimap.width(), req.trimap.height(), v_);
  }

 private:
  double v_;
};

class ThrowingBackend final : public MattingBackend {
 public:
  std::string name() const override { return "throwing"; }
  bool reentrant() const override { return true; }
  AlphaMatte matte(const MattingRequest&) const override { throw std::runtime_error("boom"); }
};

}  // namespace

TEST_CASE("matte_patch enforces the backend contract") {
  const TwoTone s = two_tone(10, 6, 4, 128);
  const MattingRequest req{s.image, s.trimap};
  for (double v : {-3.0, 0.3, 7.0}) {
    const AlphaMatte a = matte_patch(ConstantBackend(v), req);
    CHECK(is_valid_alpha(a));
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (s.trimap[i] == Label::Foreground) CHECK(a[i] == 1.0);
      if (s.trimap[i] == Label::Background) CHECK(a[i] == 0.0);
    }
  }
  try {
    matte_patch(ThrowingBackend(), req);
    FAIL("expected backend failure");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::BackendFailure);
  }
}

TEST_CASE("matte_patch rejects invalid requests") {
  const TwoTone s = two_tone(10, 6, 4, 128);
  const Trimap all_fg(10, 6, Label::Foreground);
  CHECK_THROWS_AS(matte_patch(ConstantBackend(0.5), MattingRequest{s.image, all_fg}), Error);
  CHECK_THROWS_AS(matte_patch(ConstantBackend(0.5), MattingRequest{RgbImage(4, 4), s.trimap}), Error);
}

TEST_CASE("fully constrained trimap returns the foreground indicator") {
  TwoTone s = two_tone(8, 8, 0, 0);
  const AlphaMatte a = matte_patch(ReferenceBackend(), MattingRequest{s.image, s.trimap});
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i] == (s.trimap[i] == Label::Foreground ? 1.0 : 0.0));
  }
}

TEST_CASE("one gray column between white and black resolves to one half") {
  const TwoTone s = two_tone(9, 7, 1, 128);
  const AlphaMatte a = matte_patch(ReferenceBackend(), MattingRequest{s.image, s.trimap});
  const std::vector<double> dense = oracle::dense_alpha(s.image, s.trimap, 1, 1e-7, 100.0);
  for (int y = 0; y < 7; ++y) {
    CHECK(std::abs(a(4, y) - 0.5) <= 0.05);
    CHECK(std::abs(a(4, y) - dense[a.index(4, y)]) <= 1e-4);
  }
}

TEST_CASE("Laplacian structure") {
  std::mt19937_64 rng(31);
  SolverParams p;

  SUBCASE("constant image annihilates the ones vector") {
    const RgbImage flat(9, 7, 90);
    const CsrMatrix l = build_matting_laplacian(flat, p);
    std::vector<double> ones(l.rows, 1.0), out(l.rows);
    l.multiply(ones, out);
    for (double v : out) CHECK(std::abs(v) < 1e-9);
  }

  SUBCASE("symmetric, zero row sums, PSD and equal to the dense definition") {
    for (int trial = 0; trial < 3; ++trial) {
      const RgbImage img = oracle::random_image(8, 8, rng);
      const CsrMatrix l = build_matting_laplacian(img, p);
      const Eigen::MatrixXd dense = oracle::dense_laplacian(img, 1, p.epsilon);
      Eigen::MatrixXd from_csr = Eigen::MatrixXd::Zero(l.rows, l.rows);
      for (int i = 0; i < l.rows; ++i) {
        double row_sum = 0.0;
        for (int k = l.row_ptr[i]; k < l.row_ptr[i + 1]; ++k) {
          from_csr(i, l.cols[k]) = l.values[k];
          row_sum += l.values[k];
        }
        CHECK(std::abs(row_sum) <= 1e-9);
      }
      CHECK((from_csr - from_csr.transpose()).cwiseAbs().maxCoeff() == 0.0);
      CHECK((from_csr - dense).cwiseAbs().maxCoeff() < 1e-8 * (1.0 + dense.cwiseAbs().maxCoeff()));
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(from_csr);
      CHECK(eig.eigenvalues().minCoeff() >= -1e-9);
      for (int s = 0; s < 100; ++s) {
        Eigen::VectorXd x(l.rows);
        for (int i = 0; i < l.rows; ++i) x(i) = static_cast<double>(rng() % 2001) / 1000.0 - 1.0;
        CHECK(x.dot(from_csr * x) >= -1e-9);
      }
    }
  }

  SUBCASE("images smaller than one window are rejected") {
    try {
      build_matting_laplacian(RgbImage(2, 5), p);
      FAIL("expected image-too-small");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::ImageTooSmall);
    }
  }
}

TEST_CASE("CG energy never increases") {
  std::mt19937_64 rng(41);
  const RgbImage img = oracle::random_image(12, 12, rng);
  const Trimap t = oracle::random_trimap(12, 12, rng);
  const CsrMatrix l = build_matting_laplacian(img, SolverParams{});
  const ConstrainedSystem sys = build_constrained_system(l, t, 100.0);
  CgOptions opt;
  opt.track_energy = true;
  opt.tolerance = 1e-10;
  const CgResult r = conjugate_gradient(sys.matrix, sys.rhs, std::vector<double>(t.size(), 0.0), opt);
  CHECK(r.converged);
  REQUIRE(r.energy.size() >= 2);
  for (std::size_t k = 1; k < r.energy.size(); ++k) {
    CHECK(r.energy[k] <= r.energy[k - 1] + 1e-12 * std::abs(r.energy[k - 1]));
  }
}

TEST_CASE("solve_alpha agrees with the dense solve on a two-tone image") {
  const TwoTone s = two_tone(12, 12, 2, 160);
  const AlphaMatte a = solve_alpha(s.image, s.trimap, SolverParams{});
  const std::vector<double> dense = oracle::dense_alpha(s.image, s.trimap, 1, 1e-7, 100.0);
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - dense[i]));
  CHECK(worst <= 1e-4);
}

TEST_CASE("all-constrained solve reproduces the constraints") {
  std::mt19937_64 rng(2);
  const RgbImage img = oracle::random_image(6, 6, rng);
  Trimap t(6, 6, Label::Background);
  t(2, 2) = Label::Foreground;
  t(3, 3) = Label::Foreground;
  const AlphaMatte a = solve_alpha(img, t, SolverParams{});
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == (t[i] == Label::Foreground ? 1.0 : 0.0));
}

TEST_CASE("intensity scaling leaves the two-tone solution unchanged") {
  // Unknown band straddles the edge: one white column, one black column.
  TwoTone bright = two_tone(12, 10, 2, 0);
  for (int y = 0; y < 10; ++y) {
    for (int c = 0; c < 3; ++c) bright.image.at(5, y, c) = 255;
  }
  TwoTone dim = bright;
  for (auto& v : dim.image.data()) v = static_cast<std::uint8_t>(v / 2);
  const AlphaMatte a = solve_alpha(bright.image, bright.trimap, SolverParams{});
  const AlphaMatte b = solve_alpha(dim.image, dim.trimap, SolverParams{});
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::abs(a[i] - b[i]) <= 1e-4);
}

TEST_CASE("solver reports non-convergence") {
  std::mt19937_64 rng(4);
  const RgbImage img = oracle::random_image(16, 16, rng);
  const Trimap t = oracle::random_trimap(16, 16, rng);
  SolverParams p;
  p.cg_max_iterations = 1;
  p.cg_tolerance = 1e-14;
  try {
    solve_alpha(img, t, p);
    FAIL("expected non-convergence");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NonConvergence);
  }
}

TEST_CASE("reference backend is deterministic") {
  std::mt19937_64 rng(8);
  const RgbImage img = oracle::random_image(14, 11, rng);
  const Trimap t = oracle::random_trimap(14, 11, rng);
  const ReferenceBackend backend;
  CHECK(matte_patch(backend, {img, t}) == matte_patch(backend, {img, t}));
}

TEST_CASE("make_backend parses backend specs") {
  CHECK(make_backend("reference", SolverParams{})->name() == "reference");
  CHECK(make_backend("exec:/bin/true", SolverParams{})->name() == "exec:/bin/true");
  CHECK_FALSE(make_backend("exec:/bin/true", SolverParams{})->reentrant());
  CHECK_THROWS_AS(make_backend("dim-network", SolverParams{}), Error);
}

TEST_CASE("external process backend round-trips through files") {
  const TwoTone s = two_tone(8, 6, 2, 128);
  ExternalProcessBackend backend(FAKE_BACKEND_PATH);
  const AlphaMatte a = matte_patch(backend, MattingRequest{s.image, s.trimap});
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double expected = s.trimap[i] == Label::Foreground ? 1.0 : s.trimap[i] == Label::Unknown ? 128 / 255.0 : 0.0;
    CHECK(a[i] == doctest::Approx(expected));
  }
}

TEST_CASE("external process failures surface as backend errors") {
  const TwoTone s = two_tone(8, 6, 2, 128);
  ExternalProcessBackend backend("/bin/false");
  try {
    matte_patch(backend, MattingRequest{s.image, s.trimap});
    FAIL("expected backend failure");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::BackendFailure);
  }
}
