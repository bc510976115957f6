#include "heatsup/field.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <istream>
#include <ostream>

#include "heatsup/errors.hpp"
#include "heatsup/rng.hpp"

namespace heatsup {

const char* to_string(SamplerKind s) {
  switch (s) {
    case SamplerKind::Spectral: return "spectral";
    case SamplerKind::FiniteDifference: return "finite_difference";
    case SamplerKind::GaussianWindow: return "gaussian_window";
  }
  return "?";
}

std::vector<double> uniform_axis(double lo, double hi, int steps) {
  std::vector<double> a(static_cast<std::size_t>(steps) + 1);
  for (int i = 0; i <= steps; ++i) a[i] = lo + (hi - lo) * i / steps;
  a.back() = hi;
  return a;
}

FieldPath FieldPath::zeros(std::vector<double> times, std::vector<double> positions,
                           BoundaryCondition bc) {
  FieldPath p;
  p.values.assign(times.size() * positions.size(), 0.0);
  p.times = std::move(times);
  p.positions = std::move(positions);
  p.bc = bc;
  return p;
}

FieldPath FieldPath::zeros(const SpaceTimeGrid& grid, BoundaryCondition bc) {
  return zeros(uniform_axis(0.0, grid.t_max, grid.nt), uniform_axis(0.0, 1.0, grid.nx), bc);
}

FieldPath FieldPath::coarsen(std::size_t ft, std::size_t fx) const {
  if (ft == 0 || fx == 0) throw PreconditionError("coarsening factors must be positive");
  FieldPath out = *this;
  out.times.clear();
  out.positions.clear();
  for (std::size_t i = 0; i < rows(); i += ft) out.times.push_back(times[i]);
  for (std::size_t j = 0; j < cols(); j += fx) out.positions.push_back(positions[j]);
  out.values.clear();
  for (std::size_t i = 0; i < rows(); i += ft)
    for (std::size_t j = 0; j < cols(); j += fx) out.values.push_back((*this)(i, j));
  return out;
}

double ou_transition(double a, double lambda, double delta, double xi) {
  if (lambda == 0.0) return a + xi * std::sqrt(delta);
  const double sd = std::sqrt(-std::expm1(-2.0 * lambda * delta) / (2.0 * lambda));
  return std::exp(-lambda * delta) * a + xi * sd;
}

FieldPath sample_spectral(const std::vector<double>& times, const std::vector<double>& positions,
                          BoundaryCondition bc, std::uint64_t seed, int truncation,
                          std::uint64_t path) {
  if (truncation < 1) throw PreconditionError("truncation must be >= 1");
  if (times.empty() || times.front() < 0.0 || !std::is_sorted(times.begin(), times.end()))
    throw PreconditionError("time axis must be sorted and nonnegative");
  FieldPath out = FieldPath::zeros(times, positions, bc);
  out.seed = seed;
  out.path_index = path;
  out.sampler = SamplerKind::Spectral;
  out.truncation = truncation;

  const std::size_t nr = times.size(), nc = positions.size();
  const int first = bc == BoundaryCondition::Neumann ? 0 : 1;
  const int last = bc == BoundaryCondition::Neumann ? truncation - 1 : truncation;
  const NormalStream normals(seed, path, StreamTag::SpectralModes);
  std::vector<double> xi(nr), coef(nr), basis(nc), step(nr);
  for (std::size_t i = 0; i < nr; ++i) step[i] = times[i] - (i ? times[i - 1] : 0.0);

  for (int n = first; n <= last; ++n) {
    const double lam = eigenvalue(n);
    normals.fill(static_cast<std::uint64_t>(n) * nr, xi.data(), nr);
    double a = 0.0;
    for (std::size_t i = 0; i < nr; ++i) {
      if (step[i] > 0.0) a = ou_transition(a, lam, step[i], xi[i]);
      coef[i] = a;
    }
    for (std::size_t j = 0; j < nc; ++j) basis[j] = eigenfunction(n, positions[j], bc);
    for (std::size_t i = 0; i < nr; ++i) {
      double* row = &out.values[i * nc];
      const double c = coef[i];
      for (std::size_t j = 0; j < nc; ++j) row[j] += c * basis[j];
    }
  }
  return out;
}

FieldPath sample_spectral(const SpaceTimeGrid& grid, BoundaryCondition bc, std::uint64_t seed,
                          int truncation, std::uint64_t path) {
  return sample_spectral(uniform_axis(0.0, grid.t_max, grid.nt), uniform_axis(0.0, 1.0, grid.nx),
                         bc, seed, truncation, path);
}

NoiseField draw_noise(const SpaceTimeGrid& grid, std::uint64_t seed, std::uint64_t path, double t0) {
  NoiseField w;
  w.t0 = t0;
  w.dt = grid.dt();
  w.nt = static_cast<std::size_t>(grid.nt);
  w.positions = uniform_axis(0.0, 1.0, grid.nx);
  w.volumes.assign(w.positions.size(), grid.dx());
  w.volumes.front() = w.volumes.back() = 0.5 * grid.dx();
  const std::size_t nc = w.cols();
  w.increments.resize(w.nt * nc);
  NormalStream(seed, path, StreamTag::FdNoise).fill(0, w.increments.data(), w.increments.size());
  for (std::size_t n = 0; n < w.nt; ++n)
    for (std::size_t j = 0; j < nc; ++j) w(n, j) *= std::sqrt(w.dt * w.volumes[j]);
  return w;
}

FieldPath run_finite_difference(const SpaceTimeGrid& grid, BoundaryCondition bc,
                                const NoiseField& noise, const FdStart& start) {
  if (!grid.fd_stable())
    throw PreconditionError("finite-difference step violates dt <= dx^2/2");
  const std::size_t nc = static_cast<std::size_t>(grid.nx) + 1;
  if (noise.cols() != nc || noise.nt != static_cast<std::size_t>(grid.nt))
    throw PreconditionError("noise field does not match the grid");
  if (!start.state.empty() && start.state.size() != nc)
    throw PreconditionError("initial state does not match the grid");

  FieldPath out = FieldPath::zeros(uniform_axis(start.t0, start.t0 + grid.t_max, grid.nt),
                                   uniform_axis(0.0, 1.0, grid.nx), bc);
  out.sampler = SamplerKind::FiniteDifference;
  if (!start.state.empty()) std::copy(start.state.begin(), start.state.end(), out.values.begin());
  const double r = grid.dt() / (grid.dx() * grid.dx());
  const double inv_dx = 1.0 / grid.dx();
  const bool dirichlet = bc == BoundaryCondition::Dirichlet;
  if (dirichlet) out(0, 0) = out(0, nc - 1) = 0.0;

  for (std::size_t n = 0; n < noise.nt; ++n) {
    const double* u = &out.values[n * nc];
    double* v = &out.values[(n + 1) * nc];
    for (std::size_t j = 1; j + 1 < nc; ++j)
      v[j] = u[j] + r * (u[j + 1] - 2.0 * u[j] + u[j - 1]) + noise(n, j) * inv_dx;
    if (dirichlet) {
      v[0] = v[nc - 1] = 0.0;
    } else {
      // ghost node mirrors the first interior node; boundary volume is dx/2
      v[0] = u[0] + 2.0 * r * (u[1] - u[0]) + 2.0 * noise(n, 0) * inv_dx;
      v[nc - 1] = u[nc - 1] + 2.0 * r * (u[nc - 2] - u[nc - 1]) + 2.0 * noise(n, nc - 1) * inv_dx;
    }
  }
  return out;
}

std::pair<FieldPath, NoiseField> sample_finite_difference(const SpaceTimeGrid& grid,
                                                          BoundaryCondition bc, std::uint64_t seed,
                                                          std::uint64_t path, const FdStart& start) {
  if (!grid.fd_stable())
    throw PreconditionError("finite-difference step violates dt <= dx^2/2");
  NoiseField w = draw_noise(grid, seed, path, start.t0);
  FieldPath u = run_finite_difference(grid, bc, w, start);
  u.seed = seed;
  u.path_index = path;
  return {std::move(u), std::move(w)};
}

// ---------------------------------------------------------------------------

GaussianWindowSampler::GaussianWindowSampler(std::vector<double> times,
                                             std::vector<double> positions, BoundaryCondition bc,
                                             std::optional<SpaceTimePoint> anchor,
                                             const KernelParams& params)
    : times_(std::move(times)), positions_(std::move(positions)), bc_(bc), anchor_(anchor) {
  const std::size_t nr = times_.size(), nc = positions_.size();
  slot_.assign(nr * nc, -1);
  std::vector<SpaceTimePoint> pts;
  const auto degenerate = [&](double t, double x) {
    return t <= 0.0 || (bc_ == BoundaryCondition::Dirichlet && (x <= 0.0 || x >= 1.0));
  };
  if (anchor_) {
    if (degenerate(anchor_->t, anchor_->x)) throw PreconditionError("anchor has zero variance");
    pts.push_back(*anchor_);
    anchor_slot_ = 0;
  }
  for (std::size_t i = 0; i < nr; ++i) {
    for (std::size_t j = 0; j < nc; ++j) {
      const double t = times_[i], x = positions_[j];
      if (degenerate(t, x)) continue;
      if (anchor_ && t == anchor_->t && x == anchor_->x) {
        slot_[i * nc + j] = anchor_slot_;
        continue;
      }
      slot_[i * nc + j] = static_cast<std::ptrdiff_t>(pts.size());
      pts.push_back({t, x});
    }
  }
  const std::size_t d = pts.size();
  if (d == 0) throw PreconditionError("window has no random components");
  Eigen::MatrixXd c(d, d);
  for (std::size_t a = 0; a < d; ++a)
    for (std::size_t b = a; b < d; ++b)
      c(a, b) = c(b, a) = covariance(pts[a].t, pts[a].x, pts[b].t, pts[b].x, bc_, params);
  if (anchor_) {
    // components other than the anchor become increments relative to it
    const Eigen::VectorXd ca = c.col(0);
    const double caa = ca(0);
    for (std::size_t a = 1; a < d; ++a)
      for (std::size_t b = 1; b < d; ++b) c(a, b) = c(a, b) - ca(a) - ca(b) + caa;
    for (std::size_t a = 1; a < d; ++a) c(a, 0) = c(0, a) = ca(a) - caa;
  }
  cov_ = c;
  Eigen::LLT<Eigen::MatrixXd> llt(c);
  if (llt.info() == Eigen::Success) {
    factor_ = llt.matrixL();
  } else {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(c);
    const Eigen::VectorXd root = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    factor_ = es.eigenvectors() * root.asDiagonal();
    triangular_ = false;
  }
}

FieldPath GaussianWindowSampler::sample(std::uint64_t seed, std::uint64_t path) const {
  const std::size_t d = dimension();
  Eigen::VectorXd z(d);
  NormalStream(seed, path, StreamTag::GaussianWindow).fill(0, z.data(), d);
  Eigen::VectorXd comp;
  if (triangular_) {
    comp = factor_.triangularView<Eigen::Lower>() * z;
  } else {
    comp = factor_ * z;
  }
  FieldPath out = FieldPath::zeros(times_, positions_, bc_);
  out.seed = seed;
  out.path_index = path;
  out.sampler = SamplerKind::GaussianWindow;
  const double base = anchor_ ? comp(0) : 0.0;
  for (std::size_t k = 0; k < slot_.size(); ++k) {
    const auto s = slot_[k];
    if (s < 0) continue;
    out.values[k] = s == anchor_slot_ ? base : base + comp(s);
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {
constexpr char kFieldMagic[4] = {'H', 'S', 'F', 'P'};
constexpr char kNoiseMagic[4] = {'H', 'S', 'N', 'F'};
constexpr std::uint32_t kFormatVersion = 1;

template <class T>
void put(std::ostream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}
template <class T>
T get(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw std::runtime_error("truncated binary stream");
  return v;
}
void put_vec(std::ostream& os, const std::vector<double>& v) {
  os.write(reinterpret_cast<const char*>(v.data()), static_cast<std::streamsize>(v.size() * 8));
}
std::vector<double> get_vec(std::istream& is, std::size_t n) {
  std::vector<double> v(n);
  is.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(n * 8));
  if (!is) throw std::runtime_error("truncated binary stream");
  return v;
}
void check_magic(std::istream& is, const char (&magic)[4]) {
  char m[4];
  is.read(m, 4);
  if (!is || std::memcmp(m, magic, 4) != 0) throw std::runtime_error("bad magic in binary stream");
  if (get<std::uint32_t>(is) != kFormatVersion) throw std::runtime_error("unsupported format version");
}
}  // namespace

void write_binary(std::ostream& os, const FieldPath& p) {
  os.write(kFieldMagic, 4);
  put(os, kFormatVersion);
  put(os, static_cast<std::uint8_t>(p.bc));
  put(os, static_cast<std::uint8_t>(p.sampler));
  put(os, p.seed);
  put(os, p.path_index);
  put(os, static_cast<std::int32_t>(p.truncation));
  put(os, static_cast<std::uint64_t>(p.rows()));
  put(os, static_cast<std::uint64_t>(p.cols()));
  put_vec(os, p.times);
  put_vec(os, p.positions);
  put_vec(os, p.values);
}

FieldPath read_binary_field(std::istream& is) {
  check_magic(is, kFieldMagic);
  FieldPath p;
  p.bc = static_cast<BoundaryCondition>(get<std::uint8_t>(is));
  p.sampler = static_cast<SamplerKind>(get<std::uint8_t>(is));
  p.seed = get<std::uint64_t>(is);
  p.path_index = get<std::uint64_t>(is);
  p.truncation = get<std::int32_t>(is);
  const auto nr = get<std::uint64_t>(is);
  const auto nc = get<std::uint64_t>(is);
  p.times = get_vec(is, nr);
  p.positions = get_vec(is, nc);
  p.values = get_vec(is, nr * nc);
  return p;
}

void write_binary(std::ostream& os, const NoiseField& w) {
  os.write(kNoiseMagic, 4);
  put(os, kFormatVersion);
  put(os, w.t0);
  put(os, w.dt);
  put(os, static_cast<std::uint64_t>(w.nt));
  put(os, static_cast<std::uint64_t>(w.cols()));
  put_vec(os, w.positions);
  put_vec(os, w.volumes);
  put_vec(os, w.increments);
}

NoiseField read_binary_noise(std::istream& is) {
  check_magic(is, kNoiseMagic);
  NoiseField w;
  w.t0 = get<double>(is);
  w.dt = get<double>(is);
  w.nt = get<std::uint64_t>(is);
  const auto nc = get<std::uint64_t>(is);
  w.positions = get_vec(is, nc);
  w.volumes = get_vec(is, nc);
  w.increments = get_vec(is, w.nt * nc);
  return w;
}

void write_csv(std::ostream& os, const FieldPath& p) {
  os << "t";
  char buf[64];
  for (double x : p.positions) {
    std::snprintf(buf, sizeof buf, ",x=%.17g", x);
    os << buf;
  }
  os << '\n';
  for (std::size_t i = 0; i < p.rows(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", p.times[i]);
    os << buf;
    for (std::size_t j = 0; j < p.cols(); ++j) {
      std::snprintf(buf, sizeof buf, ",%.17g", p(i, j));
      os << buf;
    }
    os << '\n';
  }
}

}  // namespace heatsup
