#include "vlw/matweight.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/QR>

#include "vlw/error.hpp"

namespace vlw {

double operator_norm(const Eigen::Ref<const Eigen::MatrixXd>& a) {
  if (a.rows() == 1 || a.cols() == 1) return a.norm();
  if (a.rows() == 2 && a.cols() == 2) {
    const double t = a.squaredNorm();
    const double det = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
    const double disc = std::max(0.0, t * t - 4.0 * det * det);
    return std::sqrt(0.5 * (t + std::sqrt(disc)));
  }
  const Eigen::MatrixXd g = a.rows() <= a.cols() ? Eigen::MatrixXd(a * a.transpose())
                                                 : Eigen::MatrixXd(a.transpose() * a);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g, Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

ScalarField op_norm(const MatrixField& w) {
  ScalarField out(w.grid);
  for (std::size_t c = 0; c < w.grid.cell_count(); ++c) {
    if (w.dim == 1) {
      out.values[c] = std::abs(w.at(c)(0, 0));
    } else {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(w.at(c), Eigen::EigenvaluesOnly);
      out.values[c] = es.eigenvalues().cwiseAbs().maxCoeff();
    }
  }
  return out;
}

MatrixField inverse(const MatrixField& w) {
  MatrixField out(w.grid, w.dim);
  for (std::size_t c = 0; c < w.grid.cell_count(); ++c) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(w.at(c));
    const Eigen::VectorXd lambda = es.eigenvalues();
    if (!(lambda.minCoeff() > 1e-14)) {
      std::ostringstream msg;
      msg << "matrix weight is singular at cell " << c << " (min eigenvalue "
          << lambda.minCoeff() << ")";
      raise(ErrorKind::singular_weight, msg.str());
    }
    const auto& u = es.eigenvectors();
    out.at(c) = u * lambda.cwiseInverse().asDiagonal() * u.transpose();
    // enforce exact symmetry of the stored inverse
    Eigen::MatrixXd sym = 0.5 * (out.at(c) + out.at(c).transpose());
    out.at(c) = sym;
  }
  return out;
}

Eigendecomposition eigendecompose(const MatrixField& w) {
  Eigendecomposition out{MatrixField(w.grid, w.dim), MatrixField(w.grid, w.dim)};
  for (std::size_t c = 0; c < w.grid.cell_count(); ++c) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(w.at(c));
    out.vectors.at(c) = es.eigenvectors();
    out.values.at(c) = es.eigenvalues().asDiagonal();
  }
  return out;
}

Eigen::MatrixXd spd_sqrt(const Eigen::MatrixXd& a) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
  const Eigen::VectorXd s = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  Eigen::MatrixXd r = es.eigenvectors() * s.asDiagonal() * es.eigenvectors().transpose();
  return 0.5 * (r + r.transpose());
}

NormSampler::NormSampler(const MatrixField& w, const ExponentFunction& p, const Cube& q,
                         const NormOptions& opts)
    : dim_(w.dim), vol_(w.grid.cell_volume()), opts_(opts) {
  if (!(w.grid == p.grid())) raise(ErrorKind::dimension_mismatch, "weight and exponent grids differ");
  const auto cells = cells_in(w.grid, q);
  if (cells.empty()) raise(ErrorKind::precondition, "norm sampler on a cube with no cells");
  w_.reserve(cells.size());
  p_.reserve(cells.size());
  for (auto c : cells) {
    w_.emplace_back(w.at(c));
    p_.push_back(p[c]);
  }
  p_q_ = vlw::harmonic_mean(p, cells);
  const double measure = vol_ * static_cast<double>(cells.size());
  scale_ = std::isinf(p_q_) ? 1.0 : std::pow(measure, -1.0 / p_q_);
}

double NormSampler::operator()(const Eigen::VectorXd& v) const {
  std::vector<double> a(w_.size());
  for (std::size_t k = 0; k < w_.size(); ++k) a[k] = (w_[k] * v).norm();
  return scale_ * luxemburg_norm(a, p_, vol_, opts_).value;
}

namespace {

std::vector<Eigen::VectorXd> half_circle(int count, double offset) {
  std::vector<Eigen::VectorXd> dirs;
  dirs.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    const double t = std::numbers::pi * (i + offset) / count;
    Eigen::VectorXd v(2);
    v << std::cos(t), std::sin(t);
    dirs.push_back(v);
  }
  return dirs;
}

std::vector<Eigen::VectorXd> fibonacci_sphere(int count, double offset) {
  std::vector<Eigen::VectorXd> dirs;
  dirs.reserve(static_cast<std::size_t>(count));
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < count; ++i) {
    const double z = 1.0 - 2.0 * (i + 0.5) / count;
    const double rad = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = golden * i + offset;
    Eigen::VectorXd v(3);
    v << rad * std::cos(phi), rad * std::sin(phi), z;
    dirs.push_back(v);
  }
  return dirs;
}

std::vector<Eigen::VectorXd> gaussian_directions(int d, int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd(0.0, 1.0);
  std::vector<Eigen::VectorXd> dirs;
  for (int i = 0; i < count; ++i) {
    Eigen::VectorXd v(d);
    for (int k = 0; k < d; ++k) v(k) = nd(rng);
    dirs.push_back(v.normalized());
  }
  return dirs;
}

std::vector<Eigen::VectorXd> check_directions(int d) {
  if (d == 2) return half_circle(512, 0.5);
  if (d == 3) return fibonacci_sphere(4096, 0.37);
  return gaussian_directions(d, 256 * d * d, 0xc0ffee);
}

}  // namespace

std::vector<Eigen::VectorXd> fitting_directions(int d) {
  if (d == 1) return {Eigen::VectorXd::Ones(1)};
  if (d == 2) return half_circle(64, 0.0);
  if (d == 3) return fibonacci_sphere(512, 0.0);
  return gaussian_directions(d, 64 * d * d, 0x5eed);
}

KhachiyanResult khachiyan_mvee(const std::vector<Eigen::VectorXd>& points, double tol,
                               int max_iterations) {
  if (points.empty()) raise(ErrorKind::degenerate_sample, "ellipsoid fit with no points");
  const int d = static_cast<int>(points.front().size());
  const std::size_t count = points.size();
  Eigen::MatrixXd q(d, static_cast<Eigen::Index>(count));
  for (std::size_t i = 0; i < count; ++i) q.col(static_cast<Eigen::Index>(i)) = points[i];

  Eigen::VectorXd u = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(count), 1.0 / count);
  Eigen::VectorXd mvals(static_cast<Eigen::Index>(count));
  Eigen::MatrixXd x_inv(d, d);
  auto refresh = [&]() {
    const Eigen::MatrixXd x = q * u.asDiagonal() * q.transpose();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(x);
    const auto ev = es.eigenvalues();
    if (!(ev.minCoeff() > 1e-14 * std::max(1.0, ev.maxCoeff()))) {
      raise(ErrorKind::degenerate_sample, "direction sample is rank deficient");
    }
    x_inv = es.eigenvectors() * ev.cwiseInverse().asDiagonal() * es.eigenvectors().transpose();
    mvals = (q.transpose() * x_inv).cwiseProduct(q.transpose()).rowwise().sum();
  };

  int it = 0;
  const double dd = d;
  refresh();
  for (; it < max_iterations; ++it) {
    Eigen::Index jp = 0;
    const double mp = mvals.maxCoeff(&jp);
    Eigen::Index jm = -1;
    double mm = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < mvals.size(); ++i) {
      if (u(i) > 0.0 && mvals(i) < mm) {
        mm = mvals(i);
        jm = i;
      }
    }
    const double eps_plus = mp / dd - 1.0;
    const double eps_minus = 1.0 - mm / dd;
    if (eps_plus <= tol && eps_minus <= tol) break;
    // rank-one step X <- a X + b q_j q_j^T, applied to X^{-1} and the M_i
    // by Sherman-Morrison; a full refresh every 256 steps bounds the drift
    Eigen::Index j = jp;
    double a = 0.0;
    double b = 0.0;
    if (eps_plus >= eps_minus) {
      const double step = (mp - dd) / (dd * (mp - 1.0));
      u *= (1.0 - step);
      u(jp) += step;
      a = 1.0 - step;
      b = step;
    } else {
      const double uj = u(jm);
      const double limit = uj / (1.0 - uj);
      double step = mm > 1.0 ? (dd - mm) / (dd * (mm - 1.0)) : limit;
      step = std::min(step, limit);
      u *= (1.0 + step);
      u(jm) -= step;
      if (u(jm) < 1e-300 || step == limit) u(jm) = 0.0;
      j = jm;
      a = 1.0 + step;
      b = -step;
    }
    const double denom = 1.0 + (b / a) * mvals(j);
    if ((it + 1) % 256 == 0 || !(std::abs(denom) > 1e-8)) {
      refresh();
      continue;
    }
    const Eigen::VectorXd xq = x_inv * q.col(j);
    const Eigen::VectorXd gi = q.transpose() * xq;
    const double c = (b / a) / denom;
    x_inv = (x_inv - c * xq * xq.transpose()) / a;
    mvals = (mvals - c * gi.cwiseAbs2()) / a;
  }
  refresh();
  KhachiyanResult res;
  res.shape = x_inv / mvals.maxCoeff();
  res.shape = 0.5 * (res.shape + res.shape.transpose()).eval();
  res.iterations = it;
  return res;
}

Certificate sandwich_certificate(const DirectionNorm& r, const Eigen::MatrixXd& m,
                                 const std::vector<Eigen::VectorXd>& directions) {
  Certificate cert{std::numeric_limits<double>::infinity(), 0.0};
  for (const auto& v : directions) {
    const double ratio = (m * v).norm() / r(v);
    cert.min_ratio = std::min(cert.min_ratio, ratio);
    cert.max_ratio = std::max(cert.max_ratio, ratio);
  }
  return cert;
}

namespace {

// Golden-section maximisation of |m0 v(t)| / r(v(t)) over an angle interval.
double refine_angle(const DirectionNorm& r, const Eigen::MatrixXd& m0, double a, double b,
                    Eigen::VectorXd& best) {
  auto dir = [](double t) {
    Eigen::VectorXd v(2);
    v << std::cos(t), std::sin(t);
    return v;
  };
  auto ratio = [&](double t) {
    const Eigen::VectorXd v = dir(t);
    return (m0 * v).norm() / r(v);
  };
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - g * (b - a);
  double e = a + g * (b - a);
  double fc = ratio(c);
  double fe = ratio(e);
  for (int k = 0; k < 48 && b - a > 1e-12; ++k) {
    if (fc > fe) {
      b = e;
      e = c;
      fe = fc;
      c = b - g * (b - a);
      fc = ratio(c);
    } else {
      a = c;
      c = e;
      fc = fe;
      e = a + g * (b - a);
      fe = ratio(e);
    }
  }
  const double t = fc > fe ? c : e;
  best = dir(t);
  return std::max(fc, fe);
}

// Compass search for the maximum of |m0 v| / r(v) on the sphere, run in the
// whitened frame u = m0 v where the enclosing ellipsoid is the unit ball.
double refine_sphere(const DirectionNorm& r, const Eigen::MatrixXd& m0_inv, Eigen::VectorXd u,
                     Eigen::VectorXd& best) {
  const int d = static_cast<int>(u.size());
  auto value = [&](const Eigen::VectorXd& x) { return 1.0 / r(m0_inv * x); };
  u.normalize();
  double fu = value(u);
  double step = 0.05;
  int evals = 0;
  while (step > 1e-10 && evals < 2000) {
    Eigen::MatrixXd frame = Eigen::HouseholderQR<Eigen::MatrixXd>(u).householderQ();
    std::vector<Eigen::VectorXd> moves;
    for (int i = 1; i < d; ++i) {
      moves.push_back(frame.col(i));
      moves.push_back(-frame.col(i));
      for (int j = i + 1; j < d; ++j) {
        for (double si : {-1.0, 1.0}) {
          for (double sj : {-1.0, 1.0}) moves.push_back((si * frame.col(i) + sj * frame.col(j)) / std::sqrt(2.0));
        }
      }
    }
    bool moved = false;
    for (const auto& mv : moves) {
      const Eigen::VectorXd x = (u + step * mv).normalized();
      const double fx = value(x);
      ++evals;
      if (fx > fu) {
        u = x;
        fu = fx;
        moved = true;
        break;
      }
    }
    if (!moved) step *= 0.5;
  }
  best = (m0_inv * u).normalized();
  return fu;
}

}  // namespace

EllipsoidFit john_fit(const DirectionNorm& r, int d) {
  EllipsoidFit fit;
  if (d == 1) {
    Eigen::VectorXd one = Eigen::VectorXd::Ones(1);
    const double v = r(one);
    if (!(v > 0.0)) raise(ErrorKind::degenerate_sample, "norm vanishes on the direction sample");
    fit.m0 = Eigen::MatrixXd::Constant(1, 1, v);
    fit.m = fit.m0;
    fit.points = 1;
    return fit;
  }

  std::vector<Eigen::VectorXd> points;
  for (const auto& u : fitting_directions(d)) {
    const double ru = r(u);
    if (!(ru > 0.0) || !std::isfinite(ru)) {
      raise(ErrorKind::degenerate_sample, "norm is not positive on the direction sample");
    }
    points.push_back(u / ru);
  }
  const auto checks = check_directions(d);
  const double check_step = d == 2 ? std::numbers::pi / static_cast<double>(checks.size()) : 0.0;
  std::vector<double> check_norms(d == 2 ? checks.size() : 0);
  for (std::size_t i = 0; i < check_norms.size(); ++i) check_norms[i] = r(checks[i]);

  Eigen::MatrixXd m0;
  double worst = 0.0;
  for (int round = 0; round < 16; ++round) {
    const auto kh = khachiyan_mvee(points);
    fit.iterations += kh.iterations;
    fit.rounds = round + 1;
    m0 = spd_sqrt(kh.shape);

    // cutting planes: directions where the ellipsoid does not yet contain
    // the unit ball of r get added to the point set
    std::vector<std::pair<double, Eigen::VectorXd>> violators;
    if (d == 2) {
      std::vector<double> ratios(checks.size());
      for (std::size_t i = 0; i < checks.size(); ++i) {
        ratios[i] = (m0 * checks[i]).norm() / check_norms[i];
      }
      for (std::size_t i = 0; i < checks.size(); ++i) {
        const double here = ratios[i];
        const double prev = ratios[(i + checks.size() - 1) % checks.size()];
        const double next = ratios[(i + 1) % checks.size()];
        if (here >= prev && here >= next && here > 1.0 - 1e-4) {
          const double t = std::atan2(checks[i](1), checks[i](0));
          Eigen::VectorXd best;
          const double peak = refine_angle(r, m0, t - check_step, t + check_step, best);
          if (peak > 1.0 + 1e-12) violators.emplace_back(peak, best);
        }
      }
    } else {
      // uniform directions in the whitened frame sample a thin body evenly;
      // the strongest candidates are then polished by compass search
      const Eigen::MatrixXd m0_inv = m0.inverse();
      std::vector<std::pair<double, Eigen::VectorXd>> cand;
      cand.reserve(checks.size());
      for (const auto& u : checks) {
        const double ratio = 1.0 / r(m0_inv * u);
        cand.emplace_back(ratio, u);
      }
      std::sort(cand.begin(), cand.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
      // seeds at least 0.2 rad apart, up to 12
      std::vector<Eigen::VectorXd> seeds;
      for (std::size_t k = 0; k < cand.size() && seeds.size() < 12 && cand[k].first > 1.0 - 1e-3; ++k) {
        bool near = false;
        for (const auto& s : seeds) near = near || std::abs(s.dot(cand[k].second)) > std::cos(0.2);
        if (near) continue;
        seeds.push_back(cand[k].second);
        Eigen::VectorXd best;
        const double peak = refine_sphere(r, m0_inv, cand[k].second, best);
        if (peak > 1.0 + 1e-12) violators.emplace_back(peak, best);
      }
    }
    worst = 0.0;
    for (const auto& [ratio, v] : violators) worst = std::max(worst, ratio);
    if (violators.empty()) break;
    std::sort(violators.begin(), violators.end(),
              [](const auto& a, const auto& b) { return a.first > b.first; });
    const std::size_t take = std::min<std::size_t>(violators.size(), 8);
    for (std::size_t k = 0; k < take; ++k) {
      const auto& v = violators[k].second;
      points.push_back(v / r(v));
    }
  }
  if (worst > 1.0) m0 /= worst;

  fit.m0 = m0;
  fit.m = std::sqrt(static_cast<double>(d)) * m0;
  fit.points = points.size();
  return fit;
}

ReducingOperator reducing_operator(const MatrixField& w, const ExponentFunction& p,
                                   const Cube& q, const NormOptions& opts) {
  const NormSampler sampler(w, p, q, opts);
  const DirectionNorm r = [&sampler](const Eigen::VectorXd& v) { return sampler(v); };
  const EllipsoidFit fit = john_fit(r, w.dim);
  ReducingOperator op;
  op.cube = q;
  op.m = fit.m;
  op.certificate = sandwich_certificate(r, fit.m, fitting_directions(w.dim));
  return op;
}

ReducingOperator dual_reducing_operator(const MatrixField& w, const ExponentFunction& p,
                                        const Cube& q, const NormOptions& opts) {
  return reducing_operator(inverse(w), conjugate(p), q, opts);
}

}  // namespace vlw
