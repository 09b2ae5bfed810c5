#include "ruelle/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ruelle/error.hpp"

namespace ruelle {

namespace {

constexpr double kChartRadius = 1.05;

// Cubic Lagrange weights on nodes -1, 0, 1, 2 at fractional offset s.
std::array<double, 4> cubic_weights(double s) {
  return {-s * (s - 1.0) * (s - 2.0) / 6.0, (s + 1.0) * (s - 1.0) * (s - 2.0) / 2.0,
          -(s + 1.0) * s * (s - 2.0) / 2.0, (s + 1.0) * s * (s - 1.0) / 6.0};
}

double smoothstep(double s) {
  s = std::clamp(s, 0.0, 1.0);
  return s * s * s * (s * (6.0 * s - 15.0) + 10.0);
}

}  // namespace

std::shared_ptr<const Mesh> Mesh::circle(int resolution) {
  if (resolution < 4) throw InputError("Mesh::circle: resolution must be >= 4");
  auto m = std::shared_ptr<Mesh>(new Mesh());
  m->kind_ = Kind::circle;
  m->resolution_ = resolution;
  const int n = 2 * resolution;
  m->spacing_ = 2.0 * std::numbers::pi / n;
  m->nodes_.reserve(n);
  for (int k = 0; k < n; ++k) m->nodes_.push_back(SpherePoint::on_circle(k * m->spacing_));
  m->quadrature_.assign(n, 1.0 / n);
  return m;
}

std::shared_ptr<const Mesh> Mesh::sphere(int resolution) {
  if (resolution < 4) throw InputError("Mesh::sphere: resolution must be >= 4");
  auto m = std::shared_ptr<Mesh>(new Mesh());
  m->kind_ = Kind::sphere_two_chart;
  m->resolution_ = resolution;
  m->spacing_ = 2.0 / resolution;
  m->half_ = static_cast<int>(std::ceil(kChartRadius / m->spacing_)) + 2;
  m->per_axis_ = 2 * m->half_ + 1;
  const int n = m->per_axis_;
  const double h = m->spacing_;
  m->nodes_.reserve(2 * static_cast<std::size_t>(n) * n);
  m->quadrature_.reserve(m->nodes_.capacity());
  double total = 0.0;
  for (int chart = 0; chart < 2; ++chart) {
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < n; ++i) {
        const cplx u((i - m->half_) * h, (j - m->half_) * h);
        const SpherePoint p = chart == 0 ? SpherePoint(u, cplx(1.0)) : SpherePoint(cplx(1.0), u);
        m->nodes_.push_back(p);
        const double chi = chart == 0 ? chart0_weight(p) : 1.0 - chart0_weight(p);
        const double area = 1.0 / (std::numbers::pi * std::pow(1.0 + std::norm(u), 2));
        const double w = std::abs(u.real()) <= kChartRadius && std::abs(u.imag()) <= kChartRadius
                             ? chi * area * h * h
                             : 0.0;
        m->quadrature_.push_back(w);
        total += w;
      }
    }
  }
  for (auto& w : m->quadrature_) w /= total;
  return m;
}

double Mesh::chart0_weight(const SpherePoint& x) {
  // |z| = |z0| / |z1|; blend on log|z| in [-log 1.05, log 1.05].
  const double a0 = std::abs(x.z0()), a1 = std::abs(x.z1());
  if (a1 == 0.0) return 0.0;
  if (a0 == 0.0) return 1.0;
  const double lr = std::log(a0 / a1);
  const double band = std::log(kChartRadius);
  return 1.0 - smoothstep((lr + band) / (2.0 * band));
}

void Mesh::append_cubic(Stencil& s, int chart, double a, double b, double scale) const {
  const double h = spacing_;
  const double fa = a / h + half_, fb = b / h + half_;
  const int ia = std::clamp(static_cast<int>(std::floor(fa)), 1, per_axis_ - 3);
  const int ib = std::clamp(static_cast<int>(std::floor(fb)), 1, per_axis_ - 3);
  const auto wa = cubic_weights(fa - ia);
  const auto wb = cubic_weights(fb - ib);
  const std::size_t base = static_cast<std::size_t>(chart) * per_axis_ * per_axis_;
  for (int jj = 0; jj < 4; ++jj) {
    for (int ii = 0; ii < 4; ++ii) {
      s.index[s.size] = static_cast<std::uint32_t>(base + static_cast<std::size_t>(ib - 1 + jj) * per_axis_ +
                                                   (ia - 1 + ii));
      s.weight[s.size] = scale * wa[ii] * wb[jj];
      ++s.size;
    }
  }
}

Stencil Mesh::stencil(const SpherePoint& x) const {
  Stencil s;
  if (kind_ == Kind::circle) {
    const int n = static_cast<int>(nodes_.size());
    double t = x.angle() / spacing_;
    t -= n * std::floor(t / n);
    int i = static_cast<int>(std::floor(t));
    if (i >= n) i -= n;
    const auto w = cubic_weights(t - i);
    for (int k = 0; k < 4; ++k) {
      int idx = (i - 1 + k) % n;
      if (idx < 0) idx += n;
      s.index[k] = static_cast<std::uint32_t>(idx);
      s.weight[k] = w[k];
    }
    s.size = 4;
    return s;
  }
  const double chi0 = chart0_weight(x);
  if (chi0 > 0.0) {
    const cplx z = x.z0() / x.z1();
    append_cubic(s, 0, z.real(), z.imag(), chi0);
  }
  if (chi0 < 1.0) {
    const cplx w = x.z1() / x.z0();
    append_cubic(s, 1, w.real(), w.imag(), 1.0 - chi0);
  }
  return s;
}

double Mesh::interpolate(std::span<const double> values, const SpherePoint& x) const {
  if (kind_ == Kind::circle) {
    const int n = static_cast<int>(nodes_.size());
    double t = x.angle() / spacing_;
    t -= n * std::floor(t / n);
    int i = static_cast<int>(t);
    if (i >= n) i -= n;
    const auto w = cubic_weights(t - i);
    const int i0 = i == 0 ? n - 1 : i - 1;
    const int i2 = i + 1 >= n ? i + 1 - n : i + 1;
    const int i3 = i + 2 >= n ? i + 2 - n : i + 2;
    return w[0] * values[i0] + w[1] * values[i] + w[2] * values[i2] + w[3] * values[i3];
  }
  const Stencil s = stencil(x);
  double acc = 0.0;
  for (int k = 0; k < s.size; ++k) acc += s.weight[k] * values[s.index[k]];
  return acc;
}

cplx Mesh::interpolate(std::span<const cplx> values, const SpherePoint& x) const {
  const Stencil s = stencil(x);
  cplx acc = 0.0;
  for (int k = 0; k < s.size; ++k) acc += s.weight[k] * values[s.index[k]];
  return acc;
}

double Mesh::max_neighbor_gap() const {
  double gap = 0.0;
  if (kind_ == Kind::circle) {
    const std::size_t n = nodes_.size();
    for (std::size_t i = 0; i < n; ++i) gap = std::max(gap, fs_distance(nodes_[i], nodes_[(i + 1) % n]));
    return gap;
  }
  const int n = per_axis_;
  for (int chart = 0; chart < 2; ++chart) {
    const std::size_t base = static_cast<std::size_t>(chart) * n * n;
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < n; ++i) {
        const SpherePoint& p = nodes_[base + static_cast<std::size_t>(j) * n + i];
        double best = 2.0;
        const int di[4] = {1, -1, 0, 0}, dj[4] = {0, 0, 1, -1};
        for (int k = 0; k < 4; ++k) {
          const int ii = i + di[k], jj = j + dj[k];
          if (ii < 0 || jj < 0 || ii >= n || jj >= n) continue;
          best = std::min(best, fs_distance(p, nodes_[base + static_cast<std::size_t>(jj) * n + ii]));
        }
        gap = std::max(gap, best);
      }
    }
  }
  return gap;
}

}  // namespace ruelle
