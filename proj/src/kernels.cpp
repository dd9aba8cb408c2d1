#include "nlmem/kernels.hpp"

#include "nlmem/error.hpp"
#include "nlmem/log.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>
#include <utility>

namespace nlmem {

namespace {

constexpr double infinity = std::numeric_limits<double>::infinity();

auto poly_antiderivative_in_y(const PolyShape& shape, double delta, double y) -> double {
  // Integrand in y = delta - x:  (1 + tilt) y^p - (tilt / delta) y^(p+1)
  const double p = shape.power;
  return (1.0 + shape.tilt) * std::pow(y, p + 1.0) / (p + 1.0) -
         (shape.tilt / delta) * std::pow(y, p + 2.0) / (p + 2.0);
}

template <class Axis>
auto make_poly(double delta, int power) -> Kernel<Axis> {
  if (!(delta > 0.0) || !std::isfinite(delta)) {
    throw Error(ErrorKind::invalid_parameter, "polynomial kernel needs a finite support radius > 0");
  }
  if (power < 0) {
    throw Error(ErrorKind::invalid_parameter, "polynomial kernel power must be >= 0");
  }
  PolyShape shape;
  shape.power = power;
  shape.scale = (power + 1.0) / std::pow(delta, power + 1.0);
  return Kernel<Axis>(
      delta,
      [shape, delta](double x) {
        return shape.renorm * shape.scale * std::pow(delta - x, shape.power) * (1.0 + shape.tilt * x / delta);
      },
      [shape, delta](double a, double b) {
        return shape.renorm * shape.scale *
               (poly_antiderivative_in_y(shape, delta, delta - a) - poly_antiderivative_in_y(shape, delta, delta - b));
      },
      shape);
}

template <class Axis>
auto tilt(const Kernel<Axis>& base, double eps) -> Kernel<Axis> {
  const auto& poly = base.poly();
  if (!poly || poly->tilt != 0.0) {
    throw Error(ErrorKind::invalid_parameter, "kernel perturbation needs an untilted polynomial kernel");
  }
  if (!(eps >= 0.0 && eps <= 1.0)) {
    throw Error(ErrorKind::invalid_parameter, "kernel perturbation size must lie in [0, 1]");
  }
  const double delta = base.support();
  PolyShape shape = *poly;
  shape.tilt = eps;
  // first moment of the normalized base is 1 / (power + 2)
  shape.renorm = 1.0 / (1.0 + eps / (shape.power + 2.0));
  return Kernel<Axis>(
      delta,
      [shape, delta](double x) {
        return shape.renorm * shape.scale * std::pow(delta - x, shape.power) * (1.0 + shape.tilt * x / delta);
      },
      [shape, delta](double a, double b) {
        return shape.renorm * shape.scale *
               (poly_antiderivative_in_y(shape, delta, delta - a) - poly_antiderivative_in_y(shape, delta, delta - b));
      },
      shape);
}

template <class Axis>
auto make_table(double spacing, std::vector<double> weights) -> Kernel<Axis> {
  if (!(spacing > 0.0) || weights.empty()) {
    throw Error(ErrorKind::invalid_parameter, "table kernel needs spacing > 0 and at least one weight");
  }
  for (double w : weights) {
    if (!std::isfinite(w)) {
      throw Error(ErrorKind::invalid_parameter, "table kernel weights must be finite");
    }
  }
  const double support = spacing * static_cast<double>(weights.size());
  auto table = std::make_shared<const std::vector<double>>(std::move(weights));
  auto density = [table, spacing](double x) {
    const auto q = static_cast<std::size_t>(std::floor(x / spacing));
    return q < table->size() ? (*table)[q] : 0.0;
  };
  auto integral = [table, spacing](double a, double b) {
    double sum = 0.0;
    const auto first = static_cast<std::size_t>(std::floor(a / spacing));
    for (std::size_t q = first; q < table->size(); ++q) {
      const double lo = std::max(a, spacing * static_cast<double>(q));
      const double hi = std::min(b, spacing * static_cast<double>(q + 1));
      if (hi <= lo) {
        if (spacing * static_cast<double>(q) >= b) break;
        continue;
      }
      sum += (*table)[q] * (hi - lo);
    }
    return sum;
  };
  return Kernel<Axis>(support, density, integral);
}

template <class Axis>
auto make_generic(double support, std::function<double(double)> density) -> Kernel<Axis> {
  if (!(support > 0.0)) {
    throw Error(ErrorKind::invalid_parameter, "kernel support radius must be > 0");
  }
  if (!density) {
    throw Error(ErrorKind::invalid_parameter, "kernel density is empty");
  }
  return Kernel<Axis>(support, std::move(density));
}

}  // namespace

auto gauss_legendre5(const std::function<double(double)>& fn, double a, double b) -> double {
  static constexpr double nodes[5] = {-0.9061798459386640, -0.5384693101056831, 0.0, 0.5384693101056831,
                                      0.9061798459386640};
  static constexpr double weights[5] = {0.2369268850561891, 0.4786286704993665, 0.5688888888888889,
                                        0.4786286704993665, 0.2369268850561891};
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  double sum = 0.0;
  for (int i = 0; i < 5; ++i) {
    sum += weights[i] * fn(mid + half * nodes[i]);
  }
  return half * sum;
}

template <class Axis>
Kernel<Axis>::Kernel(double support, Density density, Integral integral, std::optional<PolyShape> poly)
    : support_(support), density_(std::move(density)), integral_(std::move(integral)), poly_(poly) {
  if (!(support_ > 0.0)) {
    throw Error(ErrorKind::invalid_parameter, "kernel support radius must be > 0");
  }
}

template <class Axis>
auto Kernel<Axis>::finite_support() const noexcept -> bool {
  return std::isfinite(support_);
}

template <class Axis>
auto Kernel<Axis>::evaluate(double x) const -> double {
  if (!(x > 0.0) || !(x < support_)) return 0.0;
  return density_(x);
}

template <class Axis>
auto Kernel<Axis>::integrate(double a, double b) const -> double {
  a = std::max(a, 0.0);
  b = std::min(b, support_);
  if (!(b > a)) return 0.0;
  if (integral_) return integral_(a, b);
  if (!std::isfinite(b)) {
    throw Error(ErrorKind::invalid_parameter, "cannot integrate an infinite-support kernel without a closed form");
  }
  return gauss_legendre5([this](double x) { return evaluate(x); }, a, b);
}

template <class Axis>
auto Kernel<Axis>::mass() const -> double {
  if (integral_) return integral_(0.0, support_);
  if (!finite_support()) {
    throw Error(ErrorKind::invalid_parameter, "mass of an infinite-support kernel needs a closed form");
  }
  constexpr int panels = 1000;
  const double h = support_ / panels;
  double sum = 0.0;
  for (int i = 0; i < panels; ++i) {
    sum += gauss_legendre5([this](double x) { return evaluate(x); }, i * h, (i + 1) * h);
  }
  return sum;
}

template <class Axis>
auto Kernel<Axis>::first_moment() const -> double {
  if (!finite_support()) {
    throw Error(ErrorKind::invalid_parameter, "first moment needs a finite support");
  }
  if (poly_ && poly_->tilt == 0.0) {
    return poly_->renorm / (poly_->power + 2.0);
  }
  constexpr int panels = 1000;
  const double h = support_ / panels;
  double sum = 0.0;
  auto weighted = [this](double x) { return evaluate(x) * x / support_; };
  for (int i = 0; i < panels; ++i) {
    sum += gauss_legendre5(weighted, i * h, (i + 1) * h);
  }
  return sum;
}

auto DiscreteKernel::mass() const -> double {
  double sum = 0.0;
  for (double w : weights) sum += w;
  return spacing * sum;
}

auto covering_cells(double support, double spacing) -> std::size_t {
  if (!(spacing > 0.0)) {
    throw Error(ErrorKind::invalid_parameter, "discretization spacing must be > 0");
  }
  const double ratio = support / spacing;
  // tolerate round-off when the support is an exact multiple of the spacing
  const auto cells = static_cast<std::size_t>(std::ceil(ratio * (1.0 - 1e-12)));
  return std::max<std::size_t>(cells, 1);
}

template <class Axis>
auto discretize(const Kernel<Axis>& kernel, double spacing, std::size_t max_cells) -> DiscreteKernel {
  if (!(spacing > 0.0) || !std::isfinite(spacing)) {
    throw Error(ErrorKind::invalid_parameter, "discretization spacing must be finite and > 0");
  }
  std::size_t cells = 0;
  if (kernel.finite_support()) {
    cells = covering_cells(kernel.support(), spacing);
    if (max_cells != 0) cells = std::min(cells, max_cells);
    if (cells < 4 && max_cells == 0) {
      std::ostringstream msg;
      msg << "kernel support " << kernel.support() << " is covered by only " << cells << " cell(s) of width "
          << spacing;
      warn(msg.str());
    }
  } else {
    if (max_cells == 0) {
      throw Error(ErrorKind::invalid_parameter, "infinite-support kernel needs an explicit window length");
    }
    cells = max_cells;
  }
  DiscreteKernel out;
  out.spacing = spacing;
  out.weights.resize(cells);
  for (std::size_t q = 0; q < cells; ++q) {
    const double lo = spacing * static_cast<double>(q);
    const double hi = spacing * static_cast<double>(q + 1);
    out.weights[q] = kernel.integrate(lo, hi) / spacing;
  }
  return out;
}

template class Kernel<SpaceAxis>;
template class Kernel<TimeAxis>;
template auto discretize(const Kernel<SpaceAxis>&, double, std::size_t) -> DiscreteKernel;
template auto discretize(const Kernel<TimeAxis>&, double, std::size_t) -> DiscreteKernel;

auto make_poly_space_kernel(double delta, int power) -> SpaceKernel { return make_poly<SpaceAxis>(delta, power); }
auto make_poly_time_kernel(double delta, int power) -> TimeKernel { return make_poly<TimeAxis>(delta, power); }

auto perturb_space_kernel(const SpaceKernel& base, double eps) -> SpaceKernel { return tilt(base, eps); }
auto perturb_time_kernel(const TimeKernel& base, double eps) -> TimeKernel { return tilt(base, eps); }

auto make_table_space_kernel(double spacing, std::vector<double> weights) -> SpaceKernel {
  return make_table<SpaceAxis>(spacing, std::move(weights));
}
auto make_table_time_kernel(double spacing, std::vector<double> weights) -> TimeKernel {
  return make_table<TimeAxis>(spacing, std::move(weights));
}

auto make_exponential_time_kernel(double rate) -> TimeKernel {
  if (!(rate > 0.0) || !std::isfinite(rate)) {
    throw Error(ErrorKind::invalid_parameter, "exponential kernel rate must be finite and > 0");
  }
  return TimeKernel(
      infinity, [rate](double t) { return rate * std::exp(-rate * t); },
      [rate](double a, double b) { return std::exp(-rate * a) - (std::isfinite(b) ? std::exp(-rate * b) : 0.0); });
}

auto make_space_kernel(double support, std::function<double(double)> density) -> SpaceKernel {
  return make_generic<SpaceAxis>(support, std::move(density));
}
auto make_time_kernel(double support, std::function<double(double)> density) -> TimeKernel {
  return make_generic<TimeAxis>(support, std::move(density));
}

}  // namespace nlmem
