#include <stdexcept>
#include <string>

#include "sgns/galerkin.hpp"

namespace sgns {

StochasticSolution::StochasticSolution(const BlockLayout& l, Vector v) : layout(l), coeffs(std::move(v)) {
  if (coeffs.size() != l.ngdof())
    throw std::invalid_argument("StochasticSolution: vector length " + std::to_string(coeffs.size()) +
                                " != M (n_u + n_p) = " + std::to_string(l.ngdof()));
}

namespace {
void check_mode(const BlockLayout& l, int k) {
  if (k < 0 || k >= l.M) throw std::out_of_range("stochastic index " + std::to_string(k) + " outside [0, " + std::to_string(l.M) + ")");
}
}  // namespace

ModePair mode_extract(const StochasticSolution& v, int k) {
  check_mode(v.layout, k);
  const auto o = v.layout.offset(k);
  return {v.coeffs.segment(o, v.layout.n_u), v.coeffs.segment(o + v.layout.n_u, v.layout.n_p)};
}

void mode_inject(StochasticSolution& v, int k, const ModePair& mode) {
  check_mode(v.layout, k);
  if (mode.u.size() != v.layout.n_u || mode.p.size() != v.layout.n_p)
    throw std::invalid_argument("mode_inject: block sizes do not match the layout");
  const auto o = v.layout.offset(k);
  v.coeffs.segment(o, v.layout.n_u) = mode.u;
  v.coeffs.segment(o + v.layout.n_u, v.layout.n_p) = mode.p;
}

Vector to_field_major(const StochasticSolution& v) {
  const auto& l = v.layout;
  Vector out(l.ngdof());
  const Eigen::Index pu = static_cast<Eigen::Index>(l.M) * l.n_u;
  for (int k = 0; k < l.M; ++k) {
    out.segment(static_cast<Eigen::Index>(k) * l.n_u, l.n_u) = v.coeffs.segment(l.offset(k), l.n_u);
    out.segment(pu + static_cast<Eigen::Index>(k) * l.n_p, l.n_p) = v.coeffs.segment(l.offset(k) + l.n_u, l.n_p);
  }
  return out;
}

StochasticSolution from_field_major(const BlockLayout& l, const Vector& x) {
  if (x.size() != l.ngdof()) throw std::invalid_argument("from_field_major: size mismatch");
  StochasticSolution v(l);
  const Eigen::Index pu = static_cast<Eigen::Index>(l.M) * l.n_u;
  for (int k = 0; k < l.M; ++k) {
    v.coeffs.segment(l.offset(k), l.n_u) = x.segment(static_cast<Eigen::Index>(k) * l.n_u, l.n_u);
    v.coeffs.segment(l.offset(k) + l.n_u, l.n_p) = x.segment(pu + static_cast<Eigen::Index>(k) * l.n_p, l.n_p);
  }
  return v;
}

}  // namespace sgns
