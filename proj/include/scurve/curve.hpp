#pragma once

#include <vector>

#include "scurve/algebra.hpp"
#include "scurve/polynomial.hpp"

namespace scurve {

/// A root of y^2: either a simple endpoint or a zero of h (double root of y^2).
struct Root {
  cplx z;
  int multiplicity = 1;
  bool endpoint = true;
};

/// y(z) = h(z) w(z), with w the chord branch of the radical.
class SpectralCurve {
 public:
  SpectralCurve() = default;
  SpectralCurve(BranchedRadical rad, Polynomial h) : rad_(std::move(rad)), h_(std::move(h)) {}

  /// h = (W'/w)_+ for the given endpoints.
  static SpectralCurve from_potential(const Polynomial& W, std::vector<cplx> endpoints) {
    BranchedRadical rad(std::move(endpoints));
    Polynomial h = oplus_part(W.derivative(), rad);
    return SpectralCurve(std::move(rad), std::move(h));
  }

  const BranchedRadical& radical() const { return rad_; }
  const Polynomial& h() const { return h_; }
  int cuts() const { return rad_.genus_plus_one(); }

  cplx y(cplx z) const { return h_(z) * eval_w(rad_, z); }
  cplx y2(cplx z) const { return h_(z) * h_(z) * rad_.square(z); }
  Polynomial y2_poly() const { return h_ * h_ * rad_.square_poly(); }

  /// Boundary value of y on chord j, left side of a_j^- -> a_j^+.
  cplx y_plus_on_chord(int j, double s, double one_minus_s) const {
    const cplx z = rad_.lo(j) + s * (rad_.hi(j) - rad_.lo(j));
    return h_(z) * w_plus_on_chord(rad_, j, s, one_minus_s);
  }

  /// y'/y, used for step control near roots.
  cplx log_derivative(cplx z) const {
    cplx acc{};
    if (h_.degree() > 0) acc += h_.derivative()(z) / h_(z);
    for (cplx a : rad_.endpoints()) acc += 0.5 / (z - a);
    return acc;
  }

  /// All roots of y^2 with multiplicities; zeros of h that coincide within
  /// `merge_tol` are merged.
  std::vector<Root> roots(double merge_tol = 1e-7) const {
    std::vector<Root> out;
    for (cplx a : rad_.endpoints()) out.push_back({a, 1, true});
    for (cplx r : scurve::roots(h_)) {
      bool merged = false;
      for (auto& o : out) {
        if (!o.endpoint && std::abs(o.z - r) < merge_tol) {
          o.multiplicity += 2;
          merged = true;
          break;
        }
      }
      if (!merged) out.push_back({r, 2, false});
    }
    return out;
  }

 private:
  BranchedRadical rad_;
  Polynomial h_;
};

/// W(z) = z^3/3 - t z.
inline Polynomial cubic_potential(cplx t) { return Polynomial({0.0, -t, 0.0, 1.0 / 3.0}); }

/// W(z) = z^2/2.
inline Polynomial gaussian_potential() { return Polynomial({0.0, 0.0, 0.5}); }

}  // namespace scurve
