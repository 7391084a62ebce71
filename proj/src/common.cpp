#include "nibt/common.hpp"

#include <cmath>

#include "nibt/variant.hpp"

namespace nibt {

std::vector<double> logspace(double lo_exp, double hi_exp, int count) {
  std::vector<double> out(count);
  if (count == 1) {
    out[0] = std::pow(10.0, lo_exp);
    return out;
  }
  for (int k = 0; k < count; ++k) {
    double e = lo_exp + (hi_exp - lo_exp) * k / (count - 1);
    out[k] = std::pow(10.0, e);
  }
  return out;
}

void VariantConfig::check() const {
  if (!(eps > 0.0) || !std::isfinite(eps))
    throw ValidationError("eps must be a positive finite number");
  switch (tag) {
    case Variant::FLBT:
      if (!(omega1 >= 0.0 && omega1 < omega2))
        throw ValidationError("FLBT band needs 0 <= w1 < w2");
      break;
    case Variant::TLBT:
      if (!(t1 >= 0.0 && t1 < t2))
        throw ValidationError("TLBT window needs 0 <= t1 < t2");
      break;
    case Variant::HINF:
      if (!(gamma >= 0.0) || !std::isfinite(gamma))
        throw ValidationError("Hinf-BT gamma must be finite and nonnegative");
      break;
    default:
      break;
  }
}

std::string variant_name(Variant v) {
  switch (v) {
    case Variant::BT: return "bt";
    case Variant::FLBT: return "flbt";
    case Variant::TLBT: return "tlbt";
    case Variant::SWBT: return "swbt";
    case Variant::LQG: return "lqg";
    case Variant::HINF: return "hinf";
    case Variant::PRBT: return "prbt";
    case Variant::BRBT: return "brbt";
    case Variant::BST: return "bst";
  }
  return "?";
}

Variant parse_variant(const std::string& name) {
  for (Variant v : kAllVariants)
    if (variant_name(v) == name) return v;
  throw ValidationError("unknown variant '" + name + "'");
}

}  // namespace nibt
