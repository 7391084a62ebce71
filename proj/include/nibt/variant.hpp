#pragma once

#include <limits>
#include <string>

namespace nibt {

enum class Variant { BT, FLBT, TLBT, SWBT, LQG, HINF, PRBT, BRBT, BST };

inline constexpr Variant kAllVariants[] = {
    Variant::BT,   Variant::FLBT, Variant::TLBT, Variant::SWBT, Variant::LQG,
    Variant::HINF, Variant::PRBT, Variant::BRBT, Variant::BST};

struct VariantConfig {
  Variant tag = Variant::BT;
  double eps = 1e-4;
  // FLBT band [omega1, omega2] (and its mirror image).
  double omega1 = 0.0;
  double omega2 = std::numeric_limits<double>::infinity();
  // TLBT window [t1, t2].
  double t1 = 0.0;
  double t2 = std::numeric_limits<double>::infinity();
  // Hinf-BT.
  double gamma = 0.5;

  double theta() const { return tag == Variant::LQG ? 1.0 : 1.0 - gamma * gamma; }

  // Throws ValidationError when the parameters are inconsistent.
  void check() const;
};

std::string variant_name(Variant v);
// Accepts the CLI spellings bt|flbt|tlbt|swbt|lqg|hinf|prbt|brbt|bst.
Variant parse_variant(const std::string& name);

}  // namespace nibt
