#pragma once

namespace rloco {

enum class ConformityKind { RSquared, Accuracy };

// V(f(X), Y). RSquared: 1 - (Y - f(X))^2 / sigma2, the population R^2 score.
// Accuracy: 1 if prediction equals the label, else 0.
struct ConformityScore {
  ConformityKind kind = ConformityKind::RSquared;
  double sigma2 = 1.0;  // population target variance; required for RSquared
};

double conformity(const ConformityScore& score, double prediction, double y);

}  // namespace rloco
