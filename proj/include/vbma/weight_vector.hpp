#ifndef VBMA_WEIGHT_VECTOR_HPP
#define VBMA_WEIGHT_VECTOR_HPP

#include <string>
#include <string_view>
#include <vector>

namespace vbma {

enum class WeightKind { VB, PE, IS, ORACLE };

std::string_view to_string(WeightKind kind);
WeightKind weight_kind_from_string(std::string_view s);

/// Normalized, nonnegative weights over a model collection.
/// `model_ids()[i]` is the number of mixture components of model i.
class WeightVector {
 public:
  static constexpr double kSumTolerance = 1e-10;

  WeightVector(std::vector<double> values, WeightKind kind, std::vector<int> model_ids);

  /// Unit mass on position `index`.
  static WeightVector unit(std::size_t index, WeightKind kind, std::vector<int> model_ids);

  const std::vector<double>& values() const noexcept { return values_; }
  const std::vector<int>& model_ids() const noexcept { return model_ids_; }
  WeightKind kind() const noexcept { return kind_; }
  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }

  std::size_t argmax() const;

 private:
  std::vector<double> values_;
  WeightKind kind_;
  std::vector<int> model_ids_;
};

}  // namespace vbma

#endif  // VBMA_WEIGHT_VECTOR_HPP
