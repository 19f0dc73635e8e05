#pragma once

#include <cstdint>
#include <vector>

namespace finadv::ad {

class Tape;

/// Scalar recorded on a reverse-mode tape. Only the four arithmetic
/// operations are supported, which is all the accounting ratios need.
class Real {
 public:
  Real() = default;
  double value() const noexcept { return value_; }
  std::int32_t slot() const noexcept { return slot_; }

 private:
  friend class Tape;
  Real(double v, std::int32_t slot, Tape* tape) : value_(v), slot_(slot), tape_(tape) {}

  double value_ = 0.0;
  std::int32_t slot_ = -1;  // -1 marks a constant
  Tape* tape_ = nullptr;

  friend Real operator+(const Real& a, const Real& b);
  friend Real operator-(const Real& a, const Real& b);
  friend Real operator*(const Real& a, const Real& b);
  friend Real operator/(const Real& a, const Real& b);
  friend Real operator-(const Real& a);
  friend Real operator+(const Real& a, double b);
  friend Real operator+(double a, const Real& b);
  friend Real operator-(const Real& a, double b);
  friend Real operator-(double a, const Real& b);
  friend Real operator*(const Real& a, double b);
  friend Real operator*(double a, const Real& b);
  friend Real operator/(const Real& a, double b);
  friend Real operator/(double a, const Real& b);
};

/// Wengert list of binary nodes; each node keeps the local partials with
/// respect to at most two earlier slots.
class Tape {
 public:
  /// Drops recorded nodes but keeps the allocation.
  void clear() noexcept { nodes_.clear(); }
  std::size_t size() const noexcept { return nodes_.size(); }

  Real variable(double v);
  static Real constant(double v) { return Real(v, -1, nullptr); }

  /// Adjoint of every slot with respect to `output`.
  std::vector<double> adjoints(const Real& output) const;

  Real record(double v, const Real& a, double da, const Real& b, double db);
  Real record(double v, const Real& a, double da);

 private:
  struct Node {
    std::int32_t lhs;
    std::int32_t rhs;
    double dlhs;
    double drhs;
  };
  std::vector<Node> nodes_;
};

inline double value_of(double x) noexcept { return x; }
inline double value_of(const Real& x) noexcept { return x.value(); }

}  // namespace finadv::ad
