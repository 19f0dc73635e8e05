#include "finadv/autodiff.hpp"

namespace finadv::ad {

Real Tape::variable(double v) {
  nodes_.push_back({-1, -1, 0.0, 0.0});
  return Real(v, static_cast<std::int32_t>(nodes_.size() - 1), this);
}

Real Tape::record(double v, const Real& a, double da, const Real& b, double db) {
  nodes_.push_back({a.slot_, b.slot_, da, db});
  return Real(v, static_cast<std::int32_t>(nodes_.size() - 1), this);
}

Real Tape::record(double v, const Real& a, double da) {
  nodes_.push_back({a.slot_, -1, da, 0.0});
  return Real(v, static_cast<std::int32_t>(nodes_.size() - 1), this);
}

std::vector<double> Tape::adjoints(const Real& output) const {
  std::vector<double> adj(nodes_.size(), 0.0);
  if (output.slot_ < 0) return adj;
  adj[output.slot_] = 1.0;
  for (std::int32_t i = output.slot_; i >= 0; --i) {
    const double a = adj[i];
    if (a == 0.0) continue;
    const Node& n = nodes_[i];
    if (n.lhs >= 0) adj[n.lhs] += a * n.dlhs;
    if (n.rhs >= 0) adj[n.rhs] += a * n.drhs;
  }
  return adj;
}

Real operator+(const Real& a, const Real& b) {
  Tape* t = a.tape_ ? a.tape_ : b.tape_;
  const double v = a.value_ + b.value_;
  return t ? t->record(v, a, 1.0, b, 1.0) : Tape::constant(v);
}

Real operator-(const Real& a, const Real& b) {
  Tape* t = a.tape_ ? a.tape_ : b.tape_;
  const double v = a.value_ - b.value_;
  return t ? t->record(v, a, 1.0, b, -1.0) : Tape::constant(v);
}

Real operator*(const Real& a, const Real& b) {
  Tape* t = a.tape_ ? a.tape_ : b.tape_;
  const double v = a.value_ * b.value_;
  return t ? t->record(v, a, b.value_, b, a.value_) : Tape::constant(v);
}

Real operator/(const Real& a, const Real& b) {
  Tape* t = a.tape_ ? a.tape_ : b.tape_;
  const double v = a.value_ / b.value_;
  return t ? t->record(v, a, 1.0 / b.value_, b, -v / b.value_) : Tape::constant(v);
}

Real operator-(const Real& a) {
  return a.tape_ ? a.tape_->record(-a.value_, a, -1.0) : Tape::constant(-a.value_);
}

Real operator+(const Real& a, double b) {
  return a.tape_ ? a.tape_->record(a.value_ + b, a, 1.0) : Tape::constant(a.value_ + b);
}
Real operator+(double a, const Real& b) { return b + a; }

Real operator-(const Real& a, double b) {
  return a.tape_ ? a.tape_->record(a.value_ - b, a, 1.0) : Tape::constant(a.value_ - b);
}
Real operator-(double a, const Real& b) {
  return b.tape_ ? b.tape_->record(a - b.value_, b, -1.0) : Tape::constant(a - b.value_);
}

Real operator*(const Real& a, double b) {
  return a.tape_ ? a.tape_->record(a.value_ * b, a, b) : Tape::constant(a.value_ * b);
}
Real operator*(double a, const Real& b) { return b * a; }

Real operator/(const Real& a, double b) {
  return a.tape_ ? a.tape_->record(a.value_ / b, a, 1.0 / b) : Tape::constant(a.value_ / b);
}
Real operator/(double a, const Real& b) {
  const double v = a / b.value_;
  return b.tape_ ? b.tape_->record(v, b, -v / b.value_) : Tape::constant(v);
}

}  // namespace finadv::ad
