#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "errors.hpp"

namespace metasolve {

// Deterministic model-based cost accounting. Every computational kernel
// charges a fixed, documented number of multiply-accumulate operations
// (MACs) and reports allocation/release of real (double) scalars. The
// ledger is the single source of truth for the MAC and memory criteria, so
// identical runs produce identical ledgers regardless of wall time.
//
// Charge conventions (kernels reference these in their contracts):
//   spmv          nnz(A)
//   gemv          rows * cols
//   dot           n
//   axpy          n
//   norm2         n
//   scal          n
//   lu_solve      n^2 (two triangular sweeps + diagonal divisions)
//   lu_factor     counted per executed multiply/divide in the elimination
// Additions/subtractions without a paired multiply are not charged.
class OpLedger {
 public:
  void charge_macs(std::uint64_t n) { macs_ += n; }

  void on_alloc(std::uint64_t reals) {
    current_reals_ += reals;
    if (current_reals_ > peak_reals_) peak_reals_ = current_reals_;
  }

  void on_free(std::uint64_t reals) {
    // Frees must pair with allocs; a mismatch indicates a bookkeeping bug.
    if (reals > current_reals_)
      throw MeasurementError("ledger: free exceeds live allocation");
    current_reals_ -= reals;
  }

  std::uint64_t macs() const { return macs_; }
  std::uint64_t current_reals() const { return current_reals_; }
  std::uint64_t peak_reals() const { return peak_reals_; }

  void reset() {
    macs_ = 0;
    current_reals_ = 0;
    peak_reals_ = 0;
  }

 private:
  std::uint64_t macs_ = 0;
  std::uint64_t current_reals_ = 0;
  std::uint64_t peak_reals_ = 0;
};

// Workspace vector whose storage is reported to an OpLedger for the whole
// of its lifetime. Solver-owned buffers use this type so the peak live-real
// count reflects actual workspace shape. Move-only.
class TrackedVector {
 public:
  TrackedVector() : ledger_(nullptr) {}

  TrackedVector(std::size_t n, OpLedger& ledger, double fill = 0.0)
      : v_(n, fill), ledger_(&ledger) {
    ledger_->on_alloc(v_.size());
  }

  TrackedVector(std::vector<double> v, OpLedger& ledger)
      : v_(std::move(v)), ledger_(&ledger) {
    ledger_->on_alloc(v_.size());
  }

  TrackedVector(const TrackedVector&) = delete;
  TrackedVector& operator=(const TrackedVector&) = delete;

  TrackedVector(TrackedVector&& other) noexcept
      : v_(std::move(other.v_)), ledger_(other.ledger_) {
    other.ledger_ = nullptr;
    other.v_.clear();
  }

  TrackedVector& operator=(TrackedVector&& other) noexcept {
    if (this != &other) {
      release();
      v_ = std::move(other.v_);
      ledger_ = other.ledger_;
      other.ledger_ = nullptr;
      other.v_.clear();
    }
    return *this;
  }

  ~TrackedVector() { release(); }

  // Moves the buffer out and settles the ledger (the storage stops being
  // solver-owned workspace at that point).
  std::vector<double> take() {
    release();
    return std::move(v_);
  }

  std::vector<double>& get() { return v_; }
  const std::vector<double>& get() const { return v_; }
  double* data() { return v_.data(); }
  const double* data() const { return v_.data(); }
  std::size_t size() const { return v_.size(); }
  double& operator[](std::size_t i) { return v_[i]; }
  double operator[](std::size_t i) const { return v_[i]; }

 private:
  void release() {
    if (ledger_) {
      ledger_->on_free(v_.size());
      ledger_ = nullptr;
    }
  }

  std::vector<double> v_;
  OpLedger* ledger_;
};

}  // namespace metasolve
