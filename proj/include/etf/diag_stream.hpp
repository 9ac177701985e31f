#pragma once

#include <cmath>
#include <cstddef>
#include <deque>
#include <optional>
#include <string>
#include <vector>

#include "etf/error.hpp"
#include "etf/operator.hpp"
#include "etf/projection.hpp"

namespace etf {

/// Finite prefix of a diagonal operator diag(a_0, a_1, ...) together with the
/// promise that entries ≥ alpha keep recurring.
struct DiagSpec {
  std::vector<double> entries;
  double alpha = 2.0;

  void validate() const {
    if (entries.empty()) throw Error(ErrorKind::InvalidInput, "diagonal has no entries");
    if (!std::isfinite(alpha) || !(alpha > 1.0)) throw Error(ErrorKind::InvalidInput, "alpha must exceed 1");
    for (double a : entries) {
      if (!std::isfinite(a) || a < 0.0) throw Error(ErrorKind::InvalidInput, "diagonal entries must be non-negative");
    }
  }
};

/// Raised when small entries cannot be spaced one per k slots.
class InfeasiblePrefixError : public Error {
 public:
  explicit InfeasiblePrefixError(std::size_t max_prefix)
      : Error(ErrorKind::InfeasiblePrefix, "InfeasiblePrefix",
              "not enough large entries; maximal schedulable prefix has " + std::to_string(max_prefix) + " entries"),
        max_prefix_(max_prefix) {}

  std::size_t max_prefix() const noexcept { return max_prefix_; }

 private:
  std::size_t max_prefix_;
};

struct StreamBlock {
  std::vector<std::size_t> support;  // slot indices, carry slot first when present
  std::vector<double> values;        // B_j on the support
  double trace = 0.0;                // trace(B_j)
  long long cut = 0;                 // L_j, greatest integer strictly below the trace
  double cut_entry = 0.0;            // a′ on the last slot
  double carry = 0.0;                // a″ handed to the next block
  ProjectionDecomposition decomposition;  // of B′_j, in support coordinates
};

struct DiagStreamState {
  double alpha = 2.0;
  std::size_t k = 2;
  std::vector<std::size_t> permutation;  // slot → original index; scheduled slots first
  std::vector<double> slots;             // entries in slot order
  std::size_t scheduled = 0;             // slots placed under the spacing rule
  std::size_t cursor = 0;                // next unconsumed slot
  double carry = 0.0;
  std::optional<std::size_t> carry_slot;
  std::vector<StreamBlock> emitted;
};

/// Smallest k ≥ 2 with 1 + 2/(k−1) ≤ alpha.
inline std::size_t block_parameter(double alpha) {
  if (!(alpha > 1.0)) throw Error(ErrorKind::InvalidInput, "alpha must exceed 1");
  const double bound = 2.0 / (alpha - 1.0) + 1.0;
  if (bound > 1e9) throw Error(ErrorKind::InvalidInput, "alpha is too close to 1");
  auto k = static_cast<std::size_t>(std::max(2.0, std::ceil(bound)));
  while (k > 2 && 1.0 + 2.0 / static_cast<double>(k - 2) <= alpha) --k;
  while (1.0 + 2.0 / static_cast<double>(k - 1) > alpha) ++k;
  return k;
}

/// Schedule the entries so that those below alpha sit only at slots ≡ 0 mod k,
/// keeping relative order inside the small and large groups. Entries that
/// cannot be placed are parked after the schedulable prefix.
inline DiagStreamState plan(const DiagSpec& spec, std::optional<std::size_t> k_override = std::nullopt) {
  spec.validate();
  DiagStreamState st;
  st.alpha = spec.alpha;
  if (k_override) {
    const std::size_t k = *k_override;
    if (k < 2 || 1.0 + 2.0 / static_cast<double>(k - 1) > spec.alpha) {
      throw Error(ErrorKind::InvalidInput, "block parameter must satisfy 1 + 2/(k-1) <= alpha");
    }
    st.k = k;
  } else {
    st.k = block_parameter(spec.alpha);
  }

  std::deque<std::size_t> small;
  std::deque<std::size_t> large;
  for (std::size_t i = 0; i < spec.entries.size(); ++i) {
    (spec.entries[i] < spec.alpha ? small : large).push_back(i);
  }
  for (std::size_t p = 0; !small.empty() || !large.empty(); ++p) {
    std::deque<std::size_t>* pick = nullptr;
    if (p % st.k == 0 && !small.empty()) {
      pick = &small;
    } else if (!large.empty()) {
      pick = &large;
    } else {
      break;
    }
    st.permutation.push_back(pick->front());
    pick->pop_front();
  }
  st.scheduled = st.permutation.size();
  for (std::size_t i : small) st.permutation.push_back(i);
  if (!small.empty() && st.scheduled < st.k) throw InfeasiblePrefixError(st.scheduled);

  st.slots.reserve(st.permutation.size());
  for (std::size_t i : st.permutation) st.slots.push_back(spec.entries[i]);
  return st;
}

struct BlockStep {
  StreamBlock block;
  DiagStreamState state;
};

/// Emit the next block: the carry slot (if any) plus the next k slots, cut to
/// the greatest integer strictly below its trace, decomposed into that many
/// rank-one projections.
inline BlockStep next_block(const DiagStreamState& st, const ToleranceConfig& cfg = {}) {
  if (st.cursor + st.k > st.scheduled) {
    bool small_left = st.scheduled < st.slots.size();
    for (std::size_t p = st.cursor; p < st.scheduled; ++p) small_left = small_left || st.slots[p] < st.alpha;
    if (small_left) throw InfeasiblePrefixError(st.scheduled);
    throw Error(ErrorKind::EndOfStream,
                "need " + std::to_string(st.k) + " unconsumed entries, have " +
                    std::to_string(st.scheduled - st.cursor) + "; carry " + std::to_string(st.carry));
  }

  StreamBlock block;
  if (st.carry_slot) {
    block.support.push_back(*st.carry_slot);
    block.values.push_back(st.carry);
  }
  for (std::size_t p = st.cursor; p < st.cursor + st.k; ++p) {
    block.support.push_back(p);
    block.values.push_back(st.slots[p]);
  }
  for (double v : block.values) block.trace += v;
  block.cut = static_cast<long long>(std::ceil(block.trace)) - 1;
  block.carry = block.trace - static_cast<double>(block.cut);
  block.cut_entry = block.values.back() - block.carry;
  if (block.cut < 1 || block.cut_entry < 0.0) {
    throw Error(ErrorKind::EndOfStream, "block trace " + std::to_string(block.trace) + " cannot be cut");
  }

  Vector cut_values = Eigen::Map<const Vector>(block.values.data(), static_cast<Eigen::Index>(block.values.size()));
  cut_values[cut_values.size() - 1] = block.cut_entry;
  const SymmetricOperator cut_block = SymmetricOperator::diagonal(cut_values);
  if (static_cast<long long>(rank_eps(cut_block, cfg)) > block.cut) {
    throw Error(ErrorKind::EndOfStream, "block rank exceeds its integer trace");
  }
  block.decomposition = decompose_rank_one(cut_block, static_cast<std::size_t>(block.cut), cfg);

  DiagStreamState next = st;
  next.cursor += st.k;
  next.carry = block.carry;
  next.carry_slot = block.support.back();
  next.emitted.push_back(block);
  return {std::move(block), std::move(next)};
}

/// What is left after a run: the carry on its slot plus the unconsumed tail.
struct StreamResidual {
  double carry = 0.0;
  std::optional<std::size_t> carry_slot;
  std::vector<std::size_t> tail_slots;
  DiagSpec remainder;  // carry (if any) followed by the tail entries
};

struct StreamResult {
  /// Factors embedded in slot coordinates over all entries; the target is
  /// diag(consumed slots) minus the carry on the carry slot.
  ProjectionDecomposition decomposition;
  StreamResidual residual;
  DiagStreamState state;
};

inline StreamResult run_prefix(const DiagSpec& spec, std::size_t blocks, const ToleranceConfig& cfg = {},
                               std::optional<std::size_t> k_override = std::nullopt) {
  spec.validate();
  const auto total = static_cast<Eigen::Index>(spec.entries.size());
  if (blocks == 0) {
    DiagStreamState idle;
    idle.alpha = spec.alpha;
    return {ProjectionDecomposition{spec.entries.size(), {}, SymmetricOperator::zero(spec.entries.size())},
            StreamResidual{0.0, std::nullopt, {}, spec}, idle};
  }

  DiagStreamState st = plan(spec, k_override);
  for (std::size_t b = 0; b < blocks; ++b) st = next_block(st, cfg).state;

  Vector target = Vector::Zero(total);
  for (std::size_t p = 0; p < st.cursor; ++p) target[static_cast<Eigen::Index>(p)] = st.slots[p];
  target[static_cast<Eigen::Index>(*st.carry_slot)] -= st.carry;

  ProjectionDecomposition dec{spec.entries.size(), {}, SymmetricOperator::diagonal(target)};
  for (const StreamBlock& blk : st.emitted) {
    for (const Vector& x : blk.decomposition.factors) {
      Vector global = Vector::Zero(total);
      for (std::size_t s = 0; s < blk.support.size(); ++s) {
        global[static_cast<Eigen::Index>(blk.support[s])] = x[static_cast<Eigen::Index>(s)];
      }
      dec.factors.push_back(std::move(global));
    }
  }

  StreamResidual res;
  res.carry = st.carry;
  res.carry_slot = st.carry_slot;
  res.remainder.alpha = spec.alpha;
  res.remainder.entries.push_back(st.carry);
  for (std::size_t p = st.cursor; p < st.slots.size(); ++p) {
    res.tail_slots.push_back(p);
    res.remainder.entries.push_back(st.slots[p]);
  }
  return {std::move(dec), std::move(res), std::move(st)};
}

}  // namespace etf
