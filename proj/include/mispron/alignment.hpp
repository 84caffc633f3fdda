#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <ranges>
#include <string>
#include <string_view>
#include <vector>

#include "mispron/error.hpp"

namespace mispron {

enum class EditKind : std::uint8_t { Match, Substitute, Delete, Insert };

inline std::string_view to_string(EditKind k) {
  switch (k) {
    case EditKind::Match: return "Match";
    case EditKind::Substitute: return "Substitute";
    case EditKind::Delete: return "Delete";
    case EditKind::Insert: return "Insert";
  }
  return "?";
}

struct EditOp {
  EditKind kind = EditKind::Match;
  std::optional<std::size_t> ref_index;  // absent for Insert
  std::optional<std::size_t> hyp_index;  // absent for Delete

  static EditOp match(std::size_t r, std::size_t h) { return {EditKind::Match, r, h}; }
  static EditOp substitute(std::size_t r, std::size_t h) { return {EditKind::Substitute, r, h}; }
  static EditOp del(std::size_t r) { return {EditKind::Delete, r, std::nullopt}; }
  static EditOp insert(std::size_t h) { return {EditKind::Insert, std::nullopt, h}; }

  bool is_error() const noexcept { return kind != EditKind::Match; }
  bool operator==(const EditOp&) const = default;
};

struct EditScript {
  std::vector<EditOp> ops;
  std::size_t distance = 0;

  std::size_t count(EditKind k) const {
    return static_cast<std::size_t>(std::ranges::count(ops, k, &EditOp::kind));
  }
  bool operator==(const EditScript&) const = default;
};

/// Unit-cost Levenshtein alignment with full backtrace.
///
/// `eq(ref[i], hyp[j])` decides whether two items match, so the two sides may
/// have different element types (reference tokens against timed hypothesis
/// words, for example). When several predecessors give the same cost the
/// backtrace prefers Match, then Substitute, then Delete, then Insert.
template <std::ranges::random_access_range Ref, std::ranges::random_access_range Hyp,
          class Eq = std::ranges::equal_to>
EditScript align(const Ref& ref, const Hyp& hyp, Eq eq = {}) {
  const std::size_t n = std::ranges::size(ref);
  const std::size_t m = std::ranges::size(hyp);
  const std::size_t w = m + 1;
  std::vector<std::uint32_t> cost((n + 1) * w);
  auto at = [&](std::size_t i, std::size_t j) -> std::uint32_t& { return cost[i * w + j]; };

  for (std::size_t j = 0; j <= m; ++j) at(0, j) = static_cast<std::uint32_t>(j);
  for (std::size_t i = 1; i <= n; ++i) {
    at(i, 0) = static_cast<std::uint32_t>(i);
    const auto& r = ref[i - 1];
    for (std::size_t j = 1; j <= m; ++j) {
      const std::uint32_t diag = at(i - 1, j - 1) + (std::invoke(eq, r, hyp[j - 1]) ? 0u : 1u);
      at(i, j) = std::min({diag, at(i - 1, j) + 1u, at(i, j - 1) + 1u});
    }
  }

  EditScript script;
  script.distance = at(n, m);
  script.ops.reserve(std::max(n, m));
  std::size_t i = n, j = m;
  while (i > 0 || j > 0) {
    const std::uint32_t here = at(i, j);
    if (i > 0 && j > 0) {
      const bool same = std::invoke(eq, ref[i - 1], hyp[j - 1]);
      if (same && at(i - 1, j - 1) == here) {
        script.ops.push_back(EditOp::match(i - 1, j - 1));
        --i, --j;
        continue;
      }
      if (!same && at(i - 1, j - 1) + 1 == here) {
        script.ops.push_back(EditOp::substitute(i - 1, j - 1));
        --i, --j;
        continue;
      }
    }
    if (i > 0 && at(i - 1, j) + 1 == here) {
      script.ops.push_back(EditOp::del(i - 1));
      --i;
    } else {
      script.ops.push_back(EditOp::insert(j - 1));
      --j;
    }
  }
  std::ranges::reverse(script.ops);
  return script;
}

/// Distance only, O(min) memory. Same result as align(...).distance.
template <std::ranges::random_access_range Ref, std::ranges::random_access_range Hyp,
          class Eq = std::ranges::equal_to>
std::size_t edit_distance(const Ref& ref, const Hyp& hyp, Eq eq = {}) {
  const std::size_t n = std::ranges::size(ref);
  const std::size_t m = std::ranges::size(hyp);
  std::vector<std::size_t> prev(m + 1), cur(m + 1);
  for (std::size_t j = 0; j <= m; ++j) prev[j] = j;
  for (std::size_t i = 1; i <= n; ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= m; ++j) {
      const std::size_t sub = prev[j - 1] + (std::invoke(eq, ref[i - 1], hyp[j - 1]) ? 0 : 1);
      cur[j] = std::min({sub, prev[j] + 1, cur[j - 1] + 1});
    }
    std::swap(prev, cur);
  }
  return prev[m];
}

/// Checks the structural invariants of a script produced for sequences of
/// lengths `ref_len` and `hyp_len`; throws InvariantViolation on failure.
inline void verify_script(const EditScript& script, std::size_t ref_len, std::size_t hyp_len) {
  std::size_t next_ref = 0, next_hyp = 0, errors = 0;
  for (const auto& op : script.ops) {
    const bool has_ref = op.ref_index.has_value(), has_hyp = op.hyp_index.has_value();
    const bool shape_ok = (op.kind == EditKind::Match || op.kind == EditKind::Substitute)
                              ? has_ref && has_hyp
                              : (op.kind == EditKind::Delete ? has_ref && !has_hyp : !has_ref && has_hyp);
    if (!shape_ok) throw InvariantViolation("edit op carries the wrong indices");
    if (has_ref && *op.ref_index != next_ref++) throw InvariantViolation("edit script skips a reference index");
    if (has_hyp && *op.hyp_index != next_hyp++) throw InvariantViolation("edit script skips a hypothesis index");
    errors += op.is_error();
  }
  if (next_ref != ref_len || next_hyp != hyp_len) throw InvariantViolation("edit script does not cover both sequences");
  if (errors != script.distance) throw InvariantViolation("edit script distance disagrees with its ops");
}

/// Maximal block of consecutive non-Match ops. Index ranges are half-open;
/// a side with no ops in the run has begin == end at the position where its
/// next item would sit.
struct ErrorRun {
  std::vector<EditOp> ops;
  std::size_t ref_begin = 0, ref_end = 0;
  std::size_t hyp_begin = 0, hyp_end = 0;

  bool has_ref() const noexcept { return ref_end > ref_begin; }
  bool has_hyp() const noexcept { return hyp_end > hyp_begin; }
  bool operator==(const ErrorRun&) const = default;
};

inline std::vector<ErrorRun> consecutive_error_runs(const EditScript& script) {
  std::vector<ErrorRun> runs;
  std::size_t ref_pos = 0, hyp_pos = 0;
  bool open = false;
  for (const auto& op : script.ops) {
    if (op.is_error()) {
      if (!open) {
        runs.push_back(ErrorRun{{}, ref_pos, ref_pos, hyp_pos, hyp_pos});
        open = true;
      }
      runs.back().ops.push_back(op);
    } else {
      open = false;
    }
    if (op.ref_index) ref_pos = *op.ref_index + 1;
    if (op.hyp_index) hyp_pos = *op.hyp_index + 1;
    if (open) {
      runs.back().ref_end = ref_pos;
      runs.back().hyp_end = hyp_pos;
    }
  }
  return runs;
}

}  // namespace mispron
