// Copyright 2026 The ATL Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>

namespace atl {

// Axis-aligned box in normalized image coordinates.
struct Box {
  double x1 = 0.0;
  double y1 = 0.0;
  double x2 = 0.0;
  double y2 = 0.0;

  double width() const { return x2 - x1; }
  double height() const { return y2 - y1; }
  double area() const { return std::max(0.0, width()) * std::max(0.0, height()); }
  bool valid() const { return x2 > x1 && y2 > y1; }

  bool operator==(const Box&) const = default;
};

inline Box union_box(const Box& a, const Box& b) {
  return {std::min(a.x1, b.x1), std::min(a.y1, b.y1), std::max(a.x2, b.x2),
          std::max(a.y2, b.y2)};
}

}  // namespace atl
