// Copyright (c) 2026 The seqpipe Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef SEQPIPE_POQ_HPP_
#define SEQPIPE_POQ_HPP_

#include <cstddef>
#include <map>
#include <set>
#include <utility>

namespace seqpipe {

/// Intermediate-state queue that is FIFO over micro-batches and LIFO over
/// segments: pop returns the largest segment of the smallest micro-batch
/// currently present (the tail of the earliest enqueued sequence). With one
/// segment per micro-batch this degenerates to a plain FIFO.
class PartiallyOrderedQueue {
 public:
  void push(int micro_batch, int segment);

  /// Returns (micro_batch, segment). Throws std::out_of_range when empty.
  std::pair<int, int> pop();

  bool empty() const { return size_ == 0; }
  std::size_t size() const { return size_; }

 private:
  std::map<int, std::set<int>> entries_;
  std::size_t size_ = 0;
};

}  // namespace seqpipe

#endif  // SEQPIPE_POQ_HPP_
