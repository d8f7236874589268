// Copyright (c) 2026 The seqpipe Authors
// SPDX-License-Identifier: Apache-2.0

#include "seqpipe/poq.hpp"

#include <stdexcept>
#include <string>

namespace seqpipe {

void PartiallyOrderedQueue::push(int micro_batch, int segment) {
  auto [it, inserted] = entries_[micro_batch].insert(segment);
  if (!inserted) {
    throw std::invalid_argument("duplicate queue entry (" + std::to_string(micro_batch) + ", " +
                                std::to_string(segment) + ")");
  }
  ++size_;
}

std::pair<int, int> PartiallyOrderedQueue::pop() {
  if (size_ == 0) throw std::out_of_range("pop on empty queue");
  auto it = entries_.begin();
  int micro_batch = it->first;
  auto seg_it = std::prev(it->second.end());
  int segment = *seg_it;
  it->second.erase(seg_it);
  if (it->second.empty()) entries_.erase(it);
  --size_;
  return {micro_batch, segment};
}

}  // namespace seqpipe
