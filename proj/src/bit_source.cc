//
// Copyright 2026 The b2em Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#include "b2em/bit_source.h"

#include <sys/random.h>

#include <cassert>
#include <cerrno>
#include <cstdlib>
#include <cstdio>

namespace b2em {

bool BitSource::NextBit() { return NextBits(1) != 0; }

uint64_t BitSource::NextBits(int n) {
  assert(n >= 0 && n <= 64);
  if (n == 0) return 0;
  consumed_ += n;
  if (n <= available_) {
    const uint64_t out = n == 64 ? buffer_ : buffer_ >> (64 - n);
    buffer_ = n == 64 ? 0 : buffer_ << n;
    available_ -= n;
    return out;
  }
  // Drain what is left, then top up from a fresh word.
  const int head = available_;
  uint64_t out = head == 0 ? 0 : buffer_ >> (64 - head);
  const int tail = n - head;
  const uint64_t word = NextWord();
  out = (tail == 64 ? 0 : out << tail) | (word >> (64 - tail));
  buffer_ = tail == 64 ? 0 : word << tail;
  available_ = 64 - tail;
  return out;
}

void BitSource::NextBitString(long n, std::vector<uint64_t>& words) {
  while (n >= 64) {
    words.push_back(NextBits(64));
    n -= 64;
  }
  if (n > 0) words.push_back(NextBits(static_cast<int>(n)) << (64 - n));
}

uint64_t OsBitSource::NextWord() {
  if (next_ == kBufferWords) {
    char* p = reinterpret_cast<char*>(buffer_);
    size_t remaining = sizeof(buffer_);
    while (remaining > 0) {
      const ssize_t got = getrandom(p, remaining, 0);
      if (got < 0) {
        if (errno == EINTR) continue;
        std::perror("getrandom");
        std::abort();
      }
      p += got;
      remaining -= static_cast<size_t>(got);
    }
    next_ = 0;
  }
  return buffer_[next_++];
}

FixedBitSource::FixedBitSource(uint64_t value, int nbits) {
  bits_.reserve(nbits);
  for (int i = nbits - 1; i >= 0; --i) bits_.push_back((value >> i) & 1u);
}

uint64_t FixedBitSource::NextWord() {
  uint64_t word = 0;
  for (int i = 0; i < 64; ++i) {
    word <<= 1;
    if (pos_ < bits_.size() && bits_[pos_]) word |= 1u;
    ++pos_;
  }
  return word;
}

std::unique_ptr<BitSource> MakeBitSource(bool seeded, uint64_t seed) {
  if (seeded) return std::make_unique<SeededBitSource>(seed);
  return std::make_unique<OsBitSource>();
}

}  // namespace b2em
