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

#ifndef B2EM_BIT_SOURCE_H_
#define B2EM_BIT_SOURCE_H_

#include <cstdint>
#include <memory>
#include <random>
#include <vector>

namespace b2em {

// A stream of unbiased random bits, consumed strictly in order.
//
// Subclasses supply 64 bits at a time; the base class hands them out from the
// most significant bit down, so NextBits(n) and n calls to NextBit() read the
// same bits.
class BitSource {
 public:
  virtual ~BitSource() = default;

  bool NextBit();
  // The next n bits (n <= 64) as an integer, first bit most significant.
  uint64_t NextBits(int n);
  // Appends the next n bits to `words` packed MSB first; the final word is
  // left-aligned with zero padding.
  void NextBitString(long n, std::vector<uint64_t>& words);

  uint64_t bits_consumed() const { return consumed_; }

 protected:
  virtual uint64_t NextWord() = 0;

 private:
  uint64_t buffer_ = 0;
  int available_ = 0;
  uint64_t consumed_ = 0;
};

// Deterministic generator for tests and reproducible benchmarks. Not
// suitable for privacy-relevant sampling.
class SeededBitSource final : public BitSource {
 public:
  explicit SeededBitSource(uint64_t seed) : engine_(seed) {}

 protected:
  uint64_t NextWord() override { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

// Operating-system cryptographic randomness (getrandom(2)).
class OsBitSource final : public BitSource {
 public:
  OsBitSource() = default;

 protected:
  uint64_t NextWord() override;

 private:
  static constexpr int kBufferWords = 32;
  uint64_t buffer_[kBufferWords] = {};
  int next_ = kBufferWords;
};

// Replays a fixed bit sequence, then zeros. Used to enumerate sampler
// behaviour over every bit string.
class FixedBitSource final : public BitSource {
 public:
  explicit FixedBitSource(std::vector<bool> bits) : bits_(std::move(bits)) {}
  // The low `nbits` bits of `value`, most significant first.
  FixedBitSource(uint64_t value, int nbits);

  // True once more bits were consumed than the sequence holds.
  bool exhausted() const { return bits_consumed() > bits_.size(); }

 protected:
  uint64_t NextWord() override;

 private:
  std::vector<bool> bits_;
  size_t pos_ = 0;
};

std::unique_ptr<BitSource> MakeBitSource(bool seeded, uint64_t seed);

}  // namespace b2em

#endif  // B2EM_BIT_SOURCE_H_
