#include "pgl/sampler.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <istream>
#include <new>
#include <ostream>

#include "pgl/errors.hpp"
#include "pgl/parallel.hpp"

namespace pgl {

unsigned Word::plus_count() const noexcept {
  const std::uint64_t mask = k >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << k) - 1;
  return static_cast<unsigned>(std::popcount(bits & mask));
}

Word Word::from_symbols(std::initializer_list<int> symbols) {
  if (symbols.size() == 0 || symbols.size() > kMaxWordLength) {
    throw DomainError("word length must lie in [1, 60]");
  }
  Word w{static_cast<unsigned>(symbols.size()), 0};
  unsigned i = 0;
  for (int s : symbols) {
    if (s != 1 && s != -1) throw DomainError("word symbols must be +1 or -1");
    if (s == 1) w.bits |= std::uint64_t{1} << i;
    ++i;
  }
  return w;
}

PackedSequence::PackedSequence(std::vector<std::uint64_t> words, std::uint64_t length, std::uint64_t seed,
                               std::string schedule_label)
    : words_(std::move(words)), length_(length), seed_(seed), label_(std::move(schedule_label)) {
  if (words_.size() != (length_ + 63) / 64) throw DomainError("packed word count does not match length");
  if (length_ % 64 != 0 && !words_.empty()) {
    words_.back() &= (std::uint64_t{1} << (length_ % 64)) - 1;
  }
}

PackedSequence PackedSequence::from_symbols(std::span<const int> symbols, std::string label) {
  std::vector<std::uint64_t> words((symbols.size() + 63) / 64, 0);
  for (std::size_t p = 0; p < symbols.size(); ++p) {
    if (symbols[p] != 1 && symbols[p] != -1) throw DomainError("sequence symbols must be +1 or -1");
    if (symbols[p] == 1) words[p >> 6] |= std::uint64_t{1} << (p & 63);
  }
  return PackedSequence(std::move(words), symbols.size(), 0, std::move(label));
}

namespace {

constexpr std::size_t kWordsPerBlock = 256;

std::vector<std::uint64_t> allocate_words(std::uint64_t length) {
  if (length == 0) throw DomainError("sequence length must be >= 1");
  if (length > kMaxSequenceLength) {
    throw ResourceError("sequence of length " + std::to_string(length) + " exceeds the 2^36-position limit");
  }
  try {
    return std::vector<std::uint64_t>((length + 63) / 64, 0);
  } catch (const std::bad_alloc&) {
    throw ResourceError("cannot allocate a sequence of length " + std::to_string(length));
  }
}

}  // namespace

PackedSequence sample_sequence(const BiasSchedule& schedule, std::uint64_t length, std::uint64_t seed) {
  auto words = allocate_words(length);
  const CounterRng rng(seed);
  const std::size_t nwords = words.size();
  const std::size_t nblocks = (nwords + kWordsPerBlock - 1) / kWordsPerBlock;

  parallel::for_blocks(nblocks, [&](std::size_t b) {
    std::array<double, 64> gamma{};
    const std::size_t w_end = std::min(nwords, (b + 1) * kWordsPerBlock);
    for (std::size_t w = b * kWordsPerBlock; w < w_end; ++w) {
      const std::uint64_t first = std::uint64_t{w} * 64 + 1;
      const std::size_t count = static_cast<std::size_t>(std::min<std::uint64_t>(64, length - first + 1));
      schedule.fill(first, std::span<double>(gamma.data(), count));
      std::uint64_t acc = 0;
      for (std::size_t t = 0; t < count; ++t) {
        acc |= std::uint64_t{bernoulli_bit(rng.at(first + t), gamma[t])} << t;
      }
      words[w] = acc;
    }
  });
  return PackedSequence(std::move(words), length, seed, schedule.label());
}

Word sample_word(unsigned k, const CounterRng& rng, std::uint64_t counter) {
  if (k == 0 || k > kMaxWordLength) throw DomainError("word length must lie in [1, 60]");
  return Word{k, rng.at(counter) & ((std::uint64_t{1} << k) - 1)};
}

Word sample_word(unsigned k, std::uint64_t seed) { return sample_word(k, CounterRng(seed), 0); }

namespace {

void put_le(std::ostream& out, std::uint64_t v, int bytes) {
  for (int i = 0; i < bytes; ++i) out.put(static_cast<char>((v >> (8 * i)) & 0xFF));
}

std::uint64_t get_le(std::istream& in, int bytes) {
  std::uint64_t v = 0;
  for (int i = 0; i < bytes; ++i) {
    const int c = in.get();
    if (c == std::char_traits<char>::eof()) throw DomainError("truncated packed dump");
    v |= std::uint64_t(static_cast<unsigned char>(c)) << (8 * i);
  }
  return v;
}

}  // namespace

void write_packed(std::ostream& out, const PackedSequence& x, unsigned k) {
  out.write("PGL1", 4);
  put_le(out, k, 4);
  put_le(out, x.length(), 8);
  const std::uint64_t nbytes = (x.length() + 7) / 8;
  const auto words = x.words();
  for (std::uint64_t i = 0; i < nbytes; ++i) {
    out.put(static_cast<char>((words[i / 8] >> (8 * (i % 8))) & 0xFF));
  }
}

PackedDump read_packed(std::istream& in) {
  char magic[4];
  if (!in.read(magic, 4) || std::string_view(magic, 4) != "PGL1") throw DomainError("not a PGL1 dump");
  const auto k = static_cast<unsigned>(get_le(in, 4));
  const std::uint64_t length = get_le(in, 8);
  auto words = allocate_words(length);
  const std::uint64_t nbytes = (length + 7) / 8;
  for (std::uint64_t i = 0; i < nbytes; ++i) words[i / 8] |= get_le(in, 1) << (8 * (i % 8));
  return {PackedSequence(std::move(words), length, 0, "dump"), k};
}

}  // namespace pgl
