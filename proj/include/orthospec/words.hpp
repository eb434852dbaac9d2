#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace orthospec {

/// Letter 2k is generator k, letter 2k+1 its inverse. The integer order is the
/// letter order used for canonical forms: g1 < g1^-1 < g2 < g2^-1 < ...
using Letter = std::uint8_t;

constexpr Letter inverse_letter(Letter x) { return static_cast<Letter>(x ^ 1u); }
constexpr Letter generator_letter(int k) { return static_cast<Letter>(2 * k); }

/// Freely reduced word over a free group of fixed rank.
class GroupWord {
 public:
  GroupWord() = default;

  /// Reduces `letters`; throws UnknownLetter for letters outside the rank.
  GroupWord(std::span<const Letter> letters, int rank);
  GroupWord(std::initializer_list<Letter> letters, int rank);

  /// Parses `a,b,c,...` / `A,B,C,...` literals (e.g. "abAB").
  static GroupWord parse(std::string_view text, int rank);

  int rank() const { return rank_; }
  std::size_t size() const { return letters_.size(); }
  bool empty() const { return letters_.empty(); }
  const std::vector<Letter>& letters() const { return letters_; }
  Letter operator[](std::size_t i) const { return letters_[i]; }

  GroupWord inverse() const;
  GroupWord operator*(const GroupWord& o) const;
  GroupWord power(int k) const;

  std::string str() const;

  bool is_cyclically_reduced() const;

  friend bool operator==(const GroupWord& a, const GroupWord& b) { return a.letters_ == b.letters_; }
  friend bool operator<(const GroupWord& a, const GroupWord& b);

 private:
  std::vector<Letter> letters_;
  int rank_ = 0;
};

/// Free homotopy class of an oriented closed curve.
struct ConjClass {
  GroupWord rep;   // least cyclic rotation of a cyclically reduced word
  int power = 1;   // rep = root^power
  GroupWord root;  // primitive

  std::string str() const { return rep.str(); }

  friend bool operator==(const ConjClass& a, const ConjClass& b) { return a.rep == b.rep; }
  friend bool operator<(const ConjClass& a, const ConjClass& b) { return a.rep < b.rep; }
};

struct ConjClassHash {
  std::size_t operator()(const ConjClass& c) const;
};

GroupWord reduce(std::span<const Letter> letters, int rank);
GroupWord cyclic_reduce(const GroupWord& w);

/// Throws IdentityClass if w is trivial after cyclic reduction.
ConjClass conj_class(const GroupWord& w);
bool is_primitive(const ConjClass& c);
ConjClass inverse_class(const ConjClass& c);

/// All classes with a cyclically reduced representative of length <= max_word_len,
/// ordered by (length, lexicographic).
std::vector<ConjClass> enumerate_conj_classes(int rank, int max_word_len);

/// Calls `visit` on every nonempty reduced word of length <= max_len in
/// shortlex order; returning false from `visit` prunes that word's extensions.
void for_each_reduced_word(int rank, int max_len, const std::function<bool(const GroupWord&)>& visit);

}  // namespace orthospec
