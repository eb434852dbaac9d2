#include "orthospec/words.hpp"

#include <algorithm>

#include "orthospec/error.hpp"

namespace orthospec {

namespace {

char letter_char(Letter x) {
  const char base = static_cast<char>('a' + x / 2);
  return (x & 1u) ? static_cast<char>(base - 'a' + 'A') : base;
}

// Booth's least rotation.
std::size_t least_rotation(const std::vector<Letter>& s) {
  const std::size_t n = s.size();
  if (n == 0) return 0;
  std::vector<long> f(2 * n, -1);
  std::size_t k = 0;
  for (std::size_t j = 1; j < 2 * n; ++j) {
    const Letter sj = s[j % n];
    long i = f[j - k - 1];
    while (i != -1 && sj != s[(k + static_cast<std::size_t>(i) + 1) % n]) {
      if (sj < s[(k + static_cast<std::size_t>(i) + 1) % n]) k = j - static_cast<std::size_t>(i) - 1;
      i = f[static_cast<std::size_t>(i)];
    }
    if (i == -1 && sj != s[(k + static_cast<std::size_t>(i) + 1) % n]) {
      if (sj < s[(k + static_cast<std::size_t>(i) + 1) % n]) k = j;
      f[j - k] = -1;
    } else {
      f[j - k] = i + 1;
    }
  }
  return k;
}

}  // namespace

GroupWord reduce(std::span<const Letter> letters, int rank) { return GroupWord(letters, rank); }

GroupWord::GroupWord(std::span<const Letter> letters, int rank) : rank_(rank) {
  letters_.reserve(letters.size());
  for (Letter x : letters) {
    if (x >= 2 * rank) throw Error(ErrorKind::UnknownLetter, "letter outside the alphabet of rank " + std::to_string(rank));
    if (!letters_.empty() && letters_.back() == inverse_letter(x))
      letters_.pop_back();
    else
      letters_.push_back(x);
  }
}

GroupWord::GroupWord(std::initializer_list<Letter> letters, int rank)
    : GroupWord(std::span<const Letter>(letters.begin(), letters.size()), rank) {}

GroupWord GroupWord::parse(std::string_view text, int rank) {
  std::vector<Letter> letters;
  for (char ch : text) {
    int k;
    Letter x;
    if (ch >= 'a' && ch <= 'z') {
      k = ch - 'a';
      x = generator_letter(k);
    } else if (ch >= 'A' && ch <= 'Z') {
      k = ch - 'A';
      x = inverse_letter(generator_letter(k));
    } else {
      throw Error(ErrorKind::UnknownLetter, std::string("invalid character '") + ch + "' in word literal");
    }
    if (k >= rank) throw Error(ErrorKind::UnknownLetter, std::string("letter '") + ch + "' outside the alphabet");
    letters.push_back(x);
  }
  return GroupWord(std::span<const Letter>(letters), rank);
}

GroupWord GroupWord::inverse() const {
  std::vector<Letter> out(letters_.rbegin(), letters_.rend());
  for (auto& x : out) x = inverse_letter(x);
  GroupWord w;
  w.rank_ = rank_;
  w.letters_ = std::move(out);
  return w;
}

GroupWord GroupWord::operator*(const GroupWord& o) const {
  GroupWord w;
  w.rank_ = std::max(rank_, o.rank_);
  w.letters_ = letters_;
  std::size_t i = 0;
  while (i < o.letters_.size() && !w.letters_.empty() && w.letters_.back() == inverse_letter(o.letters_[i])) {
    w.letters_.pop_back();
    ++i;
  }
  w.letters_.insert(w.letters_.end(), o.letters_.begin() + static_cast<long>(i), o.letters_.end());
  return w;
}

GroupWord GroupWord::power(int k) const {
  GroupWord base = k < 0 ? inverse() : *this;
  GroupWord out;
  out.rank_ = rank_;
  for (int i = 0; i < std::abs(k); ++i) out = out * base;
  return out;
}

std::string GroupWord::str() const {
  if (letters_.empty()) return "1";
  std::string s;
  s.reserve(letters_.size());
  for (Letter x : letters_) s.push_back(letter_char(x));
  return s;
}

bool GroupWord::is_cyclically_reduced() const {
  return letters_.size() <= 1 || letters_.front() != inverse_letter(letters_.back());
}

bool operator<(const GroupWord& a, const GroupWord& b) {
  if (a.letters_.size() != b.letters_.size()) return a.letters_.size() < b.letters_.size();
  return a.letters_ < b.letters_;
}

std::size_t ConjClassHash::operator()(const ConjClass& c) const {
  std::size_t h = 1469598103934665603ull;
  for (Letter x : c.rep.letters()) {
    h ^= x;
    h *= 1099511628211ull;
  }
  return h;
}

GroupWord cyclic_reduce(const GroupWord& w) {
  const auto& s = w.letters();
  std::size_t lo = 0, hi = s.size();
  while (hi - lo >= 2 && s[lo] == inverse_letter(s[hi - 1])) {
    ++lo;
    --hi;
  }
  return GroupWord(std::span<const Letter>(s.data() + lo, hi - lo), w.rank());
}

ConjClass conj_class(const GroupWord& w) {
  const GroupWord cr = cyclic_reduce(w);
  if (cr.empty()) throw Error(ErrorKind::IdentityClass, "conj_class: trivial element");
  const auto& s = cr.letters();
  const std::size_t n = s.size();
  const std::size_t k = least_rotation(s);
  std::vector<Letter> rot(n);
  for (std::size_t i = 0; i < n; ++i) rot[i] = s[(k + i) % n];

  std::size_t period = n;
  for (std::size_t p = 1; p < n; ++p) {
    if (n % p != 0) continue;
    bool ok = true;
    for (std::size_t i = p; i < n && ok; ++i) ok = rot[i] == rot[i - p];
    if (ok) {
      period = p;
      break;
    }
  }
  ConjClass c;
  c.rep = GroupWord(std::span<const Letter>(rot), w.rank());
  c.power = static_cast<int>(n / period);
  c.root = GroupWord(std::span<const Letter>(rot.data(), period), w.rank());
  return c;
}

bool is_primitive(const ConjClass& c) { return c.power == 1; }

ConjClass inverse_class(const ConjClass& c) { return conj_class(c.rep.inverse()); }

void for_each_reduced_word(int rank, int max_len, const std::function<bool(const GroupWord&)>& visit) {
  // breadth-first keeps shortlex order
  std::vector<GroupWord> layer;
  layer.push_back(GroupWord(std::span<const Letter>(), rank));
  for (int len = 1; len <= max_len; ++len) {
    std::vector<GroupWord> next;
    for (const auto& w : layer) {
      for (int x = 0; x < 2 * rank; ++x) {
        const Letter l = static_cast<Letter>(x);
        if (!w.empty() && w.letters().back() == inverse_letter(l)) continue;
        GroupWord child = w * GroupWord({l}, rank);
        if (visit(child)) next.push_back(std::move(child));
      }
    }
    layer = std::move(next);
  }
}

std::vector<ConjClass> enumerate_conj_classes(int rank, int max_word_len) {
  std::vector<ConjClass> out;
  for_each_reduced_word(rank, max_word_len, [&](const GroupWord& w) {
    if (!w.is_cyclically_reduced()) return true;
    ConjClass c = conj_class(w);
    if (c.rep == w) out.push_back(std::move(c));
    return true;
  });
  return out;
}

}  // namespace orthospec
