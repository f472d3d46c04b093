#include "sdp/field.hpp"

#include <bit>
#include <stdexcept>

namespace sdp {

SiteField::SiteField(const Window& w, bool fill) : win_(w) {
  const std::size_t words = static_cast<std::size_t>((w.site_count() + 63) / 64);
  words_.assign(words, fill ? ~std::uint64_t{0} : 0);
  if (fill) {
    // Clear the padding bits so count() and operator== stay exact.
    const int tail = static_cast<int>(w.site_count() & 63);
    if (tail != 0) words_.back() &= (std::uint64_t{1} << tail) - 1;
  }
}

std::int64_t SiteField::count() const {
  std::int64_t n = 0;
  for (std::uint64_t w : words_) n += std::popcount(w);
  return n;
}

void SiteField::check_same_window(const SiteField& other) const {
  if (!(win_ == other.win_)) {
    throw std::invalid_argument("SiteField: window mismatch");
  }
}

bool SiteField::le(const SiteField& other) const {
  check_same_window(other);
  for (std::size_t i = 0; i < words_.size(); ++i) {
    if (words_[i] & ~other.words_[i]) return false;
  }
  return true;
}

SiteField SiteField::operator|(const SiteField& other) const {
  check_same_window(other);
  SiteField out(win_);
  for (std::size_t i = 0; i < words_.size(); ++i) {
    out.words_[i] = words_[i] | other.words_[i];
  }
  return out;
}

bool operator==(const SiteField& a, const SiteField& b) {
  return a.win_ == b.win_ && a.words_ == b.words_;
}

SiteField SiteField::crop(const Window& sub) const {
  if (!win_.contains_window(sub)) {
    throw std::invalid_argument("SiteField::crop: sub-window not contained");
  }
  if (sub == win_) return *this;
  SiteField out(sub);
  for (int y = sub.origin.y; y < sub.origin.y + sub.height; ++y) {
    for (int x = sub.origin.x; x < sub.origin.x + sub.width; ++x) {
      const Site s{x, y};
      out.set(s, get(s));
    }
  }
  return out;
}

SiteField sample_field(const Window& w, double prob, std::uint64_t seed,
                       Stream stream, std::uint64_t replicate) {
  if (!(prob >= 0.0 && prob <= 1.0)) {
    throw std::invalid_argument("sample_field: prob must be in [0,1]");
  }
  SiteField f(w);
  if (prob == 0.0) return f;
  std::int64_t idx = 0;
  for (int y = w.origin.y; y < w.origin.y + w.height; ++y) {
    for (int x = w.origin.x; x < w.origin.x + w.width; ++x, ++idx) {
      if (uniform01(seed, stream, replicate, site_key(x, y)) < prob) {
        f.set_index(idx, true);
      }
    }
  }
  return f;
}

}  // namespace sdp
